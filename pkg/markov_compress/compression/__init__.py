"""
Refinement, quotient construction and reach analysis.
"""

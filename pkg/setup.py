from setuptools import setup, find_packages

setup(
    name="markov_compress",
    version="0.1.0",
    packages=find_packages(exclude=["tests"]),
    install_requires=[
        "pydantic==2.4.2",
        "pydantic-core==2.10.1",
        "pydantic-settings==2.1.0",
        "python-dotenv==1.0.0",
        "click>=8.2.0",
        "python-json-logger>=2.0.7",
        "numpy>=1.26.0",
        "graphviz>=0.20.1",
    ],
    extras_require={
        "test": ["pytest>=7.4.0", "hypothesis>=6.88.0"],
    },
    entry_points={
        "console_scripts": ["markov-compress=markov_compress.app:main"],
    },
    python_requires=">=3.10",
    author="VibeFlows",
    description="Compression of absorbing Markov chains by partition refinement",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3.11",
        "Operating System :: OS Independent",
    ],
)

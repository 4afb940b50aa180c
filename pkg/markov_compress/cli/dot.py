"""
Graphviz DOT export of chains and their partitions.
"""

from typing import Optional

from graphviz import Digraph

from markov_compress.compression.refinement import Partition, check_partition
from markov_compress.models.chain import ChainSpec, TargetSpec, format_numeric

# Fill colors by block id, reused cyclically
PALETTE = (
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
    "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
)


def export_dot(chain: ChainSpec, targets: TargetSpec, partition: Optional[Partition] = None) -> str:
    """DOT source for the chain.

    Target states are drawn as double circles; with a partition, every
    node is filled with the color of its block.
    """
    if partition is not None:
        check_partition(chain, partition)
    target_states = targets.target_states

    graph = Digraph(name="chain")
    graph.attr(rankdir="LR")
    for e, label in enumerate(chain.labels):
        attrs = {"shape": "doublecircle" if e in target_states else "circle"}
        if partition is not None:
            attrs["style"] = "filled"
            attrs["fillcolor"] = PALETTE[partition.assignment[e] % len(PALETTE)]
        graph.node(f"s{e}", label=label, **attrs)
    for e, row in enumerate(chain.rows):
        for destination, value in row:
            graph.edge(f"s{e}", f"s{destination}", label=format_numeric(value, chain.mode))
    return graph.source

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dgt.snapshot_graph import SnapshotGraph


def clique_edges(nodes):
    return [(i, j) for i in nodes for j in nodes if i != j]


@pytest.fixture(scope="session")
def two_cliques() -> SnapshotGraph:
    """Two disconnected 10-node bidirected cliques; planted partition is
    node // 10."""
    return SnapshotGraph.from_edges(
        clique_edges(range(10)) + clique_edges(range(10, 20))
    )


@pytest.fixture(scope="session")
def two_cliques_plant() -> dict:
    return {v: v // 10 for v in range(20)}

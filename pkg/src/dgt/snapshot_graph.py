"""Directed graph snapshots: loading, representation, diffing.

A dynamic network is a sequence of directed graph snapshots sharing one
node-id space.  External node labels (strings or ints) are mapped to dense
non-negative integer ids in order of first appearance and the mapping is
stable across every snapshot of a sequence.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field

from .errors import FormatError, PreconditionError

logger = logging.getLogger(__name__)

Label = object  # external node labels may be any hashable (str, int, ...)


class SnapshotGraph:
    """One directed snapshot: no self-edges, no duplicate edges.

    Immutable after construction; adjacency is kept both ways so that
    in-degree and out-degree queries are O(1) and neighbor scans are cheap.
    """

    __slots__ = (
        "index_t",
        "nodes",
        "out_adj",
        "in_adj",
        "out_sets",
        "n",
        "m",
        "max_node",
        "_node_set",
        "_cn_cache",
        "_edge_set",
    )

    def __init__(self, index_t: int, nodes: tuple[int, ...], out_adj: dict, in_adj: dict):
        self.index_t = index_t
        self.nodes = nodes
        self.out_adj = out_adj
        self.in_adj = in_adj
        self.out_sets = {i: frozenset(js) for i, js in out_adj.items()}
        self.n = len(nodes)
        self.m = sum(len(js) for js in out_adj.values())
        self.max_node = max(nodes) if nodes else -1
        self._node_set = frozenset(nodes)
        self._cn_cache: dict[tuple[int, int], int] = {}
        self._edge_set: frozenset | None = None

    @classmethod
    def from_edges(cls, edges, index_t: int = 0, nodes=()) -> "SnapshotGraph":
        """Build a snapshot from (source, target) integer id pairs.

        Duplicate edges collapse to one; self-edges are rejected.  `nodes`
        may declare additional (possibly isolated) node ids.
        """
        edge_set = set()
        for i, j in edges:
            if i == j:
                raise PreconditionError(f"self-edge on node {i} is not allowed")
            edge_set.add((i, j))
        node_ids = set(nodes)
        for i, j in edge_set:
            node_ids.add(i)
            node_ids.add(j)
        if not node_ids:
            raise PreconditionError("a snapshot must contain at least one node")
        out_adj = {v: [] for v in node_ids}
        in_adj = {v: [] for v in node_ids}
        for i, j in edge_set:
            out_adj[i].append(j)
            in_adj[j].append(i)
        out_adj = {v: tuple(sorted(js)) for v, js in out_adj.items()}
        in_adj = {v: tuple(sorted(js)) for v, js in in_adj.items()}
        return cls(index_t, tuple(sorted(node_ids)), out_adj, in_adj)

    def has_node(self, i: int) -> bool:
        return i in self._node_set

    def has_edge(self, i: int, j: int) -> bool:
        return i in self.out_sets and j in self.out_sets[i]

    def degree_out(self, i: int) -> int:
        return len(self.out_adj[i])

    def degree_in(self, i: int) -> int:
        return len(self.in_adj[i])

    def edge_set(self) -> frozenset:
        if self._edge_set is None:
            self._edge_set = frozenset(
                (i, j) for i, js in self.out_adj.items() for j in js
            )
        return self._edge_set

    def neighbors(self, i: int) -> tuple[int, ...]:
        """Distinct out- plus in-neighbors, sorted."""
        return tuple(sorted(set(self.out_adj[i]) | set(self.in_adj[i])))

    def __eq__(self, other):
        if not isinstance(other, SnapshotGraph):
            return NotImplemented
        return (
            self.index_t == other.index_t
            and self.nodes == other.nodes
            and self.out_adj == other.out_adj
        )

    def __hash__(self):
        return hash((self.index_t, self.nodes))

    def __repr__(self):
        return f"SnapshotGraph(t={self.index_t}, n={self.n}, m={self.m})"


@dataclass
class SnapshotSequence:
    """Ordered snapshots plus the shared label <-> id maps."""

    snapshots: list[SnapshotGraph]
    label_to_id: dict = field(default_factory=dict)
    id_to_label: list = field(default_factory=list)
    self_edges_dropped: int = 0
    duplicates_collapsed: int = 0

    @property
    def num_snapshots(self) -> int:
        return len(self.snapshots)

    @property
    def node_universe(self) -> int:
        """Count of distinct node ids across all snapshots."""
        return len(self.id_to_label)

    def id_of(self, label) -> int:
        return self.label_to_id[label]

    def label_of(self, node_id: int):
        return self.id_to_label[node_id]


@dataclass(frozen=True)
class ChangeStats:
    """Edge churn between two consecutive snapshots."""

    edges_added: int
    edges_deleted: int
    nodes_changed: int


def load_edge_stream(records, extra_nodes=None, undirected: bool = False) -> SnapshotSequence:
    """Build a SnapshotSequence from (source-label, target-label, ordinal) records.

    Node ids are assigned densely by first appearance in the record stream
    (then in `extra_nodes`).  Duplicate edges within a snapshot collapse to
    one; self-edges are dropped and counted.  Ordinals are densified: the
    k-th distinct ordinal (ascending) becomes snapshot k, so the loaded
    ordinals always form the contiguous range 0..M-1.

    `extra_nodes` is an optional iterable of (label, ordinal) declaring
    nodes that belong to a snapshot even without incident edges.  With
    `undirected=True` every record is materialized as two directed edges.

    Raises FormatError on empty input, negative ordinals, or a snapshot
    that ends up with no edges at all.
    """
    records = list(records)
    if not records:
        raise FormatError("no edges")
    extra_nodes = list(extra_nodes) if extra_nodes else []

    label_to_id: dict = {}
    id_to_label: list = []

    def intern(label) -> int:
        node = label_to_id.get(label)
        if node is None:
            node = len(id_to_label)
            label_to_id[label] = node
            id_to_label.append(label)
        return node

    raw: list[tuple[int, int, int]] = []
    ordinals = set()
    self_dropped = 0
    for src, dst, t in records:
        t = int(t)
        if t < 0:
            raise FormatError(f"negative snapshot ordinal {t}")
        i = intern(src)
        j = intern(dst)
        ordinals.add(t)
        if i == j:
            self_dropped += 1
            continue
        raw.append((i, j, t))

    declared: dict[int, set[int]] = {}
    for label, t in extra_nodes:
        t = int(t)
        if t < 0:
            raise FormatError(f"negative snapshot ordinal {t} in node list")
        ordinals.add(t)
        declared.setdefault(t, set()).add(intern(label))

    if self_dropped:
        logger.warning("dropped %d self-edge(s) from input", self_dropped)

    dense = {t: k for k, t in enumerate(sorted(ordinals))}
    edges_by_t: dict[int, set[tuple[int, int]]] = {k: set() for k in range(len(dense))}
    duplicates = 0
    for i, j, t in raw:
        k = dense[t]
        bucket = edges_by_t[k]
        before = len(bucket)
        bucket.add((i, j))
        if undirected:
            bucket.add((j, i))
            duplicates += before + 2 - len(bucket)
        else:
            duplicates += before + 1 - len(bucket)

    snapshots = []
    for k in range(len(dense)):
        edges = edges_by_t[k]
        if not edges:
            raise FormatError(f"snapshot {k} has no edges")
        extras = {v for t, vs in declared.items() if dense[t] == k for v in vs}
        snapshots.append(SnapshotGraph.from_edges(edges, index_t=k, nodes=extras))

    return SnapshotSequence(
        snapshots=snapshots,
        label_to_id=label_to_id,
        id_to_label=id_to_label,
        self_edges_dropped=self_dropped,
        duplicates_collapsed=duplicates,
    )


def common_neighbors(g: SnapshotGraph, i: int, j: int) -> int:
    """Number of nodes receiving a direct edge from both i and j.

    Symmetric in (i, j); served from a lazily built per-snapshot cache
    keyed by the unordered pair, because the game loop asks for the same
    pairs many times.
    """
    if i == j:
        raise PreconditionError("common_neighbors requires i != j")
    if not g.has_node(i) or not g.has_node(j):
        raise PreconditionError(f"nodes {i}, {j} must both be in the snapshot")
    key = (i, j) if i < j else (j, i)
    w = g._cn_cache.get(key)
    if w is None:
        w = len(g.out_sets[i] & g.out_sets[j])
        g._cn_cache[key] = w
    return w


def diff(prev: SnapshotGraph, next: SnapshotGraph) -> ChangeStats:
    """Edge additions/deletions between consecutive snapshots and the
    number of nodes incident to any changed edge."""
    e_prev = prev.edge_set()
    e_next = next.edge_set()
    added = e_next - e_prev
    deleted = e_prev - e_next
    touched = set()
    for i, j in added:
        touched.add(i)
        touched.add(j)
    for i, j in deleted:
        touched.add(i)
        touched.add(j)
    return ChangeStats(len(added), len(deleted), len(touched))


def parse_edge_file(path, snapshot_by: str = "column"):
    """Parse a whitespace-separated edge-list file into loader records.

    Each non-comment line is `source target snapshot [timestamp]`.  With
    snapshot_by="window:<W>" the last column is read as a timestamp and
    bucketed into windows of W seconds starting at the earliest timestamp
    (the snapshot column may then be omitted entirely).
    """
    window = None
    if snapshot_by != "column":
        if not snapshot_by.startswith("window:"):
            raise FormatError(f"unknown snapshot-by mode {snapshot_by!r}")
        try:
            window = float(snapshot_by.split(":", 1)[1])
        except ValueError as exc:
            raise FormatError(f"bad window width in {snapshot_by!r}") from exc
        if window <= 0:
            raise FormatError("window width must be positive")

    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) < 3:
                raise FormatError(f"{path}:{lineno}: expected at least 3 columns")
            rows.append((lineno, parts))

    if window is not None:
        stamps = []
        for lineno, parts in rows:
            try:
                stamps.append(float(parts[-1]))
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: bad timestamp {parts[-1]!r}") from exc
        t0 = min(stamps) if stamps else 0.0
        return [
            (parts[0], parts[1], int((ts - t0) // window))
            for (lineno, parts), ts in zip(rows, stamps)
        ]

    records = []
    for lineno, parts in rows:
        try:
            t = int(parts[2])
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: bad snapshot ordinal {parts[2]!r}") from exc
        records.append((parts[0], parts[1], t))
    return records


def parse_node_file(path):
    """Parse an optional node-list file: lines of `label snapshot`."""
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise FormatError(f"{path}:{lineno}: expected `label snapshot`")
            try:
                t = int(parts[1])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: bad snapshot ordinal {parts[1]!r}") from exc
            entries.append((parts[0], t))
    return entries


def read_edge_list(path, snapshot_by: str = "column", extra_nodes=None,
                   undirected: bool = False) -> SnapshotSequence:
    """Parse an edge-list file and load it into a SnapshotSequence."""
    return load_edge_stream(
        parse_edge_file(path, snapshot_by=snapshot_by),
        extra_nodes=extra_nodes,
        undirected=undirected,
    )


def write_edge_list(seq: SnapshotSequence, path) -> None:
    """Serialize a sequence back to the edge-list text format.

    Labels must not contain whitespace (the format is whitespace-separated).
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for g in seq.snapshots:
            for i in g.nodes:
                for j in g.out_adj[i]:
                    fh.write(f"{seq.label_of(i)} {seq.label_of(j)} {g.index_t}\n")


def churn_rows(seq: SnapshotSequence) -> list[tuple[int, int, int, int]]:
    """One (t, e_plus, e_minus, n_changed) row per consecutive snapshot
    pair; t is the ordinal of the later snapshot."""
    rows = []
    for t in range(1, seq.num_snapshots):
        stats = diff(seq.snapshots[t - 1], seq.snapshots[t])
        rows.append((t, stats.edges_added, stats.edges_deleted, stats.nodes_changed))
    return rows


def write_churn_report(seq: SnapshotSequence, path) -> None:
    """Write the churn CSV: header `t,e_plus,e_minus,n_changed`."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "e_plus", "e_minus", "n_changed"])
        for row in churn_rows(seq):
            writer.writerow(row)

"""The community formation game on one snapshot.

Each node is a selfish agent holding a set of community labels.  Agents are
visited in a fresh random permutation per pass; each plays the single
action (join / leave / switch / no-op) with the highest strictly positive
utility change, applied immediately.  Play stops when the fraction of
agents that changed strategy in a pass drops below the configured
threshold or when the pass cap is hit.  Agents may hold several labels
while the game runs; the returned partition collapses each agent to its
single best-gain community.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np

from .errors import AuditError, ConfigError, PreconditionError
from .gain_functions import (
    GAIN_KINDS,
    GainContext,
    _contrib,
    _marginal_join,
    _marginal_leave,
    coverage_counts,
    gain_modularity,
    gain_similarity,
    utility_delta,
)
from .snapshot_graph import SnapshotGraph


@dataclass(frozen=True)
class Join:
    community: int


@dataclass(frozen=True)
class Leave:
    community: int


@dataclass(frozen=True)
class Switch:
    out_community: int
    in_community: int


@dataclass(frozen=True)
class NoOp:
    pass


NOOP = NoOp()

Action = Join | Leave | Switch | NoOp


def action_kind(action: Action) -> str:
    if isinstance(action, Join):
        return "join"
    if isinstance(action, Leave):
        return "leave"
    if isinstance(action, Switch):
        return "switch"
    return "noop"


@dataclass(frozen=True)
class GameConfig:
    """Knobs of one game run.

    The random generator is PCG64 seeded with `rng_seed`, so identical
    (graph, initial structure, config) triples replay identically on any
    platform.
    """

    gain: str = "similarity"
    max_passes: int = 8
    change_fraction_threshold: float = 0.05
    rng_seed: int = 0
    allow_switch: bool = True

    def __post_init__(self):
        if self.gain not in GAIN_KINDS:
            raise ConfigError(f"gain must be one of {GAIN_KINDS}, got {self.gain!r}")
        if self.max_passes < 1:
            raise ConfigError("max_passes must be >= 1")
        if not 0.0 <= self.change_fraction_threshold <= 1.0:
            raise ConfigError("change_fraction_threshold must be in [0, 1]")


class CommunityStructure:
    """Mutable communities <-> memberships bimap with a fresh-id counter.

    Ids are never reused: every new community draws from `next_id`, which
    only grows, including across snapshots when structures are carried
    forward.  Empty communities are removed as soon as their last member
    leaves.  A sorted member list is kept per community so utility sums
    run in a canonical order: communities with equal member sets then give
    bitwise-equal contributions and tie-breaks stay meaningful.
    """

    __slots__ = ("communities", "memberships", "next_id", "_member_lists")

    def __init__(self, next_id: int = 0):
        self.communities: dict[int, set[int]] = {}
        self.memberships: dict[int, set[int]] = {}
        self.next_id = next_id
        self._member_lists: dict[int, list[int]] = {}

    @classmethod
    def from_singletons(cls, nodes, next_id: int = 0) -> "CommunityStructure":
        s = cls(next_id)
        for v in sorted(nodes):
            s.add_agent(v)
            s.create_community([v])
        return s

    @classmethod
    def from_memberships(cls, memberships: dict, next_id: int) -> "CommunityStructure":
        """Rebuild a structure from agent -> label-set maps; every label
        must be below `next_id` (ids come from earlier allocations)."""
        s = cls(next_id)
        for v, ks in memberships.items():
            s.memberships[v] = set(ks)
            for k in ks:
                if k >= next_id:
                    raise PreconditionError(f"label {k} is >= next_id {next_id}")
                s.communities.setdefault(k, set()).add(v)
        s._member_lists = {k: sorted(vs) for k, vs in s.communities.items()}
        return s

    def add_agent(self, agent: int) -> None:
        self.memberships.setdefault(agent, set())

    def create_community(self, members) -> int:
        members = set(members)
        if not members:
            raise PreconditionError("a new community needs at least one member")
        k = self.next_id
        self.next_id += 1
        self.communities[k] = members
        self._member_lists[k] = sorted(members)
        for v in members:
            self.memberships.setdefault(v, set()).add(k)
        return k

    def fresh_id(self) -> int:
        """Consume an id without materializing a community (used by the
        hard assignment for label-less agents)."""
        k = self.next_id
        self.next_id += 1
        return k

    def join(self, agent: int, community: int) -> None:
        members = self.communities.get(community)
        if members is None:
            raise PreconditionError(f"no community {community}")
        if agent in members:
            raise PreconditionError(f"agent {agent} already in community {community}")
        members.add(agent)
        bisect.insort(self._member_lists[community], agent)
        self.memberships.setdefault(agent, set()).add(community)

    def leave(self, agent: int, community: int) -> None:
        members = self.communities.get(community)
        if members is None or agent not in members:
            raise PreconditionError(f"agent {agent} not in community {community}")
        members.discard(agent)
        ordered = self._member_lists[community]
        del ordered[bisect.bisect_left(ordered, agent)]
        self.memberships[agent].discard(community)
        if not members:
            del self.communities[community]
            del self._member_lists[community]

    def apply(self, agent: int, action: Action) -> None:
        if isinstance(action, NoOp):
            return
        if isinstance(action, Join):
            self.join(agent, action.community)
        elif isinstance(action, Leave):
            self.leave(agent, action.community)
        elif isinstance(action, Switch):
            self.leave(agent, action.out_community)
            self.join(agent, action.in_community)
        else:
            raise PreconditionError(f"unknown action {action!r}")

    def labels(self, agent: int) -> set[int]:
        return self.memberships.get(agent, set())

    def members_sorted(self, community: int) -> list[int]:
        """Members of one community in ascending id order."""
        return self._member_lists[community]

    def membership_snapshot(self) -> dict[int, frozenset]:
        return {v: frozenset(ks) for v, ks in self.memberships.items()}

    def copy(self) -> "CommunityStructure":
        dup = CommunityStructure(self.next_id)
        dup.communities = {k: set(vs) for k, vs in self.communities.items()}
        dup.memberships = {v: set(ks) for v, ks in self.memberships.items()}
        dup._member_lists = {k: list(vs) for k, vs in self._member_lists.items()}
        return dup

    def audit(self) -> list[str]:
        """Consistency report; empty when the structure is sound."""
        problems = []
        for k, members in self.communities.items():
            if not members:
                problems.append(f"community {k} is empty")
            if self._member_lists.get(k) != sorted(members):
                problems.append(f"community {k} member order cache is stale")
            for v in members:
                if k not in self.memberships.get(v, set()):
                    problems.append(f"agent {v} in community {k} but label missing")
        for v, ks in self.memberships.items():
            for k in ks:
                if v not in self.communities.get(k, set()):
                    problems.append(f"agent {v} holds label {k} but is not a member")
        for k in self.communities:
            if k >= self.next_id:
                problems.append(f"community id {k} is >= next_id {self.next_id}")
        return problems

    def __repr__(self):
        return (
            f"CommunityStructure({len(self.communities)} communities, "
            f"{len(self.memberships)} agents)"
        )


def audit(structure: CommunityStructure) -> list[str]:
    """Verify the bimap invariant and absence of empty communities."""
    return structure.audit()


@dataclass
class SnapshotResult:
    """Outcome of one snapshot's game.

    `partition` is the final disjoint assignment.  `memberships` preserves
    the evolved multi-label state the game ended in (used to seed later
    snapshots), and the trace fields record per-pass telemetry.
    """

    partition: dict[int, int]
    passes_used: int
    actions_taken: dict[str, int]
    utility_trace: list[float]
    changed_trace: list[int] = field(default_factory=list)
    potential_trace: list[float] = field(default_factory=list)
    games_played: int = 0
    max_candidates: int = 0
    memberships: dict[int, frozenset] = field(default_factory=dict)
    next_id: int = 0


def _candidate_communities(ctx: GainContext, agent: int, structure: CommunityStructure) -> list[int]:
    """Join targets: communities hosting at least one in- or out-neighbor,
    excluding communities the agent already holds."""
    held = structure.memberships.get(agent, set())
    g = ctx.graph
    seen: set[int] = set()
    for v in g.out_adj[agent]:
        seen.update(structure.memberships.get(v, ()))
    for v in g.in_adj[agent]:
        seen.update(structure.memberships.get(v, ()))
    return sorted(seen - held)


_KIND_RANK = {"switch": 3, "join": 2, "leave": 1}


def _best_response(ctx: GainContext, agent: int, structure: CommunityStructure,
                   config: GameConfig) -> tuple[Action, float, int]:
    """Returns (action, delta, candidates_considered); NoOp when no action
    has a strictly positive utility change."""
    gain = config.gain
    m = ctx.m
    held = structure.memberships.get(agent, set())
    n_labels = len(held)
    join_ids = _candidate_communities(ctx, agent, structure)

    join_loss = (n_labels + 1) / m - n_labels / m
    leave_loss = (n_labels - 1) / m - n_labels / m

    if gain == "similarity":
        cnt = coverage_counts(structure, agent, held)

        def join_gain(k: int) -> float:
            return _marginal_join(ctx, agent, structure.members_sorted(k), cnt) / m

        def leave_gain(k: int) -> float:
            return _marginal_leave(ctx, agent, structure.members_sorted(k), cnt) / m
    else:
        def join_gain(k: int) -> float:
            return _contrib(ctx, agent, k, structure, gain) / ctx.twom

        leave_gain = join_gain

    best_join: tuple[float, int] | None = None
    for k in join_ids:
        delta = join_gain(k) - join_loss
        if best_join is None or delta > best_join[0]:
            best_join = (delta, k)

    best_leave: tuple[float, int] | None = None
    for k in sorted(held):
        delta = -leave_gain(k) - leave_loss
        if best_leave is None or delta > best_leave[0]:
            best_leave = (delta, k)

    candidates: list[tuple[float, int, int, Action]] = []
    # key: (delta, kind rank, -community id); ties prefer switch > join >
    # leave, then the lowest community id.
    if best_join is not None:
        candidates.append((best_join[0], _KIND_RANK["join"], -best_join[1], Join(best_join[1])))
    if best_leave is not None:
        candidates.append((best_leave[0], _KIND_RANK["leave"], -best_leave[1], Leave(best_leave[1])))
    if config.allow_switch and best_join is not None and best_leave is not None:
        switch = Switch(best_leave[1], best_join[1])
        delta = utility_delta(ctx, agent, switch, structure, gain)
        candidates.append((delta, _KIND_RANK["switch"], -switch.in_community, switch))

    considered = len(join_ids) + n_labels + 1 + (1 if config.allow_switch else 0)
    if not candidates:
        return NOOP, 0.0, considered
    delta, _, _, action = max(candidates)
    if delta <= 0.0:
        return NOOP, 0.0, considered
    return action, delta, considered


def best_response(ctx: GainContext, agent: int, structure: CommunityStructure,
                  config: GameConfig) -> Action:
    """The agent's best action against the current structure, or NoOp when
    nothing strictly improves its utility."""
    if not ctx.graph.has_node(agent):
        raise PreconditionError(f"agent {agent} is not in the snapshot")
    return _best_response(ctx, agent, structure, config)[0]


def _totals(ctx: GainContext, agents, structure: CommunityStructure, gain: str) -> tuple[float, float]:
    """(total gain, total loss) over all agents."""
    gain_of = gain_similarity if gain == "similarity" else gain_modularity
    total_gain = 0.0
    total_loss = 0.0
    m = ctx.m
    for agent in agents:
        held = structure.memberships.get(agent, ())
        total_gain += gain_of(ctx, agent, held, structure)
        total_loss += len(held) / m
    return total_gain, total_loss


def potential(ctx: GainContext, structure: CommunityStructure, rho_g: float,
              rho_l: float, gain: str = "similarity") -> float:
    """Weighted loss-minus-gain aggregate over all agents, a diagnostic
    for tracking the game's global progress."""
    if rho_g <= 0 or rho_l <= 0:
        raise PreconditionError("rho_g and rho_l must be positive")
    total_gain, total_loss = _totals(ctx, ctx.graph.nodes, structure, gain)
    return rho_l * total_loss - rho_g * total_gain


def is_local_equilibrium(ctx: GainContext, structure: CommunityStructure,
                         config: GameConfig) -> bool:
    """True iff no agent has any strictly improving action left."""
    for agent in ctx.graph.nodes:
        if not isinstance(_best_response(ctx, agent, structure, config)[0], NoOp):
            return False
    return True


def _hard_assignment(ctx: GainContext, structure: CommunityStructure, gain: str) -> dict[int, int]:
    """Collapse each agent to its single highest-contribution community;
    agents holding no labels get a fresh singleton id."""
    partition: dict[int, int] = {}
    for agent in ctx.graph.nodes:
        held = structure.memberships.get(agent, set())
        if not held:
            partition[agent] = structure.fresh_id()
            continue
        best_k = None
        best_raw = 0.0
        for k in sorted(held):
            raw = _contrib(ctx, agent, k, structure, gain)
            if best_k is None or raw > best_raw:
                best_k = k
                best_raw = raw
        partition[agent] = best_k
    return partition


def run_snapshot(graph: SnapshotGraph, initial: CommunityStructure, config: GameConfig,
                 ctx: GainContext | None = None) -> tuple[CommunityStructure, SnapshotResult]:
    """Play the community formation game to convergence on one snapshot.

    Agents are visited once per pass in a fresh uniform permutation and
    each applied action must strictly improve the acting agent's utility
    (violations raise AuditError: they would mean the engine's incremental
    deltas disagree with the action taken).  Returns the evolved
    multi-membership structure and the hard-assigned result.
    """
    problems = initial.audit()
    if problems:
        raise AuditError("; ".join(problems))
    if ctx is None:
        ctx = GainContext(graph)
    elif ctx.graph is not graph:
        raise PreconditionError("ctx was built for a different snapshot")

    structure = initial.copy()
    for agent in graph.nodes:
        structure.add_agent(agent)

    rng = np.random.Generator(np.random.PCG64(config.rng_seed))
    agents = graph.nodes
    n = len(agents)
    actions_taken = {"join": 0, "leave": 0, "switch": 0, "noop": 0}
    utility_trace: list[float] = []
    changed_trace: list[int] = []
    potential_trace: list[float] = []
    games_played = 0
    max_candidates = 0
    passes_used = 0

    for _ in range(config.max_passes):
        order = rng.permutation(n)
        changed = 0
        for idx in order:
            agent = agents[idx]
            action, delta, considered = _best_response(ctx, agent, structure, config)
            games_played += 1
            if considered > max_candidates:
                max_candidates = considered
            if isinstance(action, NoOp):
                actions_taken["noop"] += 1
                continue
            if delta <= 0.0:
                raise AuditError(
                    f"non-improving action {action!r} selected for agent {agent}"
                )
            structure.apply(agent, action)
            actions_taken[action_kind(action)] += 1
            changed += 1
        passes_used += 1
        total_gain, total_loss = _totals(ctx, agents, structure, config.gain)
        utility_trace.append(total_gain - total_loss)
        potential_trace.append(total_loss - total_gain)
        changed_trace.append(changed)
        if changed / n < config.change_fraction_threshold:
            break

    partition = _hard_assignment(ctx, structure, config.gain)
    result = SnapshotResult(
        partition=partition,
        passes_used=passes_used,
        actions_taken=actions_taken,
        utility_trace=utility_trace,
        changed_trace=changed_trace,
        potential_trace=potential_trace,
        games_played=games_played,
        max_candidates=max_candidates,
        memberships=structure.membership_snapshot(),
        next_id=structure.next_id,
    )
    return structure, result

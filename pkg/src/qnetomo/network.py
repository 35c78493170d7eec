"""Network model: Werner links, graphs, paths, measurement tasks, and monitoring plans.

A link distributes two-qubit Werner states parameterized by a single noise
parameter in [0, 1].  Monitoring plans bundle measurement tasks (scheme plus
path) and carry channel-use accounting so that strategies can be compared on
equal resource footing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence


class Scheme(Enum):
    """Measurement scheme run over a path.

    LZM: local Z-basis measurements at both path endpoints.
    JBM: joint Bell-state measurement at one endpoint on two fused path copies.
    PEM: Bell measurement at one endpoint assisted by a noiseless pre-shared pair.
    """

    LZM = "LZM"
    JBM = "JBM"
    PEM = "PEM"


BUILTIN_PLAN_KINDS = ("JBM2", "JBM3", "HYB2", "HYB3")


@dataclass(frozen=True)
class WernerLink:
    """A network link distributing Werner states with parameter ``w``."""

    id: str
    w: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.w <= 1.0:
            raise ValueError(f"link {self.id!r}: w={self.w} outside [0, 1]")


@dataclass(frozen=True)
class NetworkGraph:
    """Undirected graph of nodes, Werner links, and monitor placements.

    ``endpoints`` maps each link id to its node pair.  Instances are treated
    as immutable after construction.
    """

    nodes: frozenset
    links: tuple
    endpoints: Mapping[str, tuple]
    monitors: frozenset

    def __post_init__(self) -> None:
        ids = [l.id for l in self.links]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate link ids")
        if set(self.endpoints) != set(ids):
            raise ValueError("endpoints must cover exactly the link ids")
        for lid, (a, b) in self.endpoints.items():
            if a not in self.nodes or b not in self.nodes:
                raise ValueError(f"link {lid!r} endpoint not a graph node")
            if a == b:
                raise ValueError(f"link {lid!r} is a self-loop")
        if not self.monitors <= self.nodes:
            raise ValueError("monitors must be a subset of nodes")

    def link(self, link_id: str) -> WernerLink:
        for l in self.links:
            if l.id == link_id:
                return l
        raise KeyError(link_id)

    def params(self) -> dict:
        """Link id to Werner parameter, for the whole graph."""
        return {l.id: l.w for l in self.links}


@dataclass(frozen=True)
class Path:
    """Ordered simple path of link ids with its two terminal nodes."""

    link_ids: tuple
    endpoints: tuple

    def __post_init__(self) -> None:
        if len(self.link_ids) < 1:
            raise ValueError("path needs at least one link")
        if len(set(self.link_ids)) != len(self.link_ids):
            raise ValueError("path repeats a link")


def trace_path(graph: NetworkGraph, link_ids: Sequence[str]) -> Path:
    """Build a Path from consecutive link ids, validating contiguity.

    Raises ValueError for unknown links, repeated links, branching joints,
    or link sequences that do not form a simple path.
    """
    ids = tuple(link_ids)
    if not ids:
        raise ValueError("empty link sequence")
    if len(set(ids)) != len(ids):
        raise ValueError("path repeats a link")
    try:
        ends = [graph.endpoints[i] for i in ids]
    except KeyError as exc:
        raise ValueError(f"unknown link {exc.args[0]!r}") from None
    if len(ids) == 1:
        return Path(ids, tuple(ends[0]))
    shared = set(ends[0]) & set(ends[1])
    if len(shared) != 1:
        raise ValueError("first two links must share exactly one node")
    (pivot,) = shared
    start = ends[0][0] if ends[0][1] == pivot else ends[0][1]
    seen = [start, pivot]
    current = pivot
    for pair in ends[1:]:
        if current not in pair:
            raise ValueError("links are not contiguous")
        nxt = pair[0] if pair[1] == current else pair[1]
        if nxt in seen:
            raise ValueError("path revisits a node")
        seen.append(nxt)
        current = nxt
    return Path(ids, (start, current))


@dataclass(frozen=True)
class MeasurementTask:
    """One scheme executed over one path."""

    scheme: Scheme
    path: Path

    @property
    def direct(self) -> bool:
        """True for single-link paths (direct monitoring)."""
        return len(self.path.link_ids) == 1


@dataclass(frozen=True)
class MonitoringPlan:
    """Named, ordered list of measurement tasks.

    Task order matters: sequential estimation resolves each indirect task
    using link estimates produced by earlier tasks.
    """

    name: str
    tasks: tuple

    def covered_links(self) -> frozenset:
        out = set()
        for t in self.tasks:
            out.update(t.path.link_ids)
        return frozenset(out)


@dataclass(frozen=True)
class UsageLedger:
    """Per-link channel-use counts for one round of a plan.

    Pre-shared Bell pairs consumed by PEM tasks are tracked separately and
    never enter ``total``: only network-link uses are counted there.
    """

    uses: Mapping[str, int]
    total: int
    preshared_pairs: int = 0

    def __post_init__(self) -> None:
        if self.total != sum(self.uses.values()):
            raise ValueError("ledger total must equal the sum of per-link uses")
        if any(c < 0 for c in self.uses.values()) or self.preshared_pairs < 0:
            raise ValueError("ledger counts must be nonnegative")


def _task_monitor_ok(task: MeasurementTask, graph: NetworkGraph) -> bool:
    a, b = task.path.endpoints
    if task.scheme is Scheme.LZM:
        return a in graph.monitors and b in graph.monitors
    return a in graph.monitors or b in graph.monitors


def validate_plan(
    graph: NetworkGraph,
    plan: MonitoringPlan,
    targets: Iterable[str] | None = None,
) -> None:
    """Check a plan against a graph; raise ValueError on any violation.

    Checks per-task path contiguity, monitor requirements (LZM needs monitors
    at both path endpoints, JBM and PEM at one), coverage of the target link
    set, and in-order solvability: each task may contain at most one link not
    covered by earlier tasks.
    """
    target_set = set(targets) if targets is not None else {l.id for l in graph.links}
    known: set = set()
    for idx, task in enumerate(plan.tasks):
        traced = trace_path(graph, task.path.link_ids)
        if set(traced.endpoints) != set(task.path.endpoints):
            raise ValueError(f"task {idx}: stored endpoints do not match the graph")
        if not _task_monitor_ok(task, graph):
            raise ValueError(
                f"task {idx} ({task.scheme.value}): monitor requirement not met"
            )
        unknown = [l for l in task.path.link_ids if l not in known]
        if len(unknown) > 1:
            raise ValueError(
                f"task {idx}: {len(unknown)} unresolved links; plan order is not solvable"
            )
        known.update(task.path.link_ids)
    if plan.covered_links() != frozenset(target_set):
        raise ValueError("plan does not cover exactly the target links")


def build_star(
    n_leaves: int,
    link_params: Sequence[float],
    monitors: Iterable[str] | None = None,
) -> NetworkGraph:
    """Star graph: hub v0, leaves v1..vn, link e{i} joining v0 to v{i+1}.

    Monitors default to all leaves, which admits every built-in plan; pass an
    explicit subset to model a fixed monitor budget.
    """
    if n_leaves < 2:
        raise ValueError("a star needs at least 2 leaves")
    if len(link_params) != n_leaves:
        raise ValueError(
            f"expected {n_leaves} link parameters, got {len(link_params)}"
        )
    leaves = [f"v{i + 1}" for i in range(n_leaves)]
    nodes = frozenset(["v0", *leaves])
    links = tuple(WernerLink(f"e{i}", w) for i, w in enumerate(link_params))
    endpoints = {f"e{i}": ("v0", leaves[i]) for i in range(n_leaves)}
    mon = frozenset(leaves) if monitors is None else frozenset(monitors)
    return NetworkGraph(nodes=nodes, links=links, endpoints=endpoints, monitors=mon)


def _require_three_leaf_star(graph: NetworkGraph) -> None:
    expected_nodes = {"v0", "v1", "v2", "v3"}
    expected = {f"e{i}": ("v0", f"v{i + 1}") for i in range(3)}
    if set(graph.nodes) != expected_nodes or set(graph.endpoints) != set(expected):
        raise ValueError("built-in plans require the 4-node star with links e0, e1, e2")
    for lid, pair in expected.items():
        if set(graph.endpoints[lid]) != set(pair):
            raise ValueError("built-in plans require the 4-node star with links e0, e1, e2")


def builtin_plan(kind: str, graph: NetworkGraph) -> MonitoringPlan:
    """One of the four star monitoring strategies: JBM2, JBM3, HYB2, HYB3.

    JBM2: JBM direct on e0 and e1, JBM indirect over (e0, e2).
    JBM3: JBM direct on each link.
    HYB2: JBM direct on e0, JBM indirect over (e0, e2), LZM indirect over (e0, e1).
    HYB3: JBM direct on e0, LZM indirect over (e0, e1) and over (e0, e2).
    """
    if kind not in BUILTIN_PLAN_KINDS:
        raise ValueError(f"unknown plan kind {kind!r}")
    _require_three_leaf_star(graph)

    def task(scheme: Scheme, *link_ids: str) -> MeasurementTask:
        return MeasurementTask(scheme=scheme, path=trace_path(graph, link_ids))

    if kind == "JBM2":
        tasks = (
            task(Scheme.JBM, "e0"),
            task(Scheme.JBM, "e1"),
            task(Scheme.JBM, "e0", "e2"),
        )
    elif kind == "JBM3":
        tasks = (
            task(Scheme.JBM, "e0"),
            task(Scheme.JBM, "e1"),
            task(Scheme.JBM, "e2"),
        )
    elif kind == "HYB2":
        tasks = (
            task(Scheme.JBM, "e0"),
            task(Scheme.JBM, "e0", "e2"),
            task(Scheme.LZM, "e0", "e1"),
        )
    else:
        tasks = (
            task(Scheme.JBM, "e0"),
            task(Scheme.LZM, "e0", "e1"),
            task(Scheme.LZM, "e0", "e2"),
        )
    plan = MonitoringPlan(name=kind, tasks=tasks)
    validate_plan(graph, plan)
    return plan


def channel_uses(plan: MonitoringPlan) -> UsageLedger:
    """Channel-use ledger for one round of the plan.

    Per task: LZM consumes each path link once, JBM twice (the path is
    generated twice and fused), PEM once plus one pre-shared pair counted
    outside the total.
    """
    uses: dict = {}
    preshared = 0
    for task in plan.tasks:
        per_link = 2 if task.scheme is Scheme.JBM else 1
        for lid in task.path.link_ids:
            uses[lid] = uses.get(lid, 0) + per_link
        if task.scheme is Scheme.PEM:
            preshared += 1
    return UsageLedger(uses=uses, total=sum(uses.values()), preshared_pairs=preshared)

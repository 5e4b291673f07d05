"""Project network types, duration-risk expansion, and structural validation."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from .distributions import Distribution
from .errors import (
    BadDefinition,
    BadDummy,
    BadPrecedence,
    BadRiskTarget,
    CycleDetected,
    DuplicateId,
    MultipleSinks,
    MultipleSources,
)

_ID_RE = re.compile(r"^[A-Za-z0-9_.\-]+$")

RISK_KINDS = ("duration", "cost")


@dataclass(frozen=True)
class Activity:
    id: str
    name: str
    duration: Distribution
    fixed_cost: float = 0.0
    variable_cost_rate: float = 0.0

    def __post_init__(self):
        if not _ID_RE.match(self.id):
            raise BadDefinition(f"invalid activity id {self.id!r}")
        if self.fixed_cost < 0:
            raise BadDefinition(f"activity {self.id}: fixed_cost must be >= 0")
        if self.variable_cost_rate < 0:
            raise BadDefinition(f"activity {self.id}: variable_cost_rate must be >= 0")


@dataclass(frozen=True)
class RiskEvent:
    id: str
    name: str
    probability: float
    kind: str
    target: str
    impact: Distribution

    def __post_init__(self):
        if not _ID_RE.match(self.id):
            raise BadDefinition(f"invalid risk id {self.id!r}")
        if not 0.0 <= self.probability <= 1.0:
            raise BadDefinition(f"risk {self.id}: probability must be in [0, 1]")
        if self.kind not in RISK_KINDS:
            raise BadDefinition(f"risk {self.id}: kind must be one of {RISK_KINDS}")


@dataclass(frozen=True)
class ProjectSpec:
    """Activities (including the dummy start/end), precedence matrix, risks.

    precedence[i][j] = 1 means activity i has activity j as a predecessor,
    matching the row-has-predecessor-at-marked-column matrix convention.
    """

    activities: tuple
    precedence: tuple
    risks: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "activities", tuple(self.activities))
        object.__setattr__(self, "precedence",
                           tuple(tuple(int(x) for x in row) for row in self.precedence))
        object.__setattr__(self, "risks", tuple(self.risks))


@dataclass(frozen=True)
class Node:
    """One schedulable unit of the validated network (activity or risk node)."""

    index: int
    id: str
    name: str
    base: Distribution
    gate: float | None  # activation probability for risk nodes, None for activities
    fixed_cost: float
    variable_cost_rate: float
    preds: tuple
    succs: tuple

    @property
    def is_risk(self) -> bool:
        return self.gate is not None

    def mean_duration(self) -> float:
        # risk nodes follow the mixture (1-p) * point(0) + p * impact
        mu = self.base.mean()
        return self.gate * mu if self.gate is not None else mu


@dataclass(frozen=True)
class CostRisk:
    id: str
    name: str
    probability: float
    impact: Distribution
    target: int  # node index in the validated network


@dataclass(frozen=True)
class ValidatedNetwork:
    """Topologically ordered, risk-expanded network. Immutable."""

    nodes: tuple
    cost_risks: tuple
    spec: ProjectSpec

    @property
    def source(self) -> int:
        return 0

    @property
    def sink(self) -> int:
        return len(self.nodes) - 1

    def ids(self) -> tuple:
        return tuple(n.id for n in self.nodes)

    def names(self) -> tuple:
        return tuple(n.name for n in self.nodes)

    def index_of(self, node_id: str) -> int:
        for n in self.nodes:
            if n.id == node_id:
                return n.index
        raise KeyError(node_id)

    def mean_durations(self) -> np.ndarray:
        return np.array([n.mean_duration() for n in self.nodes])

    def fixed_costs(self) -> np.ndarray:
        return np.array([n.fixed_cost for n in self.nodes])

    def rates(self) -> np.ndarray:
        return np.array([n.variable_cost_rate for n in self.nodes])


def validate(spec: ProjectSpec) -> ValidatedNetwork:
    """Check structure, expand duration risks, and topologically order.

    Ordering is deterministic: FIFO Kahn with successors scanned in
    declaration order (activities first, risk nodes appended in risk
    declaration order).
    """
    acts = spec.activities
    ids = [a.id for a in acts]

    seen = set()
    for entity_id in ids + [r.id for r in spec.risks]:
        if entity_id in seen:
            raise DuplicateId(f"duplicate id {entity_id!r}")
        seen.add(entity_id)

    m = spec.precedence
    if len(m) != len(acts):
        raise BadPrecedence(f"matrix has {len(m)} rows for {len(acts)} activities")
    for i, row in enumerate(m):
        if len(row) != len(acts):
            raise BadPrecedence(f"matrix row for {ids[i]!r} has {len(row)} entries, "
                                f"expected {len(acts)}")
        for j, cell in enumerate(row):
            if cell not in (0, 1):
                raise BadPrecedence(f"matrix cell ({ids[i]}, {ids[j]}) must be 0 or 1")
        if row[i] != 0:
            raise BadPrecedence(f"matrix diagonal must be zero, activity {ids[i]!r}")

    preds = {ids[i]: [ids[j] for j in range(len(acts)) if m[i][j] == 1]
             for i in range(len(acts))}

    _check_acyclic(ids, preds)

    has_succ = {i: False for i in ids}
    for i in ids:
        for p in preds[i]:
            has_succ[p] = True
    sources = [i for i in ids if not preds[i]]
    sinks = [i for i in ids if not has_succ[i]]
    if len(sources) != 1:
        raise MultipleSources(sources)
    if len(sinks) != 1:
        raise MultipleSinks(sinks)

    by_id = {a.id: a for a in acts}
    for dummy_id in (sources[0], sinks[0]):
        a = by_id[dummy_id]
        if a.duration.mean() != 0.0 or a.fixed_cost != 0.0 or a.variable_cost_rate != 0.0:
            raise BadDummy(f"dummy {dummy_id!r} must have zero duration and zero cost")

    for r in spec.risks:
        if r.target not in by_id:
            raise BadRiskTarget(f"risk {r.id!r} targets unknown activity {r.target!r}")
        if r.kind == "duration" and r.target == sinks[0]:
            raise BadRiskTarget(f"risk {r.id!r} may not target the end dummy {r.target!r}")

    order_hint = list(ids)
    for r in spec.risks:
        if r.kind == "duration":
            _insert_risk_node(preds, order_hint, r)

    topo = _toposort_fifo(order_hint, preds)
    index = {node_id: k for k, node_id in enumerate(topo)}

    succ_lists = {i: [] for i in topo}
    for node_id in topo:
        for p in preds[node_id]:
            succ_lists[p].append(index[node_id])

    risk_by_id = {r.id: r for r in spec.risks}
    nodes = []
    for k, node_id in enumerate(topo):
        if node_id in by_id:
            a = by_id[node_id]
            base, gate = a.duration, None
            name, fixed, rate = a.name, a.fixed_cost, a.variable_cost_rate
        else:
            r = risk_by_id[node_id]
            base, gate = r.impact, r.probability
            name, fixed, rate = r.name, 0.0, 0.0
        nodes.append(Node(
            index=k, id=node_id, name=name, base=base, gate=gate,
            fixed_cost=fixed, variable_cost_rate=rate,
            preds=tuple(sorted(index[p] for p in preds[node_id])),
            succs=tuple(sorted(succ_lists[node_id])),
        ))

    cost_risks = tuple(
        CostRisk(id=r.id, name=r.name, probability=r.probability,
                 impact=r.impact, target=index[r.target])
        for r in spec.risks if r.kind == "cost"
    )
    return ValidatedNetwork(nodes=tuple(nodes), cost_risks=cost_risks, spec=spec)


def expand_duration_risk(network: ValidatedNetwork, risk: RiskEvent) -> ValidatedNetwork:
    """Insert one more duration risk into an already validated network.

    The risk node becomes the target's sole successor edge carrier: every
    original target->s edge is rerouted through the new node.
    """
    if risk.kind != "duration":
        raise BadRiskTarget(f"risk {risk.id!r} has kind {risk.kind!r}, expected duration")
    new_spec = replace(network.spec, risks=(*network.spec.risks, risk))
    return validate(new_spec)


def _insert_risk_node(preds, order_hint, risk):
    target = risk.target
    successors = [i for i in order_hint if target in preds[i]]
    for s in successors:
        # reroute target->s through the risk node, preserving pred order
        preds[s] = [risk.id if p == target else p for p in preds[s]]
    preds[risk.id] = [target]
    order_hint.append(risk.id)


def _check_acyclic(ids, preds):
    remaining = {i: len(preds[i]) for i in ids}
    succ = {i: [] for i in ids}
    for i in ids:
        for p in preds[i]:
            succ[p].append(i)
    queue = deque(i for i in ids if remaining[i] == 0)
    done = 0
    while queue:
        v = queue.popleft()
        done += 1
        for s in succ[v]:
            remaining[s] -= 1
            if remaining[s] == 0:
                queue.append(s)
    if done == len(ids):
        return
    # walk predecessor links inside the leftover set until a node repeats
    leftover = [i for i in ids if remaining[i] > 0]
    inside = set(leftover)
    walk, seen_at = [leftover[0]], {leftover[0]: 0}
    while True:
        nxt = next(p for p in preds[walk[-1]] if p in inside)
        if nxt in seen_at:
            cycle = walk[seen_at[nxt]:] + [nxt]
            raise CycleDetected(reversed(cycle))
        seen_at[nxt] = len(walk)
        walk.append(nxt)


def _toposort_fifo(order_hint, preds):
    remaining = {i: len(preds[i]) for i in order_hint}
    succ = {i: [] for i in order_hint}
    for i in order_hint:
        for p in preds[i]:
            succ[p].append(i)
    queue = deque(i for i in order_hint if remaining[i] == 0)
    out = []
    while queue:
        v = queue.popleft()
        out.append(v)
        for s in succ[v]:
            remaining[s] -= 1
            if remaining[s] == 0:
                queue.append(s)
    if len(out) != len(order_hint):
        raise CycleDetected([i for i in order_hint if remaining[i] > 0][:1])
    return out

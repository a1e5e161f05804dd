"""Immutable model structures for BPMN choreographies, processes and collaborations.

A model is a flat tuple of node records; each node names the sequence edges it
consumes and produces.  Execution state lives outside the model: sparse token
markings over sequence edges and, for collaborations, over message edges.
All types are hashable values, safe to share and to use as dictionary keys.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Union


class UnderflowError(Exception):
    """A token decrement was applied to an edge holding no tokens."""


# ---------------------------------------------------------------------------
# Labels


@dataclass(frozen=True)
class Tau:
    """The silent action."""

    def __str__(self) -> str:
        return "tau"

    __repr__ = __str__


TAU = Tau()


@dataclass(frozen=True)
class Comm:
    """Visible communication label: message sent from `sender` to `receiver`."""

    sender: str
    receiver: str
    message: str

    def __str__(self) -> str:
        return f"{self.sender}->{self.receiver}:{self.message}"


Label = Union[Tau, Comm]


def label_key(label: Label) -> tuple:
    """Total order over labels: tau first, then lexicographic on the triple."""
    if isinstance(label, Tau):
        return (0, "", "", "")
    return (1, label.sender, label.receiver, label.message)


@dataclass(frozen=True, order=True)
class MessageEdge:
    """A message flow between two pools: (sending pool, receiving pool, message)."""

    sender: str
    receiver: str
    message: str

    def __str__(self) -> str:
        return f"{self.sender}->{self.receiver}:{self.message}"

    def label(self) -> Comm:
        return Comm(self.sender, self.receiver, self.message)


# ---------------------------------------------------------------------------
# Nodes
#
# Gateways and events are shared by all three model kinds.  Message-bearing
# process nodes carry a bare message name; in collaborations the composition
# (or the loader) fills in the sender/receiver pools, turning the name into a
# full message edge.


@dataclass(frozen=True)
class StartEvent:
    out: str


@dataclass(frozen=True)
class EndEvent:
    inp: str
    completed: str  # spurious edge collecting tokens of completed instances


@dataclass(frozen=True)
class AndSplit:
    inp: str
    outs: tuple[str, ...]


@dataclass(frozen=True)
class AndJoin:
    ins: tuple[str, ...]
    out: str


@dataclass(frozen=True)
class XorSplit:
    inp: str
    outs: tuple[str, ...]


@dataclass(frozen=True)
class XorJoin:
    ins: tuple[str, ...]
    out: str


@dataclass(frozen=True)
class ChoreoTask:
    """One-way choreography task: atomic exchange of `message` between two roles."""

    inp: str
    out: str
    sender: str
    receiver: str
    message: str


@dataclass(frozen=True)
class Task:
    """Non-communicating task; a pass-through for the token game."""

    inp: str
    out: str


@dataclass(frozen=True)
class TaskRcv:
    inp: str
    out: str
    message: str
    sender: Optional[str] = None
    receiver: Optional[str] = None

    def edge(self) -> MessageEdge:
        return _require_edge(self)


@dataclass(frozen=True)
class TaskSnd:
    inp: str
    out: str
    message: str
    sender: Optional[str] = None
    receiver: Optional[str] = None

    def edge(self) -> MessageEdge:
        return _require_edge(self)


@dataclass(frozen=True)
class InterRcv:
    """Intermediate message catch event."""

    inp: str
    out: str
    message: str
    sender: Optional[str] = None
    receiver: Optional[str] = None

    def edge(self) -> MessageEdge:
        return _require_edge(self)


@dataclass(frozen=True)
class InterSnd:
    """Intermediate message throw event."""

    inp: str
    out: str
    message: str
    sender: Optional[str] = None
    receiver: Optional[str] = None

    def edge(self) -> MessageEdge:
        return _require_edge(self)


@dataclass(frozen=True)
class Branch:
    """One alternative of an event-based gateway: consuming `message` marks `out`."""

    out: str
    message: str
    sender: Optional[str] = None
    receiver: Optional[str] = None

    def edge(self) -> MessageEdge:
        return _require_edge(self)


@dataclass(frozen=True)
class EventBased:
    """Event-based gateway: a race among at least two message receptions."""

    inp: str
    branches: tuple[Branch, ...]


def _require_edge(node) -> MessageEdge:
    if node.sender is None or node.receiver is None:
        raise ValueError(f"node {node!r} has no resolved message edge")
    return MessageEdge(node.sender, node.receiver, node.message)


ChoreoNode = Union[
    StartEvent, EndEvent, AndSplit, AndJoin, XorSplit, XorJoin, ChoreoTask, EventBased
]
ProcNode = Union[
    StartEvent, EndEvent, AndSplit, AndJoin, XorSplit, XorJoin,
    Task, TaskRcv, TaskSnd, InterRcv, InterSnd, EventBased,
]

SEND_NODES = (TaskSnd, InterSnd)
RECEIVE_NODES = (TaskRcv, InterRcv)


def branch_key(b: Branch) -> tuple:
    return (b.sender or "", b.receiver or "", b.message, b.out)


# ---------------------------------------------------------------------------
# Models


@dataclass(frozen=True)
class Choreography:
    nodes: tuple[ChoreoNode, ...]


@dataclass(frozen=True)
class Process:
    nodes: tuple[ProcNode, ...]


@dataclass(frozen=True)
class Pool:
    """A named participant and the process it runs."""

    name: str
    nodes: tuple[ProcNode, ...]


@dataclass(frozen=True)
class Collaboration:
    pools: tuple[Pool, ...]
    nodes: tuple[ProcNode, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        flat = tuple(n for pool in self.pools for n in pool.nodes)
        object.__setattr__(self, "nodes", flat)

    def pool_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.pools)

    def node_pools(self) -> tuple[tuple[ProcNode, str], ...]:
        """Flattened nodes paired with the name of the pool owning each."""
        return tuple((n, p.name) for p in self.pools for n in p.nodes)


Model = Union[Choreography, Process, Collaboration]


def source_edges(node) -> tuple[str, ...]:
    """Edges produced (marked) by a node, including spurious completed edges."""
    if isinstance(node, StartEvent):
        return (node.out,)
    if isinstance(node, EndEvent):
        return (node.completed,)
    if isinstance(node, (AndSplit, XorSplit)):
        return node.outs
    if isinstance(node, (AndJoin, XorJoin)):
        return (node.out,)
    if isinstance(node, (ChoreoTask, Task, TaskRcv, TaskSnd, InterRcv, InterSnd)):
        return (node.out,)
    if isinstance(node, EventBased):
        return tuple(b.out for b in node.branches)
    raise TypeError(f"unknown node {node!r}")


def target_edges(node) -> tuple[str, ...]:
    """Edges consumed by a node."""
    if isinstance(node, StartEvent):
        return ()
    if isinstance(node, EndEvent):
        return (node.inp,)
    if isinstance(node, (AndSplit, XorSplit, EventBased)):
        return (node.inp,)
    if isinstance(node, (AndJoin, XorJoin)):
        return node.ins
    if isinstance(node, (ChoreoTask, Task, TaskRcv, TaskSnd, InterRcv, InterSnd)):
        return (node.inp,)
    raise TypeError(f"unknown node {node!r}")


def duplicate_edges(nodes: Iterable) -> tuple[list[str], list[str]]:
    """Edge ids used more than once as a source, resp. as a target."""
    sources: Counter = Counter()
    targets: Counter = Counter()
    for node in nodes:
        sources.update(source_edges(node))
        targets.update(target_edges(node))
    dup_src = sorted(e for e, n in sources.items() if n > 1)
    dup_tgt = sorted(e for e, n in targets.items() if n > 1)
    return dup_src, dup_tgt


# ---------------------------------------------------------------------------
# Sparse token markings
#
# A marking maps keys (edge ids, or message edges) to positive token counts;
# absent keys read as zero, so two markings are equal exactly when their
# non-zero entries coincide.


def inc_tokens(state: Mapping, edges: Iterable) -> dict:
    """Return a copy of `state` with each listed edge incremented by one."""
    out = dict(state)
    for e in edges:
        out[e] = out.get(e, 0) + 1
    return out


def dec_tokens(state: Mapping, edges: Iterable) -> dict:
    """Return a copy of `state` with each listed edge decremented by one.

    Raises UnderflowError if any listed edge holds no token; callers are
    expected to check enabledness first.
    """
    out = dict(state)
    for e in edges:
        n = out.get(e, 0)
        if n < 1:
            raise UnderflowError(f"no token to remove from edge {e!r}")
        if n == 1:
            del out[e]
        else:
            out[e] = n - 1
    return out


# ---------------------------------------------------------------------------
# Configurations


def _marking_items(marking: Mapping) -> tuple:
    return tuple(sorted((k, n) for k, n in marking.items() if n))


@dataclass(frozen=True)
class ChoreoConfig:
    """Choreography execution state: sequence-edge marking plus start bookkeeping.

    `started` records indices of start events that already fired; a start
    event fires at most once per execution.
    """

    marking: tuple[tuple[str, int], ...]
    started: tuple[int, ...]

    @staticmethod
    def make(marking: Mapping[str, int], started: Iterable[int]) -> "ChoreoConfig":
        return ChoreoConfig(_marking_items(marking), tuple(sorted(started)))

    def marking_dict(self) -> dict[str, int]:
        return dict(self.marking)


@dataclass(frozen=True)
class CollabConfig:
    """Collaboration execution state: sequence marking, message marking, starts."""

    marking: tuple[tuple[str, int], ...]
    messages: tuple[tuple[MessageEdge, int], ...]
    started: tuple[int, ...]

    @staticmethod
    def make(
        marking: Mapping[str, int],
        messages: Mapping[MessageEdge, int],
        started: Iterable[int],
    ) -> "CollabConfig":
        return CollabConfig(
            _marking_items(marking), _marking_items(messages), tuple(sorted(started))
        )

    def marking_dict(self) -> dict[str, int]:
        return dict(self.marking)

    def messages_dict(self) -> dict[MessageEdge, int]:
        return dict(self.messages)


# ---------------------------------------------------------------------------
# Communication label and message-edge views


def labels_choreo(ch: Choreography) -> frozenset[Comm]:
    """All communication labels a choreography can ever produce."""
    acc = set()
    for node in ch.nodes:
        if isinstance(node, ChoreoTask):
            acc.add(Comm(node.sender, node.receiver, node.message))
        elif isinstance(node, EventBased):
            for b in node.branches:
                acc.add(Comm(b.sender, b.receiver, b.message))
    return frozenset(acc)


def labels_collab(c: Collaboration) -> frozenset[Comm]:
    """All communication labels a collaboration can ever produce.

    Only receive-side elements contribute: sends are internal moves, so a
    send-side label could never appear on any transition.
    """
    acc = set()
    for node in c.nodes:
        if isinstance(node, RECEIVE_NODES):
            acc.add(node.edge().label())
        elif isinstance(node, EventBased):
            for b in node.branches:
                acc.add(b.edge().label())
    return frozenset(acc)


def out_edges(c: Collaboration) -> Counter:
    """Multiset of message edges outgoing from sending elements."""
    acc: Counter = Counter()
    for node in c.nodes:
        if isinstance(node, SEND_NODES):
            acc[node.edge()] += 1
    return acc


def in_edges(c: Collaboration) -> Counter:
    """Multiset of message edges incoming into receiving elements."""
    acc: Counter = Counter()
    for node in c.nodes:
        if isinstance(node, RECEIVE_NODES):
            acc[node.edge()] += 1
        elif isinstance(node, EventBased):
            for b in node.branches:
                acc[b.edge()] += 1
    return acc

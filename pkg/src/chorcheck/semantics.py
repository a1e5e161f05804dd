"""Token-game execution of choreographies and collaborations, and LTS generation.

Execution is a step relation over configurations.  Gateways and events move
tokens silently; a choreography task emits its communication label in one
atomic step, while in a collaboration only message *receptions* are visible:
a send silently deposits a message token in the receiver's queue, and the
matching receive (or event-based gateway branch) later consumes it under the
visible label.  Start events fire at most once each.

`generate_lts` explores the reachable configurations breadth-first into a
finite labelled transition system with deterministic state numbering, failing
loudly (BoundExceeded) instead of truncating when a model is unbounded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from collections import deque

from .model import (
    TAU,
    AndJoin,
    AndSplit,
    ChoreoConfig,
    ChoreoTask,
    Choreography,
    CollabConfig,
    Collaboration,
    Comm,
    EndEvent,
    EventBased,
    InterRcv,
    InterSnd,
    Label,
    StartEvent,
    Task,
    TaskRcv,
    TaskSnd,
    XorJoin,
    XorSplit,
    dec_tokens,
    inc_tokens,
    label_key,
    labels_choreo,
    labels_collab,
)


@dataclass(frozen=True)
class ExplorationBounds:
    """Safety limits for state-space exploration; all values must be >= 1."""

    max_tokens_per_edge: int = 2
    max_messages_per_edge: int = 4
    max_states: int = 100_000

    def __post_init__(self):
        if min(self.max_tokens_per_edge, self.max_messages_per_edge, self.max_states) < 1:
            raise ValueError("exploration bounds must be positive")


DEFAULT_BOUNDS = ExplorationBounds()


class BoundExceeded(Exception):
    """State-space exploration hit a bound; `kind` names which one."""

    def __init__(self, kind: str, detail: str):
        super().__init__(f"{kind} bound exceeded: {detail}")
        self.kind = kind
        self.detail = detail


@dataclass(frozen=True)
class Lts:
    """A finite labelled transition system with canonical transition order.

    Transitions are sorted by (source, label, target) and duplicate-free;
    state 0 is always the initial state for generated systems.  `states`
    optionally carries the configuration behind each state index and is
    ignored by equality.
    """

    n_states: int
    initial: int
    transitions: tuple[tuple[int, Label, int], ...]
    states: Optional[tuple] = field(default=None, compare=False, repr=False)

    @staticmethod
    def make(n_states, initial, transitions, states=None) -> "Lts":
        uniq = sorted(set(transitions), key=lambda t: (t[0], label_key(t[1]), t[2]))
        for src, _, tgt in uniq:
            if not (0 <= src < n_states and 0 <= tgt < n_states):
                raise ValueError(f"transition endpoint out of range: {(src, tgt)}")
        if not 0 <= initial < n_states:
            raise ValueError("initial state out of range")
        return Lts(n_states, initial, tuple(uniq), states)

    def labels(self) -> frozenset[Comm]:
        return frozenset(l for _, l, _ in self.transitions if isinstance(l, Comm))


# ---------------------------------------------------------------------------
# Step relations
#
# The *_moves functions also report which node fired, which the step functions
# drop; tests use the node index to check token-conservation per rule.


def initial_config(model) -> Union[ChoreoConfig, CollabConfig]:
    if isinstance(model, Choreography):
        return ChoreoConfig.make({}, ())
    if isinstance(model, Collaboration):
        return CollabConfig.make({}, {}, ())
    raise TypeError(f"cannot execute {type(model).__name__}")


def choreo_moves(
    ch: Choreography, cfg: ChoreoConfig
) -> list[tuple[int, Label, ChoreoConfig]]:
    """Enabled steps of a choreography as (node index, label, successor)."""
    marking = cfg.marking_dict()
    started = set(cfg.started)
    moves = []

    def emit(idx, label, new_marking, new_started=None):
        moves.append(
            (
                idx,
                label,
                ChoreoConfig.make(
                    new_marking, started if new_started is None else new_started
                ),
            )
        )

    for i, node in enumerate(ch.nodes):
        if isinstance(node, StartEvent):
            if i not in started:
                emit(i, TAU, inc_tokens(marking, [node.out]), started | {i})
        elif isinstance(node, EndEvent):
            if marking.get(node.inp, 0) > 0:
                emit(i, TAU, inc_tokens(dec_tokens(marking, [node.inp]), [node.completed]))
        elif isinstance(node, AndSplit):
            if marking.get(node.inp, 0) > 0:
                emit(i, TAU, inc_tokens(dec_tokens(marking, [node.inp]), node.outs))
        elif isinstance(node, AndJoin):
            if all(marking.get(e, 0) > 0 for e in node.ins):
                emit(i, TAU, inc_tokens(dec_tokens(marking, node.ins), [node.out]))
        elif isinstance(node, XorSplit):
            if marking.get(node.inp, 0) > 0:
                for out in node.outs:
                    emit(i, TAU, inc_tokens(dec_tokens(marking, [node.inp]), [out]))
        elif isinstance(node, XorJoin):
            for inp in node.ins:
                if marking.get(inp, 0) > 0:
                    emit(i, TAU, inc_tokens(dec_tokens(marking, [inp]), [node.out]))
        elif isinstance(node, ChoreoTask):
            if marking.get(node.inp, 0) > 0:
                label = Comm(node.sender, node.receiver, node.message)
                emit(i, label, inc_tokens(dec_tokens(marking, [node.inp]), [node.out]))
        elif isinstance(node, EventBased):
            if marking.get(node.inp, 0) > 0:
                for b in node.branches:
                    label = Comm(b.sender, b.receiver, b.message)
                    emit(i, label, inc_tokens(dec_tokens(marking, [node.inp]), [b.out]))
        else:
            raise TypeError(f"node {node!r} is not a choreography element")
    return moves


def collab_moves(
    c: Collaboration, cfg: CollabConfig
) -> list[tuple[int, Label, CollabConfig]]:
    """Enabled steps of a collaboration as (node index, label, successor)."""
    marking = cfg.marking_dict()
    messages = cfg.messages_dict()
    started = set(cfg.started)
    moves = []

    def emit(idx, label, new_marking, new_messages=None, new_started=None):
        moves.append(
            (
                idx,
                label,
                CollabConfig.make(
                    new_marking,
                    messages if new_messages is None else new_messages,
                    started if new_started is None else new_started,
                ),
            )
        )

    def pass_token(node):
        return inc_tokens(dec_tokens(marking, [node.inp]), [node.out])

    for i, node in enumerate(c.nodes):
        if isinstance(node, StartEvent):
            if i not in started:
                emit(i, TAU, inc_tokens(marking, [node.out]), new_started=started | {i})
        elif isinstance(node, EndEvent):
            if marking.get(node.inp, 0) > 0:
                emit(i, TAU, inc_tokens(dec_tokens(marking, [node.inp]), [node.completed]))
        elif isinstance(node, AndSplit):
            if marking.get(node.inp, 0) > 0:
                emit(i, TAU, inc_tokens(dec_tokens(marking, [node.inp]), node.outs))
        elif isinstance(node, AndJoin):
            if all(marking.get(e, 0) > 0 for e in node.ins):
                emit(i, TAU, inc_tokens(dec_tokens(marking, node.ins), [node.out]))
        elif isinstance(node, XorSplit):
            if marking.get(node.inp, 0) > 0:
                for out in node.outs:
                    emit(i, TAU, inc_tokens(dec_tokens(marking, [node.inp]), [out]))
        elif isinstance(node, XorJoin):
            for inp in node.ins:
                if marking.get(inp, 0) > 0:
                    emit(i, TAU, inc_tokens(dec_tokens(marking, [inp]), [node.out]))
        elif isinstance(node, Task):
            if marking.get(node.inp, 0) > 0:
                emit(i, TAU, pass_token(node))
        elif isinstance(node, (TaskSnd, InterSnd)):
            if marking.get(node.inp, 0) > 0:
                emit(i, TAU, pass_token(node), inc_tokens(messages, [node.edge()]))
        elif isinstance(node, (TaskRcv, InterRcv)):
            edge = node.edge()
            if marking.get(node.inp, 0) > 0 and messages.get(edge, 0) > 0:
                emit(i, edge.label(), pass_token(node), dec_tokens(messages, [edge]))
        elif isinstance(node, EventBased):
            if marking.get(node.inp, 0) > 0:
                for b in node.branches:
                    edge = b.edge()
                    if messages.get(edge, 0) > 0:
                        emit(
                            i,
                            edge.label(),
                            inc_tokens(dec_tokens(marking, [node.inp]), [b.out]),
                            dec_tokens(messages, [edge]),
                        )
        else:
            raise TypeError(f"node {node!r} is not a collaboration element")
    return moves


def choreo_steps(ch: Choreography, cfg: ChoreoConfig) -> list[tuple[Label, ChoreoConfig]]:
    return [(label, nxt) for _, label, nxt in choreo_moves(ch, cfg)]


def collab_steps(c: Collaboration, cfg: CollabConfig) -> list[tuple[Label, CollabConfig]]:
    return [(label, nxt) for _, label, nxt in collab_moves(c, cfg)]


# ---------------------------------------------------------------------------
# LTS generation


def _check_bounds(cfg, bounds: ExplorationBounds):
    for edge, n in cfg.marking:
        if n > bounds.max_tokens_per_edge:
            raise BoundExceeded(
                "tokens", f"edge {edge!r} would hold {n} tokens in {cfg}"
            )
    if isinstance(cfg, CollabConfig):
        for edge, n in cfg.messages:
            if n > bounds.max_messages_per_edge:
                raise BoundExceeded(
                    "messages", f"message edge {edge} would hold {n} messages in {cfg}"
                )


def generate_lts(model, bounds: ExplorationBounds = DEFAULT_BOUNDS) -> Lts:
    """Explore all reachable configurations of a model into an LTS.

    Exploration is breadth-first with canonical step ordering, so two runs on
    the same model and bounds produce identical state numbering and
    transition lists.
    """
    if isinstance(model, Choreography):
        steps = choreo_steps
    elif isinstance(model, Collaboration):
        steps = collab_steps
    else:
        raise TypeError(f"cannot generate an LTS for {type(model).__name__}")

    init = initial_config(model)
    _check_bounds(init, bounds)
    states = [init]
    index = {init: 0}
    transitions = []
    queue = deque([0])
    while queue:
        src = queue.popleft()
        for label, nxt in steps(model, states[src]):
            _check_bounds(nxt, bounds)
            tgt = index.get(nxt)
            if tgt is None:
                if len(states) >= bounds.max_states:
                    raise BoundExceeded(
                        "states", f"more than {bounds.max_states} reachable states"
                    )
                tgt = len(states)
                index[nxt] = tgt
                states.append(nxt)
                queue.append(tgt)
            transitions.append((src, label, tgt))
    return Lts.make(len(states), 0, transitions, tuple(states))


# ---------------------------------------------------------------------------
# Hiding


def hide(lts: Lts, hidden: Iterable[Comm]) -> Lts:
    """Relabel every transition whose label is in `hidden` to tau."""
    hidden = frozenset(hidden)
    if any(not isinstance(l, Comm) for l in hidden):
        raise ValueError("only communication labels can be hidden")
    relabelled = [
        (src, TAU if label in hidden else label, tgt)
        for src, label, tgt in lts.transitions
    ]
    return Lts.make(lts.n_states, lts.initial, relabelled, lts.states)


def hiding_set(ch: Choreography, c: Collaboration) -> frozenset[Comm]:
    """Collaboration labels that the choreography does not talk about."""
    return labels_collab(c) - labels_choreo(ch)

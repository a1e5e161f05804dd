"""Ingestion of BPMN 2.0 XML interchange files into model structures.

Only the executable subset backing the formal semantics is accepted: start
and end events, parallel/exclusive/event-based gateways, plain tasks,
send/receive tasks, message intermediate events, choreography tasks and
sequence/message flows.  Decorative material (diagram interchange, lanes,
documentation, data objects and associations) is skipped silently; any other
executable element is rejected with UnsupportedElementError so that no model
is ever given a semantics the original diagram does not have.

Peculiarities of the lowering:

* end events mint a fresh spurious edge named `<endId>__completed`;
* a two-way choreography task becomes two sequential one-way tasks joined by
  a fresh `<taskId>__link` edge, request first, then response;
* the message-catching elements following an event-based gateway are folded
  into the gateway's branches, so the flow from the gateway into each catch
  disappears with them.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from dataclasses import dataclass, replace
from typing import Optional, Union

from .model import (
    AndJoin,
    AndSplit,
    Branch,
    ChoreoTask,
    Choreography,
    Collaboration,
    EndEvent,
    EventBased,
    InterRcv,
    InterSnd,
    Pool,
    Process,
    StartEvent,
    Task,
    TaskRcv,
    TaskSnd,
    XorJoin,
    XorSplit,
    branch_key,
)

MODEL_NS = "http://www.omg.org/spec/BPMN/20100524/MODEL"


class UnsupportedElementError(Exception):
    """The document uses a BPMN element outside the supported subset."""

    def __init__(self, kind: str, element_id: str = ""):
        at = f" (id {element_id!r})" if element_id else ""
        super().__init__(f"unsupported BPMN element {kind!r}{at}")
        self.kind = kind


class MalformedModelError(Exception):
    """The document is structurally broken (dangling flows, missing parts)."""


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


@dataclass
class BpmnDocument:
    """A parsed BPMN file plus an id index over every element."""

    root: ET.Element
    by_id: dict[str, ET.Element]

    @classmethod
    def from_text(cls, text: Union[str, bytes]) -> "BpmnDocument":
        try:
            root = ET.fromstring(text)
        except ET.ParseError as err:
            raise MalformedModelError(f"not well-formed XML: {err}") from err
        by_id = {}
        for el in root.iter():
            eid = el.get("id")
            if eid is not None:
                if eid in by_id:
                    raise MalformedModelError(f"duplicate element id {eid!r}")
                by_id[eid] = el
        return cls(root, by_id)

    @classmethod
    def from_path(cls, path) -> "BpmnDocument":
        with open(path, "rb") as fh:
            return cls.from_text(fh.read())

    def message_name(self, message_ref: Optional[str]) -> Optional[str]:
        if message_ref is None:
            return None
        el = self.by_id.get(message_ref)
        if el is None or _local(el.tag) != "message":
            raise MalformedModelError(f"messageRef {message_ref!r} does not name a message")
        return el.get("name") or message_ref

    def find_all(self, tag: str) -> list[ET.Element]:
        return [el for el in self.root.iter() if _local(el.tag) == tag]


# Harmless, purely informational content.
_SKIP = frozenset(
    {
        "documentation", "extensionElements", "laneSet", "lane",
        "dataObject", "dataObjectReference", "dataStoreReference", "dataStore",
        "association", "textAnnotation", "group", "category",
        "ioSpecification", "dataInputAssociation", "dataOutputAssociation",
        "property", "auditing", "monitoring", "resourceRole", "performer",
        "incoming", "outgoing", "sequenceFlow",
    }
)

_LOOP_MARKERS = ("standardLoopCharacteristics", "multiInstanceLoopCharacteristics")


def _has_loop_marker(el: ET.Element) -> bool:
    return any(_local(child.tag) in _LOOP_MARKERS for child in el)


def _event_definitions(el: ET.Element) -> list[str]:
    return [
        _local(child.tag) for child in el if _local(child.tag).endswith("EventDefinition")
    ]


class _FlowGraph:
    """Sequence-flow adjacency inside one process or choreography container."""

    def __init__(self, container: ET.Element):
        self.incoming: dict[str, list[str]] = {}
        self.outgoing: dict[str, list[str]] = {}
        element_ids = {
            el.get("id")
            for el in container
            if el.get("id") is not None and _local(el.tag) != "sequenceFlow"
        }
        for el in container:
            if _local(el.tag) != "sequenceFlow":
                continue
            fid, src, tgt = el.get("id"), el.get("sourceRef"), el.get("targetRef")
            if fid is None or src is None or tgt is None:
                raise MalformedModelError("sequenceFlow without id/sourceRef/targetRef")
            if src not in element_ids or tgt not in element_ids:
                raise MalformedModelError(f"sequence flow {fid!r} has a dangling endpoint")
            self.outgoing.setdefault(src, []).append(fid)
            self.incoming.setdefault(tgt, []).append(fid)

    def one_in(self, eid: str, what: str) -> str:
        ins = self.incoming.get(eid, [])
        if len(ins) != 1:
            raise MalformedModelError(f"{what} {eid!r} needs exactly one incoming flow")
        return ins[0]

    def one_out(self, eid: str, what: str) -> str:
        outs = self.outgoing.get(eid, [])
        if len(outs) != 1:
            raise MalformedModelError(f"{what} {eid!r} needs exactly one outgoing flow")
        return outs[0]


def _classify_gateway(flows: _FlowGraph, eid: str, split_cls, join_cls):
    ins = sorted(flows.incoming.get(eid, []))
    outs = sorted(flows.outgoing.get(eid, []))
    if len(ins) == 1 and len(outs) > 1:
        return split_cls(ins[0], tuple(outs))
    if len(ins) > 1 and len(outs) == 1:
        return join_cls(tuple(ins), outs[0])
    raise MalformedModelError(
        f"gateway {eid!r} must either split (1 in, >1 out) or join (>1 in, 1 out)"
    )


# ---------------------------------------------------------------------------
# Processes and collaborations


def _catch_message(doc: BpmnDocument, el: ET.Element) -> Optional[str]:
    """Message name of a receive task or message catch event, None if unstated."""
    tag = _local(el.tag)
    if tag == "receiveTask":
        return doc.message_name(el.get("messageRef"))
    if tag == "intermediateCatchEvent":
        for child in el:
            if _local(child.tag) == "messageEventDefinition":
                return doc.message_name(child.get("messageRef"))
    return None


def _lower_process(doc: BpmnDocument, container: ET.Element):
    """Lower one process body; returns (nodes, locations of communicating parts).

    Locations map element ids to ("node", index) or ("branch", index, pos) so
    collaboration loading can attach message flows; event-based branch lists
    stay in document order until the caller finalizes them.
    """
    flows = _FlowGraph(container)
    flow_target: dict[str, str] = {}
    for el in container:
        if _local(el.tag) == "sequenceFlow":
            flow_target[el.get("id")] = el.get("targetRef")

    absorbed: set[str] = set()
    for el in container:
        if _local(el.tag) != "eventBasedGateway":
            continue
        eid = el.get("id")
        for fid in sorted(flows.outgoing.get(eid, [])):
            absorbed.add(flow_target[fid])

    nodes: list = []
    locations: dict[str, tuple] = {}

    def add(node) -> int:
        nodes.append(node)
        return len(nodes) - 1

    for el in container:
        tag = _local(el.tag)
        eid = el.get("id", "")
        if tag in _SKIP:
            continue
        if eid in absorbed:
            continue
        if tag == "startEvent":
            if _event_definitions(el):
                raise UnsupportedElementError(f"startEvent with {_event_definitions(el)[0]}", eid)
            add(StartEvent(flows.one_out(eid, "start event")))
        elif tag == "endEvent":
            if _event_definitions(el):
                raise UnsupportedElementError(f"endEvent with {_event_definitions(el)[0]}", eid)
            add(EndEvent(flows.one_in(eid, "end event"), f"{eid}__completed"))
        elif tag == "task":
            if _has_loop_marker(el):
                raise UnsupportedElementError("task with loop marker", eid)
            add(Task(flows.one_in(eid, "task"), flows.one_out(eid, "task")))
        elif tag in ("sendTask", "receiveTask"):
            if _has_loop_marker(el):
                raise UnsupportedElementError(f"{tag} with loop marker", eid)
            cls = TaskSnd if tag == "sendTask" else TaskRcv
            message = doc.message_name(el.get("messageRef"))
            idx = add(cls(flows.one_in(eid, tag), flows.one_out(eid, tag), message))
            locations[eid] = ("node", idx)
        elif tag == "intermediateCatchEvent":
            defs = _event_definitions(el)
            if defs != ["messageEventDefinition"]:
                raise UnsupportedElementError(
                    f"intermediateCatchEvent with {defs[0] if defs else 'no'} definition", eid
                )
            idx = add(
                InterRcv(flows.one_in(eid, tag), flows.one_out(eid, tag), _catch_message(doc, el))
            )
            locations[eid] = ("node", idx)
        elif tag == "intermediateThrowEvent":
            defs = _event_definitions(el)
            if defs != ["messageEventDefinition"]:
                raise UnsupportedElementError(
                    f"intermediateThrowEvent with {defs[0] if defs else 'no'} definition", eid
                )
            message = None
            for child in el:
                if _local(child.tag) == "messageEventDefinition":
                    message = doc.message_name(child.get("messageRef"))
            idx = add(InterSnd(flows.one_in(eid, tag), flows.one_out(eid, tag), message))
            locations[eid] = ("node", idx)
        elif tag == "parallelGateway":
            add(_classify_gateway(flows, eid, AndSplit, AndJoin))
        elif tag == "exclusiveGateway":
            add(_classify_gateway(flows, eid, XorSplit, XorJoin))
        elif tag == "eventBasedGateway":
            inp = flows.one_in(eid, "event-based gateway")
            out_flows = sorted(flows.outgoing.get(eid, []))
            if len(out_flows) < 2:
                raise MalformedModelError(
                    f"event-based gateway {eid!r} needs at least two outgoing flows"
                )
            branches = []
            branch_ids = []
            for fid in out_flows:
                target = doc.by_id.get(flow_target[fid])
                ttag = _local(target.tag) if target is not None else "nothing"
                if ttag not in ("intermediateCatchEvent", "receiveTask") or (
                    ttag == "intermediateCatchEvent"
                    and _event_definitions(target) != ["messageEventDefinition"]
                ):
                    raise UnsupportedElementError(
                        f"event-based gateway branch into {ttag}", flow_target[fid]
                    )
                tid = target.get("id")
                branches.append(
                    Branch(flows.one_out(tid, ttag), _catch_message(doc, target))
                )
                branch_ids.append(tid)
            idx = add(EventBased(inp, tuple(branches)))
            for pos, tid in enumerate(branch_ids):
                locations[tid] = ("branch", idx, pos)
        else:
            raise UnsupportedElementError(tag, eid)
    return nodes, locations


def _finalize(nodes: list) -> tuple:
    """Freeze lowered nodes, sorting event-based branches canonically."""
    out = []
    for node in nodes:
        if isinstance(node, EventBased):
            node = EventBased(node.inp, tuple(sorted(node.branches, key=branch_key)))
        out.append(node)
    return tuple(out)


def _require_messages(nodes, pool: str):
    for node in nodes:
        if isinstance(node, (TaskRcv, TaskSnd, InterRcv, InterSnd)):
            if node.message is None:
                raise MalformedModelError(
                    f"communicating element in pool {pool!r} has no message"
                )
        if isinstance(node, EventBased):
            for b in node.branches:
                if b.message is None:
                    raise MalformedModelError(
                        f"event-based branch in pool {pool!r} has no message"
                    )


def load_process(doc: BpmnDocument, pool_id: str) -> Process:
    """Lower the process of one pool; `pool_id` names a participant or a process."""
    el = doc.by_id.get(pool_id)
    if el is None:
        for part in doc.find_all("participant"):
            if part.get("name") == pool_id:
                el = part
                break
    if el is None:
        raise MalformedModelError(f"no pool or process named {pool_id!r}")
    if _local(el.tag) == "participant":
        ref = el.get("processRef")
        el = doc.by_id.get(ref) if ref else None
    if el is None or _local(el.tag) != "process":
        raise MalformedModelError(f"pool {pool_id!r} has no process")
    nodes, _ = _lower_process(doc, el)
    proc = Process(_finalize(nodes))
    _require_messages(proc.nodes, pool_id)
    return proc


def load_collaboration(doc: BpmnDocument) -> Collaboration:
    """Lower a collaboration: every pool's process plus resolved message flows."""
    collab_el = None
    for el in doc.root:
        if _local(el.tag) == "collaboration":
            collab_el = el
            break
    if collab_el is None:
        raise MalformedModelError("document contains no collaboration")

    pool_nodes: list[list] = []
    pool_names: list[str] = []
    where: dict[str, tuple[int, tuple]] = {}  # element id -> (pool idx, location)
    for part in collab_el:
        if _local(part.tag) != "participant":
            continue
        ref = part.get("processRef")
        proc_el = doc.by_id.get(ref) if ref else None
        if proc_el is None or _local(proc_el.tag) != "process":
            raise MalformedModelError(f"participant {part.get('id')!r} has no process")
        name = part.get("name") or part.get("id")
        nodes, locations = _lower_process(doc, proc_el)
        idx = len(pool_nodes)
        pool_nodes.append(nodes)
        pool_names.append(name)
        for eid, loc in locations.items():
            where[eid] = (idx, loc)
    if not pool_names:
        raise MalformedModelError("collaboration has no participants")

    for mf in collab_el:
        if _local(mf.tag) != "messageFlow":
            continue
        src, tgt = mf.get("sourceRef"), mf.get("targetRef")
        if src not in where or tgt not in where:
            raise MalformedModelError(
                f"message flow {mf.get('id')!r} does not connect communicating elements"
            )
        sender_pool, src_loc = where[src]
        receiver_pool, tgt_loc = where[tgt]
        message = doc.message_name(mf.get("messageRef")) or mf.get("name")

        def patch(pool_idx, loc, expect_send):
            nodes = pool_nodes[pool_idx]
            kind = loc[0]
            node = nodes[loc[1]]
            if kind == "node":
                is_send = isinstance(node, (TaskSnd, InterSnd))
                if is_send != expect_send:
                    raise MalformedModelError(
                        f"message flow {mf.get('id')!r} attached to the wrong side"
                    )
                nodes[loc[1]] = replace(
                    node,
                    message=message or node.message,
                    sender=pool_names[sender_pool],
                    receiver=pool_names[receiver_pool],
                )
                if nodes[loc[1]].message is None:
                    raise MalformedModelError(
                        f"message flow {mf.get('id')!r} carries no message name"
                    )
            else:
                if expect_send:
                    raise MalformedModelError(
                        f"message flow {mf.get('id')!r} starts at a receiving branch"
                    )
                branches = list(node.branches)
                b = branches[loc[2]]
                branches[loc[2]] = Branch(
                    b.out,
                    message or b.message,
                    pool_names[sender_pool],
                    pool_names[receiver_pool],
                )
                if branches[loc[2]].message is None:
                    raise MalformedModelError(
                        f"message flow {mf.get('id')!r} carries no message name"
                    )
                nodes[loc[1]] = EventBased(node.inp, tuple(branches))

        patch(sender_pool, src_loc, expect_send=True)
        patch(receiver_pool, tgt_loc, expect_send=False)

    pools = []
    for name, nodes in zip(pool_names, pool_nodes):
        final = _finalize(nodes)
        for node in final:
            if isinstance(node, (TaskRcv, TaskSnd, InterRcv, InterSnd)):
                if node.sender is None:
                    raise MalformedModelError(
                        f"element in pool {name!r} is not connected by any message flow"
                    )
            elif isinstance(node, EventBased):
                for b in node.branches:
                    if b.sender is None:
                        raise MalformedModelError(
                            f"event-based branch in pool {name!r} has no message flow"
                        )
        pools.append(Pool(name, final))
    return Collaboration(tuple(pools))


# ---------------------------------------------------------------------------
# Choreographies


def load_choreography(doc: BpmnDocument) -> Choreography:
    """Lower a choreography, splitting two-way tasks into request/response pairs."""
    choreo_el = None
    for el in doc.root:
        if _local(el.tag) == "choreography":
            choreo_el = el
            break
    if choreo_el is None:
        raise MalformedModelError("document contains no choreography")

    participants = {}
    message_flows = {}
    for el in choreo_el:
        tag = _local(el.tag)
        if tag == "participant":
            participants[el.get("id")] = el.get("name") or el.get("id")
        elif tag == "messageFlow":
            message_flows[el.get("id")] = el

    def flow_comm(flow_id: str) -> tuple[str, str, str]:
        mf = message_flows.get(flow_id)
        if mf is None:
            raise MalformedModelError(f"messageFlowRef {flow_id!r} is dangling")
        src, tgt = mf.get("sourceRef"), mf.get("targetRef")
        if src not in participants or tgt not in participants:
            raise MalformedModelError(
                f"message flow {flow_id!r} must connect two participants"
            )
        message = doc.message_name(mf.get("messageRef")) or mf.get("name")
        if message is None:
            raise MalformedModelError(f"message flow {flow_id!r} carries no message")
        return participants[src], participants[tgt], message

    flows = _FlowGraph(choreo_el)
    flow_target = {
        el.get("id"): el.get("targetRef")
        for el in choreo_el
        if _local(el.tag) == "sequenceFlow"
    }

    def task_comms(el: ET.Element) -> list[tuple[str, str, str]]:
        """Exchanges of one choreography task: one entry, or request then response."""
        eid = el.get("id", "")
        if _has_loop_marker(el):
            raise UnsupportedElementError("choreography task with loop marker", eid)
        refs = [child.text.strip() for child in el if _local(child.tag) == "messageFlowRef"]
        if not 1 <= len(refs) <= 2:
            raise MalformedModelError(f"choreography task {eid!r} needs 1 or 2 message flows")
        comms = [flow_comm(r) for r in refs]
        if len(comms) == 1:
            return comms
        initiator = participants.get(el.get("initiatingParticipantRef"))
        first = [c for c in comms if c[0] == initiator]
        second = [c for c in comms if c[0] != initiator]
        if len(first) != 1 or len(second) != 1:
            raise MalformedModelError(
                f"two-way task {eid!r} needs one initiating and one return message"
            )
        return [first[0], second[0]]

    absorbed: set[str] = set()
    for el in choreo_el:
        if _local(el.tag) == "eventBasedGateway":
            for fid in sorted(flows.outgoing.get(el.get("id"), [])):
                absorbed.add(flow_target[fid])

    nodes: list = []
    for el in choreo_el:
        tag = _local(el.tag)
        eid = el.get("id", "")
        if tag in _SKIP or tag in ("participant", "messageFlow"):
            continue
        if eid in absorbed:
            continue
        if tag == "startEvent":
            if _event_definitions(el):
                raise UnsupportedElementError(f"startEvent with {_event_definitions(el)[0]}", eid)
            nodes.append(StartEvent(flows.one_out(eid, "start event")))
        elif tag == "endEvent":
            if _event_definitions(el):
                raise UnsupportedElementError(f"endEvent with {_event_definitions(el)[0]}", eid)
            nodes.append(EndEvent(flows.one_in(eid, "end event"), f"{eid}__completed"))
        elif tag == "choreographyTask":
            inp = flows.one_in(eid, "choreography task")
            out = flows.one_out(eid, "choreography task")
            comms = task_comms(el)
            if len(comms) == 1:
                s, r, m = comms[0]
                nodes.append(ChoreoTask(inp, out, s, r, m))
            else:
                link = f"{eid}__link"
                (s1, r1, m1), (s2, r2, m2) = comms
                nodes.append(ChoreoTask(inp, link, s1, r1, m1))
                nodes.append(ChoreoTask(link, out, s2, r2, m2))
        elif tag == "parallelGateway":
            nodes.append(_classify_gateway(flows, eid, AndSplit, AndJoin))
        elif tag == "exclusiveGateway":
            nodes.append(_classify_gateway(flows, eid, XorSplit, XorJoin))
        elif tag == "eventBasedGateway":
            inp = flows.one_in(eid, "event-based gateway")
            out_flows = sorted(flows.outgoing.get(eid, []))
            if len(out_flows) < 2:
                raise MalformedModelError(
                    f"event-based gateway {eid!r} needs at least two outgoing flows"
                )
            branches = []
            for fid in out_flows:
                target = doc.by_id.get(flow_target[fid])
                if target is None or _local(target.tag) != "choreographyTask":
                    raise UnsupportedElementError(
                        "event-based gateway branch into "
                        + (_local(target.tag) if target is not None else "nothing"),
                        flow_target[fid],
                    )
                tid = target.get("id")
                t_out = flows.one_out(tid, "choreography task")
                comms = task_comms(target)
                s, r, m = comms[0]
                if len(comms) == 1:
                    branches.append(Branch(t_out, m, s, r))
                else:
                    link = f"{tid}__link"
                    branches.append(Branch(link, m, s, r))
                    s2, r2, m2 = comms[1]
                    nodes.append(ChoreoTask(link, t_out, s2, r2, m2))
            nodes.append(EventBased(inp, tuple(sorted(branches, key=branch_key))))
        else:
            raise UnsupportedElementError(tag, eid)
    return Choreography(tuple(nodes))

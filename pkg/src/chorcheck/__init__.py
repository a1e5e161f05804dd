"""Parse BPMN models, execute their token-game semantics, and check whether a
collaboration of processes conforms to a choreography."""

from .model import (
    TAU,
    Branch,
    ChoreoConfig,
    ChoreoTask,
    Choreography,
    CollabConfig,
    Collaboration,
    Comm,
    EventBased,
    InterRcv,
    InterSnd,
    MessageEdge,
    Pool,
    Process,
    StartEvent,
    EndEvent,
    AndSplit,
    AndJoin,
    XorSplit,
    XorJoin,
    Task,
    TaskRcv,
    TaskSnd,
    UnderflowError,
    dec_tokens,
    in_edges,
    inc_tokens,
    labels_choreo,
    labels_collab,
    out_edges,
)
from .text_syntax import (
    ArityError,
    DuplicateEdgeError,
    ParseError,
    parse_choreography,
    parse_collaboration,
    parse_process,
    print_model,
)
from .composition import (
    CompositionError,
    MessageNameClash,
    SelfMessage,
    UnmatchedReceive,
    UnmatchedSend,
    compose,
    rcv_map,
    snd_map,
    well_composed,
)
from .semantics import (
    BoundExceeded,
    DEFAULT_BOUNDS,
    ExplorationBounds,
    Lts,
    choreo_steps,
    collab_steps,
    generate_lts,
    hide,
    hiding_set,
    initial_config,
)
from .conformance import (
    AutSyntaxError,
    ConformanceResult,
    DistinguishingTrace,
    NonSimulablePair,
    WeakLts,
    check_bbc,
    check_tbc,
    export_aut,
    parse_aut,
    saturate,
)
from .bpmn_xml import (
    BpmnDocument,
    MalformedModelError,
    UnsupportedElementError,
    load_choreography,
    load_collaboration,
    load_process,
)

__version__ = "0.1.0"

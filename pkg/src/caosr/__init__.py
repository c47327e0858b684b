"""CAOSR: a deterministic simulator of cognitive-agent opportunistic resource pooling.

Mobile ad hoc nodes carry cognitive agents that quantify observed behaviors
into probabilistic beliefs about resource availability, exchange those
beliefs over a REQ/REP protocol during opportunistic contacts, and pool
resources; a metrics engine reports reliability, convergence, timing, and
failure-rate analyses.
"""

from .bob import (
    Behavior,
    BehaviorId,
    BehaviorParameterSample,
    Belief,
    BeliefId,
    BeliefRecord,
    CognitiveConfig,
    Observation,
    ObservationId,
    ParameterId,
    ParameterLog,
    Source,
    HOST_ID,
    behavior_probability,
    compute_parameter_weight,
    default_cognitive_config,
    generate_belief,
    identify_behaviors,
    observation_posterior,
    summarize_observations,
    update_belief_record,
)
from .engine import EventQueue, RunResult, Simulation, emit, run
from .errors import (
    CaosrError,
    DegenerateMaximum,
    DuplicateResource,
    EmptyLog,
    InconsistentTiming,
    NotRegistered,
    OrphanReply,
    ScenarioError,
    UnknownPreset,
    UnsupportedEvidence,
    WrongAuthority,
)
from .exchange import BeliefReply, BeliefRequest, ExchangeTiming, LinkDelayModel
from .metrics import (
    FormationCosts,
    FormationTiming,
    MetricsLedger,
    average_belief_formulation_time,
    convergence_rate,
    convergence_time,
    failure_rate,
    reliability,
    timing_rollup,
)
from .mobility import (
    ContactEvent,
    ContactKind,
    ContactLedger,
    ContactVariety,
    MobilityConfig,
    classify_contact,
    detect_contacts,
    record_contact,
    step_mobility,
)
from .nodes import (
    MCAState,
    Node,
    NodeClass,
    RegistrationSession,
    RegistrationState,
    Resource,
    ResourceRecord,
    ResourceType,
    attach_resource,
    clone_mca,
    demand_scan,
    register_device,
)
from .presets import PresetPlan, execute_preset, preset
from .scenario import Scenario, default_scenario, dump_scenario, load_scenario, parse_scenario

__version__ = "0.1.0"

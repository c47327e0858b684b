"""Behavior-observation-belief pipeline.

Raw per-node parameter captures are quantified into behaviors, behaviors are
summarized into per-family observations (mobility and resource profile), and
the winning observations generate one of four collaboration beliefs: patron,
casual, slack, or vagrant.

All operations here are pure functions of their inputs.  Mutable containers
(ParameterLog, the observation history, BeliefRecord) are each owned by a
single simulated node and touched only from the event loop.
"""

import enum
from dataclasses import dataclass, field, replace

from .errors import DegenerateMaximum, EmptyLog, ScenarioError, UnsupportedEvidence
from .units import seconds


class ParameterId(str, enum.Enum):
    VELOCITY = "velocity"
    CONTACT_PERIOD = "contact_period"
    INTERFACE_PERIOD = "interface_period"
    MOBILITY_PATTERN = "mobility_pattern"
    RESOURCE_HISTORY = "resource_history"


class Source(str, enum.Enum):
    EXTERNAL = "external"
    LOG = "log"


class BehaviorId(str, enum.Enum):
    VELOCITY_LEVEL = "velocity_level"
    NODE_AVAILABILITY = "node_availability"
    INTER_COMMUNICATION = "inter_communication"
    LOCATION_TRACING = "location_tracing"
    RESOURCE_MAPPING_HISTORY = "resource_mapping_history"


# Level names per behavior, ordered from low to high value ratio.
BEHAVIOR_LEVELS: dict[BehaviorId, tuple[str, str, str]] = {
    BehaviorId.VELOCITY_LEVEL: ("low", "medium", "high"),
    BehaviorId.NODE_AVAILABILITY: ("sparse", "moderate", "dense"),
    BehaviorId.INTER_COMMUNICATION: ("sparse", "moderate", "dense"),
    BehaviorId.LOCATION_TRACING: ("random", "semi_deterministic", "deterministic"),
    BehaviorId.RESOURCE_MAPPING_HISTORY: ("poor", "moderate", "rich"),
}

# Which captured parameter feeds which behavior.
PARAMETER_BEHAVIOR: dict[ParameterId, BehaviorId] = {
    ParameterId.VELOCITY: BehaviorId.VELOCITY_LEVEL,
    ParameterId.CONTACT_PERIOD: BehaviorId.NODE_AVAILABILITY,
    ParameterId.INTERFACE_PERIOD: BehaviorId.INTER_COMMUNICATION,
    ParameterId.MOBILITY_PATTERN: BehaviorId.LOCATION_TRACING,
    ParameterId.RESOURCE_HISTORY: BehaviorId.RESOURCE_MAPPING_HISTORY,
}

BEHAVIOR_PARAMETERS: dict[BehaviorId, tuple[ParameterId, ...]] = {
    behavior: tuple(p for p, b in PARAMETER_BEHAVIOR.items() if b is behavior)
    for behavior in BehaviorId
}


class ObservationId(str, enum.Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"
    HIGHLY_DYNAMIC = "highly_dynamic"
    HIGH_PROFILE = "high_profile"
    MEDIUM_PROFILE = "medium_profile"
    LOW_PROFILE = "low_profile"


MOBILITY_FAMILY = (ObservationId.STATIC, ObservationId.DYNAMIC, ObservationId.HIGHLY_DYNAMIC)
PROFILE_FAMILY = (ObservationId.HIGH_PROFILE, ObservationId.MEDIUM_PROFILE, ObservationId.LOW_PROFILE)
FAMILIES: dict[str, tuple[ObservationId, ...]] = {
    "mobility": MOBILITY_FAMILY,
    "profile": PROFILE_FAMILY,
}


def family_of(observation_id: ObservationId) -> str:
    return "mobility" if observation_id in MOBILITY_FAMILY else "profile"


class BeliefId(str, enum.Enum):
    # Enumeration order is the tie-break order everywhere.
    PATRON = "patron"
    CASUAL = "casual"
    SLACK = "slack"
    VAGRANT = "vagrant"


# Reserved id for a node's own entry in its belief record.
HOST_ID = -1


@dataclass(frozen=True)
class BehaviorParameterSample:
    """One timestamped capture of a named behavior parameter."""

    parameter_id: ParameterId
    value: float
    max_value: float
    source: Source = Source.EXTERNAL
    captured_at: int = 0  # simulated microseconds

    def __post_init__(self):
        if self.max_value <= 0:
            raise DegenerateMaximum(
                f"{self.parameter_id.value}: max_value must be positive, got {self.max_value}"
            )
        if not 0 <= self.value <= self.max_value:
            raise ValueError(
                f"{self.parameter_id.value}: value {self.value} outside [0, {self.max_value}]"
            )

    @property
    def ratio(self) -> float:
        return self.value / self.max_value


@dataclass
class ParameterLog:
    """Per-node time-ordered capture log with per-parameter counts.

    refresh() starts a new capture session: both the samples and the counts
    cover only the window since the last refresh.
    """

    refresh_period: int = seconds(10)
    samples: list[BehaviorParameterSample] = field(default_factory=list)
    capture_counts: dict[ParameterId, int] = field(default_factory=dict)

    def add(self, sample: BehaviorParameterSample) -> None:
        if self.samples and sample.captured_at < self.samples[-1].captured_at:
            raise ValueError("samples must be appended in non-decreasing time order")
        self.samples.append(sample)
        self.capture_counts[sample.parameter_id] = self.capture_counts.get(sample.parameter_id, 0) + 1

    def refresh(self) -> None:
        self.samples.clear()
        self.capture_counts.clear()

    def total_captures(self) -> int:
        return sum(self.capture_counts.values())


@dataclass(frozen=True)
class Behavior:
    """A quantified behavior: a kind, a level, and its occurrence probability."""

    behavior_id: BehaviorId
    level: str
    probability: float
    contributing_parameters: frozenset[ParameterId]

    def __post_init__(self):
        if not 0 <= self.probability <= 1:
            raise ValueError(f"probability {self.probability} outside [0, 1]")
        if not self.contributing_parameters:
            raise ValueError("a behavior needs at least one contributing parameter")
        if self.level not in BEHAVIOR_LEVELS[self.behavior_id]:
            raise ValueError(f"unknown level {self.level!r} for {self.behavior_id.value}")


@dataclass(frozen=True)
class Observation:
    """A summarized observation with its in-family posterior."""

    observation_id: ObservationId
    posterior: float
    support_count: int = 1

    def __post_init__(self):
        if not 0 <= self.posterior <= 1:
            raise ValueError(f"posterior {self.posterior} outside [0, 1]")


@dataclass(frozen=True)
class Belief:
    """A collaboration belief over a node, with its normalized posterior."""

    belief_id: BeliefId
    posterior: float
    generated_at: int = 0
    provenance: int | None = None  # unique id attached when a run generates it

    def __post_init__(self):
        if not 0 <= self.posterior <= 1:
            raise ValueError(f"posterior {self.posterior} outside [0, 1]")


@dataclass
class BeliefRecord:
    """Per-node table of the latest known beliefs: self plus neighbors."""

    refresh_period: int = seconds(10)
    entries: dict[int, tuple[Belief, int]] = field(default_factory=dict)
    self_entry: tuple[Belief, int] | None = None

    def refresh(self, now: int) -> None:
        """Purge neighbor entries older than the refresh period; keep self."""
        stale = [nid for nid, (_, at) in self.entries.items() if now - at > self.refresh_period]
        for nid in stale:
            del self.entries[nid]

    def self_is_current(self, now: int) -> bool:
        return self.self_entry is not None and now - self.self_entry[1] <= self.refresh_period

    def size(self) -> int:
        return len(self.entries) + (1 if self.self_entry is not None else 0)


@dataclass
class CognitiveConfig:
    """Quantization cut points, priors, and conditional tables for the pipeline.

    Shipped defaults use uniform priors and likelihood rows built from the
    affinity map below with an 8:1 strength ratio, each row normalized.
    """

    quantization_thresholds: dict[ParameterId, tuple[float, float]]
    behavior_priors: dict[BehaviorId, dict[str, float]]
    likelihood_bo: dict[ObservationId, dict[tuple[BehaviorId, str], float]]
    likelihood_ob: dict[BeliefId, dict[ObservationId, float]]
    belief_priors: dict[BeliefId, float]
    favorability_threshold: float = 0.5

    def validate(self) -> None:
        tol = 1e-9
        if not 0 < self.favorability_threshold <= 1:
            raise ScenarioError(
                f"favorability_threshold {self.favorability_threshold} outside (0, 1]"
            )
        for pid in ParameterId:
            lo, hi = self.quantization_thresholds[pid]
            if not 0 <= lo <= hi <= 1:
                raise ScenarioError(f"quantization for {pid.value} must satisfy 0 <= lo <= hi <= 1")
        for behavior in BehaviorId:
            row = self.behavior_priors[behavior]
            _check_distribution(row.values(), f"behavior_priors[{behavior.value}]", tol)
        for ob in ObservationId:
            row = self.likelihood_bo[ob]
            if set(row) != {(b, l) for b in BehaviorId for l in BEHAVIOR_LEVELS[b]}:
                raise ScenarioError(f"likelihood_bo[{ob.value}] must cover every behavior level")
            _check_distribution(row.values(), f"likelihood_bo[{ob.value}]", tol)
        for belief in BeliefId:
            row = self.likelihood_ob[belief]
            for name, fam in FAMILIES.items():
                _check_distribution(
                    (row[ob] for ob in fam), f"likelihood_ob[{belief.value}].{name}", tol
                )
        _check_distribution(self.belief_priors.values(), "belief_priors", tol)


def _check_distribution(values, label: str, tol: float) -> None:
    values = list(values)
    if any(v < 0 for v in values):
        raise ScenarioError(f"{label}: negative probability")
    total = sum(values)
    if abs(total - 1.0) > tol:
        raise ScenarioError(f"{label}: row sums to {total!r}, expected 1")


# Affinity map: each behavior level supports exactly one observation.  The
# default likelihood_bo rows weigh the supporting level 8x against 1x for
# every other level, then normalize per observation row.
LEVEL_AFFINITY: dict[tuple[BehaviorId, str], ObservationId] = {
    (BehaviorId.VELOCITY_LEVEL, "low"): ObservationId.STATIC,
    (BehaviorId.VELOCITY_LEVEL, "medium"): ObservationId.DYNAMIC,
    (BehaviorId.VELOCITY_LEVEL, "high"): ObservationId.HIGHLY_DYNAMIC,
    (BehaviorId.NODE_AVAILABILITY, "sparse"): ObservationId.HIGHLY_DYNAMIC,
    (BehaviorId.NODE_AVAILABILITY, "moderate"): ObservationId.DYNAMIC,
    (BehaviorId.NODE_AVAILABILITY, "dense"): ObservationId.STATIC,
    (BehaviorId.INTER_COMMUNICATION, "sparse"): ObservationId.LOW_PROFILE,
    (BehaviorId.INTER_COMMUNICATION, "moderate"): ObservationId.MEDIUM_PROFILE,
    (BehaviorId.INTER_COMMUNICATION, "dense"): ObservationId.HIGH_PROFILE,
    (BehaviorId.LOCATION_TRACING, "random"): ObservationId.HIGHLY_DYNAMIC,
    (BehaviorId.LOCATION_TRACING, "semi_deterministic"): ObservationId.DYNAMIC,
    (BehaviorId.LOCATION_TRACING, "deterministic"): ObservationId.STATIC,
    (BehaviorId.RESOURCE_MAPPING_HISTORY, "poor"): ObservationId.LOW_PROFILE,
    (BehaviorId.RESOURCE_MAPPING_HISTORY, "moderate"): ObservationId.MEDIUM_PROFILE,
    (BehaviorId.RESOURCE_MAPPING_HISTORY, "rich"): ObservationId.HIGH_PROFILE,
}

AFFINITY_STRENGTH = 8.0

# Default P(observation | belief) rows: a mobility triple followed by a
# profile triple, each summing to 1.  Bare static reads as slack; patron
# additionally needs a high resource profile.
DEFAULT_LIKELIHOOD_OB: dict[BeliefId, tuple[float, ...]] = {
    BeliefId.PATRON: (0.6, 0.3, 0.1, 0.8, 0.15, 0.05),
    BeliefId.CASUAL: (0.2, 0.5, 0.3, 0.2, 0.6, 0.2),
    BeliefId.SLACK: (0.7, 0.2, 0.1, 0.1, 0.3, 0.6),
    BeliefId.VAGRANT: (0.1, 0.3, 0.6, 0.05, 0.15, 0.8),
}


def default_cognitive_config(favorability_threshold: float = 0.5) -> CognitiveConfig:
    """Build the shipped default tables: uniform priors, 8:1 affinity rows."""
    thresholds = {pid: (1 / 3, 2 / 3) for pid in ParameterId}
    behavior_priors = {
        b: {level: 1 / 3 for level in BEHAVIOR_LEVELS[b]} for b in BehaviorId
    }
    likelihood_bo: dict[ObservationId, dict[tuple[BehaviorId, str], float]] = {}
    all_levels = [(b, l) for b in BehaviorId for l in BEHAVIOR_LEVELS[b]]
    for ob in ObservationId:
        weights = {
            key: AFFINITY_STRENGTH if LEVEL_AFFINITY[key] is ob else 1.0 for key in all_levels
        }
        total = sum(weights.values())
        likelihood_bo[ob] = {key: w / total for key, w in weights.items()}
    likelihood_ob = {
        belief: dict(zip(ObservationId, row)) for belief, row in DEFAULT_LIKELIHOOD_OB.items()
    }
    belief_priors = {belief: 0.25 for belief in BeliefId}
    config = CognitiveConfig(
        quantization_thresholds=thresholds,
        behavior_priors=behavior_priors,
        likelihood_bo=likelihood_bo,
        likelihood_ob=likelihood_ob,
        belief_priors=belief_priors,
        favorability_threshold=favorability_threshold,
    )
    config.validate()
    return config


def compute_parameter_weight(log: ParameterLog, parameter_id: ParameterId) -> float:
    """Capture-count share of one parameter among all captures this session."""
    total = log.total_captures()
    if total == 0:
        raise EmptyLog("cannot weight parameters of an empty log")
    return log.capture_counts.get(parameter_id, 0) / total


def behavior_probability(
    samples: list[BehaviorParameterSample], weights: dict[ParameterId, float]
) -> float:
    """Weighted mean value ratio over the samples' parameters, clamped to [0, 1].

    Weights are renormalized over the parameters actually present; several
    samples of one parameter contribute their mean ratio.
    """
    if not samples:
        raise EmptyLog("behavior_probability needs at least one sample")
    ratios: dict[ParameterId, list[float]] = {}
    for sample in samples:
        if sample.max_value <= 0:
            raise DegenerateMaximum(f"{sample.parameter_id.value}: zero maximum")
        ratios.setdefault(sample.parameter_id, []).append(sample.ratio)
    present = sorted(ratios, key=lambda p: p.value)
    restricted = {p: weights.get(p, 0.0) for p in present}
    total_weight = sum(restricted.values())
    if total_weight <= 0:
        # No capture-count information for these parameters: fall back to equal weights.
        restricted = {p: 1.0 for p in present}
        total_weight = float(len(present))
    value = sum(
        (restricted[p] / total_weight) * (sum(ratios[p]) / len(ratios[p])) for p in present
    )
    return min(1.0, max(0.0, value))


def quantize_level(behavior_id: BehaviorId, ratio: float, config: CognitiveConfig) -> str:
    low_cut, high_cut = config.quantization_thresholds[BEHAVIOR_PARAMETERS[behavior_id][0]]
    levels = BEHAVIOR_LEVELS[behavior_id]
    if ratio < low_cut:
        return levels[0]
    if ratio < high_cut:
        return levels[1]
    return levels[2]


def identify_behaviors(log: ParameterLog, config: CognitiveConfig) -> list[Behavior]:
    """Produce one behavior per kind that has contributing samples.

    The level comes from the quantization cut points applied to the mean value
    ratio; the probability is the capture-weighted ratio sum.  The result is
    ordered by behavior kind so runs are reproducible.
    """
    if not log.samples:
        return []
    weights = {
        pid: compute_parameter_weight(log, pid) for pid in ParameterId
    }
    by_behavior: dict[BehaviorId, list[BehaviorParameterSample]] = {}
    for sample in log.samples:
        by_behavior.setdefault(PARAMETER_BEHAVIOR[sample.parameter_id], []).append(sample)
    behaviors = []
    for behavior_id in BehaviorId:
        contributing = by_behavior.get(behavior_id)
        if not contributing:
            continue
        mean_ratio = sum(s.ratio for s in contributing) / len(contributing)
        behaviors.append(
            Behavior(
                behavior_id=behavior_id,
                level=quantize_level(behavior_id, mean_ratio, config),
                probability=behavior_probability(contributing, weights),
                contributing_parameters=frozenset(s.parameter_id for s in contributing),
            )
        )
    return behaviors


def observation_family_scores(
    behaviors: list[Behavior], family: str, config: CognitiveConfig
) -> dict[ObservationId, float]:
    """Unnormalized per-observation evidence scores for one family."""
    scores = {}
    for ob in FAMILIES[family]:
        row = config.likelihood_bo[ob]
        scores[ob] = sum(
            config.behavior_priors[b.behavior_id][b.level]
            * row[(b.behavior_id, b.level)]
            * b.probability
            for b in behaviors
        )
    return scores


def observation_posterior(
    behaviors: list[Behavior], observation_id: ObservationId, config: CognitiveConfig
) -> float:
    """Posterior of one observation, normalized within its family."""
    if not behaviors:
        raise UnsupportedEvidence("no behaviors to observe")
    scores = observation_family_scores(behaviors, family_of(observation_id), config)
    total = sum(scores.values())
    if total <= 0:
        raise UnsupportedEvidence("all observation scores are zero for this family")
    return scores[observation_id] / total


def favorable_behaviors(behaviors: list[Behavior], config: CognitiveConfig) -> list[Behavior]:
    tau = config.favorability_threshold
    return [b for b in behaviors if b.probability >= tau]


def tick_observation_winners(
    behaviors: list[Behavior], config: CognitiveConfig
) -> list[Observation]:
    """Per-family winning observation for one cognition tick.

    Only favorable behaviors count as evidence; a family with no evidence
    produces no winner this tick.
    """
    evidence = favorable_behaviors(behaviors, config)
    if not evidence:
        return []
    winners = []
    for family, members in FAMILIES.items():
        scores = observation_family_scores(evidence, family, config)
        total = sum(scores.values())
        if total <= 0:
            continue
        best = max(members, key=lambda ob: scores[ob])  # ties: enumeration order via max
        winners.append(Observation(observation_id=best, posterior=scores[best] / total))
    return winners


def summarize_observations(history: list[Observation]) -> list[Observation]:
    """Most frequent winner per family over a session of tick winners.

    Ties break toward the earlier observation in enumeration order.  The
    summarized posterior is the mean posterior over the ticks it won.
    """
    if not history:
        return []
    summarized = []
    for family, members in FAMILIES.items():
        counts: dict[ObservationId, int] = {}
        posteriors: dict[ObservationId, list[float]] = {}
        for entry in history:
            if family_of(entry.observation_id) != family:
                continue
            counts[entry.observation_id] = counts.get(entry.observation_id, 0) + 1
            posteriors.setdefault(entry.observation_id, []).append(entry.posterior)
        if not counts:
            continue
        best = max(members, key=lambda ob: counts.get(ob, 0))
        summarized.append(
            Observation(
                observation_id=best,
                posterior=sum(posteriors[best]) / counts[best],
                support_count=counts[best],
            )
        )
    return summarized


def generate_belief(
    observations: list[Observation], config: CognitiveConfig, now: int = 0
) -> Belief:
    """Argmax belief over the four classes given the winning observations.

    score(belief) = prior(belief) * product of P(observation | belief);
    posteriors are normalized over the four classes and ties break in
    enumeration order (patron first).
    """
    if not observations:
        raise UnsupportedEvidence("no observations to generate a belief from")
    scores = {}
    for belief in BeliefId:
        score = config.belief_priors[belief]
        for ob in observations:
            score *= config.likelihood_ob[belief][ob.observation_id]
        scores[belief] = score
    total = sum(scores.values())
    if total <= 0:
        raise UnsupportedEvidence("all belief scores are zero")
    best = max(BeliefId, key=lambda b: scores[b])  # max keeps the first maximum
    return Belief(belief_id=best, posterior=scores[best] / total, generated_at=now)


def favorable_observations(
    observations: list[Observation], config: CognitiveConfig
) -> list[Observation]:
    tau = config.favorability_threshold
    return [ob for ob in observations if ob.posterior >= tau]


def formulate_belief(
    observation_history: list[Observation], config: CognitiveConfig, now: int = 0
) -> Belief:
    """Full back half of the pipeline: summarize, filter, generate."""
    summarized = summarize_observations(observation_history)
    favorable = favorable_observations(summarized, config)
    if not favorable:
        raise UnsupportedEvidence("no favorable observation survives the threshold")
    return generate_belief(favorable, config, now=now)


def update_belief_record(
    record: BeliefRecord, node_id: int, belief: Belief, now: int
) -> BeliefRecord:
    """Insert or overwrite the entry for node_id; HOST_ID targets the self entry."""
    if node_id == HOST_ID:
        record.self_entry = (belief, now)
    else:
        record.entries[node_id] = (belief, now)
    return record

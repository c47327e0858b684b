"""Scenario files: a line-oriented format of [section] headers and key = value rows.

Tables are whitespace-separated rows so scenario files stay diff-able and
hand-editable.  load_scenario() parses and validates; dump_scenario() writes
the canonical, fully materialized form whose digest identifies a run.
"""

import hashlib
from dataclasses import dataclass, field, replace

from .bob import (
    BEHAVIOR_LEVELS,
    BehaviorId,
    BeliefId,
    CognitiveConfig,
    ObservationId,
    ParameterId,
    default_cognitive_config,
)
from .errors import ScenarioError
from .exchange import LinkDelayModel
from .metrics import FormationCosts
from .mobility import MobilityConfig
from .nodes import NodeClass, ResourceType
from .units import ms, seconds


@dataclass(frozen=True)
class ResourceSpec:
    rtype: ResourceType
    count: int
    capacity: float
    current: float | None = None  # initial remaining capacity; defaults to full


@dataclass(frozen=True)
class PopulationGroup:
    name: str
    node_class: NodeClass
    count: int
    comm_range: float
    speed_range: tuple[float, float]
    drain_per_s: float
    resources: tuple[ResourceSpec, ...] = ()


@dataclass(frozen=True)
class ExplicitNode:
    node_id: int
    node_class: NodeClass
    position: tuple[float, float]
    comm_range: float
    speed_range: tuple[float, float]
    drain_per_s: float
    waypoint: tuple[float, float] | None = None
    resources: tuple[ResourceSpec, ...] = ()


@dataclass(frozen=True)
class ArrivalConfig:
    model: str = "ramp"  # ramp | poisson
    warmup: int = seconds(20)
    rate_per_s: float = 2.0


@dataclass(frozen=True)
class ProtocolConfig:
    link: LinkDelayModel = field(default_factory=LinkDelayModel)
    exchange_timeout: int = ms(500)
    retry_limit: int = 1
    demand_threshold: float = 0.2
    capture_period: int = seconds(1)
    formation_period: int = seconds(5)
    trace_cost: int = ms(0.1)  # per record entry scanned


@dataclass(frozen=True)
class CaptureConfig:
    velocity_max: float = 15.0  # m/s, ratio denominator for the velocity parameter
    contact_period_max: int = seconds(20)


@dataclass
class Scenario:
    duration: int = seconds(60)
    tick: int = ms(100)
    seed: int = 1
    sampling_interval: int = seconds(2)
    strict: bool = False
    area: tuple[float, float] = (1000.0, 1000.0)
    pause_range: tuple[int, int] = (0, ms(150))
    arrival: ArrivalConfig = field(default_factory=ArrivalConfig)
    deny_ids: frozenset[int] = frozenset()
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    capture: CaptureConfig = field(default_factory=CaptureConfig)
    cognitive: CognitiveConfig = field(default_factory=default_cognitive_config)
    costs: FormationCosts = field(default_factory=FormationCosts)
    log_refresh: int = seconds(10)
    record_refresh: int = seconds(10)
    population: tuple[PopulationGroup, ...] = ()
    explicit_nodes: tuple[ExplicitNode, ...] = ()

    @property
    def pause_representative(self) -> int:
        lo, hi = self.pause_range
        return (lo + hi) // 2

    def total_nodes(self) -> int:
        return sum(g.count for g in self.population) + len(self.explicit_nodes)

    def mobility_config(self) -> MobilityConfig:
        return MobilityConfig(area=self.area, pause_range=self.pause_range, tick=self.tick)

    def validate(self) -> None:
        if self.duration < 0:
            raise ScenarioError("duration must be non-negative")
        if self.tick <= 0:
            raise ScenarioError("tick must be positive")
        if self.sampling_interval <= 0:
            raise ScenarioError("sampling interval must be positive")
        lo, hi = self.pause_range
        if not 0 <= lo <= hi:
            raise ScenarioError("pause range must satisfy 0 <= min <= max")
        if self.arrival.model not in ("ramp", "poisson"):
            raise ScenarioError(f"unknown arrival model {self.arrival.model!r}")
        if self.arrival.warmup < 0:
            raise ScenarioError("warmup must be non-negative")
        if not 0 < self.protocol.demand_threshold < 1:
            raise ScenarioError("demand threshold must be in (0, 1)")
        if self.protocol.retry_limit < 0:
            raise ScenarioError("retry limit must be non-negative")
        if self.protocol.capture_period <= 0 or self.protocol.formation_period <= 0:
            raise ScenarioError("capture and formation periods must be positive")
        if self.capture.velocity_max <= 0 or self.capture.contact_period_max <= 0:
            raise ScenarioError("capture maxima must be positive")
        for group in self.population:
            self._validate_population_entry(group.name, group)
        seen_ids = set()
        for node in self.explicit_nodes:
            if node.node_id in seen_ids:
                raise ScenarioError(f"duplicate explicit node id {node.node_id}")
            seen_ids.add(node.node_id)
            self._validate_population_entry(f"node {node.node_id}", node)
            x, y = node.position
            if not (0 <= x <= self.area[0] and 0 <= y <= self.area[1]):
                raise ScenarioError(f"node {node.node_id} starts outside the area")
        self.mobility_config().validate()
        self.cognitive.validate()

    def _validate_population_entry(self, label, entry) -> None:
        if getattr(entry, "count", 1) <= 0:
            raise ScenarioError(f"{label}: count must be positive")
        if entry.comm_range <= 0:
            raise ScenarioError(f"{label}: comm_range must be positive")
        lo, hi = entry.speed_range
        if not 0 <= lo <= hi:
            raise ScenarioError(f"{label}: speed range must satisfy 0 <= min <= max")
        if entry.drain_per_s < 0:
            raise ScenarioError(f"{label}: drain rate must be non-negative")
        for spec in entry.resources:
            if spec.count <= 0:
                raise ScenarioError(f"{label}: resource count must be positive")
            if spec.capacity <= 0:
                raise ScenarioError(f"{label}: resource capacity must be positive")
            if spec.current is not None and not 0 <= spec.current <= spec.capacity:
                raise ScenarioError(f"{label}: current capacity outside [0, capacity]")


def _default_resources(entries: list[tuple[ResourceType, float]]) -> tuple[ResourceSpec, ...]:
    return tuple(ResourceSpec(rtype=r, count=1, capacity=c) for r, c in entries)


def _needy(spec: ResourceSpec, health: float = 0.15) -> ResourceSpec:
    return replace(spec, current=spec.capacity * health)


def default_population() -> tuple[PopulationGroup, ...]:
    """The 200-node post-disaster mix: two thirds mobile, static infrastructure first.

    Mobile responders arrive needy (most resource types already starved), so
    their belief evidence builds up only as pooling replenishes them; the
    surviving infrastructure starts healthy and drains while serving.
    """
    R = ResourceType
    team_resources = _default_resources(
        [(R.MEMORY, 512), (R.PROCESSOR, 4), (R.COMMUNICATION_CHANNEL, 2), (R.SOFTWARE_SERVICE, 2)]
    )
    team_resources = tuple(
        _needy(spec) if spec.rtype is not R.SOFTWARE_SERVICE else spec for spec in team_resources
    )
    bystander_resources = tuple(
        _needy(spec, 0.15 if spec.rtype is R.MEMORY else 0.1)
        for spec in _default_resources([(R.MEMORY, 64), (R.CAMERA, 1)])
    )
    return (
        PopulationGroup(
            "navcon", NodeClass.NAVIGATION_CONTROLLER, 10, 60.0, (0.0, 0.0), 0.02,
            _default_resources([(R.MEMORY, 2048), (R.PROCESSOR, 16), (R.COMMUNICATION_CHANNEL, 8), (R.SOFTWARE_SERVICE, 4)]),
        ),
        PopulationGroup(
            "vehcon", NodeClass.VEHICLE_CONTROLLER, 16, 60.0, (0.0, 0.0), 0.025,
            _default_resources([(R.MEMORY, 1024), (R.PROCESSOR, 8), (R.COMMUNICATION_CHANNEL, 4), (R.SOFTWARE_SERVICE, 2)]),
        ),
        PopulationGroup(
            "infra", NodeClass.SURVIVED_INFRASTRUCTURE, 40, 60.0, (0.0, 0.0), 0.025,
            _default_resources([(R.MEMORY, 2048), (R.COMMUNICATION_CHANNEL, 8), (R.SOFTWARE_SERVICE, 4)]),
        ),
        PopulationGroup("teams", NodeClass.RESCUE_TEAM, 50, 30.0, (0.5, 2.0), 0.02, team_resources),
        PopulationGroup(
            "vehicles", NodeClass.RESCUE_VEHICLE, 25, 60.0, (5.0, 15.0), 0.015,
            _default_resources([(R.MEMORY, 1024), (R.PROCESSOR, 8), (R.COMMUNICATION_CHANNEL, 4), (R.SENSOR, 2), (R.CAMERA, 1)]),
        ),
        PopulationGroup("bystanders", NodeClass.BYSTANDER, 59, 20.0, (0.3, 1.5), 0.05, bystander_resources),
    )


def default_scenario(seed: int = 1) -> Scenario:
    scenario = Scenario(seed=seed, population=default_population())
    scenario.validate()
    return scenario


# ---------------------------------------------------------------------------
# Parsing


def _parse_lines(text: str) -> dict[str, list[tuple[int, str, str]]]:
    """Split into sections of (line number, key, raw value) triples."""
    sections: dict[str, list[tuple[int, str, str]]] = {}
    current: str | None = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if not current:
                raise ScenarioError("empty section name", line=number)
            sections.setdefault(current, [])
            continue
        if "=" not in line:
            raise ScenarioError(f"expected 'key = value', got {line!r}", line=number)
        if current is None:
            raise ScenarioError("key outside any [section]", line=number)
        key, value = line.split("=", 1)
        sections[current].append((number, key.strip(), value.strip()))
    if not sections:
        raise ScenarioError("scenario file is empty")
    return sections


def _as_float(value: str, line: int, key: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ScenarioError(f"{key}: not a number: {value!r}", line=line) from None


def _as_int(value: str, line: int, key: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ScenarioError(f"{key}: not an integer: {value!r}", line=line) from None


def _as_bool(value: str, line: int, key: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ScenarioError(f"{key}: expected a boolean, got {value!r}", line=line)


def _floats(value: str, line: int, key: str, expected: int | None = None) -> list[float]:
    parts = value.split()
    if expected is not None and len(parts) != expected:
        raise ScenarioError(f"{key}: expected {expected} values, got {len(parts)}", line=line)
    return [_as_float(part, line, key) for part in parts]


_ENUM_HINTS = {
    NodeClass: "node class",
    ResourceType: "resource type",
    ParameterId: "parameter",
    BehaviorId: "behavior",
    ObservationId: "observation",
    BeliefId: "belief",
}


def _as_enum(enum_type, value: str, line: int):
    try:
        return enum_type(value)
    except ValueError:
        names = ", ".join(member.value for member in enum_type)
        raise ScenarioError(
            f"unknown {_ENUM_HINTS[enum_type]} {value!r} (expected one of: {names})", line=line
        ) from None


def _behavior_level_order() -> list[tuple[BehaviorId, str]]:
    return [(b, level) for b in BehaviorId for level in BEHAVIOR_LEVELS[b]]


def _parse_resources(rows: list[tuple[int, str, str]], label: str) -> tuple[ResourceSpec, ...]:
    specs = []
    for line, key, value in rows:
        rtype = _as_enum(ResourceType, key, line)
        parts = value.split()
        if len(parts) not in (2, 3):
            raise ScenarioError(
                f"{label}.{key}: expected 'count capacity [current]'", line=line
            )
        count = _as_int(parts[0], line, key)
        capacity = _as_float(parts[1], line, key)
        current = _as_float(parts[2], line, key) if len(parts) == 3 else None
        specs.append(ResourceSpec(rtype=rtype, count=count, capacity=capacity, current=current))
    return tuple(specs)


def parse_scenario(text: str) -> Scenario:
    sections = _parse_lines(text)
    scenario = Scenario()
    consumed = set()

    def rows(name: str) -> list[tuple[int, str, str]]:
        consumed.add(name)
        return sections.get(name, [])

    simple: dict[str, dict[str, tuple[int, str]]] = {}
    for name in ("run", "area", "mobility", "arrival", "registration", "protocol", "cognitive"):
        simple[name] = {key: (line, value) for line, key, value in rows(name)}

    def grab(section: str, key: str):
        return simple[section].pop(key, None)

    def number(section: str, key: str, default: float) -> float:
        got = grab(section, key)
        return default if got is None else _as_float(got[1], got[0], key)

    def integer(section: str, key: str, default: int) -> int:
        got = grab(section, key)
        return default if got is None else _as_int(got[1], got[0], key)

    duration = ms(number("run", "duration_ms", scenario.duration / 1000))
    tick = ms(number("run", "tick_ms", scenario.tick / 1000))
    seed = integer("run", "seed", scenario.seed)
    sampling = ms(number("run", "sampling_interval_ms", scenario.sampling_interval / 1000))
    strict_row = grab("run", "strict")
    strict = scenario.strict if strict_row is None else _as_bool(strict_row[1], strict_row[0], "strict")

    area = (number("area", "width_m", scenario.area[0]), number("area", "height_m", scenario.area[1]))
    pause = (
        ms(number("mobility", "pause_min_ms", scenario.pause_range[0] / 1000)),
        ms(number("mobility", "pause_max_ms", scenario.pause_range[1] / 1000)),
    )

    model_row = grab("arrival", "model")
    arrival = ArrivalConfig(
        model=scenario.arrival.model if model_row is None else model_row[1],
        warmup=ms(number("arrival", "warmup_ms", scenario.arrival.warmup / 1000)),
        rate_per_s=number("arrival", "rate_per_s", scenario.arrival.rate_per_s),
    )

    deny_row = grab("registration", "deny")
    deny_ids = scenario.deny_ids
    if deny_row is not None and deny_row[1]:
        deny_ids = frozenset(_as_int(part, deny_row[0], "deny") for part in deny_row[1].split())

    link = LinkDelayModel(
        data_rate_bps=integer("protocol", "data_rate_bps", 2_000_000),
        processing=ms(number("protocol", "processing_delay_ms", 1)),
        req_size_bytes=integer("protocol", "req_size_bytes", 64),
        rep_size_bytes=integer("protocol", "rep_size_bytes", 256),
        pull_size_bytes=integer("protocol", "pull_size_bytes", 1024),
    )
    protocol = ProtocolConfig(
        link=link,
        exchange_timeout=ms(number("protocol", "exchange_timeout_ms", 500)),
        retry_limit=integer("protocol", "retry_limit", 1),
        demand_threshold=number("protocol", "demand_threshold", 0.2),
        capture_period=ms(number("protocol", "capture_period_ms", 1000)),
        formation_period=ms(number("protocol", "formation_period_ms", 5000)),
        trace_cost=ms(number("protocol", "trace_cost_ms", 0.1)),
    )

    capture = CaptureConfig(
        velocity_max=number("cognitive", "velocity_max_mps", 15.0),
        contact_period_max=ms(number("cognitive", "contact_period_max_ms", 20000)),
    )
    costs = FormationCosts(
        capture=ms(number("cognitive", "capture_cost_ms", 1.0)),
        observation=ms(number("cognitive", "observation_stage_cost_ms", 0.5)),
        belief=ms(number("cognitive", "belief_stage_cost_ms", 0.5)),
    )
    log_refresh = ms(number("cognitive", "log_refresh_ms", 10000))
    record_refresh = ms(number("cognitive", "record_refresh_ms", 10000))
    favorability = number("cognitive", "favorability_threshold", 0.5)

    cognitive = _parse_cognitive_tables(rows, favorability)

    for section, leftover in simple.items():
        for key, (line, _) in leftover.items():
            raise ScenarioError(f"unknown key {key!r} in [{section}]", line=line)

    population = []
    for line, name, value in rows("population"):
        parts = value.split()
        if len(parts) != 6:
            raise ScenarioError(
                f"population group {name!r}: expected 'class count range speed_min speed_max drain'",
                line=line,
            )
        population.append(
            PopulationGroup(
                name=name,
                node_class=_as_enum(NodeClass, parts[0], line),
                count=_as_int(parts[1], line, name),
                comm_range=_as_float(parts[2], line, name),
                speed_range=(_as_float(parts[3], line, name), _as_float(parts[4], line, name)),
                drain_per_s=_as_float(parts[5], line, name),
                resources=_parse_resources(rows(f"resources.{name}"), f"resources.{name}"),
            )
        )

    explicit = []
    for line, key, value in rows("nodes"):
        node_id = _as_int(key, line, "node id")
        parts = value.split()
        if len(parts) not in (7, 9):
            raise ScenarioError(
                f"node {node_id}: expected 'class x y range speed_min speed_max drain [wx wy]'",
                line=line,
            )
        waypoint = None
        if len(parts) == 9:
            waypoint = (_as_float(parts[7], line, key), _as_float(parts[8], line, key))
        explicit.append(
            ExplicitNode(
                node_id=node_id,
                node_class=_as_enum(NodeClass, parts[0], line),
                position=(_as_float(parts[1], line, key), _as_float(parts[2], line, key)),
                comm_range=_as_float(parts[3], line, key),
                speed_range=(_as_float(parts[4], line, key), _as_float(parts[5], line, key)),
                drain_per_s=_as_float(parts[6], line, key),
                waypoint=waypoint,
                resources=_parse_resources(rows(f"resources.node.{node_id}"), f"resources.node.{node_id}"),
            )
        )

    for name in sections:
        if name not in consumed:
            raise ScenarioError(f"unknown section [{name}]")

    if not population and not explicit:
        population = list(default_population())

    result = Scenario(
        duration=duration,
        tick=tick,
        seed=seed,
        sampling_interval=sampling,
        strict=strict,
        area=area,
        pause_range=pause,
        arrival=arrival,
        deny_ids=deny_ids,
        protocol=protocol,
        capture=capture,
        cognitive=cognitive,
        costs=costs,
        log_refresh=log_refresh,
        record_refresh=record_refresh,
        population=tuple(population),
        explicit_nodes=tuple(explicit),
    )
    result.validate()
    return result


def _parse_cognitive_tables(rows, favorability: float) -> CognitiveConfig:
    config = default_cognitive_config(favorability_threshold=favorability)

    thresholds = dict(config.quantization_thresholds)
    for line, key, value in rows("cognitive.quantization"):
        pid = _as_enum(ParameterId, key, line)
        lo, hi = _floats(value, line, key, expected=2)
        thresholds[pid] = (lo, hi)

    behavior_priors = {b: dict(config.behavior_priors[b]) for b in BehaviorId}
    for line, key, value in rows("cognitive.behavior_priors"):
        behavior = _as_enum(BehaviorId, key, line)
        values = _floats(value, line, key, expected=len(BEHAVIOR_LEVELS[behavior]))
        behavior_priors[behavior] = dict(zip(BEHAVIOR_LEVELS[behavior], values))

    likelihood_bo = {ob: dict(config.likelihood_bo[ob]) for ob in ObservationId}
    order = _behavior_level_order()
    for line, key, value in rows("cognitive.likelihood_bo"):
        ob = _as_enum(ObservationId, key, line)
        values = _floats(value, line, key, expected=len(order))
        likelihood_bo[ob] = dict(zip(order, values))

    likelihood_ob = {b: dict(config.likelihood_ob[b]) for b in BeliefId}
    for line, key, value in rows("cognitive.likelihood_ob"):
        belief = _as_enum(BeliefId, key, line)
        values = _floats(value, line, key, expected=len(ObservationId))
        likelihood_ob[belief] = dict(zip(ObservationId, values))

    belief_priors = dict(config.belief_priors)
    for line, key, value in rows("cognitive.belief_priors"):
        belief = _as_enum(BeliefId, key, line)
        belief_priors[belief] = _as_float(value, line, key)

    return CognitiveConfig(
        quantization_thresholds=thresholds,
        behavior_priors=behavior_priors,
        likelihood_bo=likelihood_bo,
        likelihood_ob=likelihood_ob,
        belief_priors=belief_priors,
        favorability_threshold=favorability,
    )


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_scenario(handle.read())


# ---------------------------------------------------------------------------
# Canonical dump


def _resource_lines(section: str, resources: tuple[ResourceSpec, ...]) -> list[str]:
    if not resources:
        return []
    lines = [f"[{section}]"]
    for spec in resources:
        current = "" if spec.current is None else f" {spec.current!r}"
        lines.append(f"{spec.rtype.value} = {spec.count} {spec.capacity!r}{current}")
    lines.append("")
    return lines


def dump_scenario(scenario: Scenario) -> str:
    """Canonical text form; parse(dump(s)) reproduces s exactly."""
    c = scenario
    lines = [
        "[run]",
        f"duration_ms = {c.duration / 1000!r}",
        f"tick_ms = {c.tick / 1000!r}",
        f"seed = {c.seed}",
        f"sampling_interval_ms = {c.sampling_interval / 1000!r}",
        f"strict = {'true' if c.strict else 'false'}",
        "",
        "[area]",
        f"width_m = {c.area[0]!r}",
        f"height_m = {c.area[1]!r}",
        "",
        "[mobility]",
        f"pause_min_ms = {c.pause_range[0] / 1000!r}",
        f"pause_max_ms = {c.pause_range[1] / 1000!r}",
        "",
        "[arrival]",
        f"model = {c.arrival.model}",
        f"warmup_ms = {c.arrival.warmup / 1000!r}",
        f"rate_per_s = {c.arrival.rate_per_s!r}",
        "",
    ]
    if c.deny_ids:
        lines += ["[registration]", "deny = " + " ".join(str(i) for i in sorted(c.deny_ids)), ""]
    lines += [
        "[protocol]",
        f"data_rate_bps = {c.protocol.link.data_rate_bps}",
        f"processing_delay_ms = {c.protocol.link.processing / 1000!r}",
        f"req_size_bytes = {c.protocol.link.req_size_bytes}",
        f"rep_size_bytes = {c.protocol.link.rep_size_bytes}",
        f"pull_size_bytes = {c.protocol.link.pull_size_bytes}",
        f"exchange_timeout_ms = {c.protocol.exchange_timeout / 1000!r}",
        f"retry_limit = {c.protocol.retry_limit}",
        f"demand_threshold = {c.protocol.demand_threshold!r}",
        f"capture_period_ms = {c.protocol.capture_period / 1000!r}",
        f"formation_period_ms = {c.protocol.formation_period / 1000!r}",
        f"trace_cost_ms = {c.protocol.trace_cost / 1000!r}",
        "",
        "[cognitive]",
        f"favorability_threshold = {c.cognitive.favorability_threshold!r}",
        f"log_refresh_ms = {c.log_refresh / 1000!r}",
        f"record_refresh_ms = {c.record_refresh / 1000!r}",
        f"capture_cost_ms = {c.costs.capture / 1000!r}",
        f"observation_stage_cost_ms = {c.costs.observation / 1000!r}",
        f"belief_stage_cost_ms = {c.costs.belief / 1000!r}",
        f"velocity_max_mps = {c.capture.velocity_max!r}",
        f"contact_period_max_ms = {c.capture.contact_period_max / 1000!r}",
        "",
        "[cognitive.quantization]",
    ]
    for pid in ParameterId:
        lo, hi = c.cognitive.quantization_thresholds[pid]
        lines.append(f"{pid.value} = {lo!r} {hi!r}")
    lines += ["", "[cognitive.behavior_priors]"]
    for behavior in BehaviorId:
        row = c.cognitive.behavior_priors[behavior]
        lines.append(
            f"{behavior.value} = " + " ".join(repr(row[level]) for level in BEHAVIOR_LEVELS[behavior])
        )
    lines += ["", "[cognitive.likelihood_bo]"]
    order = _behavior_level_order()
    for ob in ObservationId:
        row = c.cognitive.likelihood_bo[ob]
        lines.append(f"{ob.value} = " + " ".join(repr(row[key]) for key in order))
    lines += ["", "[cognitive.likelihood_ob]"]
    for belief in BeliefId:
        row = c.cognitive.likelihood_ob[belief]
        lines.append(f"{belief.value} = " + " ".join(repr(row[ob]) for ob in ObservationId))
    lines += ["", "[cognitive.belief_priors]"]
    for belief in BeliefId:
        lines.append(f"{belief.value} = {c.cognitive.belief_priors[belief]!r}")
    lines.append("")
    if c.population:
        lines.append("[population]")
        for group in c.population:
            lines.append(
                f"{group.name} = {group.node_class.value} {group.count} {group.comm_range!r}"
                f" {group.speed_range[0]!r} {group.speed_range[1]!r} {group.drain_per_s!r}"
            )
        lines.append("")
        for group in c.population:
            lines += _resource_lines(f"resources.{group.name}", group.resources)
    if c.explicit_nodes:
        lines.append("[nodes]")
        for node in c.explicit_nodes:
            waypoint = "" if node.waypoint is None else f" {node.waypoint[0]!r} {node.waypoint[1]!r}"
            lines.append(
                f"{node.node_id} = {node.node_class.value} {node.position[0]!r} {node.position[1]!r}"
                f" {node.comm_range!r} {node.speed_range[0]!r} {node.speed_range[1]!r}"
                f" {node.drain_per_s!r}{waypoint}"
            )
        lines.append("")
        for node in c.explicit_nodes:
            lines += _resource_lines(f"resources.node.{node.node_id}", node.resources)
    return "\n".join(lines)


def scenario_digest(scenario: Scenario) -> str:
    return hashlib.sha256(dump_scenario(scenario).encode("utf-8")).hexdigest()

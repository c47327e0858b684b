"""Node identities, resource records, missed-call registration, and agent cloning."""

import enum
from dataclasses import dataclass, field

from .bob import BeliefRecord, Observation, ParameterLog, family_of
from .errors import DuplicateResource, NotRegistered, WrongAuthority


class NodeClass(str, enum.Enum):
    RESCUE_TEAM = "rescue_team"
    BYSTANDER = "bystander"
    NAVIGATION_CONTROLLER = "navigation_controller"
    VEHICLE_CONTROLLER = "vehicle_controller"
    RESCUE_VEHICLE = "rescue_vehicle"
    SURVIVED_INFRASTRUCTURE = "survived_infrastructure"


STATIC_CLASSES = frozenset(
    {
        NodeClass.NAVIGATION_CONTROLLER,
        NodeClass.VEHICLE_CONTROLLER,
        NodeClass.SURVIVED_INFRASTRUCTURE,
    }
)


class ResourceType(str, enum.Enum):
    MEMORY = "memory"
    PROCESSOR = "processor"
    COMMUNICATION_CHANNEL = "communication_channel"
    SOFTWARE_SERVICE = "software_service"
    SENSOR = "sensor"
    CAMERA = "camera"


@dataclass
class Resource:
    resource_id: str
    resource_type: ResourceType
    capacity: float
    initial_capacity: float = 0.0

    def __post_init__(self):
        if self.initial_capacity <= 0:
            self.initial_capacity = self.capacity
        if self.capacity < 0 or self.initial_capacity <= 0:
            raise ValueError(f"{self.resource_id}: capacities must be non-negative with positive initial")


@dataclass
class ResourceRecord:
    """Per-node inventory of resources keyed by resource id."""

    node_id: int
    resources: dict[str, Resource] = field(default_factory=dict)

    def types_held(self) -> list[ResourceType]:
        seen = []
        for resource in self.resources.values():
            if resource.resource_type not in seen:
                seen.append(resource.resource_type)
        return seen

    def type_health(self, rtype: ResourceType) -> float:
        """Remaining/initial capacity aggregated over resources of one type."""
        remaining = sum(
            r.capacity for r in self.resources.values() if r.resource_type is rtype
        )
        initial = sum(
            r.initial_capacity for r in self.resources.values() if r.resource_type is rtype
        )
        return remaining / initial if initial > 0 else 0.0


def attach_resource(record: ResourceRecord, resource: Resource) -> ResourceRecord:
    """Attach one resource; duplicate ids are rejected."""
    if resource.resource_id in record.resources:
        raise DuplicateResource(f"{record.node_id}: resource {resource.resource_id} already attached")
    record.resources[resource.resource_id] = resource
    return record


@dataclass
class MCAState:
    """Mobile cognitive agent: the cloned per-node cognition state."""

    origin_authority: int
    belief_record: BeliefRecord = field(default_factory=BeliefRecord)
    parameter_log: ParameterLog = field(default_factory=ParameterLog)
    observation_storage: dict[str, list[Observation]] = field(
        default_factory=lambda: {"mobility": [], "profile": []}
    )
    # Providers learned from replies: resource type -> {node id: learned_at}.
    provider_map: dict[ResourceType, dict[int, int]] = field(default_factory=dict)

    def observation_history(self) -> list[Observation]:
        return self.observation_storage["mobility"] + self.observation_storage["profile"]

    def store_winners(self, winners: list[Observation]) -> None:
        for winner in winners:
            self.observation_storage[family_of(winner.observation_id)].append(winner)

    def refresh_observations(self) -> None:
        for history in self.observation_storage.values():
            history.clear()

    def learn_provider(self, rtype: ResourceType, node_id: int, now: int) -> None:
        self.provider_map.setdefault(rtype, {})[node_id] = now

    def purge_providers(self, now: int, max_age: int) -> None:
        for rtype in list(self.provider_map):
            providers = self.provider_map[rtype]
            for nid in [n for n, at in providers.items() if now - at > max_age]:
                del providers[nid]
            if not providers:
                del self.provider_map[rtype]


@dataclass
class Node:
    node_id: int
    node_class: NodeClass
    comm_range: float
    position: tuple[float, float] = (0.0, 0.0)
    registered: bool = False
    mca: MCAState | None = None
    resource_record: ResourceRecord = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.comm_range <= 0:
            raise ValueError(f"node {self.node_id}: comm_range must be positive")
        if self.resource_record is None:
            self.resource_record = ResourceRecord(node_id=self.node_id)

    @property
    def mobile(self) -> bool:
        return self.node_class not in STATIC_CLASSES


class RegistrationState(str, enum.Enum):
    IDLE = "idle"
    DIALED = "dialed"
    RINGS_SENT = "rings_sent"
    VALIDATED = "validated"
    REGISTERED = "registered"
    DENIED = "denied"


@dataclass
class RegistrationSession:
    """Missed-call registration: dial, two rings, auto-disconnect, validation."""

    device_id: int
    state: RegistrationState = RegistrationState.IDLE
    ring_count: int = 0


def register_device(
    device: Node,
    authority: Node,
    valid: bool,
    log_refresh: int | None = None,
    record_refresh: int | None = None,
) -> RegistrationSession:
    """Run the missed-call registration state machine for one device.

    On validation the device is registered and a fresh agent is cloned onto
    it; a second registration of the same device is an idempotent success.
    """
    if authority.node_class is not NodeClass.NAVIGATION_CONTROLLER:
        raise WrongAuthority(
            f"node {authority.node_id} ({authority.node_class.value}) cannot register devices"
        )
    session = RegistrationSession(device_id=device.node_id)
    if device.registered:
        session.state = RegistrationState.REGISTERED
        session.ring_count = 2
        return session
    session.state = RegistrationState.DIALED
    session.ring_count = 2  # the call auto-disconnects after two rings
    session.state = RegistrationState.RINGS_SENT
    if not valid:
        session.state = RegistrationState.DENIED
        return session
    session.state = RegistrationState.VALIDATED
    device.registered = True
    device.mca = clone_mca(authority, device, log_refresh=log_refresh, record_refresh=record_refresh)
    session.state = RegistrationState.REGISTERED
    return session


def clone_mca(
    authority: Node,
    target: Node,
    log_refresh: int | None = None,
    record_refresh: int | None = None,
) -> MCAState:
    """Clone a fresh agent from the registration authority onto the target."""
    if not target.registered:
        raise NotRegistered(f"node {target.node_id} is not registered")
    record = BeliefRecord() if record_refresh is None else BeliefRecord(refresh_period=record_refresh)
    log = ParameterLog() if log_refresh is None else ParameterLog(refresh_period=log_refresh)
    return MCAState(
        origin_authority=authority.node_id,
        belief_record=record,
        parameter_log=log,
    )


def demand_scan(node: Node, threshold: float = 0.2) -> set[ResourceType]:
    """Resource types whose aggregate remaining/initial capacity is starved."""
    record = node.resource_record
    return {
        rtype for rtype in record.types_held() if record.type_health(rtype) < threshold
    }


def can_supply(node: Node, rtype: ResourceType, threshold: float = 0.2) -> bool:
    """A node supplies a type when it holds it at healthy (non-starved) capacity."""
    record = node.resource_record
    if all(r.resource_type is not rtype for r in record.resources.values()):
        return False
    return node.resource_record.type_health(rtype) >= threshold


def offered_types(node: Node, threshold: float = 0.2) -> set[ResourceType]:
    """Types the node could currently donate: held and healthy."""
    return {rtype for rtype in node.resource_record.types_held() if can_supply(node, rtype, threshold)}

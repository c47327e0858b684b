"""Random-waypoint mobility, proximity detection, and the contact taxonomy."""

import random
from dataclasses import dataclass, field

import numpy as np

from .nodes import Node, ResourceType, can_supply
from .units import ms


@dataclass
class MobilityConfig:
    area: tuple[float, float] = (1000.0, 1000.0)  # meters
    pause_range: tuple[int, int] = (0, ms(150))  # simulated microseconds
    tick: int = ms(100)

    def validate(self) -> None:
        if self.tick <= 0:
            raise ValueError("tick must be positive")
        lo, hi = self.pause_range
        if not 0 <= lo <= hi:
            raise ValueError("pause range must satisfy 0 <= min <= max")
        if self.area[0] <= 0 or self.area[1] <= 0:
            raise ValueError("area sides must be positive")


@dataclass
class WaypointState:
    """Per-node waypoint walk state; each node owns its own RNG stream."""

    rng: random.Random
    speed_range: tuple[float, float]
    waypoint: tuple[float, float] = (0.0, 0.0)
    speed: float = 0.0
    pause_until: int = 0  # simulated time the current pause ends
    paused: bool = False

    def draw_waypoint(self, area: tuple[float, float]) -> None:
        self.waypoint = (self.rng.uniform(0.0, area[0]), self.rng.uniform(0.0, area[1]))
        lo, hi = self.speed_range
        self.speed = self.rng.uniform(lo, hi)


def step_mobility(
    nodes: list[Node],
    states: dict[int, WaypointState],
    config: MobilityConfig,
    now: int,
) -> None:
    """Advance every mobile node one tick toward its waypoint.

    Arriving nodes pause for a draw from the pause range, then draw a fresh
    uniform waypoint; a zero-length pause rolls straight into the next leg.
    Static nodes never move.  Only the per-node RNG streams are consumed.
    """
    tick_s = config.tick / 1_000_000
    for node in nodes:
        if not node.mobile:
            continue
        state = states[node.node_id]
        if state.paused:
            if now < state.pause_until:
                continue
            state.paused = False
            state.draw_waypoint(config.area)
        x, y = node.position
        wx, wy = state.waypoint
        dx, dy = wx - x, wy - y
        distance = (dx * dx + dy * dy) ** 0.5
        step = state.speed * tick_s
        if distance <= step or distance == 0.0:
            node.position = (wx, wy)
            pause_us = int(state.rng.uniform(config.pause_range[0], config.pause_range[1]))
            if pause_us > 0:
                state.paused = True
                state.pause_until = now + pause_us
            else:
                state.draw_waypoint(config.area)
        else:
            node.position = (x + dx / distance * step, y + dy / distance * step)


def detect_contacts(nodes: list[Node]) -> set[tuple[int, int]]:
    """Node-id pairs within mutual radio range (Euclidean, min of both ranges).

    Symmetric and irreflexive; pairs are returned with the smaller id first.
    Only registered nodes take part in agent contacts.
    """
    active = [n for n in nodes if n.registered]
    if len(active) < 2:
        return set()
    ids = np.array([n.node_id for n in active])
    xs = np.array([n.position[0] for n in active])
    ys = np.array([n.position[1] for n in active])
    ranges = np.array([n.comm_range for n in active])
    dx = xs[:, None] - xs[None, :]
    dy = ys[:, None] - ys[None, :]
    dist_sq = dx * dx + dy * dy
    limit = np.minimum(ranges[:, None], ranges[None, :])
    mask = dist_sq <= limit * limit
    i_idx, j_idx = np.nonzero(np.triu(mask, k=1))
    return {(int(ids[i]), int(ids[j])) for i, j in zip(i_idx, j_idx)}


class ContactKind:
    DIRECT = "direct"
    OPPORTUNISTIC_RESOURCELESS = "opportunistic_resourceless"
    OPPORTUNISTIC_RESOURCEFUL = "opportunistic_resourceful"


class ContactVariety:
    HOMOGENEOUS = "homogeneous"
    HETEROGENEOUS = "heterogeneous"
    NOT_APPLICABLE = "not_applicable"


@dataclass
class ContactEvent:
    a: int
    b: int
    kind: str
    variety: str
    started_at: int
    ended_at: int

    def __post_init__(self):
        if self.started_at > self.ended_at:
            raise ValueError("contact cannot end before it starts")
        resourceful = self.kind == ContactKind.OPPORTUNISTIC_RESOURCEFUL
        if resourceful != (self.variety != ContactVariety.NOT_APPLICABLE):
            raise ValueError("variety applies exactly to resourceful opportunistic contacts")


def classify_contact(
    a: Node,
    b: Node,
    demand_a: set[ResourceType],
    demand_b: set[ResourceType],
    pending_destination: bool,
    supply_threshold: float = 0.2,
) -> tuple[str, str]:
    """Classify an in-range encounter into the contact taxonomy.

    An encounter consumed by an already-queued addressed transfer is direct;
    otherwise it is resourceful when either side can satisfy a type the other
    demands (homogeneous for same-class pairs, heterogeneous otherwise), and
    resourceless when neither side can help.
    """
    if pending_destination:
        return ContactKind.DIRECT, ContactVariety.NOT_APPLICABLE
    a_helps_b = any(can_supply(a, rtype, supply_threshold) for rtype in demand_b)
    b_helps_a = any(can_supply(b, rtype, supply_threshold) for rtype in demand_a)
    if a_helps_b or b_helps_a:
        variety = (
            ContactVariety.HOMOGENEOUS
            if a.node_class is b.node_class
            else ContactVariety.HETEROGENEOUS
        )
        return ContactKind.OPPORTUNISTIC_RESOURCEFUL, variety
    return ContactKind.OPPORTUNISTIC_RESOURCELESS, ContactVariety.NOT_APPLICABLE


@dataclass
class ContactLedger:
    """Append-only contact history with live counters mirroring the events."""

    events: list[ContactEvent] = field(default_factory=list)
    n_dc: int = 0
    n_oc: int = 0
    n_hom: int = 0
    n_het: int = 0

    @property
    def n_roc(self) -> int:
        return self.n_hom + self.n_het

    @property
    def n_tc(self) -> int:
        return self.n_dc + self.n_oc + self.n_roc

    def recompute(self) -> tuple[int, int, int, int]:
        """Counters recounted from the raw events (for reconciliation checks)."""
        n_dc = n_oc = n_hom = n_het = 0
        for event in self.events:
            if event.kind == ContactKind.DIRECT:
                n_dc += 1
            elif event.kind == ContactKind.OPPORTUNISTIC_RESOURCELESS:
                n_oc += 1
            elif event.variety == ContactVariety.HOMOGENEOUS:
                n_hom += 1
            else:
                n_het += 1
        return n_dc, n_oc, n_hom, n_het


def record_contact(ledger: ContactLedger, event: ContactEvent) -> ContactLedger:
    """Append one classified contact and bump exactly one counter."""
    ledger.events.append(event)
    if event.kind == ContactKind.DIRECT:
        ledger.n_dc += 1
    elif event.kind == ContactKind.OPPORTUNISTIC_RESOURCELESS:
        ledger.n_oc += 1
    elif event.variety == ContactVariety.HOMOGENEOUS:
        ledger.n_hom += 1
    else:
        ledger.n_het += 1
    return ledger


def upgrade_contact(ledger: ContactLedger, event: ContactEvent, variety: str) -> None:
    """Reclassify a resourceless contact whose pair started pooling mid-contact.

    Demand can emerge while two nodes are already in range; the encounter is
    then consumed for resource pooling, so its taxonomy entry moves from
    resourceless to resourceful while the counters stay in lockstep with the
    event list.
    """
    if event.kind != ContactKind.OPPORTUNISTIC_RESOURCELESS:
        return
    ledger.n_oc -= 1
    event.kind = ContactKind.OPPORTUNISTIC_RESOURCEFUL
    event.variety = variety
    if variety == ContactVariety.HOMOGENEOUS:
        ledger.n_hom += 1
    else:
        ledger.n_het += 1

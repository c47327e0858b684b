import random

import pytest

from caosr.mobility import (
    ContactEvent,
    ContactKind,
    ContactLedger,
    ContactVariety,
    MobilityConfig,
    WaypointState,
    classify_contact,
    detect_contacts,
    record_contact,
    step_mobility,
    upgrade_contact,
)
from caosr.nodes import Node, NodeClass, Resource, ResourceType, attach_resource
from caosr.units import ms, seconds


def node(node_id, node_class=NodeClass.RESCUE_TEAM, comm_range=60.0, position=(0.0, 0.0), registered=True):
    n = Node(node_id=node_id, node_class=node_class, comm_range=comm_range, position=position)
    n.registered = registered
    return n


def walk_state(seed=1, speed=(5.0, 5.0), waypoint=(30.0, 40.0)):
    state = WaypointState(rng=random.Random(seed), speed_range=speed)
    state.waypoint = waypoint
    state.speed = speed[0]
    return state


# ---------------------------------------------------------------------------
# Waypoint stepping


def test_step_moves_along_unit_direction():
    config = MobilityConfig(area=(100.0, 100.0), pause_range=(0, 0), tick=seconds(1))
    mobile = node(1, position=(0.0, 0.0))
    states = {1: walk_state()}
    step_mobility([mobile], states, config, now=0)
    assert mobile.position[0] == pytest.approx(3.0)
    assert mobile.position[1] == pytest.approx(4.0)


def test_static_node_never_moves():
    config = MobilityConfig(area=(100.0, 100.0), pause_range=(0, 0), tick=ms(100))
    static = node(1, NodeClass.NAVIGATION_CONTROLLER, position=(10.0, 20.0))
    for tick_index in range(1000):
        step_mobility([static], {}, config, now=tick_index * config.tick)
    assert static.position == (10.0, 20.0)


def test_zero_pause_draws_new_waypoint_immediately():
    config = MobilityConfig(area=(100.0, 100.0), pause_range=(0, 0), tick=seconds(1))
    mobile = node(1, position=(29.0, 40.0))
    state = walk_state()
    states = {1: state}
    step_mobility([mobile], states, config, now=0)
    assert mobile.position == (30.0, 40.0)
    assert not state.paused
    assert state.waypoint != (30.0, 40.0)  # already re-drawn


def test_pause_holds_position_until_expiry():
    config = MobilityConfig(area=(100.0, 100.0), pause_range=(ms(150), ms(150)), tick=ms(100))
    mobile = node(1, position=(29.99, 40.0))
    state = walk_state(speed=(5.0, 5.0))
    states = {1: state}
    step_mobility([mobile], states, config, now=0)
    assert mobile.position == (30.0, 40.0)
    assert state.paused
    step_mobility([mobile], states, config, now=ms(100))
    assert mobile.position == (30.0, 40.0)  # still pausing
    step_mobility([mobile], states, config, now=ms(200))
    assert mobile.position != (30.0, 40.0)  # pause over, walking again


def test_mobility_stays_inside_area():
    config = MobilityConfig(area=(50.0, 50.0), pause_range=(0, ms(150)), tick=ms(100))
    rng = random.Random(3)
    nodes = []
    states = {}
    for node_id in range(10):
        n = node(node_id, position=(rng.uniform(0, 50), rng.uniform(0, 50)))
        nodes.append(n)
        state = WaypointState(rng=random.Random(node_id), speed_range=(1.0, 10.0))
        state.draw_waypoint(config.area)
        states[node_id] = state
    for tick_index in range(2000):
        step_mobility(nodes, states, config, now=tick_index * config.tick)
        for n in nodes:
            assert 0.0 <= n.position[0] <= 50.0
            assert 0.0 <= n.position[1] <= 50.0


def test_same_seed_gives_identical_trace():
    def trace(seed):
        config = MobilityConfig(area=(80.0, 80.0), pause_range=(0, ms(100)), tick=ms(100))
        mobile = node(1, position=(5.0, 5.0))
        state = WaypointState(rng=random.Random(seed), speed_range=(1.0, 5.0))
        state.draw_waypoint(config.area)
        states = {1: state}
        positions = []
        for tick_index in range(500):
            step_mobility([mobile], states, config, now=tick_index * config.tick)
            positions.append(mobile.position)
        return positions

    assert trace(11) == trace(11)
    assert trace(11) != trace(12)


# ---------------------------------------------------------------------------
# Contact detection


def test_contact_inside_and_outside_range():
    a = node(1, position=(0.0, 0.0))
    b = node(2, position=(59.0, 0.0))
    assert detect_contacts([a, b]) == {(1, 2)}
    b.position = (61.0, 0.0)
    assert detect_contacts([a, b]) == set()


def test_min_range_rule():
    vehicle = node(1, NodeClass.RESCUE_VEHICLE, comm_range=60.0, position=(0.0, 0.0))
    bystander = node(2, NodeClass.BYSTANDER, comm_range=10.0, position=(20.0, 0.0))
    assert detect_contacts([vehicle, bystander]) == set()
    bystander.position = (9.0, 0.0)
    assert detect_contacts([vehicle, bystander]) == {(1, 2)}


def test_no_self_contact():
    a = node(1)
    assert detect_contacts([a]) == set()


def test_unregistered_nodes_invisible():
    a = node(1, position=(0.0, 0.0))
    b = node(2, position=(10.0, 0.0), registered=False)
    assert detect_contacts([a, b]) == set()


def test_detection_symmetric_irreflexive_random():
    rng = random.Random(9)
    nodes = [
        node(i, comm_range=rng.uniform(10, 60), position=(rng.uniform(0, 200), rng.uniform(0, 200)))
        for i in range(30)
    ]
    pairs = detect_contacts(nodes)
    for a, b in pairs:
        assert a < b
        da = nodes[a].position
        db = nodes[b].position
        dist = ((da[0] - db[0]) ** 2 + (da[1] - db[1]) ** 2) ** 0.5
        assert dist <= min(nodes[a].comm_range, nodes[b].comm_range) + 1e-9


# ---------------------------------------------------------------------------
# Classification


def with_resource(n, rtype, capacity=100.0, current=None):
    attach_resource(
        n.resource_record,
        Resource(
            resource_id=f"{rtype.value}-{len(n.resource_record.resources)}",
            resource_type=rtype,
            capacity=capacity if current is None else current,
            initial_capacity=capacity,
        ),
    )
    return n


def test_same_class_sharing_is_homogeneous():
    a = with_resource(node(1, NodeClass.RESCUE_TEAM), ResourceType.COMMUNICATION_CHANNEL)
    b = node(2, NodeClass.RESCUE_TEAM)
    with_resource(b, ResourceType.COMMUNICATION_CHANNEL, capacity=100.0, current=1.0)
    demand_b = {ResourceType.COMMUNICATION_CHANNEL}
    kind, variety = classify_contact(a, b, set(), demand_b, pending_destination=False)
    assert kind == ContactKind.OPPORTUNISTIC_RESOURCEFUL
    assert variety == ContactVariety.HOMOGENEOUS


def test_cross_class_sharing_is_heterogeneous():
    vehicle = with_resource(node(5, NodeClass.RESCUE_VEHICLE), ResourceType.COMMUNICATION_CHANNEL)
    team = node(2, NodeClass.RESCUE_TEAM)
    kind, variety = classify_contact(
        vehicle, team, set(), {ResourceType.COMMUNICATION_CHANNEL}, pending_destination=False
    )
    assert kind == ContactKind.OPPORTUNISTIC_RESOURCEFUL
    assert variety == ContactVariety.HETEROGENEOUS


def test_no_demand_is_resourceless():
    kind, variety = classify_contact(node(1), node(2), set(), set(), pending_destination=False)
    assert kind == ContactKind.OPPORTUNISTIC_RESOURCELESS
    assert variety == ContactVariety.NOT_APPLICABLE


def test_pending_destination_is_direct():
    kind, variety = classify_contact(node(1), node(2), set(), set(), pending_destination=True)
    assert kind == ContactKind.DIRECT
    assert variety == ContactVariety.NOT_APPLICABLE


def test_unsatisfiable_demand_is_resourceless():
    a = node(1)
    b = node(2)
    kind, _ = classify_contact(a, b, {ResourceType.MEMORY}, set(), pending_destination=False)
    assert kind == ContactKind.OPPORTUNISTIC_RESOURCELESS


# ---------------------------------------------------------------------------
# Ledger


def event(kind, variety=ContactVariety.NOT_APPLICABLE, a=1, b=2):
    return ContactEvent(a=a, b=b, kind=kind, variety=variety, started_at=0, ended_at=0)


def test_single_event_counts():
    ledger = ContactLedger()
    record_contact(ledger, event(ContactKind.OPPORTUNISTIC_RESOURCEFUL, ContactVariety.HOMOGENEOUS))
    assert (ledger.n_hom, ledger.n_roc, ledger.n_tc) == (1, 1, 1)


def test_counter_composition():
    ledger = ContactLedger()
    for _ in range(3):
        record_contact(ledger, event(ContactKind.OPPORTUNISTIC_RESOURCEFUL, ContactVariety.HOMOGENEOUS))
    for _ in range(5):
        record_contact(ledger, event(ContactKind.OPPORTUNISTIC_RESOURCEFUL, ContactVariety.HETEROGENEOUS))
    for _ in range(2):
        record_contact(ledger, event(ContactKind.DIRECT))
    for _ in range(6):
        record_contact(ledger, event(ContactKind.OPPORTUNISTIC_RESOURCELESS))
    assert ledger.n_roc == 8
    assert ledger.n_tc == 16
    assert ledger.recompute() == (2, 6, 3, 5)


def test_counters_match_events_random():
    rng = random.Random(12)
    ledger = ContactLedger()
    kinds = [
        (ContactKind.DIRECT, ContactVariety.NOT_APPLICABLE),
        (ContactKind.OPPORTUNISTIC_RESOURCELESS, ContactVariety.NOT_APPLICABLE),
        (ContactKind.OPPORTUNISTIC_RESOURCEFUL, ContactVariety.HOMOGENEOUS),
        (ContactKind.OPPORTUNISTIC_RESOURCEFUL, ContactVariety.HETEROGENEOUS),
    ]
    for _ in range(500):
        kind, variety = rng.choice(kinds)
        record_contact(ledger, event(kind, variety))
        assert ledger.recompute() == (ledger.n_dc, ledger.n_oc, ledger.n_hom, ledger.n_het)


def test_upgrade_moves_resourceless_to_resourceful():
    ledger = ContactLedger()
    contact = event(ContactKind.OPPORTUNISTIC_RESOURCELESS)
    record_contact(ledger, contact)
    upgrade_contact(ledger, contact, ContactVariety.HETEROGENEOUS)
    assert (ledger.n_oc, ledger.n_het) == (0, 1)
    assert ledger.recompute() == (0, 0, 0, 1)
    # A second upgrade is a no-op.
    upgrade_contact(ledger, contact, ContactVariety.HOMOGENEOUS)
    assert ledger.recompute() == (0, 0, 0, 1)


def test_variety_only_for_resourceful():
    with pytest.raises(ValueError):
        ContactEvent(a=1, b=2, kind=ContactKind.DIRECT, variety=ContactVariety.HOMOGENEOUS,
                     started_at=0, ended_at=0)
    with pytest.raises(ValueError):
        ContactEvent(a=1, b=2, kind=ContactKind.OPPORTUNISTIC_RESOURCEFUL,
                     variety=ContactVariety.NOT_APPLICABLE, started_at=0, ended_at=0)

import pytest

from caosr.bob import BeliefRecord, ParameterLog, ParameterId, BehaviorParameterSample
from caosr.errors import DuplicateResource, NotRegistered, WrongAuthority
from caosr.nodes import (
    Node,
    NodeClass,
    RegistrationState,
    Resource,
    ResourceRecord,
    ResourceType,
    attach_resource,
    can_supply,
    clone_mca,
    demand_scan,
    offered_types,
    register_device,
)


def make_node(node_id, node_class=NodeClass.BYSTANDER, comm_range=60.0):
    return Node(node_id=node_id, node_class=node_class, comm_range=comm_range)


def authority(node_id=0):
    return make_node(node_id, NodeClass.NAVIGATION_CONTROLLER)


# ---------------------------------------------------------------------------
# Registration


def test_valid_device_registers_and_gets_agent():
    device = make_node(1)
    session = register_device(device, authority(), valid=True)
    assert session.state is RegistrationState.REGISTERED
    assert session.ring_count == 2
    assert device.registered
    assert device.mca is not None
    assert device.mca.origin_authority == 0


def test_invalid_device_is_denied_without_agent():
    device = make_node(1)
    session = register_device(device, authority(), valid=False)
    assert session.state is RegistrationState.DENIED
    assert not device.registered
    assert device.mca is None


def test_reregistration_is_idempotent():
    device = make_node(1)
    register_device(device, authority(), valid=True)
    first_mca = device.mca
    session = register_device(device, authority(), valid=True)
    assert session.state is RegistrationState.REGISTERED
    assert device.mca is first_mca


def test_non_controller_cannot_register():
    device = make_node(1)
    with pytest.raises(WrongAuthority):
        register_device(device, make_node(2, NodeClass.RESCUE_TEAM), valid=True)


def test_registered_implies_two_rings():
    device = make_node(1)
    session = register_device(device, authority(), valid=True)
    assert session.state is RegistrationState.REGISTERED and session.ring_count == 2


# ---------------------------------------------------------------------------
# Agent cloning


def test_clone_requires_registration():
    target = make_node(1)
    with pytest.raises(NotRegistered):
        clone_mca(authority(), target)


def test_clone_initializes_empty_state():
    target = make_node(1)
    target.registered = True
    mca = clone_mca(authority(7), target)
    assert mca.origin_authority == 7
    assert mca.belief_record.size() == 0
    assert mca.parameter_log.samples == []
    assert mca.observation_storage == {"mobility": [], "profile": []}


def test_clones_are_independent():
    a, b = make_node(1), make_node(2)
    a.registered = b.registered = True
    auth = authority()
    mca_a = clone_mca(auth, a)
    mca_b = clone_mca(auth, b)
    mca_a.parameter_log.add(
        BehaviorParameterSample(parameter_id=ParameterId.VELOCITY, value=0.5, max_value=1.0)
    )
    assert mca_b.parameter_log.samples == []
    assert len(mca_a.parameter_log.samples) == 1


# ---------------------------------------------------------------------------
# Resources


def resource(rid="r1", rtype=ResourceType.MEMORY, capacity=512.0, current=None):
    return Resource(
        resource_id=rid,
        resource_type=rtype,
        capacity=capacity if current is None else current,
        initial_capacity=capacity,
    )


def test_attach_resource():
    record = ResourceRecord(node_id=1)
    attach_resource(record, resource())
    assert len(record.resources) == 1


def test_attach_duplicate_rejected():
    record = ResourceRecord(node_id=1)
    attach_resource(record, resource())
    with pytest.raises(DuplicateResource):
        attach_resource(record, resource())


def test_demand_scan_empty_when_healthy():
    node = make_node(1)
    attach_resource(node.resource_record, resource())
    assert demand_scan(node) == set()


def test_zero_capacity_is_in_demand():
    node = make_node(1)
    attach_resource(node.resource_record, resource(current=0.0))
    assert demand_scan(node) == {ResourceType.MEMORY}


def test_threshold_rule():
    node = make_node(1)
    attach_resource(node.resource_record, resource(capacity=100.0, current=10.0))
    assert demand_scan(node, threshold=0.2) == {ResourceType.MEMORY}
    assert demand_scan(node, threshold=0.05) == set()


def test_starved_holder_cannot_supply():
    node = make_node(1)
    attach_resource(node.resource_record, resource(capacity=100.0, current=10.0))
    assert not can_supply(node, ResourceType.MEMORY)
    assert can_supply(node, ResourceType.MEMORY, threshold=0.05)
    assert not can_supply(node, ResourceType.CAMERA)


def test_offered_types_lists_healthy_only():
    node = make_node(1)
    attach_resource(node.resource_record, resource("m", ResourceType.MEMORY, 100.0))
    attach_resource(node.resource_record, resource("c", ResourceType.CAMERA, 1.0, current=0.1))
    assert offered_types(node) == {ResourceType.MEMORY}


# ---------------------------------------------------------------------------
# Node invariants


def test_static_classes_are_not_mobile():
    for node_class in (
        NodeClass.NAVIGATION_CONTROLLER,
        NodeClass.VEHICLE_CONTROLLER,
        NodeClass.SURVIVED_INFRASTRUCTURE,
    ):
        assert not make_node(1, node_class).mobile
    for node_class in (NodeClass.RESCUE_TEAM, NodeClass.BYSTANDER, NodeClass.RESCUE_VEHICLE):
        assert make_node(1, node_class).mobile


def test_nonpositive_range_rejected():
    with pytest.raises(ValueError):
        make_node(1, comm_range=0.0)

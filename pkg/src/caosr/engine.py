"""Deterministic discrete-event engine driving a full scenario.

One event queue orders everything by (time, insertion sequence); equal-time
events run in scheduling order, which makes equal-seed runs bit-identical.
The master seed is split into independent per-node and per-subsystem streams
so adding draws in one subsystem never perturbs another.
"""

import hashlib
import heapq
import os
import random
from dataclasses import dataclass, field, replace

from . import bob
from .bob import HOST_ID, Belief, ParameterId, Source, BehaviorParameterSample
from .errors import OrphanReply, UnsupportedEvidence
from .exchange import BeliefReply, BeliefRequest, make_timing
from .metrics import (
    FAILURE_EXCHANGE,
    FAILURE_FORMATION,
    MetricsLedger,
    MetricsRow,
    formation_timing,
    rows_to_csv,
    snapshot_row,
)
from .mobility import (
    ContactEvent,
    ContactKind,
    ContactVariety,
    WaypointState,
    classify_contact,
    detect_contacts,
    record_contact,
    step_mobility,
    upgrade_contact,
)
from .nodes import (
    MCAState,
    Node,
    NodeClass,
    Resource,
    ResourceType,
    attach_resource,
    demand_scan,
    offered_types,
    can_supply,
    register_device,
    RegistrationState,
)
from .scenario import Scenario, dump_scenario, scenario_digest
from .units import US_PER_S

__version__ = "0.1.0"

# Per-node, per-type spread of the configured drain rate, so same-class nodes
# starve at different times and homogeneous sharing becomes reachable.
DRAIN_JITTER = (0.25, 1.75)


def _stream(master_seed: int, label: str) -> random.Random:
    digest = hashlib.sha256(f"{master_seed}:{label}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


class EventQueue:
    """Total order by (time, sequence); dequeue time never decreases."""

    def __init__(self):
        self._heap: list[tuple[int, int, str, dict]] = []
        self._seq = 0
        self._last_popped = 0

    def push(self, time: int, kind: str, **payload) -> None:
        heapq.heappush(self._heap, (time, self._seq, kind, payload))
        self._seq += 1

    def pop(self) -> tuple[int, str, dict]:
        time, _, kind, payload = heapq.heappop(self._heap)
        assert time >= self._last_popped, "event queue went backwards in time"
        self._last_popped = time
        return time, kind, payload

    def peek_time(self) -> int | None:
        return self._heap[0][0] if self._heap else None

    def __len__(self) -> int:
        return len(self._heap)


@dataclass
class _ActiveContact:
    event: ContactEvent
    last_seen: int
    misses: int = 0


@dataclass
class _Pending:
    request: BeliefRequest
    t_bf: int
    retries_left: int
    delivered_at: int | None = None


@dataclass
class _Pull:
    requester: int
    provider: int
    rtypes: tuple[ResourceType, ...]


@dataclass
class RunResult:
    scenario: Scenario
    metrics: MetricsLedger
    rows: list[MetricsRow]
    trace: list[dict]
    registered: int
    present: int
    installed_mcas: int

    def csv(self) -> str:
        return rows_to_csv(self.rows)


def _pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


class Simulation:
    """One isolated world executing one scenario."""

    def __init__(self, scenario: Scenario):
        scenario.validate()
        self.scenario = scenario
        self.protocol = scenario.protocol
        self.cognitive = scenario.cognitive
        self.mobility_config = scenario.mobility_config()
        self.queue = EventQueue()
        self.trace: list[dict] = []
        self.metrics = MetricsLedger(pause_time=scenario.pause_representative, tick=scenario.tick)

        self.nodes: dict[int, Node] = {}
        self.waypoints: dict[int, WaypointState] = {}
        self.drain_rates: dict[int, dict[ResourceType, float]] = {}
        self.present: list[int] = []  # arrived node ids, ascending
        self.registered_ids: list[int] = []
        self.authorities: list[int] = []

        self.active_contacts: dict[tuple[int, int], _ActiveContact] = {}
        self.pending: dict[int, _Pending] = {}
        self.queued_pulls: dict[tuple[int, int], list[_Pull]] = {}
        self.prev_demand: dict[int, set[ResourceType]] = {}
        self.onsets: dict[tuple[int, ResourceType], int] = {}
        self.resolved_demands: set[tuple[int, ResourceType]] = set()
        self.in_contact_us: dict[int, int] = {}
        self.paused_us: dict[int, int] = {}

        self._req_counter = 0
        self._provenance_counter = 0
        self.provenances: set[int] = set()
        self._closed_requests: set[int] = set()
        self._last_sample = 0
        self._rows: list[MetricsRow] = []
        self._explicit_ids = {n.node_id for n in scenario.explicit_nodes}

        self._build_nodes()
        self._schedule_bootstrap()

    # ------------------------------------------------------------------
    # Construction

    def _build_nodes(self) -> None:
        next_id = 0
        for node in self.scenario.explicit_nodes:
            next_id = max(next_id, node.node_id + 1)
        self._arrivals: list[tuple[int, int]] = []  # (time, node id)
        mobile_group_ids: list[int] = []

        for explicit in self.scenario.explicit_nodes:
            node = Node(
                node_id=explicit.node_id,
                node_class=explicit.node_class,
                comm_range=explicit.comm_range,
                position=explicit.position,
            )
            self._endow(node, explicit.resources, explicit.drain_per_s)
            self.nodes[node.node_id] = node
            self._init_waypoints(node, explicit.speed_range, fixed_waypoint=explicit.waypoint)
            self._arrivals.append((0, node.node_id))

        for group in self.scenario.population:
            for _ in range(group.count):
                node = Node(node_id=next_id, node_class=group.node_class, comm_range=group.comm_range)
                next_id += 1
                self._endow(node, group.resources, group.drain_per_s)
                self.nodes[node.node_id] = node
                self._init_waypoints(node, group.speed_range)
                if node.mobile:
                    mobile_group_ids.append(node.node_id)
                else:
                    self._arrivals.append((0, node.node_id))

        arrival = self.scenario.arrival
        if mobile_group_ids:
            if arrival.model == "ramp":
                window = arrival.warmup
                count = len(mobile_group_ids)
                for index, node_id in enumerate(mobile_group_ids):
                    at = round(window * (index + 1) / count) if window > 0 else 0
                    self._arrivals.append((at, node_id))
            else:  # poisson
                rng = _stream(self.scenario.seed, "arrivals")
                at = 0.0
                for node_id in mobile_group_ids:
                    at += rng.expovariate(arrival.rate_per_s)
                    self._arrivals.append((round(at * US_PER_S), node_id))

    def _endow(self, node: Node, specs, drain_per_s: float) -> None:
        jitter_rng = _stream(self.scenario.seed, f"drain:{node.node_id}")
        rates: dict[ResourceType, float] = {}
        serial = 0
        for spec in specs:
            for _ in range(spec.count):
                resource = Resource(
                    resource_id=f"{spec.rtype.value}-{serial}",
                    resource_type=spec.rtype,
                    capacity=spec.capacity if spec.current is None else spec.current,
                    initial_capacity=spec.capacity,
                )
                serial += 1
                attach_resource(node.resource_record, resource)
            if spec.rtype not in rates:
                rates[spec.rtype] = drain_per_s * jitter_rng.uniform(*DRAIN_JITTER)
        self.drain_rates[node.node_id] = rates

    def _init_waypoints(self, node: Node, speed_range, fixed_waypoint=None) -> None:
        if not node.mobile:
            return
        rng = _stream(self.scenario.seed, f"mobility:{node.node_id}")
        state = WaypointState(rng=rng, speed_range=speed_range)
        if fixed_waypoint is not None:
            state.waypoint = fixed_waypoint
            state.speed = speed_range[0]
        else:
            state.draw_waypoint(self.scenario.area)
        self.waypoints[node.node_id] = state

    def _schedule_bootstrap(self) -> None:
        # Navigation controllers first at each arrival instant so an authority
        # is online before the devices that need it.
        def order(entry):
            at, node_id = entry
            is_not_authority = self.nodes[node_id].node_class is not NodeClass.NAVIGATION_CONTROLLER
            return (at, is_not_authority, node_id)

        for at, node_id in sorted(self._arrivals, key=order):
            self.queue.push(at, "arrival", node_id=node_id)
        self.queue.push(0, "tick")
        interval = self.scenario.sampling_interval
        if self.scenario.duration > 0:
            self.queue.push(interval, "sample")

    # ------------------------------------------------------------------
    # Tracing helpers

    def _trace(self, now: int, kind: str, /, **fields) -> None:
        entry = {"t": now, "kind": kind}
        entry.update(fields)
        self.trace.append(entry)

    # ------------------------------------------------------------------
    # Event handlers

    def run(self) -> RunResult:
        duration = self.scenario.duration
        while len(self.queue) and self.queue.peek_time() <= duration:
            now, kind, payload = self.queue.pop()
            getattr(self, f"_on_{kind}")(now, **payload)
        self.metrics.elapsed = duration
        installed = sum(1 for n in self.nodes.values() if n.mca is not None)
        return RunResult(
            scenario=self.scenario,
            metrics=self.metrics,
            rows=self._rows,
            trace=self.trace,
            registered=len(self.registered_ids),
            present=len(self.present),
            installed_mcas=installed,
        )

    def _on_arrival(self, now: int, node_id: int) -> None:
        node = self.nodes[node_id]
        self.present.append(node_id)
        self.present.sort()
        if node_id not in self._explicit_ids:
            if node.mobile:
                state = self.waypoints[node_id]
                node.position = (state.rng.uniform(0, self.scenario.area[0]),
                                 state.rng.uniform(0, self.scenario.area[1]))
            else:
                rng = _stream(self.scenario.seed, f"mobility:{node_id}")
                node.position = (rng.uniform(0, self.scenario.area[0]),
                                 rng.uniform(0, self.scenario.area[1]))
        self._trace(now, "arrival", node=node_id, node_class=node.node_class.value)
        self._register(node, now)

    def _register(self, node: Node, now: int) -> None:
        if node.node_class is NodeClass.NAVIGATION_CONTROLLER:
            node.registered = True
            node.mca = MCAState(origin_authority=node.node_id)
            node.mca.belief_record.refresh_period = self.scenario.record_refresh
            node.mca.parameter_log.refresh_period = self.scenario.log_refresh
            self.authorities.append(node.node_id)
            self.authorities.sort()
            self._trace(now, "authority_online", node=node.node_id)
            self._after_registration(node, now)
            return
        if not self.authorities:
            self._trace(now, "registration_failed", node=node.node_id, reason="no_authority")
            return
        authority = self.nodes[self.authorities[0]]
        valid = node.node_id not in self.scenario.deny_ids
        session = register_device(
            node,
            authority,
            valid,
            log_refresh=self.scenario.log_refresh,
            record_refresh=self.scenario.record_refresh,
        )
        self._trace(
            now,
            "registration",
            node=node.node_id,
            authority=authority.node_id,
            state=session.state.value,
            rings=session.ring_count,
        )
        if session.state is RegistrationState.REGISTERED:
            self._trace(now, "mca_cloned", node=node.node_id, origin=authority.node_id)
            self._after_registration(node, now)

    def _after_registration(self, node: Node, now: int) -> None:
        self.registered_ids.append(node.node_id)
        self.registered_ids.sort()
        self.in_contact_us[node.node_id] = 0
        self.paused_us[node.node_id] = 0
        protocol = self.protocol
        self.queue.push(now + protocol.capture_period, "capture", node_id=node.node_id)
        self.queue.push(now + protocol.formation_period, "formation", node_id=node.node_id)
        # Refreshes trail the formation beat by one tick so a formulation
        # scheduled on the shared period boundary still sees its session.
        offset = self.scenario.tick
        self.queue.push(now + self.scenario.log_refresh + offset, "log_refresh", node_id=node.node_id)
        self.queue.push(now + self.scenario.record_refresh + offset, "record_refresh", node_id=node.node_id)

    def _on_tick(self, now: int) -> None:
        nodes = [self.nodes[i] for i in self.present]
        step_mobility(nodes, self.waypoints, self.mobility_config, now)
        self._drain(nodes)
        pairs = sorted(detect_contacts(nodes))
        self._update_contacts(pairs, now)
        self._scan_demands(now)
        tick = self.scenario.tick
        in_contact = set()
        for a, b in self.active_contacts:
            in_contact.add(a)
            in_contact.add(b)
        for node_id in self.registered_ids:
            if node_id in in_contact:
                self.in_contact_us[node_id] += tick
            node = self.nodes[node_id]
            if not node.mobile or self.waypoints[node_id].paused:
                self.paused_us[node_id] += tick
        self.queue.push(now + tick, "tick")

    def _drain(self, nodes: list[Node]) -> None:
        dt = self.scenario.tick / US_PER_S
        for node in nodes:
            rates = self.drain_rates.get(node.node_id)
            if not rates:
                continue
            for resource in node.resource_record.resources.values():
                rate = rates.get(resource.resource_type, 0.0)
                if rate > 0 and resource.capacity > 0:
                    drained = resource.initial_capacity * rate * dt
                    resource.capacity = max(0.0, resource.capacity - drained)

    # ------------------------------------------------------------------
    # Contacts

    def _update_contacts(self, pairs: list[tuple[int, int]], now: int) -> None:
        seen = set(pairs)
        threshold = self.protocol.demand_threshold
        # A pair out of range for a single tick continues the same contact; a
        # second consecutive miss closes it (debounce per the contact count).
        for pair in sorted(self.active_contacts):
            active = self.active_contacts[pair]
            if pair in seen:
                active.misses = 0
                active.last_seen = now
                continue
            active.misses += 1
            if active.misses >= 2:
                self._close_contact(pair, active, now)
        for pair in pairs:
            if pair in self.active_contacts:
                continue
            a, b = self.nodes[pair[0]], self.nodes[pair[1]]
            demand_a = demand_scan(a, threshold)
            demand_b = demand_scan(b, threshold)
            pending_transfer = bool(self.queued_pulls.get(pair))
            kind, variety = classify_contact(a, b, demand_a, demand_b, pending_transfer, threshold)
            event = ContactEvent(
                a=pair[0], b=pair[1], kind=kind, variety=variety, started_at=now, ended_at=now
            )
            record_contact(self.metrics.contacts, event)
            self.active_contacts[pair] = _ActiveContact(event=event, last_seen=now)
            self._trace(now, "contact_start", a=pair[0], b=pair[1],
                        contact_kind=kind, variety=variety)
            self._contact_capture(a, now)
            self._contact_capture(b, now)
            if kind == ContactKind.DIRECT:
                for pull in self.queued_pulls.pop(pair, []):
                    self.queue.push(
                        now + self.protocol.link.pull_delay(), "pull_done",
                        requester=pull.requester, provider=pull.provider, rtypes=pull.rtypes,
                    )
                    self._trace(now, "pull_started", requester=pull.requester,
                                provider=pull.provider,
                                rtypes=[r.value for r in pull.rtypes])
            elif kind == ContactKind.OPPORTUNISTIC_RESOURCEFUL:
                if any(can_supply(b, t, threshold) for t in demand_a):
                    self._initiate(a, b, now)
                if any(can_supply(a, t, threshold) for t in demand_b):
                    self._initiate(b, a, now)

    def _close_contact(self, pair, active: _ActiveContact, now: int) -> None:
        active.event.ended_at = active.last_seen
        del self.active_contacts[pair]
        self._trace(now, "contact_end", a=pair[0], b=pair[1], started=active.event.started_at,
                    ended=active.event.ended_at)
        duration_s = (active.event.ended_at - active.event.started_at) / US_PER_S
        for node_id in pair:
            node = self.nodes[node_id]
            if node.mca is None:
                continue
            max_s = self.scenario.capture.contact_period_max / US_PER_S
            sample = BehaviorParameterSample(
                parameter_id=ParameterId.CONTACT_PERIOD,
                value=min(duration_s, max_s),
                max_value=max_s,
                source=Source.LOG,
                captured_at=now,
            )
            self._log_samples(node, [sample])

    def _in_contact(self, a: int, b: int) -> bool:
        return _pair(a, b) in self.active_contacts

    # ------------------------------------------------------------------
    # Captures and formations

    def _log_samples(self, node: Node, samples: list[BehaviorParameterSample]) -> None:
        mca = node.mca
        for sample in samples:
            mca.parameter_log.add(sample)
            self.metrics.capture_counts[sample.parameter_id] += 1
        behaviors = bob.identify_behaviors(mca.parameter_log, self.cognitive)
        winners = bob.tick_observation_winners(behaviors, self.cognitive)
        mca.store_winners(winners)

    def _contact_capture(self, node: Node, now: int) -> None:
        if node.mca is None:
            return
        self._log_samples(node, [self._velocity_sample(node, now), self._resource_sample(node, now)])

    def _velocity_sample(self, node: Node, now: int) -> BehaviorParameterSample:
        vmax = self.scenario.capture.velocity_max
        speed = 0.0
        state = self.waypoints.get(node.node_id)
        if node.mobile and state is not None and not state.paused:
            speed = min(state.speed, vmax)
        return BehaviorParameterSample(
            parameter_id=ParameterId.VELOCITY, value=speed, max_value=vmax,
            source=Source.EXTERNAL, captured_at=now,
        )

    def _resource_sample(self, node: Node, now: int) -> BehaviorParameterSample:
        held = node.resource_record.types_held()
        if held:
            healthy = offered_types(node, self.protocol.demand_threshold)
            score = len(healthy) / len(held)
        else:
            score = 0.0
        return BehaviorParameterSample(
            parameter_id=ParameterId.RESOURCE_HISTORY, value=score, max_value=1.0,
            source=Source.LOG, captured_at=now,
        )

    def _on_capture(self, now: int, node_id: int) -> None:
        node = self.nodes[node_id]
        if node.mca is None:
            return
        window = self.protocol.capture_period
        in_contact = min(self.in_contact_us.get(node_id, 0), window)
        paused = min(self.paused_us.get(node_id, 0), window)
        samples = [
            self._velocity_sample(node, now),
            BehaviorParameterSample(
                parameter_id=ParameterId.MOBILITY_PATTERN, value=paused / window, max_value=1.0,
                source=Source.EXTERNAL, captured_at=now,
            ),
            BehaviorParameterSample(
                parameter_id=ParameterId.INTERFACE_PERIOD,
                value=in_contact / US_PER_S, max_value=window / US_PER_S,
                source=Source.EXTERNAL, captured_at=now,
            ),
            self._resource_sample(node, now),
        ]
        self._log_samples(node, samples)
        self.in_contact_us[node_id] = 0
        self.paused_us[node_id] = 0
        self.queue.push(now + window, "capture", node_id=node_id)

    def _attempt_formation(self, node: Node, now: int, on_done=None) -> bool:
        """Start a self-belief formulation; False when the evidence cannot support one."""
        mca = node.mca
        self.metrics.record_attempt(now, FAILURE_FORMATION)
        try:
            belief = bob.formulate_belief(mca.observation_history(), self.cognitive, now=now)
        except UnsupportedEvidence:
            self.metrics.record_failure(now, FAILURE_FORMATION)
            self._trace(now, "formation_failed", node=node.node_id)
            return False
        timing = formation_timing(dict(mca.parameter_log.capture_counts), self.scenario.costs)
        done_at = now + timing.t_bf
        self._provenance_counter += 1
        self.provenances.add(self._provenance_counter)
        belief = replace(belief, generated_at=done_at, provenance=self._provenance_counter)
        self.queue.push(done_at, "formation_done", node_id=node.node_id, belief=belief,
                        timing=timing, on_done=on_done)
        return True

    def _on_formation(self, now: int, node_id: int) -> None:
        node = self.nodes[node_id]
        if node.mca is not None:
            self._attempt_formation(node, now)
        self.queue.push(now + self.protocol.formation_period, "formation", node_id=node_id)

    def _on_formation_done(self, now: int, node_id: int, belief: Belief, timing, on_done) -> None:
        node = self.nodes[node_id]
        mca = node.mca
        bob.update_belief_record(mca.belief_record, HOST_ID, belief, now)
        self.metrics.record_formation(node_id, timing)
        self.metrics.belief_counts[belief.belief_id] += 1
        self._trace(now, "belief_formed", node=node_id, belief=belief.belief_id.value,
                    posterior=belief.posterior, t_bf=timing.t_bf)
        if on_done is not None:
            on_done(belief, timing, now)

    def _on_log_refresh(self, now: int, node_id: int) -> None:
        node = self.nodes[node_id]
        if node.mca is not None:
            node.mca.parameter_log.refresh()
            node.mca.refresh_observations()
        self.queue.push(now + self.scenario.log_refresh, "log_refresh", node_id=node_id)

    def _on_record_refresh(self, now: int, node_id: int) -> None:
        node = self.nodes[node_id]
        if node.mca is not None:
            node.mca.belief_record.refresh(now)
            node.mca.purge_providers(now, self.scenario.record_refresh)
        self.queue.push(now + self.scenario.record_refresh, "record_refresh", node_id=node_id)

    # ------------------------------------------------------------------
    # Exchanges

    def _next_req_id(self) -> int:
        self._req_counter += 1
        return self._req_counter

    def _initiate(self, requester: Node, peer: Node, now: int) -> None:
        mca = requester.mca
        if mca.belief_record.self_is_current(now):
            self._send_request(requester.node_id, peer.node_id, now, t_bf=0)
            return
        started = self._attempt_formation(
            requester,
            now,
            on_done=lambda belief, timing, done_at: self._send_request(
                requester.node_id, peer.node_id, done_at, t_bf=timing.t_bf
            ),
        )
        if not started:
            # The exchange never starts: the requester could not formulate a
            # self-belief; the formation failure is already on the ledger.
            self._trace(now, "exchange_aborted", requester=requester.node_id, peer=peer.node_id)

    def _send_request(
        self, requester_id: int, peer_id: int, now: int, t_bf: int,
        retries_left: int | None = None, count_attempt: bool = True,
    ) -> None:
        req_id = self._next_req_id()
        request = BeliefRequest(req_id=req_id, from_node=requester_id, to_node=peer_id, sent_at=now)
        self.pending[req_id] = _Pending(
            request=request,
            t_bf=t_bf,
            retries_left=self.protocol.retry_limit if retries_left is None else retries_left,
        )
        if count_attempt:
            self.metrics.record_attempt(now, FAILURE_EXCHANGE)
        self.queue.push(now + self.protocol.link.req_delay(), "req_delivery", req_id=req_id)
        self.queue.push(now + self.protocol.exchange_timeout, "req_timeout", req_id=req_id)
        self._trace(now, "req_sent", req_id=req_id, requester=requester_id, peer=peer_id)

    def _on_req_delivery(self, now: int, req_id: int) -> None:
        pend = self.pending.get(req_id)
        if pend is None:
            return
        request = pend.request
        if not self._in_contact(request.from_node, request.to_node):
            self._trace(now, "req_dropped", req_id=req_id)
            return
        pend.delivered_at = now
        peer = self.nodes[request.to_node]
        mca = peer.mca
        if mca is None:
            self._trace(now, "req_dropped", req_id=req_id)
            return
        self._trace(now, "req_delivered", req_id=req_id, peer=peer.node_id)
        if mca.belief_record.self_is_current(now):
            self._send_reply(peer, req_id, mca.belief_record.self_entry[0], now, formed_before=True)
            return
        started = self._attempt_formation(
            peer,
            now,
            on_done=lambda belief, timing, done_at: self._send_reply(
                peer, req_id, belief, done_at, formed_before=False
            ),
        )
        if not started:
            self._send_refusal(req_id, now)

    def _send_reply(self, peer: Node, req_id: int, belief: Belief, sent_at: int, formed_before: bool) -> None:
        if req_id not in self.pending:
            return  # requester already gave up on this exchange
        received_at = sent_at + self.protocol.link.rep_delay()
        reply = BeliefReply(
            req_id=req_id,
            belief=belief,
            resource_summary=frozenset(offered_types(peer, self.protocol.demand_threshold)),
            sent_at=sent_at,
            received_at=received_at,
        )
        self.queue.push(received_at, "rep_delivery", reply=reply, formed_before=formed_before)
        self._trace(sent_at, "rep_sent", req_id=req_id, peer=peer.node_id,
                    belief=belief.belief_id.value)

    def _send_refusal(self, req_id: int, now: int) -> None:
        self.queue.push(now + self.protocol.link.rep_delay(), "refusal_delivery", req_id=req_id)
        self._trace(now, "rep_refused", req_id=req_id)

    def _on_refusal_delivery(self, now: int, req_id: int) -> None:
        pend = self.pending.pop(req_id, None)
        if pend is None:
            return
        self._closed_requests.add(req_id)
        self.metrics.record_failure(now, FAILURE_EXCHANGE)
        self._trace(now, "exchange_failed", req_id=req_id, reason="refused")

    def _on_rep_delivery(self, now: int, reply: BeliefReply, formed_before: bool) -> None:
        pend = self.pending.pop(reply.req_id, None)
        if pend is None:
            if reply.req_id in self._closed_requests:
                # The requester already resolved or abandoned this exchange
                # (timeout + retry); a straggler reply is not a protocol bug.
                self._trace(now, "late_reply", req_id=reply.req_id)
                return
            if self.scenario.strict:
                raise OrphanReply(f"reply {reply.req_id} matches no outstanding request")
            self.metrics.orphan_replies += 1
            self._trace(now, "orphan_reply", req_id=reply.req_id)
            return
        request = pend.request
        if not self._in_contact(request.from_node, request.to_node):
            self.pending[reply.req_id] = pend  # lost in flight; timeout decides
            self._trace(now, "rep_dropped", req_id=reply.req_id)
            return
        self._closed_requests.add(reply.req_id)
        requester = self.nodes[request.from_node]
        mca = requester.mca
        timing = make_timing(
            request_sent_at=request.sent_at,
            request_delivered_at=pend.delivered_at,
            reply_received_at=now,
            requester_t_bf=pend.t_bf,
            peer_formed_before_request=formed_before,
        )
        bob.update_belief_record(mca.belief_record, request.to_node, reply.belief, now)
        for rtype in ResourceType:
            if rtype in reply.resource_summary:
                mca.learn_provider(rtype, request.to_node, now)
        self.metrics.record_exchange(timing)
        self._trace(now, "exchange_completed", req_id=reply.req_id,
                    requester=request.from_node, peer=request.to_node,
                    belief=reply.belief.belief_id.value, t_bx=timing.t_bx, t_tot=timing.t_tot)
        demanded = demand_scan(requester, self.protocol.demand_threshold)
        resolved = [
            rtype for rtype in ResourceType
            if rtype in reply.resource_summary and rtype in demanded
        ]
        for rtype in resolved:
            key = (requester.node_id, rtype)
            if key in self.onsets:
                self.metrics.latency_samples.append(now - self.onsets.pop(key))
            self.resolved_demands.add(key)
        if resolved:
            entry_ids = list(mca.belief_record.entries)
            scanned = entry_ids.index(request.to_node) + 1
            t_tra = scanned * self.protocol.trace_cost
            self.metrics.t_con_samples.append(timing.t_req + t_tra + timing.t_tot)
            pull = _Pull(requester=requester.node_id, provider=request.to_node,
                         rtypes=tuple(resolved))
            self.queue.push(now + self.protocol.link.pull_delay(), "pull_done",
                            requester=pull.requester, provider=pull.provider, rtypes=pull.rtypes)
            self._trace(now, "pull_started", requester=pull.requester, provider=pull.provider,
                        rtypes=[r.value for r in pull.rtypes])

    def _on_req_timeout(self, now: int, req_id: int) -> None:
        pend = self.pending.pop(req_id, None)
        if pend is None:
            return
        self._closed_requests.add(req_id)
        request = pend.request
        if pend.retries_left > 0 and self._in_contact(request.from_node, request.to_node):
            self._trace(now, "req_retry", req_id=req_id)
            self._send_request(
                request.from_node, request.to_node, now,
                t_bf=pend.t_bf, retries_left=pend.retries_left - 1, count_attempt=False,
            )
            return
        self.metrics.record_failure(now, FAILURE_EXCHANGE)
        self._trace(now, "exchange_failed", req_id=req_id, reason="timeout")

    def _on_pull_done(self, now: int, requester: int, provider: int,
                      rtypes: tuple[ResourceType, ...]) -> None:
        pair = _pair(requester, provider)
        if pair not in self.active_contacts:
            self.queued_pulls.setdefault(pair, []).append(
                _Pull(requester=requester, provider=provider, rtypes=rtypes)
            )
            self._trace(now, "pull_interrupted", requester=requester, provider=provider,
                        rtypes=[r.value for r in rtypes])
            return
        node = self.nodes[requester]
        for resource in node.resource_record.resources.values():
            if resource.resource_type in rtypes:
                resource.capacity = resource.initial_capacity
        self._trace(now, "pull_completed", requester=requester, provider=provider,
                    rtypes=[r.value for r in rtypes])

    # ------------------------------------------------------------------
    # Demand bookkeeping and sampling

    def _scan_demands(self, now: int) -> None:
        threshold = self.protocol.demand_threshold
        for node_id in self.registered_ids:
            node = self.nodes[node_id]
            demand = demand_scan(node, threshold)
            previous = self.prev_demand.get(node_id, set())
            fresh = sorted(demand - previous, key=lambda r: r.value)
            for rtype in fresh:
                key = (node_id, rtype)
                if key not in self.resolved_demands:
                    self.onsets[key] = now
            for rtype in sorted(previous - demand, key=lambda r: r.value):
                key = (node_id, rtype)
                self.onsets.pop(key, None)
                self.resolved_demands.discard(key)
            self.prev_demand[node_id] = demand
            if fresh:
                # Proactive monitoring: demand that emerges during an ongoing
                # contact solicits the in-contact peers that can satisfy it,
                # and the encounter's taxonomy follows the pooling it carries.
                for pair in sorted(self.active_contacts):
                    if node_id not in pair:
                        continue
                    peer = self.nodes[pair[0] if pair[1] == node_id else pair[1]]
                    if peer.mca is None:
                        continue
                    if any(can_supply(peer, rtype, threshold) for rtype in fresh):
                        active = self.active_contacts[pair]
                        if active.event.kind == ContactKind.OPPORTUNISTIC_RESOURCELESS:
                            variety = (
                                ContactVariety.HOMOGENEOUS
                                if node.node_class is peer.node_class
                                else ContactVariety.HETEROGENEOUS
                            )
                            upgrade_contact(self.metrics.contacts, active.event, variety)
                            self._trace(now, "contact_upgraded", a=pair[0], b=pair[1],
                                        variety=variety)
                        self._initiate(node, peer, now)

    def _on_sample(self, now: int) -> None:
        attempts = [t for t, _ in self.metrics.attempts if self._last_sample < t <= now]
        failures = [t for t, _ in self.metrics.failures if self._last_sample < t <= now]
        pct = 100.0 * len(failures) / len(attempts) if attempts else None
        n_present = len(self.present)
        self.metrics.density_samples.append((now, n_present))
        self.metrics.elapsed = now
        self._rows.append(snapshot_row(self.metrics, now, n_present, pct))
        total = satisfied = 0
        for node_id in self.registered_ids:
            node = self.nodes[node_id]
            demand = sorted(demand_scan(node, self.protocol.demand_threshold), key=lambda r: r.value)
            for rtype in demand:
                total += 1
                if node.mca.provider_map.get(rtype):
                    satisfied += 1
        self.metrics.availability_samples.append((now, satisfied / total if total else None))
        self._last_sample = now
        self.queue.push(now + self.scenario.sampling_interval, "sample")


def run(scenario: Scenario) -> RunResult:
    """Execute one scenario in a fresh world."""
    return Simulation(scenario).run()


# ---------------------------------------------------------------------------
# Emission


def emit(result: RunResult, out_dir: str, contact_trace: bool = True) -> dict[str, str]:
    """Write metrics CSV, optional contact trace, scenario, and run manifest."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}

    csv_text = result.csv()
    paths["metrics"] = os.path.join(out_dir, "metrics.csv")
    with open(paths["metrics"], "w", encoding="utf-8", newline="") as handle:
        handle.write(csv_text)

    if contact_trace:
        lines = ["tick,a,b,kind,variety"]
        tick = result.scenario.tick
        for event in result.metrics.contacts.events:
            lines.append(
                f"{event.started_at // tick},{event.a},{event.b},{event.kind},{event.variety}"
            )
        paths["contacts"] = os.path.join(out_dir, "contacts.csv")
        with open(paths["contacts"], "w", encoding="utf-8", newline="") as handle:
            handle.write("\n".join(lines) + "\n")

    scenario_text = dump_scenario(result.scenario)
    paths["scenario"] = os.path.join(out_dir, "scenario.caosr")
    with open(paths["scenario"], "w", encoding="utf-8", newline="") as handle:
        handle.write(scenario_text)

    manifest = [
        f"version = {__version__}",
        f"seed = {result.scenario.seed}",
        "scenario = scenario.caosr",
        f"scenario_sha256 = {scenario_digest(result.scenario)}",
        f"metrics_sha256 = {hashlib.sha256(csv_text.encode('utf-8')).hexdigest()}",
    ]
    paths["manifest"] = os.path.join(out_dir, "manifest.txt")
    with open(paths["manifest"], "w", encoding="utf-8", newline="") as handle:
        handle.write("\n".join(manifest) + "\n")
    return paths

"""REQ/REP belief exchange between agents in contact, with full timing capture.

Timing convention: t_req spans request send to request delivery; t_rep spans
request delivery to reply receipt, so a peer that must first formulate its
self-belief inflates t_rep.  t_bx = t_req + t_rep holds exactly (integer
microseconds), and t_tot = t_bf + t_bx where t_bf is the requester's own
formulation time when this exchange forced a fresh one (zero otherwise).
"""

import struct
from dataclasses import dataclass

from .bob import Belief, BeliefId
from .errors import InconsistentTiming
from .nodes import ResourceType
from .units import ms


@dataclass
class LinkDelayModel:
    """Per-message delay: serialization at the link data rate plus fixed processing."""

    data_rate_bps: int = 2_000_000
    processing: int = ms(1)  # microseconds
    req_size_bytes: int = 64
    rep_size_bytes: int = 256
    pull_size_bytes: int = 1024

    def delay(self, size_bytes: int) -> int:
        return (size_bytes * 8 * 1_000_000) // self.data_rate_bps + self.processing

    def req_delay(self) -> int:
        return self.delay(self.req_size_bytes)

    def rep_delay(self) -> int:
        return self.delay(self.rep_size_bytes)

    def pull_delay(self) -> int:
        return self.delay(self.pull_size_bytes)


@dataclass(frozen=True)
class BeliefRequest:
    req_id: int
    from_node: int
    to_node: int
    sent_at: int


@dataclass(frozen=True)
class BeliefReply:
    req_id: int
    belief: Belief
    resource_summary: frozenset[ResourceType]
    sent_at: int
    received_at: int

    def __post_init__(self):
        if self.received_at < self.sent_at:
            raise ValueError("reply cannot be received before it is sent")


@dataclass(frozen=True)
class ExchangeTiming:
    """One completed exchange's timing decomposition, all integer microseconds."""

    t_req: int
    t_rep: int
    t_bx: int
    t_bf: int
    t_tot: int
    peer_formed_before_request: bool

    def __post_init__(self):
        if self.t_bx != self.t_req + self.t_rep:
            raise InconsistentTiming(
                f"t_bx {self.t_bx} != t_req {self.t_req} + t_rep {self.t_rep}"
            )
        if self.t_tot != self.t_bf + self.t_bx:
            raise InconsistentTiming(
                f"t_tot {self.t_tot} != t_bf {self.t_bf} + t_bx {self.t_bx}"
            )


def make_timing(
    request_sent_at: int,
    request_delivered_at: int,
    reply_received_at: int,
    requester_t_bf: int,
    peer_formed_before_request: bool,
) -> ExchangeTiming:
    """Assemble a timing record from the three protocol timestamps."""
    t_req = request_delivered_at - request_sent_at
    t_rep = reply_received_at - request_delivered_at
    return ExchangeTiming(
        t_req=t_req,
        t_rep=t_rep,
        t_bx=t_req + t_rep,
        t_bf=requester_t_bf,
        t_tot=requester_t_bf + t_req + t_rep,
        peer_formed_before_request=peer_formed_before_request,
    )


# Flat binary layouts (little endian).  Ids and times are 8-byte unsigned
# integers of simulated microseconds; the belief class and the resource
# summary travel as an 8-byte code and an 8-byte bit mask over the
# resource-type enumeration; posteriors travel as IEEE doubles.
#
# request: req_id u64 | from u64 | to u64 | sent_at u64
# reply:   req_id u64 | belief u64 | posterior f64 | generated_at u64
#          | provenance u64 | summary mask u64 | sent_at u64 | received_at u64
_REQUEST_FORMAT = "<QQQQ"
_REPLY_FORMAT = "<QQdQQQQQ"

_BELIEF_CODES = {belief: i for i, belief in enumerate(BeliefId)}
_BELIEF_FROM_CODE = {i: belief for belief, i in _BELIEF_CODES.items()}
_TYPE_BITS = {rtype: 1 << i for i, rtype in enumerate(ResourceType)}


def encode_request(request: BeliefRequest) -> bytes:
    return struct.pack(
        _REQUEST_FORMAT, request.req_id, request.from_node, request.to_node, request.sent_at
    )


def decode_request(payload: bytes) -> BeliefRequest:
    req_id, from_node, to_node, sent_at = struct.unpack(_REQUEST_FORMAT, payload)
    return BeliefRequest(req_id=req_id, from_node=from_node, to_node=to_node, sent_at=sent_at)


def encode_reply(reply: BeliefReply) -> bytes:
    mask = 0
    for rtype in reply.resource_summary:
        mask |= _TYPE_BITS[rtype]
    provenance = reply.belief.provenance if reply.belief.provenance is not None else 0
    return struct.pack(
        _REPLY_FORMAT,
        reply.req_id,
        _BELIEF_CODES[reply.belief.belief_id],
        reply.belief.posterior,
        reply.belief.generated_at,
        provenance,
        mask,
        reply.sent_at,
        reply.received_at,
    )


def decode_reply(payload: bytes) -> BeliefReply:
    (
        req_id,
        code,
        posterior,
        generated_at,
        provenance,
        mask,
        sent_at,
        received_at,
    ) = struct.unpack(_REPLY_FORMAT, payload)
    summary = frozenset(rtype for rtype, bit in _TYPE_BITS.items() if mask & bit)
    belief = Belief(
        belief_id=_BELIEF_FROM_CODE[code],
        posterior=posterior,
        generated_at=generated_at,
        provenance=provenance or None,
    )
    return BeliefReply(
        req_id=req_id,
        belief=belief,
        resource_summary=summary,
        sent_at=sent_at,
        received_at=received_at,
    )

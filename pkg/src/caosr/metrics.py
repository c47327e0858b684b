"""Performance instrumentation: reliability, convergence, timing, failures.

All stored timings are integer microseconds; the CSV report converts means to
milliseconds.  The per-formation cost model charges a fixed per-capture cost
for each pipeline stage, so the modeled self-formulation time grows with the
number of captures in the session window.
"""

from collections import Counter
from dataclasses import dataclass, field

from .bob import BeliefId, ParameterId
from .errors import InconsistentTiming
from .exchange import ExchangeTiming
from .mobility import ContactLedger
from .units import US_PER_MS, US_PER_S, ms


@dataclass(frozen=True)
class FormationCosts:
    """Per-capture stage costs (microseconds) of the modeled pipeline."""

    capture: int = ms(1)
    observation: int = ms(0.5)
    belief: int = ms(0.5)


@dataclass(frozen=True)
class FormationTiming:
    """Stage decomposition of one self-belief formulation."""

    t_bh: int
    t_ob: int
    t_bl: int

    @property
    def t_bf(self) -> int:
        return self.t_bh + self.t_ob + self.t_bl


def formation_timing(capture_counts: dict[ParameterId, int], costs: FormationCosts) -> FormationTiming:
    """Stage times as capture-count-weighted per-capture costs."""
    total = sum(capture_counts.values())
    return FormationTiming(
        t_bh=total * costs.capture,
        t_ob=total * costs.observation,
        t_bl=total * costs.belief,
    )


def behavior_capturing_time(capture_counts: dict[ParameterId, int], capture_cost: int) -> int:
    """Total capture cost over every parameter kind: sum of count * unit cost."""
    return sum(count * capture_cost for count in capture_counts.values())


FAILURE_FORMATION = "formation"
FAILURE_EXCHANGE = "exchange"


@dataclass
class MetricsLedger:
    """Run-wide counters and accumulators for the performance report."""

    contacts: ContactLedger = field(default_factory=ContactLedger)
    exchanges: list[ExchangeTiming] = field(default_factory=list)
    formations: dict[int, list[FormationTiming]] = field(default_factory=dict)
    capture_counts: Counter = field(default_factory=Counter)  # run totals per parameter
    belief_counts: Counter = field(default_factory=Counter)  # generated beliefs per class
    attempts: list[tuple[int, str]] = field(default_factory=list)  # (time, kind)
    failures: list[tuple[int, str]] = field(default_factory=list)
    density_samples: list[tuple[int, int]] = field(default_factory=list)
    availability_samples: list[tuple[int, float | None]] = field(default_factory=list)
    latency_samples: list[int] = field(default_factory=list)  # demand onset -> provider known
    t_con_samples: list[int] = field(default_factory=list)
    pause_time: int = 0  # configured representative pause, microseconds
    tick: int = ms(100)
    elapsed: int = 0
    orphan_replies: int = 0

    def record_exchange(self, timing: ExchangeTiming) -> None:
        self.exchanges.append(timing)

    def record_formation(self, node_id: int, timing: FormationTiming) -> None:
        self.formations.setdefault(node_id, []).append(timing)

    def record_attempt(self, now: int, kind: str) -> None:
        self.attempts.append((now, kind))

    def record_failure(self, now: int, kind: str) -> None:
        self.failures.append((now, kind))

    def belief_fractions(self) -> dict[BeliefId, float]:
        total = sum(self.belief_counts.values())
        if total == 0:
            return {belief: 0.0 for belief in BeliefId}
        return {belief: self.belief_counts.get(belief, 0) / total for belief in BeliefId}

    def capture_rates_per_s(self) -> dict[ParameterId, float]:
        if self.elapsed <= 0:
            return {}
        return {
            pid: count / (self.elapsed / US_PER_S) for pid, count in self.capture_counts.items()
        }


def reliability(ledger: MetricsLedger) -> float | None:
    """Share of all contacts that were resourceful opportunistic contacts.

    Returns None (absent) when no contact has happened yet.
    """
    n_tc = ledger.contacts.n_tc
    if n_tc == 0:
        return None
    return ledger.contacts.n_roc / n_tc


def convergence_rate(n_d: int, t_p: int, tick: int) -> float:
    """Node density over pause time, in nodes per millisecond.

    A zero pause is clamped to one tick so the rate stays finite at the low
    end of the configured pause envelope.
    """
    denominator_ms = max(t_p, tick) / US_PER_MS
    if denominator_ms <= 0:
        raise ValueError("tick must be positive")
    return n_d / denominator_ms


def convergence_time(t_req: int, t_tra: int, t_tot: int) -> int:
    """Request propagation + record tracing + belief formulation total."""
    return t_req + t_tra + t_tot


def average_belief_formulation_time(ledger: MetricsLedger) -> float | None:
    """Capture-rate-weighted mean total formulation time, in milliseconds.

    Computed as (sum of per-parameter capture rates per second) times the mean
    t_tot over completed exchanges; absent when nothing completed.
    """
    if not ledger.exchanges:
        return None
    rates = ledger.capture_rates_per_s()
    mean_t_tot_ms = sum(t.t_tot for t in ledger.exchanges) / len(ledger.exchanges) / US_PER_MS
    return sum(rates.values()) * mean_t_tot_ms


def weighted_mean_t_tot(lambdas: list[float], mean_t_tot: float) -> float:
    """Kernel of the average-formulation-time reading: rate sum times mean."""
    return sum(lambdas) * mean_t_tot


@dataclass(frozen=True)
class TimingReport:
    per_exchange: tuple[ExchangeTiming, ...]
    mean_t_bf: float | None
    mean_t_bx: float | None
    mean_t_tot: float | None
    behavior_capturing_total: int
    stage_totals: tuple[int, int, int]  # summed t_bh, t_ob, t_bl over formations


def timing_rollup(ledger: MetricsLedger, costs: FormationCosts | None = None) -> TimingReport:
    """Validate every timing identity and aggregate the stage sums."""
    for timing in ledger.exchanges:
        if timing.t_bx != timing.t_req + timing.t_rep:
            raise InconsistentTiming("exchange violates t_bx = t_req + t_rep")
        if timing.t_tot != timing.t_bf + timing.t_bx:
            raise InconsistentTiming("exchange violates t_tot = t_bf + t_bx")
    stage_bh = stage_ob = stage_bl = 0
    for timings in ledger.formations.values():
        for timing in timings:
            if timing.t_bf != timing.t_bh + timing.t_ob + timing.t_bl:
                raise InconsistentTiming("formation violates t_bf = t_bh + t_ob + t_bl")
            stage_bh += timing.t_bh
            stage_ob += timing.t_ob
            stage_bl += timing.t_bl
    capture_cost = (costs or FormationCosts()).capture
    n = len(ledger.exchanges)
    return TimingReport(
        per_exchange=tuple(ledger.exchanges),
        mean_t_bf=sum(t.t_bf for t in ledger.exchanges) / n if n else None,
        mean_t_bx=sum(t.t_bx for t in ledger.exchanges) / n if n else None,
        mean_t_tot=sum(t.t_tot for t in ledger.exchanges) / n if n else None,
        behavior_capturing_total=behavior_capturing_time(dict(ledger.capture_counts), capture_cost),
        stage_totals=(stage_bh, stage_ob, stage_bl),
    )


def failure_rate(ledger: MetricsLedger, bucket: int) -> list[tuple[int, float]]:
    """Per-bucket failure percentage over attempted formations and exchanges.

    Buckets with no attempts are omitted.
    """
    if bucket <= 0:
        raise ValueError("bucket must be positive")
    attempts: Counter = Counter(t // bucket for t, _ in ledger.attempts)
    failures: Counter = Counter(t // bucket for t, _ in ledger.failures)
    return [
        (index * bucket, 100.0 * failures.get(index, 0) / count)
        for index, count in sorted(attempts.items())
    ]


CSV_COLUMNS = (
    "t",
    "n_nodes",
    "N_DC",
    "N_OC",
    "N_hom",
    "N_het",
    "P_OC",
    "xi_RA",
    "mean_T_bf",
    "mean_T_bx",
    "mean_T_tot",
    "T_avg",
    "failure_pct",
)


@dataclass(frozen=True)
class MetricsRow:
    t: int
    n_nodes: int
    n_dc: int
    n_oc: int
    n_hom: int
    n_het: int
    p_oc: float | None
    xi_ra: float
    mean_t_bf: float | None  # milliseconds
    mean_t_bx: float | None
    mean_t_tot: float | None
    t_avg: float | None
    failure_pct: float | None


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def rows_to_csv(rows: list[MetricsRow]) -> str:
    """Render snapshot rows in the fixed column order, floats at 6 decimals."""
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(
            ",".join(
                _cell(value)
                for value in (
                    row.t,
                    row.n_nodes,
                    row.n_dc,
                    row.n_oc,
                    row.n_hom,
                    row.n_het,
                    row.p_oc,
                    row.xi_ra,
                    row.mean_t_bf,
                    row.mean_t_bx,
                    row.mean_t_tot,
                    row.t_avg,
                    row.failure_pct,
                )
            )
        )
    return "\n".join(lines) + "\n"


def snapshot_row(ledger: MetricsLedger, now: int, n_nodes: int, interval_failure_pct: float | None) -> MetricsRow:
    """One sampling-interval row of the metrics CSV."""
    contacts = ledger.contacts
    n = len(ledger.exchanges)
    mean_t_bf = sum(t.t_bf for t in ledger.exchanges) / n / US_PER_MS if n else None
    mean_t_bx = sum(t.t_bx for t in ledger.exchanges) / n / US_PER_MS if n else None
    mean_t_tot = sum(t.t_tot for t in ledger.exchanges) / n / US_PER_MS if n else None
    return MetricsRow(
        t=now,
        n_nodes=n_nodes,
        n_dc=contacts.n_dc,
        n_oc=contacts.n_oc,
        n_hom=contacts.n_hom,
        n_het=contacts.n_het,
        p_oc=reliability(ledger),
        xi_ra=convergence_rate(n_d=n_nodes, t_p=ledger.pause_time, tick=ledger.tick),
        mean_t_bf=mean_t_bf,
        mean_t_bx=mean_t_bx,
        mean_t_tot=mean_t_tot,
        t_avg=average_belief_formulation_time(ledger),
        failure_pct=interval_failure_pct,
    )

"""Experiment presets: parameter sweeps and the columns each report needs.

Each preset expands into one or more scenario runs plus a summarizer that
turns the run results into the rows of a figure-ready CSV.  Sweeps reuse a
fixed block of seeds across sweep points so points stay paired.
"""

import os
from dataclasses import dataclass, replace
from typing import Callable

from .bob import BeliefId
from .engine import RunResult, run
from .errors import UnknownPreset
from .metrics import failure_rate
from .nodes import NodeClass, ResourceType
from .scenario import (
    PopulationGroup,
    ResourceSpec,
    Scenario,
    default_population,
    default_scenario,
)
from .units import US_PER_MS, ms, seconds

PRESET_NAMES = ("fig10", "fig11", "fig12", "fig13", "fig14", "fig15", "fig16")

DENSITY_SWEEP = (50, 100, 150, 200)
PAUSE_SWEEP_MS = (0, 30, 60, 90, 120, 150)
RICH_SHARES = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
SWEEP_SEEDS = 5


@dataclass(frozen=True)
class PresetRun:
    label: str
    scenario: Scenario


@dataclass(frozen=True)
class PresetPlan:
    name: str
    description: str
    columns: tuple[str, ...]
    runs: tuple[PresetRun, ...]
    summarize: Callable[[list[tuple[PresetRun, RunResult]]], list[tuple]]


def _scaled_population(total: int) -> tuple[PopulationGroup, ...]:
    """Scale the default 200-node mix to a target population size."""
    base = default_population()
    factor = total / sum(g.count for g in base)
    scaled = []
    for group in base[:-1]:
        count = max(1, round(group.count * factor))
        scaled.append(replace(group, count=count))
    rest = total - sum(g.count for g in scaled)
    scaled.append(replace(base[-1], count=max(1, rest)))
    return tuple(scaled)


def _rich_poor_population(rich_share: float, mobile_total: int = 56) -> tuple[PopulationGroup, ...]:
    """A uniform mobile class split into rich and poor resource endowments.

    Poor nodes arrive already starved so they demand but never supply; rich
    nodes drain fast enough that pairs of them still pool within the run.
    """
    R = ResourceType
    rich = min(mobile_total - 1, max(1, round(mobile_total * rich_share)))
    poor = mobile_total - rich
    rich_resources = (
        ResourceSpec(R.MEMORY, 1, 512.0),
        ResourceSpec(R.PROCESSOR, 1, 4.0),
        ResourceSpec(R.COMMUNICATION_CHANNEL, 1, 2.0),
        ResourceSpec(R.SOFTWARE_SERVICE, 1, 2.0),
    )
    poor_resources = (ResourceSpec(R.MEMORY, 1, 24.0, 3.6),)
    static_resources = (
        ResourceSpec(R.MEMORY, 1, 2048.0),
        ResourceSpec(R.COMMUNICATION_CHANNEL, 1, 8.0),
        ResourceSpec(R.SOFTWARE_SERVICE, 1, 4.0),
    )
    return (
        PopulationGroup("navcon", NodeClass.NAVIGATION_CONTROLLER, 1, 60.0, (0.0, 0.0), 0.01, static_resources),
        PopulationGroup("infra", NodeClass.SURVIVED_INFRASTRUCTURE, 3, 60.0, (0.0, 0.0), 0.01, static_resources),
        PopulationGroup("rich", NodeClass.RESCUE_TEAM, rich, 30.0, (0.5, 2.0), 0.06, rich_resources),
        PopulationGroup("poor", NodeClass.RESCUE_TEAM, poor, 30.0, (0.5, 2.0), 0.12, poor_resources),
    )


def _mean(values) -> float | None:
    values = [v for v in values if v is not None]
    return sum(values) / len(values) if values else None


def _seed_block(seed: int) -> list[int]:
    return [seed + offset for offset in range(SWEEP_SEEDS)]


def _fig10(seed: int) -> PresetPlan:
    scenario = default_scenario(seed=seed)

    def summarize(results):
        _, result = results[0]
        return [(row.t // US_PER_MS, row.n_nodes) for row in result.rows]

    return PresetPlan(
        name="fig10",
        description="population ramp: node count versus time",
        columns=("t_ms", "n_nodes"),
        runs=(PresetRun(label=f"seed={seed}", scenario=scenario),),
        summarize=summarize,
    )


def _density_scenario(density: int, seed: int) -> Scenario:
    scenario = default_scenario(seed=seed)
    scenario.population = _scaled_population(density)
    scenario.validate()
    return scenario


def _fig11(seed: int) -> PresetPlan:
    runs = tuple(
        PresetRun(label=f"n={density}", scenario=_density_scenario(density, seed))
        for density in DENSITY_SWEEP
    )

    def summarize(results):
        rows = []
        for preset_run, result in results:
            contacts = result.metrics.contacts
            rows.append(
                (
                    preset_run.scenario.total_nodes(),
                    contacts.n_dc,
                    contacts.n_oc,
                    contacts.n_hom,
                    contacts.n_het,
                    contacts.n_roc,
                    contacts.n_tc,
                )
            )
        return rows

    return PresetPlan(
        name="fig11",
        description="contact-kind counts versus node count",
        columns=("n_nodes", "N_DC", "N_OC", "N_hom", "N_het", "N_Roc", "N_tc"),
        runs=runs,
        summarize=summarize,
    )


def _fig12_scenario(share: float, seed: int) -> Scenario:
    scenario = Scenario(
        seed=seed,
        duration=seconds(60),
        area=(500.0, 500.0),
        population=_rich_poor_population(share),
    )
    scenario.arrival = replace(scenario.arrival, warmup=seconds(10))
    scenario.validate()
    return scenario


def _fig12(seed: int) -> PresetPlan:
    runs = []
    for share in RICH_SHARES:
        for run_seed in _seed_block(seed):
            runs.append(
                PresetRun(
                    label=f"share={share:.1f},seed={run_seed}",
                    scenario=_fig12_scenario(share, run_seed),
                )
            )

    def summarize(results):
        rows = []
        for index, share in enumerate(RICH_SHARES):
            block = results[index * SWEEP_SEEDS : (index + 1) * SWEEP_SEEDS]
            from .metrics import reliability

            p_oc = _mean([reliability(result.metrics) for _, result in block])
            rows.append((share, p_oc))
        return rows

    return PresetPlan(
        name="fig12",
        description="reliability (P_OC) versus resource-rich population share",
        columns=("rich_share", "P_OC"),
        runs=tuple(runs),
        summarize=summarize,
    )


def _fig13(seed: int) -> PresetPlan:
    runs = []
    for density in DENSITY_SWEEP:
        for run_seed in _seed_block(seed):
            runs.append(
                PresetRun(
                    label=f"n={density},seed={run_seed}",
                    scenario=_density_scenario(density, run_seed),
                )
            )
    runs = tuple(runs)

    def summarize(results):
        rows = []
        for index in range(len(DENSITY_SWEEP)):
            block = results[index * SWEEP_SEEDS : (index + 1) * SWEEP_SEEDS]
            opportunistic = _mean(
                [result.metrics.contacts.n_oc + result.metrics.contacts.n_roc for _, result in block]
            )
            availability = _mean(
                [
                    _mean([pct for _, pct in result.metrics.availability_samples])
                    for _, result in block
                ]
            )
            rows.append(
                (opportunistic, None if availability is None else 100.0 * availability)
            )
        return rows

    return PresetPlan(
        name="fig13",
        description=(
            "resource availability versus opportunistic contacts; availability is the "
            "fraction of demand entries with a known provider at each sampling instant"
        ),
        columns=("n_opportunistic_contacts", "availability_pct"),
        runs=runs,
        summarize=summarize,
    )


def _fig14(seed: int) -> PresetPlan:
    runs = []
    for density in DENSITY_SWEEP:
        for run_seed in _seed_block(seed):
            runs.append(
                PresetRun(
                    label=f"n={density},seed={run_seed}",
                    scenario=_density_scenario(density, run_seed),
                )
            )

    def summarize(results):
        rows = []
        for index, density in enumerate(DENSITY_SWEEP):
            block = results[index * SWEEP_SEEDS : (index + 1) * SWEEP_SEEDS]
            fractions = {belief: [] for belief in BeliefId}
            for _, result in block:
                shares = result.metrics.belief_fractions()
                for belief in BeliefId:
                    fractions[belief].append(shares[belief])
            rows.append(
                (
                    density,
                    _mean(fractions[BeliefId.PATRON]),
                    _mean(fractions[BeliefId.CASUAL]),
                    _mean(fractions[BeliefId.SLACK]),
                    _mean(fractions[BeliefId.VAGRANT]),
                )
            )
        return rows

    return PresetPlan(
        name="fig14",
        description="belief-class fractions versus node density",
        columns=("n_nodes", "patron_frac", "casual_frac", "slack_frac", "vagrant_frac"),
        runs=tuple(runs),
        summarize=summarize,
    )


def _fig15_scenario(pause_ms: int, seed: int) -> Scenario:
    scenario = default_scenario(seed=seed)
    scenario.duration = seconds(30)
    scenario.tick = ms(10)
    scenario.pause_range = (ms(pause_ms), ms(pause_ms))
    scenario.arrival = replace(scenario.arrival, warmup=seconds(5))
    scenario.validate()
    return scenario


def _fig15(seed: int) -> PresetPlan:
    runs = tuple(
        PresetRun(label=f"pause={pause}ms", scenario=_fig15_scenario(pause, seed))
        for pause in PAUSE_SWEEP_MS
    )

    def summarize(results):
        from .metrics import convergence_rate

        rows = []
        for preset_run, result in results:
            scenario = preset_run.scenario
            xi = convergence_rate(
                n_d=scenario.total_nodes(), t_p=scenario.pause_representative, tick=scenario.tick
            )
            latency = _mean(result.metrics.latency_samples)
            rows.append(
                (
                    scenario.pause_representative // US_PER_MS,
                    xi,
                    None if latency is None else latency / US_PER_MS,
                )
            )
        return rows

    return PresetPlan(
        name="fig15",
        description="convergence rate and measured discovery latency versus pause time",
        columns=("pause_ms", "xi_RA", "discovery_latency_ms"),
        runs=runs,
        summarize=summarize,
    )


FIG16_BUCKETS = 8


def _fig16(seed: int) -> PresetPlan:
    runs = tuple(
        PresetRun(label=f"seed={run_seed}", scenario=default_scenario(seed=run_seed))
        for run_seed in _seed_block(seed)
    )

    def summarize(results):
        duration = results[0][0].scenario.duration
        bucket = duration // FIG16_BUCKETS
        per_bucket: dict[int, list[float]] = {}
        for _, result in results:
            for start, pct in failure_rate(result.metrics, bucket):
                per_bucket.setdefault(start, []).append(pct)
        return [
            (start // US_PER_MS, _mean(values)) for start, values in sorted(per_bucket.items())
        ]

    return PresetPlan(
        name="fig16",
        description="belief formulation failure rate versus time",
        columns=("bucket_start_ms", "failure_pct"),
        runs=runs,
        summarize=summarize,
    )


_BUILDERS = {
    "fig10": _fig10,
    "fig11": _fig11,
    "fig12": _fig12,
    "fig13": _fig13,
    "fig14": _fig14,
    "fig15": _fig15,
    "fig16": _fig16,
}


def preset(name: str, seed: int = 42) -> PresetPlan:
    """The scenario sweep and report columns for one of the figure presets."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownPreset(
            f"unknown preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}"
        ) from None
    return builder(seed)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def summary_csv(plan: PresetPlan, rows: list[tuple]) -> str:
    lines = [",".join(plan.columns)]
    for row in rows:
        lines.append(",".join(_cell(value) for value in row))
    return "\n".join(lines) + "\n"


def execute_preset(plan: PresetPlan, out_dir: str | None = None) -> tuple[list[tuple], str]:
    """Run every scenario in the plan and render the summary CSV."""
    results = [(preset_run, run(preset_run.scenario)) for preset_run in plan.runs]
    rows = plan.summarize(results)
    text = summary_csv(plan, rows)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, f"{plan.name}.csv")
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    return rows, text

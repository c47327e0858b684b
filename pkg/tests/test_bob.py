import random

import pytest

from caosr.bob import (
    BEHAVIOR_LEVELS,
    HOST_ID,
    Behavior,
    BehaviorId,
    BehaviorParameterSample,
    Belief,
    BeliefId,
    BeliefRecord,
    Observation,
    ObservationId,
    ParameterId,
    ParameterLog,
    behavior_probability,
    compute_parameter_weight,
    default_cognitive_config,
    favorable_observations,
    formulate_belief,
    generate_belief,
    identify_behaviors,
    observation_posterior,
    summarize_observations,
    tick_observation_winners,
    update_belief_record,
)
from caosr.errors import DegenerateMaximum, EmptyLog, UnsupportedEvidence


def sample(pid, value, max_value=1.0, at=0):
    return BehaviorParameterSample(parameter_id=pid, value=value, max_value=max_value, captured_at=at)


def log_with(counts):
    log = ParameterLog()
    at = 0
    for pid, count in counts.items():
        for _ in range(count):
            log.add(sample(pid, 0.5, at=at))
            at += 1
    return log


# ---------------------------------------------------------------------------
# Parameter weights


def test_single_parameter_weight_is_one():
    log = log_with({ParameterId.VELOCITY: 1})
    assert compute_parameter_weight(log, ParameterId.VELOCITY) == 1.0


def test_weight_is_capture_count_share():
    log = log_with({ParameterId.VELOCITY: 2, ParameterId.CONTACT_PERIOD: 3})
    assert compute_parameter_weight(log, ParameterId.VELOCITY) == pytest.approx(0.4)


def test_weights_normalize():
    log = log_with(
        {ParameterId.VELOCITY: 1, ParameterId.CONTACT_PERIOD: 1, ParameterId.RESOURCE_HISTORY: 2}
    )
    weights = [compute_parameter_weight(log, pid) for pid in ParameterId]
    assert sorted(w for w in weights if w > 0) == pytest.approx([0.25, 0.25, 0.5])
    assert sum(weights) == pytest.approx(1.0)


def test_never_captured_parameter_has_zero_weight():
    log = log_with({ParameterId.VELOCITY: 2})
    assert compute_parameter_weight(log, ParameterId.RESOURCE_HISTORY) == 0.0


def test_empty_log_raises():
    with pytest.raises(EmptyLog):
        compute_parameter_weight(ParameterLog(), ParameterId.VELOCITY)


def test_weight_sum_property_random_counts():
    rng = random.Random(1)
    for _ in range(500):
        counts = {pid: rng.randint(0, 9) for pid in ParameterId}
        if sum(counts.values()) == 0:
            counts[ParameterId.VELOCITY] = 1
        log = log_with({p: c for p, c in counts.items() if c})
        total = sum(compute_parameter_weight(log, pid) for pid in ParameterId)
        assert abs(total - 1.0) < 1e-12


# ---------------------------------------------------------------------------
# Behavior probability


def test_all_samples_at_max_gives_one():
    samples = [sample(ParameterId.VELOCITY, 1.0), sample(ParameterId.CONTACT_PERIOD, 2.0, 2.0)]
    weights = {ParameterId.VELOCITY: 0.5, ParameterId.CONTACT_PERIOD: 0.5}
    assert behavior_probability(samples, weights) == pytest.approx(1.0)


def test_all_samples_zero_gives_zero():
    samples = [sample(ParameterId.VELOCITY, 0.0)]
    assert behavior_probability(samples, {ParameterId.VELOCITY: 1.0}) == 0.0


def test_weighted_ratio_sum():
    samples = [sample(ParameterId.VELOCITY, 0.5), sample(ParameterId.CONTACT_PERIOD, 0.25)]
    weights = {ParameterId.VELOCITY: 0.4, ParameterId.CONTACT_PERIOD: 0.6}
    assert behavior_probability(samples, weights) == pytest.approx(0.35)


def test_degenerate_maximum_rejected_at_construction():
    with pytest.raises(DegenerateMaximum):
        sample(ParameterId.VELOCITY, 0.0, max_value=0.0)


def test_probability_matches_straight_line_evaluator():
    rng = random.Random(2)
    for _ in range(300):
        pids = rng.sample(list(ParameterId), k=rng.randint(1, 4))
        samples = [sample(pid, rng.random()) for pid in pids]
        weights = {pid: rng.random() + 0.01 for pid in pids}
        got = behavior_probability(samples, weights)
        total_w = sum(weights.values())
        expected = sum((weights[s.parameter_id] / total_w) * s.value for s in samples)
        assert abs(got - min(1.0, max(0.0, expected))) < 1e-12
        assert 0.0 <= got <= 1.0


# ---------------------------------------------------------------------------
# Behavior identification


def test_high_velocity_ratio_maps_to_high_level():
    config = default_cognitive_config()
    log = ParameterLog()
    log.add(sample(ParameterId.VELOCITY, 0.9))
    behaviors = identify_behaviors(log, config)
    assert len(behaviors) == 1
    assert behaviors[0].behavior_id is BehaviorId.VELOCITY_LEVEL
    assert behaviors[0].level == "high"


def test_absent_parameter_emits_no_behavior():
    config = default_cognitive_config()
    log = ParameterLog()
    log.add(sample(ParameterId.VELOCITY, 0.2))
    behaviors = identify_behaviors(log, config)
    assert all(b.behavior_id is not BehaviorId.RESOURCE_MAPPING_HISTORY for b in behaviors)


def test_every_parameter_at_max_gives_five_certain_behaviors():
    config = default_cognitive_config()
    log = ParameterLog()
    for pid in ParameterId:
        log.add(sample(pid, 1.0))
    behaviors = identify_behaviors(log, config)
    assert len(behaviors) == 5
    for behavior in behaviors:
        assert behavior.probability == pytest.approx(1.0)
        assert behavior.level == BEHAVIOR_LEVELS[behavior.behavior_id][2]


def test_empty_log_gives_empty_behavior_set():
    assert identify_behaviors(ParameterLog(), default_cognitive_config()) == []


def test_quantization_boundaries():
    config = default_cognitive_config()
    for ratio, level in ((0.0, "low"), (0.33, "low"), (1 / 3, "medium"), (0.66, "medium"), (2 / 3, "high")):
        log = ParameterLog()
        log.add(sample(ParameterId.VELOCITY, ratio))
        (behavior,) = identify_behaviors(log, config)
        assert behavior.level == level


# ---------------------------------------------------------------------------
# Observations


def certain(behavior_id, level, probability=1.0):
    return Behavior(
        behavior_id=behavior_id,
        level=level,
        probability=probability,
        contributing_parameters=frozenset({ParameterId.VELOCITY}),
    )


def identity_config():
    """Likelihood in which each behavior level supports exactly one observation."""
    config = default_cognitive_config()
    from caosr.bob import LEVEL_AFFINITY

    for ob in ObservationId:
        row = {key: 0.0 for key in config.likelihood_bo[ob]}
        supporters = [key for key, target in LEVEL_AFFINITY.items() if target is ob]
        for key in supporters:
            row[key] = 1.0 / len(supporters)
        config.likelihood_bo[ob] = row
    return config


def test_identity_table_puts_all_mass_on_mapped_observation():
    config = identity_config()
    behaviors = [certain(BehaviorId.VELOCITY_LEVEL, "high")]
    assert observation_posterior(behaviors, ObservationId.HIGHLY_DYNAMIC, config) == pytest.approx(1.0)
    assert observation_posterior(behaviors, ObservationId.STATIC, config) == 0.0
    assert observation_posterior(behaviors, ObservationId.DYNAMIC, config) == 0.0


def test_symmetric_evidence_splits_posterior():
    config = default_cognitive_config()
    behaviors = [
        certain(BehaviorId.VELOCITY_LEVEL, "low"),
        certain(BehaviorId.VELOCITY_LEVEL, "high"),
    ]
    static = observation_posterior(behaviors, ObservationId.STATIC, config)
    highly = observation_posterior(behaviors, ObservationId.HIGHLY_DYNAMIC, config)
    assert static == pytest.approx(highly)


def test_unsupported_evidence_raises():
    config = identity_config()
    behaviors = [certain(BehaviorId.VELOCITY_LEVEL, "high", probability=0.0)]
    with pytest.raises(UnsupportedEvidence):
        observation_posterior(behaviors, ObservationId.STATIC, config)


def test_family_posteriors_sum_to_one():
    rng = random.Random(3)
    config = default_cognitive_config()
    for _ in range(200):
        behaviors = [
            certain(b, rng.choice(BEHAVIOR_LEVELS[b]), probability=rng.random() + 1e-6)
            for b in rng.sample(list(BehaviorId), k=rng.randint(1, 5))
        ]
        mobility = sum(
            observation_posterior(behaviors, ob, config)
            for ob in (ObservationId.STATIC, ObservationId.DYNAMIC, ObservationId.HIGHLY_DYNAMIC)
        )
        profile = sum(
            observation_posterior(behaviors, ob, config)
            for ob in (ObservationId.HIGH_PROFILE, ObservationId.MEDIUM_PROFILE, ObservationId.LOW_PROFILE)
        )
        assert abs(mobility - 1.0) < 1e-9
        assert abs(profile - 1.0) < 1e-9


# ---------------------------------------------------------------------------
# Observation summaries


def obs(observation_id, posterior=0.8):
    return Observation(observation_id=observation_id, posterior=posterior)


def test_strict_majority_wins():
    history = [obs(ObservationId.DYNAMIC), obs(ObservationId.DYNAMIC), obs(ObservationId.STATIC)]
    (winner,) = summarize_observations(history)
    assert winner.observation_id is ObservationId.DYNAMIC
    assert winner.support_count == 2


def test_tie_breaks_by_enumeration_order():
    history = [obs(ObservationId.STATIC), obs(ObservationId.DYNAMIC)]
    (winner,) = summarize_observations(history)
    assert winner.observation_id is ObservationId.STATIC


def test_one_winner_per_family():
    history = [
        obs(ObservationId.DYNAMIC),
        obs(ObservationId.DYNAMIC),
        obs(ObservationId.HIGH_PROFILE),
        obs(ObservationId.LOW_PROFILE),
        obs(ObservationId.HIGH_PROFILE),
    ]
    winners = summarize_observations(history)
    assert len(winners) == 2
    ids = {w.observation_id for w in winners}
    assert ids == {ObservationId.DYNAMIC, ObservationId.HIGH_PROFILE}


def test_empty_history_summarizes_to_nothing():
    assert summarize_observations([]) == []


# ---------------------------------------------------------------------------
# Beliefs


def test_static_high_profile_yields_patron():
    config = default_cognitive_config()
    belief = generate_belief([obs(ObservationId.STATIC), obs(ObservationId.HIGH_PROFILE)], config)
    assert belief.belief_id is BeliefId.PATRON


def test_uniform_tables_tie_resolves_to_patron():
    config = default_cognitive_config()
    for belief_id in BeliefId:
        config.likelihood_ob[belief_id] = {ob: 1 / 3 for ob in ObservationId}
    belief = generate_belief([obs(ObservationId.DYNAMIC)], config)
    assert belief.belief_id is BeliefId.PATRON
    assert belief.posterior == pytest.approx(0.25)


def test_belief_posteriors_sum_to_one_on_random_tables():
    rng = random.Random(4)
    for _ in range(200):
        config = default_cognitive_config()
        for belief_id in BeliefId:
            mobility = [rng.random() + 1e-9 for _ in range(3)]
            profile = [rng.random() + 1e-9 for _ in range(3)]
            ms, ps = sum(mobility), sum(profile)
            row = dict(
                zip(
                    ObservationId,
                    [m / ms for m in mobility] + [p / ps for p in profile],
                )
            )
            config.likelihood_ob[belief_id] = row
        observations = [obs(ObservationId.DYNAMIC), obs(ObservationId.LOW_PROFILE)]
        scores = []
        for belief_id in BeliefId:
            score = config.belief_priors[belief_id]
            for o in observations:
                score *= config.likelihood_ob[belief_id][o.observation_id]
            scores.append(score)
        belief = generate_belief(observations, config)
        assert abs(belief.posterior - max(scores) / sum(scores)) < 1e-12


def test_argmax_is_scale_invariant():
    rng = random.Random(5)
    config = default_cognitive_config()
    observations = [obs(ObservationId.HIGHLY_DYNAMIC), obs(ObservationId.LOW_PROFILE)]
    baseline = generate_belief(observations, config)
    for _ in range(50):
        scale = rng.uniform(0.01, 100.0)
        scaled = default_cognitive_config()
        scaled.belief_priors = {b: p * scale for b, p in scaled.belief_priors.items()}
        # Scaled priors no longer sum to one, but the argmax must not move.
        assert generate_belief(observations, scaled).belief_id is baseline.belief_id


def test_vagrant_from_highly_dynamic_low_profile():
    config = default_cognitive_config()
    belief = generate_belief([obs(ObservationId.HIGHLY_DYNAMIC), obs(ObservationId.LOW_PROFILE)], config)
    assert belief.belief_id is BeliefId.VAGRANT


def test_generate_belief_rejects_empty_observations():
    with pytest.raises(UnsupportedEvidence):
        generate_belief([], default_cognitive_config())


# ---------------------------------------------------------------------------
# Belief record


def make_belief(belief_id, posterior=0.8, at=0):
    return Belief(belief_id=belief_id, posterior=posterior, generated_at=at)


def test_record_matches_host_and_neighbor_layout():
    record = BeliefRecord()
    update_belief_record(record, HOST_ID, make_belief(BeliefId.SLACK), now=10)
    update_belief_record(record, 2, make_belief(BeliefId.CASUAL), now=11)
    update_belief_record(record, 6, make_belief(BeliefId.PATRON), now=12)
    update_belief_record(record, 3, make_belief(BeliefId.CASUAL), now=13)
    assert record.self_entry[0].belief_id is BeliefId.SLACK
    assert record.entries[2][0].belief_id is BeliefId.CASUAL
    assert record.entries[6][0].belief_id is BeliefId.PATRON
    assert record.entries[3][0].belief_id is BeliefId.CASUAL
    assert record.size() == 4


def test_overwrite_keeps_single_entry():
    record = BeliefRecord()
    update_belief_record(record, 2, make_belief(BeliefId.CASUAL), now=1)
    update_belief_record(record, 2, make_belief(BeliefId.PATRON), now=2)
    assert len(record.entries) == 1
    assert record.entries[2][0].belief_id is BeliefId.PATRON


def test_refresh_purges_stale_neighbors_keeps_self():
    record = BeliefRecord(refresh_period=100)
    update_belief_record(record, HOST_ID, make_belief(BeliefId.SLACK), now=0)
    update_belief_record(record, 2, make_belief(BeliefId.CASUAL), now=0)
    update_belief_record(record, 3, make_belief(BeliefId.PATRON), now=150)
    record.refresh(now=200)
    assert 2 not in record.entries
    assert 3 in record.entries
    assert record.self_entry is not None


# ---------------------------------------------------------------------------
# Determinism and pipeline glue


def test_identical_inputs_identical_outputs():
    config = default_cognitive_config()
    log = ParameterLog()
    for i, pid in enumerate(ParameterId):
        log.add(sample(pid, 0.1 * (i + 1), at=i))
    first = identify_behaviors(log, config)
    second = identify_behaviors(log, config)
    assert first == second
    winners_a = tick_observation_winners(first, config)
    winners_b = tick_observation_winners(second, config)
    assert winners_a == winners_b


def test_formulate_belief_filters_unfavorable_observations():
    config = default_cognitive_config()
    history = [obs(ObservationId.STATIC, posterior=0.4), obs(ObservationId.HIGH_PROFILE, posterior=0.9)]
    belief = formulate_belief(history, config)
    # The weak mobility winner is filtered; the belief follows the profile alone.
    assert belief.belief_id is BeliefId.PATRON
    assert favorable_observations(summarize_observations(history), config)[0].observation_id is ObservationId.HIGH_PROFILE


def test_formulate_belief_with_no_favorable_evidence_raises():
    config = default_cognitive_config()
    history = [obs(ObservationId.STATIC, posterior=0.3)]
    with pytest.raises(UnsupportedEvidence):
        formulate_belief(history, config)

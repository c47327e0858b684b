"""Randomized equivalence between the pipeline's Bayes stages and the oracle."""

import random

from caosr.bob import (
    BEHAVIOR_LEVELS,
    Behavior,
    BehaviorId,
    BeliefId,
    Observation,
    ObservationId,
    ParameterId,
    FAMILIES,
    default_cognitive_config,
    generate_belief,
    observation_posterior,
)

from oracle import oracle_argmax, oracle_belief_posteriors, oracle_observation_posteriors


def random_config(rng):
    config = default_cognitive_config()
    for behavior in BehaviorId:
        raw = [rng.random() + 1e-9 for _ in BEHAVIOR_LEVELS[behavior]]
        total = sum(raw)
        config.behavior_priors[behavior] = dict(
            zip(BEHAVIOR_LEVELS[behavior], [v / total for v in raw])
        )
    keys = [(b, level) for b in BehaviorId for level in BEHAVIOR_LEVELS[b]]
    for ob in ObservationId:
        raw = [rng.random() + 1e-9 for _ in keys]
        total = sum(raw)
        config.likelihood_bo[ob] = dict(zip(keys, [v / total for v in raw]))
    for belief in BeliefId:
        mobility = [rng.random() + 1e-9 for _ in range(3)]
        profile = [rng.random() + 1e-9 for _ in range(3)]
        ms, ps = sum(mobility), sum(profile)
        config.likelihood_ob[belief] = dict(
            zip(ObservationId, [m / ms for m in mobility] + [p / ps for p in profile])
        )
    raw = [rng.random() + 1e-9 for _ in BeliefId]
    total = sum(raw)
    config.belief_priors = dict(zip(BeliefId, [v / total for v in raw]))
    config.validate()
    return config


def random_evidence(rng, max_behaviors=4):
    count = rng.randint(1, max_behaviors)
    behaviors = []
    seen = set()
    while len(behaviors) < count:
        behavior_id = rng.choice(list(BehaviorId))
        level = rng.choice(BEHAVIOR_LEVELS[behavior_id])
        if (behavior_id, level) in seen:
            continue
        seen.add((behavior_id, level))
        behaviors.append(
            Behavior(
                behavior_id=behavior_id,
                level=level,
                probability=rng.random() * 0.999 + 1e-6,
                contributing_parameters=frozenset({ParameterId.VELOCITY}),
            )
        )
    return behaviors


def check_observation_case(rng, config):
    behaviors = random_evidence(rng)
    family_name = rng.choice(list(FAMILIES))
    family = list(FAMILIES[family_name])
    evidence = [((b.behavior_id, b.level), b.probability) for b in behaviors]
    priors = {
        (b, level): config.behavior_priors[b][level]
        for b in BehaviorId
        for level in BEHAVIOR_LEVELS[b]
    }
    expected = oracle_observation_posteriors(evidence, priors, config.likelihood_bo, family)
    for ob in family:
        got = observation_posterior(behaviors, ob, config)
        assert abs(got - expected[ob]) < 1e-12


def check_belief_case(rng, config):
    families = rng.choice((["mobility"], ["profile"], ["mobility", "profile"]))
    observations = [
        Observation(observation_id=rng.choice(FAMILIES[name]), posterior=rng.random())
        for name in families
    ]
    expected = oracle_belief_posteriors(
        [o.observation_id for o in observations],
        config.belief_priors,
        config.likelihood_ob,
        list(BeliefId),
    )
    belief = generate_belief(observations, config)
    winner = oracle_argmax(expected, list(BeliefId))
    assert belief.belief_id is winner
    assert abs(belief.posterior - expected[winner]) < 1e-12


def test_oracle_equivalence_randomized():
    rng = random.Random(20240817)
    for _ in range(300):
        config = random_config(rng)
        check_observation_case(rng, config)
        check_belief_case(rng, config)


def test_three_table_hand_case_matches_oracle():
    rng = random.Random(99)
    config = random_config(rng)
    behaviors = [
        Behavior(BehaviorId.VELOCITY_LEVEL, "low", 0.7, frozenset({ParameterId.VELOCITY})),
        Behavior(BehaviorId.NODE_AVAILABILITY, "dense", 0.5, frozenset({ParameterId.CONTACT_PERIOD})),
        Behavior(BehaviorId.LOCATION_TRACING, "random", 0.2, frozenset({ParameterId.MOBILITY_PATTERN})),
    ]
    evidence = [((b.behavior_id, b.level), b.probability) for b in behaviors]
    priors = {
        (b, level): config.behavior_priors[b][level]
        for b in BehaviorId
        for level in BEHAVIOR_LEVELS[b]
    }
    family = list(FAMILIES["mobility"])
    expected = oracle_observation_posteriors(evidence, priors, config.likelihood_bo, family)
    for ob in family:
        assert abs(observation_posterior(behaviors, ob, config) - expected[ob]) < 1e-12

"""Independent brute-force reference for the two Bayes stages.

Deliberately written as straight-line enumeration over plain dicts, sharing
no code with the library implementation, so the two can be checked against
each other.
"""


def oracle_observation_posteriors(evidence, priors, likelihood_rows, family):
    """Posterior over one observation family by direct enumeration.

    evidence: list of (key, weight) pairs, where key identifies a behavior
    level; priors: key -> prior; likelihood_rows: observation -> key ->
    conditional; family: list of observations.
    """
    scores = {}
    for observation in family:
        total = 0.0
        for key, weight in evidence:
            total = total + priors[key] * likelihood_rows[observation][key] * weight
        scores[observation] = total
    normalizer = 0.0
    for observation in family:
        normalizer = normalizer + scores[observation]
    posteriors = {}
    for observation in family:
        posteriors[observation] = scores[observation] / normalizer
    return posteriors


def oracle_belief_posteriors(observations, belief_priors, likelihood_rows, beliefs):
    """Posterior over belief classes by direct product enumeration."""
    scores = {}
    for belief in beliefs:
        score = belief_priors[belief]
        for observation in observations:
            score = score * likelihood_rows[belief][observation]
        scores[belief] = score
    normalizer = 0.0
    for belief in beliefs:
        normalizer = normalizer + scores[belief]
    posteriors = {}
    for belief in beliefs:
        posteriors[belief] = scores[belief] / normalizer
    return posteriors


def oracle_argmax(posteriors, order):
    """First maximum in the given order."""
    best = None
    best_value = None
    for key in order:
        value = posteriors[key]
        if best_value is None or value > best_value:
            best = key
            best_value = value
    return best

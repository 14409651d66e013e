"""Tests for the row-norm, Bayesian and likelihood-ratio validators."""

import math

import numpy as np
import pytest

from loopsampler.errors import DomainError
from loopsampler.linalg import UnitaryMatrix, haar_random_unitary, identity
from loopsampler.sampling import (
    Distribution,
    EventLog,
    SamplingInstance,
    draw_events,
    output_distribution,
    uniform_distribution,
)
from loopsampler.validators import (
    BayesValidator,
    HypothesisPair,
    LikelihoodRatioValidator,
    RowNormValidator,
    Verdict,
    aa_counter,
    bayes_confidence,
    gaussian_distribution,
    get_router,
    lr_counter,
    make_alternative,
    row_norm_statistic,
)
from loopsampler.validators.power import (
    StepProbabilities,
    exact_sign_probabilities,
    final_counter_distribution,
    probability_negative,
    probability_positive,
)

INPUTS = (1, 1, 1, 0, 0, 0)


def _haar_instances(limit=100):
    for seed in range(limit):
        yield SamplingInstance(haar_random_unitary(6, seed=seed), INPUTS)


def _assert_binomial(count, trials, p):
    sd = math.sqrt(trials * p * (1 - p))
    assert abs(count - trials * p) <= 4 * sd + 1, (count, trials * p)


def _three_point(*probs):
    return Distribution(((1, 0, 0), (0, 1, 0), (0, 0, 1)), list(probs), "test")


# ---------------- Row-norm test -----------------
def test_row_norm_full_unitary_is_one():
    u = haar_random_unitary(3, seed=2)
    assert row_norm_statistic(u, (1, 1, 1), (1, 1, 1)) == pytest.approx(1.0, abs=1e-12)


def test_row_norm_flat_matrix_is_one():
    dft = np.exp(2j * np.pi * np.outer(range(4), range(4)) / 4) / 2
    assert row_norm_statistic(UnitaryMatrix(dft), (1, 1, 0, 0), (0, 1, 0, 1)) == pytest.approx(1.0)


def test_aa_counter_trivial_trajectories():
    assert len(aa_counter(identity(2), (1, 0), [])) == 0
    trajectory = aa_counter(identity(2), (1, 0), [(1, 0)] * 3)
    assert trajectory.values.tolist() == [1.0, 2.0, 3.0]
    assert trajectory.final == 3.0


def test_aa_counter_steps_are_unit(haar_instance):
    events = draw_events(output_distribution(haar_instance, "ind"), 40, seed=1)
    steps = np.diff(np.concatenate([[0.0], aa_counter(haar_instance.unitary, haar_instance.inputs, events).values]))
    assert set(np.abs(steps)) == {1.0}


def test_boson_events_have_larger_mean_row_norm():
    uniform = uniform_distribution(6, 3)
    gaps = []
    for inst in _haar_instances(10):
        r = np.array([row_norm_statistic(inst.unitary, inst.inputs, c) for c in uniform.configurations])
        boson = output_distribution(inst, "ind")
        gaps.append(float(np.dot(boson.probabilities, r) - np.dot(uniform.probabilities, r)))
    assert np.mean(gaps) > 0
    assert sum(g > 0 for g in gaps) >= 6


def _exact_power(validator, main, alternative, events):
    p_win = probability_positive(exact_sign_probabilities(validator, main), events)
    p_reject = probability_negative(exact_sign_probabilities(validator, alternative), events)
    return p_win, p_reject


def test_row_norm_power_over_haar_pool():
    # the fixed R = 1 threshold reaches 90% on both sides only for a minority of instances
    uniform = uniform_distribution(6, 3)
    powers = np.array([
        _exact_power(RowNormValidator(inst.unitary, inst.inputs), output_distribution(inst, "ind"), uniform, 50)
        for inst in _haar_instances()
    ])
    both = int(np.sum((powers[:, 0] >= 0.9) & (powers[:, 1] >= 0.9)))
    assert 18 <= both <= 40
    assert 0.84 <= np.median(powers[:, 1]) <= 0.9
    assert np.mean(powers[:, 0]) >= 0.84
    assert np.mean(powers[:, 1]) <= 0.86


def test_row_norm_monte_carlo_matches_exact_power():
    inst = SamplingInstance(haar_random_unitary(6, seed=0), INPUTS)
    validator = RowNormValidator(inst.unitary, inst.inputs)
    boson = output_distribution(inst, "ind")
    uniform = uniform_distribution(6, 3)
    p_win, p_reject = _exact_power(validator, boson, uniform, 50)
    wins = sum(validator.run(draw_events(boson, 50, seed=s)).final > 0 for s in range(100))
    rejects = sum(validator.run(draw_events(uniform, 50, seed=1000 + s)).final < 0 for s in range(100))
    _assert_binomial(wins, 100, p_win)
    _assert_binomial(rejects, 100, p_reject)


# ---------------- Bayesian test -----------------
def test_bayes_arithmetic():
    pair = HypothesisPair(_three_point(0.2, 0.8, 0.0), _three_point(0.1, 0.9, 0.0))
    trajectory = bayes_confidence([(1, 0, 0)] * 5, pair)
    assert trajectory.final == pytest.approx(32 / 33, abs=1e-12)
    assert trajectory.values[0] == pytest.approx(2 / 3, abs=1e-12)


def test_bayes_equal_hypotheses_stay_at_half():
    p = _three_point(0.2, 0.3, 0.5)
    trajectory = bayes_confidence([(0, 1, 0), (0, 0, 1), (1, 0, 0)], HypothesisPair(p, p))
    assert np.allclose(trajectory.values, 0.5)


def test_bayes_saturates_when_alternative_vanishes():
    pair = HypothesisPair(_three_point(0.5, 0.5, 0.0), _three_point(1.0, 0.0, 0.0))
    trajectory = bayes_confidence([(0, 1, 0), (1, 0, 0)], pair)
    assert trajectory.values.tolist() == [1.0, 1.0]
    assert BayesValidator(pair).verdict(trajectory).passed


def test_bayes_rejects_event_impossible_under_both():
    p = _three_point(0.5, 0.5, 0.0)
    with pytest.raises(DomainError):
        bayes_confidence([(0, 0, 1)], HypothesisPair(p, p))


def test_hypotheses_must_share_support():
    with pytest.raises(DomainError):
        HypothesisPair(_three_point(1, 0, 0), uniform_distribution(2, 1))


def test_bayes_step_against_uniform_is_log_scaled_probability(haar_instance):
    boson = output_distribution(haar_instance, "ind")
    uniform = uniform_distribution(6, 3)
    validator = BayesValidator(HypothesisPair(boson, uniform))
    for config, p in list(boson.as_dict().items())[:10]:
        assert validator.step(config) == pytest.approx(math.log(p * 56), abs=1e-12)


def test_bayes_is_invariant_under_reordering(haar_instance):
    boson = output_distribution(haar_instance, "ind")
    pair = HypothesisPair(boson, uniform_distribution(6, 3))
    events = draw_events(boson, 30, seed=4)
    forward = bayes_confidence(events, pair).final
    backward = bayes_confidence(EventLog(events.events[::-1]), pair).final
    assert forward == pytest.approx(backward, abs=1e-12)


def test_bayes_reaches_confidence_within_thirty_events():
    uniform = uniform_distribution(6, 3)
    for inst in _haar_instances():
        boson = output_distribution(inst, "ind")
        kl = float(np.sum(boson.probabilities * np.log(boson.probabilities * len(boson))))
        if kl >= 0.3:
            break
    pair = HypothesisPair(boson, uniform)
    peaks = [bayes_confidence(draw_events(boson, 30, seed=s), pair).values.max() for s in range(101)]
    assert np.median(peaks) >= 0.99


def test_bayes_null_median_stays_below_half(haar_instance):
    boson = output_distribution(haar_instance, "ind")
    uniform = uniform_distribution(6, 3)
    pair = HypothesisPair(boson, uniform)
    finals = [bayes_confidence(draw_events(uniform, 30, seed=s), pair).final for s in range(100)]
    assert np.median(finals) <= 0.5


# ---------------- Likelihood-ratio test -----------------
def test_lr_equal_hypotheses_flat(haar_instance):
    boson = output_distribution(haar_instance, "ind")
    trajectory = lr_counter(draw_events(boson, 20, seed=0), boson, boson)
    assert np.array_equal(trajectory.values, np.zeros(20))


def test_lr_strictly_increasing_on_hom(hom_instance):
    ind = output_distribution(hom_instance, "ind")
    dist = output_distribution(hom_instance, "dist")
    trajectory = lr_counter(draw_events(ind, 25, seed=2), ind, dist)
    assert trajectory.values.tolist() == [float(k) for k in range(1, 26)]


def test_lr_power_over_haar_pool():
    both = 0
    for inst in _haar_instances():
        ind = output_distribution(inst, "ind")
        dist = output_distribution(inst, "dist")
        p_win, p_reject = _exact_power(LikelihoodRatioValidator(ind, dist), ind, dist, 200)
        both += p_win >= 0.9 and p_reject >= 0.9
    assert both >= 90


def test_lr_monte_carlo_matches_exact_power():
    inst = SamplingInstance(haar_random_unitary(6, seed=0), INPUTS)
    ind = output_distribution(inst, "ind")
    dist = output_distribution(inst, "dist")
    validator = LikelihoodRatioValidator(ind, dist)
    p_win, p_reject = _exact_power(validator, ind, dist, 200)
    wins = sum(validator.run(draw_events(ind, 200, seed=s)).final > 0 for s in range(100))
    rejects = sum(validator.run(draw_events(dist, 200, seed=500 + s)).final < 0 for s in range(100))
    _assert_binomial(wins, 100, p_win)
    _assert_binomial(rejects, 100, p_reject)


# ---------------- Alternatives -----------------
def test_make_alternative(hom_instance):
    flat = make_alternative("uniform", SamplingInstance(identity(2), (1, 0)))
    assert flat.probabilities.tolist() == [0.5, 0.5]
    dist = make_alternative("distinguishable", hom_instance)
    assert np.allclose(dist.probabilities, [0.25, 0.5, 0.25])
    with pytest.raises(DomainError):
        make_alternative("poisson", hom_instance)


def test_gaussian_alternative_is_unimodal():
    g = gaussian_distribution(6, 3)
    assert len(g) == 56
    assert g.probabilities.sum() == pytest.approx(1.0)
    assert np.all(np.diff(g.probabilities[:28]) > 0)
    assert np.all(np.diff(g.probabilities[28:]) < 0)
    with pytest.raises(DomainError):
        gaussian_distribution(6, 3, width=0)


# ---------------- Exact power -----------------
def test_final_counter_distribution():
    dist = final_counter_distribution(StepProbabilities(0.5, 0.0, 0.5), 2)
    assert dist.tolist() == [0.25, 0.0, 0.5, 0.0, 0.25]
    steps = StepProbabilities(1.0, 0.0, 0.0)
    assert probability_positive(steps, 3) == 1.0
    assert probability_positive(steps, 0) == 0.0
    assert probability_negative(steps, 0) == 0.0


# ---------------- Verdicts and routing -----------------
def test_verdict_formatting():
    assert str(Verdict("aa", 38.0, 50, True)) == "PASS test=aa final=+38 events=50"
    assert str(Verdict("lr", -4.0, 10, False)) == "FAIL test=lr final=-4 events=10"
    assert str(Verdict("bayes", 0.5, 3, False)) == "FAIL test=bayes final=0.5000 events=3"
    assert str(Verdict("aa", None, 0, False)) == "FAIL test=aa final=none events=0"


def test_router_parses_identifiers():
    router = get_router()
    assert router.parse_test_identifier("bayes:gaussian") == ("bayes", "gaussian")
    assert router.parse_test_identifier("lr") == ("lr", "distinguishable")
    assert router.parse_test_identifier("AA") == ("aa", "uniform")
    with pytest.raises(DomainError):
        router.parse_test_identifier("aa:gaussian")
    with pytest.raises(DomainError, match=r"available: aa \(vs uniform\), bayes \(vs uniform\), lr \(vs distinguishable\)"):
        router.parse_test_identifier("chi2")
    with pytest.raises(DomainError):
        router.parse_test_identifier("bayes:poisson")
    assert router.list_validators()["count"] == 3


def test_router_builds_matching_validators(haar_instance):
    router = get_router()
    assert isinstance(router.build("aa", haar_instance), RowNormValidator)
    assert isinstance(router.build("bayes:distinguishable", haar_instance), BayesValidator)
    lr = router.build("lr", haar_instance)
    assert isinstance(lr, LikelihoodRatioValidator)
    assert lr.get_validator_info()["validator_type"] == "LikelihoodRatioValidator"


def test_router_validate_on_hom(hom_instance):
    ind = output_distribution(hom_instance, "ind")
    events = draw_events(ind, 10, seed=1)
    trajectory, verdict = get_router().validate("lr", hom_instance, events)
    assert verdict.passed
    assert str(verdict) == "PASS test=lr final=+10 events=10"
    assert trajectory.final == 10.0

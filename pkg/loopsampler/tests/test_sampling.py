"""Tests for photon-model probabilities, distributions and event draws."""

import itertools
import math
from collections import defaultdict

import numpy as np
import pytest

from loopsampler.compiler import compile_network, effective_unitary, example_schedule, injection_configuration
from loopsampler.errors import DomainError, RefusalError
from loopsampler.linalg import haar_random_unitary, identity
from loopsampler.sampling import (
    Distribution,
    EventLog,
    SamplingInstance,
    as_gram,
    collision_probability,
    draw_events,
    empirical_distribution,
    enumerate_output_configurations,
    fidelity,
    gram_from_separations,
    is_collision,
    observed_support,
    output_distribution,
    probability_distinguishable,
    probability_indistinguishable,
    probability_partial,
    resolve_model,
    total_variation,
    uniform_distribution,
)


def _first_quantization_oracle(u, inputs):
    """Symmetrized n-photon amplitudes summed over every ordered output tuple."""
    m = len(inputs)
    sources = [j for j, k in enumerate(inputs) for _ in range(k)]
    n = len(sources)
    probs = defaultdict(float)
    for outs in itertools.product(range(m), repeat=n):
        amp = sum(
            math.prod(u[outs[k], sources[perm[k]]] for k in range(n))
            for perm in itertools.permutations(range(n))
        ) / math.sqrt(math.factorial(n))
        probs[tuple(outs.count(j) for j in range(m))] += abs(amp) ** 2
    return probs


def _classical_routing_oracle(u, inputs):
    """Each photon routed on its own with probabilities |U|^2."""
    m = len(inputs)
    sources = [j for j, k in enumerate(inputs) for _ in range(k)]
    probs = defaultdict(float)
    for outs in itertools.product(range(m), repeat=len(sources)):
        weight = math.prod(abs(u[o, s]) ** 2 for o, s in zip(outs, sources))
        probs[tuple(outs.count(j) for j in range(m))] += weight
    return probs


def _two_point(p_first):
    return Distribution(((1, 0), (0, 1)), [p_first, 1.0 - p_first], "test")


def test_enumeration_counts_and_order():
    assert enumerate_output_configurations(2, 1) == [(1, 0), (0, 1)]
    assert enumerate_output_configurations(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert len(enumerate_output_configurations(6, 3)) == 56
    assert len(enumerate_output_configurations(8, 4)) == 330
    assert enumerate_output_configurations(3, 0) == [(0, 0, 0)]


def test_model_aliases():
    assert resolve_model("ind") == "indistinguishable"
    assert resolve_model("dist") == "distinguishable"
    with pytest.raises(DomainError):
        resolve_model("semi")


def test_instance_validation(beam_splitter):
    with pytest.raises(DomainError):
        SamplingInstance(beam_splitter, (0, 0))
    with pytest.raises(DomainError):
        SamplingInstance(beam_splitter, (1, 1), transmission=0.0)
    with pytest.raises(DomainError):
        SamplingInstance(beam_splitter, (1, 1, 0))


def test_hong_ou_mandel_exact(hom_instance):
    assert abs(probability_indistinguishable(hom_instance, (1, 1))) <= 1e-12
    assert abs(probability_indistinguishable(hom_instance, (2, 0)) - 0.5) <= 1e-12
    assert abs(probability_indistinguishable(hom_instance, (0, 2)) - 0.5) <= 1e-12
    assert abs(probability_distinguishable(hom_instance, (1, 1)) - 0.5) <= 1e-12
    assert abs(probability_distinguishable(hom_instance, (2, 0)) - 0.25) <= 1e-12


def test_hom_distribution(hom_instance):
    dist = output_distribution(hom_instance, "indistinguishable")
    assert dist.configurations == ((2, 0), (1, 1), (0, 2))
    assert np.allclose(dist.probabilities, [0.5, 0.0, 0.5], atol=1e-12)
    assert collision_probability(dist) == pytest.approx(1.0)


def test_identity_gives_point_mass():
    dist = output_distribution(SamplingInstance(identity(3), (1, 1, 0)), "ind")
    assert dist.probability_of((1, 1, 0)) == pytest.approx(1.0)
    assert sum(dist.probabilities) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "n, m",
    [(2, 4), (3, 6), pytest.param(4, 8, marks=pytest.mark.slow)],
)
def test_indistinguishable_matches_first_quantization(n, m):
    inputs = tuple([1] * n + [0] * (m - n))
    for seed in range(20):
        u = haar_random_unitary(m, seed=seed)
        dist = output_distribution(SamplingInstance(u, inputs), "indistinguishable")
        oracle = _first_quantization_oracle(u.matrix, inputs)
        assert abs(dist.probabilities.sum() - 1.0) <= 1e-9
        for config, p in dist.as_dict().items():
            assert abs(p - oracle[config]) <= 1e-9


def test_indistinguishable_with_repeated_input_mode():
    u = haar_random_unitary(3, seed=5)
    inputs = (2, 1, 0)
    dist = output_distribution(SamplingInstance(u, inputs), "indistinguishable")
    # ordered-tuple oracle over-counts the doubly occupied source by 2!
    oracle = _first_quantization_oracle(u.matrix, inputs)
    for config, p in dist.as_dict().items():
        assert abs(p - oracle[config] / 2) <= 1e-9


def test_partial_limits_with_repeated_input_mode():
    instance = SamplingInstance(haar_random_unitary(3, seed=5), (2, 1, 0))
    ind = output_distribution(instance, "indistinguishable")
    dist = output_distribution(instance, "distinguishable")
    same = output_distribution(instance, "partial", np.ones((3, 3)))
    orthogonal = output_distribution(instance, "partial", np.eye(3))
    assert np.allclose(same.probabilities, ind.probabilities, atol=1e-12)
    assert np.allclose(orthogonal.probabilities, dist.probabilities, atol=1e-12)


def test_partial_with_repeated_input_mode_is_normalized():
    instance = SamplingInstance(haar_random_unitary(3, seed=5), (2, 1, 0))
    gram = np.array([[1.0, 0.6, 0.3], [0.6, 1.0, 0.5], [0.3, 0.5, 1.0]])
    partial = output_distribution(instance, "partial", gram)
    assert partial.probabilities.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.all(partial.probabilities >= 0.0)

def test_distinguishable_matches_classical_routing(haar_instance):
    dist = output_distribution(haar_instance, "distinguishable")
    oracle = _classical_routing_oracle(haar_instance.unitary.matrix, haar_instance.inputs)
    assert abs(dist.probabilities.sum() - 1.0) <= 1e-9
    for config, p in dist.as_dict().items():
        assert abs(p - oracle[config]) <= 1e-12


def test_partial_limits_reproduce_pure_models():
    u = haar_random_unitary(6, seed=21)
    for n in (2, 3, 4):
        inst = SamplingInstance(u, tuple([1] * n + [0] * (6 - n)))
        ind = output_distribution(inst, "indistinguishable")
        dis = output_distribution(inst, "distinguishable")
        ones = output_distribution(inst, "partial", np.ones((n, n)))
        eye = output_distribution(inst, "partial", np.eye(n))
        assert np.max(np.abs(ones.probabilities - ind.probabilities)) <= 1e-10
        assert np.max(np.abs(eye.probabilities - dis.probabilities)) <= 1e-10


def test_partial_two_photon_visibility(hom_instance):
    x = 0.978
    p = probability_partial(hom_instance, (1, 1), [[1, x], [x, 1]])
    assert p == pytest.approx((1 - x**2) / 2, abs=1e-12)
    assert p == pytest.approx(0.02176, abs=1e-5)


def test_partial_requires_gram_and_refuses_large_n(hom_instance):
    with pytest.raises(DomainError):
        output_distribution(hom_instance, "partial")
    big = SamplingInstance(identity(7), (1,) * 7)
    with pytest.raises(RefusalError):
        probability_partial(big, (1,) * 7, np.eye(7))


def test_gram_validation():
    with pytest.raises(DomainError):
        as_gram([[1, 0.9, 0.9], [0.9, 1, -0.9], [0.9, -0.9, 1]], 3)
    with pytest.raises(DomainError):
        as_gram([[1, 0.5], [0.4, 1]], 2)
    with pytest.raises(DomainError):
        as_gram([[0.9, 0.5], [0.5, 1]], 2)
    with pytest.raises(DomainError):
        as_gram(np.eye(2), 3)


def test_gram_from_separations():
    g = gram_from_separations([1, 2, 4])
    assert g[0, 1] == pytest.approx(0.978)
    assert g[1, 2] == pytest.approx(0.970)
    assert g[0, 2] == pytest.approx(0.970)
    assert np.array_equal(np.diag(g), np.ones(3))
    assert gram_from_separations([1, 3], {1: 0.5})[0, 1] == pytest.approx(0.5)


def test_uniform_loss_leaves_postselected_distribution_unchanged(haar_instance):
    lossy = SamplingInstance(haar_instance.unitary, haar_instance.inputs, transmission=0.834)
    for model in ("indistinguishable", "distinguishable"):
        ideal = output_distribution(haar_instance, model)
        damped = output_distribution(lossy, model)
        assert np.max(np.abs(ideal.probabilities - damped.probabilities)) <= 1e-12
        assert damped.postselected_weight == pytest.approx(0.834**3)


def test_example_circuit_distribution_normalizes():
    circuit = example_schedule(3, 6, seed=1)
    u = effective_unitary(compile_network(circuit.loop_config, circuit.schedule), circuit.mode_subset)
    inputs = injection_configuration(circuit.loop_config, circuit.mode_subset)
    dist = output_distribution(SamplingInstance(u, inputs), "indistinguishable")
    assert len(dist) == 56
    assert abs(dist.probabilities.sum() - 1.0) <= 1e-9


def test_distribution_validation():
    with pytest.raises(DomainError):
        Distribution(((1, 0), (0, 1)), [0.5, 0.6], "bad")
    with pytest.raises(DomainError):
        Distribution(((1, 0), (0, 1)), [1.5, -0.5], "bad")
    with pytest.raises(DomainError):
        _two_point(0.5).probability_of((2, 0))
    dist = _two_point(0.25)
    assert (0, 1) in dist
    assert dist.index_of((0, 1)) == 1
    with pytest.raises(ValueError):
        dist.probabilities[0] = 1.0


def test_draw_events_from_point_mass():
    dist = _two_point(0.0)
    log = draw_events(dist, 5, seed=1)
    assert log.events == ((0, 1),) * 5
    assert log.seed == 1
    assert len(draw_events(dist, 0, seed=1)) == 0
    with pytest.raises(DomainError):
        draw_events(dist, -1, seed=1)


def test_draw_events_respects_hom_statistics(hom_instance):
    dist = output_distribution(hom_instance, "indistinguishable")
    log = draw_events(dist, 10_000, seed=3)
    assert (1, 1) not in set(log.events)
    freq = sum(1 for e in log if e == (2, 0)) / len(log)
    assert abs(freq - 0.5) <= 4 * math.sqrt(0.25 / 10_000)


def test_draw_events_is_deterministic(haar_instance):
    dist = output_distribution(haar_instance, "indistinguishable")
    assert draw_events(dist, 100, seed=9) == draw_events(dist, 100, seed=9)
    assert draw_events(dist, 100, seed=9) != draw_events(dist, 100, seed=10)


def test_event_log_rejects_mixed_photon_numbers():
    with pytest.raises(DomainError):
        EventLog(((1, 0), (1, 1)))


def test_fidelity_reference_values():
    assert fidelity(_two_point(0.3), _two_point(0.3)) == pytest.approx(1.0)
    assert fidelity(_two_point(1.0), _two_point(0.0)) == 0.0
    assert fidelity(_two_point(0.5), _two_point(1.0)) == pytest.approx(math.sqrt(0.5))
    with pytest.raises(DomainError):
        fidelity(_two_point(0.5), uniform_distribution(3, 1))


def test_total_variation_reference_values():
    assert total_variation(_two_point(0.3), _two_point(0.3)) == 0.0
    assert total_variation(_two_point(1.0), _two_point(0.0)) == pytest.approx(1.0)
    assert total_variation(_two_point(0.5), _two_point(1.0)) == pytest.approx(0.5)


def test_empirical_distribution_and_support():
    events = EventLog(((1, 0), (1, 0), (0, 1), (1, 0)))
    emp = empirical_distribution(events, _two_point(0.5))
    assert np.allclose(emp.probabilities, [0.75, 0.25])
    assert observed_support(events) == 2
    with pytest.raises(DomainError):
        empirical_distribution([], _two_point(0.5))
    with pytest.raises(DomainError):
        empirical_distribution([(2, 0)], _two_point(0.5))


def test_collision_detection():
    assert is_collision((1, 1, 2))
    assert not is_collision((1, 1, 0))
    assert collision_probability(uniform_distribution(2, 2)) == pytest.approx(2 / 3)


def test_full_run_fidelity_concentrates():
    circuit = example_schedule(3, 6, seed=1)
    u = effective_unitary(compile_network(circuit.loop_config, circuit.schedule), circuit.mode_subset)
    inputs = injection_configuration(circuit.loop_config, circuit.mode_subset)
    theory = output_distribution(SamplingInstance(u, inputs), "indistinguishable")
    good = 0
    for seed in range(100):
        events = draw_events(theory, 2015, seed=seed)
        if fidelity(empirical_distribution(events, theory), theory) >= 0.98:
            good += 1
    assert good >= 95

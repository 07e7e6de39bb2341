from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from models.network import Mode, NetworkSpec
from models.schedule import Schedule
from sampler.law import ParticipationLaw, poisson_binomial_pmf
from sampler.realization_sampler import RealizationSampler
from sampler.streams import Streams
from topology.combination import CombinationMoments

RING = NetworkSpec(
    K=3,
    neighborhoods=[[0, 1, 2]] * 3,
    A=[[0.5, 0.25, 0.2], [0.3, 0.5, 0.3], [0.2, 0.25, 0.5]],
    q=[0.4, 0.7, 0.9],
    Q=[[1.0, 0.6, 0.9], [0.7, 1.0, 0.4], [0.5, 0.8, 1.0]],
)


def _brute_moment(q, on, off, power):
    q = np.asarray(q, dtype=float)
    total = 0.0
    for bits in product((0, 1), repeat=q.shape[0]):
        theta = np.array(bits)
        prob = float(np.prod(np.where(theta == 1, q, 1.0 - q)))
        L = theta.sum()
        value = np.prod(theta[list(on)]) * np.prod(1 - theta[list(off)])
        if power > 0:
            value = value / L**power if L > 0 else 0.0
        total += prob * value
    return total


def test_fedsgd_realization_is_deterministic(make_federated):
    spec = make_federated(4, 1.0, Mode.FEDSGD)
    sched = Schedule(T=3, iters=5, mu=0.05)
    real = RealizationSampler.sample_realization(spec, sched, 1, Streams.iteration(0, 0, 1))
    np.testing.assert_array_equal(real.A_combine, np.full((4, 4), 0.25))
    np.testing.assert_array_equal(real.mu_vec, np.full(4, 0.05))
    assert real.active_count == 4


def test_matrix_at_identity_between_combines(two_agent_spec):
    sched = Schedule(T=100, iters=1, mu=0.1)
    real = RealizationSampler.sample_realization(two_agent_spec, sched, 1, Streams.iteration(0, 0, 1))
    np.testing.assert_array_equal(RealizationSampler.matrix_at(real, sched, 1), np.eye(2))
    np.testing.assert_array_equal(RealizationSampler.matrix_at(real, sched, 100), real.A_combine)
    with pytest.raises(IndexError):
        RealizationSampler.matrix_at(real, sched, 0)
    with pytest.raises(IndexError):
        RealizationSampler.matrix_at(real, sched, 101)


@pytest.mark.property
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), i=st.integers(min_value=1, max_value=10**6))
def test_decentralized_realization_invariants(seed, i):
    sched = Schedule(T=2, iters=1, mu=0.3)
    real = RealizationSampler.sample_realization(RING, sched, i, Streams.iteration(seed, 0, i))
    A = real.A_combine
    np.testing.assert_allclose(A.sum(axis=0), np.ones(3), atol=1e-12)
    assert np.all(A >= 0.0)
    np.testing.assert_array_equal(real.mu_vec, 0.3 * real.participants)
    for k in np.flatnonzero(~real.participants):
        np.testing.assert_array_equal(A[:, k], np.eye(3)[:, k])
    for k in np.flatnonzero(real.participants):
        kept = [l for l in RING.others(k) if A[l, k] > 0.0]
        np.testing.assert_array_equal(A[kept, k], RING.A[kept, k])


def test_sampled_neighbours_keep_base_weights():
    # agent 0 always participates and always samples agents 1 and 2, never agent 3
    A = np.array(
        [
            [0.4, 0.5, 0.5, 0.5],
            [0.3, 0.5, 0.0, 0.0],
            [0.2, 0.0, 0.5, 0.0],
            [0.1, 0.0, 0.0, 0.5],
        ]
    )
    Q = np.ones((4, 4))
    Q[3, 0] = 0.0
    spec = NetworkSpec(
        K=4,
        neighborhoods=[[0, 1, 2, 3], [0, 1], [0, 2], [0, 3]],
        A=A,
        q=[1.0, 0.0, 0.0, 0.0],
        Q=Q,
    )
    _, draws = RealizationSampler.draw_batch(spec, np.random.default_rng(0), 50)
    for A_i in draws:
        np.testing.assert_allclose(A_i[:, 0], [0.5, 0.3, 0.2, 0.0], atol=1e-15)
        np.testing.assert_array_equal(A_i[:, 1:], np.eye(4)[:, 1:])


def test_fedavg_realization_averages_participants(make_federated):
    spec = make_federated(5, 0.5, Mode.FEDAVG)
    theta, A = RealizationSampler.draw_batch(spec, Streams.oracle(4), 200)
    for th, A_i in zip(theta, A):
        L = th.sum()
        np.testing.assert_allclose(A_i.sum(axis=0), np.ones(5), atol=1e-12)
        np.testing.assert_allclose(A_i.sum(axis=1), np.ones(5), atol=1e-12)
        if L == 0:
            np.testing.assert_array_equal(A_i, np.eye(5))
            continue
        active = np.flatnonzero(th)
        np.testing.assert_allclose(A_i[np.ix_(active, active)], np.full((L, L), 1.0 / L))
        for k in np.flatnonzero(~th):
            np.testing.assert_array_equal(A_i[:, k], np.eye(5)[:, k])


def test_fedavg_without_participants_is_identity(make_federated):
    spec = make_federated(3, 0.0, Mode.FEDAVG)
    theta, A = RealizationSampler.draw_batch(spec, np.random.default_rng(0), 10)
    assert not theta.any()
    np.testing.assert_array_equal(A, np.broadcast_to(np.eye(3), (10, 3, 3)))


def test_empirical_first_moment_matches_closed_form(two_agent_spec):
    sched = Schedule(T=1, iters=1, mu=0.1)
    mean, err = RealizationSampler.empirical_first_moment(
        two_agent_spec, sched, 10**5, Streams.oracle(0), with_error=True
    )
    exact = CombinationMoments.expected_combination(two_agent_spec)
    assert np.all(np.abs(mean - exact) <= np.maximum(3.0 * err, 5e-3))


def test_empirical_first_moment_needs_draws(two_agent_spec):
    with pytest.raises(ValueError):
        RealizationSampler.empirical_first_moment(
            two_agent_spec, Schedule(T=1, iters=1, mu=0.1), 0, np.random.default_rng(0)
        )


def test_streams_are_reproducible_and_independent():
    a = Streams.iteration(5, 0, 1).random(4)
    b = Streams.iteration(5, 0, 1).random(4)
    c = Streams.iteration(5, 1, 1).random(4)
    d = Streams.iteration(5, 0, 2).random(4)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)
    assert not np.allclose(a, d)


def test_poisson_binomial_matches_binomial():
    np.testing.assert_allclose(poisson_binomial_pmf(np.full(3, 0.5)), [1 / 8, 3 / 8, 3 / 8, 1 / 8])
    assert poisson_binomial_pmf(np.array([0.2, 0.9, 0.4])).sum() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("q", [[0.5, 0.5, 0.5, 0.5], [0.2, 0.7, 0.9, 0.4]])
@pytest.mark.parametrize(
    "on, off, power",
    [
        ({0}, set(), 0),
        ({1, 3}, {0}, 1),
        ({0, 1, 2}, set(), 2),
        (set(), {2}, 1),
        ({2}, {2}, 1),
    ],
)
def test_participation_law_moments(q, on, off, power):
    law = ParticipationLaw(np.array(q))
    assert law.moment(frozenset(on), frozenset(off), power) == pytest.approx(
        _brute_moment(q, on, off, power), abs=1e-14
    )


def test_participation_law_expected_matrix(make_federated, events_of):
    spec = make_federated(4, [0.3, 0.6, 0.9, 0.5], Mode.FEDAVG)
    expected = sum(p * A for p, _, A in events_of(spec))
    np.testing.assert_allclose(ParticipationLaw(spec.q).expected_matrix(), expected, atol=1e-14)

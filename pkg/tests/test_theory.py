import numpy as np
import pytest
import scipy.linalg as la
from hypothesis import given, strategies as st

from helpers.errors import EnumerationCapExceeded, ShapeError, UnstableSpectrum
from models.experiment import NetworkSection
from models.network import Mode, NetworkSpec
from models.problem import RegularityConstants
from models.schedule import Schedule
from sampler.streams import Streams
from theory.calculus import BlockCalculus
from theory.moment_builder import MomentBuilder
from theory.msd import MSDAnalyzer
from theory.oracle import TABLE_NAMES, MomentOracle
from theory.stability import StabilityAnalyzer
from topology.network_builder import NetworkBuilder
from topology.validator import NetworkValidator


def _moments(spec, mu, hessians, R_blocks=None, **kwargs):
    hessians = np.asarray(hessians, dtype=float)
    if R_blocks is None:
        R_blocks = np.broadcast_to(np.eye(hessians.shape[1]), hessians.shape)
    return MomentBuilder.build_moments(spec, Schedule(T=1, iters=1, mu=mu), hessians, R_blocks, **kwargs)


def test_bvec_scalar_blocks_is_column_major():
    S = np.arange(9.0).reshape(3, 3)
    np.testing.assert_array_equal(BlockCalculus.bvec(S, 3, 1), S.T.ravel())


def test_bvec_of_identity():
    v = BlockCalculus.bvec(np.eye(6), 3, 2)
    assert v.shape == (36,)
    assert np.count_nonzero(v) == 6
    np.testing.assert_array_equal(v, BlockCalculus.identity_blocks(3, 2).ravel())


def test_unbvec_inverts_bvec():
    S = np.random.default_rng(0).standard_normal((6, 6))
    np.testing.assert_array_equal(BlockCalculus.unbvec(BlockCalculus.bvec(S, 2, 3), 2, 3), S)


def test_block_shapes_are_checked():
    with pytest.raises(ShapeError):
        BlockCalculus.bvec(np.eye(5), 2, 2)
    with pytest.raises(ShapeError):
        BlockCalculus.unbvec(np.zeros(10), 2, 2)
    with pytest.raises(ShapeError):
        BlockCalculus.block_kron(np.eye(4), np.eye(3), 2, 2)


def test_block_kron_of_scalar_blocks():
    rng = np.random.default_rng(1)
    A, B = rng.standard_normal((2, 3, 3))
    np.testing.assert_allclose(BlockCalculus.block_kron(A, B, 3, 1), np.kron(A, B), atol=1e-15)


@pytest.mark.property
@given(
    K=st.integers(min_value=1, max_value=3),
    M=st.integers(min_value=1, max_value=3),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_block_kron_vectorizes_congruence(K, M, seed):
    rng = np.random.default_rng(seed)
    A, B, S = rng.standard_normal((3, K * M, K * M))
    lhs = BlockCalculus.bvec(B @ S @ A.T, K, M)
    rhs = BlockCalculus.block_kron(A, B, K, M) @ BlockCalculus.bvec(S, K, M)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_local_transition_entries(two_agent_spec):
    moments = _moments(two_agent_spec, 0.1, np.full((2, 1, 1), 2.0))
    G = moments.G_local
    assert G.shape == (4, 4)
    assert G[0, 0] == pytest.approx(0.82, abs=1e-14)
    assert G[1, 1] == pytest.approx(0.72, abs=1e-14)
    assert G[3, 3] == pytest.approx(0.64, abs=1e-14)
    np.testing.assert_array_equal(G - np.diag(np.diag(G)), np.zeros((4, 4)))


def test_fedsgd_transition_is_a_block_kronecker_square(make_federated, spd_hessians):
    K, M, mu = 3, 2, 0.05
    H = spd_hessians(K, M, 3)
    moments = _moments(make_federated(K, 1.0, Mode.FEDSGD), mu, H)
    B = np.kron(np.full((K, K), 1.0 / K), np.eye(M)) @ (np.eye(K * M) - mu * la.block_diag(*H))
    np.testing.assert_allclose(moments.G_combine, BlockCalculus.block_kron(B, B, K, M), atol=1e-13)
    assert moments.exact


def _compare_tables(tables, expected):
    for name in TABLE_NAMES:
        np.testing.assert_allclose(getattr(tables, name), expected[name], atol=1e-12, err_msg=name)


def test_decentralized_tables_two_agents(two_agent_spec, events_of, tables_of, unit_schedule):
    tables, exact = MomentBuilder.build_combine_moments(two_agent_spec, unit_schedule)
    assert exact
    _compare_tables(tables, tables_of(events_of(two_agent_spec), 2))


def test_decentralized_tables_three_agents(ring_spec, events_of, tables_of, unit_schedule):
    tables, exact = MomentBuilder.build_combine_moments(ring_spec, unit_schedule)
    assert exact
    _compare_tables(tables, tables_of(events_of(ring_spec), 3))


def test_decentralized_tables_with_sparse_neighborhoods(events_of, tables_of, unit_schedule):
    spec = NetworkSpec(
        K=4,
        neighborhoods=[[0, 1, 3], [0, 1, 2], [1, 2, 3], [0, 2, 3]],
        A=[[0.4, 0.3, 0.0, 0.2], [0.3, 0.4, 0.5, 0.0], [0.0, 0.3, 0.2, 0.3], [0.3, 0.0, 0.3, 0.5]],
        q=[0.3, 0.8, 1.0, 0.6],
        Q=np.full((4, 4), 0.7),
    )
    tables, _ = MomentBuilder.build_combine_moments(spec, unit_schedule)
    _compare_tables(tables, tables_of(events_of(spec), 4))


def test_fedavg_tables(make_federated, events_of, tables_of, unit_schedule):
    spec = make_federated(3, [0.3, 0.6, 0.9], Mode.FEDAVG)
    tables, exact = MomentBuilder.build_combine_moments(spec, unit_schedule)
    assert exact
    _compare_tables(tables, tables_of(events_of(spec), 3))


def test_fedsgd_tables(make_federated, events_of, tables_of, unit_schedule):
    spec = make_federated(3, 1.0, Mode.FEDSGD)
    tables, exact = MomentBuilder.build_combine_moments(spec, unit_schedule)
    assert exact
    _compare_tables(tables, tables_of(events_of(spec), 3))


def test_local_tables_match_enumeration(ring_spec, events_of, tables_of):
    events = [(p, theta, np.eye(3)) for p, theta, _ in events_of(ring_spec)]
    _compare_tables(MomentBuilder.build_local_moments(ring_spec), tables_of(events, 3))


def test_silent_network_has_identity_moments(spd_hessians):
    spec = NetworkSpec(
        K=2,
        neighborhoods=[[0, 1], [0, 1]],
        A=[[0.6, 0.5], [0.4, 0.5]],
        q=[0.0, 0.0],
        Q=np.ones((2, 2)),
    )
    moments = _moments(spec, 0.1, spd_hessians(2, 2))
    np.testing.assert_allclose(moments.G_combine, np.eye(16), atol=1e-15)
    np.testing.assert_array_equal(moments.C_combine, np.zeros((16, 16)))
    with pytest.raises(UnstableSpectrum) as info:
        MSDAnalyzer.theoretical_msd(moments, Schedule(T=1, iters=1, mu=0.1))
    assert info.value.rho == pytest.approx(1.0)


def _random_network(K=5, seed=11):
    section = NetworkSection(K=K, graph="erdos_renyi", edge_prob=0.5, q=0.5, Q=None)
    spec = NetworkBuilder.from_section(section, Streams.topology(seed))
    return NetworkValidator.validate_network(spec)


def _standard_scores(exact, estimate):
    """|exact − estimate| / standard error for every entry with spread, all tables."""
    scores = []
    for part in ("local", "combine"):
        want, got = getattr(exact, part), getattr(estimate, part)
        for name in TABLE_NAMES:
            gap = np.abs(getattr(got, name) - getattr(want, name))
            err = got.std_error[name]
            assert np.all(gap[err == 0.0] <= 1e-9), f"{part}.{name}"
            scores.append(gap[err > 0.0] / err[err > 0.0])
    return np.concatenate(scores)


@pytest.mark.slow
@pytest.mark.parametrize("network", ["pair", "ring", "random", "fedavg"])
def test_oracle_agrees_with_exact_tables(network, two_agent_spec, ring_spec, make_federated, spd_hessians):
    spec = {
        "pair": lambda: two_agent_spec,
        "ring": lambda: ring_spec,
        "random": _random_network,
        "fedavg": lambda: make_federated(5, 0.5, Mode.FEDAVG),
    }[network]()
    H = spd_hessians(spec.K, 2)
    R = np.broadcast_to(np.eye(2), (spec.K, 2, 2))
    sched = Schedule(T=2, iters=1, mu=0.1)
    exact = MomentBuilder.build_moments(spec, sched, H, R)
    assert exact.exact
    estimate = MomentOracle.mc_moment_oracle(spec, sched, H, R, 10**5, seed=0)
    assert not estimate.exact

    # symmetric tables repeat entries; count each estimate once
    scores = np.unique(_standard_scores(exact, estimate))
    # 3 standard errors, read as an exceedance rate over all entries
    assert np.count_nonzero(scores > 3.0) <= max(1, scores.size // 100)
    assert scores.max() <= 5.0


def test_oracle_standard_error_shrinks_with_draws(ring_spec, unit_schedule):
    exact, _ = MomentBuilder.build_combine_moments(ring_spec, unit_schedule)
    errors, gaps = [], []
    for n_draws in (10**3, 10**4, 10**5):
        estimate = MomentOracle.combine_tables(ring_spec, n_draws, seed=5)
        errors.append(estimate.max_std_error())
        gaps.append(max(np.abs(getattr(estimate, name) - getattr(exact, name)).max() for name in TABLE_NAMES))
    for coarse, fine in zip(errors, errors[1:]):
        assert 2.5 <= coarse / fine <= 4.0
    assert gaps[2] < gaps[0]


def test_enumeration_cap(ring_spec, unit_schedule):
    with pytest.raises(EnumerationCapExceeded) as info:
        MomentBuilder.build_combine_moments(ring_spec, unit_schedule, exact=True, cap=4)
    assert info.value.events == 5
    tables, exact = MomentBuilder.build_combine_moments(ring_spec, unit_schedule, cap=4, mc_draws=2000)
    assert not exact
    assert tables.max_std_error() > 0.0


def test_fedavg_cap_falls_back(make_federated, unit_schedule):
    spec = make_federated(3, 0.5, Mode.FEDAVG)
    with pytest.raises(EnumerationCapExceeded):
        MomentBuilder.build_combine_moments(spec, unit_schedule, exact=True, cap=80)
    _, exact = MomentBuilder.build_combine_moments(spec, unit_schedule, cap=80, mc_draws=500)
    assert not exact


def test_local_blocks_need_diagonal_tables(make_federated, unit_schedule):
    tables, _ = MomentBuilder.build_combine_moments(make_federated(2, 1.0, Mode.FEDSGD), unit_schedule)
    with pytest.raises(ShapeError):
        BlockCalculus.local_blocks(tables, np.full((2, 1, 1), 2.0), 0.1)


def test_noiseless_msd_is_zero(two_agent_spec, spd_hessians):
    H = spd_hessians(2, 2)
    moments = _moments(two_agent_spec, 0.01, H, R_blocks=np.zeros((2, 2, 2)))
    report = MSDAnalyzer.theoretical_msd(moments, Schedule(T=3, iters=1, mu=0.01))
    assert report.msd_lin == 0.0
    assert report.msd_adjoint_lin == 0.0
    assert report.msd_db == float("-inf")
    assert report.rho < 1.0


def test_msd_is_linear_in_noise(ring_spec, spd_hessians):
    H = spd_hessians(3, 2, 4)
    R = np.stack([np.diag([1.0, 0.5]), np.eye(2), np.diag([0.2, 2.0])])
    sched = Schedule(T=2, iters=1, mu=0.02)
    base = MSDAnalyzer.theoretical_msd(_moments(ring_spec, 0.02, H, R), sched)
    double = MSDAnalyzer.theoretical_msd(_moments(ring_spec, 0.02, H, 2.0 * R), sched)
    assert base.msd_lin > 0.0
    assert double.msd_lin == pytest.approx(2.0 * base.msd_lin, rel=1e-10)
    assert double.msd_adjoint_lin == pytest.approx(2.0 * base.msd_adjoint_lin, rel=1e-10)


def test_matrix_free_path_matches_dense(ring_spec, spd_hessians):
    H = spd_hessians(3, 2, 5)
    sched = Schedule(T=2, iters=1, mu=0.05)
    moments = _moments(ring_spec, 0.05, H)
    dense = MSDAnalyzer.theoretical_msd(moments, sched)
    free = MSDAnalyzer.theoretical_msd(moments, sched, dense_limit=0)
    assert free.rho == pytest.approx(dense.rho, rel=1e-6)
    assert free.msd_recursion_lin == pytest.approx(dense.msd_recursion_lin, rel=1e-6)
    assert free.msd_adjoint_lin == pytest.approx(dense.msd_adjoint_lin, rel=1e-6)


def test_adjoint_form_doubles_combine_noise(make_federated):
    K, M, mu = 3, 2, 0.01
    H = np.broadcast_to(2.0 * np.eye(M), (K, M, M))
    moments = _moments(make_federated(K, 1.0, Mode.FEDSGD), mu, H)
    report = MSDAnalyzer.theoretical_msd(moments, Schedule(T=1, iters=1, mu=mu), form="adjoint")
    assert report.msd_form == "adjoint"
    assert report.msd_lin == report.msd_adjoint_lin
    assert 1.9 <= report.msd_adjoint_lin / report.msd_recursion_lin <= 2.0


def test_unknown_form(two_agent_spec, spd_hessians):
    moments = _moments(two_agent_spec, 0.01, spd_hessians(2, 1))
    with pytest.raises(ValueError):
        MSDAnalyzer.theoretical_msd(moments, Schedule(T=1, iters=1, mu=0.01), form="closed")


def test_report_carries_run_parameters(two_agent_spec, spd_hessians):
    moments = _moments(two_agent_spec, 0.01, spd_hessians(2, 2))
    sched = Schedule(T=4, iters=1, mu=0.01)
    stability = StabilityAnalyzer.stability_report(
        RegularityConstants(nu=1.0, delta=2.0, lambda_min=1.0, lambda_max=2.0), two_agent_spec, sched
    )
    report = MSDAnalyzer.theoretical_msd(moments, sched, stability=stability, alpha_s=0.5)
    assert (report.K, report.M, report.T) == (2, 2, 4)
    assert report.mode == Mode.DECENTRALIZED
    assert report.alpha0 == pytest.approx(0.25)
    assert report.gamma == stability.gamma
    assert report.exact


def test_step_size_bound(two_agent_spec):
    constants = RegularityConstants(nu=1.0, delta=1.0, lambda_min=1.0, lambda_max=1.0)
    report = StabilityAnalyzer.stability_report(
        constants, two_agent_spec, Schedule(T=1, iters=1, mu=0.5), beta_s2=1.0
    )
    assert report.mu_max == pytest.approx(1.0)


def test_contraction_factor_and_bound(make_federated):
    constants = RegularityConstants(nu=1.0, delta=1.0, lambda_min=1.0, lambda_max=1.0)
    spec = make_federated(2, 1.0, Mode.FEDSGD)
    report = StabilityAnalyzer.stability_report(constants, spec, Schedule(T=1, iters=1, mu=0.2), sigma_s2=1.0)
    assert report.gamma == pytest.approx(0.64)
    assert report.admissible
    assert report.msd_bound == pytest.approx(0.04 / 0.36)


def test_zero_step_size_is_not_admissible(make_federated):
    constants = RegularityConstants(nu=1.0, delta=1.0, lambda_min=1.0, lambda_max=1.0)
    sched = Schedule.model_construct(T=1, iters=1, mu=0.0)
    report = StabilityAnalyzer.stability_report(constants, make_federated(2, 1.0, Mode.FEDSGD), sched, sigma_s2=1.0)
    assert report.gamma == pytest.approx(1.0)
    assert not report.admissible
    assert report.msd_bound is None


@pytest.mark.slow
def test_msd_scales_with_step_size(two_agent_spec, spd_hessians):
    H = spd_hessians(2, 2, 6)
    values = []
    for mu in (1e-3, 5e-4):
        moments = _moments(two_agent_spec, mu, H)
        values.append(MSDAnalyzer.theoretical_msd(moments, Schedule(T=2, iters=1, mu=mu)).msd_lin)
    assert 0.45 <= values[1] / values[0] <= 0.55

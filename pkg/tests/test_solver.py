import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harmocont.errors import ConfigurationError, DataError, DomainError
from harmocont.experiment import paper_case, synthesize_data
from harmocont.potential import assemble
from harmocont.solver import TikhonovConfig, alpha_sweep, condition_diagnostics, tikhonov_solve


def oracle_solve(A, f, alpha):
    # independent path: augmented least squares via SVD-based lstsq
    n = A.shape[1]
    big = np.vstack([A, np.sqrt(alpha) * np.eye(n)])
    rhs = np.concatenate([f, np.zeros(n)])
    return np.linalg.lstsq(big, rhs, rcond=None)[0]


def objective(A, f, alpha, mu):
    r = A @ mu - f
    return float(r @ r + alpha * mu @ mu)


def test_identity_alpha_one():
    f = np.array([1.0, -2.0, 3.5, 0.25])
    rep = tikhonov_solve(np.eye(4), f, 1.0)
    assert np.allclose(rep.mu, f / 2, rtol=0, atol=1e-15)


def test_over_regularized_limit():
    rng = np.random.default_rng(0)
    A = rng.uniform(-1, 1, (20, 10))
    A /= np.linalg.norm(A, 2)
    f = rng.normal(size=20)
    rep = tikhonov_solve(A, f, 1e12)
    assert rep.solution_norm <= np.linalg.norm(A.T @ f) / 1e12


def test_random_30x40_against_oracle():
    rng = np.random.default_rng(2)
    A = rng.uniform(-1, 1, (30, 40))
    f = rng.uniform(-1, 1, 30)
    rep = tikhonov_solve(A, f, TikhonovConfig.fixed(0.01))
    ref = np.linalg.solve(0.01 * np.eye(40) + A.T @ A, A.T @ f)
    assert np.linalg.norm(rep.mu - ref) <= 1e-8 * np.linalg.norm(ref)
    assert np.linalg.norm(rep.mu - oracle_solve(A, f, 0.01)) <= 1e-8 * np.linalg.norm(ref)


def test_normal_equation_residual_tiny_alpha(parabola_K):
    case = paper_case("parabola", "a", delta=0.01)
    f = synthesize_data(case)
    K = parabola_K.restrict(case.controlled_mask)
    rep = tikhonov_solve(K, f, 1e-10)
    ktf = np.linalg.norm(K.entries.T @ f)
    assert rep.normal_eq_residual <= 1e-10 * ktf + 1e-14
    assert rep.normal_eq_residual <= 1e-8 * (ktf + 1)


@pytest.mark.parametrize("alpha", [0.0, -1.0, float("nan"), float("inf")])
def test_bad_alpha(alpha):
    with pytest.raises(ConfigurationError):
        tikhonov_solve(np.eye(2), np.ones(2), alpha)


def test_bad_data():
    with pytest.raises(DataError):
        tikhonov_solve(np.array([[1.0, np.nan]]), np.ones(1), 1.0)
    with pytest.raises(DataError):
        tikhonov_solve(np.eye(2), np.array([1.0, np.inf]), 1.0)
    with pytest.raises(DataError):
        tikhonov_solve(np.eye(2), np.ones(3), 1.0)


def test_config_rules():
    assert TikhonovConfig.noise_order(2.0).resolve(0.01) == pytest.approx(0.02)
    assert TikhonovConfig().resolve(0.05) == 0.05
    assert TikhonovConfig.fixed(0.3).resolve() == 0.3
    with pytest.raises(ConfigurationError):
        TikhonovConfig.noise_order().resolve(0.0)
    with pytest.raises(ConfigurationError):
        TikhonovConfig.noise_order(0.0)
    with pytest.raises(ConfigurationError):
        TikhonovConfig.fixed(-1)
    for c in (TikhonovConfig.fixed(0.1), TikhonovConfig.noise_order(3.0)):
        assert TikhonovConfig.from_dict(c.to_dict()) == c


def test_sweep_duplicate_alphas_identical():
    rng = np.random.default_rng(3)
    A, f = rng.normal(size=(12, 8)), rng.normal(size=12)
    r1, r2 = alpha_sweep(A, f, [0.1, 0.1])
    assert np.array_equal(r1.mu, r2.mu)
    assert r1.residual_norm == r2.residual_norm


def test_sweep_single_matches_solve():
    rng = np.random.default_rng(4)
    A, f = rng.normal(size=(12, 8)), rng.normal(size=12)
    (r,) = alpha_sweep(A, f, [0.3])
    assert np.array_equal(r.mu, tikhonov_solve(A, f, 0.3).mu)


def test_sweep_paper_case_a(parabola_K):
    case = paper_case("parabola", "a", delta=0.01)
    K = parabola_K.restrict(case.controlled_mask)
    f = synthesize_data(case)
    alphas = [1e-6, 1e-2, 1e2]
    reps = alpha_sweep(K, f, alphas)
    for a, rep in zip(alphas, reps):
        ref = oracle_solve(K.entries, f, a)
        assert np.linalg.norm(rep.mu - ref) <= 1e-6 * np.linalg.norm(ref)
    for a, b in zip(reps, reps[1:]):
        assert b.residual_norm >= a.residual_norm - 1e-10
        assert b.solution_norm <= a.solution_norm + 1e-10


@pytest.mark.parametrize("alphas", [[], [0.1, 0.01], [0.0, 1.0], [-1.0]])
def test_sweep_rejects(alphas):
    with pytest.raises(ConfigurationError):
        alpha_sweep(np.eye(2), np.ones(2), alphas)


def test_condition_diagnostics_trivial():
    assert condition_diagnostics(np.eye(5)) == pytest.approx((1.0, 1.0, 1.0))
    assert condition_diagnostics(np.diag([2.0, 1.0])) == pytest.approx((2.0, 1.0, 2.0))
    assert condition_diagnostics(np.zeros((2, 2)))[2] == float("inf")
    with pytest.raises(DomainError):
        condition_diagnostics(np.empty((0, 3)))
    with pytest.raises(DataError):
        condition_diagnostics(np.array([[np.inf]]))


def test_preset_case_a_is_ill_conditioned(parabola_K):
    case = paper_case("parabola", "a")
    _, _, cond = condition_diagnostics(parabola_K.restrict(case.controlled_mask))
    # regression bound: observed cond is around 1e17
    assert cond >= 1e8


systems = st.tuples(
    st.integers(1, 60), st.integers(1, 60), st.integers(0, 2**32 - 1), st.floats(1e-6, 1e3)
)


@given(systems)
@settings(max_examples=100, deadline=None)
def test_random_systems_match_oracle(spec):
    m, n, seed, alpha = spec
    rng = np.random.default_rng(seed)
    A = rng.uniform(-1, 1, (m, n))
    f = rng.uniform(-1, 1, m)
    rep = tikhonov_solve(A, f, alpha)
    ref = oracle_solve(A, f, alpha)
    assert np.linalg.norm(rep.mu - ref) <= 1e-8 * max(np.linalg.norm(ref), 1e-300) + 1e-14
    ktf = np.linalg.norm(A.T @ f)
    assert rep.normal_eq_residual <= 1e-10 * ktf + 1e-14


@given(st.integers(0, 2**32 - 1), st.floats(1e-4, 10))
@settings(max_examples=30, deadline=None)
def test_optimality(seed, alpha):
    rng = np.random.default_rng(seed)
    A = rng.uniform(-1, 1, (25, 15))
    f = rng.uniform(-1, 1, 25)
    mu = tikhonov_solve(A, f, alpha).mu
    F0 = objective(A, f, alpha, mu)
    for _ in range(20):
        d = rng.normal(size=15)
        d *= 1e-6 / np.linalg.norm(d)
        assert objective(A, f, alpha, mu + d) >= F0 - 1e-12


def test_monotone_in_alpha_on_preset_rows(parabola_K):
    for name in ("a", "d", "e"):
        case = paper_case("parabola", name, delta=0.01)
        K = parabola_K.restrict(case.controlled_mask)
        reps = alpha_sweep(K, synthesize_data(case), np.logspace(-8, 1, 10))
        for a, b in zip(reps, reps[1:]):
            assert b.residual_norm >= a.residual_norm - 1e-10
            assert b.solution_norm <= a.solution_norm + 1e-10


def test_zero_data_gives_zero_density(parabola_K):
    rep = tikhonov_solve(parabola_K, np.zeros(180), 0.01)
    assert np.all(rep.mu == 0.0)


@given(st.floats(0.1, 10), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_scaling(c, seed):
    rng = np.random.default_rng(seed)
    A = rng.uniform(-1, 1, (20, 12))
    f = rng.uniform(-1, 1, 20)
    mu1 = tikhonov_solve(A, f, 0.05).mu
    mu2 = tikhonov_solve(c * A, c * f, 0.05 * c * c).mu
    assert np.linalg.norm(mu1 - mu2) <= 1e-10 * np.linalg.norm(mu1)


def test_report_norms_and_density(parabola_K):
    f = np.linspace(0, 1, 180)
    rep = tikhonov_solve(parabola_K, f, 0.01)
    assert rep.residual_norm == pytest.approx(np.linalg.norm(parabola_K.entries @ rep.mu - f))
    assert rep.solution_norm == pytest.approx(np.linalg.norm(rep.mu))
    assert rep.density is not None and rep.density.source is parabola_K.source
    assert tikhonov_solve(np.eye(2), np.ones(2), 1.0).density is None

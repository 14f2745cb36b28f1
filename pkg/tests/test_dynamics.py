"""Transition-model estimation, simulation, and file round-tripping."""

import numpy as np
import pytest

from macrorl.dynamics import (
    TransitionModel,
    fit_ols,
    load_model,
    save_model,
    step,
)
from macrorl.errors import InsufficientDataError, ModelFileError, SingularDesignError
from macrorl.market_data import Quarter, StateSeries

from conftest import STABLE_A, STABLE_B, make_history, simulate_history


# ---------------------------------------------------------------------------
# fit_ols
# ---------------------------------------------------------------------------


def test_noise_free_recovery():
    rng = np.random.default_rng(42)
    history = simulate_history(STABLE_A, STABLE_B, n_rows=201, rng=rng)
    model, diag = fit_ols(history)
    assert np.max(np.abs(model.A - STABLE_A)) < 1e-8
    assert np.max(np.abs(model.B - STABLE_B)) < 1e-8
    assert np.max(np.abs(model.c)) == 0.0
    assert diag.n_transitions == 200


def test_identity_random_walk_recovery():
    # A pure random walk from one start never varies, so stitch together
    # several short segments with different starting states.
    rng = np.random.default_rng(7)
    rows = []
    quarters = []
    base = Quarter(1990, 1).index
    for seg in range(12):
        x = rng.uniform(-3, 8, size=3)
        for t in range(3):
            rows.append([*x, rng.uniform(0, 10)])
            quarters.append(Quarter.from_index(base))
            base += 1
        base += 1  # calendar hole: segment boundary
    history = StateSeries(quarters=tuple(quarters), values=np.asarray(rows))
    model, _ = fit_ols(history)
    assert np.max(np.abs(model.A - np.eye(3))) < 1e-8
    assert np.max(np.abs(model.B)) < 1e-8


def test_sigma_monte_carlo_consistency():
    rng = np.random.default_rng(123)
    sigma_true = np.array(
        [
            [0.40, 0.10, 0.05],
            [0.10, 0.30, -0.02],
            [0.05, -0.02, 0.50],
        ]
    )
    L = np.linalg.cholesky(sigma_true)
    history = simulate_history(STABLE_A, STABLE_B, n_rows=50_001, rng=rng, noise_L=L)
    model, _ = fit_ols(history)
    tolerance = 0.05 * np.max(np.abs(sigma_true))
    assert np.max(np.abs(model.Sigma - sigma_true)) < tolerance


def test_residuals_orthogonal_to_regressors():
    rng = np.random.default_rng(5)
    L = np.linalg.cholesky(np.diag([0.3, 0.2, 0.25]))
    history = simulate_history(STABLE_A, STABLE_B, n_rows=500, rng=rng, noise_L=L)
    pairs = list(history.transition_pairs())
    X = history.values[[t for t, _ in pairs]]
    Y = history.values[[s for _, s in pairs], :3]
    model, _ = fit_ols(history)
    design = X
    coef = np.vstack([model.A.T, model.B])
    residuals = Y - design @ coef
    assert np.max(np.abs(design.T @ residuals)) / len(pairs) < 1e-8


def test_intercept_zeroes_residual_means():
    rng = np.random.default_rng(9)
    L = np.linalg.cholesky(np.diag([0.3, 0.2, 0.25]))
    history = simulate_history(
        STABLE_A, STABLE_B, n_rows=400, rng=rng, c=np.array([1.0, 2.0, -0.5]), noise_L=L
    )
    model, diag = fit_ols(history, with_intercept=True)
    assert model.with_intercept
    assert np.max(np.abs(diag.residual_means)) < 1e-8
    # and the intercept is recovered on noise-free data
    clean = simulate_history(
        STABLE_A, STABLE_B, n_rows=200, rng=np.random.default_rng(10), c=np.array([1.0, 2.0, -0.5])
    )
    model2, _ = fit_ols(clean, with_intercept=True)
    assert np.max(np.abs(model2.c - np.array([1.0, 2.0, -0.5]))) < 1e-8


def test_r2_bounds(stable_model):
    rng = np.random.default_rng(21)
    history = simulate_history(
        STABLE_A, STABLE_B, n_rows=300, rng=rng, noise_L=stable_model.cholesky_L
    )
    for with_intercept in (False, True):
        _, diag = fit_ols(history, with_intercept=with_intercept)
        assert np.all(diag.per_equation_r2 >= 0.0)
        assert np.all(diag.per_equation_r2 <= 1.0)


def test_rank_deficient_design_rejected():
    rng = np.random.default_rng(3)
    history = simulate_history(STABLE_A, STABLE_B, n_rows=100, rng=rng)
    values = history.values.copy()
    values[:, 2] = 0.0  # output gap identically zero: collinear column
    degenerate = make_history(values)
    with pytest.raises(SingularDesignError):
        fit_ols(degenerate)


def test_too_few_pairs_rejected():
    rng = np.random.default_rng(3)
    history = simulate_history(STABLE_A, STABLE_B, n_rows=5, rng=rng)
    with pytest.raises(InsufficientDataError):
        fit_ols(history)


# ---------------------------------------------------------------------------
# step
# ---------------------------------------------------------------------------


def test_step_identity_no_noise(identity_model):
    rng = np.random.default_rng(0)
    x = np.array([2.5, 5.0, -1.0])
    out = step(identity_model, x, rate=4.0, rng=rng)
    assert np.array_equal(out, x)


def test_step_affine_hand_check():
    model = TransitionModel.create(
        A=STABLE_A, B=STABLE_B, Sigma=np.zeros((3, 3)), c=np.array([0.5, -0.2, 0.1])
    )
    x = np.array([1.0, 2.0, 3.0])
    out = step(model, x, rate=2.0, rng=np.random.default_rng(0))
    expected = STABLE_A @ x + STABLE_B * 2.0 + np.array([0.5, -0.2, 0.1])
    assert np.allclose(out, expected, atol=1e-15)


def test_step_seed_determinism(stable_model):
    x = np.array([3.0, 5.0, 0.0])
    a = step(stable_model, x, 2.0, np.random.default_rng(99))
    b = step(stable_model, x, 2.0, np.random.default_rng(99))
    assert np.array_equal(a, b)


def test_step_composition_without_noise():
    model = TransitionModel.create(A=STABLE_A, B=STABLE_B, Sigma=np.zeros((3, 3)))
    rng = np.random.default_rng(0)
    x = np.array([1.0, -2.0, 0.5])
    two_steps = step(model, step(model, x, 3.0, rng), 3.0, rng)
    composed = STABLE_A @ (STABLE_A @ x + STABLE_B * 3.0) + STABLE_B * 3.0
    assert np.allclose(two_steps, composed, atol=1e-14)


def test_step_sample_mean_converges(stable_model):
    rng = np.random.default_rng(77)
    x = np.array([3.0, 5.0, 0.0])
    n = 10_000
    draws = np.array([step(stable_model, x, 2.0, rng) for _ in range(n)])
    expected = stable_model.A @ x + stable_model.B * 2.0
    sigma_max = np.sqrt(np.max(np.diag(stable_model.Sigma)))
    assert np.max(np.abs(draws.mean(axis=0) - expected)) < 4 * sigma_max / np.sqrt(n)


# ---------------------------------------------------------------------------
# save / load
# ---------------------------------------------------------------------------


def test_model_round_trip(tmp_path, stable_model):
    path = tmp_path / "model.txt"
    save_model(stable_model, path)
    loaded = load_model(path)
    for name in ("A", "B", "c", "Sigma", "cholesky_L"):
        assert np.array_equal(getattr(loaded, name), getattr(stable_model, name)), name
    assert loaded.with_intercept == stable_model.with_intercept


def test_load_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("something-else\nversion 1\n")
    with pytest.raises(ModelFileError, match="magic"):
        load_model(path)


def test_load_rejects_wrong_version(tmp_path, stable_model):
    path = tmp_path / "model.txt"
    save_model(stable_model, path)
    text = path.read_text().replace("version 1", "version 99")
    path.write_text(text)
    with pytest.raises(ModelFileError, match="version"):
        load_model(path)


def test_load_rejects_non_psd_sigma(tmp_path, stable_model):
    path = tmp_path / "model.txt"
    save_model(stable_model, path)
    lines = path.read_text().splitlines()
    sigma_at = lines.index("Sigma 3 3")
    lines[sigma_at + 1] = "-1.0 0.0 0.0"
    lines[sigma_at + 2] = "0.0 -1.0 0.0"
    lines[sigma_at + 3] = "0.0 0.0 -1.0"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ModelFileError):
        load_model(path)


def test_zero_sigma_gives_zero_cholesky():
    model = TransitionModel.create(A=np.eye(3), B=np.zeros(3), Sigma=np.zeros((3, 3)))
    assert np.array_equal(model.cholesky_L, np.zeros((3, 3)))


def test_psd_singular_sigma_accepted():
    sigma = np.diag([1.0, 1.0, 0.0])  # PSD but singular: jittered factorization
    model = TransitionModel.create(A=np.eye(3), B=np.zeros(3), Sigma=sigma)
    assert np.max(np.abs(model.cholesky_L @ model.cholesky_L.T - sigma)) < 1e-8


def test_asymmetric_sigma_rejected():
    sigma = np.array([[1.0, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    with pytest.raises(ModelFileError, match="symmetric"):
        TransitionModel.create(A=np.eye(3), B=np.zeros(3), Sigma=sigma)

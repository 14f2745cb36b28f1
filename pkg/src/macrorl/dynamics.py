"""Linear-Gaussian macro dynamics: estimation and one-step simulation.

The transition model is x' = A x + B i + c + eps with x = (inflation,
unemployment, output_gap), i the policy rate, and eps ~ N(0, Sigma).
Coefficients come from equation-by-equation least squares on historical
quarterly transition pairs; Sigma is the residual covariance.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InsufficientDataError, ModelFileError, SingularDesignError
from .market_data import StateSeries

MODEL_FILE_MAGIC = "macrorl-transition-model"
MODEL_FILE_VERSION = 1

MIN_TRANSITIONS = 5


def _cholesky_factor(sigma: np.ndarray) -> np.ndarray:
    """Lower-triangular L with L L^T ~= sigma.

    A plain factorization is tried first; on failure (positive
    semidefinite but singular Sigma) a 1e-12 diagonal jitter is added.
    An exactly-zero Sigma maps to L = 0 so noiseless models stay
    noiseless.
    """
    if not np.any(sigma):
        return np.zeros_like(sigma)
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        try:
            return np.linalg.cholesky(sigma + 1e-12 * np.eye(sigma.shape[0]))
        except np.linalg.LinAlgError:
            raise ModelFileError("shock covariance is not positive semidefinite") from None


@dataclass(frozen=True)
class TransitionModel:
    """Fitted (A, B, c, Sigma) with a cached Cholesky factor of Sigma."""

    A: np.ndarray            # (3, 3) autoregressive block
    B: np.ndarray            # (3,)   policy-rate transmission
    c: np.ndarray            # (3,)   intercept, zero unless fitted with one
    Sigma: np.ndarray        # (3, 3) shock covariance
    cholesky_L: np.ndarray   # (3, 3) lower triangular, L L^T = Sigma
    with_intercept: bool = False

    @staticmethod
    def create(
        A: np.ndarray,
        B: np.ndarray,
        Sigma: np.ndarray,
        c: np.ndarray | None = None,
        with_intercept: bool = False,
    ) -> "TransitionModel":
        A = np.asarray(A, dtype=float).reshape(3, 3)
        B = np.asarray(B, dtype=float).reshape(3)
        Sigma = np.asarray(Sigma, dtype=float).reshape(3, 3)
        c = np.zeros(3) if c is None else np.asarray(c, dtype=float).reshape(3)
        if np.max(np.abs(Sigma - Sigma.T)) > 1e-10:
            raise ModelFileError("shock covariance is not symmetric")
        L = _cholesky_factor(Sigma)
        model = TransitionModel(
            A=A, B=B, c=c, Sigma=Sigma, cholesky_L=L, with_intercept=with_intercept
        )
        model.validate()
        return model

    def validate(self) -> None:
        for name, arr in (("A", self.A), ("B", self.B), ("c", self.c), ("Sigma", self.Sigma)):
            if not np.all(np.isfinite(arr)):
                raise ModelFileError(f"non-finite entries in {name}")
        if np.max(np.abs(self.Sigma - self.Sigma.T)) > 1e-10:
            raise ModelFileError("shock covariance is not symmetric")
        reconstructed = self.cholesky_L @ self.cholesky_L.T
        if np.max(np.abs(reconstructed - self.Sigma)) > 1e-8:
            raise ModelFileError("Cholesky factor does not reproduce Sigma")


@dataclass(frozen=True)
class FitDiagnostics:
    n_transitions: int
    per_equation_r2: np.ndarray  # (3,)
    residual_means: np.ndarray   # (3,)


def fit_ols(history: StateSeries, with_intercept: bool = False) -> tuple[TransitionModel, FitDiagnostics]:
    """Estimate (A, B, Sigma) by least squares on historical transitions.

    Each of the three target equations is regressed on [pi, u, y, i]
    (plus a constant when requested) via an SVD-based solver rather than
    normal-equation inversion. Sigma uses the unbiased (n - p)
    denominator. Transition pairs spanning data gaps are excluded.
    """
    pairs = list(history.transition_pairs())
    if len(pairs) < MIN_TRANSITIONS:
        raise InsufficientDataError(
            f"only {len(pairs)} transition pairs; need at least {MIN_TRANSITIONS}"
        )

    idx_t = np.array([t for t, _ in pairs])
    idx_next = np.array([s for _, s in pairs])
    X = history.values[idx_t, :]              # (n, 4): pi, u, y, i
    Y = history.values[idx_next, :3]          # (n, 3): next pi, u, y

    if with_intercept:
        design = np.hstack([X, np.ones((X.shape[0], 1))])
    else:
        design = X
    n, p = design.shape
    if n <= p:
        raise InsufficientDataError(f"{n} transitions cannot identify {p} coefficients")

    coef, _, rank, _ = np.linalg.lstsq(design, Y, rcond=None)
    if rank < p:
        raise SingularDesignError(
            f"regressor matrix has rank {rank} < {p}; columns are collinear"
        )

    residuals = Y - design @ coef
    Sigma = residuals.T @ residuals / (n - p)

    if with_intercept:
        ss_tot = np.sum((Y - Y.mean(axis=0)) ** 2, axis=0)
    else:
        ss_tot = np.sum(Y**2, axis=0)
    ss_res = np.sum(residuals**2, axis=0)
    r2 = np.where(ss_tot > 1e-300, 1.0 - ss_res / np.where(ss_tot > 1e-300, ss_tot, 1.0), 1.0)
    r2 = np.clip(r2, 0.0, 1.0)

    A = coef[:3, :].T
    B = coef[3, :].copy()
    c = coef[4, :].copy() if with_intercept else np.zeros(3)
    model = TransitionModel.create(A=A, B=B, Sigma=Sigma, c=c, with_intercept=with_intercept)
    diagnostics = FitDiagnostics(
        n_transitions=n,
        per_equation_r2=r2,
        residual_means=residuals.mean(axis=0),
    )
    return model, diagnostics


def step(
    model: TransitionModel,
    x: np.ndarray,
    rate: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """One simulated transition: A x + B i + c + L z, z ~ N(0, I)."""
    z = rng.standard_normal(3)
    return model.A @ x + model.B * rate + model.c + model.cholesky_L @ z


def _format_matrix(name: str, arr: np.ndarray) -> list[str]:
    rows = np.atleast_2d(arr)
    lines = [f"{name} {rows.shape[0]} {rows.shape[1]}"]
    for row in rows:
        lines.append(" ".join(repr(float(v)) for v in row))
    return lines


def save_model(model: TransitionModel, path: str | Path) -> None:
    """Write the model as versioned plain text with full-precision floats."""
    lines = [
        MODEL_FILE_MAGIC,
        f"version {MODEL_FILE_VERSION}",
        f"intercept {'on' if model.with_intercept else 'off'}",
    ]
    lines += _format_matrix("A", model.A)
    lines += _format_matrix("B", model.B.reshape(1, 3))
    lines += _format_matrix("c", model.c.reshape(1, 3))
    lines += _format_matrix("Sigma", model.Sigma)
    lines += _format_matrix("L", model.cholesky_L)
    Path(path).write_text("\n".join(lines) + "\n")


def load_model(path: str | Path) -> TransitionModel:
    """Read a model file written by save_model, validating as it goes."""
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines or lines[0].strip() != MODEL_FILE_MAGIC:
        raise ModelFileError(f"{path}: not a transition-model file (bad magic)")
    try:
        version = int(lines[1].split()[1])
    except (IndexError, ValueError):
        raise ModelFileError(f"{path}: missing version line") from None
    if version != MODEL_FILE_VERSION:
        raise ModelFileError(f"{path}: unsupported version {version}")
    intercept_parts = lines[2].split()
    if len(intercept_parts) != 2 or intercept_parts[0] != "intercept":
        raise ModelFileError(f"{path}: missing intercept line")
    with_intercept = intercept_parts[1] == "on"

    matrices: dict[str, np.ndarray] = {}
    i = 3
    while i < len(lines):
        header = lines[i].split()
        if len(header) != 3:
            raise ModelFileError(f"{path}: malformed matrix header {lines[i]!r}")
        name, n_rows, n_cols = header[0], int(header[1]), int(header[2])
        rows = []
        for r in range(n_rows):
            try:
                rows.append([float(v) for v in lines[i + 1 + r].split()])
            except (IndexError, ValueError):
                raise ModelFileError(f"{path}: malformed data for matrix {name}") from None
            if len(rows[-1]) != n_cols:
                raise ModelFileError(f"{path}: wrong column count for matrix {name}")
        matrices[name] = np.asarray(rows)
        i += 1 + n_rows

    for required in ("A", "B", "c", "Sigma", "L"):
        if required not in matrices:
            raise ModelFileError(f"{path}: missing matrix {required}")

    sigma = matrices["Sigma"]
    if np.max(np.abs(sigma - sigma.T)) > 1e-10:
        raise ModelFileError(f"{path}: Sigma is not symmetric")
    _cholesky_factor(sigma)  # raises if not PSD

    model = TransitionModel(
        A=matrices["A"],
        B=matrices["B"].reshape(3),
        c=matrices["c"].reshape(3),
        Sigma=sigma,
        cholesky_L=matrices["L"],
        with_intercept=with_intercept,
    )
    model.validate()
    return model

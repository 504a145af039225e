"""Stationary distribution, D/B/R assembly, stability and age solve for AoI SHS models."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from ..errors import (InvalidModel, NegativeSolution, NumericError, SingularChain,
                      UnstableModel)
from .model import ShsModel
from .validate import validate

NEG_TOL = 1e-8
# Abscissae this close to zero (relative to the largest departure rate) are reported as 0.
ZERO_TOL = 1e-10


@dataclass(frozen=True)
class StationaryDist:
    pi: np.ndarray
    residual: float


@dataclass(frozen=True)
class SystemMatrices:
    d: np.ndarray
    b_mat: np.ndarray
    r: np.ndarray
    relevant: np.ndarray

    def reduced(self):
        """Return (B_hat, R_hat, D_hat) restricted to relevant coordinates."""
        m = self.relevant
        return self.b_mat[:, m], self.r[np.ix_(m, m)], self.d[np.ix_(m, m)]


@dataclass(frozen=True)
class AgeSolution:
    pi: StationaryDist
    v: np.ndarray  # shape (num_states, cont_dim)
    age: float
    stable: bool
    spectral_abscissa: float
    residual: float

    def to_dict(self) -> dict:
        return {
            "pi": self.pi.pi.tolist(),
            "v": self.v.tolist(),
            "age": self.age,
            "stable": self.stable,
            "spectral_abscissa": self.spectral_abscissa,
            "residuals": {"balance": self.pi.residual, "fixed_point": self.residual},
        }


def _require_valid(model):
    diags = validate(model)
    if diags:
        raise InvalidModel(diags)


def stationary(model: ShsModel, check: bool = True) -> StationaryDist:
    """Solve the balance equations with one row replaced by normalisation."""
    if check:
        _require_valid(model)
    m = model.num_states
    Q = model.generator()
    A = Q.T.copy()
    A[-1, :] = 1.0
    rhs = np.zeros(m)
    rhs[-1] = 1.0
    try:
        lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
        if np.any(np.abs(np.diag(lu)) <= np.finfo(float).eps * max(1.0, np.abs(A).max()) * m):
            raise SingularChain("balance system is rank deficient")
        pi = scipy.linalg.lu_solve((lu, piv), rhs)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularChain(str(exc)) from exc
    pi[np.abs(pi) < 1e-15] = 0.0
    if np.any(pi < -1e-12):
        raise SingularChain(f"negative stationary probabilities {pi}")
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    residual = float(np.max(np.abs(pi @ Q))) if m > 1 else 0.0
    return StationaryDist(pi, residual)


def assemble(model: ShsModel, check: bool = True) -> SystemMatrices:
    """Block matrices D, B, R with ``v D = pi B + v R`` at the fixed point.

    Rows and columns of R belonging to irrelevant variables are zeroed, since
    those variables are held at zero.
    """
    if check:
        _require_valid(model)
    m, n1 = model.num_states, model.cont_dim
    size = m * n1
    d = np.diag(np.repeat(model.departure_rates(), n1))
    b_mat = np.zeros((m, size))
    for q in range(m):
        b_mat[q, q * n1:(q + 1) * n1] = model.b[q]
    r = np.zeros((size, size))
    for t in model.transitions:
        r[t.src * n1:(t.src + 1) * n1, t.dst * n1:(t.dst + 1) * n1] += t.rate * t.reset
    relevant = model.relevant_mask()
    r[~relevant, :] = 0.0
    r[:, ~relevant] = 0.0
    b_mat[:, ~relevant] = 0.0
    return SystemMatrices(d, b_mat, r, relevant)


def check_stability(model: ShsModel, mats: Optional[SystemMatrices] = None):
    """Return ``(stable, spectral_abscissa)`` of R_hat - D_hat."""
    if mats is None:
        mats = assemble(model)
    _, r_hat, d_hat = mats.reduced()
    if r_hat.size == 0:
        return True, float("-inf")
    try:
        eig = np.linalg.eigvals(r_hat - d_hat)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvalue computation failed: {exc}") from exc
    if not np.all(np.isfinite(eig)):
        raise NumericError("non-finite eigenvalues")
    abscissa = float(np.max(eig.real))
    scale = max(1.0, float(np.max(np.diag(d_hat))))
    if abs(abscissa) <= ZERO_TOL * scale:
        abscissa = 0.0
    return abscissa < 0.0, abscissa


def fixed_point_residual(mats: SystemMatrices, pi: np.ndarray, v_flat: np.ndarray) -> float:
    return float(np.max(np.abs(v_flat @ mats.d - pi @ mats.b_mat - v_flat @ mats.r)))


def solve_age(model: ShsModel, neg_tol: float = NEG_TOL) -> AgeSolution:
    """Average age ``sum_q v_q0`` from the stationary correlation vectors."""
    _require_valid(model)
    st = stationary(model, check=False)
    mats = assemble(model, check=False)
    stable, abscissa = check_stability(model, mats)
    if not stable:
        raise UnstableModel(abscissa)
    b_hat, r_hat, d_hat = mats.reduced()
    rhs = st.pi @ b_hat
    try:
        lu, piv = scipy.linalg.lu_factor((d_hat - r_hat).T)
        v_hat = scipy.linalg.lu_solve((lu, piv), rhs)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"singular age system: {exc}") from exc
    if np.any(v_hat < -neg_tol):
        raise NegativeSolution(f"negative correlation vector entries: min {v_hat.min():.3e}")
    v_hat = np.where(v_hat < 0.0, 0.0, v_hat)
    v_flat = np.zeros(model.size)
    v_flat[mats.relevant] = v_hat
    v = v_flat.reshape(model.num_states, model.cont_dim)
    age = float(np.sum(v[:, 0]))
    residual = fixed_point_residual(mats, st.pi, v_flat)
    return AgeSolution(st, v, age, stable, abscissa, residual)

"""Fixed-step RK4 integration of the moment ODEs for pi(t) and v(t)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ShsModel
from .solver import assemble


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    pi_t: np.ndarray  # (samples, num_states)
    v_t: np.ndarray  # (samples, num_states, cont_dim)

    def ages(self) -> np.ndarray:
        """E[x_0(t)] at each sample."""
        return self.v_t[:, :, 0].sum(axis=1)


def transient(model: ShsModel, pi0, v0=None, t_end: float = 10.0, dt: float = 0.01,
              sample_every: int = 1) -> Trajectory:
    pi0 = np.asarray(pi0, dtype=float)
    if pi0.shape != (model.num_states,):
        raise ValueError(f"pi0 must have length {model.num_states}")
    if np.any(pi0 < 0) or abs(pi0.sum() - 1.0) > 1e-12:
        raise ValueError("pi0 must be a probability vector")
    if v0 is None:
        v0 = np.zeros(model.size)
    v0 = np.asarray(v0, dtype=float).reshape(model.size)
    if not (dt > 0 and t_end > 0):
        raise ValueError("dt and t_end must be positive")
    mats = assemble(model)
    dmax = float(np.max(np.diag(mats.d))) if model.size else 0.0
    if dmax > 0 and dt > 0.1 / dmax:
        raise ValueError(f"step size {dt} rejected: must be <= 0.1/max(D) = {0.1 / dmax:.4g}")

    Q = model.generator()
    rd = mats.r - mats.d
    bm = mats.b_mat

    def f(pi, v):
        return pi @ Q, pi @ bm + v @ rd

    steps = int(np.ceil(t_end / dt - 1e-9))
    h = t_end / steps
    times = [0.0]
    pis = [pi0.copy()]
    vs = [v0.copy()]
    pi, v = pi0.copy(), v0.copy()
    for k in range(1, steps + 1):
        k1p, k1v = f(pi, v)
        k2p, k2v = f(pi + 0.5 * h * k1p, v + 0.5 * h * k1v)
        k3p, k3v = f(pi + 0.5 * h * k2p, v + 0.5 * h * k2v)
        k4p, k4v = f(pi + h * k3p, v + h * k3v)
        pi = pi + (h / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p)
        v = v + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        if k % sample_every == 0 or k == steps:
            times.append(k * h)
            pis.append(pi.copy())
            vs.append(v.copy())
    return Trajectory(np.array(times), np.array(pis),
                      np.array(vs).reshape(len(times), model.num_states, model.cont_dim))

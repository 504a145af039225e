"""Builders for the two-source LCFS SHS models (source 1 tracked, source 2 = all others)."""
from __future__ import annotations

from ..errors import InvalidLoads
from .model import ShsModel, Transition

KINDS = ("lcfs_s_3state", "lcfs_s_2state", "lcfs_s_fake", "lcfs_w")


def _rates(lambda1, lambda2, mu):
    if not lambda1 > 0:
        raise InvalidLoads(f"lambda1 must be > 0, got {lambda1}")
    if not lambda2 >= 0:
        raise InvalidLoads(f"lambda2 must be >= 0, got {lambda2}")
    if not mu > 0:
        raise InvalidLoads(f"mu must be > 0, got {mu}")


def _build(num_states, dim, b, irrelevant, rows):
    # rows: (src, dst, rate, mapping); zero-rate transitions are dropped.
    transitions = [Transition.from_mapping(s, d, r, mp, dim) for s, d, r, mp in rows if r > 0]
    return ShsModel(num_states, dim, b, tuple(transitions), tuple(irrelevant))


def lcfs_s_3state(lambda1, lambda2, mu) -> ShsModel:
    """States: 0 idle, 1 source-1 update in service, 2 other update in service."""
    _rates(lambda1, lambda2, mu)
    rows = [
        (0, 1, lambda1, [0, None]),
        (0, 2, lambda2, [0, None]),
        (1, 0, mu, [1, None]),
        (1, 1, lambda1, [0, None]),
        (1, 2, lambda2, [0, None]),
        (2, 0, mu, [0, None]),
        (2, 1, lambda1, [0, None]),
    ]
    if lambda2 == 0:
        # state 2 becomes unreachable; keep the chain irreducible by dropping it
        return _build(2, 2, [[1, 0], [1, 1]], [[1], []],
                      [r for r in rows if 2 not in (r[0], r[1])])
    return _build(3, 2, [[1, 0], [1, 1], [1, 0]], [[1], [], [1]], rows)


def lcfs_s_2state(lambda1, lambda2, mu) -> ShsModel:
    """States: 0 idle, 1 busy; x_1 is the age the monitor would get on delivery."""
    _rates(lambda1, lambda2, mu)
    rows = [
        (0, 1, lambda1, [0, None]),
        (0, 1, lambda2, [0, 0]),
        (1, 0, mu, [1, None]),
        (1, 1, lambda1, [0, None]),
        (1, 1, lambda2, [0, 0]),
    ]
    return _build(2, 2, [[1, 0], [1, 1]], [[1], []], rows)


def lcfs_s_fake(lambda1, lambda2, mu) -> ShsModel:
    """Single always-busy state; a delivery leaves a fake copy of itself in service."""
    _rates(lambda1, lambda2, mu)
    rows = [
        (0, 0, lambda1, [0, None]),
        (0, 0, lambda2, [0, 0]),
        (0, 0, mu, [1, 1]),
    ]
    return _build(1, 2, [[1, 1]], [[]], rows)


def lcfs_w(lambda1, lambda2, mu) -> ShsModel:
    """States count updates in system (0, 1, 2); x_2 tracks the waiting update."""
    _rates(lambda1, lambda2, mu)
    rows = [
        (0, 1, lambda1, [0, None, None]),
        (0, 1, lambda2, [0, 0, None]),
        (1, 0, mu, [1, None, None]),
        (1, 2, lambda1, [0, 1, None]),
        (1, 2, lambda2, [0, 1, 1]),
        (2, 1, mu, [1, 2, None]),
        (2, 2, lambda1, [0, 1, None]),
        (2, 2, lambda2, [0, 1, 1]),
    ]
    return _build(3, 3, [[1, 0, 0], [1, 1, 0], [1, 1, 1]], [[1, 2], [2], []], rows)


_BUILDERS = {
    "lcfs_s_3state": lcfs_s_3state,
    "lcfs_s_2state": lcfs_s_2state,
    "lcfs_s_fake": lcfs_s_fake,
    "lcfs_w": lcfs_w,
}


def build_reference_model(kind: str, lambda1: float, lambda2: float, mu: float) -> ShsModel:
    key = kind.strip().lower().replace("-", "_")
    try:
        builder = _BUILDERS[key]
    except KeyError:
        raise ValueError(f"unknown model kind {kind!r}; expected one of {', '.join(KINDS)}") from None
    return builder(lambda1, lambda2, mu)

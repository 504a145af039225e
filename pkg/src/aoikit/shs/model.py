"""Piecewise-linear SHS with binary linear reset maps."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np


@dataclass(frozen=True)
class Transition:
    """Transition ``src -> dst`` at ``rate`` applying ``x' = x @ reset``."""

    src: int
    dst: int
    rate: float
    reset: np.ndarray

    def __post_init__(self):
        reset = np.array(self.reset, dtype=float)
        reset.setflags(write=False)
        object.__setattr__(self, "reset", reset)
        object.__setattr__(self, "rate", float(self.rate))

    @classmethod
    def from_mapping(cls, src, dst, rate, mapping: Sequence, dim: int) -> "Transition":
        """Build from a target list: ``mapping[j]`` is the source index of ``x'_j`` or None (reset to 0).

        ``[1, None]`` encodes ``x' = [x_1, 0]``.
        """
        a = np.zeros((dim, dim))
        for j, i in enumerate(mapping):
            if i is not None:
                a[i, j] = 1.0
        return cls(src, dst, rate, a)


@dataclass(frozen=True)
class ShsModel:
    num_states: int
    cont_dim: int
    b: np.ndarray
    transitions: tuple
    irrelevant: tuple = field(default=())

    def __post_init__(self):
        b = np.array(self.b, dtype=float).reshape(self.num_states, self.cont_dim)
        b.setflags(write=False)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "transitions", tuple(self.transitions))
        irr = tuple(frozenset(int(j) for j in s) for s in self.irrelevant)
        if not irr:
            irr = tuple(frozenset() for _ in range(self.num_states))
        object.__setattr__(self, "irrelevant", irr)

    @property
    def size(self) -> int:
        return self.num_states * self.cont_dim

    def index(self, q: int, j: int) -> int:
        return q * self.cont_dim + j

    def relevant_mask(self) -> np.ndarray:
        mask = np.ones(self.size, dtype=bool)
        for q, irr in enumerate(self.irrelevant):
            for j in irr:
                if 0 <= j < self.cont_dim:
                    mask[self.index(q, j)] = False
        return mask

    def departure_rates(self) -> np.ndarray:
        d = np.zeros(self.num_states)
        for t in self.transitions:
            d[t.src] += t.rate
        return d

    def generator(self) -> np.ndarray:
        """CTMC generator of the discrete state; self-transitions cancel out."""
        Q = np.zeros((self.num_states, self.num_states))
        for t in self.transitions:
            if t.src != t.dst:
                Q[t.src, t.dst] += t.rate
                Q[t.src, t.src] -= t.rate
        return Q

    def with_transitions(self, transitions) -> "ShsModel":
        return ShsModel(self.num_states, self.cont_dim, self.b, tuple(transitions), self.irrelevant)

    # JSON schema: reset matrices are stored as the [row, col] positions of their ones.
    def to_dict(self) -> dict:
        return {
            "num_states": self.num_states,
            "cont_dim": self.cont_dim,
            "b": [[int(v) for v in row] for row in self.b],
            "irrelevant": [sorted(s) for s in self.irrelevant],
            "transitions": [
                {
                    "from": t.src,
                    "to": t.dst,
                    "rate": t.rate,
                    "reset": [[int(r), int(c)] for r, c in zip(*np.nonzero(t.reset))],
                }
                for t in self.transitions
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ShsModel":
        m1 = int(d["num_states"])
        n1 = int(d["cont_dim"])
        transitions: List[Transition] = []
        for td in d["transitions"]:
            a = np.zeros((n1, n1))
            for r, c in td.get("reset", []):
                a[int(r), int(c)] = 1.0
            transitions.append(Transition(int(td["from"]), int(td["to"]), float(td["rate"]), a))
        irr = d.get("irrelevant") or [[] for _ in range(m1)]
        return cls(m1, n1, np.array(d["b"], dtype=float), tuple(transitions), tuple(irr))

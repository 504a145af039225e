"""Source loads, queue disciplines and load arithmetic."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidLoads


class Discipline(str, enum.Enum):
    FCFS = "fcfs"
    LCFS_S = "lcfs-s"
    LCFS_W = "lcfs-w"

    @classmethod
    def parse(cls, text: "str | Discipline") -> "Discipline":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("_", "-")
        for d in cls:
            if d.value == key:
                return d
        raise ValueError(f"unknown discipline {text!r}; expected one of "
                         + ", ".join(d.value for d in cls))

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SourceLoads:
    """Shared service rate ``mu`` and per-source offered loads ``rho_i = lambda_i / mu``."""

    mu: float
    rhos: tuple

    def __post_init__(self):
        rhos = tuple(float(r) for r in self.rhos)
        object.__setattr__(self, "rhos", rhos)
        object.__setattr__(self, "mu", float(self.mu))
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise InvalidLoads(f"service rate must be > 0, got {self.mu}")
        if len(rhos) < 1:
            raise InvalidLoads("at least one source is required")
        for r in rhos:
            if not (math.isfinite(r) and r > 0):
                raise InvalidLoads(f"per-source loads must be finite and > 0, got {r}")

    @classmethod
    def from_rates(cls, lambdas: Sequence[float], mu: float) -> "SourceLoads":
        if not mu > 0:
            raise InvalidLoads(f"service rate must be > 0, got {mu}")
        return cls(mu, tuple(float(l) / mu for l in lambdas))

    @classmethod
    def from_dict(cls, d: dict) -> "SourceLoads":
        return cls(d["mu"], tuple(d["rhos"]))

    def to_dict(self) -> dict:
        return {"mu": self.mu, "rhos": list(self.rhos)}

    @property
    def n(self) -> int:
        return len(self.rhos)

    @property
    def lambdas(self) -> tuple:
        return tuple(r * self.mu for r in self.rhos)

    def total(self) -> float:
        return math.fsum(self.rhos)

    def other_load(self, i: int) -> float:
        if not 0 <= i < len(self.rhos):
            raise IndexError(f"source index {i} out of range for {len(self.rhos)} sources")
        return math.fsum(r for j, r in enumerate(self.rhos) if j != i)

    def scaled(self, factor: float) -> "SourceLoads":
        return SourceLoads(self.mu, tuple(r * factor for r in self.rhos))


@dataclass(frozen=True)
class AgeVector:
    ages: tuple

    def __post_init__(self):
        object.__setattr__(self, "ages", tuple(float(a) for a in self.ages))

    def __len__(self):
        return len(self.ages)

    def __getitem__(self, i):
        return self.ages[i]

    def total(self) -> float:
        return math.fsum(self.ages)


def total_load(loads: SourceLoads) -> float:
    return loads.total()


def other_load(loads: SourceLoads, i: int) -> float:
    return loads.other_load(i)


def parse_rhos(text: str) -> tuple:
    """Parse a comma separated list such as ``"0.3,0.3"``."""
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise InvalidLoads(f"cannot parse load list {text!r}") from exc

"""scikit-learn style wrappers over the closed-form, SHS and simulation back ends.

``X`` is always a 2-D array of per-source offered loads, one scenario per row.
"""
import numpy as np
from sklearn.base import BaseEstimator

from . import closed_form as cf
from .core import Discipline, SourceLoads
from .shs import ShsModel, solve_age
from .sim import SimConfig, simulate
from .validation import check_is_fitted, check_loads_array, check_rate


class ClosedFormAge(BaseEstimator):
    """Per-source average age from the analytic formulas."""

    def __init__(self, discipline="fcfs", mu=1.0):
        self.discipline = discipline
        self.mu = mu

    def fit(self, X=None, y=None):
        self.discipline_ = Discipline.parse(self.discipline)
        self.mu_ = check_rate(self.mu)
        return self

    def predict(self, X):
        check_is_fitted(self, ["discipline_"])
        arr = check_loads_array(X)
        return np.array([cf.ages(SourceLoads(self.mu_, tuple(row)), self.discipline_).ages
                         for row in arr])

    def transform(self, X):
        """Sum age per scenario, as a column."""
        return self.predict(X).sum(axis=1, keepdims=True)


class SHSAgeSolver(BaseEstimator):
    """Stationary SHS solve; ``fit`` takes a model and stores pi_, v_ and age_."""

    def __init__(self, check=True):
        self.check = check

    def fit(self, model: ShsModel, y=None):
        sol = solve_age(model)
        self.solution_ = sol
        self.pi_ = sol.pi
        self.v_ = sol.v
        self.age_ = sol.age
        self.spectral_abscissa_ = sol.spectral_abscissa
        return self

    def predict(self, X=None):
        check_is_fitted(self, ["age_"])
        return np.array([self.age_])


class QueueSimulator(BaseEstimator):
    """Monte Carlo age estimates; ``predict`` returns per-source time-average ages."""

    def __init__(self, discipline="fcfs", mu=1.0, horizon=1e6, warmup_fraction=0.1,
                 seed=0, reps=1):
        self.discipline = discipline
        self.mu = mu
        self.horizon = horizon
        self.warmup_fraction = warmup_fraction
        self.seed = seed
        self.reps = reps

    def fit(self, X=None, y=None):
        self.discipline_ = Discipline.parse(self.discipline)
        self.mu_ = check_rate(self.mu)
        return self

    def simulate(self, row):
        check_is_fitted(self, ["discipline_"])
        cfg = SimConfig(SourceLoads(self.mu_, tuple(float(r) for r in row)), self.discipline_,
                        self.horizon, warmup_fraction=self.warmup_fraction, seed=self.seed,
                        reps=self.reps)
        return simulate(cfg)

    def predict(self, X):
        arr = check_loads_array(X)
        self.results_ = [self.simulate(row) for row in arr]
        return np.array([r.ages() for r in self.results_])

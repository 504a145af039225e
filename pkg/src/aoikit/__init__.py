"""Average age of information for multi-source M/M/1 status-update queues.

Closed forms, a stochastic hybrid system solver, a Monte Carlo simulator and
load-region analyses, exposed through the ``aoi`` command.
"""
from .core import AgeVector, Discipline, SourceLoads
from .errors import AoIError, InvalidLoads, UnstableLoad, UnstableModel
from . import closed_form, region
from .estimators import ClosedFormAge, QueueSimulator, SHSAgeSolver

__all__ = ["AgeVector", "Discipline", "SourceLoads", "AoIError", "InvalidLoads", "UnstableLoad",
           "UnstableModel", "closed_form", "region", "ClosedFormAge", "QueueSimulator",
           "SHSAgeSolver"]

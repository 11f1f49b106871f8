"""Simulator and analytics for a fitness-ranked birth-death model of type phylogenies.

Types are born at a per-capita rate, each marked with an independent uniform
fitness; deaths always remove the currently least-fit type and never the last
one standing.  The package provides exact event-driven simulation of that
population, phylogenetic tree construction over the types, closed-form
first-passage moment tables for the supercritical size chain, and Monte Carlo
estimators for how long the dominant (fittest) type persists.
"""

__version__ = "0.1.0"

from .errors import ExplosionError, InvariantViolationError
from .population import (
    EventKind,
    EventLog,
    Ledger,
    PopulationState,
    SimConfig,
    SimResult,
    Snapshot,
    TypeRecord,
    apply_birth,
    apply_death,
    next_event,
    simulate,
    simulate_counts,
    snapshot_counts,
)
from .seeding import derive_seed, make_generator, splitmix64

__all__ = [
    "EventKind",
    "EventLog",
    "ExplosionError",
    "InvariantViolationError",
    "Ledger",
    "PopulationState",
    "SimConfig",
    "SimResult",
    "Snapshot",
    "TypeRecord",
    "apply_birth",
    "apply_death",
    "derive_seed",
    "make_generator",
    "next_event",
    "simulate",
    "simulate_counts",
    "snapshot_counts",
    "splitmix64",
    "__version__",
]

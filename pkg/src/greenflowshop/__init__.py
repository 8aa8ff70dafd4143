"""Energy-aware distributed flow-shop scheduling: model, solvers, benchmarks."""

from .encoding import Genotype, flatten, random_genotype, unflatten, validate
from .kdma import KdmaParams, ParetoArchive, RunStats, run_kdma
from .model import (
    GenotypeError,
    Instance,
    ObjectivePoint,
    Schedule,
    carbon_aux,
    carbon_idle,
    carbon_run,
    check_constraints,
    decode,
    evaluate,
    makespan,
)
from .baselines import (
    SizeGuardError,
    brute_force_pareto,
    random_search,
    run_nsga2,
    simulate_schedule,
)

__version__ = "0.1.0"

__all__ = [
    "Genotype",
    "GenotypeError",
    "Instance",
    "KdmaParams",
    "ObjectivePoint",
    "ParetoArchive",
    "RunStats",
    "Schedule",
    "SizeGuardError",
    "brute_force_pareto",
    "carbon_aux",
    "carbon_idle",
    "carbon_run",
    "check_constraints",
    "decode",
    "evaluate",
    "flatten",
    "makespan",
    "random_genotype",
    "random_search",
    "run_kdma",
    "run_nsga2",
    "simulate_schedule",
    "unflatten",
    "validate",
]

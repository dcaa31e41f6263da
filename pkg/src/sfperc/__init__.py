"""Percolation on configuration models with power-law degrees.

Degree sequences, percolated multigraphs, the breadth-first exploration
walk, the limiting thinned jump process, near-critical predictions and a
seeded experiment harness.
"""

from .degrees import (
    CaseTag,
    DegreeSequence,
    ThetaSequence,
    iid_degrees,
    load_degrees,
    quantile_degrees,
    save_degrees,
    theta_limits,
    validate_assumption1,
)
from .errors import SfpercError
from .explore import ComponentRecord, ZVector, component_table, components_from_trace, d_U, explore, z_vector
from .graph import MultiGraph, configuration_model, percolate_fountoulakis, percolate_retain
from .harness import ExperimentConfig, Report, run_experiment
from .limit import excursion_table, excursions, simulate_limit_path, z_limit
from .nearcritical import kappa, laplace_check, subcritical_prediction, supercritical_prediction
from .params import ModelParams, critical_p, criticality_parameter, exponents
from .rng import stream
from .stats import fit_exponent, ks_distance

__version__ = "0.1.0"

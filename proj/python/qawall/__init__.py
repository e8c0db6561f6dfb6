"""Moving-wall quantum control.

Path and config arguments are JSON strings on the extension side; the
wrappers below accept and return plain Python objects.
"""

import json

from . import _qawall
from ._qawall import (
    QawallError,
    crossing_points,
    eigenpairs,
    grid_points,
    growth_orbit,
    growth_rate,
    growth_trajectory,
    ideal_label,
    ideal_rank,
    ideal_value,
    permutation,
    permutation_by_crossings,
    potential,
    ramp_profile,
    sine_mode,
    step,
)

__all__ = [
    "QawallError",
    "crossing_points",
    "default_config",
    "eigenpairs",
    "grid_points",
    "growth_orbit",
    "growth_rate",
    "growth_trajectory",
    "ideal_label",
    "ideal_rank",
    "ideal_value",
    "permutation",
    "permutation_by_crossings",
    "potential",
    "propagate",
    "propagate_backward",
    "ramp_profile",
    "run",
    "sine_mode",
    "step",
    "theorem1_path",
]


def _doc(path):
    return path if isinstance(path, str) else json.dumps(path)


def propagate(psi, path, dt_target=1e-2):
    return _qawall.propagate(psi, _doc(path), dt_target)


def propagate_backward(psi, path, dt_target=1e-2):
    return _qawall.propagate_backward(psi, _doc(path), dt_target)


def theorem1_path(a_i, a_f, N, epsilon, kappa, **options):
    """Returns (control path dict, sigma, M)."""
    doc, sigma, closure = _qawall.theorem1_path(a_i, a_f, N, epsilon, kappa, **options)
    return json.loads(doc), sigma, closure


def default_config(command):
    return json.loads(_qawall.default_config(command))


def run(command, **overrides):
    """Runs a CLI command in-process and returns its manifest."""
    return json.loads(_qawall.run_command(command, json.dumps(overrides)))

"""Numerical laboratory for symmetry breaking in finite quantum and classical systems.

Modules:
    potentials   one-dimensional wells, instanton actions and splitting estimates
    hilbert      grid Hamiltonians, eigensolver, states, projectors, evolution
    histories    decoherence functional and consistency classification
    twolevel     sequential L/R measurements on the lowest doublet
    classical    canonical sampling, trajectories and side correlations
    lattice      2D Ising signatures of broken symmetry
    sigma        average-phase sector on the circle
    estimates    macroscopic order-of-magnitude estimates
    cli          config-driven experiment runner
"""

from importlib import metadata as _metadata

try:
    __version__ = _metadata.version("artifact")
except _metadata.PackageNotFoundError:  # running from a source tree
    __version__ = "0+unknown"

from .errors import SSBLabError  # noqa: E402

__all__ = ["SSBLabError", "__version__"]

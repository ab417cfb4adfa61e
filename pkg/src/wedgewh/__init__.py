"""Numerical Wiener-Hopf toolkit for diffraction by a penetrable right-angled wedge.

Modules:

* :mod:`wedgewh.complexfn` - square root and logarithm with fixed cuts, regions.
* :mod:`wedgewh.kernel` - wave parameters, forcing, kernel and its alpha1 factors.
* :mod:`wedgewh.cauchy` - sum-splits, log factorisation, the four kernel factors.
* :mod:`wedgewh.spectra` - Radlow's ansatz, correction, compatibility, diagnostics.
* :mod:`wedgewh.fields` - inverse transforms and physical-space checks.
* :mod:`wedgewh.portraits` - phase portraits and discontinuity detection.
* :mod:`wedgewh.cli` - command line front end.
"""

from .complexfn import RegionKind, RegionSpec, kappa, mylog, mysqrt, region_contains
from .errors import (
    AccuracyError,
    BranchCrossingError,
    ConfigurationError,
    DomainError,
    PoleError,
    ProbeError,
    ProximityError,
    UsageError,
    WedgeError,
)
from .kernel import (
    K_minus_circ,
    K_plus_circ,
    SpectralPoint,
    WaveParams,
    forcing_P,
    kernel_K,
    make_params,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "BranchCrossingError",
    "ConfigurationError",
    "DomainError",
    "K_minus_circ",
    "K_plus_circ",
    "PoleError",
    "ProbeError",
    "ProximityError",
    "RegionKind",
    "RegionSpec",
    "SpectralPoint",
    "UsageError",
    "WaveParams",
    "WedgeError",
    "forcing_P",
    "kappa",
    "kernel_K",
    "make_params",
    "mylog",
    "mysqrt",
    "region_contains",
]

"""Ensemble forecast calibration: BMA and EMOS post-processing with CRPS
verification. Thin wrapper over the C++ core; see the _enscal extension for
the full surface."""

from ._enscal import *  # noqa: F401,F403

__version__ = "0.1.0"

"""Global tolerances shared by every module."""

import os

#: relative distance under which two roots are considered equal
ROOT_TOL = 1e-8
#: poles with ``|1 - |p|| < CIRCLE_BAND`` are rejected (symbol not in L-infinity)
CIRCLE_BAND = 1e-6
#: target for certified section tails
SECTION_EPS = 1e-10
#: default verdict tolerance; ``TOEPLITZ_LAB_TOL`` overrides it
DEFAULT_TOL = 1e-8


def verdict_tol() -> float:
    raw = os.environ.get("TOEPLITZ_LAB_TOL")
    if raw is None or not raw.strip():
        return DEFAULT_TOL
    value = float(raw)
    if not value > 0:
        raise ValueError(f"TOEPLITZ_LAB_TOL must be positive, got {raw!r}")
    return value
#: kernel-invariance residual accepted at section scale
INVARIANCE_TOL = 1e-7

"""Green's kernels of the three-point fractional boundary value problem.

The solution operator is an integral against K(t, s) = G(t, s) + H(eta, s),
where G carries the fractional order alpha and H the order alpha - 1.  Both
kernels are piecewise closed forms split along the diagonal s = t; at the
seam the two branches agree, and the upper branch is evaluated there.  The
envelope Phi(s) dominates K pointwise and equals G(s, s) + H(s, s).
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "KernelParams",
    "g_kernel",
    "h_kernel",
    "k_kernel",
    "phi_envelope",
    "cone_gamma",
]

# Grid arithmetic may drive arguments out of [0, 1] by a few ulps; anything
# beyond this is treated as a caller bug.
_EDGE_SLACK = 1e-14


@dataclass(frozen=True)
class KernelParams:
    """Order alpha in (2, 3] and interior boundary point eta in (0, 1)."""

    alpha: float
    eta: float

    def __post_init__(self):
        if not (isinstance(self.alpha, (int, float)) and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be finite, got {self.alpha!r}")
        if not 2.0 < self.alpha <= 3.0:
            raise ValueError(f"alpha must lie in (2, 3], got {self.alpha}")
        if not (isinstance(self.eta, (int, float)) and math.isfinite(self.eta)):
            raise ValueError(f"eta must be finite, got {self.eta!r}")
        if not 0.0 < self.eta < 1.0:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")


def _clip_unit(name: str, x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(arr < -_EDGE_SLACK) or np.any(arr > 1.0 + _EDGE_SLACK):
        bad = arr[(arr < -_EDGE_SLACK) | (arr > 1.0 + _EDGE_SLACK)].flat[0]
        raise ValueError(f"{name} outside [0, 1]: {bad!r}")
    return np.clip(arr, 0.0, 1.0)


def _scalar_like(value: np.ndarray, *inputs) -> float | np.ndarray:
    if all(np.isscalar(x) or np.ndim(x) == 0 for x in inputs):
        return float(value)
    return value


def _branch(t: np.ndarray, s: np.ndarray, expo: float, gamma_value: float):
    """((1-s)^expo - (t-s)^expo) / Gamma on s < t, (1-s)^expo / Gamma on s >= t."""
    t, s = np.broadcast_arrays(t, s)
    upper = (1.0 - s) ** expo
    lower = np.where(s < t, np.maximum(t - s, 0.0) ** expo, 0.0)
    return (upper - lower) / gamma_value


def g_kernel(kp: KernelParams, t, s):
    """Kernel G(t, s) with exponent alpha - 1."""
    tv = _clip_unit("t", t)
    sv = _clip_unit("s", s)
    return _scalar_like(_branch(tv, sv, kp.alpha - 1.0, math.gamma(kp.alpha)), t, s)


def h_kernel(kp: KernelParams, t, s):
    """Kernel H(t, s) with exponent alpha - 2."""
    tv = _clip_unit("t", t)
    sv = _clip_unit("s", s)
    return _scalar_like(_branch(tv, sv, kp.alpha - 2.0, math.gamma(kp.alpha - 1.0)), t, s)


def k_kernel(kp: KernelParams, t, s):
    """Combined kernel K(t, s) = G(t, s) + H(eta, s); note the fixed eta slot."""
    tv = _clip_unit("t", t)
    sv = _clip_unit("s", s)
    value = _branch(tv, sv, kp.alpha - 1.0, math.gamma(kp.alpha)) + _branch(
        np.asarray(kp.eta), sv, kp.alpha - 2.0, math.gamma(kp.alpha - 1.0)
    )
    return _scalar_like(value, t, s)


def phi_envelope(kp: KernelParams, s):
    """Envelope Phi(s) = (alpha - s)(1 - s)^(alpha - 2) / Gamma(alpha).

    Pointwise upper bound for K; equals G(s, s) + H(s, s).
    """
    sv = _clip_unit("s", s)
    a = kp.alpha
    value = (a - sv) * (1.0 - sv) ** (a - 2.0) / math.gamma(a)
    return _scalar_like(value, s)


def cone_gamma(kp: KernelParams, rho: float) -> float:
    """Cone constant gamma = (1 - eta^(alpha-2)) (1 - rho^(alpha-1)) in (0, 1)."""
    rho = float(rho)
    if not (math.isfinite(rho) and 0.0 < rho < 1.0):
        raise ValueError(f"rho must lie in (0, 1), got {rho!r}")
    a = kp.alpha
    return (1.0 - kp.eta ** (a - 2.0)) * (1.0 - rho ** (a - 1.0))

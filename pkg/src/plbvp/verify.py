"""Independent certification of computed solutions.

A true solution satisfies u(t) = u(0) - I^alpha[phi_q(F)](t) with
F(s) = int_0^s a f(., u), where I^alpha is the fractional integral of order
alpha.  This module re-evaluates that identity by quadrature (a route
disjoint from the solver's kernel representation), checks the three
boundary conditions by one-sided finite differences, and measures the
cone inequality min_[0,rho] u >= gamma ||u||.

Direct numerical fractional differentiation of sampled data is deliberately
avoided: for orders in (2, 3] it is badly conditioned, while the integral
identity above is exact for continuous solutions.
"""

import math
from dataclasses import dataclass

import numpy as np

from .greens import KernelParams, cone_gamma
from .plaplacian import phi
from .quadrature import GridFunction, cumulative, gridded_rule
from .solver import KERNEL_MIN_POINTS, Problem

__all__ = [
    "VerificationReport",
    "integral_form_residual",
    "boundary_residuals",
    "cone_check",
    "fractional_route",
    "verification_report",
    "fd_weights",
]

MIN_BOUNDARY_NODES = 16
_DENSE_SAMPLES = 2048


@dataclass(frozen=True)
class VerificationReport:
    """Residual diagnostics; raw values, no thresholding applied."""

    integral_form_residual: float
    bc_residuals: tuple  # (|u'(0)|, |u''(0)|, |u(1) + u'(1) - u'(eta)|)
    positivity_min: float
    cone_slack: float
    sup_norm: float


def fd_weights(x0: float, xs, m: int) -> np.ndarray:
    """Finite-difference weights for the m-th derivative at x0 on nodes xs.

    Fornberg's recurrence; exact for polynomials of degree len(xs) - 1.
    """
    xs = np.asarray(xs, dtype=float)
    n = xs.size
    if m >= n:
        raise ValueError("need more nodes than the derivative order")
    c = np.zeros((n, m + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = xs[0] - x0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for s in range(mn, 0, -1):
                    c[i, s] = c1 * (s * c[i - 1, s - 1] - c5 * c[i - 1, s]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for s in range(mn, 0, -1):
                c[j, s] = (c4 * c[j, s] - s * c[j, s - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def _phi_q_of_cumulative(pb_q: float, density: GridFunction):
    F = cumulative(density)
    return lambda s: phi(pb_q, F(s))


def _fractional_integral_at_nodes(alpha: float, g, partition_nodes: np.ndarray,
                                  points: int) -> np.ndarray:
    """I^alpha[g](t_i) = 1/Gamma(alpha) int_0^t_i (t_i - s)^(alpha-1) g(s) ds."""
    ga = math.gamma(alpha)
    out = np.zeros_like(partition_nodes)
    for i, t in enumerate(partition_nodes):
        if t <= 0.0:
            continue
        xs, ws = gridded_rule(partition_nodes, 0.0, t, points)
        kern = np.maximum(t - xs, 0.0) ** (alpha - 1.0) / ga
        out[i] = float(ws @ (kern * np.asarray(g(xs), dtype=float)))
    return out


def fractional_route(kp: KernelParams, q: float, h: GridFunction,
                     points: int = KERNEL_MIN_POINTS) -> GridFunction:
    """Solution of the BVP with source density h via the fractional-integral
    form u(t) = C0 - I^alpha[phi_q(F)](t), with C0 fixed by the three-point
    boundary condition.

    Numerically independent of the kernel representation in
    :func:`plbvp.solver.kernel_route`; the two must agree for any
    nonnegative density.
    """
    points = max(points, KERNEL_MIN_POINTS)
    alpha, eta = kp.alpha, kp.eta
    nodes = h.partition.nodes
    g = _phi_q_of_cumulative(q, h)
    ga = math.gamma(alpha)
    gam1 = math.gamma(alpha - 1.0)

    def integral(lo, hi, kern):
        xs, ws = gridded_rule(nodes, lo, hi, points)
        return float(ws @ (kern(xs) * np.asarray(g(xs), dtype=float)))

    c0 = (
        integral(0.0, 1.0, lambda s: (1.0 - s) ** (alpha - 1.0) / ga)
        + integral(0.0, 1.0, lambda s: (1.0 - s) ** (alpha - 2.0) / gam1)
        - integral(0.0, eta, lambda s: np.maximum(eta - s, 0.0) ** (alpha - 2.0) / gam1)
    )
    ialpha = _fractional_integral_at_nodes(alpha, g, nodes, points)
    return h.with_values(c0 - ialpha)


def integral_form_residual(pb: Problem, u: GridFunction) -> float:
    """Sup-norm of r(t) = u(t) - u(0) + I^alpha[phi_q(F)](t) over the nodes."""
    if float(np.min(u.values)) < -1e-12:
        raise ValueError("u must be nonnegative")
    g = _phi_q_of_cumulative(pb.q, pb.density(u))
    points = max(pb.discretization.points_per_panel, KERNEL_MIN_POINTS)
    ialpha = _fractional_integral_at_nodes(pb.alpha, g, u.partition.nodes, points)
    r = u.values - u.values[0] + ialpha
    return float(np.max(np.abs(r)))


def boundary_residuals(pb: Problem, u: GridFunction) -> tuple:
    """(|u'(0)|, |u''(0)|, |u(1) + u'(1) - u'(eta)|) by 4-point stencils.

    Derivatives at the ends come from one-sided 4-node stencils; u'(eta)
    from the 4 nodes nearest eta (polynomial interpolation differentiated
    at eta).
    """
    nodes = u.partition.nodes
    if nodes.size < MIN_BOUNDARY_NODES:
        raise ValueError(
            f"grid too coarse for boundary stencils: {nodes.size} < {MIN_BOUNDARY_NODES}")
    vals = u.values
    d1_0 = float(fd_weights(nodes[0], nodes[:4], 1) @ vals[:4])
    d2_0 = float(fd_weights(nodes[0], nodes[:4], 2) @ vals[:4])
    d1_1 = float(fd_weights(nodes[-1], nodes[-4:], 1) @ vals[-4:])
    eta = pb.eta
    j = int(np.searchsorted(nodes, eta))
    lo = min(max(j - 2, 0), nodes.size - 4)
    d1_eta = float(fd_weights(eta, nodes[lo:lo + 4], 1) @ vals[lo:lo + 4])
    third = vals[-1] + d1_1 - d1_eta
    return (abs(d1_0), abs(d2_0), abs(third))


def _dense_points(nodes: np.ndarray, lo: float, hi: float) -> np.ndarray:
    xs = np.linspace(lo, hi, _DENSE_SAMPLES + 1)
    inner = nodes[(nodes >= lo) & (nodes <= hi)]
    return np.unique(np.concatenate([xs, inner]))


def cone_check(pb: Problem, u: GridFunction, rho: float) -> float:
    """Slack min_[0, rho] u - gamma * sup u; nonnegative for true solutions."""
    if float(np.min(u.values)) < -1e-12:
        raise ValueError("u must be nonnegative")
    gam = cone_gamma(pb.kernel_params, rho)
    nodes = u.partition.nodes
    head = u(_dense_points(nodes, 0.0, rho))
    full = u(_dense_points(nodes, 0.0, 1.0))
    return float(np.min(head) - gam * np.max(np.abs(full)))


def verification_report(pb: Problem, u: GridFunction, rho: float) -> VerificationReport:
    nodes = u.partition.nodes
    dense = u(_dense_points(nodes, 0.0, 1.0))
    return VerificationReport(
        integral_form_residual=integral_form_residual(pb, u),
        bc_residuals=boundary_residuals(pb, u),
        positivity_min=float(np.min(dense)),
        cone_slack=cone_check(pb, u, rho),
        sup_norm=float(np.max(np.abs(dense))),
    )

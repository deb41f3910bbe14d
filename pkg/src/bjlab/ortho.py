"""Exact and approximate Birkhoff-James orthogonality checks.

Three independent routes: convex scalar minimization of the defining
inequality, norm-one functional certificates, and (for p = 1) the closed-form
minimum over the support-functional set's zero-block freedom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blockspace import (
    BOUNDARY_BAND,
    DEFAULT_TOL,
    DEFAULT_ZERO_TOL,
    ONE_SIDED_NOISE_FLOOR,
    BlockFunctional,
    BochnerElement,
    CheckResult,
    SpaceSpec,
    _duality_rows,
    _norm_arr,
    apply_functional,
    block_norms,
    check_shape,
    inner_duality_map,
    support_functional,
    zero_set,
)
from .errors import BadSpec, NonFiniteValue, NotSmooth, ZeroElement

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ApproxParam:
    """Relaxation parameter of approximate orthogonality; 0 recovers the
    exact relation."""

    epsilon: float

    def __post_init__(self):
        eps = float(self.epsilon)
        if not (0.0 <= eps < 1.0):
            raise BadSpec(f"epsilon must lie in [0, 1), got {eps}")
        object.__setattr__(self, "epsilon", eps)

    def __float__(self) -> float:
        return self.epsilon


def epsilon_value(eps) -> float:
    """Accept ApproxParam or a plain float; validate the range."""
    if isinstance(eps, ApproxParam):
        return eps.epsilon
    return ApproxParam(float(eps)).epsilon


def minimize_convex_1d(phi, radius: float, tol: float = 1e-12,
                       max_iter: int = 200) -> tuple[float, float]:
    """Golden-section minimum of a convex phi over [-radius, radius].

    tol is the terminal bracket width relative to radius.  Returns the best
    (alpha, phi(alpha)) over all probe points, endpoints and 0 included, so
    the reported value never exceeds any evaluated one.
    """
    if not (radius > 0.0 and math.isfinite(radius)):
        raise BadSpec(f"radius must be positive and finite, got {radius}")

    def f(alpha: float) -> float:
        val = float(phi(alpha))
        if not math.isfinite(val):
            raise NonFiniteValue(f"objective returned {val} at alpha={alpha}")
        return val

    a, b = -radius, radius
    best_a, best_v = 0.0, f(0.0)  # probe the kink/expansion point first
    for alpha in (a, b):
        v = f(alpha)
        if v < best_v:
            best_a, best_v = alpha, v
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    width_goal = tol * radius
    for _ in range(max_iter):
        if fc < best_v:
            best_a, best_v = c, fc
        if fd < best_v:
            best_a, best_v = d, fd
        if (b - a) <= width_goal:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return best_a, best_v


def _one_sided_result(margin: float, tol: float, alpha_star: float,
                      certificate: BlockFunctional | None = None) -> CheckResult:
    # Minimization margins are <= 0 up to rounding (the objective vanishes at
    # alpha = 0), so only the uncertain-fail zone below the noise floor is a
    # boundary case.
    verdict = margin >= -tol
    boundary = -BOUNDARY_BAND * tol < margin < -ONE_SIDED_NOISE_FLOOR
    return CheckResult(verdict=verdict, margin=margin, alpha_star=alpha_star,
                       certificate=certificate, boundary=boundary)


def _two_sided_result(margin: float, tol: float,
                      certificate: BlockFunctional | None = None) -> CheckResult:
    verdict = margin >= -tol
    boundary = abs(margin) < BOUNDARY_BAND * tol
    return CheckResult(verdict=verdict, margin=margin, alpha_star=None,
                       certificate=certificate, boundary=boundary)


def is_bj_orthogonal(x: BochnerElement, y: BochnerElement, spec: SpaceSpec,
                     tol: float = DEFAULT_TOL) -> CheckResult:
    """Does ||x + a y|| >= ||x|| hold for every scalar a?

    Minimizes ||x + a y|| over |a| <= 4||x||/||y|| (any a with value <= ||x||
    lies within 2||x||/||y|| by the reverse triangle inequality; doubled to
    absorb rounding).  margin = (min - ||x||)/||x||, always <= 0 since a = 0
    attains ||x||.
    """
    xb = check_shape(x, spec)
    yb = check_shape(y, spec)
    nx = _norm_arr(xb, spec)
    if nx == 0.0:
        raise ZeroElement("orthogonality from the zero element is degenerate")
    ny = _norm_arr(yb, spec)
    if ny == 0.0:
        return CheckResult(verdict=True, margin=0.0, alpha_star=0.0)
    radius = 4.0 * nx / ny
    alpha, val = minimize_convex_1d(lambda a: _norm_arr(xb + a * yb, spec), radius)
    val = min(val, nx)  # phi(0) = ||x|| exactly
    margin = (val - nx) / nx
    return _one_sided_result(margin, tol, alpha)


def is_approx_bj_orthogonal(x: BochnerElement, y: BochnerElement, eps,
                            spec: SpaceSpec, tol: float = DEFAULT_TOL) -> CheckResult:
    """Does ||x + a y||^2 >= ||x||^2 - 2 eps ||x|| ||a y|| hold for every a?

    Minimizes the convex gap psi(a) = ||x + a y||^2 - ||x||^2
    + 2 eps ||x|| ||y|| |a| over |a| <= 4||x||/||y|| (psi < 0 forces
    ||x + a y|| < ||x||, hence |a| < 2||x||/||y||).  margin = min psi /||x||^2.
    """
    eps = epsilon_value(eps)
    xb = check_shape(x, spec)
    yb = check_shape(y, spec)
    nx = _norm_arr(xb, spec)
    if nx == 0.0:
        raise ZeroElement("orthogonality from the zero element is degenerate")
    ny = _norm_arr(yb, spec)
    if ny == 0.0:
        return CheckResult(verdict=True, margin=0.0, alpha_star=0.0)
    kink = 2.0 * eps * nx * ny
    nx2 = nx * nx

    def psi(a: float) -> float:
        return _norm_arr(xb + a * yb, spec) ** 2 - nx2 + kink * abs(a)

    radius = 4.0 * nx / ny
    alpha, val = minimize_convex_1d(psi, radius)
    val = min(val, 0.0)  # psi(0) = 0 exactly
    margin = val / nx2
    return _one_sided_result(margin, tol, alpha)


def min_certificate_value(x: BochnerElement, y: BochnerElement,
                          spec: SpaceSpec, zero_tol: float | None = None) -> float:
    """min over norm-one T with T(x) = ||x|| of |T(y)|.

    p = 1: on zero blocks of x the dual block is free in the unit ball, so
    T(y) sweeps an interval of half-width sum_{i in Z(x)} mu_i ||y_i||_q
    around S = sum_{i not in Z(x)} mu_i F_{x_i}.y_i; the minimum modulus is
    max(0, |S| - half-width).  p > 1: the space is smooth, the support
    functional is unique, and the value is |T_x(y)|.
    """
    xb = check_shape(x, spec)
    yb = check_shape(y, spec)
    if not spec.smooth_inner:
        raise NotSmooth(f"certificates need 1 < q < inf, got q={spec.q}")
    if _norm_arr(xb, spec) == 0.0:
        raise ZeroElement("no support functional at 0")
    if spec.p > 1.0:
        T = support_functional(x, spec, zero_tol=zero_tol)
        return abs(apply_functional(T, y, spec))
    bx = block_norms(xb, spec.q)
    cutoff = (DEFAULT_ZERO_TOL if zero_tol is None else zero_tol) * float(bx.max())
    active = bx > cutoff
    F = _duality_rows(xb, spec.q, active)
    mu = spec.mu
    s = float(mu @ np.einsum("ij,ij->i", F, yb))
    slack = float((mu * block_norms(yb, spec.q))[~active].sum())
    return max(0.0, abs(s) - slack)


def _l1_optimal_certificate(x: BochnerElement, y: BochnerElement,
                            spec: SpaceSpec) -> BlockFunctional:
    """A support functional of x attaining min |T(y)| (p = 1 only): zero
    blocks carry clamped multiples of y's norming functionals."""
    xb = x.blocks
    yb = y.blocks
    zero = zero_set(x, q=spec.q)
    mu = spec.mu
    ny = block_norms(yb, spec.q)
    s = sum(mu[i] * float(inner_duality_map(xb[i], spec.q) @ yb[i])
            for i in range(spec.n) if i not in zero)
    out = np.zeros_like(xb)
    remaining = abs(s)
    sign = 1.0 if s >= 0.0 else -1.0
    for i in range(spec.n):
        if i not in zero:
            out[i] = inner_duality_map(xb[i], spec.q)
        elif ny[i] > 0.0 and remaining > 0.0:
            t = min(1.0, remaining / (mu[i] * ny[i]))
            out[i] = -sign * t * inner_duality_map(yb[i], spec.q)
            remaining -= t * mu[i] * ny[i]
    return BlockFunctional(out)


def certificate_check(x: BochnerElement, y: BochnerElement, eps,
                      spec: SpaceSpec, tol: float = DEFAULT_TOL) -> CheckResult:
    """Certificate route: approximate orthogonality holds iff some norm-one T
    with T(x) = ||x|| has |T(y)| <= eps ||y||.

    margin = (eps ||y|| - min |T(y)|)/||y||; the certificate field carries a
    T attaining the minimum.
    """
    eps = epsilon_value(eps)
    mcv = min_certificate_value(x, y, spec)
    ny = _norm_arr(check_shape(y, spec), spec)
    if spec.p == 1.0:
        cert = _l1_optimal_certificate(x, y, spec)
    else:
        cert = support_functional(x, spec)
    if ny == 0.0:
        return CheckResult(verdict=True, margin=0.0, certificate=cert)
    margin = (eps * ny - mcv) / ny
    return _two_sided_result(margin, tol, certificate=cert)


def make_orthogonal_partner(x: BochnerElement, z: BochnerElement,
                            spec: SpaceSpec) -> BochnerElement:
    """Project z along x so the result is orthogonal from x.

    With T the support functional of x, y = z - (T(z)/||x||) x satisfies
    T(y) = 0, which certifies x orthogonal to y.
    """
    xb = check_shape(x, spec)
    zb = check_shape(z, spec)
    nx = _norm_arr(xb, spec)
    if nx == 0.0:
        raise ZeroElement("cannot build a partner against the zero element")
    T = support_functional(x, spec)
    c = apply_functional(T, z, spec) / nx
    return BochnerElement(zb - c * xb)

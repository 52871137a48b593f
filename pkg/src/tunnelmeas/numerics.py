"""Numerical kernels shared by the analytic model.

* :func:`adaptive_quadrature` -- globally adaptive 7/15-point Gauss-Kronrod
  with interval halving.
* :func:`endpoint_singular_quadrature` -- tanh-sinh (double exponential)
  rule for integrands with integrable endpoint singularities.
* :func:`sinc_sq_half` -- the ``sin(w t/2)/(w/2)`` factor and its square,
  stable at w -> 0.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

from .errors import ConvergenceFailure, DomainError

_EPS = 2.220446049250313e-16

# Kronrod 15-point nodes on [0, 1]; odd indices are the embedded Gauss 7 nodes.
_XK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


@dataclass
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int


def _gk15(f, a, b):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fc = f(c)
    resk = fc * _WK[7]
    resg = fc * _WG[3]
    resabs = abs(fc) * _WK[7]
    for i in range(7):
        dx = h * _XK[i]
        f1 = f(c - dx)
        f2 = f(c + dx)
        resk += _WK[i] * (f1 + f2)
        resabs += _WK[i] * (abs(f1) + abs(f2))
        if i % 2 == 1:
            resg += _WG[i // 2] * (f1 + f2)
    return resk * h, abs((resk - resg) * h), resabs * abs(h)


def adaptive_quadrature(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-12,
    abs_tol: float = 0.0,
    max_depth: int = 60,
) -> QuadratureResult:
    """Integrate ``f`` over ``[a, b]``.

    The interval with the largest error estimate is halved until the summed
    estimate drops below ``max(rel_tol * |I|, abs_tol)`` (or the rounding
    floor of the rule). ``f`` may return complex values.

    Raises
    ------
    ConvergenceFailure
        If an interval would need splitting beyond ``max_depth`` halvings.
        The partial :class:`QuadratureResult` is attached as ``.partial``.
    """
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    if rel_tol < 1e-14 and abs_tol <= 0:
        raise DomainError("rel_tol must be >= 1e-14")

    value, err, resabs = _gk15(f, a, b)
    evals = 15
    # heap of (-err, tiebreak, a, b, depth, value, err, resabs)
    heap = [(-err, 0, a, b, 0, value, err, resabs)]
    counter = 1
    total_err = err
    total_abs = resabs
    while True:
        target = max(rel_tol * abs(value), abs_tol, 50.0 * _EPS * total_abs)
        if total_err <= target:
            return QuadratureResult(_real_if_real(value), total_err, evals)
        _, _, lo, hi, depth, v, e, ra = heapq.heappop(heap)
        if depth >= max_depth:
            heapq.heappush(heap, (-e, counter, lo, hi, depth, v, e, ra))
            raise ConvergenceFailure(
                f"subdivision depth {max_depth} exceeded near [{lo}, {hi}]",
                partial=QuadratureResult(_real_if_real(value), total_err, evals),
            )
        mid = 0.5 * (lo + hi)
        v1, e1, r1 = _gk15(f, lo, mid)
        v2, e2, r2 = _gk15(f, mid, hi)
        evals += 30
        value += v1 + v2 - v
        total_err += e1 + e2 - e
        total_abs += r1 + r2 - ra
        heapq.heappush(heap, (-e1, counter, lo, mid, depth + 1, v1, e1, r1))
        heapq.heappush(heap, (-e2, counter + 1, mid, hi, depth + 1, v2, e2, r2))
        counter += 2
        if counter % 64 == 1:
            # resum to keep running totals free of drift
            value = sum(item[5] for item in heap)
            total_err = sum(item[6] for item in heap)


def _real_if_real(v):
    if isinstance(v, complex) and v.imag == 0.0:
        return v.real
    return v


_TS_TMAX = 4.5


def endpoint_singular_quadrature(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-12,
    max_level: int = 10,
    complement: bool = False,
) -> QuadratureResult:
    """Tanh-sinh quadrature on ``[a, b]``.

    Nodes cluster double-exponentially at both ends, so ``1/sqrt``-type
    endpoint singularities converge quickly. The step ``h`` is halved until
    two successive levels agree to ``rel_tol``.

    A node closer to an endpoint than the spacing of doubles there rounds
    onto the endpoint. Plain ``f(x)`` skips such nodes, which costs about
    ``2 sqrt(ulp(b))`` on a ``1/sqrt(b - x)`` singularity. With
    ``complement=True``, ``f`` is called as ``f(x, xc)`` where ``xc`` is the
    exact signed distance to the nearer endpoint (``a - x <= 0`` on the left
    half, ``b - x >= 0`` on the right). That lets the integrand form the
    singular factor without cancellation.
    """
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    width = b - a
    half_pi = 0.5 * math.pi
    evals = 0

    def node_sum(t_values, h):
        nonlocal evals
        s = 0.0
        for t in t_values:
            u = half_pi * math.sinh(t)
            w = h * half_pi * math.cosh(t) / math.cosh(u) ** 2 * 0.5 * width
            if w == 0.0:
                continue
            # distance from the nearer endpoint, computed without cancellation
            d = width / (1.0 + math.exp(2.0 * abs(u)))
            if d == 0.0:
                continue
            if u == 0:
                x, xc = a + 0.5 * width, 0.5 * width
            elif u < 0:
                x, xc = a + d, -d
            else:
                x, xc = b - d, d
            if complement:
                s += w * f(x, xc)
            elif x == a or x == b:
                continue
            else:
                s += w * f(x)
            evals += 1
        return s

    h = 1.0
    n = int(_TS_TMAX / h)
    estimate = node_sum([k * h for k in range(-n, n + 1)], h)
    for level in range(1, max_level + 1):
        h *= 0.5
        n = int(_TS_TMAX / h)
        # only odd multiples of the new step are new nodes
        new = node_sum([k * h for k in range(-n, n + 1) if k % 2], h)
        refined = 0.5 * estimate + new
        err = abs(refined - estimate)
        estimate = refined
        if level >= 3 and err <= rel_tol * abs(estimate):
            return QuadratureResult(estimate, err, evals)
    raise ConvergenceFailure(
        f"tanh-sinh did not reach rel_tol={rel_tol} after {max_level} levels",
        partial=QuadratureResult(estimate, err, evals),
    )


_SERIES_SWITCH = 1e-4


def sinc_sq_half(omega: float, t: float, power: int = 1) -> float:
    """``sin(omega t/2)/(omega/2)`` (power 1) or its square (power 2).

    Below ``|omega t| < 1e-4`` the series ``t (1 - (wt)^2/24 + (wt)^4/1920)``
    replaces the quotient, so ``omega = 0`` returns the limit ``t`` (``t^2``).
    """
    if power not in (1, 2):
        raise DomainError(f"power must be 1 or 2, got {power}")
    if t < 0:
        raise DomainError(f"t = {t} must be non-negative")
    wt = omega * t
    if abs(wt) < _SERIES_SWITCH:
        y = wt * wt
        s = t * (1.0 - y / 24.0 + y * y / 1920.0)
    else:
        s = math.sin(0.5 * wt) / (0.5 * omega)
    return s if power == 1 else s * s


def sin_sq_over_half(omega: float, t: float) -> float:
    """``sin^2(omega t/2)/(omega/2)``, zero in the ``omega -> 0`` limit."""
    return math.sin(0.5 * omega * t) * sinc_sq_half(omega, t, 1)

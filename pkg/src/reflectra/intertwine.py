"""Bessel-kernel transmutations and the explicit intertwining kernels.

Two layers live here.

The transmutation pair works for every family: with r = sqrt(1-eps^2)*rho,
the operator

    E f(x)  = f(x) - (r|x|/2) int_{|y|<|x|} f(y) J1(r sqrt(x^2-y^2))
                                       / sqrt(x^2-y^2) dy

conjugates d^2/dx^2 - r^2 into d^2/dx^2 on even smooth functions; its
inverse replaces J1 by I1, and the dual pair acts on even compactly
supported functions through J0/I0 against the derivative. At eps = +-1
the parameter r vanishes and all four maps are the identity.

The explicit intertwining layer is restricted to the power family, whose
base kernel is in closed form:

    K(|x|, t) = c (x^2 - t^2)^(alpha - 1/2) |x|^(-2 alpha),
    c = 2 Gamma(alpha+1) / (sqrt(pi) Gamma(alpha+1/2)).

From it the cumulative kernel G(x,y) = int_{|y|}^{|x|} K(t,y) A(t) dt is
quadratured (Gauss-Jacobi in the variable v = t^2 - y^2, which absorbs the
endpoint exponent exactly), its y-derivative is taken by 4th-order
differences, and the full intertwining kernel

    KK(x,y) = K/2 + eps*rho*sg(x) G/(2A(x)) - sg(x) dG/dy /(2A(x))

drives the operator V (and its dual tV) that conjugates the
differential-reflection operator into d/dx.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import gamma as _gamma
from scipy.special import roots_jacobi

from .errors import (
    ConfigurationError,
    DomainError,
    ParityError,
    SupportError,
    UnsupportedFamilyError,
)
from .families import ChebliFamily
from .sampling import (
    SampledFunction,
    composite_weights,
    derivative_4th,
    gregory_weights,
)

_J_SPLIT = 16.0


# ---------------------------------------------------------------------------
# Bessel functions J0..J2 / I0..I2
# ---------------------------------------------------------------------------

def _j_series(nu: int, z: np.ndarray) -> np.ndarray:
    """Power series in 80-bit accumulation (cancellation control)."""
    zl = z.astype(np.longdouble)
    half = 0.5 * zl
    u = half * half
    term = half**nu / np.longdouble(math.factorial(nu))
    total = term.copy()
    for k in range(1, 42):
        term = -term * u / (k * (k + nu))
        total += term
    return total.astype(np.float64)


def _i_series(nu: int, z: np.ndarray) -> np.ndarray:
    half = 0.5 * z
    u = half * half
    term = half**nu / math.factorial(nu)
    total = term.copy()
    for k in range(1, 120):
        term = term * u / (k * (k + nu))
        total += term
        if np.all(term <= 1e-17 * total):
            break
    return total


def _j_asymptotic(nu: int, z: np.ndarray) -> np.ndarray:
    """Large-argument expansion, truncated at its smallest term."""
    mu = 4.0 * nu * nu
    p = np.ones_like(z)
    q = np.zeros_like(z)
    term = np.ones_like(z)
    for k in range(1, 22):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0) / z
        contrib = term * (-1.0) ** ((k // 2) % 2)
        if k % 2 == 1:
            q = q + contrib
        else:
            p = p + contrib
        if np.all(np.abs(term) < 1e-17):
            break
    omega = z - (0.5 * nu + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * z)) * (p * np.cos(omega) - q * np.sin(omega))


def bessel_j(nu: int, z):
    """J_nu for nu in {0, 1, 2}, z >= 0; series/asymptotic split at 16."""
    if nu not in (0, 1, 2):
        raise DomainError("bessel_j supports orders 0, 1, 2")
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < 0):
        raise DomainError("bessel_j requires z >= 0")
    out = np.empty_like(z_arr)
    small = z_arr <= _J_SPLIT
    if np.any(small):
        out[small] = _j_series(nu, z_arr[small])
    if np.any(~small):
        out[~small] = _j_asymptotic(nu, z_arr[~small])
    return float(out) if np.ndim(z) == 0 else out


def bessel_i(nu: int, z):
    """I_nu for nu in {0, 1, 2}, z >= 0 (series; positive terms, no split)."""
    if nu not in (0, 1, 2):
        raise DomainError("bessel_i supports orders 0, 1, 2")
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < 0):
        raise DomainError("bessel_i requires z >= 0")
    out = _i_series(nu, z_arr)
    return float(out) if np.ndim(z) == 0 else out


def _j1_over_w(u: np.ndarray) -> np.ndarray:
    """J1(sqrt(u))/sqrt(u), analytic in u >= 0 (value 1/2 at 0)."""
    out = np.empty_like(u)
    small = u <= _J_SPLIT**2
    us = u[small]
    term = np.full_like(us, 0.5)
    total = term.copy()
    for k in range(1, 42):
        term = -term * us / (4.0 * k * (k + 1))
        total += term
    out[small] = total
    big = ~small
    if np.any(big):
        w = np.sqrt(u[big])
        out[big] = _j_asymptotic(1, w) / w
    return out


def _i1_over_w(u: np.ndarray) -> np.ndarray:
    """I1(sqrt(u))/sqrt(u), analytic in u >= 0."""
    term = np.full_like(u, 0.5)
    total = term.copy()
    for k in range(1, 160):
        term = term * u / (4.0 * k * (k + 1))
        total += term
        if np.all(term <= 1e-17 * total):
            break
    return total


def _j0_of(u: np.ndarray) -> np.ndarray:
    return bessel_j(0, np.sqrt(u))


def _i0_of(u: np.ndarray) -> np.ndarray:
    return bessel_i(0, np.sqrt(u))


# ---------------------------------------------------------------------------
# transmutation operators
# ---------------------------------------------------------------------------

DIRECTIONS = ("E", "Einv", "tE", "tEinv")


@dataclass(frozen=True)
class BesselKernelOp:
    """One of the four transmutation maps, with its deformed index."""

    direction: str
    rho_eps: float

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ConfigurationError(f"direction must be one of {DIRECTIONS}")
        if self.rho_eps < 0:
            raise ConfigurationError("rho_eps must be nonnegative")

    @property
    def is_identity(self) -> bool:
        return self.rho_eps == 0.0


def bessel_kernel_op(fam: ChebliFamily, eps: float, direction: str) -> BesselKernelOp:
    return BesselKernelOp(direction=direction, rho_eps=fam.rho_eps(eps))


def apply_e(op: BesselKernelOp, f: SampledFunction, tol: float = 1e-10) -> SampledFunction:
    """Apply the chosen transmutation map to an even grid function.

    E / Einv integrate f itself against the analytic kernels
    J1(w)/w resp. I1(w)/w (entire in w^2, so plain composite quadrature on
    the grid is adequate); tE / tEinv integrate the derivative of f against
    J0 resp. I0 from |y| outward, and therefore require the samples to be
    compactly supported inside the grid.
    """
    if not f.is_even(1e-8):
        raise ParityError("transmutation operators act on even functions")
    if op.is_identity:
        return SampledFunction(f.x, f.values.copy())
    r2 = op.rho_eps**2
    n_half = f.x.size // 2
    xs = f.x[n_half:]
    h = f.step
    vals_half = f.values[n_half:]
    out_half = np.empty_like(vals_half, dtype=f.values.dtype)

    if op.direction in ("E", "Einv"):
        kern = _i1_over_w if op.direction == "Einv" else _j1_over_w
        sign = 1.0 if op.direction == "Einv" else -1.0
        full = f.values
        out_half[0] = full[n_half]
        for i in range(1, xs.size):
            y = f.x[n_half - i:n_half + i + 1]
            u = r2 * (xs[i] ** 2 - y * y)
            w = composite_weights(y.size, h)
            inner = w @ (full[n_half - i:n_half + i + 1] * kern(u))
            out_half[i] = full[n_half + i] + sign * 0.5 * r2 * xs[i] * inner
    else:
        scale = max(float(np.max(np.abs(f.values))), 1e-300)
        if f.tail_magnitude() > 1e-9 * scale:
            raise SupportError(
                "tE/tEinv need compact support inside the grid (tail too large)"
            )
        kern = _i0_of if op.direction == "tEinv" else _j0_of
        df = derivative_4th(f.values, h)[n_half:]
        for j in range(xs.size):
            u = r2 * (xs[j:] ** 2 - xs[j] ** 2)
            if xs.size - j < 2:
                out_half[j] = 0.0
                continue
            # Gregory instead of Simpson: the rule must not alternate with
            # the parity of the shrinking range, or d^2/dy^2 of the output
            # picks up the alternation
            w = gregory_weights(xs.size - j, h)
            out_half[j] = -(w @ (df[j:] * kern(u)))
    out = np.concatenate([out_half[:0:-1], out_half])
    return SampledFunction(f.x, out)


# ---------------------------------------------------------------------------
# explicit kernels (power family)
# ---------------------------------------------------------------------------

def _require_dunkl(fam: ChebliFamily):
    if fam.kind != "dunkl":
        raise UnsupportedFamilyError(
            "explicit intertwining kernels are implemented for the power "
            "family only (the hyperbolic base kernel has no closed form here)"
        )


def _kernel_const(alpha: float) -> float:
    return 2.0 * _gamma(alpha + 1.0) / (math.sqrt(math.pi) * _gamma(alpha + 0.5))


def dunkl_base_kernel(fam: ChebliFamily, x: float, t):
    """Base kernel K(|x|, t) of the power family; zero for |t| > |x|."""
    _require_dunkl(fam)
    if x == 0:
        raise DomainError("the base kernel needs x != 0")
    t_arr = np.asarray(t, dtype=float)
    ax = abs(x)
    inside = np.abs(t_arr) <= ax if fam.alpha >= 0.5 else np.abs(t_arr) < ax
    out = np.zeros_like(t_arr)
    c = _kernel_const(fam.alpha)
    diff = np.maximum(ax * ax - t_arr[inside] ** 2, 0.0)
    out[inside] = c * diff ** (fam.alpha - 0.5) * ax ** (-2.0 * fam.alpha)
    return float(out) if np.ndim(t) == 0 else out


_GJ_CACHE: dict = {}


def _gj_rule(n: int, a: float, b: float):
    key = (n, round(a, 12), round(b, 12))
    if key not in _GJ_CACHE:
        _GJ_CACHE[key] = roots_jacobi(n, a, b)
    return _GJ_CACHE[key]


@dataclass
class MehlerKernel:
    """Evaluators K, G, dG/dy and the combined kernel at one fixed x.

    G rows are produced by adaptive Gauss-Jacobi quadrature (the substituted
    variable v = t^2 - y^2 turns the endpoint exponent into the rule's
    weight); the y-derivative of G uses 4th-order central differences with
    a step shrunk near the support edge. Rows are cached per y-array, so a
    kernel object should be confined to one worker or pre-warmed before
    being shared read-only.
    """

    family: ChebliFamily
    eps: float
    x: float
    tol: float = 1e-10
    _cache: dict = field(default_factory=dict, repr=False)

    def base(self, y):
        return dunkl_base_kernel(self.family, self.x, y)

    def cumulative(self, y):
        """G(x, y) = int_{|y|}^{|x|} K(t, y) A(t) dt."""
        y_arr = np.atleast_1d(np.asarray(y, dtype=float))
        key = ("g", y_arr.tobytes())
        if key not in self._cache:
            self._cache[key] = self._g_quad(y_arr)
        out = self._cache[key]
        return float(out[0]) if np.ndim(y) == 0 else out

    def _g_quad(self, y_arr):
        alpha = self.family.alpha
        ax = abs(self.x)
        c = _kernel_const(alpha)
        vmax = np.maximum(ax * ax - y_arr * y_arr, 0.0)
        prev = None
        for order in (8, 16, 32):
            nodes, weights = _gj_rule(order, 0.0, alpha - 0.5)
            # map [-1,1] with weight (1+u)^(alpha-1/2) onto [0, vmax]
            v = 0.5 * (nodes[None, :] + 1.0) * vmax[:, None]
            # K(t,y) A(t) dt = smooth(v) * v^(alpha-1/2) dv with the power
            # family's smooth part constant in v:
            smooth = np.full_like(v, 0.5 * c)
            scale = (0.5 * vmax[:, None]) ** (alpha + 0.5)
            est = scale[:, 0] * (weights[None, :] * smooth).sum(axis=1)
            if prev is not None and np.max(np.abs(est - prev)) <= self.tol * max(
                1.0, float(np.max(np.abs(est)))
            ):
                return est
            prev = est
        return prev

    def cumulative_dy(self, y):
        """dG/dy by 4th-order central differences of the quadratured G."""
        y_arr = np.atleast_1d(np.asarray(y, dtype=float))
        ax = abs(self.x)
        gap = np.maximum(ax - np.abs(y_arr), 0.0)
        delta = np.minimum(1e-3 * max(ax, 1.0), gap / 6.0)
        delta = np.maximum(delta, 1e-8 * max(ax, 1.0))
        stencil = np.array([-2.0, -1.0, 1.0, 2.0])
        coeff = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
        pts = y_arr[:, None] + stencil[None, :] * delta[:, None]
        g = self._g_quad(np.clip(pts.ravel(), -ax, ax)).reshape(pts.shape)
        out = (g @ coeff) / delta
        return float(out[0]) if np.ndim(y) == 0 else out

    def combined(self, y):
        """The full intertwining kernel row at this x."""
        y_arr = np.atleast_1d(np.asarray(y, dtype=float))
        sgn = math.copysign(1.0, self.x)
        a_x = float(self.family.weight(abs(self.x)))
        out = (
            0.5 * self.base(y_arr)
            + self.eps * self.family.rho * sgn * self.cumulative(y_arr) / (2.0 * a_x)
            - sgn * self.cumulative_dy(y_arr) / (2.0 * a_x)
        )
        return float(out[0]) if np.ndim(y) == 0 else out


def mehler_kernel(fam: ChebliFamily, eps: float, x: float, tol: float = 1e-10) -> MehlerKernel:
    _require_dunkl(fam)
    if abs(eps) > 1.0:
        raise DomainError("eps must lie in [-1, 1]")
    if x == 0:
        raise DomainError("the kernel row needs x != 0")
    return MehlerKernel(family=fam, eps=eps, x=x, tol=tol)


def _eval_f(f, pts):
    if isinstance(f, SampledFunction):
        return f(pts)
    return f(pts)


def v_eps(fam: ChebliFamily, eps: float, f, x: float, tol: float = 1e-9) -> complex:
    """Intertwining operator V f(x) = int_{|y|<|x|} KK(x,y) f(y) dy.

    f may be a SampledFunction (its analytic source is used when present)
    or any callable. Quadrature nodes follow the Gauss-Jacobi weight of the
    kernel's endpoint exponent; the order escalates until the value settles.
    """
    _require_dunkl(fam)
    if abs(eps) > 1.0:
        raise DomainError("eps must lie in [-1, 1]")
    if x == 0:
        return complex(_eval_f(f, np.array([0.0]))[0])
    kk = mehler_kernel(fam, eps, x, tol=tol)
    ax = abs(x)
    expo = fam.alpha - 0.5
    prev = None
    for order in (24, 48, 96):
        u, w = _gj_rule(order, expo, expo)
        y = ax * u
        vals = _eval_f(f, y)
        smooth = kk.combined(y) * (np.maximum(1.0 - u * u, 1e-300)) ** (-expo)
        est = ax * np.sum(w * smooth * vals)
        if prev is not None and abs(est - prev) <= tol * max(1.0, abs(est)):
            return complex(est)
        prev = est
    return complex(prev)


def t_v_eps(fam: ChebliFamily, eps: float, g: SampledFunction, y: float,
            tol: float = 1e-9) -> complex:
    """Dual intertwiner tV g(y) = int_{|x|>|y|} KK(x,y) g(x) A(x) dx.

    The integral is truncated at the support radius of g (samples must be
    compactly supported inside the grid).
    """
    _require_dunkl(fam)
    if abs(eps) > 1.0:
        raise DomainError("eps must lie in [-1, 1]")
    scale = max(float(np.max(np.abs(g.values))), 1e-300)
    if g.tail_magnitude() > 1e-9 * scale:
        raise SupportError("tV needs compactly supported input inside the grid")
    supp = _support_radius(g)
    ay = abs(y)
    if ay >= supp:
        return 0.0 + 0.0j
    total = 0.0 + 0.0j
    expo = fam.alpha - 0.5
    for side in (+1.0, -1.0):
        prev = None
        for order in (24, 48, 96):
            u, w = _gj_rule(order, 0.0, expo)
            vmax = supp * supp - ay * ay
            v = 0.5 * (u + 1.0) * vmax
            xx = side * np.sqrt(v + ay * ay)
            kk_vals = np.array([
                mehler_kernel(fam, eps, float(xv), tol=tol).combined(y)
                for xv in xx
            ])
            a_vals = fam.weight(xx)
            g_vals = _eval_f(g, xx)
            smooth = kk_vals * a_vals * g_vals / (2.0 * np.abs(xx)) * v ** (-expo)
            est = (0.5 * vmax) ** (expo + 1.0) * np.sum(w * smooth)
            if prev is not None and abs(est - prev) <= tol * max(1.0, abs(est)):
                break
            prev = est
        total += est
    return complex(total)


def _support_radius(g: SampledFunction, rel: float = 1e-12) -> float:
    scale = max(float(np.max(np.abs(g.values))), 1e-300)
    big = np.abs(g.values) > rel * scale
    if not np.any(big):
        return 0.0
    return float(np.max(np.abs(g.x[big]))) + g.step

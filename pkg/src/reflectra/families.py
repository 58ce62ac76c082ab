"""Admissible weight families and their runtime hypothesis checks.

A weight A(x) = |x|^(2*alpha+1) * B(x) on the line, with B even, positive,
smooth and B(0) = 1, defines the second-order operator

    L = d^2/dx^2 + (A'/A) d/dx.

The family carries the singularity exponent alpha, the index rho defined by
2*rho = lim_{x->oo} A'(x)/A(x), and the smooth odd logarithmic part
C = B'/B, so that A'/A = (2*alpha+1)/x + C(x) away from 0.

Built-in families:

* ``dunkl``:  A(x) = |x|^(2*alpha+1),                      rho = 0
* ``jacobi``: A(x) = |sinh x|^(2*alpha+1) (cosh x)^(2*beta+1),
              rho = alpha + beta + 1
* ``table``:  B and B' tabulated on a positive grid

The admissibility hypotheses (A increasing and unbounded on the positive
axis, A'/A decreasing there, exponential approach of A'/A to its limit) are
verified numerically by :func:`check_hypotheses`; table-backed families run
the check at construction time.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigurationError, DomainError

_SERIES_TERMS = 24


def _bernoulli_even(n_pairs: int) -> list[Fraction]:
    """Exact Bernoulli numbers B_2, B_4, ..., B_{2*n_pairs}."""
    top = 2 * n_pairs
    b = [Fraction(1)]
    for m in range(1, top + 1):
        s = Fraction(0)
        for j in range(m):
            s += Fraction(math.comb(m + 1, j)) * b[j]
        b.append(-s / (m + 1))
    return [b[2 * k] for k in range(1, n_pairs + 1)]


_B2K = _bernoulli_even(_SERIES_TERMS + 1)

# Taylor coefficients of coth(x) - 1/x and tanh(x) in odd powers x^(2j+1).
_COTH_COEFFS = np.array(
    [float(Fraction(4 ** (j + 1)) * _B2K[j] / math.factorial(2 * j + 2)) for j in range(_SERIES_TERMS)]
)
_TANH_COEFFS = np.array(
    [
        float(Fraction(4 ** (j + 1)) * (Fraction(4 ** (j + 1)) - 1) * _B2K[j] / math.factorial(2 * j + 2))
        for j in range(_SERIES_TERMS)
    ]
)


@dataclass(eq=False)
class ChebliFamily:
    """An admissible weight A(x) = |x|^(2*alpha+1) B(x).

    Instances are immutable after construction and hashable by identity;
    all evaluation methods are pure, so a family can be shared freely
    between concurrent sweeps.
    """

    kind: str
    alpha: float
    beta: Optional[float] = None
    rho: float = 0.0
    table_x: Optional[np.ndarray] = field(default=None, repr=False)
    table_b: Optional[np.ndarray] = field(default=None, repr=False)
    table_bprime: Optional[np.ndarray] = field(default=None, repr=False)
    _b_spline: object = field(default=None, repr=False)
    _c_spline: object = field(default=None, repr=False)

    # -- constructors ---------------------------------------------------

    @classmethod
    def dunkl(cls, alpha: float) -> "ChebliFamily":
        if not alpha > -0.5:
            raise ConfigurationError("dunkl family requires alpha > -1/2")
        return cls(kind="dunkl", alpha=float(alpha), rho=0.0)

    @classmethod
    def jacobi(cls, alpha: float, beta: float) -> "ChebliFamily":
        if not (alpha >= beta >= -0.5) or alpha == -0.5:
            raise ConfigurationError(
                "jacobi family requires alpha >= beta >= -1/2 with alpha != -1/2"
            )
        return cls(kind="jacobi", alpha=float(alpha), beta=float(beta),
                   rho=float(alpha) + float(beta) + 1.0)

    @classmethod
    def from_table(cls, x, b, bprime, alpha: float) -> "ChebliFamily":
        """Family with tabulated smooth part B on a strictly increasing
        positive grid. Validates the admissibility hypotheses and fails
        hard when positivity or monotonicity of A is violated."""
        x = np.asarray(x, dtype=float)
        b = np.asarray(b, dtype=float)
        bprime = np.asarray(bprime, dtype=float)
        if x.ndim != 1 or x.size < 8:
            raise ConfigurationError("table needs at least 8 sample points")
        if np.any(np.diff(x) <= 0) or x[0] <= 0:
            raise ConfigurationError("table grid must be strictly increasing and positive")
        if not alpha > -0.5:
            raise ConfigurationError("table family requires alpha > -1/2")
        if np.any(b <= 0):
            raise ConfigurationError("tabulated B must be positive (hypothesis on the weight)")

        c_vals = bprime / b
        fam = cls(kind="table", alpha=float(alpha), rho=0.0,
                  table_x=x, table_b=b, table_bprime=bprime)
        fam._b_spline = CubicSpline(x, b, bc_type="natural")
        fam._c_spline = CubicSpline(x, c_vals, bc_type="natural")
        # Index from the tail of the tabulated log-derivative.
        k = max(3, x.size // 10)
        rho_est = 0.5 * float(np.median(c_vals[-k:]))
        fam.rho = rho_est if rho_est > 1e-10 else 0.0

        report = check_hypotheses(fam, x)
        if not report.h1_ok:
            raise ConfigurationError(
                f"table weight violates positivity/normalization: {report.h1_note}"
            )
        if not report.h2_ok:
            raise ConfigurationError(
                f"table weight is not increasing on the positive axis near x = "
                f"{report.h2_location:.6g} (violation {report.h2_max_violation:.3g})"
            )
        if not report.h3_ok:
            warnings.warn(
                f"tabulated A'/A is not decreasing near x = {report.h3_location:.6g}; "
                "downstream spectral results may be unreliable"
            )
        if not report.h4_ok:
            warnings.warn(
                f"exponential-decay fit of the log-derivative tail is poor "
                f"(delta = {report.h4_delta:.3g}); Plancherel asymptotics may be off"
            )
        return fam

    @classmethod
    def from_config(cls, cfg: dict) -> "ChebliFamily":
        """Build from a config block like {"kind": "jacobi", "alpha": ..}."""
        try:
            kind = cfg["kind"].lower()
        except (KeyError, TypeError, AttributeError):
            raise ConfigurationError("family config must contain a 'kind' string")
        if kind == "dunkl":
            return cls.dunkl(_cfg_float(cfg, "alpha"))
        if kind == "jacobi":
            return cls.jacobi(_cfg_float(cfg, "alpha"), _cfg_float(cfg, "beta"))
        if kind == "table":
            path = cfg.get("path")
            if path is None:
                raise ConfigurationError("table family config needs a 'path' to a CSV file")
            data = np.genfromtxt(path, delimiter=",", names=True)
            for col in ("x", "B", "Bprime"):
                if col not in (data.dtype.names or ()):
                    raise ConfigurationError(f"table CSV must have header x,B,Bprime (missing {col})")
            return cls.from_table(data["x"], data["B"], data["Bprime"],
                                  alpha=_cfg_float(cfg, "alpha"))
        raise ConfigurationError(f"unknown family kind {kind!r}")

    # -- evaluation ------------------------------------------------------

    def weight(self, x):
        """A(x); even, nonnegative, A(0) = 0."""
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise DomainError("weight requires finite x")
        ax = np.abs(x)
        if self.kind == "dunkl":
            return ax ** (2 * self.alpha + 1)
        if self.kind == "jacobi":
            return np.abs(np.sinh(ax)) ** (2 * self.alpha + 1) * np.cosh(ax) ** (2 * self.beta + 1)
        return ax ** (2 * self.alpha + 1) * self._table_b_at(ax)

    def log_derivative(self, x):
        """A'(x)/A(x) = (2*alpha+1)/x + C(x); odd, singular at 0."""
        x = np.asarray(x, dtype=float)
        if np.any(x == 0):
            raise DomainError("A'/A is singular at x = 0; use the split form")
        return (2 * self.alpha + 1) / x + self.smooth_log_part(x)

    def smooth_log_part(self, x):
        """The odd smooth part C(x) = B'(x)/B(x) of the log-derivative."""
        x = np.asarray(x, dtype=float)
        if self.kind == "dunkl":
            return np.zeros_like(x)
        if self.kind == "jacobi":
            return self._jacobi_c(x)
        ax = np.abs(x)
        return np.sign(x) * self._table_c_at(ax)

    def _jacobi_c(self, x):
        # coth x - 1/x goes through a 0/0 split near the origin to avoid
        # cancellation; series for |x| < 1e-2, closed form elsewhere.
        a1 = 2 * self.alpha + 1
        b1 = 2 * self.beta + 1
        out = np.empty_like(x)
        small = np.abs(x) < 1e-2
        xs = x[small]
        out[small] = xs / 3.0 - xs**3 / 45.0 + 2.0 * xs**5 / 945.0
        xl = x[~small]
        out[~small] = 1.0 / np.tanh(xl) - 1.0 / xl
        return a1 * out + b1 * np.tanh(x)

    def _table_b_at(self, ax):
        lo, hi = self.table_x[0], self.table_x[-1]
        out = np.empty_like(ax)
        inner = ax < lo
        outer = ax > hi
        if np.any(outer):
            raise DomainError(f"x = {np.max(ax):.6g} outside tabulated range (max {hi:.6g})")
        mid = ~inner
        out[mid] = self._b_spline(ax[mid])
        # B(0) = 1 by hypothesis; blend linearly below the first table node.
        out[inner] = 1.0 + (self._b_spline(lo) - 1.0) * (ax[inner] / lo)
        return out

    def _table_c_at(self, ax):
        lo, hi = self.table_x[0], self.table_x[-1]
        if np.any(ax > hi):
            raise DomainError(f"x = {np.max(ax):.6g} outside tabulated range (max {hi:.6g})")
        out = np.empty_like(ax)
        inner = ax < lo
        out[~inner] = self._c_spline(ax[~inner])
        out[inner] = self._c_spline(lo) * (ax[inner] / lo)
        return out

    def rho_eps(self, eps: float) -> float:
        """Deformed index sqrt(1 - eps^2) * rho; vanishes at eps = +-1."""
        if abs(eps) > 1.0:
            raise DomainError("eps must lie in [-1, 1]")
        return math.sqrt(max(0.0, 1.0 - eps * eps)) * self.rho

    def c_series(self, n: int = _SERIES_TERMS) -> np.ndarray:
        """Taylor coefficients c_j of C(x) = sum c_j x^(2j+1) near 0.

        Exact closed-form coefficients for the built-in families; an odd
        least-squares polynomial fit of the tabulated log-derivative for
        table families (valid on |x| <= 0.7, which covers every series
        start the solver uses).
        """
        if self.kind == "dunkl":
            return np.zeros(n)
        if self.kind == "jacobi":
            m = min(n, _SERIES_TERMS)
            out = np.zeros(n)
            out[:m] = (2 * self.alpha + 1) * _COTH_COEFFS[:m] + (2 * self.beta + 1) * _TANH_COEFFS[:m]
            return out
        return self._table_c_series(n)

    def _table_c_series(self, n: int) -> np.ndarray:
        xs = self.table_x[self.table_x <= 0.7]
        if xs.size < 4:
            xs = self.table_x[: max(4, self.table_x.size // 4)]
        cs = self._c_spline(xs)
        deg = int(min(4, xs.size // 3, n))
        basis = np.stack([xs ** (2 * j + 1) for j in range(deg)], axis=1)
        coef, *_ = np.linalg.lstsq(basis, cs, rcond=None)
        out = np.zeros(n)
        out[:deg] = coef
        return out


def _cfg_float(cfg: dict, key: str) -> float:
    try:
        return float(cfg[key])
    except KeyError:
        raise ConfigurationError(f"family config missing '{key}'")
    except (TypeError, ValueError):
        raise ConfigurationError(f"family config field '{key}' must be a number")


def weight(fam: ChebliFamily, x):
    return fam.weight(x)


def log_derivative(fam: ChebliFamily, x):
    return fam.log_derivative(x)


@dataclass
class HypothesisReport:
    """Outcome of the admissibility checks on a positive grid."""

    h1_ok: bool
    h1_note: str
    h2_ok: bool
    h2_max_violation: float
    h2_location: float
    h3_ok: bool
    h3_max_violation: float
    h3_location: float
    h4_ok: bool
    h4_delta: float
    h4_fit_spread: float

    @property
    def all_ok(self) -> bool:
        return self.h1_ok and self.h2_ok and self.h3_ok and self.h4_ok


def check_hypotheses(fam: ChebliFamily, grid) -> HypothesisReport:
    """Verify the weight hypotheses on a strictly increasing positive grid.

    Checks, in order: normalization A(x)/|x|^(2a+1) -> 1 near 0 with A > 0
    (H1); A increasing (H2); A'/A decreasing (H3); and an exponential-decay
    fit of the tail residual of A'/A, namely A'/A - 2*rho when rho > 0 and
    A'/A - (2a+1)/x when rho = 0 (H4). Failures are reported, not raised.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 4 or grid[0] <= 0 or np.any(np.diff(grid) <= 0):
        raise ConfigurationError("hypothesis grid must be strictly increasing with min > 0")

    a_vals = fam.weight(grid)
    lder = fam.log_derivative(grid)

    # (H1): positivity plus B(0) = 1 seen through A(x)/|x|^(2a+1) near 0.
    h1_ok = bool(np.all(a_vals > 0))
    note = "A > 0 on grid" if h1_ok else "A <= 0 somewhere on grid"
    small = grid[grid <= max(grid[0] * 2, 0.2)]
    if small.size and h1_ok:
        ratio = fam.weight(small) / small ** (2 * fam.alpha + 1)
        drift = float(np.max(np.abs(ratio - 1.0)))
        # generous: the grid may not reach very close to 0
        if drift > 0.2:
            h1_ok = False
            note = f"A(x)/|x|^(2a+1) deviates from 1 near 0 by {drift:.3g}"

    # (H2): A increasing.
    inc = np.diff(a_vals)
    scale = np.maximum(np.abs(a_vals[:-1]), 1e-300)
    h2_viol = -inc / scale
    i2 = int(np.argmax(h2_viol))
    h2_max = float(max(h2_viol[i2], 0.0))
    h2_ok = h2_max <= 1e-12

    # (H3): A'/A decreasing.
    dec = np.diff(lder)
    h3_viol = dec / np.maximum(np.abs(lder[:-1]), 1e-300)
    i3 = int(np.argmax(h3_viol))
    h3_max = float(max(h3_viol[i3], 0.0))
    h3_ok = h3_max <= 1e-10

    # (H4): least-squares exponent of the tail residual on log scale.
    if fam.rho > 0:
        resid = lder - 2.0 * fam.rho
    else:
        resid = fam.smooth_log_part(grid)
    tail = grid >= 0.5 * grid[-1]
    r = np.abs(resid[tail])
    xs = grid[tail]
    good = r > 1e-14
    if np.count_nonzero(good) < 3:
        # residual at the numerical floor: decay is better than measurable
        h4_ok, delta, spread = True, math.inf, 0.0
    else:
        logs = np.log(r[good])
        xg = xs[good]
        slope, intercept = np.polyfit(xg, logs, 1)
        delta = -float(slope)
        spread = float(np.max(np.abs(logs - (slope * xg + intercept))))
        h4_ok = delta > 0 and spread < 0.7

    return HypothesisReport(
        h1_ok=h1_ok,
        h1_note=note,
        h2_ok=h2_ok,
        h2_max_violation=h2_max,
        h2_location=float(grid[min(i2 + 1, grid.size - 1)]),
        h3_ok=h3_ok,
        h3_max_violation=h3_max,
        h3_location=float(grid[min(i3 + 1, grid.size - 1)]),
        h4_ok=h4_ok,
        h4_delta=float(delta),
        h4_fit_spread=spread,
    )

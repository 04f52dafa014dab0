"""Euler (a,b)-logarithm, its inverse deformed exponential, and derived quantities.

The two-parameter logarithm

    log_{a,b}(x) = (x**a - x**b) / (a - b),    x > 0

is evaluated in the numerically stable form ``x**r * sinh(k*ln x) / k`` with
``r = (a+b)/2`` and ``k = |a-b|/2``.  This form is exactly symmetric in (a, b)
and does not cancel when a and b are close.

The inverse ``exp_{a,b}`` has closed forms for the natural, Tsallis/Amari,
Kaniadakis and gamma families; everything else goes through a safeguarded
Newton/bisection solve in ``u = ln x``.

All functions accept scalars or arrays and broadcast element-wise.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = [
    "DeformKind",
    "DeformParams",
    "deformed_log",
    "deformed_log_derivative",
    "deformed_exp",
    "closed_form_exp",
    "numeric_exp",
    "deformed_exp_series",
    "generalized_multiply",
    "bregman_generator",
    "bregman_divergence",
    "trace_form_entropy",
]

# |a - b| below this (with a*b <= 0, so both are ~0) selects ln/exp.
LN_BRANCH_TOL = 1e-9
INVERT_RTOL = 1e-12
INVERT_MAXITER = 200
# exp(u) stays finite and nonzero in float64 inside this window.
_U_MAX = 709.0
_U_MIN = -745.0


class DeformKind(enum.Enum):
    GENERAL = "general"
    NATURAL_LOG = "natural"
    TSALLIS = "tsallis"
    KANIADAKIS = "kaniadakis"
    AMARI = "amari"
    ABE = "abe"
    GAMMA = "gamma"


@dataclass(frozen=True)
class DeformParams:
    """The (a, b) pair defining the Euler logarithm.

    Valid pairs satisfy ``-1 < a, b < 1`` and ``a*b <= 0``.  The second
    condition keeps the logarithm strictly increasing on the whole positive
    axis and rules out ``a == b != 0``.  ``(0, 0)`` selects ``ln``.

    Use the named constructors (:meth:`tsallis`, :meth:`kaniadakis`, ...) to
    build the classical one-parameter families.
    """

    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise DomainError(f"deformation parameters must be finite, got a={a}, b={b}")
        if not (-1.0 < a < 1.0 and -1.0 < b < 1.0):
            raise DomainError(f"deformation parameters must lie in (-1, 1), got a={a}, b={b}")
        if a * b > 0.0:
            raise DomainError(
                f"invariant a*b <= 0 violated (a={a}, b={b}): the logarithm would not be "
                "monotone on the whole positive axis"
            )

    # -- named families ---------------------------------------------------

    @classmethod
    def natural(cls):
        return cls(0.0, 0.0)

    @classmethod
    def tsallis(cls, q):
        """Tsallis q-logarithm, (a, b) = (1 - q, 0)."""
        return cls(1.0 - q, 0.0)

    @classmethod
    def kaniadakis(cls, kappa):
        """Kaniadakis kappa-logarithm, (a, b) = (kappa, -kappa)."""
        return cls(kappa, -kappa)

    @classmethod
    def amari(cls, alpha):
        """Amari alpha-logarithm, (a, b) = (0, -alpha)."""
        return cls(0.0, -alpha)

    @classmethod
    def abe(cls, sigma):
        """Abe logarithm, (a, b) = (1/sigma - 1, sigma - 1)."""
        if sigma == 0:
            raise DomainError("Abe parameter sigma must be nonzero")
        return cls(1.0 / sigma - 1.0, sigma - 1.0)

    @classmethod
    def gamma(cls, g):
        """Gamma-logarithm, (a, b) = (2g, -g)."""
        return cls(2.0 * g, -g)

    @classmethod
    def from_kind(cls, kind, param=None):
        kind = DeformKind(kind)
        if kind is DeformKind.NATURAL_LOG:
            return cls.natural()
        if kind is DeformKind.GENERAL:
            raise DomainError("the general family is built directly from (a, b)")
        if param is None:
            raise DomainError(f"{kind.value} deformation needs a parameter")
        return {
            DeformKind.TSALLIS: cls.tsallis,
            DeformKind.KANIADAKIS: cls.kaniadakis,
            DeformKind.AMARI: cls.amari,
            DeformKind.ABE: cls.abe,
            DeformKind.GAMMA: cls.gamma,
        }[kind](float(param))

    # -- derived properties -----------------------------------------------

    @property
    def is_natural(self):
        return abs(self.a - self.b) < LN_BRANCH_TOL

    @property
    def branch(self):
        """Which closed-form inverse applies (GENERAL means none)."""
        a, b = self.a, self.b
        if self.is_natural:
            return DeformKind.NATURAL_LOG
        if b == 0.0:
            return DeformKind.TSALLIS
        if a == 0.0:
            return DeformKind.AMARI
        if a == -b:
            return DeformKind.KANIADAKIS
        if a == -2.0 * b or b == -2.0 * a:
            return DeformKind.GAMMA
        return DeformKind.GENERAL

    @property
    def log_range(self):
        """(inf, sup) of log_{a,b} over x in (0, inf)."""
        if self.is_natural:
            return -math.inf, math.inf
        lo, hi = min(self.a, self.b), max(self.a, self.b)
        inf_ = -math.inf if lo < 0.0 else -1.0 / hi
        sup_ = math.inf if hi > 0.0 else 1.0 / -lo
        return inf_, sup_


def _as_result(arr):
    return arr[()] if arr.ndim == 0 else arr


def _positive(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if np.any(arr <= 0.0):
        raise DomainError(f"{name} must be strictly positive")
    return arr


def _finite(y, name):
    arr = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _log_of_u(p, u):
    """log_{a,b}(exp(u))."""
    if p.is_natural:
        return np.array(u, dtype=float, copy=True)
    r = 0.5 * (p.a + p.b)
    k = 0.5 * abs(p.a - p.b)
    with np.errstate(over="ignore", invalid="ignore"):
        return np.exp(r * u) * np.sinh(k * u) / k


def _dlog_du(p, u):
    if p.is_natural:
        return np.ones_like(u)
    a, b = p.a, p.b
    # a and -b share a sign, so the numerator does not cancel
    with np.errstate(over="ignore", invalid="ignore"):
        return (a * np.exp(a * u) - b * np.exp(b * u)) / (a - b)


def deformed_log(p, x):
    """Euler (a,b)-logarithm of ``x > 0``."""
    x = _positive(x, "x")
    return _as_result(_log_of_u(p, np.log(x)))


def deformed_log_derivative(p, x):
    """d/dx log_{a,b}(x) = (a x**(a-1) - b x**(b-1)) / (a - b)."""
    x = _positive(x, "x")
    return _as_result(_dlog_du(p, np.log(x)) / x)


# -- inverse --------------------------------------------------------------

def _tsallis_exp(c, y):
    base = 1.0 + c * y
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        val = np.exp(np.log1p(c * y) / c)
    clipped = 0.0 if c > 0 else np.inf
    return np.where(base > 0.0, val, clipped)


def _kaniadakis_exp(kappa, y):
    kappa = abs(kappa)
    with np.errstate(over="ignore"):
        return np.exp(np.arcsinh(kappa * y) / kappa)


def _gamma_exp(g, y):
    # z = x**g is the positive root of z**3 - 3*g*y*z - 1 = 0 (Cardano)
    c = g * y
    c3 = c ** 3
    disc = 1.0 - 4.0 * c3
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        sq = np.sqrt(np.where(disc >= 0.0, disc, 0.0))
        t1 = np.cbrt(0.5 * (1.0 + sq))
        t2 = np.cbrt(2.0 * c3 / (1.0 + sq))
        # t1**3 + t2**3 == 1, so for t2 < 0 the sum is 1 / (t1**2 - t1*t2 + t2**2)
        z_pos = t1 + t2
        z_neg = 1.0 / (t1 * t1 - t1 * t2 + t2 * t2)
        z = np.where(t2 < 0.0, z_neg, z_pos)
        # three real roots: take the largest (the only positive one)
        cpos = np.where(disc < 0.0, c, 1.0)
        z_trig = 2.0 * np.sqrt(cpos) * np.cos(np.arccos(0.5 / cpos ** 1.5) / 3.0)
        z = np.where(disc < 0.0, z_trig, z)
        return np.exp(np.log(z) / g)


def closed_form_exp(p, y):
    """Closed-form exp_{a,b}; raises DomainError for pairs without one."""
    y = _finite(y, "y")
    branch = p.branch
    a, b = p.a, p.b
    if branch is DeformKind.NATURAL_LOG:
        with np.errstate(over="ignore"):
            out = np.exp(y)
    elif branch in (DeformKind.TSALLIS, DeformKind.AMARI):
        out = _tsallis_exp(a if b == 0.0 else b, y)
    elif branch is DeformKind.KANIADAKIS:
        out = _kaniadakis_exp(a, y)
    elif branch is DeformKind.GAMMA:
        out = _gamma_exp(-b if a == -2.0 * b else -a, y)
    else:
        raise DomainError(f"no closed-form inverse for (a={a}, b={b})")
    return _as_result(np.asarray(out, dtype=float))


def _solve_u(p, y):
    """Solve log_{a,b}(exp(u)) = y for u; y strictly inside the range."""
    if p.is_natural:
        return y.astype(float, copy=True)
    a, b = p.a, p.b
    inv = 1.0 / (a - b)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        pos = y >= 0.0
        lo = np.where(pos, 0.0, -1.0)
        hi = np.where(pos, 1.0, 0.0)

        # bracket expansion: double the half-width until the target is straddled
        while True:
            grow = pos & (_log_of_u(p, hi) < y) & (hi < _U_MAX)
            if not grow.any():
                break
            lo[grow] = hi[grow]
            hi[grow] = np.minimum(2.0 * hi[grow], _U_MAX)
        while True:
            grow = ~pos & (_log_of_u(p, lo) > y) & (lo > _U_MIN)
            if not grow.any():
                break
            hi[grow] = lo[grow]
            lo[grow] = np.maximum(2.0 * lo[grow], _U_MIN)

        u = np.full(y.size, np.nan)
        active = np.ones(y.size, dtype=bool)
        if hi.max() >= _U_MAX or lo.min() <= _U_MIN:
            overflow = pos & (_log_of_u(p, hi) < y)
            underflow = ~pos & (_log_of_u(p, lo) > y)
            u[overflow] = np.inf
            u[underflow] = -np.inf
            active = ~(overflow | underflow)
            if not active.any():
                return u
            lo, hi, y = lo[active], hi[active], y[active]

        # safeguarded Newton: fall back to bisection when a step leaves the bracket;
        # start from the second-order inverse ln x = y - r y**2 + O(y**3)
        r = 0.5 * (a + b)
        cur = np.clip(y - r * y * y, lo, hi)
        for _ in range(INVERT_MAXITER):
            ea, eb = np.exp(a * cur), np.exp(b * cur)
            f = _log_of_u(p, cur) - y
            hi = np.where(f > 0.0, cur, hi)
            lo = np.where(f < 0.0, cur, lo)
            nxt = cur - f / ((a * ea - b * eb) * inv)
            nxt = np.where((nxt >= lo) & (nxt <= hi), nxt, 0.5 * (lo + hi))
            step = np.abs(nxt - cur).max()
            cur = nxt
            if step <= INVERT_RTOL or (hi - lo).max() <= INVERT_RTOL:
                u[active] = cur
                return u
    raise ConvergenceError(
        f"exp_(a={p.a}, b={p.b}) inversion did not converge in {INVERT_MAXITER} iterations"
    )


def numeric_exp(p, y):
    """exp_{a,b} by safeguarded Newton inversion of the logarithm.

    Targets below the infimum of the logarithm's range map to 0; targets at
    or above its supremum map to +inf.
    """
    y = _finite(y, "y")
    flat = y.ravel()
    out = np.empty(flat.size)
    inf_, sup_ = p.log_range
    below = flat <= inf_
    above = flat >= sup_
    out[below] = 0.0
    out[above] = np.inf
    inside = ~(below | above)
    if inside.any():
        with np.errstate(over="ignore"):
            out[inside] = np.exp(_solve_u(p, flat[inside]))
    return _as_result(out.reshape(y.shape))


def deformed_exp(p, y, method="auto"):
    """Deformed exponential exp_{a,b}(y), the inverse of :func:`deformed_log`.

    ``method="auto"`` uses a closed form when (a, b) belongs to a family that
    has one and the numeric inversion otherwise; ``"numeric"`` and
    ``"closed"`` force one route.
    """
    if method == "numeric":
        return numeric_exp(p, y)
    if method == "closed":
        return closed_form_exp(p, y)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if p.branch is DeformKind.GENERAL:
        return numeric_exp(p, y)
    return closed_form_exp(p, y)


def deformed_exp_series(p, y):
    """Cubic Lagrange-inversion series of exp_{a,b} around y = 0.

    Only meant as a cross-check for small ``|y|`` (<= 0.5).
    """
    y = _finite(y, "y")
    a, b = p.a, p.b
    c2 = 0.5 * (1.0 - a - b)
    c3 = (1.0 - 3 * a - 3 * b + 2 * a * a + 5 * a * b + 2 * b * b) / 6.0
    return _as_result(1.0 + y + c2 * y ** 2 + c3 * y ** 3)


def generalized_multiply(p, x, y):
    """(a,b)-product exp_{a,b}(log_{a,b} x + log_{a,b} y); 1 is the identity."""
    return deformed_exp(p, np.asarray(deformed_log(p, x)) + np.asarray(deformed_log(p, y)))


def bregman_generator(p, w):
    """Mirror map F with F'(w) = log_{a,b}(w)."""
    w = _positive(w, "w")
    if p.is_natural:
        return _as_result(w * np.log(w) - w)
    # divided difference of c -> w**(c+1)/(c+1), kept stable for a close to b
    a, b = p.a, p.b
    u = np.log(w)
    d = (a - b) * u - np.log1p((a - b) / (1 + b))
    return _as_result(np.exp((b + 1) * u) / (b + 1) * np.expm1(d) / (a - b))


def bregman_divergence(p, w, w_ref):
    """Bregman divergence D_F(w || w_ref) summed over coordinates.

    Round-off negatives (|D| ~ 1e-17 for nearly equal arguments) are clipped
    to zero.
    """
    w = _positive(w, "w")
    v = _positive(w_ref, "w_ref")
    if w.shape != v.shape:
        raise DomainError(f"shape mismatch: {w.shape} vs {v.shape}")
    terms = (
        np.asarray(bregman_generator(p, w))
        - np.asarray(bregman_generator(p, v))
        - (w - v) * np.asarray(deformed_log(p, v))
    )
    return max(float(np.sum(terms)), 0.0)


def trace_form_entropy(p, prob, atol=1e-9):
    """Trace-form (Borges-Roditi) entropy sum_i p_i log_{a,b}(1/p_i), with 0 log(1/0) = 0."""
    prob = np.asarray(prob, dtype=float)
    if not np.all(np.isfinite(prob)) or np.any(prob < 0.0):
        raise DomainError("probabilities must be finite and nonnegative")
    if abs(prob.sum() - 1.0) > atol:
        raise DomainError(f"probabilities must sum to 1 (got {prob.sum()!r})")
    nz = prob[prob > 0.0]
    return float(np.sum(nz * np.asarray(deformed_log(p, 1.0 / nz))))

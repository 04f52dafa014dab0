"""Mirror-descent / generalized EG stepping on the positive orthant and the simplex."""

import enum
from dataclasses import dataclass
from functools import partial

import numpy as np

from .deform import deformed_exp, deformed_log
from .errors import DegenerateStepError, DomainError

__all__ = [
    "EPS_FLOOR",
    "CenteringVariant",
    "ProjectionKind",
    "LearningRate",
    "center_gradient",
    "md_step_generic",
    "gegu_step",
    "geg_step_normalized",
    "project",
    "project_l1_normalize",
    "project_simplex_euclidean",
]

# Floor applied to weights before they enter a logarithm.
EPS_FLOOR = 1e-12


class CenteringVariant(enum.Enum):
    WEIGHTED_MEAN = "weighted"
    UNIFORM_MEAN = "uniform"
    NONE = "none"


class ProjectionKind(enum.Enum):
    L1_NORMALIZE = "l1"
    EUCLIDEAN_SIMPLEX = "euclidean"


@dataclass(frozen=True)
class LearningRate:
    """Step size: scalar ``eta`` or per-coordinate ``eta * w**gamma``.

    A negative ``eta`` flips the update direction (follow-the-winner instead of
    follow-the-loser); its magnitude is capped by ``negative_cap``.
    """

    eta: float
    gamma: float = 0.0
    schedule: str = "scalar"
    negative_cap: float = 1.0

    def __post_init__(self):
        if self.schedule not in ("scalar", "power"):
            raise DomainError(f"schedule must be 'scalar' or 'power', got {self.schedule!r}")
        if not (np.isfinite(self.eta) and np.isfinite(self.gamma)):
            raise DomainError("learning-rate parameters must be finite")
        if self.eta < 0 and -self.eta > self.negative_cap:
            raise DomainError(
                f"negative eta={self.eta} exceeds the cap |eta| <= {self.negative_cap}"
            )

    def rates(self, w):
        w = np.asarray(w, dtype=float)
        if self.schedule == "scalar":
            return np.full(w.shape, float(self.eta))
        return self.eta * np.maximum(w, EPS_FLOOR) ** self.gamma


def _check_same_shape(grad, w):
    if grad.shape != w.shape:
        raise DomainError(f"dimension mismatch: gradient {grad.shape} vs weights {w.shape}")


def center_gradient(grad, w, variant):
    """Subtract a multiple of the all-ones vector from ``grad``.

    WEIGHTED_MEAN removes ``w @ grad`` (the gradient of L(w/|w|_1) on the
    simplex), UNIFORM_MEAN removes ``mean(grad)``, NONE returns a copy.
    """
    grad = np.asarray(grad, dtype=float)
    w = np.asarray(w, dtype=float)
    _check_same_shape(grad, w)
    variant = CenteringVariant(variant)
    if variant is CenteringVariant.WEIGHTED_MEAN:
        return grad - w @ grad
    if variant is CenteringVariant.UNIFORM_MEAN:
        return grad - grad.mean()
    return grad.copy()


def md_step_generic(link, link_inverse, w, grad, eta):
    """Explicit mirror-descent step ``link_inverse(link(w) - eta * grad)``.

    ``eta`` may be a scalar or a per-coordinate array.
    """
    w = np.asarray(w, dtype=float)
    grad = np.asarray(grad, dtype=float)
    _check_same_shape(grad, w)
    return np.asarray(link_inverse(np.asarray(link(w)) - np.asarray(eta) * grad), dtype=float)


def _raw_gegu(p, w, grad, lr):
    w = np.maximum(np.asarray(w, dtype=float), EPS_FLOOR)
    return md_step_generic(partial(deformed_log, p), partial(deformed_exp, p), w, grad, lr.rates(w))


def gegu_step(p, w, grad, lr):
    """Unnormalized generalized EG step on the positive orthant.

    Entries that the deformed exponential clips to zero are lifted to
    ``EPS_FLOOR``.
    """
    return np.maximum(_raw_gegu(p, w, grad, lr), EPS_FLOOR)


def project_l1_normalize(v):
    v = np.asarray(v, dtype=float)
    if np.any(v < 0) or not np.all(np.isfinite(v)):
        raise DomainError("l1 normalization needs finite nonnegative entries")
    s = v.sum()
    if s <= 0:
        raise DegenerateStepError("cannot normalize a vector with zero sum")
    return v / s


def project_simplex_euclidean(v):
    """Euclidean projection onto the probability simplex (sort and threshold)."""
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise DomainError("projection needs finite entries")
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(v - theta, 0.0)


def project(v, kind):
    if ProjectionKind(kind) is ProjectionKind.L1_NORMALIZE:
        return project_l1_normalize(v)
    return project_simplex_euclidean(v)


def geg_step_normalized(p, w, grad_hat, lr, proj=ProjectionKind.L1_NORMALIZE):
    """Generalized EG step followed by a projection onto the unit simplex.

    ``grad_hat`` should already be centered (see :func:`center_gradient`).
    Raises DegenerateStepError if the step clips every weight to zero or
    overflows.
    """
    raw = _raw_gegu(p, w, grad_hat, lr)
    if not np.all(np.isfinite(raw)):
        raise DegenerateStepError(f"step overflowed for (a={p.a}, b={p.b}); reduce eta")
    if not np.any(raw > 0):
        raise DegenerateStepError(f"step clipped every weight to zero for (a={p.a}, b={p.b})")
    return project(np.maximum(raw, EPS_FLOOR), proj)

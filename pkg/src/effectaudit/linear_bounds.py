"""Feasibility bounds for collections of claimed correlations and coefficients.

Three families of checks, all of the form "many simultaneously large effects
force strong interdependence":

* sum of |corr(X_i, y)| against sqrt(p + cross-correlation mass)
  (Van der Corput's inequality applied to standardized variables);
* sum of corr(X_i, y)^2 against the top eigenvalue of the correlation matrix;
* squared norm of least-squares coefficients against 1 / lambda_min of the
  second-moment matrix.

Each check returns a :class:`BoundReport` rather than a bare bool so callers
can see the slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from .errors import DimensionMismatchError, EntryOutOfRangeError
from .matrix_core import (
    CorrelationMatrix,
    SecondMomentMatrix,
    SymMatrix,
    equicorrelation,
    sym_eigen,
)

FEASIBILITY_TOLERANCE = 1e-9

# Relative eigenvalue threshold below which a second-moment matrix is treated
# as numerically singular and the coefficient-norm bound degenerates to +inf.
RANK_TOLERANCE = 1e-12


class BoundKind(str, Enum):
    VDC = "vdc"
    EIGEN = "eigen"
    REGRESSION = "regression"
    MULTI_OUTCOME = "multi_outcome"


@dataclass(frozen=True)
class BoundReport:
    """Outcome of one bound check: lhs must not exceed rhs."""

    kind: BoundKind
    lhs: float
    rhs: float
    satisfied: bool
    slack: float

    @classmethod
    def from_sides(cls, kind: BoundKind, lhs: float, rhs: float) -> "BoundReport":
        return cls(
            kind=kind,
            lhs=float(lhs),
            rhs=float(rhs),
            satisfied=bool(lhs <= rhs + FEASIBILITY_TOLERANCE),
            slack=float(rhs - lhs),
        )


@dataclass(frozen=True, eq=False)
class ClaimSet:
    """Claimed absolute correlations with one outcome, optionally with the
    cross-correlation matrix of the explanatory variables."""

    tau: np.ndarray
    cross: CorrelationMatrix | None = None

    def __post_init__(self):
        t = np.asarray(self.tau, dtype=float)
        if t.ndim != 1 or t.size < 1:
            raise DimensionMismatchError("tau must be a non-empty 1-D array")
        for i in np.flatnonzero((t < 0.0) | (t > 1.0)):
            raise EntryOutOfRangeError(int(i), int(i), float(t[i]))
        if self.cross is not None and self.cross.dim != t.size:
            raise DimensionMismatchError(
                f"cross matrix is {self.cross.dim}x{self.cross.dim}, "
                f"but {t.size} claims were given"
            )
        tt = np.array(t)
        tt.flags.writeable = False
        object.__setattr__(self, "tau", tt)

    @property
    def p(self) -> int:
        return int(self.tau.size)


@dataclass(frozen=True, eq=False)
class RegressionSolution:
    """Least-squares coefficients with the spectral norm bound ||beta||^2 <= 1/lambda_min."""

    beta: np.ndarray
    norm_sq: float
    bound: float
    lambda_min: float

    def __post_init__(self):
        b = np.array(self.beta, dtype=float)
        b.flags.writeable = False
        object.__setattr__(self, "beta", b)


@dataclass(eq=False)
class TightnessInstance:
    """Equicorrelated construction on which the correlation-sum bound is tight.

    With off-diagonal correlation tau^2 among the p explanatory variables and
    y proportional to their sum, every corr(X_i, y) equals ``implied_corr``,
    which approaches tau from above as p grows.  ``sigma`` is built lazily:
    for large p the report only needs the closed-form spectrum, not the dense
    p x p matrix.
    """

    p: int
    tau: float
    implied_corr: float

    @cached_property
    def sigma(self) -> CorrelationMatrix:
        return equicorrelation(self.p, self.tau**2)

    @property
    def lambda_max(self) -> float:
        """Top eigenvalue of sigma, in closed form."""
        return 1.0 + (self.p - 1) * self.tau**2

    @property
    def sum_sq_corr(self) -> float:
        """p * implied_corr^2; equals lambda_max exactly in real arithmetic."""
        return self.p * self.implied_corr**2


def _check_corr_vector(corr_xy: np.ndarray) -> np.ndarray:
    c = np.asarray(corr_xy, dtype=float)
    if c.ndim != 1 or c.size < 1:
        raise DimensionMismatchError("corr_xy must be a non-empty 1-D array")
    for i in np.flatnonzero(np.abs(c) > 1.0 + 1e-12):
        raise EntryOutOfRangeError(int(i), int(i), float(c[i]))
    return c


def vdc_check(corr_xy: np.ndarray, cross: CorrelationMatrix) -> BoundReport:
    """Check sum |corr(X_i, y)| <= sqrt(p + sum_{i != j} |cross_ij|).

    Holds for any joint distribution (including the empirical one), so a
    violation means the claimed numbers cannot coexist.
    """
    c = _check_corr_vector(corr_xy)
    if cross.dim != c.size:
        raise DimensionMismatchError(
            f"corr_xy has length {c.size}, cross is {cross.dim}x{cross.dim}"
        )
    lhs = float(np.abs(c).sum())
    rhs = math.sqrt(c.size + cross.off_diagonal_abs_mass())
    return BoundReport.from_sides(BoundKind.VDC, lhs, rhs)


def eigen_bound_check(corr_xy: np.ndarray, cross: CorrelationMatrix) -> BoundReport:
    """Check sum corr(X_i, y)^2 <= lambda_max(cross)."""
    c = _check_corr_vector(corr_xy)
    if cross.dim != c.size:
        raise DimensionMismatchError(
            f"corr_xy has length {c.size}, cross is {cross.dim}x{cross.dim}"
        )
    lhs = float(np.dot(c, c))
    rhs = sym_eigen(cross.base).max_value
    return BoundReport.from_sides(BoundKind.EIGEN, lhs, rhs)


def min_cross_mass(p: int, tau: float) -> float:
    """Cross-correlation mass forced by p claims of size at least tau.

    If |corr(X_i, y)| >= tau for all i, then sum_{i != j} |corr(X_i, X_j)|
    >= p (tau^2 p - 1).  Returned unclipped: a non-positive value means the
    claims are vacuously compatible with uncorrelated variables.
    """
    if p < 1:
        raise DimensionMismatchError(f"p must be at least 1, got {p}")
    if not 0.0 <= tau <= 1.0:
        raise EntryOutOfRangeError(0, 0, tau)
    return p * (tau**2 * p - 1.0)


def multi_outcome_min_mass(p: int, tau: float, eps: float) -> float:
    """Cross-correlation mass forced by claims on p nearly-identical outcomes.

    When all pairs of outcomes correlate at least 1 - eps and each
    |corr(X_i, Y_i)| >= tau, the mass bound becomes
    p ((tau - sqrt(2 eps))^2 p - 1).  For tau < sqrt(2 eps) the derivation's
    lower bound on corr(X_i, Y_1) turns negative and the formula carries no
    information; callers should treat that case as degenerate (see
    :func:`multi_outcome_degenerate`).
    """
    if p < 1:
        raise DimensionMismatchError(f"p must be at least 1, got {p}")
    if not 0.0 <= tau <= 1.0:
        raise EntryOutOfRangeError(0, 0, tau)
    if eps < 0.0:
        raise EntryOutOfRangeError(0, 0, eps)
    return p * ((tau - math.sqrt(2.0 * eps)) ** 2 * p - 1.0)


def multi_outcome_degenerate(tau: float, eps: float) -> bool:
    """True when the multi-outcome bound is uninformative (tau < sqrt(2 eps))."""
    return tau < math.sqrt(2.0 * eps)


def projection_norm_ok(a: np.ndarray) -> bool:
    """Feasibility of inner products with orthonormal variables.

    For variables U_1..U_p orthonormal in expectation and unit-variance y, the
    vector a_i = E(U_i y) must satisfy ||a|| <= 1.  Empty input is feasible.
    Used as a test helper for the spectral and regression bounds.
    """
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return True
    return float(np.linalg.norm(a)) <= 1.0 + FEASIBILITY_TOLERANCE


def fit_least_squares(m: SecondMomentMatrix, c: np.ndarray) -> RegressionSolution:
    """Solve m beta = c and attach the norm bound ||beta||^2 <= 1/lambda_min(m).

    ``m`` is the second-moment matrix E(X X^T) and ``c`` the cross-moment
    vector E(y X) for a unit-variance y under the same distribution (the
    caller's responsibility).  A numerically singular ``m`` (lambda_min at or
    below RANK_TOLERANCE relative to lambda_max) yields the minimum-norm
    solution and a bound of +inf: with a zero eigenvalue the norm bound is
    trivially infinite.
    """
    cv = np.asarray(c, dtype=float)
    if cv.ndim != 1 or cv.size != m.dim:
        raise DimensionMismatchError(
            f"c has shape {cv.shape}, expected ({m.dim},)"
        )
    lam_min = m.min_eigenvalue
    cutoff = RANK_TOLERANCE * max(1.0, m.max_eigenvalue)
    if lam_min <= cutoff:
        beta = np.linalg.lstsq(m.entries, cv, rcond=None)[0]
        bound = math.inf
    else:
        beta = np.linalg.solve(m.entries, cv)
        bound = 1.0 / lam_min
    norm_sq = float(np.dot(beta, beta))
    return RegressionSolution(beta=beta, norm_sq=norm_sq, bound=bound, lambda_min=lam_min)


def max_large_coefficients(lambda_min: float, tau: float) -> int:
    """How many coefficients of magnitude above tau the norm bound allows.

    floor(1 / (lambda_min tau^2)), with a 1e-9 relative nudge so values that
    are integers in real arithmetic do not round down from float error.
    """
    if lambda_min <= 0.0 or tau <= 0.0:
        raise EntryOutOfRangeError(0, 0, min(lambda_min, tau))
    v = 1.0 / (lambda_min * tau * tau)
    return int(math.floor(v * (1.0 + 1e-9)))


def tightness_instance(p: int, tau: float) -> TightnessInstance:
    """Build the equicorrelated instance where the correlation-sum bound is tight.

    implied_corr = (1 + (p-1) tau^2) / sqrt(p + p (p-1) tau^2), which lies in
    [tau, 1] and decreases toward tau as p grows.
    """
    if p < 1:
        raise DimensionMismatchError(f"p must be at least 1, got {p}")
    if not 0.0 <= tau <= 1.0:
        raise EntryOutOfRangeError(0, 0, tau)
    num = 1.0 + (p - 1) * tau**2
    implied = num / math.sqrt(p + p * (p - 1) * tau**2)
    return TightnessInstance(p=p, tau=float(tau), implied_corr=float(implied))

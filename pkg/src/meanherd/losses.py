"""Binary-margin losses, corruption corrections and robustness analysis.

Score convention: a loss maps (y, v) with y in {-1, +1} and v a real
score.  A score of exactly zero is an abstention and is counted as an
error by the zero-one loss (both labels pay 1 at v = 0).

The "sum constancy" checks below test l(1, v) + l(-1, v) = C on a finite
symmetric grid.  The abstention convention double-counts the single
point v = 0 (both labels pay 1 there), so constancy scans skip v = 0;
every other grid point is evaluated exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .data import DiscreteDistribution, InstanceDistribution, LabeledSample
from .errors import InputError

CONSTANCY_TOL = 1e-9


@dataclass(frozen=True)
class Loss:
    """A named binary-margin loss with a declared convexity flag."""

    name: str
    fn: Callable[[int, np.ndarray], np.ndarray]
    convex: bool

    def __call__(self, y: int, v):
        if y not in (-1, 1):
            raise InputError(f"label must be -1 or +1, got {y!r}")
        return self.fn(y, np.asarray(v, dtype=float))


def _linear(y, v):
    return 1.0 - y * v


def _hinge(y, v):
    return np.maximum(1.0 - y * v, 0.0)


def _logistic(y, v):
    return np.logaddexp(0.0, -y * v)


def _zero_one(y, v):
    return np.where((y * v < 0) | (v == 0), 1.0, 0.0)


linear_loss = Loss("linear", _linear, convex=True)
hinge_loss = Loss("hinge", _hinge, convex=True)
logistic_loss = Loss("logistic", _logistic, convex=True)
zero_one_loss = Loss("zero-one", _zero_one, convex=False)


def margin_loss(gamma: float) -> Loss:
    """1 when y v < gamma (or v = 0); reduces to zero-one loss at gamma = 0."""
    if gamma < 0:
        raise InputError(f"margin must be >= 0, got {gamma}")

    def fn(y, v):
        return np.where((y * v < gamma) | (v == 0), 1.0, 0.0)

    return Loss(f"margin:{gamma:g}", fn, convex=False)


BUILTIN_LOSSES = {
    "linear": linear_loss,
    "hinge": hinge_loss,
    "logistic": logistic_loss,
    "zero-one": zero_one_loss,
}


@dataclass(frozen=True)
class EvaluationGrid:
    """Symmetric finite score grid standing in for 'for all v in R' checks."""

    limit: float = 3.0
    step: float = 0.01

    def __post_init__(self):
        if not (self.limit > 0 and self.step > 0):
            raise InputError("grid limit and step must be positive")

    @property
    def values(self) -> np.ndarray:
        # step * (-k) negates exactly, so the grid is symmetric bit for bit
        half = round(self.limit / self.step)
        return self.step * np.arange(-half, half + 1)


def default_grid() -> EvaluationGrid:
    # Must extend beyond |v| = 1 so hinge's non-constant tail is visible.
    return EvaluationGrid(limit=3.0, step=0.01)


# ---------------------------------------------------------------------------
# Risks


def risk(loss: Loss, P: DiscreteDistribution, f) -> float:
    """Exact expectation of loss(y, f(x)) over the finite support of P."""
    X = P.instances_array()
    y = P.labels_array()
    v = np.array([float(f(x)) for x in X])
    vals = np.where(y == 1, loss(1, v), loss(-1, v))
    return float(np.dot(P.probabilities, vals))


def empirical_risk(loss: Loss, S: LabeledSample, f) -> float:
    v = np.array([float(f(x)) for x in S.instances])
    vals = np.where(S.labels == 1, loss(1, v), loss(-1, v))
    return float(np.mean(vals))


def balanced_error(loss: Loss, P_pos: InstanceDistribution, P_neg: InstanceDistribution, f) -> float:
    """Average of the per-class risks, weighting both classes equally."""
    vp = np.array([float(f(x)) for x in P_pos.instances_array()])
    vn = np.array([float(f(x)) for x in P_neg.instances_array()])
    pos = float(np.dot(P_pos.probabilities, loss(1, vp)))
    neg = float(np.dot(P_neg.probabilities, loss(-1, vn)))
    return 0.5 * pos + 0.5 * neg


# ---------------------------------------------------------------------------
# Corruption-corrected losses


def correct_sln(loss: Loss, sigma: float) -> Loss:
    """Unbiased-estimator correction for symmetric label noise at rate sigma."""
    if not (0.0 <= sigma < 0.5):
        raise InputError(f"sigma must lie in [0, 0.5), got {sigma}")

    def fn(y, v):
        return ((1.0 - sigma) * loss.fn(y, v) - sigma * loss.fn(-y, v)) / (1.0 - 2.0 * sigma)

    # The correction preserves convexity only for noise-robust bases;
    # declared conservatively.
    return Loss(f"sln-corrected:{loss.name}:{sigma:g}", fn, convex=False)


def correct_cc(loss: Loss, sigma_neg: float, sigma_pos: float) -> Loss:
    """Class-conditional correction with flip rates (sigma_neg, sigma_pos)."""
    if sigma_neg < 0 or sigma_pos < 0 or sigma_neg + sigma_pos >= 1.0:
        raise InputError(
            f"rates must be >= 0 with sum < 1, got ({sigma_neg}, {sigma_pos})"
        )
    denom = 1.0 - sigma_neg - sigma_pos

    def fn(y, v):
        s_y = sigma_pos if y == 1 else sigma_neg
        s_my = sigma_neg if y == 1 else sigma_pos
        return ((1.0 - s_my) * loss.fn(y, v) - s_y * loss.fn(-y, v)) / denom

    return Loss(f"cc-corrected:{loss.name}:{sigma_neg:g}:{sigma_pos:g}", fn, convex=False)


# ---------------------------------------------------------------------------
# Robustness analysis


@dataclass(frozen=True)
class RobustnessVerdict:
    is_robust: bool
    constant: float | None
    degenerate: bool  # l(-1, .) identical to l(1, .): excluded pathology

    @property
    def verdict(self) -> str:
        if self.degenerate:
            return "degenerate"
        return "robust" if self.is_robust else "not-robust"


def _constancy_grid(grid: EvaluationGrid) -> np.ndarray:
    v = grid.values
    return v[v != 0.0]


def sln_robustness_check(loss: Loss, grid: EvaluationGrid | None = None) -> RobustnessVerdict:
    """Noise robustness iff l(1, v) + l(-1, v) is constant over the grid."""
    grid = grid or default_grid()
    v = _constancy_grid(grid)
    pos = loss(1, v)
    neg = loss(-1, v)
    if np.max(np.abs(pos - neg)) <= 1e-12:
        return RobustnessVerdict(is_robust=False, constant=None, degenerate=True)
    sums = pos + neg
    c = float(np.median(sums))
    if np.max(np.abs(sums - c)) <= CONSTANCY_TOL:
        return RobustnessVerdict(is_robust=True, constant=c, degenerate=False)
    return RobustnessVerdict(is_robust=False, constant=None, degenerate=False)


@dataclass(frozen=True)
class OrderFit:
    alpha: float
    beta: float
    residual: float
    fittable: bool

    @property
    def order_equivalent(self) -> bool:
        return self.fittable and self.alpha > 0 and self.residual <= CONSTANCY_TOL


def order_equivalence_fit(loss1: Loss, loss2: Loss, grid: EvaluationGrid | None = None) -> OrderFit:
    """Least-squares affine fit loss2 = alpha * loss1 + beta over {-1,+1} x grid.

    Order equivalence of two losses is exactly a positive affine relation
    between them, so a zero-residual fit with alpha > 0 certifies it.
    """
    grid = grid or default_grid()
    v = grid.values
    a = np.concatenate([loss1(1, v), loss1(-1, v)])
    b = np.concatenate([loss2(1, v), loss2(-1, v)])
    if np.ptp(a) <= 1e-12:
        return OrderFit(alpha=float("nan"), beta=float("nan"), residual=float("inf"), fittable=False)
    A = np.column_stack([a, np.ones_like(a)])
    (alpha, beta), *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.max(np.abs(A @ np.array([alpha, beta]) - b)))
    return OrderFit(alpha=float(alpha), beta=float(beta), residual=residual, fittable=True)


@dataclass(frozen=True)
class CCRatioResult:
    holds: bool
    constant: float | None
    fit: OrderFit | None


def cc_ratio_check(
    loss: Loss, sigma_neg: float, sigma_pos: float, grid: EvaluationGrid | None = None
) -> CCRatioResult:
    """Check sigma_pos * l(-1, v) + sigma_neg * l(1, v) = C on the grid.

    When the weighted sum is constant, the class-conditional corrected
    loss is a positive affine image of the original, and the affine fit
    is returned as the certificate.
    """
    grid = grid or default_grid()
    v = _constancy_grid(grid)
    weighted = sigma_pos * loss(-1, v) + sigma_neg * loss(1, v)
    c = float(np.median(weighted))
    if np.max(np.abs(weighted - c)) > CONSTANCY_TOL:
        return CCRatioResult(holds=False, constant=None, fit=None)
    fit = order_equivalence_fit(loss, correct_cc(loss, sigma_neg, sigma_pos), grid)
    return CCRatioResult(holds=True, constant=c, fit=fit)


def linearity_slopes(loss: Loss, grid: EvaluationGrid | None = None) -> tuple[float, float, float]:
    """Per-label affine fits in v; returns (slope at y=+1, slope at y=-1, max residual).

    For a convex noise-robust loss the slopes must be exact negatives:
    such losses are affine in v with l(y, v) = lambda y v + g(y).
    """
    grid = grid or default_grid()
    v = grid.values
    A = np.column_stack([v, np.ones_like(v)])
    slopes = []
    res = 0.0
    for y in (1, -1):
        coef, *_ = np.linalg.lstsq(A, loss(y, v), rcond=None)
        slopes.append(float(coef[0]))
        res = max(res, float(np.max(np.abs(A @ coef - loss(y, v)))))
    return slopes[0], slopes[1], res


# ---------------------------------------------------------------------------
# CLI loss names


def parse_loss(name: str) -> Loss:
    """Resolve a loss name of the documented grammar.

    ``linear`` | ``hinge`` | ``logistic`` | ``zero-one`` | ``margin:<g>``
    | ``sln-corrected:<base>:<sigma>`` | ``cc-corrected:<base>:<s_neg>:<s_pos>``
    """
    if name in BUILTIN_LOSSES:
        return BUILTIN_LOSSES[name]
    parts = name.split(":")
    try:
        if parts[0] == "margin" and len(parts) == 2:
            return margin_loss(float(parts[1]))
        if parts[0] == "sln-corrected" and len(parts) == 3:
            return correct_sln(parse_loss(parts[1]), float(parts[2]))
        if parts[0] == "cc-corrected" and len(parts) == 4:
            return correct_cc(parse_loss(parts[1]), float(parts[2]), float(parts[3]))
    except ValueError as exc:
        raise InputError(f"bad loss name {name!r}: {exc}") from exc
    raise InputError(f"unknown loss name {name!r}")

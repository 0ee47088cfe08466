"""Kernel herding: greedy sparse approximation of a mean embedding.

Herding is conditional-gradient (Frank-Wolfe) descent on
||omega_target - omega_tilde||^2 over the convex hull of the candidate
feature vectors, here the label-augmented vectors y phi(x).  Every
quantity is maintained through kernel sums, so the engine never touches
feature space:

    c[j]           = <omega_target, psi(z_j)>
    s[j]           = <omega_tilde,  psi(z_j)>
    b              = <omega_target, omega_tilde>
    q              = ||omega_tilde||^2
    error^2        = ||omega_target||^2 - 2 b + q

The closed-form line search lambda* = <omega_target - omega_tilde,
psi(z*) - omega_tilde> / ||psi(z*) - omega_tilde||^2, clipped to [0, 1],
is the exact minimizer of the quadratic along the segment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .classifier import MeanClassifier
from .data import LabeledSample
from .errors import DataError, InputError
from .kernels import KernelSpec, cross_gram

STEP_RULES = ("line_search", "uniform")
RESERVED_STEP_RULES = ("fully_corrective", "away_steps")  # extension points

# Improvements below this are indistinguishable from rounding noise;
# treated as stationarity.
_STATIONARY_EPS = 1e-15


@dataclass(frozen=True)
class HerdingConfig:
    tolerance: float = 0.01
    max_iterations: int = 1000
    step_rule: str = "line_search"
    lazy: bool = False  # stream kernel rows instead of storing the full matrix

    def __post_init__(self):
        if not self.tolerance > 0:
            raise InputError(f"tolerance must be > 0, got {self.tolerance}")
        if self.max_iterations < 1:
            raise InputError("max_iterations must be >= 1")
        if self.step_rule in RESERVED_STEP_RULES:
            raise NotImplementedError(
                f"step rule {self.step_rule!r} is a declared extension point, not implemented"
            )
        if self.step_rule not in STEP_RULES:
            raise InputError(f"unknown step rule {self.step_rule!r}, expected one of {STEP_RULES}")


@dataclass(frozen=True)
class StageSummary:
    size_before: int
    size_after: int
    error: float
    termination: str


@dataclass(frozen=True)
class Herd:
    """Sparse weighted representative set with its tracked approximation error."""

    kernel: KernelSpec
    indices: np.ndarray  # candidate indices into the source sample
    alphas: np.ndarray   # matching weights, non-negative, sum to 1
    error: float
    trace: tuple[float, ...]
    termination: str
    stages: tuple[StageSummary, ...] = field(default=())
    group_errors: tuple[float, ...] = field(default=())
    sizes: tuple[int, ...] = field(default=())  # distinct members per trace entry

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int)
        a = np.asarray(self.alphas, dtype=float)
        if idx.shape != a.shape:
            raise InputError("indices and alphas must align")
        if np.any(a < 0) or abs(a.sum() - 1.0) > 1e-12:
            raise InputError("herd weights must be non-negative and sum to 1")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "trace", tuple(float(t) for t in self.trace))

    @property
    def size(self) -> int:
        return self.indices.shape[0]

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel.to_dict(),
            "members": [
                {"alpha": float(a), "index": int(i)}
                for a, i in zip(self.alphas, self.indices)
            ],
            "error": float(self.error),
            "trace": list(self.trace),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "Herd":
        return cls(
            kernel=KernelSpec.from_dict(d["kernel"]),
            indices=np.array([m["index"] for m in d["members"]]),
            alphas=np.array([m["alpha"] for m in d["members"]]),
            error=float(d["error"]),
            trace=tuple(d.get("trace", ())),
            termination=d.get("termination", "unknown"),
        )


class _LabelGramView:
    """Rows of the label-augmented Gram matrix, dense or streamed on demand."""

    def __init__(self, spec: KernelSpec, S: LabeledSample, lazy: bool):
        self.spec = spec
        self.X = S.instances
        self.y = S.labels.astype(float)
        self.n = len(S)
        self._dense = None
        self._cache: dict[int, np.ndarray] = {}
        if not lazy:
            K = cross_gram(spec, self.X, self.X)
            K = 0.5 * (K + K.T)
            self._dense = np.outer(self.y, self.y) * K
            if not np.all(np.isfinite(self._dense)):
                raise DataError("non-finite kernel values in candidate set")

    def row(self, i: int) -> np.ndarray:
        if self._dense is not None:
            return self._dense[i]
        if i not in self._cache:
            r = cross_gram(self.spec, self.X[i][np.newaxis], self.X)[0]
            r = self.y[i] * self.y * r
            if not np.all(np.isfinite(r)):
                raise DataError("non-finite kernel values in candidate set")
            self._cache[i] = r
        return self._cache[i]

    def weighted_columns(self, weights: np.ndarray) -> np.ndarray:
        """sum_i weights[i] * L[i, :] - one O(n^2) pass, O(n) memory when lazy."""
        if self._dense is not None:
            return weights @ self._dense
        out = np.zeros(self.n)
        for i in np.nonzero(weights)[0]:
            out += weights[i] * self.row(int(i))
        return out


def herd(
    S: LabeledSample,
    kernel: KernelSpec,
    config: HerdingConfig | None = None,
    target_weights=None,
) -> Herd:
    """Greedy sparse approximation of the (weighted) mean embedding of S.

    The target is sum_j t_j y_j phi(x_j) with t uniform by default, so it
    lies in the convex hull of the candidates and line-search steps enjoy
    the geometric convergence rate.  Ties in the greedy argmax break to
    the lowest candidate index; candidates may be re-selected, in which
    case their weights accumulate.
    """
    config = config or HerdingConfig()
    n = len(S)
    L = _LabelGramView(kernel, S, lazy=config.lazy)
    if target_weights is None:
        t = np.full(n, 1.0 / n)
    else:
        t = np.asarray(target_weights, dtype=float)
        if t.shape != (n,) or np.any(t < 0) or abs(t.sum() - 1.0) > 1e-10:
            raise InputError("target weights must be a probability vector over the candidates")

    c = L.weighted_columns(t)           # <omega_target, psi(z_j)>
    target_sq = float(t @ c)            # ||omega_target||^2

    w = np.zeros(n)
    first = int(np.argmax(c))
    w[first] = 1.0
    s = L.row(first).copy()
    b = float(c[first])
    q = float(L.row(first)[first])

    def current_error() -> float:
        return float(np.sqrt(max(target_sq - 2.0 * b + q, 0.0)))

    trace = [current_error()]
    sizes = [1]
    termination = "tolerance"
    iteration = 1
    while trace[-1] > config.tolerance:
        if iteration >= config.max_iterations:
            termination = "max_iterations"
            break
        z = int(np.argmax(c - s))
        row_z = L.row(z)
        denom = float(row_z[z]) - 2.0 * float(s[z]) + q
        numer = float(c[z]) - b - float(s[z]) + q
        if config.step_rule == "line_search":
            if denom <= _STATIONARY_EPS or numer <= _STATIONARY_EPS:
                termination = "stationary"
                break
            lam = min(max(numer / denom, 0.0), 1.0)
        else:
            lam = 1.0 / (iteration + 1)
        w *= 1.0 - lam
        w[z] += lam
        q = (1.0 - lam) ** 2 * q + 2.0 * lam * (1.0 - lam) * float(s[z]) + lam**2 * float(row_z[z])
        b = (1.0 - lam) * b + lam * float(c[z])
        s = (1.0 - lam) * s + lam * row_z
        trace.append(current_error())
        sizes.append(int(np.count_nonzero(w)))
        iteration += 1

    members = np.nonzero(w)[0]
    alphas = w[members]
    alphas = alphas / alphas.sum()  # remove accumulated rounding in the simplex sum
    return Herd(
        kernel=kernel,
        indices=members,
        alphas=alphas,
        error=trace[-1],
        trace=tuple(trace),
        termination=termination,
        sizes=tuple(sizes),
    )


def approximation_error(
    herd_: Herd, S: LabeledSample, kernel: KernelSpec, target_weights=None
) -> float:
    """||omega_target - omega_herd|| recomputed from scratch via kernel sums."""
    n = len(S)
    idx = herd_.indices
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise InputError("herd indices out of range for the sample")
    if target_weights is None:
        t = np.full(n, 1.0 / n)
    else:
        t = np.asarray(target_weights, dtype=float)
    y = S.labels.astype(float)
    Xm = S.instances[idx]
    ym = y[idx]
    a = herd_.alphas

    K_full = cross_gram(kernel, S.instances, S.instances)
    K_full = 0.5 * (K_full + K_full.T)
    L_full = np.outer(y, y) * K_full
    target_sq = float(t @ L_full @ t)
    L_mS = (ym[:, np.newaxis] * y[np.newaxis, :]) * cross_gram(kernel, Xm, S.instances)
    cross = float(a @ (L_mS @ t))
    L_mm = (ym[:, np.newaxis] * ym[np.newaxis, :]) * cross_gram(kernel, Xm, Xm)
    herd_sq = float(a @ L_mm @ a)
    return float(np.sqrt(max(target_sq - 2.0 * cross + herd_sq, 0.0)))


def parallel_herd(
    S: LabeledSample,
    groups: int,
    kernel: KernelSpec,
    config: HerdingConfig | None = None,
    shuffle_seed: int | None = None,
) -> Herd:
    """Herd contiguous near-equal groups independently, then mix by group mass.

    The mean is a mean of means, so combining per-group herds with
    weights n_i / n approximates the full mean to the worst per-group
    tolerance.  The reported error is recomputed exactly against the
    full uniform mean.  Groups are contiguous index blocks so runs are
    reproducible without an RNG; ``shuffle_seed`` opts in to a seeded
    permutation for experiments.
    """
    config = config or HerdingConfig()
    n = len(S)
    if groups < 1 or groups > n:
        raise InputError(f"groups must lie in [1, {n}], got {groups}")
    order = np.arange(n)
    if shuffle_seed is not None:
        order = np.random.default_rng(shuffle_seed).permutation(n)
    blocks = np.array_split(order, groups)

    all_idx: list[int] = []
    all_alpha: list[float] = []
    group_errors = []
    terminations = set()
    for block in blocks:
        sub = S.subset(block)
        h = herd(sub, kernel, config)
        group_errors.append(h.error)
        terminations.add(h.termination)
        weight = len(block) / n
        for local_i, a in zip(h.indices, h.alphas):
            all_idx.append(int(block[local_i]))
            all_alpha.append(float(a * weight))

    combined = Herd(
        kernel=kernel,
        indices=np.array(all_idx, dtype=int),
        alphas=np.array(all_alpha) / np.sum(all_alpha),
        error=0.0,
        trace=(0.0,),
        termination="tolerance" if terminations == {"tolerance"} else "mixed",
        group_errors=tuple(group_errors),
    )
    err = approximation_error(combined, S, kernel)
    return Herd(
        kernel=kernel,
        indices=combined.indices,
        alphas=combined.alphas,
        error=err,
        trace=(err,),
        termination=combined.termination,
        group_errors=combined.group_errors,
        sizes=(combined.size,),
    )


def recursive_herd(
    S: LabeledSample,
    kernel: KernelSpec,
    tolerance: float,
    min_size: int,
    config: HerdingConfig | None = None,
) -> Herd:
    """Herd the data, then the herd, and so on, until shrinking stops.

    Each stage approximates the previous stage's weighted mean to the
    given tolerance using only that stage's members as candidates, so
    the total error against the original mean is at most the sum of
    stage errors; the reported error is recomputed exactly.
    """
    if min_size < 1:
        raise InputError("min_size must be >= 1")
    base = config or HerdingConfig()
    stage_config = HerdingConfig(
        tolerance=tolerance,
        max_iterations=base.max_iterations,
        step_rule=base.step_rule,
        lazy=base.lazy,
    )
    n = len(S)
    current_idx = np.arange(n)
    current_w = np.full(n, 1.0 / n)
    stages: list[StageSummary] = []
    while len(current_idx) > min_size:
        sub = S.subset(current_idx)
        h = herd(sub, kernel, stage_config, target_weights=current_w)
        new_idx = current_idx[h.indices]
        new_w = h.alphas
        stages.append(
            StageSummary(
                size_before=len(current_idx),
                size_after=len(new_idx),
                error=h.error,
                termination=h.termination,
            )
        )
        shrank = len(new_idx) < len(current_idx)
        current_idx, current_w = new_idx, new_w
        if not shrank:
            break

    final = Herd(
        kernel=kernel,
        indices=current_idx,
        alphas=current_w,
        error=0.0,
        trace=(0.0,),
        termination="recursive",
        stages=tuple(stages),
    )
    err = approximation_error(final, S, kernel)
    return Herd(
        kernel=kernel,
        indices=final.indices,
        alphas=final.alphas,
        error=err,
        trace=(err,),
        termination="recursive",
        stages=final.stages,
        sizes=(final.size,),
    )


def herd_to_classifier(herd_: Herd, S: LabeledSample, kernel: KernelSpec) -> MeanClassifier:
    """Sparse mean classifier carrying the herd's weights.

    For bounded kernels the sup-norm gap between the full and sparse
    score functions is at most the herd's approximation error
    (Cauchy-Schwarz against ||phi(x)|| <= 1).
    """
    idx = herd_.indices
    if idx.size == 0 or idx.max() >= len(S) or idx.min() < 0:
        raise InputError("herd indices out of range for the sample")
    return MeanClassifier(
        kernel=kernel,
        alphas=herd_.alphas,
        labels=S.labels[idx],
        points=S.instances[idx],
    )


@dataclass(frozen=True)
class ConvergenceReport:
    monotone: bool
    fitted_rate: float


def convergence_report(trace) -> ConvergenceReport:
    """Monotonicity and the fitted exponential rate of an error trace.

    The fitted rate is the least-squares slope of log(error) against
    iteration over the strictly-positive-error prefix; line-search
    herding with an interior target should show a clearly negative rate.
    """
    errors = np.asarray(trace, dtype=float)
    if errors.shape[0] < 3:
        raise InputError("trace must have at least 3 entries")
    monotone = bool(np.all(np.diff(errors) <= 1e-12))
    positive = errors > 0
    if positive.all():
        prefix = errors
    else:
        prefix = errors[: int(np.argmin(positive))]
    if prefix.shape[0] < 2:
        rate = 0.0
    else:
        it = np.arange(prefix.shape[0])
        rate = float(np.polyfit(it, np.log(prefix), 1)[0])
    return ConvergenceReport(monotone=monotone, fitted_rate=rate)

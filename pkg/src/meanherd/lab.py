"""Brute-force oracles and experiment drivers for the robustness theory.

Every check here runs at the population level on exact finite-support
distributions, so the identities are verified to 1e-10..1e-12 rather
than statistically.  ``brute_force_min`` is the ground-truth minimizer
oracle over finite score-table classes; anything cleverer added later
must match it exactly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import embedding as emb
from .classifier import fit, margin_for_error, mmd  # noqa: F401  (mmd re-exported for drivers)
from .data import (
    DiscreteDistribution,
    InstanceDistribution,
    LabeledSample,
    NoiseFunctionTable,
    flip_instance_dependent,
    flip_symmetric,
    contaminate,
    long_servedio,
    mutually_contaminate,
    synth_blobs,
)
from .errors import InputError
from .herding import (
    HerdingConfig,
    approximation_error,
    herd,
    herd_to_classifier,
    parallel_herd,
    recursive_herd,
)
from .kernels import KernelSpec
from .losses import (
    Loss,
    balanced_error,
    linear_loss,
    risk,
    sln_robustness_check,
    zero_one_loss,
)

_ZERO_SCORE_TOL = 1e-12  # scores below this magnitude count as abstentions


@dataclass(frozen=True)
class FiniteFunctionClass:
    """Candidate classifiers as score tables over a fixed instance list."""

    instances: tuple[tuple[float, ...], ...]
    scores: np.ndarray  # (k, m)

    def __post_init__(self):
        s = np.asarray(self.scores, dtype=float)
        if s.ndim != 2 or s.shape[1] != len(self.instances):
            raise InputError("scores must be (k, len(instances))")
        if s.shape[0] < 1:
            raise InputError("function class must be non-empty")
        if not np.all(np.isfinite(s)):
            raise InputError("scores must be finite")
        object.__setattr__(self, "scores", s)

    @property
    def size(self) -> int:
        return self.scores.shape[0]

    def column_of(self, x) -> int:
        key = tuple(float(v) for v in x)
        try:
            return self.instances.index(key)
        except ValueError:
            raise InputError(f"instance {key} not covered by the function class") from None

    def as_function(self, index: int):
        row = self.scores[index]
        lookup = {inst: row[j] for j, inst in enumerate(self.instances)}

        def f(x):
            return lookup[tuple(float(v) for v in x)]

        return f


@dataclass
class Assertion:
    name: str
    expected: float | str
    measured: float | str
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "expected": self.expected,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass
class ExperimentReport:
    name: str
    inputs: dict
    assertions: list[Assertion] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def check(self, name, expected, measured, tolerance) -> Assertion:
        if isinstance(expected, str) or isinstance(measured, str):
            ok = expected == measured
        else:
            ok = abs(float(measured) - float(expected)) <= tolerance
        a = Assertion(name, expected, measured, tolerance, bool(ok))
        self.assertions.append(a)
        return a

    def check_le(self, name, measured, limit, tolerance=0.0) -> Assertion:
        ok = float(measured) <= float(limit) + tolerance
        a = Assertion(name, f"<= {limit}", float(measured), tolerance, bool(ok))
        self.assertions.append(a)
        return a

    def check_true(self, name, condition) -> Assertion:
        a = Assertion(name, "true", "true" if condition else "false", 0.0, bool(condition))
        self.assertions.append(a)
        return a

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs": self.inputs,
            "passed": self.passed,
            "assertions": [a.to_dict() for a in self.assertions],
            "notes": self.notes,
            "extras": self.extras,
            "runtime": self.runtime,
        }


class _timed:
    def __init__(self, report: ExperimentReport):
        self.report = report

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        self.report.runtime = time.perf_counter() - self.t0
        return False


# ---------------------------------------------------------------------------
# Random instances for audits (documented so runs are reproducible)


def random_distribution(rng, max_support=6, min_support=2, d=2) -> DiscreteDistribution:
    """Support of 2..max_support points in d dimensions, Dirichlet(1) weights."""
    m = int(rng.integers(min_support, max_support + 1))
    X = rng.normal(size=(m, d))
    y = rng.choice((-1, 1), size=m)
    p = rng.dirichlet(np.ones(m))
    support = tuple((tuple(x), int(lbl)) for x, lbl in zip(X, y))
    return DiscreteDistribution(support=support, probabilities=p)


def random_function_class(rng, instances, k, bound=1.0) -> FiniteFunctionClass:
    scores = rng.uniform(-bound, bound, size=(k, len(instances)))
    return FiniteFunctionClass(instances=tuple(instances), scores=scores)


# ---------------------------------------------------------------------------
# Oracles


def brute_force_min(loss: Loss, P: DiscreteDistribution, fclass: FiniteFunctionClass):
    """Exhaustive exact minimizer of the population risk over the class.

    Returns (best index, best risk); ties break to the lowest index.
    """
    cols = np.array([fclass.column_of(x) for x, _ in P.support])
    labels = P.labels_array()
    V = fclass.scores[:, cols]  # (k, atoms)
    L = np.where(labels[np.newaxis, :] == 1, loss(1, V), loss(-1, V))
    risks = L @ P.probabilities
    best = int(np.argmin(risks))
    return best, float(risks[best])


def _bayes_table(P: DiscreteDistribution) -> dict[tuple[float, ...], float]:
    """Score table of the Bayes classifier: -1 where 1 - 2 eta >= 0, else +1."""
    return {x: (-1.0 if 1.0 - 2.0 * eta >= 0.0 else 1.0) for x, eta in P.eta().items()}


def _table_fn(table: dict):
    return lambda x: table[tuple(float(v) for v in x)]


# ---------------------------------------------------------------------------
# Theorem checks


def _regret_gap(P: DiscreteDistribution, f_table: dict) -> float:
    """mis regret minus linear regret for a score table; must be <= 0."""
    for x, v in f_table.items():
        if abs(v) > 1.0:
            raise InputError(f"score {v} at {x} exceeds 1 in magnitude")
    fP = _bayes_table(P)
    mis_regret = risk(zero_one_loss, P, _table_fn(f_table)) - risk(
        zero_one_loss, P, _table_fn(fP)
    )
    lin_regret = risk(linear_loss, P, _table_fn(f_table)) - risk(
        linear_loss, P, _table_fn(fP)
    )
    return mis_regret - lin_regret


def check_surrogate_regret(
    P: DiscreteDistribution | None = None,
    f: dict | None = None,
    trials: int = 1000,
    seed: int = 0,
    max_support: int = 5,
) -> ExperimentReport:
    """Misclassification regret never exceeds linear-loss regret.

    Audits the supplied (P, f) pair when given (f is a score table with
    |f| <= 1 over the support), then seeded random pairs, comparing both
    regrets against the minimizer computed from the exact per-instance
    posterior.
    """
    report = ExperimentReport(
        name="surrogate-regret",
        inputs={"trials": trials, "seed": seed, "max_support": max_support},
    )
    with _timed(report):
        if P is not None and f is not None:
            report.check_le("supplied pair: mis_regret - lin_regret", _regret_gap(P, f), 0.0, 1e-12)
        rng = np.random.default_rng(seed)
        worst = -np.inf
        for _ in range(trials):
            Q = random_distribution(rng, max_support=max_support)
            instances = sorted(set(x for x, _ in Q.support))
            f_table = {x: float(rng.uniform(-1, 1)) for x in instances}
            worst = max(worst, _regret_gap(Q, f_table))
        report.check_le("max(mis_regret - lin_regret)", worst, 0.0, tolerance=1e-12)
    return report


def check_sln_immunity(
    P: DiscreteDistribution, sigmas, kernel: KernelSpec
) -> ExperimentReport:
    """Symmetric noise scales the mean embedding by 1 - 2 sigma, labels unchanged."""
    report = ExperimentReport(
        name="sln-immunity", inputs={"sigmas": list(sigmas), "kernel": kernel.to_dict()}
    )
    with _timed(report):
        clean = fit(P, kernel)
        X = P.instances_array()
        clean_scores = clean.scores(X)
        for sigma in sigmas:
            if not (0.0 < sigma < 0.5):
                raise InputError(f"sigma must lie in (0, 0.5), got {sigma}")
            P_sigma = flip_symmetric(P, sigma)
            diff = emb.combine(
                (1.0, emb.Embedding.from_distribution(P_sigma)),
                (-(1.0 - 2.0 * sigma), emb.Embedding.from_distribution(P)),
            )
            report.check_le(
                f"||omega_noisy - (1-2*{sigma}) omega_clean||",
                emb.norm(kernel, diff),
                0.0,
                tolerance=1e-12,
            )
            noisy_scores = fit(P_sigma, kernel).scores(X)
            s_clean = np.where(np.abs(clean_scores) <= _ZERO_SCORE_TOL, 0, np.sign(clean_scores))
            s_noisy = np.where(np.abs(noisy_scores) <= _ZERO_SCORE_TOL, 0, np.sign(noisy_scores))
            report.check_true(f"labels agree on support (sigma={sigma})", np.array_equal(s_clean, s_noisy))
    return report


def check_contamination(
    P: DiscreteDistribution, Q: DiscreteDistribution, sigma: float, kernel: KernelSpec
) -> ExperimentReport:
    """Corruption below the margin for error leaves zero-one risk unchanged.

    The implication is one-way: when sigma ||omega_P - omega_Q|| is not
    below the margin, the report only records the measurements.
    """
    report = ExperimentReport(
        name="contamination", inputs={"sigma": sigma, "kernel": kernel.to_dict()}
    )
    with _timed(report):
        clean = fit(P, kernel)
        perturbation = sigma * emb.norm(
            kernel,
            emb.combine(
                (1.0, emb.Embedding.from_distribution(P)),
                (-1.0, emb.Embedding.from_distribution(Q)),
            ),
        )
        margin = margin_for_error(P, clean.score)
        report.extras["perturbation"] = perturbation
        report.extras["margin"] = margin
        if perturbation < margin:
            contaminated = fit(contaminate(P, Q, sigma), kernel)
            r_clean = risk(zero_one_loss, P, clean.score)
            r_tilde = risk(zero_one_loss, P, contaminated.score)
            report.check("risk equality under small corruption", r_clean, r_tilde, 1e-12)
        else:
            report.notes.append(
                "hypothesis sigma*||omega_P - omega_Q|| < margin fails; the implication is one-way, nothing asserted"
            )
    return report


def check_ber_immunity(
    loss: Loss,
    P_pos: InstanceDistribution,
    P_neg: InstanceDistribution,
    alpha: float,
    beta: float,
    fclass: FiniteFunctionClass,
) -> ExperimentReport:
    """Mutual contamination shifts balanced error affinely, preserving argmins."""
    verdict = sln_robustness_check(loss)
    if not verdict.is_robust:
        raise InputError(
            f"balanced-error immunity requires a noise-robust loss; "
            f"sln_robustness_check({loss.name}) returned {verdict.verdict}"
        )
    report = ExperimentReport(
        name="ber-immunity",
        inputs={"loss": loss.name, "alpha": alpha, "beta": beta, "class_size": fclass.size},
    )
    with _timed(report):
        C = verdict.constant
        t_pos, t_neg = mutually_contaminate(P_pos, P_neg, alpha, beta)
        slope = 1.0 - alpha - beta
        intercept = (alpha + beta) / 2.0 * C
        clean_vals = []
        noisy_vals = []
        worst = 0.0
        for i in range(fclass.size):
            f = fclass.as_function(i)
            ber_clean = balanced_error(loss, P_pos, P_neg, f)
            ber_noisy = balanced_error(loss, t_pos, t_neg, f)
            clean_vals.append(ber_clean)
            noisy_vals.append(ber_noisy)
            worst = max(worst, abs(ber_noisy - (slope * ber_clean + intercept)))
        report.check_le("max affine-identity residual", worst, 0.0, tolerance=1e-10)
        report.check(
            "argmin invariance",
            int(np.argmin(clean_vals)),
            int(np.argmin(noisy_vals)),
            0.0,
        )
        report.extras["slope"] = slope
        report.extras["intercept"] = intercept
    return report


def check_ghosh_bound(
    P: DiscreteDistribution,
    table: NoiseFunctionTable,
    loss: Loss,
    fclass: FiniteFunctionClass,
) -> ExperimentReport:
    """Instance-dependent noise degrades a robust loss by at most 1/min(1 - 2 sigma)."""
    verdict = sln_robustness_check(loss)
    if not verdict.is_robust:
        raise InputError(
            f"the bound requires a noise-robust loss; "
            f"sln_robustness_check({loss.name}) returned {verdict.verdict}"
        )
    report = ExperimentReport(
        name="ghosh-bound", inputs={"loss": loss.name, "class_size": fclass.size}
    )
    with _timed(report):
        corrupted = flip_instance_dependent(P, table)
        i_noisy, _ = brute_force_min(loss, corrupted, fclass)
        i_clean, clean_min = brute_force_min(loss, P, fclass)
        clean_of_noisy = risk(loss, P, fclass.as_function(i_noisy))
        bound = clean_min / table.min_signal()
        report.check_le("clean risk of corrupted minimizer vs bound", clean_of_noisy, bound, 1e-12)
        report.extras["clean_minimizer"] = i_clean
        report.extras["corrupted_minimizer"] = i_noisy
    return report


def order_reversal_witness(loss: Loss, sigma: float, seed: int = 0, trials: int = 5000):
    """Search for score-label distributions whose loss ordering flips under noise.

    Returns a witness dict for a non-robust loss, or None if the random
    search finds nothing (expected for robust losses).
    """
    rng = np.random.default_rng(seed)

    def expect(atoms, probs, corrupted):
        total = 0.0
        for (v, y), p in zip(atoms, probs):
            if corrupted:
                total += p * ((1 - sigma) * float(loss(y, v)) + sigma * float(loss(-y, v)))
            else:
                total += p * float(loss(y, v))
        return total

    for _ in range(trials):
        pair = []
        for _q in range(2):
            atoms = [(float(rng.uniform(-3, 3)), int(rng.choice((-1, 1)))) for _ in range(2)]
            p0 = float(rng.uniform(0.05, 0.95))
            pair.append((atoms, (p0, 1.0 - p0)))
        (a1, p1), (a2, p2) = pair
        clean_gap = expect(a1, p1, False) - expect(a2, p2, False)
        noisy_gap = expect(a1, p1, True) - expect(a2, p2, True)
        if clean_gap < -1e-9 and noisy_gap > 1e-9:
            return {"Q": (a1, p1), "Q_prime": (a2, p2), "clean_gap": clean_gap, "noisy_gap": noisy_gap}
    return None


# ---------------------------------------------------------------------------
# Long-Servedio reproduction


def _hinge_min_over_hyperplanes(P_atoms, probs, flip_sigma, angle_step=0.001):
    """Exact hinge minimizer over planar hyperplanes through the origin.

    For each direction, the corrupted hinge risk is convex piecewise
    linear in the scale r >= 0, so the minimum over scale is attained at
    r = 0 or at a kink r = 1/|<u, x_i>|; all candidates are evaluated.
    Direction tie-break: lowest angle index.
    """
    thetas = np.arange(0.0, 2.0 * np.pi, angle_step)
    U = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    V = U @ P_atoms.T  # (T, m) unit scores

    def hinge_risk(scaled):  # scaled: (T, m)
        clean = np.maximum(1.0 - scaled, 0.0)
        flipped = np.maximum(1.0 + scaled, 0.0)
        return ((1.0 - flip_sigma) * clean + flip_sigma * flipped) @ probs

    best_risk = hinge_risk(np.zeros_like(V))
    best_r = np.zeros(V.shape[0])
    with np.errstate(divide="ignore"):
        kinks = np.where(np.abs(V) > 0, 1.0 / np.abs(V), 0.0)
    for k in range(P_atoms.shape[0]):
        r = kinks[:, k]
        risk_k = hinge_risk(r[:, np.newaxis] * V)
        better = risk_k < best_risk - 1e-15
        best_risk = np.where(better, risk_k, best_risk)
        best_r = np.where(better, r, best_r)
    i = int(np.argmin(best_risk))
    return best_r[i] * U[i], float(best_risk[i])


def run_long_servedio(
    gamma: float, sigma_grid=None, angle_step: float = 0.001
) -> ExperimentReport:
    """Hinge minimization collapses to coin flipping under noise; the mean never does.

    Hinge is minimized over hyperplanes through the origin (direction
    discretized by angle, scale minimized exactly per direction - scale
    matters for hinge even though classification depends only on the
    direction).  The sweep records every noise level at which the hinge
    minimizer misclassifies the probability-1/2 atom, driving its clean
    zero-one risk to exactly 0.5.
    """
    if sigma_grid is None:
        sigma_grid = [round(0.05 * i, 2) for i in range(1, 10)]
    report = ExperimentReport(
        name="long-servedio",
        inputs={"gamma": gamma, "sigma_grid": list(sigma_grid), "angle_step": angle_step},
    )
    with _timed(report):
        P = long_servedio(gamma)
        atoms = P.instances_array()
        probs = P.probabilities
        kernel = KernelSpec("linear")

        w0, _ = _hinge_min_over_hyperplanes(atoms, probs, 0.0, angle_step)
        mis0 = float(probs @ ((atoms @ w0) <= 0))
        report.check("hinge minimizer correct at sigma=0", 0.0, mis0, 0.0)

        failing = []
        mean_ok = True
        for sigma in sigma_grid:
            w, _ = _hinge_min_over_hyperplanes(atoms, probs, sigma, angle_step)
            mis = float(probs @ ((atoms @ w) <= 0))
            if abs(mis - 0.5) <= 1e-12:
                failing.append(sigma)
            mean_clf = fit(flip_symmetric(P, sigma), kernel)
            mean_ok = mean_ok and bool(np.all(mean_clf.scores(atoms) > 0))
        report.check_true("mean classifier correct at every sigma", mean_ok)
        report.check_true(
            "exists sigma where hinge minimizer has zero-one risk 0.5", bool(failing)
        )
        report.extras["failing_sigmas"] = failing
        report.extras["min_failing_sigma"] = failing[0] if failing else None
    return report


# ---------------------------------------------------------------------------
# Compression experiment


def load_compression_npz(path):
    """Optional dataset asset: an .npz with X_train, y_train, X_test, y_test."""
    data = np.load(path)
    train = LabeledSample(data["X_train"], data["y_train"], source=str(path))
    test = LabeledSample(data["X_test"], data["y_test"], source=str(path))
    return train, test


def _accuracy(clf, S: LabeledSample) -> float:
    return float(np.mean(S.labels * clf.scores(S.instances) > 0))


def run_compression_experiment(
    kernel: KernelSpec,
    eps_list=(0.01,),
    mode: str = "recursive",
    seed: int = 0,
    n: int = 2000,
    separation: float = 4.0,
    dataset_path=None,
    min_size: int = 100,
    group_size: int = 200,
    max_iterations: int = 20000,
) -> ExperimentReport:
    """Test accuracy of herded classifiers versus the full-mean baseline.

    Without a dataset asset, a seeded two-blob sample stands in for a
    real dataset.  Emits (herd fraction, accuracy) curve rows and
    asserts the sup-norm audit |full score - sparse score| <= herd error
    on every test point.
    """
    if mode not in ("recursive", "parallel"):
        raise InputError(f"mode must be 'recursive' or 'parallel', got {mode!r}")
    report = ExperimentReport(
        name="compression",
        inputs={
            "kernel": kernel.to_dict(),
            "eps_list": list(eps_list),
            "mode": mode,
            "seed": seed,
            "dataset": str(dataset_path) if dataset_path else f"blobs(n={n}, sep={separation})",
        },
    )
    with _timed(report):
        if dataset_path is not None:
            train, test = load_compression_npz(dataset_path)
        else:
            train = synth_blobs(n, 2, separation, seed)
            test = synth_blobs(max(2, n // 2), 2, separation, seed + 1)
        full = fit(train, kernel)
        baseline = _accuracy(full, test)
        report.extras["baseline_accuracy"] = baseline
        full_scores = full.scores(test.instances)

        curve = []
        for eps in eps_list:
            config = HerdingConfig(tolerance=eps, max_iterations=max_iterations)
            if mode == "recursive":
                h = recursive_herd(train, kernel, eps, min_size=min_size, config=config)
            else:
                groups = max(1, int(np.ceil(len(train) / group_size)))
                h = parallel_herd(train, groups, kernel, config=config)
            err = approximation_error(h, train, kernel)
            sparse = herd_to_classifier(h, train, kernel)
            acc = _accuracy(sparse, test)
            gap = float(np.max(np.abs(full_scores - sparse.scores(test.instances))))
            report.check_le(f"sup-norm audit on test points (eps={eps})", gap, err, 1e-9)
            curve.append(
                {"eps": eps, "herd_size": h.size, "fraction": h.size / len(train),
                 "accuracy": acc, "error": err}
            )
        report.extras["curve"] = curve
    return report

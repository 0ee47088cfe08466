"""Batch command-line front end.

Subcommands: train, herd, eval, check, bounds, mmd, noise.  Every run is
deterministic given (inputs, flags, seed); every emitted JSON embeds the
fully resolved run configuration, including the seed even when defaulted.

Flag precedence: explicit flags > JSON config file (``--config``) >
built-in defaults.  Exit codes: 0 success, 1 assertion failure (or
herding stopped by the iteration cap), 2 usage error, 3 I/O or parse
error.

``--workers`` is accepted for interface stability and recorded in the
resolved config; the present implementation executes serially, which is
equivalent to ``--workers 1`` (every trial is pure given its seed, so
results do not depend on the worker count).  The default comes from the
``MEANHERD_WORKERS`` environment variable when set.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import bounds as bounds_mod
from . import lab
from .classifier import MeanClassifier, fit, margin_for_error, mean_norm, mmd
from .data import (
    DiscreteDistribution,
    contaminate,
    flip_class_conditional,
    flip_symmetric,
    load_csv,
    load_sparse,
)
from .errors import DataError, InputError, MeanHerdError, ParseError
from .herding import (
    HerdingConfig,
    approximation_error,
    herd,
    parallel_herd,
    recursive_herd,
)
from .kernels import KernelSpec
from .losses import empirical_risk, parse_loss

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_USAGE = 2
EXIT_IO = 3

_UNSET = object()


def _default_workers() -> int:
    env = os.environ.get("MEANHERD_WORKERS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"MEANHERD_WORKERS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _load_config_file(path) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ParseError("config file must contain a JSON object", path=path)
    return cfg


class _Resolver:
    """Flag > config-file > default, recording every resolved value."""

    def __init__(self, args: argparse.Namespace, config: dict):
        self.args = args
        self.config = config
        self.resolved: dict = {}

    def get(self, name: str, default=None, cast=None):
        value = getattr(self.args, name.replace("-", "_"), _UNSET)
        if value is _UNSET or value is None:
            value = self.config.get(name, default)
            if cast is not None and value is not None:
                value = cast(value)
        self.resolved[name] = value
        return value


def _load_sample(path, label_column: int, fmt: str):
    if fmt == "auto":
        fmt = "sparse" if str(path).endswith((".txt", ".svm", ".libsvm")) else "csv"
    if fmt == "csv":
        return load_csv(path, label_column)
    if fmt == "sparse":
        return load_sparse(path)
    raise InputError(f"unknown data format {fmt!r}")


def _write_json(path, obj):
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _kernel_from(r: _Resolver) -> KernelSpec:
    text = r.get("kernel", "linear")
    spec = KernelSpec.parse(text)
    r.resolved["kernel"] = spec.to_dict()
    return spec


# ---------------------------------------------------------------------------
# Subcommands


def cmd_train(args, config) -> int:
    r = _Resolver(args, config)
    data_path = r.get("data")
    if data_path is None:
        raise InputError("train requires --data")
    label_column = int(r.get("label-column", -1))
    fmt = r.get("format", "auto")
    kernel = _kernel_from(r)
    out = r.get("out")
    seed = int(r.get("seed", 0))
    workers = int(r.get("workers", _default_workers()))
    del seed, workers  # deterministic command; recorded in resolved config only

    S = _load_sample(data_path, label_column, fmt)
    clf = fit(S, kernel)
    geo = mean_norm(S, kernel)
    doc = clf.to_dict(n_source=len(S))
    doc["meta"]["min_linear_loss"] = geo.min_linear_loss
    doc["config"] = {"subcommand": "train", **r.resolved}
    _write_json(out, doc)
    return EXIT_OK


def cmd_herd(args, config) -> int:
    r = _Resolver(args, config)
    data_path = r.get("data")
    if data_path is None:
        raise InputError("herd requires --data")
    label_column = int(r.get("label-column", -1))
    fmt = r.get("format", "auto")
    kernel = _kernel_from(r)
    eps = float(r.get("epsilon", 0.01))
    max_iterations = int(r.get("max-iterations", 10000))
    step_rule = r.get("step-rule", "line_search")
    lazy = bool(r.get("lazy", False))
    parallel = r.get("parallel")
    recursive = bool(r.get("recursive", False))
    min_size = int(r.get("min-size", 100))
    out = r.get("out")
    trace_out = r.get("trace-out")
    r.get("seed", 0)
    r.get("workers", _default_workers())

    if parallel is not None and recursive:
        raise InputError("--parallel and --recursive are mutually exclusive")
    S = _load_sample(data_path, label_column, fmt)
    hconfig = HerdingConfig(
        tolerance=eps, max_iterations=max_iterations, step_rule=step_rule, lazy=lazy
    )
    if parallel is not None:
        h = parallel_herd(S, int(parallel), kernel, hconfig)
    elif recursive:
        h = recursive_herd(S, kernel, eps, min_size=min_size, config=hconfig)
    else:
        h = herd(S, kernel, hconfig)

    doc = h.to_dict()
    doc["termination"] = h.termination
    doc["recomputed_error"] = approximation_error(h, S, kernel)
    if h.group_errors:
        doc["group_errors"] = list(h.group_errors)
    if h.stages:
        doc["stages"] = [
            {"size_before": st.size_before, "size_after": st.size_after,
             "error": st.error, "termination": st.termination}
            for st in h.stages
        ]
    doc["config"] = {"subcommand": "herd", **r.resolved}
    _write_json(out, doc)

    if trace_out is not None:
        sizes = h.sizes if h.sizes else (h.size,) * len(h.trace)
        with open(trace_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "error", "size"])
            for i, (e, m) in enumerate(zip(h.trace, sizes)):
                writer.writerow([i, repr(e), m])

    if h.termination == "max_iterations":
        print(f"iteration cap reached at error {h.error}", file=sys.stderr)
        return EXIT_ASSERTION
    return EXIT_OK


def cmd_eval(args, config) -> int:
    r = _Resolver(args, config)
    model_path = r.get("model")
    data_path = r.get("data")
    if model_path is None or data_path is None:
        raise InputError("eval requires --model and --data")
    label_column = int(r.get("label-column", -1))
    fmt = r.get("format", "auto")
    loss = parse_loss(r.get("loss", "linear"))
    out = r.get("out")
    r.get("seed", 0)

    with open(model_path) as fh:
        clf = MeanClassifier.from_dict(json.load(fh))
    S = _load_sample(data_path, label_column, fmt)
    if S.dim != clf.dim:
        raise InputError(f"dimension mismatch: data is {S.dim}-D, model is {clf.dim}-D")
    scores = clf.scores(S.instances)
    doc = {
        "accuracy": float(np.mean(S.labels * scores > 0)),
        "risk": empirical_risk(loss, S, clf.score),
        "loss": loss.name,
        "margin": margin_for_error(S, clf.score),
        "abstentions": int(np.sum(scores == 0.0)),
        "n": len(S),
        "config": {"subcommand": "eval", **r.resolved},
    }
    _write_json(out, doc)
    return EXIT_OK


def _suite_reports(name: str, seed: int, kernel: KernelSpec) -> list[lab.ExperimentReport]:
    rng = np.random.default_rng(seed)
    if name == "surrogate-regret":
        return [lab.check_surrogate_regret(trials=1000, seed=seed)]
    if name == "sln-immunity":
        reports = []
        for _ in range(20):
            P = lab.random_distribution(rng)
            reports.append(lab.check_sln_immunity(P, (0.1, 0.25, 0.4), kernel))
        return reports
    if name == "contamination":
        reports = []
        for _ in range(20):
            P = lab.random_distribution(rng)
            Q = lab.random_distribution(rng)
            reports.append(lab.check_contamination(P, Q, float(rng.uniform(0, 0.2)), kernel))
        return reports
    if name == "ber-immunity":
        from .losses import linear_loss

        reports = []
        for _ in range(20):
            P_pos = lab.random_distribution(rng).instance_marginal()
            P_neg = lab.random_distribution(rng).instance_marginal()
            instances = tuple(sorted(set(P_pos.support) | set(P_neg.support)))
            fclass = lab.random_function_class(rng, instances, k=8)
            alpha = float(rng.uniform(0, 0.4))
            beta = float(rng.uniform(0, 0.4))
            reports.append(lab.check_ber_immunity(linear_loss, P_pos, P_neg, alpha, beta, fclass))
        return reports
    if name == "ghosh":
        from .data import NoiseFunctionTable
        from .losses import linear_loss

        reports = []
        for _ in range(50):
            P = lab.random_distribution(rng)
            table = NoiseFunctionTable({i: float(rng.uniform(0, 0.45)) for i in range(len(P))})
            instances = tuple(sorted(set(x for x, _ in P.support)))
            fclass = lab.random_function_class(rng, instances, k=10)
            reports.append(lab.check_ghosh_bound(P, table, linear_loss, fclass))
        return reports
    if name == "long-servedio":
        return [lab.run_long_servedio(1.0 / 24.0)]
    if name == "compression":
        return [lab.run_compression_experiment(kernel, eps_list=(0.01,), mode="recursive", seed=seed)]
    if name == "order-reversal":
        from .losses import hinge_loss

        report = lab.ExperimentReport(name="order-reversal", inputs={"loss": "hinge", "seed": seed})
        witness = lab.order_reversal_witness(hinge_loss, sigma=0.4, seed=seed)
        report.check_true("hinge order-reversal witness found", witness is not None)
        if witness is not None:
            report.extras["witness"] = witness
        return [report]
    raise InputError(
        f"unknown suite {name!r}; available: surrogate-regret, sln-immunity, contamination, "
        "ber-immunity, ghosh, long-servedio, compression, order-reversal, all"
    )


ALL_SUITES = (
    "surrogate-regret",
    "sln-immunity",
    "contamination",
    "ber-immunity",
    "ghosh",
    "long-servedio",
    "compression",
    "order-reversal",
)


def cmd_check(args, config) -> int:
    r = _Resolver(args, config)
    suite = r.get("suite")
    if suite is None:
        raise InputError("check requires --suite (or 'all')")
    seed = int(r.get("seed", 0))
    kernel_text = r.get("kernel", "gaussian:1.0")
    kernel = KernelSpec.parse(kernel_text)
    r.resolved["kernel"] = kernel.to_dict()
    out = r.get("out")
    r.get("workers", _default_workers())

    names = ALL_SUITES if suite == "all" else (suite,)
    reports = []
    for name in names:
        for rep in _suite_reports(name, seed, kernel):
            reports.append(rep)
            print(f"{rep.name}: {'pass' if rep.passed else 'FAIL'}", file=sys.stderr)
    passed = all(rep.passed for rep in reports)
    doc = {
        "passed": passed,
        "reports": [rep.to_dict() for rep in reports],
        "config": {"subcommand": "check", **r.resolved},
    }
    _write_json(out, doc)
    return EXIT_OK if passed else EXIT_ASSERTION


_BOUND_KINDS = ("pac-bayes", "pac-bayes-multi", "mean-estimation", "generic-pac-bayes")


def cmd_bounds(args, config) -> int:
    r = _Resolver(args, config)
    kind = r.get("kind")
    if kind not in _BOUND_KINDS:
        raise InputError(f"kind must be one of {_BOUND_KINDS}, got {kind!r}")
    n = int(r.get("n", 0))
    delta = float(r.get("delta", 0.05))
    emp = float(r.get("emp", 0.0))
    out = r.get("out")
    if kind == "pac-bayes":
        value = bounds_mod.bound_pac_bayes(emp, n, delta)
    elif kind == "pac-bayes-multi":
        k = int(r.get("k", 1))
        value = bounds_mod.bound_pac_bayes_multi(emp, n, k, delta)
    elif kind == "mean-estimation":
        value = bounds_mod.bound_mean_estimation(n, delta)
    else:
        kl = float(r.get("kl", 0.0))
        beta = r.get("beta")
        value = bounds_mod.bound_generic_pac_bayes(
            emp, kl, n, delta, beta=None if beta is None else float(beta)
        )
    doc = {"bound": value, "inputs": {"subcommand": "bounds", **r.resolved}}
    doc["config"] = doc["inputs"]
    _write_json(out, doc)
    return EXIT_OK


def cmd_mmd(args, config) -> int:
    r = _Resolver(args, config)
    data_path = r.get("data")
    if data_path is None:
        raise InputError("mmd requires --data")
    label_column = int(r.get("label-column", -1))
    fmt = r.get("format", "auto")
    kernel = _kernel_from(r)
    out = r.get("out")
    S = _load_sample(data_path, label_column, fmt)
    pos = S.instances[S.labels == 1]
    neg = S.instances[S.labels == -1]
    if pos.shape[0] == 0 or neg.shape[0] == 0:
        raise DataError("mmd needs both classes present in the data")
    doc = {
        "mmd": mmd(pos, neg, kernel),
        "n_pos": int(pos.shape[0]),
        "n_neg": int(neg.shape[0]),
        "config": {"subcommand": "mmd", **r.resolved},
    }
    _write_json(out, doc)
    return EXIT_OK


def cmd_noise(args, config) -> int:
    r = _Resolver(args, config)
    dist_path = r.get("dist")
    if dist_path is None:
        raise InputError("noise requires --dist (a distribution JSON file)")
    model = r.get("model", "sln")
    out = r.get("out")
    with open(dist_path) as fh:
        P = DiscreteDistribution.from_dict(json.load(fh))
    if model == "sln":
        sigma = float(r.get("sigma", 0.0))
        corrupted = flip_symmetric(P, sigma)
    elif model == "cc":
        sigma_neg = float(r.get("sigma-neg", 0.0))
        sigma_pos = float(r.get("sigma-pos", 0.0))
        corrupted = flip_class_conditional(P, sigma_neg, sigma_pos)
    elif model == "contaminate":
        q_path = r.get("q")
        if q_path is None:
            raise InputError("contaminate model requires --q (corruption distribution file)")
        sigma = float(r.get("sigma", 0.0))
        with open(q_path) as fh:
            Q = DiscreteDistribution.from_dict(json.load(fh))
        corrupted = contaminate(P, Q, sigma)
    else:
        raise InputError(f"unknown noise model {model!r}; expected sln, cc or contaminate")
    doc = corrupted.to_dict()
    doc["config"] = {"subcommand": "noise", **r.resolved}
    _write_json(out, doc)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meanherd",
        description="Kernel mean classifiers, herding compression and label-noise checks.",
    )
    parser.add_argument("--config", help="JSON file of default flag values")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, data=True):
        p.add_argument("--seed", type=int, default=None, help="RNG seed (default 0, always recorded)")
        p.add_argument("--workers", type=int, default=None, help="worker count (1 = serial)")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        if data:
            p.add_argument("--data", default=None, help="input data file")
            p.add_argument("--label-column", type=int, default=None, help="CSV label column (default -1)")
            p.add_argument("--format", choices=("auto", "csv", "sparse"), default=None)
            p.add_argument("--kernel", default=None, help='kernel JSON or shorthand, e.g. "gaussian:1.0"')

    p = sub.add_parser("train", help="fit the mean classifier and write a model file")
    common(p)
    p.set_defaults(run=cmd_train)

    p = sub.add_parser("herd", help="compress a sample by kernel herding")
    common(p)
    p.add_argument("--epsilon", type=float, default=None, help="target approximation error")
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--step-rule", choices=("line_search", "uniform"), default=None)
    p.add_argument("--lazy", action="store_true", default=None, help="stream kernel rows")
    p.add_argument("--parallel", type=int, default=None, help="herd this many groups independently")
    p.add_argument("--recursive", action="store_true", default=None, help="herd stages until --min-size")
    p.add_argument("--min-size", type=int, default=None)
    p.add_argument("--trace-out", default=None, help="CSV path for (iteration, error, size)")
    p.set_defaults(run=cmd_herd)

    p = sub.add_parser("eval", help="evaluate a model file on data")
    common(p)
    p.add_argument("--model", default=None, help="model JSON file from train/herd")
    p.add_argument("--loss", default=None, help="loss name (default linear)")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("check", help="run a theorem-check suite")
    common(p, data=False)
    p.add_argument("--suite", default=None, help=f"one of {ALL_SUITES} or 'all'")
    p.add_argument("--kernel", default=None)
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("bounds", help="evaluate a generalization bound")
    common(p, data=False)
    p.add_argument("--kind", choices=_BOUND_KINDS, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--emp", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--kl", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.set_defaults(run=cmd_bounds)

    p = sub.add_parser("mmd", help="maximum mean discrepancy between the two classes")
    common(p)
    p.set_defaults(run=cmd_mmd)

    p = sub.add_parser("noise", help="corrupt a distribution file")
    common(p, data=False)
    p.add_argument("--dist", default=None, help="distribution JSON file")
    p.add_argument("--model", choices=("sln", "cc", "contaminate"), default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--sigma-neg", type=float, default=None)
    p.add_argument("--sigma-pos", type=float, default=None)
    p.add_argument("--q", default=None, help="corruption distribution file (contaminate)")
    p.set_defaults(run=cmd_noise)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config_file(args.config)
        return args.run(args, config)
    except (ParseError, DataError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InputError, NotImplementedError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MeanHerdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

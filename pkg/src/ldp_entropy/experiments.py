"""Seeded experiment runner, baselines and CSV / plot-data output.

Every trial gets its own generator derived from ``(seed, point, trial)``
so results do not depend on thread count or execution order.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .chain_star import CmiTestConfig, estimate_chain_entropy, estimate_star_entropy, per_test_delta
from .distributions import (
    CategoricalDistribution,
    collision_entropy,
    exponential_distribution,
    gini_entropy,
    maximum_spanning_tree,
    random_tree_model,
    symmetric_tree_model,
    tree_true_entropy,
)
from .gini_collision import run_gini_collision, skorski_baseline
from .plugin import SAMPLE_CONSTANT, good_entropy_estimate, good_mi_estimate, good_spec
from .protocol import NON_INTERACTIVE, SEQUENTIAL, EstimateReport, InsufficientUsers, pool_from_distribution, pool_from_tree
from .shannon_tree import estimate_tree_entropy

TASKS = ("shannon-tree", "shannon-chain", "shannon-star", "gini", "collision", "fig1a", "fig1b", "chow-liu")

TASK_DEFAULTS = {
    "shannon-tree": dict(d=20, epsilon=0.25, delta=0.2, alpha=1.0),
    "chow-liu": dict(d=10, epsilon=0.25, delta=0.2, alpha=1.0),
    "shannon-chain": dict(d=8, epsilon=0.02, delta=0.1, alpha=1.0),
    "shannon-star": dict(d=10, epsilon=0.03, delta=0.1, alpha=1.0),
    "gini": dict(k=1000, n=100_000, b=1, alpha=1.0),
    "collision": dict(k=1000, n=100_000, b=1, alpha=1.0),
    "fig1a": dict(epsilon=0.25, delta=0.2, alpha=1.0, trials=100),
    "fig1b": dict(k=1000, alpha=1.0, trials=100),
}

# safety factor applied to worst-case user counts when sizing pools
POOL_SLACK = 1.5


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    task: str
    d: int | None = None
    k: int = 1000
    n: int | None = None
    epsilon: float = 0.25
    delta: float = 0.2
    alpha: float = 1.0
    b: int = 1
    trials: int = 1
    seed: int | None = None
    out: str | None = None
    threads: int = 1
    d_grid: list = field(default_factory=lambda: [10, 20, 40, 80])
    bit_grid: list = field(default_factory=lambda: [1000, 3000, 10_000, 30_000, 100_000])
    hash_seed: int | None = None
    distribution: str = "exponential"
    flip: float = 0.05
    K: float = SAMPLE_CONSTANT
    audit: str | None = None
    plot: str | None = None

    @classmethod
    def build(cls, task: str, overrides: dict | None = None) -> "ExperimentConfig":
        """Task defaults, then ``overrides`` (keys with value None are skipped)."""
        if task not in TASKS:
            raise ConfigError(f"unknown task {task!r}")
        known = {f.name for f in fields(cls)}
        values = dict(TASK_DEFAULTS[task])
        for key, v in (overrides or {}).items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            if v is not None:
                values[key] = v
        values["task"] = task
        cfg = cls(**values)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, text: str, task: str | None = None, overrides: dict | None = None):
        doc = json.loads(text)
        task = task or doc.pop("task", None)
        doc.pop("task", None)
        doc.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.build(task, doc)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def validate(self):
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if not self.alpha > 0:
            raise ConfigError("alpha must be positive")
        if self.task in ("fig1a", "fig1b") and self.seed is None:
            raise ConfigError("experiment subcommands need an explicit seed")
        if self.task in ("shannon-tree", "chow-liu", "fig1a"):
            if not 0 < self.epsilon <= 0.5:
                raise ConfigError("epsilon must lie in (0, 1/2]")
            if math.isinf(self.alpha):
                raise ConfigError("tree estimators need a finite alpha")
        if self.task in ("shannon-chain", "shannon-star") and not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if not 0 < self.delta < 1:
            raise ConfigError("delta must lie in (0, 1)")
        if self.task == "shannon-chain" and (self.d or 0) < 3:
            raise ConfigError("chain estimation needs d >= 3")
        if self.task == "shannon-star" and (self.d or 0) < 3:
            raise ConfigError("star estimation needs d >= 3")
        if self.task in ("shannon-tree", "chow-liu") and (self.d or 0) < 2:
            raise ConfigError("d must be at least 2")
        if self.task == "fig1a" and (not self.d_grid or min(self.d_grid) < 2):
            raise ConfigError("d_grid needs values >= 2")
        if self.task == "fig1b" and (not self.bit_grid or min(self.bit_grid) < 2 * math.ceil(math.log2(self.k))):
            raise ConfigError("bit budgets must cover at least one pair of raw samples")
        if self.task in ("gini", "collision", "fig1b"):
            if self.b < 1:
                raise ConfigError("b must be at least 1")
            if self.k < 2:
                raise ConfigError("k must be at least 2")
        if self.task in ("gini", "collision") and (self.n or 0) < 2:
            raise ConfigError("n must be at least 2")
        if self.distribution not in ("exponential", "uniform"):
            raise ConfigError("distribution must be 'exponential' or 'uniform'")


@dataclass
class ResultRow:
    task: str
    params: dict
    estimate: float
    truth: float
    abs_error: float
    users_consumed: int
    distinct_pairs: int | None
    bits_total: int
    rounds: int
    trial_index: int
    seed: int
    status: str = "ok"
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "extra"}
        out["params"] = json.dumps(self.params, sort_keys=True, separators=(",", ":"))
        out.update(self.extra)
        return out


ROW_COLUMNS = [
    "task", "params", "estimate", "truth", "abs_error", "users_consumed",
    "distinct_pairs", "bits_total", "rounds", "trial_index", "seed", "status",
]
GINI_COLUMNS = [
    "n", "b", "alpha", "lambda", "c_bar", "collision_prob_hat", "gini_hat", "C_hat", "bits_total", "seed",
    "task", "trial_index", "estimate", "truth", "abs_error", "users_consumed", "rounds", "status",
]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def rows_to_csv(rows: list[ResultRow], columns: list[str] | None = None) -> str:
    if columns is None:
        if rows and rows[0].task in ("gini", "collision"):
            columns = GINI_COLUMNS
        else:
            columns = ROW_COLUMNS + sorted({k for r in rows for k in r.extra})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        d = r.as_dict()
        w.writerow([_fmt(d.get(c)) for c in columns])
    return buf.getvalue()


def _error(est: float, truth: float) -> float:
    if math.isfinite(est) and math.isfinite(truth):
        return abs(est - truth)
    return math.nan


# ---------------------------------------------------------------------------
# fixtures and pool sizing


def chain_fixture(d: int, rng: np.random.Generator, flip: float = 0.05):
    """Symmetric chain over a random node order, every edge flipping w.p. ``flip``."""
    order = [int(x) for x in rng.permutation(d)]
    edges = list(zip(order[:-1], order[1:]))
    return symmetric_tree_model(d, edges, [flip] * (d - 1)), order


def star_fixture(d: int, rng: np.random.Generator, flips=None):
    center = int(rng.integers(d))
    edges = [(center, j) for j in range(d) if j != center]
    if flips is None:
        flips = np.linspace(0.05, 0.15, d - 1)
    return symmetric_tree_model(d, edges, list(flips)), center


def tree_pool_size(d, alpha, epsilon, delta, c=2, K=SAMPLE_CONSTANT) -> int:
    mi = good_spec(alpha, epsilon / 2, delta / d**2, 2, alphabet=c, K=K).n_samples
    h = good_spec(alpha, epsilon, delta / d, 1, alphabet=c, K=K).n_samples
    return math.ceil(POOL_SLACK * (d * (d - 1) // 2 * mi + d * h))


def chow_liu_pool_size(d, alpha, epsilon, delta, K=SAMPLE_CONSTANT) -> int:
    mi = good_spec(alpha, epsilon, delta / d**2, 2, K=K).n_samples
    h = good_spec(alpha, epsilon, delta / d, 1, K=K).n_samples
    return math.ceil(POOL_SLACK * (d * (d - 1) // 2 * mi + d * h))


def _plugin_size(d, edges, alpha, epsilon, delta, K) -> int:
    terms = d + edges
    eps = min(epsilon, 0.5) / 2
    h = good_spec(alpha, eps, delta / terms, 1, K=K).n_samples
    i = good_spec(alpha, eps, delta / terms, 2, K=K).n_samples
    return d * h + edges * i


def chain_pool_size(d, cfg: CmiTestConfig) -> int:
    cmi = good_spec(cfg.alpha, min(cfg.epsilon, 0.5), per_test_delta(cfg.delta, d), 3, K=cfg.K).n_samples
    tests = 3 + (d - 3) * (2 + math.ceil(math.log2(d)))
    return math.ceil(POOL_SLACK * (tests * cmi + _plugin_size(d, d - 1, cfg.alpha, cfg.epsilon, cfg.delta, cfg.K)))


def star_pool_size(d, cfg: CmiTestConfig) -> int:
    mi = good_spec(cfg.alpha, min(cfg.epsilon, 0.5), cfg.delta / (6 * d), 2, K=cfg.K).n_samples
    return math.ceil(POOL_SLACK * ((2 * d - 3) * mi + _plugin_size(d, d - 1, cfg.alpha, cfg.epsilon, cfg.delta, cfg.K)))


# ---------------------------------------------------------------------------
# baselines


def run_chow_liu_baseline(pool, d, alpha, epsilon, delta, K=SAMPLE_CONSTANT, seed=None) -> EstimateReport:
    """Every pairwise MI, an exact maximum spanning tree, then the plug-in."""
    since = pool.cursor
    mi_spec = good_spec(alpha, epsilon, delta / d**2, 2, K=K)
    h_spec = good_spec(alpha, epsilon, delta / d, 1, K=K)
    w = np.full((d, d), np.nan)
    for i in range(d):
        for j in range(i + 1, d):
            w[i, j] = w[j, i] = good_mi_estimate(pool, (i, j), mi_spec)
    tree = maximum_spanning_tree(w)
    w_hat = float(sum(w[a, b] for a, b in tree))
    s_hat = float(sum(good_entropy_estimate(pool, (i,), h_spec) for i in range(d)))
    return pool.report(
        s_hat - w_hat,
        since,
        seed=seed,
        tree=[list(e) for e in tree],
        distinct_pairs=d * (d - 1) // 2,
        W_hat=w_hat,
        S_hat=s_hat,
    )


def _distribution(cfg: ExperimentConfig) -> CategoricalDistribution:
    if cfg.distribution == "uniform":
        return CategoricalDistribution(np.full(cfg.k, 1.0 / cfg.k))
    return exponential_distribution(cfg.k)


# ---------------------------------------------------------------------------
# per-trial runners; each returns a list of rows and a list of audit records


def _row(task, params, report: EstimateReport, truth, trial, seed, distinct_pairs=None, bits_total=None, **extra):
    a = report.extras["audit"]
    return ResultRow(
        task=task,
        params=params,
        estimate=report.value,
        truth=truth,
        abs_error=_error(report.value, truth),
        users_consumed=report.users_consumed,
        distinct_pairs=distinct_pairs,
        bits_total=a["total_bits"] if bits_total is None else bits_total,
        rounds=report.rounds,
        trial_index=trial,
        seed=seed,
        extra=extra,
    )


def _failed_row(task, params, truth, trial, seed, exc) -> ResultRow:
    return ResultRow(task, params, math.nan, truth, math.nan, 0, None, 0, 0, trial, seed,
                     status=f"{type(exc).__name__}: {exc}")


def _audit_record(report: EstimateReport, trial: int, seed: int, **more) -> dict:
    rec = {"trial_index": trial, "seed": seed, "estimate": report.value}
    rec.update(more)
    rec.update({k: v for k, v in report.extras.items()})
    return rec


def _trial_tree(cfg, d, rng, trial, seed):
    model = random_tree_model(d, rng)
    truth = tree_true_entropy(model)
    params = {"d": d, "epsilon": cfg.epsilon, "delta": cfg.delta, "alpha": cfg.alpha}
    n = tree_pool_size(d, cfg.alpha, cfg.epsilon, cfg.delta, K=cfg.K)
    pool = pool_from_tree(model, n, rng, lazy=True, mode=SEQUENTIAL, seed=seed)
    try:
        rep = estimate_tree_entropy(pool, d, cfg.alpha, cfg.epsilon, cfg.delta, rng, K=cfg.K, seed=seed)
    except InsufficientUsers as exc:
        return [_failed_row(cfg.task, params, truth, trial, seed, exc)], []
    row = _row(cfg.task, params, rep, truth, trial, seed, distinct_pairs=rep.extras["distinct_pairs"])
    audit = _audit_record(rep, trial, seed, truth=truth)
    audit.pop("pairs", None)
    return [row], [audit]


def _trial_chow_liu(cfg, d, rng, trial, seed):
    model = random_tree_model(d, rng)
    truth = tree_true_entropy(model)
    params = {"d": d, "epsilon": cfg.epsilon, "delta": cfg.delta, "alpha": cfg.alpha}
    n = chow_liu_pool_size(d, cfg.alpha, cfg.epsilon, cfg.delta, K=cfg.K)
    pool = pool_from_tree(model, n, rng, lazy=True, seed=seed)
    rep = run_chow_liu_baseline(pool, d, cfg.alpha, cfg.epsilon, cfg.delta, K=cfg.K, seed=seed)
    recovered = sorted(map(sorted, rep.extras["tree"])) == sorted(map(sorted, model.edges))
    row = _row(cfg.task, params, rep, truth, trial, seed, distinct_pairs=d * (d - 1) // 2, recovered=recovered)
    return [row], [_audit_record(rep, trial, seed, truth=truth, recovered=recovered)]


def _trial_chain(cfg, d, rng, trial, seed):
    model, order = chain_fixture(d, rng, cfg.flip)
    truth = tree_true_entropy(model)
    test_cfg = CmiTestConfig(cfg.epsilon, cfg.alpha, cfg.delta, cfg.K)
    params = {"d": d, "epsilon": cfg.epsilon, "delta": cfg.delta, "alpha": cfg.alpha, "flip": cfg.flip}
    pool = pool_from_tree(model, chain_pool_size(d, test_cfg), rng, lazy=True, seed=seed)
    try:
        rep = estimate_chain_entropy(pool, d, test_cfg, insert_order=rng.permutation(d), seed=seed)
    except (InsufficientUsers, RuntimeError) as exc:
        return [_failed_row(cfg.task, params, truth, trial, seed, exc)], []
    got = rep.extras["order"]
    recovered = got == order or got == order[::-1]
    row = _row(cfg.task, params, rep, truth, trial, seed, recovered=recovered)
    return [row], [_audit_record(rep, trial, seed, truth=truth, true_order=order, recovered=recovered)]


def _trial_star(cfg, d, rng, trial, seed):
    model, center = star_fixture(d, rng)
    truth = tree_true_entropy(model)
    test_cfg = CmiTestConfig(cfg.epsilon, cfg.alpha, cfg.delta, cfg.K)
    params = {"d": d, "epsilon": cfg.epsilon, "delta": cfg.delta, "alpha": cfg.alpha}
    pool = pool_from_tree(model, star_pool_size(d, test_cfg), rng, lazy=True, seed=seed)
    try:
        rep = estimate_star_entropy(pool, d, test_cfg, rng, seed=seed)
    except InsufficientUsers as exc:
        return [_failed_row(cfg.task, params, truth, trial, seed, exc)], []
    recovered = rep.extras["center"] == center
    row = _row(cfg.task, params, rep, truth, trial, seed, recovered=recovered)
    return [row], [_audit_record(rep, trial, seed, truth=truth, true_center=center, recovered=recovered)]


def _trial_hash(cfg, _, rng, trial, seed):
    dist = _distribution(cfg)
    pool = pool_from_distribution(dist, cfg.n, rng, mode=NON_INTERACTIVE, seed=seed)
    hash_seed = cfg.hash_seed if cfg.hash_seed is not None else int(rng.integers(2**63))
    rep = run_gini_collision(pool, cfg.b, cfg.alpha, hash_seed, rng, seed=seed)
    x = rep.extras
    if cfg.task == "gini":
        est, truth = x["gini_hat"], gini_entropy(dist)
    else:
        est, truth = x["C_hat"], collision_entropy(dist)
    row = ResultRow(
        task=cfg.task,
        params={"k": cfg.k, "distribution": cfg.distribution},
        estimate=est,
        truth=truth,
        abs_error=_error(est, truth),
        users_consumed=rep.users_consumed,
        distinct_pairs=None,
        bits_total=x["bits_total"],
        rounds=rep.rounds,
        trial_index=trial,
        seed=seed,
        status=x["saturated"] or "ok",
        extra={k: x[k] for k in ("n", "b", "alpha", "c_bar", "collision_prob_hat", "gini_hat", "C_hat")}
        | {"lambda": x["lam"]},
    )
    return [row], [_audit_record(rep, trial, seed, truth=truth, hash_seed=hash_seed)]


def _trial_fig1a(cfg, d, rng, trial, seed):
    model = random_tree_model(d, rng)
    truth = tree_true_entropy(model)
    n = tree_pool_size(d, cfg.alpha, cfg.epsilon, cfg.delta, K=cfg.K)
    pool = pool_from_tree(model, n, rng, lazy=True, seed=seed)
    params = {"d": d, "method": "mst-bfs"}
    try:
        rep = estimate_tree_entropy(pool, d, cfg.alpha, cfg.epsilon, cfg.delta, rng, K=cfg.K, seed=seed)
        row = _row("fig1a", params, rep, truth, trial, seed, distinct_pairs=rep.extras["distinct_pairs"])
    except InsufficientUsers as exc:
        row = _failed_row("fig1a", params, truth, trial, seed, exc)
    # Chow-Liu always estimates every unordered pair; its count needs no simulation
    cl = ResultRow("fig1a", {"d": d, "method": "chow-liu"}, math.nan, truth, math.nan,
                   0, d * (d - 1) // 2, 0, 0, trial, seed, status="count-only")
    return [row, cl], []


def _trial_fig1b(cfg, bits, rng, trial, seed):
    dist = exponential_distribution(cfg.k)
    truth = collision_entropy(dist)
    rows = []
    width = math.ceil(math.log2(cfg.k))
    runs = [
        ("skorski", bits // width, None),
        ("nonprivate", bits, math.inf),
        ("private", bits, cfg.alpha),
    ]
    for method, n, alpha in runs:
        pool = pool_from_distribution(dist, n, rng, mode=NON_INTERACTIVE, seed=seed)
        if method == "skorski":
            rep = skorski_baseline(pool, cfg.k, rng, seed=seed)
        else:
            rep = run_gini_collision(pool, 1, alpha, int(rng.integers(2**63)), rng, seed=seed)
        est = rep.extras["C_hat"]
        flag = rep.extras["saturated"]
        err = math.nan if flag == "nonpositive_collision_prob" else _error(est, truth)
        rows.append(ResultRow(
            "fig1b", {"bits": bits, "method": method, "alpha": _fmt(alpha) if alpha else None}, est, truth, err,
            rep.users_consumed, None, rep.extras["bits_total"], rep.rounds, trial, seed,
            status=flag or "ok", extra={"rel_error": err / truth},
        ))
    return rows, []


_RUNNERS = {
    "shannon-tree": _trial_tree,
    "chow-liu": _trial_chow_liu,
    "shannon-chain": _trial_chain,
    "shannon-star": _trial_star,
    "gini": _trial_hash,
    "collision": _trial_hash,
    "fig1a": _trial_fig1a,
    "fig1b": _trial_fig1b,
}


def trial_seed(seed: int | None, point: int, trial: int) -> int:
    ss = np.random.SeedSequence(seed, spawn_key=(point, trial))
    return int(ss.generate_state(1, np.uint64)[0])


def _points(cfg: ExperimentConfig) -> list:
    if cfg.task == "fig1a":
        return list(cfg.d_grid)
    if cfg.task == "fig1b":
        return list(cfg.bit_grid)
    return [cfg.d]


def run_experiment(cfg: ExperimentConfig) -> tuple[list[ResultRow], list[dict]]:
    """All trials of ``cfg``, merged in (point, trial) order."""
    cfg.validate()
    if cfg.seed is None:
        cfg.seed = int(np.random.SeedSequence().entropy % 2**64)
    runner = _RUNNERS[cfg.task]
    jobs = [(p_idx, point, t) for p_idx, point in enumerate(_points(cfg)) for t in range(cfg.trials)]

    def work(job):
        p_idx, point, t = job
        s = trial_seed(cfg.seed, p_idx, t)
        return runner(cfg, point, np.random.default_rng(s), t, s)

    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as ex:
            results = list(ex.map(work, jobs))
    else:
        results = [work(j) for j in jobs]
    rows = [r for rs, _ in results for r in rs]
    audits = [a for _, au in results for a in au]
    return rows, audits


def run_fig1a(cfg: ExperimentConfig) -> str:
    return rows_to_csv(run_experiment(cfg)[0])


def run_fig1b(cfg: ExperimentConfig) -> str:
    return rows_to_csv(run_experiment(cfg)[0])


# ---------------------------------------------------------------------------
# plot data

PLOT_COLUMNS = ["figure", "series", "x", "y", "yerr", "n"]


def _series(row: ResultRow) -> tuple[str, str, float, float] | None:
    """(figure, series, x, y) for a row, or None when the row carries no value."""
    if row.task == "fig1a":
        if row.distinct_pairs is None:
            return None
        return "fig1a", row.params["method"], row.params["d"], float(row.distinct_pairs)
    if row.task == "fig1b":
        return "fig1b", row.params["method"], row.params["bits"], row.extra.get("rel_error", math.nan)
    x = row.params.get("d", row.extra.get("n", 0))
    return row.task, row.task, x, row.abs_error


def emit_plot_data(rows: list[ResultRow], path=None) -> str:
    """Aggregate rows into ``figure,series,x,y,yerr,n`` lines.

    fig1a uses the mean and standard error of the pair count (pairs are
    counted as unordered, d(d-1)/2 for Chow-Liu). fig1b uses the median
    relative error and half the interquartile range. Other tasks report the
    mean absolute error. Non-finite values are skipped.
    """
    groups: dict[tuple, list[float]] = {}
    for r in rows:
        key = _series(r)
        if key is None:
            continue
        fig, series, x, y = key
        vals = groups.setdefault((fig, series, x), [])
        if math.isfinite(y):
            vals.append(y)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLOT_COLUMNS)
    for (fig, series, x), vals in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])):
        v = np.array(vals)
        if v.size == 0:
            y = err = math.nan
        elif fig == "fig1b":
            q1, med, q3 = np.percentile(v, [25, 50, 75])
            y, err = med, (q3 - q1) / 2
        else:
            y = v.mean()
            err = v.std(ddof=1) / math.sqrt(v.size) if v.size > 1 else 0.0
        w.writerow([fig, series, _fmt(x), _fmt(float(y)), _fmt(float(err)), v.size])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


# ---------------------------------------------------------------------------
# quick self-checks behind the ``verify`` subcommand


def run_verify(seed: int = 0) -> list[tuple[str, bool, str]]:
    from .distributions import brute_force_joint, shannon_entropy
    from .gini_collision import bias_correction_roundtrip
    from .ldp import HashChannelParams, KRandomizedResponse, hash_channel, verify_ldp_ratio
    from .shannon_tree import mst_weight_identity_check

    rng = np.random.default_rng(seed)
    out = []

    bad = 0
    for _ in range(200):
        d = int(rng.integers(2, 8))
        M = int(rng.integers(1, 6))
        lv = np.triu(rng.integers(1, M + 1, size=(d, d)), 1)
        lv = lv + lv.T
        lhs, rhs = mst_weight_identity_check(lv, 0.1, M)
        bad += round(lhs / 0.1) != round(rhs / 0.1)
    out.append(("mst-weight identity", bad == 0, f"{bad} mismatches in 200 graphs"))

    worst = 0.0
    for a in (0.3, 0.7, 1.0):
        for k in (2, 4, 8):
            worst = max(worst, verify_ldp_ratio(KRandomizedResponse(k, a)) - math.exp(a))
        for b in (1, 2, 4):
            worst = max(worst, abs(verify_ldp_ratio(hash_channel(HashChannelParams(b, a, 0))) - math.exp(a)))
    out.append(("privacy ratio", worst <= 1e-9, f"max excess {worst:.2e}"))

    gap = 0.0
    for _ in range(100):
        p = rng.dirichlet(np.ones(int(rng.integers(2, 50))))
        gap = max(gap, abs(collision_entropy(p) + math.log2(1 - gini_entropy(p))))
    for g in np.linspace(0.0, 1.0, 11):
        for b in (1, 2, 4, 8):
            for lam in (0.1, 0.5, 1.0):
                gap = max(gap, abs(bias_correction_roundtrip(g, b, lam) - g))
    out.append(("collision identities", gap <= 1e-12, f"max gap {gap:.2e}"))

    gap = 0.0
    for _ in range(50):
        d = int(rng.integers(2, 8))
        m = random_tree_model(d, rng)
        gap = max(gap, abs(tree_true_entropy(m) - shannon_entropy(brute_force_joint(m))))
    out.append(("tree entropy vs enumeration", gap <= 1e-9, f"max gap {gap:.2e}"))
    return out

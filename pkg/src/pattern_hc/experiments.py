"""Seeded Monte Carlo experiments and their CSV/JSON output.

Every trial draws its randomness from SeedSequence([seed, trial, n]), so a
trial's result does not depend on which worker ran it; results are merged
by trial index. Wall-clock times are not written to the output files, which
keeps reruns byte-identical.
"""
from __future__ import annotations

import csv
import io
import json
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial

import numpy as np
from scipy import stats

from .digraph import DegreeVariant, event_A
from .din_dout import find_perfect_matching, sample_walkup
from .errors import ConfigError
from .hc_solver import EXACT_PI_HC_CAP, exact_pi_hc, verify_pi_hc
from .matching import is_matching
from .pattern import PatternClass, classify, parse_pattern, primitive_root
from .random_model import (hitting_index, limit_mean_low_degree, limit_probability_A, sample_dnp_degrees,
                           sample_trace, threshold_p)

EXPERIMENTS = ("eventA", "lowdeg", "hitting", "walkup")
SOLVERS = ("pipeline", "exact", "search", "pipeline+fallback")


@dataclass
class ExperimentConfig:
    experiment: str
    n: list = field(default_factory=lambda: [1000])
    pattern: str = "><"
    c: float = 0.0
    trials: int = 100
    seed: int = 0
    solver: str = "pipeline+fallback"
    workers: int = 1
    retries: int = 3
    search_budget: int = 200_000

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}")
        if self.solver not in SOLVERS:
            raise ConfigError(f"solver must be one of {SOLVERS}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        self.n = [int(x) for x in self.n]
        if self.experiment == "walkup":
            if any(m < 2 for m in self.n):
                raise ConfigError("walkup needs m >= 2")
            return
        try:
            p = parse_pattern(self.pattern)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        cl = classify(primitive_root(p))
        if cl is PatternClass.TRIVIAL:
            raise ConfigError("the trivial pattern is not covered")
        k = 2 if cl is PatternClass.ALTERNATING else len(primitive_root(p))
        if self.experiment == "hitting":
            for n in self.n:
                if n % k or n % p.k:
                    raise ConfigError(f"n={n} is not divisible by the pattern period")
                if self.solver == "exact" and n > EXACT_PI_HC_CAP:
                    raise ConfigError(f"the exact solver handles n <= {EXACT_PI_HC_CAP}")
        elif any(n < 3 for n in self.n):
            raise ConfigError("threshold formulas need n >= 3")

    @property
    def variant(self) -> DegreeVariant:
        return DegreeVariant.for_pattern(parse_pattern(self.pattern))


def trial_rng(seed: int, trial: int, n: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial), int(n)]))


def clopper_pearson(k: int, n: int, level: float = 0.95) -> tuple:
    a = 1 - level
    lo = 0.0 if k == 0 else float(stats.beta.ppf(a / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(stats.beta.ppf(1 - a / 2, k + 1, n - k))
    return lo, hi


# single trials (top level so worker processes can pickle them)

def _degree_trial(cfg: ExperimentConfig, n: int, trial: int) -> dict:
    rng = trial_rng(cfg.seed, trial, n)
    variant = cfg.variant
    p = threshold_p(variant, n, cfg.c)
    ind, outd = sample_dnp_degrees(n, p, rng)
    if variant is DegreeVariant.ALTERNATING:
        a = bool(np.all((ind >= 2) | (outd >= 2)))
    else:
        a = bool(np.all(ind + outd >= 2))
    x = int(np.count_nonzero((ind == 1) & (outd == 1)))
    y = int(np.count_nonzero(ind + outd == 1))
    return {"n": n, "trial": trial, "p": p, "event_a": int(a), "x": x, "y": y}


def _walkup_trial(cfg: ExperimentConfig, m: int, trial: int) -> dict:
    rng = trial_rng(cfg.seed, trial, m)
    g = sample_walkup(m, rng)
    res = find_perfect_matching(g)
    ok = bool(res) and is_matching(g.adjacency(), list(res.pairs)) and len(set(res.pairs)) == m
    size = m if res else res.size
    return {"n": m, "trial": trial, "perfect": int(bool(res)), "size": size, "verified": int(ok if res else True)}


def _hitting_trial(cfg: ExperimentConfig, n: int, trial: int) -> dict:
    from .pipeline import PipelineConfig, run_pipeline
    rng = trial_rng(cfg.seed, trial, n)
    pattern = parse_pattern(cfg.pattern)
    variant = cfg.variant
    trace = sample_trace(n, rng)
    m_star = hitting_index(trace, variant)
    target = trace.prefix(m=m_star)
    before = trace.prefix(m=m_star - 1)
    row = {"n": n, "trial": trial, "m_star": m_star, "p_star": trace.p_of_count(m_star),
           "a_at_mstar": int(event_A(target, variant)), "a_before": int(event_A(before, variant))}
    witness, stage, via = None, None, None
    if cfg.solver == "exact":
        witness = exact_pi_hc(target, pattern)
        via = "exact" if witness is not None else None
        stage = None if witness is not None else "NoCycle"
    elif cfg.solver == "search":
        from .search import search_pi_hc
        witness = search_pi_hc(target, pattern, random.Random(int(rng.integers(2**63))),
                               node_budget=cfg.search_budget)
        via = "search" if witness is not None else None
        stage = None if witness is not None else "HCNotFound"
    else:
        fallback = None
        if cfg.solver == "pipeline+fallback":
            fallback = "exact" if n <= EXACT_PI_HC_CAP else "search"
        pc = PipelineConfig(retries=cfg.retries, fallback=fallback, search_budget=cfg.search_budget)
        run = run_pipeline(trace, pattern, rng, pc)
        witness, stage, via = run.witness, run.stage, run.via
    verified = witness is not None and verify_pi_hc(target, witness, pattern)
    row.update(stage=stage or "ok", via=via or "", success=int(verified),
               verified=int(verified or witness is None),
               cycle=" ".join(map(str, witness.order)) if verified else "")
    return row


_TRIALS = {"eventA": _degree_trial, "lowdeg": _degree_trial, "hitting": _hitting_trial, "walkup": _walkup_trial}


def _run_one(cfg, task):
    n, trial = task
    t0 = time.perf_counter()
    row = _TRIALS[cfg.experiment](cfg, n, trial)
    return row, time.perf_counter() - t0


def run_trials(cfg: ExperimentConfig) -> tuple:
    """(rows, total wall seconds); rows ordered by (n, trial) whatever the worker count."""
    tasks = [(n, t) for n in cfg.n for t in range(cfg.trials)]
    fn = partial(_run_one, cfg)
    if cfg.workers == 1:
        out = [fn(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (8 * cfg.workers))
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            out = list(ex.map(fn, tasks, chunksize=chunk))
    rows = [r for r, _ in out]
    return rows, sum(s for _, s in out)


# summaries

def _poisson_tv(values, lam: float) -> float:
    values = np.asarray(values, dtype=np.int64)
    top = int(values.max()) if len(values) else 0
    emp = np.bincount(values, minlength=top + 1) / max(len(values), 1)
    pmf = stats.poisson.pmf(np.arange(top + 1), lam)
    # mass of the Poisson tail beyond the largest observation counts fully
    return float(0.5 * (np.abs(emp - pmf).sum() + stats.poisson.sf(top, lam)))


def _tally(values) -> str:
    c = {}
    for v in values:
        c[v] = c.get(v, 0) + 1
    return ";".join(f"{k}={v}" for k, v in sorted(c.items()))


def summarize(cfg: ExperimentConfig, rows: list) -> list:
    out = []
    for n in cfg.n:
        rs = [r for r in rows if r["n"] == n]
        t = len(rs)
        s = {"n": n, "trials": t}
        if cfg.experiment in ("eventA", "lowdeg"):
            variant = cfg.variant
            hits = sum(r["event_a"] for r in rs)
            lo, hi = clopper_pearson(hits, t)
            key = "x" if variant is DegreeVariant.ALTERNATING else "y"
            vals = [r[key] for r in rs]
            lam = limit_mean_low_degree(variant, cfg.c)
            s.update(successes=hits, estimate=hits / t, ci_low=lo, ci_high=hi,
                     target=limit_probability_A(variant, cfg.c),
                     mean_low=float(np.mean(vals)), mean_target=lam, tv_poisson=_poisson_tv(vals, lam))
        elif cfg.experiment == "walkup":
            hits = sum(r["perfect"] for r in rs)
            lo, hi = clopper_pearson(hits, t)
            s.update(successes=hits, estimate=hits / t, ci_low=lo, ci_high=hi,
                     all_verified=int(all(r["verified"] for r in rs)))
        else:
            hits = sum(r["success"] for r in rs)
            lo, hi = clopper_pearson(hits, t)
            stages = _tally(r["stage"] for r in rs)
            via = _tally(r["via"] for r in rs if r["via"])
            s.update(successes=hits, estimate=hits / t, ci_low=lo, ci_high=hi,
                     all_verified=int(all(r["verified"] for r in rs)),
                     a_ok=int(all(r["a_at_mstar"] and not r["a_before"] for r in rs)),
                     stages=stages, via=via)
        out.append(s)
    return out


def mc_event_A(cfg: ExperimentConfig) -> tuple:
    rows, _ = run_trials(cfg)
    return rows, summarize(cfg, rows)


def mc_low_degree(cfg: ExperimentConfig) -> tuple:
    rows, _ = run_trials(cfg)
    return rows, summarize(cfg, rows)


def mc_hitting_time(cfg: ExperimentConfig) -> tuple:
    rows, _ = run_trials(cfg)
    return rows, summarize(cfg, rows)


def mc_walkup(m, trials: int, seed: int, workers: int = 1) -> tuple:
    ms = [m] if isinstance(m, int) else list(m)
    cfg = ExperimentConfig("walkup", n=ms, trials=trials, seed=seed, workers=workers)
    rows, _ = run_trials(cfg)
    return rows, summarize(cfg, rows)


def run_experiment(cfg: ExperimentConfig) -> tuple:
    rows, _ = run_trials(cfg)
    return rows, summarize(cfg, rows)


# output

def _columns(rows, summary) -> list:
    cols = ["row_type"]
    for r in list(rows) + list(summary):
        for c in r:
            if c not in cols:
                cols.append(c)
    return cols


def _fmt(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return v


def to_csv(rows, summary) -> str:
    cols = _columns(rows, summary)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", restval="")
    w.writeheader()
    for r in rows:
        w.writerow({"row_type": "trial", **{k: _fmt(v) for k, v in r.items()}})
    for r in summary:
        w.writerow({"row_type": "summary", **{k: _fmt(v) for k, v in r.items()}})
    return buf.getvalue()


def to_json(rows, summary, cfg: ExperimentConfig | None = None) -> str:
    doc = {"rows": rows, "summary": summary}
    if cfg is not None:
        doc["config"] = {k: v for k, v in asdict(cfg).items() if k != "workers"}
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def emit(rows, summary, path, fmt: str = "csv", cfg: ExperimentConfig | None = None) -> str:
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {fmt!r}")
    text = to_csv(rows, summary) if fmt == "csv" else to_json(rows, summary, cfg)
    if path is not None and path != "-":
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text

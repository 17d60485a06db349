"""Orchestration of the hitting-time construction with retries and fallbacks."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from ..digraph import DegreeVariant
from ..errors import ConfigError, HCNotFound, NotHandsome, PipelineFailure
from ..hc_solver import EXACT_PI_HC_CAP, CycleWitness, exact_pi_hc, verify_pi_hc
from ..pattern import Pattern, as_pattern
from ..random_model import ProcessTrace, hitting_index, p_plus_minus
from .bins import assign_bins, bin_sizes, effective_pattern
from .classify import classify_vertices
from .exposure import ExposureGuard
from .handsome import check_handsome
from .steps import build_path_collection, contract, expose_until_A, final_cycle

FALLBACKS = (None, "exact", "search")


@dataclass
class PipelineConfig:
    """Knobs of the construction. None means the paper's value.

    h: slack in the class thresholds (4k); bound, radius: H1 bound and radius
    (4k and 10k); cap: visited-vertex cap of each H-check search (40k^2, or 0
    for none); window: (p_-, p_+) override, in which case the degree event may
    already hold at p_- and the cycle is checked against D_* instead of the
    hitting-time digraph.
    """

    retries: int = 3
    fallback: str | None = None
    h: int | None = None
    bound: int | None = None
    radius: int | None = None
    cap: int | None = None
    window: tuple | None = None
    hc_budget: int = 200_000
    search_budget: int = 200_000

    def __post_init__(self):
        if self.fallback not in FALLBACKS:
            raise ConfigError(f"fallback must be one of {FALLBACKS}, got {self.fallback!r}")
        if self.retries < 0:
            raise ConfigError("retries must be >= 0")


@dataclass
class PipelineRun:
    n: int
    pattern: Pattern
    m_star: int | None
    witness: CycleWitness | None = None
    via: str | None = None              # "pipeline", "exact" or "search"
    stage: str | None = None            # first failing stage of the last attempt
    attempts: list = field(default_factory=list)
    at_hitting_time: bool = True
    error: PipelineFailure | None = field(default=None, repr=False)

    @property
    def success(self) -> bool:
        return self.witness is not None

    def diagnostics(self) -> dict:
        return {"n": self.n, "pattern": str(self.pattern), "m_star": self.m_star,
                "success": self.success, "via": self.via, "stage": self.stage,
                "at_hitting_time": self.at_hitting_time, "attempts": self.attempts}


def _attempt(trace, pattern, pe, variant, bins, window, cfg, rng, py_rng, info):
    k = pe.k
    guard = ExposureGuard.from_trace(trace, *window)
    cls = classify_vertices(guard, bins, cfg.h)
    info["classes"] = cls.counts()
    dstar = expose_until_A(guard, cls, variant, allow_zero=cfg.window is not None)
    info.update(r=dstar.r, r_star=dstar.r_star, m_star=dstar.m_star)
    cap = 40 * k * k if cfg.cap is None else (cfg.cap or None)
    rep = check_handsome(dstar.digraph, cls, radius=cfg.radius, bound=cfg.bound, cap=cap, first_only=True)
    info["handsome"] = rep.summary()
    if not rep.ok:
        cond, wit = rep.first_violation()
        raise NotHandsome(cond, wit)
    long_path = pe.k == 4 and pattern.k == 2 and trace.n % 4 == 2
    paths = build_path_collection(guard, dstar, cls, bins, pe, rng, long_path=long_path)
    info["paths"] = len(paths)
    d = guard.release()
    d = d.with_arcs(dstar.window_arcs) if dstar.window_arcs else d
    cd = contract(d, paths, bins)
    info["n_prime"] = cd.n
    w = final_cycle(cd, pe, py_rng, cfg.hc_budget)
    return w, dstar, guard, cls, paths, cd


def run_pipeline(trace: ProcessTrace, pattern, rng: np.random.Generator,
                 config: PipelineConfig | None = None, keep_state: bool = False) -> PipelineRun:
    """Build a pattern Hamilton cycle of the hitting-time digraph, or record why not.

    Each attempt uses a fresh bin assignment (the identity first, random
    permutations after). keep_state stores the internals of the last attempt
    on the returned record as `state`.
    """
    cfg = config or PipelineConfig()
    pattern = as_pattern(pattern)
    pe = effective_pattern(pattern)
    variant = DegreeVariant.for_pattern(pattern)
    n = trace.n
    bin_sizes(n, pattern)
    m_star = hitting_index(trace, variant)
    run = PipelineRun(n, pattern, m_star, at_hitting_time=cfg.window is None)
    if cfg.window is None:
        if n < 16:
            raise ConfigError("the default window needs n >= 16; pass window=(p_minus, p_plus)")
        window = p_plus_minus(variant, n)
    else:
        window = tuple(cfg.window)
    py_rng = random.Random(int(rng.integers(2**63)))
    target = trace.prefix(m=m_star) if cfg.window is None else None
    for attempt in range(cfg.retries + 1):
        order = None if attempt == 0 else rng.permutation(n)
        bins = assign_bins(n, pattern, order)
        info = {"attempt": attempt}
        run.attempts.append(info)
        try:
            w, dstar, guard, cls, paths, cd = _attempt(trace, pattern, pe, variant, bins, window, cfg,
                                                        rng, py_rng, info)
        except PipelineFailure as exc:
            info["stage"] = exc.stage
            info["reason"] = str(exc)
            run.stage = exc.stage
            run.error = exc
            if exc.stage == "AOutsideWindow":
                break          # does not depend on the bins
            continue
        check = target if target is not None else dstar.digraph
        if cfg.window is None and dstar.m_star != m_star:
            raise RuntimeError(f"window bookkeeping disagrees: {dstar.m_star} != {m_star}")
        if not verify_pi_hc(check, w, pattern):
            info["stage"] = run.stage = "HCNotFound"
            info["reason"] = "constructed cycle failed verification"
            run.error = HCNotFound("constructed cycle failed verification")
            continue
        info["stage"] = None
        run.stage = None
        run.witness = w.normalized()
        run.via = "pipeline"
        if keep_state:
            run.state = {"dstar": dstar, "guard": guard, "cls": cls, "paths": paths,
                         "contracted": cd, "bins": bins}
        return run
    if cfg.fallback and m_star is not None:
        target = trace.prefix(m=m_star) if target is None else target
        w = None
        if cfg.fallback == "exact":
            if n <= EXACT_PI_HC_CAP and n % pattern.k == 0:
                w = exact_pi_hc(target, pattern)
        else:
            from ..search import search_pi_hc
            w = search_pi_hc(target, pattern, py_rng, node_budget=cfg.search_budget)
        if w is not None and verify_pi_hc(target, w, pattern):
            run.witness = w.normalized()
            run.via = cfg.fallback
            run.at_hitting_time = True
    return run


def construct_pi_hc(trace: ProcessTrace, pattern, rng: np.random.Generator,
                    config: PipelineConfig | None = None) -> CycleWitness:
    """Like run_pipeline but returns the witness or raises the failure."""
    run = run_pipeline(trace, pattern, rng, config)
    if run.witness is None:
        raise run.error or HCNotFound("construction failed")
    return run.witness

"""Report builders behind the command-line tool.

Each builder takes a parsed graph and an :class:`AnalysisConfig` and
returns a plain dict that :mod:`homocycle.report` can serialize.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .census import (
    census,
    class_window,
    compare_prediction,
    fixed_point_table,
    pi_empirical,
    required_nmax,
)
from .diagnostics import conditions_diagnostics
from .errors import InadmissibleGraphError
from .expansion import (
    MODES,
    c1_of_alpha,
    engine_two_loop_hess,
    expansion_report,
    rose_constants,
    two_loop_constants,
)
from .graph import MultiGraph, homology_labeling, oriented_double, require_admissible
from .reference import is_rose, is_two_loop
from .thermo import DEFAULT_S_STEP, DEFAULT_U_STEP, beta_derivatives, pressure_derivatives, solve_entropy
from .transfer import TransferSystem, equilibrium_measure, transition_matrix

MAX_ALPHA_RADIUS = 10
DEFAULT_T_GRID = (8, 10, 12, 14, 16, 18)


@dataclass(frozen=True)
class AnalysisConfig:
    mode: str = "normalized"
    s_step: float = DEFAULT_S_STEP
    u_step: float = DEFAULT_U_STEP
    n_max: int | None = None
    budget_mb: float = 512.0
    t_grid: tuple = DEFAULT_T_GRID
    alpha_radius: int = 3
    classes: tuple | None = None  # explicit class list overrides the window
    threads: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        for name in ("s_step", "u_step", "budget_mb"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.n_max is not None and self.n_max < 1:
            raise ValueError("n_max must be positive")
        if not 0 <= self.alpha_radius <= MAX_ALPHA_RADIUS:
            raise ValueError(f"alpha radius must lie in [0, {MAX_ALPHA_RADIUS}]")
        if any(not Fraction(str(T)) > 0 for T in self.t_grid):
            raise ValueError("T values must be positive")

    def window(self, b: int) -> list[tuple]:
        if self.classes is not None:
            out = [tuple(int(x) for x in a) for a in self.classes]
            for a in out:
                if len(a) != b:
                    raise ValueError(f"class {a} does not have dimension {b}")
            return out
        return class_window(b, self.alpha_radius)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class Setup:
    graph: MultiGraph
    st: object
    hl: object
    system: TransferSystem
    validation: object

    @classmethod
    def build(cls, g: MultiGraph) -> "Setup":
        report = require_admissible(g)
        st = oriented_double(g)
        hl = homology_labeling(g, st)
        return cls(g, st, hl, TransferSystem(st, hl), report)


def _header(kind: str, g: MultiGraph, config: AnalysisConfig) -> dict:
    return {
        "kind": kind,
        "version": __version__,
        "graph_sha256": g.source_hash,
        "graph": g.to_document(),
        "config": config.as_dict(),
    }


def _labeling_section(setup: Setup) -> dict:
    g, hl = setup.graph, setup.hl
    return {
        "n": g.n,
        "m": g.m,
        "b": hl.b,
        "tree_edges": [g.edges[i].id for i in sorted(hl.tree)],
        "non_tree_edges": [g.edges[i].id for i in hl.non_tree],
        "f": hl.f,
    }


def _thermo(setup: Setup, config: AnalysisConfig):
    h = solve_entropy(setup.system)
    pd = pressure_derivatives(setup.system, h, s_step=config.s_step, u_step=config.u_step)
    tp = beta_derivatives(pd).check(setup.system)
    return tp, equilibrium_measure(setup.system, h)


def _oracle_sections(setup: Setup, tp, mm) -> dict:
    g = setup.graph
    out = {}
    lengths = [float(e.length) for e in g.edges]
    if is_rose(g):
        rc = rose_constants(lengths, tp.h)
        paper = expansion_report(tp, "paper")
        scale = max(abs(rc.c10_wick), 1e-300)
        fourth_cf = rc.fourth(lengths)
        out["rose"] = {
            "constants": rc,
            "hess_closed_form": rc.hess(lengths),
            "fourth_closed_form_max_rel_diff": float(
                np.abs(tp.fourth - fourth_cf).max() / np.abs(fourth_cf).max()
            ),
            "a_engine_paper_mode": paper.a,
            "c10_engine_paper_mode": paper.c10,
            "flags": {
                "a_matches": bool(np.allclose(np.diag(paper.a), np.diag(rc.a), rtol=1e-8, atol=0)),
                "c10_in_text_matches_wick": abs(rc.c10 - paper.c10) <= 1e-8 * scale,
                "c10_short_prefactor_matches_wick": abs(rc.c10_short_prefactor - paper.c10) <= 1e-8 * scale,
                "c10_corrected_matches_wick": abs(rc.c10_wick - paper.c10) <= 1e-8 * scale,
                "c10_k2_print_matches_wick": (
                    None if rc.c10_k2_print is None else abs(rc.c10_k2_print - paper.c10) <= 1e-8 * scale
                ),
            },
        }
    if is_two_loop(g):
        engine = engine_two_loop_hess(mm.mu, mm.rbar)
        tl = two_loop_constants(lengths, tp.h, tp.hess)
        e1 = math.exp(-tp.h * lengths[0])
        out["two_loop"] = {
            "constants": tl,
            "hess_engine_from_measure": engine,
            "mu_1_engine": float(mm.mu[0]),
            "mu_1_paper": e1,
            "measure_discrepancy": bool(abs(mm.mu[0] - e1) > 1e-9),
            "hess_discrepancy": tl.discrepancy,
            "fd_sides_with_engine": bool(
                np.abs(tp.hess - engine).max() <= 1e-6 * np.abs(engine).max()
            ),
        }
    return out


def analyze(g: MultiGraph, config: AnalysisConfig) -> dict:
    t0 = time.perf_counter()
    setup = Setup.build(g)
    tp, mm = _thermo(setup, config)
    reports = {mode: expansion_report(tp, mode) for mode in MODES}
    window = config.window(setup.hl.b)
    c1_table = {
        mode: [{"alpha": a, "c1": c1_of_alpha(rep, a)} for a in window]
        for mode, rep in reports.items()
    }
    doc = _header("analyze", g, config)
    doc.update(
        labeling=_labeling_section(setup),
        h=tp.h,
        rbar=tp.rbar,
        mu=[{"symbol": s + 1, "edge": g.edges[int(setup.st.edge[s])].id, "mu": float(mm.mu[s])}
            for s in range(setup.st.size)],
        beta={
            "grad": tp.grad,
            "hess": tp.hess,
            "third": tp.third,
            "fourth": tp.fourth,
            "fd_steps": tp.derivatives.steps,
            "fd_calibration_error": tp.derivatives.calibration_error,
        },
        primary_mode=config.mode,
        expansion={
            mode: {"c0": rep.c0, "a": rep.a, "c10": rep.c10, "M": rep.M, "breakdown": rep.breakdown}
            for mode, rep in reports.items()
        },
        c1_table=c1_table,
        oracles=_oracle_sections(setup, tp, mm),
        seconds=time.perf_counter() - t0,
    )
    return doc


def _census_table(setup: Setup, config: AnalysisConfig):
    if not config.t_grid:
        return None
    Tmax = max(Fraction(str(T)) for T in config.t_grid)
    need = required_nmax(min(setup.st.lengths), Tmax)
    n_max = config.n_max if config.n_max is not None else need
    return census(setup.st, setup.hl, Tmax, config.budget_mb, n_max=n_max, threads=config.threads)


def census_rows(g: MultiGraph, config: AnalysisConfig) -> tuple[dict, list]:
    setup = Setup.build(g)
    window = config.window(setup.hl.b)
    rows = []
    if window and config.t_grid:
        table = _census_table(setup, config)
        for T in config.t_grid:
            for a in window:
                rows.append((T, a, pi_empirical(table, Fraction(str(T)), a)))
    doc = _header("census", g, config)
    doc["rows"] = [{"T": T, "alpha": a, "count": c} for T, a, c in rows]
    return doc, rows


def trace_check(setup: Setup, n_max: int, budget_mb: float) -> bool:
    table = fixed_point_table(setup.st, setup.hl, n_max, budget_mb)
    A = transition_matrix(setup.st).astype(object)
    P = A.copy()
    ok = True
    for n in range(1, n_max + 1):
        ok &= table.total(n) == sum(P[i, i] for i in range(P.shape[0]))
        P = P.dot(A)
    return bool(ok)


def verify(g: MultiGraph, config: AnalysisConfig) -> dict:
    """Census against the normalized expansion, with pass/fail flags."""
    setup = Setup.build(g)
    tp, _ = _thermo(setup, config)
    rep = expansion_report(tp, "normalized")
    diag = conditions_diagnostics(setup.st, setup.hl)
    table = _census_table(setup, config)
    grid = sorted(Fraction(str(T)) for T in config.t_grid)
    window = config.window(setup.hl.b)
    rows = compare_prediction(table, rep, grid, window)
    b = setup.hl.b
    zero = (0,) * b
    units = [tuple(s * int(i == k) for i in range(b)) for k in range(b) for s in (1, -1)]
    box1 = class_window(b, 1)

    def emp(T, a):
        return pi_empirical(table, T, a)

    flags = {}
    warnings = []
    if diag.weak_mixing.lattice:
        warnings.append("lattice lengths: the non-lattice condition fails, so the asymptotic comparison is not probative")
    dev = [abs(emp(T, zero) * float(T) ** (b / 2 + 1) * math.exp(-tp.h * float(T)) / rep.c0 - 1) for T in grid]
    flags["zeroth_order_deviation"] = dev
    flags["zeroth_order_decreasing"] = all(x > y for x, y in zip(dev, dev[1:]))
    flags["zeroth_order_within_0.30"] = bool(dev and dev[-1] <= 0.30)
    ratios = {str(a): [emp(T, a) / emp(T, zero) for T in grid] for a in units}
    flags["class_ratios"] = ratios
    flags["class_ratios_in_band"] = all(0.5 <= r <= 1.5 for rs in ratios.values() for r in rs)
    flags["class_ratios_tightening"] = all(abs(rs[-1] - 1) < abs(rs[0] - 1) for rs in ratios.values())
    tail = grid[-3:]
    comp = compare_prediction(table, rep, tail, box1)
    r0 = max(abs(r.resid_zeroth) for r in comp)
    r1 = max(abs(r.resid_first) for r in comp)
    flags["max_resid_zeroth_radius1"] = r0
    flags["max_resid_first_radius1"] = r1
    flags["first_order_beats_zeroth"] = r1 < r0
    flags["class_symmetry"] = all(
        emp(T, a) == emp(T, tuple(-x for x in a)) for T in grid for a in window
    )
    flags["trace_identity"] = trace_check(setup, min(10, table.n_max), config.budget_mb)
    doc = _header("verify", g, config)
    doc.update(
        h=tp.h,
        c0=rep.c0,
        a=rep.a,
        c10=rep.c10,
        probative=not diag.weak_mixing.lattice,
        warnings=warnings,
        rows=rows,
        flags=flags,
    )
    return doc


def conditions(g: MultiGraph, config: AnalysisConfig | None = None) -> dict:
    report = require_admissible(g, need_homology=False)
    st = oriented_double(g)
    if report.b == 0:
        raise InadmissibleGraphError("trivial homology: the graph is a tree")
    hl = homology_labeling(g, st)
    diag = conditions_diagnostics(st, hl)
    doc = _header("conditions", g, config or AnalysisConfig())
    doc.update(diagnostic=diag)
    return doc


def oracle(g: MultiGraph, config: AnalysisConfig) -> dict:
    if not (is_rose(g) or is_two_loop(g)):
        raise InadmissibleGraphError(
            "oracle: closed forms exist only for the rose and the two-vertex three-edge graph"
        )
    setup = Setup.build(g)
    tp, mm = _thermo(setup, config)
    doc = _header("oracle", g, config)
    doc.update(h=tp.h, hess=tp.hess, oracles=_oracle_sections(setup, tp, mm))
    return doc

"""Monte-Carlo verification of the MUB coherence bounds.

A sweep walks a grid of cells ``(d, M, ensemble)``. In each cell it draws
``trials`` states, each from its own seed derived from the master seed and
the cell and trial coordinates. It computes per-basis probabilities,
entropies, indices of coincidence and coherence values, averages them over
the M bases and checks every applicable bound. Results are stored per cell
in columns, since full sweeps produce millions of rows. :meth:`SweepResult.reports`
turns them into :class:`~mubcoh.bounds.BoundReport` records on demand.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, NamedTuple

import numpy as np

from . import bounds as bd
from . import _jsonio
from .errors import InvalidState, UnsupportedDimension
from .measures import geometric_coherence_numeric, geometric_lower_expression, probabilities_batch
from .mub import MubSet, construct_mub, mub_to_dict, parse_mub_file
from .states import DensityMatrix, derive_seed, draw_density, draw_pure, entropy_from_eigenvalues

log = logging.getLogger(__name__)

CSV_COLUMNS = ("bound_id", "d", "M", "ensemble", "trial", "lhs", "rhs", "slack", "holds", "purity", "entropy", "seed")
CHAIN_TOL = 1e-10
CG_NUMERIC_MODES = ("on-fail", "always", "never")
THREADS_ENV = "MUBCOH_THREADS"


def parse_ensemble(tag: str, d: int) -> tuple[str, int]:
    """Map an ensemble tag to (kind, rank). Kinds: pure, ginibre, maximally-mixed."""
    if tag == "pure":
        return "pure", 1
    if tag in ("mixed", "mixed-full-rank"):
        return "ginibre", d
    if tag == "maximally-mixed":
        return "maximally-mixed", d
    for prefix in ("mixed-rank-", "rank-", "rank"):
        if tag.startswith(prefix) and tag[len(prefix):].isdigit():
            r = int(tag[len(prefix):])
            if not 1 <= r <= d:
                raise ValueError(f"ensemble {tag!r}: rank must lie in [1, {d}]")
            return "ginibre", r
    raise ValueError(f"unknown ensemble {tag!r}")


def resolve_threads(requested: int | None = None) -> int:
    n = requested
    if n is None:
        raw = os.environ.get(THREADS_ENV, "0")
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"thread count must be >= 0, got {n}")
    return n or (os.cpu_count() or 1)


@dataclass
class SweepConfig:
    dims: list[int]
    M_values: dict[int, list[int]] | None = None
    ensembles: list[str] = field(default_factory=lambda: ["pure", "mixed"])
    trials: int = 1000
    master_seed: int = 0
    tol: float = bd.DEFAULT_TOL
    mub_files: dict[int, str] = field(default_factory=dict)
    cg_numeric: str = "on-fail"
    oracle_starts: int = 32
    oracle_max_iters: int = 10_000
    oracle_tol: float = 1e-10
    output: str | None = None
    format: str = "csv"
    summary: str | None = None
    counterexample_dir: str | None = None
    threads: int | None = None

    def __post_init__(self):
        self.dims = [int(d) for d in self.dims]
        if self.M_values is not None:
            self.M_values = {int(k): [int(m) for m in v] for k, v in self.M_values.items()}
        self.mub_files = {int(k): str(v) for k, v in self.mub_files.items()}
        self.validate()

    def validate(self) -> None:
        if not self.dims:
            raise ValueError("dims must be nonempty")
        if any(d < 2 for d in self.dims):
            raise ValueError("every dimension must be >= 2")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.cg_numeric not in CG_NUMERIC_MODES:
            raise ValueError(f"cg_numeric must be one of {CG_NUMERIC_MODES}")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be 'csv' or 'json'")
        if not self.ensembles:
            raise ValueError("ensembles must be nonempty")
        for d in self.dims:
            for e in self.ensembles:
                parse_ensemble(e, d)
            for m in self.m_values(d):
                if m < 1:
                    raise ValueError(f"d={d}: M must be >= 1, got {m}")

    def m_values(self, d: int) -> list[int]:
        if self.M_values is not None and d in self.M_values:
            return list(self.M_values[d])
        return list(range(2, d + 2))

    @classmethod
    def from_dict(cls, obj: dict) -> "SweepConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown sweep config keys: {sorted(unknown)}")
        return cls(**obj)

    @classmethod
    def from_file(cls, path) -> "SweepConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


class BoundColumns(NamedTuple):
    lhs: np.ndarray
    rhs: np.ndarray
    slack: np.ndarray
    holds: np.ndarray
    inconclusive: np.ndarray


def _columns(bound_id: str, lhs, rhs, tol: float, n: int) -> BoundColumns:
    lhs = np.broadcast_to(np.asarray(lhs, dtype=float), (n,)).copy()
    rhs = np.broadcast_to(np.asarray(rhs, dtype=float), (n,)).copy()
    slack = lhs - rhs if bd.bound_kind(bound_id) == "lower" else rhs - lhs
    return BoundColumns(lhs, rhs, slack, slack >= -tol, np.zeros(n, dtype=bool))


@dataclass
class CellResult:
    d: int
    M: int
    ensemble: str
    seeds: np.ndarray
    purity: np.ndarray
    entropy: np.ndarray
    bounds: dict[str, BoundColumns]
    chain_min_slack: tuple[float, float]
    chain_violations: int
    numeric_prop2: BoundColumns | None = None

    @property
    def trials(self) -> int:
        return len(self.seeds)


@dataclass
class SweepResult:
    config: SweepConfig
    cells: list[CellResult]

    def reports(self) -> Iterator[bd.BoundReport]:
        for c in self.cells:
            for t in range(c.trials):
                for bid, col in c.bounds.items():
                    yield bd.BoundReport(
                        bid, c.d, c.M, float(col.lhs[t]), float(col.rhs[t]), float(col.slack[t]),
                        bool(col.holds[t]), float(c.purity[t]), float(c.entropy[t]),
                        f"{c.ensemble}#{t}", bool(col.inconclusive[t]), {"seed": int(c.seeds[t])},
                    )

    def violations(self) -> list[tuple[CellResult, str, int]]:
        out = []
        for c in self.cells:
            for bid, col in c.bounds.items():
                for t in np.flatnonzero(~col.holds & ~col.inconclusive):
                    out.append((c, bid, int(t)))
        return out

    @property
    def violation_count(self) -> int:
        return len(self.violations())

    def summary(self) -> dict:
        agg: dict[str, dict] = {}
        for c in self.cells:
            for bid, col in c.bounds.items():
                a = agg.setdefault(bid, {"count": 0, "min_slack": np.inf, "sum_slack": 0.0,
                                         "violations": 0, "inconclusive": 0})
                a["count"] += len(col.slack)
                a["min_slack"] = min(a["min_slack"], float(col.slack.min()))
                a["sum_slack"] += float(col.slack.sum())
                a["violations"] += int(np.sum(~col.holds & ~col.inconclusive))
                a["inconclusive"] += int(np.sum(col.inconclusive))
        per_bound = {}
        for bid in bd.BOUND_IDS:
            if bid in agg:
                a = agg[bid]
                per_bound[bid] = {
                    "count": a["count"],
                    "min_slack": a["min_slack"],
                    "mean_slack": a["sum_slack"] / a["count"],
                    "violations": a["violations"],
                    "inconclusive": a["inconclusive"],
                }
        chain = {
            "min_slack_shannon_vs_collision": min((c.chain_min_slack[0] for c in self.cells), default=np.inf),
            "min_slack_collision_vs_min": min((c.chain_min_slack[1] for c in self.cells), default=np.inf),
            "violations": sum(c.chain_violations for c in self.cells),
        }
        return {
            "master_seed": self.config.master_seed,
            "tol": self.config.tol,
            "trials_per_cell": self.config.trials,
            "cells": len(self.cells),
            "bounds": per_bound,
            "entropy_chain": chain,
            "total_violations": sum(v["violations"] for v in per_bound.values()),
        }


# --- the sweep ---------------------------------------------------------------

def load_mub_sets(config: SweepConfig) -> dict[int, MubSet]:
    sets = {}
    for d in config.dims:
        if d in config.mub_files:
            sets[d] = parse_mub_file(Path(config.mub_files[d]).read_bytes())
            if sets[d].dim != d:
                raise ValueError(f"MUB file for d={d} has dimension {sets[d].dim}")
        else:
            sets[d] = construct_mub(d)
        for m in config.m_values(d):
            if m > len(sets[d]):
                raise UnsupportedDimension(f"d={d}: M={m} requested but only {len(sets[d])} bases available")
    return sets


def draw_state(d: int, ensemble: str, seed: int) -> np.ndarray:
    """State vector (pure ensemble) or density matrix for one trial seed."""
    kind, rank = parse_ensemble(ensemble, d)
    if kind == "pure":
        return draw_pure(d, seed)
    if kind == "maximally-mixed":
        return np.eye(d, dtype=complex) / d
    return draw_density(d, rank, seed)


def _validate_batch(rhos: np.ndarray, w: np.ndarray) -> None:
    herm = np.max(np.abs(rhos - np.conj(np.swapaxes(rhos, -1, -2))))
    tr = np.abs(np.trace(rhos, axis1=1, axis2=2).real - 1.0).max()
    if herm > 1e-9 or tr > 1e-12 or w.min() < -1e-10:
        raise InvalidState(f"sampled state failed validation (hermiticity {herm:.1e}, trace {tr:.1e}, min eig {w.min():.1e})")


def _numeric_mean_cg(bases: MubSet, rho: np.ndarray, config: SweepConfig) -> float:
    r = DensityMatrix(rho)
    vals = [
        geometric_coherence_numeric(b, r, config.oracle_starts, config.oracle_max_iters, config.oracle_tol).value
        for b in bases
    ]
    return float(np.mean(vals))


def run_cell(config: SweepConfig, mubs: MubSet, M: int, ensemble: str,
             cross_norms: np.ndarray | None = None) -> CellResult:
    d, n, tol = mubs.dim, config.trials, config.tol
    kind, _ = parse_ensemble(ensemble, d)
    sub = mubs.truncated(M)
    bases = sub.matrices()
    seeds = np.array([derive_seed(config.master_seed, d, M, ensemble, t) for t in range(n)], dtype=np.uint64)
    states = np.stack([draw_state(d, ensemble, int(s)) for s in seeds])

    if kind == "pure":
        pur = np.ones(n)
        ent = np.zeros(n)
    else:
        w = np.linalg.eigvalsh(states)
        _validate_batch(states, w)
        pur = np.einsum("nab,nab->n", states, states.conj()).real
        ent = entropy_from_eigenvalues(w)

    p = probabilities_batch(bases, states)
    if p.min() < -1e-12:
        raise InvalidState(f"negative probability {p.min():.3e}")
    p = np.clip(p, 0.0, None)
    p /= p.sum(axis=-1, keepdims=True)

    h1 = entropy_from_eigenvalues(p)  # (n, M)
    pmax = p.max(axis=-1)
    jmax = p.argmax(axis=-1)
    hinf = -np.log(pmax)
    ic = np.sum(p * p, axis=-1)
    c1 = h1 - ent[:, None]
    c1 = np.where(c1 < 0, np.where(c1 >= -1e-9, 0.0, c1), c1)
    if kind == "pure":
        cg = 1.0 - pmax
    else:
        cg = np.clip(geometric_lower_expression(ic, pur[:, None], d), 0.0, None)

    neg_log_ic = -np.log(ic)
    chain1 = h1 - neg_log_ic
    chain2 = neg_log_ic - hinf
    chain_viol = int(np.sum(np.any((chain1 < -CHAIN_TOL) | (chain2 < -CHAIN_TOL), axis=1)))

    out: dict[str, BoundColumns] = {}
    mean_c1, mean_cg, mean_hinf = c1.mean(axis=1), cg.mean(axis=1), hinf.mean(axis=1)
    out["prop1"] = _columns("prop1", mean_c1, bd.prop1_rhs(d, M, pur, ent), tol, n)
    if kind == "pure":
        out["prop1_pure"] = _columns("prop1_pure", mean_c1, bd.prop1_pure_rhs(d, M), tol, n)
        if M >= 2:
            out["pati_mub"] = _columns("pati_mub", mean_c1, bd.pati_mub_rhs(d, M), tol, n)
    out["prop2"] = _columns("prop2", mean_cg, bd.prop2_rhs(d, M, np.clip(pur, 1.0 / d, 1.0)), tol, n)
    if kind == "pure":
        out["prop2_pure"] = _columns("prop2_pure", mean_cg, bd.prop2_pure_rhs(d, M), tol, n)
        out["prop2_lp_pure"] = _columns("prop2_lp_pure", mean_cg, bd.prop2_pure_lp_rhs(d, M), tol, n)
        out["maxprob_sum"] = _columns("maxprob_sum", pmax.sum(axis=1), bd.maxprob_sum_rhs(d, M), tol, n)
    if cross_norms is None:
        cross_norms = bd.mim6_cross_norms(bd.mub_povms(sub))
    table = cross_norms[:M, :M]
    out["mim6"] = _columns("mim6", pmax.sum(axis=1), bd.mim6_rhs_batch(table, jmax), tol, n)
    out["ic_sum"] = _columns("ic_sum", ic.sum(axis=1), bd.ic_sum_rhs(d, M, pur)[0], tol, n)
    out["prop3"] = _columns("prop3", mean_hinf, bd.prop3_rhs(d, M), tol, n)
    out["rmub12"] = _columns("rmub12", mean_hinf, bd.rmub12_rhs(d, M), tol, n)
    out = {bid: out[bid] for bid in bd.BOUND_IDS if bid in out}

    numeric = None
    if kind != "pure" and config.cg_numeric != "never":
        col = out["prop2"]
        if config.cg_numeric == "always":
            todo = np.arange(n)
        else:
            todo = np.flatnonzero(~col.holds)
        if todo.size:
            num_lhs = np.full(n, np.nan)
            for t in todo:
                num_lhs[t] = _numeric_mean_cg(sub, states[t], config)
            num_slack = num_lhs - col.rhs
            num_holds = num_slack >= -tol
            failed = ~col.holds
            col.inconclusive[failed & num_holds] = True
            if config.cg_numeric == "always":
                numeric = BoundColumns(num_lhs, col.rhs.copy(), num_slack, num_holds, np.zeros(n, dtype=bool))
            if failed.any():
                log.warning("d=%d M=%d %s: %d conservative prop2 failures, %d resolved as inconclusive",
                            d, M, ensemble, int(failed.sum()), int(np.sum(failed & num_holds)))

    return CellResult(
        d, M, ensemble, seeds, pur, ent, out,
        (float(chain1.min()), float(chain2.min())), chain_viol, numeric,
    )


def sweep_cells(config: SweepConfig) -> list[tuple[int, int, str]]:
    return [(d, m, e) for d in config.dims for m in config.m_values(d) for e in config.ensembles]


def run_sweep(config: SweepConfig) -> SweepResult:
    """Run every cell of ``config``; parallel over cells, merged in cell order."""
    sets = load_mub_sets(config)
    tables = {d: bd.mim6_cross_norms(bd.mub_povms(s)) for d, s in sets.items()}
    cells = sweep_cells(config)
    threads = min(resolve_threads(config.threads), len(cells))

    def job(cell):
        d, m, e = cell
        return run_cell(config, sets[d], m, e, tables[d])

    if threads <= 1:
        results = [job(c) for c in cells]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, cells))
    return SweepResult(config, results)


# --- output --------------------------------------------------------------------

def _f(x: float) -> str:
    return format(float(x), ".17g")


def _holds_text(col: BoundColumns, t: int) -> str:
    if col.inconclusive[t]:
        return "inconclusive"
    return "true" if col.holds[t] else "false"


def write_csv(result: SweepResult, fh) -> None:
    """One row per (cell, trial, bound); numeric-oracle rows use ensemble ``<tag>:numeric``."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in result.cells:
        purity = [_f(x) for x in c.purity]
        entropy = [_f(x) for x in c.entropy]
        cols = list(c.bounds.items())
        text = {bid: (list(map(_f, col.lhs)), list(map(_f, col.rhs)), list(map(_f, col.slack))) for bid, col in cols}
        for t in range(c.trials):
            seed = str(int(c.seeds[t]))
            for bid, col in cols:
                lhs, rhs, slack = text[bid]
                w.writerow((bid, c.d, c.M, c.ensemble, t, lhs[t], rhs[t], slack[t],
                            _holds_text(col, t), purity[t], entropy[t], seed))
                if bid == "prop2" and c.numeric_prop2 is not None:
                    nc = c.numeric_prop2
                    w.writerow((bid, c.d, c.M, c.ensemble + ":numeric", t, _f(nc.lhs[t]), _f(nc.rhs[t]),
                                _f(nc.slack[t]), _holds_text(nc, t), purity[t], entropy[t], seed))


def csv_text(result: SweepResult) -> str:
    buf = io.StringIO()
    write_csv(result, buf)
    return buf.getvalue()


def summary_json(result: SweepResult) -> str:
    return _jsonio.dumps(result.summary()) + "\n"


def counterexample(result: SweepResult, cell: CellResult, bound_id: str, trial: int, mubs: MubSet) -> dict:
    """Reproducible record of a violated bound: MUB set, state and numbers."""
    seed = int(cell.seeds[trial])
    state = draw_state(cell.d, cell.ensemble, seed)
    col = cell.bounds[bound_id]
    if state.ndim == 1:
        st = {"kind": "pure", "d": cell.d, "vector": _jsonio.complex_to_pairs(state)}
    else:
        st = {"kind": "density", "d": cell.d, "matrix": _jsonio.complex_to_pairs(state)}
    return {
        "bound_id": bound_id,
        "d": cell.d,
        "M": cell.M,
        "ensemble": cell.ensemble,
        "trial": trial,
        "seed": seed,
        "lhs": float(col.lhs[trial]),
        "rhs": float(col.rhs[trial]),
        "slack": float(col.slack[trial]),
        "mub": mub_to_dict(mubs.truncated(cell.M)),
        "state": st,
    }


def dump_counterexamples(result: SweepResult, directory, limit: int = 10) -> list[Path]:
    sets = load_mub_sets(result.config)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for cell, bid, t in result.violations()[:limit]:
        obj = counterexample(result, cell, bid, t, sets[cell.d])
        path = directory / f"counterexample_{bid}_d{cell.d}_M{cell.M}_{cell.ensemble}_{t}.json"
        path.write_text(_jsonio.dumps(obj) + "\n", encoding="utf-8")
        paths.append(path)
    return paths


# --- Table 1 -------------------------------------------------------------------

class Table1Row(NamedTuple):
    m1: int
    d_low: int
    d_high: int


def m1_values(d_max: int) -> np.ndarray:
    """Smallest M >= 2 with ln(Md/(d+M-1)) >= ln(d)/M, for d = 2..d_max.

    The left side increases in M and the right side decreases, so the first
    M that satisfies the inequality is the crossover.
    """
    if d_max < 2:
        raise ValueError(f"d_max must be >= 2, got {d_max}")
    d = np.arange(2, d_max + 1, dtype=float)
    m1 = np.zeros(d.size, dtype=np.int64)
    m = 2
    while np.any(m1 == 0):
        todo = m1 == 0
        ok = bd.prop1_pure_rhs(d[todo], m) >= bd.pati_mub_rhs(d[todo], m)
        idx = np.flatnonzero(todo)[ok]
        m1[idx] = m
        m += 1
    return m1


def table1_intervals(d_max: int) -> list[Table1Row]:
    m1 = m1_values(d_max)
    rows = []
    start = 0
    for i in range(1, m1.size + 1):
        if i == m1.size or m1[i] != m1[start]:
            rows.append(Table1Row(int(m1[start]), start + 2, i + 1))
            start = i
    return rows


# --- comparisons and saturation --------------------------------------------------

class ComparisonRow(NamedTuple):
    M: int
    prop1_pure: float
    pati_mub: float
    c1_winner: str
    prop2_pure: float
    prop2_lp_pure: float
    cg_winner: str
    prop3: float
    rmub12: float
    hinf_winner: str


def _winner(a_name: str, a: float, b_name: str, b: float) -> str:
    if a > b:
        return a_name
    if b > a:
        return b_name
    return "tie"


def compare_bounds(d: int, M_range) -> list[ComparisonRow]:
    """Pointwise comparison of the competing lower bounds for each M."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    rows = []
    for m in M_range:
        m = int(m)
        if m < 1:
            raise ValueError(f"M must be >= 1, got {m}")
        a, b = bd.prop1_pure_rhs(d, m), bd.pati_mub_rhs(d, m)
        c, e = bd.prop2_rhs(d, m, 1.0), bd.prop2_pure_lp_rhs(d, m)
        f, g = bd.prop3_rhs(d, m), bd.rmub12_rhs(d, m)
        rows.append(ComparisonRow(
            m, a, b, _winner("prop1_pure", a, "pati_mub", b),
            c, e, _winner("prop2_pure", c, "prop2_lp_pure", e),
            f, g, _winner("prop3", f, "rmub12", g),
        ))
    return rows


@dataclass
class SaturationResult:
    d: int
    trials: int
    max_ic_deviation: float
    prop1_slack_at_mixed: float
    passed: bool


def saturation_suite(dims, trials: int = 1000, seed: int = 0, ensemble: str = "mixed",
                     tol: float = 1e-10) -> list[SaturationResult]:
    """Check sum_t J(B_t) = tr(rho^2) + 1 for the complete MUB set.

    Also checks that the relative-entropy bound is tight at the maximally
    mixed state.
    """
    out = []
    for d in dims:
        mubs = construct_mub(d)
        m = len(mubs)
        bases = mubs.matrices()
        seeds = [derive_seed(seed, d, m, ensemble, t) for t in range(trials)]
        states = np.stack([draw_state(d, ensemble, s) for s in seeds])
        p = probabilities_batch(bases, states)
        ic = np.sum(p * p, axis=-1).sum(axis=1)
        if states.ndim == 2:
            pur = np.ones(trials)
        else:
            pur = np.einsum("nab,nab->n", states, states.conj()).real
        dev = float(np.max(np.abs(ic - (pur + 1.0))))

        star = DensityMatrix.maximally_mixed(d)
        pstar = probabilities_batch(bases, star.matrix[None])[0]
        mean_c1 = float(np.mean(entropy_from_eigenvalues(pstar)) - np.log(d))
        slack = mean_c1 - bd.prop1_rhs(d, m, 1.0 / d, np.log(d))
        out.append(SaturationResult(d, trials, dev, slack, dev <= tol and abs(slack) <= tol))
    return out



"""Batch experiments: concentration of the quenched crossing probability,
box-crossing estimates, and the variance/exponential inequalities.

Every experiment is driven by an ExperimentConfig and is bit-reproducible:
replica r of size n uses the substream derived from (seed, replica-tag, n, r),
results are assembled by replica index, and Monte Carlo draws inside each
replica come in fixed-size blocks, so the worker count never changes any
number.  Rows serialize to CSV with repr-formatted floats, which makes the
byte-level output reproducible as well.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import rng as vrng
from .crossing import (
    HORIZONTAL,
    RED,
    CrossingQuery,
    quenched_probability_exact,
    quenched_probability_mc,
)
from .explore import MONTE_CARLO
from .geometry import Rect, build_tessellation, halfplane_window, sample_binomial, sample_poisson
from .influence import influence_l2, influences_exact
from .stats import mean_ci_halfwidth, variance_se, wilson_halfwidth

# exact quenched values are used whenever the cell count allows it
EXACT_Z_LIMIT = 20

KINDS = ("concentration", "box", "efron-stein", "exp-ineq")


@dataclass(frozen=True)
class ExperimentConfig:
    """Shared experiment parameters; JSON configs mirror these fields."""

    name: str
    n_grid: tuple[int, ...]
    K: int
    m: int
    seed: int
    rho: float = 1.0
    t_grid: tuple[float, ...] = (0.05, 0.1, 0.2)
    quantile_levels: tuple[float, ...] = (0.5, 0.75, 0.9)
    lambdas: tuple[float, ...] = (0.5, 1.0, 2.0)
    targets: tuple[dict, ...] | None = None  # box experiment target specs
    target_value: float = 0.5
    workers: int = 1
    out: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "t_grid", tuple(float(t) for t in self.t_grid))
        object.__setattr__(self, "quantile_levels", tuple(float(q) for q in self.quantile_levels))
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        if self.targets is not None:
            object.__setattr__(self, "targets", tuple(dict(t) for t in self.targets))
        if not self.n_grid:
            raise ValueError("n_grid must be nonempty")
        if any(n < 1 for n in self.n_grid):
            raise ValueError("n_grid entries must be >= 1")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError("n_grid must be strictly increasing")
        if self.K < 2:
            raise ValueError("K must be >= 2")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if any(t <= 0 for t in self.t_grid):
            raise ValueError("t_grid entries must be positive")
        if any(not 0.0 < q < 1.0 for q in self.quantile_levels):
            raise ValueError("quantile levels must lie in (0, 1)")
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n_grid": list(self.n_grid),
            "K": self.K,
            "m": self.m,
            "seed": self.seed,
            "rho": self.rho,
            "t_grid": list(self.t_grid),
            "quantile_levels": list(self.quantile_levels),
            "lambdas": list(self.lambdas),
            "targets": [dict(t) for t in self.targets] if self.targets is not None else None,
            "target_value": self.target_value,
            "workers": self.workers,
            "out": self.out,
        }


def _replica_map(fn: Callable[[int], Any], count: int, workers: int) -> list:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, range(count)))
    return [fn(r) for r in range(count)]


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _window_query(window: Rect) -> CrossingQuery:
    return CrossingQuery(target=window, direction=HORIZONTAL, color=RED)


def _quenched_value(tess, query: CrossingQuery, m: int, seed: int) -> tuple[float, str]:
    if tess.n_cells <= EXACT_Z_LIMIT:
        return quenched_probability_exact(tess, query).value, "exact"
    return quenched_probability_mc(tess, query, m, seed).value, MONTE_CARLO


# ---------------------------------------------------------------------------
# concentration of Z = P(crossing | tessellation)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeviationRow:
    """Distribution summary of |Z - target| over replicas at one size n."""

    n: int
    K: int
    m: int
    method: str
    mean: float
    mean_ci: float
    quantiles: dict[float, float]
    tails: dict[float, tuple[float, float]]  # t -> (freq of dev >= t, Wilson halfwidth)
    mgf: dict[float, float]                  # lambda -> sampled E[exp(lambda (Z - mean))]
    noise_floor: float
    flagged_t: tuple[float, ...]             # thresholds below twice the noise floor

    def csv_header(self) -> list[str]:
        head = ["n", "K", "m", "method", "mean_z", "mean_z_ci"]
        head += [f"q_{_fmt(q)}" for q in self.quantiles]
        for t in self.tails:
            head += [f"tail_{_fmt(t)}", f"tail_{_fmt(t)}_ci", f"tail_{_fmt(t)}_flagged"]
        head += [f"mgf_{_fmt(lam)}" for lam in self.mgf]
        head.append("noise_floor")
        return head

    def csv_values(self) -> list[str]:
        row = [_fmt(self.n), _fmt(self.K), _fmt(self.m), self.method, _fmt(self.mean), _fmt(self.mean_ci)]
        row += [_fmt(v) for v in self.quantiles.values()]
        for t, (freq, ci) in self.tails.items():
            row += [_fmt(freq), _fmt(ci), _fmt(t in self.flagged_t)]
        row += [_fmt(v) for v in self.mgf.values()]
        row.append(_fmt(self.noise_floor))
        return row


def _quenched_replicas(cfg: ExperimentConfig, n: int, window: Rect, query: CrossingQuery) -> tuple[np.ndarray, str]:
    def one(r: int) -> tuple[float, str]:
        rseed = vrng.derive_seed(cfg.seed, vrng.REPLICA, n, r)
        tess = build_tessellation(sample_binomial(window, n, rseed))
        return _quenched_value(tess, query, cfg.m, rseed)

    results = _replica_map(one, cfg.K, cfg.workers)
    zs = np.array([v for v, _ in results])
    method = results[0][1]
    return zs, method


def exp_concentration(cfg: ExperimentConfig) -> list[DeviationRow]:
    """Deviation summaries of the quenched window-crossing probability.

    Z is exact for n <= 20 and a Monte Carlo average of m colorings
    otherwise; in the latter case tail frequencies are inflated by coloring
    noise, so the floor sqrt(1/(4m)) is reported and thresholds below
    twice the floor are flagged.
    """
    window = Rect(rho=cfg.rho, area=1.0)
    query = _window_query(window)
    rows = []
    for n in cfg.n_grid:
        zs, method = _quenched_replicas(cfg, n, window, query)
        dev = np.abs(zs - cfg.target_value)
        noise_floor = 0.0 if method == "exact" else math.sqrt(1.0 / (4.0 * cfg.m))
        tails = {}
        for t in cfg.t_grid:
            hits = int((dev >= t).sum())
            tails[t] = (hits / cfg.K, wilson_halfwidth(hits, cfg.K))
        mean = float(zs.mean())
        rows.append(
            DeviationRow(
                n=n,
                K=cfg.K,
                m=cfg.m,
                method=method,
                mean=mean,
                mean_ci=mean_ci_halfwidth(zs),
                quantiles={q: float(np.quantile(dev, q)) for q in cfg.quantile_levels},
                tails=tails,
                mgf={lam: float(np.exp(lam * (zs - mean)).mean()) for lam in cfg.lambdas},
                noise_floor=noise_floor,
                flagged_t=tuple(t for t in cfg.t_grid if noise_floor > t / 2.0),
            )
        )
    return rows


# ---------------------------------------------------------------------------
# box-crossing estimates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoxRow:
    n: int
    rho: float
    target_label: str
    model: str        # "binomial" or "poisson" (half-plane emulation)
    estimate: float
    ci_halfwidth: float
    K: int
    m: int

    def csv_header(self) -> list[str]:
        return ["n", "rho", "target", "model", "estimate", "ci", "K", "m"]

    def csv_values(self) -> list[str]:
        return [
            _fmt(self.n), _fmt(self.rho), self.target_label, self.model,
            _fmt(self.estimate), _fmt(self.ci_halfwidth), _fmt(self.K), _fmt(self.m),
        ]


DEFAULT_BOX_TARGETS: tuple[dict, ...] = (
    {"kind": "window", "label": "window"},
    {"kind": "concentric", "area_fraction": 0.25, "label": "quarter"},
)


def _resolve_box_target(window: Rect, spec: dict, n: int) -> tuple[str, str, Rect, Rect]:
    """Returns (label, model, sampling window, target rectangle)."""
    kind = spec.get("kind", "window")
    label = spec.get("label", kind)
    if kind == "window":
        return label, "binomial", window, window
    if kind == "concentric":
        frac = float(spec.get("area_fraction", 0.25))
        if not 0.0 < frac <= 1.0:
            raise ValueError("area_fraction must be in (0, 1]")
        return label, "binomial", window, window.scaled_concentric(frac * window.area)
    if kind == "aligned":
        # flush with the left side, full height
        frac = float(spec.get("width_fraction", 0.5))
        xmin, xmax, ymin, ymax = window.bounds
        target = Rect.from_bounds(xmin, xmin + frac * (xmax - xmin), ymin, ymax)
        return label, "binomial", window, target
    if kind == "rect":
        target = Rect.from_bounds(*spec["bounds"])
        if not window.contains_rect(target):
            raise ValueError(f"target {label!r} does not fit inside the window")
        return label, "binomial", window, target
    if kind == "halfplane":
        rho_t = float(spec.get("rho", 1.5))
        hp_window, hp_target = halfplane_window(rho_t, float(n))
        return label, "poisson", hp_window, hp_target
    raise ValueError(f"unknown box target kind {kind!r}")


def exp_box_crossing(cfg: ExperimentConfig) -> list[BoxRow]:
    """Annealed crossing estimates for configured (window, target) pairs.

    Plain targets use n fixed points in the unit-area window of aspect rho;
    the half-plane mode samples a Poisson configuration on a padded
    left-anchored window of area n, where the left window side plays the
    role of the half-plane boundary and the padding pushes the other
    artificial sides away from the target.
    """
    window = Rect(rho=cfg.rho, area=1.0)
    targets = cfg.targets if cfg.targets is not None else DEFAULT_BOX_TARGETS
    rows = []
    for n in cfg.n_grid:
        for ti, tspec in enumerate(targets):
            label, model, samp_window, target = _resolve_box_target(window, tspec, n)
            query = CrossingQuery(target=target, direction=tspec.get("direction", HORIZONTAL), color=RED)

            def one(r: int) -> float:
                rseed = vrng.derive_seed(cfg.seed, vrng.REPLICA, n, ti, r)
                if model == "poisson":
                    config = sample_poisson(samp_window, rseed)
                    if config.n == 0:
                        return 0.0
                else:
                    config = sample_binomial(samp_window, n, rseed)
                tess = build_tessellation(config)
                value, _ = _quenched_value(tess, query, cfg.m, rseed)
                return value

            zs = np.array(_replica_map(one, cfg.K, cfg.workers))
            rows.append(
                BoxRow(
                    n=n,
                    rho=cfg.rho,
                    target_label=label,
                    model=model,
                    estimate=float(zs.mean()),
                    ci_halfwidth=mean_ci_halfwidth(zs),
                    K=cfg.K,
                    m=cfg.m,
                )
            )
    return rows


# ---------------------------------------------------------------------------
# variance and exponential inequalities (exact per replica)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EfronSteinRow:
    n: int
    K: int
    var_z: float
    mean_sum_sq: float
    se_var: float
    se_mean: float
    holds: bool  # var_z <= mean_sum_sq + 2 * combined SE

    def csv_header(self) -> list[str]:
        return ["n", "K", "var_z", "mean_sum_sq_influence", "se_var", "se_mean", "bound_ok"]

    def csv_values(self) -> list[str]:
        return [
            _fmt(self.n), _fmt(self.K), _fmt(self.var_z), _fmt(self.mean_sum_sq),
            _fmt(self.se_var), _fmt(self.se_mean), _fmt(self.holds),
        ]


def _exact_replicas(cfg: ExperimentConfig, n: int) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
    """Exact Z, exact summed squared influences, and influence vectors per replica."""
    if n > EXACT_Z_LIMIT:
        raise ValueError(f"exact per-replica computation needs n <= {EXACT_Z_LIMIT}, got {n}")
    window = Rect(rho=cfg.rho, area=1.0)
    query = _window_query(window)

    def one(r: int) -> tuple[float, float, np.ndarray]:
        rseed = vrng.derive_seed(cfg.seed, vrng.REPLICA, n, r)
        tess = build_tessellation(sample_binomial(window, n, rseed))
        z = quenched_probability_exact(tess, query).value
        infl = influences_exact(tess, query)
        return z, influence_l2(infl), infl.values

    results = _replica_map(one, cfg.K, cfg.workers)
    zs = np.array([z for z, _, _ in results])
    sums = np.array([s for _, s, _ in results])
    vectors = [v for _, _, v in results]
    return zs, sums, vectors


def exp_efron_stein(cfg: ExperimentConfig) -> list[EfronSteinRow]:
    """Sampled Var(Z) against the sampled mean of the squared-influence sum."""
    rows = []
    for n in cfg.n_grid:
        zs, sums, _ = _exact_replicas(cfg, n)
        var_z = float(zs.var(ddof=1))
        mean_sq = float(sums.mean())
        se_var = variance_se(zs)
        se_mean = float(sums.std(ddof=1)) / math.sqrt(cfg.K)
        combined = math.sqrt(se_var**2 + se_mean**2)
        rows.append(
            EfronSteinRow(
                n=n,
                K=cfg.K,
                var_z=var_z,
                mean_sum_sq=mean_sq,
                se_var=se_var,
                se_mean=se_mean,
                holds=var_z <= mean_sq + 2.0 * combined,
            )
        )
    return rows


@dataclass(frozen=True)
class ExpIneqRow:
    n: int
    K: int
    lam: float
    lhs: float        # Var(exp(lam Z / 2))
    rhs: float        # (lam^2/4) E[exp(lam Z) sum_j exp(lam Inf_j) Inf_j^2]
    se_lhs: float
    se_rhs: float
    mgf: float        # F(lam) = E[exp(lam (Z - mean Z))]
    ratio: float | None  # lhs/rhs, suppressed for tiny lam
    holds: bool

    def csv_header(self) -> list[str]:
        return ["n", "K", "lambda", "lhs_var", "rhs_bound", "se_lhs", "se_rhs", "mgf", "ratio", "bound_ok"]

    def csv_values(self) -> list[str]:
        return [
            _fmt(self.n), _fmt(self.K), _fmt(self.lam), _fmt(self.lhs), _fmt(self.rhs),
            _fmt(self.se_lhs), _fmt(self.se_rhs), _fmt(self.mgf),
            "" if self.ratio is None else _fmt(self.ratio), _fmt(self.holds),
        ]


def exp_exp_inequality(cfg: ExperimentConfig, lambdas: tuple[float, ...] | None = None) -> list[ExpIneqRow]:
    """Both sides of the exponential moment inequality, exact per replica.

    LHS is the sampled variance of exp(lam Z / 2); RHS is (lam^2/4) times
    the sampled mean of exp(lam Z) * sum_j exp(lam Inf_j) Inf_j^2.  F(lam)
    is reported alongside; only the inequality itself is asserted by the
    test suite.
    """
    lams = tuple(float(v) for v in lambdas) if lambdas is not None else cfg.lambdas
    if any(lam <= 0 for lam in lams):
        raise ValueError("lambda values must be positive")
    rows = []
    for n in cfg.n_grid:
        zs, _, vectors = _exact_replicas(cfg, n)
        mean_z = float(zs.mean())
        for lam in lams:
            half = np.exp(0.5 * lam * zs)
            lhs = float(half.var(ddof=1))
            weights = np.array([float(np.sum(np.exp(lam * v) * v * v)) for v in vectors])
            samples = (lam * lam / 4.0) * np.exp(lam * zs) * weights
            rhs = float(samples.mean())
            se_lhs = variance_se(half)
            se_rhs = float(samples.std(ddof=1)) / math.sqrt(cfg.K)
            combined = math.sqrt(se_lhs**2 + se_rhs**2)
            rows.append(
                ExpIneqRow(
                    n=n,
                    K=cfg.K,
                    lam=lam,
                    lhs=lhs,
                    rhs=rhs,
                    se_lhs=se_lhs,
                    se_rhs=se_rhs,
                    mgf=float(np.exp(lam * (zs - mean_z)).mean()),
                    ratio=(lhs / rhs) if lam >= 1e-3 and rhs > 0 else None,
                    holds=lhs <= rhs + 2.0 * combined,
                )
            )
    return rows


# ---------------------------------------------------------------------------
# dispatch and serialization
# ---------------------------------------------------------------------------

def run_experiment(kind: str, cfg: ExperimentConfig) -> list:
    if kind == "concentration":
        return exp_concentration(cfg)
    if kind == "box":
        return exp_box_crossing(cfg)
    if kind == "efron-stein":
        return exp_efron_stein(cfg)
    if kind == "exp-ineq":
        return exp_exp_inequality(cfg)
    raise ValueError(f"unknown experiment kind {kind!r}; choose from {KINDS}")


def rows_to_csv(rows: list) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(rows[0].csv_header())
    for row in rows:
        writer.writerow(row.csv_values())
    return buf.getvalue()


def summary_json(kind: str, cfg: ExperimentConfig, rows: list) -> dict:
    summary: dict[str, Any] = {"experiment": kind, "config": cfg.to_dict()}
    if kind == "concentration":
        levels = cfg.quantile_levels
        trends = {}
        for q in levels:
            series = [row.quantiles[q] for row in rows]
            trends[_fmt(q)] = all(b < a for a, b in zip(series, series[1:]))
        summary["quantile_decreasing"] = trends
        summary["rows"] = [
            {
                "n": row.n,
                "method": row.method,
                "mean_z": row.mean,
                "mean_z_ci": row.mean_ci,
                "quantiles": {_fmt(k): v for k, v in row.quantiles.items()},
                "tails": {_fmt(k): list(v) for k, v in row.tails.items()},
                "mgf": {_fmt(k): v for k, v in row.mgf.items()},
                "noise_floor": row.noise_floor,
                "flagged_t": list(row.flagged_t),
            }
            for row in rows
        ]
    elif kind == "box":
        summary["rows"] = [
            {
                "n": row.n,
                "target": row.target_label,
                "model": row.model,
                "estimate": row.estimate,
                "ci": row.ci_halfwidth,
            }
            for row in rows
        ]
    elif kind == "efron-stein":
        summary["all_hold"] = all(row.holds for row in rows)
        summary["rows"] = [
            {
                "n": row.n,
                "var_z": row.var_z,
                "mean_sum_sq_influence": row.mean_sum_sq,
                "bound_ok": row.holds,
            }
            for row in rows
        ]
    else:
        summary["all_hold"] = all(row.holds for row in rows)
        summary["rows"] = [
            {"n": row.n, "lambda": row.lam, "lhs": row.lhs, "rhs": row.rhs, "bound_ok": row.holds}
            for row in rows
        ]
    return summary


def render_svg(kind: str, rows: list, path: str | Path) -> None:
    """Line plots against log n (quantile curves for the concentration runs)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if kind == "concentration":
        ns = [row.n for row in rows]
        for q in rows[0].quantiles:
            ax.plot(np.log(ns), [row.quantiles[q] for row in rows], marker="o", label=f"q{q}")
        ax.set_ylabel("deviation quantile")
    elif kind == "box":
        labels = sorted({row.target_label for row in rows})
        for label in labels:
            sub = [row for row in rows if row.target_label == label]
            ax.errorbar(
                np.log([row.n for row in sub]),
                [row.estimate for row in sub],
                yerr=[row.ci_halfwidth for row in sub],
                marker="o",
                label=label,
            )
        ax.set_ylabel("crossing estimate")
    elif kind == "efron-stein":
        ns = [row.n for row in rows]
        ax.plot(np.log(ns), [row.var_z for row in rows], marker="o", label="Var(Z)")
        ax.plot(np.log(ns), [row.mean_sum_sq for row in rows], marker="s", label="mean sum Inf^2")
        ax.set_ylabel("value")
    else:
        for lam in sorted({row.lam for row in rows}):
            sub = [row for row in rows if row.lam == lam]
            ns = [row.n for row in sub]
            ax.plot(np.log(ns), [row.lhs for row in sub], marker="o", label=f"lhs lam={lam}")
            ax.plot(np.log(ns), [row.rhs for row in sub], marker="s", label=f"rhs lam={lam}")
        ax.set_ylabel("value")
    ax.set_xlabel("log n")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def write_outputs(
    kind: str,
    cfg: ExperimentConfig,
    rows: list,
    out: str | Path | None,
    svg: str | Path | None = None,
) -> str:
    """Write CSV (and JSON summary next to it); returns the CSV text."""
    text = rows_to_csv(rows)
    if out is not None:
        out = Path(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        summary_path = out.with_suffix(".json")
        with open(summary_path, "w", encoding="utf-8") as fh:
            json.dump(summary_json(kind, cfg, rows), fh, indent=2)
            fh.write("\n")
    if svg is not None and rows:
        render_svg(kind, rows, svg)
    return text

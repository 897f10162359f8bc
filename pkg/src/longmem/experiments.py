"""Monte Carlo sweeps of estimator MSE over a bandwidth grid.

Replication ``r`` draws one LMSV path from substream ``(base_seed, r)``,
takes log-squares and feeds the same series to every method and every m
(common random numbers).  Periodograms are computed once at the largest m of
the grid; the fit at each frequency does not depend on m, so smaller
bandwidths reuse a prefix.
"""
from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .datagen import GenConfig, log_squared, lmsv_series
from .errors import EstimationError, ValidationError
from .estimators import METHODS, bandwidth_grid, estimate, estimate_from_periodogram
from .spectra import DEFAULT_TOL, nkk_periodogram, ordinary_periodogram, wavelet_ols_periodogram
from .wavelet import haar_dwt_finest, max_scale

# a cell missing more than this share of replications is flagged unreliable
MAX_MISSING_FRACTION = 0.2

AGGREGATE_COLUMNS = ("method", "m", "mse", "bias", "variance", "mean_d_hat", "reps_used",
                     "reliable")

FIGURES = {
    1: dict(n=1024, d=0.2, phi=0.4, sigma_eps2=0.37),
    2: dict(n=1024, d=0.3, phi=0.5, sigma_eps2=0.37),
    3: dict(n=2048, d=0.3, phi=0.4, sigma_eps2=0.37),
}


@dataclass(frozen=True)
class SweepConfig:
    """One MSE-vs-bandwidth experiment.

    ``generator_d`` overrides the memory parameter used to simulate while
    ``d`` stays the truth that bias and MSE are measured against.
    """

    n: int = 1024
    d: float = 0.2
    phi: float = 0.4
    sigma_eps2: float = 0.37
    reps: int = 200
    lo_exp: float = 0.3
    hi_exp: float = 0.8
    methods: tuple = METHODS
    base_seed: int = 0
    tol: float = DEFAULT_TOL
    sigma: float = 1.0
    noise: str = "gaussian"
    burn_in: int = 0
    generator_d: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.reps < 1:
            raise ValidationError(f"reps must be >= 1, got {self.reps}", "reps")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValidationError(
                f"unknown method(s) {', '.join(unknown)}; valid: {', '.join(METHODS)}", "methods")
        if any(m in ("wblp", "nkk") for m in self.methods):
            max_scale(self.n)
        bandwidth_grid(self.n, self.lo_exp, self.hi_exp)
        self.gen_config(0)

    @property
    def grid(self) -> list[int]:
        return bandwidth_grid(self.n, self.lo_exp, self.hi_exp)

    def gen_config(self, r: int) -> GenConfig:
        d = self.d if self.generator_d is None else self.generator_d
        return GenConfig(n=self.n, d=d, phi=self.phi, sigma_eps2=self.sigma_eps2,
                         sigma=self.sigma, seed=self.base_seed, replication=r,
                         burn_in=self.burn_in, noise=self.noise)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["methods"] = list(self.methods)
        return out


@dataclass
class Cell:
    method: str
    m: int
    mse: float
    bias: float
    variance: float
    mean_d_hat: float
    reps_used: int
    reliable: bool


@dataclass
class SweepResult:
    config: SweepConfig
    grid: list
    raw: dict  # method -> (reps, len(grid)) array, NaN where the estimator failed
    seeds: list  # one entry per replication: rep, base_seed, series checksum
    cells: list = field(default_factory=list)

    def cell(self, method: str, m: int) -> Cell:
        for c in self.cells:
            if c.method == method and c.m == m:
                return c
        raise KeyError((method, m))

    def mse(self, method: str) -> np.ndarray:
        return np.array([self.cell(method, m).mse for m in self.grid])


def simulate_log_squared(cfg: SweepConfig, r: int):
    """The log-squared LMSV series of replication ``r``."""
    return log_squared(lmsv_series(cfg.gen_config(r)))


def _periodogram(y, method: str, m: int, tol: float):
    if method == "gph":
        return ordinary_periodogram(y, m)
    w = haar_dwt_finest(y)
    if method == "wblp":
        return wavelet_ols_periodogram(w, m)
    return nkk_periodogram(w, m, tol)


def replicate(cfg: SweepConfig, r: int, grid=None) -> tuple[dict, str]:
    """All (method, m) estimates for replication ``r`` plus the series checksum."""
    grid = cfg.grid if grid is None else list(grid)
    y = simulate_log_squared(cfg, r)
    out = {}
    for method in cfg.methods:
        row = np.full(len(grid), np.nan)
        try:
            full = _periodogram(y, method, max(grid), cfg.tol)
        except EstimationError:
            out[method] = row
            continue
        for i, m in enumerate(grid):
            try:
                row[i] = estimate_from_periodogram(full.truncate(m), method).d_hat
            except EstimationError:
                pass
        out[method] = row
    return out, y.checksum()


def run_replication(cfg: SweepConfig, r: int, m: int, method: str) -> float:
    """d_hat for one cell; NaN when the estimator fails."""
    y = simulate_log_squared(cfg, r)
    try:
        return estimate(y, method, m, cfg.tol).d_hat
    except EstimationError:
        return math.nan


def _task(args):
    cfg, r = args
    return r, *replicate(cfg, r)


def aggregate(values: np.ndarray, truth: float, reps: int) -> tuple:
    """(mse, bias, variance, mean, used, reliable) with the divide-by-R variance."""
    v = values[np.isfinite(values)]
    used = int(v.size)
    reliable = (reps - used) <= MAX_MISSING_FRACTION * reps
    if used == 0:
        return math.nan, math.nan, math.nan, math.nan, 0, False
    mean = float(v.mean())
    bias = mean - truth
    variance = float(np.mean((v - mean) ** 2))
    mse = float(np.mean((v - truth) ** 2))
    return mse, bias, variance, mean, used, reliable


def run_sweep(cfg: SweepConfig, workers: int = 1, progress=None) -> SweepResult:
    """Evaluate every (method, m, replication) cell and aggregate per (method, m).

    Results are keyed by replication index, so the output does not depend on
    ``workers`` or on completion order.
    """
    grid = cfg.grid
    raw = {m: np.full((cfg.reps, len(grid)), np.nan) for m in cfg.methods}
    checksums = [None] * cfg.reps
    tasks = [(cfg, r) for r in range(cfg.reps)]

    def collect(results):
        for r, rows, checksum in results:
            for method, row in rows.items():
                raw[method][r] = row
            checksums[r] = checksum
            if progress is not None:
                progress(r)

    if workers <= 1:
        collect(map(_task, tasks))
    else:
        chunk = max(1, cfg.reps // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            collect(pool.map(_task, tasks, chunksize=chunk))

    seeds = [{"rep": r, "base_seed": cfg.base_seed, "checksum": checksums[r]}
             for r in range(cfg.reps)]
    res = SweepResult(cfg, grid, raw, seeds)
    for method in cfg.methods:
        for i, m in enumerate(grid):
            res.cells.append(Cell(method, m, *aggregate(raw[method][:, i], cfg.d, cfg.reps)))
    return res


def figure_config(figure: int, **overrides) -> SweepConfig:
    if figure not in FIGURES:
        raise ValidationError(f"figure must be one of 1, 2, 3, got {figure}", "figure")
    return SweepConfig(**{**FIGURES[figure], **overrides})


def haar_noise_autocov_diagnostic(sigma_u2: float, n: int, seed: int = 0,
                                  max_lag: int = 10) -> tuple[float, float, float]:
    """Sample autocovariances of Haar coefficients of i.i.d. Gaussian noise.

    Returns the lag-0 and lag-1 values and the largest absolute value over
    lags 2..max_lag.  The coefficients are divided by 2^{J/2}, leaving the
    circular first differences U_q - U_{q+1}.
    """
    J = max_scale(n)
    if sigma_u2 < 0:
        raise ValidationError("sigma_u2 must be nonnegative", "sigma_u2")
    u = np.sqrt(sigma_u2) * np.random.default_rng(seed).standard_normal(n)
    beta = haar_dwt_finest(u).coeffs / 2.0 ** (J / 2)
    acov = [float(beta[: n - h] @ beta[h:]) / n for h in range(max_lag + 1)]
    return acov[0], acov[1], max(abs(a) for a in acov[2:])


def haar_noise_autocov_se(sigma_u2: float, n: int) -> tuple[float, float, float]:
    """Large-sample standard errors of those autocovariances for Gaussian noise.

    Bartlett's formula for the MA(1) with autocovariances (2s, -s, 0) gives
    variances 12 s^2/n, 7 s^2/n and 6 s^2/n at lags 0, 1 and >= 2.
    """
    return tuple(math.sqrt(c / n) * sigma_u2 for c in (12.0, 7.0, 6.0))


def _write_csv(path: Path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def export_results(res: SweepResult, path, extra_config: dict | None = None) -> dict:
    """Write aggregate.csv, raw.csv, config.json and curves.dat into ``path``."""
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror}") from exc

    files = {name: out / name for name in ("aggregate.csv", "raw.csv", "config.json",
                                           "curves.dat")}
    _write_csv(files["aggregate.csv"], AGGREGATE_COLUMNS,
               ([c.method, c.m, repr(c.mse), repr(c.bias), repr(c.variance),
                 repr(c.mean_d_hat), c.reps_used, int(c.reliable)] for c in res.cells))
    _write_csv(files["raw.csv"], ("method", "m", "rep", "d_hat"),
               ([method, m, r, repr(float(res.raw[method][r, i]))]
                for method in res.config.methods
                for i, m in enumerate(res.grid)
                for r in range(res.config.reps)))

    config = {"sweep": res.config.to_dict(), "grid": list(res.grid), "seeds": res.seeds,
              "version": __version__}
    if extra_config:
        config["effective"] = extra_config
    try:
        files["config.json"].write_text(json.dumps(config, indent=2) + "\n")
        methods = list(res.config.methods)
        lines = ["# m " + " ".join(f"mse_{m}" for m in methods)]
        for m in res.grid:
            lines.append(" ".join([str(m)] + [repr(res.cell(meth, m).mse) for meth in methods]))
        files["curves.dat"].write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write results into {out}: {exc.strerror}") from exc
    return files


def read_aggregate(path) -> list[Cell]:
    """Parse an aggregate.csv written by :func:`export_results`."""
    cells = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            cells.append(Cell(row["method"], int(row["m"]), float(row["mse"]),
                              float(row["bias"]), float(row["variance"]),
                              float(row["mean_d_hat"]), int(row["reps_used"]),
                              bool(int(row["reliable"]))))
    return cells


def default_workers() -> int:
    return max(1, min(8, os.cpu_count() or 1))

"""``longmem`` command-line entry point.

Exit status: 0 on success, 1 for invalid input (bad flag, value or file
contents), 2 for runtime failures (estimation or I/O).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .datagen import GenConfig, TimeSeries, arfima_1_d_0, fractional_noise, log_squared, lmsv_series
from .errors import EstimationError, ValidationError
from .estimators import METHODS, bandwidth_from_exponent, estimate
from .experiments import (FIGURES, SweepConfig, SweepResult, export_results,
                          run_sweep)
from .lad import METHODS as SOLVERS
from .spectra import DEFAULT_TOL, nkk_periodogram, ordinary_periodogram, wavelet_ols_periodogram
from .wavelet import WaveletCoefficients, haar_dwt_finest

MODELS = ("fractional", "arfima", "lmsv", "logsq-lmsv")
PERIODOGRAM_KINDS = ("ordinary", "wavelet-ols", "nkk")
METHOD_ORDER = ("gph", "wblp", "nkk")


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(p, out_help="output path (default: standard output)"):
    p.add_argument("--seed", type=int, default=0, help="64-bit reproducibility seed")
    p.add_argument("--out", default=None, help=out_help)
    p.add_argument("--quiet", action="store_true", help="suppress summaries on stderr")
    p.add_argument("--config", default=None,
                   help="JSON file whose keys mirror the flags; flags win on conflict")


def _methods(text):
    items = [s.strip() for s in text.split(",") if s.strip()]
    bad = [s for s in items if s not in METHODS]
    if bad:
        raise argparse.ArgumentTypeError(
            f"invalid method(s) {', '.join(bad)} (choose from {', '.join(METHODS)})")
    return items


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="longmem",
                     description="Simulate long-memory series and estimate the memory parameter d.")
    parser.add_argument("--version", action="version", version=f"longmem {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    sub.required = True

    g = sub.add_parser("generate", help="simulate a series and write t,value CSV")
    g.add_argument("--n", type=int, help="sample size")
    g.add_argument("--d", type=float, default=0.0, help="memory parameter")
    g.add_argument("--phi", type=float, default=0.0, help="AR(1) coefficient")
    g.add_argument("--sigma-eps2", type=float, default=1.0, help="innovation variance")
    g.add_argument("--sigma", type=float, default=1.0, help="LMSV level")
    g.add_argument("--model", choices=MODELS, default="lmsv")
    g.add_argument("--burn-in", type=int, default=0)
    g.add_argument("--noise", choices=("gaussian", "student-t"), default="gaussian")
    g.add_argument("--df", type=float, default=5.0, help="Student-t degrees of freedom")
    _common(g)

    w = sub.add_parser("dwt", help="finest-scale Haar coefficients as q,w CSV")
    w.add_argument("--in", dest="input", help="input CSV with header t,value")
    _common(w)

    p = sub.add_parser("periodogram", help="periodogram ordinates as k,lambda,ordinate,converged")
    p.add_argument("--in", dest="input", help="series CSV (t,value) or coefficient CSV (q,w)")
    p.add_argument("--kind", choices=PERIODOGRAM_KINDS, default="ordinary")
    p.add_argument("--m", type=int, help="number of Fourier frequencies")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="LAD tolerance")
    p.add_argument("--solver", choices=SOLVERS, default="simplex", help="LAD solver")
    p.add_argument("--demean", action="store_true", help="remove the mean (ordinary kind)")
    _common(p)

    e = sub.add_parser("estimate", help="estimate d from a series CSV; prints JSON")
    e.add_argument("--in", dest="input", help="input CSV with header t,value")
    e.add_argument("--method", choices=METHODS, default="nkk")
    bw = e.add_mutually_exclusive_group()
    bw.add_argument("--m", type=int, help="bandwidth")
    bw.add_argument("--m-exp", type=float, help="bandwidth as [n^m_exp]")
    e.add_argument("--tol", type=float, default=DEFAULT_TOL)
    e.add_argument("--solver", choices=SOLVERS, default="simplex")
    e.add_argument("--demean", action="store_true", help="remove the mean (gph)")
    e.add_argument("--json", action="store_true", help="JSON output (the default format)")
    _common(e)

    s = sub.add_parser("sweep", help="Monte Carlo MSE sweep over the bandwidth grid")
    s.add_argument("--n", type=int, default=1024)
    s.add_argument("--d", type=float, default=0.2)
    s.add_argument("--phi", type=float, default=0.4)
    s.add_argument("--sigma-eps2", type=float, default=0.37)
    s.add_argument("--generator-d", type=float, default=None,
                   help="simulate with this d while measuring error against --d")
    _sweep_common(s)

    r = sub.add_parser("reproduce", help="sweep with a preset figure configuration (1, 2 or 3)")
    r.add_argument("--figure", type=int, choices=sorted(FIGURES), required=False)
    _sweep_common(r)
    return parser


def _sweep_common(p):
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--lo-exp", type=float, default=0.3)
    p.add_argument("--hi-exp", type=float, default=0.8)
    p.add_argument("--methods", type=_methods, default=list(METHODS))
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--workers", type=int, default=1)
    _common(p, out_help="output directory")


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.config:
        try:
            data = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config file {ns.config}: {exc}", "--config")
        if not isinstance(data, dict):
            raise ValidationError("config file must hold a JSON object", "--config")
        sp = _subparser(parser, ns.command)
        dests = {a.dest for a in sp._actions} - {"help", "config"}
        defaults = {}
        for key, value in data.items():
            dest = {"in": "input"}.get(key, key.replace("-", "_"))
            if dest not in dests:
                raise ValidationError(f"unknown config key {key!r}", "--config")
            defaults[dest] = value
        sp.set_defaults(**defaults)
        ns = parser.parse_args(argv)
    return ns


def _require(ns, dest, flag):
    if getattr(ns, dest, None) is None:
        raise ValidationError("required flag is missing", flag)


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Header and the value column (second column) of a two-column CSV."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}", "--in")
    if not rows:
        raise ValidationError(f"{path} is empty", "--in")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2:
        raise ValidationError(f"{path}: expected a two-column header such as t,value", "--in")
    try:
        values = np.array([float(row[1]) for row in rows[1:] if row], dtype=float)
    except (ValueError, IndexError) as exc:
        raise ValidationError(f"{path}: malformed numeric row ({exc})", "--in")
    return header, values


def _write_rows(out, header, rows):
    if out in (None, "-"):
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return
    try:
        with open(out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc.strerror}") from exc


def _write_meta(out, effective):
    if out in (None, "-"):
        return
    Path(str(out) + ".json").write_text(json.dumps(effective, indent=2) + "\n")


def effective_config(ns) -> dict:
    return {k: v for k, v in vars(ns).items() if k not in ("quiet",)} | {"version": __version__}


def _cmd_generate(ns):
    _require(ns, "n", "--n")
    cfg = GenConfig(n=ns.n, d=ns.d, phi=ns.phi, sigma_eps2=ns.sigma_eps2, sigma=ns.sigma,
                    seed=ns.seed, burn_in=ns.burn_in, noise=ns.noise, df=ns.df)
    if ns.model == "fractional":
        series = fractional_noise(cfg.d, cfg.n, cfg.seed)
    elif ns.model == "arfima":
        series = arfima_1_d_0(cfg)
    elif ns.model == "lmsv":
        series = lmsv_series(cfg)
    else:
        series = log_squared(lmsv_series(cfg))
    _write_rows(ns.out, ("t", "value"),
                ((t, repr(float(v))) for t, v in enumerate(series.values, start=1)))
    _write_meta(ns.out, effective_config(ns))


def _cmd_dwt(ns):
    _require(ns, "input", "--in")
    _, values = read_csv(ns.input)
    w = haar_dwt_finest(TimeSeries(values))
    _write_rows(ns.out, ("q", "w"), ((q, repr(float(c))) for q, c in enumerate(w.coeffs)))
    _write_meta(ns.out, effective_config(ns))


def _cmd_periodogram(ns):
    _require(ns, "input", "--in")
    _require(ns, "m", "--m")
    header, values = read_csv(ns.input)
    if ns.kind == "ordinary":
        pg = ordinary_periodogram(TimeSeries(values), ns.m, demean=ns.demean)
    else:
        # a q,w file already holds coefficients; anything else is a series
        if header[:2] == ["q", "w"]:
            w = WaveletCoefficients.from_array(values)
        else:
            w = haar_dwt_finest(TimeSeries(values))
        if ns.kind == "wavelet-ols":
            pg = wavelet_ols_periodogram(w, ns.m)
        else:
            pg = nkk_periodogram(w, ns.m, ns.tol, ns.solver)
    _write_rows(ns.out, ("k", "lambda", "ordinate", "converged"),
                ((k, repr(float(lam)), repr(float(o)), int(c))
                 for k, lam, o, c in zip(pg.k, pg.freqs, pg.ordinates, pg.converged)))
    _write_meta(ns.out, effective_config(ns))


def _cmd_estimate(ns):
    _require(ns, "input", "--in")
    _, values = read_csv(ns.input)
    series = TimeSeries(values)
    if ns.m is None and ns.m_exp is None:
        raise ValidationError("one of --m or --m-exp is required", "--m")
    m = ns.m if ns.m is not None else bandwidth_from_exponent(series.n, ns.m_exp)
    kwargs = {}
    if ns.method == "gph":
        kwargs["demean"] = ns.demean
    elif ns.method == "nkk":
        kwargs["solver"] = ns.solver
    est = estimate(series, ns.method, m, ns.tol, **kwargs)
    payload = est.to_dict() | {"config": effective_config(ns)}
    text = json.dumps(payload, indent=2)
    if ns.out:
        Path(ns.out).write_text(text + "\n")
    print(text)


def summarize(res: SweepResult) -> str:
    """Fixed-width table: one row per m, MSE/bias/variance for each method."""
    if not res.cells:
        raise ValidationError("cannot summarize an empty sweep result")
    methods = [m for m in METHOD_ORDER if m in res.config.methods]
    ms = sorted({c.m for c in res.cells})
    head = f"{'m':>5}" + "".join(
        f" | {meth.upper() + ' MSE':>12} {'bias':>10} {'variance':>10}" for meth in methods)
    lines = [head, "-" * len(head)]
    for m in ms:
        parts = [f"{m:>5}"]
        for meth in methods:
            c = res.cell(meth, m)
            parts.append(f" | {c.mse:>12.6f} {c.bias:>10.5f} {c.variance:>10.6f}")
        lines.append("".join(parts))
    return "\n".join(lines)


def _run_sweep(ns, cfg: SweepConfig):
    if ns.workers < 1:
        raise ValidationError("--workers must be >= 1", "--workers")
    out = ns.out or f"sweep-n{cfg.n}-d{cfg.d}-phi{cfg.phi}-seed{cfg.base_seed}"
    res = run_sweep(cfg, workers=ns.workers)
    export_results(res, out, extra_config=effective_config(ns))
    if not ns.quiet:
        print(summarize(res))
        print(f"results written to {out}", file=sys.stderr)


def _sweep_config(ns, **base) -> SweepConfig:
    return SweepConfig(reps=ns.reps, lo_exp=ns.lo_exp, hi_exp=ns.hi_exp, methods=ns.methods,
                       base_seed=ns.seed, tol=ns.tol, **base)


def _cmd_sweep(ns):
    cfg = _sweep_config(ns, n=ns.n, d=ns.d, phi=ns.phi, sigma_eps2=ns.sigma_eps2,
                        generator_d=ns.generator_d)
    _run_sweep(ns, cfg)


def _cmd_reproduce(ns):
    _require(ns, "figure", "--figure")
    if ns.figure not in FIGURES:
        raise ValidationError(f"--figure must be one of {sorted(FIGURES)}", "--figure")
    _run_sweep(ns, _sweep_config(ns, **FIGURES[ns.figure]))


COMMANDS = {"generate": _cmd_generate, "dwt": _cmd_dwt, "periodogram": _cmd_periodogram,
            "estimate": _cmd_estimate, "sweep": _cmd_sweep, "reproduce": _cmd_reproduce}

_FIELD_FLAGS = {"n": "--n", "d": "--d", "phi": "--phi", "sigma_eps2": "--sigma-eps2",
                "sigma": "--sigma", "m": "--m", "k": "--m", "reps": "--reps",
                "lo_exp": "--lo-exp", "hi_exp": "--hi-exp", "methods": "--methods",
                "tol": "--tol", "m_exp": "--m-exp", "values": "--in", "burn_in": "--burn-in",
                "df": "--df", "noise": "--noise", "figure": "--figure", "method": "--method"}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        ns = parse_args(argv)
        COMMANDS[ns.command](ns)
        return 0
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except ValidationError as exc:
        flag = exc.field if exc.field and exc.field.startswith("-") else _FIELD_FLAGS.get(exc.field)
        prefix = f"error: {flag}: " if flag else "error: "
        print(prefix + str(exc), file=sys.stderr)
        return 1
    except (EstimationError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # parsing must never crash with a traceback
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

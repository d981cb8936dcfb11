"""Command-line interface.

Subcommands expose every evaluation route and a self-check suite.  All output
is deterministic for a fixed argument list: floats are rendered with repr
(shortest round-trip), JSON keys are sorted, and no timestamps or machine
identifiers appear.  Error paths print exactly one diagnostic line to stderr
and exit 2; suite failures exit 1.

The default seed comes from --seed, else the ALTZETA_SEED environment
variable, else a fixed constant.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from dataclasses import dataclass, field
from typing import Sequence

from . import __version__
from ._backend import backend_name
from ._mc import MCEstimate, SamplerConfig
from .errors import AltzetaError

DEFAULT_SEED = 12345
DEFAULT_SAMPLES = 100_000

_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_RE_COMPLEX = re.compile(rf"^\s*([+-]?{_NUM})\s*(?:([+-])\s*({_NUM})\s*[ij])?\s*$")
_RE_IMAG = re.compile(rf"^\s*([+-]?{_NUM})\s*[ij]\s*$")


def parse_s(text: str) -> complex:
    """Accept RE, RE+IMi, RE-IMi, or IMi."""
    m = _RE_COMPLEX.match(text)
    if m:
        re_part = float(m.group(1))
        im_part = float(m.group(3)) if m.group(3) is not None else 0.0
        if m.group(2) == "-":
            im_part = -im_part
        return complex(re_part, im_part)
    m = _RE_IMAG.match(text)
    if m:
        return complex(0.0, float(m.group(1)))
    raise ValueError(f"cannot parse s value {text!r} (expected forms: 1.5, 0.5+14.1i, 2i)")


def parse_levels(text: str) -> list[int]:
    """N list: 'a,b,c', 'start:stop[:step]', or 'start:stop:x2' (doubling)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"bad range {text!r}")
        start, stop = int(parts[0]), int(parts[1])
        step = parts[2] if len(parts) == 3 else "1"
        out = []
        n = start
        if step.startswith("x"):
            factor = int(step[1:])
            if factor < 2 or start < 1:
                raise ValueError(f"bad multiplicative step in {text!r}")
            while n <= stop:
                out.append(n)
                n *= factor
        else:
            inc = int(step)
            if inc < 1:
                raise ValueError(f"bad step in {text!r}")
            while n <= stop:
                out.append(n)
                n += inc
        if not out:
            raise ValueError(f"empty range {text!r}")
        return out
    return [int(p) for p in text.split(",") if p.strip()]


def parse_grid(text: str) -> tuple[float, ...]:
    return tuple(float(p) for p in text.split(",") if p.strip())


@dataclass
class RunConfig:
    """Everything a command run depends on; output is a pure function of this."""

    command: str
    fmt: str = "text"
    s: complex = complex(1.0)
    s_given: bool = False
    N: int = 8
    levels: list[int] = field(default_factory=list)
    method: str = "all"
    samples: int = DEFAULT_SAMPLES
    samples_given: bool = False
    seed: int = DEFAULT_SEED
    burn_in: int = 256
    thinning: int = 1
    chunk: int = 2048
    workers: int = 1
    tolerance: float = 1.0
    x: int = 0
    grid: tuple[float, ...] = ()
    ensemble: str = "jacobi"
    a: float = 1.0
    b: float = 1.0
    theta: float = 1.0
    scope: str = "all"

    def sampler(self) -> SamplerConfig:
        return SamplerConfig(
            seed=self.seed, burn_in=self.burn_in, thinning=self.thinning, chunk=self.chunk
        )


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _add_common(p: argparse.ArgumentParser, mc: bool = False):
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    if mc:
        p.add_argument("--samples", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--burn-in", type=int, default=256)
        p.add_argument("--thinning", type=int, default=1)
        p.add_argument("--chunk", type=int, default=2048)
        p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="altzeta", description=__doc__.splitlines()[0])
    top.add_argument("--version", action="version", version=f"altzeta {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eta", help="evaluate the level-N alternating series")
    p.add_argument("--s", required=True)
    p.add_argument("--N", type=int, default=8)
    p.add_argument(
        "--method",
        choices=("series", "determinant", "tridiag", "contfrac", "mc", "all"),
        default="all",
    )
    _add_common(p, mc=True)

    p = sub.add_parser("convergence", help="level sweep against the reference value")
    p.add_argument("--s", required=True)
    p.add_argument("--N-range", dest="nrange", default="4:64:x2")
    p.add_argument("--method", choices=("series", "determinant", "tridiag", "contfrac"),
                   default="series")
    _add_common(p)

    p = sub.add_parser("mc", help="sampled estimate of the level-N series")
    p.add_argument("--s", required=True)
    p.add_argument("--N", type=int, default=8)
    _add_common(p, mc=True)

    p = sub.add_parser("psi", help="fixed-point moments: closed form and sampled")
    p.add_argument("--s", required=True)
    p.add_argument("--N", type=int, default=8)
    p.add_argument("--x", type=int, default=1)
    _add_common(p, mc=True)

    p = sub.add_parser("ratio", help="generalized Vandermonde ratio on a grid")
    p.add_argument("--s", required=True)
    p.add_argument("--u", default=None, help="comma-separated grid; default squares for --N")
    p.add_argument("--N", type=int, default=4)
    _add_common(p, mc=True)

    p = sub.add_parser("ensemble", help="ensemble-averaged ratio: closed and sampled")
    p.add_argument("--s", required=True)
    p.add_argument("--ensemble", choices=("jacobi", "laguerre"), default="jacobi")
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--a", type=float, default=3.0)
    p.add_argument("--b", type=float, default=2.0)
    p.add_argument("--theta", type=float, default=1.0)
    _add_common(p, mc=True)

    p = sub.add_parser("selberg-check", help="normalization closed forms vs quadrature")
    p.add_argument("--s", default=None)
    p.add_argument("--ensemble", choices=("jacobi", "laguerre"), default="jacobi")
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=1.0)
    _add_common(p)

    p = sub.add_parser("suite", help="run the invariant batteries")
    p.add_argument(
        "--scope",
        choices=("exact", "determinants", "sampling", "ensembles", "all"),
        default="all",
    )
    p.add_argument("--tolerance", type=float, default=1.0)
    _add_common(p, mc=True)

    return top


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("ALTZETA_SEED")
    if env:
        return int(env)
    return DEFAULT_SEED


def config_from_args(args) -> RunConfig:
    cfg = RunConfig(command=args.command, fmt=args.format)
    if hasattr(args, "s") and args.s is not None:
        cfg.s = parse_s(args.s)
        cfg.s_given = True
    for name in ("N", "x", "a", "b", "theta", "ensemble", "method", "scope",
                 "burn_in", "thinning", "chunk", "workers"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    if getattr(args, "samples", None) is not None:
        cfg.samples = int(args.samples)
        cfg.samples_given = True
    if hasattr(args, "seed"):
        cfg.seed = _resolve_seed(args)
    if getattr(args, "tolerance", None) is not None:
        cfg.tolerance = args.tolerance
    if getattr(args, "nrange", None):
        cfg.levels = parse_levels(args.nrange)
    if getattr(args, "u", None):
        cfg.grid = parse_grid(args.u)
    return cfg


# ---------------------------------------------------------------------------
# rendering


def _flat(value):
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, complex):
        raise TypeError("split complex values into _re/_im before rendering")
    if isinstance(value, float):
        return value
    return value


def put_complex(row: dict, key: str, z: complex):
    row[f"{key}_re"] = float(z.real)
    row[f"{key}_im"] = float(z.imag)


def _fmt_scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, default=_flat) + "\n"
    rows = report["results"]
    columns = report["columns"]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt_scalar(row.get(c)) for c in columns])
        return buf.getvalue()
    lines = [f"# altzeta {report['command']}"]
    for key in sorted(report["params"]):
        lines.append(f"# {key} = {_fmt_scalar(report['params'][key])}")
    for row in rows:
        parts = [f"{c}={_fmt_scalar(row.get(c))}" for c in columns if c in row]
        lines.append("  ".join(parts))
    for key in sorted(report["diagnostics"]):
        lines.append(f"## {key} = {_fmt_scalar(report['diagnostics'][key])}")
    return "\n".join(lines) + "\n"


def _params_dict(cfg: RunConfig, *names: str) -> dict:
    out = {}
    for n in names:
        v = getattr(cfg, n)
        if n == "s":
            out["s_re"], out["s_im"] = cfg.s.real, cfg.s.imag
        elif n == "grid":
            out["u"] = ",".join(repr(g) for g in cfg.grid)
        else:
            out[n] = v
    return out


# ---------------------------------------------------------------------------
# commands


def _estimate_row(row: dict, est: MCEstimate) -> dict:
    put_complex(row, "value", est.mean)
    row["std_error"] = est.std_error
    row["n_samples"] = est.n_samples
    return row


def cmd_eta(cfg: RunConfig) -> dict:
    from . import determinants as det
    from . import eta_core, sampling

    methods = (
        ["series", "determinant", "tridiag", "contfrac"]
        if cfg.method == "all"
        else [cfg.method]
    )
    rows = []
    diagnostics = {}
    for m in methods:
        row = {"method": m, "N": cfg.N}
        if m == "series":
            res = eta_core.eta_series(cfg.s, cfg.N)
            put_complex(row, "value", res.value)
        elif m == "determinant":
            res = det.eta_det(cfg.s, cfg.N)
            put_complex(row, "value", res.value)
            row["growth_factor"] = res.meta["growth_factor"]
            row["condition_estimate"] = res.meta["condition_estimate"]
            row["ill_conditioned"] = res.meta["ill_conditioned"]
        elif m == "tridiag":
            put_complex(row, "value", det.eta_tridiag(cfg.s, cfg.N).value)
        elif m == "contfrac":
            put_complex(row, "value", det.eta_contfrac(cfg.s, cfg.N).value)
        else:
            est = sampling.eta_mc(cfg.s, cfg.N, cfg.sampler(), cfg.samples, cfg.workers)
            _estimate_row(row, est)
            row["seed"] = est.seed
            diagnostics["backend"] = backend_name()
        rows.append(row)
    columns = ["method", "N", "value_re", "value_im", "std_error", "n_samples", "seed",
               "growth_factor", "condition_estimate", "ill_conditioned"]
    return {
        "command": "eta",
        "params": _params_dict(cfg, "s", "N", "method"),
        "columns": columns,
        "results": rows,
        "diagnostics": diagnostics,
    }


def cmd_convergence(cfg: RunConfig) -> dict:
    from . import determinants as det
    from . import eta_core

    ref = eta_core.eta_reference(cfg.s)
    evaluator = {
        "series": lambda s, n: eta_core.eta_series(s, n).value,
        "determinant": lambda s, n: det.eta_det(s, n).value,
        "tridiag": lambda s, n: det.eta_tridiag(s, n).value,
        "contfrac": lambda s, n: det.eta_contfrac(s, n).value,
    }[cfg.method]
    rows = []
    prev_err = None
    monotone = True
    for n in cfg.levels:
        val = evaluator(cfg.s, n)
        err = abs(val - ref)
        row = {"N": n}
        put_complex(row, "value", val)
        row["abs_error"] = err
        row["error_ratio"] = (prev_err / err) if (prev_err and err > 0) else None
        if prev_err is not None and err > prev_err * (1.0 + 1e-9):
            monotone = False
        prev_err = err
        rows.append(row)
    diagnostics = {
        "reference_re": ref.real,
        "reference_im": ref.imag,
        "monotone_decreasing": monotone,
    }
    return {
        "command": "convergence",
        "params": _params_dict(cfg, "s", "method") | {"N_range": ",".join(map(str, cfg.levels))},
        "columns": ["N", "value_re", "value_im", "abs_error", "error_ratio"],
        "results": rows,
        "diagnostics": diagnostics,
    }


def cmd_mc(cfg: RunConfig) -> dict:
    from . import eta_core, sampling

    est = sampling.eta_mc(cfg.s, cfg.N, cfg.sampler(), cfg.samples, cfg.workers)
    exact = eta_core.eta_series(cfg.s, cfg.N).value
    row = _estimate_row({"N": cfg.N, "seed": est.seed}, est)
    put_complex(row, "series", exact)
    row["abs_gap"] = abs(est.mean - exact)
    return {
        "command": "mc",
        "params": _params_dict(cfg, "s", "N", "seed", "samples", "burn_in", "thinning", "chunk"),
        "columns": ["N", "value_re", "value_im", "std_error", "n_samples", "seed",
                    "series_re", "series_im", "abs_gap"],
        "results": [row],
        "diagnostics": {"backend": backend_name()},
    }


def cmd_psi(cfg: RunConfig) -> dict:
    from . import eta_core, sampling

    rows = []
    row = {"x": cfg.x, "N": cfg.N}
    if cfg.x >= 1:
        put_complex(row, "closed", sampling.psi_closed(cfg.x, cfg.N, cfg.s))
    else:
        put_complex(row, "closed", eta_core.eta_reference(cfg.s))
    if cfg.samples > 0:
        est = sampling.psi_mc(cfg.x, cfg.N, cfg.s, cfg.sampler(), cfg.samples, cfg.workers)
        _estimate_row(row, est)
        row["seed"] = est.seed
    rows.append(row)
    return {
        "command": "psi",
        "params": _params_dict(cfg, "s", "N", "x", "seed", "samples"),
        "columns": ["x", "N", "closed_re", "closed_im", "value_re", "value_im",
                    "std_error", "n_samples", "seed"],
        "results": rows,
        "diagnostics": {"backend": backend_name(),
                        "closed_is_reference_limit": cfg.x == 0},
    }


def cmd_ratio(cfg: RunConfig) -> dict:
    from . import determinants as det
    from . import sampling

    grid = cfg.grid if cfg.grid else det.squares_grid(cfg.N).u
    alt = det.alternating_sum(cfg.s, grid)
    ratio = det.gen_vandermonde_ratio(cfg.s, grid)
    row = {"n_nodes": len(grid)}
    put_complex(row, "expansion", alt)
    put_complex(row, "det_ratio", ratio)
    row["route_gap"] = abs(alt - ratio)
    rows = [row]
    diagnostics = {}
    if cfg.samples > 0:
        est = sampling.ratio_mc(grid, cfg.s, cfg.sampler(), cfg.samples, cfg.workers)
        _estimate_row(row, est)
        row["seed"] = est.seed
        diagnostics["backend"] = backend_name()
    return {
        "command": "ratio",
        "params": _params_dict(cfg, "s", "grid", "seed", "samples"),
        "columns": ["n_nodes", "expansion_re", "expansion_im", "det_ratio_re",
                    "det_ratio_im", "route_gap", "value_re", "value_im", "std_error",
                    "n_samples", "seed"],
        "results": rows,
        "diagnostics": diagnostics,
    }


def _spec_from_cfg(cfg: RunConfig):
    from .ensembles import EnsembleSpec

    if cfg.ensemble == "jacobi":
        return EnsembleSpec.jacobi(cfg.N, cfg.a, cfg.b)
    return EnsembleSpec.laguerre(cfg.N, cfg.a, cfg.theta)


def cmd_ensemble(cfg: RunConfig) -> dict:
    from . import ensembles as en

    spec = _spec_from_cfg(cfg)
    closed = en.avg_ratio_closed(spec, cfg.s)
    row = {"ensemble": cfg.ensemble, "N": cfg.N}
    put_complex(row, "closed", closed)
    diagnostics = {"backend": backend_name()}
    if cfg.samples > 0:
        r1, r2 = en.avg_ratio_mc(spec, cfg.s, cfg.sampler(), cfg.samples, cfg.workers)
        put_complex(row, "expansion_route", r1.mean)
        row["expansion_se"] = r1.std_error
        put_complex(row, "nested_route", r2.mean)
        row["nested_se"] = r2.std_error
        row["n_samples"] = r1.n_samples
        gap = abs(r1.mean - r2.mean)
        joint = (r1.std_error**2 + r2.std_error**2) ** 0.5
        row["routes_agree"] = bool(gap <= 4.0 * joint + 1e-12)
    if cfg.N <= 3:
        put_complex(row, "quadrature", en.avg_ratio_quadrature(spec, cfg.s))
    return {
        "command": "ensemble",
        "params": _params_dict(cfg, "s", "ensemble", "N", "a", "b", "theta", "seed", "samples"),
        "columns": ["ensemble", "N", "closed_re", "closed_im", "expansion_route_re",
                    "expansion_route_im", "expansion_se", "nested_route_re",
                    "nested_route_im", "nested_se", "n_samples", "routes_agree",
                    "quadrature_re", "quadrature_im"],
        "results": [row],
        "diagnostics": diagnostics,
    }


def cmd_selberg_check(cfg: RunConfig) -> dict:
    from . import ensembles as en

    spec = _spec_from_cfg(cfg)
    closed = en.selberg_value(cfg.N, cfg.a, cfg.b) if cfg.ensemble == "jacobi" else (
        en.laguerre_norm(cfg.N, cfg.a, cfg.theta)
    )
    quad_norm = en.weighted_ratio_integral_quadrature(spec, 0.0).real if cfg.N <= 3 else None
    row = {"ensemble": cfg.ensemble, "N": cfg.N, "normalization": closed,
           "normalization_quadrature": quad_norm}
    if quad_norm is not None:
        row["normalization_rel_gap"] = abs(quad_norm - closed) / closed
    if cfg.s_given and cfg.N <= 3:
        # weighted cube integral must equal normalization times the closed average
        weighted = en.weighted_ratio_integral_quadrature(spec, cfg.s)
        target = closed * en.avg_ratio_closed(spec, cfg.s)
        put_complex(row, "weighted_integral", weighted)
        put_complex(row, "closed_times_norm", target)
        row["weighted_integral_rel_gap"] = abs(weighted - target) / abs(target)
    rows = [row]
    return {
        "command": "selberg-check",
        "params": _params_dict(cfg, "ensemble", "N", "a", "b", "theta"),
        "columns": ["ensemble", "N", "normalization", "normalization_quadrature",
                    "normalization_rel_gap", "weighted_integral_re", "weighted_integral_im",
                    "closed_times_norm_re", "closed_times_norm_im", "weighted_integral_rel_gap"],
        "results": rows,
        "diagnostics": {},
    }


def cmd_suite(cfg: RunConfig) -> tuple[dict, int]:
    from .suite import run_suite

    report, failures = run_suite(cfg)
    return report, failures


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        if cfg.command == "suite":
            report, failures = cmd_suite(cfg)
            sys.stdout.write(render(report, cfg.fmt))
            return 1 if failures else 0
        handler = {
            "eta": cmd_eta,
            "convergence": cmd_convergence,
            "mc": cmd_mc,
            "psi": cmd_psi,
            "ratio": cmd_ratio,
            "ensemble": cmd_ensemble,
            "selberg-check": cmd_selberg_check,
        }[cfg.command]
        report = handler(cfg)
        sys.stdout.write(render(report, cfg.fmt))
        return 0
    except (AltzetaError, ValueError, KeyError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

"""Batch front end: JSON run configurations in, CSV/JSON tables out.

Exit codes: 0 success, 2 config error, 3 solver error, 4 trusted-range
violation.  Tables are deterministic (17-significant-digit numbers,
fixed summation order); timing lives only in the run manifest written
next to a file output.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__, assemble, spectra, traceform
from .errors import ConfigError, SolverError, TrustedRangeError
from .trigpoly import CoefficientPair, TrigPoly

COMMANDS = ("spectrum", "trace", "sweep", "contour",
            "oracle-compare", "asymptotics")
_CONFIG_FIELDS = {"command", "p", "q", "order", "boundary", "N", "M", "Q",
                  "n", "x", "x_grid", "t", "format", "output", "grids"}
_COEFF_FIELDS = {"period", "mean", "cos", "sin"}


@dataclass
class RunConfig:
    command: str
    coefficients: CoefficientPair
    order: int = 4
    boundary: str = "periodic"
    N: int = 64
    M: int = 16
    Q: int = 128
    n_list: list = field(default_factory=lambda: [4])
    x: float = 0.0
    x_grid: list = field(default_factory=lambda: [i / 16 for i in range(16)])
    t: float = 0.0
    format: str = "csv"
    output: str | None = None
    grids: list = field(default_factory=lambda: [512, 1024, 2048])


def _parse_coeff(obj, name: str) -> TrigPoly:
    if obj is None:
        return TrigPoly()
    if not isinstance(obj, dict):
        raise ConfigError("field '%s' must be an object" % name)
    unknown = set(obj) - _COEFF_FIELDS
    if unknown:
        raise ConfigError("unknown field '%s.%s'" % (name, sorted(unknown)[0]))
    try:
        return TrigPoly(period=float(obj.get("period", 1.0)),
                        mean=float(obj.get("mean", 0.0)),
                        cos_coeffs=np.asarray(obj.get("cos", []), dtype=float),
                        sin_coeffs=np.asarray(obj.get("sin", []), dtype=float))
    except (TypeError, ValueError) as exc:
        raise ConfigError("invalid coefficients in '%s': %s" % (name, exc))


def _pos_int(doc, key, default):
    v = doc.get(key, default)
    if not isinstance(v, int) or isinstance(v, bool) or v <= 0:
        raise ConfigError("field '%s' must be a positive integer" % key)
    return v


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a JSON run configuration."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("malformed config: %s (line %d)" % (exc.msg, exc.lineno))
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _CONFIG_FIELDS
    if unknown:
        raise ConfigError("unknown field '%s'" % sorted(unknown)[0])
    command = doc.get("command")
    if command not in COMMANDS:
        raise ConfigError("field 'command' must be one of %s" % (COMMANDS,))
    p = _parse_coeff(doc.get("p"), "p")
    q = _parse_coeff(doc.get("q"), "q")
    try:
        cp = CoefficientPair(p, q)
    except ValueError as exc:
        raise ConfigError(str(exc))

    order = doc.get("order", 4)
    if order not in (2, 4):
        raise ConfigError("field 'order' must be 2 or 4")
    boundary = doc.get("boundary", "periodic")
    if boundary not in ("periodic", "dirichlet"):
        raise ConfigError("field 'boundary' must be 'periodic' or 'dirichlet'")
    N = _pos_int(doc, "N", 64)
    M = _pos_int(doc, "M", min(24, N // 4))
    Q = _pos_int(doc, "Q", 128)
    if M > N // 4:
        raise TrustedRangeError("M exceeds N/4")
    n_raw = doc.get("n", 4)
    n_list = n_raw if isinstance(n_raw, list) else [n_raw]
    for ni in n_list:
        if not isinstance(ni, int) or isinstance(ni, bool) or ni <= 0:
            raise ConfigError("field 'n' must hold positive integers")
    fmt = doc.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("field 'format' must be 'csv' or 'json'")
    grids = doc.get("grids", [512, 1024, 2048])
    if (not isinstance(grids, list) or len(grids) < 2
            or any(not isinstance(g, int) or g <= 0 for g in grids)):
        raise ConfigError("field 'grids' must be a list of positive integers")
    x_grid = doc.get("x_grid", [i / 16 for i in range(16)])
    if not isinstance(x_grid, list) or not x_grid:
        raise ConfigError("field 'x_grid' must be a nonempty array")
    try:
        x = float(doc.get("x", 0.0))
        t = float(doc.get("t", 0.0))
        x_grid = [float(v) for v in x_grid]
    except (TypeError, ValueError):
        raise ConfigError("fields 'x', 't', 'x_grid' must be numeric")
    output = doc.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("field 'output' must be a path string")
    return RunConfig(command=command, coefficients=cp, order=order,
                     boundary=boundary, N=N, M=M, Q=Q, n_list=n_list,
                     x=x, x_grid=x_grid, t=t, format=fmt, output=output,
                     grids=grids)


# ----------------------------------------------------------------------
# table builders: each returns (sections, summary) where sections is a
# list of (header, rows) and summary a flat dict for the JSON format
# ----------------------------------------------------------------------

def _g(v) -> str:
    return "%.17g" % float(v)


def _ref0(cp: CoefficientPair) -> float:
    p0, pn2 = cp.p.mean_and_norm()
    return 0.5 * (p0 ** 2 - pn2) + cp.q.mean


def _table_spectrum(cfg: RunConfig):
    cp = cfg.coefficients
    if cfg.boundary == "periodic":
        spec = spectra.periodic_spectrum(cp, cfg.order, cfg.N)
        header = ["n", "lambda_minus", "lambda_plus",
                  "asymptotic_reference", "defect"]
        ref0 = _ref0(cp) if cfg.order == 4 else cp.q.mean
        rows = [[0, spec.lambda0_plus, spec.lambda0_plus, ref0,
                 abs(spec.lambda0_plus - ref0)]]
        for n in range(1, spec.M_use + 1):
            ref = spectra.asymptotic_reference(cp, n, cfg.order)
            lm, lp = spec.pairs[n - 1]
            rows.append([n, lm, lp, ref, max(abs(lm - ref), abs(lp - ref))])
    else:
        spec = spectra.dirichlet_spectrum(cp, cfg.order, cfg.t, cfg.N)
        header = ["n", "mu", "asymptotic_reference", "defect"]
        rows = []
        for n in range(1, spec.M_use + 1):
            ref = spectra.asymptotic_reference(cp, n, cfg.order)
            rows.append([n, spec.mu[n - 1], ref, abs(spec.mu[n - 1] - ref)])
    return [(header, rows)], {}


def _trace_sections(rep: traceform.TraceReport):
    rows = [[n + 1, rep.terms[n], rep.partial_sums[n + 1]]
            for n in range(rep.M)]
    summary = {"target": rep.target,
               "partial_sum": float(rep.partial_sums[-1]),
               "extrapolated": rep.extrapolated,
               "residual_raw": rep.residual_raw,
               "residual_extrapolated": rep.residual_extrapolated}
    sections = [(["n", "d_n", "partial_sum"], rows),
                (list(summary), [list(summary.values())])]
    return sections, summary


def _table_trace(cfg: RunConfig):
    cp = cfg.coefficients
    if cfg.order == 4:
        rep = traceform.fourth_trace(cp, cfg.x, cfg.M, cfg.N)
    else:
        rep = traceform.second_trace(cp.q, cfg.x, cfg.M, cfg.N)
    return _trace_sections(rep)


def _table_sweep(cfg: RunConfig):
    sw = traceform.sweep_trace(cfg.coefficients, cfg.x_grid, cfg.M, cfg.N)
    rows = [[r.x, r.target, float(r.partial_sums[-1]), r.extrapolated,
             r.residual_raw, r.residual_extrapolated] for r in sw.reports]
    summary = {"grid_average": sw.grid_average,
               "grid_average_target": sw.grid_average_target,
               "grid_average_deviation":
                   abs(sw.grid_average - sw.grid_average_target)}
    sections = [(["x", "target", "partial_sum", "extrapolated",
                  "residual_raw", "residual_extrapolated"], rows),
                (list(summary), [list(summary.values())])]
    return sections, summary


def _table_contour(cfg: RunConfig):
    rows = []
    for n in cfg.n_list:
        res = traceform.contour_functional(cfg.coefficients, n, cfg.Q, cfg.N)
        rows.append([res.n, res.radius, res.value.real, res.value.imag,
                     res.target])
    return [(["n", "radius", "re_value", "im_value", "target"], rows)], {}


def _table_oracle(cfg: RunConfig):
    cp = cfg.coefficients
    problem = ("fourth_" if cfg.order == 4 else "second_") + cfg.boundary
    if cfg.boundary == "periodic":
        if cfg.order == 4:
            mat = assemble.fourth_periodic(cp, cfg.t, cfg.N)
        else:
            mat = assemble.second_periodic(cp.q, cfg.t, cfg.N)
    else:
        if cfg.order == 4:
            mat = assemble.fourth_dirichlet(cp, cfg.t, cfg.N)
        else:
            mat = assemble.second_dirichlet(cp.q, cfg.t, cfg.N)
    k = 10
    gal = spectra.eigensolve(mat)[:k]
    fd = assemble.richardson_lowest(cp, cfg.t, problem, cfg.grids, k=k + 6)[:k]
    rows = [[n + 1, gal[n], fd[n], abs(gal[n] - fd[n]) / (1.0 + abs(fd[n]))]
            for n in range(k)]
    return [(["n", "galerkin", "fd_extrapolated", "rel_diff"], rows)], {}


def _table_asymptotics(cfg: RunConfig):
    cp = cfg.coefficients
    per = spectra.asymptotic_defect(
        spectra.periodic_spectrum(cp, cfg.order, cfg.N), cp)
    dir_ = spectra.asymptotic_defect(
        spectra.dirichlet_spectrum(cp, cfg.order, cfg.t, cfg.N), cp)
    rows = []
    for (n, avg, worst), (_, dmu) in zip(per, dir_):
        rows.append([n, avg, worst, dmu, dmu * n * n])
    header = ["n", "periodic_defect_avg", "periodic_defect_max",
              "dirichlet_defect", "dirichlet_defect_times_n2"]
    return [(header, rows)], {}


_TABLES = {"spectrum": _table_spectrum, "trace": _table_trace,
           "sweep": _table_sweep, "contour": _table_contour,
           "oracle-compare": _table_oracle, "asymptotics": _table_asymptotics}


def _render_csv(sections) -> str:
    lines = []
    for header, rows in sections:
        lines.append(",".join(header))
        for row in rows:
            lines.append(",".join(
                str(v) if isinstance(v, (int, str)) else _g(v) for v in row))
    return "\n".join(lines) + "\n"


def _render_json(cfg: RunConfig, sections, summary) -> str:
    tables = [{"columns": header,
               "rows": [[v if isinstance(v, (int, str)) else float(v)
                         for v in row] for row in rows]}
              for header, rows in sections]
    doc = {"command": cfg.command, "tables": tables}
    if summary:
        doc["summary"] = {k: float(v) for k, v in summary.items()}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def run(cfg: RunConfig) -> int:
    """Execute a validated configuration; write table and manifest."""
    t0 = time.perf_counter()
    sections, summary = _TABLES[cfg.command](cfg)
    elapsed = time.perf_counter() - t0
    if cfg.format == "csv":
        text = _render_csv(sections)
    else:
        text = _render_json(cfg, sections, summary)
    if cfg.output is None or cfg.output == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.output, "w") as fh:
            fh.write(text)
        manifest = {
            "version": __version__,
            "command": cfg.command,
            "parameters": {
                "order": cfg.order, "boundary": cfg.boundary,
                "N": cfg.N, "M": cfg.M, "Q": cfg.Q, "n": cfg.n_list,
                "x": cfg.x, "t": cfg.t, "x_grid": cfg.x_grid,
                "grids": cfg.grids, "format": cfg.format,
                "p": {"mean": cfg.coefficients.p.mean,
                      "cos": list(cfg.coefficients.p.cos_coeffs),
                      "sin": list(cfg.coefficients.p.sin_coeffs)},
                "q": {"mean": cfg.coefficients.q.mean,
                      "cos": list(cfg.coefficients.q.cos_coeffs),
                      "sin": list(cfg.coefficients.q.sin_coeffs)},
            },
            "timing_seconds": elapsed,
        }
        with open(cfg.output + ".manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="speclab",
        description="Spectra and trace formulas of periodic second- and "
                    "fourth-order operators.")
    parser.add_argument("--config", required=True, help="path to JSON config")
    parser.add_argument("--command", choices=COMMANDS,
                        help="override the command in the config")
    parser.add_argument("--output", help="override the output path")
    parser.add_argument("--format", choices=("csv", "json"),
                        help="override the output format")
    parser.add_argument("--seed", type=int, default=0,
                        help="reserved; the pipeline is deterministic")
    args = parser.parse_args(argv)
    try:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError("cannot read config: %s" % exc)
        cfg = parse_config(text)
        if args.command:
            cfg.command = args.command
        if args.output:
            cfg.output = args.output
        if args.format:
            cfg.format = args.format
        return run(cfg)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except TrustedRangeError as exc:
        print("trusted-range violation: %s" % exc, file=sys.stderr)
        return 4
    except (SolverError, ValueError) as exc:
        print("solver error: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Command-line experiment runner.

Each subcommand writes one table, as CSV (with ``#`` metadata lines) or as a
JSON object ``{"metadata": ..., "rows": [...]}``.  Files are written to a
temporary sibling and renamed into place, so a target path never holds a
partial result.

Exit codes: 0 success, 1 invalid configuration, 2 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .config import SEED_ENV, ConfigError, ExperimentConfig, default_workers
from .linalg import cholesky_log_det
from .moments import (
    asymptotic_logdet_mean,
    exact_log_mean_det,
    exact_log_var_det,
    exact_mean_root,
    moment_report,
    var_root,
)
from .sampler import ModelParams, RngStream, sample_batch, sample_matrix_batch
from .specfun import reg_inc_beta
from .stats import clt_transform, ks_one_sample, normality_check
from .vine import build_dvine, log_det_from_partials, matrix_to_partials, partials_to_matrix

# Reported centre and spread of the scaled log-determinant at d = 300..500.
REFERENCE_Z_MEAN = 1.69
REFERENCE_Z_SD = 1.34
REFERENCE_BAND = 0.5

# Offset for the stream that draws the synthetic normal reference batches.
_NORMAL_STREAM = 2**40

DEFAULT_GRIDS = {
    "converge": (10, 100, 1000, 10000),
    "clt": (300, 400, 500),
    "validate": tuple(range(3, 16)),
}


class Table:
    def __init__(self, columns):
        self.columns = list(columns)
        self.rows = []
        self.notes = []

    def add(self, **row):
        self.rows.append([row.get(c) for c in self.columns])


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "" if v is None else str(v)


def _json_value(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def render(table: Table, metadata: dict, fmt: str) -> str:
    if fmt == "json":
        doc = {
            "metadata": metadata,
            "notes": table.notes,
            "rows": [{c: _json_value(v) for c, v in zip(table.columns, row)} for row in table.rows],
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    for key, value in metadata.items():
        buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
    for note in table.notes:
        buf.write(f"# note: {note}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and ``os.replace``."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".randcorr-", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


# -- subcommands -------------------------------------------------------------

def cmd_sample_matrix(cfg: ExperimentConfig, args) -> Table:
    R = sample_matrix_batch(cfg)
    d = cfg.d
    iu = np.triu_indices(d, 1)
    entries = R[:, iu[0], iu[1]]
    if args.bins:
        counts, edges = np.histogram(entries.ravel(), bins=args.bins, range=(-1.0, 1.0))
        table = Table(["bin_lo", "bin_hi", "count"])
        for lo, hi, c in zip(edges[:-1], edges[1:], counts):
            table.add(bin_lo=lo, bin_hi=hi, count=int(c))
        return table
    cols = [f"r_{i}_{j}" for i, j in zip(*iu)]
    table = Table(["index", *cols])
    for k, row in enumerate(entries):
        table.add(index=k, **dict(zip(cols, row)))
    return table


def cmd_sample_det(cfg: ExperimentConfig, args) -> Table:
    y = sample_batch(cfg)
    table = Table(["index", "log_det"])
    for k, v in enumerate(y):
        table.add(index=k, log_det=v)
    return table


def cmd_moments(cfg: ExperimentConfig, args) -> Table:
    table = None
    for d in cfg.grid:
        flat = moment_report(d, cfg.eta).as_flat_dict()
        flat["exact_mean"] = math.exp(flat["exact_log_mean"])
        flat["exact_variance"] = math.exp(flat["exact_variance_log_scale"])
        if cfg.eta == 1.0:
            corrected = flat["approx_variance_log_scale_corrected"]
            flat["approx_variance_rel_err_corrected"] = math.expm1(corrected - flat["exact_variance_log_scale"])
            flat["asymptotic_logdet_mean_published"] = asymptotic_logdet_mean(d)
            flat["asymptotic_logdet_mean_gap_per_d"] = (asymptotic_logdet_mean(d) - flat["logdet_mean"]) / d
        flat["log_mean_minus_logdet_mean_per_d"] = (flat["exact_log_mean"] - flat["logdet_mean"]) / d
        if table is None:
            table = Table(flat.keys())
        table.add(**flat)
    return table


def cmd_converge(cfg: ExperimentConfig, args) -> Table:
    table = Table(["d", "eta", "mean_root", "var_root", "mean_det_dth_root",
                   "var_det_dth_root", "abs_err_vs_inv_e"])
    for d in cfg.grid:
        m = exact_mean_root(d, 1, cfg.eta)
        table.add(
            d=d,
            eta=cfg.eta,
            mean_root=m,
            var_root=var_root(d, cfg.eta),
            mean_det_dth_root=math.exp(exact_log_mean_det(d, cfg.eta) / d),
            var_det_dth_root=math.exp(exact_log_var_det(d, cfg.eta) / d),
            abs_err_vs_inv_e=abs(m - math.exp(-1.0)),
        )
    return table


def clt_experiment(cfg: ExperimentConfig):
    """Per-dimension and pooled summaries of the scaled log-determinant.

    Returns a list of ``(label, SummaryStats, KsResult)``.
    """
    results = []
    pooled = []
    for d in cfg.grid:
        run = ExperimentConfig(**{**cfg.to_dict(), "d": d, "d_grid": ()})
        z = clt_transform(sample_batch(run), d)
        pooled.append(z)
        s, ks = normality_check(z, RngStream(cfg.seed, _NORMAL_STREAM + d))
        results.append((d, s, ks))
    if len(pooled) > 1:
        z = np.concatenate(pooled)
        s, ks = normality_check(z, RngStream(cfg.seed, _NORMAL_STREAM))
        results.append(("pooled", s, ks))
    return results


def cmd_clt(cfg: ExperimentConfig, args) -> Table:
    table = Table(["d", "n", "seed", "z_mean", "z_sd", "ks_stat", "ks_p"])
    for label, s, ks in clt_experiment(cfg):
        table.add(d=label, n=s.n, seed=cfg.seed, z_mean=s.mean, z_sd=s.sd,
                  ks_stat=ks.statistic, ks_p=ks.p_value)
        off = (abs(s.mean - REFERENCE_Z_MEAN) > REFERENCE_BAND
               or abs(s.sd - REFERENCE_Z_SD) > REFERENCE_BAND)
        if off:
            table.notes.append(
                f"d={label}: z_mean={s.mean:.4f}, z_sd={s.sd:.4f} outside "
                f"{REFERENCE_Z_MEAN}+/-{REFERENCE_BAND}, {REFERENCE_Z_SD}+/-{REFERENCE_BAND}")
    table.notes.append(f"reference values: z_mean={REFERENCE_Z_MEAN}, z_sd={REFERENCE_Z_SD}")
    return table


def cmd_marginals(cfg: ExperimentConfig, args) -> Table:
    R = sample_matrix_batch(cfg)
    d = cfg.d
    shape = ModelParams(d, cfg.eta, cfg.extrapolated).eta - 1.0 + d / 2.0
    table = Table(["i", "j", "shape", "ks_stat", "ks_p"])
    for i, j in zip(*np.triu_indices(d, 1)):
        res = ks_one_sample(R[:, i, j], lambda r: reg_inc_beta((r + 1.0) / 2.0, shape, shape))
        table.add(i=int(i), j=int(j), shape=shape, ks_stat=res.statistic, ks_p=res.p_value)
    return table


def cmd_validate(cfg: ExperimentConfig, args) -> Table:
    table = Table(["d", "n", "max_abs_logdet_diff", "max_roundtrip_err", "pass"])
    for d in cfg.grid:
        run = ExperimentConfig(**{**cfg.to_dict(), "d": d, "d_grid": ()})
        R = sample_matrix_batch(run)
        spec = build_dvine(d)
        P = matrix_to_partials(spec, R)
        diff = float(np.max(np.abs(log_det_from_partials(P) - cholesky_log_det(R))))
        rt = float(np.max(np.abs(partials_to_matrix(spec, P) - R)))
        table.add(d=d, n=run.n, max_abs_logdet_diff=diff, max_roundtrip_err=rt,
                  **{"pass": diff <= 1e-10})
    return table


COMMANDS = {
    "sample-matrix": (cmd_sample_matrix, "sample correlation matrices (entries or an entry histogram)"),
    "sample-det": (cmd_sample_det, "sample log-determinants along one pathway"),
    "moments": (cmd_moments, "exact and approximate moments over a d-grid"),
    "converge": (cmd_converge, "d-th root convergence diagnostics over a d-grid"),
    "clt": (cmd_clt, "scaled log-determinant normality experiment"),
    "marginals": (cmd_marginals, "KS check of each entry against its symmetric Beta law"),
    "validate": (cmd_validate, "vine log-det versus Cholesky log-det"),
}

_N_DEFAULTS = {"validate": 1000, "marginals": 10000}


def _grid(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad d-grid {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="randcorr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="flat JSON file of defaults (flags override it)")
        p.add_argument("--d", type=int)
        p.add_argument("--d-grid", type=_grid, dest="d_grid")
        p.add_argument("--eta", type=float)
        p.add_argument("--n", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--output", "-o")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--extrapolated", action="store_true", default=None,
                       help="allow 0 < eta < 1")
        if name == "sample-det":
            p.add_argument("--pathway", choices=("direct", "double", "matrix"))
        if name == "sample-matrix":
            p.add_argument("--bins", type=int, default=0, help="emit a histogram of entries")
    return parser


def resolve_config(args) -> ExperimentConfig:
    """Flags override the config file, which overrides the environment and defaults."""
    values = {}
    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None:
        try:
            values["seed"] = int(env_seed)
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env_seed!r}") from exc
    if args.command in DEFAULT_GRIDS:
        values["d_grid"] = DEFAULT_GRIDS[args.command]
    if args.command in _N_DEFAULTS:
        values["n"] = _N_DEFAULTS[args.command]
    if args.config:
        values.update(ExperimentConfig.from_json(args.config))
    for key in ("d", "d_grid", "eta", "n", "seed", "workers", "output", "format",
                "extrapolated", "pathway"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    # an explicit single d replaces a default grid
    if getattr(args, "d", None) is not None and getattr(args, "d_grid", None) is None:
        values["d_grid"] = ()
    values.setdefault("workers", default_workers())
    return ExperimentConfig(**values)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; those are configuration errors here
        return 0 if exc.code in (0, None) else 1
    try:
        cfg = resolve_config(args)
        table = COMMANDS[args.command][0](cfg, args)
    except (ConfigError, ValueError) as exc:
        print(f"randcorr: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"randcorr: I/O error: {exc}", file=sys.stderr)
        return 2

    config = cfg.to_dict()
    if args.command == "sample-matrix":
        config["bins"] = args.bins
    metadata = {"command": args.command, "version": __version__, "config": config}
    text = render(table, metadata, cfg.format)
    for note in table.notes:
        print(f"randcorr: {note}", file=sys.stderr)
    try:
        if cfg.output:
            write_atomic(cfg.output, text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"randcorr: I/O error: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

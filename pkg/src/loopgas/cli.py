"""Command-line driver: one JSON config, reproducible experiment artifacts.

Subcommands cover the norm report, convergence diagnostics, the bound-check
tables, the partition function by all three methods, the geometric
coefficients, the finite-size fit, and parameter sweeps.  Every run writes a
`run.json` manifest (resolved config, config hash, seed, versions) beside its
outputs, and a manifest can be passed back as the config to reproduce the run.

Exit codes: 0 success, 1 configuration or validation error, 2 when --strict
is set and a bound check failed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import platform
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

import loopgas
from loopgas.cluster import (
    assumption3_check,
    assumption4_check,
    log_partition_cluster,
    partition_direct,
    prop1_decay_check,
    prop3_check,
)
from loopgas.geometry import (
    Box,
    coeff_A0,
    corner_coefficient,
    fit_csv_rows,
    fit_geometric,
    remainder_bound_check,
)
from loopgas.loops import static_loop
from loopgas.model import ModelParams, Potential, ValidationError, convergence_diagnostics
from loopgas.oracle import log_partition_ed
from loopgas.pathint import CheckRow, SeriesEstimate, Truncation, lemma1_check, lemma2_check, write_check_csv

_CONFIG_KEYS = {"model", "truncation", "geometry", "output"}
_MODEL_KEYS = {"d", "beta", "z", "l", "pi", "psi"}
_TRUNC_KEYS = {"j_max", "n_max", "r_max", "cluster_n_max", "samples", "seed"}
_GEOM_KEYS = {"extents", "R"}
_OUTPUT_KEYS = {"dir"}

DEFAULT_TRUNCATION = {
    "j_max": 3,
    "n_max": 12,
    "r_max": 8,
    "cluster_n_max": 4,
    "samples": 20000,
    "seed": 0,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description: model, truncation, geometry, output."""

    raw: dict
    params: ModelParams
    trunc: Truncation
    extents: tuple[int, ...]
    R_list: tuple[float, ...]
    out_dir: Path


def _require_keys(block: dict, allowed: set, label: str) -> None:
    unknown = set(block) - allowed
    if unknown:
        raise ValidationError(f"unknown {label} keys: {sorted(unknown)}")


def _as_complex(val) -> complex:
    if isinstance(val, (int, float)):
        return complex(val)
    if isinstance(val, (list, tuple)) and len(val) == 2:
        return complex(float(val[0]), float(val[1]))
    raise ValidationError(f"expected number or [re, im] pair, got {val!r}")


def load_config(path: str, overrides: list[str]) -> ExperimentConfig:
    with open(path) as f:
        doc = json.load(f)
    if "config" in doc and "config_hash" in doc:
        # a run.json manifest: reuse its resolved config verbatim
        doc = doc["config"]
    for item in overrides:
        if "=" not in item:
            raise ValidationError(f"override {item!r} is not KEY.PATH=VALUE")
        key, _, text = item.partition("=")
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        node = doc
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
        node[parts[-1]] = value
    return _validate(doc)


def _validate(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ValidationError("config must be a JSON object")
    _require_keys(doc, _CONFIG_KEYS, "config")
    model = doc.get("model")
    if model is None:
        raise ValidationError("config requires a model block")
    _require_keys(model, _MODEL_KEYS, "model")
    for k in ("d", "beta", "z", "l"):
        if k not in model:
            raise ValidationError(f"model block requires {k!r}")
    d = int(model["d"])
    pi = Potential.from_entries(model.get("pi", []), "transverse", d)
    psi = Potential.from_entries(model.get("psi", []), "longitudinal", d)
    params = ModelParams(
        d=d,
        beta=float(model["beta"]),
        z=_as_complex(model["z"]),
        pi=pi,
        psi=psi,
        l=float(model["l"]),
    )
    tr_block = dict(DEFAULT_TRUNCATION)
    tr_in = doc.get("truncation", {})
    _require_keys(tr_in, _TRUNC_KEYS, "truncation")
    tr_block.update(tr_in)
    trunc = Truncation(**{k: int(v) for k, v in tr_block.items()})
    geom = doc.get("geometry", {"extents": [1] * d, "R": []})
    _require_keys(geom, _GEOM_KEYS, "geometry")
    extents = tuple(int(a) for a in geom.get("extents", [1] * d))
    if len(extents) != d:
        raise ValidationError("geometry extents must have one entry per dimension")
    R_list = tuple(float(R) for R in geom.get("R", []))
    output = doc.get("output", {})
    _require_keys(output, _OUTPUT_KEYS, "output")
    out_dir = Path(output.get("dir", "out"))
    return ExperimentConfig(doc, params, trunc, extents, R_list, out_dir)


def config_hash(doc: dict) -> str:
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(canon).hexdigest()


def write_manifest(cfg: ExperimentConfig, subcommand: str, outputs: list[str]) -> Path:
    manifest = {
        "subcommand": subcommand,
        "config": cfg.raw,
        "config_hash": config_hash(cfg.raw),
        "seed": cfg.trunc.seed,
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "loopgas": loopgas.__version__,
        },
        "outputs": outputs,
    }
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / "run.json"
    with open(path, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def _estimate_record(est: SeriesEstimate, **extra) -> dict:
    rec = {
        "value_re": est.value.real if isinstance(est.value, complex) else float(est.value),
        "value_im": est.value.imag if isinstance(est.value, complex) else 0.0,
        "stat_error": est.stat_error,
        "tail_bound": est.tail_bound,
    }
    rec.update(extra)
    return rec


def _json_line(f, rec: dict) -> None:
    f.write(json.dumps(rec, sort_keys=True))
    f.write("\n")


def _box(cfg: ExperimentConfig, R: float) -> Box:
    return Box(cfg.extents, scale=R)


def _lnz_estimate(cfg: ExperimentConfig, method: str, R: float, threads: int) -> SeriesEstimate:
    box = _box(cfg, R)
    if method == "ed":
        val = log_partition_ed(box.sites(), cfg.params)
        return SeriesEstimate(val, 0.0, 0.0, meta={"backend": "ed"})
    if method == "direct":
        est = partition_direct(box, cfg.params, cfg.trunc, threads=threads, stream=f"direct/R{R}")
        val = est.value
        if not isinstance(val, complex):
            val = complex(val)
        if val.real <= 0:
            raise ValidationError("direct partition estimate not positive; cannot take log")
        lnz = math.log(abs(val))
        rel = est.stat_error / abs(val)
        rel_tail = est.tail_bound / abs(val) if math.isfinite(est.tail_bound) else math.inf
        return SeriesEstimate(lnz, rel, rel_tail, meta=est.meta)
    if method == "cluster":
        return log_partition_cluster(box, cfg.params, cfg.trunc, threads=threads, stream=f"cluster/R{R}")
    raise ValidationError(f"unknown lnz method {method!r}")


def cmd_norms(cfg: ExperimentConfig, args) -> int:
    n = cfg.params.norms
    rec = {
        "M": n.M,
        "M0_re": n.M0.real,
        "M0_im": n.M0.imag,
        "Ml": n.Ml,
        "psi_norm": n.psi_norm,
        "psi_l_norm": n.psi_l_norm,
    }
    print(json.dumps(rec, sort_keys=True))
    write_manifest(cfg, "norms", [])
    return 0


def cmd_diagnostics(cfg: ExperimentConfig, args) -> int:
    diag = convergence_diagnostics(cfg.params)
    print(json.dumps(diag.as_dict(), sort_keys=True))
    write_manifest(cfg, "diagnostics", [])
    return 0


def _check_rows(cfg: ExperimentConfig, name: str) -> list[CheckRow]:
    params, trunc = cfg.params, cfg.trunc
    if name == "lemma1":
        return [row for j in (1, 2, 3) for row in lemma1_check(j, params, trunc)]
    if name == "lemma2":
        return [
            row
            for j in (1, 2, 3)
            for R in (0.0, 1.0, 2.0, 3.0)
            for row in lemma2_check(j, R, params, trunc)
        ]
    if name == "assumption3":
        return [assumption3_check(static_loop((0,) * params.d, 1, params.beta), params, trunc)]
    if name == "assumption4":
        X = static_loop((0,) * params.d, 1, params.beta)
        return [assumption4_check(X, 0.0, r, params, trunc) for r in (1.0, 2.0, 4.0)]
    if name == "prop3":
        return [prop3_check(static_loop((0,) * params.d, 1, params.beta), params, trunc)]
    if name == "prop1":
        return prop1_decay_check([1.0, 2.0, 4.0, 8.0], params, trunc)
    if name == "remainder":
        grid = cfg.R_list or (2.0, 4.0, 8.0, 16.0)
        return remainder_bound_check(grid, params, trunc, Box(cfg.extents, scale=1))
    raise ValidationError(f"unknown check {name!r}")


def cmd_check(cfg: ExperimentConfig, args) -> int:
    rows = _check_rows(cfg, args.name)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    out = cfg.out_dir / f"check_{args.name}.csv"
    with open(out, "w", newline="") as f:
        write_check_csv(rows, f)
    write_manifest(cfg, f"check {args.name}", [str(out)])
    failed = [r for r in rows if not r.passed]
    for r in rows:
        tag = "pass" if r.passed else "FAIL"
        print(f"{r.check} j={r.j} R={r.R}: {tag}")
    if failed and args.strict:
        return 2
    return 0


def cmd_lnz(cfg: ExperimentConfig, args) -> int:
    if not cfg.R_list:
        raise ValidationError("geometry.R must be non-empty for lnz")
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    out = cfg.out_dir / f"lnz_{args.method}.csv"
    with open(out, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["R", "sites", "lnz_re", "lnz_im", "stat_error", "tail_bound"])
        for R in cfg.R_list:
            est = _lnz_estimate(cfg, args.method, R, args.threads)
            val = complex(est.value)
            w.writerow([repr(R), _box(cfg, R).site_count(), repr(val.real), repr(val.imag), repr(est.stat_error), repr(est.tail_bound)])
            print(f"R={R}: lnZ = {val.real!r} +- {est.stat_error!r} (tail {est.tail_bound!r})")
    write_manifest(cfg, f"lnz --method {args.method}", [str(out)])
    return 0


def cmd_coeffs(cfg: ExperimentConfig, args) -> int:
    if args.order == 0:
        est = coeff_A0(cfg.params, cfg.trunc)
    else:
        est = corner_coefficient(args.order, cfg.params, cfg.trunc, corrected=not args.uncorrected)
    rec = _estimate_record(est, order=args.order)
    print(json.dumps(rec, sort_keys=True))
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    out = cfg.out_dir / f"coeff_A{args.order}.json"
    with open(out, "w") as f:
        _json_line(f, rec)
    write_manifest(cfg, f"coeffs --order {args.order}", [str(out)])
    return 0


def cmd_fit(cfg: ExperimentConfig, args) -> int:
    if len(set(cfg.R_list)) < cfg.params.d + 2:
        raise ValidationError("geometry.R needs at least d + 2 distinct values for fit")
    data = []
    for R in cfg.R_list:
        est = _lnz_estimate(cfg, args.method, R, args.threads)
        err = max(est.stat_error, 1e-10)
        data.append((R, complex(est.value).real, err))
    fit = fit_geometric(data, Box(cfg.extents, scale=1), site_count_basis=not args.raw_basis)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    out = cfg.out_dir / "fit.csv"
    with open(out, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["name", "value", "stderr"])
        for name, v, e in zip(fit.names, fit.values, fit.errors):
            w.writerow([name, repr(v), repr(e)])
            print(f"{name}: {v!r} +- {e!r}")
    plot = cfg.out_dir / "fit_plotdata.csv"
    with open(plot, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["R", "lnz", "prediction", "residual"])
        for row in fit_csv_rows(fit, data):
            w.writerow([repr(x) for x in row])
    write_manifest(cfg, f"fit --method {args.method}", [str(out), str(plot)])
    return 0


def cmd_sweep(cfg: ExperimentConfig, args) -> int:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    out = cfg.out_dir / f"sweep_{args.var}.jsonl"
    with open(out, "w") as f:
        if args.var == "z":
            if not args.values:
                raise ValidationError("sweep --var z requires --values")
            for zv in args.values.split(","):
                doc = json.loads(json.dumps(cfg.raw))
                doc["model"]["z"] = float(zv)
                sub = _validate(doc)
                diag = convergence_diagnostics(sub.params)
                rec = {"z": float(zv), "diagnostics": diag.as_dict()}
                if sub.R_list:
                    est = _lnz_estimate(sub, args.method, sub.R_list[0], args.threads)
                    rec.update(_estimate_record(est, R=sub.R_list[0]))
                _json_line(f, rec)
                print(json.dumps(rec, sort_keys=True))
        elif args.var == "R":
            if not cfg.R_list:
                raise ValidationError("sweep --var R requires geometry.R")
            for R in cfg.R_list:
                est = _lnz_estimate(cfg, args.method, R, args.threads)
                rec = _estimate_record(est, R=R, sites=_box(cfg, R).site_count())
                _json_line(f, rec)
                print(json.dumps(rec, sort_keys=True))
        else:
            raise ValidationError(f"unknown sweep variable {args.var!r}")
    write_manifest(cfg, f"sweep --var {args.var}", [str(out)])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loopgas", description=__doc__)
    parser.add_argument("--config", required=True, help="JSON config file (or a run.json manifest)")
    parser.add_argument("--set", action="append", default=[], metavar="KEY.PATH=VALUE",
                        help="override a config leaf, value parsed as JSON")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--strict", action="store_true",
                        help="exit 2 when a bound check fails")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("norms")
    sub.add_parser("diagnostics")
    pc = sub.add_parser("check")
    pc.add_argument("name", choices=["lemma1", "lemma2", "assumption3", "assumption4", "prop1", "prop3", "remainder"])
    pl = sub.add_parser("lnz")
    pl.add_argument("--method", choices=["ed", "direct", "cluster"], required=True)
    po = sub.add_parser("coeffs")
    po.add_argument("--order", type=int, choices=[0, 1, 2, 3], required=True)
    po.add_argument("--uncorrected", action="store_true",
                    help="pure exclusion without the boundary compensation factor")
    pf = sub.add_parser("fit")
    pf.add_argument("--method", choices=["ed", "direct", "cluster"], default="ed")
    pf.add_argument("--raw-basis", action="store_true",
                    help="fit against raw R powers instead of exact site counts")
    ps = sub.add_parser("sweep")
    ps.add_argument("--var", choices=["z", "R"], required=True)
    ps.add_argument("--values", default="", help="comma-separated values for --var z")
    ps.add_argument("--method", choices=["ed", "direct", "cluster"], default="cluster")
    return parser


_DISPATCH = {
    "norms": cmd_norms,
    "diagnostics": cmd_diagnostics,
    "check": cmd_check,
    "lnz": cmd_lnz,
    "coeffs": cmd_coeffs,
    "fit": cmd_fit,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.set)
        return _DISPATCH[args.subcommand](cfg, args)
    except (ValidationError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

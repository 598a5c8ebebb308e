"""Command-line entry point wiring configs to experiments and artifacts.

Every subcommand merges defaults, an optional JSON config file, and
explicit flags (in that precedence order), validates the merged config
against a schema before any computation, writes its artifacts under the
output directory, and prints a one-line summary per artifact. Reruns
with the same config produce byte-identical files.

Exit codes: 0 success, 1 validation or usage error, 2 resource cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

import jsonschema

from . import analysis
from .aab import depth_report, format_depth_report
from .agp import agp_coefficients, build_generator_set, residual_action
from .analysis import DECOMPOSITIONS
from .models import MODEL_KINDS, Schedule, build_model, interpolate
from .sim import METHODS, STATEVECTOR_CAP, ResourceCapError, evolve
from .synth import gamma_tally, synth_u1, synth_u3

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RESOURCE = 2

OUTPUT_DIR_ENV = "DACQC_OUTPUT_DIR"

SUBCOMMANDS = (
    "build-model",
    "agp",
    "synth",
    "depth-report",
    "error-scaling",
    "fidelity",
    "table-check",
)

_ORDERINGS = ("h_first", "cd_first")
_U3_MODES = ("flat", "nested", "nested_full")

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "model": {"enum": list(MODEL_KINDS)},
        "L": {"type": "integer", "minimum": 2},
        "l": {"type": "integer", "minimum": 0, "maximum": 3},
        "j": {"type": "number"},
        "h": {"type": "number"},
        "delta": {"type": "number"},
        "lam": {"type": "number", "minimum": 0.0, "maximum": 1.0},
        "T": {"type": ["number", "null"], "exclusiveMinimum": 0.0},
        "dt": {"type": "number", "exclusiveMinimum": 0.0},
        "M": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "integer", "minimum": 1},
        },
        "grid": {
            "type": ["array", "null"],
            "minItems": 6,
            "items": {"type": "number", "exclusiveMinimum": 0.0},
        },
        "method": {"enum": list(METHODS)},
        "ordering": {"enum": list(_ORDERINGS)},
        "u3_mode": {"enum": list(_U3_MODES)},
        "decomposition": {"enum": list(DECOMPOSITIONS)},
        "shots": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer"},
        "workers": {"type": ["integer", "null"], "minimum": 1},
        "include_l3": {"type": "boolean"},
        "reference": {"type": "boolean"},
        "caps": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"statevector": {"type": "integer", "minimum": 1}},
        },
    },
}

DEFAULTS = {
    "model": "ising",
    "L": 3,
    "l": 1,
    "j": 1.0,
    "h": 1.0,
    "delta": 0.5,
    "lam": 0.5,
    "T": None,  # resolved to 1/|j| after the merge
    "dt": 0.01,
    "M": [10],
    "grid": None,
    "method": "aab",
    "ordering": "h_first",
    "u3_mode": "nested",
    "decomposition": "u1",
    "shots": 0,
    "seed": 7,
    "workers": None,
    "include_l3": False,
    "reference": False,
    "caps": {},
}


class _Parser(argparse.ArgumentParser):
    """Argparse that reports usage problems on exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_VALIDATION)


def _parse_grid(text: str) -> List[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValueError(f"bad --grid value {text!r}: {exc}") from None


def build_parser() -> _Parser:
    parser = _Parser(prog="dacqc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)
    sub.required = True

    def common(p: _Parser, *names: str) -> None:
        p.add_argument("--config", help="JSON config file merged below explicit flags")
        p.add_argument("--out", help=f"output directory (default ${OUTPUT_DIR_ENV} or cwd)")
        p.add_argument("--json", action="store_true", help="machine-readable stdout")
        if "model" in names:
            p.add_argument("--model", choices=list(MODEL_KINDS))
            p.add_argument("--L", type=int)
            p.add_argument("--J", dest="j", type=float)
            p.add_argument("--h", type=float)
            p.add_argument("--delta", type=float)
            p.add_argument("--seed", type=int)
        if "lam" in names:
            p.add_argument("--lambda", dest="lam", type=float)
        if "order" in names:
            p.add_argument("--l", dest="l", type=int)

    p = sub.add_parser("build-model", help="construct a model and dump its terms")
    common(p, "model")

    p = sub.add_parser("agp", help="variational drive coefficients at one point")
    common(p, "model", "lam", "order")

    p = sub.add_parser("synth", help="group-commutator factor list for one drive step")
    common(p, "order")
    p.add_argument("--dt", type=float)
    p.add_argument("--u3-mode", dest="u3_mode", choices=list(_U3_MODES))

    p = sub.add_parser("depth-report", help="per-weight term counts and block counts")
    common(p, "model", "order")
    p.add_argument("--include-l3", dest="include_l3", action="store_true", default=None)

    p = sub.add_parser("error-scaling", help="step-error sweep over a dt grid with fits")
    common(p, "model", "lam")
    p.add_argument("--decomp", dest="decomposition", choices=list(DECOMPOSITIONS))
    p.add_argument("--grid", type=_parse_grid, help="comma-separated dt values")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("fidelity", help="evolve and record fidelity curves")
    common(p, "model", "order")
    p.add_argument("--method", choices=list(METHODS))
    p.add_argument("--M", action="append", type=int, help="steps; repeat for several runs")
    p.add_argument("--T", type=float)
    p.add_argument("--ordering", choices=list(_ORDERINGS))
    p.add_argument("--u3-mode", dest="u3_mode", choices=list(_U3_MODES))
    p.add_argument("--shots", type=int)
    p.add_argument("--reference", action="store_true", default=None,
                   help="also write a converged reference curve")

    p = sub.add_parser("table-check", help="validate resource tables against references")
    common(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--include-l3", dest="include_l3", action="store_true", default=None)

    return parser


def merge_config(args: argparse.Namespace) -> dict:
    """defaults < config file < explicit flags; validated before use."""
    config = dict(DEFAULTS)
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        jsonschema.validate(file_cfg, CONFIG_SCHEMA)
        config.update(file_cfg)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            config[key] = val
    jsonschema.validate({k: v for k, v in config.items() if v is not None or k in ("T", "grid")},
                        CONFIG_SCHEMA)
    return config


def _outdir(args: argparse.Namespace) -> str:
    out = getattr(args, "out", None) or os.environ.get(OUTPUT_DIR_ENV) or "."
    os.makedirs(out, exist_ok=True)
    return out


def _model_from(config: dict):
    model = build_model(
        config["model"], config["L"], j=config["j"], h=config["h"],
        delta=config["delta"], seed=config["seed"],
    )
    cap = config.get("caps", {}).get("statevector", STATEVECTOR_CAP)
    if model.n_qubits > cap:
        raise ResourceCapError(
            f"{model.n_qubits} qubits exceed the statevector cap of {cap}"
        )
    return model


def _emit(args: argparse.Namespace, result: dict, lines: List[str]) -> None:
    if getattr(args, "json", False):
        print(json.dumps(result, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _manifest_config(config: dict, keys: List[str]) -> dict:
    return {k: config[k] for k in keys}


# -- subcommands ---------------------------------------------------------


def _cmd_build_model(args: argparse.Namespace) -> int:
    config = merge_config(args)
    model = _model_from(config)
    obj = {
        "kind": model.kind,
        "L": config["L"],
        "n_qubits": model.n_qubits,
        "j": model.j,
        "h": model.h,
        "delta": model.delta,
        "seed": model.seed,
        "couplings": list(model.couplings),
        "site_fields": list(model.site_fields) if model.site_fields else None,
        "h0": model.h0.to_json_obj(),
        "h1": model.h1.to_json_obj(),
    }
    path = os.path.join(_outdir(args), f"model_{model.kind}_L{config['L']}.json")
    _write_json(path, obj)
    _emit(args, {"artifact": path, "model": obj}, [
        f"wrote {path} ({model.kind} {config['L']}x{config['L']}, "
        f"{model.n_qubits} qubits, {model.h1.num_terms} problem terms)"
    ])
    return EXIT_OK


def _cmd_agp(args: argparse.Namespace) -> int:
    config = merge_config(args)
    model = _model_from(config)
    h, dh = interpolate(model, config["lam"])
    gen_set = build_generator_set(h, dh, config["l"])
    res = agp_coefficients(gen_set=gen_set)
    action = residual_action(gen_set, res.alphas)
    obj = {
        "model": model.kind,
        "L": config["L"],
        "lambda": config["lam"],
        "order": config["l"],
        "alphas": [float(a) for a in res.alphas],
        "residual_action": float(action),
        "solver": res.solver,
    }
    path = os.path.join(
        _outdir(args),
        f"agp_{model.kind}_L{config['L']}_l{config['l']}_lam{config['lam']:g}.json",
    )
    _write_json(path, obj)
    alphas = ", ".join(f"{a:.6g}" for a in obj["alphas"])
    _emit(args, {"artifact": path, "agp": obj}, [
        f"wrote {path} (alphas=[{alphas}], residual action={action:.6g})"
    ])
    return EXIT_OK


def _cmd_synth(args: argparse.Namespace) -> int:
    config = merge_config(args)
    order, dt = config["l"], config["dt"]
    if order == 1:
        factors = synth_u1(dt)
    elif order == 2:
        factors = synth_u3(dt, mode=config["u3_mode"])
    else:
        raise ValueError("synth emits drive steps for l = 1 or 2")
    tally = gamma_tally(factors)
    obj = {
        "order": order,
        "dt": dt,
        "u3_mode": config["u3_mode"] if order == 2 else None,
        "factors": [
            {
                "kind": f.kind,
                "name": f.name,
                "scale": [f.scale.real, f.scale.imag],
                "tag": f.tag,
            }
            for f in factors
        ],
        "gamma": {k: int(v) for k, v in sorted(tally.items())},
    }
    mode_part = f"_{config['u3_mode']}" if order == 2 else ""
    path = os.path.join(_outdir(args), f"synth_l{order}{mode_part}_dt{dt:g}.json")
    _write_json(path, obj)
    gamma = ", ".join(f"{k}:{v}" for k, v in obj["gamma"].items())
    _emit(args, {"artifact": path, "synth": obj}, [
        f"wrote {path} ({len(factors)} factors, gamma {gamma})"
    ])
    return EXIT_OK


def _cmd_depth_report(args: argparse.Namespace) -> int:
    config = merge_config(args)
    report = depth_report(
        config["model"], config["l"], config["L"],
        compute_l3=config["include_l3"], seed=config["seed"],
    )
    obj = report.to_json_obj()
    path = os.path.join(
        _outdir(args), f"depth_report_{config['model']}_L{config['L']}_l{config['l']}.json"
    )
    _write_json(path, obj)
    lines = [format_depth_report(report), f"wrote {path} (AABs={report.aab_count_computed})"]
    _emit(args, {"artifact": path, "report": obj}, lines)
    return EXIT_OK


def _cmd_error_scaling(args: argparse.Namespace) -> int:
    config = merge_config(args)
    model = _model_from(config)
    fit = analysis.error_scaling(
        model, config["decomposition"], lam=config["lam"],
        dts=config["grid"], workers=config["workers"],
    )
    out = _outdir(args)
    stem = f"scaling_{model.kind}_{config['decomposition']}"
    csv_path = os.path.join(out, stem + ".csv")
    manifest_path = os.path.join(out, stem + ".manifest.json")
    analysis.scaling_to_csv(fit, csv_path)
    summary = analysis.fit_summary(fit)
    mconfig = _manifest_config(
        config, ["model", "L", "j", "h", "delta", "lam", "decomposition", "seed"]
    )
    mconfig["grid"] = [float(x) for x in fit.dts]
    analysis.write_manifest(
        manifest_path, "error-scaling", mconfig, config["seed"],
        fits=[summary], artifacts={"curve": os.path.basename(csv_path)},
    )
    if fit.exact:
        headline = "exact to numerical precision; no fit"
    elif fit.nu is not None:
        headline = f"nu={fit.nu:.4f} (b={fit.b:.4g})"
        if fit.nu_effective is not None:
            headline += f", effective nu={fit.nu_effective:.4f}"
        if fit.breakdown_dt is not None:
            headline += f", breakdown above dt={fit.breakdown_dt:g}"
    elif fit.nu_effective is not None:
        headline = f"no asymptotic window; effective nu={fit.nu_effective:.4f}"
    else:
        headline = "no power-law window on this grid"
    _emit(args, {"artifacts": [csv_path, manifest_path], "fit": summary}, [
        f"wrote {csv_path} ({fit.dts.size} points)",
        f"wrote {manifest_path}",
        f"error-scaling {model.kind} {config['decomposition']}: {headline}",
    ])
    return EXIT_OK


def _cmd_fidelity(args: argparse.Namespace) -> int:
    config = merge_config(args)
    model = _model_from(config)
    total_time = config["T"] if config["T"] is not None else 1.0 / abs(model.j)
    cap = config.get("caps", {}).get("statevector", STATEVECTOR_CAP)
    out = _outdir(args)
    stem = f"fidelity_{model.kind}_l{config['l']}_{config['method']}"
    artifacts = {}
    lines = []
    finals = {}
    for m in config["M"]:
        result = evolve(
            model, Schedule(total_time, m), config["method"], order=config["l"],
            ordering=config["ordering"], u3_mode=config["u3_mode"],
            shots=config["shots"] or None, seed=config["seed"], vec_cap=cap,
        )
        path = os.path.join(out, f"{stem}_M{m}.csv")
        result.to_csv(path)
        artifacts[f"M{m}"] = os.path.basename(path)
        finals[str(m)] = result.fidelities[-1]
        lines.append(f"wrote {path} (final fidelity {result.fidelities[-1]:.6f})")
    if config["reference"] or len(config["M"]) > 1:
        ref = analysis.converged_reference(model, config["l"], total_time=total_time)
        path = os.path.join(out, f"{stem}_reference.csv")
        ref.to_csv(path)
        artifacts["reference"] = os.path.basename(path)
        finals["reference"] = ref.fidelities[-1]
        lines.append(f"wrote {path} (converged reference, {ref.metadata['steps']} steps)")
    manifest_path = os.path.join(out, stem + ".manifest.json")
    mconfig = _manifest_config(
        config, ["model", "L", "j", "h", "delta", "l", "method", "ordering",
                 "u3_mode", "M", "shots", "seed"],
    )
    mconfig["T"] = total_time
    analysis.write_manifest(manifest_path, "fidelity", mconfig, config["seed"],
                            artifacts=artifacts)
    lines.append(f"wrote {manifest_path}")
    _emit(args, {"artifacts": artifacts, "manifest": manifest_path, "final_fidelities": finals},
          lines)
    return EXIT_OK


def _cmd_table_check(args: argparse.Namespace) -> int:
    config = merge_config(args)
    reg = analysis.table_regression(include_l3=config["include_l3"], seed=config["seed"])
    obj = {
        "cells": [
            {"model": kind, "L": L, "order": order, "ok": ok}
            for (kind, L, order), ok in sorted(reg.matrix.items())
        ],
        "discrepancies": reg.discrepancies,
        "notes": reg.notes,
        "all_match": reg.all_match,
        "elapsed_s": round(reg.elapsed_s, 3),
    }
    path = os.path.join(_outdir(args), "table_check.json")
    _write_json(path, obj)
    lines = [
        f"{kind} L={L} l={order}: {'ok' if ok else 'MISMATCH'}"
        for (kind, L, order), ok in sorted(reg.matrix.items())
    ]
    lines += [f"note: {s}" for s in reg.notes]
    lines.append(f"wrote {path} (all_match={reg.all_match})")
    _emit(args, obj, lines)
    return EXIT_OK if reg.all_match else EXIT_VALIDATION


_DISPATCH = {
    "build-model": _cmd_build_model,
    "agp": _cmd_agp,
    "synth": _cmd_synth,
    "depth-report": _cmd_depth_report,
    "error-scaling": _cmd_error_scaling,
    "fidelity": _cmd_fidelity,
    "table-check": _cmd_table_check,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.subcommand](args)
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except jsonschema.ValidationError as exc:
        print(f"invalid config: {exc.message}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

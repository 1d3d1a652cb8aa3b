"""Command line front end.

Subcommands: ``catalog`` (list fixtures), ``validate`` (axiom checks),
``estimate`` (mean separations of pairs, or of synthetic profiles),
``density`` (subset densities), ``classify`` (the dichotomy report).

Configuration merges three layers: built-in defaults, an optional JSON
config file (``--config``), and individual flags. Every output embeds the
sha256 hash of the effective configuration, the seed, and the truncation
parameters, and contains no timestamps, so identical invocations produce
identical bytes.

Exit codes: 0 success, 1 usage or configuration error, 2 validation
failure, 3 inconclusive classification.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import catalog
from .classify import ClassifierConfig, dichotomy_report
from .density import density_summary, subset_indicator
from .groups import BudgetError, GroupSpecError
from .pseudometrics import (
    EstimatorConfig,
    banach_mean,
    besicovitch_mean,
    pair_summary,
    synthetic_source,
    translated_besicovitch_scan,
    weyl_mean,
)
from .rds import DTILDE_CONVENTION, DomainError, SystemSpecError, validate

SCHEMA_VERSION = "1"

_DEFAULT_DENSITY_SETS = ("evens", "odds", "squares", "dyadic-blocks", "mod:3:0")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser, suppress: bool):
    """Shared flags, accepted both before and after the subcommand.

    The subcommand copies default to SUPPRESS so they never clobber values
    already parsed at the top level."""
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", default=d, help="JSON config file merged under the flags")
    p.add_argument("--seed", type=int, default=d)
    p.add_argument("--workers", type=int, default=d)
    p.add_argument("--out", default=d, help="directory for JSON/CSV outputs")
    p.add_argument("--json", action="store_true",
                   default=argparse.SUPPRESS if suppress else False,
                   help="machine-readable stdout")
    p.add_argument("--n-max", type=int, default=d, dest="n_max")
    p.add_argument("--m-max", type=int, default=d, dest="m_max")
    p.add_argument("--radius", type=int, default=d)
    p.add_argument("--tail-fraction", type=float, default=d, dest="tail_fraction")
    p.add_argument("--tolerance", type=float, default=d)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="meanrds", description="mean separation toolkit for random dynamical systems")
    _add_common(p, suppress=False)

    sub = p.add_subparsers(dest="command", required=True)

    def command(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        _add_common(sp, suppress=True)
        return sp

    command("catalog", "list the bundled example systems")

    v = command("validate", "check the cocycle axioms of a system")
    v.add_argument("--system", required=True)
    v.add_argument("--max-word-length", type=int, default=8, dest="max_word_length")

    e = command("estimate", "mean separations of pairs or profiles")
    e.add_argument("--system", required=True,
                   help="catalog name, or synthetic:<profile> for a profile on Z")
    e.add_argument("--pair", action="append", default=None,
                   help="pair as 'x|y' with comma-separated coordinates; repeatable")
    e.add_argument("--pairs", type=int, default=3,
                   help="number of seeded random pairs when --pair is absent")

    d = command("density", "densities of subsets of Z")
    d.add_argument("--set", action="append", default=None, dest="sets",
                   help="subset spec (all, empty, evens, odds, squares, "
                        "dyadic-blocks, mod:<k>:<r,...>); repeatable")

    c = command("classify", "dichotomy report for a system")
    c.add_argument("--system", required=True)
    return p


# ---------------------------------------------------------------------------
# configuration assembly

def _load_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return data


def _effective_settings(args) -> dict:
    est = dataclasses.asdict(EstimatorConfig())
    cls = dataclasses.asdict(ClassifierConfig())
    top = {"seed": 0, "workers": 1}
    file_cfg = _load_config_file(args.config) if args.config else {}
    est.update(file_cfg.get("estimator", {}))
    cls.update(file_cfg.get("classifier", {}))
    for key in ("seed", "workers"):
        if key in file_cfg:
            top[key] = int(file_cfg[key])
    flag_map = {
        "n_max": "n_max",
        "m_max": "m_max",
        "radius": "search_radius",
        "tail_fraction": "tail_fraction",
        "tolerance": "tolerance",
    }
    for flag, field in flag_map.items():
        val = getattr(args, flag)
        if val is not None:
            est[field] = val
    if args.seed is not None:
        top["seed"] = args.seed
    if args.workers is not None:
        top["workers"] = args.workers
    for key in ("eps_list", "delta_grid", "eps_sequence"):
        if key in cls:
            cls[key] = tuple(cls[key])
    settings = {
        "estimator": EstimatorConfig(**est),
        "classifier": ClassifierConfig(**cls),
        "seed": top["seed"],
        "workers": max(1, top["workers"]),
        "system_spec": file_cfg.get("system"),
    }
    return settings


def _config_hash(command: str, settings: dict, extra: dict) -> str:
    payload = {
        "command": command,
        "estimator": dataclasses.asdict(settings["estimator"]),
        "classifier": dataclasses.asdict(settings["classifier"]),
        "seed": settings["seed"],
        **extra,
    }
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _resolve_system(name: str, settings: dict):
    spec = settings.get("system_spec")
    if spec is not None and name in ("config", spec.get("name", "custom")):
        return catalog.build_system(spec)
    return catalog.load(name)


def _envelope(command: str, settings: dict, extra_hash: dict, payload: dict) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config_hash": _config_hash(command, settings, extra_hash),
        "seed": settings["seed"],
        "estimator": dataclasses.asdict(settings["estimator"]),
        "conventions": [DTILDE_CONVENTION],
    }
    out.update(payload)
    return out


def _emit(args, envelope: dict, text: str, csv_rows=None, csv_name=None, csv_header=None):
    if args.json:
        print(json.dumps(envelope, sort_keys=True, indent=2))
    else:
        print(text)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        base = f"{envelope['command']}"
        with open(os.path.join(args.out, base + ".json"), "w", encoding="utf-8", newline="\n") as fh:
            json.dump(envelope, fh, sort_keys=True, indent=2)
            fh.write("\n")
        if csv_rows is not None:
            with open(os.path.join(args.out, csv_name), "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(csv_header)
                w.writerows(csv_rows)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return f"{v:.12g}"
    return str(v)


def _point_str(pt) -> str:
    return ";".join(f"{c:.12g}" for c in pt)


# ---------------------------------------------------------------------------
# commands

def _cmd_catalog(args, settings) -> int:
    rows = catalog.summary()
    env = _envelope("catalog", settings, {}, {"systems": rows})
    lines = ["bundled systems:"]
    for r in rows:
        lines.append(
            f"  {r['name']}: group {r['group']}, dim {r['dim']}, "
            f"base size {r['base_size']}, expected {r['expected']}"
        )
    _emit(args, env, "\n".join(lines))
    return 0


def _cmd_validate(args, settings) -> int:
    system = _resolve_system(args.system, settings)
    report = validate(system, max_word_length=args.max_word_length, seed=settings["seed"])
    env = _envelope(
        "validate",
        settings,
        {"system": args.system, "max_word_length": args.max_word_length},
        {"report": report.to_dict()},
    )
    _emit(args, env, report.to_text())
    return 0 if report.ok else 2


def _parse_pair(text: str):
    try:
        xs, ys = text.split("|")
        x = tuple(float(v) for v in xs.split(","))
        y = tuple(float(v) for v in ys.split(","))
    except ValueError:
        raise ValueError(f"malformed pair {text!r}; expected 'x1,x2|y1,y2'") from None
    if len(x) != len(y):
        raise ValueError(f"pair {text!r} mixes dimensions")
    return x, y


_ESTIMATE_HEADER = (
    "system", "pair", "x", "y", "kind", "value", "window_index", "translate",
    "tail_start", "truncation_note", "source",
)


def _cmd_estimate(args, settings) -> int:
    cfg = settings["estimator"]
    if args.system.startswith("synthetic:"):
        src = synthetic_source(args.system.split(":", 1)[1])
        ests = [
            besicovitch_mean(src, cfg),
            banach_mean(src, cfg),
            weyl_mean(src, cfg),
            translated_besicovitch_scan(src, cfg),
        ]
        rows = [
            (args.system, "", "", "", e.kind, _fmt(e.value), _fmt(e.window_index),
             _point_str(e.translate) if e.translate else "", _fmt(e.tail_start),
             e.truncation_note, e.source_label)
            for e in ests
        ]
        env = _envelope(
            "estimate", settings, {"system": args.system},
            {"system": args.system, "estimates": [e.to_dict() for e in ests]},
        )
        lines = [f"estimates for {args.system}:"]
        lines += [f"  {e.kind} = {_fmt(e.value)} (window {e.window_index})" for e in ests]
        _emit(args, env, "\n".join(lines), rows, "estimate.csv", _ESTIMATE_HEADER)
        return 0

    system = _resolve_system(args.system, settings)
    if args.pair:
        pairs = [_parse_pair(t) for t in args.pair]
    else:
        rng = np.random.default_rng(settings["seed"])
        pairs = []
        support = system.base.support
        for _ in range(args.pairs):
            idx = support[int(rng.integers(len(support)))]
            fs = system.fibers[idx]
            pairs.append((fs.sample(rng), fs.sample(rng)))
    rows = []
    pair_payload = []
    lines = [f"estimates for {args.system}:"]
    for k, (x, y) in enumerate(pairs):
        summary = pair_summary(system, x, y, cfg)
        lines.append(f"  pair {k}: x=({_point_str(x)}) y=({_point_str(y)})")
        entry = {"x": list(x), "y": list(y), "estimates": {}}
        for key, est in summary.items():
            entry["estimates"][key] = est.to_dict()
            rows.append(
                (args.system, k, _point_str(x), _point_str(y), key, _fmt(est.value),
                 _fmt(est.window_index),
                 _point_str(est.translate) if est.translate else "",
                 _fmt(est.tail_start), est.truncation_note, est.source_label)
            )
            lines.append(f"    {key} = {_fmt(est.value)}")
        pair_payload.append(entry)
    env = _envelope(
        "estimate", settings,
        {"system": args.system, "pairs": [[list(x), list(y)] for x, y in pairs]},
        {"system": args.system, "pairs": pair_payload},
    )
    _emit(args, env, "\n".join(lines), rows, "estimate.csv", _ESTIMATE_HEADER)
    return 0


_DENSITY_HEADER = (
    "set", "kind", "value", "window_index", "translate", "tail_start",
    "truncation_note",
)


def _cmd_density(args, settings) -> int:
    cfg = settings["estimator"]
    sets = args.sets or list(_DEFAULT_DENSITY_SETS)
    rows = []
    payload = []
    lines = ["densities:"]
    for spec in sets:
        ind = subset_indicator(spec)
        summary = density_summary(ind, cfg)
        entry = {"set": spec, "densities": {}}
        lines.append(f"  {spec}:")
        for key in ("banach-lower-density", "lower-density", "upper-density", "banach-upper-density"):
            est = summary[key]
            entry["densities"][key] = est.to_dict()
            rows.append(
                (spec, key, _fmt(est.value), _fmt(est.window_index),
                 _point_str(est.translate) if est.translate else "",
                 _fmt(est.tail_start), est.truncation_note)
            )
            lines.append(f"    {key} = {_fmt(est.value)}")
        payload.append(entry)
    env = _envelope("density", settings, {"sets": list(sets)}, {"sets": payload})
    _emit(args, env, "\n".join(lines), rows, "density.csv", _DENSITY_HEADER)
    return 0


_CLASSIFY_HEADER = (
    "criterion", "eps", "delta", "pairs_tested", "worst", "passed",
)


def _cmd_classify(args, settings) -> int:
    system = _resolve_system(args.system, settings)
    report = dichotomy_report(
        system,
        cfg=settings["estimator"],
        ccfg=settings["classifier"],
        seed=settings["seed"],
        workers=settings["workers"],
    )
    rows = [
        ("separation", r.eps, _fmt(r.delta), r.pairs_tested, _fmt(r.worst_value), r.passed)
        for r in report.wme.rows
    ] + [
        ("density", r.eps, _fmt(r.delta), r.pairs_tested, _fmt(r.worst_density), r.passed)
        for r in report.stability.rows
    ]
    env = _envelope(
        "classify", settings, {"system": args.system},
        {"classifier": dataclasses.asdict(settings["classifier"]),
         "report": report.to_dict()},
    )
    _emit(args, env, report.to_text(), rows, "classify.csv", _CLASSIFY_HEADER)
    return 3 if report.verdict == "inconclusive" else 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if code else 0
    try:
        settings = _effective_settings(args)
        handler = {
            "catalog": _cmd_catalog,
            "validate": _cmd_validate,
            "estimate": _cmd_estimate,
            "density": _cmd_density,
            "classify": _cmd_classify,
        }[args.command]
        return handler(args, settings)
    except (KeyError, ValueError, GroupSpecError, SystemSpecError, DomainError,
            BudgetError, OSError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"meanrds: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

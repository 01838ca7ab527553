"""Command-line entry point: ``hyperconf <command> ...``.

Exit status 0 on success, 2 on input errors, 3 when a size cap is hit.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from typing import Any

from . import io
from .core import Hyperconfusion
from .entropy import (
    capacity, fractional_max_entropy, integral_max_entropy, min_entropy, shannon_entropy,
)
from .errors import HyperconfusionError, InputError, SizeLimitError
from .formula import evaluate, medvedev_check, parse
from .heyting import is_ordinary
from .jscc import channel_instance, check_code, confuses_onto, confusion_ratio_bound
from .settings import butterfly, disjunctive_butterfly, error_tolerant_source_code, index_code, slepian_wolf
from .unconfuse import (
    coarse_refinement, optimal_ordinary_refinement, optimal_ordinary_refinement_h0,
    optimal_ordinary_refinement_hinf,
)

EXIT_OK, EXIT_INPUT, EXIT_SIZE = 0, 2, 3


class _Hyp(list):
    """Marks a list of label lists as a hyperconfusion for the text renderer."""


def hyp(x: Hyperconfusion) -> _Hyp:
    return _Hyp(x.maxs_labels())


def _entropies(x: Hyperconfusion, p) -> dict:
    return {
        "H": io.bits_value(shannon_entropy(x, p)),
        "Hinf": io.bits_value(min_entropy(x, p)),
        "H0": io.bits_value(integral_max_entropy(x, p)),
        "Heps": io.bits_value(fractional_max_entropy(x, p)),
    }


# -- commands ------------------------------------------------------------------

def cmd_eval(args, inputs) -> dict:
    f = parse(args.formula)
    space, env = io.environment_from_json(_load(args.env, inputs))
    x = evaluate(f, env, space)
    out = {"formula": str(f), "value": hyp(x), "ordinary": is_ordinary(x)}
    if args.prob:
        out.update(_entropies(x, io.prob_from_json(_load(args.prob, inputs), space)))
    return out


def cmd_entropy(args, inputs) -> dict:
    x = io.hyperconfusion_from_json(_load(args.x, inputs))
    if args.kind == "capacity":
        return {"capacity": io.bits_value(capacity(x))}
    p = io.prob_from_json(_load(args.prob, inputs), x.space)
    funcs = {"h": ("H", shannon_entropy), "hinf": ("Hinf", min_entropy), "h0": ("H0", integral_max_entropy),
             "heps": ("Heps", fractional_max_entropy)}
    if args.kind == "all":
        return _entropies(x, p)
    name, fn = funcs[args.kind]
    return {name: io.bits_value(fn(x, p))}


def cmd_unconfuse(args, inputs) -> dict:
    x = io.hyperconfusion_from_json(_load(args.x, inputs))
    p = io.prob_from_json(_load(args.prob, inputs), x.space)
    if args.floor:
        floor = io.hyperconfusion_from_json(_load(args.floor, inputs), x.space, "floor")
        y, val = coarse_refinement(x, floor, p)
        return {"refinement": hyp(y), "H": io.bits_value(val)}
    fn, name = {"h": (optimal_ordinary_refinement, "H"), "h0": (optimal_ordinary_refinement_h0, "H0"),
                "hinf": (optimal_ordinary_refinement_hinf, "Hinf")}[args.objective]
    y, val = fn(x, p)
    return {"refinement": hyp(y), name: io.bits_value(val)}


def cmd_medvedev(args, inputs) -> dict:
    f = parse(args.formula)
    v = medvedev_check(f, args.nmax)
    out: dict[str, Any] = {"formula": str(f), "valid": v.valid, "checked_up_to": v.checked_up_to,
                           "partial": v.partial}
    if v.countermodel is not None:
        out["countermodel_n"] = v.countermodel_n
        out["countermodel"] = {k: hyp(val) for k, val in sorted(v.countermodel.items())}
    if v.note:
        out["note"] = v.note
    out["report"] = v.describe()
    return out


def _pair_spec(doc):
    space = io.space_from_json(doc, "setting spec")
    p = io.prob_from_json(doc, space, "setting spec")
    x = io.hyperconfusion_from_json(io._get(doc, "X", "setting spec"), space, "X")
    return space, p, x


def cmd_setting(args, inputs) -> dict:
    doc = _load(args.spec, inputs)
    kind = args.kind
    if kind == "index":
        spec, p = io.index_spec_from_json(doc)
        r = index_code(spec, p)
        return {"requirement": str(r.formula), "message": hyp(r.message), "H": io.bits_value(r.h)}
    space, p, x = _pair_spec(doc)
    if kind == "tradeoff":
        delta = io._get(doc, "delta", "tradeoff spec")
        if isinstance(delta, bool) or not isinstance(delta, (int, float)):
            raise InputError("delta must be a number")
        r = error_tolerant_source_code(x, p, float(delta))

        def point(t):
            return {"event": space.labels_of(t.event), "message": hyp(t.message), "H": io.bits_value(t.h),
                    "neg_log_success": io.bits_value(t.neg_log_success)}
        return {"best": point(r.best), "frontier": [point(t) for t in r.frontier], "evaluated": r.evaluated}
    y = io.hyperconfusion_from_json(io._get(doc, "Y", "setting spec"), space, "Y")
    if kind == "butterfly":
        r = butterfly(x, y, p)
        out = {"message": hyp(r.message), "H": io.bits_value(r.h), "H0": io.bits_value(r.h0)}
        if r.best_ordinary is not None:
            out["best_ordinary"] = hyp(r.best_ordinary)
            out["best_ordinary_H"] = io.bits_value(r.best_ordinary_h)
        return out
    if kind == "disjunctive":
        m, h = disjunctive_butterfly(x, y, p)
        return {"message": hyp(m), "H": io.bits_value(h), "ordinary": is_ordinary(m)}
    r = slepian_wolf(x, y, p)
    return {"message": hyp(r.message), "encoder_feasible": r.encoder_feasible,
            "coarse_H": io.bits_value(r.coarse.value), "coarse_upper": io.bits_value(r.coarse.upper)}


def _onto(x, y) -> dict:
    beta = confuses_onto(x, y)
    if beta is None:
        return {"confuses_onto": False}
    return {"confuses_onto": True, "witness": io.map_to_json(beta)["images"],
            "code_check": check_code(beta, x, y)}


def cmd_jscc(args, inputs) -> dict:
    doc = _load(args.spec, inputs)
    if args.kind == "channel":
        ch = io.channel_from_json(io._get(doc, "channel", "jscc spec"))
        src = io.prob_from_json(io._get(doc, "source", "jscc spec"), what="source")
        allowed = io._list(io._get(doc, "allowed", "jscc spec"), "allowed")
        x, y = channel_instance(ch, allowed, src)
        out = {"X": _Hyp(x.maxs_labels()), "Y": _Hyp(y.maxs_labels())}
        out.update(_onto(x, y))
        return out
    x = io.hyperconfusion_from_json(io._get(doc, "source", "jscc spec"), what="source")
    y = io.hyperconfusion_from_json(io._get(doc, "target", "jscc spec"), what="target")
    if args.kind == "onto":
        return _onto(x, y)
    r = confusion_ratio_bound(x, y)
    return {"upper": io.bits_value(r.upper), "lower": io.bits_value(r.lower),
            "table": [{"n": n, "m": m, "feasible": ok} for n, m, ok in r.table]}


# -- plumbing ------------------------------------------------------------------

def _load(path: str, inputs: dict):
    try:
        with open(path, "rb") as fh:
            inputs[path] = hashlib.sha256(fh.read()).hexdigest()
    except OSError:
        pass
    return io.load_json(path)


def _render(value, prefix: str, lines: list[str]):
    if isinstance(value, dict):
        for k, v in value.items():
            _render(v, f"{prefix}.{k}" if prefix else str(k), lines)
    elif isinstance(value, _Hyp):
        lines.append(f"{prefix} = " + "{" + ", ".join("{" + ",".join(s) + "}" for s in value) + "}")
    elif isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
        for i, v in enumerate(value):
            _render(v, f"{prefix}[{i}]", lines)
    elif isinstance(value, bool):
        lines.append(f"{prefix} = {'true' if value else 'false'}")
    elif isinstance(value, float):
        lines.append(f"{prefix} = {io.format_bits(value)}")
    elif isinstance(value, list):
        lines.append(f"{prefix} = " + "{" + ",".join(map(str, value)) + "}")
    else:
        lines.append(f"{prefix} = {value}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="emit one JSON document instead of text")
    common.add_argument("--timing", action="store_true", default=argparse.SUPPRESS,
                        help="report wall-clock time on stderr")
    ap = argparse.ArgumentParser(prog="hyperconf", parents=[common],
                                 description="Hyperconfusions: Heyting operations, entropies and coding settings.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a formula over an environment")
    p.add_argument("-f", "--formula", required=True)
    p.add_argument("-e", "--env", required=True)
    p.add_argument("-p", "--prob")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("entropy", parents=[common], help="entropies of one hyperconfusion")
    p.add_argument("-x", required=True)
    p.add_argument("-p", "--prob")
    p.add_argument("--kind", choices=["h", "hinf", "h0", "heps", "capacity", "all"], default="h")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("unconfuse", parents=[common], help="best ordinary information inside a hyperconfusion")
    p.add_argument("-x", required=True)
    p.add_argument("-p", "--prob", required=True)
    p.add_argument("--objective", choices=["h", "h0", "hinf"], default="h")
    p.add_argument("--floor", help="ordinary information the refinement must contain")
    p.set_defaults(func=cmd_unconfuse)

    p = sub.add_parser("medvedev", parents=[common], help="search for a hyperconfusion countermodel")
    p.add_argument("-f", "--formula", required=True)
    p.add_argument("--nmax", type=int, default=3)
    p.set_defaults(func=cmd_medvedev)

    p = sub.add_parser("setting", parents=[common], help="solve a coding setting")
    p.add_argument("kind", choices=["butterfly", "disjunctive", "index", "sw", "tradeoff"])
    p.add_argument("spec")
    p.set_defaults(func=cmd_setting)

    p = sub.add_parser("jscc", parents=[common], help="zero-error source-channel coding")
    p.add_argument("kind", choices=["onto", "channel", "ratio"])
    p.add_argument("spec")
    p.set_defaults(func=cmd_jscc)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    as_json = getattr(args, "json", False)
    start = time.perf_counter()
    inputs: dict[str, str] = {}
    try:
        if args.command == "entropy" and args.kind != "capacity" and not args.prob:
            raise InputError("--prob is required unless --kind capacity")
        result = args.func(args, inputs)
    except SizeLimitError as exc:
        print(f"hyperconf: size limit: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (InputError, HyperconfusionError, ArithmeticError) as exc:
        print(f"hyperconf: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if as_json:
        echo = [a for a in (argv if argv is not None else sys.argv[1:]) if a not in ("--json", "--timing")]
        doc = {"command": echo, "inputs": dict(sorted(inputs.items())), "results": result}
        print(json.dumps(doc, indent=2, ensure_ascii=False))
    else:
        lines: list[str] = []
        _render(result, "", lines)
        print("\n".join(lines))
    if getattr(args, "timing", False):
        print(f"time: {time.perf_counter() - start:.3f} s", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

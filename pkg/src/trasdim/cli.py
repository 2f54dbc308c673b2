"""Batch command line: every command writes JSON with an embedded run manifest.

Exit codes: 0 definite result, 2 result contains UNKNOWN, 1 usage or input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import platform
import sys
import time

from . import __version__
from .borst import SetSystem, ord_chain
from .covers import check_cover, load_cover
from .metrics import Metric, metric_audit
from .search import UNKNOWN, AFragment, afragment_ord_bounds, build_afragment, decide_cover, window_id
from .spaces import Window, gen_window
from .witness import WitnessDecomposition, check_coasdim_step, grid_cover, theorem1_witness

SCHEMA_VERSION = "1"
SCHEMAS = {"window": "1", "cover": "1", "decision": "1", "afragment": "1", "decomposition": "1", "manifest": "1"}


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("E_USAGE", message)


def _digest(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _range_arg(text: str):
    if ".." in text:
        lo, hi = text.split("..", 1)
        return int(lo), int(hi)
    v = int(text)
    return v, v


def _sigma_arg(text: str):
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise CliError("E_INPUT", f"bad sigma {text!r}") from None


def _load_window(path) -> Window:
    try:
        return Window.load(path)
    except FileNotFoundError:
        raise CliError("E_INPUT", f"no such file: {path}") from None
    except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise CliError("E_INPUT", f"malformed window {path}: {exc}") from None


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise CliError("E_INPUT", f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise CliError("E_INPUT", f"malformed JSON in {path}: {exc}") from None


class Run:
    def __init__(self, argv, args):
        self.argv = list(argv)
        self.args = args
        self.inputs = {}
        self.nodes = 0
        self.start = time.perf_counter()

    def read(self, path):
        self.inputs[str(path)] = _digest(path)

    def manifest(self) -> dict:
        return {
            "command": self.argv,
            "seed": self.args.seed,
            "versions": {"package": __version__, "schemas": SCHEMAS, "python": platform.python_version()},
            "input_digests": self.inputs,
            "wall_time": round(time.perf_counter() - self.start, 6),
            "nodes": self.nodes,
        }

    def emit(self, payload: dict, out=None):
        doc = {**payload, "manifest": self.manifest()}
        text = json.dumps(doc, sort_keys=True)
        if out:
            with open(out, "w") as fh:
                fh.write(text + "\n")
        print(text)


def cmd_window_gen(run: Run):
    a = run.args
    kw = {"R": a.r}
    kind = a.kind.upper()
    try:
        if kind == "R":
            kw["block"] = a.block
        elif kind == "XKI":
            kw.update(k=a.k, i=a.i)
        elif kind in ("XOMEGAK", "YOMEGAK"):
            kw.update(k=a.k, blocks=_range_arg(a.blocks))
        elif kind == "X2OMEGA":
            kw.update(levels=_range_arg(a.levels), blocks=_range_arg(a.blocks))
        else:
            raise CliError("E_USAGE", f"unknown kind {a.kind}")
        w = gen_window(kind, **kw)
    except (TypeError, ValueError) as exc:
        raise CliError("E_INPUT", str(exc)) from None
    if a.out:
        w.dump(a.out, extra={"manifest": run.manifest()})
    run.emit({"window_id": window_id(w), "kind": w.kind, "params": w.params, "points": len(w)})
    return 0


def cmd_metric_audit(run: Run):
    a = run.args
    w = _load_window(a.window)
    run.read(a.window)
    metric = Metric.parse(a.metric) if a.metric else None
    rep = metric_audit(w, metric, a.samples, a.seed)
    run.emit(rep.to_json(w), a.out)
    return 0


def cmd_cover_decide(run: Run):
    a = run.args
    w = _load_window(a.window)
    run.read(a.window)
    threads = 1 if a.canonical else a.threads
    try:
        dec = decide_cover(w, _sigma_arg(a.sigma), a.bound, a.budget, threads=threads)
    except ValueError as exc:
        raise CliError("E_INPUT", str(exc)) from None
    run.nodes = dec.nodes_explored
    run.emit({"window_id": window_id(w), **dec.to_json(w)}, a.out)
    return 2 if dec.outcome == UNKNOWN else 0


def cmd_cover_check(run: Run):
    a = run.args
    w = _load_window(a.window)
    run.read(a.window)
    run.read(a.cover)
    try:
        cov = load_cover(a.cover, w)
        verdict = check_cover(cov, w, a.bound)
    except (KeyError, ValueError) as exc:
        raise CliError("E_INPUT", str(exc)) from None
    run.emit({"window_id": window_id(w), "bound": a.bound, **verdict.to_json()}, a.out)
    return 0


def cmd_afrag(run: Run):
    a = run.args
    w = _load_window(a.window)
    run.read(a.window)
    try:
        frag = build_afragment(w, a.bound, a.max_elem, a.max_size, a.budget, threads=a.threads)
    except ValueError as exc:
        raise CliError("E_INPUT", str(exc)) from None
    lo, hi = afragment_ord_bounds(frag)
    run.emit({**frag.to_json(), "ord_bounds": [lo, hi]}, a.out)
    return 2 if len(frag.unknown) else 0


def cmd_ord(run: Run):
    a = run.args
    if bool(a.system) == bool(a.afrag):
        raise CliError("E_USAGE", "ord needs exactly one of --system or --afrag")
    if a.system:
        run.read(a.system)
        try:
            M = SetSystem.from_json(_load_json(a.system))
        except (ValueError, TypeError) as exc:
            raise CliError("E_INPUT", str(exc)) from None
        value, chain = ord_chain(M)
        run.emit({"ord": value, "chain": chain})
        return 0
    run.read(a.afrag)
    try:
        frag = AFragment.from_json(_load_json(a.afrag))
    except (KeyError, ValueError, TypeError) as exc:
        raise CliError("E_INPUT", f"malformed fragment: {exc}") from None
    lo, hi = afragment_ord_bounds(frag)
    run.emit({"fragment": "A_B(W)", "window_id": frag.window_id, "B": frag.B, "lo": lo, "hi": hi})
    return 2 if lo != hi else 0


def cmd_witness_x2omega(run: Run):
    a = run.args
    try:
        w = gen_window("X2OMEGA", levels=_range_arg(a.levels), blocks=_range_arg(a.blocks), R=a.box)
        dec = theorem1_witness(w, a.r)
    except ValueError as exc:
        raise CliError("E_INPUT", str(exc)) from None
    if a.window_out:
        w.dump(a.window_out, extra={"manifest": run.manifest()})
    verdict = check_coasdim_step(w, dec)
    payload = {"window": w.header(), "window_id": window_id(w), **dec.to_json(w), "verdict": verdict.to_json(w)}
    run.emit(payload, a.out)
    return 0


def cmd_witness_check(run: Run):
    a = run.args
    w = _load_window(a.window)
    run.read(a.window)
    run.read(a.dec)
    obj = _load_json(a.dec)
    if "window_id" in obj and obj["window_id"] != window_id(w):
        raise CliError("E_MISMATCH", "decomposition was built for a different window")
    try:
        dec = WitnessDecomposition.from_json(obj, w)
        verdict = check_coasdim_step(w, dec)
    except (KeyError, ValueError) as exc:
        raise CliError("E_INPUT", str(exc)) from None
    run.emit({"window_id": window_id(w), **verdict.to_json(w)}, a.out)
    return 0


def cmd_witness_grid(run: Run):
    a = run.args
    try:
        w = gen_window("R", block=a.block, R=a.box)
        cov = grid_cover(w, a.d)
    except ValueError as exc:
        raise CliError("E_INPUT", str(exc)) from None
    verdict = check_cover(cov, w, a.d - 1)
    run.emit({"window": w.header(), "cover": cov.to_json(w), "verdict": verdict.to_json()}, a.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="trasdim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="store_true", help="print package and schema versions")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    win = sub.add_parser("window").add_subparsers(dest="action", parser_class=_Parser)
    g = win.add_parser("gen")
    g.add_argument("--kind", required=True, help="r, xki, xomegak, yomegak or x2omega")
    g.add_argument("--k", type=int)
    g.add_argument("--i", type=int)
    g.add_argument("--block", type=int)
    g.add_argument("--blocks", default="1..1", help="block range lo..hi")
    g.add_argument("--levels", default="1..1", help="level range lo..hi")
    g.add_argument("--r", type=int, required=True, help="box radius")
    g.add_argument("--out")
    g.set_defaults(func=cmd_window_gen)

    met = sub.add_parser("metric").add_subparsers(dest="action", parser_class=_Parser)
    au = met.add_parser("audit")
    au.add_argument("--window", required=True)
    au.add_argument("--samples", type=int, default=100_000)
    au.add_argument("--metric", help="SUP, LEVEL(k) or TOWER; defaults to the window's own")
    au.add_argument("--out")
    au.set_defaults(func=cmd_metric_audit)

    cov = sub.add_parser("cover").add_subparsers(dest="action", parser_class=_Parser)
    d = cov.add_parser("decide")
    d.add_argument("--window", required=True)
    d.add_argument("--sigma", required=True, help="comma separated, e.g. 2,5")
    d.add_argument("--bound", type=int, required=True)
    d.add_argument("--budget", type=int, default=1_000_000)
    d.add_argument("--canonical", action="store_true", help="force sequential DFS")
    d.add_argument("--out")
    d.set_defaults(func=cmd_cover_decide)
    c = cov.add_parser("check")
    c.add_argument("--window", required=True)
    c.add_argument("--cover", required=True)
    c.add_argument("--bound", type=int, required=True)
    c.add_argument("--out")
    c.set_defaults(func=cmd_cover_check)

    af = sub.add_parser("afrag")
    af.add_argument("--window", required=True)
    af.add_argument("--bound", type=int, required=True)
    af.add_argument("--max-elem", type=int, required=True)
    af.add_argument("--max-size", type=int, required=True)
    af.add_argument("--budget", type=int, default=100_000, help="node budget per sigma")
    af.add_argument("--out")
    af.set_defaults(func=cmd_afrag)

    o = sub.add_parser("ord")
    o.add_argument("--system")
    o.add_argument("--afrag")
    o.set_defaults(func=cmd_ord)

    wit = sub.add_parser("witness").add_subparsers(dest="action", parser_class=_Parser)
    x = wit.add_parser("x2omega")
    x.add_argument("--r", type=int, required=True)
    x.add_argument("--levels", required=True)
    x.add_argument("--blocks", required=True)
    x.add_argument("--box", type=int, required=True)
    x.add_argument("--out")
    x.add_argument("--window-out")
    x.set_defaults(func=cmd_witness_x2omega)
    wc = wit.add_parser("check")
    wc.add_argument("--window", required=True)
    wc.add_argument("--dec", required=True)
    wc.add_argument("--out")
    wc.set_defaults(func=cmd_witness_check)
    wg = wit.add_parser("grid")
    wg.add_argument("--block", type=int, required=True)
    wg.add_argument("--d", type=int, required=True)
    wg.add_argument("--box", type=int, required=True)
    wg.add_argument("--out")
    wg.set_defaults(func=cmd_witness_grid)
    return p


def run(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
        if args.version:
            print(json.dumps({"package": __version__, "schemas": SCHEMAS}, sort_keys=True))
            return 0
        if not getattr(args, "func", None):
            raise CliError("E_USAGE", "missing subcommand")
        if args.threads < 1:
            raise CliError("E_USAGE", "--threads must be at least 1")
        return args.func(Run(argv, args))
    except CliError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())

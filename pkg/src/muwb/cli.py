"""Batch entry points: check scripts, model-check, soundness battery, serve.

Exit codes: 0 success, 1 logical failure (failed proof, consequence
false, soundness violation), 2 usage/IO/parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from typing import Optional

from . import server
from .generators import random_model
from .kernel import Sequent, derive_nu_unfold_test_corpus
from .parser import (
    ParseError,
    parse_formula,
    parse_model,
    parse_scripts,
    print_formula,
    print_sequent,
)
from .semantics import (
    BoundExceeded,
    IllFormed,
    consequence,
    counterexample,
    evaluate,
)
from .session import ReplayError, replay
from .syntax import (
    ActionId,
    AtomicId,
    Variable,
    WellFormednessError,
    actions_in,
    atoms_in,
    free_vars,
    mk_wf,
)

DEFAULT_SEED = 2026


def _seed(explicit: Optional[int]) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get("MUWB_SEED")
    return int(env) if env else DEFAULT_SEED


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise SystemExit(_usage_error(f"cannot read {path}: {e.strerror}"))


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _emit(report: dict, as_json: bool, text_lines: list[str]) -> None:
    if as_json:
        print(json.dumps(report, indent=2))
    else:
        for line in text_lines:
            print(line)


# -------------------------------------------------------------------- check

def cmd_check(args: argparse.Namespace) -> int:
    text = _read(args.script)
    try:
        scripts = parse_scripts(text)
    except (ParseError, WellFormednessError) as e:
        return _usage_error(f"{args.script}: {e}")
    if not scripts:
        return _usage_error(f"{args.script}: no lemmas found")

    lemmas = []
    lines = []
    ok_all = True
    for script in scripts:
        try:
            replay(script)
        except ReplayError as e:
            ok_all = False
            step_text = (
                script.steps[e.step].text if e.step < len(script.steps) else "qed"
            )
            lemmas.append(
                {"name": script.name, "ok": False, "step": e.step,
                 "tactic": step_text, "reason": str(e.cause)}
            )
            lines.append(
                f"{script.name}: FAIL at step {e.step} ({step_text}): {e.cause}"
            )
        else:
            lemmas.append({"name": script.name, "ok": True, "steps": len(script.tactics)})
            lines.append(f"{script.name}: OK ({len(script.tactics)} steps)")
    _emit({"ok": ok_all, "lemmas": lemmas}, args.format == "json", lines)
    return 0 if ok_all else 1


# ----------------------------------------------------------------------- mc

def _format_states(states) -> str:
    return "{" + ", ".join(sorted(states)) + "}"


def cmd_mc(args: argparse.Namespace) -> int:
    try:
        ts = parse_model(_read(args.model))
    except ParseError as e:
        return _usage_error(f"{args.model}: {e}")
    variables = tuple(
        v for chunk in (args.vars or "").split(",") for v in chunk.split() if v
    )
    try:
        phi = mk_wf(parse_formula(args.formula, variables))
        hyps = [mk_wf(parse_formula(h, variables)) for h in args.hyp]
    except ParseError as e:
        return _usage_error(str(e))
    except WellFormednessError as e:
        return _usage_error(f"ill-formed formula: {e}")

    free = sorted(
        frozenset().union(free_vars(phi.prp), *(free_vars(h.prp) for h in hyps))
    )
    lines = []
    denotations = []
    try:
        if free:
            lines.append(f"free variables: {', '.join(v.name for v in free)}")
            subsets = list(ts.subsets())
            for rho_states in _rho_product(subsets, len(free)):
                rho = dict(zip(free, rho_states))
                value = evaluate(ts, rho, phi.prp)
                shown = ", ".join(
                    f"{v.name}={_format_states(rho[v])}" for v in free
                )
                denotations.append(
                    {"env": {v.name: sorted(rho[v]) for v in free}, "states": sorted(value)}
                )
                lines.append(f"  [{shown}] {_format_states(value)}")
        else:
            value = evaluate(ts, {}, phi.prp)
            denotations.append({"env": {}, "states": sorted(value)})
            lines.append(_format_states(value))

        witness = counterexample(ts, hyps, phi)
    except BoundExceeded as e:
        return _usage_error(str(e))
    except IllFormed as e:
        return _usage_error(str(e))

    holds = witness is None
    if hyps:
        claim = f"{', '.join(print_formula(h.prp) for h in hyps)} |= {print_formula(phi.prp)}"
    else:
        claim = f"|= {print_formula(phi.prp)}"
    lines.append(f"{claim}: {'holds' if holds else 'does not hold'}")
    report = {
        "formula": print_formula(phi.prp),
        "hypotheses": [print_formula(h.prp) for h in hyps],
        "denotations": denotations,
        "holds": holds,
    }
    if witness is not None:
        rho, state = witness
        report["counterexample"] = {
            "env": {v.name: sorted(ss) for v, ss in rho.items()},
            "state": state,
        }
        shown = ", ".join(f"{v.name}={_format_states(ss)}" for v, ss in sorted(rho.items()))
        lines.append(f"counterexample: state {state}" + (f" under [{shown}]" if shown else ""))
    _emit(report, args.format == "json", lines)
    return 0 if holds else 1


def _rho_product(subsets, arity):
    if arity == 0:
        yield ()
        return
    for rest in _rho_product(subsets, arity - 1):
        for s in subsets:
            yield (s,) + rest


# ---------------------------------------------------------------- soundness

def cmd_soundness(args: argparse.Namespace) -> int:
    seed = _seed(args.seed)
    claims: list[tuple[str, Sequent]] = []
    if not args.no_corpus:
        claims.extend(
            (f"corpus[{i}] {type(d.rule).__name__}", seq)
            for i, (d, seq) in enumerate(derive_nu_unfold_test_corpus())
        )
    if args.scripts:
        text = _read(args.scripts)
        try:
            scripts = parse_scripts(text)
            for script in scripts:
                derivation = replay(script)
                claims.append((script.name, derivation.concl))
        except (ParseError, WellFormednessError, ReplayError) as e:
            return _usage_error(f"{args.scripts}: {e}")
    if not claims:
        return _usage_error("nothing to check: corpus disabled and no scripts given")

    lines = [f"seed {seed}, battery {args.battery_size} models, max {args.max_states} states"]
    if args.battery_size == 0:
        lines.append("warning: battery size 0, nothing was checked")
        _emit(
            {"seed": seed, "battery": 0, "violations": [], "checked": 0, "ok": True},
            args.format == "json",
            lines,
        )
        return 0

    atoms = {AtomicId("P"), AtomicId("Q")}
    actions = {ActionId("a")}
    for _, seq in claims:
        for w in (seq.concl, *seq.hyps):
            atoms |= atoms_in(w.prp)
            actions |= actions_in(w.prp)

    rng = random.Random(seed)
    models = [
        random_model(rng, sorted(atoms), sorted(actions), args.max_states)
        for _ in range(args.battery_size)
    ]
    violations = []
    for name, seq in claims:
        for i, ts in enumerate(models):
            if not consequence(ts, seq.hyps, seq.concl):
                violations.append({"claim": name, "model": i, "sequent": print_sequent(seq)})
    for v in violations:
        lines.append(f"VIOLATION: {v['claim']} fails on model {v['model']}: {v['sequent']}")
    lines.append(
        f"{len(claims)} sequent(s) x {args.battery_size} models: "
        f"{len(violations)} violation(s)"
    )
    _emit(
        {
            "seed": seed,
            "battery": args.battery_size,
            "checked": len(claims),
            "violations": violations,
            "ok": not violations,
        },
        args.format == "json",
        lines,
    )
    return 1 if violations else 0


# -------------------------------------------------------------------- serve

def cmd_serve(args: argparse.Namespace) -> int:
    if args.stdio:
        server.serve_stdio(sys.stdin, sys.stdout, args.max_sessions)
        return 0
    try:
        httpd = server.make_http_server(args.bind, args.max_sessions, args.ui)
    except (OSError, ValueError) as e:
        return _usage_error(f"cannot bind {args.bind}: {e}")
    host, port = httpd.server_address[:2]
    print(f"muwb session server on http://{host}:{port}/ (POST /api)", flush=True)
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
    return 0


# --------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="muwb", description="mu-calculus workbench batch tools"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="replay proof scripts through the kernel")
    p.add_argument("script", help="path to a .mu proof script")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("mc", help="model-check a formula over a transition system")
    p.add_argument("model", help="path to a JSON model file")
    p.add_argument("formula", help="formula text")
    p.add_argument("--hyp", action="append", default=[], help="hypothesis formula (repeatable)")
    p.add_argument("--vars", default="", help="comma-separated free variable names")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(fn=cmd_mc)

    p = sub.add_parser("soundness", help="cross-check proved sequents on random models")
    p.add_argument("--scripts", help="proof script whose lemmas join the battery")
    p.add_argument("--battery-size", type=int, default=200)
    p.add_argument("--max-states", type=int, default=4)
    p.add_argument("--seed", type=int, default=None, help="defaults to MUWB_SEED or 2026")
    p.add_argument("--no-corpus", action="store_true", help="skip the built-in derivation corpus")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(fn=cmd_soundness)

    p = sub.add_parser("serve", help="host the interactive session protocol")
    p.add_argument("--bind", default="127.0.0.1:8750")
    p.add_argument("--max-sessions", type=int, default=64)
    p.add_argument("--ui", help="directory of static UI files to serve")
    p.add_argument("--stdio", action="store_true", help="speak the protocol on stdin/stdout")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit as e:
        code = e.code
        return code if isinstance(code, int) else 2


if __name__ == "__main__":
    sys.exit(main())

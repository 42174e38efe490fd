"""Command-line interface: build | run | verify | serve | export."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import LcsimError
from .scripts import parse_script
from .session import Session, run_script
from .statevector import DEFAULT_MAX_QUBITS, build_cluster
from .verify import canonical_json, run_full


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--max-qubits", type=int, default=DEFAULT_MAX_QUBITS)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a linear cluster state and dump amplitudes")
    p.add_argument("n", type=int)
    _add_common(p)

    p = sub.add_parser("run", help="execute a measurement script")
    p.add_argument("script", help="script path, or - for stdin")
    p.add_argument("--oracle", choices=("on", "off"), default="on")
    p.add_argument("--hybrid", action="store_true",
                   help="fall back to oracle-only on refused compositions")
    p.add_argument("--seed", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("verify", help="run the oracle verification suite")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--sequences", type=int, default=25)
    p.add_argument("--sequence-n", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)

    p = sub.add_parser("serve", help="start the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8077)
    p.add_argument("--idle-timeout", type=float, default=3600.0)
    p.add_argument("--busy", choices=("queue", "reject"), default="queue")
    p.add_argument("--persist", default=None, help="snapshot file for sessions")
    p.add_argument("--max-qubits", type=int, default=DEFAULT_MAX_QUBITS)

    p = sub.add_parser("export", help="run a script and export the ribbon diagram")
    p.add_argument("script", nargs="?", default=None, help="script path, or - for stdin")
    p.add_argument("--n", type=int, default=None, help="plain chain size instead of a script")
    p.add_argument("--seed", type=int, default=None)
    _add_common(p)

    return parser


def _read_script(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _run_session(args, oracle_on: bool, hybrid: bool) -> tuple[Session, dict]:
    script = parse_script(_read_script(args.script))
    return run_script(
        script, seed=args.seed, oracle_on=oracle_on, hybrid=hybrid,
        max_qubits=args.max_qubits,
    )


def cmd_build(args) -> int:
    state = build_cluster(args.n, max_qubits=args.max_qubits)
    dump = state.to_debug_json()
    if args.format == "json":
        print(json.dumps(dump))
    else:
        print(f"cluster of {args.n} qubits, {len(dump['amplitudes'])} amplitudes")
        for idx, (re, im) in enumerate(dump["amplitudes"]):
            bits = format(idx, f"0{args.n}b")
            print(f"|{bits}>  {re:+.6f}{im:+.6f}j")
    return 0


def cmd_run(args) -> int:
    session, record = _run_session(args, oracle_on=args.oracle == "on", hybrid=args.hybrid)
    record["final"] = session.view()
    if args.format == "json":
        print(json.dumps(record))
    else:
        for step in record["steps"]:
            line = (
                f"step {step['index']}: q{step['qubit']} {step['basis']}"
                f"{step['outcome']} p={step['probability']:.6f}"
            )
            if step["rule"]:
                line += f" rule={step['rule']} event={step['event']['kind']}"
            if step.get("fidelity") is not None:
                line += f" fidelity={step['fidelity']:.12f}"
            print(line)
        if record["error"]:
            err = record["error"]
            print(f"aborted at step {err['step']}: [{err['code']}] {err['message']}")
        else:
            view = record["final"]
            print(f"final segments: {view['symbolic']['segments']}")
            print(f"final byproducts: {view['byproducts']}")
    return 1 if record["error"] else 0


def cmd_verify(args) -> int:
    report = run_full(
        n_min=args.n_min, n_max=args.n_max, sequence_count=args.sequences,
        sequence_n=args.sequence_n, seed=args.seed,
    )
    if args.format == "json":
        print(canonical_json(report.to_json()))
    else:
        print(report.to_text())
    return 0 if report.ok else 2


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceSettings, create_app

    app = create_app(
        ServiceSettings(
            idle_timeout_s=args.idle_timeout,
            busy=args.busy,
            persist_path=args.persist,
            max_qubits=args.max_qubits,
        )
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_export(args) -> int:
    from .ribbon import export_diagram

    if args.n is not None:
        session = Session(args.n, seed=args.seed, oracle_on=False, max_qubits=args.max_qubits)
    elif args.script:
        session, record = _run_session(args, oracle_on=False, hybrid=False)
        if record["error"]:
            print(json.dumps(record["error"]), file=sys.stderr)
            return 1
    else:
        print("export needs a script or --n", file=sys.stderr)
        return 2
    doc = export_diagram(session.chain)
    if args.format == "json":
        print(json.dumps(doc))
    else:
        for group in doc["components"]:
            rings = " ".join(
                f"({r['id']}{'*' if r['status'] == 'decoupled' else ''})" for r in group["rings"]
            )
            ribbons = " ".join(f"{rb['l']}-{rb['r']}@{rb['twist']}" for rb in group["ribbons"])
            print(f"component: {rings}  {ribbons}")
        for event in doc["events"]:
            print(f"event: {event['kind']} at q{event['qubit']}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    handlers = {
        "build": cmd_build,
        "run": cmd_run,
        "verify": cmd_verify,
        "serve": cmd_serve,
        "export": cmd_export,
    }
    try:
        return handlers[args.command](args)
    except LcsimError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

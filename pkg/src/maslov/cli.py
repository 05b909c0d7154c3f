"""Command-line front end, a thin client over the service handlers.

By default requests run in process through the same validated models the
HTTP service uses; with --server URL they are POSTed to a running service
instead.  Exit codes: 0 success, 1 input/validation error, 2 numerical
abort (degenerate crossing, unresolved cluster, integrator failure).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from pydantic import ValidationError

from .engine.errors import NumericalAbort
from .service.handlers import HANDLERS


def _load_config(value: str) -> dict:
    path = Path(value)
    if path.exists():
        with path.open("r", encoding="utf-8") as handle:
            payload = json.load(handle)
    else:
        payload = json.loads(value)
    if not isinstance(payload, dict):
        raise ValueError("config must be a JSON object")
    return payload


def _shortcut_payload(command: str, args: argparse.Namespace) -> dict:
    payload: dict = {}
    opts = {}
    if args.tol is not None:
        opts["tol"] = args.tol
    if args.grid is not None:
        opts["grid"] = args.grid
    if opts:
        payload["options"] = opts

    if command in ("clm", "rs"):
        system: dict = {}
        if args.model:
            system["model"] = args.model
        for key in ("mu", "e", "epsilon", "n"):
            val = getattr(args, key, None)
            if val is not None:
                system[key] = val
        if not system:
            raise ValueError(f"{command} needs --config or --model")
        payload["system"] = system
        if args.frame:
            payload["frame"] = {"name": args.frame}
        if args.reference:
            payload["reference"] = {"name": args.reference}
        if args.interval:
            payload["interval"] = args.interval
    elif command == "brake-index":
        for key in ("model", "mu", "e", "d0", "epsilon"):
            val = getattr(args, key, None)
            if val is not None:
                payload[key] = val
    elif command == "oscillator":
        if args.mu is None:
            raise ValueError("oscillator needs --mu")
        for key in ("mu", "e", "d0", "epsilon"):
            val = getattr(args, key, None)
            if val is not None:
                payload[key] = val
    elif command == "hill":
        if args.model is None or args.k is None:
            raise ValueError("hill needs --model and --k")
        payload.pop("options", None)
        payload["model"] = args.model
        payload["k"] = args.k
        for key in ("alpha", "nu", "mu"):
            val = getattr(args, key, None)
            if val is not None:
                payload[key] = val
    else:  # triple / hormander have no shortcut form beyond --config
        raise ValueError(f"{command} requires --config with a 'frames' list")
    return payload


def _emit(report: dict, out: str | None):
    text = json.dumps(report, indent=2, sort_keys=True, default=float)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _run_remote(server: str, command: str, payload: dict) -> tuple[int, dict]:
    import httpx

    url = server.rstrip("/") + "/v1/" + command
    resp = httpx.post(url, json=payload, timeout=300.0)
    if resp.status_code == 200:
        return 0, resp.json()
    body = resp.json() if resp.headers.get("content-type", "").startswith(
        "application/json") else {"error": resp.text}
    return (2 if resp.status_code == 409 else 1), body


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maslov",
        description="Maslov-type intersection indices and brake-orbit Morse "
                    "indices; JSON in, JSON report out.")
    parser.add_argument("--server", default=None,
                        help="POST to a running service instead of computing "
                             "in process")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON object (inline or a file path)")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--grid", type=int, default=None)
        p.add_argument("--out", default=None, help="write the report here")

    for name in ("clm", "rs"):
        p = sub.add_parser(name, help=f"{name} index of an evolved frame "
                                      "against a reference")
        common(p)
        p.add_argument("--model", choices=["oscillator", "ball", "seifert"])
        p.add_argument("--mu", type=float)
        p.add_argument("--e", type=float)
        p.add_argument("--epsilon", type=float)
        p.add_argument("--n", type=int)
        p.add_argument("--frame", choices=["dirichlet", "neumann"])
        p.add_argument("--reference", choices=["dirichlet", "neumann"])
        p.add_argument("--interval", type=float, nargs=2, metavar=("A", "B"))

    for name in ("triple", "hormander"):
        p = sub.add_parser(name, help=f"{name} index of a frame tuple")
        common(p)

    p = sub.add_parser("brake-index", help="Morse index of a periodic brake orbit")
    common(p)
    p.add_argument("--model", choices=["oscillator"], default=None)
    p.add_argument("--mu", type=float)
    p.add_argument("--e", type=float)
    p.add_argument("--d0", type=float)
    p.add_argument("--epsilon", type=float)

    p = sub.add_parser("oscillator", help="planar oscillator reproduction report")
    common(p)
    p.add_argument("--mu", type=float)
    p.add_argument("--e", type=float)
    p.add_argument("--d0", type=float)
    p.add_argument("--epsilon", type=float)

    p = sub.add_parser("hill", help="Hill region descriptor of a catalog potential")
    common(p)
    p.add_argument("--model", choices=["homogeneous-singular", "anisotropic-kepler",
                                       "anisotropic-oscillator", "oscillator"])
    p.add_argument("--k", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--mu", type=float)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8710)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service.app import app
        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    command = args.command
    try:
        payload = _load_config(args.config) if args.config else \
            _shortcut_payload(command, args)
    except (ValueError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 1

    if args.server:
        code, report = _run_remote(args.server, command, payload)
        _emit(report, args.out)
        return code

    model_cls, handler = HANDLERS[command]
    try:
        request = model_cls.model_validate(payload)
    except ValidationError as exc:
        locs = [{"field": ".".join(str(p) for p in err["loc"]),
                 "message": err["msg"]} for err in exc.errors()]
        print(json.dumps({"error": "invalid request", "details": locs}, indent=2),
              file=sys.stderr)
        return 1
    except ValueError as exc:  # e.g. malformed MASLOV_TOL in a default factory
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 1
    try:
        report = handler(request)
    except NumericalAbort as exc:
        print(json.dumps({"error": str(exc), "kind": type(exc).__name__}, indent=2),
              file=sys.stderr)
        return 2
    except ValueError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 1
    _emit(report, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())

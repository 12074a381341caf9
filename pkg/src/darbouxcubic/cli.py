"""Command-line front end.

Every subcommand except `serve` is a thin client of the HTTP service:
by default the requests run against an in-process instance (no socket,
no separate process), and --server redirects the same requests to a
running remote instance. `serve` starts the service on a host/port.

Exit codes: 0 success, 1 argument or input errors, 2 analysis completed
partially (the partial report or portrait is still written).

JSON output is rendered locally with sorted keys and fixed indentation,
so identical invocations produce byte-identical files regardless of
which transport carried the response.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path

import httpx

from .config import load_config
from .report import render_report

_TIMEOUT = 600.0


class ServiceClient:
    """Synchronous facade over the service, in-process or remote."""

    def __init__(self, server: str | None = None):
        self.server = server

    def request(self, method: str, path: str, body: dict | None = None):
        if self.server is not None:
            with httpx.Client(base_url=self.server, timeout=_TIMEOUT) as client:
                response = client.request(method, path, json=body)
            return response.status_code, response.json()
        return asyncio.run(self._in_process(method, path, body))

    async def _in_process(self, method: str, path: str, body: dict | None):
        from .service import create_app

        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://darbouxcubic", timeout=_TIMEOUT
        ) as client:
            response = await client.request(method, path, json=body)
        return response.status_code, response.json()


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _config_payload(path: str | None) -> dict:
    if path is None:
        return {}
    from dataclasses import asdict

    return asdict(load_config(path))


def _system_payload(args) -> dict:
    if args.p is not None:
        return {"p": args.p}
    params = {}
    for item in args.param or []:
        name, _, value = item.partition("=")
        if not name or not value:
            raise SystemExit(f"--param expects name=value, got {item!r}")
        params[name] = value
    return {
        "system": {"x_rate": args.x_rate, "y_rate": args.y_rate, "parameters": params}
    }


def _add_system_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--p", help="family parameter, an exact rational like 1, -2, 1/2")
    sub.add_argument(
        "--x-rate",
        help="dx/dt polynomial (free-form system); use --x-rate=-y for values with a leading minus",
    )
    sub.add_argument("--y-rate", help="dy/dt polynomial (free-form system)")
    sub.add_argument(
        "--param",
        action="append",
        metavar="NAME=VALUE",
        help="rational value for a parameter used in the rate expressions",
    )
    sub.add_argument("--config", help="TOML or JSON file with numeric settings")
    sub.add_argument("--server", help="base URL of a running service instance")


def _check_system_args(args, parser: argparse.ArgumentParser) -> None:
    free_form = args.x_rate is not None or args.y_rate is not None
    if (args.p is None) == (not free_form):
        parser.error("provide either --p or both --x-rate and --y-rate")
    if free_form and (args.x_rate is None or args.y_rate is None):
        parser.error("free-form systems need both --x-rate and --y-rate")


def _run_analyze(args, parser) -> int:
    _check_system_args(args, parser)
    body = _system_payload(args)
    body["max_degree"] = args.maxdeg
    body["config"] = _config_payload(args.config)
    code, payload = ServiceClient(args.server).request(
        "POST", "/api/analyze", body
    )
    if code not in (200, 422) or "status" not in payload:
        sys.stderr.write(f"error: {payload.get('detail', payload)}\n")
        return 1
    _write(render_report(payload), args.out)
    return 0 if payload["status"] == "complete" else 2


def _run_portrait(args, parser) -> int:
    _check_system_args(args, parser)
    body = _system_payload(args)
    body["max_degree"] = args.maxdeg
    body["config"] = _config_payload(args.config)
    body["seed"] = args.seed
    if args.orbits is not None:
        body["orbit_count"] = args.orbits
    code, payload = ServiceClient(args.server).request(
        "POST", "/api/portrait", body
    )
    if code not in (200, 422) or "svg" not in payload:
        sys.stderr.write(f"error: {payload.get('detail', payload)}\n")
        return 1
    _write(payload["svg"], args.out)
    for problem in payload.get("problems", []):
        sys.stderr.write(f"note: {problem}\n")
    return 0 if payload["status"] == "complete" else 2


def _run_gamma_probe(args, _parser) -> int:
    body = {
        "count": args.count,
        "y_min": args.y_range[0],
        "y_max": args.y_range[1],
        "maxdeg": args.maxdeg,
        "control": args.control == "algebraic",
    }
    code, payload = ServiceClient(args.server).request(
        "POST", "/api/gamma-probe", body
    )
    if code != 200:
        sys.stderr.write(f"error: {payload.get('detail', payload)}\n")
        return 1
    _write(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    return 0


def _run_serve(args, _parser) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1; exit 2 is reserved for partial analysis."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="darbouxcubic",
        description=(
            "Exact qualitative analysis of planar cubic systems with a star "
            "node: equilibria, blow-up of the degenerate equator point, "
            "Darboux first integrals, disk portraits, separatrix probes."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="emit the JSON analysis report")
    _add_system_args(analyze)
    analyze.add_argument("--maxdeg", type=int, default=2, help="invariant-curve degree cap")
    analyze.add_argument("--out", help="output file (default stdout)")
    analyze.set_defaults(run=_run_analyze)

    portrait = sub.add_parser("portrait", help="emit the SVG disk portrait")
    _add_system_args(portrait)
    portrait.add_argument("--maxdeg", type=int, default=2, help="invariant-curve degree cap")
    portrait.add_argument("--seed", type=int, default=0, help="background-orbit seed")
    portrait.add_argument("--orbits", type=int, help="background orbit count")
    portrait.add_argument("--out", help="output file (default stdout)")
    portrait.set_defaults(run=_run_portrait)

    probe = sub.add_parser(
        "gamma-probe", help="least-squares algebraicity probe of the separatrix"
    )
    probe.add_argument("--count", type=int, default=200, help="sample size")
    probe.add_argument(
        "--y-range",
        type=float,
        nargs=2,
        default=[0.2, 3.0],
        metavar=("Y_MIN", "Y_MAX"),
        help="sampling window",
    )
    probe.add_argument("--maxdeg", type=int, default=8, help="highest fitted degree")
    probe.add_argument(
        "--control",
        choices=["algebraic"],
        help="also probe the exact algebraic control curve and report the separation",
    )
    probe.add_argument("--server", help="base URL of a running service instance")
    probe.add_argument("--out", help="output file (default stdout)")
    probe.set_defaults(run=_run_gamma_probe)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(run=_run_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args, parser)
    except httpx.HTTPError as exc:
        sys.stderr.write(f"error: cannot reach the service: {exc}\n")
        return 1
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

The CLI is a thin client of the HTTP API: every subcommand builds a request
from the config file plus flag overrides, posts it to the service (an
in-process instance by default, or a remote one via --server), and writes
the returned artifacts to disk.  Randomness is controlled entirely by the
``seed`` in the config.

Exit codes: 0 ok, 1 numeric/convergence failure, 2 usage or invalid
config, 3 I/O failure.  The default config path can be set with the
IONFRINGE_CONFIG environment variable; flags override file values.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from pathlib import Path

import httpx
import numpy as np
from pydantic import ValidationError

from . import __version__
from .config import config_from_dict
from .fileio import (
    read_profile_csv,
    read_trace_csv,
    write_image_csv,
    write_json,
    write_pgm,
    write_profile_csv,
    write_trace_csv,
)
from .imaging import FringeImage
from .scatter import Channel

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_USAGE = 2
EXIT_IO = 3

CONFIG_ENV_VAR = "IONFRINGE_CONFIG"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _post(path: str, payload: dict, server: str | None) -> dict:
    """POST to the service; in-process app unless a server URL is given."""
    if server:
        try:
            response = httpx.post(server.rstrip("/") + path, json=payload, timeout=600.0)
        except httpx.HTTPError as exc:
            raise CliError(EXIT_IO, f"cannot reach server {server}: {exc}")
        return _unwrap(response.status_code, response)

    from .service import create_app

    async def call():
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(transport=transport, base_url="http://ionfringe") as client:
            return await client.post(path, json=payload, timeout=None)

    response = asyncio.run(call())
    return _unwrap(response.status_code, response)


def _unwrap(status: int, response) -> dict:
    if status == 200:
        return response.json()
    try:
        body = response.json()
    except Exception:
        body = {"detail": response.text}
    detail = body.get("detail", "request failed")
    if status == 422:
        raise CliError(EXIT_USAGE, f"invalid request: {_format_422(detail)}")
    if status == 400:
        code = EXIT_NUMERIC if body.get("error_class") == "numeric" else EXIT_USAGE
        raise CliError(code, str(detail))
    raise CliError(EXIT_NUMERIC, f"service error ({status}): {detail}")


def _format_422(detail) -> str:
    if isinstance(detail, list):
        parts = []
        for item in detail:
            loc = ".".join(str(v) for v in item.get("loc", []))
            parts.append(f"{loc}: {item.get('msg', '')}")
        return "; ".join(parts)
    return str(detail)


def _load_config_dict(path: str | None) -> dict:
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read config {path}: {exc}")
    try:
        return json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_USAGE, f"config {path} is not valid JSON: {exc}")


def _resolved_config(args) -> dict:
    """File config plus flag overrides, validated locally before sending."""
    data = _load_config_dict(getattr(args, "config", None))
    if getattr(args, "seed", None) is not None:
        data["seed"] = args.seed
    if getattr(args, "channel", None) is not None:
        data.setdefault("detector", {})["channel"] = args.channel
    if getattr(args, "threads", None) is not None:
        data["threads"] = args.threads
    if getattr(args, "ratio", None) is not None:
        data.setdefault("jumps", {})["ratio"] = args.ratio
    if getattr(args, "duration", None) is not None:
        data.setdefault("jumps", {})["duration_s"] = args.duration
    try:
        cfg = config_from_dict(data)
    except ValidationError as exc:
        lines = [
            ".".join(str(v) for v in err["loc"]) + ": " + err["msg"] for err in exc.errors()
        ]
        raise CliError(EXIT_USAGE, "invalid config: " + "; ".join(lines))
    return cfg.model_dump(mode="json")


def _image_from_payload(payload: dict) -> FringeImage:
    pixels = np.asarray(payload["pixels"])
    if payload["is_counts"]:
        pixels = pixels.astype(np.int64)
    return FringeImage(
        pixels=pixels,
        phi=np.asarray(payload["phi_rad"]),
        phi_out=np.asarray(payload["phi_out_rad"]),
        channel=Channel(payload["channel"]),
    )


def _out_base(out: str) -> Path:
    base = Path(out)
    if base.suffix in (".pgm", ".csv", ".json"):
        base = base.with_suffix("")
    return base


def cmd_modes_info(args) -> int:
    cfg = _resolved_config(args)
    body = _post("/modes/info", {"trap": cfg["trap"]}, args.server)
    text = json.dumps(body, indent=2)
    print(text)
    if args.out:
        write_json(args.out, body)
    return EXIT_OK


def cmd_simulate_image(args) -> int:
    cfg = _resolved_config(args)
    body = _post("/simulate/image", {"config": cfg}, args.server)
    img = _image_from_payload(body["image"])
    base = _out_base(args.out)
    try:
        scale = write_pgm(base.with_suffix(".pgm"), img)
        write_image_csv(base.with_suffix(".csv"), img)
        write_json(
            base.with_suffix(".json"),
            {
                "command": "simulate-image",
                "channel": body["image"]["channel"],
                "is_counts": body["image"]["is_counts"],
                "pgm_grey_per_unit": scale,
                "phi_rad": body["image"]["phi_rad"],
                "phi_out_rad": body["image"]["phi_out_rad"],
                "seed": body["seed"],
                "config": body["config"],
            },
        )
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write outputs: {exc}")
    print(f"wrote {base.with_suffix('.pgm')}, {base.with_suffix('.csv')}, {base.with_suffix('.json')}")
    return EXIT_OK


def cmd_simulate_profile(args) -> int:
    cfg = _resolved_config(args)
    payload: dict = {"config": cfg}
    if args.phi_out_window:
        try:
            lo, hi = (float(v) for v in args.phi_out_window.split(","))
        except ValueError:
            raise CliError(EXIT_USAGE, "--phi-out-window expects 'LO,HI' in degrees")
        payload["phi_out_window_deg"] = (lo, hi)
    body = _post("/simulate/profile", payload, args.server)
    prof = body["profile"]
    out = Path(args.out)
    if out.suffix != ".csv":
        out = out.with_suffix(".csv")
    try:
        write_profile_csv(
            out,
            np.asarray(prof["phi_rad"]),
            np.asarray(prof["values"]),
            np.asarray(prof["stderr"]),
        )
        write_json(
            out.with_suffix(".json"),
            {
                "command": "simulate-profile",
                "channel": body["channel"],
                "seed": body["seed"],
                "config": body["config"],
            },
        )
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write outputs: {exc}")
    print(f"wrote {out}, {out.with_suffix('.json')}")
    return EXIT_OK


def cmd_fit(args) -> int:
    cfg = _resolved_config(args)
    try:
        phi, values, stderr = read_profile_csv(args.profile)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read profile {args.profile}: {exc}")
    except ValueError as exc:
        raise CliError(EXIT_USAGE, f"malformed profile {args.profile}: {exc}")
    body = _post(
        "/fit/fringe",
        {
            "config": cfg,
            "profile": {
                "phi_rad": phi.tolist(),
                "values": values.tolist(),
                "stderr": stderr.tolist(),
            },
        },
        args.server,
    )
    report = {"command": "fit", "profile_file": str(args.profile), **body}
    try:
        write_json(args.report, report)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write report: {exc}")
    if not body["converged"]:
        print(f"fit did not converge after {body['n_iter']} iterations: {body['message']}")
        return EXIT_NUMERIC
    p = body["params"]
    s = body["one_sigma"]
    print(
        f"converged in {body['n_iter']} iterations, reduced chi2 = {body['reduced_chi2']:.3f}\n"
        f"  t_rock = ({p['t_rock_k'] * 1e3:.3f} +- {s['t_rock_k'] * 1e3:.3f}) mK\n"
        f"  visibility scale = {p['visibility_scale']:.3f} +- {s['visibility_scale']:.3f}\n"
        f"report: {args.report}"
    )
    return EXIT_OK


def cmd_jumps_sim(args) -> int:
    cfg = _resolved_config(args)
    body = _post("/jumps/simulate", {"config": cfg}, args.server)
    out = Path(args.out)
    try:
        write_trace_csv(out, np.asarray(body["counts"], dtype=np.int64), body["bin_width_s"])
        write_json(
            out.with_suffix(".json"),
            {
                "command": "jumps-sim",
                "bin_width_s": body["bin_width_s"],
                "p_on": body["p_on"],
                "p_off": body["p_off"],
                "gated_fraction": body["gated_fraction"],
                "seed": body["seed"],
                "config": body["config"],
            },
        )
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write outputs: {exc}")
    print(f"wrote {out} ({len(body['counts'])} bins), {out.with_suffix('.json')}")
    return EXIT_OK


def cmd_jumps_calibrate(args) -> int:
    cfg = _resolved_config(args)
    try:
        counts, bin_width = read_trace_csv(args.trace)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read trace {args.trace}: {exc}")
    except ValueError as exc:
        raise CliError(EXIT_USAGE, f"malformed trace {args.trace}: {exc}")
    body = _post(
        "/jumps/calibrate",
        {"config": cfg, "counts": counts.tolist(), "bin_width_s": bin_width},
        args.server,
    )
    report = {"command": "jumps-calibrate", "trace_file": str(args.trace), **body}
    try:
        write_json(args.report, report)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write report: {exc}")
    if not body["converged"]:
        print("three-peak fit did not converge")
        return EXIT_NUMERIC
    print(
        f"p_off/p_on = {body['p_ratio']:.4f} +- {body['p_ratio_error']:.4f}\n"
        f"saturation s = {body['saturation']:.4f} +- {body['saturation_error']:.4f}\n"
        f"report: {args.report}"
    )
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    body = _post("/selfcheck", {}, args.server)
    for check in body["checks"]:
        mark = "PASS" if check["passed"] else "FAIL"
        print(f"{mark}  {check['name']}: {check['detail']}")
    return EXIT_OK if body["passed"] else EXIT_NUMERIC


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("ionfringe.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ionfringe",
        description="Two-ion interference fringe simulation and analysis",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--server",
        default=os.environ.get("IONFRINGE_SERVER"),
        help="URL of a running service; default runs the service in-process",
    )
    sub = parser.add_subparsers(dest="command")

    def add_config(p):
        p.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV_VAR})")
        p.add_argument("--seed", type=int, help="override the root seed")

    p = sub.add_parser("modes-info", help="print ion separation and the six mode frequencies")
    add_config(p)
    p.add_argument("--out", help="also write the JSON to a file")
    p.set_defaults(func=cmd_modes_info)

    p = sub.add_parser("simulate-image", help="synthesize a fringe image (.pgm/.csv/.json)")
    add_config(p)
    p.add_argument("--channel", choices=[c.value for c in Channel])
    p.add_argument("--threads", type=int, help="row-parallel synthesis threads")
    p.add_argument("--out", required=True, help="output base path")
    p.set_defaults(func=cmd_simulate_image)

    p = sub.add_parser("simulate-profile", help="synthesize and collapse to a 1D profile (.csv)")
    add_config(p)
    p.add_argument("--channel", choices=[c.value for c in Channel])
    p.add_argument("--phi-out-window", help="collapse window 'LO,HI' in degrees (default: full)")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_simulate_profile)

    p = sub.add_parser("fit", help="fit a fringe profile CSV")
    add_config(p)
    p.add_argument("--profile", required=True, help="input profile CSV")
    p.add_argument("--report", required=True, help="output JSON report")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("jumps-sim", help="simulate a two-ion telegraph count trace")
    add_config(p)
    p.add_argument("--ratio", type=float, help="target p_off/p_on")
    p.add_argument("--duration", type=float, help="trace duration in seconds")
    p.add_argument("--out", required=True, help="output trace CSV")
    p.set_defaults(func=cmd_jumps_sim)

    p = sub.add_parser("jumps-calibrate", help="histogram a trace, fit three peaks, invert for s")
    add_config(p)
    p.add_argument("--trace", required=True, help="input trace CSV")
    p.add_argument("--report", required=True, help="output JSON report")
    p.set_defaults(func=cmd_jumps_calibrate)

    p = sub.add_parser("selfcheck", help="run the built-in oracle suite")
    p.set_defaults(func=cmd_selfcheck)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())

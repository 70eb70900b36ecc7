"""Command-line front end.

The CLI is a thin client of the HTTP service: each subcommand builds a
request, sends it (in-process by default, or to a remote server via --url),
and writes the response to CSV/JSON files.  All numeric flags are SI base
units; degrees Celsius appear only in output column headers.

Exit codes: 0 success, 1 user/config error, 2 internal failure.
"""
from __future__ import annotations

import functools
import json
import os
import sys

import click
import httpx
import numpy as np

from .errors import HledError, NonUniformTimeBase
from .serialize import read_csv, uniform_dt, write_csv, write_json

_K_TO_C = 273.15


def _client(url: str | None) -> httpx.Client:
    if url:
        return httpx.Client(base_url=url, timeout=600.0)
    # In-process: drive the ASGI app directly through the test transport.
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(create_app())


def _call(client: httpx.Client, method: str, path: str, **kwargs) -> dict:
    resp = client.request(method, path, **kwargs)
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        raise HledError(f"{path}: {detail}")
    return resp.json()


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (HledError, httpx.HTTPError, OSError, json.JSONDecodeError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except click.exceptions.Exit:
            raise
        except Exception as exc:  # invariant failure, not a user error
            click.echo(f"internal error: {exc}", err=True)
            sys.exit(2)

    return wrapper


def _load_config(path: str | None) -> dict | None:
    if path is None:
        return None
    if not os.path.exists(path):
        raise HledError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _drive_payload(client, pulse, power, current, rate, duty, n_pulses) -> dict:
    if current is not None:
        power = _call(client, "GET", "/led/power", params={"current": current})[
            "power_w"
        ]
    if power is None:
        raise HledError("provide --power or --current")
    if rate is not None:
        if duty is None:
            raise HledError("--rate requires --duty")
        return {
            "periodic": {
                "rate_f": rate,
                "duty": duty,
                "power": power,
                "n_pulses": n_pulses,
            }
        }
    if pulse is None:
        raise HledError("provide --pulse or --rate/--duty")
    return {"pulses": [{"t_start": 0.0, "duration": pulse, "power": power}]}


def _drive_options(fn):
    fn = click.option("--pulse", type=float, help="Single pulse duration, s.")(fn)
    fn = click.option("--power", type=float, help="Optical power, W.")(fn)
    fn = click.option("--current", type=float, help="LED drive current, A (mapped to power).")(fn)
    fn = click.option("--rate", type=float, help="Pulse rate, Hz (periodic drive).")(fn)
    fn = click.option("--duty", type=float, help="Duty cycle in (0,1).")(fn)
    fn = click.option("--n-pulses", type=int, default=10, show_default=True)(fn)
    return fn


@click.group()
@click.option("--url", default=None, help="Remote service URL (default: in-process).")
@click.pass_context
def main(ctx, url):
    """Thermopneumatic actuator pixel simulator."""
    ctx.obj = url


@main.command()
@click.option("--config", "config_path", type=str, default=None, help="Device config JSON.")
@_drive_options
@click.option("--t-end", type=float, default=None, help="Simulation span, s.")
@click.option("--dt", type=float, default=1e-5, show_default=True)
@click.option("--record-every", type=int, default=100, show_default=True)
@click.option("-o", "--output", required=True, type=str, help="Output CSV path.")
@click.pass_obj
@_handle_errors
def simulate(url, config_path, pulse, power, current, rate, duty, n_pulses, t_end, dt, record_every, output):
    """Simulate a drive program and write the trace as CSV."""
    with _client(url) as client:
        req = {
            "drive": _drive_payload(client, pulse, power, current, rate, duty, n_pulses),
            "sim": {"dt": dt, "t_end": t_end, "record_every": record_every},
        }
        device = _load_config(config_path)
        if device is not None:
            req["device"] = device
        data = _call(client, "POST", "/simulate", json=req)
    ch = {k: np.asarray(v) for k, v in data["channels"].items()}
    t0 = data["T0"]
    n = len(ch["force"])
    write_csv(
        output,
        {
            "t_s": np.arange(n) * data["dt"],
            "P_opt_W": ch["P_opt"],
            "T_abs_C": ch["T_abs"] + t0 - _K_TO_C,
            "T_air_C": ch["T_air"] + t0 - _K_TO_C,
            "dP_Pa": ch["pressure_delta"],
            "F_N": ch["force"],
            "z_m": ch["displacement"],
        },
    )
    click.echo(f"wrote {output} ({n} samples)")


@main.command()
@click.argument("name")
@click.option("-o", "--output-dir", required=True, type=str)
@click.pass_obj
@_handle_errors
def figure(url, name, output_dir):
    """Regenerate the dataset behind a characterization figure.

    NAME is one of: fig2b fig2c fig2d fig3a fig3b thermal perceptual.
    """
    with _client(url) as client:
        data = _call(client, "GET", f"/figures/{name}")
    os.makedirs(output_dir, exist_ok=True)
    files = []
    for curve, cols in data["curves"].items():
        path = os.path.join(output_dir, f"{name}_{curve}.csv")
        write_csv(path, cols)
        files.append(os.path.basename(path))
    manifest_path = os.path.join(output_dir, f"{name}_manifest.json")
    write_json(manifest_path, {"figure": name, "anchors": data["manifest"], "files": files})
    click.echo(f"wrote {len(files)} curve file(s) + manifest to {output_dir}")


@main.command()
@click.option("--config", "config_path", type=str, default=None)
@click.option("--sweep", "sweep_path", required=True, type=str, help="Sweep spec JSON.")
@_drive_options
@click.option("--t-end", type=float, default=None)
@click.option("--dt", type=float, default=1e-5, show_default=True)
@click.option("--record-every", type=int, default=100, show_default=True)
@click.option("--channels", default="force", show_default=True, help="Comma-separated channel names.")
@click.option("-o", "--output", required=True, type=str)
@click.pass_obj
@_handle_errors
def sweep(url, config_path, sweep_path, pulse, power, current, rate, duty, n_pulses, t_end, dt, record_every, channels, output):
    """Run a parameter sweep and write the min/nominal/max envelope as CSV."""
    if not os.path.exists(sweep_path):
        raise HledError(f"sweep file not found: {sweep_path}")
    with open(sweep_path, encoding="utf-8") as fh:
        sweep_spec = json.load(fh)
    with _client(url) as client:
        req = {
            "drive": _drive_payload(client, pulse, power, current, rate, duty, n_pulses),
            "sim": {"dt": dt, "t_end": t_end, "record_every": record_every},
            "sweep": sweep_spec,
        }
        device = _load_config(config_path)
        if device is not None:
            req["device"] = device
        data = _call(client, "POST", "/sweep", json=req)
    wanted = [c.strip() for c in channels.split(",") if c.strip()]
    for c in wanted:
        if c not in data["nominal"]:
            raise HledError(f"unknown channel {c!r}; have {sorted(data['nominal'])}")
    n = len(data["nominal"][wanted[0]])
    cols = {"t_s": np.arange(n) * data["dt"]}
    for c in wanted:
        cols[f"{c}_min"] = np.asarray(data["lower"][c])
        cols[f"{c}_nom"] = np.asarray(data["nominal"][c])
        cols[f"{c}_max"] = np.asarray(data["upper"][c])
    write_csv(output, cols)
    click.echo(f"wrote {output}")


@main.command()
@click.option("--data", "data_path", required=True, type=str, help="CSV with t_s,F_N columns.")
@click.option("--config", "config_path", type=str, default=None, help="Initial-guess device config.")
@_drive_options
@click.option("--free", "free_params", default="R_abs", show_default=True, help="Comma-separated free parameters.")
@click.option("--budget", type=int, default=2000, show_default=True)
@click.option("-o", "--output", required=True, type=str)
@click.pass_obj
@_handle_errors
def fit(url, data_path, config_path, pulse, power, current, rate, duty, n_pulses, free_params, budget, output):
    """Fit device parameters to a measured force trace; write FitResult JSON."""
    if not os.path.exists(data_path):
        raise HledError(f"data file not found: {data_path}")
    table = read_csv(data_path)
    for col in ("t_s", "F_N"):
        if col not in table:
            raise HledError(f"data CSV missing required column {col!r}")
    dt = uniform_dt(table["t_s"])
    with _client(url) as client:
        req = {
            "dt": dt,
            "force": table["F_N"].tolist(),
            "drive": _drive_payload(client, pulse, power, current, rate, duty, n_pulses),
            "free_params": [p.strip() for p in free_params.split(",") if p.strip()],
            "budget": budget,
        }
        if "z_m" in table:
            req["displacement"] = table["z_m"].tolist()
        device = _load_config(config_path)
        if device is not None:
            req["init"] = device
        data = _call(client, "POST", "/fit", json=req)
    write_json(output, data)
    click.echo(f"wrote {output}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@_handle_errors
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()

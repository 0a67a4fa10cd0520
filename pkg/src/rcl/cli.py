"""Command line front end: run, sweep, check-theorem, replay, serve.

A thin client over the HTTP surface.  By default requests go to an
in-process application via an ASGI transport; ``--server URL`` points
the same commands at a remote instance instead.

Exit codes are stable per failure class: 2 malformed or rejected
scenario, 3 invalid trace, 4 sweep cap exceeded, 5 replay divergence,
1 failed suite cells.
"""

from __future__ import annotations

import asyncio
import json
import sys
from pathlib import Path
from typing import Optional

import click
import httpx

_EXITS = {
    "bad_scenario": 2,
    "invalid_trace": 3,
    "cap_exceeded": 4,
    "replay_divergence": 5,
}

# menu presets: which protocol/punishment combination a sweep exercises
_MENUS = {
    "plain": ("base", False),
    "baiting": ("base", True),
    "hardened": ("hardened", False),
}


def _post(server: Optional[str], path: str, payload: dict) -> httpx.Response:
    if server is None:
        from .service import app

        async def go():
            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://sim"
            ) as client:
                return await client.post(path, json=payload, timeout=600.0)

        return asyncio.run(go())
    with httpx.Client(base_url=server, timeout=600.0) as client:
        return client.post(path, json=payload)


def _bail(resp: httpx.Response):
    """Translate a service error body into the contract exit code."""
    try:
        doc = resp.json()
    except ValueError:
        doc = {}
    code = doc.get("error", "")
    detail = doc.get("detail", resp.text)
    click.echo(f"error[{code or resp.status_code}]: {detail}", err=True)
    if code in _EXITS:
        sys.exit(_EXITS[code])
    sys.exit(2 if resp.status_code == 422 else 1)


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


@click.group()
@click.option(
    "--server",
    envvar="RCL_SERVER",
    default=None,
    help="Base URL of a running service; default is in-process.",
)
@click.pass_context
def main(ctx, server):
    """Deterministic consensus-game simulator and equilibrium checker."""
    ctx.obj = server


@main.command("run")
@click.argument("scenario", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Trace destination; default <scenario>.trace.")
@click.pass_obj
def run_cmd(server, scenario, seed, out):
    """Execute one scenario file; write its trace and print a summary."""
    try:
        doc = json.loads(Path(scenario).read_text())
    except ValueError as exc:
        click.echo(f"error[bad_scenario]: malformed JSON: {exc}", err=True)
        sys.exit(2)
    payload: dict = {"scenario": doc}
    if seed is not None:
        payload["seed"] = seed
    resp = _post(server, "/run", payload)
    if resp.status_code != 200:
        _bail(resp)
    body = resp.json()
    trace_path = out or str(Path(scenario).with_suffix(".trace"))
    Path(trace_path).write_text(body["trace"])
    summary = {
        "outcome": body["outcome"],
        "last_step": body["last_step"],
        "decisions": body["decisions"],
        "utilities": body["utilities"],
        "exposed": body["exposed"],
        "config_digest": body["config_digest"],
        "trace": trace_path,
    }
    click.echo(json.dumps(summary, sort_keys=True))


@main.command("sweep")
@click.option("--max-n", type=int, default=8, show_default=True)
@click.option("--property", "property_name", default="ktCrashRobustness",
              show_default=True)
@click.option("--menu", type=click.Choice(sorted(_MENUS)), default="plain",
              show_default=True, help="Protocol/punishment preset.")
@click.option("--valuation", type=click.Choice(["default", "alternate"]),
              default="default", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--quorum-delta", type=int, default=0, show_default=True,
              help="Shrink the quorum below its tolerance-matched size.")
@click.option("--cap", type=int, default=None, help="Refuse larger cell grids.")
@click.option("--force", is_flag=True, help="Ignore the cap.")
@click.option("--threads", type=int, default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="CSV destination; default stdout.")
@click.pass_obj
def sweep_cmd(server, max_n, property_name, menu, valuation, seed,
              quorum_delta, cap, force, threads, out):
    """Sweep the budget boundary grid and emit one CSV row per cell."""
    protocol, baiting = _MENUS[menu]
    payload = {
        "max_n": max_n,
        "property": property_name,
        "protocol": protocol,
        "baiting": baiting,
        "valuation": valuation,
        "seeds": [seed],
        "quorum_delta": quorum_delta,
        "force": force,
    }
    if cap is not None:
        payload["cap"] = cap
    if threads is not None:
        payload["threads"] = threads
    resp = _post(server, "/sweep", payload)
    if resp.status_code != 200:
        _bail(resp)
    _emit(resp.json()["csv"], out)


@main.command("check-theorem")
@click.argument("name")
@click.option("--cap", type=int, default=8, show_default=True,
              help="Largest n the suite may sweep.")
@click.option("--quorum-delta", type=int, default=0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--threads", type=int, default=None)
@click.pass_obj
def check_cmd(server, name, cap, quorum_delta, seed, threads):
    """Run one named invariant suite; nonzero exit on any failed cell."""
    payload = {
        "name": name,
        "max_n": cap,
        "quorum_delta": quorum_delta,
        "seeds": [seed],
    }
    if threads is not None:
        payload["threads"] = threads
    resp = _post(server, "/check-theorem", payload)
    if resp.status_code != 200:
        _bail(resp)
    body = resp.json()
    verdict = "PASS" if body["passed"] else "FAIL"
    click.echo(f"suite {body['suite']}: {verdict} ({len(body['cells'])} cells)")
    if body["passed"]:
        return
    for cell in body["cells"]:
        if not cell["ok"]:
            click.echo(json.dumps(cell, sort_keys=True))
    sys.exit(1)


@main.command("replay")
@click.argument("trace", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def replay_cmd(server, trace):
    """Re-execute a trace and verify it reproduces bit for bit."""
    resp = _post(server, "/replay", {"trace": Path(trace).read_text()})
    if resp.status_code != 200:
        _bail(resp)
    body = resp.json()
    click.echo(
        f"OK {body['outcome']} steps={body['steps']} config={body['config_digest']}"
    )


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve_cmd(host, port):
    """Start the HTTP service."""
    import uvicorn

    uvicorn.run("rcl.service:app", host=host, port=port)


if __name__ == "__main__":
    main()

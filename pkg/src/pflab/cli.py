"""Command line entry points.

Exit codes: 0 success, 2 usage errors, 3 domain errors (validation,
scheduling conflicts, no adequate cable, ...), 4 I/O errors (missing
files, busy ports). Failures print one ``error: <code>: <message>``
line on stderr.
"""

from __future__ import annotations

import csv
import functools
import json
import socket
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import click

from .clock import WallClock
from .config import load_config
from .errors import LabError
from .eventlog import read_events
from .report import build_report, render_figures
from .sessions import SessionService

EXIT_DOMAIN = 3
EXIT_IO = 4


def _fail(code: str, message: str, exit_code: int) -> None:
    click.echo(f"error: {code}: {message}", err=True)
    sys.exit(exit_code)


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except LabError as exc:
            _fail(exc.code, str(exc), EXIT_DOMAIN)
        except OSError as exc:
            _fail("io", str(exc), EXIT_IO)

    return wrapper


def _parse_when(value: str) -> float:
    """Epoch seconds or ISO-8601; naive timestamps are read as UTC."""
    try:
        return float(value)
    except ValueError:
        pass
    try:
        dt = datetime.fromisoformat(value)
    except ValueError:
        raise click.BadParameter(f"not an epoch or ISO-8601 time: {value!r}")
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def _iso(ts: float) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).isoformat()


_config_option = click.option(
    "--config",
    "config_path",
    default="./lab.json",
    show_default=True,
    help="deployment description (JSON)",
)


@click.group()
def main():
    """Remote power-factor correction lab."""


@main.command()
@_config_option
@click.option("--bind", default=None, help="host:port override")
@_guarded
def serve(config_path: str, bind: str | None):
    """Run the lab service until interrupted."""
    config = load_config(config_path)
    if bind:
        config = replace(config, bind=bind)
    host, port = config.host, config.port

    # fail fast with a clear line instead of uvicorn's logged traceback
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    finally:
        probe.close()

    import uvicorn

    from .gateway import build

    app, service = build(config, clock=WallClock())
    service.start_pacemaker()
    print(f"pflab: listening on http://{host}:{port}", flush=True)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    finally:
        service.shutdown()


@main.command()
@click.option("--reg", "registration", type=int, required=True, help="registration number")
@click.option("--target-pf", default=0.99, show_default=True)
@click.option("--length-m", default=20.0, show_default=True, help="cable run length")
@click.option("--freq", default=50.0, show_default=True, help="supply frequency (Hz)")
@click.option("--json", "as_json", is_flag=True, help="emit the JSON document instead")
@click.option(
    "--out",
    "out_dir",
    type=click.Path(file_okay=False),
    default=None,
    help="directory for figures plus report.txt / report.json",
)
@_guarded
def pfcalc(registration, target_pf, length_m, freq, as_json, out_dir):
    """Size the cable and correction capacitor for one registration."""
    report = build_report(
        registration, target_pf=target_pf, length_m=length_m, frequency=freq
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(report.to_text(), encoding="utf-8")
        (out / "report.json").write_text(report.to_json(), encoding="utf-8")
        render_figures(report, out)
    click.echo(report.to_json() if as_json else report.to_text(), nl=False)


def _session_service(config_path: str) -> SessionService:
    config = load_config(config_path)
    return SessionService(
        clock=WallClock(), grace=config.grace, slots_path=config.slots_path
    )


@main.group()
def slots():
    """Manage the booking sheet."""


@slots.command("add")
@_config_option
@click.option("--student", required=True)
@click.option("--start", required=True, help="epoch seconds or ISO-8601 (UTC if naive)")
@click.option("--end", required=True, help="epoch seconds or ISO-8601 (UTC if naive)")
@click.option("--code", default=None, help="claim code (generated when omitted)")
@_guarded
def slots_add(config_path, student, start, end, code):
    """Book one exclusive slot and print its claim code."""
    service = _session_service(config_path)
    slot = service.create_slot(
        student, _parse_when(start), _parse_when(end), claim_code=code
    )
    click.echo(
        f"{slot.slot_id}\t{slot.student_id}\t{_iso(slot.start)}\t"
        f"{_iso(slot.end)}\t{slot.claim_code}"
    )


@slots.command("list")
@_config_option
@_guarded
def slots_list(config_path):
    """One tab-separated line per slot: id, student, start, end, code."""
    service = _session_service(config_path)
    for slot in service.list_slots():
        click.echo(
            f"{slot.slot_id}\t{slot.student_id}\t{_iso(slot.start)}\t"
            f"{_iso(slot.end)}\t{slot.claim_code}"
        )


@slots.command("revoke")
@_config_option
@click.argument("slot_id")
@_guarded
def slots_revoke(config_path, slot_id):
    """Drop a slot (and any token issued against it)."""
    service = _session_service(config_path)
    service.revoke_slot(slot_id)
    click.echo(f"revoked: {slot_id}")


@main.group()
def log():
    """Work with the append-only event log."""


@log.command("export")
@click.option("--log", "log_path", default="events.jsonl", show_default=True)
@click.option("--session", "session_id", default=None, help="keep one session only")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["jsonl", "csv"]),
    default="jsonl",
    show_default=True,
)
@click.option("--out", "out_path", default="-", show_default=True, help="- is stdout")
@_guarded
def log_export(log_path, session_id, fmt, out_path):
    """Re-emit log events, optionally filtered to one session.

    CSV columns are ts, session, kind, payload (payload stays JSON);
    no header row, so both formats yield one row per event.
    """
    events = read_events(log_path)
    if session_id is not None:
        events = [e for e in events if e["session"] == session_id]

    sink = sys.stdout if out_path == "-" else open(out_path, "w", encoding="utf-8")
    try:
        if fmt == "jsonl":
            for event in events:
                sink.write(json.dumps(event) + "\n")
        else:
            writer = csv.writer(sink)
            for event in events:
                writer.writerow(
                    [
                        event["ts"],
                        event["session"] if event["session"] is not None else "",
                        event["kind"],
                        json.dumps(event["payload"]),
                    ]
                )
    finally:
        if sink is not sys.stdout:
            sink.close()


if __name__ == "__main__":
    main()

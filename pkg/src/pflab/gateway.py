"""HTTP/WebSocket face of the rig.

Versioned JSON API under /api/v1: measurement polling, relay control,
session claim/release, a scope stream, rig constants for UI axes, and
two admin surfaces (variac, status). All mutations funnel through the
rig controller and the session arbiter; this layer only translates
transport concerns (auth headers, status codes, rate limits, logging).

Reads are token-gated by default; observer_mode opens them up while
control stays exclusive to the token holder.
"""

from __future__ import annotations

import asyncio
import json
import sys
import threading
from typing import Any

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .circuit import RigState, WaveformWindow
from .clock import Clock, SimulatedClock, WallClock
from .config import LabConfig
from .errors import LabError, RangeError
from .eventlog import EventLog
from .rig import FrameEvent, RigController
from .sessions import SessionService

RATE_CAPACITY = 10.0
RATE_REFILL_PER_S = 5.0
MAX_SUBSCRIBE_HZ = 5.0
WS_POLICY_VIOLATION = 4400
WS_UNAUTHORIZED = 4401

_ERROR_STATUS = {
    "range": 422,
    "config": 400,
    "degenerate": 409,
    "interval": 422,
    "overlap": 409,
    "unknown_code": 404,
    "unknown_slot": 404,
    "not_your_time": 403,
    "already_claimed": 409,
}


class RateLimiter:
    """Token bucket per caller key; refill 5/s, burst 10."""

    def __init__(self, clock: Clock, capacity: float = RATE_CAPACITY,
                 refill: float = RATE_REFILL_PER_S):
        self.clock = clock
        self.capacity = capacity
        self.refill = refill
        self._buckets: dict[str, tuple[float, float]] = {}
        self._lock = threading.Lock()

    def allow(self, key: str) -> bool:
        now = self.clock.now()
        with self._lock:
            level, stamp = self._buckets.get(key, (self.capacity, now))
            level = min(self.capacity, level + (now - stamp) * self.refill)
            if level < 1.0:
                self._buckets[key] = (level, now)
                return False
            self._buckets[key] = (level - 1.0, now)
            return True


class Service:
    """Everything the endpoints share, wired once at startup."""

    def __init__(self, config: LabConfig, clock: Clock | None = None):
        self.config = config
        self.clock = clock if clock is not None else WallClock()
        self.rig = RigController(
            config.rig, clock=self.clock, settle_delay=config.settle_delay
        )
        self.sessions = SessionService(
            clock=self.clock, grace=config.grace, slots_path=config.slots_path
        )
        self.log = EventLog(config.log_path)
        self.limiter = RateLimiter(self.clock)
        self._stop = threading.Event()
        self._pacemaker: threading.Thread | None = None
        self.rig.subscribe(self._on_frame)

    # frames reach the log through the controller's listener hook, so
    # decimation sees every tick regardless of who triggered the poll
    def _on_frame(self, event: FrameEvent) -> None:
        session = self.sessions.active_slot_id(now=event.timestamp)
        if event.ok:
            payload = event.frame.to_dict()
        else:
            payload = {"error": event.error, "timestamp": event.timestamp}
        self.log.log_frame(event.timestamp, payload, session=session)

    def start_pacemaker(self) -> None:
        """Wall-clock deployments keep the loop ticking while idle."""
        if self._pacemaker is not None:
            return

        def run() -> None:
            while not self._stop.is_set():
                self.rig.poll()
                self._stop.wait(self.rig.window_period / 2)

        self._pacemaker = threading.Thread(
            target=run, name="rig-pacemaker", daemon=True
        )
        self._pacemaker.start()

    def shutdown(self) -> None:
        self._stop.set()
        if self._pacemaker is not None:
            self._pacemaker.join(timeout=2.0)
            self._pacemaker = None


def rig_state_dict(state: RigState) -> dict[str, Any]:
    return {
        "capacitor_engaged": state.capacitor_engaged,
        "variac_fraction": state.variac_fraction,
        "load_fraction": state.load_fraction,
    }


def window_message(window: WaveformWindow, state: RigState) -> dict[str, Any]:
    return {
        "type": "window",
        "t0": window.t0,
        "sample_rate": window.sample_rate,
        "cycles": window.cycles,
        "v": [round(float(x), 6) for x in window.v_samples],
        "i": [round(float(x), 6) for x in window.i_samples],
        "capacitor_engaged": state.capacitor_engaged,
    }


def _error_body(code: str, message: str) -> dict[str, Any]:
    return {"error": {"code": code, "message": message}}


def _bearer_token(request: Request) -> str | None:
    header = request.headers.get("authorization", "")
    if header.lower().startswith("bearer "):
        return header[7:].strip() or None
    return request.query_params.get("token")


def create_app(service: Service) -> FastAPI:
    app = FastAPI(title="pflab", docs_url=None, redoc_url=None)
    app.state.service = service

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    sessions = service.sessions
    rig = service.rig
    clock = service.clock

    @app.exception_handler(LabError)
    async def lab_error_handler(request: Request, exc: LabError):
        status = _ERROR_STATUS.get(exc.code, 400)
        return JSONResponse(_error_body(exc.code, str(exc)), status_code=status)

    @app.middleware("http")
    async def request_log(request: Request, call_next):
        response = await call_next(request)
        line = {
            "at": clock.now(),
            "method": request.method,
            "path": request.url.path,
            "status": response.status_code,
        }
        print(json.dumps(line), file=sys.stdout, flush=False)
        return response

    def deny(reason: str) -> JSONResponse:
        status = 401 if reason in ("unknown", "missing") else 403
        return JSONResponse(
            _error_body("auth", f"control token {reason}"), status_code=status
        )

    def check_read(request: Request) -> JSONResponse | None:
        if service.config.observer_mode:
            return None
        result = sessions.authorize(_bearer_token(request))
        return None if result.allow else deny(result.reason or "missing")

    def check_control(request: Request) -> tuple[str | None, JSONResponse | None]:
        token = _bearer_token(request)
        result = sessions.authorize(token)
        if not result.allow:
            return None, deny(result.reason or "missing")
        return result.slot_id, None

    def check_rate(request: Request) -> JSONResponse | None:
        key = _bearer_token(request) or (request.client.host if request.client else "anon")
        if service.limiter.allow(key):
            return None
        return JSONResponse(
            _error_body("rate_limited", "too many requests"), status_code=429
        )

    def check_admin(request: Request) -> JSONResponse | None:
        configured = service.config.admin_key
        if configured is None:
            return JSONResponse(
                _error_body("auth", "no admin key configured"), status_code=403
            )
        if request.headers.get("x-admin-key") != configured:
            return JSONResponse(
                _error_body("auth", "bad admin key"), status_code=403
            )
        return None

    # -- read surface -----------------------------------------------------

    @app.get("/api/v1/measurements")
    async def measurements(request: Request):
        if (denied := check_read(request)) is not None:
            return denied
        if (limited := check_rate(request)) is not None:
            return limited
        rig.poll()
        event = rig.latest
        if event is None:
            return JSONResponse(
                _error_body("warming_up", "no frames yet"), status_code=503
            )
        stale = rig.settling
        if not event.ok:
            body = {
                "frame": None,
                "error": event.error,
                "stale": stale,
                "timestamp": event.timestamp,
            }
            return JSONResponse(body, status_code=200)
        return {"frame": event.frame.to_dict(), "stale": stale, "error": None}

    @app.get("/api/v1/rig/config")
    async def rig_config():
        cfg = service.config.rig
        return {
            "frequency": cfg.frequency,
            "sample_rate": cfg.sample_rate,
            "v_nominal": cfg.source_vrms,
            "window_cycles": rig.window_cycles,
            "scope_max_cycles": 10,
        }

    @app.get("/api/v1/status")
    async def status(request: Request):
        if (denied := check_admin(request)) is not None:
            return denied
        rig.poll()
        return {
            "rig": rig.status(),
            "log_degraded": service.log.degraded,
            "active_session": sessions.active_slot_id(),
            "observer_mode": service.config.observer_mode,
        }

    # -- session surface ----------------------------------------------------

    @app.post("/api/v1/session/claim")
    async def claim(request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError:
            return JSONResponse(
                _error_body("bad_request", "body must be JSON"), status_code=400
            )
        code = body.get("claim_code") if isinstance(body, dict) else None
        if not isinstance(code, str) or not code:
            return JSONResponse(
                _error_body("bad_request", "claim_code required"), status_code=400
            )
        token = sessions.claim(code)
        service.log.log(
            clock.now(), "claim", {"slot_id": token.slot_id}, session=token.slot_id
        )
        return token.to_dict()

    @app.delete("/api/v1/session")
    async def release(request: Request):
        token = _bearer_token(request)
        slot = sessions.active_slot_id()
        released = sessions.release(token)
        if released:
            service.log.log(clock.now(), "release", {}, session=slot)
        return {"released": released}

    # -- control surface ----------------------------------------------------

    @app.post("/api/v1/relay")
    async def relay(request: Request):
        slot_id, denied = check_control(request)
        if denied is not None:
            return denied
        if (limited := check_rate(request)) is not None:
            return limited
        try:
            body = await request.json()
        except json.JSONDecodeError:
            return JSONResponse(
                _error_body("bad_request", "body must be JSON"), status_code=400
            )
        engaged = body.get("engaged") if isinstance(body, dict) else None
        if not isinstance(engaged, bool):
            return JSONResponse(
                _error_body("bad_request", "engaged must be a boolean"),
                status_code=400,
            )
        state = rig.set_capacitor(engaged)
        service.log.log(
            clock.now(),
            "command",
            {"name": "relay", "engaged": engaged},
            session=slot_id,
        )
        return rig_state_dict(state)

    @app.post("/api/v1/variac")
    async def variac(request: Request):
        if (denied := check_admin(request)) is not None:
            return denied
        try:
            body = await request.json()
        except json.JSONDecodeError:
            return JSONResponse(
                _error_body("bad_request", "body must be JSON"), status_code=400
            )
        fraction = body.get("fraction") if isinstance(body, dict) else None
        if not isinstance(fraction, (int, float)) or isinstance(fraction, bool):
            return JSONResponse(
                _error_body("bad_request", "fraction must be a number"),
                status_code=400,
            )
        state = rig.set_variac(float(fraction))
        service.log.log(
            clock.now(),
            "command",
            {"name": "variac", "fraction": float(fraction)},
            session=sessions.active_slot_id(),
        )
        return rig_state_dict(state)

    # -- scope stream ---------------------------------------------------------

    async def _scope_authorized(ws: WebSocket) -> bool:
        if service.config.observer_mode:
            return True
        token = ws.query_params.get("token")
        return sessions.authorize(token).allow

    async def _send_window(ws: WebSocket, cycles: int) -> None:
        window = rig.capture_scope(cycles)
        await ws.send_json(window_message(window, rig.state))

    @app.websocket("/api/v1/scope")
    async def scope(ws: WebSocket):
        await ws.accept()
        if not await _scope_authorized(ws):
            await ws.close(code=WS_UNAUTHORIZED, reason="control token required")
            return
        slot = sessions.active_slot_id()
        subscribe_hz: float | None = None
        subscribe_cycles = 2
        recv_task: asyncio.Task | None = None
        try:
            while True:
                if subscribe_hz is None:
                    raw = await ws.receive_text()
                else:
                    if recv_task is None:
                        recv_task = asyncio.ensure_future(ws.receive_text())
                    interval = 1.0 / subscribe_hz
                    if isinstance(clock, SimulatedClock):
                        clock.sleep(interval)
                        timeout = 0.0
                    else:
                        timeout = interval
                    done, _ = await asyncio.wait({recv_task}, timeout=timeout)
                    if not done:
                        await _send_window(ws, subscribe_cycles)
                        continue
                    raw = recv_task.result()
                    recv_task = None

                try:
                    message = json.loads(raw)
                except json.JSONDecodeError:
                    await ws.close(code=WS_POLICY_VIOLATION, reason="not JSON")
                    return
                if not isinstance(message, dict) or not (
                    "cycles" in message or "subscribe" in message
                ):
                    await ws.close(
                        code=WS_POLICY_VIOLATION, reason="unknown message"
                    )
                    return

                if "subscribe" in message:
                    hz = message["subscribe"]
                    if not isinstance(hz, (int, float)) or isinstance(hz, bool) or hz < 0:
                        await ws.send_json(
                            _error_body("range", "subscribe must be a rate in Hz")
                        )
                        continue
                    if hz == 0:
                        subscribe_hz = None  # unsubscribe
                        if recv_task is not None:
                            recv_task.cancel()
                            recv_task = None
                        await ws.send_json({"type": "unsubscribed"})
                        continue
                    subscribe_hz = min(float(hz), MAX_SUBSCRIBE_HZ)
                    raw_cycles = message.get("cycles", 2)
                    if isinstance(raw_cycles, int) and 1 <= raw_cycles <= 10:
                        subscribe_cycles = raw_cycles
                    service.log.log(
                        clock.now(),
                        "scope",
                        {"subscribe": subscribe_hz, "cycles": subscribe_cycles},
                        session=slot,
                    )
                    await ws.send_json(
                        {"type": "subscribed", "hz": subscribe_hz}
                    )
                    continue

                cycles = message["cycles"]
                if not isinstance(cycles, int) or isinstance(cycles, bool):
                    await ws.send_json(
                        _error_body("range", "cycles must be an integer")
                    )
                    continue
                try:
                    window = rig.capture_scope(cycles)
                except RangeError as exc:
                    await ws.send_json(_error_body(exc.code, str(exc)))
                    continue
                service.log.log(
                    clock.now(), "scope", {"cycles": cycles}, session=slot
                )
                await ws.send_json(window_message(window, rig.state))
        except WebSocketDisconnect:
            pass
        finally:
            if recv_task is not None:
                recv_task.cancel()

    return app


def build(config: LabConfig, clock: Clock | None = None) -> tuple[FastAPI, Service]:
    service = Service(config, clock=clock)
    return create_app(service), service

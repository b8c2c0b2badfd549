"""HTTP service for interactive experiments with a human in the loop.

A session serves one seeded stream of strips. The human plays Alice, Bob,
or both (two participant tokens); whoever is not human is simulated. Views
expose exactly what a player could see at the table: the three local
symbols, the plate side, and - in nonlocal mode, where Bob's choice is
communicated - his letter. The opposite-face signs, the orientation and
raw cell indices never appear on the wire.

Turn structure per trial: awaiting_choice -> (choices in) -> revealed ->
advance -> awaiting_choice. Requests within a session are serialized, so a
trial can never be double-counted. Closing a session returns the final
statistics plus the full trial log in the same line-record schema the CLI
exports, and removes the session; later requests get 404 unknown_session.

The human's acceptance behaviour is never configured, only measured: the
running per-side accept rates and the Bell average are the behavioural
readout.
"""

from __future__ import annotations

import secrets
import threading
from dataclasses import dataclass, field
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .experiment import (
    Mode,
    PlateSide,
    Streams,
    TrialRecord,
    draw_serving,
    finish_trial,
)
from .measure import ACCEPT, AliceDecision, suggested_letter
from .stats import (
    PAIR_LABELS,
    PairCounts,
    bell_report,
    handedness,
    pair_index,
)
from .strip import Letter, ServingConfig, clockwise_step, local_view


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _unknown_session(session_id: str) -> ApiError:
    return ApiError(404, "unknown_session", f"no session {session_id!r}")


def _wrong_phase(message: str) -> ApiError:
    return ApiError(409, "wrong_phase", message)


def _bad_choice(message: str) -> ApiError:
    return ApiError(400, "bad_choice", message)


def _mode_mismatch(message: str) -> ApiError:
    return ApiError(403, "mode_mismatch", message)


class CreateSessionRequest(BaseModel):
    mode: Literal["human_alice", "human_bob", "human_both"]
    experiment_mode: Literal["standard", "nonlocal"] = "standard"
    seed: int | None = None
    alice_p: float = 0.5  # simulated Alice, used when the human plays Bob


class ChoiceRequest(BaseModel):
    token: str | None = None
    action: Literal["accept", "reject"] | None = None
    direction: Literal["cw", "ccw"] | None = None
    letter: Literal["B", "B'"] | None = None


@dataclass
class Session:
    id: str
    mode: str
    experiment_mode: Mode
    seed: int
    streams: Streams
    sim_alice_p: float
    phase: str = "awaiting_choice"
    trial_index: int = 0
    config: ServingConfig | None = None
    side: PlateSide | None = None
    bob_letter: Letter | None = None  # simulated Bob's pick, or human Bob's once in
    sim_alice_accept: bool | None = None
    pending_alice: AliceDecision | None = None
    last_record: TrialRecord | None = None
    counts: PairCounts = field(default_factory=PairCounts)
    side_counts: dict[str, PairCounts] = field(
        default_factory=lambda: {"left": PairCounts(), "right": PairCounts()}
    )
    served: dict[str, int] = field(default_factory=lambda: {"left": 0, "right": 0})
    accepted: dict[str, int] = field(default_factory=lambda: {"left": 0, "right": 0})
    records: list[TrialRecord] = field(default_factory=list)
    alice_token: str | None = None
    bob_token: str | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def human_alice(self) -> bool:
        return self.mode in ("human_alice", "human_both")

    @property
    def human_bob(self) -> bool:
        return self.mode in ("human_bob", "human_both")

    def serve_next(self) -> None:
        self.config, self.side = draw_serving(self.streams.serving)
        self.bob_letter = None
        self.sim_alice_accept = None
        self.pending_alice = None
        if not self.human_bob:
            self.bob_letter = (Letter.B, Letter.B_PRIME)[int(self.streams.bob.integers(0, 2))]
        if not self.human_alice:
            self.sim_alice_accept = bool(self.streams.alice.random() < self.sim_alice_p)
        self.phase = "awaiting_choice"

    def role_for(self, token: str | None) -> str:
        if self.mode == "human_alice":
            return "alice"
        if self.mode == "human_bob":
            return "bob"
        if token == self.alice_token:
            return "alice"
        if token == self.bob_token:
            return "bob"
        raise _mode_mismatch("human_both sessions require a valid participant token")

    def trial_view(self, role: str) -> dict:
        assert self.config is not None and self.side is not None
        view_symbols = local_view(self.config)
        doc = {
            "trial_index": self.trial_index,
            "role": role,
            "plate_side": self.side.value if role == "alice" else None,
            "front": _symbol_doc(view_symbols.front),
            "left": _symbol_doc(view_symbols.left),
            "right": _symbol_doc(view_symbols.right),
            "suggested_letter": suggested_letter(self.config).value,
        }
        if role == "alice" and self.experiment_mode is Mode.NONLOCAL:
            # The signalling step: Bob's communicated letter, once he has chosen.
            doc["bob_letter"] = self.bob_letter.value if self.bob_letter is not None else None
        return doc

    def reveal(self, decision: AliceDecision, bob_letter: Letter) -> TrialRecord:
        assert self.config is not None and self.side is not None
        record = finish_trial(
            self.trial_index, self.config, self.side, bob_letter, decision, self.experiment_mode
        )
        self.counts.add_record(record)
        self.side_counts[self.side.value].add_record(record)
        self.served[self.side.value] += 1
        if record.alice_accepted:
            self.accepted[self.side.value] += 1
        self.records.append(record)
        self.last_record = record
        self.phase = "revealed"
        return record

    def stats_doc(self) -> dict:
        report = bell_report(self.counts)
        hand = handedness(self.side_counts["left"], self.side_counts["right"])
        rates = {
            side: (self.accepted[side] / self.served[side] if self.served[side] else None)
            for side in ("left", "right")
        }
        return {
            "n_trials": self.counts.n_trials,
            "bell": report.to_dict(),
            "handedness": hand.to_dict(),
            "accept_rates": rates,
            "served": dict(self.served),
            "accepted": dict(self.accepted),
        }

    def reveal_doc(self) -> dict:
        record = self.last_record
        assert record is not None
        return {
            "trial_index": record.index,
            "alice_letter": record.alice_letter.value,
            "alice_value": record.alice_value,
            "alice_accepted": record.alice_accepted,
            "alice_direction": record.alice_direction,
            "bob_letter": record.bob_letter.value,
            "bob_value": record.bob_value,
            "product": record.alice_value * record.bob_value,
            "pair": PAIR_LABELS[pair_index(record.alice_letter, record.bob_letter)],
            "stats": self.stats_doc(),
        }


def _symbol_doc(symbol) -> dict:
    return {"letter": symbol.letter.value, "sign": symbol.sign}


def create_app() -> FastAPI:
    app = FastAPI(title="moebius-bell sessions")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()
    app.state.sessions = sessions

    def get_session(session_id: str) -> Session:
        with registry_lock:
            session = sessions.get(session_id)
        if session is None:
            raise _unknown_session(session_id)
        return session

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse({"code": exc.code, "message": exc.message}, status_code=exc.status)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        return JSONResponse({"code": "bad_choice", "message": str(exc.errors())}, status_code=400)

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionRequest):
        if body.mode == "human_bob" and body.experiment_mode == "nonlocal":
            raise _mode_mismatch("nonlocal mode needs the human in Alice's chair")
        if not 0.0 <= body.alice_p <= 1.0:
            raise _bad_choice(f"alice_p must be in [0, 1], got {body.alice_p}")
        seed = body.seed if body.seed is not None else secrets.randbits(64)
        session = Session(
            id=secrets.token_urlsafe(12),
            mode=body.mode,
            experiment_mode=Mode(body.experiment_mode),
            seed=seed,
            streams=Streams(seed),
            sim_alice_p=body.alice_p,
        )
        if body.mode == "human_both":
            session.alice_token = secrets.token_urlsafe(9)
            session.bob_token = secrets.token_urlsafe(9)
        session.serve_next()
        with registry_lock:
            sessions[session.id] = session
        primary = "alice" if session.human_alice else "bob"
        doc = {
            "session_id": session.id,
            "mode": session.mode,
            "experiment_mode": session.experiment_mode.value,
            "seed": seed,
            "trial": session.trial_view(primary),
        }
        if body.mode == "human_both":
            doc["tokens"] = {"alice": session.alice_token, "bob": session.bob_token}
        return doc

    @app.get("/sessions/{session_id}/trial")
    def get_trial(session_id: str, token: str | None = None):
        session = get_session(session_id)
        with session.lock:
            role = session.role_for(token)
            if session.phase != "awaiting_choice":
                raise _wrong_phase(f"phase is {session.phase}, not awaiting_choice")
            return session.trial_view(role)

    @app.post("/sessions/{session_id}/choice")
    def submit_choice(session_id: str, body: ChoiceRequest):
        session = get_session(session_id)
        with session.lock:
            role = session.role_for(body.token)
            if session.phase != "awaiting_choice":
                raise _wrong_phase(f"phase is {session.phase}, not awaiting_choice")
            if role == "alice":
                decision = _parse_alice_choice(session, body)
                if session.mode == "human_both":
                    if session.pending_alice is not None:
                        raise _wrong_phase("alice already chose this trial")
                    session.pending_alice = decision
                    if session.bob_letter is None:
                        return {"phase": "awaiting_choice", "waiting_for": "bob"}
                    session.reveal(session.pending_alice, session.bob_letter)
                    return session.reveal_doc()
                assert session.bob_letter is not None  # simulated Bob chose at serve time
                session.reveal(decision, session.bob_letter)
                return session.reveal_doc()
            # role == "bob"
            if body.letter is None:
                raise _bad_choice("Bob's choice needs a letter, B or B'")
            letter = Letter(body.letter)
            if session.mode == "human_both":
                if session.bob_letter is not None:
                    raise _wrong_phase("bob already chose this trial")
                session.bob_letter = letter
                if session.pending_alice is None:
                    return {"phase": "awaiting_choice", "waiting_for": "alice"}
                session.reveal(session.pending_alice, session.bob_letter)
                return session.reveal_doc()
            assert session.sim_alice_accept is not None
            decision = ACCEPT if session.sim_alice_accept else AliceDecision(False)
            session.reveal(decision, letter)
            return session.reveal_doc()

    @app.post("/sessions/{session_id}/advance")
    def advance(session_id: str, token: str | None = None):
        session = get_session(session_id)
        with session.lock:
            role = session.role_for(token)
            if session.phase != "revealed":
                raise _wrong_phase(f"phase is {session.phase}, not revealed")
            session.trial_index += 1
            session.serve_next()
            return session.trial_view(role)

    @app.get("/sessions/{session_id}/stats")
    def get_stats(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return session.stats_doc()

    @app.delete("/sessions/{session_id}")
    def close_session(session_id: str):
        session = get_session(session_id)
        with session.lock:
            session.phase = "closed"
            doc = {
                "session_id": session.id,
                "final": session.stats_doc(),
                "trial_log": [record.to_wire() for record in session.records],
            }
        with registry_lock:
            sessions.pop(session_id, None)
        return doc

    return app


def _parse_alice_choice(session: Session, body: ChoiceRequest) -> AliceDecision:
    if body.action is None:
        raise _bad_choice("Alice's choice needs an action, accept or reject")
    if body.action == "accept":
        if body.direction is not None:
            raise _bad_choice("a direction only goes with a rejection")
        return ACCEPT
    if session.experiment_mode is Mode.NONLOCAL:
        if session.mode == "human_both" and session.bob_letter is None:
            raise _wrong_phase("bob has not communicated his letter yet")
        if body.direction is None:
            raise _bad_choice("a nonlocal rejection needs a direction, cw or ccw")
        assert session.config is not None
        step = clockwise_step(session.config.orientation)
        return AliceDecision(False, step if body.direction == "cw" else -step)
    if body.direction is not None:
        raise _bad_choice("direction is a nonlocal-mode choice")
    return AliceDecision(False)

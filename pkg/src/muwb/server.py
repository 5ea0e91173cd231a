"""Session protocol server for interactive proof development.

One JSON message in, one JSON reply out; the schema is frozen in
docs/protocol.md.  Two transports speak it:

  * HTTP: POST /api with the message as the request body (the browser
    entry point; GET serves the bundled UI when one is configured),
  * stdio: one message per line on stdin, one reply per line on stdout.

Sessions are isolated; commands within a session are serialized by a
per-session lock while other sessions stay responsive.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional, TextIO

from .kernel import KernelError
from .parser import (
    ParseError,
    format_script,
    format_tactic,
    parse_formula,
    parse_sequent,
    parse_tactic,
    parse_scripts,
    print_formula,
    print_sequent,
)
from .session import (
    GoalState,
    ProofSession,
    Qed,
    SessionError,
    TacticError,
    Undo,
    applicable,
)
from .syntax import WellFormednessError, mk_wf

PROTOCOL_VERSION = 1


def _err(kind: str, message: str, **extra) -> dict:
    return {"ok": False, "error": {"kind": kind, "message": message, **extra}}


def _span_payload(span) -> dict:
    return {"start": span.start, "end": span.end, "line": span.line, "column": span.column}


def _goal_payload(goal) -> dict:
    labels = goal.labels()
    return {
        "hypotheses": [
            {"label": labels[i], "formula": print_formula(h.prp)}
            for i, h in enumerate(goal.hyps)
        ],
        "conclusion": print_formula(goal.concl.prp),
    }


def render_display(state: GoalState) -> str:
    """The verbatim goal text a client renders, one block per state."""
    goals = state.goals
    if not goals:
        return "Subtree proved!"
    noun = "subgoal" if len(goals) == 1 else "subgoals"
    lines = [f"{len(goals)} {noun}"]
    first = goals[0]
    labels = first.labels()
    for i, h in enumerate(first.hyps):
        lines.append(f"  {labels[i]} : {print_formula(h.prp)}")
    lines.append("  ============================")
    lines.append(f"   {print_formula(first.concl.prp)}")
    for i, g in enumerate(goals[1:], start=2):
        lines.append("")
        lines.append(f"subgoal {i} is:")
        lines.append(f"   {print_formula(g.concl.prp)}")
    return "\n".join(lines)


def state_payload(state: GoalState) -> dict:
    return {
        "lemma": state.lemma_name,
        "proved": state.proved,
        "goal_count": len(state.goals),
        "goals": [_goal_payload(g) for g in state.goals],
        "display": render_display(state),
        "history_depth": len(state.history),
        "steps": [format_tactic(t) for t in state.tactic_log],
    }


@dataclass
class _Managed:
    session: ProofSession
    variables: frozenset
    lock: threading.Lock


class SessionManager:
    """Owns all live sessions and implements the protocol commands."""

    def __init__(self, max_sessions: int = 64):
        self.max_sessions = max_sessions
        self._sessions: dict[str, _Managed] = {}
        self._lock = threading.Lock()
        self._counter = 0

    # ---------------------------------------------------------- dispatch

    def handle(self, msg: object) -> dict:
        """One protocol message to one reply; never raises."""
        try:
            if not isinstance(msg, dict) or not isinstance(msg.get("cmd"), str):
                return _err("bad_request", "message must be an object with a 'cmd' field")
            handler = getattr(self, f"_cmd_{msg['cmd']}", None)
            if handler is None:
                return _err("bad_request", f"unknown command {msg['cmd']!r}")
            return handler(msg)
        except ParseError as e:
            return _err("parse_error", str(e), span=_span_payload(e.span))
        except WellFormednessError as e:
            return _err(
                "wf_error",
                str(e),
                path=list(e.path),
                variable=e.variable.name,
                occurrence=list(e.occurrence),
            )
        except TacticError as e:
            return _err("tactic_error", str(e), reason=e.reason)
        except SessionError as e:
            return _err("session_error", str(e))
        except KernelError as e:
            # engine bug: reported, never swallowed
            return _err("kernel_error", str(e), reason=e.reason, path=list(e.path))
        except Exception as e:  # malformed input must not kill the server
            return _err("internal", f"{type(e).__name__}: {e}")

    def _get(self, msg: dict) -> _Managed:
        sid = msg.get("session")
        with self._lock:
            managed = self._sessions.get(sid)
        if managed is None:
            raise SessionError(f"unknown session {sid!r}")
        return managed

    @staticmethod
    def _field(msg: dict, key: str) -> str:
        value = msg.get(key)
        if not isinstance(value, str):
            raise SessionError(f"missing string field {key!r}")
        return value

    # ---------------------------------------------------------- commands

    def _cmd_ping(self, msg: dict) -> dict:
        return {"ok": True, "server": "muwb", "protocol": PROTOCOL_VERSION}

    def _cmd_new(self, msg: dict) -> dict:
        lemma = msg.get("lemma") or "lemma"
        variables = frozenset(msg.get("variables") or ())
        claim = parse_sequent(self._field(msg, "sequent"), variables)
        with self._lock:
            if len(self._sessions) >= self.max_sessions:
                return _err("max_sessions", f"session limit {self.max_sessions} reached")
            self._counter += 1
            sid = f"s{self._counter}"
            managed = _Managed(ProofSession(claim, lemma), variables, threading.Lock())
            self._sessions[sid] = managed
        return {"ok": True, "session": sid, "state": state_payload(managed.session.state)}

    def _cmd_tactic(self, msg: dict) -> dict:
        managed = self._get(msg)
        tactic = parse_tactic(self._field(msg, "tactic"), managed.variables)
        with managed.lock:
            if isinstance(tactic, Qed):
                return self._finish(msg, managed)
            state = managed.session.apply(tactic)
        return {"ok": True, "state": state_payload(state)}

    def _cmd_parse(self, msg: dict) -> dict:
        # formula validation for clients: parse + well-formedness, no state change
        managed = self._get(msg)
        phi = mk_wf(parse_formula(self._field(msg, "formula"), managed.variables))
        return {"ok": True, "formula": print_formula(phi.prp)}

    def _cmd_state(self, msg: dict) -> dict:
        managed = self._get(msg)
        with managed.lock:
            return {"ok": True, "state": state_payload(managed.session.state)}

    def _cmd_undo(self, msg: dict) -> dict:
        managed = self._get(msg)
        with managed.lock:
            state = managed.session.apply(Undo())
        return {"ok": True, "state": state_payload(state)}

    def _cmd_applicable(self, msg: dict) -> dict:
        managed = self._get(msg)
        with managed.lock:
            infos = applicable(managed.session.state)
        return {
            "ok": True,
            "tactics": [
                {
                    "name": i.name,
                    "applicable": i.applicable,
                    "needs_argument": i.needs_argument,
                    "reason": i.reason,
                }
                for i in infos
            ],
        }

    def _cmd_qed(self, msg: dict) -> dict:
        managed = self._get(msg)
        with managed.lock:
            return self._finish(msg, managed)

    def _finish(self, msg: dict, managed: _Managed) -> dict:
        derivation = managed.session.qed()
        state = managed.session.state

        def rules(d) -> list:
            out = [d.rule.name]
            for p in d.premises:
                out.extend(rules(p))
            return out

        return {
            "ok": True,
            "lemma": state.lemma_name,
            "sequent": print_sequent(derivation.concl),
            "steps": len(state.tactic_log),
            "rules": rules(derivation),
            "state": state_payload(state),
        }

    def _cmd_script(self, msg: dict) -> dict:
        managed = self._get(msg)
        with managed.lock:
            state = managed.session.state
        lines = []
        if managed.variables:
            lines.append("vars " + " ".join(sorted(managed.variables)))
        lines.append(f"lemma {state.lemma_name} : {print_sequent(state.claim)}")
        for t in state.tactic_log:
            lines.append("  " + format_tactic(t))
        if state.proved:
            lines.append("qed")
        return {"ok": True, "script": "\n".join(lines) + "\n"}

    def _cmd_import(self, msg: dict) -> dict:
        scripts = parse_scripts(self._field(msg, "script"))
        if not scripts:
            return _err("parse_error", "no lemma found in script")
        script = scripts[0]
        with self._lock:
            if len(self._sessions) >= self.max_sessions:
                return _err("max_sessions", f"session limit {self.max_sessions} reached")
            self._counter += 1
            sid = f"s{self._counter}"
            managed = _Managed(
                ProofSession(script.claim, script.name),
                script.variables,
                threading.Lock(),
            )
            self._sessions[sid] = managed
        with managed.lock:
            for i, tactic in enumerate(script.tactics):
                try:
                    managed.session.apply(tactic)
                except (TacticError, SessionError) as e:
                    return {
                        "ok": False,
                        "session": sid,
                        "stopped_at": i,
                        "state": state_payload(managed.session.state),
                        "error": {"kind": "tactic_error", "message": str(e), "step": i},
                    }
            state = managed.session.state
        return {
            "ok": True,
            "session": sid,
            "stopped_at": None,
            "state": state_payload(state),
        }

    def _cmd_close(self, msg: dict) -> dict:
        sid = msg.get("session")
        with self._lock:
            if self._sessions.pop(sid, None) is None:
                raise SessionError(f"unknown session {sid!r}")
        return {"ok": True}


# ------------------------------------------------------------------- HTTP

def _make_handler(manager: SessionManager, ui_root: Optional[Path]):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):  # keep test output quiet
            pass

        def _reply_json(self, payload: dict, status: int = 200) -> None:
            body = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def do_OPTIONS(self) -> None:
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "POST, GET, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.end_headers()

        def do_POST(self) -> None:
            if self.path.rstrip("/") != "/api":
                self._reply_json(_err("bad_request", "POST to /api"), 404)
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                msg = json.loads(self.rfile.read(length) or b"null")
            except (ValueError, json.JSONDecodeError) as e:
                self._reply_json(_err("bad_request", f"invalid JSON: {e}"), 400)
                return
            self._reply_json(manager.handle(msg))

        def do_GET(self) -> None:
            path = self.path.split("?", 1)[0]
            if path in ("", "/"):
                path = "/index.html"
            if ui_root is not None:
                target = (ui_root / path.lstrip("/")).resolve()
                if target.is_file() and ui_root.resolve() in target.parents:
                    ctype = {
                        ".html": "text/html",
                        ".js": "text/javascript",
                        ".css": "text/css",
                        ".map": "application/json",
                    }.get(target.suffix, "application/octet-stream")
                    body = target.read_bytes()
                    self.send_response(200)
                    self.send_header("Content-Type", ctype)
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                    return
            if path == "/index.html":
                body = (
                    b"<!doctype html><title>muwb</title><p>muwb session server."
                    b" POST JSON messages to /api.</p>"
                )
                self.send_response(200)
                self.send_header("Content-Type", "text/html")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
                return
            self.send_response(404)
            self.end_headers()

    return Handler


def make_http_server(
    bind: str = "127.0.0.1:8750",
    max_sessions: int = 64,
    ui_root: Optional[str] = None,
) -> ThreadingHTTPServer:
    """Bind (raising OSError if the port is taken) without serving yet."""
    host, _, port_text = bind.rpartition(":")
    if not host or not port_text.isdigit():
        raise ValueError(f"bind address must be host:port, got {bind!r}")
    manager = SessionManager(max_sessions)
    root = Path(ui_root) if ui_root else None
    server = ThreadingHTTPServer((host, int(port_text)), _make_handler(manager, root))
    server.manager = manager  # type: ignore[attr-defined]
    return server


def serve(
    bind: str = "127.0.0.1:8750",
    max_sessions: int = 64,
    ui_root: Optional[str] = None,
) -> None:
    """Host sessions over HTTP until interrupted."""
    server = make_http_server(bind, max_sessions, ui_root)
    try:
        server.serve_forever()
    finally:
        server.server_close()


def serve_stdio(stdin: TextIO, stdout: TextIO, max_sessions: int = 64) -> None:
    """Speak the protocol over standard streams, one JSON object per line."""
    manager = SessionManager(max_sessions)
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as e:
            reply = _err("bad_request", f"invalid JSON: {e}")
        else:
            reply = manager.handle(msg)
        stdout.write(json.dumps(reply) + "\n")
        stdout.flush()

"""Proof-session server.

Speaks a line-delimited structured protocol over a duplex connection:
each request is one JSON object per line carrying an `id` and an `op`;
responses carry the same id.  The same port also accepts browser
connections: an HTTP request upgrades to a standard WebSocket (one JSON
object per text frame, same protocol), and a plain GET serves the
bundled UI files.  Each connection owns one isolated session.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
import socketserver
import struct
import threading
from typing import Dict, Optional, Tuple

from .errors import CurError, TacticError
from .session import SessionState

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

_MIME = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".json": "application/json",
}


def handle_request(session: SessionState, obj: object) -> dict:
    """One protocol request against one session; never raises."""
    if not isinstance(obj, dict) or "op" not in obj:
        return {"ok": False, "error": "bad request"}
    rid = obj.get("id")

    def done(payload: dict) -> dict:
        out = {"id": rid}
        out.update(payload)
        return out

    op = obj.get("op")
    try:
        if op == "load_file":
            if "source" in obj:
                lines = session.load_source(str(obj["source"]))
            elif "path" in obj:
                lines = session.load_file(str(obj["path"]))
            else:
                return done({"ok": False, "error": "bad request"})
            return done({"ok": True, "definitions": lines})
        if op == "start_proof":
            if "goal" not in obj:
                return done({"ok": False, "error": "bad request"})
            state = session.start_proof(str(obj["goal"]))
            return done({"ok": True, "state": state})
        if op == "apply_tactic":
            if "text" not in obj:
                return done({"ok": False, "error": "bad request"})
            try:
                state = session.apply(str(obj["text"]))
                return done({"ok": True, "state": state})
            except CurError as e:
                return done({"ok": False, "error": str(e), "state": session.state()})
        if op == "undo":
            state = session.undo()
            return done({"ok": True, "state": state})
        if op == "extract":
            try:
                return done({"ok": True, "term": session.extract()})
            except TacticError as e:
                return done(
                    {
                        "ok": False,
                        "error": str(e),
                        "open_goals": session.open_goal_count(),
                    }
                )
        if op == "script":
            return done({"ok": True, "steps": list(session.script)})
        return done({"ok": False, "error": "bad request"})
    except CurError as e:
        return done({"ok": False, "error": str(e)})
    except Exception as e:  # defensive: a bug must not kill the connection
        return done({"ok": False, "error": f"internal error: {e}"})


class _Handler(socketserver.StreamRequestHandler):
    server: "ProofServer"

    def handle(self) -> None:
        first = self.rfile.peek(4)[:4] if hasattr(self.rfile, "peek") else b""
        if first.startswith(b"GET "):
            self._handle_http()
        else:
            self._handle_lines()

    # -- plain line-delimited JSON --

    def _handle_lines(self) -> None:
        session = self.server.new_session()
        for raw in self.rfile:
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line.decode("utf-8"))
            except (ValueError, UnicodeDecodeError):
                self._send_line({"ok": False, "error": "bad request"})
                continue
            self._send_line(handle_request(session, obj))

    def _send_line(self, obj: dict) -> None:
        self.wfile.write(json.dumps(obj).encode("utf-8") + b"\n")
        self.wfile.flush()

    # -- http: websocket upgrade or static ui files --

    def _handle_http(self) -> None:
        request_line = self.rfile.readline().decode("latin-1").strip()
        headers: Dict[str, str] = {}
        while True:
            line = self.rfile.readline().decode("latin-1").strip()
            if not line:
                break
            if ":" in line:
                k, v = line.split(":", 1)
                headers[k.strip().lower()] = v.strip()
        parts = request_line.split()
        path = parts[1] if len(parts) > 1 else "/"
        if headers.get("upgrade", "").lower() == "websocket":
            self._handle_websocket(headers)
        else:
            self._serve_static(path)

    def _serve_static(self, path: str) -> None:
        root = self.server.ui_dir
        body = b"not found"
        status = "404 Not Found"
        ctype = "text/plain"
        if root:
            rel = path.lstrip("/") or "index.html"
            full = os.path.normpath(os.path.join(root, rel))
            if full.startswith(os.path.normpath(root)) and os.path.isfile(full):
                with open(full, "rb") as fh:
                    body = fh.read()
                status = "200 OK"
                ctype = _MIME.get(os.path.splitext(full)[1], "application/octet-stream")
        head = (
            f"HTTP/1.1 {status}\r\nContent-Type: {ctype}\r\n"
            f"Content-Length: {len(body)}\r\nConnection: close\r\n\r\n"
        )
        self.wfile.write(head.encode("latin-1") + body)

    def _handle_websocket(self, headers: Dict[str, str]) -> None:
        key = headers.get("sec-websocket-key", "")
        accept = base64.b64encode(
            hashlib.sha1((key + _WS_GUID).encode("latin-1")).digest()
        ).decode("latin-1")
        self.wfile.write(
            (
                "HTTP/1.1 101 Switching Protocols\r\n"
                "Upgrade: websocket\r\nConnection: Upgrade\r\n"
                f"Sec-WebSocket-Accept: {accept}\r\n\r\n"
            ).encode("latin-1")
        )
        self.wfile.flush()
        session = self.server.new_session()
        while True:
            msg = self._read_ws_message()
            if msg is None:
                return
            try:
                obj = json.loads(msg)
            except ValueError:
                self._send_ws(json.dumps({"ok": False, "error": "bad request"}))
                continue
            self._send_ws(json.dumps(handle_request(session, obj)))

    def _read_exact(self, n: int) -> Optional[bytes]:
        buf = b""
        while len(buf) < n:
            chunk = self.rfile.read(n - len(buf))
            if not chunk:
                return None
            buf += chunk
        return buf

    def _read_ws_message(self) -> Optional[str]:
        """One complete text message (handling continuation/ping/close)."""
        data = b""
        while True:
            head = self._read_exact(2)
            if head is None:
                return None
            b1, b2 = head
            fin = b1 & 0x80
            opcode = b1 & 0x0F
            masked = b2 & 0x80
            length = b2 & 0x7F
            if length == 126:
                ext = self._read_exact(2)
                if ext is None:
                    return None
                (length,) = struct.unpack(">H", ext)
            elif length == 127:
                ext = self._read_exact(8)
                if ext is None:
                    return None
                (length,) = struct.unpack(">Q", ext)
            mask = self._read_exact(4) if masked else b"\x00" * 4
            if mask is None:
                return None
            payload = self._read_exact(length) if length else b""
            if payload is None:
                return None
            if masked:
                payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
            if opcode == 0x8:  # close
                self._send_ws_frame(0x8, b"")
                return None
            if opcode == 0x9:  # ping -> pong
                self._send_ws_frame(0xA, payload)
                continue
            if opcode in (0x1, 0x0):
                data += payload
                if fin:
                    return data.decode("utf-8", errors="replace")
                continue
            # ignore other opcodes

    def _send_ws(self, text: str) -> None:
        self._send_ws_frame(0x1, text.encode("utf-8"))

    def _send_ws_frame(self, opcode: int, payload: bytes) -> None:
        head = bytes([0x80 | opcode])
        n = len(payload)
        if n < 126:
            head += bytes([n])
        elif n < 1 << 16:
            head += bytes([126]) + struct.pack(">H", n)
        else:
            head += bytes([127]) + struct.pack(">Q", n)
        self.wfile.write(head + payload)
        self.wfile.flush()


class ProofServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(
        self,
        addr: Tuple[str, int],
        fuel: int = 100_000,
        positivity: str = "warn",
        ui_dir: Optional[str] = None,
        preload: Optional[str] = None,
    ):
        super().__init__(addr, _Handler)
        self.fuel = fuel
        self.positivity = positivity
        self.ui_dir = ui_dir
        self.preload = preload

    def new_session(self) -> SessionState:
        session = SessionState(fuel=self.fuel, positivity=self.positivity)
        if self.preload:
            session.load_file(self.preload)
        return session


def serve(
    port: int,
    host: str = "127.0.0.1",
    fuel: int = 100_000,
    positivity: str = "warn",
    ui_dir: Optional[str] = None,
    preload: Optional[str] = None,
) -> ProofServer:
    """Start the server on `port`; returns after binding (serves forever)."""
    server = ProofServer((host, port), fuel, positivity, ui_dir, preload)
    try:
        server.serve_forever()
    finally:
        server.server_close()
    return server


def serve_background(
    port: int = 0,
    host: str = "127.0.0.1",
    fuel: int = 100_000,
    positivity: str = "warn",
    ui_dir: Optional[str] = None,
    preload: Optional[str] = None,
) -> Tuple[ProofServer, int]:
    """Start in a daemon thread; returns the server and its bound port."""
    server = ProofServer((host, port), fuel, positivity, ui_dir, preload)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, server.server_address[1]

"""The session server: line protocol, websocket framing, replay, isolation."""

import base64
import hashlib
import json
import os
import socket
import struct

import pytest

from cur_kernel.server import _WS_GUID, handle_request, serve_background
from cur_kernel.session import SessionState


@pytest.fixture(scope="module")
def server():
    srv, port = serve_background()
    yield srv, port
    srv.shutdown()


class LineClient:
    def __init__(self, port):
        self.sock = socket.create_connection(("127.0.0.1", port), timeout=10)
        self.f = self.sock.makefile("rw", encoding="utf-8")
        self._next = 0

    def rpc(self, op=None, raw=None, **fields):
        if raw is not None:
            self.f.write(raw + "\n")
        else:
            self._next += 1
            obj = {"id": self._next, "op": op}
            obj.update(fields)
            self.f.write(json.dumps(obj) + "\n")
        self.f.flush()
        return json.loads(self.f.readline())

    def close(self):
        self.sock.close()


def test_start_proof_state(server):
    _, port = server
    c = LineClient(port)
    r = c.rpc("start_proof", goal="(∀ (A : Type) (a : A) A)")
    assert r["ok"] and r["id"] == 1
    assert r["state"]["goals_total"] == 1
    assert r["state"]["goal"] == "(∀ (A : Type) (a : A) A)"
    c.close()


def test_failing_tactic_preserves_state(server):
    _, port = server
    c = LineClient(port)
    c.rpc("start_proof", goal="(∀ (A : Type) (a : A) A)")
    r = c.rpc("apply_tactic", text="assumption")
    assert not r["ok"]
    assert "no assumption" in r["error"]
    assert r["state"]["steps"] == 0
    c.close()


def test_undo_decrements(server):
    _, port = server
    c = LineClient(port)
    c.rpc("start_proof", goal="(∀ (A : Type) (a : A) A)")
    r1 = c.rpc("apply_tactic", text="(intros A a)")
    assert r1["state"]["steps"] == 1
    r2 = c.rpc("undo")
    assert r2["ok"] and r2["state"]["steps"] == 0
    c.close()


def test_script_omits_undone_step(server):
    _, port = server
    c = LineClient(port)
    c.rpc("start_proof", goal="(∀ (A : Type) (a : A) A)")
    c.rpc("apply_tactic", text="(intros A a)")
    c.rpc("apply_tactic", text="assumption")
    c.rpc("undo")
    assert c.rpc("script")["steps"] == ["(intros A a)"]
    c.close()


def test_undo_with_empty_stack_errors(server):
    _, port = server
    c = LineClient(port)
    c.rpc("start_proof", goal="Nat")
    r = c.rpc("undo")
    assert not r["ok"] and "nothing to undo" in r["error"]
    c.close()


def test_extract_and_open_goals(server):
    _, port = server
    c = LineClient(port)
    c.rpc("start_proof", goal="Nat")
    r = c.rpc("extract")
    assert not r["ok"] and r["open_goals"] == 1
    c.rpc("apply_tactic", text="(exact 2)")
    r2 = c.rpc("extract")
    assert r2["ok"] and r2["term"] == "(S (S Z))"
    c.close()


def test_load_source_definitions(server):
    _, port = server
    c = LineClient(port)
    r = c.rpc("load_file", source="(define five (plus 2 3))")
    assert r["ok"] and r["definitions"] == ["five : Nat"]
    r2 = c.rpc("start_proof", goal="(= Nat five 5)")
    assert r2["ok"]
    c.close()


def test_malformed_requests(server):
    _, port = server
    c = LineClient(port)
    assert c.rpc(raw="not json")["error"] == "bad request"
    assert c.rpc(raw='{"no": "op"}')["error"] == "bad request"
    assert c.rpc("unknown_op")["error"] == "bad request"
    # the session is still usable afterwards
    assert c.rpc("start_proof", goal="Nat")["ok"]
    c.close()


def test_session_isolation(server):
    _, port = server
    a, b = LineClient(port), LineClient(port)
    a.rpc("start_proof", goal="(∀ (A : Type) (a : A) A)")
    b.rpc("start_proof", goal="Nat")
    a.rpc("apply_tactic", text="(intros A a)")
    sa = a.rpc("apply_tactic", text="assumption")["state"]
    sb = b.rpc("script")
    assert sa["complete"] and sa["steps"] == 2
    assert sb["steps"] == []  # b never saw a's tactics
    assert b.rpc("script")["steps"] == []
    a.close()
    b.close()


SESSIONS = [
    ("(∀ (A : Type) (a : A) A)", ["(intros A a)", "assumption"]),
    ("(Π [x : Nat] Nat)", ["(intro x)", "assumption"]),
    (
        "(∀ (x : Nat) (H : (= Nat (S x) (S Z))) (= Nat x Z))",
        ["(intros x H)", "(inversion H)", "assumption"],
    ),
    ("Nat", ["(try assumption)", "(exact (plus 2 2))"]),
]


def test_protocol_replay(server):
    """script{} output replayed on a fresh session reproduces the final
    state record field-for-field."""
    _, port = server
    for goal, tactics in SESSIONS:
        c1 = LineClient(port)
        c1.rpc("start_proof", goal=goal)
        for t in tactics:
            c1.rpc("apply_tactic", text=t)
        final = c1.rpc("script")
        state1 = c1.rpc("apply_tactic", text="(try assumption)")["state"]
        c2 = LineClient(port)
        c2.rpc("start_proof", goal=goal)
        state2 = None
        for t in final["steps"]:
            state2 = c2.rpc("apply_tactic", text=t)["state"]
        assert state2 == state1
        c1.close()
        c2.close()


def test_handle_request_direct():
    s = SessionState()
    assert handle_request(s, []) == {"ok": False, "error": "bad request"}
    r = handle_request(s, {"id": 7, "op": "start_proof", "goal": "Nat"})
    assert r["id"] == 7 and r["ok"]


# --- websocket transport ----------------------------------------------------


class WsClient:
    def __init__(self, port):
        self.sock = socket.create_connection(("127.0.0.1", port), timeout=10)
        key = base64.b64encode(os.urandom(16)).decode()
        self.sock.sendall(
            (
                f"GET /ws HTTP/1.1\r\nHost: localhost\r\nUpgrade: websocket\r\n"
                f"Connection: Upgrade\r\nSec-WebSocket-Key: {key}\r\n"
                f"Sec-WebSocket-Version: 13\r\n\r\n"
            ).encode()
        )
        resp = b""
        while b"\r\n\r\n" not in resp:
            resp += self.sock.recv(4096)
        expect = base64.b64encode(
            hashlib.sha1((key + _WS_GUID).encode()).digest()
        ).decode()
        assert expect in resp.decode()

    def send(self, obj):
        payload = json.dumps(obj).encode()
        mask = os.urandom(4)
        masked = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        n = len(payload)
        if n < 126:
            head = bytes([0x81, 0x80 | n])
        else:
            head = bytes([0x81, 0x80 | 126]) + struct.pack(">H", n)
        self.sock.sendall(head + mask + masked)

    def recv(self):
        head = self._exact(2)
        ln = head[1] & 0x7F
        if ln == 126:
            ln = struct.unpack(">H", self._exact(2))[0]
        elif ln == 127:
            ln = struct.unpack(">Q", self._exact(8))[0]
        return json.loads(self._exact(ln))

    def _exact(self, n):
        buf = b""
        while len(buf) < n:
            chunk = self.sock.recv(n - len(buf))
            if not chunk:
                raise ConnectionError("closed")
            buf += chunk
        return buf

    def close(self):
        self.sock.close()


def test_websocket_same_protocol(server):
    _, port = server
    c = WsClient(port)
    c.send({"id": 1, "op": "start_proof", "goal": "(∀ (A : Type) (a : A) A)"})
    r = c.recv()
    assert r["ok"] and r["state"]["goal"] == "(∀ (A : Type) (a : A) A)"
    c.send({"id": 2, "op": "apply_tactic", "text": "(intros A a)"})
    assert c.recv()["state"]["steps"] == 1
    c.send({"id": 3, "op": "apply_tactic", "text": "assumption"})
    assert c.recv()["state"]["complete"]
    c.close()


def test_static_file_serving(tmp_path):
    (tmp_path / "index.html").write_text("<html>ui</html>")
    srv, port = serve_background(ui_dir=str(tmp_path))
    try:
        sock = socket.create_connection(("127.0.0.1", port), timeout=10)
        sock.sendall(b"GET / HTTP/1.1\r\nHost: x\r\n\r\n")
        data = b""
        while b"</html>" not in data:
            chunk = sock.recv(4096)
            if not chunk:
                break
            data += chunk
        assert b"200 OK" in data and b"<html>ui</html>" in data
        sock.close()
    finally:
        srv.shutdown()

"""TCP server running Compute on registered evaluation keys, and its client.

Conversation (one frame per message):

* client ``EKF(ek)``            -> server ``EKF(function id)``
* client ``ENC(fid | sigma_x)`` -> server ``RESP(y, V)`` or ``ERR(text)``

The function id is the SHA-256 of the EKF payload, so clients can compute
it locally. Anything malformed gets an ``ERR`` reply; the server keeps
serving other requests and connections.
"""

from __future__ import annotations

import logging
import socket
import socketserver
import threading

from mmvc.errors import DimensionError, InvalidElement, InvalidScalar, ShortRead, WireError
from mmvc.scheme import EvaluationKey, InputEncoding, ServerResponse, compute
from mmvc.wire.codec import (
    FID_LEN,
    FRAME_HEADER,
    MsgType,
    decode_payload,
    encode,
    encode_payload,
    frame,
    function_id,
    parse_frame_header,
)

log = logging.getLogger(__name__)


class RemoteError(WireError):
    """The peer answered with an ERR frame."""


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ShortRead("short read")
        buf += chunk
    return bytes(buf)


def read_frame(sock: socket.socket):
    """Read one frame; returns (msg_type, payload) or None on clean EOF."""
    first = sock.recv(1)
    if not first:
        return None
    header = first + _recv_exact(sock, FRAME_HEADER.size - 1)
    msg_type, length = parse_frame_header(header)
    return msg_type, _recv_exact(sock, length)


class KeyStore:
    """Thread-safe function-id -> EvaluationKey map; last write wins."""

    def __init__(self):
        self._keys = {}
        self._lock = threading.Lock()

    def put(self, fid: bytes, ek: EvaluationKey) -> None:
        with self._lock:
            self._keys[fid] = ek

    def get(self, fid: bytes):
        with self._lock:
            return self._keys.get(fid)

    def __len__(self):
        with self._lock:
            return len(self._keys)


def handle_message(msg_type: int, payload: bytes, group, store: KeyStore) -> bytes:
    """Process one request frame and return the reply frame."""
    try:
        if msg_type == MsgType.EKF:
            ek = decode_payload(msg_type, payload, group)
            fid = function_id(ek, group)
            store.put(fid, ek)
            return frame(MsgType.EKF, fid)
        if msg_type == MsgType.ENC:
            if len(payload) < FID_LEN:
                raise ShortRead("short read")
            ek = store.get(payload[:FID_LEN])
            if ek is None:
                return frame(MsgType.ERR, b"unknown function")
            x = decode_payload(MsgType.ENC, payload[FID_LEN:], group)
            # vk_x is not needed server-side
            resp = compute(ek, InputEncoding(x, None))
            return encode(resp, group)
        return frame(MsgType.ERR, b"unexpected message type")
    except (WireError, InvalidElement, InvalidScalar, DimensionError) as exc:
        return frame(MsgType.ERR, str(exc).encode())


class _Handler(socketserver.BaseRequestHandler):
    def handle(self):
        sock = self.request
        srv = self.server
        while True:
            try:
                msg = read_frame(sock)
            except ShortRead:
                log.info("truncated frame from %s", self.client_address)
                return
            except WireError as exc:
                # framing is lost; answer once and drop the connection
                sock.sendall(frame(MsgType.ERR, str(exc).encode()))
                return
            except OSError as exc:
                log.warning("transport failure from %s: %s", self.client_address, exc)
                return
            if msg is None:
                return
            reply = handle_message(*msg, srv.group, srv.store)
            try:
                sock.sendall(reply)
            except OSError as exc:
                log.warning("transport failure to %s: %s", self.client_address, exc)
                return


class ComputeServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address, group, store: KeyStore = None):
        self.group = group
        self.store = store if store is not None else KeyStore()
        super().__init__(address, _Handler)


def serve(host: str, port: int, group, store: KeyStore = None, on_ready=None) -> None:
    """Run the compute server until interrupted."""
    with ComputeServer((host, port), group, store) as server:
        if on_ready is not None:
            on_ready(server.server_address)
        server.serve_forever()


class Client:
    """Blocking client for :class:`ComputeServer`."""

    def __init__(self, host: str, port: int, group, timeout: float = 30.0):
        self.group = group
        self.sock = socket.create_connection((host, port), timeout=timeout)

    def close(self):
        self.sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _roundtrip(self, data: bytes):
        self.sock.sendall(data)
        msg = read_frame(self.sock)
        if msg is None:
            raise ShortRead("short read")
        msg_type, payload = msg
        if msg_type == MsgType.ERR:
            raise RemoteError(payload.decode("utf-8", errors="replace"))
        return msg_type, payload

    def register(self, ek: EvaluationKey) -> bytes:
        msg_type, payload = self._roundtrip(encode(ek, self.group))
        fid = function_id(ek, self.group)
        if msg_type != MsgType.EKF or payload != fid:
            raise WireError("bad registration reply")
        return fid

    def compute(self, fid: bytes, x) -> ServerResponse:
        _, payload = encode_payload(tuple(x), self.group)
        msg_type, reply = self._roundtrip(frame(MsgType.ENC, fid + payload))
        if msg_type != MsgType.RESP:
            raise WireError("unexpected reply type")
        return decode_payload(msg_type, reply, self.group)

"""Canonical byte encodings and framing.

Payload layout: dimensions as u32 big-endian, then scalars (fixed width,
big-endian), then group elements (fixed width per backend).

=====  ============================  ==================================
type   object                        payload
=====  ============================  ==================================
PK     PublicParams                  d | g, R_1..R_d
EKF    EvaluationKey                 m, d | F (row-major) | W_1..W_d
ENC    sigma_x (tuple of scalars)    d | x_1..x_d
RESP   ServerResponse                m | y_1..y_m | V
ERR    error message                 UTF-8 text
VKF    FunctionVerificationKey       m | k, r_1..r_m
VKX    VK_x (GroupElement)           VK_x
=====  ============================  ==================================

Baseline keys reuse the same layouts with m = 1: an FG12 evaluation key is an
EKF whose single row is f, and (k, alpha) is a VKF with r = (alpha,).

Network frames carry ``MMVC | version | type | u32 length | payload``.
Files carry ``MMVC | version | type | backend id | reserved | payload``.
"""

from __future__ import annotations

import hashlib
import struct
from enum import IntEnum

from mmvc.algebra import Group, GroupElement, group_by_id
from mmvc.errors import ProtocolMismatch, ShortRead, WireError
from mmvc.fg12 import FG12EvaluationKey, FG12FunctionKey
from mmvc.scheme import (
    EvaluationKey,
    FunctionVerificationKey,
    InputEncoding,
    Matrix,
    PublicParams,
    ServerResponse,
)

MAGIC = b"MMVC"
VERSION = 1
FRAME_HEADER = struct.Struct(">4sBBI")
FILE_HEADER = struct.Struct(">4sBBBx")
MAX_PAYLOAD = 1 << 28
FID_LEN = 32


class MsgType(IntEnum):
    PK = 1
    EKF = 2
    ENC = 3
    RESP = 4
    ERR = 5
    # file-only
    VKF = 6
    VKX = 7


# Number of u32 dimension fields leading each payload.
DIM_FIELDS = {
    MsgType.PK: 1,
    MsgType.EKF: 2,
    MsgType.ENC: 1,
    MsgType.RESP: 1,
    MsgType.VKF: 1,
    MsgType.VKX: 0,
}


def _u32(*vals) -> bytes:
    return struct.pack(f">{len(vals)}I", *vals)


def _scalars(group: Group, vals) -> bytes:
    w, p = group.scalar_bytes, group.order
    return b"".join((v % p).to_bytes(w, "big") for v in vals)


def _elements(elems) -> bytes:
    return b"".join(e.to_bytes() for e in elems)


def encode_payload(obj, group: Group):
    """Return (MsgType, payload bytes) for a protocol object."""
    if isinstance(obj, PublicParams):
        return MsgType.PK, _u32(obj.d) + _elements((obj.g,) + obj.R)
    if isinstance(obj, EvaluationKey):
        F = obj.F
        flat = [v for row in F.rows for v in row]
        return MsgType.EKF, _u32(F.m, F.d) + _scalars(group, flat) + _elements(obj.W)
    if isinstance(obj, FG12EvaluationKey):
        return encode_payload(EvaluationKey(Matrix((tuple(obj.f),)), obj.W), group)
    if isinstance(obj, InputEncoding):
        obj = obj.x
    if isinstance(obj, ServerResponse):
        return MsgType.RESP, _u32(len(obj.y)) + _scalars(group, obj.y) + _elements((obj.V,))
    if isinstance(obj, FunctionVerificationKey):
        return MsgType.VKF, _u32(len(obj.r)) + _scalars(group, (obj.k,) + tuple(obj.r))
    if isinstance(obj, FG12FunctionKey):
        return MsgType.VKF, _u32(1) + _scalars(group, (obj.k, obj.alpha))
    if isinstance(obj, GroupElement):
        return MsgType.VKX, obj.to_bytes()
    if isinstance(obj, str):
        return MsgType.ERR, obj.encode("utf-8")
    if isinstance(obj, (tuple, list)):
        return MsgType.ENC, _u32(len(obj)) + _scalars(group, obj)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def body_size(obj, group: Group) -> int:
    """Bytes of scalars and group elements only (payload minus dimension fields)."""
    mt, payload = encode_payload(obj, group)
    return len(payload) - 4 * DIM_FIELDS[mt]


class _Reader:
    def __init__(self, data: bytes, group: Group):
        self.data = memoryview(data)
        self.pos = 0
        self.group = group

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ShortRead("short read")
        out = bytes(self.data[self.pos:self.pos + n])
        self.pos += n
        return out

    def need(self, n: int) -> None:
        left = len(self.data) - self.pos
        if left < n:
            raise ShortRead("short read")
        if left > n:
            raise WireError("trailing data")

    def u32(self, count: int = 1) -> tuple:
        return struct.unpack(f">{count}I", self.take(4 * count))

    def scalars(self, n: int) -> tuple:
        w, dec = self.group.scalar_bytes, self.group.decode_scalar
        return tuple(dec(self.take(w)) for _ in range(n))

    def elements(self, n: int) -> tuple:
        w, dec = self.group.element_bytes, self.group.decode_element
        return tuple(dec(self.take(w)) for _ in range(n))


def decode_payload(msg_type: int, payload: bytes, group: Group):
    """Inverse of :func:`encode_payload`. Validates every group element."""
    try:
        msg_type = MsgType(msg_type)
    except ValueError:
        raise ProtocolMismatch("protocol mismatch: unknown message type") from None
    rd = _Reader(payload, group)
    sw, ew = group.scalar_bytes, group.element_bytes
    if msg_type is MsgType.ERR:
        return payload.decode("utf-8", errors="replace")
    if msg_type is MsgType.VKX:
        rd.need(ew)
        return rd.elements(1)[0]
    if msg_type is MsgType.EKF:
        m, d = rd.u32(2)
        if m == 0 or d == 0:
            raise WireError("empty dimension")
        rd.need(m * d * sw + d * ew)
        flat = rd.scalars(m * d)
        rows = tuple(flat[i * d:(i + 1) * d] for i in range(m))
        return EvaluationKey(Matrix(rows), rd.elements(d))
    (n,) = rd.u32()
    if msg_type is MsgType.PK:
        if n == 0:
            raise WireError("empty dimension")
        rd.need((n + 1) * ew)
        els = rd.elements(n + 1)
        return PublicParams(group, els[0], els[1:])
    if msg_type is MsgType.ENC:
        rd.need(n * sw)
        return rd.scalars(n)
    if msg_type is MsgType.RESP:
        rd.need(n * sw + ew)
        y = rd.scalars(n)
        return ServerResponse(y, rd.elements(1)[0])
    if msg_type is MsgType.VKF:
        rd.need((n + 1) * sw)
        vals = rd.scalars(n + 1)
        return FunctionVerificationKey(vals[0], vals[1:])
    raise ProtocolMismatch("protocol mismatch: unexpected message type")


def as_fg12_evaluation_key(ek: EvaluationKey) -> FG12EvaluationKey:
    if ek.F.m != 1:
        raise WireError("not a single-row key")
    return FG12EvaluationKey(ek.F.rows[0], ek.W)


def as_fg12_function_key(vk: FunctionVerificationKey) -> FG12FunctionKey:
    if len(vk.r) != 1:
        raise WireError("not a single-row key")
    return FG12FunctionKey(vk.k, vk.r[0])


def function_id(ek: EvaluationKey, group: Group) -> bytes:
    """Content address of an evaluation key: SHA-256 of its EKF payload."""
    return hashlib.sha256(encode_payload(ek, group)[1]).digest()


# Frames

def frame(msg_type: int, payload: bytes) -> bytes:
    return FRAME_HEADER.pack(MAGIC, VERSION, msg_type, len(payload)) + payload


def encode(obj, group: Group) -> bytes:
    return frame(*encode_payload(obj, group))


def parse_frame_header(header: bytes):
    """Returns (msg_type, payload_len)."""
    if len(header) < FRAME_HEADER.size:
        raise ShortRead("short read")
    magic, version, msg_type, length = FRAME_HEADER.unpack(header[:FRAME_HEADER.size])
    if magic != MAGIC or version != VERSION:
        raise ProtocolMismatch("protocol mismatch")
    if msg_type not in MsgType.__members__.values():
        raise ProtocolMismatch("protocol mismatch: unknown message type")
    if length > MAX_PAYLOAD:
        raise WireError("frame too large")
    return msg_type, length


def decode_frame(data: bytes):
    """Split one complete frame into (msg_type, payload)."""
    msg_type, length = parse_frame_header(data)
    payload = data[FRAME_HEADER.size:]
    if len(payload) < length:
        raise ShortRead("short read")
    if len(payload) > length:
        raise WireError("trailing data")
    return msg_type, payload


def decode(data: bytes, group: Group):
    return decode_payload(*decode_frame(data), group)


# Files

def dumps(obj, group: Group) -> bytes:
    msg_type, payload = encode_payload(obj, group)
    return FILE_HEADER.pack(MAGIC, VERSION, msg_type, group.backend_id) + payload


def loads(data: bytes, expect: MsgType = None):
    """Parse a key file. Returns (msg_type, group, object)."""
    if len(data) < FILE_HEADER.size:
        raise ShortRead("short read")
    magic, version, msg_type, backend = FILE_HEADER.unpack(data[:FILE_HEADER.size])
    if magic != MAGIC or version != VERSION:
        raise ProtocolMismatch("protocol mismatch")
    try:
        group = group_by_id(backend)
    except ValueError:
        raise ProtocolMismatch("protocol mismatch: unknown backend") from None
    if expect is not None and msg_type != expect:
        raise ProtocolMismatch(f"expected {MsgType(expect).name} file, got type {msg_type}")
    obj = decode_payload(msg_type, data[FILE_HEADER.size:], group)
    return MsgType(msg_type), group, obj

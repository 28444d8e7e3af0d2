"""Prime-order group backends.

Two backends are provided:

``production``
    The prime-order subgroup of edwards25519 (order ~2**252), using
    libsodium through PyNaCl. Elements are 32-byte compressed points.

``toy``
    The order-101 subgroup of the multiplicative group mod 607. Small
    enough to enumerate, which makes exhaustive oracles and exact
    forgery-probability experiments possible.
"""

from __future__ import annotations

from functools import lru_cache

import nacl.bindings as _sodium

from mmvc.algebra.counters import record
from mmvc.errors import InvalidElement, InvalidScalar


class GroupElement:
    """An element of a :class:`Group`.

    ``*`` is the group operation, ``**`` exponentiation by a scalar and ``/``
    multiplication by an inverse. Each operator is recorded in the active
    counter scopes (``/`` counts as one group multiplication).
    """

    __slots__ = ("group", "raw")

    def __init__(self, group: "Group", raw):
        self.group = group
        self.raw = raw

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        record(mul_G=1)
        return GroupElement(self.group, self.group._mul(self.raw, other.raw))

    def __pow__(self, e: int) -> "GroupElement":
        record(exp_G=1)
        return GroupElement(self.group, self.group._exp(self.raw, e))

    def __truediv__(self, other: "GroupElement") -> "GroupElement":
        record(mul_G=1)
        g = self.group
        return GroupElement(g, g._mul(self.raw, g._inv(other.raw)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.group is other.group and self.raw == other.raw

    def __hash__(self) -> int:
        return hash((self.group.name, self.raw))

    def __repr__(self) -> str:
        return f"GroupElement({self.group.name}, {self.to_bytes().hex()})"

    @property
    def is_identity(self) -> bool:
        return self.raw == self.group.identity.raw

    def to_bytes(self) -> bytes:
        return self.group.encode_element(self)


class Group:
    """Description of a cyclic group of prime order plus its raw arithmetic.

    Subclasses provide ``_mul``, ``_exp``, ``_inv``, ``_encode``, ``_decode``
    and ``_random`` on raw representations; nothing at this level is counted.
    """

    name: str
    backend_id: int
    order: int
    element_bits: int
    scalar_bits: int

    def __init__(self):
        self.generator = GroupElement(self, self._generator_raw())
        self.identity = GroupElement(self, self._identity_raw())

    def __repr__(self) -> str:
        return f"<Group {self.name} p={self.order}>"

    @property
    def element_bytes(self) -> int:
        return (self.element_bits + 7) // 8

    @property
    def scalar_bytes(self) -> int:
        return (self.scalar_bits + 7) // 8

    def element(self, raw) -> GroupElement:
        return GroupElement(self, raw)

    def encode_element(self, x: GroupElement) -> bytes:
        return self._encode(x.raw)

    def decode_element(self, data: bytes) -> GroupElement:
        if len(data) != self.element_bytes:
            raise InvalidElement("invalid element")
        return GroupElement(self, self._decode(bytes(data)))

    def encode_scalar(self, v: int) -> bytes:
        return (v % self.order).to_bytes(self.scalar_bytes, "big")

    def decode_scalar(self, data: bytes) -> int:
        v = int.from_bytes(data, "big")
        if len(data) != self.scalar_bytes or v >= self.order:
            raise InvalidScalar("invalid scalar")
        return v

    def random_element_raw(self, rng):
        return self._random(rng)


class ToyGroup(Group):
    """Order-101 subgroup of (Z/607Z)*; 606 = 2 * 3 * 101."""

    name = "toy"
    backend_id = 2
    modulus = 607
    order = 101
    element_bits = 16
    scalar_bits = 8
    # 3 is the least primitive root mod 607; 3**6 generates the subgroup.
    primitive_root = 3

    def __init__(self):
        g = pow(self.primitive_root, (self.modulus - 1) // self.order, self.modulus)
        self._g = g
        self._members = tuple(sorted(pow(g, i, self.modulus) for i in range(self.order)))
        self._member_set = frozenset(self._members)
        super().__init__()

    def _generator_raw(self):
        return self._g

    def _identity_raw(self):
        return 1

    def _mul(self, a, b):
        return a * b % self.modulus

    def _exp(self, a, e):
        return pow(a, e % self.order, self.modulus)

    def _inv(self, a):
        return pow(a, -1, self.modulus)

    def _encode(self, a) -> bytes:
        return a.to_bytes(self.element_bytes, "big")

    def _decode(self, data: bytes):
        v = int.from_bytes(data, "big")
        if v not in self._member_set:
            raise InvalidElement("invalid element")
        return v

    def _random(self, rng):
        return self._members[rng.randrange(self.order)]

    def elements(self) -> tuple:
        """All subgroup members, as GroupElements, in ascending raw order."""
        return tuple(GroupElement(self, v) for v in self._members)


_ED_IDENTITY = b"\x01" + bytes(31)


class Ed25519Group(Group):
    """Prime-order subgroup of edwards25519 (the group behind Ed25519)."""

    name = "production"
    backend_id = 1
    order = 2**252 + 27742317777372353535851937790883648493
    element_bits = 256
    scalar_bits = 256

    def _generator_raw(self):
        return _sodium.crypto_scalarmult_ed25519_base_noclamp((1).to_bytes(32, "little"))

    def _identity_raw(self):
        return _ED_IDENTITY

    def _mul(self, a, b):
        return _sodium.crypto_core_ed25519_add(a, b)

    def _exp(self, a, e):
        e %= self.order
        # libsodium refuses the identity as input or output of scalarmult;
        # in a prime-order group that happens only in these two cases.
        if e == 0 or a == _ED_IDENTITY:
            return _ED_IDENTITY
        return _sodium.crypto_scalarmult_ed25519_noclamp(e.to_bytes(32, "little"), a)

    def _inv(self, a):
        return _sodium.crypto_core_ed25519_sub(_ED_IDENTITY, a)

    def _encode(self, a) -> bytes:
        return a

    def _decode(self, data: bytes):
        # is_valid_point rejects small-order points (identity included) and
        # anything outside the main subgroup.
        if data == _ED_IDENTITY or _sodium.crypto_core_ed25519_is_valid_point(data):
            return data
        raise InvalidElement("invalid element")

    def _random(self, rng):
        # Sum of two Elligator 2 maps: statistically close to uniform on the subgroup.
        u1 = rng.getrandbits(256).to_bytes(32, "little")
        u2 = rng.getrandbits(256).to_bytes(32, "little")
        return _sodium.crypto_core_ed25519_add(
            _sodium.crypto_core_ed25519_from_uniform(u1),
            _sodium.crypto_core_ed25519_from_uniform(u2),
        )


BACKENDS = {"production": Ed25519Group, "toy": ToyGroup}


@lru_cache(maxsize=None)
def get_group(name: str) -> Group:
    try:
        return BACKENDS[name]()
    except KeyError:
        raise ValueError(f"unknown group backend {name!r}") from None


def group_by_id(backend_id: int) -> Group:
    for name, cls in BACKENDS.items():
        if cls.backend_id == backend_id:
            return get_group(name)
    raise ValueError(f"unknown backend id {backend_id}")

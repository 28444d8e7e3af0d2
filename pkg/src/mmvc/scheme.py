"""Multi-matrix verifiable computation.

A client outsources y = F x for an m x d matrix F over Z_p. The rows of F
are folded into one random linear combination s = r F, tagged once per
column as W_j = g**s_j * R_j**k, and every result is then checked with a
single equation

    V == g**(r . y) * VK_x**k

instead of one check per row.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from mmvc.algebra import (
    Group,
    GroupElement,
    dot,
    get_group,
    multi_exp,
    sample_element,
    sample_scalar,
    sample_scalars,
)
from mmvc.errors import DimensionError


@dataclass(frozen=True)
class PublicParams:
    """PK = (p, G, g, R_1..R_d). ``g`` is the backend's fixed generator."""

    group: Group
    g: GroupElement
    R: tuple

    @property
    def d(self) -> int:
        return len(self.R)


@dataclass(frozen=True)
class Matrix:
    """Row-major m x d matrix over Z_p with entries already reduced."""

    rows: tuple

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], p: int) -> "Matrix":
        rows = tuple(tuple(int(v) % p for v in row) for row in rows)
        if not rows or not rows[0]:
            raise DimensionError("empty dimension")
        if any(len(r) != len(rows[0]) for r in rows):
            raise DimensionError("ragged matrix")
        return cls(rows)

    @classmethod
    def random(cls, group: Group, rng, m: int, d: int) -> "Matrix":
        # Workload data, not scheme randomness: deliberately not counted.
        p = group.order
        return cls.from_rows([[rng.randrange(p) for _ in range(d)] for _ in range(m)], p)

    @classmethod
    def zeros(cls, m: int, d: int) -> "Matrix":
        return cls(tuple((0,) * d for _ in range(m)))

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def d(self) -> int:
        return len(self.rows[0])

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.rows)


@dataclass(frozen=True)
class EvaluationKey:
    F: Matrix
    W: tuple


@dataclass(frozen=True)
class FunctionVerificationKey:
    k: int
    r: tuple


@dataclass(frozen=True)
class InputEncoding:
    x: tuple
    vk_x: GroupElement


@dataclass(frozen=True)
class ServerResponse:
    y: tuple
    V: GroupElement


def random_vector(group: Group, rng, d: int) -> tuple:
    p = group.order
    return tuple(rng.randrange(p) for _ in range(d))


def setup(rng, group, d: int) -> PublicParams:
    """Publish d uniform bases R_j. There are no private parameters."""
    if isinstance(group, str):
        group = get_group(group)
    if d < 1:
        raise DimensionError("empty dimension")
    R = tuple(sample_element(group, rng) for _ in range(d))
    return PublicParams(group, group.generator, R)


def combine_rows(r: Sequence[int], F: Matrix, p: int) -> tuple:
    """s = r F, i.e. s_j = sum_i r_i F[i][j] mod p."""
    if len(r) != F.m:
        raise DimensionError("m mismatch")
    return tuple(dot(r, F.column(j), p) for j in range(F.d))


def make_evaluation_key(pk: PublicParams, F: Matrix, k: int, r: Sequence[int]) -> EvaluationKey:
    """Tags W_j = g**s_j * R_j**k for s = r F, with caller-chosen (k, r)."""
    if F.d != pk.d:
        raise DimensionError("d mismatch")
    s = combine_rows(r, F, pk.group.order)
    W = tuple(pk.g ** s_j * R_j ** k for s_j, R_j in zip(s, pk.R))
    return EvaluationKey(F, W)


def keygen(rng, pk: PublicParams, F: Matrix):
    """Returns (EvaluationKey, FunctionVerificationKey) for F."""
    if F.d != pk.d:
        raise DimensionError("d mismatch")
    k = sample_scalar(pk.group, rng)
    r = sample_scalars(pk.group, rng, F.m)
    return make_evaluation_key(pk, F, k, r), FunctionVerificationKey(k, r)


def probgen(pk: PublicParams, x: Sequence[int]) -> InputEncoding:
    """sigma_x = x and VK_x = prod R_j**x_j; depends on no function."""
    if len(x) != pk.d:
        raise DimensionError("d mismatch")
    p = pk.group.order
    x = tuple(int(v) % p for v in x)
    return InputEncoding(x, multi_exp(pk.R, x))


def compute(ek: EvaluationKey, enc: InputEncoding) -> ServerResponse:
    """Server side: y = F x and V = prod W_j**x_j, from public data only."""
    if len(enc.x) != ek.F.d:
        raise DimensionError("d mismatch")
    p = ek.W[0].group.order
    y = tuple(dot(row, enc.x, p) for row in ek.F.rows)
    return ServerResponse(y, multi_exp(ek.W, enc.x))


def verify(
    vk_f: FunctionVerificationKey, vk_x: GroupElement, resp: ServerResponse
) -> Optional[tuple]:
    """Return y if V == g**(r.y) * VK_x**k, else None (reject)."""
    if len(resp.y) != len(vk_f.r) or resp.V.group is not vk_x.group:
        raise DimensionError("shape mismatch")
    group = vk_x.group
    ry = dot(vk_f.r, resp.y, group.order)
    if resp.V == group.generator ** ry * vk_x ** vk_f.k:
        return tuple(resp.y)
    return None

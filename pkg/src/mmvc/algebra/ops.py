"""Counted scalar and group operations.

Every function here reports its cost to the active counter scopes using the
abstract cost model; fast internal algorithms are fine as long as the
recorded counts stay the naive ones.
"""

from __future__ import annotations

from typing import Sequence

from mmvc.algebra.counters import record
from mmvc.algebra.groups import Group, GroupElement
from mmvc.errors import DimensionError


def sample_scalar(group: Group, rng) -> int:
    """Uniform scalar in [0, p). One rng draw."""
    record(rng=1)
    return rng.randrange(group.order)


def sample_scalars(group: Group, rng, n: int) -> tuple:
    record(rng=n)
    p = group.order
    return tuple(rng.randrange(p) for _ in range(n))


def sample_element(group: Group, rng) -> GroupElement:
    """Uniform element of the order-p group.

    Sampled directly (table lookup or hash-to-group), so it costs one rng
    draw and no exponentiation.
    """
    record(rng=1)
    return GroupElement(group, group.random_element_raw(rng))


def exp(base: GroupElement, e: int) -> GroupElement:
    return base ** e


def multi_exp(bases: Sequence[GroupElement], exps: Sequence[int]) -> GroupElement:
    """prod(bases[i] ** exps[i]), recorded as n exponentiations and n-1 multiplications."""
    n = len(bases)
    if n != len(exps):
        raise DimensionError("dimension mismatch")
    if n == 0:
        raise DimensionError("empty product")
    group = bases[0].group
    mul, pw = group._mul, group._exp
    acc = pw(bases[0].raw, exps[0])
    for b, e in zip(bases[1:], exps[1:]):
        acc = mul(acc, pw(b.raw, e))
    record(exp_G=n, mul_G=n - 1)
    return GroupElement(group, acc)


def field_mul(a: int, b: int, p: int) -> int:
    record(mul_p=1)
    return a * b % p


def scale(c: int, v: Sequence[int], p: int) -> tuple:
    """c * v componentwise: len(v) multiplications."""
    record(mul_p=len(v))
    return tuple(c * x % p for x in v)


def dot(u: Sequence[int], v: Sequence[int], p: int) -> int:
    """Inner product mod p: n multiplications and n-1 additions."""
    n = len(u)
    if n != len(v):
        raise DimensionError("dimension mismatch")
    record(mul_p=n, add_p=n - 1)
    return sum(a * b for a, b in zip(u, v)) % p

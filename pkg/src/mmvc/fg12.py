"""Single-row baseline: the linear-function scheme of Fiore and Gennaro.

A function f in Z_p^d is tagged as W_j = g**(alpha f_j) * R_j**k and a
result y = f . x is accepted iff V == g**(alpha y) * VK_x**k. Matrices are
handled one row at a time with independent (k, alpha) per row, which is the
comparison point for :mod:`mmvc.scheme`. Public parameters and input
encodings are shared with that module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from mmvc.algebra import GroupElement, dot, field_mul, multi_exp, sample_scalar, scale
from mmvc.errors import DimensionError
from mmvc.scheme import InputEncoding, Matrix, PublicParams, probgen


@dataclass(frozen=True)
class FG12FunctionKey:
    k: int
    alpha: int


@dataclass(frozen=True)
class FG12EvaluationKey:
    f: tuple
    W: tuple


def fg12_make_evaluation_key(pk: PublicParams, f: Sequence[int], k: int, alpha: int) -> FG12EvaluationKey:
    if len(f) != pk.d:
        raise DimensionError("d mismatch")
    p = pk.group.order
    f = tuple(int(v) % p for v in f)
    af = scale(alpha, f, p)
    W = tuple(pk.g ** e * R_j ** k for e, R_j in zip(af, pk.R))
    return FG12EvaluationKey(f, W)


def fg12_keygen(rng, pk: PublicParams, f: Sequence[int]):
    if len(f) != pk.d:
        raise DimensionError("d mismatch")
    k = sample_scalar(pk.group, rng)
    alpha = sample_scalar(pk.group, rng)
    return fg12_make_evaluation_key(pk, f, k, alpha), FG12FunctionKey(k, alpha)


def fg12_compute(ek: FG12EvaluationKey, enc: InputEncoding):
    """Returns (y, V) with y = f . x and V = prod W_j**x_j."""
    if len(enc.x) != len(ek.f):
        raise DimensionError("d mismatch")
    p = ek.W[0].group.order
    return dot(ek.f, enc.x, p), multi_exp(ek.W, enc.x)


def fg12_verify(vk: FG12FunctionKey, vk_x: GroupElement, y: int, V: GroupElement) -> Optional[int]:
    group = vk_x.group
    ay = field_mul(vk.alpha, y, group.order)
    if V == group.generator ** ay * vk_x ** vk.k:
        return y
    return None


# Row-by-row application to a matrix.

def fg12_matrix_keygen(rng, pk: PublicParams, F: Matrix) -> list:
    """One independent (ek, vk) pair per row of F."""
    if F.d != pk.d:
        raise DimensionError("d mismatch")
    return [fg12_keygen(rng, pk, row) for row in F.rows]


def fg12_matrix_respond(row_keys: Sequence, enc: InputEncoding) -> list:
    return [fg12_compute(ek, enc) for ek, _ in row_keys]


def fg12_matrix_verify(row_keys: Sequence, vk_x: GroupElement, responses: Sequence) -> Optional[tuple]:
    """Accept only if every row verifies; returns the result vector or None."""
    if len(responses) != len(row_keys):
        raise DimensionError("shape mismatch")
    out = [fg12_verify(vk, vk_x, y, V) for (_, vk), (y, V) in zip(row_keys, responses)]
    if any(v is None for v in out):
        return None
    return tuple(out)


def fg12_matrix_compute(rng, pk: PublicParams, F: Matrix, x: Sequence[int]) -> list:
    """Full baseline pipeline for F x, one row at a time.

    Returns the per-row verification outcome (y_i or None).
    """
    row_keys = fg12_matrix_keygen(rng, pk, F)
    enc = probgen(pk, x)
    return [
        fg12_verify(vk, enc.vk_x, *fg12_compute(ek, enc))
        for ek, vk in row_keys
    ]

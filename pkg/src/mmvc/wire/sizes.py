"""Communication and storage accounting for a workload of a functions and b inputs.

Closed forms (bits), multi-matrix scheme vs. the row-by-row baseline:

    c1 = (amd + bd + abm) lp + (ad + ab) lg       s1 = a(m+1) lp + b lg
    c2 = (amd + bd + abm) lp + (amd + amb) lg     s2 = 2am lp + b lg

Communication counts EK_F, sigma_x and sigma_y; storage counts the client's
VK_F and VK_x. MB and KB are binary (2**20 and 2**10 bytes).
"""

from __future__ import annotations

from dataclasses import dataclass

from mmvc.wire.codec import body_size

KIB = 1 << 10
MIB = 1 << 20


@dataclass(frozen=True)
class SchemeSizes:
    ek_bits: int
    enc_bits: int
    resp_bits: int
    vkf_bits: int
    vkx_bits: int

    @property
    def comm_bits(self) -> int:
        return self.ek_bits + self.enc_bits + self.resp_bits

    @property
    def storage_bits(self) -> int:
        return self.vkf_bits + self.vkx_bits

    @property
    def comm_mb(self) -> float:
        return self.comm_bits / 8 / MIB

    @property
    def storage_kb(self) -> float:
        return self.storage_bits / 8 / KIB

    def as_bytes(self) -> dict:
        return {
            "ek_bytes": self.ek_bits // 8,
            "enc_bytes": self.enc_bits // 8,
            "resp_bytes": self.resp_bits // 8,
            "vkf_bytes": self.vkf_bits // 8,
            "vkx_bytes": self.vkx_bits // 8,
        }


def mmvc_sizes(a, b, m, d, lp, lg) -> SchemeSizes:
    return SchemeSizes(
        ek_bits=a * m * d * lp + a * d * lg,
        enc_bits=b * d * lp,
        resp_bits=a * b * m * lp + a * b * lg,
        vkf_bits=a * (m + 1) * lp,
        vkx_bits=b * lg,
    )


def fg12_sizes(a, b, m, d, lp, lg) -> SchemeSizes:
    return SchemeSizes(
        ek_bits=a * m * d * lp + a * m * d * lg,
        enc_bits=b * d * lp,
        resp_bits=a * b * m * lp + a * b * m * lg,
        vkf_bits=2 * a * m * lp,
        vkx_bits=b * lg,
    )


@dataclass(frozen=True)
class SizeReport:
    a: int
    b: int
    m: int
    d: int
    lp: int
    lg: int
    mmvc: SchemeSizes
    fg12: SchemeSizes

    @property
    def c1_mb(self) -> float:
        return self.mmvc.comm_mb

    @property
    def c2_mb(self) -> float:
        return self.fg12.comm_mb

    @property
    def s1_kb(self) -> float:
        return self.mmvc.storage_kb

    @property
    def s2_kb(self) -> float:
        return self.fg12.storage_kb


def size_report(a: int, b: int, m: int, d: int, lp: int, lg: int) -> SizeReport:
    """Closed-form sizes for both schemes with element lengths lp, lg in bits."""
    if min(a, b, m, d, lp, lg) < 1:
        raise ValueError("all dimensions must be positive")
    return SizeReport(a, b, m, d, lp, lg, mmvc_sizes(a, b, m, d, lp, lg), fg12_sizes(a, b, m, d, lp, lg))


def measure_sizes(group, eks, encs, resps, vkfs, vkxs) -> SchemeSizes:
    """Sum the serialized body sizes of actual protocol objects.

    Each argument is an iterable of objects of one kind; baseline keys and
    responses are passed per row (m = 1 shapes).
    """
    def bits(objs):
        return 8 * sum(body_size(o, group) for o in objs)

    return SchemeSizes(bits(eks), bits(encs), bits(resps), bits(vkfs), bits(vkxs))

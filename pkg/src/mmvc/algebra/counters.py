"""Abstract operation counters.

Counts follow the cost model of the scheme's complexity table (random draws,
field additions and multiplications, group multiplications and
exponentiations), not the micro-operations a backend actually performs.
"""

from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field

FIELDS = ("rng", "add_p", "mul_p", "mul_G", "exp_G")

_active: ContextVar[tuple] = ContextVar("mmvc_counter_scopes", default=())


@dataclass
class OpCounters:
    rng: int = 0
    add_p: int = 0
    mul_p: int = 0
    mul_G: int = 0
    exp_G: int = 0
    label: str = field(default="", compare=False)

    def as_dict(self) -> dict:
        return {f: getattr(self, f) for f in FIELDS}

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, f) for f in FIELDS)

    def merge(self, other: "OpCounters") -> "OpCounters":
        return OpCounters(*(a + b for a, b in zip(self.as_tuple(), other.as_tuple())), label=self.label)

    __add__ = merge

    def __iter__(self):
        return iter(self.as_tuple())


def record(rng: int = 0, add_p: int = 0, mul_p: int = 0, mul_G: int = 0, exp_G: int = 0) -> None:
    """Add the given amounts to every counter scope active in this context."""
    scopes = _active.get()
    if not scopes:
        return
    for c in scopes:
        c.rng += rng
        c.add_p += add_p
        c.mul_p += mul_p
        c.mul_G += mul_G
        c.exp_G += exp_G


@contextmanager
def counter_scope(label: str = ""):
    """Collect counts for every algebra call made inside the ``with`` block.

    Scopes nest: an inner scope's counts are also added to all enclosing
    scopes. Scopes are per-context, so threads and asyncio tasks started
    elsewhere do not leak counts into each other.
    """
    counters = OpCounters(label=label)
    token = _active.set(_active.get() + (counters,))
    try:
        yield counters
    finally:
        _active.reset(token)

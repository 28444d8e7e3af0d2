"""Executable forgery experiment with pluggable adversaries.

The challenger sets up public parameters and answers KeyGen, ProbGen and
Verify queries; verification keys never leave it. The adversary finally
submits (function handle, x*, claimed response) and wins if Verify accepts
a result other than F x*.

Two variants:

``E0_standard``
    Real keys: W_j = g**s_j * R_j**k, accept iff V == g**(r.y) * VK_x**k.
``E3_random_tags``
    R_j**k is replaced by independent uniform Z_j, and verification checks
    V == g**(r.y) * prod Z_j**x_j. Only the information-theoretic part of
    the forgery bound remains, so at toy scale the success rate can be
    compared with q / (p - q + 1) directly.

``q`` bounds the number of verification attempts, the final submission
included.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from types import SimpleNamespace
from typing import Callable, Optional

from mmvc.algebra import dot, get_group, multi_exp, sample_element
from mmvc.errors import DimensionError, QueryBudgetExceeded
from mmvc.scheme import (
    EvaluationKey,
    InputEncoding,
    Matrix,
    PublicParams,
    ServerResponse,
    combine_rows,
    compute,
    keygen,
    probgen,
    random_vector,
    setup,
    verify,
)


class Variant(str, Enum):
    E0_STANDARD = "E0_standard"
    E3_RANDOM_TAGS = "E3_random_tags"


@dataclass(frozen=True)
class ExperimentConfig:
    q: int = 1
    backend: str = "toy"
    trials: int = 1
    variant: Variant = Variant.E3_RANDOM_TAGS
    m: int = 2
    d: int = 2

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        object.__setattr__(self, "variant", Variant(self.variant))


@dataclass
class AdversaryOutcome:
    succeeded: bool
    queries_used: int
    transcript: list = field(default_factory=list)


@dataclass(frozen=True)
class Forgery:
    handle: int
    x: tuple
    response: ServerResponse


def random_tag_key(pk: PublicParams, F: Matrix, r, Z) -> EvaluationKey:
    """E3 tags W_j = g**s_j * Z_j with s = r F."""
    s = combine_rows(r, F, pk.group.order)
    return EvaluationKey(F, tuple(pk.g ** s_j * Z_j for s_j, Z_j in zip(s, Z)))


def forgery_condition(r, y, y_hat, V, V_hat, g) -> bool:
    """(y_hat != y) and V_hat / V == g**(r . (y_hat - y))."""
    if len(r) != len(y) or len(y) != len(y_hat):
        raise DimensionError("shape mismatch")
    p = g.group.order
    delta = [(a - b) % p for a, b in zip(y_hat, y)]
    if not any(delta):
        return False
    return V_hat / V == g ** dot(r, delta, p)


class Challenger:
    """Holds the secret keys and answers oracle queries."""

    def __init__(self, pk: PublicParams, variant: Variant, rng, q: int):
        self.pk = pk
        self.variant = Variant(variant)
        self.q = q
        self.verify_queries = 0
        self.transcript = []
        self._rng = rng
        self._functions = []  # handle -> (F, secret)

    def keygen(self, F) -> tuple:
        """Returns (handle, EvaluationKey)."""
        pk = self.pk
        if not isinstance(F, Matrix):
            F = Matrix.from_rows(F, pk.group.order)
        if self.variant is Variant.E0_STANDARD:
            ek, vk = keygen(self._rng, pk, F)
            secret = vk
        else:
            p = pk.group.order
            r = tuple(self._rng.randrange(p) for _ in range(F.m))
            Z = tuple(sample_element(pk.group, self._rng) for _ in range(F.d))
            ek = random_tag_key(pk, F, r, Z)
            secret = (r, Z)
        handle = len(self._functions)
        self._functions.append((F, secret))
        self.transcript.append(("keygen", handle, ek))
        return handle, ek

    def probgen(self, x) -> tuple:
        """Returns sigma_x; VK_x is recomputed by the challenger when needed."""
        sigma = probgen(self.pk, x).x
        self.transcript.append(("probgen", sigma))
        return sigma

    def _check(self, handle: int, x, resp: ServerResponse) -> Optional[tuple]:
        self.verify_queries += 1
        if self.verify_queries > self.q:
            raise QueryBudgetExceeded("query budget exceeded")
        if not 0 <= handle < len(self._functions):
            raise ValueError("unknown function handle")
        F, secret = self._functions[handle]
        pk = self.pk
        x = tuple(int(v) % pk.group.order for v in x)
        if self.variant is Variant.E0_STANDARD:
            return verify(secret, probgen(pk, x).vk_x, resp)
        r, Z = secret
        if len(resp.y) != len(r):
            raise DimensionError("shape mismatch")
        p = pk.group.order
        if resp.V == pk.g ** dot(r, resp.y, p) * multi_exp(Z, x):
            return tuple(resp.y)
        return None

    def verify(self, handle: int, x, resp: ServerResponse) -> Optional[tuple]:
        out = self._check(handle, x, resp)
        self.transcript.append(("verify", handle, tuple(x), out is not None))
        return out

    def finalize(self, forgery: Forgery) -> AdversaryOutcome:
        y_hat = self._check(forgery.handle, forgery.x, forgery.response)
        F, _ = self._functions[forgery.handle]
        p = self.pk.group.order
        truth = tuple(sum(a * b for a, b in zip(row, forgery.x)) % p for row in F.rows)
        won = y_hat is not None and tuple(v % p for v in y_hat) != truth
        self.transcript.append(("final", forgery.handle, tuple(forgery.x), y_hat is not None))
        return AdversaryOutcome(won, self.verify_queries, self.transcript)

    def view(self) -> SimpleNamespace:
        """What the adversary gets: public parameters and the three oracles."""
        return SimpleNamespace(
            pk=self.pk, q=self.q, keygen=self.keygen, probgen=self.probgen, verify=self.verify
        )


# Adversaries: callables (oracles, rng, cfg) -> Forgery, deterministic given rng.

def _honest_pair(oracles, rng, cfg):
    pk = oracles.pk
    F = Matrix.random(pk.group, rng, cfg.m, cfg.d)
    handle, ek = oracles.keygen(F)
    x = oracles.probgen(random_vector(pk.group, rng, cfg.d))
    return handle, ek, x, compute(ek, InputEncoding(x, None))


def _bump_first(y, p, delta=1):
    return ((y[0] + delta) % p,) + tuple(y[1:])


def honest(oracles, rng, cfg) -> Forgery:
    handle, _, x, resp = _honest_pair(oracles, rng, cfg)
    return Forgery(handle, x, resp)


def bit_flip(oracles, rng, cfg) -> Forgery:
    handle, _, x, resp = _honest_pair(oracles, rng, cfg)
    p = oracles.pk.group.order
    return Forgery(handle, x, ServerResponse(_bump_first(resp.y, p), resp.V))


def random_offset(oracles, rng, cfg) -> Forgery:
    handle, _, x, resp = _honest_pair(oracles, rng, cfg)
    pk = oracles.pk
    v = rng.randrange(pk.group.order)
    return Forgery(handle, x, ServerResponse(_bump_first(resp.y, pk.group.order), resp.V * pk.g ** v))


def scaled_response(oracles, rng, cfg) -> Forgery:
    handle, _, x, resp = _honest_pair(oracles, rng, cfg)
    p = oracles.pk.group.order
    c = rng.randrange(2, p)
    return Forgery(handle, x, ServerResponse(tuple(c * v % p for v in resp.y), resp.V ** c))


def replay(oracles, rng, cfg) -> Forgery:
    handle, _, _, resp = _honest_pair(oracles, rng, cfg)
    pk = oracles.pk
    x2 = oracles.probgen(random_vector(pk.group, rng, cfg.d))
    return Forgery(handle, x2, resp)


def adaptive_offset(oracles, rng, cfg) -> Forgery:
    """Spend q-1 Verify queries on distinct offsets, then submit the best guess.

    Every rejected query rules out one value of r . (y_hat - y).
    """
    handle, _, x, resp = _honest_pair(oracles, rng, cfg)
    pk = oracles.pk
    p = pk.group.order
    y_hat = _bump_first(resp.y, p)
    offsets = rng.sample(range(p), min(oracles.q, p))
    for v in offsets[:-1]:
        cand = ServerResponse(y_hat, resp.V * pk.g ** v)
        if oracles.verify(handle, x, cand) is not None:
            return Forgery(handle, x, cand)
    return Forgery(handle, x, ServerResponse(y_hat, resp.V * pk.g ** offsets[-1]))


STRATEGIES: dict = {
    "honest": honest,
    "bit_flip": bit_flip,
    "random_offset": random_offset,
    "scaled_response": scaled_response,
    "replay": replay,
    "adaptive_offset": adaptive_offset,
}


def run_experiment(cfg: ExperimentConfig, adversary: Callable, seed=0) -> AdversaryOutcome:
    """One run of the forgery game. Challenger and adversary get separate RNG streams."""
    if isinstance(adversary, str):
        adversary = STRATEGIES[adversary]
    chal_rng = random.Random(f"challenger:{seed}")
    adv_rng = random.Random(f"adversary:{seed}")
    pk = setup(chal_rng, get_group(cfg.backend), cfg.d)
    challenger = Challenger(pk, cfg.variant, chal_rng, cfg.q)
    forgery = adversary(challenger.view(), adv_rng, cfg)
    return challenger.finalize(forgery)


def run_e3_variant(cfg: ExperimentConfig, adversary: Callable, seed=0) -> AdversaryOutcome:
    if cfg.variant is not Variant.E3_RANDOM_TAGS:
        raise ValueError("configuration is not the E3 variant")
    return run_experiment(cfg, adversary, seed)


def forgery_bound(q: int, p: int) -> float:
    """Information-theoretic part of the forgery bound, q / (p - q + 1)."""
    return q / (p - q + 1)


@dataclass(frozen=True)
class MonteCarloResult:
    strategy: str
    variant: str
    q: int
    p: int
    trials: int
    successes: int

    @property
    def rate(self) -> float:
        return self.successes / self.trials

    @property
    def bound(self) -> float:
        return forgery_bound(self.q, self.p)

    @property
    def sigma(self) -> float:
        b = min(self.bound, 1.0)
        return math.sqrt(b * (1 - b) / self.trials)

    @property
    def within_bound(self) -> bool:
        return self.rate <= self.bound + 3 * self.sigma

    def csv_row(self) -> dict:
        return {
            "strategy": self.strategy,
            "variant": self.variant,
            "q": self.q,
            "p": self.p,
            "trials": self.trials,
            "successes": self.successes,
            "rate": f"{self.rate:.6f}",
            "bound": f"{self.bound:.6f}",
            "sigma": f"{self.sigma:.6f}",
            "verdict": "PASS" if self.within_bound else "FAIL",
        }


def _count_successes(cfg: ExperimentConfig, name: str, seed, start: int, stop: int) -> int:
    adversary = STRATEGIES[name]
    return sum(
        run_experiment(cfg, adversary, f"{seed}:{name}:{i}").succeeded for i in range(start, stop)
    )


def monte_carlo(cfg: ExperimentConfig, strategy: str, seed=0, workers: int = 1) -> MonteCarloResult:
    """Run cfg.trials independent games; trial i is seeded from (seed, strategy, i)."""
    n = cfg.trials
    if workers <= 1:
        wins = _count_successes(cfg, strategy, seed, 0, n)
    else:
        step = -(-n // workers)
        bounds = [(i, min(i + step, n)) for i in range(0, n, step)]
        with ProcessPoolExecutor(workers) as pool:
            futs = [pool.submit(_count_successes, cfg, strategy, seed, a, b) for a, b in bounds]
            wins = sum(f.result() for f in futs)
    p = get_group(cfg.backend).order
    return MonteCarloResult(strategy, cfg.variant.value, cfg.q, p, n, wins)

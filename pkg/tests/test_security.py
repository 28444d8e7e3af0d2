import itertools
import random

import pytest

from mmvc.algebra import get_group, multi_exp, sample_element
from mmvc.errors import QueryBudgetExceeded
from mmvc.scheme import FunctionVerificationKey, Matrix, ServerResponse, compute, probgen, setup
from mmvc.security import (
    STRATEGIES,
    Challenger,
    ExperimentConfig,
    Forgery,
    Variant,
    forgery_bound,
    forgery_condition,
    monte_carlo,
    random_tag_key,
    run_e3_variant,
    run_experiment,
)
from mmvc.wire import dumps

P = 101


def test_bound_values():
    assert forgery_bound(1, 101) == 1 / 101
    assert forgery_bound(10, 101) == 10 / 92


def test_honest_never_wins():
    for variant in Variant:
        cfg = ExperimentConfig(variant=variant)
        assert not any(run_experiment(cfg, "honest", i).succeeded for i in range(200))


def test_bit_flip_fails_on_production():
    cfg = ExperimentConfig(backend="production", variant=Variant.E0_STANDARD, m=2, d=3)
    for i in range(20):
        out = run_experiment(cfg, "bit_flip", i)
        assert not out.succeeded
        assert out.queries_used == 1


def test_forgery_condition_cases(toy):
    g = toy.generator
    r, y = (3, 5), (10, 20)
    V = toy.elements()[9]
    assert not forgery_condition(r, y, y, V, V * g ** 7, g)
    y_hat = (11, 22)
    delta_dot = (3 * 1 + 5 * 2) % P
    assert forgery_condition(r, y, y_hat, V, V * g ** delta_dot, g)
    assert not forgery_condition(r, y, y_hat, V, V * g ** (delta_dot + 1), g)


def test_forgery_condition_random_rate(toy):
    rng = random.Random(3)
    g = toy.generator
    trials = 20_000
    hits = 0
    for _ in range(trials):
        r = (rng.randrange(P), rng.randrange(P))
        V = sample_element(toy, rng)
        hits += forgery_condition(r, (0, 0), (1, 0), V, sample_element(toy, rng), g)
    sigma = (trials * (1 / P) * (1 - 1 / P)) ** 0.5
    assert abs(hits - trials / P) <= 4 * sigma


@pytest.mark.parametrize("m", [1, 2])
def test_solution_count_over_all_r(toy, m):
    # For any fixed nonzero y_hat - y and any offset v, exactly p**(m-1) of the
    # p**m possible r satisfy r . (y_hat - y) == v.
    g = toy.generator
    rng = random.Random(m)
    V = sample_element(toy, rng)
    y = tuple(rng.randrange(P) for _ in range(m))
    for _ in range(3):
        delta = tuple(rng.randrange(P) for _ in range(m))
        if not any(delta):
            continue
        y_hat = tuple((a + b) % P for a, b in zip(y, delta))
        for v in (0, 1, rng.randrange(P)):
            V_hat = V * g ** v
            count = sum(
                forgery_condition(r, y, y_hat, V, V_hat, g)
                for r in itertools.product(range(P), repeat=m)
            )
            assert count == P ** (m - 1)


def test_exhaustive_offsets_through_e3_check(toy):
    # Every accepted offset found by brute force through the challenger's own
    # check; for a fixed r exactly one offset works per y_hat.
    rng = random.Random(17)
    pk = setup(rng, toy, 2)
    ch = Challenger(pk, Variant.E3_RANDOM_TAGS, rng, q=10**6)
    F = Matrix.from_rows([[1, 2], [3, 4]], P)
    handle, ek = ch.keygen(F)
    x = ch.probgen((5, 6))
    resp = compute(ek, probgen(pk, x))
    accepted = [
        v for v in range(P)
        if ch.verify(handle, x, ServerResponse(((resp.y[0] + 1) % P, resp.y[1]), resp.V * pk.g ** v))
    ]
    r, _ = ch._functions[handle][1]
    assert accepted == [r[0]]


def test_random_offset_rate():
    cfg = ExperimentConfig(trials=20_000)
    res = monte_carlo(cfg, "random_offset", seed=5)
    sigma = ((1 / P) * (1 - 1 / P) / cfg.trials) ** 0.5
    assert abs(res.rate - 1 / P) <= 3 * sigma


@pytest.mark.parametrize("q", [1, 5])
def test_all_strategies_within_bound(q):
    cfg = ExperimentConfig(trials=3000, q=q)
    for name in STRATEGIES:
        res = monte_carlo(cfg, name, seed=1)
        assert res.within_bound, res.csv_row()


def test_adaptive_uses_budget():
    cfg = ExperimentConfig(q=4)
    out = run_experiment(cfg, "adaptive_offset", 3)
    assert 1 <= out.queries_used <= 4


def test_query_budget_enforced(toy):
    pk = setup(random.Random(0), toy, 2)
    ch = Challenger(pk, Variant.E3_RANDOM_TAGS, random.Random(1), q=1)
    handle, ek = ch.keygen(Matrix.zeros(2, 2))
    x = ch.probgen((1, 1))
    resp = compute(ek, probgen(pk, x))
    ch.verify(handle, x, resp)
    with pytest.raises(QueryBudgetExceeded, match="query budget exceeded"):
        ch.verify(handle, x, resp)


def test_replay_is_deterministic():
    cfg = ExperimentConfig(q=3)
    for name in STRATEGIES:
        a = run_experiment(cfg, name, "fixed")
        b = run_experiment(cfg, name, "fixed")
        assert a.succeeded == b.succeeded
        assert a.transcript == b.transcript


def test_e3_runner_rejects_e0():
    with pytest.raises(ValueError):
        run_e3_variant(ExperimentConfig(variant=Variant.E0_STANDARD), "honest")
    assert not run_e3_variant(ExperimentConfig(), "honest").succeeded


def test_adversary_view_hides_secrets():
    cfg = ExperimentConfig(q=3)
    seen = {}

    def spy(oracles, rng, cfg):
        seen["attrs"] = set(vars(oracles))
        return STRATEGIES["adaptive_offset"](oracles, rng, cfg)

    for variant in Variant:
        out = run_experiment(ExperimentConfig(q=3, variant=variant), spy, 0)
        assert seen["attrs"] == {"pk", "q", "keygen", "probgen", "verify"}
        for entry in out.transcript:
            for item in entry:
                assert not isinstance(item, FunctionVerificationKey)
            # keygen entries carry only the public evaluation key
            if entry[0] == "keygen":
                assert type(entry[2]).__name__ == "EvaluationKey"


def test_probgen_answers_independent_of_r(toy):
    # Same challenger randomness up to r: ProbGen answers are byte-identical.
    pk = setup(random.Random(4), toy, 3)
    x = (7, 8, 9)
    answers = set()
    for seed in range(5):
        ch = Challenger(pk, Variant.E3_RANDOM_TAGS, random.Random(seed), q=1)
        ch.keygen(Matrix.random(toy, random.Random(0), 2, 3))
        answers.add(dumps(ch.probgen(x), toy))
    assert len(answers) == 1


@pytest.mark.parametrize("name", ["toy", "production"])
def test_keygen_answers_independent_of_r(name):
    # For r != r' the map Z -> Z * g**((r - r') F) is a bijection on tag
    # randomness under which the published key is byte-identical, so the
    # KeyGen answer distribution does not depend on r.
    group = get_group(name)
    rng = random.Random(6)
    p = group.order
    pk = setup(rng, group, 3)
    F = Matrix.random(group, rng, 2, 3)
    for _ in range(10):
        r = (rng.randrange(p), rng.randrange(p))
        r2 = (rng.randrange(p), rng.randrange(p))
        Z = tuple(sample_element(group, rng) for _ in range(3))
        diff = tuple((a - b) % p for a, b in zip(r, r2))
        shift = [sum(diff[i] * F.rows[i][j] for i in range(2)) % p for j in range(3)]
        Z2 = tuple(z * pk.g ** s for z, s in zip(Z, shift))
        ek1 = random_tag_key(pk, F, r, Z)
        ek2 = random_tag_key(pk, F, r2, Z2)
        assert dumps(ek1, group) == dumps(ek2, group)


def test_e3_tags_uniform_for_fixed_r(toy):
    # Tag W_1 is uniform over the subgroup whatever r is.
    pk = setup(random.Random(2), toy, 1)
    F = Matrix.from_rows([[5]], P)
    for r in ((0,), (50,)):
        rng = random.Random(r[0])
        counts = {}
        for _ in range(5050):
            W = random_tag_key(pk, F, r, (sample_element(toy, rng),)).W[0]
            counts[W.raw] = counts.get(W.raw, 0) + 1
        assert len(counts) == P
        sigma = (5050 * (1 / P) * (1 - 1 / P)) ** 0.5
        assert all(abs(c - 50) <= 5 * sigma for c in counts.values())


def test_e3_verification_equation(toy):
    rng = random.Random(9)
    pk = setup(rng, toy, 2)
    ch = Challenger(pk, Variant.E3_RANDOM_TAGS, rng, q=5)
    F = Matrix.from_rows([[1, 2], [3, 4]], P)
    handle, ek = ch.keygen(F)
    r, Z = ch._functions[handle][1]
    x = ch.probgen((5, 6))
    resp = compute(ek, probgen(pk, x))
    assert resp.V == pk.g ** ((r[0] * resp.y[0] + r[1] * resp.y[1]) % P) * multi_exp(Z, x)
    assert ch.verify(handle, x, resp) == (17, 39)
    outcome = ch.finalize(Forgery(handle, x, resp))
    assert not outcome.succeeded
    assert outcome.queries_used == 2


def test_monte_carlo_workers_agree():
    cfg = ExperimentConfig(trials=600)
    a = monte_carlo(cfg, "random_offset", seed=2, workers=1)
    b = monte_carlo(cfg, "random_offset", seed=2, workers=2)
    assert a == b

import csv
import itertools

import pytest

from mmvc.algebra import OpCounters, get_group
from mmvc.bench import (
    FIGURES,
    PHASES,
    BenchConfig,
    CounterMismatch,
    check_counts,
    emit_figure_series,
    expected_counts,
    model_times,
    run_bench,
    run_workload,
    sweep,
    write_csv,
)
from mmvc.wire import size_report


@pytest.mark.parametrize("scheme", ["mmvc", "fg12"])
def test_counts_match_closed_forms_small_grid(scheme):
    toy = get_group("toy")
    for a, b, m, d in itertools.product((1, 2), (1, 3), (1, 2, 5), (1, 4)):
        w = run_workload(scheme, toy, a, b, m, d, seed=a + b + m + d)
        assert w.all_verified
        check_counts(scheme, w.counters, a, b, m, d)


def test_closed_form_spot_values():
    # a=2, b=3, m=4, d=5 worked out by hand from the per-call costs
    mm = expected_counts("mmvc", 2, 3, 4, 5)
    assert mm["keygen"] == OpCounters(10, 30, 40, 10, 20)
    assert mm["compute"] == OpCounters(0, 96, 120, 24, 30)
    assert mm["verify"] == OpCounters(0, 18, 24, 6, 12)
    fg = expected_counts("fg12", 2, 3, 4, 5)
    assert fg["keygen"] == OpCounters(16, 0, 40, 40, 80)
    assert fg["compute"] == OpCounters(0, 96, 120, 96, 120)
    assert fg["verify"] == OpCounters(0, 0, 24, 24, 48)
    assert mm["probgen"] == fg["probgen"] == OpCounters(0, 0, 0, 12, 15)


def test_m1_server_exponentiations_equal_d():
    for d in (1, 3, 9):
        for scheme in ("mmvc", "fg12"):
            w = run_workload(scheme, "toy", 1, 1, 1, d)
            assert w.counters["compute"].exp_G == d


def test_check_counts_names_cell():
    w = run_workload("mmvc", "toy", 1, 1, 2, 3)
    bad = dict(w.counters)
    bad["verify"] = bad["verify"] + OpCounters(exp_G=1)
    with pytest.raises(CounterMismatch, match=r"mmvc verify\.exp_G"):
        check_counts("mmvc", bad, 1, 1, 2, 3)


def test_workers_do_not_change_counts():
    for scheme in ("mmvc", "fg12"):
        w1 = run_workload(scheme, "toy", 3, 3, 2, 4, workers=1)
        w4 = run_workload(scheme, "toy", 3, 3, 2, 4, workers=4)
        assert w1.counters == w4.counters
        assert w4.all_verified


def test_measured_sizes_match_formulas():
    toy = get_group("toy")
    for a, b, m, d in ((1, 1, 1, 1), (2, 3, 4, 5), (3, 1, 2, 16)):
        want = size_report(a, b, m, d, toy.scalar_bits, toy.element_bits)
        assert run_workload("mmvc", toy, a, b, m, d).sizes == want.mmvc
        assert run_workload("fg12", toy, a, b, m, d).sizes == want.fg12


def test_bench_config_validation():
    with pytest.raises(ValueError):
        BenchConfig(1, 1, 1, 1, repetitions=2)
    with pytest.raises(ValueError):
        BenchConfig(0, 1, 1, 1)
    with pytest.raises(ValueError):
        BenchConfig(1, 1, 1, 1, scheme="other")


def test_run_bench_report_and_csv(tmp_path):
    cfg = BenchConfig(2, 2, 3, 4, backend="toy", lp=2304, lg=832)
    rep = run_bench(cfg)
    assert set(rep.client_time) == {"mmvc", "fg12"}
    assert rep.sizes == size_report(2, 2, 3, 4, 2304, 832)
    row = rep.csv_row("m")
    for col in ("m", "t_c1", "t_c2", "t_s1", "t_s2", "t_c2/t_c1", "t_s2/t_s1",
                "c1_mb", "c2_mb", "s1_kb", "s2_kb"):
        assert col in row
    assert row["mmvc.compute.exp_G"] == 2 * 2 * 4
    path = tmp_path / "bench.csv"
    write_csv([row], path)
    with open(path) as fh:
        back = list(csv.DictReader(fh))
    assert back[0]["s2_kb"] == f"{rep.sizes.s2_kb:.4f}"


def test_single_scheme_bench():
    rep = run_bench(BenchConfig(1, 1, 2, 2, backend="toy", scheme="mmvc"))
    assert set(rep.counters) == {"mmvc"}


def test_sweep_m1_ratios_near_one():
    # at m = 1 both schemes do the same work; only noise separates the timings
    reps = sweep(BenchConfig(2, 2, 1, 16, backend="production", repetitions=3), "d", [8, 16])
    for r in reps:
        assert 0.6 <= r.server_ratio <= 1.6
        assert 0.6 <= r.client_ratio <= 1.6
        assert r.sizes.c1_mb == r.sizes.c2_mb


def test_sweep_sizes_follow_size_report():
    reps = sweep(BenchConfig(1, 2, 2, 2, backend="toy"), "m", [1, 3])
    for r in reps:
        g = get_group("toy")
        c = r.config
        assert r.sizes == size_report(c.a, c.b, c.m, c.d, g.scalar_bits, g.element_bits)


def test_model_times_scale_with_m():
    unit = {"rng": 0, "add_p": 0, "mul_p": 0, "mul_G": 0, "exp_G": 1.0}
    c1, s1 = model_times("mmvc", 1, 1, 8, 10, unit)
    c2, s2 = model_times("fg12", 1, 1, 8, 10, unit)
    assert s2 / s1 == 8
    assert (c1, c2) == (2 * 10 + 10 + 2, 2 * 80 + 10 + 16)


def test_emit_figure_series(tmp_path):
    unit = {"rng": 1e-7, "add_p": 1e-7, "mul_p": 1e-7, "mul_G": 1e-5, "exp_G": 1e-4}
    series = emit_figure_series(dict(a=20, b=20, m=200, d=20), "m", [1, 100, 200], tmp_path,
                                2304, 832, unit=unit)
    assert sorted(p.name for p in tmp_path.iterdir()) == sorted(FIGURES)
    comm = series["fig3_communication.csv"]
    assert comm[0]["ratio"] == 1.0
    assert round(comm[-1]["c1_mb"], 2) == 44.13
    storage = series["fig4_storage.csv"]
    assert storage[-1]["s2_kb"] == 2252.03125
    assert all(row["ratio"] >= 1 for row in series["fig2_server_time.csv"])


def test_phases_cover_counters():
    w = run_workload("fg12", "toy", 1, 1, 1, 1)
    assert tuple(w.counters) == PHASES

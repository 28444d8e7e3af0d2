"""Benchmarks: a functions times b inputs, multi-matrix scheme vs. row-by-row baseline.

Operation counts are the hard gate: every run is checked cell by cell
against the closed forms below. Wall-clock times are medians over
repetitions and only used for ratios.

Closed forms per phase (rng, add_p, mul_p, mul_G, exp_G):

=========  ======================================  ======================================
phase      mmvc                                    fg12 (applied to every row)
=========  ======================================  ======================================
setup      d, 0, 0, 0, 0                           d, 0, 0, 0, 0
keygen     a(m+1), a(m-1)d, amd, ad, 2ad           2am, 0, amd, amd, 2amd
probgen    0, 0, 0, b(d-1), bd                     0, 0, 0, b(d-1), bd
compute    0, abm(d-1), abmd, ab(d-1), abd         0, abm(d-1), abmd, abm(d-1), abmd
verify     0, ab(m-1), abm, ab, 2ab                0, 0, abm, abm, 2abm
=========  ======================================  ======================================
"""

from __future__ import annotations

import csv
import gc
import random
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from mmvc.algebra import FIELDS, OpCounters, counter_scope, get_group, record
from mmvc.fg12 import fg12_compute, fg12_keygen, fg12_verify
from mmvc.scheme import (
    FunctionVerificationKey,
    Matrix,
    ServerResponse,
    compute,
    keygen,
    probgen,
    random_vector,
    setup,
    verify,
)
from mmvc.wire.sizes import SchemeSizes, SizeReport, measure_sizes, size_report

PHASES = ("setup", "keygen", "probgen", "compute", "verify")
CLIENT_PHASES = ("keygen", "probgen", "verify")
SCHEMES = ("mmvc", "fg12")


class CounterMismatch(AssertionError):
    pass


class SizeMismatch(AssertionError):
    pass


def expected_counts(scheme: str, a: int, b: int, m: int, d: int) -> dict:
    """Closed-form operation counts per phase for the full a x b workload."""
    if scheme == "mmvc":
        return {
            "setup": OpCounters(d, 0, 0, 0, 0),
            "keygen": OpCounters(a * (m + 1), a * (m - 1) * d, a * m * d, a * d, 2 * a * d),
            "probgen": OpCounters(0, 0, 0, b * (d - 1), b * d),
            "compute": OpCounters(0, a * b * m * (d - 1), a * b * m * d, a * b * (d - 1), a * b * d),
            "verify": OpCounters(0, a * b * (m - 1), a * b * m, a * b, 2 * a * b),
        }
    if scheme == "fg12":
        return {
            "setup": OpCounters(d, 0, 0, 0, 0),
            "keygen": OpCounters(2 * a * m, 0, a * m * d, a * m * d, 2 * a * m * d),
            "probgen": OpCounters(0, 0, 0, b * (d - 1), b * d),
            "compute": OpCounters(0, a * b * m * (d - 1), a * b * m * d, a * b * m * (d - 1), a * b * m * d),
            "verify": OpCounters(0, 0, a * b * m, a * b * m, 2 * a * b * m),
        }
    raise ValueError(f"unknown scheme {scheme!r}")


def check_counts(scheme: str, measured: dict, a: int, b: int, m: int, d: int) -> None:
    """Raise CounterMismatch naming the first cell that differs from the closed form."""
    want = expected_counts(scheme, a, b, m, d)
    for phase in PHASES:
        for col in FIELDS:
            got, exp = getattr(measured[phase], col), getattr(want[phase], col)
            if got != exp:
                raise CounterMismatch(
                    f"{scheme} {phase}.{col}: counted {got}, closed form {exp} "
                    f"(a={a}, b={b}, m={m}, d={d})"
                )


@dataclass
class Workload:
    """Result of running one scheme over all (F_i, x_j) pairs."""

    scheme: str
    counters: dict
    times: dict
    sizes: SchemeSizes
    all_verified: bool

    @property
    def client_time(self) -> float:
        return sum(self.times[p] for p in CLIENT_PHASES)

    @property
    def server_time(self) -> float:
        return self.times["compute"]


def _scoped_task(fn, *args):
    with counter_scope() as c:
        out = fn(*args)
    return out, c


def _map(fn, items, workers: int):
    """Sequential map, or a thread pool whose per-task counts are merged back."""
    if workers <= 1:
        return [fn(*it) for it in items]
    with ThreadPoolExecutor(workers) as pool:
        results = list(pool.map(lambda it: _scoped_task(fn, *it), items))
    total = OpCounters()
    for _, c in results:
        total = total + c
    record(**total.as_dict())
    return [out for out, _ in results]


def run_workload(scheme: str, group, a: int, b: int, m: int, d: int, seed=0, workers: int = 1) -> Workload:
    """Setup, a KeyGens, b ProbGens, ab Computes and ab Verifies, each phase timed and counted.

    Workload data (matrices, inputs) comes from its own RNG stream, so both
    schemes see the same F_i and x_j for a given seed.
    """
    if isinstance(group, str):
        group = get_group(group)
    data_rng = random.Random(f"data:{seed}")
    rng = random.Random(f"scheme:{seed}")
    Fs = [Matrix.random(group, data_rng, m, d) for _ in range(a)]
    xs = [random_vector(group, data_rng, d) for _ in range(b)]
    counters, times = {}, {}

    def phase(name, fn):
        t0 = time.perf_counter()
        with counter_scope(name) as c:
            out = fn()
        times[name] = time.perf_counter() - t0
        counters[name] = c
        return out

    pk = phase("setup", lambda: setup(rng, group, d))
    pairs = [(i, j) for i in range(a) for j in range(b)]

    if scheme == "mmvc":
        keys = phase("keygen", lambda: [keygen(rng, pk, F) for F in Fs])
        encs = phase("probgen", lambda: [probgen(pk, x) for x in xs])
        resps = phase("compute", lambda: _map(lambda i, j: compute(keys[i][0], encs[j]), pairs, workers))
        outs = phase("verify", lambda: [
            verify(keys[i][1], encs[j].vk_x, resps[n]) for n, (i, j) in enumerate(pairs)
        ])
        ok = all(out == r.y for out, r in zip(outs, resps))
        sizes = measure_sizes(
            group,
            [ek for ek, _ in keys],
            encs,
            resps,
            [vk for _, vk in keys],
            [e.vk_x for e in encs],
        )
    elif scheme == "fg12":
        keys = phase("keygen", lambda: [[fg12_keygen(rng, pk, row) for row in F.rows] for F in Fs])
        encs = phase("probgen", lambda: [probgen(pk, x) for x in xs])
        resps = phase("compute", lambda: _map(
            lambda i, j: [fg12_compute(ek, encs[j]) for ek, _ in keys[i]], pairs, workers))
        outs = phase("verify", lambda: [
            [fg12_verify(vk, encs[j].vk_x, y, V) for (_, vk), (y, V) in zip(keys[i], resps[n])]
            for n, (i, j) in enumerate(pairs)
        ])
        ok = all(
            out == [y for y, _ in rows] for out, rows in zip(outs, resps)
        )
        sizes = measure_sizes(
            group,
            [ek for row_keys in keys for ek, _ in row_keys],
            encs,
            [ServerResponse((y,), V) for rows in resps for y, V in rows],
            [FunctionVerificationKey(vk.k, (vk.alpha,)) for row_keys in keys for _, vk in row_keys],
            [e.vk_x for e in encs],
        )
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return Workload(scheme, counters, times, sizes, ok)


@dataclass(frozen=True)
class BenchConfig:
    a: int
    b: int
    m: int
    d: int
    backend: str = "production"
    repetitions: int = 3
    scheme: str = "both"
    seed: int = 0
    workers: int = 1
    lp: int = None  # size-accounting overrides, bits
    lg: int = None

    def __post_init__(self):
        if min(self.a, self.b, self.m, self.d) < 1:
            raise ValueError("a, b, m, d must be positive")
        if self.repetitions < 3:
            raise ValueError("timing needs at least 3 repetitions")
        if self.scheme not in ("mmvc", "fg12", "both"):
            raise ValueError(f"unknown scheme {self.scheme!r}")

    @property
    def schemes(self) -> tuple:
        return SCHEMES if self.scheme == "both" else (self.scheme,)


@dataclass
class BenchReport:
    config: BenchConfig
    counters: dict = field(default_factory=dict)  # scheme -> phase -> OpCounters
    client_time: dict = field(default_factory=dict)  # scheme -> median seconds
    server_time: dict = field(default_factory=dict)
    measured_sizes: dict = field(default_factory=dict)  # scheme -> SchemeSizes
    sizes: SizeReport = None

    @property
    def client_ratio(self) -> float:
        return self.client_time["fg12"] / self.client_time["mmvc"]

    @property
    def server_ratio(self) -> float:
        return self.server_time["fg12"] / self.server_time["mmvc"]

    def csv_row(self, param: str = None) -> dict:
        cfg = self.config
        row = {"seed": cfg.seed}
        if param:
            row[param] = getattr(cfg, param)
        row.update(a=cfg.a, b=cfg.b, m=cfg.m, d=cfg.d)
        for s, tag in (("mmvc", "1"), ("fg12", "2")):
            if s in self.client_time:
                row[f"t_c{tag}"] = f"{self.client_time[s]:.6f}"
                row[f"t_s{tag}"] = f"{self.server_time[s]:.6f}"
        if len(self.client_time) == 2:
            row["t_c2/t_c1"] = f"{self.client_ratio:.4f}"
            row["t_s2/t_s1"] = f"{self.server_ratio:.4f}"
        for s in self.counters:
            for phase, c in self.counters[s].items():
                for col in FIELDS:
                    row[f"{s}.{phase}.{col}"] = getattr(c, col)
        sr = self.sizes
        row.update(
            c1_mb=f"{sr.c1_mb:.4f}", c2_mb=f"{sr.c2_mb:.4f}",
            s1_kb=f"{sr.s1_kb:.4f}", s2_kb=f"{sr.s2_kb:.4f}",
        )
        return row


def run_bench(cfg: BenchConfig) -> BenchReport:
    """Warm-up pass plus cfg.repetitions timed runs per scheme, interleaved.

    Raises CounterMismatch / SizeMismatch if counts or serialized sizes ever
    differ from the closed forms, and RuntimeError if an honest result fails
    to verify.
    """
    group = get_group(cfg.backend)
    a, b, m, d = cfg.a, cfg.b, cfg.m, cfg.d
    report = BenchReport(cfg)
    formula = size_report(a, b, m, d, group.scalar_bits, group.element_bits)
    for scheme in cfg.schemes:
        run_workload(scheme, group, a, b, m, d, cfg.seed, cfg.workers)  # warm-up
    # Interleave schemes so slow drift in machine speed hits both equally.
    all_runs = {s: [] for s in cfg.schemes}
    # Collector pauses land at random points, so keep them out of timed runs (as timeit does).
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(cfg.repetitions):
            for scheme in cfg.schemes:
                all_runs[scheme].append(run_workload(scheme, group, a, b, m, d, cfg.seed, cfg.workers))
                gc.collect()
    finally:
        if gc_was_enabled:
            gc.enable()
    for scheme, runs in all_runs.items():
        first = runs[0]
        if not all(w.all_verified for w in runs):
            raise RuntimeError(f"{scheme}: honest result rejected")
        check_counts(scheme, first.counters, a, b, m, d)
        want = getattr(formula, scheme)
        if first.sizes != want:
            raise SizeMismatch(f"{scheme}: measured {first.sizes} != closed form {want}")
        report.counters[scheme] = first.counters
        report.client_time[scheme] = statistics.median(w.client_time for w in runs)
        report.server_time[scheme] = statistics.median(w.server_time for w in runs)
        report.measured_sizes[scheme] = first.sizes
    lp = cfg.lp or group.scalar_bits
    lg = cfg.lg or group.element_bits
    report.sizes = size_report(a, b, m, d, lp, lg)
    return report


def sweep(cfg: BenchConfig, param: str, values) -> list:
    """One BenchReport per value of ``param`` (one of a, b, m, d)."""
    if param not in ("a", "b", "m", "d"):
        raise ValueError("sweep parameter must be one of a, b, m, d")
    return [run_bench(replace(cfg, **{param: v})) for v in values]


def write_csv(rows, path) -> None:
    rows = list(rows)
    if not rows:
        return
    header = list(dict.fromkeys(k for r in rows for k in r))
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=header)
        w.writeheader()
        w.writerows(rows)


# Figure series

def calibrate_unit_costs(backend: str = "production", samples: int = 200, seed=0) -> dict:
    """Median seconds per rng / add_p / mul_p / mul_G / exp_G on this machine."""
    group = get_group(backend)
    rng = random.Random(seed)
    p = group.order
    xs = [rng.randrange(p) for _ in range(samples)]
    els = [group.generator ** v for v in xs]

    def per_op(fn, reps=samples):
        t0 = time.perf_counter()
        for i in range(reps):
            fn(i)
        return (time.perf_counter() - t0) / reps

    return {
        "rng": per_op(lambda i: rng.randrange(p)),
        "add_p": per_op(lambda i: (xs[i] + xs[i - 1]) % p),
        "mul_p": per_op(lambda i: xs[i] * xs[i - 1] % p),
        "mul_G": per_op(lambda i: group._mul(els[i].raw, els[i - 1].raw)),
        "exp_G": per_op(lambda i: group._exp(els[i].raw, xs[i - 1])),
    }


def model_times(scheme: str, a, b, m, d, unit: dict):
    """(client, server) seconds predicted by the closed-form counts and unit costs."""
    counts = expected_counts(scheme, a, b, m, d)

    def cost(phases):
        return sum(getattr(counts[ph], col) * unit[col] for ph in phases for col in FIELDS)

    return cost(CLIENT_PHASES), cost(("compute",))


FIGURES = {
    "fig1_client_time.csv": ("t_c1", "t_c2"),
    "fig2_server_time.csv": ("t_s1", "t_s2"),
    "fig3_communication.csv": ("c1_mb", "c2_mb"),
    "fig4_storage.csv": ("s1_kb", "s2_kb"),
}


def emit_figure_series(base: dict, param: str, values, outdir, lp: int, lg: int,
                       unit: dict = None, measure: bool = False, backend: str = "production",
                       repetitions: int = 3, seed=0) -> dict:
    """Write four CSVs (client time, server time, communication, storage), one row per value.

    ``base`` fixes a, b, m, d; ``param`` is swept over ``values``. Times are
    measured when ``measure`` is set, otherwise predicted from unit costs.
    Returns {filename: rows}.
    """
    if param not in ("a", "b", "m", "d"):
        raise ValueError("sweep parameter must be one of a, b, m, d")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if not measure and unit is None:
        unit = calibrate_unit_costs(backend, seed=seed)
    series = {name: [] for name in FIGURES}
    for v in values:
        dims = dict(base, **{param: v})
        a, b, m, d = dims["a"], dims["b"], dims["m"], dims["d"]
        if measure:
            rep = run_bench(BenchConfig(a, b, m, d, backend=backend, repetitions=repetitions, seed=seed))
            tc1, tc2 = rep.client_time["mmvc"], rep.client_time["fg12"]
            ts1, ts2 = rep.server_time["mmvc"], rep.server_time["fg12"]
        else:
            tc1, ts1 = model_times("mmvc", a, b, m, d, unit)
            tc2, ts2 = model_times("fg12", a, b, m, d, unit)
        sr = size_report(a, b, m, d, lp, lg)
        values_by_col = {
            "t_c1": tc1, "t_c2": tc2, "t_s1": ts1, "t_s2": ts2,
            "c1_mb": sr.c1_mb, "c2_mb": sr.c2_mb, "s1_kb": sr.s1_kb, "s2_kb": sr.s2_kb,
        }
        for name, (c1, c2) in FIGURES.items():
            series[name].append({
                param: v, **{k: dims[k] for k in "abmd"},
                c1: values_by_col[c1], c2: values_by_col[c2],
                "ratio": values_by_col[c2] / values_by_col[c1],
            })
    for name, rows in series.items():
        write_csv(rows, outdir / name)
    return series

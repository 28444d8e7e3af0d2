"""Command-line interface.

Exit codes: 0 success, 1 verification rejected (or a security bound
violated), 2 usage error, 3 protocol or I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

from mmvc import bench, security
from mmvc.algebra import get_group
from mmvc.errors import DimensionError, InvalidElement, InvalidScalar, WireError
from mmvc.scheme import InputEncoding, Matrix, compute, keygen, probgen, random_vector, setup, verify
from mmvc.wire import Client, MsgType, dumps, loads, serve

EXIT_OK, EXIT_REJECT, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("mmvc")


class UsageError(Exception):
    pass


def _rng(seed):
    # Unseeded runs draw key material from the OS.
    return random.SystemRandom() if seed is None else random.Random(seed)


def _read(path, expect):
    return loads(Path(path).read_bytes(), expect)


def _write(path, obj, group):
    Path(path).write_bytes(dumps(obj, group))


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


def _host_port(text):
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise UsageError(f"expected HOST:PORT, got {text!r}")
    return host, int(port)


def cmd_setup(args):
    group = get_group(args.group)
    pk = setup(_rng(args.seed), group, args.d)
    _write(args.out, pk, group)
    print(f"setup: group={group.name} d={pk.d} -> {args.out}")


def cmd_keygen(args):
    _, group, pk = _read(args.pk, MsgType.PK)
    rng = _rng(args.seed)
    if args.input:
        F = Matrix.from_rows(_read_json(args.input), group.order)
    elif args.m:
        F = Matrix.random(group, rng, args.m, pk.d)
    else:
        raise UsageError("keygen needs --in MATRIX.json or --m")
    ek, vk = keygen(rng, pk, F)
    _write(args.out, ek, group)
    _write(args.vk, vk, group)
    print(f"keygen: m={F.m} d={F.d} -> {args.out} (verification key {args.vk})")


def cmd_probgen(args):
    _, group, pk = _read(args.pk, MsgType.PK)
    x = _read_json(args.input) if args.input else random_vector(group, _rng(args.seed), pk.d)
    enc = probgen(pk, x)
    _write(args.out, enc, group)
    _write(args.vk, enc.vk_x, group)
    print(f"probgen: d={len(enc.x)} -> {args.out} (verification key {args.vk})")


def cmd_compute(args):
    if len(args.input) != len(args.out):
        raise UsageError("--in and --out need the same number of files")
    _, group, ek = _read(args.ek, MsgType.EKF)
    encodings = [_read(p, MsgType.ENC)[2] for p in args.input]
    if args.remote:
        host, port = _host_port(args.remote)
        with Client(host, port, group) as client:
            fid = client.register(ek)
            responses = [client.compute(fid, x) for x in encodings]
    else:
        responses = [compute(ek, InputEncoding(x, None)) for x in encodings]
    for path, resp in zip(args.out, responses):
        _write(path, resp, group)
    print(f"compute: {len(responses)} response(s) written")


def cmd_verify(args):
    _, _, vk_f = _read(args.vk, MsgType.VKF)
    _, _, vk_x = _read(args.vkx, MsgType.VKX)
    _, _, resp = _read(args.input, MsgType.RESP)
    y = verify(vk_f, vk_x, resp)
    if y is None:
        print("verify: REJECT", file=sys.stderr)
        return EXIT_REJECT
    print(json.dumps(list(y)))
    return EXIT_OK


def cmd_serve(args):
    group = get_group(args.group)

    def ready(addr):
        print(f"listening on {addr[0]}:{addr[1]}", flush=True)

    try:
        serve(args.host, args.port, group, on_ready=ready)
    except KeyboardInterrupt:
        pass


def _parse_sweep(text):
    param, _, vals = text.partition("=")
    if param not in ("a", "b", "m", "d") or not vals:
        raise UsageError("--sweep expects PARAM=v1,v2,... with PARAM in a,b,m,d")
    return param, [int(v) for v in vals.split(",")]


def cmd_bench(args):
    print(f"# seed={args.seed} group={args.group} reps={args.reps}")
    if args.figures:
        if not args.sweep:
            raise UsageError("--figures needs --sweep")
        param, values = _parse_sweep(args.sweep)
        lp = args.lp or get_group(args.group).scalar_bits
        lg = args.lg or get_group(args.group).element_bits
        series = bench.emit_figure_series(
            dict(a=args.a, b=args.b, m=args.m, d=args.d), param, values, args.figures, lp, lg,
            measure=args.measure, backend=args.group, repetitions=args.reps, seed=args.seed,
        )
        for name, rows in series.items():
            print(f"{name}: {len(rows)} rows")
        return EXIT_OK
    cfg = bench.BenchConfig(
        args.a, args.b, args.m, args.d, backend=args.group, repetitions=args.reps,
        scheme=args.scheme, seed=args.seed, workers=args.workers, lp=args.lp, lg=args.lg,
    )
    if args.sweep:
        param, values = _parse_sweep(args.sweep)
        reports = bench.sweep(cfg, param, values)
    else:
        param, reports = None, [bench.run_bench(cfg)]
    rows = [r.csv_row(param) for r in reports]
    for r in reports:
        c = r.config
        line = f"a={c.a} b={c.b} m={c.m} d={c.d}:"
        for s in r.client_time:
            line += f" {s} t_c={r.client_time[s]:.4f}s t_s={r.server_time[s]:.4f}s"
        if len(r.client_time) == 2:
            line += f" t_c2/t_c1={r.client_ratio:.2f} t_s2/t_s1={r.server_ratio:.2f}"
        print(line)
        print(f"  c1={r.sizes.c1_mb:.2f}MB c2={r.sizes.c2_mb:.2f}MB "
              f"s1={r.sizes.s1_kb:.2f}KB s2={r.sizes.s2_kb:.2f}KB  counters match closed forms")
    if args.csv:
        bench.write_csv(rows, args.csv)
    return EXIT_OK


def cmd_securitytest(args):
    names = list(security.STRATEGIES) if args.strategy == "all" else [args.strategy]
    cfg = security.ExperimentConfig(
        q=args.q, backend=args.group, trials=args.trials, variant=args.variant, m=args.m, d=args.d,
    )
    print(f"# seed={args.seed} group={args.group} variant={cfg.variant.value} q={cfg.q} "
          f"m={cfg.m} d={cfg.d}")
    results = [security.monte_carlo(cfg, n, args.seed, args.workers) for n in names]
    rows = [r.csv_row() for r in results]
    for r in results:
        print(f"{r.strategy:16s} {r.successes}/{r.trials} rate={r.rate:.5f} "
              f"bound={r.bound:.5f} (+3sigma {r.bound + 3 * r.sigma:.5f}) "
              f"{'PASS' if r.within_bound else 'FAIL'}")
    if args.csv:
        bench.write_csv(rows, args.csv)
    return EXIT_OK if all(r.within_bound for r in results) else EXIT_REJECT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmvc", description="Multi-matrix verifiable computation")
    sub = parser.add_subparsers(dest="command", required=True)

    def group_flag(p, default="production"):
        p.add_argument("--group", choices=("production", "toy"), default=default)

    p = sub.add_parser("setup", help="generate public parameters")
    group_flag(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_setup)

    p = sub.add_parser("keygen", help="encode a matrix function")
    p.add_argument("--pk", required=True)
    p.add_argument("--in", dest="input", help="JSON matrix (list of rows)")
    p.add_argument("--m", type=int, help="random m x d matrix instead of --in")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="evaluation key file")
    p.add_argument("--vk", required=True, help="private verification key file")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("probgen", help="encode an input vector")
    p.add_argument("--pk", required=True)
    p.add_argument("--in", dest="input", help="JSON vector; random if omitted")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="input encoding file")
    p.add_argument("--vk", required=True, help="input verification key file")
    p.set_defaults(func=cmd_probgen)

    p = sub.add_parser("compute", help="server-side computation, local or remote")
    p.add_argument("--ek", required=True)
    p.add_argument("--in", dest="input", nargs="+", required=True)
    p.add_argument("--out", nargs="+", required=True)
    p.add_argument("--remote", metavar="HOST:PORT", help="send to a running server")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", help="check a response; prints y on success")
    p.add_argument("--vk", required=True, help="function verification key")
    p.add_argument("--vkx", required=True, help="input verification key")
    p.add_argument("--in", dest="input", required=True, help="response file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("serve", help="run the compute server")
    group_flag(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=7878, help="0 picks a free port")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("bench", help="operation counts, timings and sizes for both schemes")
    group_flag(p)
    for dim, default in (("a", 2), ("b", 2), ("m", 4), ("d", 16)):
        p.add_argument(f"--{dim}", type=int, default=default)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--scheme", choices=("mmvc", "fg12", "both"), default="both")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1, help="threads for the compute phase")
    p.add_argument("--sweep", metavar="PARAM=v1,v2,...")
    p.add_argument("--lp", type=int, help="override scalar length in bits for size columns")
    p.add_argument("--lg", type=int, help="override element length in bits for size columns")
    p.add_argument("--csv")
    p.add_argument("--figures", metavar="DIR", help="write the four figure CSVs for --sweep")
    p.add_argument("--measure", action="store_true",
                   help="with --figures: time real runs instead of the unit-cost model")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("securitytest", help="Monte Carlo forgery experiment")
    group_flag(p, default="toy")
    p.add_argument("--strategy", choices=("all",) + tuple(security.STRATEGIES), default="all")
    p.add_argument("--variant", choices=[v.value for v in security.Variant],
                   default=security.Variant.E3_RANDOM_TAGS.value)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_securitytest)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or EXIT_OK
    except (UsageError, DimensionError, ValueError) as exc:
        if isinstance(exc, (InvalidElement, InvalidScalar)):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (WireError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

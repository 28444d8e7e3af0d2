import csv
import json
import subprocess
import sys

import pytest

from mmvc.cli import main
from mmvc.wire import FILE_HEADER


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture
def pipeline(tmp_path):
    (tmp_path / "F.json").write_text(json.dumps([[1, 2, 3], [4, 5, 6]]))
    (tmp_path / "x.json").write_text(json.dumps([7, 8, 9]))
    p = {name: tmp_path / name for name in ("pk", "ek", "vkf", "enc", "vkx", "resp", "F.json", "x.json")}
    assert run("setup", "--group", "production", "--d", 3, "--seed", 1, "--out", p["pk"]) == 0
    assert run("keygen", "--pk", p["pk"], "--in", p["F.json"], "--seed", 2,
               "--out", p["ek"], "--vk", p["vkf"]) == 0
    assert run("probgen", "--pk", p["pk"], "--in", p["x.json"], "--out", p["enc"], "--vk", p["vkx"]) == 0
    assert run("compute", "--ek", p["ek"], "--in", p["enc"], "--out", p["resp"]) == 0
    return p


def test_pipeline_prints_y(pipeline, capsys):
    capsys.readouterr()
    assert run("verify", "--vk", pipeline["vkf"], "--vkx", pipeline["vkx"], "--in", pipeline["resp"]) == 0
    assert json.loads(capsys.readouterr().out) == [50, 122]


def test_tampered_response_exit_1(pipeline):
    data = bytearray(pipeline["resp"].read_bytes())
    data[FILE_HEADER.size + 4 + 31] ^= 0x01  # low byte of y_1
    pipeline["resp"].write_bytes(bytes(data))
    assert run("verify", "--vk", pipeline["vkf"], "--vkx", pipeline["vkx"], "--in", pipeline["resp"]) == 1


def test_corrupt_file_exit_3(pipeline):
    pipeline["resp"].write_bytes(b"MMVC")
    assert run("verify", "--vk", pipeline["vkf"], "--vkx", pipeline["vkx"], "--in", pipeline["resp"]) == 3
    assert run("verify", "--vk", "/nonexistent", "--vkx", pipeline["vkx"], "--in", pipeline["resp"]) == 3


def test_wrong_file_type_exit_3(pipeline):
    assert run("verify", "--vk", pipeline["ek"], "--vkx", pipeline["vkx"], "--in", pipeline["resp"]) == 3


def test_random_matrix_and_input(tmp_path, capsys):
    pk, ek, vkf, enc, vkx, resp = (tmp_path / n for n in ("pk", "ek", "vkf", "enc", "vkx", "resp"))
    assert run("setup", "--group", "toy", "--d", 4, "--out", pk) == 0
    assert run("keygen", "--pk", pk, "--m", 3, "--out", ek, "--vk", vkf) == 0
    assert run("probgen", "--pk", pk, "--out", enc, "--vk", vkx) == 0
    assert run("compute", "--ek", ek, "--in", enc, "--out", resp) == 0
    capsys.readouterr()
    assert run("verify", "--vk", vkf, "--vkx", vkx, "--in", resp) == 0
    y = json.loads(capsys.readouterr().out)
    assert len(y) == 3 and all(0 <= v < 101 for v in y)


def test_keygen_needs_matrix(tmp_path):
    assert run("setup", "--group", "toy", "--d", 2, "--out", tmp_path / "pk") == 0
    assert run("keygen", "--pk", tmp_path / "pk", "--out", tmp_path / "ek", "--vk", tmp_path / "vk") == 2


def test_dimension_mismatch_exit_2(tmp_path):
    (tmp_path / "x.json").write_text("[1, 2]")
    assert run("setup", "--group", "toy", "--d", 3, "--out", tmp_path / "pk") == 0
    assert run("probgen", "--pk", tmp_path / "pk", "--in", tmp_path / "x.json",
               "--out", tmp_path / "e", "--vk", tmp_path / "v") == 2


def test_unknown_flag_exit_2():
    proc = subprocess.run([sys.executable, "-m", "mmvc", "verify", "--bogus"], capture_output=True)
    assert proc.returncode == 2
    with pytest.raises(SystemExit) as exc:
        main(["setup", "--nope"])
    assert exc.value.code == 2


def test_securitytest_csv(tmp_path, capsys):
    out = tmp_path / "sec.csv"
    code = run("securitytest", "--trials", 500, "--q", 2, "--seed", 3, "--csv", out)
    assert code == 0
    text = capsys.readouterr().out
    assert "seed=3" in text and "random_offset" in text
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert {r["strategy"] for r in rows} >= {"honest", "random_offset", "adaptive_offset"}
    assert all(r["verdict"] == "PASS" for r in rows)


def test_bench_csv(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    assert run("bench", "--group", "toy", "--a", 1, "--b", 2, "--m", 2, "--d", 3,
               "--sweep", "d=2,3", "--csv", out) == 0
    assert "counters match" in capsys.readouterr().out
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert [r["d"] for r in rows] == ["2", "3"]


def test_bench_figures(tmp_path):
    assert run("bench", "--group", "toy", "--sweep", "m=1,2", "--figures", tmp_path / "figs") == 0
    assert len(list((tmp_path / "figs").iterdir())) == 4


def test_bench_bad_sweep():
    assert run("bench", "--group", "toy", "--sweep", "q=1") == 2

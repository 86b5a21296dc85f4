"""Smoke tests for the python bindings."""

import os
import struct

import pytest

import sigfuzz

BENCH = os.environ.get("SIGFUZZ_BENCH_DIR")


def bench(name):
    assert BENCH, "SIGFUZZ_BENCH_DIR must point at the bundled models"
    with open(os.path.join(BENCH, name)) as f:
        return f.read()


def test_parse_and_layout():
    m = sigfuzz.Model(bench("ondlc.ir"))
    assert m.name == "ondlc"
    assert m.sample_count == 20
    assert m.buffer_size == 84
    layout = m.layout()
    assert layout[0]["port"] == "u"
    assert layout[0]["elem_count"] == 20
    assert layout[1]["port"] == "tset"
    assert layout[1]["offset"] == 80


def test_parse_error_raises():
    with pytest.raises(ValueError):
        sigfuzz.Model("model broken samples=0\n")


def test_execute_known_trace():
    m = sigfuzz.Model(bench("ondlc.ir"))
    buf = struct.pack("<20i", *([10] * 5 + [0] * 15)) + struct.pack("<i", 5)
    r = m.execute(buf)
    assert r["fault"] is None
    assert r["outputs"]["y"] == [False] * 4 + [True] * 16
    # both decisions saw the outcomes this input drives
    assert (1, 0, True) in r["coverage"]


def test_execute_rejects_wrong_length():
    m = sigfuzz.Model(bench("ondlc.ir"))
    with pytest.raises(ValueError):
        m.execute(b"\x00" * 10)


def test_signatures_value_independent():
    m = sigfuzz.Model(bench("ondlc.ir"))
    a = struct.pack("<20i", *([3] * 20)) + struct.pack("<i", 5)
    b = struct.pack("<20i", *([4] * 20)) + struct.pack("<i", 5)
    assert m.execute(a)["signature"] == m.execute(b)["signature"]


def test_mined_constants():
    m = sigfuzz.Model(bench("ondlc.ir"))
    ints = m.mine_constants()["int32"]
    for v in (0, 1, 10, 9, 11):
        assert v in ints


def test_nwise_full_product():
    cases = sigfuzz.fast_nwise(2, [[0, 1], [5, 10]])
    assert sorted(cases) == [[0, 5], [0, 10], [1, 5], [1, 10]]


def test_coverage_word_primitives():
    res, word = sigfuzz.record(True, 3)
    assert res and word == 0b1000
    assert sigfuzz.dec_flipped(0b011, 0b110)
    assert sigfuzz.cond_flipped(0b011, 0b110, 2)
    assert not sigfuzz.cond_flipped(0b011, 0b101, 1)


def test_campaign_deterministic():
    kwargs = dict(exec_budget=5000, seed=11, workers=1)
    a = sigfuzz.run_campaign(bench("ondlc.ir"), **kwargs)
    b = sigfuzz.run_campaign(bench("ondlc.ir"), **kwargs)
    assert a == b
    assert a["executions"] == 5000
    assert a["final_metrics"]["cond_dec_pct"] >= a["seed_metrics"]["cond_dec_pct"]


def test_campaign_signal_ablation():
    full = sigfuzz.run_campaign(bench("ondlc.ir"), exec_budget=100000, seed=5)
    raw = sigfuzz.run_campaign(
        bench("ondlc.ir"), exec_budget=100000, seed=5, signal_mutations=False
    )
    assert full["final_metrics"]["cond_dec_pct"] == 100.0
    assert raw["final_metrics"]["cond_dec_pct"] < 100.0

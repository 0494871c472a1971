import math

import pytest
from hypothesis import given, strategies as st

from carmichael import fixtures
from carmichael.arith import is_prime
from carmichael.store import RunRecord, append_run, default_runs_path, read_runs


@pytest.mark.parametrize("fx", fixtures.ALL, ids=lambda f: f.name)
def test_fixture_decimal_matches_factors(fx):
    f = fx.factored
    assert math.prod(p**e for p, e in f.factors) == fx.value == f.value
    assert all(is_prime(p) for p in f.primes)


def test_fixture_shapes():
    assert [len(f.factored.primes) for f in fixtures.C2_L1_MINIMAL] == [15, 15]
    assert [f.factored.primes[-1] for f in fixtures.C2_L2_FOUR] == [2551, 4523, 5279, 15313]
    assert len(fixtures.NONRIGID_SMALLEST.factored.primes) == 23
    assert len(fixtures.NONRIGID_LARGEST.factored.primes) == 42
    assert fixtures.by_name("pinch") is fixtures.PINCH
    with pytest.raises(KeyError):
        fixtures.by_name("nope")


def test_c2_fixtures_are_one_mod_l():
    for fx in fixtures.C2_L1_MINIMAL:
        assert fx.value % fixtures.L1.value == 1
    for fx in fixtures.C2_L2_FOUR:
        assert fx.value % fixtures.L2.value == 1


def test_default_runs_path(monkeypatch, tmp_path):
    monkeypatch.delenv("CARMICHAEL_RUNS_FILE")
    monkeypatch.setenv("XDG_DATA_HOME", str(tmp_path))
    assert default_runs_path() == tmp_path / "carmichael" / "runs.jsonl"


text = st.text(st.characters(blacklist_categories=("Cs",)), max_size=10)
jsonish = st.recursive(st.none() | st.booleans() | st.integers() | text, lambda c: st.lists(c, max_size=3) | st.dictionaries(text, c, max_size=3), max_leaves=8)


@given(text, st.dictionaries(text, jsonish, max_size=4), st.dictionaries(text, jsonish, max_size=4))
def test_run_record_round_trip(cmd, params, summary):
    rec = RunRecord(cmd, params, "2026-01-01T00:00:00+00:00", "2026-01-01T00:00:01+00:00", summary)
    assert RunRecord.from_json(rec.to_json()) == rec


def test_append_only(tmp_path):
    path = tmp_path / "sub" / "runs.jsonl"
    assert read_runs(path) == []
    for i in range(3):
        append_run(RunRecord("search", {"i": i}, "t0"), path)
    assert [r.parameters["i"] for r in read_runs(path)] == [0, 1, 2]

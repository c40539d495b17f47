import json
import math

import numpy as np
import pytest

from martharm.harness.corpus import (
    generate_bmo,
    random_jumps,
    random_martingale,
    random_terminal_batch,
    standard_tree,
)
from martharm.harness.records import CorpusConfig, VerificationRecord, sort_records
from martharm.harness.reporting import CSV_COLUMNS, emit_csv, emit_markdown, emit_report, parse_json
from martharm.harness.suites import run_suite, run_suites, suite_names
from martharm.martingale import as_martingale, bmo_norm, lp_norm

TREE = standard_tree("dyadic", 6)


def test_generate_bmo_profiles():
    raw = generate_bmo(TREE, "bounded-random", 3, rescale=False)
    assert bmo_norm(as_martingale(raw)) <= 2.0 + 1e-12  # sup bound dominates
    for profile in ("haar-mix", "log-spike", "bounded-random"):
        b = generate_bmo(TREE, profile, 5)
        assert bmo_norm(as_martingale(b)) == pytest.approx(1.0, rel=1e-9)
    with pytest.raises(ValueError):
        generate_bmo(TREE, "nope", 0)


def test_generate_bmo_reproducible():
    a = generate_bmo(TREE, "haar-mix", 42)
    b = generate_bmo(TREE, "haar-mix", 42)
    assert np.array_equal(a.values, b.values)


def test_log_spike_grows_with_depth():
    deep = standard_tree("dyadic", 12)
    b = generate_bmo(deep, "log-spike", 1, rescale=False)
    assert lp_norm(b, math.inf) >= deep.depth
    assert bmo_norm(as_martingale(b)) <= 4.0  # stays O(1) while the sup grows


def test_random_martingale_valid():
    m = random_martingale(TREE, np.random.default_rng(0), heavy=True)
    m.validate()
    batch = random_terminal_batch(TREE, np.random.default_rng(0), 4)
    assert batch.shape == (4, TREE.n_leaves)


def test_random_jumps_levels():
    jumps = random_jumps(TREE, np.random.default_rng(1), 20)
    for j in jumps:
        assert j.kind == "jump"
        if j.level >= 1:
            assert np.abs(TREE.cond_exp(j.values, j.level - 1)).max() <= 1e-12


def test_record_pass_semantics():
    r = VerificationRecord.check("s", "a", 1.5, 1.0, claimed=2.0)
    assert r.passed and r.ratio == 1.5
    r = VerificationRecord.check("s", "a", 2.5, 1.0, claimed=2.0)
    assert not r.passed
    r = VerificationRecord.check("s", "a", 123.0, 1.0)
    assert r.passed  # no claim: finiteness is enough
    r = VerificationRecord.check("s", "a", 1.0, 0.0)
    assert not r.passed  # infinite ratio
    r = VerificationRecord.check("s", "a", 0.0, 0.0)
    assert r.passed and r.ratio == 0.0


def test_report_roundtrip_and_formats(tmp_path):
    records = [
        VerificationRecord.check("b-suite", "anchor two", 1.0, 2.0, claimed=1.0, seed=7),
        VerificationRecord.check("a-suite", "anchor one", 3.0, 1.0, seed=3),
    ]
    text = emit_report(records, "json")
    back = parse_json(text)
    assert back == sort_records(records)
    csv_text = emit_csv(records)
    header = csv_text.splitlines()[0].split(",")
    assert tuple(header) == CSV_COLUMNS
    md = emit_markdown(records)
    assert "anchor one" in md and "| anchor two |" in md
    out = tmp_path / "report.csv"
    emit_report(records, "csv", out)
    assert out.read_text() == csv_text
    with pytest.raises(ValueError):
        emit_report(records, "xml")


def test_json_report_deterministic():
    cfg = CorpusConfig(depths=(4,), samples=10, op_samples=8, seed=99)
    a = emit_report(run_suite("lemma-3.5-scalar", cfg), "json")
    b = emit_report(run_suite("lemma-3.5-scalar", cfg), "json")
    assert a == b
    a = emit_report(run_suite("prop-3.1-const", cfg), "json")
    b = emit_report(run_suite("prop-3.1-const", cfg), "json")
    assert a == b


def test_failing_record_does_not_abort_suite():
    # claimed constants make failures representable, not raisable
    bad = VerificationRecord.check("s", "a", 10.0, 1.0, claimed=1.0)
    records = [bad, VerificationRecord.check("s", "b", 0.5, 1.0, claimed=1.0)]
    text = emit_report(records, "json")
    parsed = parse_json(text)
    assert sum(not r.passed for r in parsed) == 1


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("no-such-suite", CorpusConfig())


def test_suite_names_registered():
    names = suite_names()
    for expect in ("identity-3.1", "lemma-2.6-atoms", "hilbert-L2-norm", "walsh-suite"):
        assert expect in names


def test_run_suites_parallel_matches_serial():
    cfg = CorpusConfig(depths=(4,), samples=10, op_samples=8, seed=5)
    names = ["lemma-3.5-scalar", "prop-3.1-const"]
    serial = run_suites(names, cfg, jobs=1)
    parallel = run_suites(names, cfg, jobs=2)
    assert emit_report(serial, "json") == emit_report(parallel, "json")


def test_config_roundtrip(tmp_path):
    cfg = CorpusConfig(depths=(4, 5), samples=12, seed=77, tolerances={"x": 1e-6})
    path = tmp_path / "cfg.json"
    cfg.save(path)
    back = CorpusConfig.load(path)
    assert back == cfg
    assert back.tol("x") == 1e-6
    assert back.tol("missing") == back.tolerance


def test_empty_report_valid():
    for fmt in ("json", "csv", "md"):
        text = emit_report([], fmt)
        assert isinstance(text, str) and text
    assert parse_json(emit_report([], "json")) == []


def test_config_validation():
    with pytest.raises(ValueError):
        CorpusConfig(samples=0)
    with pytest.raises(ValueError):
        CorpusConfig(depths=())
    with pytest.raises(ValueError):
        CorpusConfig(tolerance=1e-14)

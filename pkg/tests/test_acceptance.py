"""Acceptance criteria, one test per criterion.

Every criterion runs its registered verification suite at the default corpus
(depths 6-12, seeded) and asserts the claimed constants at their stated
tolerances.  A PASS/FAIL line per criterion is printed so `pytest -s
tests/test_acceptance.py` doubles as the acceptance report.
"""

import math
import time

from martharm.harness.records import CorpusConfig
from martharm.harness.suites import run_suite

CONFIG = CorpusConfig()  # depths (6, 8, 10, 12), 1000/200 samples, fixed seed

_RESULTS: dict[str, tuple[list, float]] = {}


def suite_records(name: str):
    if name not in _RESULTS:
        t0 = time.time()
        records = run_suite(name, CONFIG)
        _RESULTS[name] = (records, time.time() - t0)
    return _RESULTS[name]


def report(criterion: str, records, note: str = "") -> None:
    ok = all(r.passed for r in records)
    worst = max((r.ratio for r in records), default=0.0)
    line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {len(records)} records, worst ratio {worst:.6g}"
    if note:
        line += f" ({note})"
    print(line)
    failing = [r for r in records if not r.passed]
    assert not failing, failing


def test_criterion_01_product_identity():
    records, seconds = suite_records("identity-3.1")
    assert len(records) == len(CONFIG.depths)
    assert seconds < 30.0
    report("criterion-01 product identity at 1e-10", records, f"{seconds:.1f}s")


def test_criterion_02_diagonal_constant():
    records, _ = suite_records("prop-3.1-const")
    for r in records:
        assert r.claimed == 1.0
    report("criterion-02 diagonal bound sqrt(2)", records)


def test_criterion_03_atom_bounds():
    records, _ = suite_records("lemma-2.6-atoms")
    report("criterion-03 atom maximal/square bounds", records)


def test_criterion_04_paraproduct_atom_bounds():
    records_a, _ = suite_records("lemma-3.3-pi1-atoms")
    records_b, _ = suite_records("lemma-4.5-pi2-atoms")
    report("criterion-04 paraproduct atom constants 2", records_a + records_b)


def test_criterion_05_pi1_jump_bound():
    records, _ = suite_records("lemma-3.2-pi1-jumps")
    report("criterion-05 single-jump paraproduct bound", records)


def test_criterion_06_pointwise_paraproduct():
    records, _ = suite_records("eq-3.2-pointwise")
    report("criterion-06 pointwise S(Pi2) <= M S", records)


def test_criterion_07_scalar_inequality():
    records, _ = suite_records("lemma-3.5-scalar")
    report("criterion-07 scalar Orlicz inequality", records)


def test_criterion_08_davis_atomic():
    records, _ = suite_records("davis-atomic")
    recon = [r for r in records if "reconstruction" in r.anchor]
    stability = [r for r in records if "stability" in r.anchor]
    assert recon and stability
    report("criterion-08 Davis/atomic reconstruction + stability", records)


def test_criterion_09_hilbert():
    records = []
    for name in ("hilbert-L2-norm", "hilbert-haar", "hilbert-jump-formula"):
        records += suite_records(name)[0]
    l2 = [r for r in records if "Lemma 5.3" in r.anchor]
    assert l2 and all(r.claimed == 2.0 for r in l2)
    report("criterion-09 dyadic Hilbert transform", records)


def test_criterion_10_walsh():
    records, seconds = suite_records("walsh-suite")
    assert seconds < 60.0
    report("criterion-10 Walsh suite", records, f"{seconds:.1f}s")


def test_criterion_11_sandwich():
    records, _ = suite_records("thm-1.3-sandwich")
    named = {r.anchor.split("(")[1].split(",")[0] for r in records if "(" in r.anchor}
    for op in ("M", "S", "Teps", "MTeps", "HD", "sigma", "Ialpha"):
        assert any(op in n for n in named), f"operator {op} missing from the sandwich sweep"
    report("criterion-11 commutator sandwich", records)


def test_criterion_12_kq_certification():
    records, _ = suite_records("kq-certify")
    atom_claim = [r for r in records if "Eq. (4.1)" in r.anchor]
    jump_claim = [r for r in records if "Eq. (4.3)" in r.anchor]
    assert atom_claim and all(r.claimed == 2.0 for r in atom_claim)
    assert jump_claim and all(r.claimed == 1.0 for r in jump_claim)
    assert any("commuting shortcut" in r.anchor for r in records)
    report("criterion-12 operator-class certification", records)


def test_criterion_13_endpoints():
    records, _ = suite_records("endpoint")
    assert any("Proposition 4.14" in r.anchor for r in records)
    for r in records:
        assert math.isfinite(r.ratio)
    report("criterion-13 endpoint estimates", records)


def test_criterion_14_cesaro_bmo():
    records, _ = suite_records("lemma-5.10-cesaro-bmo")
    overall = [r for r in records if "overall" in r.anchor]
    assert overall and math.isfinite(overall[0].ratio)
    report("criterion-14 Cesaro-BMO atom bound", records)

"""Top-level acceptance battery: the nine lemma suites at full scale.

Each test prints one PASS/FAIL line for its criterion and asserts the
recorded outcome, so `pytest -v tests/test_acceptance.py` doubles as a
readable scoreboard.  The suites themselves live in ncplift.selftest
and are shared with the `ncplift selftest` subcommand.
"""

import pytest

from ncplift.selftest import CRITERIA, run_all


@pytest.fixture(scope="session")
def full_results():
    results = run_all(level="full")
    return {r.name: r for r in results}


def _report(full_results, name):
    r = full_results[name]
    status = "PASS" if r.passed else "FAIL"
    print(f"{name}: {status} ({r.seconds:.2f}s) {r.detail}")
    assert r.passed, f"{name}: {r.detail}"


def test_criteria_roster(full_results):
    assert [name for name, _ in CRITERIA] == list(full_results)
    assert len(full_results) == 9


def test_01_span_dichotomy(full_results):
    _report(full_results, "span-dichotomy")


def test_02_restriction_probability_bound(full_results):
    _report(full_results, "restriction-probability-bound")


def test_03_block_correlation_dichotomy(full_results):
    _report(full_results, "block-correlation-dichotomy")


def test_04_tree_fourier_support(full_results):
    _report(full_results, "tree-fourier-support")


def test_05_prune_error_bound(full_results):
    _report(full_results, "prune-error-bound")


def test_06_parity_extraction_advantage(full_results):
    _report(full_results, "parity-extraction-advantage")


def test_07_search_end_to_end(full_results):
    _report(full_results, "search-end-to-end")


def test_08_decide_end_to_end(full_results):
    _report(full_results, "decide-end-to-end")


def test_09_certificate_soundness(full_results):
    _report(full_results, "certificate-soundness")

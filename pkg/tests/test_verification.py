"""Self-verification registry: every check green, full operation coverage."""

from __future__ import annotations

import pytest

from liepoisson import verification as vf


def test_default_registry_is_all_green():
    results = vf.run_all(seed=2024, dim=4)
    failing = [r.name for r in results if not r.passed]
    assert failing == []


def test_registry_is_green_on_other_seeds_and_dims():
    for seed, dim in ((7, 6), (123, 8)):
        results = vf.run_all(seed=seed, dim=dim)
        assert all(r.passed for r in results), [
            r.name for r in results if not r.passed]


def test_every_required_operation_is_exercised():
    results = vf.run_all(seed=2024, dim=4)
    covered = set()
    for r in results:
        covered.update(r.ops)
    assert vf.REQUIRED_OPS <= covered
    names = [r.name for r in results]
    assert "coverage_all_operations" in names


def test_negative_controls_record_large_defects():
    results = {r.name: r for r in vf.run_all(seed=2024, dim=4)}
    inclusion = results["lower_inclusion_not_poisson"]
    assert inclusion.passed and inclusion.defect > 1e-3
    contraction = results["lower_contraction_not_universal"]
    assert contraction.passed and contraction.defect > 1e-6


def test_report_payload_schema():
    results = vf.run_all(seed=2024, dim=4)
    payload = vf.report_payload(results)
    assert set(payload) == {"checks", "pass"}
    assert payload["pass"] is True
    assert len(payload["checks"]) == len(results)
    for row in payload["checks"]:
        assert set(row) == {"name", "defect", "tol", "pass"}
        assert isinstance(row["defect"], float)
        assert isinstance(row["pass"], bool)


def test_run_all_rejects_bad_dimensions():
    with pytest.raises(ValueError):
        vf.run_all(seed=1, dim=3)  # group construction needs an even dim
    with pytest.raises(ValueError):
        vf.run_all(seed=1, dim=2)

import json
import math

import numpy as np
import pytest

from nashforge.core.analysis import analyze
from nashforge.core.kkt import enumerate_kkt, sort_points
from nashforge.core.models import CheckResult, Perturbation
from nashforge.core.perturb import detect_branches, estimate_calmness_constant, parse_t_grid, sweep
from nashforge.data.loader import load_fixture_direction
from nashforge.data.serialization import (
    check_from_dict,
    check_to_dict,
    dumps,
    report_from_dict,
    report_to_dict,
    sweep_from_dict,
    sweep_to_dict,
    to_jsonable,
)
from nashforge.numerics.results import Verdict


@pytest.fixture
def ex61_report(ex61):
    p = Perturbation.zero(ex61)
    return analyze(ex61, p, sort_points(enumerate_kkt(ex61, p))[1])


def test_to_jsonable():
    doc = to_jsonable({"a": np.array([1.0, 2.0]), "b": (np.int64(3), np.bool_(True)),
                       "c": Verdict.HOLDS, 4: np.float32(0.5)})
    assert doc == {"a": [1.0, 2.0], "b": [3, True], "c": "HOLDS", "4": 0.5}
    json.dumps(doc)


def test_report_document(ex61_report):
    doc = report_to_dict(ex61_report)
    assert [c["check_name"] for c in doc["checks"]] == list(ex61_report.checks)
    c1 = next(c for c in doc["checks"] if c["check_name"] == "c1_localization")
    assert c1["verdict"] == "FAILS"
    assert c1["clause"] == "SCSC"
    assert set(c1) == {"check_name", "verdict", "witness", "margin", "certificate_method",
                       "clause", "details"}
    assert doc["index_sets"]["I2"] == [[0], []]
    assert doc["point"]["x"] == pytest.approx([0.0, 0.0, -1.0])


def test_report_round_trip(ex61_report):
    again = report_from_dict(json.loads(dumps(report_to_dict(ex61_report))))
    assert again.verdicts() == ex61_report.verdicts()
    assert again.index_sets.I1 == ex61_report.index_sets.I1
    assert again.cq.licq == ex61_report.cq.licq
    assert [s.verdict for s in again.cq.ssosc] == [s.verdict for s in ex61_report.cq.ssosc]
    np.testing.assert_array_equal(again.point.z, ex61_report.point.z)
    assert again["strong_regularity_sufficient"].margin == pytest.approx(0.75)


def _reject_constant(name):
    raise ValueError(f"non-standard JSON constant {name}")


def test_non_finite_floats_are_tagged():
    doc = to_jsonable({"up": float("inf"), "down": -np.inf, "nan": float("nan"), "one": 1.0})
    assert doc == {"up": "inf", "down": "-inf", "nan": None, "one": 1.0}
    json.loads(dumps(doc), parse_constant=_reject_constant)


def test_infinite_check_margin_round_trip():
    check = CheckResult("ssosc", Verdict.HOLDS, margin=float("inf"), method="vacuous")
    doc = json.loads(dumps(check_to_dict(check)), parse_constant=_reject_constant)
    assert doc["margin"] == "inf"
    assert check_from_dict(doc).margin == math.inf


def test_infinite_margins_survive(ex32):
    p = Perturbation.zero(ex32)
    report = analyze(ex32, p, enumerate_kkt(ex32, p)[0])
    text = dumps(report_to_dict(report))
    assert text == dumps(report_to_dict(report))
    assert "Infinity" not in text and "NaN" not in text
    again = report_from_dict(json.loads(text, parse_constant=_reject_constant))
    assert again.verdicts() == report.verdicts()
    for name, check in report.checks.items():
        if check.margin is not None and math.isinf(check.margin):
            assert again[name].margin == check.margin


def test_sweep_round_trip(ex62, ex62_direction):
    p = Perturbation.zero(ex62)
    result = sweep(ex62, ex62_direction, enumerate_kkt(ex62, p)[0], parse_t_grid("-0.02:0.02:5"))
    estimate = estimate_calmness_constant(result)
    summary = detect_branches(result)
    doc = json.loads(dumps(sweep_to_dict(result, estimate, summary)))
    assert doc["existence_profile"] == [True] * 5
    assert doc["robustness_violated"] is False
    assert doc["t_grid"][2] == 0.0

    again, est, summ = sweep_from_dict(doc)
    assert again.labels == result.labels
    assert [len(pts) for pts in again.points] == [len(pts) for pts in result.points]
    assert est.kappa_hat == pytest.approx(estimate.kappa_hat)
    assert summ.count_positive == summary.count_positive == 3
    assert summ.kink == summary.kink


def test_sweep_without_extras(ex31):
    p = Perturbation.zero(ex31)
    result = sweep(ex31, load_fixture_direction("EX31"), enumerate_kkt(ex31, p)[0], [0.05, 0.1])
    doc = sweep_to_dict(result)
    assert "calmness" not in doc and "branches" not in doc
    again, est, summ = sweep_from_dict(doc)
    assert est is None and summ is None
    assert again.robustness_violated
    assert math.isclose(again.window, result.window)

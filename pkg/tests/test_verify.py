from __future__ import annotations

import json
import random

import pytest

from quadricops.exactalg import Signature
from quadricops.opfactory import build_operator_set
from quadricops.verify import (
    STATUSES,
    CheckReport,
    TestConfig,
    build_report,
    check_rng,
    random_bihomogeneous,
    run_covariance_suite,
    run_equivalence_suite,
    run_identity_suite,
    run_suites,
    run_tangentiality_suite,
)

SIG = Signature(2, 1)


def small_config(**kw) -> TestConfig:
    base = dict(
        signatures=[SIG], trials=4, oracle_trials=2, group_elements=2, polys_per_element=2, box_elements=2
    )
    base.update(kw)
    return TestConfig(**base)


@pytest.fixture(scope="module")
def small_reports():
    return run_suites(small_config())


def test_report_type_invariants():
    with pytest.raises(ValueError):
        CheckReport("x", "anchor", "2,1", 1, "fail")
    with pytest.raises(ValueError):
        CheckReport("x", "anchor", "2,1", 1, "maybe")
    r = CheckReport("x", "anchor", "2,1", 1, "pass", wall_time=0.5)
    assert "wall_time" not in r.to_json(timing=False)


def test_config_validation_and_parity():
    with pytest.raises(ValueError):
        TestConfig(param_range=(0, 3))
    assert TestConfig.parity(1) == -1 and TestConfig.parity(2) == 1


def test_check_streams_are_stable():
    cfg = small_config(seed=9)
    a = check_rng(cfg, SIG, "tangential.b").random()
    b = check_rng(cfg, SIG, "tangential.b").random()
    c = check_rng(cfg, SIG, "tangential.c").random()
    assert a == b != c


def test_random_bihomogeneous_has_requested_degree():
    rng = random.Random(0)
    for a, b in [(0, 1), (2, 3), (4, 0)]:
        p = random_bihomogeneous(rng, 3, a, b)
        assert not p.is_zero() and p.bidegree() == (a, b)


def test_every_check_has_anchor_and_status(small_reports):
    ids = [r.check_id for r in small_reports]
    assert len(ids) == len(set(ids))
    for r in small_reports:
        assert r.anchor and r.status in STATUSES
        if r.status == "fail":
            assert r.witness is not None


def test_expected_statuses(small_reports):
    status = {r.check_id: r.status for r in small_reports}
    assert status["identity.f"] == "pass-with-errata"
    # the printed closed form is not tangential and differs from the regular part
    assert status["tangential.c"] == "fail"
    assert status["equivalence.a"] == "fail"
    for cid in ("tangential.c-corrected", "equivalence.a-corrected", "equivalence.d-value", "covariance.b"):
        assert status[cid] == "pass"
    others = {k: v for k, v in status.items() if k not in ("identity.f", "tangential.c", "equivalence.a")}
    assert set(others.values()) == {"pass"}


def test_errata_witness_lists_rows(small_reports):
    r = next(r for r in small_reports if r.check_id == "identity.f")
    text = json.dumps(r.witness)
    for comp in ("II", "III", "VII", "VIII", "IX.contraction"):
        assert f'"{comp}"' in text


def test_fail_witness_is_reproducible(small_reports):
    r = next(r for r in small_reports if r.check_id == "tangential.c")
    again = next(x for x in run_tangentiality_suite(small_config(), SIG) if x.check_id == "tangential.c")
    assert json.dumps(r.witness, sort_keys=True) == json.dumps(again.witness, sort_keys=True)


def test_reports_are_deterministic():
    cfg = small_config(seed=3)
    opset = build_operator_set(SIG)
    runs = []
    for _ in range(2):
        reps = run_identity_suite(cfg, SIG, opset) + run_equivalence_suite(cfg, SIG, opset) + run_covariance_suite(cfg, SIG, opset)
        runs.append(json.dumps(build_report(cfg, reps, timing=False), sort_keys=True))
    assert runs[0] == runs[1]


def test_report_schema(small_reports):
    rep = build_report(small_config(), small_reports)
    assert set(rep) == {"version", "signature", "seed", "config", "checks"}
    assert rep["signature"] == ["2,1"]
    assert all("wall_time" in c for c in rep["checks"])
    json.dumps(rep)

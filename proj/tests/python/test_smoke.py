import numpy as np
import pytest

import sdmm


def test_schemes_listed():
    assert sdmm.schemes() == ["cmatdot", "cdft", "cgasp", "ca3s", "rmatdot", "rdft", "rgasp", "ra3s"]


@pytest.mark.parametrize("scheme", ["cmatdot", "cdft", "cgasp", "ca3s", "rmatdot", "rdft", "rgasp", "ra3s"])
def test_noiseless_multiply(scheme):
    rng = np.random.default_rng(3)
    p = sdmm.SchemeParams(scheme, m=2, k=2, l=2, x=1, sigma2=0.0, seed=1)
    a = rng.uniform(-1, 1, (8, 8))
    b = rng.uniform(-1, 1, (8, 8))
    got = sdmm.multiply(p, a, b)
    assert np.linalg.norm(got - a @ b) / np.linalg.norm(a @ b) < 1e-10


def test_manual_pipeline_and_threshold():
    rng = np.random.default_rng(4)
    p = sdmm.SchemeParams("cmatdot", m=2, x=1, s=1, delta=1.0)
    assert (p.r, p.n) == (5, 6)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    b = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    shares = sdmm.encode(p, a, b)
    assert [w for w, _, _ in shares] == list(range(1, 7))
    responses = [sdmm.worker_compute("cmatdot", w, sa, sb) for w, sa, sb in shares]
    got = sdmm.decode(p, responses[1:])
    assert np.linalg.norm(got - a @ b) / np.linalg.norm(a @ b) < 1e-6
    with pytest.raises(sdmm.InsufficientResponses):
        sdmm.decode(p, responses[:4])


def test_validation_errors():
    with pytest.raises(sdmm.Error, match="stragglers"):
        sdmm.SchemeParams("cdft", m=4, x=1, s=1)
    with pytest.raises(sdmm.Error):
        sdmm.SchemeParams("bogus")


def test_run_and_sweep():
    p = sdmm.SchemeParams("cgasp", k=2, l=2, x=1, s=1, seed=9)
    r = sdmm.run_local(p, trials=5, size=(8, 8, 8), stragglers=1)
    assert len(r["errors"]) == 5
    assert r["q05"] <= r["median"] <= r["q95"]
    assert all(len(w) == p.r for w in r["responding"])
    s = sdmm.sweep(p, "delta", [0.01, 1.0], trials=5, size=(8, 8, 8))
    assert s["summary_csv"].startswith("sweep_value,median,q05,q95\n")
    assert s["results"][1]["median"] <= s["results"][0]["median"]


def test_audit_and_bounds():
    a = sdmm.audit(sdmm.SchemeParams("rgasp", k=2, l=2, x=2, delta=0.01))
    assert a["passed"]
    assert a["worst_case_nats"] <= 0.01 * (1 + 1e-9)
    checked, violations, csv = sdmm.verify_bounds(6)
    assert violations == 0
    assert csv.count("\n") == checked + 1
    assert sdmm.calibrate_sigma2(1.0, 1, 7, 4) == pytest.approx(7.0)


def test_frames():
    wire = sdmm.encode_frame(4, b"hi")
    assert wire == b"SDMM\x01\x04\x02\x00\x00\x00hi"
    assert sdmm.decode_frame(wire) == (4, b"hi")
    with pytest.raises(sdmm.Error):
        sdmm.decode_frame(wire[:-1])

import json

import numpy as np
import pytest

from cyclesearch.builder import build_cycle_problem, lower_to_conic
from cyclesearch.function_classes import (
    CocoerciveOperator,
    MonotoneOperator,
    SmoothConvex,
    SmoothStronglyConvex,
)
from cyclesearch.methods import (
    check_cycle_prefix,
    heavy_ball,
    inexact_gradient,
    nesterov,
    simulate,
    three_operator_splitting,
)
from cyclesearch.solver import solve
from cyclesearch.analysis import (
    CYCLE_FOUND,
    INCONCLUSIVE,
    NO_CYCLE,
    DecisionThresholds,
    analytic_oracles,
    certificate_from_dict,
    certificate_to_dict,
    decide,
    interpolation_residuals,
    reconstruct,
    run_cycle_search,
    verify_certificate,
)

TOS_CLASSES = {
    "A": MonotoneOperator(),
    "B": CocoerciveOperator(1.0),
    "f": SmoothConvex(1.0),
}


@pytest.fixture(scope="module")
def hb_cycle_cert():
    return run_cycle_search(heavy_ball(1 / 9, 4 / 9), SmoothStronglyConvex(1, 25), 3)


def test_reconstruct_rank_one():
    """A rank-1 Gram factors into one dimension with matching entries."""
    lowered = lower_to_conic(build_cycle_problem(heavy_ball(1.0, 0.0), SmoothConvex(1.0), 2))
    sol = solve(lowered.program)
    v = np.arange(1.0, lowered.program.psd_dim + 1.0)
    sol.G = np.outer(v, v)
    cert = reconstruct(sol, lowered.index_map, normalize=False)
    assert cert.dimension == 1
    assert cert.gram_fidelity < 1e-12


def test_gram_fidelity_of_solver_output(hb_cycle_cert):
    assert hb_cycle_cert.gram_fidelity < 1e-7


def test_example_cycle_verdict_and_residuals(hb_cycle_cert):
    cert = hb_cycle_cert
    assert cert.verdict == CYCLE_FOUND
    assert cert.score <= 1e-6
    assert cert.normalization >= 1 - 1e-6
    assert cert.max_interpolation_violation <= 1e-5
    assert cert.replay_gap <= 1e-5
    assert cert.dimension <= cert.K
    assert cert.metadata.get("tuning") == "chebyshev-limit accelerated tuning"


def test_replay_revisits_certificate_points(hb_cycle_cert):
    """The reconstructed points replayed through the nearest-record oracle
    trace the cycle (finite-horizon criterion closure)."""
    from cyclesearch.analysis import _METHOD_REGISTRY, _replay_oracle

    cert = hb_cycle_cert
    method = _METHOD_REGISTRY[cert.method_name](cert.method_parameters)
    traj = simulate(method, _replay_oracle(cert), list(cert.points[:2]), cert.K + 2)
    assert check_cycle_prefix(traj, cert.K, 2, 1e-5)
    for t in range(cert.K + 2):
        assert np.allclose(traj.points[t], cert.points[t], atol=1e-4)


def test_no_cycle_for_convergent_gd():
    cert = run_cycle_search(heavy_ball(1.0, 0.0), SmoothConvex(1.0), 2)
    assert cert.verdict == NO_CYCLE
    assert cert.score >= 1e-3


def test_dead_band_is_inconclusive():
    lowered = lower_to_conic(build_cycle_problem(heavy_ball(1.0, 0.0), SmoothConvex(1.0), 2))
    sol = solve(lowered.program)
    cert = decide(sol, lowered, DecisionThresholds(delta_separate=1e6))
    assert cert.verdict == INCONCLUSIVE


def test_failed_solve_is_inconclusive():
    lowered = lower_to_conic(build_cycle_problem(heavy_ball(1.0, 0.0), SmoothConvex(1.0), 2))
    sol = solve(lowered.program)
    sol.status = "IterationLimit"
    cert = decide(sol, lowered)
    assert cert.verdict == INCONCLUSIVE


def test_structural_infeasibility_maps_to_no_cycle():
    cert = run_cycle_search(inexact_gradient(0.0, 0.5), SmoothConvex(1.0), 2)
    assert cert.verdict == NO_CYCLE
    assert cert.score == np.inf
    assert "structural" in cert.metadata


def test_certificates_are_unit_normalized():
    for method, classes in [
        (nesterov(1.5, 0.5), SmoothConvex(1.0)),
        (three_operator_splitting(1.9, 1.9, 1.9), TOS_CLASSES),
    ]:
        cert = run_cycle_search(method, classes, 2)
        assert cert.verdict == CYCLE_FOUND
        assert cert.normalization == pytest.approx(1.0, abs=1e-9)


def test_nag_boundary_certificate_matches_analytic_gram():
    """The K=2 boundary certificate agrees with the one-dimensional
    quadratic cycle up to rotation and translation: compare the Gram of
    translation-invariant quantities at unit separation."""
    L, beta = 1.0, 0.5
    gamma = 2 * (1 + beta) / (L * (1 + 2 * beta))
    cert = run_cycle_search(nesterov(gamma, beta), SmoothConvex(L), 2)
    assert cert.verdict == CYCLE_FOUND
    fam = cert.families["f"]
    e = cert.points[1] - cert.points[0]
    feats = np.vstack([e, fam.vectors])          # y1 - y0 and g(y0..y2)
    gram = feats @ feats.T
    # Analytic cycle y = +-1/2 scaled to |y1 - y0| = 1: gradients L*y.
    v = np.array([1.0, -L / 2, L / 2, -L / 2])
    assert np.allclose(gram, np.outer(v, v), atol=1e-5)


def test_interpolation_residuals_detect_corruption():
    spec = SmoothConvex(1.0)
    pts = np.array([[0.0], [1.0]])
    vecs = pts.copy()
    vals = np.array([0.0, 0.5])
    assert interpolation_residuals(spec, pts, vecs, vals) <= 1e-12
    bad_vals = np.array([0.5, 0.0])  # swapped: violates convexity
    assert interpolation_residuals(spec, pts, vecs, bad_vals) > 0.1


def test_certificate_roundtrip_and_verify(hb_cycle_cert):
    doc = json.loads(json.dumps(certificate_to_dict(hb_cycle_cert)))
    cert = certificate_from_dict(doc)
    report = verify_certificate(cert)
    assert report["consistent"], report["problems"]


def test_verify_catches_tampering(hb_cycle_cert):
    doc = certificate_to_dict(hb_cycle_cert)
    doc = json.loads(json.dumps(doc))
    doc["points"][0][0] += 0.05
    report = verify_certificate(certificate_from_dict(doc))
    assert not report["consistent"]


def test_igd_certificate_roundtrip_replays():
    cert = run_cycle_search(inexact_gradient(1.6, 0.5), SmoothConvex(1.0), 2)
    assert cert.verdict == CYCLE_FOUND
    doc = json.loads(json.dumps(certificate_to_dict(cert)))
    report = verify_certificate(certificate_from_dict(doc))
    assert report["consistent"], report["problems"]


@pytest.mark.parametrize("ac_index", [0, 1, 2])
def test_analytic_oracles_simulate_to_cycles(ac_index):
    ac = analytic_oracles()[ac_index]
    traj = simulate(ac.method, ac.oracle, ac.init, ac.K + ac.method.order + 4)
    assert check_cycle_prefix(traj, ac.K, ac.method.order, 1e-9)
    if ac.expected_points is not None:
        for got, want in zip(traj.points, ac.expected_points):
            assert np.allclose(got, want, atol=1e-9)


@pytest.mark.parametrize("ac_index", [0, 1])
def test_threshold_consistency_analytic_instances(ac_index):
    """Analytic cycle instances pushed through the full SDP pipeline come
    back as verified cycles at their own (parameters, K)."""
    ac = analytic_oracles()[ac_index]
    cert = run_cycle_search(ac.method, ac.classes, ac.K)
    assert cert.verdict == CYCLE_FOUND


def test_rotation_invariant_comparison(hb_cycle_cert):
    """Rotating the certificate's coordinates leaves its Gram data alone:
    comparisons go through Grams, never raw coordinates."""
    cert = hb_cycle_cert
    d = cert.dimension
    rng = np.random.default_rng(1)
    Q = np.linalg.qr(rng.normal(size=(d, d)))[0]
    rotated = cert.points @ Q
    assert np.allclose(rotated @ rotated.T, cert.points @ cert.points.T, atol=1e-10)

import math

import numpy as np
import pytest

import alignment_tax as at


def test_tax_and_frontier():
    caps = at.CapabilitySet([np.array([0.0, 1.0, 0.0])])
    t = at.tax_rate(np.array([0.6, 0.8, 0.0]), caps)
    assert t["joint_tax"] == pytest.approx(0.64)
    assert t["free_safety_fraction"] == pytest.approx(0.6)
    assert at.frontier_safety(math.pi / 3, 1.0, 0.0) == pytest.approx(math.sqrt(3) / 2)
    curve = at.frontier_curve(math.pi / 2, 1.0, 5)
    assert curve.shape == (5, 2)
    assert curve[2, 1] == pytest.approx(1.0)


def test_optimal_delta_realizes_the_frontier():
    v = np.array([1.0, 0.0, 0.0])
    c = np.array([0.5, 0.5, math.sqrt(0.5)])
    delta = at.optimal_delta_single(v, c, 2.0, 0.4)
    alpha = at.principal_angle(v, c)
    assert np.linalg.norm(delta) == pytest.approx(2.0, abs=1e-12)
    assert c @ delta == pytest.approx(0.4, abs=1e-12)
    assert v @ delta == pytest.approx(at.frontier_safety(alpha, 2.0, 0.4), abs=1e-12)
    assert at.oracle_max_safety(v, c, 2.0, 0.4) <= v @ delta + 1e-9


def test_conflict_examples():
    assert at.effective_angle(0.0, 0.5, -0.5)["cos_theta"] == pytest.approx(1 / 3)
    k = at.classify_capability(0.99, 0.1, 0.001)
    assert k["label"] == "AsymmetricSameSign"
    assert k["improves_tradeoff"]
    assert at.equal_improvement(math.pi / 2) == pytest.approx(math.sqrt(0.5))


def test_scaling_examples():
    assert at.welch_bound(16, 8) == pytest.approx(math.sqrt(1 / 15))
    assert at.irreducible_tax([0.3, 0.4]) == pytest.approx(0.25)
    est = at.monte_carlo_tax(100, [], 10, 4000, 3, threads=2)
    assert abs(est["mean"] - 0.1) <= 3 * est["std_error"]
    assert at.expected_random_projection(8, 4096, 1, 0)["analytic"] == 8 / 4096


def test_errors_are_typed():
    with pytest.raises(at.AtaxError, match="ZeroVector"):
        at.principal_angle(np.zeros(2), np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        at.welch_bound(4, 8)


def test_run_matches_between_dict_and_text():
    problem = {"dim": 2, "safety": [1, 0], "capabilities": {"math": [0, 1]}, "budget_radius": 1}
    report, csv = at.run("tax", problem)
    assert report["results"]["safeties"][0]["joint_tax"] == 0.0
    assert csv is None
    report, csv = at.run("frontier", problem, alpha_from="math", samples=5)
    assert csv.splitlines()[0] == "delta_c,delta_s"
    assert len(csv.splitlines()) == 6
    a, _ = at.run("scaling-sim", d=[16, 32, 64], m_prime=3, trials=100, seed=5, threads=1)
    b, _ = at.run("scaling-sim", d=[16, 32, 64], m_prime=3, trials=100, seed=5, threads=4)
    assert a == b

import math

import numpy as np
import pytest

import colsafe


def test_polytope_membership():
    box = colsafe.Polytope.linf_ball(2, 20.0)
    assert np.array([0.0, 0.0]) in box
    assert colsafe.contains(box, np.array([20.0, 20.0]), 0.0)
    assert np.array([21.0, 0.0]) not in box


def test_closest_points_of_boxes():
    a = colsafe.Polytope.box(np.zeros(2), np.ones(2))
    b = colsafe.Polytope.box(np.full(2, 2.0), np.full(2, 3.0))
    z1, z2, d = colsafe.closest_points(a, b)
    assert d == pytest.approx(math.sqrt(2.0))
    np.testing.assert_allclose(z1, [1, 1], atol=1e-6)
    np.testing.assert_allclose(z2, [2, 2], atol=1e-6)


def test_max_min_capability():
    u, gamma = colsafe.max_min_capability(np.eye(2), colsafe.Polytope.linf_ball(2, 20.0))
    assert gamma == pytest.approx(20.0)
    np.testing.assert_allclose(u, [20, 20])


def test_split_and_clearance():
    shares = colsafe.split_deficit(np.array([-6.0]), [1, 2, 3], {3})
    assert shares[1][0] == pytest.approx(-3.0)
    assert shares[3][0] == 0.0
    assert colsafe.clearance(np.array([3.0, 4.0]), np.zeros(2)) == pytest.approx(24.0)


def test_errors_map_to_python():
    with pytest.raises(colsafe.ContractError):
        colsafe.max_min_capability(np.zeros((0, 2)), colsafe.Polytope.linf_ball(2, 1.0))
    with pytest.raises(colsafe.ConfigError):
        colsafe.run("{\"agents\": []")


def test_tree_run(tmp_path):
    assert "tree7" in colsafe.preset_names()
    s = colsafe.run("tree7", str(tmp_path))
    assert s["min_h"] >= 0.0
    assert s["max_tau"] <= 2
    assert s["theorem2_bound"]
    assert (tmp_path / "trajectory.csv").exists()
    assert colsafe.report(str(tmp_path))["steps"] == s["steps"]

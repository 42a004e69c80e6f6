import math

import numpy as np
import pytest

import reachset


def test_version_and_config():
    assert reachset.__version__.count(".") == 2
    cfg = reachset.canonical_config({"mode": "3d-dir", "t_f": 2.0})
    assert cfg["mode"] == "3d-dir"
    assert cfg["t_f"] == 2.0
    assert reachset.config_hash(cfg) == reachset.config_hash({"mode": "3d-dir", "t_f": 2.0})
    assert reachset.config_hash({"seed": 2}) != reachset.config_hash({"seed": 3})


def test_invalid_input_raises():
    with pytest.raises(reachset.InvalidInput):
        reachset.oracle({"t_f": 0.0})
    with pytest.raises(reachset.InvalidInput):
        reachset.canonical_config({"colour": 1})
    with pytest.raises(ValueError):
        reachset.support("5d", [1, 0], 1.0)


def test_oracle_is_reproducible_and_admissible():
    cfg = {"mode": "2d-dir", "t_f": 1.5, "seed": 4, "oracle": {"n_samples": 200}}
    a = reachset.oracle(cfg)
    assert a.shape == (200, 3)
    assert np.array_equal(a, reachset.oracle(cfg))
    assert np.all(np.hypot(a[:, 0], a[:, 1]) <= 1.5 + 1e-12)


def test_planar_boundary():
    b = reachset.boundary({"mode": "2d-nodir", "t_f": 1.0,
                           "boundary": {"validation_samples": 2000, "witness_samples": 5000}})
    e, n = b["endpoints"], b["normals"]
    assert e.shape[1] == 2 and e.shape == n.shape
    assert b["counts"]["points"] == e.shape[0] > 0
    assert np.all(np.linalg.norm(e, axis=1) <= 1.0 + 1e-12)
    assert np.allclose(np.linalg.norm(n, axis=1), 1.0)


def test_support_dominates_oracle():
    pts = reachset.oracle({"mode": "2d-dir", "t_f": 2.0, "seed": 9, "oracle": {"n_samples": 5000}})
    for c in reachset.random_directions(3, 5, 3):
        r = reachset.support("2d-dir", c, 2.0)
        assert r["pass"]
        assert r["value"] >= float(np.max(pts @ c)) - 1e-3


def test_pmp_check_on_straight_path():
    path = {"start": {"x": 0, "y": 0, "theta": 0}, "kappa_max": 1,
            "segments": [{"kind": "S", "length": 1.0}], "costate": [1, 0, 0]}
    assert reachset.pmp_check(path)["pass"]
    path["costate"] = [0, 1, 0]
    assert not reachset.pmp_check(path)["pass"]


def test_torsion_rhs_equilibrium():
    # tau = 1 is an equilibrium when zeta = 0.
    assert abs(reachset.torsion_rhs(1.0, 0.0, 0.0)) <= 1e-14
    assert math.isfinite(reachset.torsion_rhs(0.5, 0.1, 2.0))

import math

import numpy as np
import pytest

import heatshape as hs


def test_mesh_basics():
    mesh = hs.generate_mesh((0.5, 0.5), radius=0.2, h=0.05, interface_segments=32, margin=0.05)
    mesh.check()
    assert mesh.vertices.shape[1] == 2
    assert mesh.triangles.shape[1] == 3
    assert mesh.regions.shape[0] == mesh.triangles.shape[0]
    assert set(np.unique(mesh.regions)) == {0, 1}
    n = 32
    assert mesh.perimeter == pytest.approx(2 * n * 0.2 * math.sin(math.pi / n), rel=1e-12)
    assert mesh.matrix_area + mesh.inclusion_area == pytest.approx(1.0, abs=1e-12)


def test_infeasible_disc_raises():
    with pytest.raises(hs.GeometryError):
        hs.generate_mesh((0.5, 0.5), radius=0.6)
    with pytest.raises(ValueError):
        hs.Problem(target="nonsense")


def test_solve_and_zero_boundary():
    p = hs.Problem(h=0.05, interface_segments=32, time_steps=10, margin=0.05)
    out = p.solve((0.5, 0.5))
    assert out["J"] > 0
    assert np.all(np.diff(out["energy"]) <= 1e-9 * out["energy"][0])

    cold = hs.Problem(h=0.05, interface_segments=32, time_steps=10, margin=0.05, boundary_temperature=0.0)
    assert cold.solve((0.5, 0.5))["J"] == 0.0


def test_gradient_matches_fd():
    p = hs.Problem(h=0.02, interface_segments=64, time_steps=50)
    g = p.gradient((0.5, 0.5))
    fd = p.fd_gradient((0.5, 0.5))
    assert g["density"].shape == (64,)
    assert g["terms"].shape == (64, 6)
    assert np.allclose(g["term_gradients"].sum(axis=0), g["gradient"], rtol=1e-10, atol=1e-9)
    assert abs(g["gradient"][1] - fd[1]) <= 0.05 * abs(fd[1])


def test_recorded_target_self_replay(tmp_path):
    p = hs.Problem(h=0.05, interface_segments=32, time_steps=10, margin=0.05)
    path = tmp_path / "target.bin"
    p.save_target((0.5, 0.6), path)
    p.load_target(path)
    assert p.target == "recorded"
    assert p.solve((0.5, 0.6))["J"] <= 1e-10


def test_optimize_short_run():
    p = hs.Problem(h=0.05, interface_segments=32, time_steps=10, margin=0.05, target="zero")
    cfg = hs.OptimizerConfig()
    cfg.max_iters = 5
    res = p.optimize((0.5, 0.3), cfg)
    hist = res["history"]
    assert hist.shape[1] == len(res["history_columns"])
    assert res["center"][1] > 0.3
    assert np.all(np.diff(hist[:, 3]) <= 0)

import math

import numpy as np
import pytest

from voxelight.model import AIR, VoxelGrid, make_attributes, material_preset
from voxelight.traversal import Ray, next_interface, ray, traverse


def grid(dims=(8, 8, 8), vs=1.0):
    return VoxelGrid(dims, vs)


def test_ray_requires_unit_direction():
    with pytest.raises(ValueError):
        Ray(np.zeros(3), np.array([1.0, 1.0, 0.0]))
    r = ray((0, 0, 0), (2, 0, 0))
    assert np.allclose(r.dir, [1, 0, 0])
    with pytest.raises(ValueError):
        ray((0, 0, 0), (0, 0, 0))


def test_axis_ray_visits_every_cell_in_order():
    g = grid()
    r = ray((-1.0, 3.5, 4.5), (1, 0, 0))
    evs = traverse(r, g)
    assert [e.cell for e in evs] == [(i, 3, 4) for i in range(8)]
    assert evs[0].entry_face_normal == (-1, 0, 0)
    assert evs[0].t_enter == pytest.approx(1.0)
    assert evs[-1].t_exit == pytest.approx(9.0)


def test_negative_axis_ray():
    g = grid()
    r = ray((8.5, 0.5, 0.5), (-1, 0, 0))
    evs = traverse(r, g)
    assert [e.cell for e in evs] == [(i, 0, 0) for i in range(7, -1, -1)]
    assert evs[0].entry_face_normal == (1, 0, 0)


def test_miss_returns_empty():
    g = grid()
    assert traverse(ray((-1, -1, -1), (0, 0, 1)), g) == []
    assert traverse(ray((20, 4, 4), (1, 0, 0)), g) == []


def test_origin_inside_grid():
    g = grid()
    evs = traverse(ray((3.5, 3.5, 3.5), (0, 1, 0)), g)
    assert [e.cell for e in evs] == [(3, i, 3) for i in range(3, 8)]
    assert evs[0].t_enter == 0.0


def test_exact_diagonal_skips_zero_measure_corner_cells():
    g = grid()
    # exact lattice diagonal: every crossing is a three-way tie; the corner
    # cells have zero-length intervals and must not be reported
    evs = traverse(ray((0.0, 0.0, 0.0), (1, 1, 1)), g)
    assert [e.cell for e in evs] == [(i, i, i) for i in range(8)]
    for a, b in zip(evs, evs[1:]):
        assert b.t_enter == a.t_exit


def test_near_tie_advances_x_first():
    g = grid()
    # x boundary fractionally earlier than y and z: x steps first
    d = np.array([1.0, 1.0 - 1e-9, 1.0 - 2e-9])
    evs = traverse(ray((0.0, 0.0, 0.0), d), g)
    cells = [e.cell for e in evs]
    assert cells[:4] == [(0, 0, 0), (1, 0, 0), (1, 1, 0), (1, 1, 1)]


def test_watertight_interval_tiling():
    g = grid()
    rng = np.random.default_rng(5)
    for _ in range(200):
        o = rng.uniform(-4, 12, size=3)
        d = rng.normal(size=3)
        if np.linalg.norm(d) < 1e-6:
            continue
        evs = traverse(ray(o, d), g)
        for a, b in zip(evs, evs[1:]):
            assert b.t_enter == pytest.approx(a.t_exit, abs=1e-9)
            assert a.t_exit > a.t_enter


def test_cells_match_midpoint_sampling():
    g = grid((8, 8, 8), vs=0.5)
    rng = np.random.default_rng(11)
    for _ in range(300):
        o = rng.uniform(-2, 6, size=3)
        d = rng.normal(size=3)
        if np.linalg.norm(d) < 1e-6:
            continue
        r = ray(o, d)
        for ev in traverse(r, g):
            mid = r.at(0.5 * (ev.t_enter + ev.t_exit))
            assert tuple(np.floor(mid / g.voxel_size).astype(int)) == ev.cell


def test_entry_normals_oppose_ray():
    g = grid()
    rng = np.random.default_rng(3)
    for _ in range(100):
        o = rng.uniform(-4, 12, size=3)
        d = rng.normal(size=3)
        if np.linalg.norm(d) < 1e-6:
            continue
        r = ray(o, d)
        for ev in traverse(r, g):
            n = np.array(ev.entry_face_normal, dtype=float)
            assert float(np.dot(n, r.dir)) <= 0.0


def test_next_interface_into_and_out_of_slab():
    g = grid()
    mat = material_preset("glass")
    for y in range(8):
        for z in range(8):
            g.set((3, y, z), mat)
            g.set((4, y, z), mat)
    r = ray((-1.0, 4.5, 4.5), (1, 0, 0))
    first = next_interface(r, g, 0.0)
    assert first is not None
    assert first.t == pytest.approx(4.0)
    assert first.normal == (-1, 0, 0)
    assert first.from_attrs == AIR
    assert first.to_attrs == mat
    second = next_interface(r, g, first.t + 1e-9)
    assert second.t == pytest.approx(6.0)
    assert second.from_attrs == mat
    assert second.to_attrs == AIR


def test_next_interface_none_in_empty_grid():
    g = grid()
    assert next_interface(ray((-1, 4.5, 4.5), (1, 0, 0)), g, 0.0) is None


def test_next_interface_at_grid_exit():
    g = grid()
    mat = make_attributes(0.5, 0.5, 0.5, 0.2, 0.2, 0.2, 0)
    g.set((7, 4, 4), mat)
    r = ray((6.5, 4.5, 4.5), (1, 0, 0))
    ev = next_interface(r, g, 0.0)
    assert ev.t == pytest.approx(0.5)  # air -> mat at the x=7 face
    ev2 = next_interface(r, g, ev.t + 1e-9)
    assert ev2.t == pytest.approx(1.5)  # mat -> open air past the grid
    assert ev2.to_attrs == AIR
    assert ev2.normal == (-1, 0, 0)


def test_voxel_size_scales_parameters():
    g = grid((4, 4, 4), vs=2.0)
    evs = traverse(ray((-1.0, 1.0, 1.0), (1, 0, 0)), g)
    assert [e.cell for e in evs] == [(i, 0, 0) for i in range(4)]
    assert evs[0].t_enter == pytest.approx(1.0)
    assert evs[0].t_exit == pytest.approx(3.0)
    assert evs[-1].t_exit == pytest.approx(9.0)

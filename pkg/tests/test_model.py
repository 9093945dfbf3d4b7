import numpy as np
import pytest
from hypothesis import given, strategies as st

from voxelight.errors import OutOfBounds, OutOfRange, UnknownMaterial
from voxelight.model import (
    AIR,
    FIELD_NAMES,
    PRESETS,
    VoxelAttributes,
    VoxelGrid,
    make_attributes,
    material_preset,
)

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@given(st.lists(unit, min_size=7, max_size=7))
def test_valid_attributes_accepted(vals):
    a = make_attributes(*vals)
    assert np.array_equal(a.as_array(), np.array(vals))


@pytest.mark.parametrize("bad", [-0.001, 1.001, 2.0, -1e9, float("nan")])
@pytest.mark.parametrize("slot", range(7))
def test_out_of_range_attribute_rejected(bad, slot):
    vals = [0.5] * 7
    vals[slot] = bad
    with pytest.raises(OutOfRange) as exc:
        make_attributes(*vals)
    assert exc.value.field == FIELD_NAMES[slot]


def test_air_is_all_zero():
    assert AIR.is_air
    assert not make_attributes(0, 0, 0, 0, 0, 0, 0.1).is_air
    assert material_preset("air") == AIR


def test_from_array_round_trip():
    a = make_attributes(0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7)
    assert VoxelAttributes.from_array(a.as_array()) == a


def test_grid_get_set_and_air_deletion():
    g = VoxelGrid((4, 4, 4))
    a = make_attributes(*([0.5] * 7))
    g.set((1, 2, 3), a)
    assert g.get((1, 2, 3)) == a
    assert g.occupied_count == 1
    g.set((1, 2, 3), AIR)
    assert g.occupied_count == 0
    assert g.get((1, 2, 3)) == AIR
    assert g.get((0, 0, 0)) == AIR


def test_grid_bounds_checked():
    g = VoxelGrid((2, 2, 2))
    for c in [(-1, 0, 0), (2, 0, 0), (0, 2, 0), (0, 0, -5)]:
        with pytest.raises(OutOfBounds):
            g.get(c)
        with pytest.raises(OutOfBounds):
            g.set(c, AIR)


def test_grid_rejects_bad_construction():
    with pytest.raises(ValueError):
        VoxelGrid((0, 4, 4))
    with pytest.raises(ValueError):
        VoxelGrid((4, 4))
    with pytest.raises(ValueError):
        VoxelGrid((4, 4, 4), voxel_size=0.0)


def test_frozen_grid_rejects_writes():
    g = VoxelGrid((2, 2, 2))
    g.freeze()
    with pytest.raises(RuntimeError):
        g.set((0, 0, 0), make_attributes(*([1] * 7)))


def test_to_dense_matches_sparse():
    g = VoxelGrid((3, 4, 5))
    a = make_attributes(0.2, 0.4, 0.6, 0.8, 1.0, 0.1, 0.3)
    g.set((2, 3, 4), a)
    dense = g.to_dense()
    assert dense.shape == (3, 4, 5, 7)
    assert np.array_equal(dense[2, 3, 4], a.as_array())
    assert dense.sum() == a.as_array().sum()


# Example material table; frozen here so silent edits to the presets fail loudly.
EXPECTED_PRESETS = {
    "white_shirt": (0.8, 0.8, 0.8, 1, 1, 1, 1),
    "dark_shirt": (0.2, 0.2, 0.2, 1, 1, 1, 1),
    "red_shirt": (0.8, 0, 0, 1, 1, 1, 1),
    "green_shirt": (0, 0.8, 0, 1, 1, 1, 1),
    "blue_shirt": (0, 0, 0.8, 1, 1, 1, 1),
    "color_shirt": (0.8, 0.5, 0.2, 1, 1, 1, 1),
    "skin": (0.5, 0.5, 0.2, 0.8, 1, 1, 0.8),
    "brass": (0.8, 0.8, 0.2, 1, 1, 1, 0.2),
    "glass": (0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0),
    "frosted_glass": (0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.8),
    "water": (0.2, 0.2, 0.5, 0.2, 0.2, 0.2, 0),
    "mirror": (1, 1, 1, 1, 1, 1, 0),
    "air": (0, 0, 0, 0, 0, 0, 0),
    "smoke_mist": (0.5, 0.5, 0.5, 0.2, 0.2, 0.2, 0.5),
}


def test_preset_table_exact():
    assert set(PRESETS) == set(EXPECTED_PRESETS)
    for name, row in EXPECTED_PRESETS.items():
        assert material_preset(name) == make_attributes(*row), name


def test_preset_name_normalization():
    assert material_preset("White Shirt") == material_preset("white_shirt")
    assert material_preset("SMOKE/MIST") == material_preset("smoke_mist")
    with pytest.raises(UnknownMaterial):
        material_preset("adamantium")

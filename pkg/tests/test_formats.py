import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from voxelight.errors import (
    DuplicateVoxel,
    MalformedHeader,
    OutOfBoundsVoxel,
    OutOfRangeAttribute,
    SchemaError,
    TruncatedBody,
    UnknownProperty,
)
from voxelight.formats import (
    cloud_info,
    parse_cloud,
    parse_ppm,
    parse_scene,
    serialize_cloud,
    serialize_scene,
    write_ppm,
)
from voxelight.model import VoxelGrid, make_attributes, material_preset
from voxelight.scene import Camera, Light, SceneConfig


def sample_grid():
    g = VoxelGrid((4, 5, 6), voxel_size=0.25)
    g.set((0, 0, 0), material_preset("glass"))
    g.set((3, 4, 5), material_preset("brass"))
    g.set((1, 2, 3), make_attributes(0.125, 0.25, 0.5, 0.75, 1.0, 0.0, 0.5))
    return g


@pytest.mark.parametrize("encoding", ["ascii", "binary_little_endian"])
def test_cloud_round_trip_float32(encoding):
    g = sample_grid()
    blob = serialize_cloud(g, encoding=encoding)
    back = parse_cloud(blob)
    assert back.dims == g.dims and back.voxel_size == g.voxel_size
    assert back.occupied_count == g.occupied_count
    for c, a in g.occupied():
        # one float32 rounding of the stored value, nothing more
        assert np.array_equal(back.get(c).as_array(),
                              a.as_array().astype(np.float32).astype(np.float64))
    # canonical bytes are a fixed point of parse/serialize
    assert serialize_cloud(back, encoding=encoding) == blob
    assert parse_cloud(serialize_cloud(back, encoding=encoding)) == back


@pytest.mark.parametrize("encoding", ["ascii", "binary_little_endian"])
def test_cloud_round_trip_uint8(encoding):
    g = sample_grid()
    blob = serialize_cloud(g, encoding=encoding, quantization="uint8")
    back = parse_cloud(blob)
    assert back.dims == g.dims and back.voxel_size == g.voxel_size
    for c, a in g.occupied():
        err = np.abs(back.get(c).as_array() - a.as_array())
        assert np.all(err <= 1.0 / 510.0 + 1e-12)


def test_canonical_order_is_insertion_independent():
    a = VoxelGrid((4, 4, 4))
    b = VoxelGrid((4, 4, 4))
    cells = [(0, 0, 0), (3, 1, 2), (1, 3, 0), (2, 2, 2)]
    mat = material_preset("water")
    for c in cells:
        a.set(c, mat)
    for c in reversed(cells):
        b.set(c, mat)
    assert serialize_cloud(a) == serialize_cloud(b)


def test_empty_grid_round_trip():
    g = VoxelGrid((2, 2, 2))
    assert parse_cloud(serialize_cloud(g)) == g
    assert parse_cloud(serialize_cloud(g, encoding="ascii")) == g


def test_explicit_air_rows_collapse():
    blob = (
        b"ply\nformat ascii 1.0\n"
        b"comment voxelight dims 4 4 4\ncomment voxelight voxel_size 1.0\n"
        b"element vertex 1\n"
        b"property int32 x\nproperty int32 y\nproperty int32 z\n"
        + b"".join(b"property float32 " + n + b"\n" for n in
                   (b"r_t", b"g_t", b"b_t", b"r_a", b"g_a", b"b_a", b"d"))
        + b"end_header\n0 0 0 0 0 0 0 0 0 0\n"
    )
    g = parse_cloud(blob)
    assert g.occupied_count == 0


def header(dims=b"4 4 4", vs=b"1.0", count=b"1", attr_type=b"float32",
           props=None, fmt=b"ascii"):
    lines = [b"ply", b"format " + fmt + b" 1.0",
             b"comment voxelight dims " + dims,
             b"comment voxelight voxel_size " + vs,
             b"element vertex " + count]
    if props is None:
        props = [b"property int32 " + n for n in (b"x", b"y", b"z")]
        props += [b"property " + attr_type + b" " + n for n in
                  (b"r_t", b"g_t", b"b_t", b"r_a", b"g_a", b"b_a", b"d")]
    lines += props
    lines.append(b"end_header")
    return b"\n".join(lines) + b"\n"


GOOD_ROW = b"1 1 1 0.5 0.5 0.5 0.5 0.5 0.5 0.5\n"


def test_parse_errors_malformed_header():
    with pytest.raises(MalformedHeader):
        parse_cloud(b"not a ply file")
    with pytest.raises(MalformedHeader):
        parse_cloud(b"plyx\nend_header\n")
    with pytest.raises(MalformedHeader) as exc:
        parse_cloud(header().replace(b"format ascii 1.0", b"format ascii 2.0") + GOOD_ROW)
    assert exc.value.line_no == 2
    with pytest.raises(MalformedHeader):
        parse_cloud(header(dims=b"4 4 -1") + GOOD_ROW)
    with pytest.raises(MalformedHeader):
        parse_cloud(header(vs=b"0") + GOOD_ROW)
    with pytest.raises(MalformedHeader):
        parse_cloud(header().replace(b"comment voxelight dims 4 4 4\n", b"") + GOOD_ROW)
    with pytest.raises(MalformedHeader):
        parse_cloud(header().replace(b"comment voxelight voxel_size 1.0\n", b"") + GOOD_ROW)
    with pytest.raises(MalformedHeader):
        parse_cloud(header().replace(b"element vertex 1\n", b"") + GOOD_ROW)
    with pytest.raises(MalformedHeader):  # wrong coordinate type
        parse_cloud(header().replace(b"property int32 x", b"property float32 x") + GOOD_ROW)
    with pytest.raises(MalformedHeader):  # property order fixed
        parse_cloud(header().replace(b"property int32 x\nproperty int32 y",
                                     b"property int32 y\nproperty int32 x") + GOOD_ROW)


def test_parse_error_unknown_property():
    bad = header().replace(b"property float32 d", b"property float32 shininess")
    with pytest.raises(UnknownProperty):
        parse_cloud(bad + GOOD_ROW)


def test_parse_error_foreign_comment_ok_bad_voxelight_comment_not():
    ok = header().replace(b"ply\n", b"ply\ncomment made by a scanner\n")
    parse_cloud(ok + GOOD_ROW)
    bad = header().replace(b"comment voxelight voxel_size 1.0",
                           b"comment voxelight voxel_sizes 1.0")
    with pytest.raises(MalformedHeader):
        parse_cloud(bad + GOOD_ROW)


def test_parse_error_out_of_range_attribute():
    with pytest.raises(OutOfRangeAttribute) as exc:
        parse_cloud(header() + b"1 1 1 1.5 0 0 0 0 0 0\n")
    assert exc.value.field == "r_t"
    assert exc.value.record == 0


def test_parse_error_out_of_bounds_voxel():
    with pytest.raises(OutOfBoundsVoxel):
        parse_cloud(header() + b"4 0 0 0.5 0 0 0 0 0 0\n")
    with pytest.raises(OutOfBoundsVoxel):
        parse_cloud(header() + b"-1 0 0 0.5 0 0 0 0 0 0\n")


def test_parse_error_duplicate_voxel():
    blob = header(count=b"2") + GOOD_ROW + GOOD_ROW
    with pytest.raises(DuplicateVoxel) as exc:
        parse_cloud(blob)
    assert exc.value.coord == (1, 1, 1)


def test_parse_error_truncated_ascii():
    with pytest.raises(TruncatedBody):
        parse_cloud(header(count=b"2") + GOOD_ROW)
    with pytest.raises(TruncatedBody):
        parse_cloud(header() + b"1 1 1 0.5 oops 0 0 0 0 0\n")


def test_parse_error_truncated_binary():
    g = sample_grid()
    blob = serialize_cloud(g)
    with pytest.raises(TruncatedBody):
        parse_cloud(blob[:-4])


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_float32_round_trip_fuzz(data):
    dims = data.draw(st.tuples(*[st.integers(1, 6)] * 3))
    g = VoxelGrid(dims)
    n = data.draw(st.integers(0, 10))
    f32 = st.floats(min_value=0.0, max_value=1.0, allow_nan=False, width=32)
    for _ in range(n):
        c = tuple(data.draw(st.integers(0, d - 1)) for d in dims)
        g.set(c, make_attributes(*[data.draw(f32) for _ in range(7)]))
    for encoding in ("ascii", "binary_little_endian"):
        assert parse_cloud(serialize_cloud(g, encoding=encoding)) == g


# --- scene JSON ------------------------------------------------------------


def scene_cfg():
    return SceneConfig(
        camera=Camera(position=(1, 2, 3), look_at=(0, 0, 0)),
        lights=[
            Light(kind="point", position=(5, 5, 5), rgb=(2, 2, 2)),
            Light(kind="ambient", rgb=(0.1, 0.1, 0.1)),
        ],
        background=(0.2, 0.3, 0.4),
    )


def test_scene_round_trip():
    cfg = scene_cfg()
    blob = serialize_scene(cfg)
    assert parse_scene(blob) == cfg
    assert serialize_scene(parse_scene(blob)) == blob


def test_scene_rejects_unknown_keys():
    with pytest.raises(SchemaError) as exc:
        parse_scene(b'{"camera": {"position": [0,0,0], "look_at": [1,1,1], "iso": 200}}')
    assert "iso" in exc.value.path


def test_scene_rejects_bad_json_and_bad_values():
    with pytest.raises(SchemaError):
        parse_scene(b"{nope")
    with pytest.raises(SchemaError):
        parse_scene(b'{"camera": {"position": [0,0,0], "look_at": [0,0,0]}}')
    with pytest.raises(SchemaError):
        parse_scene(b'{}')


def test_scene_defaults():
    cfg = parse_scene(b'{"camera": {"position": [0,0,0], "look_at": [1,0,0]}}')
    assert cfg.render.spp == 16
    assert cfg.render.max_depth == 8
    assert cfg.render.seed == 0
    assert cfg.camera.vfov_deg == 60.0
    assert cfg.camera.up == (0.0, 1.0, 0.0)
    assert cfg.optics.eps_max == 1e8
    assert cfg.optics.gamma_map == 1.0


# --- PPM -------------------------------------------------------------------


def test_ppm_round_trip():
    img = (np.arange(2 * 3 * 3) % 256).astype(np.uint8).reshape(2, 3, 3)
    blob = write_ppm(img)
    assert blob.startswith(b"P6\n3 2\n255\n")
    assert np.array_equal(parse_ppm(blob), img)


def test_ppm_rejects_bad_input():
    with pytest.raises(ValueError):
        write_ppm(np.zeros((2, 2, 3), dtype=np.float64))
    with pytest.raises(ValueError):
        parse_ppm(b"P3\n1 1\n255\n0 0 0\n")


def test_cloud_info_summary():
    g = sample_grid()
    info = cloud_info(g)
    assert info["dims"] == [4, 5, 6]
    assert info["voxel_size"] == 0.25
    assert info["occupied"] == 3
    assert info["preset_matches"]["glass"] == 1
    assert info["preset_matches"]["brass"] == 1
    assert info["attributes"]["r_t"]["max"] == 0.8  # brass
    assert info["attributes"]["r_t"]["min"] == 0.125

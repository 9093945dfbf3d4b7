import base64

import numpy as np
import pytest
from fastapi.testclient import TestClient

import voxelight
from voxelight.formats import cloud_info, parse_cloud, parse_ppm, serialize_cloud
from voxelight.model import VoxelGrid, material_preset
from voxelight.scene import Camera, RenderParams, SceneConfig
from voxelight.scenegen import demo_scene
from voxelight.service import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app, raise_server_exceptions=False)


def b64(blob: bytes) -> str:
    return base64.b64encode(blob).decode("ascii")


def small_cloud() -> bytes:
    g = VoxelGrid((8, 8, 8))
    g.set((4, 4, 4), material_preset("color_shirt"))
    return serialize_cloud(g)


def small_config() -> dict:
    cfg = SceneConfig(
        camera=Camera(position=(4, 4, 20), look_at=(4, 4, 0), width=8, height=8),
        background=(0.5, 0.5, 0.5),
        render=RenderParams(spp=1),
    )
    import json

    return json.loads(cfg.model_dump_json(exclude_none=True))


def test_version(client):
    r = client.get("/version")
    assert r.status_code == 200
    assert r.json() == {"version": voxelight.__version__}


def test_materials_lists_all_presets(client):
    r = client.get("/materials")
    assert r.status_code == 200
    data = r.json()
    assert len(data) == 14
    assert data["glass"]["r_t"] == 0.2
    assert data["mirror"]["d"] == 0.0


def test_scenes_endpoint(client):
    r = client.get("/scenes")
    assert set(r.json()["scenes"]) == {
        "materials_gallery", "mirror_box", "glass_sphere", "fog_room",
        "day_night_building",
    }


def test_generate_round_trips_through_parser(client):
    r = client.post("/generate", json={"scene": "glass_sphere"})
    assert r.status_code == 200
    data = r.json()
    grid = parse_cloud(base64.b64decode(data["cloud_b64"]))
    expected, configs = demo_scene("glass_sphere")
    assert grid.dims == expected.dims
    assert grid.occupied_count == expected.occupied_count
    for c, a in expected.occupied():
        f32 = a.as_array().astype(np.float32).astype(np.float64)
        assert np.array_equal(grid.get(c).as_array(), f32)
    assert [c["label"] for c in data["configs"]] == [lab for lab, _ in configs]


def test_generate_unknown_scene(client):
    r = client.post("/generate", json={"scene": "narnia"})
    assert r.status_code == 404
    body = r.json()
    assert body["error"] == "UnknownScene"
    assert "materials_gallery" in body["detail"]


def test_generate_rejects_unknown_fields(client):
    r = client.post("/generate", json={"scene": "fog_room", "level": 9})
    assert r.status_code == 422


def test_validate_ok_and_errors(client):
    r = client.post("/validate", json={"cloud_b64": b64(small_cloud())})
    assert r.status_code == 200
    assert r.json() == {"ok": True, "occupied": 1}

    r = client.post("/validate", json={"cloud_b64": b64(b"garbage")})
    assert r.status_code == 422
    assert r.json()["error"] == "MalformedHeader"

    r = client.post("/validate", json={"cloud_b64": "!!!not base64!!!"})
    assert r.status_code == 422


def test_info_matches_local_summary(client):
    blob = small_cloud()
    r = client.post("/info", json={"cloud_b64": b64(blob)})
    assert r.status_code == 200
    assert r.json() == cloud_info(parse_cloud(blob))


def test_render_returns_ppm(client):
    r = client.post(
        "/render", json={"cloud_b64": b64(small_cloud()), "config": small_config()}
    )
    assert r.status_code == 200
    img = parse_ppm(base64.b64decode(r.json()["ppm_b64"]))
    assert img.shape == (8, 8, 3)


def test_render_deterministic(client):
    payload = {"cloud_b64": b64(small_cloud()), "config": small_config()}
    a = client.post("/render", json=payload).json()["ppm_b64"]
    b = client.post("/render", json=payload).json()["ppm_b64"]
    assert a == b


def test_render_overrides_beat_config(client):
    base = {"cloud_b64": b64(small_cloud()), "config": small_config()}
    via_override = client.post(
        "/render", json={**base, "overrides": {"spp": 4, "seed": 9}}
    ).json()["ppm_b64"]
    cfg = small_config()
    cfg["render"]["spp"] = 4
    cfg["render"]["seed"] = 9
    via_config = client.post(
        "/render", json={"cloud_b64": base["cloud_b64"], "config": cfg}
    ).json()["ppm_b64"]
    assert via_override == via_config


def test_render_size_override(client):
    r = client.post(
        "/render",
        json={
            "cloud_b64": b64(small_cloud()),
            "config": small_config(),
            "overrides": {"width": 4, "height": 6},
        },
    )
    img = parse_ppm(base64.b64decode(r.json()["ppm_b64"]))
    assert img.shape == (6, 4, 3)


def test_render_rejects_bad_config(client):
    cfg = small_config()
    cfg["camera"]["look_at"] = cfg["camera"]["position"]
    r = client.post("/render", json={"cloud_b64": b64(small_cloud()), "config": cfg})
    assert r.status_code == 422

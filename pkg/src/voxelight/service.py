"""HTTP render service: a FastAPI wrapper over the core package.

Binary payloads (cloud files, PPM images) travel base64-encoded inside
JSON bodies so every endpoint speaks one content type.  Domain failures
map to 422 with a structured {error, detail} body; malformed requests
are FastAPI's usual 422 envelope; anything else is a 500.
"""

from __future__ import annotations

import base64
from typing import List, Literal, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

import voxelight
from voxelight.errors import FormatError, UnknownScene, VoxelightError
from voxelight.formats import (
    cloud_info,
    parse_cloud,
    parse_scene,
    serialize_cloud,
    serialize_scene,
    write_ppm,
)
from voxelight.model import PRESETS
from voxelight.scene import SceneConfig
from voxelight.scenegen import DEMO_SCENE_NAMES, demo_scene
from voxelight.shading import Scene, render, tone_map

app = FastAPI(title="voxelight", version=voxelight.__version__)


@app.exception_handler(VoxelightError)
async def _domain_error(request: Request, exc: VoxelightError):
    status = 422
    if isinstance(exc, UnknownScene):
        status = 404
    return JSONResponse(
        status_code=status,
        content={"error": type(exc).__name__, "detail": str(exc)},
    )


class GenerateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scene: str
    encoding: Literal["ascii", "binary_little_endian"] = "binary_little_endian"
    quantize: Literal["float32", "uint8"] = "float32"


class LabeledConfig(BaseModel):
    label: str
    config: SceneConfig


class GenerateResponse(BaseModel):
    cloud_b64: str
    configs: List[LabeledConfig]


class CloudRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    cloud_b64: str


class RenderOverrides(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spp: Optional[int] = Field(default=None, ge=1)
    max_depth: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = Field(default=None, ge=0)
    width: Optional[int] = Field(default=None, gt=0)
    height: Optional[int] = Field(default=None, gt=0)
    workers: Optional[int] = Field(default=None, ge=1)


class RenderRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    cloud_b64: str
    config: SceneConfig
    overrides: RenderOverrides = Field(default_factory=RenderOverrides)


def _decode_cloud(b64: str) -> bytes:
    try:
        return base64.b64decode(b64, validate=True)
    except Exception:
        raise FormatError("cloud_b64 is not valid base64") from None


def apply_overrides(config: SceneConfig, ov: RenderOverrides) -> SceneConfig:
    """Flag/request values beat scene-file values beat defaults."""
    updates = {}
    render_updates = {
        k: v
        for k, v in (("spp", ov.spp), ("max_depth", ov.max_depth), ("seed", ov.seed))
        if v is not None
    }
    if render_updates:
        updates["render"] = config.render.model_copy(update=render_updates)
    cam_updates = {
        k: v for k, v in (("width", ov.width), ("height", ov.height)) if v is not None
    }
    if cam_updates:
        updates["camera"] = config.camera.model_copy(update=cam_updates)
    return config.model_copy(update=updates) if updates else config


@app.get("/version")
def version():
    return {"version": voxelight.__version__}


@app.get("/materials")
def materials():
    return {
        name: dict(zip(
            ("r_t", "g_t", "b_t", "r_a", "g_a", "b_a", "d"),
            (float(v) for v in p.attrs.as_array()),
        ))
        for name, p in PRESETS.items()
    }


@app.get("/scenes")
def scenes():
    return {"scenes": list(DEMO_SCENE_NAMES)}


@app.post("/generate", response_model=GenerateResponse)
def generate(req: GenerateRequest):
    grid, configs = demo_scene(req.scene)
    blob = serialize_cloud(grid, encoding=req.encoding, quantization=req.quantize)
    return GenerateResponse(
        cloud_b64=base64.b64encode(blob).decode("ascii"),
        configs=[LabeledConfig(label=label, config=cfg) for label, cfg in configs],
    )


@app.post("/validate")
def validate(req: CloudRequest):
    grid = parse_cloud(_decode_cloud(req.cloud_b64))
    return {"ok": True, "occupied": grid.occupied_count}


@app.post("/info")
def info(req: CloudRequest):
    grid = parse_cloud(_decode_cloud(req.cloud_b64))
    return cloud_info(grid)


@app.post("/render")
def render_endpoint(req: RenderRequest):
    grid = parse_cloud(_decode_cloud(req.cloud_b64))
    config = apply_overrides(req.config, req.overrides)
    scene = Scene.build(grid, config)
    fb = render(scene, workers=req.overrides.workers)
    ppm = write_ppm(tone_map(fb))
    return {"ppm_b64": base64.b64encode(ppm).decode("ascii")}


__all__ = [
    "app",
    "apply_overrides",
    "GenerateRequest",
    "RenderRequest",
    "RenderOverrides",
    "CloudRequest",
]

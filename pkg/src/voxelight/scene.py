"""Scene configuration: camera, lights, render and optics parameters.

These pydantic models are the JSON schema of the scene file and the wire
format of the render service.  Lights and camera live here, never in the
cloud file, so the cloud stays illumination-free.
"""

from __future__ import annotations

import math
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

Vec3 = Tuple[float, float, float]


class Camera(BaseModel):
    model_config = ConfigDict(extra="forbid")

    position: Vec3
    look_at: Vec3
    up: Vec3 = (0.0, 1.0, 0.0)
    vfov_deg: float = Field(default=60.0, gt=0.0, lt=180.0)
    width: int = Field(default=256, gt=0)
    height: int = Field(default=256, gt=0)

    @model_validator(mode="after")
    def _check_geometry(self):
        fwd = tuple(b - a for a, b in zip(self.position, self.look_at))
        if all(abs(v) < 1e-12 for v in fwd):
            raise ValueError("camera position and look_at coincide")
        cx = fwd[1] * self.up[2] - fwd[2] * self.up[1]
        cy = fwd[2] * self.up[0] - fwd[0] * self.up[2]
        cz = fwd[0] * self.up[1] - fwd[1] * self.up[0]
        if cx * cx + cy * cy + cz * cz < 1e-18:
            raise ValueError("camera up vector is parallel to the view direction")
        return self


class Light(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["point", "directional", "ambient"]
    position: Optional[Vec3] = None
    direction: Optional[Vec3] = None
    rgb: Vec3 = (1.0, 1.0, 1.0)

    @model_validator(mode="after")
    def _check_kind(self):
        if any(v < 0 for v in self.rgb):
            raise ValueError("light intensity must be nonnegative")
        if self.kind == "point":
            if self.position is None:
                raise ValueError("point light requires a position")
            if self.direction is not None:
                raise ValueError("point light takes no direction")
        elif self.kind == "directional":
            if self.direction is None:
                raise ValueError("directional light requires a direction")
            if self.position is not None:
                raise ValueError("directional light takes no position")
            if math.fsum(v * v for v in self.direction) < 1e-18:
                raise ValueError("directional light direction must be nonzero")
        else:
            if self.position is not None or self.direction is not None:
                raise ValueError("ambient light takes no position or direction")
        return self


class RenderParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spp: int = Field(default=16, ge=1)
    max_depth: int = Field(default=8, ge=1)
    seed: int = Field(default=0, ge=0)
    spectral_split: bool = False
    smooth_normals: bool = False


class OpticsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    eps_max: float = Field(default=1e8, gt=1.0)
    gamma_map: float = Field(default=1.0, gt=0.0)


class SceneConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    camera: Camera
    lights: List[Light] = Field(default_factory=list)
    background: Vec3 = (0.0, 0.0, 0.0)
    render: RenderParams = Field(default_factory=RenderParams)
    optics: OpticsConfig = Field(default_factory=OpticsConfig)
    cloud: Optional[str] = None

    @model_validator(mode="after")
    def _check_background(self):
        if any(v < 0 for v in self.background):
            raise ValueError("background must be nonnegative")
        return self

"""Model-centric volumetric point clouds: attributes, optics, and rendering."""

__version__ = "0.1.0"

from voxelight.model import (  # noqa: F401
    AIR,
    MaterialPreset,
    VoxelAttributes,
    VoxelCoord,
    VoxelGrid,
    material_preset,
)

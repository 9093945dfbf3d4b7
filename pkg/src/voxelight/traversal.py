"""Exact 3D DDA walk over the uniform voxel grid.

traverse() yields the ordered cells a ray pierces with watertight
parametric intervals; next_interface() finds the first face crossing where
the voxel attributes change (outside the grid counts as air).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from numba import njit

from voxelight.model import AIR, VoxelAttributes, VoxelGrid

_AXES = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


@dataclass(frozen=True)
class Ray:
    origin: np.ndarray
    dir: np.ndarray
    t_min: float = 0.0
    t_max: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=np.float64))
        object.__setattr__(self, "dir", np.asarray(self.dir, dtype=np.float64))
        if abs(np.linalg.norm(self.dir) - 1.0) > 1e-12:
            raise ValueError("ray direction must be unit length")
        if not (self.t_min >= 0 and self.t_min < self.t_max):
            raise ValueError(f"bad parametric range [{self.t_min}, {self.t_max}]")

    def at(self, t: float) -> np.ndarray:
        return self.origin + t * self.dir


def ray(origin, direction, t_min: float = 0.0, t_max: float = math.inf) -> Ray:
    """Ray with the direction normalized for the caller."""
    d = np.asarray(direction, dtype=np.float64)
    n = np.linalg.norm(d)
    if n == 0:
        raise ValueError("ray direction must be nonzero")
    return Ray(np.asarray(origin, dtype=np.float64), d / n, t_min, t_max)


@dataclass(frozen=True)
class TraversalEvent:
    cell: Tuple[int, int, int]
    t_enter: float
    t_exit: float
    entry_face_normal: Tuple[int, int, int]


@dataclass(frozen=True)
class InterfaceEvent:
    position: np.ndarray
    normal: Tuple[int, int, int]
    from_attrs: VoxelAttributes
    to_attrs: VoxelAttributes
    t: float = field(default=0.0)


@njit(cache=True)
def ray_grid_range(ox, oy, oz, dx, dy, dz, nx, ny, nz, vs):
    """Parametric overlap of the ray with the grid box.

    Returns (t0, t1, entry_axis); t0 >= t1 means no overlap.  entry_axis is
    the slab axis realizing t0, or -1 when the box is entered nowhere.
    """
    t0 = -math.inf
    t1 = math.inf
    axis = -1
    o = (ox, oy, oz)
    d = (dx, dy, dz)
    n = (nx, ny, nz)
    for a in range(3):
        if d[a] == 0.0:
            if o[a] < 0.0 or o[a] > n[a] * vs:
                return math.inf, -math.inf, -1
        else:
            ta = (0.0 - o[a]) / d[a]
            tb = (n[a] * vs - o[a]) / d[a]
            lo = min(ta, tb)
            hi = max(ta, tb)
            if lo > t0:
                t0 = lo
                axis = a
            if hi < t1:
                t1 = hi
    return t0, t1, axis


@njit(cache=True)
def walk_cells(ox, oy, oz, dx, dy, dz, tray0, tray1, nx, ny, nz, vs,
               cells, ts, entry_faces, exit_faces):
    """Fill preallocated event arrays; returns the event count.

    entry_faces / exit_faces hold (axis, sign) of the crossed face; axis -1
    marks "no face" (ray started or ended inside the grid).
    """
    tg0, tg1, entry_axis = ray_grid_range(ox, oy, oz, dx, dy, dz, nx, ny, nz, vs)
    t_lo = max(tray0, tg0)
    t_hi = min(tray1, tg1)
    if not (t_lo < t_hi):
        return 0

    o = (ox, oy, oz)
    d = (dx, dy, dz)
    n = (nx, ny, nz)
    cell = np.empty(3, dtype=np.int64)
    step = np.empty(3, dtype=np.int64)
    tmax = np.empty(3, dtype=np.float64)
    tdelta = np.empty(3, dtype=np.float64)
    for a in range(3):
        p = o[a] + d[a] * t_lo
        c = int(math.floor(p / vs))
        if d[a] < 0.0 and c * vs == p:
            c -= 1
        if c < 0:
            c = 0
        if c > n[a] - 1:
            c = n[a] - 1
        cell[a] = c
        if d[a] > 0.0:
            step[a] = 1
            tmax[a] = ((c + 1) * vs - o[a]) / d[a]
            tdelta[a] = vs / d[a]
        elif d[a] < 0.0:
            step[a] = -1
            tmax[a] = (c * vs - o[a]) / d[a]
            tdelta[a] = -vs / d[a]
        else:
            step[a] = 0
            tmax[a] = math.inf
            tdelta[a] = math.inf

    # First entry face: the grid face pierced at t_lo, or none when the
    # walk starts inside (bookkeeping normal chosen by the caller).
    if t_lo == tg0 and tg0 > tray0:
        face_axis = entry_axis
        face_sign = -step[entry_axis]
    else:
        face_axis = -1
        face_sign = 0

    count = 0
    t = t_lo
    while True:
        # Next crossing; exact ties resolved x before y before z.
        if tmax[0] <= tmax[1] and tmax[0] <= tmax[2]:
            axis = 0
        elif tmax[1] <= tmax[2]:
            axis = 1
        else:
            axis = 2
        tn = tmax[axis]
        t_exit = min(tn, t_hi)
        if t_exit > t:
            cells[count, 0] = cell[0]
            cells[count, 1] = cell[1]
            cells[count, 2] = cell[2]
            ts[count, 0] = t
            ts[count, 1] = t_exit
            entry_faces[count, 0] = face_axis
            entry_faces[count, 1] = face_sign
            if tn <= t_hi:
                exit_faces[count, 0] = axis
                exit_faces[count, 1] = step[axis]
            else:
                exit_faces[count, 0] = -1
                exit_faces[count, 1] = 0
            count += 1
        if tn >= t_hi:
            break
        cell[axis] += step[axis]
        if cell[axis] < 0 or cell[axis] >= n[axis]:
            break
        face_axis = axis
        face_sign = -step[axis]
        tmax[axis] += tdelta[axis]
        t = tn
    return count


def _dominant_axis_normal(d) -> Tuple[int, int, int]:
    a = int(np.argmax(np.abs(d)))
    sign = -1 if d[a] > 0 else 1
    return tuple(sign * v for v in _AXES[a])


def traverse(r: Ray, grid: VoxelGrid) -> List[TraversalEvent]:
    """Ordered cells pierced by the ray, with watertight t intervals."""
    nx, ny, nz = grid.dims
    cap = nx + ny + nz + 3
    cells = np.empty((cap, 3), dtype=np.int64)
    ts = np.empty((cap, 2), dtype=np.float64)
    entry = np.empty((cap, 2), dtype=np.int64)
    exit_ = np.empty((cap, 2), dtype=np.int64)
    count = walk_cells(
        r.origin[0], r.origin[1], r.origin[2],
        r.dir[0], r.dir[1], r.dir[2],
        r.t_min, r.t_max, nx, ny, nz, grid.voxel_size,
        cells, ts, entry, exit_,
    )
    events = []
    for i in range(count):
        axis, sign = int(entry[i, 0]), int(entry[i, 1])
        if axis < 0:
            normal = _dominant_axis_normal(r.dir)
        else:
            normal = tuple(sign * v for v in _AXES[axis])
        events.append(
            TraversalEvent(
                cell=(int(cells[i, 0]), int(cells[i, 1]), int(cells[i, 2])),
                t_enter=float(ts[i, 0]),
                t_exit=float(ts[i, 1]),
                entry_face_normal=normal,
            )
        )
    return events


def next_interface(r: Ray, grid: VoxelGrid, from_t: float) -> Optional[InterfaceEvent]:
    """First face crossing after from_t where the attributes change."""
    events = traverse(r, grid)
    if not events:
        return None

    def attrs_at(cell):
        return grid.get(cell)

    # Medium the ray is in at from_t (air while outside the grid).
    current = AIR
    for ev in events:
        if ev.t_enter <= from_t < ev.t_exit:
            current = attrs_at(ev.cell)
            break

    prev = current
    for i, ev in enumerate(events):
        if ev.t_enter > from_t:
            here = attrs_at(ev.cell)
            if here != prev:
                return InterfaceEvent(
                    position=r.at(ev.t_enter),
                    normal=ev.entry_face_normal,
                    from_attrs=prev,
                    to_attrs=here,
                    t=ev.t_enter,
                )
            prev = here
        else:
            prev = attrs_at(ev.cell)

    # Grid exit from a non-air cell is an interface back into open air.
    last = events[-1]
    if last.t_exit > from_t and last.t_exit < r.t_max:
        here = attrs_at(last.cell)
        if here != AIR:
            # Exit face normal, oriented against the ray like entry normals.
            nrm = _exit_face_normal(r, grid, last)
            return InterfaceEvent(
                position=r.at(last.t_exit),
                normal=nrm,
                from_attrs=here,
                to_attrs=AIR,
                t=last.t_exit,
            )
    return None


def _exit_face_normal(r: Ray, grid: VoxelGrid, last: TraversalEvent) -> Tuple[int, int, int]:
    vs = grid.voxel_size
    p = r.at(last.t_exit)
    best_axis, best_err = 0, math.inf
    for a in range(3):
        frac = p[a] / vs
        err = abs(frac - round(frac))
        if err < best_err and r.dir[a] != 0:
            best_err = err
            best_axis = a
    sign = -1 if r.dir[best_axis] > 0 else 1
    return tuple(sign * v for v in _AXES[best_axis])

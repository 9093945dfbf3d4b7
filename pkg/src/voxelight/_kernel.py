"""Numba kernels for the stochastic ray tracer.

Paths are traced iteratively with an explicit stack: deterministic
reflect/refract splits for the first interfaces, then a correlated
per-channel roulette (each channel follows exactly one branch with the
branch indicator as its unbiased weight, so per-channel throughput factors
never exceed 1).  All randomness comes from counter-based streams keyed by
(seed, pixel, sample[, channel]), making output independent of worker count.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange

from voxelight.optics import eps_from_pt, fresnel_ratios
from voxelight.rng import next_float, stream_state
from voxelight.traversal import ray_grid_range

W_R = 0.2126
W_G = 0.7152
W_B = 0.0722
PHONG_N_MAX = 4097.0
OFF = 1e-4  # ray restart offset along the face normal, in voxel sizes
STACK = 128
SPLIT_DEPTH = 3  # deterministic reflect+refract split below this depth
FAR = 1e30


@njit(cache=True, inline="always")
def _channel_reflectance(pt1, pt2, cos1, eps_max, gmap):
    """Unpolarized power reflectance of one color channel at an interface."""
    if pt1 == 1.0 or pt2 == 1.0:
        return 1.0  # perfect-mirror special case, independent of eps_max
    if pt1 == pt2:
        return 0.0
    eps1 = eps_from_pt(pt1, eps_max, gmap)
    eps2 = eps_from_pt(pt2, eps_max, gmap)
    v1 = 1.0 / math.sqrt(eps1)
    v2 = 1.0 / math.sqrt(eps2)
    sin1 = math.sqrt(max(0.0, 1.0 - cos1 * cos1))
    sin2 = v2 / v1 * sin1
    if sin2 > 1.0:
        return 1.0
    cos2 = math.sqrt(1.0 - sin2 * sin2)
    gp, _tp, gq, _tq = fresnel_ratios(cos1, cos2, v1, v2)
    r = 0.5 * (gp * gp + gq * gq)
    if r < 0.0:
        r = 0.0
    elif r > 1.0:
        r = 1.0
    return r


@njit(cache=True, inline="always")
def _onb(nx, ny, nz):
    """Branchless orthonormal basis perpendicular to (nx, ny, nz)."""
    sign = 1.0 if nz >= 0.0 else -1.0
    a = -1.0 / (sign + nz)
    b = nx * ny * a
    return (
        1.0 + sign * nx * nx * a, sign * b, -sign * nx,
        b, sign + ny * ny * a, -ny,
    )


@njit(cache=True)
def _sample_cosine(nx, ny, nz, state):
    u1 = next_float(state)
    u2 = next_float(state)
    r = math.sqrt(u1)
    phi = 2.0 * math.pi * u2
    x = r * math.cos(phi)
    y = r * math.sin(phi)
    z = math.sqrt(max(0.0, 1.0 - u1))
    t1x, t1y, t1z, t2x, t2y, t2z = _onb(nx, ny, nz)
    return (
        x * t1x + y * t2x + z * nx,
        x * t1y + y * t2y + z * ny,
        x * t1z + y * t2z + z * nz,
    )


@njit(cache=True)
def _sample_phong(bx, by, bz, exponent, state):
    u1 = next_float(state)
    u2 = next_float(state)
    cosa = u1 ** (1.0 / (exponent + 1.0))
    sina = math.sqrt(max(0.0, 1.0 - cosa * cosa))
    phi = 2.0 * math.pi * u2
    x = sina * math.cos(phi)
    y = sina * math.sin(phi)
    t1x, t1y, t1z, t2x, t2y, t2z = _onb(bx, by, bz)
    return (
        x * t1x + y * t2x + cosa * bx,
        x * t1y + y * t2y + cosa * by,
        x * t1z + y * t2z + cosa * bz,
    )


@njit(cache=True)
def sample_scatter_dir(nx, ny, nz, bx, by, bz, d, exponent, weight, state):
    """Scattered unit direction about base dir b, constrained to b's side of n.

    d=0 returns b bit-exactly; otherwise a Lambertian draw with probability
    `weight`, else a Phong-lobe draw rejection-resampled against the surface.
    """
    if d == 0.0:
        return bx, by, bz
    side = 1.0 if (bx * nx + by * ny + bz * nz) >= 0.0 else -1.0
    if next_float(state) < weight:
        return _sample_cosine(side * nx, side * ny, side * nz, state)
    for _ in range(64):
        sx, sy, sz = _sample_phong(bx, by, bz, exponent, state)
        if (sx * nx + sy * ny + sz * nz) * side >= 0.0:
            return sx, sy, sz
    return bx, by, bz


@njit(cache=True, inline="always")
def _init_dda(o0, o1, o2, d0, d1, d2, t_lo, n0, n1, n2, vs):
    """Cell index, step, tmax, tdelta at parametric position t_lo."""
    cell = np.empty(3, dtype=np.int64)
    step = np.empty(3, dtype=np.int64)
    tmax = np.empty(3, dtype=np.float64)
    tdelta = np.empty(3, dtype=np.float64)
    o = (o0, o1, o2)
    d = (d0, d1, d2)
    n = (n0, n1, n2)
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
    return cell, step, tmax, tdelta


@njit(cache=True)
def _shadow_transmittance(attrs, vs, ox, oy, oz, dx, dy, dz, dist,
                          eps_max, gmap):
    """Per-channel fraction of light surviving the straight path to a light.

    Multiplies per-voxel attenuation and (1 - R) at every face where the
    attributes change; the shadow ray is not bent.
    """
    n0, n1, n2 = attrs.shape[0], attrs.shape[1], attrs.shape[2]
    tr = 1.0
    tg = 1.0
    tb = 1.0
    tg0, tg1, eaxis = ray_grid_range(ox, oy, oz, dx, dy, dz, n0, n1, n2, vs)
    t_hi = min(dist, tg1)
    t_lo = max(0.0, tg0)
    if not t_lo < t_hi:
        return tr, tg, tb

    cell, step, tmax, tdelta = _init_dda(ox, oy, oz, dx, dy, dz, t_lo, n0, n1, n2, vs)
    dcomp = (dx, dy, dz)

    # Face loss when the path enters the grid into a non-air cell.
    cr = attrs[cell[0], cell[1], cell[2], 0]
    cg = attrs[cell[0], cell[1], cell[2], 1]
    cb = attrs[cell[0], cell[1], cell[2], 2]
    if tg0 > 1e-12 and eaxis >= 0:
        cos1 = abs(dcomp[eaxis])
        tr *= 1.0 - _channel_reflectance(0.0, cr, cos1, eps_max, gmap)
        tg *= 1.0 - _channel_reflectance(0.0, cg, cos1, eps_max, gmap)
        tb *= 1.0 - _channel_reflectance(0.0, cb, cos1, eps_max, gmap)

    t = t_lo
    while True:
        if tmax[0] <= tmax[1] and tmax[0] <= tmax[2]:
            axis = 0
        elif tmax[1] <= tmax[2]:
            axis = 1
        else:
            axis = 2
        tn = tmax[axis]
        t_exit = min(tn, t_hi)
        seg = t_exit - t
        if seg > 0.0:
            e = seg / vs
            ar = attrs[cell[0], cell[1], cell[2], 3]
            ag = attrs[cell[0], cell[1], cell[2], 4]
            ab = attrs[cell[0], cell[1], cell[2], 5]
            if ar > 0.0:
                tr *= (1.0 - ar) ** e
            if ag > 0.0:
                tg *= (1.0 - ag) ** e
            if ab > 0.0:
                tb *= (1.0 - ab) ** e
        if tr + tg + tb < 1e-12:
            return 0.0, 0.0, 0.0
        if tn >= t_hi - 1e-12 * vs:
            # Face loss if the path leaves the grid from a non-air cell
            # before reaching the light.
            if t_hi < dist:
                pr = attrs[cell[0], cell[1], cell[2], 0]
                pg = attrs[cell[0], cell[1], cell[2], 1]
                pb = attrs[cell[0], cell[1], cell[2], 2]
                if pr > 0.0 or pg > 0.0 or pb > 0.0:
                    cos1 = abs(dcomp[axis])
                    tr *= 1.0 - _channel_reflectance(pr, 0.0, cos1, eps_max, gmap)
                    tg *= 1.0 - _channel_reflectance(pg, 0.0, cos1, eps_max, gmap)
                    tb *= 1.0 - _channel_reflectance(pb, 0.0, cos1, eps_max, gmap)
            return tr, tg, tb
        nxt = cell[axis] + step[axis]
        if nxt < 0 or nxt >= attrs.shape[axis]:
            return tr, tg, tb
        ocx, ocy, ocz = cell[0], cell[1], cell[2]
        pr = attrs[ocx, ocy, ocz, 0]
        pg = attrs[ocx, ocy, ocz, 1]
        pb = attrs[ocx, ocy, ocz, 2]
        cell[axis] = nxt
        nr = attrs[cell[0], cell[1], cell[2], 0]
        ng = attrs[cell[0], cell[1], cell[2], 1]
        nb = attrs[cell[0], cell[1], cell[2], 2]
        changed = False
        for k in range(7):
            if attrs[cell[0], cell[1], cell[2], k] != attrs[ocx, ocy, ocz, k]:
                changed = True
                break
        if changed:
            cos1 = abs(dcomp[axis])
            tr *= 1.0 - _channel_reflectance(pr, nr, cos1, eps_max, gmap)
            tg *= 1.0 - _channel_reflectance(pg, ng, cos1, eps_max, gmap)
            tb *= 1.0 - _channel_reflectance(pb, nb, cos1, eps_max, gmap)
        tmax[axis] += tdelta[axis]
        t = tn


@njit(cache=True)
def _direct_light(attrs, vs, px, py, pz, nx, ny, nz, surf, lk, lv, lr,
                  eps_max, gmap):
    """Direct per-channel contribution at an interface point.

    Lambertian share only: intensity * cos * P_t * D, shadowed through the
    grid; ambient lights skip the cosine and the shadow ray.
    """
    sd = surf[6]
    if sd == 0.0:
        return 0.0, 0.0, 0.0
    out_r = 0.0
    out_g = 0.0
    out_b = 0.0
    sox = px + nx * OFF * vs
    soy = py + ny * OFF * vs
    soz = pz + nz * OFF * vs
    for li in range(lk.shape[0]):
        kind = lk[li]
        if kind == 2:  # ambient
            out_r += lr[li, 0] * surf[0] * sd
            out_g += lr[li, 1] * surf[1] * sd
            out_b += lr[li, 2] * surf[2] * sd
            continue
        if kind == 0:  # point
            ldx = lv[li, 0] - sox
            ldy = lv[li, 1] - soy
            ldz = lv[li, 2] - soz
            dist = math.sqrt(ldx * ldx + ldy * ldy + ldz * ldz)
            if dist == 0.0:
                continue
            ldx /= dist
            ldy /= dist
            ldz /= dist
        else:  # directional: lv holds the direction the light travels
            ldx = -lv[li, 0]
            ldy = -lv[li, 1]
            ldz = -lv[li, 2]
            dist = FAR
        cosl = nx * ldx + ny * ldy + nz * ldz
        if cosl <= 0.0:
            continue
        str_, stg, stb = _shadow_transmittance(
            attrs, vs, sox, soy, soz, ldx, ldy, ldz, dist, eps_max, gmap
        )
        out_r += lr[li, 0] * cosl * surf[0] * sd * str_
        out_g += lr[li, 1] * cosl * surf[1] * sd * stg
        out_b += lr[li, 2] * cosl * surf[2] * sd * stb
    return out_r, out_g, out_b


@njit(cache=True)
def _smooth_normal(meanpt, cx, cy, cz, fx, fy, fz):
    """Central-difference gradient of box-filtered occupancy at a cell.

    Falls back to the face normal (fx, fy, fz) when the gradient vanishes.
    Result is oriented to the face normal's side.
    """
    n0, n1, n2 = meanpt.shape
    g = np.zeros(3, dtype=np.float64)
    for a in range(3):
        acc_p = 0.0
        acc_m = 0.0
        for ox in range(-1, 2):
            for oy in range(-1, 2):
                for oz in range(-1, 2):
                    xp = cx + ox + (1 if a == 0 else 0)
                    yp = cy + oy + (1 if a == 1 else 0)
                    zp = cz + oz + (1 if a == 2 else 0)
                    xm = cx + ox - (1 if a == 0 else 0)
                    ym = cy + oy - (1 if a == 1 else 0)
                    zm = cz + oz - (1 if a == 2 else 0)
                    if 0 <= xp < n0 and 0 <= yp < n1 and 0 <= zp < n2:
                        acc_p += meanpt[xp, yp, zp]
                    if 0 <= xm < n0 and 0 <= ym < n1 and 0 <= zm < n2:
                        acc_m += meanpt[xm, ym, zm]
        g[a] = acc_m - acc_p  # occupancy decreases toward the outside
    norm = math.sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2])
    if norm < 1e-9:
        return fx, fy, fz
    gx = g[0] / norm
    gy = g[1] / norm
    gz = g[2] / norm
    if gx * fx + gy * fy + gz * fz < 0.0:
        gx = -gx
        gy = -gy
        gz = -gz
    return gx, gy, gz


@njit(cache=True)
def trace_one(attrs, meanpt, vs, ox, oy, oz, dx, dy, dz, bg, lk, lv, lr,
              eps_max, gmap, max_depth, channel, smooth, state, stack):
    """Radiance estimate for one ray; channel=-1 traces all three channels
    with luminance-averaged refraction geometry, 0..2 traces one channel."""
    n0, n1, n2 = attrs.shape[0], attrs.shape[1], attrs.shape[2]
    if channel < 0:
        wr, wg, wb = W_R, W_G, W_B
        tpr0, tpg0, tpb0 = 1.0, 1.0, 1.0
    else:
        wr = 1.0 if channel == 0 else 0.0
        wg = 1.0 if channel == 1 else 0.0
        wb = 1.0 if channel == 2 else 0.0
        tpr0, tpg0, tpb0 = wr, wg, wb

    out_r = 0.0
    out_g = 0.0
    out_b = 0.0

    sp = 0
    stack[sp, 0] = ox
    stack[sp, 1] = oy
    stack[sp, 2] = oz
    stack[sp, 3] = dx
    stack[sp, 4] = dy
    stack[sp, 5] = dz
    stack[sp, 6] = tpr0
    stack[sp, 7] = tpg0
    stack[sp, 8] = tpb0
    stack[sp, 9] = 0.0
    sp += 1

    while sp > 0:
        sp -= 1
        rox = stack[sp, 0]
        roy = stack[sp, 1]
        roz = stack[sp, 2]
        rdx = stack[sp, 3]
        rdy = stack[sp, 4]
        rdz = stack[sp, 5]
        tpr = stack[sp, 6]
        tpg = stack[sp, 7]
        tpb = stack[sp, 8]
        depth = int(stack[sp, 9])

        alive = True
        while alive:
            tg0, tg1, eaxis = ray_grid_range(
                rox, roy, roz, rdx, rdy, rdz, n0, n1, n2, vs
            )
            t_lo = max(0.0, tg0)
            if not t_lo < tg1:
                out_r += tpr * bg[0]
                out_g += tpg * bg[1]
                out_b += tpb * bg[2]
                break

            cell, step, tmax, tdelta = _init_dda(
                rox, roy, roz, rdx, rdy, rdz, t_lo, n0, n1, n2, vs
            )
            dcomp = (rdx, rdy, rdz)

            hit_iface = False
            ft0 = 0.0
            fsx = 0.0
            fsy = 0.0
            fsz = 0.0
            fcx = 0
            fcy = 0
            fcz = 0
            from_cx = 0
            from_cy = 0
            from_cz = 0
            from_is_cur = True  # interface "from" side is a real cell
            exit_to_air = False

            # Entering the grid from outside straight into material?
            if tg0 > 1e-12 and eaxis >= 0:
                occupied = False
                for k in range(7):
                    if attrs[cell[0], cell[1], cell[2], k] != 0.0:
                        occupied = True
                        break
                if occupied:
                    hit_iface = True
                    ft0 = t_lo
                    fsx = -(1.0 if rdx > 0 else (-1.0 if rdx < 0 else 0.0)) if eaxis == 0 else 0.0
                    fsy = -(1.0 if rdy > 0 else (-1.0 if rdy < 0 else 0.0)) if eaxis == 1 else 0.0
                    fsz = -(1.0 if rdz > 0 else (-1.0 if rdz < 0 else 0.0)) if eaxis == 2 else 0.0
                    fcx, fcy, fcz = cell[0], cell[1], cell[2]
                    from_is_cur = False  # from=air outside, to=this cell

            t = t_lo
            if not hit_iface:
                while True:
                    if tmax[0] <= tmax[1] and tmax[0] <= tmax[2]:
                        axis = 0
                    elif tmax[1] <= tmax[2]:
                        axis = 1
                    else:
                        axis = 2
                    tn = tmax[axis]
                    t_exit = min(tn, tg1)
                    seg = t_exit - t
                    if seg > 0.0:
                        e = seg / vs
                        ar = attrs[cell[0], cell[1], cell[2], 3]
                        ag = attrs[cell[0], cell[1], cell[2], 4]
                        ab = attrs[cell[0], cell[1], cell[2], 5]
                        if ar > 0.0:
                            tpr *= (1.0 - ar) ** e
                        if ag > 0.0:
                            tpg *= (1.0 - ag) ** e
                        if ab > 0.0:
                            tpb *= (1.0 - ab) ** e
                    if tpr + tpg + tpb < 1e-9:
                        alive = False
                        break
                    if tn >= tg1 - 1e-12 * vs:
                        occupied = False
                        for k in range(7):
                            if attrs[cell[0], cell[1], cell[2], k] != 0.0:
                                occupied = True
                                break
                        if occupied:
                            hit_iface = True
                            ft0 = tg1
                            s = float(step[axis])
                            fsx = -s if axis == 0 else 0.0
                            fsy = -s if axis == 1 else 0.0
                            fsz = -s if axis == 2 else 0.0
                            fcx, fcy, fcz = cell[0], cell[1], cell[2]
                            from_is_cur = True
                            exit_to_air = True
                        else:
                            out_r += tpr * bg[0]
                            out_g += tpg * bg[1]
                            out_b += tpb * bg[2]
                            alive = False
                        break
                    nxt = cell[axis] + step[axis]
                    if nxt < 0 or nxt >= attrs.shape[axis]:
                        out_r += tpr * bg[0]
                        out_g += tpg * bg[1]
                        out_b += tpb * bg[2]
                        alive = False
                        break
                    ocx, ocy, ocz = cell[0], cell[1], cell[2]
                    cell[axis] = nxt
                    changed = False
                    for k in range(7):
                        if (attrs[cell[0], cell[1], cell[2], k]
                                != attrs[ocx, ocy, ocz, k]):
                            changed = True
                            break
                    if changed:
                        hit_iface = True
                        ft0 = tn
                        s = float(step[axis])
                        fsx = -s if axis == 0 else 0.0
                        fsy = -s if axis == 1 else 0.0
                        fsz = -s if axis == 2 else 0.0
                        # store both sides: from = previous cell
                        fcx, fcy, fcz = cell[0], cell[1], cell[2]
                        from_cx, from_cy, from_cz = ocx, ocy, ocz
                        break
                    tmax[axis] += tdelta[axis]
                    t = tn

            if not alive or not hit_iface:
                break

            # --- interface --------------------------------------------------
            if exit_to_air:
                f_r = attrs[fcx, fcy, fcz, 0]
                f_g = attrs[fcx, fcy, fcz, 1]
                f_b = attrs[fcx, fcy, fcz, 2]
                f_ar = attrs[fcx, fcy, fcz, 3]
                f_ag = attrs[fcx, fcy, fcz, 4]
                f_ab = attrs[fcx, fcy, fcz, 5]
                f_d = attrs[fcx, fcy, fcz, 6]
                t_r = t_g = t_b = 0.0
                t_ar = t_ag = t_ab = 0.0
                t_d = 0.0
                mat_cx, mat_cy, mat_cz = fcx, fcy, fcz
            elif from_is_cur:
                f_r = attrs[from_cx, from_cy, from_cz, 0]
                f_g = attrs[from_cx, from_cy, from_cz, 1]
                f_b = attrs[from_cx, from_cy, from_cz, 2]
                f_ar = attrs[from_cx, from_cy, from_cz, 3]
                f_ag = attrs[from_cx, from_cy, from_cz, 4]
                f_ab = attrs[from_cx, from_cy, from_cz, 5]
                f_d = attrs[from_cx, from_cy, from_cz, 6]
                t_r = attrs[fcx, fcy, fcz, 0]
                t_g = attrs[fcx, fcy, fcz, 1]
                t_b = attrs[fcx, fcy, fcz, 2]
                t_ar = attrs[fcx, fcy, fcz, 3]
                t_ag = attrs[fcx, fcy, fcz, 4]
                t_ab = attrs[fcx, fcy, fcz, 5]
                t_d = attrs[fcx, fcy, fcz, 6]
                mat_cx, mat_cy, mat_cz = fcx, fcy, fcz
            else:
                f_r = f_g = f_b = 0.0
                f_ar = f_ag = f_ab = 0.0
                f_d = 0.0
                t_r = attrs[fcx, fcy, fcz, 0]
                t_g = attrs[fcx, fcy, fcz, 1]
                t_b = attrs[fcx, fcy, fcz, 2]
                t_ar = attrs[fcx, fcy, fcz, 3]
                t_ag = attrs[fcx, fcy, fcz, 4]
                t_ab = attrs[fcx, fcy, fcz, 5]
                t_d = attrs[fcx, fcy, fcz, 6]
                mat_cx, mat_cy, mat_cz = fcx, fcy, fcz

            nrm_x, nrm_y, nrm_z = fsx, fsy, fsz
            if smooth:
                nrm_x, nrm_y, nrm_z = _smooth_normal(
                    meanpt, mat_cx, mat_cy, mat_cz, fsx, fsy, fsz
                )
                if nrm_x * rdx + nrm_y * rdy + nrm_z * rdz >= 0.0:
                    nrm_x, nrm_y, nrm_z = fsx, fsy, fsz

            cos1 = -(rdx * nrm_x + rdy * nrm_y + rdz * nrm_z)
            if cos1 < 1e-12:
                cos1 = 1e-12
            if cos1 > 1.0:
                cos1 = 1.0

            # Per-channel reflectance.
            r_r = _channel_reflectance(f_r, t_r, cos1, eps_max, gmap)
            r_g = _channel_reflectance(f_g, t_g, cos1, eps_max, gmap)
            r_b = _channel_reflectance(f_b, t_b, cos1, eps_max, gmap)

            # Single refraction geometry from luminance-averaged permittivity
            # (channel-pure when tracing one channel).
            eps1 = (wr * eps_from_pt(f_r, eps_max, gmap)
                    + wg * eps_from_pt(f_g, eps_max, gmap)
                    + wb * eps_from_pt(f_b, eps_max, gmap))
            eps2 = (wr * eps_from_pt(t_r, eps_max, gmap)
                    + wg * eps_from_pt(t_g, eps_max, gmap)
                    + wb * eps_from_pt(t_b, eps_max, gmap))
            ratio = math.sqrt(eps1 / eps2)  # v2/v1
            sin1 = math.sqrt(max(0.0, 1.0 - cos1 * cos1))
            sin2 = ratio * sin1
            geom_tir = sin2 > 1.0
            if geom_tir:
                r_r = 1.0
                r_g = 1.0
                r_b = 1.0

            # Direct lighting off the struck surface (Lambertian share).
            hx = rox + rdx * ft0
            hy = roy + rdy * ft0
            hz = roz + rdz * ft0
            surf = np.empty(7, dtype=np.float64)
            if t_r + t_g + t_b + t_ar + t_ag + t_ab + t_d == 0.0:
                # Struck side is air: shade the material side instead.
                surf[0] = f_r
                surf[1] = f_g
                surf[2] = f_b
                surf[3] = f_ar
                surf[4] = f_ag
                surf[5] = f_ab
                surf[6] = f_d
            else:
                surf[0] = t_r
                surf[1] = t_g
                surf[2] = t_b
                surf[3] = t_ar
                surf[4] = t_ag
                surf[5] = t_ab
                surf[6] = t_d
            dl_r, dl_g, dl_b = _direct_light(
                attrs, vs, hx, hy, hz, nrm_x, nrm_y, nrm_z, surf,
                lk, lv, lr, eps_max, gmap
            )
            out_r += tpr * dl_r
            out_g += tpg * dl_g
            out_b += tpb * dl_b

            new_depth = depth + 1
            if new_depth > max_depth:
                alive = False
                break

            # Transmission impossible into a fully opaque cell.
            to_opaque = (
                not exit_to_air
                and (wr == 0.0 or t_ar == 1.0)
                and (wg == 0.0 or t_ag == 1.0)
                and (wb == 0.0 or t_ab == 1.0)
            )
            rbar = wr * r_r + wg * r_g + wb * r_b
            has_refract = (not geom_tir) and (not to_opaque) and rbar < 1.0

            # Specular branch directions.
            refl_x = rdx + 2.0 * cos1 * nrm_x
            refl_y = rdy + 2.0 * cos1 * nrm_y
            refl_z = rdz + 2.0 * cos1 * nrm_z
            if has_refract:
                cos2 = math.sqrt(max(0.0, 1.0 - sin2 * sin2))
                refr_x = ratio * rdx + (ratio * cos1 - cos2) * nrm_x
                refr_y = ratio * rdy + (ratio * cos1 - cos2) * nrm_y
                refr_z = ratio * rdz + (ratio * cos1 - cos2) * nrm_z
            else:
                refr_x = refr_y = refr_z = 0.0

            d_iface = f_d if f_d > t_d else t_d
            exponent = PHONG_N_MAX ** (1.0 - d_iface) - 1.0
            weight = d_iface

            # Branch throughputs.
            if depth < SPLIT_DEPTH:
                rf_r = tpr * r_r
                rf_g = tpg * r_g
                rf_b = tpb * r_b
                tf_r = tpr * (1.0 - r_r)
                tf_g = tpg * (1.0 - r_g)
                tf_b = tpb * (1.0 - r_b)
            else:
                u = next_float(state)
                rf_r = tpr if u < r_r else 0.0
                rf_g = tpg if u < r_g else 0.0
                rf_b = tpb if u < r_b else 0.0
                tf_r = tpr - rf_r
                tf_g = tpg - rf_g
                tf_b = tpb - rf_b

            if has_refract and tf_r + tf_g + tf_b > 1e-9 and sp < STACK - 2:
                sdx, sdy, sdz = sample_scatter_dir(
                    nrm_x, nrm_y, nrm_z, refr_x, refr_y, refr_z,
                    d_iface, exponent, weight, state
                )
                stack[sp, 0] = hx - nrm_x * OFF * vs
                stack[sp, 1] = hy - nrm_y * OFF * vs
                stack[sp, 2] = hz - nrm_z * OFF * vs
                stack[sp, 3] = sdx
                stack[sp, 4] = sdy
                stack[sp, 5] = sdz
                stack[sp, 6] = tf_r
                stack[sp, 7] = tf_g
                stack[sp, 8] = tf_b
                stack[sp, 9] = float(new_depth)
                sp += 1

            if rf_r + rf_g + rf_b > 1e-9:
                sdx, sdy, sdz = sample_scatter_dir(
                    nrm_x, nrm_y, nrm_z, refl_x, refl_y, refl_z,
                    d_iface, exponent, weight, state
                )
                # Continue in place with the reflected branch.
                rox = hx + nrm_x * OFF * vs
                roy = hy + nrm_y * OFF * vs
                roz = hz + nrm_z * OFF * vs
                rdx, rdy, rdz = sdx, sdy, sdz
                tpr, tpg, tpb = rf_r, rf_g, rf_b
                depth = new_depth
            else:
                alive = False

    return out_r, out_g, out_b


@njit(cache=True, parallel=True)
def render_kernel(attrs, meanpt, vs, cam, width, height, spp, bg,
                  lk, lv, lr, eps_max, gmap, max_depth,
                  spectral, smooth, seed):
    """Jittered-pixel average of trace_one; deterministic per (scene, seed)."""
    out = np.zeros((height, width, 3), dtype=np.float64)
    npix = width * height
    for pix in prange(npix):
        py = pix // width
        px = pix % width
        state = np.empty(1, dtype=np.uint64)
        stack = np.empty((STACK, 10), dtype=np.float64)
        acc_r = 0.0
        acc_g = 0.0
        acc_b = 0.0
        for s in range(spp):
            if spectral:
                for c in range(3):
                    state[0] = stream_state(seed, pix, s, c + 1)
                    jx = next_float(state)
                    jy = next_float(state)
                    ddx, ddy, ddz = _camera_ray(cam, width, height, px, py, jx, jy)
                    cr, cg, cb = trace_one(
                        attrs, meanpt, vs, cam[0], cam[1], cam[2],
                        ddx, ddy, ddz, bg, lk, lv, lr, eps_max, gmap,
                        max_depth, c, smooth, state, stack
                    )
                    acc_r += cr
                    acc_g += cg
                    acc_b += cb
            else:
                state[0] = stream_state(seed, pix, s, 0)
                jx = next_float(state)
                jy = next_float(state)
                ddx, ddy, ddz = _camera_ray(cam, width, height, px, py, jx, jy)
                cr, cg, cb = trace_one(
                    attrs, meanpt, vs, cam[0], cam[1], cam[2],
                    ddx, ddy, ddz, bg, lk, lv, lr, eps_max, gmap,
                    max_depth, -1, smooth, state, stack
                )
                acc_r += cr
                acc_g += cg
                acc_b += cb
        inv = 1.0 / spp
        out[py, px, 0] = acc_r * inv
        out[py, px, 1] = acc_g * inv
        out[py, px, 2] = acc_b * inv
    return out


@njit(cache=True, inline="always")
def _camera_ray(cam, width, height, px, py, jx, jy):
    """Unit direction through the jittered pixel position.

    cam layout: pos(0:3), right(3:6), up(6:9), forward(9:12), half_w, half_h.
    """
    ndc_x = ((px + jx) / width) * 2.0 - 1.0
    ndc_y = 1.0 - ((py + jy) / height) * 2.0
    ddx = cam[9] + ndc_x * cam[12] * cam[3] + ndc_y * cam[13] * cam[6]
    ddy = cam[10] + ndc_x * cam[12] * cam[4] + ndc_y * cam[13] * cam[7]
    ddz = cam[11] + ndc_x * cam[12] * cam[5] + ndc_y * cam[13] * cam[8]
    norm = math.sqrt(ddx * ddx + ddy * ddy + ddz * ddz)
    return ddx / norm, ddy / norm, ddz / norm

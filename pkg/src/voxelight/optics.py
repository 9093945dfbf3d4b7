"""Interface optics: attribute-to-permittivity mapping, Snell refraction,
Fresnel field coefficients, path attenuation, and scatter-lobe parameters.

All functions are pure.  Transmissivity p_t maps onto relative permittivity
through eps_r = eps_max ** (p_t ** gamma_map); impedance and wave speed both
scale as 1/sqrt(eps_r) for the dielectrics modeled here, which is all the
renderer needs to evaluate refraction angles and reflectance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from voxelight.errors import DegenerateNormal, OutOfRange

# Lobe sharpness at d=0; chosen so the exponent schedule spans 4096 .. 0.
PHONG_N_MAX = 4097.0

# Rec. 709 luminance weights, used to collapse per-channel permittivity
# into a single refraction geometry.
LUMA = (0.2126, 0.7152, 0.0722)


@dataclass(frozen=True)
class MappingConfig:
    """Transmissivity-to-permittivity curve parameters."""

    eps_max: float = 1e8
    gamma_map: float = 1.0

    def __post_init__(self):
        if not self.eps_max > 1:
            raise ValueError(f"eps_max must exceed 1, got {self.eps_max}")
        if not self.gamma_map > 0:
            raise ValueError(f"gamma_map must be positive, got {self.gamma_map}")


DEFAULT_MAPPING = MappingConfig()


@dataclass(frozen=True)
class ChannelOptics:
    eps_r: float
    eta_rel: float  # impedance relative to vacuum
    v_rel: float  # speed relative to c


@dataclass(frozen=True)
class InterfaceCoefficients:
    theta1: float
    theta2: float  # meaningful only when tir is False
    tir: bool
    gamma_perp: float
    t_perp: float
    gamma_par: float
    t_par: float


@dataclass(frozen=True)
class ScatterLobe:
    d: float
    phong_exponent: float
    lambert_weight: float


# --- njit scalar cores (shared with the render kernel) ---------------------


@njit(cache=True, inline="always")
def eps_from_pt(p_t, eps_max, gamma_map):
    return eps_max ** (p_t**gamma_map)


@njit(cache=True, inline="always")
def pt_from_eps(eps_r, eps_max, gamma_map):
    return (math.log(eps_r) / math.log(eps_max)) ** (1.0 / gamma_map)


@njit(cache=True, inline="always")
def fresnel_ratios(cos1, cos2, eta1, eta2):
    """(gamma_perp, t_perp, gamma_par, t_par) from impedances and cosines."""
    dp = eta2 * cos1 + eta1 * cos2
    gp = (eta2 * cos1 - eta1 * cos2) / dp
    tp = 2.0 * eta2 * cos1 / dp
    dq = eta1 * cos1 + eta2 * cos2
    gq = (eta1 * cos1 - eta2 * cos2) / dq
    tq = 2.0 * eta2 * cos1 / dq
    return gp, tp, gq, tq


# --- public operations -----------------------------------------------------


def _check_unit(x, name):
    if not (0.0 <= x <= 1.0):
        raise OutOfRange(name, x)


def transmissivity_to_permittivity(p_t: float, cfg: MappingConfig = DEFAULT_MAPPING) -> float:
    _check_unit(p_t, "p_t")
    return float(eps_from_pt(p_t, cfg.eps_max, cfg.gamma_map))


def permittivity_to_transmissivity(eps_r: float, cfg: MappingConfig = DEFAULT_MAPPING) -> float:
    if not (1.0 <= eps_r <= cfg.eps_max):
        raise OutOfRange("eps_r", eps_r)
    if eps_r == 1.0:
        return 0.0
    return float(pt_from_eps(eps_r, cfg.eps_max, cfg.gamma_map))


def channel_optics(p_t: float, cfg: MappingConfig = DEFAULT_MAPPING) -> ChannelOptics:
    eps_r = transmissivity_to_permittivity(p_t, cfg)
    inv_sqrt = eps_r**-0.5
    return ChannelOptics(eps_r=eps_r, eta_rel=inv_sqrt, v_rel=inv_sqrt)


def reflect_dir(n_i, n) -> np.ndarray:
    """Mirror n_i (unit vector toward the source) about unit normal n."""
    n = np.asarray(n, dtype=np.float64)
    n_i = np.asarray(n_i, dtype=np.float64)
    norm = float(np.linalg.norm(n))
    if abs(norm - 1.0) > 1e-9:
        raise DegenerateNormal(norm)
    return 2.0 * float(np.dot(n_i, n)) * n - n_i


def snell(theta1: float, v1_rel: float, v2_rel: float) -> Optional[float]:
    """Refraction angle, or None on total internal reflection."""
    sin2 = (v2_rel / v1_rel) * math.sin(theta1)
    if sin2 > 1.0:
        return None
    return math.asin(sin2)


def refract_dir(n_i, n, ratio: float) -> Optional[np.ndarray]:
    """Unit transmitted direction for sin(theta2)/sin(theta1) = ratio.

    Built from Snell's angle plus coplanarity with (n_i, n); returns None on
    total internal reflection.  n_i points toward the source, n toward the
    incidence side, the result into medium 2.
    """
    n = np.asarray(n, dtype=np.float64)
    n_i = np.asarray(n_i, dtype=np.float64)
    norm = float(np.linalg.norm(n))
    if abs(norm - 1.0) > 1e-9:
        raise DegenerateNormal(norm)
    cos1 = float(np.dot(n_i, n))
    sin1 = math.sqrt(max(0.0, 1.0 - cos1 * cos1))
    sin2 = ratio * sin1
    if sin2 > 1.0:
        return None
    cos2 = math.sqrt(1.0 - sin2 * sin2)
    return (ratio * cos1 - cos2) * n - ratio * n_i


def fresnel(
    theta1: float, theta2: float, eta1_rel: float, eta2_rel: float
) -> InterfaceCoefficients:
    """Field reflection/transmission ratios for both polarizations."""
    gp, tp, gq, tq = fresnel_ratios(
        math.cos(theta1), math.cos(theta2), eta1_rel, eta2_rel
    )
    return InterfaceCoefficients(
        theta1=theta1,
        theta2=theta2,
        tir=False,
        gamma_perp=gp,
        t_perp=tp,
        gamma_par=gq,
        t_par=tq,
    )


def reflectance_unpolarized(coeffs: InterfaceCoefficients) -> float:
    """Unpolarized power reflectance; callers must set R=1 for TIR inputs."""
    return 0.5 * (coeffs.gamma_perp**2 + coeffs.gamma_par**2)


def attenuation_transmittance(p_a: float, distance: float, voxel_size: float) -> float:
    """Fraction surviving a path of the given length through one medium."""
    _check_unit(p_a, "p_a")
    if distance < 0:
        raise ValueError(f"distance must be nonnegative, got {distance}")
    if not voxel_size > 0:
        raise ValueError(f"voxel_size must be positive, got {voxel_size}")
    if distance == 0.0:
        return 1.0
    return (1.0 - p_a) ** (distance / voxel_size)


def scatter_lobe(d: float) -> ScatterLobe:
    """Lobe parameters: specular delta at d=0, pure Lambertian at d=1."""
    _check_unit(d, "d")
    return ScatterLobe(
        d=d, phong_exponent=PHONG_N_MAX ** (1.0 - d) - 1.0, lambert_weight=d
    )

"""Numerical fluxes ``H(a, b, n)`` across a face with area-weighted normal ``n``.

Every function is vectorized: leading axes of the states and of ``n`` are
face indices.  Euler fluxes take primitive states and return conserved-variable
fluxes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .physics import GasModel, check_primitive, euler_flux, sound_speed


@dataclass
class FluxResult:
    flux: np.ndarray
    # (H+ of the left state, H- of the right state) for split fluxes
    split_parts: tuple | None = None


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def flux_scalar_upwind(a, b, n, model):
    """Upwind flux for linear advection, split into ``(v.n)^+ a`` and ``(v.n)^- b``."""
    vn = _dot(np.asarray(n, dtype=float), np.asarray(model.velocity, dtype=float))
    hp = np.maximum(vn, 0.0) * a
    hm = np.minimum(vn, 0.0) * b
    return FluxResult(hp + hm, (hp, hm))


def flux_godunov_burgers(a, b, n, model):
    """Exact Godunov flux for ``f(u) = (d.n) u^2 / 2``.

    Godunov's flux is monotone but not of the additive ``H+(a) + H-(b)`` form,
    so ``split_parts`` is left empty.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    k = _dot(np.asarray(n, dtype=float), np.asarray(model.direction, dtype=float))
    fa = 0.5 * k * a * a
    fb = 0.5 * k * b * b
    straddle = (np.minimum(a, b) < 0) & (np.maximum(a, b) > 0)
    lo = np.where(straddle, np.minimum(np.minimum(fa, fb), 0.0), np.minimum(fa, fb))
    hi = np.where(straddle, np.maximum(np.maximum(fa, fb), 0.0), np.maximum(fa, fb))
    return FluxResult(np.where(a <= b, lo, hi))


def scalar_numerical_flux(name, a, b, n, model):
    if name in ("upwind", "scalar_upwind"):
        if model.kind != "advection":
            raise ValueError("upwind flux needs the advection model")
        return flux_scalar_upwind(a, b, n, model)
    if name in ("godunov", "godunov_burgers"):
        if model.kind != "burgers":
            raise ValueError("Godunov Burgers flux needs the burgers model")
        return flux_godunov_burgers(a, b, n, model)
    raise ValueError(f"unknown scalar flux {name!r}")


# -- kinetic flux vector splitting ------------------------------------------


def kfvs_half_flux(W, n, gas=GasModel(), sign=+1, area=None):
    """Half-range Maxwellian moment flux ``H^+`` (``sign=+1``) or ``H^-``."""
    W = np.asarray(W, dtype=float)
    n = np.asarray(n, dtype=float)
    if area is None:
        area = np.sqrt(_dot(n, n))
    nh = n / area[..., None]
    rho = W[..., 0]
    vel = W[..., 1:-1]
    p = W[..., -1]
    un = _dot(vel, nh)
    beta = rho / (2.0 * p)
    s = un * np.sqrt(beta)
    A = 0.5 * (1.0 + sign * erf(s))
    B = sign * 0.5 * np.exp(-s * s) / np.sqrt(np.pi * beta)
    E = p / (gas.gamma - 1.0) + 0.5 * rho * _dot(vel, vel)
    mass = rho * (un * A + B)
    mom = (p * A)[..., None] * nh + (rho * (un * A + B))[..., None] * vel
    energy = (E + p) * un * A + (E + 0.5 * p) * B
    out = np.concatenate([mass[..., None], mom, energy[..., None]], axis=-1)
    return out * area[..., None]


def flux_kfvs(WL, WR, n, gas=GasModel()):
    check_primitive(WL, "KFVS left state")
    check_primitive(WR, "KFVS right state")
    n = np.asarray(n, dtype=float)
    area = np.sqrt(_dot(n, n))
    hp = kfvs_half_flux(WL, n, gas, +1, area)
    hm = kfvs_half_flux(WR, n, gas, -1, area)
    return FluxResult(hp + hm, (hp, hm))


# -- Roe ------------------------------------------------------------------------

ENTROPY_FIX = 0.05


def flux_roe(WL, WR, n, gas=GasModel(), entropy_fix=ENTROPY_FIX):
    """Roe flux with Harten's parabolic entropy fix on the acoustic waves.

    The fix replaces ``|lambda|`` by ``(lambda^2 + delta^2) / (2 delta)`` when
    ``|lambda| < delta``, with ``delta = entropy_fix * (a_L + a_R) / 2``.
    """
    WL = np.asarray(WL, dtype=float)
    WR = np.asarray(WR, dtype=float)
    check_primitive(WL, "Roe left state")
    check_primitive(WR, "Roe right state")
    n = np.asarray(n, dtype=float)
    g = gas.gamma
    area = np.linalg.norm(n, axis=-1)
    nh = n / area[..., None]

    rhoL, uL, pL = WL[..., 0], WL[..., 1:-1], WL[..., -1]
    rhoR, uR, pR = WR[..., 0], WR[..., 1:-1], WR[..., -1]
    HL = g / (g - 1.0) * pL / rhoL + 0.5 * _dot(uL, uL)
    HR = g / (g - 1.0) * pR / rhoR + 0.5 * _dot(uR, uR)

    R = np.sqrt(rhoR / rhoL)
    rho = R * rhoL
    u = (uL + R[..., None] * uR) / (1.0 + R)[..., None]
    H = (HL + R * HR) / (1.0 + R)
    a = np.sqrt((g - 1.0) * (H - 0.5 * _dot(u, u)))
    qn = _dot(u, nh)

    drho = rhoR - rhoL
    dp = pR - pL
    du = uR - uL
    dqn = _dot(du, nh)

    lam1 = np.abs(qn - a)
    lam2 = np.abs(qn)
    lam3 = np.abs(qn + a)
    delta = entropy_fix * 0.5 * (sound_speed(WL, gas) + sound_speed(WR, gas))
    with np.errstate(divide="ignore", invalid="ignore"):
        fix1 = (lam1 * lam1 + delta * delta) / (2.0 * delta)
        fix3 = (lam3 * lam3 + delta * delta) / (2.0 * delta)
    lam1 = np.where(lam1 < delta, fix1, lam1)
    lam3 = np.where(lam3 < delta, fix3, lam3)

    w1 = lam1 * (dp - rho * a * dqn) / (2.0 * a * a)
    w2 = lam2 * (drho - dp / (a * a))
    w3 = lam3 * (dp + rho * a * dqn) / (2.0 * a * a)
    shear = du - dqn[..., None] * nh

    diss_mass = w1 + w2 + w3
    diss_mom = (
        w1[..., None] * (u - a[..., None] * nh)
        + w2[..., None] * u
        + w3[..., None] * (u + a[..., None] * nh)
        + (lam2 * rho)[..., None] * shear
    )
    diss_energy = (
        w1 * (H - a * qn)
        + w2 * 0.5 * _dot(u, u)
        + w3 * (H + a * qn)
        + lam2 * rho * (_dot(u, du) - qn * dqn)
    )
    diss = np.concatenate([diss_mass[..., None], diss_mom, diss_energy[..., None]], axis=-1)
    central = 0.5 * (euler_flux(WL, nh, gas) + euler_flux(WR, nh, gas))
    return FluxResult((central - 0.5 * diss) * area[..., None])


def euler_numerical_flux(name, WL, WR, n, gas=GasModel()):
    if name == "roe":
        return flux_roe(WL, WR, n, gas)
    if name == "kfvs":
        return flux_kfvs(WL, WR, n, gas)
    raise ValueError(f"unknown Euler flux {name!r}; valid options: roe, kfvs")

"""PDE models: scalar conservation laws and the compressible Euler equations.

Euler states are numpy arrays whose last axis holds the components

    conserved  U = (rho, rho u_1, ..., rho u_d, E)
    primitive  W = (rho, u_1, ..., u_d, p)

so the same functions work for a single state or for a whole field.
Normals passed to flux functions are area-weighted (``|n|`` = face measure).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PositivityError


@dataclass(frozen=True)
class GasModel:
    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")


@dataclass(frozen=True)
class ScalarModel:
    """Linear advection ``u_t + div(v u) = 0`` or Burgers ``u_t + div(d u^2/2) = 0``."""

    kind: str = "advection"
    velocity: tuple = field(default=(1.0, 0.0))
    # Burgers flux direction
    direction: tuple = field(default=(1.0, 0.0))

    def __post_init__(self):
        if self.kind not in ("advection", "burgers"):
            raise ValueError(f"unknown scalar model {self.kind!r}")
        if not np.all(np.isfinite(self.velocity)) or not np.all(np.isfinite(self.direction)):
            raise ValueError("model vectors must be finite")

    @property
    def dim(self):
        return len(self.velocity if self.kind == "advection" else self.direction)


def primitive(rho, velocity, p):
    """Pack a primitive state array."""
    return np.concatenate(([rho], np.asarray(velocity, dtype=float), [p]))


def _first_bad(mask):
    idx = np.argwhere(mask)
    return tuple(int(i) for i in idx[0]) if len(idx) else None


def cons_to_prim(U, gas=GasModel()):
    U = np.asarray(U, dtype=float)
    rho = U[..., 0]
    mom = U[..., 1:-1]
    E = U[..., -1]
    bad = ~(rho > 0)
    if np.any(bad):
        loc = _first_bad(bad)
        raise PositivityError(
            f"non-positive density {rho[loc] if loc else rho} at {loc}",
            cell=loc[0] if loc else None,
            state=U[loc] if loc else U,
        )
    vel = mom / rho[..., None]
    p = (gas.gamma - 1.0) * (E - 0.5 * np.einsum("...i,...i->...", mom, vel))
    bad = ~(p > 0)
    if np.any(bad):
        loc = _first_bad(bad)
        raise PositivityError(
            f"non-positive pressure {p[loc] if loc else p} at {loc}",
            cell=loc[0] if loc else None,
            state=U[loc] if loc else U,
        )
    return np.concatenate([rho[..., None], vel, p[..., None]], axis=-1)


def check_primitive(W, what="state"):
    W = np.asarray(W, dtype=float)
    bad = ~((W[..., 0] > 0) & (W[..., -1] > 0))
    if np.any(bad):
        loc = _first_bad(bad)
        raise PositivityError(
            f"non-positive density or pressure in {what} at {loc}: {W[loc] if loc else W}",
            cell=loc[0] if loc else None,
            state=W[loc] if loc else W,
        )


def prim_to_cons(W, gas=GasModel()):
    W = np.asarray(W, dtype=float)
    check_primitive(W)
    rho = W[..., 0]
    vel = W[..., 1:-1]
    p = W[..., -1]
    E = p / (gas.gamma - 1.0) + 0.5 * rho * np.einsum("...i,...i->...", vel, vel)
    return np.concatenate([rho[..., None], rho[..., None] * vel, E[..., None]], axis=-1)


def sound_speed(W, gas=GasModel()):
    W = np.asarray(W, dtype=float)
    return np.sqrt(gas.gamma * W[..., -1] / W[..., 0])


def euler_flux(W, n, gas=GasModel()):
    """Physical flux ``F(W) . n``."""
    W = np.asarray(W, dtype=float)
    n = np.asarray(n, dtype=float)
    rho = W[..., 0]
    vel = W[..., 1:-1]
    p = W[..., -1]
    un = np.einsum("...i,...i->...", vel, n)
    E = p / (gas.gamma - 1.0) + 0.5 * rho * np.einsum("...i,...i->...", vel, vel)
    mass = rho * un
    mom = p[..., None] * n + mass[..., None] * vel
    energy = (E + p) * un
    return np.concatenate([mass[..., None], mom, energy[..., None]], axis=-1)


def max_wave_speed(W, n_unit, gas=GasModel()):
    W = np.asarray(W, dtype=float)
    un = np.einsum("...i,...i->...", W[..., 1:-1], np.asarray(n_unit, dtype=float))
    return np.abs(un) + sound_speed(W, gas)


def scalar_flux(u, model):
    """Physical flux vector of a scalar model; trailing axis is space."""
    u = np.asarray(u, dtype=float)
    if model.kind == "advection":
        return u[..., None] * np.asarray(model.velocity, dtype=float)
    return 0.5 * (u * u)[..., None] * np.asarray(model.direction, dtype=float)


def scalar_wave_speed(u, n_unit, model):
    """``|f'(u) . n|`` for a unit normal."""
    n_unit = np.asarray(n_unit, dtype=float)
    if model.kind == "advection":
        return np.abs(n_unit @ np.asarray(model.velocity, dtype=float)) * np.ones_like(u)
    return np.abs(np.asarray(u) * (n_unit @ np.asarray(model.direction, dtype=float)))

"""Face states from cell values and interpolated vertex values.

All functions work on whole arrays of faces at once.  For a face between the
left cell ``i`` and the right cell ``j``:

* ``U_i``, ``U_j`` are the cell values,
* ``V_ij`` is the vertex value of cell ``i`` opposite the face (``V_ji`` for ``j``),
* ``W_ij`` is the mean of the vertex values on the face.

Each may carry trailing component axes (primitive variables of a system);
limiting is applied to every component independently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RECON_SCHEMES = ("first_order", "frink", "upwind", "jameson")

ALPHA = {2: 1.0 / 3.0, 3: 1.0 / 4.0}
BETA = {2: 1.0 / 2.0, 3: 1.0 / 3.0}


@dataclass
class FaceInput:
    U_i: np.ndarray
    U_j: np.ndarray
    V_ij: np.ndarray
    V_ji: np.ndarray
    W_ij: np.ndarray
    # length scale for the Jameson threshold, one per face
    h_face: np.ndarray | None = None

    def __post_init__(self):
        for name in ("U_i", "U_j", "V_ij", "V_ji", "W_ij"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))


@dataclass
class ReconConfig:
    scheme: str = "upwind"
    limited: bool = False
    dim: int = 2
    jameson_q: float = 2.0
    jameson_eps: float = 0.05
    # extra Frink condition |theta dU| <= |U_i - V_ij|; see limited_frink
    frink_cap: bool = True

    def __post_init__(self):
        if self.scheme not in RECON_SCHEMES:
            raise ValueError(f"unknown reconstruction {self.scheme!r}; valid: {', '.join(RECON_SCHEMES)}")
        if self.dim not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.dim}")
        if not 1.0 <= self.jameson_q <= 3.0:
            raise ValueError(f"jameson_q must lie in [1, 3], got {self.jameson_q}")
        if not self.jameson_eps > 0:
            raise ValueError("jameson_eps must be positive")

    @property
    def alpha(self):
        return ALPHA[self.dim]

    @property
    def beta(self):
        return BETA[self.dim]


@dataclass
class FaceStates:
    U_plus: np.ndarray
    U_minus: np.ndarray
    theta_ij: np.ndarray
    theta_ji: np.ndarray


def _unit(x):
    return np.ones_like(np.asarray(x, dtype=float))


def reconstruct_first_order(inp: FaceInput, cfg: ReconConfig | None = None) -> FaceStates:
    return FaceStates(inp.U_i.copy(), inp.U_j.copy(), _unit(inp.U_i), _unit(inp.U_j))


def reconstruct_frink(inp: FaceInput, cfg: ReconConfig) -> FaceStates:
    a = cfg.alpha
    return FaceStates(
        inp.U_i + a * (inp.W_ij - inp.V_ij),
        inp.U_j + a * (inp.W_ij - inp.V_ji),
        _unit(inp.U_i),
        _unit(inp.U_j),
    )


def reconstruct_upwind(inp: FaceInput, cfg: ReconConfig) -> FaceStates:
    b = cfg.beta
    return FaceStates(
        inp.U_i + b * (inp.U_i - inp.V_ij),
        inp.U_j + b * (inp.U_j - inp.V_ji),
        _unit(inp.U_i),
        _unit(inp.U_j),
    )


def jameson_average(a, b, q=2.0, threshold=0.0):
    """Central limited average ``L(a, b) = (a + b)(1 - R) / 2`` and ``R``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    denom = np.maximum(np.abs(a) + np.abs(b), threshold)
    with np.errstate(divide="ignore", invalid="ignore"):
        R = np.abs((a - b) / denom) ** q
    # a = b = 0 with no threshold: nothing to limit
    R = np.where(denom > 0, np.minimum(R, 1.0), 0.0)
    return 0.5 * (a + b) * (1.0 - R), R


def reconstruct_jameson(inp: FaceInput, cfg: ReconConfig) -> FaceStates:
    """Central-limited reconstruction; needs both opposite vertices.

    The increment factor is ``beta_d`` (1/3 on tetrahedra, 1/2 on triangles),
    which keeps the scheme exact for linear data in both dimensions.
    """
    a = inp.U_i - inp.V_ij
    b = inp.V_ji - inp.U_j
    if inp.h_face is None:
        threshold = 0.0
    else:
        h = np.asarray(inp.h_face, dtype=float)
        threshold = cfg.jameson_eps * h**1.5
        threshold = threshold.reshape(threshold.shape + (1,) * (a.ndim - threshold.ndim))
    L, R = jameson_average(a, b, cfg.jameson_q, threshold)
    theta = 1.0 - R
    return FaceStates(inp.U_i + cfg.beta * L, inp.U_j - cfg.beta * L, theta, theta.copy())


def limiter_theta(r):
    """``max(0, min(1, 2/r))``, with ``theta(0) = 1``."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        inv = np.where(r > 0, 2.0 / np.where(r > 0, r, 1.0), 0.0)
    return np.where(r == 0, 1.0, np.clip(inv, 0.0, 1.0))


def _theta(dU, U_self, U_other, gate=None):
    """Limiter factor for the increment ``dU`` added to ``U_self``.

    ``r = dU / ((U_other - U_self) / 2)``.  A flat neighbour difference makes
    ``r`` blow up unless the increment is flat as well.  ``gate`` (where given)
    forces zero.
    """
    diff = U_other - U_self
    tiny = 1e-14 * np.maximum(np.maximum(np.abs(U_self), np.abs(U_other)), 1.0)
    flat = np.abs(diff) < tiny
    # theta(r) with r = 2 dU / diff is clip(diff / dU, 0, 1), and 1 when dU = 0
    zero = dU == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.asarray(np.clip(diff / np.where(zero, 1.0, dU), 0.0, 1.0))
    theta[zero] = 1.0
    theta[flat] = 0.0
    theta[flat & (np.abs(dU) <= tiny)] = 1.0
    if gate is not None:
        theta = np.where(gate, 0.0, theta)
    return theta


def limited_frink(inp: FaceInput, cfg: ReconConfig) -> FaceStates:
    a = cfg.alpha
    d_ij = a * (inp.W_ij - inp.V_ij)
    d_ji = a * (inp.W_ij - inp.V_ji)
    # zero unless U_i lies between its neighbour and its opposite vertex
    gate_ij = (inp.U_j - inp.U_i) * (inp.U_i - inp.V_ij) <= 0
    gate_ji = (inp.U_i - inp.U_j) * (inp.U_j - inp.V_ji) <= 0
    t_ij = _theta(d_ij, inp.U_i, inp.U_j, gate_ij)
    t_ji = _theta(d_ji, inp.U_j, inp.U_i, gate_ji)
    if cfg.frink_cap:
        t_ij = _cap(t_ij, d_ij, inp.U_i - inp.V_ij)
        t_ji = _cap(t_ji, d_ji, inp.U_j - inp.V_ji)
    return FaceStates(inp.U_i + t_ij * d_ij, inp.U_j + t_ji * d_ji, t_ij, t_ji)


def _cap(theta, dU, span):
    """Limit ``theta`` so that ``|theta dU| <= |span|``.

    The gate and ``theta(r)`` make the vertex coefficient of the Frink update
    non-negative, but its size ``theta dU / (U_i - V_ij)`` is unbounded as the
    cell value approaches its opposite vertex value, so no fixed CFL number
    would do.  Capping the ratio at one bounds it by the upwind flux
    derivative.  Linear data gives ratio ``alpha_d / (d alpha_d) = 1/d`` and is
    left alone.
    """
    mag = np.abs(dU)
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = np.where(mag > 0, np.abs(span) / np.where(mag > 0, mag, 1.0), np.inf)
    return np.minimum(theta, bound)


def limited_upwind(inp: FaceInput, cfg: ReconConfig) -> FaceStates:
    b = cfg.beta
    d_ij = b * (inp.U_i - inp.V_ij)
    d_ji = b * (inp.U_j - inp.V_ji)
    t_ij = _theta(d_ij, inp.U_i, inp.U_j)
    t_ji = _theta(d_ji, inp.U_j, inp.U_i)
    return FaceStates(inp.U_i + t_ij * d_ij, inp.U_j + t_ji * d_ji, t_ij, t_ji)


def reconstruct(inp: FaceInput, cfg: ReconConfig) -> FaceStates:
    """Dispatch on ``cfg.scheme`` and ``cfg.limited``."""
    if cfg.scheme == "first_order":
        return reconstruct_first_order(inp, cfg)
    if cfg.scheme == "jameson":
        return reconstruct_jameson(inp, cfg)
    if cfg.scheme == "frink":
        return limited_frink(inp, cfg) if cfg.limited else reconstruct_frink(inp, cfg)
    return limited_upwind(inp, cfg) if cfg.limited else reconstruct_upwind(inp, cfg)


def reconstruct_one_sided(U_i, V_ij, W_ij, cfg: ReconConfig):
    """Left state of a boundary face.

    Unlimited Frink and upwind use their usual formula; limited schemes and
    Jameson (which needs the missing neighbour) drop to first order.
    """
    U_i = np.asarray(U_i, dtype=float)
    if cfg.scheme == "frink" and not cfg.limited:
        return U_i + cfg.alpha * (np.asarray(W_ij) - V_ij)
    if cfg.scheme == "upwind" and not cfg.limited:
        return U_i + cfg.beta * (U_i - V_ij)
    return U_i.copy()

"""Secondary-structure distributions induced from backbone dihedrals.

Three isotropic Gaussian kernels on the Ramachandran torus (helix,
strand, coil) give an SS3 distribution; a fixed split expands SS3 into
SS8 ordered [H,G,I,E,B,T,S,L].
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ValidationError
from .geometry import wrap


@dataclass(frozen=True)
class RamaConfig:
    """Kernel centres as (phi, psi) in degrees, in H, E, C order."""

    centers: tuple = ((-60.0, -45.0), (-120.0, 130.0), (0.0, 0.0))
    sigma: float = 40.0

    def __post_init__(self):
        if len(self.centers) != 3:
            raise ConfigError("exactly three kernel centres (H, E, C) are required")
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ConfigError("sigma must be positive")


DEFAULT_RAMA = RamaConfig()

# Rows: H, E, C.  Columns: H, G, I, E, B, T, S, L.
SS8_SPLIT = np.array(
    [
        [0.8, 0.1, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.9, 0.1, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 1 / 3, 1 / 3, 1 / 3],
    ]
)
SS8_GROUP = np.array([0, 0, 0, 1, 1, 2, 2, 2])


def induce_ss3(phi_hat, psi_hat, cfg=DEFAULT_RAMA):
    """SS3 probabilities (H, E, C) for one or many residues.

    Angles are radians.  Differences to each centre are wrapped onto
    (-pi, pi] and evaluated in degrees.  Residues with a non-finite angle
    get a row of NaN, which downstream code treats as masked.

    Returns
    -------
    ndarray, shape (3,) for scalar input or (L, 3) for arrays.
    """
    phi = np.atleast_1d(np.asarray(phi_hat, dtype=float))
    psi = np.atleast_1d(np.asarray(psi_hat, dtype=float))
    phi, psi = np.broadcast_arrays(phi, psi)
    out = np.full(phi.shape + (3,), np.nan)
    ok = np.isfinite(phi) & np.isfinite(psi)
    if np.any(ok):
        two_s2 = 2.0 * cfg.sigma**2
        scores = np.empty((int(ok.sum()), 3))
        for k, (c_phi, c_psi) in enumerate(cfg.centers):
            d_phi = np.degrees(wrap(phi[ok] - math.radians(c_phi)))
            d_psi = np.degrees(wrap(psi[ok] - math.radians(c_psi)))
            scores[:, k] = np.exp(-(d_phi**2 + d_psi**2) / two_s2)
        out[ok] = scores / scores.sum(axis=1, keepdims=True)
    if np.ndim(phi_hat) == 0 and np.ndim(psi_hat) == 0:
        return out[0]
    return out


def expand_ss8(p3, tol=1e-9):
    """Split SS3 mass into SS8: H->(H,G,I), E->(E,B), C->(T,S,L).

    Accepts one distribution or an (L, 3) stack.  Rows of NaN pass
    through as NaN rows.
    """
    p = np.asarray(p3, dtype=float)
    single = p.ndim == 1
    p = np.atleast_2d(p)
    if p.shape[-1] != 3:
        raise ValidationError(f"expected SS3 vectors, got trailing size {p.shape[-1]}")
    finite = np.all(np.isfinite(p), axis=1)
    if np.any(np.abs(p[finite].sum(axis=1) - 1.0) > tol):
        raise ValidationError("SS3 distribution does not sum to 1")
    out = p @ SS8_SPLIT
    return out[0] if single else out


def marginalize_ss8(p8):
    """Collapse SS8 back to SS3 via {H,G,I}->H, {E,B}->E, {T,S,L}->C."""
    p = np.asarray(p8, dtype=float)
    out = np.zeros(p.shape[:-1] + (3,))
    for j, g in enumerate(SS8_GROUP):
        out[..., g] += p[..., j]
    return out

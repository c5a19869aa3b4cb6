"""Vector geometry on C-alpha backbones.

Torsions, angle wrapping, virtual (C-alpha only) dihedrals and
Kabsch-superposed RMSD.  Everything here is a pure function of its
inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTorsionError, InvalidAngleError, ShapeError, ValidationError

AMINO_ACIDS = "ACDEFGHIKLMNPQRSTVWY"

TWO_PI = 2.0 * math.pi

# Projected vectors shorter than this are treated as collinear.
DEGENERACY_TOL = 1e-9


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Conformation:
    """C-alpha backbone of one fragment together with its raw energy.

    Parameters
    ----------
    id : str
        Candidate identifier.
    sequence : str
        One-letter residue codes, one per C-alpha.
    coords : array_like, shape (L, 3)
        C-alpha positions in angstroms.
    energy_q : float
        Raw (dimensionless) energy reported by the candidate generator.
    """

    id: str
    sequence: str
    coords: np.ndarray = field(repr=False)
    energy_q: float = 0.0

    def __post_init__(self):
        coords = _frozen(self.coords)
        if coords.ndim != 2 or coords.shape[1] != 3:
            raise ShapeError(f"coords must have shape (L, 3), got {coords.shape}")
        if len(coords) < 1:
            raise ShapeError("conformation needs at least one residue")
        if len(self.sequence) != len(coords):
            raise ShapeError(
                f"sequence length {len(self.sequence)} != coordinate count {len(coords)}"
            )
        for pos, aa in enumerate(self.sequence, start=1):
            if aa not in AMINO_ACIDS:
                raise ValidationError(f"unknown residue code {aa!r} at position {pos}")
        if not np.all(np.isfinite(coords)):
            raise ValidationError("coordinates must be finite")
        if not math.isfinite(self.energy_q):
            raise ValidationError("energy_q must be finite")
        if len(coords) > 1:
            bonds = np.linalg.norm(np.diff(coords, axis=0), axis=1)
            if np.any(bonds <= 0.0):
                i = int(np.argmin(bonds)) + 1
                raise ValidationError(f"residues {i} and {i + 1} coincide")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "energy_q", float(self.energy_q))

    def __len__(self):
        return len(self.sequence)

    @property
    def residues(self):
        return list(zip(self.sequence, (tuple(p) for p in self.coords)))

    def with_energy(self, energy_q):
        return Conformation(self.id, self.sequence, self.coords, energy_q)


@dataclass(frozen=True)
class DihedralTrace:
    """Per-residue virtual phi/psi in radians.

    Masked entries hold NaN.  ``phi_mask`` and ``psi_mask`` are tracked
    separately; ``mask`` is true only where both torsions exist.
    """

    phi: np.ndarray
    psi: np.ndarray
    phi_mask: np.ndarray
    psi_mask: np.ndarray

    def __post_init__(self):
        for name in ("phi", "psi"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        for name in ("phi_mask", "psi_mask"):
            object.__setattr__(self, name, _frozen(getattr(self, name), bool))

    @property
    def mask(self):
        return self.phi_mask & self.psi_mask

    def __len__(self):
        return len(self.phi)


def wrap(angle):
    """Map an angle (radians) into the half-open interval (-pi, pi].

    Works on scalars and arrays.  The reduction uses ``fmod`` followed by
    at most one exact shift, so ``wrap(wrap(x)) == wrap(x)`` bit for bit.
    """
    a = np.asarray(angle, dtype=float)
    if not np.all(np.isfinite(a)):
        raise InvalidAngleError("cannot wrap a non-finite angle")
    r = np.fmod(a, TWO_PI)
    r = np.where(r > math.pi, r - TWO_PI, r)
    r = np.where(r <= -math.pi, r + TWO_PI, r)
    if r.ndim == 0:
        return float(r)
    return r


def dihedral(p0, p1, p2, p3):
    """Signed torsion angle of four points, in (-pi, pi].

    Raises
    ------
    DegenerateTorsionError
        If the central bond is shorter than ``DEGENERACY_TOL`` or either
        outer bond is (anti)parallel to it.
    """
    p0, p1, p2, p3 = (np.asarray(p, dtype=float) for p in (p0, p1, p2, p3))
    b0 = p1 - p0
    b1 = p2 - p1
    b2 = p3 - p2
    n1 = np.linalg.norm(b1)
    if n1 < DEGENERACY_TOL:
        raise DegenerateTorsionError("central bond has zero length")
    b1 = b1 / n1
    v = b0 - np.dot(b0, b1) * b1
    w = b2 - np.dot(b2, b1) * b1
    if np.linalg.norm(v) < DEGENERACY_TOL or np.linalg.norm(w) < DEGENERACY_TOL:
        raise DegenerateTorsionError("collinear points")
    x = np.dot(v, w)
    y = np.dot(np.cross(b1, v), w)
    # atan2 may return -pi exactly; fold it onto +pi.
    return wrap(math.atan2(y, x))


def _coords_of(c):
    if isinstance(c, Conformation):
        return c.coords
    a = np.asarray(c, dtype=float)
    if a.ndim != 2 or a.shape[1] != 3:
        raise ShapeError(f"expected an (L, 3) coordinate array, got {a.shape}")
    return a


def virtual_dihedrals(c):
    """Virtual phi/psi from C-alpha positions.

    For residue ``i`` (0-based here) phi uses C-alpha ``i-2 .. i+1`` and
    psi uses ``i-1 .. i+2``.  Residues whose window falls off the chain,
    or whose torsion is degenerate, are masked.  Never raises on
    degenerate geometry.
    """
    x = _coords_of(c)
    n = len(x)
    phi = np.full(n, np.nan)
    psi = np.full(n, np.nan)
    for i in range(n):
        if i >= 2 and i + 1 < n:
            try:
                phi[i] = dihedral(x[i - 2], x[i - 1], x[i], x[i + 1])
            except DegenerateTorsionError:
                pass
        if i >= 1 and i + 2 < n:
            try:
                psi[i] = dihedral(x[i - 1], x[i], x[i + 1], x[i + 2])
            except DegenerateTorsionError:
                pass
    return DihedralTrace(phi, psi, np.isfinite(phi), np.isfinite(psi))


def kabsch_rotation(mobile, target):
    """Proper rotation ``R`` minimising ``|mobile @ R.T - target|`` for centred inputs."""
    h = mobile.T @ target
    u, _, vt = np.linalg.svd(h)
    d = np.sign(np.linalg.det(vt.T @ u.T))
    if d == 0:
        d = 1.0
    return vt.T @ np.diag([1.0, 1.0, d]) @ u.T


def kabsch_rmsd(a, b):
    """C-alpha RMSD after optimal rigid superposition (no reflection).

    Parameters
    ----------
    a, b : Conformation or array_like, shape (L, 3)

    Returns
    -------
    float
        RMSD in angstroms.
    """
    x = _coords_of(a)
    y = _coords_of(b)
    if x.shape != y.shape:
        raise ShapeError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 1:
        raise ShapeError("need at least one point")
    if np.array_equal(x, y):
        return 0.0
    xc = x - x.mean(axis=0)
    yc = y - y.mean(axis=0)
    r = kabsch_rotation(xc, yc)
    diff = xc @ r.T - yc
    return float(math.sqrt(max(np.sum(diff * diff) / len(x), 0.0)))

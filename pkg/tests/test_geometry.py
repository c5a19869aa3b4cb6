import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from fusionrank.errors import DegenerateTorsionError, InvalidAngleError, ShapeError, ValidationError
from fusionrank.geometry import Conformation, dihedral, kabsch_rmsd, virtual_dihedrals, wrap

from conftest import finite_angles, make_conf, random_rotations


# ---------------------------------------------------------------- wrap


@pytest.mark.parametrize(
    "x, expected",
    [(3 * math.pi / 2, -math.pi / 2), (math.pi, math.pi), (-math.pi, math.pi), (0.0, 0.0),
     (2 * math.pi, 0.0), (-3 * math.pi, math.pi)],
)
def test_wrap_examples(x, expected):
    assert wrap(x) == pytest.approx(expected, abs=1e-12)


@given(finite_angles)
def test_wrap_range_and_congruence(x):
    y = wrap(x)
    assert -math.pi < y <= math.pi
    k = (x - y) / (2 * math.pi)
    assert abs(k - round(k)) < 1e-9 * max(1.0, abs(x))


@given(finite_angles)
def test_wrap_idempotent(x):
    assert wrap(wrap(x)) == wrap(x)


def test_wrap_array_and_nonfinite():
    out = wrap(np.array([0.0, 4.0, -4.0]))
    assert out.shape == (3,)
    for bad in (math.nan, math.inf, -math.inf):
        with pytest.raises(InvalidAngleError):
            wrap(bad)


# ---------------------------------------------------------------- dihedral


def test_dihedral_examples():
    # b0 = p1 - p0 as written, so the cis arrangement lands on pi.
    assert dihedral((1, 1, 0), (0, 1, 0), (0, 0, 0), (1, 0, 0)) == math.pi
    assert dihedral((0, 0, 1), (0, 0, 0), (1, 0, 0), (1, 1, 0)) == pytest.approx(math.pi / 2)
    assert dihedral((0, 0, 1), (0, 0, 0), (1, 0, 0), (1, -1, 0)) == pytest.approx(-math.pi / 2)


def test_dihedral_trans_is_zero():
    assert dihedral((0, 1, 0), (0, 0, 0), (1, 0, 0), (1, -1, 0)) == pytest.approx(0.0, abs=1e-12)


def test_dihedral_degenerate():
    with pytest.raises(DegenerateTorsionError):
        dihedral((0, 0, 0), (1, 0, 0), (1, 0, 0), (2, 1, 0))
    with pytest.raises(DegenerateTorsionError):
        dihedral((0, 0, 0), (1, 0, 0), (2, 0, 0), (2, 1, 0))


def _random_quad(rng):
    while True:
        p = rng.normal(size=(4, 3)) * 3
        try:
            dihedral(*p)
        except DegenerateTorsionError:
            continue
        return p


def test_dihedral_rigid_motion_invariance(rng):
    p = _random_quad(rng)
    ref = dihedral(*p)
    for r in random_rotations(1000, seed=7):
        t = rng.normal(size=3) * 50
        q = p @ r.T + t
        assert abs(wrap(dihedral(*q) - ref)) < 1e-9


@settings(max_examples=200)
@given(st.integers(0, 2**32 - 1))
def test_dihedral_reflection_flips_sign(seed):
    p = _random_quad(np.random.default_rng(seed))
    ref = dihedral(*p)
    mirrored = p * np.array([1.0, 1.0, -1.0])
    out = dihedral(*mirrored)
    if abs(abs(ref) - math.pi) < 1e-12:
        assert abs(abs(out) - math.pi) < 1e-9
    else:
        assert out == pytest.approx(-ref, abs=1e-9)


def test_dihedral_matches_textbook_formula(rng):
    # Independent route: IUPAC angle between plane normals, sign from b1,
    # shifted by pi for the b0 = p1 - p0 orientation.
    for _ in range(200):
        p0, p1, p2, p3 = _random_quad(rng)
        b0, b1, b2 = p1 - p0, p2 - p1, p3 - p2
        n1, n2 = np.cross(b0, b1), np.cross(b1, b2)
        ang = math.acos(np.clip(n1 @ n2 / np.linalg.norm(n1) / np.linalg.norm(n2), -1, 1))
        sign = 1.0 if np.cross(n1, n2) @ b1 >= 0 else -1.0
        assert abs(wrap(dihedral(p0, p1, p2, p3) - sign * ang - math.pi)) < 1e-7


# ---------------------------------------------------------------- virtual dihedrals


def test_virtual_dihedrals_l4_windows():
    c = make_conf([(0, 0, 0), (1, 0, 0), (1, 1, 0), (1, 1, 1)])
    tr = virtual_dihedrals(c)
    assert list(tr.phi_mask) == [False, False, True, False]
    assert list(tr.psi_mask) == [False, True, False, False]
    assert not tr.mask.any()


def test_virtual_dihedrals_straight_chain_fully_masked():
    c = make_conf([(3.8 * i, 0, 0) for i in range(8)])
    tr = virtual_dihedrals(c)
    assert not tr.phi_mask.any() and not tr.psi_mask.any()
    assert np.isnan(tr.phi).all() and np.isnan(tr.psi).all()


def test_staircase_constant_torsion():
    steps = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    pts = [np.zeros(3)]
    for k in range(7):
        pts.append(pts[-1] + steps[k % 3])
    x = np.array(pts)
    # Direct evaluation of atan2((b1_hat x v) . w, v . w) on one quadruple.
    b0, b1, b2 = x[1] - x[0], x[2] - x[1], x[3] - x[2]
    b1h = b1 / np.linalg.norm(b1)
    v = b0 - (b0 @ b1h) * b1h
    w = b2 - (b2 @ b1h) * b1h
    expected = math.atan2(np.cross(b1h, v) @ w, v @ w)
    assert abs(expected) == pytest.approx(math.pi / 2)
    tr = virtual_dihedrals(make_conf(x))
    vals = np.concatenate([tr.phi[tr.phi_mask], tr.psi[tr.psi_mask]])
    assert len(vals) == 10
    assert np.allclose(vals, expected, atol=1e-12)
    assert tr.mask.sum() == 4


@settings(max_examples=100)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_virtual_dihedral_mask_count(n, seed):
    x = np.random.default_rng(seed).normal(size=(n, 3))
    tr = virtual_dihedrals(x)
    assert tr.mask.sum() <= max(0, n - 3)
    assert not tr.mask[:2].any() and not tr.mask[-2:].any()
    assert np.all(np.isnan(tr.phi[~tr.phi_mask]))
    assert np.all((tr.phi[tr.phi_mask] > -math.pi) & (tr.phi[tr.phi_mask] <= math.pi))


# ---------------------------------------------------------------- conformation


def test_conformation_validation():
    with pytest.raises(ValidationError):
        make_conf([(0, 0, 0), (0, 0, 0)])
    with pytest.raises(ShapeError):
        Conformation("x", "AA", np.zeros((2, 2)), 0.0)
    with pytest.raises(ValidationError):
        Conformation("x", "AB", np.array([[0, 0, 0], [1, 0, 0.0]]), 0.0)
    with pytest.raises(ValidationError):
        Conformation("x", "AA", np.array([[0, 0, 0], [1, 0, 0.0]]), math.nan)
    c = make_conf([(0, 0, 0), (1, 0, 0)])
    with pytest.raises(ValueError):
        c.coords[0, 0] = 5.0


# ---------------------------------------------------------------- kabsch


def test_kabsch_identity_and_rigid_copy(rng):
    a = rng.normal(size=(10, 3)) * 5
    assert kabsch_rmsd(a, a) == 0.0
    for r in random_rotations(50, seed=3):
        b = a @ r.T + rng.normal(size=3) * 20
        assert kabsch_rmsd(a, b) < 1e-9


def test_kabsch_rejects_reflection():
    a = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1.0]])
    mirror = a * np.array([1, 1, -1])
    assert kabsch_rmsd(a, mirror) > 0.1


def test_kabsch_shape_error():
    with pytest.raises(ShapeError):
        kabsch_rmsd(np.zeros((3, 3)), np.zeros((4, 3)))


def _grid_rmsd(a, b, n_angle=36):
    """Brute-force minimum over an axis-angle rotation grid, translation by centroids."""
    a0 = a - a.mean(0)
    b0 = b - b.mean(0)
    best = math.inf
    axes = Rotation.random(400, random_state=0).apply([0, 0, 1])
    angles = np.linspace(-math.pi, math.pi, n_angle, endpoint=False)
    for ax in axes:
        rots = Rotation.from_rotvec(np.outer(angles, ax)).as_matrix()
        moved = np.einsum("kij,nj->kni", rots, a0)
        d = np.sqrt(((moved - b0) ** 2).sum(-1).mean(-1)).min()
        best = min(best, d)
    best = min(best, math.sqrt(((a0 - b0) ** 2).sum(-1).mean()))
    return best


def test_kabsch_single_displaced_atom_oracle():
    a = np.array([[0, 0, 0], [1.5, 0, 0], [0.3, 2.1, 0], [0.7, 0.4, 1.8]])
    n = len(a)
    u = a[3] - a.mean(0)
    b = a.copy()
    b[3] += u / np.linalg.norm(u)
    got = kabsch_rmsd(a, b)
    grid = _grid_rmsd(a, b)
    # The grid is an upper bound; the identity rotation is on it and is optimal.
    assert got <= grid + 1e-12
    assert grid - got < 1e-9
    # Translation refit spreads the 1 A displacement over all atoms.
    assert got == pytest.approx(math.sqrt(n - 1) / n, abs=1e-12)
    assert got < 1 / math.sqrt(n)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 15), st.integers(0, 2**32 - 1))
def test_kabsch_symmetric_nonnegative(n, seed):
    r = np.random.default_rng(seed)
    a, b = r.normal(size=(n, 3)), r.normal(size=(n, 3))
    ab, ba = kabsch_rmsd(a, b), kabsch_rmsd(b, a)
    assert ab >= 0
    assert ab == pytest.approx(ba, abs=1e-9)


def test_kabsch_never_worse_than_random_rotations(rng):
    a = rng.normal(size=(6, 3))
    b = rng.normal(size=(6, 3))
    got = kabsch_rmsd(a, b)
    a0, b0 = a - a.mean(0), b - b.mean(0)
    for r in random_rotations(2000, seed=11):
        assert got <= math.sqrt(((a0 @ r.T - b0) ** 2).sum(-1).mean()) + 1e-12


def test_kabsch_accepts_conformations():
    pts = list(itertools.product([0, 1], repeat=3))[:5]
    a = make_conf(np.array(pts, dtype=float) * 3.8 + [0, 0, 0])
    assert kabsch_rmsd(a, a) == 0.0

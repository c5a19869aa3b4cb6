"""Classical lattice stand-in for the candidate generator.

A fragment is a self-avoiding-ish walk on the cubic lattice encoded as a
string of relative moves.  The first bond points along +x; every later
bond is one of five turns relative to the current local frame
(forward, up, down, left, right), so the walk can never step straight
back.  The energy mirrors the four-part decomposition

    H = H_geom + H_steric + H_int + H_misc

with H_int a Miyazawa-Jernigan contact sum, H_steric an overlap
penalty, H_geom a bond-integrity penalty (zero for decoded chains) and
H_misc fixed to zero.
"""
from __future__ import annotations

import itertools
from collections import Counter
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from .errors import ConfigError, DomainError, SizeError, ValidationError
from .geometry import AMINO_ACIDS, Conformation

MOVES = "FUDLR"
BOND_LENGTH = 3.8
MAX_EXHAUSTIVE_LENGTH = 10
LATTICE_TOL = 1e-6

# Columns of each matrix are the new (forward, up, side) axes written in
# the old local frame, with side = forward x up.
_TURNS = {
    "F": ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    "U": ((0, 1, 0), (-1, 0, 0), (0, 0, 1)),
    "D": ((0, -1, 0), (1, 0, 0), (0, 0, 1)),
    "L": ((0, 0, -1), (0, 1, 0), (1, 0, 0)),
    "R": ((0, 0, 1), (0, 1, 0), (-1, 0, 0)),
}
TURN_MATRICES = np.array([np.array(_TURNS[m]).T for m in MOVES], dtype=np.int64)
_MOVE_INDEX = {m: k for k, m in enumerate(MOVES)}
_ALTERNATIVES = {m: MOVES.replace(m, "") for m in MOVES}

# Proper rotations about +x; they fix the first bond.
_X_ROTATIONS = np.array(
    [
        [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[1, 0, 0], [0, 0, -1], [0, 1, 0]],
        [[1, 0, 0], [0, -1, 0], [0, 0, -1]],
        [[1, 0, 0], [0, 0, 1], [0, -1, 0]],
    ],
    dtype=np.int64,
)


@lru_cache(maxsize=1)
def load_mj_matrix():
    """The 20x20 Miyazawa-Jernigan contact table, symmetric, indexed by ``AMINO_ACIDS``."""
    text = resources.files("fusionrank").joinpath("data/mj1996.txt").read_text()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    order = lines[0].split()
    upper = np.array([[float(x) for x in ln.split()] for ln in lines[1:]])
    full = np.triu(upper) + np.triu(upper, 1).T
    perm = [order.index(a) for a in AMINO_ACIDS]
    m = full[np.ix_(perm, perm)]
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class SurrogateEnergyModel:
    """Lattice energy parameters.

    ``lambda_steric=None`` means ``1e3 * max|MJ| * L**2`` for a chain of
    length ``L``.
    """

    contact_matrix: np.ndarray = field(default_factory=load_mj_matrix, repr=False)
    lambda_steric: float | None = None
    bond_length: float = BOND_LENGTH

    def __post_init__(self):
        m = np.array(self.contact_matrix, dtype=float)
        if m.shape != (20, 20):
            raise ConfigError("contact matrix must be 20x20")
        if not np.allclose(m, m.T, rtol=0, atol=0):
            raise ConfigError("contact matrix must be symmetric")
        m.setflags(write=False)
        object.__setattr__(self, "contact_matrix", m)
        if not self.bond_length > 0:
            raise ConfigError("bond_length must be positive")

    @property
    def max_abs_contact(self):
        return float(np.max(np.abs(self.contact_matrix)))

    def steric_weight(self, length):
        bound = self.max_abs_contact * length**2
        lam = 1e3 * bound if self.lambda_steric is None else float(self.lambda_steric)
        if not lam > bound:
            raise ConfigError(
                f"lambda_steric={lam} must exceed max|MJ| * L^2 = {bound} for L={length}"
            )
        return lam


@dataclass(frozen=True)
class CandidateSet:
    """Low-energy conformations sorted by ascending energy."""

    conformations: tuple
    moves: tuple
    energies: tuple
    method: str
    seed: int | None = None
    trace: tuple = ()

    def __len__(self):
        return len(self.conformations)

    def __iter__(self):
        return iter(self.conformations)


def validate_sequence(seq):
    seq = str(seq).upper()
    for pos, aa in enumerate(seq, start=1):
        if aa not in AMINO_ACIDS:
            raise ValidationError(f"invalid residue letter {aa!r} at position {pos}")
    return seq


def _check_moves(moves):
    for k, m in enumerate(moves, start=1):
        if m not in _MOVE_INDEX:
            raise ValidationError(f"invalid move {m!r} at position {k}; alphabet is {MOVES}")


def decode_lattice(moves):
    """Integer lattice positions, shape (len(moves) + 2, 3)."""
    _check_moves(moves)
    pos = np.zeros((len(moves) + 2, 3), dtype=np.int64)
    pos[1] = (1, 0, 0)
    frame = np.eye(3, dtype=np.int64)
    for k, m in enumerate(moves):
        frame = frame @ TURN_MATRICES[_MOVE_INDEX[m]]
        pos[k + 2] = pos[k + 1] + frame[:, 0]
    return pos


def decode(moves, bond_length=BOND_LENGTH):
    """C-alpha coordinates (angstroms) for a move string.

    Residue 1 sits at the origin and residue 2 at ``(bond_length, 0, 0)``.
    Overlaps are allowed here; the energy penalises them.
    """
    return decode_lattice(moves).astype(float) * bond_length


def _decode_batch(move_idx):
    n, k = move_idx.shape
    pos = np.zeros((n, k + 2, 3), dtype=np.int64)
    pos[:, 1, 0] = 1
    frame = np.broadcast_to(np.eye(3, dtype=np.int64), (n, 3, 3))
    for j in range(k):
        frame = np.einsum("nij,njk->nik", frame, TURN_MATRICES[move_idx[:, j]])
        pos[:, j + 2] = pos[:, j + 1] + frame[:, :, 0]
    return pos


def _pair_tables(seq, model):
    n = len(seq)
    ii, jj = np.triu_indices(n, k=1)
    idx = np.array([AMINO_ACIDS.index(a) for a in seq])
    contact_ok = (jj - ii) >= 3
    mj = model.contact_matrix[idx[ii], idx[jj]]
    return ii, jj, contact_ok, mj


def _lattice_energy(pos, seq, model):
    """Energies for a batch of integer walks, shape (N, L, 3) -> (N,), plus overlap counts."""
    ii, jj, contact_ok, mj = _pair_tables(seq, model)
    lam = model.steric_weight(len(seq))
    d2 = np.sum((pos[:, ii] - pos[:, jj]) ** 2, axis=2)
    contacts = (d2 == 1) & contact_ok
    overlaps = np.sum(d2 == 0, axis=1)
    bonds = np.sum((pos[:, 1:] - pos[:, :-1]) ** 2, axis=2)
    broken = np.sum(bonds != 1, axis=1)
    e_int = contacts.astype(float) @ mj
    # Attractive contacts are not credited to sterically invalid chains,
    # which keeps every overlapping chain at or above lambda_steric.
    e_int = np.where(overlaps > 0, np.maximum(e_int, 0.0), e_int)
    e_steric = lam * overlaps
    e_geom = lam * broken
    return e_int + e_steric + e_geom, overlaps


def _walk(moves):
    """Lattice sites of a move string as tuples (pure Python, for the annealer)."""
    d, u, s = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    p = (1, 0, 0)
    sites = [(0, 0, 0), p]
    for m in moves:
        if m == "U":
            d, u = u, (-d[0], -d[1], -d[2])
        elif m == "D":
            d, u = (-u[0], -u[1], -u[2]), d
        elif m == "L":
            d, s = (-s[0], -s[1], -s[2]), d
        elif m == "R":
            d, s = s, (-d[0], -d[1], -d[2])
        p = (p[0] + d[0], p[1] + d[1], p[2] + d[2])
        sites.append(p)
    return sites


def _scalar_energy(seq, model):
    """Return ``f(moves) -> (energy, overlaps)`` matching :func:`_lattice_energy` for decoded walks."""
    n = len(seq)
    lam = model.steric_weight(n)
    idx = [AMINO_ACIDS.index(a) for a in seq]
    pairs = [
        (i, j, float(model.contact_matrix[idx[i], idx[j]]))
        for i in range(n)
        for j in range(i + 3, n)
    ]

    def f(moves):
        sites = _walk(moves)
        overlaps = 0
        if len(set(sites)) < n:
            overlaps = sum(k * (k - 1) // 2 for k in Counter(sites).values())
        e_int = 0.0
        for i, j, e in pairs:
            p, q = sites[i], sites[j]
            if abs(p[0] - q[0]) + abs(p[1] - q[1]) + abs(p[2] - q[2]) == 1:
                e_int += e
        if overlaps:
            e_int = max(e_int, 0.0)
        return e_int + lam * overlaps, overlaps

    return f


def to_lattice(c, bond_length=BOND_LENGTH):
    x = np.asarray(c.coords if isinstance(c, Conformation) else c, dtype=float) / bond_length
    r = np.rint(x)
    if np.max(np.abs(x - r), initial=0.0) > LATTICE_TOL:
        raise DomainError("conformation is not on the cubic lattice")
    return r.astype(np.int64)


def energy(c, model=None):
    """Surrogate energy of an on-lattice conformation.

    Sum of MJ contact energies over non-bonded pairs (``|i - j| >= 3``) at
    unit lattice distance, plus ``lambda_steric`` per coinciding pair and
    per bond that is not a single lattice step.

    Raises
    ------
    DomainError
        Coordinates are not integer multiples of the bond length.
    """
    model = model or SurrogateEnergyModel()
    pos = to_lattice(c, model.bond_length)
    e, _ = _lattice_energy(pos[None], c.sequence, model)
    return float(e[0])


def _distinct_key(pos):
    keys = [tuple((pos @ r.T).ravel()) for r in _X_ROTATIONS]
    return min(keys)


def _make_set(seq, model, picks, method, seed=None, trace=()):
    confs, moves, energies = [], [], []
    for rank, (e, m) in enumerate(picks, start=1):
        coords = decode(m, model.bond_length)
        confs.append(Conformation(f"{method}_{rank:03d}", seq, coords, e))
        moves.append(m)
        energies.append(e)
    return CandidateSet(tuple(confs), tuple(moves), tuple(energies), method, seed, tuple(trace))


def _select(states, top_n, distinct, lattice=decode_lattice):
    """Pick ``top_n`` of ``(energy, moves)`` pairs sorted by (energy, moves).

    ``lattice(moves)`` supplies integer positions for the distinctness
    check and is only called on entries that are inspected.
    """
    picks, seen = [], set()
    for e, m in sorted(states):
        if distinct:
            key = _distinct_key(lattice(m))
            if key in seen:
                continue
            seen.add(key)
        picks.append((e, m))
        if len(picks) == top_n:
            break
    return picks


def enumerate_exhaustive(seq, model=None, top_n=5, distinct=False, max_length=MAX_EXHAUSTIVE_LENGTH):
    """Score every move string and return the ``top_n`` best overlap-free chains.

    Ties are broken lexicographically by move string.  With
    ``distinct=True`` chains identical up to a rotation about the first
    bond are reported once (mirror images stay distinct).

    Raises
    ------
    SizeError
        ``len(seq) > max_length``; use :func:`anneal` instead.
    """
    seq = validate_sequence(seq)
    model = model or SurrogateEnergyModel()
    n = len(seq)
    if n < 2:
        raise SizeError("need at least two residues")
    if n > max_length:
        raise SizeError(
            f"exhaustive enumeration is limited to L <= {max_length} (got {n}); use anneal"
        )
    k = n - 2
    if k == 0:
        return _make_set(seq, model, [(0.0, "")], "exhaustive")
    idx = np.array(list(itertools.product(range(len(MOVES)), repeat=k)), dtype=np.int64)
    pos = _decode_batch(idx)
    e, overlaps = _lattice_energy(pos, seq, model)
    ok = np.flatnonzero(overlaps == 0)
    strings = ["".join(MOVES[j] for j in row) for row in idx[ok]]
    lookup = dict(zip(strings, ok))
    states = [(float(e[i]), m) for m, i in lookup.items()]
    picks = _select(states, top_n, distinct, lambda m: pos[lookup[m]])
    return _make_set(seq, model, picks, "exhaustive")


def ground_energy(seq, model=None):
    """Exhaustive minimum over overlap-free chains."""
    return enumerate_exhaustive(seq, model, top_n=1).energies[0]


@dataclass(frozen=True)
class Schedule:
    """Geometric cooling from ``t_start`` to ``t_end`` over ``steps`` proposals."""

    t_start: float = 5.0
    t_end: float = 0.1
    steps: int = 15000

    def __post_init__(self):
        if not (self.t_start > 0 and self.t_end > 0):
            raise ConfigError("temperatures must be positive")
        if self.t_end > self.t_start:
            raise ConfigError("t_end must not exceed t_start")
        if int(self.steps) < 1:
            raise ConfigError("steps must be >= 1")

    def temperature(self, k):
        if self.steps == 1:
            return self.t_start
        return self.t_start * (self.t_end / self.t_start) ** (k / (self.steps - 1))


def anneal(seq, model=None, schedule=Schedule(), rng_seed=0, top_n=5, distinct=False):
    """Metropolis single-move mutation chain with geometric cooling.

    Starts from the straight chain.  Every overlap-free state visited is
    remembered, and the ``top_n`` best are returned.  Deterministic for a
    given ``rng_seed``.  ``trace`` holds the energy after each accepted
    move.
    """
    seq = validate_sequence(seq)
    model = model or SurrogateEnergyModel()
    if isinstance(schedule, tuple):
        schedule = Schedule(*schedule)
    n = len(seq)
    if n < 4:
        raise SizeError("annealing needs at least four residues")
    rng = np.random.default_rng(rng_seed)
    walk_energy = _scalar_energy(seq, model)
    cache = {}

    def score(m):
        hit = cache.get(m)
        if hit is None:
            hit = cache[m] = walk_energy(m)
        return hit

    steps = int(schedule.steps)
    temps = [schedule.temperature(k) for k in range(steps)]
    sites = rng.integers(n - 2, size=steps).tolist()
    picks = rng.integers(4, size=steps).tolist()
    coins = rng.random(steps).tolist()

    current = "F" * (n - 2)
    e_cur = score(current)[0]
    trace = [e_cur]
    for t, k, j, u in zip(temps, sites, picks, coins):
        alt = _ALTERNATIVES[current[k]]
        proposal = current[:k] + alt[j] + current[k + 1:]
        e_new = score(proposal)[0]
        delta = e_new - e_cur
        if delta <= 0 or u < math.exp(-delta / t):
            current, e_cur = proposal, e_new
            trace.append(e_cur)

    states = [(e, m) for m, (e, ov) in cache.items() if ov == 0]
    picks = _select(states, top_n, distinct)
    return _make_set(seq, model, picks, "anneal", seed=rng_seed, trace=trace)

"""Synthetic fixtures: lattice fragments with a known native and moment-matched RMSD samples."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .geometry import AMINO_ACIDS, Conformation, kabsch_rmsd, virtual_dihedrals
from .priors import PriorsProfile
from .rama import DEFAULT_RAMA, expand_ss8, induce_ss3
from .surrogate import SurrogateEnergyModel, enumerate_exhaustive


def priors_from_native(native, rama=DEFAULT_RAMA, rsa=1.0):
    """Priors a perfect predictor would emit for ``native``.

    Angles are the native's virtual dihedrals (masked where undefined),
    SS3 is induced from them and uniform where no pair of angles exists.
    """
    tr = virtual_dihedrals(native)
    ss3 = induce_ss3(np.where(tr.mask, tr.phi, np.nan), np.where(tr.mask, tr.psi, np.nan), rama)
    ss3[~tr.mask] = 1.0 / 3.0
    return PriorsProfile(
        sequence=native.sequence,
        ss3=ss3,
        ss8=expand_ss8(ss3),
        phi=tr.phi,
        psi=tr.psi,
        rsa=np.full(len(native), float(rsa)),
    )


@dataclass(frozen=True)
class FragmentCase:
    seed: int
    native: Conformation
    candidates: tuple
    priors: PriorsProfile

    def rmsd(self, candidate_id):
        c = next(c for c in self.candidates if c.id == candidate_id)
        return kabsch_rmsd(c, self.native)


def synthetic_fragment(seed, length, n_candidates=5, resolution=1.0, model=None):
    """A random sequence folded exhaustively on the lattice.

    The native is the lowest-energy distinct conformation.  Candidates are
    the ``n_candidates`` lowest distinct conformations (native included)
    with energies reported only to a grid of ``resolution``, which models
    a coarse generator that cannot separate near-degenerate basins.
    Candidate ids are shuffled labels so id order carries no information.
    """
    rng = np.random.default_rng(seed)
    seq = "".join(rng.choice(list(AMINO_ACIDS), size=length))
    pool = enumerate_exhaustive(seq, model or SurrogateEnergyModel(), top_n=n_candidates, distinct=True)
    labels = rng.permutation(len(pool))
    native = pool.conformations[0].with_energy(pool.energies[0])
    native = Conformation("native", native.sequence, native.coords, native.energy_q)
    cands = []
    for label, c, e in zip(labels, pool.conformations, pool.energies):
        coarse = resolution * np.round(e / resolution) if resolution else e
        cands.append(Conformation(f"c{label:02d}", c.sequence, c.coords, float(coarse)))
    return FragmentCase(seed, native, tuple(cands), priors_from_native(native))


def moment_matched_sample(n, mean, median, std, lo, hi, seed=0, attempts=50):
    """``n`` values with the given min, max, median, mean and sample std.

    A lognormal skeleton is stretched separately below and above its
    median until the first two moments match.  Skeletons whose stretched
    values escape ``[lo, hi]`` are redrawn.
    """
    if n < 5 or n % 2 == 0:
        raise ValueError("use an odd n >= 5 so the median is a sample point")
    rng = np.random.default_rng(seed)
    mid = (n - 2) // 2
    for _ in range(attempts):
        base = np.sort(rng.lognormal(0.0, 0.35, size=n - 2))
        below = base[:mid] - base[mid]
        above = base[mid + 1:] - base[mid]

        def build(params):
            a, b = params
            core = np.concatenate([median + a * below, [median], median + b * above])
            return np.concatenate([[lo], core, [hi]])

        def resid(params):
            x = build(params)
            return [x.mean() - mean, x.std(ddof=1) - std]

        sol = optimize.least_squares(
            resid, x0=[1.0, 1.0], bounds=([1e-6, 1e-6], [np.inf, np.inf]),
            xtol=1e-15, ftol=1e-15, gtol=1e-15,
        )
        x = build(sol.x)
        if x[1:-1].min() >= lo and x[1:-1].max() <= hi and np.max(np.abs(resid(sol.x))) < 1e-9:
            return np.sort(x)
    raise ValueError("requested moments are not reachable within [lo, hi]")


def moment_matched_table(moments, n, seed=0):
    """Long-format rows ``(fragment_id, method, rmsd)`` for several methods.

    ``moments`` maps a method name to ``(mean, median, std, min, max)``.
    Each method's column is matched independently; pairing across
    methods is by sorted position, which keeps per-fragment differences
    mostly of one sign as in a benchmark where one method dominates.
    """
    rows = []
    ids = [f"frag{k:03d}" for k in range(1, n + 1)]
    for j, (method, m) in enumerate(moments.items()):
        values = moment_matched_sample(n, *m, seed=seed + j)
        perm = np.random.default_rng(seed).permutation(n)
        for fid, v in zip(ids, values[perm]):
            rows.append((fid, method, float(v)))
    return rows

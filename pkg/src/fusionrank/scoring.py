"""Fused-energy re-ranking of candidate backbones.

Each candidate receives three raw terms: its generator energy ``E_q``,
a secondary-structure divergence ``D_ss`` against the priors, and an
angle-consistency loss ``D_angle``.  Terms are min-max normalised across
the candidate set and combined as::

    E_fuse = alpha * E_q~ + beta * D_ss~ + gamma * D_angle~

Candidates are sorted by ascending ``E_fuse``; exact ties fall back to
the raw ``E_q`` and then to the candidate id.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EmptyInputError, ShapeError
from .geometry import Conformation, DihedralTrace, virtual_dihedrals, wrap
from .rama import DEFAULT_RAMA, RamaConfig, expand_ss8, induce_ss3

SS_METRICS = ("ce", "kl", "l2")
SS_MODES = ("ss3", "ss8")


@dataclass(frozen=True)
class FusionWeights:
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        vals = (self.alpha, self.beta, self.gamma)
        if not all(math.isfinite(v) and v >= 0 for v in vals):
            raise ConfigError("fusion weights must be finite and non-negative")
        if not any(v > 0 for v in vals):
            raise ConfigError("at least one fusion weight must be positive")


@dataclass(frozen=True)
class ScoringConfig:
    ss_metric: str = "kl"
    ss_mode: str = "ss3"
    epsilon: float = 1e-8
    rsa_weighting: bool = False
    normalize: bool = True
    rama: RamaConfig = DEFAULT_RAMA

    def __post_init__(self):
        object.__setattr__(self, "ss_metric", str(self.ss_metric).lower())
        object.__setattr__(self, "ss_mode", str(self.ss_mode).lower())
        if self.ss_metric not in SS_METRICS:
            raise ConfigError(f"ss_metric must be one of {SS_METRICS}")
        if self.ss_mode not in SS_MODES:
            raise ConfigError(f"ss_mode must be one of {SS_MODES}")
        if not (0 < self.epsilon <= 1e-3):
            raise ConfigError("epsilon must lie in (0, 1e-3]")


@dataclass(frozen=True)
class CandidateAnnotation:
    """A conformation with its virtual dihedrals and induced SS3/SS8."""

    conformation: Conformation
    trace: DihedralTrace
    ss3: np.ndarray = field(repr=False)
    ss8: np.ndarray = field(repr=False)

    @property
    def id(self):
        return self.conformation.id

    @property
    def ss_mask(self):
        return self.trace.mask

    def ss(self, mode):
        return self.ss3 if mode == "ss3" else self.ss8


@dataclass(frozen=True)
class FusedScore:
    candidate_id: str
    e_q_raw: float
    d_ss_raw: float | None
    d_angle_raw: float | None
    e_q_norm: float
    d_ss_norm: float
    d_angle_norm: float
    e_fuse: float


@dataclass(frozen=True)
class RankingReport:
    """Candidates in rank order plus everything used to rank them.

    ``tie_breaks[i]`` names the key that separated entry ``i`` from the
    entry above it: ``"e_fuse"``, ``"e_q"`` or ``"id"`` (``"-"`` for the
    first entry).
    """

    order: tuple
    scores: tuple
    weights: FusionWeights
    config: ScoringConfig
    tie_breaks: tuple

    def __len__(self):
        return len(self.order)

    def __iter__(self):
        return iter(self.scores)

    @property
    def best(self):
        return self.scores[0]

    def score(self, candidate_id):
        for s in self.scores:
            if s.candidate_id == candidate_id:
                return s
        raise KeyError(candidate_id)


def annotate(c, rama=DEFAULT_RAMA):
    """Virtual dihedrals and induced SS distributions for one candidate."""
    trace = virtual_dihedrals(c)
    phi = np.where(trace.mask, trace.phi, np.nan)
    psi = np.where(trace.mask, trace.psi, np.nan)
    ss3 = induce_ss3(phi, psi, rama)
    ss8 = expand_ss8(ss3)
    return CandidateAnnotation(c, trace, ss3, ss8)


def ss_divergence(p, p_hat, metric="kl", epsilon=1e-8):
    """Divergence between a prior distribution ``p`` and a candidate ``p_hat``.

    ``ce``: -sum p log(p_hat + eps); ``kl``: sum p log((p + eps)/(p_hat + eps));
    ``l2``: Euclidean distance.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(p_hat, dtype=float)
    if p.shape != q.shape:
        raise ShapeError(f"distribution shapes differ: {p.shape} vs {q.shape}")
    metric = metric.lower()
    if metric == "ce":
        return float(-np.sum(p * np.log(q + epsilon)))
    if metric == "kl":
        return float(np.sum(p * np.log((p + epsilon) / (q + epsilon))))
    if metric == "l2":
        return float(np.linalg.norm(p - q))
    raise ConfigError(f"unknown ss metric {metric!r}")


def ss_aggregate(c, priors, cfg=ScoringConfig()):
    """Mean per-residue divergence over residues where both distributions exist.

    Returns None when no residue qualifies.
    """
    prior = priors.ss(cfg.ss_mode)
    cand = c.ss(cfg.ss_mode)
    both = c.ss_mask & np.all(np.isfinite(prior), axis=1) & np.all(np.isfinite(cand), axis=1)
    idx = np.flatnonzero(both)
    if len(idx) == 0:
        return None
    vals = [ss_divergence(prior[i], cand[i], cfg.ss_metric, cfg.epsilon) for i in idx]
    return math.fsum(vals) / len(vals)


def angle_consistency(c, priors, cfg=ScoringConfig()):
    """Weighted mean squared wrapped angle error against the priors.

    phi and psi are masked independently: a residue contributes the
    squared error of each torsion that both sides define, and enters the
    denominator once if it contributes anything.  Weights are RSA when
    ``cfg.rsa_weighting`` is set, else 1; an all-zero weight set falls
    back to uniform.  Returns None when no residue qualifies.
    """
    tr = c.trace
    phi_ok = tr.phi_mask & np.isfinite(priors.phi)
    psi_ok = tr.psi_mask & np.isfinite(priors.psi)
    used = phi_ok | psi_ok
    if not np.any(used):
        return None
    err = np.zeros(len(tr))
    if np.any(phi_ok):
        err[phi_ok] += wrap(priors.phi[phi_ok] - tr.phi[phi_ok]) ** 2
    if np.any(psi_ok):
        err[psi_ok] += wrap(priors.psi[psi_ok] - tr.psi[psi_ok]) ** 2
    w = np.where(used, priors.rsa if cfg.rsa_weighting else 1.0, 0.0)
    if math.fsum(w[used]) == 0.0:
        w = used.astype(float)
    return math.fsum(w[used] * err[used]) / math.fsum(w[used])


def minmax_normalize(values):
    """Min-max scale finite entries into [0, 1]; absent (None/NaN) entries become 0.

    If every finite entry is equal they all map to 0.
    """
    v = np.array([math.nan if x is None else float(x) for x in values], dtype=float)
    if len(v) == 0:
        raise EmptyInputError("nothing to normalise")
    finite = np.isfinite(v)
    out = np.zeros(len(v))
    if not np.any(finite):
        return out.tolist()
    lo = v[finite].min()
    hi = v[finite].max()
    if hi > lo:
        out[finite] = np.clip((v[finite] - lo) / (hi - lo), 0.0, 1.0)
    return out.tolist()


def _raw_terms(a, priors, cfg):
    return (
        a.conformation.energy_q,
        ss_aggregate(a, priors, cfg),
        angle_consistency(a, priors, cfg),
    )


def fuse(candidates, priors, weights=FusionWeights(), cfg=ScoringConfig(), threads=1):
    """Score and rank candidates.

    Parameters
    ----------
    candidates : sequence of Conformation or CandidateAnnotation
    priors : PriorsProfile
        Should already be sanitized.
    weights : FusionWeights
    cfg : ScoringConfig
    threads : int
        Per-candidate terms may be computed in a thread pool; the result
        does not depend on this.

    Returns
    -------
    RankingReport
    """
    if len(candidates) == 0:
        raise EmptyInputError("no candidates to rank")
    ann = [c if isinstance(c, CandidateAnnotation) else annotate(c, cfg.rama) for c in candidates]
    ids = [a.id for a in ann]
    if len(set(ids)) != len(ids):
        raise ShapeError("candidate ids must be unique")
    for a in ann:
        if len(a.conformation) != len(priors):
            raise ShapeError(
                f"candidate {a.id!r} has {len(a.conformation)} residues, priors have {len(priors)}"
            )
    # Fixed accumulation order regardless of input order.
    ann.sort(key=lambda a: a.id)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            raw = list(pool.map(lambda a: _raw_terms(a, priors, cfg), ann))
    else:
        raw = [_raw_terms(a, priors, cfg) for a in ann]

    e_q = [r[0] for r in raw]
    d_ss = [r[1] for r in raw]
    d_ang = [r[2] for r in raw]
    if cfg.normalize:
        n_eq, n_ss, n_ang = (minmax_normalize(t) for t in (e_q, d_ss, d_ang))
    else:
        n_eq, n_ss, n_ang = ([0.0 if x is None else float(x) for x in t] for t in (e_q, d_ss, d_ang))

    scores = []
    for a, eq, ds, da, ne, ns, na in zip(ann, e_q, d_ss, d_ang, n_eq, n_ss, n_ang):
        e_fuse = weights.alpha * ne + weights.beta * ns + weights.gamma * na
        scores.append(FusedScore(a.id, eq, ds, da, ne, ns, na, e_fuse))

    scores.sort(key=lambda s: (s.e_fuse, s.e_q_raw, s.candidate_id))
    ties = ["-"]
    for prev, cur in zip(scores, scores[1:]):
        if cur.e_fuse != prev.e_fuse:
            ties.append("e_fuse")
        elif cur.e_q_raw != prev.e_q_raw:
            ties.append("e_q")
        else:
            ties.append("id")
    return RankingReport(
        order=tuple(s.candidate_id for s in scores),
        scores=tuple(scores),
        weights=weights,
        config=cfg,
        tie_breaks=tuple(ties),
    )

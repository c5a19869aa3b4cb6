"""Re-rank candidate protein backbones by fusing an energy with structural priors."""
from .errors import FusionRankError
from .geometry import Conformation, DihedralTrace, dihedral, kabsch_rmsd, virtual_dihedrals, wrap
from .priors import PriorsProfile, parse_priors, read_priors, sanitize, serialize_priors
from .rama import RamaConfig, expand_ss8, induce_ss3, marginalize_ss8
from .scoring import FusionWeights, RankingReport, ScoringConfig, annotate, fuse
from .surrogate import Schedule, SurrogateEnergyModel, anneal, enumerate_exhaustive
from .evaluation import (
    cohens_dz_from_t,
    evaluate_methods,
    improvement,
    paired_t_test,
    score_rmsd_correlation,
    summary_stats,
    wilcoxon_signed_rank,
)

__version__ = "0.1.0"

__all__ = [
    "Conformation", "DihedralTrace", "FusionRankError", "FusionWeights", "PriorsProfile",
    "RamaConfig", "RankingReport", "Schedule", "ScoringConfig", "SurrogateEnergyModel",
    "annotate", "anneal", "cohens_dz_from_t", "dihedral", "enumerate_exhaustive",
    "evaluate_methods", "expand_ss8", "fuse", "improvement", "induce_ss3", "kabsch_rmsd",
    "marginalize_ss8", "paired_t_test", "parse_priors", "read_priors", "sanitize",
    "score_rmsd_correlation", "serialize_priors", "summary_stats", "virtual_dihedrals",
    "wilcoxon_signed_rank", "wrap",
]

"""Command-line front end: ``fusionrank generate | rank | eval``.

Exit status is 0 on success, 2 for usage or validation problems and 1
for anything unexpected.  Option values come from, in order of
precedence, the command line, a TOML file given with ``--config`` and
the built-in defaults.  The TOML file may hold top-level keys or one
table per subcommand, e.g.::

    [rank]
    alpha = 1.0
    ss_metric = "ce"
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import traceback

from . import __version__
from .errors import ConfigError, EmptyInputError, FusionRankError, ShapeError
from .evaluation import evaluate_methods
from .io_formats import load_xyz, read_rmsd_csv, write_pdb, write_summary, write_xyz
from .priors import CANONICAL_SCHEMA, NETSURFP_POSITIONAL_SCHEMA, NETSURFP_SCHEMA, read_priors
from .scoring import SS_METRICS, SS_MODES, FusionWeights, ScoringConfig, fuse
from .surrogate import Schedule, SurrogateEnergyModel, anneal, enumerate_exhaustive, validate_sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

PRIOR_SCHEMAS = {
    "canonical": CANONICAL_SCHEMA,
    "netsurfp": NETSURFP_SCHEMA,
    "netsurfp-positional": NETSURFP_POSITIONAL_SCHEMA,
}


class UsageError(FusionRankError):
    pass


def _nonneg(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a decimal number") from None
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"{text!r} must be non-negative")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text!r} must be >= 1")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser():
    p = _Parser(prog="fusionrank", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"fusionrank {__version__}")
    p.add_argument("--config", metavar="TOML", help="option defaults from a TOML file")
    sub = p.add_subparsers(dest="command", metavar="{generate,rank,eval}", parser_class=_Parser)
    sub.required = True

    g = sub.add_parser("generate", help="write low-energy lattice candidates as .xyz files")
    g.add_argument("--seq", required=True, help="one-letter amino-acid sequence")
    g.add_argument("--method", choices=("exhaustive", "anneal"), default="exhaustive")
    g.add_argument("--top-n", type=_positive_int, default=5)
    g.add_argument("--seed", type=int, default=0, help="annealing RNG seed")
    g.add_argument("--out-dir", required=True)
    g.add_argument("--bond-length", type=float, default=3.8, help="angstrom per lattice step")
    g.add_argument("--lambda-steric", type=float, default=None,
                   help="overlap penalty (default 1e3 * max|MJ| * L^2)")
    g.add_argument("--t-start", type=float, default=Schedule.t_start)
    g.add_argument("--t-end", type=float, default=Schedule.t_end)
    g.add_argument("--steps", type=_positive_int, default=Schedule.steps)
    g.add_argument("--distinct", action="store_true",
                   help="drop chains equal up to rotation about the first bond")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("rank", help="re-rank candidates against structural priors")
    r.add_argument("candidates_dir", help="directory of candidate .xyz files")
    r.add_argument("priors", help="priors table (.tsv or .csv)")
    r.add_argument("--priors-format", choices=sorted(PRIOR_SCHEMAS), default="canonical")
    r.add_argument("--alpha", type=_nonneg, default=1.0, help="energy weight")
    r.add_argument("--beta", type=_nonneg, default=1.0, help="secondary-structure weight")
    r.add_argument("--gamma", type=_nonneg, default=1.0, help="dihedral weight")
    r.add_argument("--ss-metric", choices=SS_METRICS, default="kl")
    r.add_argument("--ss-mode", choices=SS_MODES, default="ss3")
    r.add_argument("--epsilon", type=float, default=1e-8)
    r.add_argument("--rsa-weight", action="store_true", help="weight dihedral errors by RSA")
    r.add_argument("--no-normalize", action="store_true", help="fuse raw terms")
    r.add_argument("--threads", type=_positive_int, default=1)
    r.add_argument("--out-dir", required=True)
    r.set_defaults(func=cmd_rank)

    e = sub.add_parser("eval", help="RMSD statistics of baselines against a hybrid method")
    e.add_argument("rmsd_csv", help="long-format table fragment_id,method,rmsd_angstrom[,score]")
    e.add_argument("--baselines", required=True, help="comma-separated method names")
    e.add_argument("--hybrid", required=True)
    e.add_argument("--out", required=True, help="statistics CSV")
    e.add_argument("--report", help="optional plain-text report path")
    e.set_defaults(func=cmd_eval)
    return p, {"generate": g, "rank": r, "eval": e}


def _apply_config(path, subparsers, command):
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    dests = {name: {a.dest for a in sp._actions} for name, sp in subparsers.items()}
    shared = {k.replace("-", "_"): v for k, v in data.items() if not isinstance(v, dict)}
    unknown = sorted(set(shared) - set().union(*dests.values()))
    if unknown:
        raise ConfigError(f"unknown option(s) in {path}: {', '.join(unknown)}")
    # Shared keys reach only the commands that define them.
    values = {k: v for k, v in shared.items() if k in dests[command]}
    section = {k.replace("-", "_"): v for k, v in data.get(command, {}).items()}
    unknown = sorted(set(section) - dests[command])
    if unknown:
        raise ConfigError(f"unknown {command} option(s) in {path}: {', '.join(unknown)}")
    values.update(section)
    subparsers[command].set_defaults(**values)


def parse_args(argv):
    parser, subparsers = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if known.config:
        command = next((a for a in rest if a in subparsers), None)
        if command is not None:
            _apply_config(known.config, subparsers, command)
    return parser.parse_args(argv)


# ---------------------------------------------------------------- commands


def cmd_generate(args):
    seq = validate_sequence(args.seq)
    model = SurrogateEnergyModel(lambda_steric=args.lambda_steric, bond_length=args.bond_length)
    if args.method == "exhaustive":
        cands = enumerate_exhaustive(seq, model, top_n=args.top_n, distinct=args.distinct)
    else:
        sched = Schedule(args.t_start, args.t_end, args.steps)
        cands = anneal(seq, model, sched, rng_seed=args.seed, top_n=args.top_n, distinct=args.distinct)
    os.makedirs(args.out_dir, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "file", "energy", "moves"])
    for c, moves in zip(cands.conformations, cands.moves):
        name = f"{c.id}.xyz"
        write_xyz(c, os.path.join(args.out_dir, name), moves=moves or "-")
        w.writerow([c.id, name, f"{c.energy_q:.6f}", moves])
    with open(os.path.join(args.out_dir, "manifest.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())
    print(f"wrote {len(cands)} candidates to {args.out_dir}")
    return 0


def _load_candidates(directory):
    if not os.path.isdir(directory):
        raise EmptyInputError(f"{directory} is not a directory")
    names = sorted(n for n in os.listdir(directory) if n.lower().endswith(".xyz"))
    if not names:
        raise EmptyInputError(f"no .xyz candidates in {directory}")
    cands = [load_xyz(os.path.join(directory, n)) for n in names]
    ids = [c.id for c in cands]
    dup = sorted({i for i in ids if ids.count(i) > 1})
    if dup:
        raise ShapeError(f"duplicate candidate ids: {', '.join(dup)}")
    return cands


def cmd_rank(args):
    weights = FusionWeights(args.alpha, args.beta, args.gamma)
    cfg = ScoringConfig(
        ss_metric=args.ss_metric,
        ss_mode=args.ss_mode,
        epsilon=args.epsilon,
        rsa_weighting=args.rsa_weight,
        normalize=not args.no_normalize,
    )
    cands = _load_candidates(args.candidates_dir)
    priors = read_priors(args.priors, PRIOR_SCHEMAS[args.priors_format])
    for c in cands:
        if len(c) != len(priors):
            raise ShapeError(
                f"candidate {c.id!r} has {len(c)} residues but priors have {len(priors)}"
            )
        if c.sequence != priors.sequence:
            print(f"warning: sequence of {c.id!r} differs from priors", file=sys.stderr)
    report = fuse(cands, priors, weights, cfg, threads=args.threads)

    os.makedirs(args.out_dir, exist_ok=True)
    by_id = {c.id: c for c in cands}
    write_summary(report, os.path.join(args.out_dir, "summary.csv"))
    for rank, cid in enumerate(report.order, start=1):
        write_pdb(by_id[cid], os.path.join(args.out_dir, f"rank_{rank:03d}_{cid}.pdb"))
    best = by_id[report.order[0]]
    write_pdb(best, os.path.join(args.out_dir, "best.pdb"))
    write_xyz(best, os.path.join(args.out_dir, "best.xyz"))
    s = report.best
    print(f"best: {s.candidate_id} E_fuse={s.e_fuse:.6f} E_q={s.e_q_raw:.6f}")
    return 0


def cmd_eval(args):
    baselines = [b.strip() for b in args.baselines.split(",") if b.strip()]
    if not baselines:
        raise UsageError("--baselines needs at least one method name")
    with open(args.rmsd_csv, encoding="utf-8") as fh:
        table = read_rmsd_csv(fh.read())
    report = evaluate_methods(table, baselines, args.hybrid)
    for path in filter(None, (args.out, args.report)):
        parent = os.path.dirname(os.path.abspath(path))
        os.makedirs(parent, exist_ok=True)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(report.to_csv())
    text = report.to_text()
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # --help / --version
        return 0 if exc.code in (None, 0) else 2
    except FusionRankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Readers and writers for candidate, structure and report files.

* ``.xyz``: atom count, a ``key=value`` comment line that must carry
  ``E_q``, then ``CA x y z [residue]`` records with six decimals.
* ``.pdb``: C-alpha only ATOM records, chain A, TER and END.
* ``summary.csv``: ranking report, one row per candidate in rank order.
* ``rmsd.csv``: long-format benchmark table ``fragment_id,method,rmsd_angstrom[,score]``.
"""
from __future__ import annotations

import csv
import io
import math
import os

import numpy as np

from .errors import FormatError, FormatOverflowError, MetadataError, ValidationError
from .evaluation import MethodRmsdTable
from .geometry import AMINO_ACIDS, Conformation

THREE_LETTER = {
    "A": "ALA", "C": "CYS", "D": "ASP", "E": "GLU", "F": "PHE",
    "G": "GLY", "H": "HIS", "I": "ILE", "K": "LYS", "L": "LEU",
    "M": "MET", "N": "ASN", "P": "PRO", "Q": "GLN", "R": "ARG",
    "S": "SER", "T": "THR", "V": "VAL", "W": "TRP", "Y": "TYR",
}
ONE_LETTER = {v: k for k, v in THREE_LETTER.items()}

SUMMARY_COLUMNS = (
    "rank", "candidate_id", "e_q_raw", "d_ss_raw", "d_angle_raw",
    "e_q_norm", "d_ss_norm", "d_angle_norm", "e_fuse", "tie_break",
)


def _write(text, path):
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def _residue_code(token):
    t = token.strip().upper()
    if len(t) == 1 and t in AMINO_ACIDS:
        return t
    if t in ONE_LETTER:
        return ONE_LETTER[t]
    raise FormatError(f"unknown residue code {token!r}")


def _parse_metadata(comment):
    meta = {}
    for tok in comment.split():
        if "=" in tok:
            k, v = tok.split("=", 1)
            meta[k] = v
    return meta


# ---------------------------------------------------------------- xyz


def write_xyz(c, path=None, **metadata):
    """Serialise a conformation.  Extra keyword metadata is appended sorted by key."""
    if any(ch.isspace() or ch == "=" for ch in c.id):
        raise FormatError(f"candidate id {c.id!r} may not contain whitespace or '='")
    meta = [f"id={c.id}", f"E_q={c.energy_q!r}"]
    meta += [f"{k}={metadata[k]}" for k in sorted(metadata)]
    lines = [str(len(c)), " ".join(meta)]
    for aa, (x, y, z) in zip(c.sequence, c.coords):
        lines.append(f"CA {x:.6f} {y:.6f} {z:.6f} {aa}")
    return _write("\n".join(lines) + "\n", path)


def read_xyz(text, sequence=None, id=None, energy=None):
    """Parse an XYZ document into a :class:`Conformation`.

    Parameters
    ----------
    sequence : str, optional
        Residue codes when records have no fifth column.
    id : str, optional
        Overrides the ``id`` metadata key.
    energy : float, optional
        Used when the comment line has no ``E_q`` key.

    Raises
    ------
    FormatError
        Malformed layout or record count mismatch.
    MetadataError
        No ``E_q`` metadata and no ``energy`` given.
    """
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if len(lines) < 2:
        raise FormatError("XYZ needs a count line and a comment line")
    try:
        count = int(lines[0].strip())
    except ValueError:
        raise FormatError(f"bad atom count {lines[0]!r}") from None
    records = lines[2:]
    if len(records) != count:
        raise FormatError(f"declared {count} atoms but found {len(records)} records")
    meta = _parse_metadata(lines[1])
    if "E_q" in meta:
        try:
            e_q = float(meta["E_q"])
        except ValueError:
            raise MetadataError(f"E_q={meta['E_q']!r} is not a number") from None
    elif energy is not None:
        e_q = float(energy)
    else:
        raise MetadataError("comment line has no E_q=<value> entry")

    coords = np.empty((count, 3))
    codes = []
    for k, rec in enumerate(records, start=1):
        parts = rec.split()
        if len(parts) < 4:
            raise FormatError(f"record {k}: expected label x y z [residue]")
        try:
            coords[k - 1] = [float(v) for v in parts[1:4]]
        except ValueError:
            raise FormatError(f"record {k}: non-numeric coordinate") from None
        if len(parts) >= 5:
            codes.append(_residue_code(parts[4]))
    if codes and len(codes) != count:
        raise FormatError("residue column present on some records only")
    if codes:
        seq = "".join(codes)
        if sequence is not None and sequence.upper() != seq:
            raise FormatError("residue column disagrees with the supplied sequence")
    elif sequence is not None:
        seq = sequence.upper()
        if len(seq) != count:
            raise FormatError(f"sequence has {len(seq)} residues, file has {count}")
    else:
        raise FormatError("no residue column and no sequence supplied")
    cid = id or meta.get("id") or "candidate"
    return Conformation(cid, seq, coords, e_q)


def load_xyz(path, sequence=None, energy=None):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    stem = os.path.splitext(os.path.basename(path))[0]
    meta = _parse_metadata(text.splitlines()[1]) if text.count("\n") >= 1 else {}
    return read_xyz(text, sequence=sequence, id=meta.get("id", stem), energy=energy)


# ---------------------------------------------------------------- pdb


def _pdb_coord(v):
    s = f"{v:8.3f}"
    if abs(v) >= 1e4 or len(s) > 8:
        raise FormatOverflowError(f"coordinate {v} does not fit PDB columns")
    return s


def write_pdb(c, path=None):
    """C-alpha only PDB text: one ATOM record per residue, chain A."""
    if len(c) < 1:
        raise ValidationError("cannot write an empty conformation")
    lines = []
    for i, (aa, (x, y, z)) in enumerate(zip(c.sequence, c.coords), start=1):
        lines.append(
            f"ATOM  {i:5d}  CA  {THREE_LETTER[aa]} A{i:4d}    "
            f"{_pdb_coord(x)}{_pdb_coord(y)}{_pdb_coord(z)}"
            f"{1.0:6.2f}{0.0:6.2f}          {'C':>2}"
        )
    n = len(c) + 1
    lines.append(f"TER   {n:5d}      {THREE_LETTER[c.sequence[-1]]} A{len(c):4d}")
    lines.append("END")
    return _write("\n".join(lines) + "\n", path)


def read_pdb(text, id="pdb", energy=0.0):
    """Read C-alpha ATOM records by fixed column positions."""
    seq, coords = [], []
    for line in text.splitlines():
        if not line.startswith(("ATOM  ", "HETATM")) or line[12:16].strip() != "CA":
            continue
        seq.append(ONE_LETTER.get(line[17:20].strip(), "X"))
        coords.append([float(line[30:38]), float(line[38:46]), float(line[46:54])])
    if not coords:
        raise FormatError("no CA records found")
    if "X" in seq:
        raise FormatError("unknown residue name in PDB")
    return Conformation(id, "".join(seq), np.array(coords), energy)


# ---------------------------------------------------------------- summary


def _f6(x):
    return "NA" if x is None or not math.isfinite(x) else f"{x:.6f}"


def write_summary(report, path=None):
    """Ranking report as CSV, preceded by one ``#`` line echoing weights and config."""
    if len(report) == 0:
        raise ValidationError("empty report")
    w, cfg = report.weights, report.config
    head = (
        f"# alpha={w.alpha:.6f} beta={w.beta:.6f} gamma={w.gamma:.6f} "
        f"ss_metric={cfg.ss_metric} ss_mode={cfg.ss_mode} epsilon={cfg.epsilon:g} "
        f"rsa_weighting={str(cfg.rsa_weighting).lower()} normalize={str(cfg.normalize).lower()}"
    )
    buf = io.StringIO()
    buf.write(head + "\n")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(SUMMARY_COLUMNS)
    for rank, (s, tie) in enumerate(zip(report.scores, report.tie_breaks), start=1):
        wr.writerow([
            rank, s.candidate_id, _f6(s.e_q_raw), _f6(s.d_ss_raw), _f6(s.d_angle_raw),
            _f6(s.e_q_norm), _f6(s.d_ss_norm), _f6(s.d_angle_norm), _f6(s.e_fuse), tie,
        ])
    return _write(buf.getvalue(), path)


def read_summary(text):
    """Inverse of :func:`write_summary`: returns ``(metadata, rows)``."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise FormatError("summary must start with a '#' metadata line")
    meta = _parse_metadata(lines[0][1:])
    rows = []
    for row in csv.DictReader(lines[1:]):
        out = {"rank": int(row["rank"]), "candidate_id": row["candidate_id"], "tie_break": row["tie_break"]}
        for k in SUMMARY_COLUMNS[2:-1]:
            out[k] = None if row[k] == "NA" else float(row[k])
        rows.append(out)
    return meta, rows


# ---------------------------------------------------------------- rmsd table


def read_rmsd_csv(text):
    """Parse a long-format RMSD table into a :class:`MethodRmsdTable`."""
    reader = csv.DictReader(io.StringIO(text))
    need = {"fragment_id", "method", "rmsd_angstrom"}
    if reader.fieldnames is None or not need <= {f.strip() for f in reader.fieldnames}:
        raise FormatError(f"RMSD CSV header must include {sorted(need)}")
    rows = [{k.strip(): v for k, v in r.items()} for r in reader]
    return MethodRmsdTable.from_rows(rows)


def write_rmsd_csv(rows, path=None):
    """Write ``(fragment_id, method, rmsd[, score])`` tuples."""
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    with_score = any(len(r) > 3 for r in rows)
    wr.writerow(["fragment_id", "method", "rmsd_angstrom"] + (["score"] if with_score else []))
    for r in rows:
        cells = [r[0], r[1], f"{r[2]:.6f}"]
        if with_score:
            cells.append("" if len(r) < 4 or r[3] is None else f"{r[3]:.6f}")
        wr.writerow(cells)
    return _write(buf.getvalue(), path)

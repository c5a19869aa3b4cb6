"""Residue-wise structural priors from NetSurfP-style tables.

The canonical table (``priors.tsv``) is tab or comma delimited with a
header row.  Columns are located by name::

    id  residue  ss8_H ss8_G ss8_I ss8_E ss8_B ss8_T ss8_S ss8_L
    ss3_H ss3_E ss3_C  disorder_0 disorder_1  rsa asa  phi psi

Angles are in degrees.  ``id``, ``disorder_*`` and ``asa`` are read but
not used.  See ``docs/formats.md`` for a byte-level example.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, SchemaError, ShapeError, ValidationError
from .geometry import AMINO_ACIDS, wrap

SS3_LABELS = ("H", "E", "C")
SS8_LABELS = ("H", "G", "I", "E", "B", "T", "S", "L")

PROB_TOL = 1e-6
NA_TOKENS = {"", "na", "nan", "n/a", "none", "null"}


@dataclass(frozen=True)
class PriorsSchema:
    """Where each required field lives in the input table.

    Each field is a header name, or a 0-based column index when
    ``has_header`` is false.  ``ss8`` is listed in [H,G,I,E,B,T,S,L]
    order and ``ss3`` in [H,E,C] order.  ``delimiter=None`` sniffs tab
    versus comma from the first line.
    """

    residue: str | int
    ss8: tuple
    ss3: tuple
    rsa: str | int
    phi: str | int
    psi: str | int
    has_header: bool = True
    delimiter: str | None = None


CANONICAL_SCHEMA = PriorsSchema(
    residue="residue",
    ss8=tuple(f"ss8_{k}" for k in SS8_LABELS),
    ss3=tuple(f"ss3_{k}" for k in SS3_LABELS),
    rsa="rsa",
    phi="phi",
    psi="psi",
)

CANONICAL_COLUMNS = (
    ["id", "residue"]
    + list(CANONICAL_SCHEMA.ss8)
    + list(CANONICAL_SCHEMA.ss3)
    + ["disorder_0", "disorder_1", "rsa", "asa", "phi", "psi"]
)

# NetSurfP-2.0/3.0 web-server CSV header names. Its 8-state coil is "C".
NETSURFP_SCHEMA = PriorsSchema(
    residue="seq",
    ss8=tuple(f"p[q8_{k}]" for k in ("H", "G", "I", "E", "B", "T", "S", "C")),
    ss3=tuple(f"p[q3_{k}]" for k in SS3_LABELS),
    rsa="rsa",
    phi="phi",
    psi="psi",
    delimiter=",",
)

# Headerless NetSurfP CSV, positional:
# id, seq, n, rsa, asa, q3, p[q3_H], p[q3_E], p[q3_C], q8,
# p[q8_G], p[q8_H], p[q8_I], p[q8_B], p[q8_E], p[q8_S], p[q8_T], p[q8_C], phi, psi, ...
NETSURFP_POSITIONAL_SCHEMA = PriorsSchema(
    residue=1,
    ss8=(11, 10, 12, 14, 13, 16, 15, 17),
    ss3=(6, 7, 8),
    rsa=3,
    phi=18,
    psi=19,
    has_header=False,
    delimiter=",",
)


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PriorsProfile:
    """Residue-wise priors for one sequence.

    Attributes
    ----------
    sequence : str
    ss3 : ndarray, shape (L, 3)
    ss8 : ndarray, shape (L, 8)
    phi, psi : ndarray, shape (L,)
        Radians in (-pi, pi]; NaN where masked.
    rsa : ndarray, shape (L,)
    """

    sequence: str
    ss3: np.ndarray = field(repr=False)
    ss8: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)
    rsa: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = len(self.sequence)
        shapes = {"ss3": (n, 3), "ss8": (n, 8), "phi": (n,), "psi": (n,), "rsa": (n,)}
        for name, shape in shapes.items():
            a = _frozen(getattr(self, name))
            if a.shape != shape:
                raise ShapeError(f"{name} has shape {a.shape}, expected {shape}")
            object.__setattr__(self, name, a)

    def __len__(self):
        return len(self.sequence)

    @property
    def phi_mask(self):
        return np.isfinite(self.phi)

    @property
    def psi_mask(self):
        return np.isfinite(self.psi)

    def ss(self, mode):
        """Distributions for ``mode`` ('ss3' or 'ss8')."""
        return self.ss3 if str(mode).lower() == "ss3" else self.ss8


def _cell_float(text, row, column):
    t = text.strip()
    if t.lower() in NA_TOKENS:
        return math.nan
    try:
        return float(t)
    except ValueError:
        raise ParseError(f"non-numeric value {text!r} in column {column!r}", row=row) from None


def _normalize_rows(p):
    out = p.copy()
    s = out.sum(axis=1)
    ok = np.all(np.isfinite(out), axis=1) & (s > 0)
    out[ok] = out[ok] / s[ok, None]
    return out


def _sniff_delimiter(first_line):
    return "\t" if "\t" in first_line else ","


def parse_priors(table, schema=CANONICAL_SCHEMA):
    """Parse a delimited priors table into a :class:`PriorsProfile`.

    SS probability rows are renormalised to sum to one; degrees become
    wrapped radians.  NA-like cells are kept as NaN for :func:`sanitize`
    to impute.

    Raises
    ------
    SchemaError
        A required column is missing.
    ParseError
        A required cell is not numeric (message carries the 1-based data row).
    ValidationError
        A probability lies outside [0, 1] by more than 1e-6.
    """
    lines = [ln for ln in table.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise SchemaError("empty priors table")
    delim = schema.delimiter or _sniff_delimiter(lines[0])
    rows = list(csv.reader(io.StringIO("\n".join(lines)), delimiter=delim))
    rows = [[c.strip() for c in r] for r in rows]

    fields = {
        "residue": [schema.residue],
        "ss8": list(schema.ss8),
        "ss3": list(schema.ss3),
        "rsa": [schema.rsa],
        "phi": [schema.phi],
        "psi": [schema.psi],
    }
    if schema.has_header:
        header, body = rows[0], rows[1:]
        index = {name: j for j, name in enumerate(header)}
        missing = [c for cols in fields.values() for c in cols if c not in index]
        if missing:
            raise SchemaError(f"missing required column(s): {', '.join(map(str, missing))}")
        loc = {k: [index[c] for c in cols] for k, cols in fields.items()}
    else:
        body = rows
        loc = {k: [int(c) for c in cols] for k, cols in fields.items()}
    if not body:
        raise SchemaError("priors table has no residue rows")

    width = max(j for cols in loc.values() for j in cols) + 1
    seq = []
    ss8 = np.empty((len(body), 8))
    ss3 = np.empty((len(body), 3))
    rsa = np.empty(len(body))
    phi = np.empty(len(body))
    psi = np.empty(len(body))
    for r, row in enumerate(body, start=1):
        if len(row) < width:
            raise ParseError(f"expected at least {width} cells, found {len(row)}", row=r)
        aa = row[loc["residue"][0]].upper()
        if aa not in AMINO_ACIDS or len(aa) != 1:
            raise ParseError(f"unknown residue code {aa!r}", row=r)
        seq.append(aa)
        ss8[r - 1] = [_cell_float(row[j], r, j) for j in loc["ss8"]]
        ss3[r - 1] = [_cell_float(row[j], r, j) for j in loc["ss3"]]
        rsa[r - 1] = _cell_float(row[loc["rsa"][0]], r, "rsa")
        phi[r - 1] = _cell_float(row[loc["phi"][0]], r, "phi")
        psi[r - 1] = _cell_float(row[loc["psi"][0]], r, "psi")

    for name, p in (("ss8", ss8), ("ss3", ss3)):
        bad = np.isfinite(p) & ((p < -PROB_TOL) | (p > 1.0 + PROB_TOL))
        if np.any(bad):
            r = int(np.argwhere(bad)[0][0]) + 1
            raise ValidationError(f"row {r}: {name} probability outside [0, 1]")

    return PriorsProfile(
        sequence="".join(seq),
        ss3=_normalize_rows(np.clip(ss3, 0.0, 1.0)),
        ss8=_normalize_rows(np.clip(ss8, 0.0, 1.0)),
        phi=_deg_to_wrapped(phi),
        psi=_deg_to_wrapped(psi),
        rsa=rsa,
    )


def _deg_to_wrapped(deg):
    out = np.full(len(deg), np.nan)
    ok = np.isfinite(deg)
    if np.any(ok):
        out[ok] = wrap(np.radians(deg[ok]))
    return out


def sanitize(p):
    """Make every field of a profile usable downstream.

    RSA is clipped into [0, 1] with NaN replaced by 1.0.  SS rows that are
    non-finite or carry no mass become uniform; the rest are renormalised.
    Non-finite angles stay NaN (masked); finite ones are wrapped.
    Idempotent.
    """
    rsa = np.array(p.rsa, dtype=float)
    rsa[~np.isfinite(rsa)] = 1.0
    rsa = np.clip(rsa, 0.0, 1.0)

    def fix(ss):
        ss = np.array(ss, dtype=float)
        k = ss.shape[1]
        bad = ~np.all(np.isfinite(ss), axis=1)
        ss[bad] = 1.0 / k
        ss = np.clip(ss, 0.0, None)
        s = ss.sum(axis=1)
        empty = s <= 0
        ss[empty] = 1.0 / k
        s[empty] = 1.0
        # Leave already-normalised rows untouched so sanitize is idempotent.
        off = np.abs(s - 1.0) > 1e-12
        ss[off] = ss[off] / s[off, None]
        return ss

    def angles(a):
        a = np.array(a, dtype=float)
        out = np.full(len(a), np.nan)
        ok = np.isfinite(a)
        if np.any(ok):
            out[ok] = wrap(a[ok])
        return out

    return PriorsProfile(
        sequence=p.sequence,
        ss3=fix(p.ss3),
        ss8=fix(p.ss8),
        phi=angles(p.phi),
        psi=angles(p.psi),
        rsa=rsa,
    )


def _fmt(x):
    return "NA" if not math.isfinite(x) else f"{x:.10f}"


def serialize_priors(p):
    """Write a profile in the canonical tab-separated layout.

    Ten decimals are used so that a parse round trip is lossless to well
    below 1e-6 even after row renormalisation.
    """
    out = ["\t".join(CANONICAL_COLUMNS)]
    for i, aa in enumerate(p.sequence):
        cells = [str(i + 1), aa]
        cells += [_fmt(v) for v in p.ss8[i]]
        cells += [_fmt(v) for v in p.ss3[i]]
        cells += ["NA", "NA", _fmt(p.rsa[i]), "NA"]
        cells += [_fmt(math.degrees(p.phi[i])), _fmt(math.degrees(p.psi[i]))]
        out.append("\t".join(cells))
    return "\n".join(out) + "\n"


def read_priors(path, schema=CANONICAL_SCHEMA, clean=True):
    """Parse a priors file and (by default) sanitize it."""
    with open(path, encoding="utf-8") as fh:
        profile = parse_priors(fh.read(), schema)
    return sanitize(profile) if clean else profile

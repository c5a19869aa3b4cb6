import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fusionrank.errors import ParseError, SchemaError, ValidationError
from fusionrank.priors import (
    CANONICAL_COLUMNS,
    NETSURFP_POSITIONAL_SCHEMA,
    NETSURFP_SCHEMA,
    PriorsProfile,
    parse_priors,
    read_priors,
    sanitize,
    serialize_priors,
)


def _row(i, aa="A", ss3=(0.5, 0.3, 0.2), rsa="0.4", phi="-60", psi="-45", sep="\t"):
    ss8 = ["0.4", "0.05", "0.05", "0.25", "0.05", "0.1", "0.05", "0.05"]
    cells = [str(i), aa, *ss8, *map(str, ss3), "0.9", "0.1", rsa, "50", phi, psi]
    return sep.join(cells)


def _table(rows, sep="\t"):
    return sep.join(CANONICAL_COLUMNS) + "\n" + "\n".join(rows) + "\n"


def test_parse_basic_and_units():
    p = parse_priors(_table([_row(1, phi="180.0"), _row(2, aa="g")]))
    assert p.sequence == "AG"
    assert p.phi[0] == pytest.approx(math.pi)
    assert p.psi[0] == pytest.approx(math.radians(-45))
    assert np.allclose(p.ss3[0], [0.5, 0.3, 0.2], atol=0, rtol=1e-15)
    assert p.rsa[0] == 0.4


def test_parse_renormalizes_ss3():
    p = parse_priors(_table([_row(1, ss3=("0.50", "0.30", "0.19"))]))
    assert np.allclose(p.ss3[0], [0.5051, 0.3030, 0.1919], atol=1e-4)
    assert p.ss3[0].sum() == pytest.approx(1.0, abs=1e-12)


def test_parse_comma_delimiter_and_na():
    p = parse_priors(_table([_row(1, phi="NA", rsa="nan", sep=",")], sep=","))
    assert np.isnan(p.phi[0]) and np.isnan(p.rsa[0])


def test_parse_errors():
    with pytest.raises(SchemaError):
        parse_priors("id\tresidue\n1\tA\n")
    with pytest.raises(ParseError) as exc:
        parse_priors(_table([_row(1), _row(2, rsa="abc")]))
    assert exc.value.row == 2 and "row 2" in str(exc.value)
    with pytest.raises(ValidationError):
        parse_priors(_table([_row(1, ss3=("1.2", "0", "0"))]))
    with pytest.raises(ValidationError):
        parse_priors(_table([_row(1, ss3=("-0.01", "0.5", "0.5"))]))
    # Within tolerance is accepted.
    parse_priors(_table([_row(1, ss3=("1.0000005", "0", "0"))]))
    with pytest.raises(SchemaError):
        parse_priors("")


def test_netsurfp_header_schema():
    header = "id,seq,n,rsa,asa,q3,p[q3_H],p[q3_E],p[q3_C],q8,p[q8_G],p[q8_H],p[q8_I],p[q8_B],p[q8_E],p[q8_S],p[q8_T],p[q8_C],phi,psi,disorder"
    row = ">x,M,1,0.8,100,C,0.1,0.2,0.7,C,0.02,0.08,0.0,0.05,0.15,0.2,0.2,0.3,-70,140,0.5"
    p = parse_priors(header + "\n" + row + "\n", NETSURFP_SCHEMA)
    assert np.allclose(p.ss8[0], [0.08, 0.02, 0.0, 0.15, 0.05, 0.2, 0.2, 0.3])
    q = parse_priors(row + "\n", NETSURFP_POSITIONAL_SCHEMA)
    assert np.array_equal(p.ss8, q.ss8) and np.array_equal(p.ss3, q.ss3)
    assert q.rsa[0] == 0.8 and q.phi[0] == pytest.approx(math.radians(-70))


def _profile(rsa=0.5, ss3=None, phi=0.1):
    ss3 = np.array([[0.2, 0.3, 0.5]] if ss3 is None else [ss3], dtype=float)
    return PriorsProfile("A", ss3, np.full((1, 8), 1 / 8), np.array([phi]), np.array([0.2]), np.array([rsa]))


@pytest.mark.parametrize("raw, clean", [(1.3, 1.0), (-0.2, 0.0), (math.nan, 1.0), (math.inf, 1.0), (-math.inf, 1.0), (0.25, 0.25)])
def test_sanitize_rsa(raw, clean):
    assert sanitize(_profile(rsa=raw)).rsa[0] == clean


def test_sanitize_imputes_and_masks():
    s = sanitize(_profile(ss3=[math.nan] * 3, phi=math.inf))
    assert np.allclose(s.ss3[0], 1 / 3)
    assert np.isnan(s.phi[0]) and not s.phi_mask[0]
    s = sanitize(_profile(ss3=[0, 0, 0]))
    assert np.allclose(s.ss3[0], 1 / 3)


prob = st.floats(0, 1) | st.just(math.nan)
angle = st.floats(-1e4, 1e4) | st.just(math.nan) | st.just(math.inf)
rsa_s = st.floats(-2, 2) | st.just(math.nan) | st.just(-math.inf)


@st.composite
def profiles(draw):
    n = draw(st.integers(1, 6))
    return PriorsProfile(
        "A" * n,
        draw(arrays(float, (n, 3), elements=prob)),
        draw(arrays(float, (n, 8), elements=prob)),
        draw(arrays(float, n, elements=angle)),
        draw(arrays(float, n, elements=angle)),
        draw(arrays(float, n, elements=rsa_s)),
    )


def _same(a, b):
    for f in ("ss3", "ss8", "phi", "psi", "rsa"):
        x, y = getattr(a, f), getattr(b, f)
        if not np.array_equal(x, y, equal_nan=True):
            return False
    return a.sequence == b.sequence


@settings(max_examples=200)
@given(profiles())
def test_sanitize_idempotent_and_clean(p):
    s = sanitize(p)
    assert _same(sanitize(s), s)
    for ss in (s.ss3, s.ss8):
        assert np.all(np.isfinite(ss))
        assert np.allclose(ss.sum(axis=1), 1.0, atol=1e-9)
    assert np.all((s.rsa >= 0) & (s.rsa <= 1))
    for a in (s.phi, s.psi):
        fin = a[np.isfinite(a)]
        assert np.all((fin > -math.pi) & (fin <= math.pi))


@settings(max_examples=100)
@given(profiles())
def test_serialize_round_trip(p):
    s = sanitize(p)
    back = parse_priors(serialize_priors(s))
    assert back.sequence == s.sequence
    for f in ("ss3", "ss8", "rsa"):
        assert np.allclose(getattr(back, f), getattr(s, f), atol=1e-6, rtol=0)
    for f in ("phi", "psi"):
        a, b = getattr(back, f), getattr(s, f)
        assert np.array_equal(np.isnan(a), np.isnan(b))
        ok = np.isfinite(a)
        assert np.all(np.abs(np.angle(np.exp(1j * (a[ok] - b[ok])))) < 1e-6)


def test_read_priors_file(tmp_path):
    path = tmp_path / "p.tsv"
    path.write_text(_table([_row(1, rsa="1.7"), _row(2, phi="NA")]))
    p = read_priors(path)
    assert p.rsa[0] == 1.0 and np.isnan(p.phi[1])
    raw = read_priors(path, clean=False)
    assert raw.rsa[0] == 1.7

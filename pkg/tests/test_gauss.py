"""Gauss code parsing and canonical-form behavior."""

import pytest
from hypothesis import given, strategies as st

from knotfold.gauss import OVER, UNDER, GaussCode, canonicalize, parse_gauss_code

from conftest import code_orbit


def test_parse_overhand():
    code = parse_gauss_code("1- 2+ 3- 1+ 2- 3+")
    assert code.crossing_count == 3
    assert code.entries == (
        (1, UNDER), (2, OVER), (3, UNDER), (1, OVER), (2, UNDER), (3, OVER),
    )
    assert code.to_text() == "1- 2+ 3- 1+ 2- 3+"


def test_parse_empty_is_unknot():
    code = parse_gauss_code("")
    assert code.entries == ()
    assert code.crossing_count == 0
    assert parse_gauss_code("   \n ").entries == ()


def test_parse_normalizes_labels_to_first_encounter():
    assert parse_gauss_code("7- 5+ 7+ 5-").to_text() == "1- 2+ 1+ 2-"


@pytest.mark.parametrize(
    "text",
    ["1+ 1+", "1- 1-", "1+", "1+ 2- 1-", "1x 2+", "+1 1-", "0+ 0-", "1 2"],
)
def test_parse_rejects_malformed(text):
    with pytest.raises(ValueError):
        parse_gauss_code(text)


def test_direct_construction_validates():
    with pytest.raises(ValueError):
        GaussCode(((1, OVER), (1, OVER)))
    with pytest.raises(ValueError):
        GaussCode(((1, 2),))


def test_canonical_invariant_under_cyclic_shift_and_relabel():
    a = parse_gauss_code("1- 2+ 3- 1+ 2- 3+")
    b = parse_gauss_code("2- 3+ 1- 2+ 3- 1+")
    assert canonicalize(a) == canonicalize(b)


def test_canonical_idempotent():
    code = parse_gauss_code("1- 2+ 3- 1+ 2- 3+")
    once = canonicalize(code)
    assert canonicalize(once) == once


def _codes(max_crossings: int):
    """Strategy: random valid Gauss codes with up to max_crossings labels."""

    @st.composite
    def build(draw):
        c = draw(st.integers(min_value=0, max_value=max_crossings))
        labels = list(range(1, c + 1)) * 2
        perm = draw(st.permutations(labels)) if labels else []
        first_pass = {}
        entries = []
        for lab in perm:
            if lab not in first_pass:
                first_pass[lab] = draw(st.sampled_from([OVER, UNDER]))
                entries.append((lab, first_pass[lab]))
            else:
                entries.append((lab, -first_pass[lab]))
        return GaussCode(tuple(entries)).relabeled()

    return build()


@given(_codes(4))
def test_canonical_constant_on_orbit(code):
    canon = canonicalize(code)
    assert canonicalize(canon) == canon
    for variant in code_orbit(code):
        assert canonicalize(GaussCode(variant)) == canon


def test_mirror_not_quotiented():
    # Chiral witness (found by orbit enumeration): its mirror lies outside
    # the rotation/reversal/relabel orbit, so the canonical forms differ.
    chiral = parse_gauss_code("1- 1+ 2- 3+ 2+ 3-")
    assert tuple(chiral.mirrored().relabeled().entries) not in code_orbit(chiral)
    assert canonicalize(chiral) != canonicalize(chiral.mirrored())


def test_alternating_codes_meet_their_mirror_by_rotation():
    # For an alternating code a one-step rotation flips every pass, so the
    # brute-force orbit contains the mirror and the canonical forms agree.
    # (Unsigned Gauss codes cannot see the chirality of alternating knots.)
    overhand = parse_gauss_code("1- 2+ 3- 1+ 2- 3+")
    assert tuple(overhand.mirrored().entries) in code_orbit(overhand)
    assert canonicalize(overhand) == canonicalize(overhand.mirrored())

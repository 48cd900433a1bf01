"""Gauss codes: parsing, validation, and canonical representatives.

A Gauss code records the crossings met while traversing a knot.  Each
crossing label appears exactly twice, once passing over (``+``) and once
passing under (``-``).  The empty code is the unknot.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

OVER = 1
UNDER = -1

_TOKEN_RE = re.compile(r"(\d+)([+-])\Z")


def _relabel(entries: tuple[tuple[int, int], ...]) -> tuple[tuple[int, int], ...]:
    """Renumber labels 1, 2, ... in order of first appearance."""
    mapping: dict[int, int] = {}
    out = []
    for label, sign in entries:
        if label not in mapping:
            mapping[label] = len(mapping) + 1
        out.append((mapping[label], sign))
    return tuple(out)


@dataclass(frozen=True)
class GaussCode:
    """Immutable sequence of (label, pass) pairs with pass OVER(+1) or UNDER(-1)."""

    entries: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        seen: dict[int, list[int]] = {}
        for label, sign in self.entries:
            if label < 1:
                raise ValueError(f"crossing label must be positive, got {label}")
            if sign not in (OVER, UNDER):
                raise ValueError(f"pass must be OVER(+1) or UNDER(-1), got {sign}")
            seen.setdefault(label, []).append(sign)
        for label, signs in seen.items():
            if len(signs) != 2:
                raise ValueError(
                    f"label {label} appears {len(signs)} time(s), expected exactly 2"
                )
            if signs[0] == signs[1]:
                raise ValueError(f"label {label} has the same pass twice")

    @property
    def crossing_count(self) -> int:
        return len(self.entries) // 2

    def relabeled(self) -> "GaussCode":
        """Labels normalized to first-encounter order."""
        return GaussCode(_relabel(self.entries))

    def mirrored(self) -> "GaussCode":
        """All passes flipped (the mirror-image diagram)."""
        return GaussCode(tuple((label, -sign) for label, sign in self.entries))

    def to_text(self) -> str:
        return " ".join(
            f"{label}{'+' if sign == OVER else '-'}" for label, sign in self.entries
        )

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.to_text() or "(unknot)"


def parse_gauss_code(text: str) -> GaussCode:
    """Parse whitespace-separated ``<label><+|->`` tokens.

    ``+`` marks an over-crossing, ``-`` an under-crossing.  Labels are
    normalized to first-encounter order.  An empty string is the unknot.
    """
    entries = []
    for token in text.split():
        m = _TOKEN_RE.match(token)
        if m is None:
            raise ValueError(f"malformed Gauss-code token {token!r}")
        entries.append((int(m.group(1)), OVER if m.group(2) == "+" else UNDER))
    return GaussCode(tuple(entries)).relabeled()


def canonicalize(code: GaussCode) -> GaussCode:
    """Lexicographically minimal representative of a code's traversal orbit.

    The orbit covers every starting point (cyclic rotation), both traversal
    directions, and first-encounter relabeling.  Mirror images (all passes
    flipped) are deliberately *not* identified, preserving chirality.
    Idempotent: two codes reading the same closed diagram agree here.
    """
    seq = code.entries
    if not seq:
        return code
    m = len(seq)
    best = None
    for direction in (seq, seq[::-1]):
        for shift in range(m):
            candidate = _relabel(direction[shift:] + direction[:shift])
            if best is None or candidate < best:
                best = candidate
    return GaussCode(best)

"""Built-in games: CHSH, the Magic Square game, and a tiny 1-in-3 instance."""

from __future__ import annotations

from fractions import Fraction

from . import scalars
from .games import TwoProverGame


def chsh():
    """The CHSH game: accept iff a1 XOR a2 = q1 AND q2, questions uniform."""
    quarter = Fraction(1, 4)
    pi = [[quarter, quarter], [quarter, quarter]]
    R = [[[[Fraction(1) if (a1 ^ a2) == (q1 & q2) else Fraction(0)
            for a2 in range(2)] for a1 in range(2)]
          for q2 in range(2)] for q1 in range(2)]
    return TwoProverGame(2, 2, 2, 2, pi, R, scalars.RATIONAL,
                         labels={"q1": ["x=0", "x=1"], "q2": ["y=0", "y=1"]},
                         meta={"kind": "catalog", "name": "chsh"})


def magic_square_cells(constraint):
    """Cells of constraint ``c``: 0-2 are rows, 3-5 are columns; a cell is
    ``3*i + j``."""
    if constraint < 3:
        return tuple(3 * constraint + j for j in range(3))
    return tuple(3 * i + (constraint - 3) for i in range(3))


def magic_square_game():
    """The Magic Square game (consistency form).

    The verifier draws one of the six row/column constraints and one of its
    three cells.  The first prover fills the constraint's three cells (even
    parity for a row, odd parity for a column); the second prover answers
    one bit for the single cell, which must agree with the first prover's
    entry there.  Answer ``a1`` encodes bits big-endian: the bit for the
    k-th cell of the constraint is ``(a1 >> (2 - k)) & 1``.
    """
    pi = [[Fraction(1, 18) if v in magic_square_cells(c) else Fraction(0)
           for v in range(9)] for c in range(6)]

    def bits(a):
        return ((a >> 2) & 1, (a >> 1) & 1, a & 1)

    R = []
    for c in range(6):
        want_parity = 0 if c < 3 else 1
        cells = magic_square_cells(c)
        R_c = []
        for v in range(9):
            block = []
            for a1 in range(8):
                b1 = bits(a1)
                ok1 = sum(b1) % 2 == want_parity
                if v in cells:
                    shared = b1[cells.index(v)]
                    entry = [Fraction(1) if (ok1 and shared == a2) else Fraction(0)
                             for a2 in range(2)]
                else:
                    entry = [Fraction(1) if ok1 else Fraction(0)] * 2
                block.append(entry)
            R_c.append(block)
        R.append(R_c)
    return TwoProverGame(6, 9, 8, 2, pi, R, scalars.RATIONAL,
                         labels={"q1": ["row 0", "row 1", "row 2",
                                        "col 0", "col 1", "col 2"],
                                 "q2": [f"cell ({i},{j})" for i in range(3)
                                        for j in range(3)]},
                         meta={"kind": "catalog", "name": "magic-square"})


def tiny_1in3_formula():
    """A satisfiable 4-variable 1-in-3 formula (satisfied by 0010)."""
    from .transforms import OneInThreeFormula

    return OneInThreeFormula(4, (((0, True), (1, True), (2, True)),
                                 ((0, False), (1, True), (3, True))))


def tiny_1in3():
    """PCP game of the tiny satisfiable 1-in-3 formula."""
    from .transforms import pcp_from_1in3

    return pcp_from_1in3(tiny_1in3_formula())

"""Instruction alphabet and program codecs.

The alphabet has 70 tokens. Parameterised mnemonics are expanded with
x, y in {p, s, t} and x != y:

    J  Bx Kx  R H W           1 + 3 + 3 + 3 = 10
    Mxy  Mji                  6 + 1          =  7
    Nx Px  Nj Pj              3 + 3 + 2      =  8
    Ib Ii If Is  D            4 + 1          =  5
    Cxy  Cjx  Cxj             6 + 3 + 3      = 12
    Aa As Am Ad An Aq                        =  6
    Sc Sx                                    =  2
    Zx  L1..L15  Le Lp        3 + 15 + 2     = 20
                                               --
                                               70

Changing the alphabet is a single edit to ``MNEMONICS``.
"""

from __future__ import annotations

import enum
import re
from typing import Iterable, Sequence

MNEMONICS: tuple[str, ...] = (
    "J", "Bp", "Bs", "Bt", "Kp", "Ks", "Kt", "R", "H", "W",
    "Mps", "Mpt", "Msp", "Mst", "Mtp", "Mts", "Mji",
    "Np", "Ns", "Nt", "Pp", "Ps", "Pt", "Nj", "Pj",
    "Ib", "Ii", "If", "Is", "D",
    "Cps", "Cpt", "Csp", "Cst", "Ctp", "Cts",
    "Cjp", "Cjs", "Cjt", "Cpj", "Csj", "Ctj",
    "Aa", "As", "Am", "Ad", "An", "Aq",
    "Sc", "Sx",
    "Zp", "Zs", "Zt",
    "L1", "L2", "L3", "L4", "L5", "L6", "L7", "L8",
    "L9", "L10", "L11", "L12", "L13", "L14", "L15",
    "Le", "Lp",
)

Token = enum.IntEnum("Token", [(m, i) for i, m in enumerate(MNEMONICS)])
Token.__doc__ = "An instruction; ``.name`` is the mnemonic, ``.value`` the canonical index."

SIGMA: tuple[Token, ...] = tuple(Token)
ALPHABET_SIZE = len(SIGMA)

# Any token sequence is a program; there is no rejection path.
Program = tuple[Token, ...]

_BY_NAME = {t.name: t for t in SIGMA}
_COMMENT = re.compile(r"#.*$", re.MULTILINE)


class FormatError(ValueError):
    """A word in an ``.isal`` file is not a mnemonic."""

    def __init__(self, word: str, position: int):
        super().__init__(f"unknown mnemonic {word!r} at word {position}")
        self.word = word
        self.position = position


def program(tokens: Iterable[Token | str]) -> tuple[Token, ...]:
    """Build a program from tokens or mnemonic strings."""
    return tuple(t if isinstance(t, Token) else _BY_NAME[t] for t in tokens)


def decode_text(text: str) -> tuple[Token, ...]:
    """Parse whitespace-separated mnemonics; ``#`` starts a comment.

    Raises FormatError(word, position) where position is the 1-based word
    index among non-comment words.
    """
    tokens = []
    for position, word in enumerate(_COMMENT.sub("", text).split(), start=1):
        try:
            tokens.append(_BY_NAME[word])
        except KeyError:
            raise FormatError(word, position) from None
    return tuple(tokens)


def encode_text(prog: Sequence[Token]) -> str:
    return " ".join(t.name for t in prog)


def decode_bytes(data: bytes | bytearray | Iterable[int]) -> tuple[Token, ...]:
    """Total decoder: byte ``v`` is the token with index ``v % 70``."""
    return tuple(SIGMA[b % ALPHABET_SIZE] for b in bytes(data))


def encode_bytes(prog: Sequence[Token]) -> bytes:
    return bytes(int(t) for t in prog)


def program_count(n: int) -> int:
    """Number of programs of length at most ``n``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return sum(ALPHABET_SIZE**k for k in range(n + 1))

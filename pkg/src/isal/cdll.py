"""Circular doubly linked ring with three data cursors.

Nodes live in an index-addressed arena (parallel lists) with free-list
reuse. Arena indices are internal; nothing outside this package sees them.
"""

from __future__ import annotations

import enum
import math
from typing import Iterable, NamedTuple

INT_MIN = -(1 << 63)
INT_MAX = (1 << 63) - 1


class Tag(enum.IntEnum):
    BOOL = 0
    INT = 1
    FLOAT = 2
    STRING = 3


ZERO = {Tag.BOOL: False, Tag.INT: 0, Tag.FLOAT: 0.0, Tag.STRING: ""}

P, S, T = 0, 1, 2
CURSORS = {"p": P, "s": S, "t": T}


TAGS = tuple(Tag)


class Datum(NamedTuple):
    tag: Tag
    value: bool | int | float | str

    @classmethod
    def b(cls, v: bool) -> "Datum":
        return cls(Tag.BOOL, bool(v))

    @classmethod
    def i(cls, v: int) -> "Datum":
        if not INT_MIN <= v <= INT_MAX:
            raise OverflowError(f"{v} does not fit in a signed 64-bit integer")
        return cls(Tag.INT, int(v))

    @classmethod
    def f(cls, v: float) -> "Datum":
        return cls(Tag.FLOAT, float(v))

    @classmethod
    def s(cls, v: str) -> "Datum":
        return cls(Tag.STRING, str(v))

    def key(self):
        """Hashable identity that treats every NaN alike and keeps -0.0 != 0.0."""
        if self.tag is Tag.FLOAT:
            v = self.value
            return (self.tag, "nan" if math.isnan(v) else v.hex())
        return (self.tag, self.value)

    def same(self, other: "Datum") -> bool:
        return self.key() == other.key()


class EmptyInput(ValueError):
    """A ring needs at least one node."""


class TypeMismatch(TypeError):
    """Write of a value whose type differs from the node's fixed tag."""


_PY_TYPE = {Tag.BOOL: bool, Tag.INT: int, Tag.FLOAT: float, Tag.STRING: str}


def _cursor(which) -> int:
    return CURSORS[which] if isinstance(which, str) else which


class Cdll:
    __slots__ = ("nxt", "prv", "tag", "val", "cur", "size", "free")

    def __init__(self):
        self.nxt: list[int] = []
        self.prv: list[int] = []
        self.tag: list[int] = []
        self.val: list = []
        self.cur = [0, 0, 0]
        self.size = 0
        self.free: list[int] = []

    @classmethod
    def from_values(cls, values: Iterable[Datum]) -> "Cdll":
        values = list(values)
        if not values:
            raise EmptyInput("input list must contain at least one value")
        ring = cls()
        k = len(values)
        ring.nxt = [(i + 1) % k for i in range(k)]
        ring.prv = [(i - 1) % k for i in range(k)]
        ring.tag = [int(d.tag) for d in values]
        ring.val = [d.value for d in values]
        ring.size = k
        return ring

    def copy(self) -> "Cdll":
        ring = Cdll()
        ring.nxt = self.nxt[:]
        ring.prv = self.prv[:]
        ring.tag = self.tag[:]
        ring.val = self.val[:]
        ring.cur = self.cur[:]
        ring.size = self.size
        ring.free = self.free[:]
        return ring

    def __len__(self) -> int:
        return self.size

    def _alloc(self, tag: int, value) -> int:
        if self.free:
            i = self.free.pop()
            self.tag[i] = tag
            self.val[i] = value
        else:
            i = len(self.tag)
            self.nxt.append(i)
            self.prv.append(i)
            self.tag.append(tag)
            self.val.append(value)
        return i

    def insert_after(self, datum: Datum, which="p") -> None:
        """Splice a node after the cursor's node and advance that cursor onto it."""
        c = _cursor(which)
        here = self.cur[c]
        i = self._alloc(int(datum.tag), datum.value)
        after = self.nxt[here]
        self.nxt[here] = i
        self.prv[i] = here
        self.nxt[i] = after
        self.prv[after] = i
        self.size += 1
        self.cur[c] = i

    def delete_at_p(self) -> None:
        """Unlink p's node; cursors on it move to its successor. Identity on a singleton."""
        if self.size == 1:
            return
        cur = self.cur
        victim = cur[P]
        before, after = self.prv[victim], self.nxt[victim]
        self.nxt[before] = after
        self.prv[after] = before
        for c in (P, S, T):
            if cur[c] == victim:
                cur[c] = after
        self.val[victim] = None
        self.free.append(victim)
        self.size -= 1

    def move_next(self, which) -> None:
        c = _cursor(which)
        self.cur[c] = self.nxt[self.cur[c]]

    def move_prev(self, which) -> None:
        c = _cursor(which)
        self.cur[c] = self.prv[self.cur[c]]

    def move_to(self, x, y) -> None:
        self.cur[_cursor(x)] = self.cur[_cursor(y)]

    def read(self, which) -> Datum:
        i = self.cur[_cursor(which)]
        return Datum(TAGS[self.tag[i]], self.val[i])

    def write(self, which, value) -> None:
        i = self.cur[_cursor(which)]
        tag = Tag(self.tag[i])
        # bool is a subclass of int; require the exact Python type
        if type(value) is not _PY_TYPE[tag]:
            raise TypeMismatch(f"cannot store {type(value).__name__} in {tag.name.lower()} node")
        if tag is Tag.INT and not INT_MIN <= value <= INT_MAX:
            raise OverflowError(f"{value} does not fit in a signed 64-bit integer")
        self.val[i] = value

    def snapshot_from_p(self) -> list[Datum]:
        return self.snapshot_from("p")

    def snapshot_from(self, which) -> list[Datum]:
        out = []
        i = self.cur[_cursor(which)]
        nxt, tag, val = self.nxt, self.tag, self.val
        for _ in range(self.size):
            out.append(Datum(TAGS[tag[i]], val[i]))
            i = nxt[i]
        return out

    def offset(self, which) -> int:
        """Distance from p to the cursor, following next links."""
        target = self.cur[_cursor(which)]
        i = self.cur[P]
        for k in range(self.size):
            if i == target:
                return k
            i = self.nxt[i]
        raise AssertionError("cursor is not on the ring")

    def canonical(self) -> tuple:
        """Observable state: contents from p plus the s and t offsets.

        Two rings with equal canonical forms are indistinguishable to any
        program.
        """
        return (
            tuple(d.key() for d in self.snapshot_from_p()),
            self.offset(S),
            self.offset(T),
        )

    def check(self) -> None:
        """Assert the structural invariants."""
        assert self.size >= 1
        start = self.cur[P]
        seen = set()
        i = start
        for _ in range(self.size):
            assert self.prv[self.nxt[i]] == i
            assert self.nxt[self.prv[i]] == i
            seen.add(i)
            i = self.nxt[i]
        assert i == start and len(seen) == self.size
        assert all(c in seen for c in self.cur)
        for i in seen:
            assert type(self.val[i]) is _PY_TYPE[Tag(self.tag[i])]

    def __repr__(self) -> str:
        items = ", ".join(repr(d.value) for d in self.snapshot_from_p())
        return f"Cdll([{items}], s=+{self.offset(S)}, t=+{self.offset(T)})"

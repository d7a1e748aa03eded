"""Edit distance over programs, edit paths, mutation, and (1+lambda) search.

Every token sequence is a runnable program, so any edit of any program is
again a program. That makes the plain token-level Levenshtein metric a
usable neighbourhood structure for local search.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

from .cdll import Datum, Tag
from .isa import SIGMA, Token, decode_text, encode_text
from .literals import parse_literals
from .vm import Status, run


class EditKind(enum.Enum):
    INSERT = "Insert"
    DELETE = "Delete"
    SUBSTITUTE = "Substitute"


class EditOp(NamedTuple):
    kind: EditKind
    position: int
    token: Token | None = None

    def apply(self, p: Sequence[Token]) -> tuple[Token, ...]:
        p = tuple(p)
        i = self.position
        if self.kind is EditKind.INSERT:
            return p[:i] + (self.token,) + p[i:]
        if self.kind is EditKind.DELETE:
            return p[:i] + p[i + 1:]
        return p[:i] + (self.token,) + p[i + 1:]


# -- metric -----------------------------------------------------------------


def _suffix_table(a, b):
    """``D[i][j]`` is the distance between ``a[i:]`` and ``b[j:]``."""
    n, m = len(a), len(b)
    D = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        D[i][m] = n - i
    for j in range(m + 1):
        D[n][j] = m - j
    for i in range(n - 1, -1, -1):
        row, below = D[i], D[i + 1]
        ai = a[i]
        for j in range(m - 1, -1, -1):
            if ai == b[j]:
                row[j] = below[j + 1]
            else:
                row[j] = 1 + min(below[j + 1], below[j], row[j + 1])
    return D


def levenshtein(a: Sequence[Token], b: Sequence[Token]) -> int:
    a, b = tuple(a), tuple(b)
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] if x == y else 1 + min(prev[j - 1], prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def edit_script(a: Sequence[Token], b: Sequence[Token]) -> list[EditOp]:
    """Minimal edits turning ``a`` into ``b``, applied left to right.

    Positions refer to the program as it stands when the edit is applied.
    Ties prefer Substitute, then Delete, then Insert.
    """
    a, b = tuple(a), tuple(b)
    D = _suffix_table(a, b)
    ops = []
    i = j = 0
    while i < len(a) or j < len(b):
        d = D[i][j]
        if i < len(a) and j < len(b) and a[i] == b[j] and d == D[i + 1][j + 1]:
            i += 1
            j += 1
        elif i < len(a) and j < len(b) and d == D[i + 1][j + 1] + 1:
            ops.append(EditOp(EditKind.SUBSTITUTE, j, b[j]))
            i += 1
            j += 1
        elif i < len(a) and d == D[i + 1][j] + 1:
            ops.append(EditOp(EditKind.DELETE, j))
            i += 1
        else:
            ops.append(EditOp(EditKind.INSERT, j, b[j]))
            j += 1
    return ops


def edit_path(a: Sequence[Token], b: Sequence[Token]) -> list[tuple[Token, ...]]:
    cur = tuple(a)
    path = [cur]
    for op in edit_script(a, b):
        cur = op.apply(cur)
        path.append(cur)
    assert cur == tuple(b)
    return path


# -- examples and fitness ---------------------------------------------------


@dataclass(frozen=True)
class IoExample:
    inputs: tuple[Datum, ...]
    expected_outputs: tuple[Datum, ...]

    def __post_init__(self):
        if not self.inputs:
            raise ValueError("an example needs at least one input")


def _bars(line: str) -> list[int]:
    """Positions of ``|`` outside string literals."""
    found, quoted, escaped = [], False, False
    for i, ch in enumerate(line):
        if escaped:
            escaped = False
        elif ch == "\\" and quoted:
            escaped = True
        elif ch == '"':
            quoted = not quoted
        elif ch == "|" and not quoted:
            found.append(i)
    return found


def parse_examples(text: str) -> list[IoExample]:
    """One example per line, ``inputs | outputs``; lines starting with ``#`` are comments."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        bars = _bars(line)
        if len(bars) != 1:
            raise ValueError(f"line {lineno}: expected 'inputs | outputs'")
        left, right = line[: bars[0]], line[bars[0] + 1:]
        out.append(IoExample(tuple(parse_literals(left)), tuple(parse_literals(right))))
    return out


REL_TOL = 1e-9


def datum_agrees(x: Datum, y: Datum) -> bool:
    if x.tag != y.tag:
        return False
    if x.tag is Tag.FLOAT:
        if math.isnan(x.value) or math.isnan(y.value):
            return math.isnan(x.value) and math.isnan(y.value)
        return x.value == y.value or math.isclose(x.value, y.value, rel_tol=REL_TOL)
    return x.value == y.value


class Fitness(NamedTuple):
    """Lexicographic key; larger is better."""

    matched: int
    agreement: int
    neg_steps: int
    neg_length: int

    @property
    def behaviour(self) -> tuple[int, int]:
        return self.matched, self.agreement


def evaluate(p: Sequence[Token], examples: Sequence[IoExample], fuel: int) -> Fitness:
    matched = agreement = steps = 0
    for ex in examples:
        out = run(p, ex.inputs, fuel)
        steps += out.steps
        if out.status is not Status.HALTED:
            continue
        agree = sum(datum_agrees(x, y) for x, y in zip(out.outputs, ex.expected_outputs))
        agreement += agree
        # the ring may keep scratch nodes after the answer; only the
        # leading len(expected) outputs are compared
        matched += (len(out.outputs) >= len(ex.expected_outputs) == agree)
    return Fitness(matched, agreement, -steps, -len(p))


# -- mutation and search ----------------------------------------------------


@dataclass
class SearchConfig:
    seed_program: tuple[Token, ...] = ()
    examples: list[IoExample] = field(default_factory=list)
    fuel: int = 1000
    insert_weight: float = 1.0
    delete_weight: float = 1.0
    substitute_weight: float = 1.0
    offspring: int = 32
    max_generations: int = 200
    seed: int = 0

    def validate(self) -> None:
        w = (self.insert_weight, self.delete_weight, self.substitute_weight)
        if min(w) < 0 or sum(w) == 0:
            raise ValueError("mutation weights must be non-negative and not all zero")
        if self.fuel < 1:
            raise ValueError("fuel must be at least 1")
        if self.offspring < 1 or self.max_generations < 0:
            raise ValueError("offspring must be positive and max_generations non-negative")

    @classmethod
    def from_dict(cls, d: dict, base: Path | None = None) -> "SearchConfig":
        """Build from a JSON-style mapping.

        ``seed_program`` is program text; examples come either inline as a
        list of ``inputs | outputs`` lines or from ``examples_file``,
        resolved against ``base``.
        """
        d = dict(d)
        known = {"seed_program", "examples", "examples_file", "fuel", "weights",
                 "offspring", "max_generations", "seed"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "examples_file" in d:
            path = Path(d.pop("examples_file"))
            if base is not None and not path.is_absolute():
                path = base / path
            examples = parse_examples(path.read_text())
        else:
            examples = parse_examples("\n".join(d.pop("examples", [])))
        weights = d.pop("weights", {})
        cfg = cls(
            seed_program=decode_text(d.pop("seed_program", "")),
            examples=examples,
            insert_weight=weights.get("insert", 1.0),
            delete_weight=weights.get("delete", 1.0),
            substitute_weight=weights.get("substitute", 1.0),
            **d,
        )
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "SearchConfig":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text()), base=path.parent)


def random_edit(p: Sequence[Token], rng: random.Random, config: SearchConfig) -> EditOp:
    kinds = [EditKind.INSERT, EditKind.DELETE, EditKind.SUBSTITUTE]
    weights = [config.insert_weight, config.delete_weight, config.substitute_weight]
    kind = rng.choices(kinds, weights)[0]
    if not p:
        kind = EditKind.INSERT  # nothing to delete or substitute
    if kind is EditKind.INSERT:
        return EditOp(kind, rng.randint(0, len(p)), rng.choice(SIGMA))
    if kind is EditKind.DELETE:
        return EditOp(kind, rng.randrange(len(p)))
    return EditOp(kind, rng.randrange(len(p)), rng.choice(SIGMA))


def mutate(p: Sequence[Token], rng: random.Random, config: SearchConfig) -> tuple[Token, ...]:
    return random_edit(p, rng, config).apply(p)


@dataclass
class Candidate:
    program: tuple[Token, ...]
    fitness: Fitness


@dataclass
class SearchResult:
    best: Candidate
    generations: int
    log: str  # CSV
    example_count: int

    @property
    def solved(self) -> bool:
        return self.best.fitness.matched == self.example_count


LOG_FIELDS = ["generation", "matched", "agreement", "steps", "length", "distance", "program"]


def search(config: SearchConfig) -> SearchResult:
    """(1+lambda) hill climbing.

    Each generation breeds ``offspring`` single-edit mutants of the parent.
    The best mutant replaces the parent when its behaviour (matched
    examples, then datum agreement) is at least as good; equal behaviour
    still moves, which lets the walk drift across plateaus instead of
    pinning it to the shortest program. The best candidate ever seen under
    the full fitness key is returned.
    """
    config.validate()
    rng = random.Random(config.seed)
    total = len(config.examples)
    seed = tuple(config.seed_program)
    parent = Candidate(seed, evaluate(seed, config.examples, config.fuel))
    best = parent
    buf = io.StringIO()
    log = csv.writer(buf, lineterminator="\n")
    log.writerow(LOG_FIELDS)

    def record(gen):
        f = best.fitness
        log.writerow([gen, f.matched, f.agreement, -f.neg_steps, -f.neg_length,
                      levenshtein(seed, best.program), encode_text(best.program)])

    gen = 0
    record(gen)
    while best.fitness.matched < total and gen < config.max_generations:
        gen += 1
        children = []
        for _ in range(config.offspring):
            child = mutate(parent.program, rng, config)
            children.append(Candidate(child, evaluate(child, config.examples, config.fuel)))
        # The parent moves on behaviour alone; ranking by the full key here
        # would keep choosing the shortest neutral mutant and stall the walk.
        top = max(children, key=lambda c: c.fitness.behaviour)
        if top.fitness.behaviour >= parent.fitness.behaviour:
            parent = top
        for c in children:
            if c.fitness > best.fitness:
                best = c
        record(gen)
    return SearchResult(best, gen, buf.getvalue(), total)


def increment_config(seed: int = 42) -> SearchConfig:
    """The x -> x+1 synthesis task over three examples."""
    examples = [IoExample((Datum.i(x),), (Datum.i(x + 1),)) for x in (0, 4, 10)]
    return SearchConfig(examples=examples, fuel=1000, offspring=32, max_generations=200, seed=seed)

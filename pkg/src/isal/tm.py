"""Compile single-tape Turing machines to programs.

The compiled program receives the tape as its input list, head on the first
cell, and returns it with the head cell under ``p``.

Scratch plan
------------
The prologue inserts a block of scratch nodes between the right end of the
tape and its left end (the ring wraps)::

    ... tape ... | MARK_R STATE SYM ONE FLAG TABLE[0..m) AUX1 AUX2 MARK_L | tape ...

* ``MARK_R``/``MARK_L`` are float 1.0 sentinels. Tape cells are ints, so a
  head that lands on a float has walked off the materialised tape; a fresh
  blank cell is inserted with ``Ii`` and the head moves onto it.
* ``STATE`` holds the state index, ``SYM`` the scanned symbol during
  dispatch, ``ONE`` the int 1, ``FLAG`` a float used for the sentinel test.
* ``TABLE`` holds every jump target and every symbol/state constant above 15,
  synthesised by :func:`emit_const` in the prologue.

``p`` is the head. ``s`` and ``t`` never leave the scratch block except for a
single decrement step, so their offsets are known statically everywhere.
The head cell doubles as the accumulator: its symbol is saved to ``SYM``
first and the new symbol is written last.

One TM step runs: dispatch on the state by decrement-and-branch (``As`` then
``Bp``), dispatch on the symbol the same way, then the transition block
writes the state and symbol and calls a shared move subroutine with ``Ks``;
the subroutine moves the head, extends the tape if needed and returns with
``R``. Every jump loads ``jp`` from the table with ``Csj``.

TM file format
--------------
Line based, ``#`` starts a comment, blank lines ignored::

    states N symbols M start Q
    q a -> q2 a2 L|R

All fields are non-negative decimal integers. Symbol 0 is the blank. A
missing (state, symbol) entry halts the machine.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cdll import Datum, Tag
from .isa import Token, program
from .vm import Status, run

LEFT, RIGHT = "L", "R"
MAX_CONST = 2**31


class InvalidSpec(ValueError):
    pass


class OutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class TmSpec:
    state_count: int
    symbol_count: int
    start_state: int
    transitions: dict = field(default_factory=dict)  # (q, a) -> (q2, a2, "L" | "R")

    def validate(self) -> None:
        if self.state_count < 1:
            raise InvalidSpec("state_count must be at least 1")
        if self.symbol_count < 2:
            raise InvalidSpec("symbol_count must be at least 2")
        if not 0 <= self.start_state < self.state_count:
            raise InvalidSpec(f"start state {self.start_state} out of range")
        for (q, a), (q2, a2, d) in self.transitions.items():
            for what, v, hi in (("state", q, self.state_count), ("symbol", a, self.symbol_count),
                                ("state", q2, self.state_count), ("symbol", a2, self.symbol_count)):
                if not 0 <= v < hi:
                    raise InvalidSpec(f"{what} {v} out of range in transition {q} {a}")
            if d not in (LEFT, RIGHT):
                raise InvalidSpec(f"direction must be L or R, got {d!r}")
        if len(self.transitions) >= self.state_count * self.symbol_count:
            raise InvalidSpec("no halting configuration: every (state, symbol) has a transition")


_HEADER = re.compile(r"^states\s+(\d+)\s+symbols\s+(\d+)\s+start\s+(\d+)$")
_RULE = re.compile(r"^(\d+)\s+(\d+)\s*->\s*(\d+)\s+(\d+)\s+([LR])$")


def parse_tm(text: str) -> TmSpec:
    header = None
    transitions = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            m = _HEADER.match(line)
            if not m:
                raise InvalidSpec(f"line {lineno}: expected 'states N symbols M start Q'")
            header = tuple(int(g) for g in m.groups())
            continue
        m = _RULE.match(line)
        if not m:
            raise InvalidSpec(f"line {lineno}: expected 'q a -> q2 a2 L|R'")
        q, a, q2, a2 = (int(g) for g in m.groups()[:4])
        if (q, a) in transitions:
            raise InvalidSpec(f"line {lineno}: duplicate transition for ({q}, {a})")
        transitions[(q, a)] = (q2, a2, m.group(5))
    if header is None:
        raise InvalidSpec("missing header line")
    spec = TmSpec(header[0], header[1], header[2], transitions)
    spec.validate()
    return spec


def format_tm(spec: TmSpec) -> str:
    lines = [f"states {spec.state_count} symbols {spec.symbol_count} start {spec.start_state}"]
    for (q, a), (q2, a2, d) in sorted(spec.transitions.items()):
        lines.append(f"{q} {a} -> {q2} {a2} {d}")
    return "\n".join(lines) + "\n"


# -- direct simulation -------------------------------------------------------


@dataclass
class TmRun:
    tape: list[int]
    head: int
    halted: bool
    steps: int


def run_tm(spec: TmSpec, tape: Sequence[int], head: int = 0, max_steps: int = 10_000) -> TmRun:
    if not tape:
        raise ValueError("tape must be non-empty")
    if not 0 <= head < len(tape):
        raise ValueError("head out of range")
    tape = list(tape)
    state = spec.start_state
    for steps in range(max_steps):
        rule = spec.transitions.get((state, tape[head]))
        if rule is None:
            return TmRun(tape, head, True, steps)
        state, tape[head], d = rule
        if d == RIGHT:
            head += 1
            if head == len(tape):
                tape.append(0)
        else:
            if head == 0:
                tape.insert(0, 0)
            else:
                head -= 1
    return TmRun(tape, head, False, max_steps)


def simulate_tm(spec: TmSpec, tape: Sequence[int], head: int = 0, max_steps: int = 10_000):
    """Reference semantics: returns ``(tape, halted)``."""
    r = run_tm(spec, tape, head, max_steps)
    return r.tape, r.halted


def normalize_tape(tape: Iterable[int]) -> list[int]:
    tape = list(tape)
    lo, hi = 0, len(tape)
    while lo < hi and tape[lo] == 0:
        lo += 1
    while hi > lo and tape[hi - 1] == 0:
        hi -= 1
    return tape[lo:hi]


# -- constant synthesis ------------------------------------------------------


def _walk(cursor: str, frm: int, to: int) -> list[str]:
    step = ("N" if to > frm else "P") + cursor
    return [step] * abs(to - frm)


def emit_const(k: int) -> tuple[Token, ...]:
    """Tokens that leave int ``k`` in the p-node.

    Convention: ``p``, ``s``, ``t`` sit on three consecutive int nodes
    ``X, X+1, X+2``. The fragment clobbers ``X+1`` and ``X+2`` and puts
    every cursor back where it started.
    """
    if not 0 <= k <= MAX_CONST:
        raise OutOfRange(f"constant {k} outside [0, {MAX_CONST}]")
    if k == 0:
        return program(["Zp"])
    if k <= 15:
        return program([f"L{k}"])
    digits = []
    while k:
        k, d = divmod(k, 15)
        digits.append(d)
    digits.reverse()
    out = ["Np", "Np", "L15", "Pp", "Pp", f"L{digits[0]}", "Ps"]
    for d in digits[1:]:
        out.append("Am")  # X <- X * 15
        if d:
            out += ["Np", f"L{d}", "Pp", "Pt", "Aa", "Nt"]  # X <- X + d
    out.append("Ns")
    return program(out)


# -- compilation -------------------------------------------------------------

MARK_R, STATE, SYM, ONE, FLAG = 0, 1, 2, 3, 4
TABLE = 5


class _Ref:
    """Placeholder for the table slot of a label; resolved after layout."""

    def __init__(self, name):
        self.name = name


class _Asm:
    """Body emitter that tracks the statically known offsets of ``s`` and ``t``."""

    def __init__(self):
        self.code: list[str] = []
        self.labels: dict[str, int] = {}
        self.slots: dict[str, int] = {}
        self.entry_t: dict[str, int] = {}
        self.s: int | None = None
        self.t: int | None = None

    def slot(self, key) -> int:
        if key not in self.slots:
            self.slots[key] = len(self.slots)
        return self.slots[key]

    def emit(self, *tokens: str) -> None:
        self.code.extend(tokens)

    def move(self, cursor: str, to: int) -> None:
        frm = getattr(self, cursor)
        assert frm is not None, f"{cursor} position unknown"
        self.emit(*_walk(cursor, frm, to))
        setattr(self, cursor, to)

    def declare(self, name: str, t: int = ONE) -> None:
        self.entry_t[name] = t
        self.slot(name)

    def place(self, name: str) -> None:
        expect = (TABLE + self.slot(name), self.entry_t[name])
        if self.s is not None:
            assert (self.s, self.t) == expect, f"fallthrough into {name} with wrong cursors"
        self.labels[name] = len(self.code)
        self.s, self.t = expect

    def _target(self, name: str) -> None:
        self.move("s", TABLE + self.slot(name))
        self.emit("Csj")
        self.move("t", self.entry_t[name])

    def goto(self, name: str) -> None:
        self._target(name)
        self.emit("J")
        self.s = self.t = None

    def branch_head(self, name: str) -> None:
        """Jump to ``name`` if the head cell is non-zero."""
        self._target(name)
        self.emit("Bp")

    def call(self, name: str, returns_with: tuple[int, int]) -> None:
        self.move("s", TABLE + self.slot(name))
        self.move("t", self.entry_t[name])
        self.emit("Ks")
        self.s, self.t = returns_with

    def end(self, token: str) -> None:
        self.emit(token)
        self.s = self.t = None


@dataclass
class CompileOutput:
    program: tuple
    layout: dict            # (q, a) -> (first, last) instruction indices, 1-based inclusive
    scratch_plan: dict      # role -> offset from MARK_R
    prologue_length: int
    body_length: int
    table: dict             # label or ("const", v) -> stored value

    @property
    def scratch_size(self) -> int:
        return self.scratch_plan["MARK_L"] + 1

    def step_bound(self, tm_steps: int) -> int:
        """VM steps sufficient for a machine that halts after ``tm_steps`` steps.

        No instruction of the body runs twice within one TM step, so each
        step (plus the final halting dispatch) costs at most ``body_length``.
        """
        return self.prologue_length + (tm_steps + 1) * self.body_length

    def extract_tape(self, outputs: Sequence[Datum]) -> list[int] | None:
        """Tape cells in left-to-right order from a final ring, or None if malformed."""
        n = len(outputs)
        span = self.scratch_size
        for i, d in enumerate(outputs):
            if d.tag is Tag.FLOAT and d.value == 1.0:
                first = outputs[(i - span + 1) % n]
                if first.tag is Tag.FLOAT and first.value == 1.0 and n > span:
                    cells = [outputs[(i + 1 + k) % n] for k in range(n - span)]
                    if all(c.tag is Tag.INT for c in cells):
                        return [c.value for c in cells]
        return None

    def inputs_for(self, tape: Sequence[int]) -> list[Datum]:
        return [Datum.i(v) for v in (tape or [0])]


def _load_head(asm: _Asm, value: int) -> None:
    if value == 0:
        asm.emit("Zp")
    elif value <= 15:
        asm.emit(f"L{value}")
    else:
        asm.move("t", TABLE + asm.slot(("const", value)))
        asm.emit("Ctp")


def _decrement_head(asm: _Asm) -> None:
    asm.emit("Msp")
    asm.s = None
    asm.move("t", ONE)
    asm.emit("As", "Mst")
    asm.s = ONE


def _body(spec: TmSpec) -> _Asm:
    asm = _Asm()
    n_states, n_symbols = spec.state_count, spec.symbol_count
    trans = spec.transitions
    live_states = {q for q, _ in trans}

    for name in ("DISPATCH", "HALT", "MOVE_L", "MOVE_R"):
        asm.declare(name)
    for name in ("EXT_L", "EXT_R"):
        asm.declare(name, t=FLAG)
    for q in range(n_states):
        if q:
            asm.declare(f"ST{q}")
        if q in live_states:
            asm.declare(f"SEC{q}")
            for a in range(1, max(a for qq, a in trans if qq == q) + 1):
                asm.declare(f"SY{q}_{a}")
            for a in range(n_symbols):
                if (q, a) in trans:
                    asm.declare(f"B{q}_{a}")
    asm.s, asm.t = TABLE + asm.slot("DISPATCH"), ONE
    asm.place("DISPATCH")
    asm.move("t", SYM)
    asm.emit("Cpt")  # SYM <- scanned symbol
    asm.move("t", STATE)
    asm.emit("Ctp")  # head <- state index

    for q in range(n_states):
        if q:
            asm.place(f"ST{q}")
            _decrement_head(asm)
        asm.branch_head(f"ST{q + 1}" if q + 1 < n_states else "HALT")
        asm.goto(f"SEC{q}" if q in live_states else "HALT")

    blocks = {}
    for q in sorted(live_states):
        asm.place(f"SEC{q}")
        asm.move("t", SYM)
        asm.emit("Ctp")  # head <- symbol
        last = max(a for (qq, a) in trans if qq == q)
        for a in range(last + 1):
            if a:
                asm.place(f"SY{q}_{a}")
                _decrement_head(asm)
            asm.branch_head(f"SY{q}_{a + 1}" if a < last else "HALT")
            asm.goto(f"B{q}_{a}" if (q, a) in trans else "HALT")
        for a in range(last + 1):
            if (q, a) not in trans:
                continue
            q2, a2, d = trans[(q, a)]
            start = len(asm.code)
            asm.place(f"B{q}_{a}")
            _load_head(asm, q2)
            asm.move("t", STATE)
            asm.emit("Cpt")  # STATE <- q2
            _load_head(asm, a2)
            ext = "EXT_R" if d == RIGHT else "EXT_L"
            asm.call("MOVE_R" if d == RIGHT else "MOVE_L", (TABLE + asm.slot(ext), FLAG))
            asm.goto("DISPATCH")
            blocks[(q, a)] = (start, len(asm.code) - 1)

    asm.place("HALT")
    asm.move("t", SYM)
    asm.emit("Ctp")  # restore the scanned symbol
    asm.end("H")

    for d, step, back in ((RIGHT, "Np", ["Pp", "Ii"]), (LEFT, "Pp", ["Ii"])):
        ext = "EXT_R" if d == RIGHT else "EXT_L"
        asm.place("MOVE_R" if d == RIGHT else "MOVE_L")
        asm.emit(step)
        asm.move("s", TABLE + asm.slot(ext))
        asm.emit("Csj")
        asm.move("t", FLAG)
        asm.emit("Zt", "Cpt", "Bt")  # FLAG <- 1.0 only if the head is a sentinel
        asm.end("R")
        asm.place(ext)
        asm.emit(*back, "Zt")
        asm.end("R")

    asm.blocks = blocks
    return asm


def _prologue(spec: TmSpec, values: list[int]) -> list[str]:
    m = len(values)
    aux1 = TABLE + m
    mark_l = aux1 + 2
    out = ["Pp", "If", "L1", "Ii", "Ii", "Ii", "If"] + ["Ii"] * m + ["Ii", "Ii", "If", "L1"]
    pos = {"p": mark_l, "s": mark_l + 1, "t": mark_l + 1}

    def move(c, to):
        out.extend(_walk(c, pos[c], to))
        pos[c] = to

    def const_at(x, value):
        move("p", x)
        if value > 15:
            move("s", x + 1)
            move("t", x + 2)
        out.extend(t.name for t in emit_const(value))

    const_at(STATE, spec.start_state)
    move("p", ONE)
    out.append("L1")
    for i, v in enumerate(values):
        const_at(TABLE + i, v)
    move("p", mark_l + 1)  # back onto the first tape cell
    move("s", TABLE)       # DISPATCH occupies slot 0
    move("t", ONE)
    return out


def compile_tm(spec: TmSpec) -> CompileOutput:
    spec.validate()
    asm = _body(spec)
    assert asm.slots["DISPATCH"] == 0
    keys = sorted(asm.slots, key=asm.slots.get)
    prologue_len = 0
    for _ in range(64):
        values = [
            k[1] if isinstance(k, tuple) else prologue_len + asm.labels[k] + 1
            for k in keys
        ]
        pro = _prologue(spec, values)
        if len(pro) <= prologue_len:
            pro += ["W"] * (prologue_len - len(pro))  # pad so addresses stay fixed
            break
        prologue_len = len(pro)
    else:  # pragma: no cover - the assumed length only grows, so this converges
        raise AssertionError("prologue layout did not converge")
    body = program(asm.code)
    layout = {
        qa: (prologue_len + a + 1, prologue_len + b + 1) for qa, (a, b) in asm.blocks.items()
    }
    m = len(keys)
    plan = {
        "MARK_R": MARK_R, "STATE": STATE, "SYM": SYM, "ONE": ONE, "FLAG": FLAG,
        "TABLE": TABLE, "AUX1": TABLE + m, "AUX2": TABLE + m + 1, "MARK_L": TABLE + m + 2,
    }
    return CompileOutput(
        program=program(pro) + body,
        layout=layout,
        scratch_plan=plan,
        prologue_length=prologue_len,
        body_length=len(body),
        table=dict(zip(keys, values)),
    )


# -- equivalence -------------------------------------------------------------


@dataclass
class CaseReport:
    tape: list[int]
    expected: list[int] | None
    actual: list[int] | None
    status: str  # match | mismatch | vm-diverged | tm-diverged | malformed
    vm_steps: int
    tm_steps: int

    @property
    def ok(self) -> bool:
        return self.status == "match"


@dataclass
class EquivalenceReport:
    cases: list[CaseReport]

    @property
    def matches(self) -> int:
        return sum(c.ok for c in self.cases)

    @property
    def all_match(self) -> bool:
        return self.matches == len(self.cases)

    def summary(self) -> str:
        return f"{self.matches}/{len(self.cases)} match"


def check_equivalence(
    spec: TmSpec,
    tapes: Iterable[Sequence[int]],
    fuel: int = 1_000_000,
    compiled: CompileOutput | None = None,
) -> EquivalenceReport:
    """Run each tape through the simulator and the compiled program."""
    compiled = compiled or compile_tm(spec)
    cases = []
    for tape in tapes:
        tape = list(tape) or [0]
        ref = run_tm(spec, tape, 0, fuel)
        outcome = run(compiled.program, compiled.inputs_for(tape), fuel)
        expected = normalize_tape(ref.tape) if ref.halted else None
        cells = compiled.extract_tape(outcome.outputs)
        actual = normalize_tape(cells) if cells is not None else None
        if not ref.halted:
            status = "tm-diverged"
        elif outcome.status is not Status.HALTED:
            status = "vm-diverged"
        elif cells is None:
            status = "malformed"
        else:
            status = "match" if actual == expected else "mismatch"
        cases.append(CaseReport(tape, expected, actual, status, outcome.steps, ref.steps))
    return EquivalenceReport(cases)


# -- sample machines ---------------------------------------------------------


def vacuous_machine() -> TmSpec:
    return TmSpec(1, 2, 0, {})


def unary_increment() -> TmSpec:
    """Scan right over 1s, write 1 on the first blank, halt."""
    return TmSpec(2, 2, 0, {(0, 1): (0, 1, RIGHT), (0, 0): (1, 1, RIGHT)})


def binary_successor() -> TmSpec:
    """Add one to a binary numeral stored least significant digit first.

    Digits are symbols 1 (bit 0) and 2 (bit 1); 0 is the blank.
    """
    return TmSpec(2, 3, 0, {
        (0, 2): (0, 1, RIGHT),   # 1 + carry = 0, carry on
        (0, 1): (1, 2, RIGHT),   # 0 + carry = 1, done
        (0, 0): (1, 2, RIGHT),   # ran off the end: new digit 1
    })


def encode_binary(n: int) -> list[int]:
    digits = []
    while True:
        digits.append(2 if n & 1 else 1)
        n >>= 1
        if not n:
            return digits


def decode_binary(tape: Sequence[int]) -> int:
    return sum(1 << i for i, d in enumerate(normalize_tape(tape)) if d == 2)

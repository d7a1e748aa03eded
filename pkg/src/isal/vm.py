"""The virtual machine: state, dispatch for every token, fueled runs, traces.

Every erroneous situation is a defined no-op: memory, jp and stack are left
alone and ip advances by one.

Resolved semantics (the instruction table leaves these open):

* ``Kx`` pushes ip+1 and jumps only if the node holds an int in [1, n+1];
  otherwise nothing is pushed.
* ``R`` on an empty stack, ``Cxj``/``Kx`` with a non-address, and loads into
  a node of the wrong type are no-ops.
* ``Mji`` sets jp to the index of the ``Mji`` itself.
* ``Nj``/``Pj`` saturate jp to [1, n+1]; reaching n+1 by a jump halts.
* Branch truthiness: bool as is, int != 0, float != 0.0 (NaN is true),
  string non-empty.
* Arithmetic runs in the int domain when both operands are int (64-bit
  two's-complement wrap, division truncates toward zero) and in the float
  domain otherwise. Float p-nodes take any numeric result, int p-nodes only
  int-domain results, anything else is a no-op. Division by zero and NaN
  results are no-ops; infinities are stored.
* ``Cxy`` needs exactly equal tags.
* ``Sc`` refuses results longer than ``MAX_STRING_LENGTH`` characters so that
  repeated doubling cannot exhaust memory.
"""

from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .cdll import INT_MAX, INT_MIN, P, S, T, Cdll, Datum, Tag
from .isa import Token

HALT = 0
MAX_STRING_LENGTH = 1 << 16

_BOOL, _INT, _FLOAT, _STR = int(Tag.BOOL), int(Tag.INT), int(Tag.FLOAT), int(Tag.STRING)
_ZEROS = (False, 0, 0.0, "")
_U64 = (1 << 64) - 1


class Status(enum.Enum):
    HALTED = "Halted"
    FUEL_EXHAUSTED = "FuelExhausted"


@dataclass
class VmState:
    program: tuple
    ip: int
    jp: int
    stack: list[int]
    memory: Cdll
    steps: int = 0
    # shallowest stack depth since the last reset; maintained by R
    low_water: list = field(default_factory=lambda: [0], repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.program)

    @property
    def halted(self) -> bool:
        return self.ip == HALT

    def copy(self) -> "VmState":
        return VmState(self.program, self.ip, self.jp, self.stack[:], self.memory.copy(), self.steps)

    def observable(self) -> tuple:
        """Everything a program can observe, for exact state comparison."""
        return (self.ip, self.jp, tuple(self.stack), self.memory.canonical(), self.steps)


class TraceRecord(NamedTuple):
    step: int
    ip_before: int
    token: Token
    ip_after: int
    jp: int
    stack_depth: int
    digest: str

    def line(self) -> str:
        ip_after = "HALT" if self.ip_after == HALT else str(self.ip_after)
        return f"{self.step}\t{self.ip_before}\t{self.token.name}\t{ip_after}\t{self.jp}\t{self.stack_depth}"


@dataclass
class RunOutcome:
    status: Status
    outputs: list[Datum]
    steps: int
    final: VmState = field(repr=False)

    @property
    def halted(self) -> bool:
        return self.status is Status.HALTED


def init(prog: Sequence[Token], inputs: Sequence[Datum]) -> VmState:
    memory = Cdll.from_values(inputs)
    start = HALT if len(prog) == 0 else 1
    return VmState(tuple(prog), start, start, [], memory)


def truthy(d: Datum) -> bool:
    return _truthy(int(d.tag), d.value)


def _truthy(tag: int, value) -> bool:
    if tag == _STR:
        return value != ""
    return value != 0  # NaN != 0 holds, so NaN is true


def _wrap(v: int) -> int:
    v &= _U64
    return v - (1 << 64) if v > INT_MAX else v


# --------------------------------------------------------------------------
# Each maker takes (state, ring) and returns ``op(ip) -> next ip`` closed over
# the ring's arena lists. The lists are only ever mutated in place, so one
# binding stays valid for a whole run.


def _jump(m, r):
    def op(ip):
        return m.jp
    return op


def _branch(c):
    def make(m, r):
        cur, tag, val = r.cur, r.tag, r.val
        def op(ip):
            i = cur[c]
            if tag[i] == _STR:
                return m.jp if val[i] != "" else ip + 1
            return m.jp if val[i] != 0 else ip + 1  # NaN != 0
        return op
    return make


def _call(c):
    def make(m, r):
        cur, tag, val, stack = r.cur, r.tag, r.val, m.stack
        limit = len(m.program) + 1
        def op(ip):
            i = cur[c]
            a = val[i]
            if tag[i] == _INT and 1 <= a <= limit:
                stack.append(ip + 1)
                return a
            return ip + 1
        return op
    return make


def _ret(m, r):
    stack, low = m.stack, m.low_water
    def op(ip):
        if not stack:
            low[0] = -1
            return ip + 1
        ip = stack.pop()
        if len(stack) < low[0]:
            low[0] = len(stack)
        return ip
    return op


def _halt(m, r):
    def op(ip):
        return HALT
    return op


def _wait(m, r):
    def op(ip):
        return ip + 1
    return op


def _move_to(x, y):
    def make(m, r):
        cur = r.cur
        def op(ip):
            cur[x] = cur[y]
            return ip + 1
        return op
    return make


def _mark_jp(m, r):
    def op(ip):
        m.jp = ip
        return ip + 1
    return op


def _next(c):
    def make(m, r):
        cur, nxt = r.cur, r.nxt
        def op(ip):
            cur[c] = nxt[cur[c]]
            return ip + 1
        return op
    return make


def _prev(c):
    def make(m, r):
        cur, prv = r.cur, r.prv
        def op(ip):
            cur[c] = prv[cur[c]]
            return ip + 1
        return op
    return make


def _jp_next(m, r):
    n = len(m.program)
    def op(ip):
        if m.jp <= n:
            m.jp += 1
        return ip + 1
    return op


def _jp_prev(m, r):
    def op(ip):
        if m.jp > 1:
            m.jp -= 1
        return ip + 1
    return op


def _insert(tag):
    zero = _ZEROS[tag]
    def make(m, r):
        nxt, prv, tags, val, cur, free = r.nxt, r.prv, r.tag, r.val, r.cur, r.free
        def op(ip):
            here = cur[P]
            if free:
                i = free.pop()
                tags[i] = tag
                val[i] = zero
            else:
                i = len(tags)
                nxt.append(i)
                prv.append(i)
                tags.append(tag)
                val.append(zero)
            after = nxt[here]
            nxt[here] = i
            prv[i] = here
            nxt[i] = after
            prv[after] = i
            cur[P] = i
            r.size += 1
            return ip + 1
        return op
    return make


def _delete(m, r):
    delete = r.delete_at_p
    def op(ip):
        delete()
        return ip + 1
    return op


def _copy(x, y):
    def make(m, r):
        cur, tag, val = r.cur, r.tag, r.val
        def op(ip):
            src, dst = cur[x], cur[y]
            if tag[src] == tag[dst]:
                val[dst] = val[src]
            return ip + 1
        return op
    return make


def _store_jp(c):
    def make(m, r):
        cur, tag, val = r.cur, r.tag, r.val
        def op(ip):
            i = cur[c]
            if tag[i] == _INT:
                val[i] = m.jp
            return ip + 1
        return op
    return make


def _load_jp(c):
    def make(m, r):
        cur, tag, val = r.cur, r.tag, r.val
        limit = len(m.program) + 1
        def op(ip):
            i = cur[c]
            a = val[i]
            if tag[i] == _INT and 1 <= a <= limit:
                m.jp = a
            return ip + 1
        return op
    return make


def _int_div(a, b):
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


def _float_div(a, b):
    try:
        return a / b
    except OverflowError:
        return math.copysign(math.inf, a) * math.copysign(1.0, b)


_OPS = {
    "Aa": (lambda a, b: a + b, lambda a, b: a + b),
    "As": (lambda a, b: a - b, lambda a, b: a - b),
    "Am": (lambda a, b: a * b, lambda a, b: a * b),
    "Ad": (_int_div, _float_div),
}


def _binary(name):
    int_op, float_op = _OPS[name]
    divide = name == "Ad"

    def make(m, r):
        cur, tag, val = r.cur, r.tag, r.val

        def op(ip):
            si, ti = cur[S], cur[T]
            ts, tt = tag[si], tag[ti]
            if ts == _INT and tt == _INT:
                b = val[ti]
                if divide and b == 0:
                    return ip + 1
                res = int_op(val[si], b)
                if not INT_MIN <= res <= INT_MAX:
                    res = _wrap(res)
                pi = cur[P]
                if tag[pi] == _INT:
                    val[pi] = res
                elif tag[pi] == _FLOAT:
                    val[pi] = float(res)
            elif (ts == _INT or ts == _FLOAT) and (tt == _INT or tt == _FLOAT):
                b = float(val[ti])
                if divide and b == 0.0:
                    return ip + 1
                res = float_op(float(val[si]), b)
                pi = cur[P]
                if res == res and tag[pi] == _FLOAT:
                    val[pi] = res
            return ip + 1
        return op
    return make


def _negate(m, r):
    cur, tag, val = r.cur, r.tag, r.val
    def op(ip):
        i, pi = cur[S], cur[P]
        ts, v, tp = tag[i], val[i], tag[pi]
        if ts == _INT:
            if tp == _INT:
                val[pi] = _wrap(-v)
            elif tp == _FLOAT:
                val[pi] = float(_wrap(-v))
        elif ts == _FLOAT and v == v and tp == _FLOAT:
            val[pi] = -v
        return ip + 1
    return op


def _sqrt(m, r):
    cur, tag, val = r.cur, r.tag, r.val
    def op(ip):
        i, pi = cur[S], cur[P]
        ts, v = tag[i], val[i]
        if (ts == _INT or ts == _FLOAT) and v >= 0 and tag[pi] == _FLOAT:
            val[pi] = math.sqrt(v)  # NaN fails v >= 0
        return ip + 1
    return op


def _concat(m, r):
    cur, tag, val = r.cur, r.tag, r.val
    def op(ip):
        pi, si, ti = cur[P], cur[S], cur[T]
        if tag[pi] == _STR and tag[si] == _STR and tag[ti] == _STR:
            if len(val[si]) + len(val[ti]) <= MAX_STRING_LENGTH:
                val[pi] = val[si] + val[ti]
        return ip + 1
    return op


def _substring(m, r):
    cur, tag, val = r.cur, r.tag, r.val
    def op(ip):
        pi, si, ti = cur[P], cur[S], cur[T]
        if tag[pi] == _STR and tag[si] == _INT and tag[ti] == _INT:
            val[pi] = val[pi][val[si]:val[ti]]
        return ip + 1
    return op


def _zero(c):
    def make(m, r):
        cur, tag, val = r.cur, r.tag, r.val
        def op(ip):
            i = cur[c]
            val[i] = _ZEROS[tag[i]]
            return ip + 1
        return op
    return make


def _load(k):
    fk = float(k)
    def make(m, r):
        cur, tag, val = r.cur, r.tag, r.val
        def op(ip):
            i = cur[P]
            if tag[i] == _INT:
                val[i] = k
            elif tag[i] == _FLOAT:
                val[i] = fk
            return ip + 1
        return op
    return make


def _load_float(x):
    def make(m, r):
        cur, tag, val = r.cur, r.tag, r.val
        def op(ip):
            i = cur[P]
            if tag[i] == _FLOAT:
                val[i] = x
            return ip + 1
        return op
    return make


_C = {"p": P, "s": S, "t": T}
_FIXED = {
    "J": _jump, "R": _ret, "H": _halt, "W": _wait, "Mji": _mark_jp,
    "Nj": _jp_next, "Pj": _jp_prev, "D": _delete, "An": _negate, "Aq": _sqrt,
    "Sc": _concat, "Sx": _substring,
    "Le": _load_float(math.e), "Lp": _load_float(math.pi),
}


def _maker(name: str):
    if name in _FIXED:
        return _FIXED[name]
    head, rest = name[0], name[1:]
    if head == "B":
        return _branch(_C[rest])
    if head == "K":
        return _call(_C[rest])
    if head == "M":
        return _move_to(_C[rest[0]], _C[rest[1]])
    if head == "N":
        return _next(_C[rest])
    if head == "P":
        return _prev(_C[rest])
    if head == "I":
        return _insert({"b": _BOOL, "i": _INT, "f": _FLOAT, "s": _STR}[rest])
    if head == "C":
        if rest[0] == "j":
            return _store_jp(_C[rest[1]])
        if rest[1] == "j":
            return _load_jp(_C[rest[0]])
        return _copy(_C[rest[0]], _C[rest[1]])
    if head == "A":
        return _binary(name)
    if head == "Z":
        return _zero(_C[rest])
    if head == "L":
        return _load(int(rest))
    raise AssertionError(f"no handler for {name}")


MAKERS = tuple(_maker(t.name) for t in Token)


class _Stop(Exception):
    pass


def _stop(ip):
    raise _Stop


def _bind(m: VmState) -> list:
    """Per-position closures; ``code[ip]`` executes instruction ``ip``.

    ``code[0]`` (HALT) and ``code[n + 1]`` raise _Stop.
    """
    ops = {}
    code = [_stop]
    for tok in m.program:
        op = ops.get(tok)
        if op is None:
            op = ops[tok] = MAKERS[tok](m, m.memory)
        code.append(op)
    code.append(_stop)
    return code


# --------------------------------------------------------------------------


def step(m: VmState) -> VmState:
    """Execute the instruction at ip in place and return the state."""
    if not 1 <= m.ip <= len(m.program):
        raise ValueError("step needs a running state")
    ip = MAKERS[m.program[m.ip - 1]](m, m.memory)(m.ip)
    m.ip = HALT if ip > len(m.program) else ip
    m.steps += 1
    return m


def _outcome(m: VmState) -> RunOutcome:
    status = Status.HALTED if m.ip == HALT else Status.FUEL_EXHAUSTED
    return RunOutcome(status, m.memory.snapshot_from_p(), m.steps, m)


_CHUNK = 32


def execute(m: VmState, fuel: int, skip_cycles: bool = True) -> RunOutcome:
    """Step ``m`` until it halts or ``fuel`` total steps have run.

    With ``skip_cycles`` the concrete machine state is checkpointed every
    ``_CHUNK`` steps (Brent's scheme). If a later checkpoint matches, with
    the stack possibly grown by a suffix that was never popped into, every
    further period behaves the same, so whole periods are skipped and the
    stack growth is replayed. The result is identical to stepping every
    instruction.
    """
    if fuel < 1:
        raise ValueError("fuel must be at least 1")
    n = len(m.program)
    code = _bind(m)
    r = m.memory
    stack, low = m.stack, m.low_water
    cur, val, tag, nxt = r.cur, r.val, r.tag, r.nxt
    ip, steps = m.ip, m.steps
    checks, mark = 0, 1
    saved = None
    saved_steps = 0
    i = steps
    try:
        while ip and ip <= n and steps < fuel:
            end = min(fuel, steps + _CHUNK)
            for i in range(steps, end):
                ip = code[ip](ip)
            steps = end
            if not skip_cycles or not ip or ip > n:
                continue
            if (
                saved is not None
                and ip == saved[0]
                and m.jp == saved[1]
                and cur == saved[2]
                and val == saved[4]
                and tag == saved[5]
                and nxt == saved[6]
                and low[0] >= len(saved[3])
                # R on an empty stack is a no-op, so growth must never expose it
                and (low[0] > 0 or len(stack) == len(saved[3]))
                and stack[: len(saved[3])] == saved[3]
            ):
                period = steps - saved_steps
                repeats = (fuel - steps) // period
                steps += repeats * period
                stack.extend(stack[len(saved[3]):] * repeats)
                skip_cycles = False
            else:
                checks += 1
                if checks == mark:
                    saved = (ip, m.jp, cur[:], stack[:], val[:], tag[:], nxt[:])
                    saved_steps = steps
                    low[0] = len(stack)
                    mark <<= 1
    except _Stop:
        steps = i
    m.ip = HALT if not ip or ip > n else ip
    m.steps = steps
    return _outcome(m)


def run(prog: Sequence[Token], inputs: Sequence[Datum], fuel: int = 1_000_000) -> RunOutcome:
    return execute(init(prog, inputs), fuel)


def digest(m: VmState) -> str:
    return hashlib.blake2b(repr(m.memory.canonical()).encode(), digest_size=8).hexdigest()


def trace(prog: Sequence[Token], inputs: Sequence[Datum], fuel: int = 1_000_000):
    """Run like :func:`run`, recording one TraceRecord per executed step."""
    if fuel < 1:
        raise ValueError("fuel must be at least 1")
    m = init(prog, inputs)
    records = []
    while m.ip != HALT and m.steps < fuel:
        before = m.ip
        token = m.program[before - 1]
        step(m)
        records.append(TraceRecord(m.steps, before, token, m.ip, m.jp, len(m.stack), digest(m)))
    return records, _outcome(m)

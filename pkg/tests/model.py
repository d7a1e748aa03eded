"""Slow, independent reference model of the machine for differential tests.

The ring is a plain Python list with integer cursor positions; nothing is
shared with the package's arena implementation or dispatch tables.
"""

import math

INT_LO, INT_HI = -(2**63), 2**63 - 1


def wrap(v):
    v %= 2**64
    return v - 2**64 if v > INT_HI else v


class Model:
    def __init__(self, prog, inputs):
        self.prog = [t.name for t in prog]
        self.n = len(self.prog)
        self.ring = [[d.tag.name, d.value] for d in inputs]
        assert self.ring
        self.c = {"p": 0, "s": 0, "t": 0}
        self.stack = []
        self.ip = self.jp = (None if self.n == 0 else 1)
        self.steps = 0

    # ring helpers -------------------------------------------------------
    def node(self, x):
        return self.ring[self.c[x]]

    def insert(self, tag, value):
        at = self.c["p"] + 1
        self.ring.insert(at, [tag, value])
        for k in "st":
            if self.c[k] >= at:
                self.c[k] += 1
        self.c["p"] = at

    def delete(self):
        if len(self.ring) == 1:
            return
        gone = self.c["p"]
        del self.ring[gone]
        for k in "pst":
            if self.c[k] > gone:
                self.c[k] -= 1
            elif self.c[k] == gone:
                self.c[k] = gone % len(self.ring)

    def outputs(self):
        p = self.c["p"]
        return [tuple(x) for x in self.ring[p:] + self.ring[:p]]

    def offsets(self):
        size = len(self.ring)
        return ((self.c["s"] - self.c["p"]) % size, (self.c["t"] - self.c["p"]) % size)

    # semantics ----------------------------------------------------------
    @staticmethod
    def true(tag, v):
        if tag == "BOOL":
            return v
        if tag == "STRING":
            return len(v) > 0
        return v != 0 or (isinstance(v, float) and math.isnan(v))

    def store_numeric(self, value, is_int):
        dst = self.node("p")
        if dst[0] == "FLOAT":
            dst[1] = float(value)
        elif dst[0] == "INT" and is_int:
            dst[1] = value

    def valid_address(self, node):
        return node[0] == "INT" and 1 <= node[1] <= self.n + 1

    def exec(self, tok):
        nxt = self.ip + 1
        x = tok[-1] if len(tok) == 2 else None
        if tok == "J":
            nxt = self.jp
        elif tok in ("Bp", "Bs", "Bt"):
            if self.true(*self.node(x)):
                nxt = self.jp
        elif tok in ("Kp", "Ks", "Kt"):
            if self.valid_address(self.node(x)):
                self.stack.append(self.ip + 1)
                nxt = self.node(x)[1]
        elif tok == "R":
            if self.stack:
                nxt = self.stack.pop()
        elif tok == "H":
            nxt = None
        elif tok == "W":
            pass
        elif tok == "Mji":
            self.jp = self.ip
        elif tok.startswith("M"):
            self.c[tok[1]] = self.c[tok[2]]
        elif tok in ("Np", "Ns", "Nt"):
            self.c[x] = (self.c[x] + 1) % len(self.ring)
        elif tok in ("Pp", "Ps", "Pt"):
            self.c[x] = (self.c[x] - 1) % len(self.ring)
        elif tok == "Nj":
            self.jp = min(self.jp + 1, self.n + 1)
        elif tok == "Pj":
            self.jp = max(self.jp - 1, 1)
        elif tok in ("Ib", "Ii", "If", "Is"):
            tag = {"b": "BOOL", "i": "INT", "f": "FLOAT", "s": "STRING"}[x]
            self.insert(tag, {"BOOL": False, "INT": 0, "FLOAT": 0.0, "STRING": ""}[tag])
        elif tok == "D":
            self.delete()
        elif tok.startswith("Cj"):
            if self.node(tok[2])[0] == "INT":
                self.node(tok[2])[1] = self.jp
        elif tok.startswith("C") and tok[2] == "j":
            if self.valid_address(self.node(tok[1])):
                self.jp = self.node(tok[1])[1]
        elif tok.startswith("C"):
            a, b = self.node(tok[1]), self.node(tok[2])
            if a[0] == b[0]:
                b[1] = a[1]
        elif tok in ("Aa", "As", "Am", "Ad"):
            self.arith(tok)
        elif tok == "An":
            tag, v = self.node("s")
            if tag == "INT":
                self.store_numeric(wrap(-v), True)
            elif tag == "FLOAT" and not math.isnan(v):
                self.store_numeric(-v, False)
        elif tok == "Aq":
            tag, v = self.node("s")
            if tag in ("INT", "FLOAT") and not (isinstance(v, float) and math.isnan(v)) and v >= 0:
                self.store_numeric(math.sqrt(v), False)
        elif tok == "Sc":
            p, s, t = self.node("p"), self.node("s"), self.node("t")
            if p[0] == s[0] == t[0] == "STRING" and len(s[1]) + len(t[1]) <= 1 << 16:
                p[1] = s[1] + t[1]
        elif tok == "Sx":
            p, s, t = self.node("p"), self.node("s"), self.node("t")
            if p[0] == "STRING" and s[0] == t[0] == "INT":
                p[1] = p[1][s[1]:t[1]]
        elif tok in ("Zp", "Zs", "Zt"):
            node = self.node(x)
            node[1] = {"BOOL": False, "INT": 0, "FLOAT": 0.0, "STRING": ""}[node[0]]
        elif tok.startswith("L") and tok[1:].isdigit():
            node = self.node("p")
            k = int(tok[1:])
            if node[0] == "INT":
                node[1] = k
            elif node[0] == "FLOAT":
                node[1] = float(k)
        elif tok in ("Le", "Lp"):
            node = self.node("p")
            if node[0] == "FLOAT":
                node[1] = math.e if tok == "Le" else math.pi
        else:
            raise AssertionError(tok)
        return nxt

    def arith(self, tok):
        (ts, a), (tt, b) = self.node("s"), self.node("t")
        if ts not in ("INT", "FLOAT") or tt not in ("INT", "FLOAT"):
            return
        if ts == tt == "INT":
            if tok == "Ad":
                if b == 0:
                    return
                q = abs(a) // abs(b)
                res = q if (a >= 0) == (b >= 0) else -q
            else:
                res = {"Aa": a + b, "As": a - b, "Am": a * b}[tok]
            self.store_numeric(wrap(res), True)
            return
        a, b = float(a), float(b)
        if tok == "Ad":
            if b == 0.0:
                return
            res = a / b
        else:
            res = {"Aa": a + b, "As": a - b, "Am": a * b}[tok]
        if not math.isnan(res):
            self.store_numeric(res, False)

    def run(self, fuel):
        while self.ip is not None and self.steps < fuel:
            nxt = self.exec(self.prog[self.ip - 1])
            self.steps += 1
            self.ip = None if nxt is None or nxt > self.n else nxt
        return self


def observe_model(m):
    return (
        m.ip is None,
        [(tag, _norm(v)) for tag, v in m.outputs()],
        m.steps,
        0 if m.ip is None else m.ip,
        m.jp,
        list(m.stack),
        m.offsets(),
    )


def observe_vm(outcome):
    f = outcome.final
    return (
        outcome.halted,
        [(d.tag.name, _norm(d.value)) for d in outcome.outputs],
        outcome.steps,
        f.ip,
        f.jp if f.n else None,
        list(f.stack),
        (f.memory.offset("s"), f.memory.offset("t")),
    )


def _norm(v):
    if isinstance(v, float):
        return "nan" if math.isnan(v) else v.hex()
    return v

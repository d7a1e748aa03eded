"""
Running programs
================

Every string of tokens is a program. This walk-through decodes a few,
runs them, and looks at what comes back.
"""

import random

from isal import Datum, decode_bytes, decode_text, encode_bytes, encode_text, format_datum, run

# A program is text: whitespace-separated mnemonics, '#' starts a comment.
prog = decode_text("""
    Ii L1 Mtp Aa   # x + 1 into a fresh node
    Np D           # drop x
""")
print(encode_text(prog))

# The input becomes the ring. All three cursors start on the first node.
out = run(prog, [Datum.i(41)])
print(out.status.value, out.steps, [format_datum(d) for d in out.outputs])

# The empty program halts at once and hands the input back.
print([format_datum(d) for d in run((), [Datum.i(5), Datum.s("ab")]).outputs])

# Errors are no-ops. Dividing by zero leaves the ring alone.
out = run(decode_text("Ns Nt Nt Ad"), [Datum.i(10), Datum.i(3), Datum.i(0)])
print([format_datum(d) for d in out.outputs])

# Any bytes decode (value mod 70), so random bytes are random programs.
rng = random.Random(0)
raw = rng.randbytes(24)
noise = decode_bytes(raw)
print(encode_text(noise))
print(encode_bytes(noise) == bytes(b % 70 for b in raw))

# Halting is undecidable, so every run takes a fuel budget.
loop = decode_text("Mji J")
out = run(loop, [Datum.i(0)], fuel=10**9)
print(out.status.value, out.steps)  # a pure cycle is detected and skipped exactly

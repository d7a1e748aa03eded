"""
Compiling a Turing machine
==========================

A single-tape machine becomes an ordinary program. Tape cells are int
nodes, p is the head, and a block of scratch nodes between the two tape
ends holds the state, a jump table and two float sentinels.
"""

from importlib import resources

from isal import run
from isal.tm import (
    check_equivalence, compile_tm, decode_binary, encode_binary, parse_tm, simulate_tm,
)

spec = parse_tm((resources.files("isal") / "corpus" / "binary_successor.tm").read_text())
compiled = compile_tm(spec)

print(len(compiled.program), "tokens:", compiled.prologue_length, "prologue,",
      compiled.body_length, "body")
print(compiled.scratch_plan)
for (q, a), span in sorted(compiled.layout.items()):
    print("transition", q, a, "->", span)

# 11 in binary, least significant digit first: digits are symbols 1 and 2.
tape = encode_binary(11)
print(tape, simulate_tm(spec, tape, 0, 1000))

out = run(compiled.program, compiled.inputs_for(tape))
cells = compiled.extract_tape(out.outputs)
print(out.status.value, out.steps, cells, decode_binary(cells))

# The simulator is the oracle.
report = check_equivalence(spec, [encode_binary(n) for n in range(64)])
print(report.summary())

"""
Calling a function
==================

There are no named addresses. A caller writes the callee's instruction
index into a node, points a cursor at it and uses Kx; R pops the return
address.
"""

from importlib import resources

from isal import Datum, decode_text, encode_text, format_datum, trace

src = (resources.files("isal") / "corpus" / "square.isal").read_text()
print(src)
prog = decode_text(src)

records, outcome = trace(prog, [Datum.i(7)])

# One line per step: step, ip, token, next ip, jp, stack depth.
for r in records:
    print(r.line())

print([format_datum(d) for d in outcome.outputs])

# The stack rises once on the call and falls once on the return.
depths = [r.stack_depth for r in records]
print(depths)

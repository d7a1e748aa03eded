"""
Edit distance and search
========================

Because every token string runs, the space of programs is a metric space
under plain edit distance, and every point on a shortest path runs too.
"""

from isal import Datum, decode_text, encode_text, format_datum, run
from isal.search import IoExample, SearchConfig, edit_path, levenshtein, search

a = decode_text("Np Aa H")
b = decode_text("Aa H W Ii")
print(levenshtein(a, b))
for p in edit_path(a, b):
    out = run(p, [Datum.i(2), Datum.i(3)], fuel=1000)
    print(f"{encode_text(p):20} {out.status.value:14} {[format_datum(d) for d in out.outputs]}")

# A (1+lambda) hill climber. Constant targets are easy.
cfg = SearchConfig(
    examples=[IoExample((Datum.i(x),), (Datum.i(12),)) for x in (0, 3, 9)],
    offspring=16, max_generations=50, seed=1,
)
result = search(cfg)
print(encode_text(result.best.program), result.best.fitness, result.generations)
print(result.log.splitlines()[:4])

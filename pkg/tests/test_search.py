import functools
import random

import pytest
from hypothesis import given, settings, strategies as st

from isal import Datum, Status, decode_text, encode_text, program, run
from isal.isa import SIGMA, Token
from isal.search import (
    EditKind, EditOp, Fitness, IoExample, SearchConfig, datum_agrees, edit_path,
    edit_script, evaluate, increment_config, levenshtein, mutate, parse_examples, search,
)

from conftest import random_program

I = Datum.i
P = decode_text
SUB = (Token.J, Token.Np, Token.Aa)


@functools.lru_cache(maxsize=None)
def brute(a, b):
    if not a:
        return len(b)
    if not b:
        return len(a)
    return min(brute(a[1:], b) + 1, brute(a, b[1:]) + 1, brute(a[1:], b[1:]) + (a[0] != b[0]))


def all_programs(max_len, alphabet=SUB):
    out = [()]
    for _ in range(max_len):
        out += [p + (t,) for p in out if len(p) == len(out[-1]) for t in alphabet]
    return sorted(set(out))


# -- metric -----------------------------------------------------------------


def test_levenshtein_examples():
    assert levenshtein(P("J"), ()) == 1
    assert levenshtein(P("Np Aa H"), P("Np As H")) == 1
    assert levenshtein(P("Np Aa H"), P("Np Aa H")) == 0
    assert levenshtein((), ()) == 0


def test_levenshtein_matches_brute_force_exhaustively():
    progs = all_programs(4)
    assert len(progs) == 1 + 3 + 9 + 27 + 81
    for a in progs:
        for b in progs:
            assert levenshtein(a, b) == brute(a, b)


def test_metric_laws_random():
    rng = random.Random(99)
    for _ in range(300):
        a, b, c = (random_program(rng, 20) for _ in range(3))
        assert levenshtein(a, b) == levenshtein(b, a)
        assert (levenshtein(a, b) == 0) == (a == b)
        assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(SUB), max_size=6), st.lists(st.sampled_from(SUB), max_size=6))
def test_levenshtein_hypothesis(a, b):
    assert levenshtein(a, b) == brute(tuple(a), tuple(b))


# -- edit paths -------------------------------------------------------------


def test_edit_path_trivial():
    p = P("Np Aa")
    assert edit_path(p, p) == [p]
    assert edit_path(P("J"), ()) == [P("J"), ()]


def test_edit_path_example_runs():
    a, b = P("Np Aa H"), P("Aa H W")
    path = edit_path(a, b)
    assert len(path) == 1 + levenshtein(a, b)
    for q in path:
        out = run(q, [I(3), I(4)], 1000)
        assert out.status in (Status.HALTED, Status.FUEL_EXHAUSTED)


def test_tie_break_prefers_substitution():
    ops = edit_script(P("J Np"), P("Aa"))
    assert [op.kind for op in ops] == [EditKind.SUBSTITUTE, EditKind.DELETE]
    assert edit_script(P("J"), P("Aa")) == [EditOp(EditKind.SUBSTITUTE, 0, Token.Aa)]


def test_tie_break_prefers_delete_over_insert():
    # [J, Np] -> [Np, J]: two optimal scripts of length 2; substitute-first wins
    ops = edit_script(P("J Np"), P("Np J"))
    assert [op.kind for op in ops] == [EditKind.SUBSTITUTE, EditKind.SUBSTITUTE]
    ops = edit_script(P("J Np Aa"), P("Np Aa"))
    assert ops == [EditOp(EditKind.DELETE, 0)]


def test_edit_paths_random():
    rng = random.Random(4)
    for _ in range(100):
        a, b = random_program(rng, 15), random_program(rng, 15)
        path = edit_path(a, b)
        assert path[0] == a and path[-1] == b
        assert len(path) == levenshtein(a, b) + 1
        assert all(levenshtein(x, y) == 1 for x, y in zip(path, path[1:]))


def test_edit_op_apply():
    p = P("J Np")
    assert EditOp(EditKind.INSERT, 2, Token.H).apply(p) == P("J Np H")
    assert EditOp(EditKind.DELETE, 0).apply(p) == P("Np")
    assert EditOp(EditKind.SUBSTITUTE, 1, Token.W).apply(p) == P("J W")


# -- mutation ---------------------------------------------------------------


def test_mutate_empty_delete_only_inserts():
    cfg = SearchConfig(insert_weight=0, delete_weight=1, substitute_weight=0)
    rng = random.Random(0)
    for _ in range(20):
        assert len(mutate((), rng, cfg)) == 1


def test_mutate_is_single_edit():
    cfg = SearchConfig()
    rng = random.Random(1)
    for _ in range(200):
        assert levenshtein(mutate(P("H"), rng, cfg), P("H")) <= 1


def test_mutate_respects_weights():
    rng = random.Random(2)
    p = P("Np Aa H")
    assert all(len(mutate(p, rng, SearchConfig(1, [], 1, 0, 1, 0))) == 2 for _ in range(50))
    assert all(len(mutate(p, rng, SearchConfig(1, [], 1, 1, 0, 0))) == 4 for _ in range(50))


def test_mutants_are_runnable():
    rng = random.Random(3)
    cfg = SearchConfig()
    p = random_program(rng, 20)[:20]
    for _ in range(2000):
        q = mutate(p, rng, cfg)
        assert decode_text(encode_text(q)) == q
        out = run(q, [I(1), Datum.s("ab")], 1000)
        assert out.status in (Status.HALTED, Status.FUEL_EXHAUSTED)


@pytest.mark.parametrize("w", [(-1, 1, 1), (0, 0, 0)])
def test_config_rejects_bad_weights(w):
    with pytest.raises(ValueError):
        SearchConfig((), [], 10, *w).validate()


def test_config_rejects_zero_fuel():
    with pytest.raises(ValueError):
        SearchConfig(fuel=0).validate()


# -- evaluation -------------------------------------------------------------

INC0 = [IoExample((I(0),), (I(1),))]


def test_evaluate_examples():
    assert evaluate(P("L1"), INC0, 100).matched == 1
    assert evaluate((), INC0, 100).matched == 0


def test_evaluate_ignores_trailing_ring_nodes():
    f = evaluate(P("Ii L1 Mtp Aa"), increment_config().examples, 100)
    assert f.matched == 3


def test_fuel_exhausted_scores_below_any_match():
    loop = evaluate(P("Mji J"), INC0, 50)
    assert loop.matched == loop.agreement == 0
    assert loop < evaluate(P("L1 W W W"), INC0, 50)


def test_fitness_order():
    assert Fitness(1, 0, -100, -9) > Fitness(0, 5, 0, 0)
    assert Fitness(1, 2, -3, -9) > Fitness(1, 2, -4, -1)


def test_datum_agreement():
    assert datum_agrees(Datum.f(1.0), Datum.f(1.0 + 1e-12))
    assert not datum_agrees(Datum.f(1.0), Datum.f(1.001))
    assert not datum_agrees(Datum.f(1.0), I(1))
    assert datum_agrees(Datum.f(float("nan")), Datum.f(float("nan")))
    assert not datum_agrees(I(1), Datum.b(True))


def test_io_example_needs_input():
    with pytest.raises(ValueError):
        IoExample((), (I(1),))


def test_parse_examples():
    exs = parse_examples('i:4, s:"a|\\"b" | s:"|"')
    assert exs == [IoExample((I(4), Datum.s('a|"b')), (Datum.s("|"),))]
    with pytest.raises(ValueError):
        parse_examples("i:1 | i:2 | i:3")
    exs = parse_examples("# inc\ni:0 | i:1\n\ni:4 f:2.5 | \n")
    assert exs == [IoExample((I(0),), (I(1),)), IoExample((I(4), Datum.f(2.5)), ())]


# -- search -----------------------------------------------------------------


def test_identity_target_solved_at_generation_zero():
    cfg = SearchConfig(examples=[IoExample((I(3),), (I(3),))], seed=1)
    r = search(cfg)
    assert r.solved and r.generations == 0 and r.best.program == ()


def test_search_finds_constant():
    cfg = SearchConfig(examples=[IoExample((I(0),), (I(7),)), IoExample((I(9),), (I(7),))],
                       offspring=16, max_generations=50, seed=3)
    r = search(cfg)
    assert r.solved
    assert evaluate(r.best.program, cfg.examples, cfg.fuel).matched == 2


def test_search_deterministic_log():
    a, b = search(increment_config(7)), search(increment_config(7))
    assert a.log == b.log and a.best == b.best
    header, *rows = a.log.splitlines()
    assert header == "generation,matched,agreement,steps,length,distance,program"
    assert len(rows) == a.generations + 1


def test_search_never_worse_than_seed():
    rng = random.Random(8)
    for i in range(5):
        seed_prog = random_program(rng, 10)
        cfg = increment_config(i)
        cfg.seed_program, cfg.max_generations = seed_prog, 10
        r = search(cfg)
        assert r.best.fitness >= evaluate(seed_prog, cfg.examples, cfg.fuel)


def test_config_from_dict(tmp_path):
    (tmp_path / "ex.txt").write_text("i:0 | i:1\n")
    cfg = SearchConfig.from_dict(
        {"seed_program": "L1 W", "examples_file": "ex.txt", "weights": {"delete": 2},
         "offspring": 4, "max_generations": 3, "seed": 5}, base=tmp_path)
    assert cfg.seed_program == P("L1 W") and cfg.delete_weight == 2 and len(cfg.examples) == 1
    cfg = SearchConfig.from_dict({"examples": ["i:2 | i:2"]})
    assert cfg.examples[0].inputs == (I(2),)
    with pytest.raises(ValueError):
        SearchConfig.from_dict({"bogus": 1})

import random

import pytest

from isal import Datum, decode_bytes


def random_program(rng, max_len=64):
    return decode_bytes(bytes(rng.randrange(256) for _ in range(rng.randint(0, max_len))))


def random_inputs(rng):
    pool = [
        lambda: Datum.i(rng.randint(-20, 20)),
        lambda: Datum.i(rng.choice([0, 1, 2**63 - 1, -(2**63)])),
        lambda: Datum.f(rng.choice([0.0, -0.0, 1.5, -2.25, 1e308, float("inf"), float("nan")])),
        lambda: Datum.b(rng.random() < 0.5),
        lambda: Datum.s(rng.choice(["", "ab", "hello", "x"])),
    ]
    return [rng.choice(pool)() for _ in range(rng.randint(1, 5))]


@pytest.fixture
def rng():
    return random.Random(20240601)

import os
import random
from contextlib import contextmanager
from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import strategies as st

from lossygossip import fan as fg
from lossygossip import groups as gr
from lossygossip.trop import INF, Call, TropMatrix, product_of_calls

LONG = os.environ.get("LOSSYGOSSIP_LONG") == "1"

_ACCEPTANCE: dict = {}


@contextmanager
def _criterion(number, title):
    try:
        yield
    except BaseException:
        _ACCEPTANCE.setdefault(number, []).append((title, False))
        raise
    _ACCEPTANCE.setdefault(number, []).append((title, True))


@pytest.fixture
def criterion():
    return _criterion


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE, key=lambda x: (int(str(x).split(".")[0]), str(x))):
        for title, ok in _ACCEPTANCE[number]:
            terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")


# -- shared data ---------------------------------------------------------------

@pytest.fixture(scope="session")
def fan3():
    return fg.gossip_fan(3)


@pytest.fixture(scope="session")
def fan4():
    return fg.gossip_fan(4)


# -- generators ----------------------------------------------------------------

fractions = st.fractions(min_value=0, max_value=50, max_denominator=6)
signed_fractions = st.fractions(min_value=-20, max_value=20, max_denominator=4)
scalars = st.one_of(fractions, st.just(INF))
signed_scalars = st.one_of(signed_fractions, st.just(INF))


def matrices(n, elements=scalars):
    return st.lists(st.lists(elements, min_size=n, max_size=n), min_size=n, max_size=n).map(TropMatrix)


@st.composite
def call_products(draw, n=None, max_calls=12, allow_inf=True):
    if n is None:
        n = draw(st.integers(2, 6))
    k = draw(st.integers(0, max_calls))
    calls = []
    for _ in range(k):
        a, b = draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
        w = draw(scalars if allow_inf else fractions)
        calls.append(Call(a, b, w))
    return n, calls


def random_calls(rng: random.Random, n: int, k: int, p_inf=0.0):
    out = []
    for _ in range(k):
        a, b = rng.sample(range(n), 2)
        w = INF if rng.random() < p_inf else Fraction(rng.randint(0, 30), rng.choice((1, 2, 3, 5)))
        out.append(Call(a, b, w))
    return out


def random_product(rng, n, max_calls=12, p_inf=0.0):
    return product_of_calls(n, random_calls(rng, n, rng.randint(0, max_calls), p_inf))


def random_metric(rng: random.Random, n: int) -> TropMatrix:
    """Kleene star of a random symmetric nonnegative matrix: always metric."""
    from lossygossip.trop import kleene_star

    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = rows[j][i] = Fraction(rng.randint(0, 40), rng.choice((1, 2, 3)))
    return kleene_star(TropMatrix(rows))


def o3_grid_samples(count, rng):
    """Small-integer nonnegative 3x3 matrices that pass the prevariety test."""
    out = []
    while len(out) < count:
        p = rng.sample(range(3), 3)
        m = TropMatrix([[0 if p[i] == j else rng.choice((0, 1, 2, 3, 4, INF)) for j in range(3)]
                        for i in range(3)])
        if gr.o3_prevariety_check(m)["satisfied"]:
            out.append(m)
    return out


def o3_g3_samples(count, rng):
    """Row-permuted elements of G_3 (some with infinite entries)."""
    perms = list(permutations(range(3)))
    return [gr.random_g_element(3, rng, max_calls=8, p_inf=0.15).permute_rows(rng.choice(perms))
            for _ in range(count)]

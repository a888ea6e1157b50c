import random
from fractions import Fraction

import pytest

from lossygossip import polyhedra as ph
from lossygossip import pq

SUBSTITUTED_Q = ("a>c", "e>c", "c+d+g>j", "c+j>d+g", "g+j>c+d",
                 "f>d+g", "b+d>h", "h>g+i", "i+j>a+b", "b+i>d+g")


@pytest.fixture(scope="module")
def report():
    return pq.pq_example_check(seed=0)


def test_form_parsing():
    assert pq.form("a+b-c") == (1, 1, -1, 0, 0, 0, 0, 0, 0, 0)
    assert pq.form("b+b") == (0, 2) + (0,) * 8
    assert pq.form("0") == (0,) * 10
    assert pq.inequality("b+d>h") == pq.form("b+d-h")


def test_substitution():
    assert pq.substitute(pq.form("h")) == pq.form("f-g")
    assert pq.substitute(pq.form("f+j")) == pq.form("j+i")
    assert pq.substitute(pq.form("a+b")) == pq.form("a+b")


def test_substituted_q_inequalities_match_printed_list():
    got = {pq.substitute(pq.inequality(s)) for s in pq.Q_INEQS}
    assert got == {pq.inequality(s) for s in SUBSTITUTED_Q}


def _random_interior(ineqs, rng):
    cone = ph.cone_from_inequalities(ineqs, ambient=10)
    while True:
        coef = [rng.randint(1, 9) for _ in cone.rays]
        x = tuple(sum(c * r[t] for c, r in zip(coef, cone.rays)) for t in range(10))
        if pq.satisfies(ineqs, x):
            return x


@pytest.mark.parametrize("which", ["P", "Q"])
def test_families_equal_call_products(which):
    ineqs = [pq.inequality(s) for s in (pq.P_INEQS if which == "P" else pq.Q_INEQS)]
    rows = pq.P_MATRIX if which == "P" else pq.Q_MATRIX
    calls = pq.P_CALLS if which == "P" else pq.Q_CALLS
    rng = random.Random(0)
    for _ in range(50):
        x = _random_interior(ineqs, rng)
        assert pq.family_matrix(rows, x) == pq.family_product(calls, x)


def test_report(report):
    assert report.ok
    assert report.families_match_products and report.spans_equal
    assert report.substitution_maps_q_to_p
    assert report.intersection_dim == 10


def test_intersection_point_is_in_both(report):
    x = report.intersection_point
    assert pq.satisfies([pq.inequality(s) for s in pq.P_INEQS], x)
    assert pq.satisfies([pq.substitute(pq.inequality(s)) for s in pq.Q_INEQS], x)


def test_witness_is_not_convex(report):
    """The two endpoints lie in the open P and Q cones; their combination lies in neither closed cone."""
    w = report.witness
    p_ineqs = [pq.inequality(s) for s in pq.P_INEQS]
    q_ineqs = [pq.inequality(s) for s in pq.Q_INEQS]
    p_point = tuple(Fraction(t) for t in w["p_parameters"])
    q_point = tuple(Fraction(t) for t in w["q_parameters"])
    assert pq.satisfies(p_ineqs, p_point)
    assert pq.satisfies(q_ineqs, q_point)
    p_mat = pq.family_matrix(pq.P_MATRIX, p_point)
    q_mat = pq.family_matrix(pq.Q_MATRIX, q_point)
    assert p_mat.to_json()["entries"] == w["p_matrix"]
    assert q_mat.to_json()["entries"] == w["q_matrix"]
    lam = Fraction(w["weight"])
    combo = [[lam * x + (1 - lam) * y for x, y in zip(r, s)] for r, s in zip(p_mat.entries, q_mat.entries)]
    # recover the parameters of the combination in each family and check a strict violation
    assert [[str(v) for v in row] for row in combo] == [[str(v) for v in row] for row in w["combination"]]
    x_p = _solve(pq.P_MATRIX, combo)
    x_q = _solve(pq.Q_MATRIX, combo)
    assert any(pq.evaluate(v, x_p) < 0 for v in p_ineqs)
    assert any(pq.evaluate(v, x_q) < 0 for v in q_ineqs)


def _solve(rows, entries):
    """Parameters x with family_matrix(rows, x) == entries (both parametrisations are injective)."""
    forms = pq.matrix_forms(rows)
    n = len(rows)
    target = [Fraction(entries[i][j]) for i in range(n) for j in range(n) if i != j]
    aug = [list(map(Fraction, f)) + [t] for f, t in zip(forms, target)]
    x = [None] * 10
    r = 0
    pivots = []
    for c in range(10):
        piv = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        aug[r] = [v / aug[r][c] for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c]:
                aug[i] = [a - aug[i][c] * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    assert len(pivots) == 10
    assert all(row[-1] == 0 for row in aug[r:])
    for i, c in enumerate(pivots):
        x[c] = aug[i][-1]
    m = pq.family_matrix(rows, x)
    assert all(m[i, j] == Fraction(entries[i][j]) for i in range(n) for j in range(n))
    return tuple(x)


def test_report_deterministic():
    assert pq.pq_example_check(seed=3).to_json() == pq.pq_example_check(seed=3).to_json()

"""Two overlapping 10-parameter cones of G_5 whose union is not convex.

Both families are products of ten calls on five gossipers; the matrix
entries and the strict inequality systems are linear in the parameters
``a..j``.  Everything here is exact integer/rational linear algebra.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import polyhedra as ph
from .fan import matrix_to_vector, offdiag
from .trop import Call, TropMatrix, product_of_calls

PARAMS = "abcdefghij"

P_CALLS = (("45", "a"), ("34", "b"), ("45", "c"), ("24", "d"), ("45", "e"),
           ("14", "f"), ("12", "g"), ("23", "h"), ("13", "i"), ("15", "j"))
Q_CALLS = (("45", "a"), ("34", "b"), ("45", "c"), ("24", "d"), ("45", "e"),
           ("15", "f"), ("12", "g"), ("24", "h"), ("23", "i"), ("13", "j"))

P_MATRIX = (("0", "g", "i", "f", "j"),
            ("g", "0", "g+i", "d", "d+e"),
            ("i", "h", "0", "b", "b+c"),
            ("d+g", "d", "b", "0", "c"),
            ("j", "c+d", "a+b", "c", "0"))
Q_MATRIX = (("0", "g", "j", "g+h", "f"),
            ("g", "0", "g+j", "d", "d+e"),
            ("j", "i", "0", "b", "b+c"),
            ("d+g", "d", "b", "0", "c"),
            ("f", "c+d", "a+b", "c", "0"))

P_INEQS = ("a>c", "e>c", "f>d+g", "b+d>h", "h>g+i", "c+d+g+i>a+b",
           "b+i>d+g", "c+d+g>j", "i+j>b+c", "c+j>d+g", "g+j>d+e")
Q_INEQS = ("a>c", "e>c", "c+d+g>f", "c+f>d+g", "f+g>c+d",
           "h>d", "b+d>i", "i>g+j", "f+j>a+b", "b+j>d+g")

# Q-parameters written in terms of P-parameters
SUBSTITUTION = {"f": "j", "h": "f-g", "i": "h", "j": "i"}


def form(expr: str) -> tuple:
    """Parse a signed sum of parameter names into an integer coefficient vector."""
    v = [0] * len(PARAMS)
    expr = expr.replace(" ", "")
    if expr == "0":
        return tuple(v)
    sign, i = 1, 0
    while i < len(expr):
        ch = expr[i]
        if ch in "+-":
            sign = 1 if ch == "+" else -1
        else:
            v[PARAMS.index(ch)] += sign
            sign = 1
        i += 1
    return tuple(v)


def inequality(text: str) -> tuple:
    lhs, rhs = text.split(">")
    return tuple(x - y for x, y in zip(form(lhs), form(rhs)))


def matrix_forms(rows) -> list:
    """Off-diagonal entries (row-major) as coefficient vectors."""
    return [form(rows[i][j]) for i, j in offdiag(len(rows))]


def substitute(vec, subst=SUBSTITUTION) -> tuple:
    """Rewrite a form in Q-parameters as a form in P-parameters."""
    out = [0] * len(PARAMS)
    for name, c in zip(PARAMS, vec):
        if c:
            for t, x in enumerate(form(subst.get(name, name))):
                out[t] += c * x
    return tuple(out)


def evaluate(vec, x) -> Fraction:
    return sum((c * v for c, v in zip(vec, x)), Fraction(0))


def family_matrix(rows, x) -> TropMatrix:
    return TropMatrix([[evaluate(form(e), x) for e in r] for r in rows])


def family_product(calls, x) -> TropMatrix:
    val = dict(zip(PARAMS, x))
    return product_of_calls(5, [Call(int(kl[0]) - 1, int(kl[1]) - 1, val[p]) for kl, p in calls])


def satisfies(ineqs, x) -> bool:
    return all(evaluate(v, x) > 0 for v in ineqs)


def interior_point(normals) -> tuple | None:
    """A point satisfying all ``normals`` strictly, or None if the cone is not full-dimensional."""
    cone = ph.cone_from_inequalities(normals, ambient=len(PARAMS))
    if cone.dim != len(PARAMS):
        return None
    pt = [Fraction(0)] * len(PARAMS)
    for r in cone.rays + tuple(l for l in cone.lines) + tuple(tuple(-t for t in l) for l in cone.lines):
        pt = [p + t for p, t in zip(pt, r)]
    return tuple(pt)


@dataclass
class PQReport:
    families_match_products: bool
    spans_equal: bool
    substitution_maps_q_to_p: bool
    substituted_q_inequalities: list
    intersection_dim: int
    intersection_point: tuple
    witness: dict | None

    @property
    def ok(self) -> bool:
        return (self.families_match_products and self.spans_equal and self.substitution_maps_q_to_p
                and self.intersection_dim == 10 and self.witness is not None)

    def to_json(self) -> dict:
        return {
            "families_match_products": self.families_match_products,
            "spans_equal": self.spans_equal,
            "substitution_maps_q_to_p": self.substitution_maps_q_to_p,
            "substituted_q_inequalities": self.substituted_q_inequalities,
            "intersection_dim": self.intersection_dim,
            "intersection_point": [str(t) for t in self.intersection_point],
            "witness": self.witness,
            "ok": self.ok,
        }


def _describe(vec) -> str:
    pos = "+".join(p for p, c in zip(PARAMS, vec) for _ in range(max(c, 0))) or "0"
    neg = "+".join(p for p, c in zip(PARAMS, vec) for _ in range(max(-c, 0))) or "0"
    return f"{pos}>{neg}"


def _strict_violation(ineqs, x) -> bool:
    return any(evaluate(v, x) < 0 for v in ineqs)


def _one_sided_regions(own, other) -> list:
    """Full-dimensional pieces of ``own`` violating one inequality of ``other``."""
    out = []
    for v in other:
        if v in own:
            continue
        cone = ph.cone_from_inequalities(list(own) + [tuple(-t for t in v)], ambient=len(PARAMS))
        if cone.dim == len(PARAMS):
            out.append(cone)
    return out


def find_witness(p_ineqs, q_ineqs, seed: int = 0, tries: int = 2000) -> dict | None:
    """A P-point and a Q-point (P-parameters) whose midpoint lies strictly outside both closures."""
    rng = random.Random(seed)
    p_regions = _one_sided_regions(p_ineqs, q_ineqs)
    q_regions = _one_sided_regions(q_ineqs, p_ineqs)
    if not p_regions or not q_regions:
        return None

    def sample(cone, own):
        coef = [Fraction(rng.randint(1, 9)) for _ in cone.rays]
        x = tuple(sum((c * r[t] for c, r in zip(coef, cone.rays)), Fraction(0))
                  for t in range(len(PARAMS)))
        return x if satisfies(own, x) else None

    for _ in range(tries):
        p = sample(rng.choice(p_regions), p_ineqs)
        q = sample(rng.choice(q_regions), q_ineqs)
        if p is None or q is None:
            continue
        for lam in (Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1, 4), Fraction(3, 4)):
            m = tuple(lam * s + (1 - lam) * t for s, t in zip(p, q))
            if _strict_violation(p_ineqs, m) and _strict_violation(q_ineqs, m):
                return {"p_point": p, "q_point": q, "weight": lam, "combination": m}
    return None


def pq_example_check(seed: int = 0) -> PQReport:
    p_ineqs = [inequality(s) for s in P_INEQS]
    q_ineqs = [inequality(s) for s in Q_INEQS]
    q_in_p = [substitute(v) for v in q_ineqs]

    # the displayed matrices agree with the call products at interior points
    match = True
    for ineqs, rows, calls in ((p_ineqs, P_MATRIX, P_CALLS), (q_ineqs, Q_MATRIX, Q_CALLS)):
        x = interior_point(ineqs)
        if x is None or family_matrix(rows, x) != family_product(calls, x):
            match = False

    pf, qf = matrix_forms(P_MATRIX), matrix_forms(Q_MATRIX)
    # span of a family = column space of its 20x10 coefficient matrix
    p_cols = [tuple(r[t] for r in pf) for t in range(len(PARAMS))]
    q_cols = [tuple(r[t] for r in qf) for t in range(len(PARAMS))]
    spans_equal = (ph.LinearSubspace.spanned_by(p_cols, 20) == ph.LinearSubspace.spanned_by(q_cols, 20)
                   and ph.rank(p_cols, 20) == 10)
    subst_ok = [substitute(v) for v in qf] == pf

    both = p_ineqs + [v for v in q_in_p if v not in p_ineqs]
    cone = ph.cone_from_inequalities(both, ambient=len(PARAMS))
    point = interior_point(both)
    if point is not None and not satisfies(both, point):
        point = None

    wit = find_witness(p_ineqs, q_in_p, seed=seed)
    witness = None
    if wit is not None:
        p_mat = family_matrix(P_MATRIX, wit["p_point"])
        q_mat = family_matrix(P_MATRIX, wit["q_point"])
        c_mat = family_matrix(P_MATRIX, wit["combination"])
        witness = {
            "p_matrix": p_mat.to_json()["entries"],
            "q_matrix": q_mat.to_json()["entries"],
            "weight": str(wit["weight"]),
            "combination": c_mat.to_json()["entries"],
            "p_parameters": [str(t) for t in wit["p_point"]],
            "q_parameters": [str(t) for t in _inverse_substitution(wit["q_point"])],
        }
    return PQReport(match, spans_equal, subst_ok, [_describe(v) for v in q_in_p],
                    cone.dim, point or (), witness)


def _inverse_substitution(x) -> tuple:
    """P-parameters to the Q-parameters giving the same matrix."""
    val = dict(zip(PARAMS, x))
    return tuple(evaluate(form(SUBSTITUTION.get(p, p)), x) if p in SUBSTITUTION else val[p]
                 for p in PARAMS)


def q_point_matrix(q_params) -> TropMatrix:
    return family_matrix(Q_MATRIX, q_params)


def as_vector(m: TropMatrix) -> tuple:
    return matrix_to_vector(m)

"""Tropicalised matrix groups: tropical determinant, Trop(SL_n), Trop(O_n) tests."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, permutations

from .trop import INF, Call, TropMatrix, is_metric, product_of_calls


def _perm_sign(p) -> int:
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class TDet:
    value: object
    multiplicity: int
    minimizers: tuple


def tdet(a: TropMatrix) -> TDet:
    """Tropical determinant by scanning all n! permutations."""
    n = a.n
    best = INF
    arg = []
    for p in permutations(range(n)):
        s = sum((a[i, p[i]] for i in range(n)), Fraction(0))
        if s < best:
            best, arg = s, [p]
        elif s == best:
            arg.append(p)
    return TDet(best, len(arg), tuple(arg))


def in_trop_sl(a: TropMatrix) -> bool:
    """Zero tropical determinant, or a negative one attained at least twice."""
    d = tdet(a)
    if d.value is INF:
        return False
    return d.value == 0 or (d.value < 0 and d.multiplicity >= 2)


def random_signed_matrix(n: int, rng: random.Random, lo=-5, hi=5, p_inf=0.15) -> TropMatrix:
    return TropMatrix([[INF if rng.random() < p_inf else rng.randint(lo, hi) for _ in range(n)]
                       for _ in range(n)])


def random_trop_sl(n: int, rng: random.Random) -> TropMatrix:
    """A random member of Trop(SL_n).

    Adding a constant to one row shifts every permutation sum equally, so a
    random matrix is moved onto the variety by a row shift: to tropical
    determinant 0 if the minimum is unique, else to a random value <= 0.
    """
    while True:
        a = random_signed_matrix(n, rng)
        d = tdet(a)
        if d.value is not INF:
            break
    target = 0 if d.multiplicity == 1 else -rng.randint(0, 5)
    shift = target - d.value
    rows = [list(r) for r in a.entries]
    rows[0] = [x + shift for x in rows[0]]
    return TropMatrix(rows)


@dataclass
class SLReport:
    n: int
    trials: int
    seed: int
    failures: list

    def to_json(self) -> dict:
        return {"n": self.n, "trials": self.trials, "seed": self.seed,
                "failures": len(self.failures), "examples": self.failures[:5]}


def sl_closure_check(n: int, trials: int, seed: int) -> SLReport:
    """Products of random Trop(SL_n) members must stay in Trop(SL_n)."""
    if n > 5:
        raise ValueError("n must be at most 5")
    rng = random.Random(seed)
    failures = []
    for t in range(trials):
        a, b = random_trop_sl(n, rng), random_trop_sl(n, rng)
        if not in_trop_sl(a @ b):
            failures.append({"trial": t, "A": a.to_json()["entries"], "B": b.to_json()["entries"]})
    return SLReport(n, trials, seed, failures)


# -- the additive-group example ------------------------------------------------

def additive_family(a) -> TropMatrix:
    """Valuations of the one-parameter unipotent group with entries x, -x, x."""
    return TropMatrix([[0, a, a, INF], [INF, 0, INF, a], [INF, INF, 0, a], [INF, INF, INF, 0]])


def in_additive_family(m: TropMatrix) -> bool:
    return m.n == 4 and m == additive_family(m[0, 1])


def additive_counterexample(a, b) -> dict:
    ma, mb = additive_family(a), additive_family(b)
    prod = ma @ mb
    lo = min(ma[0, 1], mb[0, 1])
    expected = TropMatrix([[0, lo, lo, ma[0, 1] + mb[0, 1]], [INF, 0, INF, lo],
                           [INF, INF, 0, lo], [INF, INF, INF, 0]])
    return {"product": prod, "matches_display": prod == expected,
            "is_member": in_additive_family(prod)}


# -- orthogonal groups ---------------------------------------------------------

O2_LABELS = ("G2", "G2-columns-reversed", "balancing", "outside")


def o2_classify(m: TropMatrix) -> str:
    """Which of the three cones of Trop(O_2) contains ``m``."""
    if m.n != 2:
        raise ValueError("need a 2x2 matrix")
    (p, q), (r, s) = m.entries
    if p == 0 and s == 0 and q == r and (q is INF or q >= 0):
        return "G2"
    if q == 0 and r == 0 and p == s and (p is INF or p >= 0):
        return "G2-columns-reversed"
    if p == q == r == s and p is not INF and p <= 0:
        return "balancing"
    return "outside"


def _var(n, i, j):
    return i * n + j


def orthogonal_equations(n: int) -> list:
    """Generators xᵀx = I, x xᵀ = I and det x = 1 as (name, {exponent: coeff}) pairs."""
    nv = n * n
    eqs = []

    def mono(*vs):
        e = [0] * nv
        for v in vs:
            e[v] += 1
        return tuple(e)

    const = tuple([0] * nv)
    for kind in ("col", "row"):
        for p, q in combinations_with_replacement(range(n), 2):
            poly: dict = {}
            for t in range(n):
                if kind == "col":
                    m = mono(_var(n, t, p), _var(n, t, q))
                else:
                    m = mono(_var(n, p, t), _var(n, q, t))
                poly[m] = poly.get(m, 0) + 1
            if p == q:
                poly[const] = poly.get(const, 0) - 1
            eqs.append((f"{kind}{p + 1}{q + 1}", {k: v for k, v in poly.items() if v}))
    det: dict = {}
    for perm in permutations(range(n)):
        m = mono(*(_var(n, i, perm[i]) for i in range(n)))
        det[m] = det.get(m, 0) + _perm_sign(perm)
    det[const] = det.get(const, 0) - 1
    eqs.append(("det", {k: v for k, v in det.items() if v}))
    return eqs


def tropical_residue(poly: dict, w) -> tuple:
    """(minimum, number of terms attaining it) with all coefficient valuations 0."""
    vals = []
    for expo, _coeff in poly.items():
        v = Fraction(0)
        for x, e in zip(w, expo):
            if e:
                v = v + e * x if x is not INF else INF
                if v is INF:
                    break
        vals.append(v)
    finite = [v for v in vals if v is not INF]
    if not finite:
        return INF, len(vals)
    lo = min(finite)
    return lo, sum(1 for v in finite if v == lo)


def prevariety_check(m: TropMatrix) -> dict:
    """Evaluate every tropicalised generator of O_n at ``m``."""
    n = m.n
    w = [m[i, j] for i in range(n) for j in range(n)]
    residues = {}
    ok = True
    for name, poly in orthogonal_equations(n):
        lo, count = tropical_residue(poly, w)
        good = lo is INF or count >= 2
        residues[name] = {"min": "inf" if lo is INF else str(lo), "attained": count, "ok": good}
        ok = ok and good
    return {"satisfied": ok, "residues": residues}


def o3_prevariety_check(m: TropMatrix) -> dict:
    if m.n != 3:
        raise ValueError("need a 3x3 matrix")
    return prevariety_check(m)


def in_asymmetric_g3_cone(m: TropMatrix) -> bool:
    """Shape [[0,a,b],[b+c,0,c],[b,c,0]] with a >= b + c and b, c >= 0."""
    (z1, a, b), (d, z2, c), (e, f, z3) = m.entries
    if not (z1 == z2 == z3 == 0):
        return False
    if not m.is_nonnegative:
        return False
    return e == b and f == c and d == b + c and a >= b + c


def o3_nonneg_classify(m: TropMatrix) -> dict:
    """Place a nonnegative prevariety point inside Sym(3)·G_3.

    Tries every row permutation that puts zeros on the diagonal; the result
    must be metric or, after relabelling, of the asymmetric G_3 shape.
    """
    if m.n != 3 or not m.is_nonnegative:
        raise ValueError("need a nonnegative 3x3 matrix")
    for perm in permutations(range(3)):
        b = m.permute_rows(perm)
        if not b.has_zero_diagonal:
            continue
        if is_metric(b):
            return {"in_Sym3_G3": True, "permutation": list(perm), "cone": "D3"}
        for sigma in permutations(range(3)):
            if in_asymmetric_g3_cone(b.permute(sigma)):
                return {"in_Sym3_G3": True, "permutation": list(perm),
                        "cone": "asymmetric", "relabelling": list(sigma)}
    return {"in_Sym3_G3": False, "permutation": None, "cone": "unclassifiable",
            "matrix": m.to_json()["entries"]}


def random_g_element(n: int, rng: random.Random, max_calls: int = 12, p_inf=0.0) -> TropMatrix:
    """Product of a random number of random lossy calls with small rational losses."""
    calls = []
    for _ in range(rng.randint(0, max_calls)):
        k, l = rng.sample(range(n), 2)
        w = INF if rng.random() < p_inf else Fraction(rng.randint(0, 20), rng.choice((1, 2, 3)))
        calls.append(Call(k, l, w))
    return product_of_calls(n, calls)

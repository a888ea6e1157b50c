"""Exact polyhedral cones over Q, stored as primitive integer vectors.

A :class:`PolyCone` carries both descriptions::

    {x : E x = 0, F x >= 0}  ==  cone(rays) + span(lines)

Canonical forms make equal cones compare equal field by field: rays are
primitive and sorted, lines/equations are integer-cleared reduced row echelon
bases, facet normals are reduced modulo the equations and then made
primitive.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd
from operator import mul
from typing import Iterable, Sequence


def dot(a, b):
    return sum(map(mul, a, b))


def _gcd_all(v) -> int:
    return reduce(gcd, v, 0)


def primitive(v) -> tuple:
    """Divide by the (positive) gcd; keeps direction."""
    v = tuple(int(x) for x in v)
    g = _gcd_all(v)
    return tuple(x // g for x in v) if g > 1 else v


def integer_vector(v) -> tuple:
    """Clear denominators of a rational vector and make it primitive."""
    fr = [Fraction(x) for x in v]
    den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in fr), 1)
    return primitive(x.numerator * (den // x.denominator) for x in fr)


def _sign_normalize(v: tuple) -> tuple:
    for x in v:
        if x:
            return v if x > 0 else tuple(-y for y in v)
    return v


def rref(rows: Iterable, ncols: int) -> tuple:
    """Canonical integer basis of the row space (reduced echelon, primitive rows)."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return tuple(_sign_normalize(integer_vector(m[i])) for i in range(r))


def _pivot_cols(basis) -> list:
    return [next(j for j, x in enumerate(b) if x) for b in basis]


def rank(rows, ncols=None) -> int:
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    if ncols is None:
        ncols = len(rows[0])
    return _int_rank(rows, ncols)


def _int_rank(rows, ncols) -> int:
    # fraction-free Gaussian elimination
    m = [list(r) for r in rows]
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pr = m[r]
        a = pr[c]
        for i in range(r + 1, len(m)):
            b = m[i][c]
            if b:
                m[i] = [a * x - b * y for x, y in zip(m[i], pr)]
        r += 1
        if r == len(m):
            break
    return r


def nullspace(rows, ncols: int) -> list:
    """Integer basis of {x : rows · x = 0}."""
    basis = rref(rows, ncols)
    piv = _pivot_cols(basis)
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for b, pc in zip(basis, piv):
            v[pc] = Fraction(-b[f], b[pc])
        out.append(integer_vector(v))
    return out


def reduce_modulo(v, basis) -> tuple:
    """Canonical coset representative of ``v`` modulo span(basis) (basis from :func:`rref`)."""
    v = [Fraction(x) for x in v]
    for b, pc in zip(basis, _pivot_cols(basis)):
        if v[pc]:
            f = v[pc] / b[pc]
            v = [x - f * y for x, y in zip(v, b)]
    return integer_vector(v)


# -- double description --------------------------------------------------

def _dd(ineqs: Sequence[tuple], eqs: Sequence[tuple], d: int):
    """Generators (rays, lines) of {x : eqs·x = 0, ineqs·x >= 0}.

    Incremental double description; adjacency by the combinatorial test.
    """
    lines = [tuple(v) for v in nullspace(eqs, d)] if eqs else [
        tuple(1 if i == j else 0 for j in range(d)) for i in range(d)]
    rays: list = []
    zs: list = []  # bitmask of processed inequalities tight at each ray
    for bit_index, h in enumerate(ineqs):
        bit = 1 << bit_index
        li = next((i for i, l in enumerate(lines) if dot(h, l)), None)
        if li is not None:
            l = lines.pop(li)
            hl = dot(h, l)
            if hl < 0:
                l = tuple(-x for x in l)
                hl = -hl
            lines = [_sign_normalize(primitive(hl * x - dot(h, lp) * y for x, y in zip(lp, l)))
                     if dot(h, lp) else lp for lp in lines]
            newrays = []
            for r in rays:
                hr = dot(h, r)
                newrays.append(primitive(hl * x - hr * y for x, y in zip(r, l)) if hr else r)
            rays = newrays
            zs = [z | bit for z in zs]
            rays.append(l)
            zs.append(bit - 1)  # lines are orthogonal to every earlier inequality
            continue
        vals = [dot(h, r) for r in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        zero = [i for i, v in enumerate(vals) if v == 0]
        if not neg:
            zs = [z | bit if vals[i] == 0 else z for i, z in enumerate(zs)]
            continue
        new_rays = []
        new_zs = []
        for p in pos:
            zp = zs[p]
            for q in neg:
                common = zp & zs[q]
                adjacent = True
                for t in range(len(rays)):
                    if t != p and t != q and (zs[t] & common) == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                vp, vq = vals[p], -vals[q]
                new_rays.append(primitive(vp * y + vq * x for x, y in zip(rays[p], rays[q])))
                new_zs.append(common | bit)
        keep = pos + zero
        rays = [rays[i] for i in keep] + new_rays
        zs = [zs[i] | (bit if vals[i] == 0 else 0) for i in keep] + new_zs
    return rays, lines


@dataclass(frozen=True)
class LinearSubspace:
    ambient: int
    basis: tuple  # canonical rref rows

    @classmethod
    def spanned_by(cls, vectors, ambient: int) -> "LinearSubspace":
        return cls(ambient, rref(vectors, ambient))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v) -> bool:
        return not any(reduce_modulo(v, self.basis))

    def complement_equations(self) -> list:
        """Rows whose common kernel is this subspace."""
        if self.basis:
            return nullspace(self.basis, self.ambient)
        return [tuple(int(i == j) for j in range(self.ambient)) for i in range(self.ambient)]

    def intersection(self, other: "LinearSubspace") -> "LinearSubspace":
        eqs = self.complement_equations() + other.complement_equations()
        if not eqs:
            return LinearSubspace.spanned_by(
                [tuple(int(i == j) for j in range(self.ambient)) for i in range(self.ambient)],
                self.ambient)
        return LinearSubspace(self.ambient, rref(nullspace(eqs, self.ambient), self.ambient))

    def to_json(self) -> dict:
        return {"ambient": self.ambient, "basis": [list(b) for b in self.basis]}


@dataclass(frozen=True)
class PolyCone:
    """Rational polyhedral cone with both descriptions in canonical form."""

    ambient: int
    rays: tuple
    lines: tuple
    facets: tuple
    equations: tuple

    @property
    def dim(self) -> int:
        return self.ambient - len(self.equations)

    @property
    def is_pointed(self) -> bool:
        return not self.lines

    @property
    def is_simplicial(self) -> bool:
        return self.is_pointed and len(self.rays) == self.dim

    def span(self) -> LinearSubspace:
        return LinearSubspace.spanned_by(list(self.rays) + list(self.lines), self.ambient)

    def contains(self, v) -> bool:
        return contains_point(self, v)

    def to_json(self) -> dict:
        return {
            "ambient": self.ambient,
            "rays": [list(r) for r in self.rays],
            "facets": [list(f) for f in self.facets],
            "equations": [list(e) for e in self.equations],
            "lines": [list(l) for l in self.lines],
        }

    @classmethod
    def from_json(cls, obj) -> "PolyCone":
        return cone_from_generators(obj["rays"], obj.get("lines", ()), ambient=obj["ambient"])


def _finish(ambient, rays, lines, ineqs, eqs) -> PolyCone:
    """Canonicalise a DD result given the inequality system it came from."""
    line_basis = rref(lines, ambient) if lines else ()
    if line_basis:
        rays = [reduce_modulo(r, line_basis) for r in rays]
    rays = sorted(set(primitive(r) for r in rays if any(r)))
    gens = list(rays) + list(line_basis)
    d = rank(gens, ambient) if gens else 0
    eq_rows = list(eqs)
    facets = []
    for h in ineqs:
        if all(dot(h, r) == 0 for r in rays):
            eq_rows.append(h)
            continue
        tight = [r for r in rays if dot(h, r) == 0] + list(line_basis)
        if (rank(tight, ambient) if tight else 0) == d - 1:
            facets.append(h)
    eq_basis = rref(eq_rows, ambient) if eq_rows else ()
    if len(eq_basis) != ambient - d:
        # equations not all visible in the input system; derive from generators
        eq_basis = rref(nullspace(gens, ambient), ambient) if gens else rref(
            [tuple(int(i == j) for j in range(ambient)) for i in range(ambient)], ambient)
    facets = sorted(set(reduce_modulo(h, eq_basis) for h in facets))
    return PolyCone(ambient, tuple(rays), tuple(line_basis), tuple(facets), tuple(eq_basis))


def cone_from_inequalities(normals, equations=(), ambient: int | None = None) -> PolyCone:
    """The cone {x : equations·x = 0, normals·x >= 0}."""
    normals = [integer_vector(h) for h in normals]
    equations = [integer_vector(e) for e in equations]
    if ambient is None:
        ambient = len((normals or equations)[0])
    ineqs = sorted(set(h for h in normals if any(h)))
    eqs = [e for e in equations if any(e)]
    rays, lines = _dd(ineqs, eqs, ambient)
    return _finish(ambient, rays, lines, ineqs, eqs)


def cone_from_generators(rays, lines=(), ambient: int | None = None) -> PolyCone:
    """The cone generated by ``rays`` plus the linear span of ``lines``."""
    rays = [integer_vector(r) for r in rays]
    lines = [integer_vector(l) for l in lines]
    if ambient is None:
        ambient = len((rays or lines)[0])
    rays = [r for r in rays if any(r)]
    lines = [l for l in lines if any(l)]
    # facets: extreme rays of the dual cone; equations: its lineality
    dual_rays, dual_lines = _dd(sorted(set(rays)), lines, ambient)
    eqs = rref(dual_lines, ambient) if dual_lines else ()
    facets = [reduce_modulo(h, eqs) for h in dual_rays]
    prim_rays, prim_lines = _dd(sorted(set(facets)), list(eqs), ambient)
    return _finish(ambient, prim_rays, prim_lines, sorted(set(facets)), list(eqs))


def contains_point(c: PolyCone, v) -> bool:
    if len(v) != c.ambient:
        raise ValueError("dimension mismatch")
    v = [Fraction(x) for x in v]
    return all(dot(e, v) == 0 for e in c.equations) and all(dot(f, v) >= 0 for f in c.facets)


def span(c: PolyCone) -> LinearSubspace:
    return c.span()


def intersect(a: PolyCone, b: PolyCone) -> PolyCone:
    if a.ambient != b.ambient:
        raise ValueError("dimension mismatch")
    return cone_from_inequalities(list(a.facets) + list(b.facets),
                                  list(a.equations) + list(b.equations), ambient=a.ambient)


def dim(c: PolyCone) -> int:
    return c.dim


# -- faces -----------------------------------------------------------------

def face_raysets(c: PolyCone) -> dict:
    """Nonzero faces of a pointed cone as frozensets of ray indices, keyed by dimension."""
    if not c.is_pointed:
        raise ValueError("face enumeration needs a pointed cone")
    nr = len(c.rays)
    if nr == 0:
        return {}
    if c.is_simplicial:
        return {k: [frozenset(s) for s in combinations(range(nr), k)] for k in range(1, nr + 1)}
    incid = [frozenset(i for i, r in enumerate(c.rays) if dot(f, r) == 0) for f in c.facets]
    faces = {frozenset(range(nr))}
    frontier = set(incid)
    while frontier:
        faces |= frontier
        nxt = set()
        for f in frontier:
            for g in incid:
                h = f & g
                if h and h not in faces:
                    nxt.add(h)
        frontier = nxt
    out: dict = {}
    for f in faces:
        k = rank([c.rays[i] for i in f], c.ambient)
        out.setdefault(k, []).append(f)
    return {k: sorted(v, key=sorted) for k, v in sorted(out.items())}


def face_poset(c: PolyCone) -> dict:
    """All nonzero faces as cones, grouped by dimension."""
    return {
        k: [cone_from_generators([c.rays[i] for i in f], ambient=c.ambient) for f in fs]
        for k, fs in face_raysets(c).items()
    }


def f_vector(c: PolyCone) -> tuple:
    fr = face_raysets(c)
    return tuple(len(fr.get(k, [])) for k in range(1, c.dim + 1))


@dataclass
class FanReport:
    is_fan: bool
    f_vector: tuple
    witnesses: list
    n_rays: int
    faces: dict  # dim -> set of frozensets of global ray ids
    rays: list

    def to_json(self) -> dict:
        return {"is_fan": self.is_fan, "f_vector": list(self.f_vector),
                "witnesses": self.witnesses, "n_rays": self.n_rays}


def fan_check(cones: Sequence[PolyCone], progress=None) -> FanReport:
    """Check that the cones and all their faces form a polyhedral fan.

    It suffices to check that any two of the given cones meet in a common
    face: faces of faces are then handled by transitivity.  The intersection
    is computed exactly and must have as ray set the ray set of a face of
    each cone.
    """
    if not cones:
        return FanReport(True, (), [], 0, {}, [])
    amb = cones[0].ambient
    if any(c.ambient != amb for c in cones):
        raise ValueError("dimension mismatch")
    ray_id: dict = {}
    local = []
    face_sets = []
    all_faces: dict = {}
    for c in cones:
        ids = [ray_id.setdefault(r, len(ray_id)) for r in c.rays]
        local.append(ids)
        fs = set()
        for k, lst in face_raysets(c).items():
            for f in lst:
                g = frozenset(ids[i] for i in f)
                fs.add(g)
                all_faces.setdefault(k, set()).add(g)
        face_sets.append(fs)
    witnesses = []
    spans = [c.span() for c in cones]
    for a, b in combinations(range(len(cones)), 2):
        if progress:
            progress(a, b)
        ca, cb = cones[a], cones[b]
        if spans[a].intersection(spans[b]).dim == 0:
            continue
        inter = intersect(ca, cb)
        ids = set()
        ok = True
        for r in inter.rays:
            if r not in ray_id:
                ok = False
                break
            ids.add(ray_id[r])
        ids = frozenset(ids)
        if ok and ids and (ids not in face_sets[a] or ids not in face_sets[b]):
            ok = False
        if ok and not ids and inter.dim != 0:
            ok = False
        if not ok:
            witnesses.append({"pair": [a, b], "intersection_rays": [list(r) for r in inter.rays]})
    top = max(all_faces) if all_faces else 0
    fv = tuple(len(all_faces.get(k, ())) for k in range(1, top + 1))
    inv = [None] * len(ray_id)
    for r, i in ray_id.items():
        inv[i] = r
    return FanReport(not witnesses, fv, witnesses, len(ray_id), all_faces, inv)

"""Polyhedral fan structure of G_n for small n from parameterised call products.

A *scheme* is a word of unordered pairs ``I_1 … I_k``; it defines the
piecewise-linear map ``a ↦ C_{I_1}(a_1) ⊙ … ⊙ C_{I_k}(a_k)`` on R^k_{≥0}.
Entry (i, j) of the product is the minimum of 0/1 linear forms, one per
index-increasing simple path from i to j through the word.  A *chamber* is a
full-dimensional region on which the minimising form of every entry is fixed;
its image is a polyhedral cone in matrix space.

Matrix space coordinates are the n(n-1) off-diagonal entries in row-major
order (see :func:`offdiag`); the zero diagonal is implicit.
"""

from __future__ import annotations

import logging
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from math import comb, gcd

import numpy as np

from . import polyhedra as ph
from .polyhedra import PolyCone, dot
from .trop import INF, TropMatrix, is_connected, phone_call_matrix

log = logging.getLogger(__name__)


def offdiag(n: int) -> list:
    return [(i, j) for i in range(n) for j in range(n) if i != j]


def call_pairs(n: int) -> list:
    return list(combinations(range(n), 2))


def matrix_to_vector(m: TropMatrix) -> tuple:
    if any(m[i, j] is INF for i, j in offdiag(m.n)):
        raise ValueError("matrix has infinite entries")
    return tuple(m[i, j] for i, j in offdiag(m.n))


def vector_to_matrix(v, n: int) -> TropMatrix:
    rows = [[0] * n for _ in range(n)]
    for (i, j), x in zip(offdiag(n), v):
        rows[i][j] = Fraction(x)
    return TropMatrix(rows)


def coordinate_permutation(n: int, perm) -> list:
    """Index map for relabelling gossipers: position of entry (perm[i], perm[j])."""
    pos = {ij: t for t, ij in enumerate(offdiag(n))}
    return [pos[(perm[i], perm[j])] for i, j in offdiag(n)]


def transpose_permutation(n: int) -> list:
    pos = {ij: t for t, ij in enumerate(offdiag(n))}
    return [pos[(j, i)] for i, j in offdiag(n)]


def move(v, target) -> tuple:
    """Move coordinate t of ``v`` to position ``target[t]``."""
    out = [0] * len(v)
    for t, x in enumerate(v):
        out[target[t]] = x
    return tuple(out)


# -- path forms ------------------------------------------------------------

def entry_path_forms(scheme, n: int, i: int, j: int) -> list:
    """All index-increasing simple paths from i to j, as sorted index tuples.

    An empty list means the entry is ∞.
    """
    if i == j:
        raise ValueError("diagonal entries are identically zero")
    out = []

    def walk(v, start, used, visited):
        for t in range(start, len(scheme)):
            a, b = scheme[t]
            if v == a:
                u = b
            elif v == b:
                u = a
            else:
                continue
            if u in visited:
                continue
            if u == j:
                out.append(used + (t,))
            else:
                walk(u, t + 1, used + (t,), visited | {u})

    walk(i, 0, (), {i})
    return sorted(out)


def _mask(path) -> int:
    return sum(1 << t for t in path)


def _minimal_forms(masks) -> list:
    """Drop forms that contain another form (never strictly minimal on a > 0)."""
    masks = sorted(set(masks), key=lambda m: (bin(m).count("1"), m))
    keep = []
    for m in masks:
        if not any(k & m == k for k in keep):
            keep.append(m)
    return keep


def _vec(mask: int, k: int) -> tuple:
    return tuple((mask >> t) & 1 for t in range(k))


@dataclass(frozen=True)
class Chamber:
    scheme: tuple
    n: int
    choice: tuple  # per off-diagonal entry: 0/1 form tuple, or None for ∞
    region: PolyCone

    @property
    def linear_map(self) -> list:
        return [c for c in self.choice if c is not None]

    @property
    def infinite_entries(self) -> frozenset:
        return frozenset(ij for ij, c in zip(offdiag(self.n), self.choice) if c is None)

    def evaluate(self, params) -> tuple:
        return tuple(INF if c is None else sum(x for x, b in zip(params, c) if b)
                     for c in self.choice)


class _SchemeForms:
    def __init__(self, scheme, n):
        self.scheme = tuple(tuple(sorted(p)) for p in scheme)
        self.n = n
        self.k = len(scheme)
        self.entries = offdiag(n)
        self.forms = [_minimal_forms(_mask(p) for p in entry_path_forms(self.scheme, n, i, j))
                      for i, j in self.entries]
        self.vecs = [[_vec(m, self.k) for m in fs] for fs in self.forms]
        self.competing = [t for t, fs in enumerate(self.forms) if len(fs) > 1]
        diffs = set()
        for t in self.competing:
            for a, b in combinations(self.vecs[t], 2):
                diffs.add(tuple(x - y for x, y in zip(a, b)))
        self.diffs = sorted(diffs)

    def choose(self, *keys) -> tuple:
        """Minimising form per entry, ties broken by successive key vectors."""
        out = []
        for vs in self.vecs:
            if not vs:
                out.append(None)
            elif len(vs) == 1:
                out.append(vs[0])
            else:
                out.append(min(vs, key=lambda v: tuple(dot(v, key) for key in keys)))
        return tuple(out)

    def region(self, choice) -> PolyCone:
        k = self.k
        ineqs = [tuple(int(i == j) for j in range(k)) for i in range(k)]
        for t in self.competing:
            c = choice[t]
            for v in self.vecs[t]:
                if v != c:
                    ineqs.append(tuple(x - y for x, y in zip(v, c)))
        return ph.cone_from_inequalities(ineqs, ambient=k)


def chambers(scheme, n: int, seed: int = 0) -> list:
    """All full-dimensional linearity regions of the scheme's product map.

    Walks the adjacency graph of regions: from each region, every facet
    that is not a coordinate wall is crossed at a generic point of its
    relative interior, first-order tie-breaking along the outward normal
    selecting the neighbouring region.
    """
    sf = _SchemeForms(scheme, n)
    k = sf.k
    rng = random.Random(f"{seed}:{sf.scheme}")
    while True:
        p = tuple(rng.randint(1, 10 ** 6) for _ in range(k))
        if all(dot(d, p) for d in sf.diffs):
            break
    start = sf.choose(p)
    seen = {start: sf.region(start)}
    queue = deque([start])
    while queue:
        choice = queue.popleft()
        reg = seen[choice]
        if not sf.competing:
            break
        for h in reg.facets:
            if sum(1 for x in h if x) == 1:
                continue  # orthant wall
            fr = [r for r in reg.rays if dot(h, r) == 0]
            while True:
                coef = [rng.randint(1, 10 ** 6) for _ in fr]
                q = tuple(sum(c * r[t] for c, r in zip(coef, fr)) for t in range(k))
                if all(dot(d, q) or all(dot(d, r) == 0 for r in fr) for d in sf.diffs):
                    break
            out = tuple(-x for x in h)
            nxt = sf.choose(q, out)
            if nxt not in seen:
                seen[nxt] = sf.region(nxt)
                queue.append(nxt)
    return [Chamber(sf.scheme, n, c, seen[c]) for c in sorted(seen, key=repr)]


@dataclass(frozen=True)
class ImageCone:
    cone: PolyCone
    infinite_entries: frozenset = frozenset()


def image_cone(ch: Chamber) -> ImageCone:
    """Image of the chamber under its linear map, over the finite entries.

    ∞ entries are recorded in ``infinite_entries``; their coordinates are
    set to 0 in the cone.
    """
    m = len(ch.choice)
    rays = []
    for r in ch.region.rays:
        rays.append(tuple(0 if c is None else dot(c, r) for c in ch.choice))
    if not any(any(r) for r in rays):
        cone = ph.cone_from_inequalities([], [tuple(int(i == j) for j in range(m)) for i in range(m)],
                                         ambient=m)
    else:
        cone = ph.cone_from_generators(rays, ambient=m)
    return ImageCone(cone, ch.infinite_entries)


def map_rank(ch: Chamber) -> int:
    rows = ch.linear_map
    return ph.rank(rows, len(ch.scheme)) if rows else 0


# -- scheme reduction -------------------------------------------------------

def _commute(a, b) -> bool:
    return not (set(a) & set(b))


def lex_normal(word) -> tuple:
    """Lexicographically least word equal to ``word`` modulo commuting disjoint calls."""
    rest = list(word)
    out = []
    while rest:
        best = None
        for t, x in enumerate(rest):
            if all(_commute(x, y) for y in rest[:t]) and (best is None or x < rest[best]):
                best = t
        out.append(rest.pop(best))
    return tuple(out)


def is_reducible(word) -> bool:
    """True if two equal calls can be made adjacent by commuting (so they merge)."""
    for s, x in enumerate(word):
        for t in range(s + 1, len(word)):
            y = word[t]
            if y == x:
                return True
            if not _commute(x, y):
                break
    return False


def relabel_word(word, perm) -> tuple:
    return tuple(tuple(sorted((perm[a], perm[b]))) for a, b in word)


def canonical_scheme(word, n: int) -> tuple:
    return min(lex_normal(relabel_word(word, p)) for p in permutations(range(n)))


def _connected(word, n) -> bool:
    return is_connected(n, set(word))


def scheme_representatives(n: int, k: int) -> list:
    """Class representatives of all C(n,2)^k schemes under relabelling and commutation.

    Words that can merge two equal calls, or whose calls do not connect all
    n gossipers, are dropped: their images have dimension below C(n,2).
    """
    ps = call_pairs(n)
    reps = set()
    for word in product(ps, repeat=k):
        if is_reducible(word) or not _connected(word, n):
            continue
        if word != lex_normal(word):
            continue
        c = canonical_scheme(word, n)
        if c == word:
            reps.add(c)
    return sorted(reps)


# -- spans -------------------------------------------------------------------

def span_key(rows_or_rays, m) -> tuple:
    return ph.rref(rows_or_rays, m)


@dataclass
class SpanCensus:
    n: int
    k: int
    spans: list  # canonical rref bases
    cones: dict  # span -> list of PolyCone (distinct image cones with that span)
    maximal: dict  # span -> PolyCone containing all others (None if absent)
    stats: dict = field(default_factory=dict)


def _cone_from_injective(region: PolyCone, lmap, m: int) -> PolyCone:
    """Image of a full-dimensional pointed region under an injective map."""
    rays = [tuple(dot(row, r) for row in lmap) for r in region.rays]
    return ph.cone_from_generators(rays, ambient=m)


def enumerate_spans(n: int, k: int | None = None, progress=None) -> SpanCensus:
    """Spans of all full-dimensional image cones of length-k schemes.

    Every scheme in C(n,2)^k is covered: one representative per class under
    relabelling and commutation is expanded into chambers, and its
    full-dimensional image cones are transported by all of Sym(n).
    """
    d = comb(n, 2)
    if k is None:
        k = d
    m = n * (n - 1)
    perms = list(permutations(range(n)))
    coord_perms = [coordinate_permutation(n, p) for p in perms]
    reps = scheme_representatives(n, k)
    raw: dict = {}  # cone ray-key -> None
    stats = {"representatives": len(reps), "chambers": 0, "full_dim_chambers": 0,
             "full_rank_with_infinite_entries": 0}
    for idx, word in enumerate(reps):
        if progress:
            progress(idx, len(reps))
        for ch in chambers(word, n):
            stats["chambers"] += 1
            lm = [(t, c) for t, c in enumerate(ch.choice)]
            finite = [c for _, c in lm if c is not None]
            if ph.rank(finite, k) < d:
                continue
            if len(finite) < m:
                stats["full_rank_with_infinite_entries"] += 1
                continue
            stats["full_dim_chambers"] += 1
            rays = tuple(sorted(ph.primitive(tuple(dot(row, r) for row in finite))
                                for r in ch.region.rays))
            raw[rays] = None
    # transport by Sym(n)
    all_cones: dict = {}
    for rays in raw:
        for cp in coord_perms:
            key = tuple(sorted(move(r, cp) for r in rays))
            all_cones[key] = None
    by_span: dict = {}
    for key in all_cones:
        sp = span_key(key, m)
        by_span.setdefault(sp, []).append(key)
    spans = sorted(by_span)
    cones = {}
    maximal = {}
    for sp in spans:
        cs = [ph.cone_from_generators(list(key), ambient=m) for key in sorted(by_span[sp])]
        cones[sp] = cs
        top = None
        for c in cs:
            if all(all(ph.contains_point(c, r) for r in o.rays) for o in cs):
                top = c
                break
        maximal[sp] = top
    stats["distinct_cones"] = len(all_cones)
    return SpanCensus(n, k, spans, cones, maximal, stats)


# -- orbits -------------------------------------------------------------------

def _act_on_span(sp, target, m) -> tuple:
    return ph.rref([move(b, target) for b in sp], m)


def orbit_classify(spans, n: int, with_transpose: bool = False) -> list:
    """Orbits of spans under simultaneous row/column relabelling (and transposition).

    Returns orbits as sorted lists of spans, sorted by (size, first element).
    """
    m = n * (n - 1)
    group = [coordinate_permutation(n, p) for p in permutations(range(n))]
    if with_transpose:
        tp = transpose_permutation(n)
        group = group + [[tp[g[t]] for t in range(m)] for g in group]
    remaining = set(spans)
    orbits = []
    for sp in sorted(spans):
        if sp not in remaining:
            continue
        orb = {_act_on_span(sp, g, m) for g in group}
        if not orb <= set(spans):
            raise ValueError("span set is not closed under the group action")
        remaining -= orb
        orbits.append(sorted(orb))
    return sorted(orbits, key=lambda o: (len(o), o[0]))


def orbit_size_distribution(orbits) -> dict:
    dist: dict = {}
    for o in orbits:
        dist[len(o)] = dist.get(len(o), 0) + 1
    return dict(sorted(dist.items()))


# -- the fan -------------------------------------------------------------------

def metric_cone(n: int) -> PolyCone:
    """Closed metric cone D_n in off-diagonal coordinates."""
    idx = {ij: t for t, ij in enumerate(offdiag(n))}
    m = n * (n - 1)

    def unit(*pairs_coeffs):
        v = [0] * m
        for ij, c in pairs_coeffs:
            v[idx[ij]] += c
        return tuple(v)

    eqs = [unit(((i, j), 1), ((j, i), -1)) for i, j in combinations(range(n), 2)]
    ineqs = [unit(((i, j), 1)) for i, j in combinations(range(n), 2)]
    for i, j, l in permutations(range(n), 3):
        ineqs.append(unit(((i, l), 1), ((l, j), 1), ((i, j), -1)))
    return ph.cone_from_inequalities(ineqs, eqs, ambient=m)


@dataclass
class GossipFan:
    n: int
    cones: list
    census: SpanCensus | None
    report: ph.FanReport
    is_pure: bool
    codim1_connected: bool
    metric_cone_index: int | None

    @property
    def f_vector(self) -> tuple:
        return self.report.f_vector

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "ambient_coordinates": [[i + 1, j + 1] for i, j in offdiag(self.n)],
            "n_maximal_cones": len(self.cones),
            "f_vector": list(self.f_vector),
            "is_fan": self.report.is_fan,
            "is_pure": self.is_pure,
            "codim1_connected": self.codim1_connected,
            "metric_cone_index": self.metric_cone_index,
            "cones": [c.to_json() for c in self.cones],
        }


def _dual_graph_connected(report: ph.FanReport, cones, d) -> bool:
    ray_id = {r: i for i, r in enumerate(report.rays)}
    facet_owner: dict = {}
    for ci, c in enumerate(cones):
        ids = [ray_id[r] for r in c.rays]
        for f in ph.face_raysets(c).get(d - 1, []):
            facet_owner.setdefault(frozenset(ids[i] for i in f), []).append(ci)
    adj = {i: set() for i in range(len(cones))}
    for owners in facet_owner.values():
        for a, b in combinations(owners, 2):
            adj[a].add(b)
            adj[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for u in adj[v] - seen:
            seen.add(u)
            stack.append(u)
    return len(seen) == len(cones)


def gossip_fan(n: int, census: SpanCensus | None = None, progress=None) -> GossipFan:
    """Maximal cones of G_n (one per full-dimensional span) and their fan data."""
    if n < 2:
        raise ValueError("n must be at least 2")
    d = comb(n, 2)
    if census is None:
        census = enumerate_spans(n, d, progress=progress)
    missing = [sp for sp in census.spans if census.maximal[sp] is None]
    if missing:
        raise ValueError(f"{len(missing)} spans have no cone containing all others")
    cones = [census.maximal[sp] for sp in census.spans]
    report = ph.fan_check(cones)
    pure = all(c.dim == d for c in cones)
    connected = _dual_graph_connected(report, cones, d)
    dn = metric_cone(n)
    mi = next((t for t, c in enumerate(cones) if c == dn), None)
    return GossipFan(n, cones, census, report, pure, connected, mi)


# -- closure sampling ------------------------------------------------------------

class FanIndex:
    """Vectorised exact membership test for integer points."""

    def __init__(self, cones):
        self.cones = list(cones)
        eq_rows, eq_owner, f_rows, f_owner = [], [], [], []
        for ci, c in enumerate(self.cones):
            for e in c.equations:
                eq_rows.append(e)
                eq_owner.append(ci)
            for f in c.facets:
                f_rows.append(f)
                f_owner.append(ci)
        m = self.cones[0].ambient
        self.E = np.array(eq_rows, dtype=np.int64).reshape(-1, m)
        self.F = np.array(f_rows, dtype=np.int64).reshape(-1, m)
        self.eq_owner = np.array(eq_owner, dtype=np.int64)
        self.f_owner = np.array(f_owner, dtype=np.int64)

    def containing(self, v) -> list:
        x = np.array([int(t) for t in v], dtype=np.int64)
        if np.abs(x).max(initial=0) > 2 ** 40:
            raise OverflowError("point too large for the int64 membership test")
        bad = np.zeros(len(self.cones), dtype=bool)
        if self.E.size:
            bad[self.eq_owner[self.E @ x != 0]] = True
        if self.F.size:
            bad[self.f_owner[self.F @ x < 0]] = True
        return [int(i) for i in np.flatnonzero(~bad)]


def _integral(v) -> tuple:
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    return tuple(int(x * den) for x in fr)


def random_point(cone: PolyCone, rng: random.Random) -> tuple:
    """Random rational point; some generators get weight 0 so faces are hit too."""
    while True:
        coef = [Fraction(rng.randint(0, 12), rng.choice((1, 2, 3))) if rng.random() > 0.15
                else Fraction(0) for _ in cone.rays]
        if any(coef):
            break
    return tuple(sum(c * r[t] for c, r in zip(coef, cone.rays)) for t in range(cone.ambient))


@dataclass
class ClosureReport:
    n: int
    trials: int
    seed: int
    failures: list

    def to_json(self) -> dict:
        return {"n": self.n, "trials": self.trials, "seed": self.seed,
                "failures": len(self.failures), "examples": self.failures[:5]}


def closure_sample_check(fan: GossipFan, trials: int, seed: int) -> ClosureReport:
    """Left- and right-multiply random fan points by random calls; products must stay in the fan."""
    rng = random.Random(seed)
    n = fan.n
    index = FanIndex(fan.cones)
    ps = call_pairs(n)
    failures = []
    for t in range(trials):
        c = fan.cones[rng.randrange(len(fan.cones))]
        a = vector_to_matrix(random_point(c, rng), n)
        k, l = ps[rng.randrange(len(ps))]
        w = Fraction(rng.randint(0, 40), rng.choice((1, 2, 4)))
        cm = phone_call_matrix(n, k, l, w)
        for side, prod in (("left", cm @ a), ("right", a @ cm)):
            v = _integral(matrix_to_vector(prod))
            if not index.containing(v):
                failures.append({"trial": t, "side": side, "call": [k + 1, l + 1, str(w)],
                                 "matrix": a.to_json()["entries"]})
    return ClosureReport(n, trials, seed, failures)


def fan_contains(fan: GossipFan, m: TropMatrix) -> bool:
    """Exact membership of a finite matrix in the support of the fan."""
    if not m.has_zero_diagonal:
        return False
    try:
        v = _integral(matrix_to_vector(m))
    except ValueError:
        raise ValueError("membership is only decided for finite matrices")
    return bool(FanIndex(fan.cones).containing(v))

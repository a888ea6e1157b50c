"""Exact min-plus matrix arithmetic over Q ∪ {∞}.

Scalars are :class:`fractions.Fraction` (ints are accepted and promoted) or
the singleton :data:`INF`.  Matrices are immutable; every operation returns a
new value.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence, Union


class _Infinity:
    """The tropical zero: absorbing for ``+``, neutral for ``min``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("lossygossip.INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

Scalar = Union[Fraction, _Infinity]


def scalar(x) -> Scalar:
    """Coerce ``x`` to a tropical scalar.  Floats are rejected."""
    if x is INF:
        return INF
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "∞", "+inf", "infinity"):
            return INF
        return Fraction(s)
    raise TypeError(f"not an exact tropical scalar: {x!r}")


def is_finite(x: Scalar) -> bool:
    return x is not INF


def format_scalar(x: Scalar) -> str:
    return "inf" if x is INF else str(x)


@dataclass(frozen=True)
class TropMatrix:
    """Square matrix over Q ∪ {∞}.

    Negative entries and nonzero diagonals are allowed (the ambient space of
    tropicalised matrix groups); ``has_zero_diagonal`` tells the two apart.
    """

    entries: tuple

    def __init__(self, rows):
        rows = tuple(tuple(scalar(x) for x in row) for row in rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        object.__setattr__(self, "entries", rows)

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __iter__(self):
        return iter(self.entries)

    def __matmul__(self, other: "TropMatrix") -> "TropMatrix":
        return trop_mat_mul(self, other)

    def __repr__(self):
        body = "; ".join(", ".join(format_scalar(x) for x in row) for row in self.entries)
        return f"TropMatrix([{body}])"

    @property
    def has_zero_diagonal(self) -> bool:
        return all(self.entries[i][i] == 0 for i in range(self.n))

    @property
    def is_nonnegative(self) -> bool:
        return all(x is INF or x >= 0 for row in self.entries for x in row)

    def transpose(self) -> "TropMatrix":
        return TropMatrix(zip(*self.entries))

    def oplus(self, other: "TropMatrix") -> "TropMatrix":
        """Entrywise tropical sum (minimum)."""
        _check_dims(self, other)
        return TropMatrix(
            [min(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)
        )

    def permute(self, perm: Sequence[int]) -> "TropMatrix":
        """Relabel indices: entry (i, j) moves to (perm[i], perm[j])."""
        n = self.n
        out = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                out[perm[i]][perm[j]] = self.entries[i][j]
        return TropMatrix(out)

    def permute_rows(self, perm: Sequence[int]) -> "TropMatrix":
        """Row i moves to row perm[i]."""
        out = [None] * self.n
        for i, row in enumerate(self.entries):
            out[perm[i]] = row
        return TropMatrix(out)

    def finiteness_pattern(self) -> "TropMatrix":
        """Quotient onto the {0, ∞} monoid: finite entries become 0."""
        return TropMatrix([[INF if x is INF else 0 for x in row] for row in self.entries])

    # -- text and JSON ----------------------------------------------------

    def to_text(self) -> str:
        return "\n".join(",".join(format_scalar(x) for x in row) for row in self.entries) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TropMatrix":
        rows = [line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
        return cls([[scalar(tok) for tok in re.split(r"[,\s]+", line.strip())] for line in rows])

    def to_json(self) -> dict:
        return {"n": self.n, "entries": [[format_scalar(x) for x in row] for row in self.entries]}

    @classmethod
    def from_json(cls, obj) -> "TropMatrix":
        if isinstance(obj, str):
            obj = json.loads(obj)
        m = cls(obj["entries"])
        if m.n != obj["n"]:
            raise ValueError("declared n does not match entries")
        return m


def _check_dims(a: TropMatrix, b: TropMatrix):
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")


def trop_mat_mul(a: TropMatrix, b: TropMatrix) -> TropMatrix:
    """Min-plus product: ``(a ⊙ b)[i, j] = min_m a[i, m] + b[m, j]``."""
    _check_dims(a, b)
    bt = list(zip(*b.entries))
    return TropMatrix(
        [[min(x + y for x, y in zip(row, col)) for col in bt] for row in a.entries]
    )


def identity(n: int) -> TropMatrix:
    return TropMatrix([[0 if i == j else INF for j in range(n)] for i in range(n)])


def zeros(n: int) -> TropMatrix:
    """The all-zero matrix J0 (everybody knows everything)."""
    return TropMatrix([[0] * n for _ in range(n)])


def phone_call_matrix(n: int, k: int, l: int, a=0) -> TropMatrix:
    """The lossy call ``C_kl(a)`` with 0-based indices ``k != l``."""
    a = scalar(a)
    if k == l:
        raise ValueError("a call needs two distinct parties")
    if not (0 <= k < n and 0 <= l < n):
        raise ValueError("call index out of range")
    if a is not INF and a < 0:
        raise ValueError("call loss must be nonnegative")
    rows = [[0 if i == j else INF for j in range(n)] for i in range(n)]
    rows[k][l] = rows[l][k] = a
    return TropMatrix(rows)


@dataclass(frozen=True)
class Call:
    k: int
    l: int
    weight: Scalar = Fraction(0)

    def __post_init__(self):
        if self.k == self.l:
            raise ValueError("a call needs two distinct parties")
        k, l = sorted((self.k, self.l))
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "l", l)
        w = scalar(self.weight)
        if w is not INF and w < 0:
            raise ValueError("call loss must be nonnegative")
        object.__setattr__(self, "weight", w)

    @property
    def pair(self) -> tuple:
        return (self.k, self.l)


@dataclass(frozen=True)
class CallSequence:
    n: int
    calls: tuple = ()

    def __post_init__(self):
        calls = tuple(c if isinstance(c, Call) else Call(*c) for c in self.calls)
        for c in calls:
            if c.l >= self.n:
                raise ValueError(f"call {c.pair} out of range for n={self.n}")
        object.__setattr__(self, "calls", calls)

    def __len__(self):
        return len(self.calls)

    def __iter__(self):
        return iter(self.calls)

    def product(self) -> TropMatrix:
        return product_of_calls(self.n, self.calls)

    def without(self, t: int) -> "CallSequence":
        return CallSequence(self.n, self.calls[:t] + self.calls[t + 1:])

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "calls": [[c.k + 1, c.l + 1, format_scalar(c.weight)] for c in self.calls],
        }


def apply_call(a: TropMatrix, call: Call) -> TropMatrix:
    """Right-multiply by ``C_kl(w)`` in O(n) instead of a full product."""
    k, l, w = call.k, call.l, call.weight
    rows = []
    for row in a.entries:
        xk, xl = row[k], row[l]
        nk, nl = min(xk, xl + w), min(xl, xk + w)
        if nk == xk and nl == xl:
            rows.append(row)
            continue
        row = list(row)
        row[k], row[l] = nk, nl
        rows.append(row)
    return TropMatrix(rows)


def product_of_calls(n: int, calls: Iterable) -> TropMatrix:
    m = identity(n)
    for c in calls:
        m = apply_call(m, c if isinstance(c, Call) else Call(*c))
    return m


def kleene_star(a: TropMatrix) -> TropMatrix:
    """Shortest-path closure ``I ⊕ A ⊕ A² ⊕ …`` by Floyd–Warshall."""
    if not a.is_nonnegative:
        raise ValueError("Kleene star needs nonnegative entries")
    n = a.n
    d = [list(row) for row in a.entries]
    for i in range(n):
        d[i][i] = min(d[i][i], Fraction(0))
    for m in range(n):
        dm = d[m]
        for i in range(n):
            dim = d[i][m]
            if dim is INF:
                continue
            di = d[i]
            for j in range(n):
                alt = dim + dm[j]
                if alt < di[j]:
                    di[j] = alt
    return TropMatrix(d)


def is_metric(a: TropMatrix) -> bool:
    """Membership in the closed metric cone (∞ entries allowed)."""
    n = a.n
    e = a.entries
    for i in range(n):
        if e[i][i] != 0:
            return False
        for j in range(n):
            if e[i][j] != e[j][i]:
                return False
            if e[i][j] is not INF and e[i][j] < 0:
                return False
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if e[i][j] + e[j][k] < e[i][k]:
                    return False
    return True


def symmetric_core(a: TropMatrix) -> set:
    """Unordered pairs {i, j} (0-based, i < j) with a[i, j] == a[j, i]."""
    n = a.n
    return {(i, j) for i, j in combinations(range(n), 2) if a[i, j] == a[j, i]}


def is_connected(n: int, edges) -> bool:
    adj = {v: set() for v in range(n)}
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for u in adj[v] - seen:
            seen.add(u)
            stack.append(u)
    return len(seen) == n


def metric_as_calls(a: TropMatrix) -> CallSequence:
    """Write a metric matrix as the product of its C(n,2) edge calls."""
    if not is_metric(a):
        raise ValueError("input is not a metric matrix")
    n = a.n
    seq = CallSequence(n, [Call(k, l, a[k, l]) for k, l in combinations(range(n), 2)])
    if seq.product() != a:
        raise AssertionError("edge-call product did not reproduce the metric")
    return seq


def core_witness(n: int, edges) -> CallSequence:
    """A product whose symmetric core is exactly the given connected graph.

    Edge t (1-based) first gets weight 1 + 2^-t; subsequent passes use
    2^((p-1)m + t).  Passes continue until one leaves the product unchanged;
    that idle pass is not included.
    """
    edges = [tuple(sorted(e)) for e in edges]
    if len(set(edges)) != len(edges):
        raise ValueError("repeated edge")
    if not edges or not is_connected(n, edges):
        raise ValueError("graph must be connected")
    m = len(edges)
    calls = [Call(k, l, 1 + Fraction(1, 2 ** t)) for t, (k, l) in enumerate(edges, 1)]
    prod = product_of_calls(n, calls)
    p = 1
    while True:
        batch = [Call(k, l, Fraction(2) ** ((p - 1) * m + t)) for t, (k, l) in enumerate(edges, 1)]
        nxt = _extend(prod, batch)
        if nxt == prod:
            return CallSequence(n, calls)
        calls += batch
        prod = nxt
        p += 1


def _extend(a: TropMatrix, calls) -> TropMatrix:
    for c in calls:
        a = apply_call(a, c)
    return a


def is_irredundant(seq: CallSequence) -> bool:
    """True iff deleting any single factor changes the product."""
    n = seq.n
    calls = seq.calls
    prefix = [identity(n)]
    for c in calls:
        prefix.append(apply_call(prefix[-1], c))
    full = prefix[-1]
    for t in range(len(calls)):
        if _extend(prefix[t], calls[t + 1:]) == full:
            return False
    return True


def build_W(n: int) -> CallSequence:
    """Irredundant product with C(n+1, 3) factors.

    ``W_n = shift(W_{n-1}) ⊙ P_{n-1} ⊙ … ⊙ P_1`` where ``shift`` moves
    W_{n-1} onto indices 2..n and ``P_h = C_12 C_23 … C_{h,h+1}``.  With E the
    bit length of the total weight of W_{n-1}, the t-th factor of P_h has
    weight 2^(E + h(h-1)/2 + t - 1), so the whole of P_h is cheaper than any
    single factor of P_{h+1} and every P-factor outweighs all of W_{n-1}.
    """
    if n < 1:
        raise ValueError("n must be positive")
    calls: list = []
    for m in range(2, n + 1):
        inner = [Call(c.k + 1, c.l + 1, c.weight) for c in calls]
        base = int(sum((c.weight for c in calls), Fraction(0))).bit_length()
        tail = []
        for h in range(m - 1, 0, -1):
            off = base + h * (h - 1) // 2
            tail += [Call(t - 1, t, 2 ** (off + t - 1)) for t in range(1, h + 1)]
        calls = inner + tail
    return CallSequence(n, calls)


def parse_matrix_file(path) -> TropMatrix:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return TropMatrix.from_json(text)
    return TropMatrix.from_text(text)

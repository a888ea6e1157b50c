"""The ordinary gossip monoid G_n({0, ∞}) as bit-packed knowledge states.

A state is an int (or a ``uint64`` array element) whose bit ``i*n + j`` is set
iff gossiper ``j`` knows gossip ``i``, i.e. matrix entry (i, j) is 0.  A call
between ``k`` and ``l`` ORs columns ``k`` and ``l`` together, which is
tropical right-multiplication by ``C_kl(0)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .trop import INF, TropMatrix

log = logging.getLogger(__name__)

MAX_N = 8  # n*n bits must fit one uint64


class MemoryBudgetExceeded(RuntimeError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


def pairs(n: int) -> list:
    return list(combinations(range(n), 2))


def _col_mask(n: int) -> int:
    return sum(1 << (i * n) for i in range(n))


def identity_state(n: int) -> int:
    return sum(1 << (i * n + i) for i in range(n))


def full_state(n: int) -> int:
    return (1 << (n * n)) - 1


def apply_call(s: int, n: int, k: int, l: int) -> int:
    if k == l:
        raise ValueError("a call needs two distinct parties")
    c0 = _col_mask(n)
    u = ((s >> k) | (s >> l)) & c0
    return (s & ~((c0 << k) | (c0 << l))) | (u << k) | (u << l)


def state_from_matrix(m: TropMatrix) -> int:
    n = m.n
    s = 0
    for i in range(n):
        for j in range(n):
            if m[i, j] is not INF:
                if m[i, j] != 0:
                    raise ValueError("entries must be 0 or inf")
                s |= 1 << (i * n + j)
    return s


def state_to_matrix(s: int, n: int) -> TropMatrix:
    return TropMatrix(
        [[0 if s >> (i * n + j) & 1 else INF for j in range(n)] for i in range(n)]
    )


def knows(s: int, n: int, j: int) -> int:
    """Bitmask over gossip items known by ``j``."""
    return sum(1 << i for i in range(n) if s >> (i * n + j) & 1)


def dump_state(s: int, n: int) -> str:
    """State dump: ``n`` then the n² bits row-major."""
    return f"{n} " + "".join("1" if s >> b & 1 else "0" for b in range(n * n))


def load_state(text: str) -> tuple:
    n_str, bits = text.split()
    n = int(n_str)
    if len(bits) != n * n:
        raise ValueError("wrong number of bits")
    return sum(1 << b for b, ch in enumerate(bits) if ch == "1"), n


# -- vectorised kernels --------------------------------------------------

def apply_call_array(states: np.ndarray, n: int, k: int, l: int) -> np.ndarray:
    c0 = np.uint64(_col_mask(n))
    kk, ll = np.uint64(k), np.uint64(l)
    clear = np.uint64(~((_col_mask(n) << k) | (_col_mask(n) << l)) & ((1 << 64) - 1))
    u = ((states >> kk) | (states >> ll)) & c0
    return (states & clear) | (u << kk) | (u << ll)


@dataclass
class EnumerationReport:
    n: int
    total_count: int = 0
    length_histogram: dict = field(default_factory=dict)
    max_length: int = 0
    complete: bool = True

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "count": self.total_count,
            "max_length": self.max_length,
            "histogram": {str(k): v for k, v in sorted(self.length_histogram.items())},
            "complete": self.complete,
        }

    def csv_row(self) -> str:
        hist = ",".join(str(self.length_histogram[k]) for k in sorted(self.length_histogram))
        return f"{self.n},{self.total_count},{self.max_length},{hist}"


def memory_estimate(n: int) -> int:
    """Rough peak bytes for :func:`enumerate_monoid` (8 bytes per state, ~4 copies)."""
    known = {1: 1, 2: 2, 3: 11, 4: 189, 5: 9152, 6: 1_092_473, 7: 293_656_554,
             8: 166_244_338_221, 9: 188_620_758_836_916}
    return known.get(n, 2 ** (n * n)) * 8 * 4


def bfs_levels(n: int, memory_budget: int | None = None):
    """Yield (length, sorted uint64 array of states first reached at that length)."""
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be in 1..{MAX_N}")
    calls = pairs(n)
    frontier = np.array([identity_state(n)], dtype=np.uint64)
    seen = frontier.copy()
    depth = 0
    while frontier.size:
        yield depth, frontier
        if not calls:
            break
        cand = np.unique(np.concatenate([apply_call_array(frontier, n, k, l) for k, l in calls]))
        idx = np.searchsorted(seen, cand)
        idx[idx == seen.size] = 0
        fresh = cand[seen[idx] != cand]
        depth += 1
        if memory_budget is not None and (seen.size + fresh.size) * 8 * 4 > memory_budget:
            raise MemoryBudgetExceeded(
                f"BFS at depth {depth} would exceed {memory_budget} bytes",
                partial=(depth, int(seen.size)),
            )
        seen = np.union1d(seen, fresh)
        frontier = fresh


def enumerate_monoid(n: int, memory_budget: int | None = None) -> EnumerationReport:
    """Breadth-first closure of the identity under the C(n,2) calls.

    Results are independent of any parallelism: each level is a sorted,
    deduplicated array.
    """
    rep = EnumerationReport(n)
    try:
        for depth, level in bfs_levels(n, memory_budget):
            rep.length_histogram[depth] = int(level.size)
            rep.total_count += int(level.size)
            rep.max_length = depth
            log.debug("n=%d depth=%d new=%d total=%d", n, depth, level.size, rep.total_count)
    except MemoryBudgetExceeded as exc:
        rep.complete = False
        exc.partial = rep
        raise
    return rep


def element_length(s: int, n: int):
    """Minimal number of calls producing ``s``, or None if ``s`` is not in the monoid."""
    target = np.uint64(s)
    for depth, level in bfs_levels(n):
        i = np.searchsorted(level, target)
        if i < level.size and level[i] == target:
            return depth
    return None


# -- pessimal chains -----------------------------------------------------

def construct_pessimal(n: int) -> list:
    """Gossiper 1 calls i, i-1, ..., 2 for i = 2..n (0-based pairs)."""
    if n < 2:
        raise ValueError("need at least two gossipers")
    return [(0, j) for i in range(1, n) for j in range(i, 0, -1)]


def verify_pessimal(calls, n: int | None = None) -> bool:
    """True iff every call teaches at least one participant something new."""
    calls = [tuple(c) for c in calls]
    if n is None:
        n = 1 + max((max(c) for c in calls), default=0)
    s = identity_state(n)
    for k, l in calls:
        t = apply_call(s, n, k, l)
        if t == s:
            return False
        s = t
    return True


def longest_pessimal_chain(n: int) -> int:
    """Exact longest informative chain: longest path in the call DAG on states.

    Every informative call strictly adds knowledge bits, so the graph of
    states under informative calls is acyclic and the longest chain equals
    its longest path from the identity.
    """
    levels = [lvl for _, lvl in bfs_levels(n)]
    states = np.sort(np.concatenate(levels))
    # process in decreasing popcount: successors have strictly more bits
    pop = np.array([bin(int(x)).count("1") for x in states])
    order = np.argsort(-pop, kind="stable")
    best = np.zeros(states.size, dtype=np.int64)
    calls = pairs(n)
    for chunk_pop in np.unique(pop)[::-1]:
        idx = order[pop[order] == chunk_pop]
        sub = states[idx]
        val = np.zeros(idx.size, dtype=np.int64)
        for k, l in calls:
            nxt = apply_call_array(sub, n, k, l)
            pos = np.searchsorted(states, nxt)
            moved = nxt != sub
            cand = np.where(moved, best[pos] + 1, 0)
            val = np.maximum(val, cand)
        best[idx] = val
    start = np.searchsorted(states, np.uint64(identity_state(n)))
    return int(best[start])


def random_pessimal_search(n: int, attempts: int, seed: int, batch: int = 200_000) -> dict:
    """Random maximal informative chains; returns the length distribution.

    Each walk picks uniformly among the informative calls until none is left.
    """
    rng = np.random.default_rng(seed)
    calls = pairs(n)
    hist: dict = {}
    done = 0
    while done < attempts:
        m = min(batch, attempts - done)
        s = np.full(m, identity_state(n), dtype=np.uint64)
        length = np.zeros(m, dtype=np.int64)
        while True:
            nxt = np.stack([apply_call_array(s, n, k, l) for k, l in calls])
            informative = nxt != s[None, :]
            cnt = informative.sum(axis=0)
            alive = cnt > 0
            if not alive.any():
                break
            # choose the r-th informative call per walk
            r = (rng.random(m) * np.maximum(cnt, 1)).astype(np.int64)
            csum = np.cumsum(informative, axis=0)
            pick = np.argmax(csum > r[None, :], axis=0)
            chosen = nxt[pick, np.arange(m)]
            s = np.where(alive, chosen, s)
            length += alive
        for v, c in zip(*np.unique(length, return_counts=True)):
            hist[int(v)] = hist.get(int(v), 0) + int(c)
        done += m
    return {"n": n, "attempts": attempts, "seed": seed, "max_length": max(hist),
            "histogram": dict(sorted(hist.items()))}


# -- irredundant products -----------------------------------------------

def is_irredundant_calls(calls, n: int) -> bool:
    calls = list(calls)
    full = identity_state(n)
    for k, l in calls:
        full = apply_call(full, n, k, l)
    for t in range(len(calls)):
        s = identity_state(n)
        for u, (k, l) in enumerate(calls):
            if u != t:
                s = apply_call(s, n, k, l)
        if s == full:
            return False
    return True


def _second_calls(calls) -> set:
    """Second letters kept after fixing the first call to {1, 2}.

    A relabelling fixing {1, 2} turns any initial letter of the remaining
    trace into {1, 3} (if it meets {1, 2}) or {3, 4} (if not), and each is
    the least call of its kind, so it comes second in lex normal form.
    """
    return {ci for ci, c in enumerate(calls) if c in ((0, 2), (2, 3))}


def _irredundant_search_py(n: int):
    calls = pairs(n)
    ncalls = len(calls)
    c0 = _col_mask(n)
    masks = [((c0 << k) | (c0 << l), k, l) for k, l in calls]
    disjoint = [[not (set(a) & set(b)) for b in calls] for a in calls]
    second = _second_calls(calls)

    def step(s, ci):
        m, k, l = masks[ci]
        u = ((s >> k) | (s >> l)) & c0
        return (s & ~m) | (u << k) | (u << l)

    best = [0, []]
    word = []

    def dfs(full, drops, last):
        depth = len(word)
        if depth > best[0]:
            best[0] = depth
            best[1] = list(word)
        for ci in range(ncalls):
            if ci == last or (ci < last and disjoint[ci][last]):
                continue
            if depth == 1 and ci not in second:
                continue
            nfull = step(full, ci)
            if nfull == full:
                continue
            ndrops = [full]
            for d in drops:
                nd = step(d, ci)
                if nd == nfull:
                    break
                ndrops.append(nd)
            else:
                word.append(ci)
                dfs(nfull, ndrops, ci)
                word.pop()

    start = identity_state(n)
    word.append(0)
    dfs(step(start, 0), [start], 0)
    return best[0], best[1]


def _irredundant_kernel(ks, ls, disjoint, second, c0, start, maxd):
    ncalls = ks.shape[0]
    full = np.zeros(maxd + 2, dtype=np.uint64)
    drops = np.zeros((maxd + 2, maxd + 2), dtype=np.uint64)
    ndrops = np.zeros(maxd + 2, dtype=np.int64)
    word = np.zeros(maxd + 2, dtype=np.int64)
    nxt = np.zeros(maxd + 2, dtype=np.int64)
    bestword = np.zeros(maxd + 2, dtype=np.int64)

    k0, l0 = ks[0], ls[0]
    u = ((start >> k0) | (start >> l0)) & c0
    full[1] = (start & ~((c0 << k0) | (c0 << l0))) | (u << k0) | (u << l0)
    drops[1, 0] = start
    ndrops[1] = 1
    best = 1
    d = 1
    while d >= 1:
        ci = nxt[d]
        if ci >= ncalls or d > maxd:
            d -= 1
            continue
        nxt[d] = ci + 1
        last = word[d - 1]
        if ci == last or (ci < last and disjoint[ci, last]):
            continue
        if d == 1 and not second[ci]:
            continue
        k, l = ks[ci], ls[ci]
        m = ~((c0 << k) | (c0 << l))
        s = full[d]
        u = ((s >> k) | (s >> l)) & c0
        nf = (s & m) | (u << k) | (u << l)
        if nf == s:
            continue
        ok = True
        drops[d + 1, 0] = s
        for t in range(ndrops[d]):
            x = drops[d, t]
            u = ((x >> k) | (x >> l)) & c0
            nd = (x & m) | (u << k) | (u << l)
            if nd == nf:
                ok = False
                break
            drops[d + 1, t + 1] = nd
        if not ok:
            continue
        word[d] = ci
        full[d + 1] = nf
        ndrops[d + 1] = ndrops[d] + 1
        nxt[d + 1] = 0
        d += 1
        if d > best:
            best = d
            for t in range(d):
                bestword[t] = word[t]
    return best, bestword[:best].copy()


_jit_kernel = None


def _irredundant_search_jit(n: int):
    global _jit_kernel
    if _jit_kernel is None:
        import numba

        _jit_kernel = numba.njit(cache=True)(_irredundant_kernel)
    calls = pairs(n)
    ks = np.array([k for k, _ in calls], dtype=np.uint64)
    ls = np.array([l for _, l in calls], dtype=np.uint64)
    disjoint = np.array([[not (set(a) & set(b)) for b in calls] for a in calls])
    second = np.zeros(len(calls), dtype=np.bool_)
    for ci in _second_calls(calls):
        second[ci] = True
    maxd = n * n * (n - 1) // 2  # a priori bound on irredundant length
    best, word = _jit_kernel(ks, ls, disjoint, second, np.uint64(_col_mask(n)),
                             np.uint64(identity_state(n)), maxd)
    return int(best), [int(c) for c in word]


def max_irredundant_length(n: int, return_witness: bool = False, backend: str = "auto"):
    """Longest product of calls C_kl(0) in which every factor is essential.

    Depth-first search over call words.  Pruning:

    * only irredundant prefixes are extended (a factor that is redundant in a
      prefix stays redundant after right-multiplication);
    * calls on disjoint pairs commute, so adjacent commuting calls must
      appear in increasing order (every commutation class keeps its
      lexicographically least word);
    * by relabelling, the first call is {1, 2} and the second {1, 3} or {3, 4}.

    ``backend`` is "python", "numba" or "auto" (numba when importable and n >= 6).
    """
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be in 1..{MAX_N}")
    if n < 2:
        return (0, []) if return_witness else 0
    if backend == "auto":
        backend = "python"
        if n >= 6:
            try:
                import numba  # noqa: F401

                backend = "numba"
            except ImportError:
                pass
    if backend == "numba":
        best, word = _irredundant_search_jit(n)
    elif backend == "python":
        best, word = _irredundant_search_py(n)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    if return_witness:
        calls = pairs(n)
        return best, [calls[i] for i in word]
    return best

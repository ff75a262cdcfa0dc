"""Exact census of prime cycles by period, homology class and length.

Fixed points of the shift of period ``n`` are closed walks of ``n`` symbols
(with a marked start).  They are counted by dynamic programming over
``(vertex, class, usage)``, where ``usage`` counts symbols per distinct
edge-length value, so the length of a walk is known exactly.  Moebius-type
inversion over divisors then isolates primitive words, and dividing by
``n`` gives prime orbits.
"""

from __future__ import annotations

import math
import os
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetError, ConsistencyError
from .graph import HomologyLabeling, SymbolTable
from .lengths import ExactLength, combine

STATE_BYTES = 240  # rough per-entry cost of a dict item with two small tuples
DEFAULT_BUDGET_MB = 512


def _to_exact(T) -> ExactLength:
    if isinstance(T, ExactLength):
        return T
    if isinstance(T, float):
        return ExactLength(Fraction(T))
    return ExactLength.parse(T)


@dataclass
class CensusTable:
    """Counts indexed by period ``n``; keys are ``(class, usage)`` tuples.

    ``fix[n]`` holds fixed points of the ``n``-th shift power and, once
    :func:`primitive_orbit_counts` has run, ``orbits[n]`` holds prime orbit
    counts.  Index 0 is unused.
    """

    n_max: int
    b: int
    length_values: tuple  # distinct ExactLength values, increasing
    fix: list
    orbits: list | None = None
    primitive: list | None = None
    _spectrum: dict = field(default_factory=dict, repr=False)

    @property
    def min_length(self) -> ExactLength:
        return self.length_values[0]

    def total(self, n: int) -> int:
        return sum(self.fix[n].values())

    def usage_length(self, usage: Sequence[int]) -> ExactLength:
        return combine(usage, self.length_values)

    def classes(self) -> set:
        if self.orbits is None:
            raise ValueError("run primitive_orbit_counts first")
        return {alpha for layer in self.orbits[1:] for (alpha, _) in layer}

    def spectrum(self, alpha: tuple) -> list:
        """Sorted ``(float length, exact length, orbit count)`` for class ``alpha``."""
        if self.orbits is None:
            raise ValueError("run primitive_orbit_counts first")
        alpha = tuple(int(x) for x in alpha)
        if alpha not in self._spectrum:
            acc: dict = defaultdict(int)
            for layer in self.orbits[1:]:
                for (cls, usage), count in layer.items():
                    if cls == alpha and count:
                        acc[usage] += count
            rows = []
            for usage, count in acc.items():
                L = self.usage_length(usage)
                rows.append((float(L), L, count))
            rows.sort(key=lambda r: r[0])
            self._spectrum[alpha] = rows
        return self._spectrum[alpha]


def length_classes(st: SymbolTable) -> tuple[tuple, np.ndarray]:
    """Distinct length values (increasing) and the usage slot of each symbol."""
    values = sorted(set(st.lengths))
    slot = {v: i for i, v in enumerate(values)}
    return tuple(values), np.array([slot[l] for l in st.lengths], dtype=int)


def _usage_count(n: int, fvals: Sequence[float], cap: float | None) -> int:
    """Usage vectors with ``n`` symbols in total (and total length within ``cap``)."""
    if cap is None:
        return math.comb(n + len(fvals) - 1, len(fvals) - 1)

    def rec(i, left, budget):
        if i == len(fvals) - 1:
            return int(left * fvals[i] <= budget)
        return sum(rec(i + 1, left - k, budget - k * fvals[i])
                   for k in range(left + 1) if k * fvals[i] <= budget)

    return rec(0, n, cap)


def estimate_states(st: SymbolTable, b: int, n_max: int, n_values: int, cap=None) -> int:
    """Upper bound on live DP entries in the largest layer, summed over shards.

    Entries per (start, end) vertex pair are bounded both by the number of
    (class, usage) keys and by the number of walks between the two vertices.
    ``cap = (max length, length values)`` restricts the usage keys.
    """
    V = st.n_vertices
    adj = np.zeros((V, V), dtype=object)
    for s in range(st.size):
        adj[st.initial[s], st.terminal[s]] += 1
    walks = np.identity(V, dtype=object)
    worst = 0
    for n in range(1, n_max + 1):
        walks = walks.dot(adj)
        if cap is None:
            usages = math.comb(n + n_values - 1, n_values - 1)
        else:
            usages = _usage_count(n, cap[1], cap[0])
        keys = (2 * n + 1) ** b * usages
        worst = max(worst, int(sum(min(keys, int(w)) for w in walks.flat)))
    return worst


def _shard(args):
    """Closed walks from one start vertex, as ``[{(class, usage): count}]`` per period."""
    start, moves, n_max, b, n_values, cap = args
    out = [dict() for _ in range(n_max + 1)]
    zero_c = (0,) * b
    zero_u = (0,) * n_values
    layer = {start: {(zero_c, zero_u): 1}}
    for n in range(1, n_max + 1):
        nxt: dict = {}
        for v, states in layer.items():
            for w, df, slot, step_len in moves[v]:
                bucket = nxt.setdefault(w, {})
                for (cls, usage), count in states.items():
                    c2 = tuple(x + y for x, y in zip(cls, df)) if b else cls
                    u2 = usage[:slot] + (usage[slot] + 1,) + usage[slot + 1 :]
                    key = (c2, u2)
                    bucket[key] = bucket.get(key, 0) + count
        if cap is not None:
            for w in nxt:
                nxt[w] = {k: c for k, c in nxt[w].items() if _usage_float(k[1], cap[1]) <= cap[0]}
        layer = {w: s for w, s in nxt.items() if s}
        out[n] = dict(layer.get(start, {}))
    return out


def _usage_float(usage, lengths) -> float:
    return sum(u * l for u, l in zip(usage, lengths))


def fixed_point_table(
    st: SymbolTable,
    hl: HomologyLabeling,
    n_max: int,
    budget_mb: float = DEFAULT_BUDGET_MB,
    length_cap=None,
    threads: int | None = None,
) -> CensusTable:
    """Exact fixed-point counts of periods ``1..n_max``.

    ``length_cap`` drops walks longer than the cap (with a small float
    margin so that no walk of length exactly at the cap is lost); the table
    is then only complete for lengths up to the cap.
    """
    if n_max < 1:
        raise ValueError("n_max must be positive")
    values, slots = length_classes(st)
    b = hl.b
    fvals = [float(v) for v in values]
    cap = None if length_cap is None else (float(_to_exact(length_cap)) + 1e-9, fvals)
    need = estimate_states(st, b, n_max, len(values), cap) * STATE_BYTES
    if need > budget_mb * 2**20:
        raise BudgetError(
            f"census needs about {need / 2**20:.0f} MB (budget {budget_mb} MB)", required=need
        )
    moves = defaultdict(list)
    for s in range(st.size):
        moves[int(st.initial[s])].append(
            (int(st.terminal[s]), tuple(int(x) for x in hl.f[s]), int(slots[s]), fvals[slots[s]])
        )
    moves = dict(moves)
    jobs = [(v, moves, n_max, b, len(values), cap) for v in range(st.n_vertices)]
    threads = threads if threads is not None else int(os.environ.get("HOMOCYCLE_THREADS", "1"))
    threads = max(1, min(threads, len(jobs)))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            shards = list(pool.map(_shard, jobs))
    else:
        shards = [_shard(j) for j in jobs]
    fix = [dict() for _ in range(n_max + 1)]
    for shard in shards:  # fixed merge order keeps results deterministic
        for n in range(1, n_max + 1):
            layer = fix[n]
            for key, count in shard[n].items():
                layer[key] = layer.get(key, 0) + count
    for n in range(1, n_max + 1):
        fix[n] = dict(sorted(fix[n].items()))
    return CensusTable(n_max, b, values, fix)


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def primitive_orbit_counts(table: CensusTable) -> CensusTable:
    """Fill ``table.primitive`` (primitive words) and ``table.orbits`` (prime orbits)."""
    prim = [dict() for _ in range(table.n_max + 1)]
    orbits = [dict() for _ in range(table.n_max + 1)]
    for n in range(1, table.n_max + 1):
        for (cls, usage), count in table.fix[n].items():
            p = count
            for d in _divisors(n)[:-1]:
                q = n // d
                if all(x % q == 0 for x in cls) and all(x % q == 0 for x in usage):
                    key = (tuple(x // q for x in cls), tuple(x // q for x in usage))
                    p -= prim[d].get(key, 0)
            if p < 0:
                raise ConsistencyError(f"negative primitive count at period {n}, key {(cls, usage)}")
            if p % n:
                raise ConsistencyError(
                    f"primitive count {p} at period {n} is not divisible by {n}"
                )
            prim[n][(cls, usage)] = p
            orbits[n][(cls, usage)] = p // n
    table.primitive = prim
    table.orbits = orbits
    table._spectrum.clear()
    return table


def required_nmax(table_or_min_length, T) -> int:
    lmin = (
        table_or_min_length.min_length
        if isinstance(table_or_min_length, CensusTable)
        else _to_exact(table_or_min_length)
    )
    Tx = _to_exact(T)
    n = math.floor(float(Tx) / float(lmin))
    # exact correction of the float guess
    while (lmin * (n + 1) - Tx).sign() <= 0:
        n += 1
    while n > 0 and (lmin * n - Tx).sign() > 0:
        n -= 1
    return n


def pi_empirical(table: CensusTable, T, alpha) -> int:
    """Number of prime cycles of length at most ``T`` in class ``alpha``."""
    need = required_nmax(table, T)
    if need > table.n_max:
        raise BudgetError(
            f"T={float(_to_exact(T))} needs n_max >= {need}, table has {table.n_max}", required=need
        )
    alpha = tuple(int(x) for x in alpha)
    if len(alpha) != table.b:
        raise ValueError(f"class vector must have dimension {table.b}")
    Tx = _to_exact(T)
    Tf = float(Tx)
    total = 0
    for lf, L, count in table.spectrum(alpha):
        if lf < Tf - 1e-9:
            total += count
        elif lf > Tf + 1e-9:
            break
        elif (L - Tx).sign() <= 0:
            total += count
    return total


def census(st: SymbolTable, hl: HomologyLabeling, T, budget_mb: float = DEFAULT_BUDGET_MB,
           n_max: int | None = None, threads: int | None = None) -> CensusTable:
    """Fixed points plus prime orbits, complete for lengths up to ``T``."""
    values, _ = length_classes(st)
    need = required_nmax(values[0], T)
    n_max = need if n_max is None else n_max
    if n_max < need:
        raise BudgetError(f"T needs n_max >= {need}, got {n_max}", required=need)
    table = fixed_point_table(st, hl, n_max, budget_mb, length_cap=T, threads=threads)
    return primitive_orbit_counts(table)


# oracles


@dataclass(frozen=True)
class Cycle:
    word: tuple
    length: ExactLength
    cls: tuple


def _is_canonical_primitive(word: tuple) -> bool:
    n = len(word)
    for r in range(1, n):
        rot = word[r:] + word[:r]
        if rot <= word:  # equal means a proper power, smaller means not canonical
            return False
    return True


def dfs_oracle(st: SymbolTable, hl: HomologyLabeling, T=None, max_period: int | None = None) -> list[Cycle]:
    """All prime cycles up to length ``T`` (and/or period), by brute-force search.

    Each cycle is reported once, by its lexicographically least rotation.
    """
    if T is None and max_period is None:
        raise ValueError("give T or max_period")
    Tx = None if T is None else _to_exact(T)
    if max_period is None:
        max_period = required_nmax(min(st.lengths), Tx)
    out = []
    succ = [[t for t in range(st.size) if st.terminal[s] == st.initial[t]] for s in range(st.size)]

    def walk(word, L):
        last = word[-1]
        if st.terminal[last] == st.initial[word[0]] and _is_canonical_primitive(tuple(word)):
            out.append(Cycle(tuple(word), L, hl.walk_class(word)))
        if len(word) == max_period:
            return
        for t in succ[last]:
            if t < word[0]:
                continue  # canonical rotations start with their least symbol
            L2 = L + st.lengths[t]
            if Tx is not None and (L2 - Tx).sign() > 0:
                continue
            word.append(t)
            walk(word, L2)
            word.pop()

    for s0 in range(st.size):
        L0 = st.lengths[s0]
        if Tx is not None and (L0 - Tx).sign() > 0:
            continue
        walk([s0], L0)
    out.sort(key=lambda c: (float(c.length), c.word))
    return out


def oracle_pi(cycles: Iterable[Cycle], T, alpha) -> int:
    Tx = _to_exact(T)
    alpha = tuple(alpha)
    return sum(1 for c in cycles if c.cls == alpha and (c.length - Tx).sign() <= 0)


def _multinomial(parts: Sequence[int]) -> int:
    out = math.factorial(sum(parts))
    for p in parts:
        out //= math.factorial(p)
    return out


def rose_fix_oracle(k: int, n: int, alpha: Sequence[int], lengths: Sequence | None = None) -> dict:
    """Fixed points of period ``n`` in class ``alpha`` on the rose with ``k`` loops.

    The rose shift is the full shift, so counts are multinomials in the
    forward/backward uses ``(a_i, b_i)`` of each loop with ``a_i - b_i = alpha_i``.
    Keys are per-loop usages ``a_i + b_i``; with ``lengths`` they are merged
    into the census usage keys (counts per distinct length value).
    """
    alpha = [int(x) for x in alpha]
    if len(alpha) != k:
        raise ValueError("alpha must have k entries")
    out: dict = defaultdict(int)

    def rec(i, left, acc):
        if i == k:
            if left == 0:
                parts = [x for pair in acc for x in pair]
                out[tuple(a + b for a, b in acc)] += _multinomial(parts)
            return
        for b_ in range(max(0, -alpha[i]), (left - alpha[i]) // 2 + 1):
            a_ = alpha[i] + b_
            if a_ < 0 or a_ + b_ > left:
                continue
            rec(i + 1, left - a_ - b_, acc + [(a_, b_)])

    rec(0, n, [])
    if lengths is None:
        return dict(out)
    exact = [ExactLength.parse(l) for l in lengths]
    values = sorted(set(exact))
    slot = {v: i for i, v in enumerate(values)}
    merged: dict = defaultdict(int)
    for usage, count in out.items():
        u = [0] * len(values)
        for i, x in enumerate(usage):
            u[slot[exact[i]]] += x
        merged[tuple(u)] += count
    return dict(merged)


@dataclass(frozen=True)
class PredictionRow:
    T: float
    alpha: tuple
    empirical: int
    zeroth: float
    first: float
    resid_zeroth: float
    resid_first: float


def compare_prediction(table: CensusTable, rep, T_grid: Iterable, alphas: Iterable) -> list[PredictionRow]:
    """Empirical ``pi(T, alpha)`` against the zeroth- and first-order expansion.

    Residuals are ``prediction / empirical - 1`` (``nan`` when the census is 0).
    """
    rows = []
    for T in T_grid:
        for alpha in alphas:
            alpha = tuple(int(x) for x in alpha)
            emp = pi_empirical(table, T, alpha)
            z = rep.predict(float(T), alpha, order=0)
            f1 = rep.predict(float(T), alpha, order=1)
            r0 = z / emp - 1 if emp else float("nan")
            r1 = f1 / emp - 1 if emp else float("nan")
            rows.append(PredictionRow(float(T), alpha, emp, z, f1, r0, r1))
    return rows


def class_window(b: int, radius: int, norm: str = "max") -> list[tuple]:
    """Class vectors with ``max|alpha_i| <= radius`` (or L1 norm with ``norm='l1'``)."""
    out = []
    for alpha in np.ndindex(*([2 * radius + 1] * b)):
        a = tuple(int(x) - radius for x in alpha)
        if norm == "l1" and sum(abs(x) for x in a) > radius:
            continue
        out.append(a)
    return out

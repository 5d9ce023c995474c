"""Clique number, clique counting and the orbit-weighted maximum-clique census.

Vertices of one Weyl orbit lie in equally many maximum cliques, so the
census counts (omega-1)-cliques in the neighborhood of one representative
per orbit and weights by orbit size; the weighted sum is exactly divisible
by omega. Counting cliques of size exactly omega-1 in the neighborhood
(rather than maximal ones) stays correct when maximal clique sizes are
mixed.

All subgraph work runs on Python-int bitset rows: candidate-set
intersection is one AND, so branch-and-bound, pivoted counting and
enumeration share the same representation.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import comb

import numpy as np

from sosgraphs.graph import MembershipGraph, SOSGraph
from sosgraphs.roots import key_offset

GraphLike = SOSGraph | MembershipGraph

DEFAULT_BRUTE_FORCE_BOUND = 750
_ENUM_BATCH = 65_536


@dataclass(frozen=True)
class CliqueCensus:
    """Maximum-clique totals assembled from per-orbit per-vertex counts."""

    omega: int
    per_orbit: tuple[tuple[int, int], ...]  # (orbit size, max cliques through a vertex)
    total_maximum_cliques: int


def induced_bitrows(g: GraphLike, vertex_ids: np.ndarray) -> list[int]:
    """Bitset adjacency rows of the subgraph induced on vertex_ids."""
    ids = np.asarray(vertex_ids, dtype=np.int64)
    d = ids.size
    if d == 0:
        return []
    keys = g.vertices.keys()
    off = key_offset(g.vertices.dim)
    sub = keys[ids]
    diff = sub[:, None] - sub[None, :] + off
    pos = np.searchsorted(keys, diff.ravel())
    np.minimum(pos, keys.size - 1, out=pos)
    adj = (keys[pos] == diff.ravel()).reshape(d, d)
    np.fill_diagonal(adj, False)
    packed = np.packbits(adj, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def _color_bound_order(cand: int, rows: list[int]) -> tuple[list[int], list[int]]:
    """Greedy coloring of cand; vertices listed in nondecreasing color."""
    order: list[int] = []
    bounds: list[int] = []
    color = 0
    rest = cand
    while rest:
        color += 1
        avail = rest
        while avail:
            b = avail & -avail
            v = b.bit_length() - 1
            avail ^= b
            avail &= ~rows[v]
            rest ^= b
            order.append(v)
            bounds.append(color)
    return order, bounds


def max_clique_size_bitset(rows: list[int], cand: int, lower: int = 0) -> int:
    """Exact maximum clique size via branch-and-bound with coloring bound."""
    best = lower

    def expand(sub: int, size: int):
        nonlocal best
        order, bounds = _color_bound_order(sub, rows)
        for i in range(len(order) - 1, -1, -1):
            if size + bounds[i] <= best:
                return
            v = order[i]
            nxt = sub & rows[v]
            if nxt:
                expand(nxt, size + 1)
            elif size + 1 > best:
                best = size + 1
            sub &= ~(1 << v)

    if cand:
        expand(cand, 0)
    return best


def count_cliques_of_size_bitset(rows: list[int], cand: int, t: int) -> int:
    """Count cliques of size exactly t via pivoted recursion.

    Held vertices are definite members, pivot vertices are optional; a leaf
    with h held and p pivots contributes C(p, t - h). Subtrees that cannot
    reach size t are pruned on the candidate popcount.
    """
    if t == 0:
        return 1
    total = 0

    def rec(sub: int, held: int, pivots: int):
        nonlocal total
        if held > t or held + pivots + sub.bit_count() < t:
            return
        if sub == 0:
            total += comb(pivots, t - held)
            return
        c = sub
        best_u = -1
        best_n = -1
        best_c = 0
        while c:
            b = c & -c
            u = b.bit_length() - 1
            c ^= b
            cu = sub & rows[u]
            nu = cu.bit_count()
            if nu > best_n:
                best_n, best_u, best_c = nu, u, cu
        rec(best_c, held, pivots + 1)
        rest = sub & ~rows[best_u] & ~(1 << best_u)
        cur = sub
        while rest:
            b = rest & -rest
            v = b.bit_length() - 1
            rest ^= b
            cur ^= b
            rec(cur & rows[v], held + 1, pivots)

    rec(cand, 0, 0)
    return total


def collect_cliques_of_size(rows: list[int], cand: int, t: int) -> np.ndarray:
    """All t-cliques as a (count, t) int32 array, ascending index order."""
    if t == 0:
        return np.empty((1, 0), dtype=np.int32)
    buf: list[int] = []
    chunks: list[np.ndarray] = []
    chosen: list[int] = []

    def flush():
        chunks.append(np.array(buf, dtype=np.int32).reshape(-1, t))
        buf.clear()

    def rec(sub: int, need: int):
        if need == 1:
            c = sub
            while c:
                b = c & -c
                buf.extend(chosen)
                buf.append(b.bit_length() - 1)
                c ^= b
            if len(buf) >= _ENUM_BATCH * t:
                flush()
            return
        c = sub
        while c:
            b = c & -c
            v = b.bit_length() - 1
            c ^= b
            nxt = sub & rows[v] & ~((b << 1) - 1)
            if nxt.bit_count() >= need - 1:
                chosen.append(v)
                rec(nxt, need - 1)
                chosen.pop()

    rec(cand, t)
    if buf:
        flush()
    if not chunks:
        return np.empty((0, t), dtype=np.int32)
    return np.concatenate(chunks) if len(chunks) > 1 else chunks[0]


def maximal_clique_size_counts(rows: list[int], cand: int) -> Counter:
    """Counts of maximal cliques by size (pivoted Bron-Kerbosch)."""
    counts: Counter = Counter()

    def rec(size: int, p: int, x: int):
        if p == 0:
            if x == 0:
                counts[size] += 1
            return
        both = p | x
        c = both
        best_u = -1
        best_n = -1
        while c:
            b = c & -c
            u = b.bit_length() - 1
            c ^= b
            nu = (p & rows[u]).bit_count()
            if nu > best_n:
                best_n, best_u = nu, u
        todo = p & ~rows[best_u]
        while todo:
            b = todo & -todo
            v = b.bit_length() - 1
            todo ^= b
            rec(size + 1, p & rows[v], x & rows[v])
            p ^= b
            x |= b

    if cand:
        rec(0, cand, 0)
    return counts


def enumerate_maximal_cliques(rows: list[int], cand: int):
    """Yield every maximal clique as a sorted index tuple (Bron-Kerbosch)."""
    chosen: list[int] = []

    def rec(p: int, x: int):
        if p == 0:
            if x == 0:
                yield tuple(chosen)
            return
        both = p | x
        c = both
        best_u = -1
        best_n = -1
        while c:
            b = c & -c
            u = b.bit_length() - 1
            c ^= b
            nu = (p & rows[u]).bit_count()
            if nu > best_n:
                best_n, best_u = nu, u
        todo = p & ~rows[best_u]
        while todo:
            b = todo & -todo
            v = b.bit_length() - 1
            todo ^= b
            chosen.append(v)
            yield from rec(p & rows[v], x & rows[v])
            chosen.pop()
            p ^= b
            x |= b

    if cand:
        yield from rec(cand, 0)


def _full_mask(count: int) -> int:
    return (1 << count) - 1


def clique_number(g: GraphLike) -> int:
    """Exact clique number; 1 for edgeless graphs.

    A maximum clique meets every orbit through some vertex, so it suffices
    to solve the neighborhood of one representative per Weyl orbit; if no
    representative has a neighbor, neither does any vertex.
    """
    if g.n == 0:
        return 0
    best = 1
    for rep in g.orbit_representatives():
        nb = g.neighbors(rep)
        if nb.size == 0:
            continue
        rows = induced_bitrows(g, nb)
        best = max(best, 1 + max_clique_size_bitset(rows, _full_mask(nb.size), best - 1))
    return best


def count_cliques_of_size(g: GraphLike, vertex_subset: np.ndarray, t: int) -> int:
    """Exact number of t-cliques in the subgraph induced on vertex_subset."""
    if t < 1:
        raise ValueError("t must be >= 1")
    ids = np.asarray(vertex_subset)
    if t == 1:
        return int(ids.size)
    rows = induced_bitrows(g, ids)
    return count_cliques_of_size_bitset(rows, _full_mask(ids.size), t)


def enumerate_max_cliques_through(g: GraphLike, v: int, omega: int):
    """Yield each maximum clique containing v as a sorted global index tuple."""
    if omega == 1:
        yield (v,)
        return
    nb = g.neighbors(v)
    rows = induced_bitrows(g, nb)
    for local in collect_cliques_of_size(rows, _full_mask(nb.size), omega - 1):
        yield tuple(sorted([v] + [int(nb[i]) for i in local]))


def count_maximum_cliques(g: GraphLike, omega: int | None = None) -> CliqueCensus:
    """Orbit-weighted maximum-clique total with exact divisibility."""
    if omega is None:
        omega = clique_number(g)
    if omega == 0:
        return CliqueCensus(omega=0, per_orbit=(), total_maximum_cliques=0)
    sizes = g.orbit_sizes()
    reps = g.orbit_representatives()
    per_orbit: list[tuple[int, int]] = []
    weighted = 0
    for size, rep in zip(sizes, reps):
        if omega == 1:
            c = 1
        else:
            nb = g.neighbors(rep)
            if nb.size < omega - 1:
                c = 0
            else:
                rows = induced_bitrows(g, nb)
                c = count_cliques_of_size_bitset(rows, _full_mask(nb.size), omega - 1)
        per_orbit.append((size, c))
        weighted += size * c
    total, rem = divmod(weighted, omega)
    if rem:
        raise ArithmeticError(
            f"orbit-weighted clique count {weighted} not divisible by omega={omega}"
        )
    return CliqueCensus(
        omega=omega, per_orbit=tuple(per_orbit), total_maximum_cliques=total
    )


def count_maximal_cliques_by_size(g: GraphLike) -> dict[int, int]:
    """Counts of maximal cliques by size, orbit-weighted.

    Maximal cliques of size s through v biject with maximal (s-1)-cliques
    of the neighborhood graph, so per-size weighted sums divide by s.
    """
    weighted: Counter = Counter()
    for size, rep in zip(g.orbit_sizes(), g.orbit_representatives()):
        nb = g.neighbors(rep)
        if nb.size == 0:
            weighted[1] += size
            continue
        rows = induced_bitrows(g, nb)
        for s1, cnt in maximal_clique_size_counts(rows, _full_mask(nb.size)).items():
            weighted[s1 + 1] += size * cnt
    out = {}
    for s, w in sorted(weighted.items()):
        total, rem = divmod(w, s)
        if rem:
            raise ArithmeticError(f"maximal-clique weight {w} not divisible by size {s}")
        out[s] = total
    return out


def brute_force_maximum_cliques(
    g: GraphLike, bound: int = DEFAULT_BRUTE_FORCE_BOUND
) -> list[tuple[int, ...]]:
    """All maximum cliques by unassisted full enumeration (oracle path).

    Walks every clique of the graph without orbit reasoning or pruning
    bounds; refuses graphs above bound.
    """
    if g.n > bound:
        raise ValueError(f"graph has {g.n} vertices; brute force bound is {bound}")
    if g.n == 0:
        return []
    rows = induced_bitrows(g, np.arange(g.n))
    best: list[tuple[int, ...]] = []
    best_size = 0
    chosen: list[int] = []

    def rec(cand: int):
        nonlocal best_size
        if len(chosen) > best_size:
            best_size = len(chosen)
            best.clear()
        if len(chosen) == best_size:
            best.append(tuple(chosen))
        c = cand
        while c:
            b = c & -c
            v = b.bit_length() - 1
            c ^= b
            chosen.append(v)
            rec(cand & rows[v] & ~((b << 1) - 1))
            chosen.pop()

    rec(_full_mask(g.n))
    return sorted(best)

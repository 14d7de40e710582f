"""Characters of vector, Fock, and layered modules.

Every family gets a direct character (sum of degree monomials over the
enumerated basis) plus at least one closed evaluation: fermionic sums
for Fock spaces, a factorized product over interval roots for layered
vacuum modules and their width-restricted cousins, and a count over
pairs of reverse super tableaux.  The closed forms are independent
implementations and the test suite equates them with the enumerations.

All multivariate series live in CharSeries (exponents of z_0..z_{N-1},
truncated by total degree).  p denotes the product of all z_i, so a
power of p shifts every exponent at once.  The vector and covector
window characters are the one exception: their exponents are signed, so
they are returned as plain dictionaries.
"""

import itertools
from typing import Iterable, Optional

from .exact_math import CharSeries, inv_pochhammer
from .parity_core import Parity
from .spart_states import FockFamily, degree, enumerate_states
from .plane_states import enumerate_plane, layer_pair, plane_degree_vector

__all__ = [
    "char_direct_fock", "char_direct_plane", "char_fock_fermionic",
    "char_fock_rewritten", "char_macmahon_product", "char_restricted_product",
    "char_tableaux", "char_vector_window", "csv_rows", "interval_monomial",
    "sigma_interval",
]


def sigma_interval(parity: Parity, i: int, j: int) -> int:
    """Sign (-1)**(number of odd nodes in i..j); depends on i, j mod N only."""
    if i > j:
        raise ValueError("empty interval")
    odd = sum(parity.node_parity(t) for t in range(i, j + 1))
    return -1 if odd % 2 else 1


def interval_monomial(parity: Parity, i: int, j: int) -> tuple[int, ...]:
    """Exponent vector of z_i z_{i+1} ... z_j with periodic colors."""
    expo = [0] * parity.N
    for t in range(i, j + 1):
        expo[t % parity.N] += 1
    return tuple(expo)


# ---------------------------------------------------------------------------
# direct characters

def char_direct_fock(fam: FockFamily, trunc: int) -> CharSeries:
    """Sum of degree monomials over the enumerated Fock basis."""
    coeffs: dict = {}
    for st in enumerate_states(fam, trunc):
        e = degree(st)
        coeffs[e] = coeffs.get(e, 0) + 1
    return CharSeries(fam.parity.N, trunc, coeffs)


def char_direct_plane(parity: Parity, node: int, trunc: int, gamma: Iterable = (),
                      epsilon: Iterable = (), alpha: Iterable = (),
                      forbidden: Iterable = (),
                      cap: Optional[tuple[int, int]] = None) -> CharSeries:
    """Sum of degree monomials over enumerated layered states.

    cap = (L1, L2) keeps only states whose first layer satisfies
    lambda_1 <= L1 and mu_1 <= L2 (the infinite-height box restriction);
    it only makes sense for the plain vacuum family.
    """
    if cap is not None and (tuple(gamma) or tuple(epsilon) or tuple(alpha)):
        raise ValueError("width restriction applies to the vacuum family only")
    coeffs: dict = {}
    for st in enumerate_plane(parity, node, trunc, gamma, epsilon, alpha,
                              forbidden):
        if cap is not None:
            lam, mu = layer_pair(st, 1)
            if lam.get(1) > cap[0] or mu.get(1) > cap[1]:
                continue
        e = plane_degree_vector(st)
        coeffs[e] = coeffs.get(e, 0) + 1
    return CharSeries(parity.N, trunc, coeffs)


# ---------------------------------------------------------------------------
# fermionic sums

def _weighted_vectors(weights: tuple[int, ...], budget: int):
    """All non-negative integer vectors with sum(v*w) <= budget."""
    def rec(idx, left):
        if idx == len(weights):
            yield ()
            return
        w = weights[idx]
        top = left // w if w > 0 else budget
        for v in range(top + 1):
            for rest in rec(idx + 1, left - v * w):
                yield (v,) + rest
    yield from rec(0, budget)


def _poch_product(sizes: Iterable[int], depth: int) -> list[int]:
    """Coefficient list of prod 1/(p)_s up to p^depth."""
    out = [1] + [0] * depth
    for s in sizes:
        if s == 0:
            continue
        row = inv_pochhammer(s, depth)
        out = [sum(out[a] * row[t - a] for a in range(t + 1))
               for t in range(depth + 1)]
    return out


def char_fock_fermionic(parity: Parity, node: int, trunc: int, sign: int = 1,
                        r: int = 0, kind: str = "pure") -> CharSeries:
    """Fermionic sum for the Fock characters.

    Terms are indexed by end-color counts a_j (rows) and b_j (columns)
    over the window j = node..node+N-1 with |a| = |b| for kind "pure",
    |a| = |b| + r for "vec" and |a| = |b| - r for "cov".  The overall
    p^{-b_node} cancels exactly against the full-period column window,
    and the vec normalization z_node^{-r} against the row windows, so
    all stored exponents stay non-negative; anything residual raises.
    """
    N, k = parity.N, node
    if kind == "pure":
        if r:
            raise ValueError("pure families take r = 0")
        delta = 0
    elif kind == "vec":
        delta = r
    elif kind == "cov":
        delta = -r
    else:
        raise ValueError(f"unknown kind {kind!r}")
    if kind != "pure":
        if r <= 0:
            raise ValueError("vec/cov families need r > 0")
        if sign != 1:
            raise ValueError("sign applies to pure families only")

    # interval lengths: color window of a_j is k..j, of b_j is j..k+N-1
    wa = tuple(j - k + 1 for j in range(k, k + N))
    wb = tuple(0 if j == k else N - (j - k) for j in range(k, k + N))

    def pexp(aj, bj, j):
        if kind == "pure":
            ea = (1 + sign * parity.s(j + 1)) // 2
            eb = (1 + sign * parity.s(j)) // 2
        elif kind == "vec":
            ea = (1 - parity.s(k + 1) * parity.s(j + 1)) // 2
            eb = (1 - parity.s(k + 1) * parity.s(j)) // 2
        else:
            ea = (1 - parity.s(k) * parity.s(j + 1)) // 2
            eb = (1 - parity.s(k) * parity.s(j)) // 2
        return aj * (aj - 1) // 2 * ea + bj * (bj - 1) // 2 * eb

    drop = r if kind == "vec" else 0
    coeffs: dict = {}
    for a in _weighted_vectors(wa, trunc + drop):
        dega = sum(v * w for v, w in zip(a, wa))
        for brest in _weighted_vectors(wb[1:], trunc + drop - dega):
            bk = sum(a) - delta - sum(brest)
            if bk < 0:
                continue
            b = (bk,) + brest
            base = dega + sum(v * w for v, w in zip(brest, wb[1:])) - drop
            if base > trunc:
                continue
            expo = [0] * N
            for idx, j in enumerate(range(k, k + N)):
                for t in range(k, j + 1):
                    expo[t % N] += a[idx]
                if j != k:
                    for t in range(j, k + N):
                        expo[t % N] += b[idx]
            if kind == "vec":
                expo[k % N] -= r
            e = sum(pexp(a[idx], b[idx], j)
                    for idx, j in enumerate(range(k, k + N)))
            depth = (trunc - base) // N - e
            if depth < 0:
                continue
            series = _poch_product(itertools.chain(a, b), depth)
            for t, c in enumerate(series):
                if not c:
                    continue
                vec = tuple(x + e + t for x in expo)
                if min(vec) < 0:
                    raise ValueError(
                        f"negative exponent survives cancellation at {a}, {b}")
                if sum(vec) <= trunc:
                    coeffs[vec] = coeffs.get(vec, 0) + c
    return CharSeries(N, trunc, {e: c for e, c in coeffs.items() if c})


def char_fock_rewritten(parity: Parity, k: int, trunc: int) -> CharSeries:
    """The positive pure character resummed over row-surplus vectors.

    Pairs are re-cut along the node-0 staircase so the row count exceeds
    the column count by exactly k; the k(k+1)/2 staircase boxes are
    divided out, which is where intermediate negative exponents appear
    and must cancel against the p power.
    """
    N = parity.N
    if not 0 <= k < N:
        raise ValueError("node out of range")
    if any(parity.s(i) != 1 for i in range(1, k + 1)):
        raise ValueError("the resummation needs the first k colors even")
    wa = tuple(i + 1 for i in range(N))
    wb1 = tuple(N - i for i in range(1, N))
    stair = k * (k + 1) // 2
    coeffs: dict = {}
    for a in _weighted_vectors(wa, trunc + stair):
        if sum(a) < k:
            continue
        dega = sum(v * w for v, w in zip(a, wa))
        for brest in _weighted_vectors(wb1, trunc + stair - dega):
            b0 = sum(a) - k - sum(brest)
            if b0 < 0:
                continue
            b = (b0,) + brest
            degb = sum(v * w for v, w in zip(brest, wb1))
            if dega + degb - stair > trunc:
                continue
            expo = [sum(a[j:]) + sum(b[1:j + 1]) - max(0, k - j)
                    for j in range(N)]
            e = sum(a[i] * (a[i] - 1) // 2 * ((parity.s(i + 1) + 1) // 2)
                    for i in range(N - 1))
            e += sum(b[i] * (b[i] - 1) // 2 * ((parity.s(i) + 1) // 2)
                     for i in range(1, N))
            low = sum(expo) + e * N
            if low > trunc:
                continue
            depth = (trunc - low) // N
            series = _poch_product(itertools.chain(a, b), depth)
            for t, c in enumerate(series):
                if not c:
                    continue
                vec = tuple(x + e + t for x in expo)
                if min(vec) < 0:
                    raise ValueError(
                        f"negative exponent survives cancellation at {a}, {b}")
                if sum(vec) <= trunc:
                    coeffs[vec] = coeffs.get(vec, 0) + c
    return CharSeries(N, trunc, {e: c for e, c in coeffs.items() if c})


# ---------------------------------------------------------------------------
# factorized products

def _root_factor(parity: Parity, i: int, j: int, trunc: int) -> CharSeries:
    """(1 - sigma z_{i,j})^{-sigma} truncated by total degree."""
    sg = sigma_interval(parity, i, j)
    v = interval_monomial(parity, i, j)
    width = j - i + 1
    if sg == -1:
        return CharSeries.one(parity.N, trunc) + CharSeries.term(parity.N, trunc, v)
    out = CharSeries.one(parity.N, trunc)
    t = 1
    while t * width <= trunc:
        out = out + CharSeries.term(
            parity.N, trunc, tuple(x * t for x in v))
        t += 1
    return out


def char_macmahon_product(parity: Parity, k: int, trunc: int) -> CharSeries:
    """Product over intervals i <= k <= j; odd intervals contribute a
    single binomial factor, even ones a geometric series."""
    out = CharSeries.one(parity.N, trunc)
    for width in range(1, trunc + 1):
        for i in range(k - width + 1, k + 1):
            out = out * _root_factor(parity, i, i + width - 1, trunc)
    return out


def char_restricted_product(parity: Parity, k: int, L1: int, L2: int,
                            trunc: int) -> CharSeries:
    """Generating function of width-restricted layered configurations.

    Matches the direct enumeration with every layer obeying
    lambda_1 <= L1 and mu_1 <= L2.  The row cap L1 bounds the interval
    ends (j up to k + L1 - 1) and the column cap L2 the interval starts
    (i down to k - L2); the node's own column sits on the mu side of
    the count, which is why the two ranges have different lengths.  The
    convention is pinned empirically in docs/restricted_calibration.md.
    """
    if L1 < 1 or L2 < 1:
        raise ValueError("caps must be positive")
    out = CharSeries.one(parity.N, trunc)
    for i in range(k - L2, k + 1):
        for j in range(k, k + L1):
            if j - i + 1 > trunc:
                continue
            out = out * _root_factor(parity, i, j, trunc)
    return out


# ---------------------------------------------------------------------------
# tableaux count

def _fill_tableau(shape: tuple[int, ...], row_eq, col_eq, box_weight,
                  budget: int, max_entry: int):
    """Yield (cells, weight) for reverse super tableaux of the shape.

    cells maps (row, col) to the entry; weakly decreasing along rows and
    columns, with equality permitted only where the predicates allow.
    box_weight(v) is the degree a value-v box contributes; fills whose
    total weight exceeds the budget are pruned.
    """
    order = [(r, c) for c, h in enumerate(shape) for r in range(h)]
    order.sort()

    def rec(idx, cells, used):
        if idx == len(order):
            yield dict(cells), used
            return
        r, c = order[idx]
        top = max_entry
        if c > 0 and (r, c - 1) in cells:
            top = min(top, cells[(r, c - 1)])
        if r > 0:
            top = min(top, cells[(r - 1, c)])
        for v in range(1, top + 1):
            if c > 0 and cells.get((r, c - 1)) == v and not row_eq(v):
                continue
            if r > 0 and cells[(r - 1, c)] == v and not col_eq(v):
                continue
            w = used + box_weight(v)
            if w > budget:
                continue
            cells[(r, c)] = v
            yield from rec(idx + 1, cells, w)
            del cells[(r, c)]
    yield from rec(0, {}, 0)


def _shapes(total: int):
    """All partitions of every size up to total, as column-height tuples."""
    def rec(most, left):
        yield ()
        for first in range(1, min(most, left) + 1):
            for rest in rec(first, left - first):
                yield (first,) + rest
    yield from rec(total, total)


def char_tableaux(parity: Parity, node: int, trunc: int) -> CharSeries:
    """Layered vacuum character via pairs of reverse super tableaux.

    Columns of the first tableau are the row partitions of the layers,
    columns of the second are the column partitions plus one, padded
    with ones to the common shape.  Equality rules are read off the
    color sequence at the node, and the forbidden repeat of the padding
    value is what pins consecutive layers to the stacking order.
    """
    N, k = parity.N, node
    s = parity.s

    def row1(v):
        return s(k + v) == -s(k)

    def col1(v):
        return s(k + v) == s(k)

    def row2(v):
        return s(k + 1 - v) == -s(k)

    def col2(v):
        return s(k + 1 - v) == s(k)

    coeffs: dict = {}
    for shape in _shapes(trunc):
        size = sum(shape)
        for t1, w1 in _fill_tableau(shape, row1, col1, lambda v: v,
                                    trunc, trunc):
            for t2, w2 in _fill_tableau(shape, row2, col2, lambda v: v - 1,
                                        trunc - w1, trunc + 1):
                expo = [0] * N
                for v in t1.values():
                    for t in range(k, k + v):
                        expo[t % N] += 1
                for v in t2.values():
                    for t in range(k - v + 1, k):
                        expo[t % N] += 1
                vec = tuple(expo)
                coeffs[vec] = coeffs.get(vec, 0) + 1
    return CharSeries(N, trunc, coeffs)


# ---------------------------------------------------------------------------
# vector and covector windows

def char_vector_window(parity: Parity, kind: str, T: int) -> dict:
    """Windowed character of the vector or covector representation.

    Degrees walk by one color per index step, so a window of T periods
    holds the N distinct monomials times 2T powers of p.  Exponents are
    signed; the result is a plain exponent-to-coefficient dictionary.
    The windows of V and W are aligned so that substituting every z
    with its inverse maps one onto the other exactly.
    """
    N = parity.N
    if T < 1:
        raise ValueError("window must cover at least one period")
    if kind not in ("V", "W"):
        raise ValueError("kind must be 'V' or 'W'")
    out: dict = {}
    if kind == "V":
        lo, hi = -N * T - 1, N * T - 2
        anchor = -1
        step = lambda j: j % N
    else:
        lo, hi = 1 - N * T, N * T
        anchor = 0
        step = lambda j: (-j) % N
    expo = [0] * N
    for j in range(anchor + 1, hi + 1):
        expo[step(j)] += 1
        if j >= lo:
            out[tuple(expo)] = out.get(tuple(expo), 0) + 1
    expo = [0] * N
    for j in range(anchor, lo - 1, -1):
        if j <= hi:
            out[tuple(expo)] = out.get(tuple(expo), 0) + 1
        expo[step(j)] -= 1
    return out


# ---------------------------------------------------------------------------
# output helpers

def csv_rows(series: CharSeries) -> list[tuple]:
    """One row per exponent vector: z-exponents then the coefficient."""
    return [tuple(e) + (c,) for e, c in
            sorted(series.coeffs.items(), key=lambda it: (sum(it[0]), it[0]))]

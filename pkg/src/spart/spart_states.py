"""Module bases as decorated partition data.

A state is a partition tuple attached to a family: a finite wedge of
vectors or covectors, a pure Fock pair (lambda, mu) hanging off a node,
or a non-pure Fock space carrying an extra prefix nu of vector or
covector slots.  This module owns admissibility, box colors and
q-contents, per-node movable boxes with orders, color-counting degrees,
graded enumeration, and ASCII round-trip rendering.

The movable-box listing is produced by an exact factorization argument:
every K_i eigenvalue is a product of one elementary psi_{+1} or psi_{-1}
factor per row/column boundary box, plus a single diagonal seed factor.
Factors sharing a q1-ladder are merged using only the two identities
psi_{-1}(w) psi_1(q2 w) = 1 (annihilation across adjacent q2-exponents)
and psi_1(q2^{-1}w) psi_k(w) = psi_{k+1}(w) (same-sign runs collapse to
a single psi of higher order).  The surviving factors are exactly the
removable/addable corners with their orders, so the listing multiplies
back to the tensor-engine eigenvalue with no approximation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple, Optional, Union

from .exact_math import Monomial, ONE, Q1, Q2, monomial, qpow
from .parity_core import Parity

INF = float("inf")

Value = Union[int, float]

CONVEX = "convex"
CONCAVE = "concave"

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def _is_inf(v: Value) -> bool:
    return v == INF


@dataclass(frozen=True)
class GenPartition:
    """Weakly decreasing integer parts, with an optional inf prefix.

    Trailing zeros are significant only where the family fixes the
    length (nu prefixes, wedge value lists); trimmed() normalizes the
    Fock lambda/mu convention where they are padding.
    """

    parts: tuple[Value, ...] = ()

    def __post_init__(self) -> None:
        ps = tuple(self.parts)
        object.__setattr__(self, "parts", ps)
        seen_finite = False
        for p in ps:
            if _is_inf(p):
                if seen_finite:
                    raise ValueError("inf parts must form a prefix")
            elif isinstance(p, int) and not isinstance(p, bool):
                seen_finite = True
            else:
                raise ValueError(f"part {p!r} is not an integer")
        for a, b in zip(ps, ps[1:]):
            if b > a:
                raise ValueError(f"parts not weakly decreasing: {ps}")

    @classmethod
    def of(cls, parts: Iterable[Value]) -> "GenPartition":
        return cls(tuple(parts))

    def trimmed(self) -> "GenPartition":
        ps = list(self.parts)
        while ps and ps[-1] == 0:
            ps.pop()
        return GenPartition(tuple(ps))

    def padded(self, length: int) -> "GenPartition":
        if len(self.parts) > length:
            raise ValueError(f"more than {length} parts: {self.parts}")
        return GenPartition(self.parts + (0,) * (length - len(self.parts)))

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, k):
        return self.parts[k]

    def get(self, j: int) -> Value:
        """Part number j, 1-based, zero past the end."""
        return self.parts[j - 1] if 1 <= j <= len(self.parts) else 0

    @property
    def size(self) -> int:
        if any(_is_inf(p) for p in self.parts):
            raise ValueError("size of an infinite partition")
        return int(sum(self.parts))

    def bump(self, j: int, delta: int) -> "GenPartition":
        """Copy with part j changed by delta; j may extend by one row."""
        ps = list(self.parts)
        if j == len(ps) + 1 and delta > 0:
            ps.append(0)
        if not 1 <= j <= len(ps):
            raise ValueError(f"no part {j} to change")
        ps[j - 1] += delta
        return GenPartition(tuple(ps))

    def to_json(self) -> list:
        return ["inf" if _is_inf(p) else int(p) for p in self.parts]

    @classmethod
    def from_json(cls, data: Iterable) -> "GenPartition":
        return cls(tuple(INF if p == "inf" else int(p) for p in data))

    def __str__(self) -> str:
        return "(" + ",".join("inf" if _is_inf(p) else str(p) for p in self.parts) + ")"


_FOCK_KINDS = ("pure", "vec", "cov")
_WEDGE_KINDS = ("vwedge", "cwedge")
_KINDS = _FOCK_KINDS + _WEDGE_KINDS


@dataclass(frozen=True)
class FockFamily:
    """Which module a state lives in.

    kind    "pure", "vec", "cov" (Fock), "vwedge", "cwedge" (finite wedges)
    parity  periodic sign sequence
    node    distinguished color i (Fock kinds; wedges use the origin 0)
    sign    direction for pure and wedge kinds, +1 or -1
    r       prefix length for vec/cov, tensor-factor count for wedges
    """

    kind: str
    parity: Parity
    node: int = 0
    sign: int = 1
    r: int = 0

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        object.__setattr__(self, "node", self.node % self.parity.N)
        if self.kind != "pure" and self.r < 1:
            raise ValueError(f"{self.kind} family needs r >= 1")
        if self.kind == "pure" and self.r != 0:
            raise ValueError("pure family takes no r")

    @property
    def direction(self) -> int:
        """The q2-shift sign sigma between consecutive tensor slots."""
        if self.kind == "vec":
            return -self.parity.s(self.node + 1)
        if self.kind == "cov":
            return -self.parity.s(self.node)
        return self.sign

    def to_json(self) -> dict:
        out = {"kind": self.kind, "parity": str(self.parity)}
        if self.kind in _FOCK_KINDS:
            out["node"] = self.node
        if self.kind in ("pure",) + _WEDGE_KINDS:
            out["sign"] = "+" if self.sign > 0 else "-"
        if self.kind != "pure":
            out["r"] = self.r
        return out

    @classmethod
    def from_json(cls, data: dict) -> "FockFamily":
        sign = data.get("sign", "+")
        return cls(kind=data["kind"], parity=Parity.from_string(data["parity"]),
                   node=data.get("node", 0),
                   sign=1 if sign in ("+", 1) else -1,
                   r=data.get("r", 0))


@dataclass(frozen=True)
class FockState:
    """A basis vector of its family.

    Pure Fock: (lam, mu) trimmed of trailing zeros.  Non-pure: nu holds
    exactly family.r parts (vector or covector prefix values >= 0).
    vwedge: lam holds exactly r values in Z, weakly decreasing.  cwedge:
    the same, stored in mu (column side).
    """

    family: FockFamily
    lam: GenPartition = GenPartition()
    mu: GenPartition = GenPartition()
    nu: GenPartition = GenPartition()

    def __post_init__(self) -> None:
        fam = self.family
        if fam.kind in _FOCK_KINDS:
            object.__setattr__(self, "lam", self.lam.trimmed())
            object.__setattr__(self, "mu", self.mu.trimmed())
            if fam.kind == "pure":
                if len(self.nu):
                    raise ValueError("pure state takes no nu")
            else:
                object.__setattr__(self, "nu", self.nu.padded(fam.r))
        elif fam.kind == "vwedge":
            if len(self.lam) != fam.r or len(self.mu) or len(self.nu):
                raise ValueError(f"vwedge state needs exactly {fam.r} values in lam")
        else:
            if len(self.mu) != fam.r or len(self.lam) or len(self.nu):
                raise ValueError(f"cwedge state needs exactly {fam.r} values in mu")

    @property
    def boxes(self) -> int:
        """Total box count relative to the family vacuum (Fock kinds)."""
        if self.family.kind in _WEDGE_KINDS:
            raise ValueError("wedge states have no absolute box count")
        return self.lam.size + self.mu.size + self.nu.size

    def to_json(self) -> dict:
        return {"family": self.family.to_json(), "lambda": self.lam.to_json(),
                "mu": self.mu.to_json(), "nu": self.nu.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "FockState":
        return cls(FockFamily.from_json(data["family"]),
                   GenPartition.from_json(data.get("lambda", ())),
                   GenPartition.from_json(data.get("mu", ())),
                   GenPartition.from_json(data.get("nu", ())))

    def __str__(self) -> str:
        fam = self.family
        if fam.kind == "vwedge":
            return f"vwedge{self.lam}"
        if fam.kind == "cwedge":
            return f"cwedge{self.mu}"
        bits = [f"{fam.kind}:{'+' if fam.direction > 0 else '-'}:{fam.node}"]
        if fam.kind != "pure":
            bits.append(f"nu={self.nu}")
        return " ".join(bits + [f"lam={self.lam}", f"mu={self.mu}"])


def pure_state(parity: Parity, sign: int, node: int,
               lam: Iterable[int] = (), mu: Iterable[int] = ()) -> FockState:
    fam = FockFamily("pure", parity, node=node, sign=sign)
    return FockState(fam, GenPartition.of(lam), GenPartition.of(mu))


def _pairs(seq):
    return zip(seq, seq[1:])


def _pure_admissible(parity: Parity, sigma: int, i: int,
                     lam: GenPartition, mu: GenPartition) -> bool:
    s = parity.s
    lp, mp = lam.parts, mu.parts
    if (lp and not _is_inf(lp[0]) and lp[-1] < 0) or (mp and mp[-1] < 0):
        return False
    for a, b in _pairs(lp):
        if a == b and not _is_inf(a) and s(i + a) != -sigma:
            return False
    for a, b in _pairs(mp):
        if a == b and s(i - a) != -sigma:
            return False
    if len(mp) > len(lp):
        return False
    if s(i) != -sigma and len(lp) > len(mp) + 1:
        return False
    return True


def is_admissible(state: FockState) -> bool:
    fam = state.family
    par, i, sigma = fam.parity, fam.node, fam.direction
    s = par.s
    if fam.kind == "pure":
        return _pure_admissible(par, sigma, i, state.lam, state.mu)
    if fam.kind == "vec":
        if any(_is_inf(p) or p < 0 for p in state.nu.parts):
            return False
        chain = tuple(p + 1 for p in state.nu.parts) + state.lam.parts
        for a, b in _pairs(chain):
            if b > a:
                return False
            if a == b and s(i + a) != -sigma:
                return False
        return _pure_admissible(par, sigma, i, state.lam, state.mu)
    if fam.kind == "cov":
        if any(_is_inf(p) or p < 0 for p in state.nu.parts):
            return False
        chain = state.nu.parts + state.mu.parts
        for a, b in _pairs(chain):
            if b > a:
                return False
            if a == b and s(i - a) != -sigma:
                return False
        return _pure_admissible(par, sigma, i, state.lam, state.mu)
    if fam.kind == "vwedge":
        for a, b in _pairs(state.lam.parts):
            if a == b and s(a + 1) != -sigma:
                return False
        return True
    for a, b in _pairs(state.mu.parts):
        if a == b and s(-a) != -sigma:
            return False
    return True


def assert_admissible(state: FockState) -> None:
    if not is_admissible(state):
        raise ValueError(f"inadmissible state {state}")


def box_color(parity: Parity, origin: int, x: int, y: int) -> int:
    """Color of the box with coordinates (x, y) when (0, 0) has color origin."""
    return (origin + x - y) % parity.N


def q_content(direction: int, origin: int, parity: Parity,
              x: int, y: int, k: int = 0) -> Monomial:
    """q-content of the box at (x, y) in layer k with origin color at (0, 0).

    Row side (x >= y) carries q1 powers of the relative bar, column side
    (x < y) carries q3 powers; both are shifted by a signed q2 power.
    """
    rb = parity.bar(x - y + origin) - parity.bar(origin)
    if x >= y:
        return monomial(q=rb, d=-rb) * qpow(2 * direction * (y - k))
    return monomial(q=-rb, d=-rb) * qpow(2 * direction * (x - k))


@dataclass(frozen=True)
class BoxRef:
    """A box position: side, 1-based slot index, box number, color, coords.

    position is x - y + 1 on the row side and y - x on the column side;
    the diagonal seed box reports position 0 when presented column-side.
    """

    side: str
    index: int
    position: int
    color: int
    x: int
    y: int
    z: int = 0


class MovableBox(NamedTuple):
    box: BoxRef
    kind: str
    order: int
    content: Monomial


class _Factor(NamedTuple):
    index: int   # +1 or -1: the psi subscript sign of the elementary factor
    a: int       # content = q1^a * q2^e after rewriting q3^p = q1^{-p} q2^{-p}
    e: int
    box: BoxRef
    tag: str     # convex / concave / violet


def _factors_fock_rows(par, i, sigma, rows, out):
    # rows = [(T, value)] in the node-i frame; boundary factors of row T
    for T, v in rows:
        e = sigma * (T - 1)
        a_cvx = -(par.bar(i + v - 1) - par.bar(i))
        bx = BoxRef("row", T, v, box_color(par, i, v + T - 2, T - 1),
                    v + T - 2, T - 1)
        out.setdefault((i + v - 1) % par.N, []).append(
            _Factor(-par.s(i + v), a_cvx, e, bx, CONVEX))
        a_cnc = -(par.bar(i + v) - par.bar(i))
        bx = BoxRef("row", T, v + 1, box_color(par, i, v + T - 1, T - 1),
                    v + T - 1, T - 1)
        out.setdefault((i + v) % par.N, []).append(
            _Factor(+par.s(i + v), a_cnc, e, bx, CONCAVE))


def _factors_fock_cols(par, i, sigma, cols, out):
    # cols = [(J, value)], value may be 0 for padded columns
    for J, w in cols:
        e0 = sigma * (J - 1)
        p = par.bar(i - w) - par.bar(i)
        bx = BoxRef("column", J, w, box_color(par, i, J - 1, w + J - 1),
                    J - 1, w + J - 1)
        out.setdefault((i - w) % par.N, []).append(
            _Factor(-par.s(i - w), -p, e0 - p, bx, CONVEX))
        p = par.bar(i - w - 1) - par.bar(i)
        bx = BoxRef("column", J, w + 1, box_color(par, i, J - 1, w + J),
                    J - 1, w + J)
        out.setdefault((i - w - 1) % par.N, []).append(
            _Factor(+par.s(i - w), -p, e0 - p, bx, CONCAVE))


def _elementary_factors(state: FockState) -> dict[int, list[_Factor]]:
    """Per-node elementary psi_{+-1} factors whose product is K_i, before merging."""
    fam = state.family
    par, i, sigma = fam.parity, fam.node, fam.direction
    out: dict[int, list[_Factor]] = {}

    if fam.kind == "vwedge":
        for t, r in enumerate(state.lam.parts, start=1):
            e = sigma * (t - 1)
            bx = BoxRef("row", t, r + 1, r % par.N, r + t - 1, t - 1)
            out.setdefault(r % par.N, []).append(
                _Factor(-par.s(r + 1), -par.bar(r), e, bx, CONVEX))
            bx = BoxRef("row", t, r + 2, (r + 1) % par.N, r + t, t - 1)
            out.setdefault((r + 1) % par.N, []).append(
                _Factor(+par.s(r + 1), -par.bar(r + 1), e, bx, CONCAVE))
        return out

    if fam.kind == "cwedge":
        for t, m in enumerate(state.mu.parts, start=1):
            e0 = sigma * (t - 1)
            p = par.bar(-m)
            bx = BoxRef("column", t, m, (-m) % par.N, t - 1, m + t - 1)
            out.setdefault((-m) % par.N, []).append(
                _Factor(-par.s(-m), -p, e0 - p, bx, CONVEX))
            p = par.bar(-m - 1)
            bx = BoxRef("column", t, m + 1, (-m - 1) % par.N, t - 1, m + t)
            out.setdefault((-m - 1) % par.N, []).append(
                _Factor(+par.s(-m), -p, e0 - p, bx, CONCAVE))
        return out

    r = fam.r if fam.kind in ("vec", "cov") else 0
    ell = len(state.lam.parts)
    rows: list[tuple[int, int]] = []
    cols: list[tuple[int, int]] = []
    if fam.kind == "vec":
        rows += [(T, v + 1) for T, v in enumerate(state.nu.parts, start=1)]
        rows += [(r + j, v) for j, v in enumerate(state.lam.parts, start=1)]
        cols += [(r + j, state.mu.get(j)) for j in range(1, ell + 1)]
    elif fam.kind == "cov":
        rows += [(r + j, v) for j, v in enumerate(state.lam.parts, start=1)]
        cols += [(J, w) for J, w in enumerate(state.nu.parts, start=1)]
        cols += [(r + j, state.mu.get(j)) for j in range(1, ell + 1)]
    else:
        rows += [(j, v) for j, v in enumerate(state.lam.parts, start=1)]
        cols += [(j, state.mu.get(j)) for j in range(1, ell + 1)]

    _factors_fock_rows(par, i, sigma, rows, out)
    _factors_fock_cols(par, i, sigma, cols, out)

    depth = r + ell
    bx = BoxRef("column" if par.s(i) == -sigma else "row", depth + 1,
                0 if par.s(i) == -sigma else 1, i, depth, depth)
    out.setdefault(i, []).append(_Factor(sigma, 0, sigma * depth, bx, "violet"))
    return out


def _merge_ladder(factors: list[_Factor]) -> list[tuple[_Factor, int, int]]:
    """Merge one q1-ladder; returns (anchor, psi sign, order) triples."""
    plus: dict[int, list[_Factor]] = {}
    minus: dict[int, list[_Factor]] = {}
    for f in factors:
        (plus if f.index > 0 else minus).setdefault(f.e, []).append(f)

    changed = True
    while changed:
        changed = False
        for e in sorted(minus):
            if minus.get(e) and plus.get(e + 1):
                minus[e].pop()
                plus[e + 1].pop()
                changed = True

    entries: list[tuple[_Factor, int, int]] = []

    def runs(side: dict[int, list[_Factor]], sgn: int) -> None:
        while True:
            exps = sorted(e for e in side if side[e])
            if not exps:
                return
            start = end = exps[0]
            while side.get(end + 1):
                end += 1
            anchor_e = end if sgn > 0 else start
            taken = {e: side[e].pop() for e in range(start, end + 1)}
            entries.append((taken[anchor_e], sgn, end - start + 1))

    runs(plus, +1)
    runs(minus, -1)
    return entries


def movable_boxes(state: FockState, i: int) -> list[MovableBox]:
    """Convex (removable) and concave (addable) boxes of color i, with orders.

    Orders describe the packaged eigenvalue factorization: the product of
    psi_{sign * order}(content * u/z) over the returned entries, with sign
    read off side and kind, is exactly the K_i eigenvalue of the state.
    """
    assert_admissible(state)
    par = state.family.parity
    i = i % par.N
    ladders: dict[int, list[_Factor]] = {}
    for f in _elementary_factors(state).get(i, []):
        ladders.setdefault(f.a, []).append(f)

    fam = state.family
    violet_kind = CONVEX if par.s(fam.node) == -fam.direction else CONCAVE
    out = []
    for a, fs in sorted(ladders.items()):
        for anchor, sgn, order in _merge_ladder(fs):
            kind = violet_kind if anchor.tag == "violet" else anchor.tag
            content = monomial(q=-a, d=a) * qpow(2 * anchor.e)
            out.append(MovableBox(anchor.box, kind, order, content))
    out.sort(key=lambda mv: (mv.box.y, mv.box.x, mv.kind))
    return out


def psi_sign(parity: Parity, i: int, side: str, kind: str) -> int:
    """Subscript sign of the psi factor attached to a movable box of color i."""
    if side == "row":
        return -parity.s(i + 1) if kind == CONVEX else parity.s(i)
    return -parity.s(i) if kind == CONVEX else parity.s(i + 1)


def degree(state: FockState) -> tuple[int, ...]:
    """Per-color box counts relative to the family vacuum (Z^N for wedges)."""
    fam = state.family
    par, i = fam.parity, fam.node
    N = par.N
    vec = [0] * N

    def walk(start: int, count: int, step: int, sgn: int = 1) -> None:
        c = start
        for _ in range(count):
            vec[c % N] += sgn
            c += step

    if fam.kind == "vwedge":
        for v in state.lam.parts:
            if v >= 0:
                walk(0, v + 1, +1)
            elif v <= -2:
                walk(v + 1, -v - 1, +1, sgn=-1)
        return tuple(vec)
    if fam.kind == "cwedge":
        for m in state.mu.parts:
            if m <= -1:
                walk(m, -m, +1)
            elif m >= 1:
                walk(0, m, +1, sgn=-1)
        return tuple(vec)

    if fam.kind == "vec":
        for v in state.nu.parts:
            walk(i + 1, v, +1)
    elif fam.kind == "cov":
        for v in state.nu.parts:
            walk(i - 1, v, -1)
    for v in state.lam.parts:
        walk(i, int(v), +1)
    for w in state.mu.parts:
        walk(i - 1, int(w), -1)
    return tuple(vec)


def add_moves(state: FockState, i: Optional[int] = None) -> list[tuple[FockState, BoxRef]]:
    """All admissible one-box additions, optionally restricted to color i."""
    return _moves(state, i, +1)


def remove_moves(state: FockState, i: Optional[int] = None) -> list[tuple[FockState, BoxRef]]:
    """All admissible one-box removals, optionally restricted to color i."""
    return _moves(state, i, -1)


def _moves(state: FockState, i: Optional[int], delta: int) -> list[tuple[FockState, BoxRef]]:
    fam = state.family
    par, node, r = fam.parity, fam.node, fam.r
    N = par.N
    if i is not None:
        i = i % N
    out: list[tuple[FockState, BoxRef]] = []

    def offer(target: FockState, box: BoxRef) -> None:
        if (i is None or box.color == i) and is_admissible(target):
            out.append((target, box))

    def try_bump(part: str, j: int) -> Optional[FockState]:
        try:
            kw = {part: getattr(state, part).bump(j, delta)}
            return FockState(fam, **{**{"lam": state.lam, "mu": state.mu,
                                        "nu": state.nu}, **kw})
        except ValueError:
            return None

    rshift = r if fam.kind in ("vec", "cov") else 0
    if fam.kind in _FOCK_KINDS:
        jmax = len(state.lam.parts) + (1 if delta > 0 else 0)
        for j in range(1, jmax + 1):
            tgt = try_bump("lam", j)
            if tgt is None:
                continue
            v = int(state.lam.get(j)) + (delta if delta > 0 else 0)
            T = rshift + j
            box = BoxRef("row", T, v, box_color(par, node, v + T - 2, T - 1),
                         v + T - 2, T - 1)
            offer(tgt, box)
        jmax = len(state.mu.parts) + (1 if delta > 0 else 0)
        for j in range(1, jmax + 1):
            tgt = try_bump("mu", j)
            if tgt is None:
                continue
            w = int(state.mu.get(j)) + (delta if delta > 0 else 0)
            J = rshift + j
            box = BoxRef("column", J, w, box_color(par, node, J - 1, w + J - 1),
                         J - 1, w + J - 1)
            offer(tgt, box)
        if fam.kind in ("vec", "cov"):
            for t in range(1, r + 1):
                tgt = try_bump("nu", t)
                if tgt is None:
                    continue
                v = int(state.nu.get(t)) + (delta if delta > 0 else 0)
                if fam.kind == "vec":
                    x, y = v + t - 1, t - 1
                    box = BoxRef("row", t, v + 1, box_color(par, node, x, y), x, y)
                else:
                    x, y = t - 1, v + t - 1
                    box = BoxRef("column", t, v, box_color(par, node, x, y), x, y)
                offer(tgt, box)
        return sorted(out, key=lambda mv: (mv[1].side, mv[1].index))

    part = "lam" if fam.kind == "vwedge" else "mu"
    for t in range(1, r + 1):
        tgt = try_bump(part, t)
        if tgt is None:
            continue
        v = int(getattr(state, part).get(t)) + (delta if delta > 0 else 0)
        if fam.kind == "vwedge":
            x, y = v + t - 1, t - 1
            box = BoxRef("row", t, v + 1, v % N, x, y)
        else:
            x, y = t - 1, v + t - 1
            box = BoxRef("column", t, v, (-v) % N, x, y)
        offer(tgt, box)
    return sorted(out, key=lambda mv: (mv[1].side, mv[1].index))


@lru_cache(maxsize=None)
def _partitions(n: int, max_part: Optional[int] = None) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    cap = n if max_part is None else min(max_part, n)
    acc = []
    for first in range(cap, 0, -1):
        for rest in _partitions(n - first, first):
            acc.append((first,) + rest)
    return tuple(acc)


def enumerate_states(family: FockFamily, max_boxes: int) -> Iterator[FockState]:
    """Admissible states with at most max_boxes boxes, graded lexicographic."""
    if family.kind in _WEDGE_KINDS:
        raise ValueError("wedge families have no box grading to enumerate by")
    r = family.r
    for total in range(max_boxes + 1):
        batch = []
        for c in range(total + 1) if family.kind != "pure" else (0,):
            nus = [np for np in _partitions(c) if len(np) <= r] if family.kind != "pure" else [()]
            for np_ in nus:
                nu = GenPartition.of(np_ + (0,) * (r - len(np_)))
                rest = total - c
                for a in range(rest + 1):
                    for lp in _partitions(a):
                        for mp in _partitions(rest - a):
                            st = FockState(family, GenPartition.of(lp),
                                           GenPartition.of(mp), nu)
                            if is_admissible(st):
                                batch.append(st)
        batch.sort(key=lambda st: (st.lam.parts, st.mu.parts, st.nu.parts))
        yield from batch


def graded_counts(family: FockFamily, max_boxes: int) -> list[int]:
    """Number of admissible states with exactly t boxes, t = 0..max_boxes."""
    counts = [0] * (max_boxes + 1)
    for st in enumerate_states(family, max_boxes):
        counts[st.boxes] += 1
    return counts


def _dig(c: int, color: bool) -> str:
    d = _DIGITS[c]
    if color:
        return f"\x1b[38;5;{31 + c % 6}m{d}\x1b[0m "
    return d + " "


def render_ascii(state: FockState, color: bool = False) -> str:
    """ASCII diagram with a machine-readable header; see parse_ascii."""
    fam = state.family
    par, N = fam.parity, fam.parity.N
    if N > len(_DIGITS):
        raise ValueError("too many colors to render with one digit each")
    header: dict = {"family": fam.to_json()}
    lines = []

    if fam.kind == "vwedge":
        vals = state.lam.parts
        w0 = min(v + t - 1 for t, v in enumerate(vals, start=1))
        header["window"] = w0
        for t, v in enumerate(vals, start=1):
            cells = ["~ "]
            for x in range(w0, v + t):
                cells.append(_dig((x - (t - 1)) % N, color))
            lines.append("".join(cells).rstrip())
    elif fam.kind == "cwedge":
        vals = state.mu.parts
        w0 = min(m + t - 1 for t, m in enumerate(vals, start=1))
        header["window"] = w0
        maxy = max(m + t - 1 for t, m in enumerate(vals, start=1))
        lines.append("".join("~ " for _ in vals).rstrip())
        for y in range(w0, maxy + 1):
            cells = []
            for t, m in enumerate(vals, start=1):
                if y <= m + t - 1:
                    cells.append(_dig(((t - 1) - y) % N, color))
                else:
                    cells.append("  ")
            lines.append("".join(cells).rstrip())
    else:
        if fam.kind != "pure":
            header["nu"] = state.nu.to_json()
        lam, mu = state.lam.parts, state.mu.parts
        node = fam.node
        ncols = len(mu)
        maxy = max([len(lam)] + [w + j + 1 for j, w in enumerate(mu)])
        for y in range(maxy):
            cells = []
            for x in range(y):
                if x < ncols and mu[x] >= y - x:
                    cells.append(_dig(box_color(par, node, x, y), color))
                else:
                    cells.append("  ")
            cells.append("| ")
            if y < len(lam) and not _is_inf(lam[y]):
                for x in range(y, y + int(lam[y])):
                    cells.append(_dig(box_color(par, node, x, y), color))
            lines.append("".join(cells).rstrip())

    return "\n".join(["# " + json.dumps(header, separators=(",", ":"))] + lines)


def _cells(segment: str, N: int) -> dict[int, int]:
    """Cell slot -> color for a run of 2-character cells."""
    out = {}
    for pos in range(0, len(segment), 2):
        ch = segment[pos]
        if ch == " ":
            continue
        if ch not in _DIGITS[:N]:
            raise ValueError(f"unexpected character {ch!r} in diagram")
        out[pos // 2] = _DIGITS.index(ch)
    return out


def parse_ascii(text: str) -> FockState:
    """Rebuild a state from render_ascii output (plain, uncolored form)."""
    lines = [ln.rstrip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# "):
        raise ValueError("missing header line")
    header = json.loads(lines[0][2:])
    fam = FockFamily.from_json(header["family"])
    N = fam.parity.N
    body = lines[1:]

    if fam.kind == "vwedge":
        w0 = header["window"]
        vals = []
        for t, ln in enumerate(body, start=1):
            digs = _cells(ln[2:], N)
            if not digs:
                raise ValueError(f"empty wedge row {t}")
            vals.append(w0 + max(digs) - (t - 1))
        st = FockState(fam, GenPartition.of(vals))
    elif fam.kind == "cwedge":
        w0 = header["window"]
        depth = [0] * fam.r
        for ln in body[1:]:
            for slot in _cells(ln, N):
                depth[slot] += 1
        vals = [w0 + depth[t - 1] - 1 - (t - 1) for t in range(1, fam.r + 1)]
        st = FockState(fam, mu=GenPartition.of(vals))
    else:
        lam: list[int] = []
        mu: dict[int, int] = {}
        for y, ln in enumerate(body):
            rail = ln.index("|")
            for slot, _ in _cells(ln[:rail], N).items():
                mu[slot] = max(mu.get(slot, 0), y - slot)
            row_len = len(_cells(ln[rail + 2:], N))
            if row_len:
                if len(lam) != y:
                    raise ValueError("row-side boxes must be contiguous from the top")
                lam.append(row_len)
        mu_parts = [mu.get(x, 0) for x in range(max(mu) + 1)] if mu else []
        nu = GenPartition.from_json(header.get("nu", []))
        st = FockState(fam, GenPartition.of(lam), GenPartition.of(mu_parts), nu)

    check = render_ascii(st)
    if [ln.rstrip() for ln in check.splitlines() if ln.strip()] != lines:
        raise ValueError("diagram does not round-trip; colors or shape corrupt")
    return st

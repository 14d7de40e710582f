"""Layered Fock states: the MacMahon modules and their boundary variants.

A MacMahon module at node i is realized on towers of Fock pairs
(lam^(t), mu^(t)) where layer t dominates layer t+1 in a colored order
and almost all layers equal a fixed far pair (gamma, epsilon).  A
horizontal boundary alpha glues alpha_t infinite rows into layer t on
both sides; the infinite rows never carry boxes, they only shift the
spectral parameter and stretch the domination bookkeeping.  States
correspond to solid stacks of colored boxes: cell (a, b) of layer t is
filled when b - a < lam^(t)_{a+1} (row side) or a - b <= mu^(t)_{b+1}
(column side), with color node + b - a.

Layer t carries the Fock structure of sign -s(node) at spectral
parameter u * q2^{s(node) * (t - len(alpha) - 1 - alpha_t)}.  K_i and
E_i acquire a boundary compensator at every node plus one f-factor in
the level K at the marked node; F_i is never renormalized.  All layer
products are certified by recomputing at two consecutive cutoffs and
raising when they disagree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from .parity_core import Parity
from .exact_math import (Monomial, ScalarExpr, SpectralFunction, PoleError,
                         monomial, qpow, ONE, f_factor)
from .spart_states import (GenPartition, FockFamily, FockState, INF, _is_inf,
                           pure_state, is_admissible, degree, enumerate_states,
                           add_moves, remove_moves)
from .fock_action import k_eigenvalue, box_rule_eigenvalue, ladder_coeffs

Pair = "tuple[GenPartition, GenPartition]"
Box = "tuple[int, int, int]"


# ---------------------------------------------------------------------------
# the layer order

def layer_dominates(parity: Parity, j: int, big, small) -> bool:
    """Whether the Fock pair big may sit directly below small at node j.

    Requires len(lam_small) <= min(len(lam_big), len(mu_big)) and
    len(mu_small) <= len(mu_big), then entrywise big >= small where
    equality of finite parts v is permitted only when the sign flips:
    s(j + v) = -s(j) on the row side, s(j - v) = -s(j) on the column
    side.  Infinite parts compare as inf >= inf for any parity.
    """
    s = parity.s
    la, ma = big[0].trimmed(), big[1].trimmed()
    lb, mb = small[0].trimmed(), small[1].trimmed()
    if len(lb.parts) > min(len(la.parts), len(ma.parts)):
        return False
    if len(mb.parts) > len(ma.parts):
        return False
    for side_a, side_b, sgn in ((la, lb, 1), (ma, mb, -1)):
        for t in range(1, len(side_b.parts) + 1):
            hi, lo = side_a.get(t), side_b.get(t)
            if _is_inf(lo):
                if not _is_inf(hi):
                    return False
            elif _is_inf(hi):
                continue
            elif hi < lo or (hi == lo and s(j + sgn * hi) != -s(j)):
                return False
    return True


def pair_color_counts(parity: Parity, j: int, pair) -> tuple[int, ...]:
    """Per-color box counts of a finite Fock pair placed at node j."""
    st = pure_state(parity, -parity.s(j), j, pair[0].parts, pair[1].parts)
    return degree(st)


def is_colorless_self_comparable(parity: Parity, j: int, pair) -> bool:
    """Whether the pair may serve as the far boundary of a node-j tower."""
    if not layer_dominates(parity, j, pair, pair):
        return False
    return len(set(pair_color_counts(parity, j, pair))) == 1


# ---------------------------------------------------------------------------
# states

def _as_gp(parts) -> GenPartition:
    if isinstance(parts, GenPartition):
        return parts
    return GenPartition.of(tuple(parts))


def _tail(p: GenPartition, c: int) -> GenPartition:
    return GenPartition.of(p.parts[c:]) if c else p


@dataclass(frozen=True)
class PlaneState:
    """A tower of Fock pairs over boundaries (gamma, epsilon) and alpha.

    layers[t-1] holds the finite parts of layer t; layers 1..len(alpha)
    additionally carry alpha_t infinite rows on both sides.  Deep layers
    equal to (gamma, epsilon) stay implicit.  forbidden lists 3d cells
    (a, b, c), c = layer - 1, that no state of the submodule may fill.
    """

    parity: Parity
    node: int = 0
    layers: tuple = ()
    gamma: GenPartition = GenPartition()
    epsilon: GenPartition = GenPartition()
    alpha: GenPartition = GenPartition()
    forbidden: frozenset = frozenset()

    def __post_init__(self) -> None:
        par = self.parity
        object.__setattr__(self, "node", self.node % par.N)
        g = _as_gp(self.gamma).trimmed()
        e = _as_gp(self.epsilon).trimmed()
        a = _as_gp(self.alpha).trimmed()
        for name, p in (("gamma", g), ("epsilon", e), ("alpha", a)):
            if any(_is_inf(v) or v < 0 for v in p.parts):
                raise ValueError(f"{name} must be a finite partition")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "epsilon", e)
        object.__setattr__(self, "alpha", a)
        raw = []
        for pair in self.layers:
            lam, mu = pair
            lam, mu = _as_gp(lam).trimmed(), _as_gp(mu).trimmed()
            if any(_is_inf(v) for v in lam.parts + mu.parts):
                raise ValueError("layer parts must be finite; "
                                 "infinite rows come from alpha")
            raw.append((lam, mu))
        k = len(a.parts)
        while len(raw) < k:
            c = int(a.get(len(raw) + 1))
            raw.append((_tail(g, c), _tail(e, c)))
        while len(raw) > k and raw[-1] == (g, e):
            raw.pop()
        object.__setattr__(self, "layers", tuple(raw))
        fb = set()
        for box in self.forbidden:
            x, y, z = box
            if x < 0 or y < 0 or z < 0:
                raise ValueError(f"forbidden cell {box} out of the octant")
            fb.add((int(x), int(y), int(z)))
        object.__setattr__(self, "forbidden", frozenset(fb))

    def __str__(self) -> str:
        body = " >= ".join(f"({l}, {m})" for l, m in self.layers) or "vacuum"
        tags = []
        if self.gamma.parts or self.epsilon.parts:
            tags.append(f"gamma={self.gamma} epsilon={self.epsilon}")
        if self.alpha.parts:
            tags.append(f"alpha={self.alpha}")
        tail = f" [{', '.join(tags)}]" if tags else ""
        return f"M_{self.node}: {body}{tail}"


def vacuum_pair(state: PlaneState, t: int) -> tuple[GenPartition, GenPartition]:
    """Finite parts of layer t in the minimal state over the boundary."""
    c = int(state.alpha.get(t))
    return (_tail(state.gamma, c), _tail(state.epsilon, c))


def layer_pair(state: PlaneState, t: int) -> tuple[GenPartition, GenPartition]:
    """Finite parts of layer t >= 1, implicit layers included."""
    if 1 <= t <= len(state.layers):
        return state.layers[t - 1]
    return vacuum_pair(state, t)


def generalized_pair(state: PlaneState, t: int) -> tuple[GenPartition, GenPartition]:
    """Layer t with its alpha_t infinite rows made explicit."""
    lam, mu = layer_pair(state, t)
    c = int(state.alpha.get(t))
    if not c:
        return (lam, mu)
    pre = (INF,) * c
    return (GenPartition.of(pre + lam.parts), GenPartition.of(pre + mu.parts))


def shift_exponent(state: PlaneState, t: int) -> int:
    """e_t with layer t at spectral parameter u * q2^{e_t}."""
    return state.parity.s(state.node) * (t - 1 - int(state.alpha.get(t)))


def _fock_layer(state: PlaneState, t: int) -> FockState:
    par = state.parity
    lam, mu = layer_pair(state, t)
    return pure_state(par, -par.s(state.node), state.node, lam.parts, mu.parts)


def contains_box(state: PlaneState, box) -> bool:
    """Whether 3d cell (a, b, c), c = layer - 1, is filled."""
    a, b, c = box
    if a < 0 or b < 0 or c < 0:
        return False
    t = c + 1
    inf = int(state.alpha.get(t))
    lam, mu = layer_pair(state, t)
    if b >= a:
        v = INF if a < inf else lam.get(a - inf + 1)
        return b - a < v
    w = INF if b < inf else mu.get(b - inf + 1)
    return a - b <= w


# ---------------------------------------------------------------------------
# validity

def boundary_error(parity: Parity, node: int, gamma: GenPartition,
                   epsilon: GenPartition, alpha: GenPartition,
                   forbidden: frozenset = frozenset()) -> Optional[str]:
    """None when the boundary data define a module, else the obstruction."""
    j = node % parity.N
    if not is_admissible(pure_state(parity, -parity.s(j), j,
                                    gamma.parts, epsilon.parts)):
        return "gamma/epsilon is not an admissible Fock pair at this node"
    if not layer_dominates(parity, j, (gamma, epsilon), (gamma, epsilon)):
        return "gamma/epsilon cannot repeat: a part has the stacking sign"
    if len(set(pair_color_counts(parity, j, (gamma, epsilon)))) != 1:
        return "gamma/epsilon has unequal per-color box counts"
    vac = PlaneState(parity, j, (), gamma, epsilon, alpha, frozenset())
    for t in range(1, len(alpha.parts) + 1):
        if not is_admissible(_fock_layer(vac, t)):
            return f"vacuum layer {t} is not an admissible Fock pair"
        if not layer_dominates(parity, j, generalized_pair(vac, t),
                               generalized_pair(vac, t + 1)):
            return f"vacuum layer {t} does not dominate layer {t + 1}"
    for box in forbidden:
        if contains_box(vac, box):
            return f"forbidden cell {box} sits inside the vacuum"
    return None


def plane_error(state: PlaneState) -> Optional[str]:
    """None for a basis state of the module, else the first failure."""
    err = boundary_error(state.parity, state.node, state.gamma,
                         state.epsilon, state.alpha, state.forbidden)
    if err is not None:
        return err
    for t in range(1, len(state.layers) + 1):
        if not is_admissible(_fock_layer(state, t)):
            return f"layer {t} is not an admissible Fock pair"
        if not layer_dominates(state.parity, state.node,
                               generalized_pair(state, t),
                               generalized_pair(state, t + 1)):
            return f"layer {t} does not dominate layer {t + 1}"
    for box in state.forbidden:
        if contains_box(state, box):
            return f"forbidden cell {box} is filled"
    return None


def is_valid_plane(state: PlaneState) -> bool:
    return plane_error(state) is None


def assert_valid_plane(state: PlaneState) -> None:
    err = plane_error(state)
    if err is not None:
        raise ValueError(f"{err}: {state}")


def boundary_vacuum(parity: Parity, node: int = 0, gamma: Iterable = (),
                    epsilon: Iterable = (), alpha: Iterable = (),
                    forbidden: Iterable = ()) -> PlaneState:
    """The unique minimal state over the boundary; every state contains it."""
    st = PlaneState(parity, node, (), _as_gp(gamma), _as_gp(epsilon),
                    _as_gp(alpha), frozenset(tuple(b) for b in forbidden))
    err = boundary_error(parity, st.node, st.gamma, st.epsilon,
                         st.alpha, st.forbidden)
    if err is not None:
        raise ValueError(err)
    return st


# ---------------------------------------------------------------------------
# degree

def plane_degree_vector(state: PlaneState) -> tuple[int, ...]:
    """Per-color box counts relative to the boundary vacuum."""
    par, j = state.parity, state.node
    tot = [0] * par.N
    for t in range(1, len(state.layers) + 1):
        cur = pair_color_counts(par, j, layer_pair(state, t))
        ref = pair_color_counts(par, j, vacuum_pair(state, t))
        for c in range(par.N):
            tot[c] += cur[c] - ref[c]
    return tuple(tot)


def plane_degree(state: PlaneState) -> int:
    return sum(plane_degree_vector(state))


def _pair_size(pair) -> int:
    return pair[0].size + pair[1].size


# ---------------------------------------------------------------------------
# enumeration

def _contains_entrywise(big, small) -> bool:
    for a, b in ((big[0], small[0]), (big[1], small[1])):
        if any(a.get(t) < b.get(t) for t in range(1, len(b.parts) + 1)):
            return False
    return True


def _pair_key(pair) -> tuple:
    return (pair[0].parts, pair[1].parts)


def enumerate_plane(parity: Parity, node: int, max_boxes: int,
                    gamma: Iterable = (), epsilon: Iterable = (),
                    alpha: Iterable = (), forbidden: Iterable = ()) -> list[PlaneState]:
    """All basis states with at most max_boxes boxes over the vacuum.

    Layers are chosen top down: first the finite tower above the far
    boundary, then the alpha region, pruned by the remaining box budget.
    The result is sorted by (degree, layer parts) and is deterministic.
    """
    vac = boundary_vacuum(parity, node, gamma, epsilon, alpha, forbidden)
    par, j, k = parity, vac.node, len(vac.alpha.parts)
    g, e = vac.gamma, vac.epsilon
    fam = FockFamily("pure", par, node=j, sign=-par.s(j))
    vac_size = _pair_size((g, e))
    pool = [(st.lam, st.mu) for st in enumerate_states(fam, vac_size + max_boxes)]

    m_cands = sorted(
        ((_pair_size(p) - vac_size, p) for p in pool
         if 1 <= _pair_size(p) - vac_size <= max_boxes
         and _contains_entrywise(p, (g, e))),
        key=lambda it: (it[0], _pair_key(it[1])))

    stacks: list[tuple[tuple, int]] = []

    def grow(stack: tuple, used: int) -> None:
        stacks.append((stack, used))
        below = stack[0] if stack else (g, e)
        for extra, p in m_cands:
            if used + extra > max_boxes:
                break
            if layer_dominates(par, j, p, below):
                grow((p,) + stack, used + extra)

    grow((), 0)

    a_cands: dict[int, list] = {}
    for t in range(1, k + 1):
        vp = vacuum_pair(vac, t)
        vp_size = _pair_size(vp)
        a_cands[t] = sorted(
            ((_pair_size(p) - vp_size, p) for p in pool
             if 0 <= _pair_size(p) - vp_size <= max_boxes
             and _contains_entrywise(p, vp)),
            key=lambda it: (it[0], _pair_key(it[1])))

    def widen(pair, t: int):
        c = int(vac.alpha.get(t))
        if not c:
            return pair
        pre = (INF,) * c
        return (GenPartition.of(pre + pair[0].parts),
                GenPartition.of(pre + pair[1].parts))

    out: list[PlaneState] = []

    def fill_alpha(t: int, above, prefix: tuple, used: int) -> None:
        if t == 0:
            st = PlaneState(par, j, prefix, g, e, vac.alpha, vac.forbidden)
            if all(not contains_box(st, b) for b in st.forbidden):
                out.append(st)
            return
        for extra, p in a_cands[t]:
            if used + extra > max_boxes:
                break
            gen = widen(p, t)
            if layer_dominates(par, j, gen, above):
                fill_alpha(t - 1, gen, (p,) + prefix, used + extra)

    for stack, used in stacks:
        fill_alpha(k, stack[0] if stack else (g, e), stack, used)

    out.sort(key=lambda st: (plane_degree(st),
                             tuple(_pair_key(p) for p in st.layers)))
    return out


def graded_plane_counts(parity: Parity, node: int, max_boxes: int,
                        gamma: Iterable = (), epsilon: Iterable = (),
                        alpha: Iterable = (), forbidden: Iterable = ()) -> list[int]:
    """Number of basis states with 0..max_boxes boxes over the vacuum."""
    counts = [0] * (max_boxes + 1)
    for st in enumerate_plane(parity, node, max_boxes, gamma, epsilon,
                              alpha, forbidden):
        counts[plane_degree(st)] += 1
    return counts


# ---------------------------------------------------------------------------
# the stacking rules, cell level

def vertical_rule_check(state: PlaneState) -> bool:
    """Gravity plus the stacking parity rules, checked on the solid.

    Equivalent to the chain of layer dominations: every box must rest on
    a box, a box may not sit exactly on the end of an equal row/column
    whose sign matches s(node), and a diagonal box with no column of its
    own needs a column below it.
    """
    par, j = state.parity, state.node
    s = par.s
    for t in range(1, len(state.layers) + 1):
        lam, mu = generalized_pair(state, t + 1)
        lam, mu = lam.trimmed(), mu.trimmed()
        for r in range(1, len(lam.parts) + 1):
            v = lam.get(r)
            if _is_inf(v):
                continue
            a = r - 1
            if not contains_box(state, (a, a + v - 1, t - 1)):
                return False
            if not contains_box(state, (a, a + v, t - 1)) and s(j + v) == s(j):
                return False
        for c in range(1, len(mu.parts) + 1):
            w = mu.get(c)
            if _is_inf(w):
                continue
            b = c - 1
            if not contains_box(state, (b + w, b, t - 1)):
                return False
            if not contains_box(state, (b + w + 1, b, t - 1)) and s(j - w) == s(j):
                return False
        below_mu = generalized_pair(state, t)[1]
        for r in range(len(mu.parts) + 1, len(lam.parts) + 1):
            # diagonal boxes without a column of their own
            under = below_mu.get(r)
            if not _is_inf(under) and under < 1:
                return False
    return True


# ---------------------------------------------------------------------------
# eigenvalues

def _q1_half(b: int) -> Monomial:
    return monomial(q=Fraction(-b, 2), d=Fraction(b, 2))


def _q3_half(b: int) -> Monomial:
    return monomial(q=Fraction(-b, 2), d=Fraction(-b, 2))


def _corner_linear(p: int, a: Monomial) -> SpectralFunction:
    """(q^p a - q^{-p} a^{-1} x) as a canonical spectral factor."""
    pre = qpow(p) * a
    return SpectralFunction.build(pre, [(pre ** -2, 1)])


def boundary_factor(parity: Parity, node: int, gamma: GenPartition,
                    epsilon: GenPartition, i: int, cutoff: int) -> SpectralFunction:
    """Compensator for a (gamma, epsilon) far boundary at depth cutoff.

    One linear factor per boundary corner: row ends and column ends of
    (gamma, epsilon) contribute to the numerator at their own color,
    the concave corners to the denominator one color over.  epsilon is
    padded with zeros to len(gamma); zero parts do contribute.  The
    q-powers carry the sign -s(node), matching the direction the layer
    tower runs in.
    """
    par, N = parity, parity.N
    j = node % N
    sg = -par.s(j)

    def bar(x: int) -> int:
        return par.bar(j + x) - par.bar(j)

    out = SpectralFunction.one()
    for t in range(1, len(gamma.parts) + 1):
        gv = int(gamma.get(t))
        ev = int(epsilon.get(t))
        if (i - (j + gv - 1)) % N == 0:
            out = out * _corner_linear(sg * (cutoff - t), _q1_half(bar(gv - 1)))
        if (i - (j - ev)) % N == 0:
            out = out * _corner_linear(sg * (cutoff - t), _q3_half(-bar(-ev)))
        if (i - (j + gv)) % N == 0:
            out = out / _corner_linear(sg * (cutoff - t + 1), _q1_half(bar(gv)))
        if (i - (j - ev - 1)) % N == 0:
            out = out / _corner_linear(sg * (cutoff - t + 1), _q3_half(-bar(-ev - 1)))
    return out


def _global_renorm(state: PlaneState, i: int, m_cut: int) -> SpectralFunction:
    """Renormalization of K_i and E_i when m_cut far layers are materialized.

    The compensator depth counts all layers, the alpha region included.
    """
    par, j = state.parity, state.node
    depth = len(state.alpha.parts) + m_cut
    out = boundary_factor(par, j, state.gamma, state.epsilon, i, depth)
    if (i - j) % par.N == 0:
        out = out * f_factor(-par.s(j) * (depth - len(state.gamma.parts)), ONE)
    return out


def _plane_k_product(state: PlaneState, i: int, m_cut: int,
                     engine: str) -> SpectralFunction:
    fn = k_eigenvalue if engine == "tensor" else box_rule_eigenvalue
    out = _global_renorm(state, i, m_cut)
    for t in range(1, len(state.alpha.parts) + m_cut + 1):
        val = fn(_fock_layer(state, t), i)
        out = out * val.substitute_x_scale(qpow(2 * shift_exponent(state, t)))
    return out


def macmahon_k_eigenvalue(state: PlaneState, i: int,
                          engine: str = "tensor") -> SpectralFunction:
    """Stabilized K_i eigenvalue of a layered state, in x = u/z.

    engine="tensor" multiplies the layer eigenvalues slot by slot;
    engine="boxes" rebuilds each layer from its movable boxes.  Both are
    certified by recomputing with one more far layer.
    """
    if engine not in ("tensor", "boxes"):
        raise ValueError("engine must be 'tensor' or 'boxes'")
    assert_valid_plane(state)
    m_expl = max(0, len(state.layers) - len(state.alpha.parts))
    base = m_expl + len(state.gamma.parts) + 3
    val = _plane_k_product(state, i, base, engine)
    if val != _plane_k_product(state, i, base + 1, engine):
        raise ValueError(f"unstable product for K_{i} at cutoff {base}")
    return val


def plane_eigenvalue_table(state: PlaneState,
                           engine: str = "tensor") -> dict[int, SpectralFunction]:
    """K_i eigenvalue for every node."""
    return {i: macmahon_k_eigenvalue(state, i, engine)
            for i in range(state.parity.N)}


# ---------------------------------------------------------------------------
# ladder action

def _layer_parity(par: Parity, j: int, pair) -> int:
    """Z_2 parity of a layer: sum of slot bits, stable under padding."""
    lam, mu = pair
    n = max(len(lam.parts), len(mu.parts))
    tot = 0
    for t in range(1, n + 1):
        tot += (1 - par.s(j + lam.get(t))) // 2
        tot += (1 - par.s(j - mu.get(t))) // 2
    return tot % 2


@dataclass(frozen=True)
class PlaneCoeff:
    """One nonzero entry of E_i(z) or F_i(z) on a layered state."""

    box: tuple[int, int, int]
    support: Monomial
    scalar: ScalarExpr
    target: PlaneState
    layer: int
    side: str
    row: int

    def to_json(self) -> dict:
        return {"box": list(self.box),
                "support": self.support.to_json(),
                "scalar": {"pre": self.scalar.pre.to_json(),
                           "factors": [[m.to_json(), e]
                                       for m, e in self.scalar.factors]},
                "target": plane_to_json(self.target)}


def _plane_coeffs_at(state: PlaneState, i: int, gen: str,
                     m_cut: int) -> dict[tuple, tuple[Monomial, ScalarExpr]]:
    par, j = state.parity, state.node
    total = len(state.alpha.parts) + m_cut
    locals_ = [_fock_layer(state, t) for t in range(1, total + 1)]
    shifts = [qpow(2 * shift_exponent(state, t)) for t in range(1, total + 1)]
    eig = [k_eigenvalue(locals_[t], i).substitute_x_scale(shifts[t])
           for t in range(total)]
    bits = [_layer_parity(par, j, layer_pair(state, t))
            for t in range(1, total + 1)]
    node_par = par.node_parity(i)
    out: dict[tuple, tuple[Monomial, ScalarExpr]] = {}
    for t in range(1, total + 1):
        for mc in ladder_coeffs(locals_[t - 1], i, gen):
            support = mc.support * shifts[t - 1]
            if gen == "F":
                prod = SpectralFunction.one()
                for t2 in range(t - 1):
                    prod = prod * eig[t2]
            else:
                prod = _global_renorm(state, i, m_cut)
                for t2 in range(t, total):
                    prod = prod * eig[t2]
            try:
                outer = prod.evaluate_at_support(support)
            except PoleError as exc:
                raise ValueError(
                    f"ill-defined action of {gen}_{i} at layer {t}: {exc}") from exc
            koszul = -1 if node_par and sum(bits[:t - 1]) % 2 else 1
            scalar = (outer * mc.scalar).scaled(monomial(koszul))
            if not scalar.is_zero:
                out[(t, mc.side, mc.row)] = (support, scalar)
    return out


def _bump_layer(state: PlaneState, t: int, side: str, row: int,
                delta: int) -> tuple[PlaneState, tuple[int, int, int]]:
    layers = list(state.layers)
    while len(layers) < t:
        layers.append(vacuum_pair(state, len(layers) + 1))
    lam, mu = layers[t - 1]
    inf = int(state.alpha.get(t))
    if side == "lam":
        old = int(lam.get(row))
        v = max(old, old + delta)
        box = (row - 1 + inf, row - 2 + v + inf, t - 1)
        lam = lam.bump(row, delta)
    else:
        old = int(mu.get(row))
        w = max(old, old + delta)
        box = (row - 1 + w + inf, row - 1 + inf, t - 1)
        mu = mu.bump(row, delta)
    layers[t - 1] = (lam, mu)
    return (PlaneState(state.parity, state.node, tuple(layers), state.gamma,
                       state.epsilon, state.alpha, state.forbidden), box)


def plane_ladder_coeffs(state: PlaneState, i: int, gen: str) -> list[PlaneCoeff]:
    """All nonzero matrix coefficients of E_i(z) or F_i(z) on a state.

    Layer-local Fock coefficients are dressed by the K eigenvalues of
    the other layers at the support (layers before for F, after plus the
    global renormalization for E) and the layer Koszul sign.  Certified
    at two consecutive far cutoffs; coefficients leaving the module
    raise instead of being dropped.

    Adding one of the state's forbidden cells is the exception: the
    quotient by the span of configurations containing that cell kills
    the coefficient, so the move is dropped.
    """
    if gen not in ("E", "F"):
        raise ValueError("gen must be 'E' or 'F'")
    assert_valid_plane(state)
    m_expl = max(0, len(state.layers) - len(state.alpha.parts))
    base = m_expl + len(state.gamma.parts) + 3
    found = _plane_coeffs_at(state, i, gen, base)
    if found != _plane_coeffs_at(state, i, gen, base + 1):
        raise ValueError(f"unstable product for {gen}_{i} at cutoff {base}")
    delta = 1 if gen == "F" else -1
    out = []
    for (t, side, row), (support, scalar) in sorted(found.items()):
        try:
            target, box = _bump_layer(state, t, side, row, delta)
        except ValueError as exc:
            raise ValueError(f"ill-defined action: nonzero coefficient to "
                             f"invalid shape layer {t} {side}[{row}]") from exc
        if gen == "F" and box in state.forbidden:
            continue
        err = plane_error(target)
        if err is not None:
            raise ValueError(f"ill-defined action: {err}")
        out.append(PlaneCoeff(box, support, scalar, target, t, side, row))
    return out


def add_plane_moves(state: PlaneState,
                    i: Optional[int] = None) -> list[tuple[PlaneState, tuple]]:
    """All chain-valid one-box additions, optionally restricted to color i."""
    return _plane_moves(state, i, +1)


def remove_plane_moves(state: PlaneState,
                       i: Optional[int] = None) -> list[tuple[PlaneState, tuple]]:
    """All chain-valid one-box removals, optionally restricted to color i."""
    return _plane_moves(state, i, -1)


def _plane_moves(state: PlaneState, i: Optional[int],
                 delta: int) -> list[tuple[PlaneState, tuple]]:
    assert_valid_plane(state)
    top = len(state.layers) + (1 if delta > 0 else 0)
    out = []
    fn = add_moves if delta > 0 else remove_moves
    for t in range(1, top + 1):
        for _, box in fn(_fock_layer(state, t), i):
            side = "lam" if box.side == "row" else "mu"
            try:
                cand, cell = _bump_layer(state, t, side, box.index, delta)
            except ValueError:
                continue
            if is_valid_plane(cand):
                out.append((cand, cell))
    out.sort(key=lambda it: it[1])
    return out


# ---------------------------------------------------------------------------
# tableaux

@dataclass(frozen=True)
class SuperTableau:
    """Columns of positive entries, read top to bottom.

    Validity is parity driven: along a row equal adjacent entries v need
    s(v) = +1, down a column they need s(v) = -1, against the parity the
    tableau is read with.
    """

    columns: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self) -> None:
        cols = tuple(tuple(int(v) for v in col) for col in self.columns)
        while cols and not cols[-1]:
            cols = cols[:-1]
        object.__setattr__(self, "columns", cols)

    def height(self, t: int) -> int:
        return len(self.columns[t - 1]) if 1 <= t <= len(self.columns) else 0

    def entry(self, r: int, t: int) -> int:
        return self.columns[t - 1][r - 1]

    def __str__(self) -> str:
        rows = max((len(c) for c in self.columns), default=0)
        lines = []
        for r in range(rows):
            lines.append(" ".join(f"{c[r]:2d}" if r < len(c) else "  "
                                  for c in self.columns))
        return "\n".join(lines)


def tableau_error(par: Parity, tab: SuperTableau) -> Optional[str]:
    """None for a valid super tableau read with parity par."""
    s = par.s
    cols = tab.columns
    for t, col in enumerate(cols, start=1):
        if any(v < 1 for v in col):
            return f"column {t} has a non-positive entry"
        if t < len(cols) and len(cols[t]) > len(col):
            return f"column {t + 1} is taller than column {t}"
        for r in range(1, len(col)):
            a, b = col[r - 1], col[r]
            if b > a or (b == a and s(a) != -1):
                return f"column {t} fails at rows {r},{r + 1}"
        if t < len(cols):
            nxt = cols[t]
            for r in range(len(nxt)):
                a, b = col[r], nxt[r]
                if b > a or (b == a and s(a) != 1):
                    return f"row {r + 1} fails at columns {t},{t + 1}"
    return None


def tableau_pair_error(par: Parity, first: SuperTableau,
                       second: SuperTableau) -> Optional[str]:
    """None when (first, second) encodes a node-0 tower of Fock pairs."""
    if par.s(0) != -1:
        return "tableau encoding needs s(0) = -1"
    err = tableau_error(par, first)
    if err is not None:
        return f"first tableau: {err}"
    err = tableau_error(par.tableau_parity(), second)
    if err is not None:
        return f"second tableau: {err}"
    if any(v < 2 for col in second.columns for v in col):
        return "second tableau has an entry below 2"
    width = max(len(first.columns), len(second.columns))
    for t in range(1, width + 1):
        if first.height(t) < second.height(t):
            return f"column {t} of the second tableau is too tall"
        if first.height(t + 1) > second.height(t):
            return f"column {t + 1} of the first tableau is too tall"
    return None


def to_tableaux(state: PlaneState) -> tuple[SuperTableau, SuperTableau]:
    """Encode a pure node-0 tower as a pair of super tableaux.

    Column t of the first tableau is lam^(t); column t of the second is
    mu^(t) + 1 entrywise, so its height is exactly len(mu^(t)).
    """
    if state.node % state.parity.N != 0:
        raise ValueError("tableau encoding is defined at node 0")
    if state.gamma.parts or state.epsilon.parts or state.alpha.parts:
        raise ValueError("tableau encoding needs an empty boundary")
    if state.parity.s(0) != -1:
        raise ValueError("tableau encoding needs s(0) = -1")
    assert_valid_plane(state)
    first = SuperTableau(tuple(tuple(int(v) for v in lam.parts)
                               for lam, _ in state.layers))
    second = SuperTableau(tuple(tuple(int(w) + 1 for w in mu.parts)
                                for _, mu in state.layers))
    return first, second


def from_tableaux(par: Parity, first: SuperTableau,
                  second: SuperTableau) -> PlaneState:
    """Decode a tableau pair back into a node-0 tower."""
    err = tableau_pair_error(par, first, second)
    if err is not None:
        raise ValueError(err)
    width = max(len(first.columns), len(second.columns))
    layers = []
    for t in range(1, width + 1):
        lam = first.columns[t - 1] if t <= len(first.columns) else ()
        mu = tuple(v - 1 for v in (second.columns[t - 1]
                                   if t <= len(second.columns) else ()))
        layers.append((GenPartition.of(lam), GenPartition.of(mu)))
    st = PlaneState(par, 0, tuple(layers))
    assert_valid_plane(st)
    return st


def tableau_degree_vector(par: Parity, first: SuperTableau,
                          second: SuperTableau) -> tuple[int, ...]:
    """Per-color weight: entry a contributes z_0..z_{a-1} in the first
    tableau and z_{-1}..z_{-(a-1)} in the second."""
    N = par.N
    out = [0] * N
    for col in first.columns:
        for v in col:
            for c in range(v):
                out[c % N] += 1
    for col in second.columns:
        for v in col:
            for c in range(1, v):
                out[-c % N] += 1
    return tuple(out)


# ---------------------------------------------------------------------------
# serialization

def plane_to_json(state: PlaneState) -> dict:
    return {"node": state.node,
            "layers": [[lam.to_json(), mu.to_json()]
                       for lam, mu in state.layers],
            "gamma": state.gamma.to_json(),
            "epsilon": state.epsilon.to_json(),
            "alpha": state.alpha.to_json(),
            "forbidden": sorted(list(b) for b in state.forbidden)}


def plane_from_json(parity: Parity, data: dict) -> PlaneState:
    gp = GenPartition.from_json
    return PlaneState(parity, data.get("node", 0),
                      tuple((gp(l), gp(m)) for l, m in data.get("layers", ())),
                      gp(data.get("gamma", ())), gp(data.get("epsilon", ())),
                      gp(data.get("alpha", ())),
                      frozenset(tuple(b) for b in data.get("forbidden", ())))


def render_plane(state: PlaneState) -> str:
    """One line per layer, bottom first, infinite rows marked."""
    lines = [str(state)]
    for t in range(1, len(state.layers) + 1):
        lam, mu = layer_pair(state, t)
        inf = int(state.alpha.get(t))
        mark = f" +inf^{inf}" if inf else ""
        lines.append(f"  layer {t}{mark}: ({lam}, {mu})")
    return "\n".join(lines)

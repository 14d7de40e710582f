"""Stabilized semi-infinite tensor engine for all module families.

Every module here is built from two local pieces: the vector factor [u]_j
and the covector factor [u]^j, each with a three-case K eigenvalue and a
one-step E/F transition.  A state materializes a finite prefix of factors
(vector/covector slots); the infinite tail acts through a renormalizing
psi factor at the marked node.  Computing at cutoff k and re-checking at
k+1 turns the limit construction into a finite certified computation: any
mismatch raises instead of silently returning garbage.

Matrix coefficients come from the coproduct: F acting in slot t picks up
the K^+ eigenvalues of the slots before t, E the K^- eigenvalues of the
slots after t (tail included via the renormalization), evaluated at the
transition's delta support, together with the local sign and the Koszul
sign from the parities of the factors crossed.  Coefficients to invalid
shapes vanish on their own through psi(q2) = 0; we drop exact zeros and
assert the surviving targets are admissible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .exact_math import (
    ONE, Monomial, PoleError, Q1, Q3, ScalarExpr, SpectralFunction,
    monomial, psi, qpow,
)
from .parity_core import Parity
from .spart_states import (
    FockState, GenPartition, is_admissible, movable_boxes, psi_sign,
)

VECTOR = "vector"
COVECTOR = "covector"


@dataclass(frozen=True)
class LocalFactor:
    """One tensor slot: [shift*u]_index (vector) or [shift*u]^index (covector)."""

    kind: str
    index: int
    shift: Monomial = ONE

    def parity_bit(self, par: Parity) -> int:
        s = par.s(self.index + 1) if self.kind == VECTOR else par.s(self.index)
        return (1 - s) // 2


@dataclass(frozen=True)
class LadderStep:
    new: LocalFactor
    support: Monomial
    sign: int


@dataclass(frozen=True)
class MatrixCoeff:
    """One nonzero entry of E_i(z) or F_i(z): scalar * delta(support*u/z) |target>."""

    support: Monomial
    scalar: ScalarExpr
    target: FockState
    side: str
    row: int

    def to_json(self) -> dict:
        return {"box": {"side": self.side, "row": self.row},
                "support": self.support.to_json(),
                "scalar": {"pre": self.scalar.pre.to_json(),
                           "factors": [[m.to_json(), e]
                                       for m, e in self.scalar.factors]},
                "target": self.target.to_json()}


def local_eigenvalue(f: LocalFactor, par: Parity, i: int) -> SpectralFunction:
    """K_i eigenvalue of a single slot, shift folded into the argument."""
    j, N = f.index, par.N
    if f.kind == VECTOR:
        if (i - j) % N == 0:
            return psi(-par.s(j + 1), Q1 ** (-par.bar(j)) * f.shift)
        if (i - j - 1) % N == 0:
            return psi(par.s(j + 1), Q1 ** (-par.bar(j + 1)) * f.shift)
    else:
        if (i - j) % N == 0:
            return psi(-par.s(j), Q3 ** par.bar(j) * f.shift)
        if (i - j + 1) % N == 0:
            return psi(par.s(j), Q3 ** par.bar(j - 1) * f.shift)
    return SpectralFunction.one()


def local_ladder(f: LocalFactor, par: Parity, i: int, gen: str) -> Optional[LadderStep]:
    """The unique color-i transition of a slot under E or F, if any."""
    j, N = f.index, par.N
    if f.kind == VECTOR:
        if gen == "E" and (i - j) % N == 0:
            return LadderStep(LocalFactor(VECTOR, j - 1, f.shift),
                              Q1 ** (-par.bar(j)) * f.shift, 1)
        if gen == "F" and (i - j - 1) % N == 0:
            return LadderStep(LocalFactor(VECTOR, j + 1, f.shift),
                              Q1 ** (-par.bar(j + 1)) * f.shift, par.s(j + 1))
    else:
        if gen == "E" and (i - j) % N == 0:
            return LadderStep(LocalFactor(COVECTOR, j + 1, f.shift),
                              Q3 ** par.bar(j) * f.shift, 1)
        if gen == "F" and (i - j + 1) % N == 0:
            return LadderStep(LocalFactor(COVECTOR, j - 1, f.shift),
                              Q3 ** par.bar(j - 1) * f.shift, par.s(j))
    return None


def _slots(state: FockState, pairs: int) -> list[tuple[LocalFactor, tuple[str, int]]]:
    """Materialized prefix of tensor slots, tagged by the part they track.

    Pure families produce vector/covector pairs j = 1..pairs; vec/cov
    families prepend their r prefix slots and shift the zone parameter by
    q2^{sigma*r}.  Wedge families are finite: pairs is ignored.
    """
    fam = state.family
    par, i, sg = fam.parity, fam.node, fam.direction
    out: list[tuple[LocalFactor, tuple[str, int]]] = []
    if fam.kind == "vwedge":
        for t in range(1, len(state.lam.parts) + 1):
            out.append((LocalFactor(VECTOR, state.lam.parts[t - 1],
                                    qpow(2 * sg * (t - 1))), ("lam", t)))
        return out
    if fam.kind == "cwedge":
        for t in range(1, len(state.mu.parts) + 1):
            out.append((LocalFactor(COVECTOR, -state.mu.parts[t - 1],
                                    qpow(2 * sg * (t - 1))), ("mu", t)))
        return out
    zone_base = 0
    if fam.kind == "vec":
        for t in range(1, fam.r + 1):
            out.append((LocalFactor(VECTOR, state.nu.get(t) + i,
                                    Q1 ** par.bar(i) * qpow(2 * sg * (t - 1))),
                        ("nu", t)))
        zone_base = fam.r
    elif fam.kind == "cov":
        for t in range(1, fam.r + 1):
            out.append((LocalFactor(COVECTOR, i - state.nu.get(t),
                                    Q3 ** (-par.bar(i)) * qpow(2 * sg * (t - 1))),
                        ("nu", t)))
        zone_base = fam.r
    for j in range(1, pairs + 1):
        tw = qpow(2 * sg * (zone_base + j - 1))
        out.append((LocalFactor(VECTOR, state.lam.get(j) + i - 1,
                                Q1 ** par.bar(i) * tw), ("lam", j)))
        out.append((LocalFactor(COVECTOR, i - state.mu.get(j),
                                Q3 ** (-par.bar(i)) * tw), ("mu", j)))
    return out


def _renorm(state: FockState, i: int, pairs: int) -> SpectralFunction:
    """Tail renormalization psi_sigma(q2^{sigma k} u/z) at the marked node."""
    fam = state.family
    if fam.kind in ("vwedge", "cwedge") or (i - fam.node) % fam.parity.N != 0:
        return SpectralFunction.one()
    sg = fam.direction
    k = pairs + (fam.r if fam.kind in ("vec", "cov") else 0)
    return psi(sg, qpow(2 * sg * k))


def _cutoff(state: FockState) -> int:
    return len(state.lam.trimmed().parts) + 3


def _k_product(state: FockState, i: int, pairs: int) -> SpectralFunction:
    par = state.family.parity
    f = _renorm(state, i, pairs)
    for slot, _ in _slots(state, pairs):
        f = f * local_eigenvalue(slot, par, i)
    return f


def k_eigenvalue(state: FockState, i: int) -> SpectralFunction:
    """Stabilized K_i eigenvalue; cutoff k and k+1 must agree exactly."""
    if not is_admissible(state):
        raise ValueError(f"inadmissible state {state}")
    if state.family.kind in ("vwedge", "cwedge"):
        return _k_product(state, i, 0)
    k = _cutoff(state)
    val = _k_product(state, i, k)
    if val != _k_product(state, i, k + 1):
        raise ValueError(f"unstable product for K_{i} at cutoff {k}")
    return val


def box_rule_eigenvalue(state: FockState, i: int) -> SpectralFunction:
    """K_i eigenvalue assembled from the movable boxes alone."""
    par = state.family.parity
    f = SpectralFunction.one()
    for mv in movable_boxes(state, i):
        sgn = psi_sign(par, i, mv.box.side, mv.kind)
        f = f * psi(sgn * mv.order, mv.content)
    return f


def _bumped(state: FockState, side: str, row: int, delta: int) -> FockState:
    fam = state.family
    if side == "nu" or fam.kind in ("vwedge", "cwedge"):
        part = state.nu if side == "nu" else (
            state.lam if side == "lam" else state.mu)
        vals = list(part.parts)
        vals[row - 1] += delta
        np = GenPartition.of(tuple(vals))
    else:
        part = state.lam if side == "lam" else state.mu
        vals = list(part.parts) + [0] * max(0, row - len(part.parts))
        vals[row - 1] += delta
        np = GenPartition.of(tuple(vals)).trimmed()
    if side == "lam":
        return FockState(fam, np, state.mu, state.nu)
    if side == "mu":
        return FockState(fam, state.lam, np, state.nu)
    return FockState(fam, state.lam, state.mu, np)


def _coeffs_at_cutoff(state: FockState, i: int, gen: str,
                      pairs: int) -> dict[tuple[str, int], tuple[Monomial, ScalarExpr]]:
    par = state.family.parity
    slots = _slots(state, pairs)
    eig = [local_eigenvalue(f, par, i) for f, _ in slots]
    bits = [f.parity_bit(par) for f, _ in slots]
    node_par = par.node_parity(i)
    out = {}
    for t, (slot, ref) in enumerate(slots):
        step = local_ladder(slot, par, i, gen)
        if step is None:
            continue
        if gen == "F":
            prod = SpectralFunction.one()
            for e in eig[:t]:
                prod = prod * e
        else:
            prod = _renorm(state, i, pairs)
            for e in eig[t + 1:]:
                prod = prod * e
        try:
            scalar = prod.evaluate_at_support(step.support)
        except PoleError as exc:
            raise ValueError(f"ill-defined action at slot {ref}: {exc}") from exc
        koszul = -1 if node_par and sum(bits[:t]) % 2 else 1
        scalar = scalar.scaled(monomial(step.sign * koszul))
        if not scalar.is_zero:
            out[ref] = (step.support, scalar)
    return out


def ladder_coeffs(state: FockState, i: int, gen: str) -> list[MatrixCoeff]:
    """All nonzero matrix coefficients of E_i(z) (gen="E") or F_i(z) on a state."""
    if gen not in ("E", "F"):
        raise ValueError("gen must be 'E' or 'F'")
    if not is_admissible(state):
        raise ValueError(f"inadmissible state {state}")
    if state.family.kind in ("vwedge", "cwedge"):
        found = _coeffs_at_cutoff(state, i, gen, 0)
    else:
        k = _cutoff(state)
        found = _coeffs_at_cutoff(state, i, gen, k)
        if found != _coeffs_at_cutoff(state, i, gen, k + 1):
            raise ValueError(f"unstable product for {gen}_{i} at cutoff {k}")
    delta = 1 if gen == "F" else -1
    out = []
    for (side, row), (support, scalar) in sorted(found.items()):
        try:
            target = _bumped(state, side, row, delta)
        except ValueError as exc:
            raise ValueError(f"ill-defined action: nonzero coefficient to "
                             f"invalid shape {side}[{row}]") from exc
        if not is_admissible(target):
            raise ValueError(f"ill-defined action: inadmissible target {target}")
        out.append(MatrixCoeff(support, scalar, target, side, row))
    return out


def eigenvalue_table(state: FockState, engine: str = "tensor") -> dict[int, SpectralFunction]:
    """K_i eigenvalue for every node, by either engine."""
    fn = k_eigenvalue if engine == "tensor" else box_rule_eigenvalue
    return {i: fn(state, i) for i in range(state.family.parity.N)}

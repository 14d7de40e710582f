"""Machine checks of the defining relations on the constructed modules.

Each check enumerates a module to a box cutoff and verifies one family
of identities exactly, as equalities of factored rational functions:
the K-ladder exchange, the E-F delta pairing against the eigenvalue's
pole expansion, the quadratic exchange of two E's or two F's, the
covector-twist isomorphism on local factors, and tameness (eigenvalue
tuples separate states, and the pole-stripping walk recovers them).

Failures are collected, not raised: a report with an empty failure list
is a pass, and the CLI turns that into exit codes.  Non-generic support
collisions are the one exception; those raise rather than silently
summing terms the identities cannot see apart.
"""

import time
from dataclasses import dataclass, field
from typing import Optional

from .exact_math import (
    ONE, Monomial, ScalarExpr, SpectralFunction, linear, monomial, qpow,
)
from .fock_action import (
    COVECTOR, VECTOR, LocalFactor, k_eigenvalue, ladder_coeffs,
    local_eigenvalue, local_ladder,
)
from .parity_core import Parity
from .plane_states import (
    boundary_vacuum, enumerate_plane, macmahon_k_eigenvalue, plane_degree,
    plane_ladder_coeffs, plane_to_json,
)
from .spart_states import FockFamily, degree, enumerate_states

__all__ = [
    "ModuleHandle", "VerificationReport", "check_covector_twist",
    "check_ef_residues", "check_k_ladder_ratio", "check_quadratic_ee_ff",
    "check_tameness", "run_suites",
]

# q - q^{-1}, the normalization of the E-F delta term
QDIFF = ScalarExpr.build(monomial(q=1), [(monomial(q=-2), 1)])


def _mono_diff(a: Monomial, b: Monomial) -> ScalarExpr:
    """a - b, exact, in product form."""
    if a == b:
        return ScalarExpr.zero()
    return ScalarExpr.build(a, [(b / a, 1)])


@dataclass
class VerificationReport:
    """Outcome of one relation suite on one module."""

    relation: str
    module: str
    states_checked: int = 0
    failures: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, state, nodes, witness: str) -> None:
        self.failures.append((str(state), nodes, witness))

    def summary(self) -> str:
        word = "pass" if self.ok else f"FAIL({len(self.failures)})"
        return (f"{self.relation:12s} {self.module:28s} "
                f"states={self.states_checked:<5d} {word} "
                f"[{self.elapsed:.2f}s]")

    def to_json(self) -> dict:
        return {"relation": self.relation, "module": self.module,
                "states_checked": self.states_checked,
                "failures": [{"state": s, "nodes": n, "witness": w}
                             for s, n, w in self.failures],
                "elapsed": round(self.elapsed, 3), "ok": self.ok}


class ModuleHandle:
    """Uniform enumeration/eigenvalue/ladder access for both module kinds."""

    def __init__(self, kind: str, parity: Parity, **desc):
        if kind not in ("fock", "macmahon"):
            raise ValueError(f"unknown module kind {kind!r}")
        self.kind = kind
        self.parity = parity
        self.desc = desc
        if kind == "fock":
            self.family = FockFamily(desc.get("shape", "pure"), parity,
                                     node=desc.get("node", 0),
                                     sign=desc.get("sign", 1),
                                     r=desc.get("r", 0))
        else:
            # validates the boundary once and for all
            boundary_vacuum(parity, desc.get("node", 0),
                            desc.get("gamma", ()), desc.get("epsilon", ()),
                            desc.get("alpha", ()), desc.get("forbidden", ()))

    @classmethod
    def fock(cls, parity: Parity, node: int = 0, sign: int = 1,
             shape: str = "pure", r: int = 0) -> "ModuleHandle":
        return cls("fock", parity, node=node, sign=sign, shape=shape, r=r)

    @classmethod
    def macmahon(cls, parity: Parity, node: int = 0, gamma=(), epsilon=(),
                 alpha=(), forbidden=()) -> "ModuleHandle":
        return cls("macmahon", parity, node=node, gamma=gamma,
                   epsilon=epsilon, alpha=alpha, forbidden=forbidden)

    def label(self) -> str:
        d = self.desc
        if self.kind == "fock":
            shape = d.get("shape", "pure")
            bits = [f"fock:{'+' if d.get('sign', 1) > 0 else '-'}"
                    f":{d.get('node', 0)}"]
            if shape != "pure":
                bits.append(f"{d.get('r', 0)}:{shape}")
            return ":".join(bits) + f"@{self.parity}"
        bits = [f"macmahon:{d.get('node', 0)}"]
        for key in ("gamma", "epsilon", "alpha", "forbidden"):
            if tuple(d.get(key, ())):
                bits.append(f"{key}={tuple(d[key])}")
        return ":".join(bits) + f"@{self.parity}"

    def states(self, max_boxes: int) -> list:
        if self.kind == "fock":
            return list(enumerate_states(self.family, max_boxes))
        d = self.desc
        return enumerate_plane(self.parity, d.get("node", 0), max_boxes,
                               d.get("gamma", ()), d.get("epsilon", ()),
                               d.get("alpha", ()), d.get("forbidden", ()))

    def eigenvalue(self, state, i: int) -> SpectralFunction:
        if self.kind == "fock":
            return k_eigenvalue(state, i)
        return macmahon_k_eigenvalue(state, i)

    def moves(self, state, i: int, gen: str) -> list:
        """Nonzero transitions as (support, scalar, target) triples."""
        if self.kind == "fock":
            cs = ladder_coeffs(state, i, gen)
        else:
            cs = plane_ladder_coeffs(state, i, gen)
        return [(c.support, c.scalar, c.target) for c in cs]

    def boxes(self, state) -> int:
        if self.kind == "fock":
            return sum(degree(state))
        return plane_degree(state)

    def key(self, state) -> str:
        if self.kind == "fock":
            return str(state.to_json())
        return str(plane_to_json(state))


def _exchange_pair(M: int, A: int, c: Monomial):
    """The two linear forms (d^M - q^A c x) and (d^M q^A - c x)."""
    den = linear(monomial(d=M), qpow(A) * c)
    num = linear(monomial(d=M) * qpow(A), c)
    return den, num


def check_k_ladder_ratio(module: ModuleHandle, i: Optional[int] = None,
                         j: Optional[int] = None, max_boxes: int = 4,
                         gens: str = "EF") -> VerificationReport:
    """K_i(z) exchanged with E_j(w)/F_j(w) across every transition.

    For a transition with delta support c the eigenvalues before and
    after must satisfy, with A = A_ij and M = M_ij,

        phi'(z) (d^M z - q^{+-A} c u) = phi(z) (d^M q^{+-A} z - c u)

    (upper sign for E, lower for F), checked as an exact identity of
    factored functions after dividing out z.
    """
    t0 = time.time()
    rep = VerificationReport("k-ladder", module.label())
    N = module.parity.N
    inodes = range(N) if i is None else [i]
    jnodes = range(N) if j is None else [j]
    for st in module.states(max_boxes):
        rep.states_checked += 1
        for jj in jnodes:
            for gen in gens:
                for c, _, tgt in module.moves(st, jj, gen):
                    for ii in inodes:
                        A = module.parity.cartan(ii, jj)
                        M = module.parity.twist_m(ii, jj)
                        sgn = A if gen == "E" else -A
                        den, num = _exchange_pair(M, sgn, c)
                        lhs = module.eigenvalue(tgt, ii) * den
                        rhs = module.eigenvalue(st, ii) * num
                        if lhs != rhs:
                            rep.fail(st, (ii, jj),
                                     f"{gen} support {c}: {lhs} != {rhs}")
    rep.elapsed = time.time() - t0
    return rep


def _paired_scalar(module: ModuleHandle, src, via, i: int, gen: str,
                   support: Monomial) -> ScalarExpr:
    """Scalar of the unique gen_i transition via -> src at the support."""
    hits = [s for c, s, tgt in module.moves(via, i, gen)
            if module.key(tgt) == module.key(src) and c == support]
    if len(hits) != 1:
        raise RuntimeError(
            f"expected one return transition, found {len(hits)} "
            f"(node {i}, {gen}, support {support})")
    return hits[0]


def check_ef_residues(module: ModuleHandle, i: Optional[int] = None,
                      max_boxes: int = 4) -> VerificationReport:
    """E_i against F_i: delta pairing versus the eigenvalue poles.

    Writing phi for the K_i eigenvalue of a state, every pole of phi
    must be the support of exactly one addable or one removable box of
    color i, and the matched products satisfy

        (q - q^{-1}) * <E down> * <F up>   = delta_coeff(phi, c)  (addable)
        (q - q^{-1}) * eps * <F up> * <E down> = delta_coeff(phi, c)  (removable)

    with eps = -(-1)^{|i|}, the sign the super-bracket puts on the F E
    ordering.  A support shared between an addable and a removable box
    would need the two terms summed; that never happens at generic q, d
    and is an error here.
    """
    t0 = time.time()
    rep = VerificationReport("ef-residues", module.label())
    nodes = range(module.parity.N) if i is None else [i]
    for st in module.states(max_boxes):
        rep.states_checked += 1
        for ii in nodes:
            phi = module.eigenvalue(st, ii)
            eps = 1 if module.parity.node_parity(ii) else -1
            add = module.moves(st, ii, "F")
            rem = module.moves(st, ii, "E")
            seen = [c for c, _, _ in add] + [c for c, _, _ in rem]
            if len(set(seen)) != len(seen):
                raise RuntimeError(
                    f"support collision at node {ii} on {st}")
            pole_set = {m for m, _ in phi.poles()}
            if pole_set != set(seen):
                rep.fail(st, ii, f"poles {pole_set} != supports {set(seen)}")
                continue
            for c, fscal, tgt in add:
                escal = _paired_scalar(module, st, tgt, ii, "E", c)
                got = QDIFF * escal * fscal
                want = phi.delta_coefficient(c)
                if got != want:
                    rep.fail(st, ii, f"addable {c}: {got} != {want}")
            for c, escal, tgt in rem:
                fscal = _paired_scalar(module, st, tgt, ii, "F", c)
                got = QDIFF * fscal * escal
                want = phi.delta_coefficient(c)
                if eps < 0:
                    want = want * ScalarExpr.from_monomial(monomial(-1))
                if got != want:
                    rep.fail(st, ii, f"removable {c}: {got} != {want}")
    rep.elapsed = time.time() - t0
    return rep


def _paths(module: ModuleHandle, st, first: int, second: int, gen: str):
    """Two-step transitions keyed by (target, support2, support1)."""
    out = {}
    for c1, s1, mid in module.moves(st, first, gen):
        for c2, s2, tgt in module.moves(mid, second, gen):
            key = (module.key(tgt), c2.key(), c1.key())
            if key in out:
                raise RuntimeError(f"colliding two-step paths at {key}")
            out[key] = (s2 * s1, c2, c1)
    return out


def check_quadratic_ee_ff(module: ModuleHandle, i: Optional[int] = None,
                          j: Optional[int] = None, max_boxes: int = 3,
                          gens: str = "EF") -> VerificationReport:
    """The quadratic exchange of E_i(z) with E_j(w), and of the F's.

    For every pair of two-step paths with the same endpoints and the
    same pair of delta supports (c for the z leg, b for the w leg),

        (d^M c - q^{+-A} b) <j then i>
            = (-1)^{|i||j|} (d^M q^{+-A} c - b) <i then j>

    (upper sign for E, lower for F).  Paths without a partner must be
    killed by the corresponding linear form vanishing at the supports.
    """
    t0 = time.time()
    rep = VerificationReport("quadratic", module.label())
    N = module.parity.N
    inodes = range(N) if i is None else [i]
    jnodes = range(N) if j is None else [j]
    for st in module.states(max_boxes):
        rep.states_checked += 1
        for ii in inodes:
            for jj in jnodes:
                A = module.parity.cartan(ii, jj)
                M = module.parity.twist_m(ii, jj)
                kos = -1 if (module.parity.node_parity(ii)
                             and module.parity.node_parity(jj)) else 1
                for gen in gens:
                    sgn = A if gen == "E" else -A
                    ji = _paths(module, st, jj, ii, gen)
                    ij = _paths(module, st, ii, jj, gen)
                    keys = set(ji) | {(t, c1, c2) for t, c2, c1 in ij}
                    for t, ck, bk in keys:
                        left = ji.get((t, ck, bk))
                        right = ij.get((t, bk, ck))
                        c = left[1] if left else right[2]
                        b = left[2] if left else right[1]
                        lform = _mono_diff(monomial(d=M) * c, qpow(sgn) * b)
                        rform = _mono_diff(monomial(d=M) * qpow(sgn) * c, b)
                        lhs = left[0] * lform if left else ScalarExpr.zero()
                        rhs = right[0] * rform if right else ScalarExpr.zero()
                        if kos < 0:
                            rhs = rhs * ScalarExpr.from_monomial(monomial(-1))
                        if lhs != rhs:
                            rep.fail(st, (ii, jj),
                                     f"{gen} supports ({c}, {b}): "
                                     f"{lhs} != {rhs}")
    rep.elapsed = time.time() - t0
    return rep


def _swap_mono(m: Monomial) -> Monomial:
    """The parameter flip (q1, q2, q3) -> (q3^{-1}, q2^{-1}, q1^{-1}).

    In the (q, d) coordinates this is q -> q^{-1} with d fixed.
    """
    return Monomial(m.coeff, -m.q2, m.d2, m.K2)


def _swap_sf(f: SpectralFunction) -> SpectralFunction:
    return SpectralFunction.build(_swap_mono(f.pre),
                                  [(_swap_mono(m), e) for m, e in f.atoms])


def check_covector_twist(parity: Parity, T: int = 1) -> VerificationReport:
    """The covector representation as a twist of the vector one.

    Sending [u]^j to [u]'_{-j} over the reflected parity
    s'_i = -s_{-i+1}, flipping the parameters q -> q^{-1}, and relabeling
    the operators E_i -> E_{-i}, F_i -> -F_{-i}, K_i -> K_{-i} must turn
    the covector local actions into the vector ones, eigenvalue by
    eigenvalue and step by step, for all |j| <= T*N.
    """
    if T < 1:
        raise ValueError("window must cover at least one period")
    t0 = time.time()
    N = parity.N
    refl = Parity(tuple(-parity.s(1 - i) for i in range(1, N + 1)))
    rep = VerificationReport("cov-twist", f"W@{parity} ~ V@{refl}")
    for jdx in range(-T * N, T * N + 1):
        rep.states_checked += 1
        w = LocalFactor(COVECTOR, jdx, ONE)
        v = LocalFactor(VECTOR, -jdx, ONE)
        for i in range(N):
            wk = local_eigenvalue(w, parity, i)
            vk = _swap_sf(local_eigenvalue(v, refl, (-i) % N))
            if wk != vk:
                rep.fail(f"[u]^{jdx}", i, f"K: {wk} != {vk}")
            for gen in ("E", "F"):
                ws = local_ladder(w, parity, i, gen)
                vs = local_ladder(v, refl, (-i) % N, gen)
                if (ws is None) != (vs is None):
                    rep.fail(f"[u]^{jdx}", i, f"{gen}: step mismatch")
                    continue
                if ws is None:
                    continue
                flip = -1 if gen == "F" else 1
                if ws.new.index != -vs.new.index:
                    rep.fail(f"[u]^{jdx}", i, f"{gen}: index "
                             f"{ws.new.index} != -({vs.new.index})")
                if ws.support != _swap_mono(vs.support):
                    rep.fail(f"[u]^{jdx}", i, f"{gen}: support "
                             f"{ws.support} != {_swap_mono(vs.support)}")
                if ws.sign != flip * vs.sign:
                    rep.fail(f"[u]^{jdx}", i, f"{gen}: sign "
                             f"{ws.sign} != {flip * vs.sign}")
    rep.elapsed = time.time() - t0
    return rep


def check_tameness(module: ModuleHandle, max_boxes: int = 4) -> VerificationReport:
    """Eigenvalue tuples separate states and the stripping walk recovers them.

    Injectivity is a straight index of the full tuples.  The walk takes
    a state's tuple, tries every pole of every phi_i as the support of a
    removable color-i box, rewrites the tuple through the K-ladder
    ratio, and requires some candidate to be a real state one box
    smaller; induction down to the vacuum then reconstructs the state
    from its eigenvalues alone.
    """
    t0 = time.time()
    rep = VerificationReport("tameness", module.label())
    N = module.parity.N
    states = module.states(max_boxes)
    index: dict = {}
    tuples: dict = {}
    for st in states:
        rep.states_checked += 1
        tup = tuple(module.eigenvalue(st, i) for i in range(N))
        tuples[module.key(st)] = tup
        if tup in index:
            rep.fail(st, None, f"same eigenvalues as {index[tup]}")
            continue
        index[tup] = module.key(st)
    by_boxes: dict = {}
    for st in states:
        by_boxes.setdefault(module.boxes(st), set()).add(module.key(st))
    for st in states:
        n = module.boxes(st)
        if n == 0:
            continue
        tup = tuples[module.key(st)]
        found = False
        for i in range(N):
            for c, _ in tup[i].poles():
                cand = tuple(
                    tup[m] * linear(monomial(d=module.parity.twist_m(m, i))
                                    * qpow(module.parity.cartan(m, i)), c)
                    / linear(monomial(d=module.parity.twist_m(m, i)),
                             qpow(module.parity.cartan(m, i)) * c)
                    for m in range(N))
                hit = index.get(cand)
                if hit is not None and hit in by_boxes.get(n - 1, ()):
                    found = True
                    break
            if found:
                break
        if not found:
            rep.fail(st, None, "no pole strips to a smaller state")
    rep.elapsed = time.time() - t0
    return rep


SUITES = {
    "ke": lambda mod, n: check_k_ladder_ratio(mod, max_boxes=n, gens="E"),
    "kf": lambda mod, n: check_k_ladder_ratio(mod, max_boxes=n, gens="F"),
    "ef": lambda mod, n: check_ef_residues(mod, max_boxes=n),
    "ee": lambda mod, n: check_quadratic_ee_ff(mod, max_boxes=n, gens="E"),
    "ff": lambda mod, n: check_quadratic_ee_ff(mod, max_boxes=n, gens="F"),
    "tame": lambda mod, n: check_tameness(mod, max_boxes=n),
}


def run_suites(module: ModuleHandle, names, max_boxes: int) -> list[VerificationReport]:
    out = []
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; "
                             f"choose from {sorted(SUITES)}")
        out.append(SUITES[name](module, max_boxes))
    return out

"""Exact scalar arithmetic for symbolic eigenvalues and ladder coefficients.

Scalars live in three nested shapes, all exact and hashable:

* Monomial: c * q^a * d^b * K^k with rational c and half-integer exponents
  (stored doubled, so q^(1/2) is the doubled exponent 1).
* ScalarExpr: Monomial * product of binomials (1 - m_j)^{e_j}.  No polynomial
  addition is ever performed; equality is canonical structural equality.
* SpectralFunction: Monomial * product of atoms (1 - m_j x)^{e_j} in a formal
  variable x (always u/z here).  Eigenvalues and renormalizing factors are
  SpectralFunctions; evaluating one at a delta-function support produces a
  ScalarExpr and makes zero/pole bookkeeping explicit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping


def _as_doubled(e) -> int:
    """Exponent given in natural units -> doubled integer storage."""
    f = Fraction(e)
    if (2 * f).denominator != 1:
        raise ValueError(f"exponent {e} is not a half-integer")
    return int(2 * f)


@dataclass(frozen=True)
class Monomial:
    """c * q^(q2/2) * d^(d2/2) * K^(K2/2), coefficient exact rational."""

    coeff: Fraction
    q2: int = 0
    d2: int = 0
    K2: int = 0

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.coeff * other.coeff, self.q2 + other.q2,
                        self.d2 + other.d2, self.K2 + other.K2)

    def __truediv__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.coeff / other.coeff, self.q2 - other.q2,
                        self.d2 - other.d2, self.K2 - other.K2)

    def __pow__(self, e: int) -> "Monomial":
        return Monomial(self.coeff ** e, self.q2 * e, self.d2 * e, self.K2 * e)

    def inverse(self) -> "Monomial":
        return self ** -1

    @property
    def is_one(self) -> bool:
        return self.coeff == 1 and self.q2 == self.d2 == self.K2 == 0

    @property
    def is_number(self) -> bool:
        return self.q2 == self.d2 == self.K2 == 0

    def key(self) -> tuple:
        return (self.q2, self.d2, self.K2, self.coeff)

    def numeric(self, rq: Fraction, rd: Fraction, rK: Fraction = Fraction(1)) -> Fraction:
        """Exact value at q = rq^2, d = rd^2, K = rK^2.

        Square roots are passed instead of the symbols themselves so that
        half-integer exponents stay inside the rationals.
        """
        return self.coeff * rq ** self.q2 * rd ** self.d2 * rK ** self.K2

    def substitute_K(self, target: "Monomial") -> "Monomial":
        """Replace K by a K-free monomial, e.g. to inspect K = q^a d^b."""
        if target.K2 != 0:
            raise ValueError("substitution target must be K-free")
        if self.K2 == 0:
            return self
        e = Fraction(self.K2, 2)
        q2 = self.q2 + target.q2 * e
        d2 = self.d2 + target.d2 * e
        if q2.denominator != 1 or d2.denominator != 1:
            raise ValueError(f"substituting {target} leaves a quarter-integer exponent")
        if e.denominator == 1:
            coeff = self.coeff * target.coeff ** int(e)
        elif target.coeff == 1:
            coeff = self.coeff
        else:
            raise ValueError(f"cannot take a half power of coefficient {target.coeff}")
        return Monomial(coeff, int(q2), int(d2), 0)

    def to_json(self) -> dict:
        return {"c": f"{self.coeff.numerator}/{self.coeff.denominator}",
                "q": self.q2, "d": self.d2, "K": self.K2}

    @classmethod
    def from_json(cls, data: Mapping) -> "Monomial":
        return cls(Fraction(data["c"]), data["q"], data["d"], data["K"])

    def __str__(self) -> str:
        parts = []
        if self.coeff != 1 or (self.q2 == self.d2 == self.K2 == 0):
            parts.append(str(self.coeff))
        for sym, e2 in (("q", self.q2), ("d", self.d2), ("K", self.K2)):
            if e2:
                e = Fraction(e2, 2)
                parts.append(sym if e == 1 else f"{sym}^{e}")
        return "*".join(parts)


def monomial(coeff=1, q=0, d=0, K=0) -> Monomial:
    """Build a Monomial from natural-unit exponents (halves allowed)."""
    return Monomial(Fraction(coeff), _as_doubled(q), _as_doubled(d), _as_doubled(K))


ONE = monomial()
Q = monomial(q=1)
Q1 = monomial(q=-1, d=1)
Q2 = monomial(q=2)
Q3 = monomial(q=-1, d=-1)
KMON = monomial(K=1)


def qpow(e) -> Monomial:
    return monomial(q=e)


def _merge(factors: Iterable[tuple[Monomial, int]]) -> dict[Monomial, int]:
    acc: dict[Monomial, int] = {}
    for m, e in factors:
        if e == 0:
            continue
        acc[m] = acc.get(m, 0) + e
        if acc[m] == 0:
            del acc[m]
    return acc


class PoleError(ZeroDivisionError):
    """A factor (1 - 1) or atom evaluation landed in a denominator."""


@dataclass(frozen=True)
class ScalarExpr:
    """Monomial * product of (1 - m_j)^{e_j} with m_j non-trivial monomials."""

    pre: Monomial
    factors: tuple[tuple[Monomial, int], ...] = ()

    @classmethod
    def build(cls, pre: Monomial, factors: Iterable[tuple[Monomial, int]] = ()) -> "ScalarExpr":
        if pre.coeff == 0:
            return cls(monomial(0))
        merged = _merge(factors)
        out: dict[Monomial, int] = {}
        for m, e in merged.items():
            if m.is_one:
                if e > 0:
                    return cls(monomial(0))
                raise PoleError("factor (1 - 1) in a denominator")
            if m.is_number:
                # (1 - c) is an exact rational, fold it into the prefactor
                pre = pre * monomial(1 - m.coeff) ** e
                continue
            # canonical side: represent (1 - m) with the larger key of m, 1/m
            minv = m.inverse()
            if m.key() < minv.key():
                # (1 - m)^e = (-m)^e (1 - 1/m)^e
                pre = pre * (monomial(-1) * m) ** e
                m = minv
            out[m] = out.get(m, 0) + e
            if out[m] == 0:
                del out[m]
        ordered = tuple(sorted(out.items(), key=lambda t: t[0].key()))
        return cls(pre, ordered)

    @classmethod
    def from_monomial(cls, m: Monomial) -> "ScalarExpr":
        return cls.build(m)

    @classmethod
    def one(cls) -> "ScalarExpr":
        return cls.build(ONE)

    @classmethod
    def zero(cls) -> "ScalarExpr":
        return cls(monomial(0))

    @property
    def is_zero(self) -> bool:
        return self.pre.coeff == 0

    def __mul__(self, other: "ScalarExpr") -> "ScalarExpr":
        if self.is_zero or other.is_zero:
            return ScalarExpr.zero()
        return ScalarExpr.build(self.pre * other.pre,
                                list(self.factors) + list(other.factors))

    def __truediv__(self, other: "ScalarExpr") -> "ScalarExpr":
        if other.is_zero:
            raise PoleError("division by zero scalar")
        if self.is_zero:
            return ScalarExpr.zero()
        inv = [(m, -e) for m, e in other.factors]
        return ScalarExpr.build(self.pre / other.pre, list(self.factors) + inv)

    def __neg__(self) -> "ScalarExpr":
        return ScalarExpr(self.pre * monomial(-1), self.factors)

    def __pow__(self, e: int) -> "ScalarExpr":
        if self.is_zero:
            if e <= 0:
                raise PoleError("zero to a non-positive power")
            return self
        return ScalarExpr.build(self.pre ** e, [(m, k * e) for m, k in self.factors])

    def scaled(self, m: Monomial) -> "ScalarExpr":
        return ScalarExpr.build(self.pre * m, self.factors)

    def substitute_K(self, target: Monomial) -> "ScalarExpr":
        """Replace K throughout; may expose a zero or a pole at a resonant level."""
        if self.is_zero:
            return self
        return ScalarExpr.build(self.pre.substitute_K(target),
                                [(m.substitute_K(target), e) for m, e in self.factors])

    def numeric(self, rq: Fraction, rd: Fraction, rK: Fraction = Fraction(1)) -> Fraction:
        val = self.pre.numeric(rq, rd, rK)
        for m, e in self.factors:
            base = 1 - m.numeric(rq, rd, rK)
            if base == 0:
                raise PoleError("factor vanishes at numeric point")
            val *= Fraction(base) ** e
        return val

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        bits = [str(self.pre)]
        for m, e in self.factors:
            base = f"(1 - {m})"
            bits.append(base if e == 1 else f"{base}^{e}")
        return " * ".join(bits)


def binomial(a: Monomial, b: Monomial) -> ScalarExpr:
    """The difference (a - b) in factored form a * (1 - b/a)."""
    return ScalarExpr.build(a, [(b / a, 1)])


@dataclass(frozen=True)
class SpectralFunction:
    """Monomial * product of atoms (1 - m_j x)^{e_j}, x a formal variable."""

    pre: Monomial
    atoms: tuple[tuple[Monomial, int], ...] = ()

    @classmethod
    def build(cls, pre: Monomial, atoms: Iterable[tuple[Monomial, int]] = ()) -> "SpectralFunction":
        if pre.coeff == 0:
            return cls(monomial(0))
        merged = _merge(atoms)
        ordered = tuple(sorted(merged.items(), key=lambda t: t[0].key()))
        return cls(pre, ordered)

    @classmethod
    def one(cls) -> "SpectralFunction":
        return cls.build(ONE)

    @classmethod
    def constant(cls, m: Monomial) -> "SpectralFunction":
        return cls.build(m)

    @property
    def is_one(self) -> bool:
        return self.pre.is_one and not self.atoms

    def __mul__(self, other: "SpectralFunction") -> "SpectralFunction":
        return SpectralFunction.build(self.pre * other.pre,
                                      list(self.atoms) + list(other.atoms))

    def __truediv__(self, other: "SpectralFunction") -> "SpectralFunction":
        inv = [(m, -e) for m, e in other.atoms]
        return SpectralFunction.build(self.pre / other.pre,
                                      list(self.atoms) + inv)

    def __pow__(self, e: int) -> "SpectralFunction":
        return SpectralFunction.build(self.pre ** e,
                                      [(m, k * e) for m, k in self.atoms])

    def poles(self) -> list[tuple[Monomial, int]]:
        """Atoms appearing in the denominator, as (monomial, order)."""
        return [(m, -e) for m, e in self.atoms if e < 0]

    def evaluate(self, point: Monomial) -> ScalarExpr:
        """Substitute x = point.  Raises PoleError on a surviving pole."""
        out = ScalarExpr.from_monomial(self.pre)
        for m, e in self.atoms:
            if e < 0 and (m * point).is_one:
                raise PoleError(f"pole at evaluation point x = {point}")
            out = out * ScalarExpr.build(ONE, [(m * point, e)])
        return out

    def evaluate_at_support(self, c: Monomial) -> ScalarExpr:
        """Evaluate at the point z = c*u of the delta function delta(c u/z).

        The variable is x = u/z, so the substitution is x = 1/c.
        """
        return self.evaluate(c.inverse())

    def delta_coefficient(self, c: Monomial) -> ScalarExpr:
        """Coefficient of delta(c u/z) in the boundary-value difference.

        For a simple pole at x = 1/c this is [(1 - c x) * phi] at x = 1/c;
        a regular function contributes zero; a higher pole is an error.
        """
        order = 0
        rest = []
        for m, e in self.atoms:
            if m == c:
                order = -e
            else:
                rest.append((m, e))
        if order <= 0:
            return ScalarExpr.zero()
        if order > 1:
            raise PoleError(f"non-simple pole (order {order}) at support {c}")
        return SpectralFunction.build(self.pre, rest).evaluate(c.inverse())

    def substitute_x_scale(self, a: Monomial) -> "SpectralFunction":
        """phi(a x) as a new SpectralFunction."""
        return SpectralFunction.build(self.pre, [(m * a, e) for m, e in self.atoms])

    def substitute_K(self, target: Monomial) -> "SpectralFunction":
        """Replace K throughout, for inspecting resonant levels K = q^a d^b."""
        return SpectralFunction.build(
            self.pre.substitute_K(target),
            [(m.substitute_K(target), e) for m, e in self.atoms])

    def value_at_zero(self) -> ScalarExpr:
        return ScalarExpr.from_monomial(self.pre)

    def value_at_infinity(self) -> ScalarExpr:
        """Limit as x -> infinity; defined only for degree-zero functions."""
        deg = sum(e for _, e in self.atoms)
        if deg != 0:
            raise ValueError(f"degree {deg} at infinity")
        out = ScalarExpr.from_monomial(self.pre)
        for m, e in self.atoms:
            out = out * ScalarExpr.from_monomial((monomial(-1) * m) ** e)
        return out

    def numeric(self, rq: Fraction, rd: Fraction, rK: Fraction, xv: Fraction) -> Fraction:
        val = self.pre.numeric(rq, rd, rK)
        for m, e in self.atoms:
            base = 1 - m.numeric(rq, rd, rK) * xv
            if base == 0:
                raise PoleError("pole at evaluation point (numeric)")
            val *= Fraction(base) ** e
        return val

    def to_json(self) -> dict:
        num, den = [], []
        for m, e in self.atoms:
            (num if e > 0 else den).extend(
                [[ONE.to_json(), m.to_json()]] * abs(e))
        return {"pre": self.pre.to_json(), "num": num, "den": den}

    @classmethod
    def from_json(cls, data: Mapping) -> "SpectralFunction":
        pre = Monomial.from_json(data["pre"])
        atoms = []
        for side, sgn in (("num", 1), ("den", -1)):
            for a, b in data[side]:
                fa, fb = Monomial.from_json(a), Monomial.from_json(b)
                pre = pre * fa ** sgn
                atoms.append((fb / fa, sgn))
        return cls.build(pre, atoms)

    def __str__(self) -> str:
        bits = [str(self.pre)]
        for m, e in self.atoms:
            base = f"(1 - {m}*x)"
            bits.append(base if e == 1 else f"{base}^{e}")
        return " * ".join(bits)


def psi(k: int, c: Monomial) -> SpectralFunction:
    """psi_k evaluated at c*x: (q^k - q^{-k} c x) / (1 - c x)."""
    if k == 0:
        return SpectralFunction.one()
    return SpectralFunction.build(qpow(k), [(qpow(-2 * k) * c, 1), (c, -1)])


def psi_pow(k: int, c: Monomial, sgn: int) -> SpectralFunction:
    """psi_k at (c x)^{sgn}; the inverse argument uses psi_k(y^-1) = psi_{-k}(y)."""
    if sgn not in (1, -1):
        raise ValueError("sgn must be +1 or -1")
    return psi(k if sgn == 1 else -k, c)


def f_factor(r: int, c: Monomial) -> SpectralFunction:
    """(K - K^{-1} c x) / (q^r - q^{-r} c x) with formal central parameter K."""
    return SpectralFunction.build(
        KMON * qpow(-r),
        [(monomial(K=-2) * c, 1), (qpow(-2 * r) * c, -1)])


def linear(a: Monomial, b: Monomial) -> SpectralFunction:
    """(a - b x) in factored form a * (1 - (b/a) x)."""
    return SpectralFunction.build(a, [(b / a, 1)])


def evaluate(f: SpectralFunction, x0: Monomial) -> ScalarExpr:
    """f at the point x = x0 (x0 = 0 gives the constant term)."""
    return f.evaluate(x0)


def delta_coefficient(f: SpectralFunction, x0: Monomial) -> ScalarExpr:
    """lim_{x -> x0} (1 - x/x0) f(x): zero unless x0 is a (simple) pole."""
    return f.delta_coefficient(x0.inverse())


@dataclass(frozen=True)
class CharSeries:
    """Truncated integer power series in z_0..z_{N-1}, graded by total degree.

    coeffs maps exponent vectors (tuples of non-negative ints, |e| <= trunc)
    to nonzero integers; absent means zero.  Multiplication truncates by
    total degree, which keeps every character computation finite.
    """

    N: int
    trunc: int
    coeffs: dict

    @classmethod
    def zero(cls, N: int, trunc: int) -> "CharSeries":
        return cls(N, trunc, {})

    @classmethod
    def one(cls, N: int, trunc: int) -> "CharSeries":
        return cls(N, trunc, {(0,) * N: 1})

    @classmethod
    def term(cls, N: int, trunc: int, expo: tuple[int, ...], coeff: int = 1) -> "CharSeries":
        if len(expo) != N:
            raise ValueError("exponent vector has wrong width")
        if any(e < 0 for e in expo):
            raise ValueError("negative exponent in character term")
        if coeff == 0 or sum(expo) > trunc:
            return cls.zero(N, trunc)
        return cls(N, trunc, {tuple(expo): coeff})

    def _check(self, other: "CharSeries") -> int:
        if self.N != other.N:
            raise ValueError("mixed widths")
        return min(self.trunc, other.trunc)

    def __add__(self, other: "CharSeries") -> "CharSeries":
        t = self._check(other)
        out = {e: c for e, c in self.coeffs.items() if sum(e) <= t}
        for e, c in other.coeffs.items():
            if sum(e) <= t:
                out[e] = out.get(e, 0) + c
                if out[e] == 0:
                    del out[e]
        return CharSeries(self.N, t, out)

    def __sub__(self, other: "CharSeries") -> "CharSeries":
        return self + other.scaled(-1)

    def scaled(self, k: int) -> "CharSeries":
        if k == 0:
            return CharSeries.zero(self.N, self.trunc)
        return CharSeries(self.N, self.trunc,
                          {e: k * c for e, c in self.coeffs.items()})

    def __mul__(self, other: "CharSeries") -> "CharSeries":
        t = self._check(other)
        out: dict = {}
        for e1, c1 in self.coeffs.items():
            d1 = sum(e1)
            if d1 > t:
                continue
            for e2, c2 in other.coeffs.items():
                if d1 + sum(e2) > t:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
                if out[e] == 0:
                    del out[e]
        return CharSeries(self.N, t, out)

    def mul_monomial(self, shift: tuple[int, ...], coeff: int = 1) -> "CharSeries":
        """Multiply by coeff * z^shift; shift entries may be negative, but
        every resulting exponent must stay non-negative (hard error otherwise)."""
        out: dict = {}
        for e, c in self.coeffs.items():
            ne = tuple(a + b for a, b in zip(e, shift))
            if any(x < 0 for x in ne):
                raise ValueError(f"negative exponent {ne} in character term")
            if sum(ne) <= self.trunc:
                out[ne] = out.get(ne, 0) + coeff * c
                if out[ne] == 0:
                    del out[ne]
        return CharSeries(self.N, self.trunc, out)

    def coefficient(self, expo: tuple[int, ...]) -> int:
        return self.coeffs.get(tuple(expo), 0)

    def principal(self) -> dict[int, int]:
        return principal_specialize(self.coeffs)

    def principal_list(self, upto: int | None = None) -> list[int]:
        ps = self.principal()
        top = self.trunc if upto is None else upto
        return [ps.get(t, 0) for t in range(top + 1)]

    def to_json(self) -> list:
        return [[list(e), c] for e, c in sorted(self.coeffs.items())]

    @classmethod
    def from_json(cls, N: int, trunc: int, data: Iterable) -> "CharSeries":
        return cls(N, trunc, {tuple(e): int(c) for e, c in data})

    def __eq__(self, other) -> bool:
        return (isinstance(other, CharSeries) and self.N == other.N
                and self.coeffs == other.coeffs)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        bits = []
        for e, c in sorted(self.coeffs.items(), key=lambda t: (sum(t[0]), t[0])):
            z = "*".join(f"z{i}^{k}" if k > 1 else f"z{i}"
                         for i, k in enumerate(e) if k)
            bits.append(f"{c}" + (f"*{z}" if z else ""))
        return " + ".join(bits)


def series_expand_inverse_pochhammer(a: int, p_degree: int, D: int) -> CharSeries:
    """Expansion of 1/prod_{i=1}^{a}(1 - p^i) with p = z_0 ... z_{N-1}.

    Coefficient of p^k counts partitions of k with parts of size at most a.
    """
    if a < 0:
        raise ValueError("pochhammer length must be non-negative")
    N = p_degree
    kmax = D // N if N > 0 else 0
    coeffs = inv_pochhammer(a, kmax)
    out = {(k,) * N: coeffs[k] for k in range(kmax + 1) if coeffs[k]}
    return CharSeries(N, D, out)


def inv_pochhammer(s: int, depth: int) -> list[int]:
    """Taylor coefficients of 1/((t;t)_s) = prod_{i=1}^s (1-t^i)^{-1}.

    Coefficient k counts partitions of k with parts of size at most s.
    """
    coeffs = [0] * (depth + 1)
    coeffs[0] = 1
    for part in range(1, s + 1):
        for total in range(part, depth + 1):
            coeffs[total] += coeffs[total - part]
    return coeffs


def principal_specialize(series: Mapping[tuple[int, ...], int]) -> dict[int, int]:
    """Collapse a multivariate series z^e -> q^{|e|} by total degree."""
    out: dict[int, int] = {}
    for expo, coeff in series.items():
        deg = sum(expo)
        out[deg] = out.get(deg, 0) + coeff
        if out[deg] == 0:
            del out[deg]
    return out

"""Parity sequences and the root data attached to them.

A parity is an N-periodic sign sequence s_1, ..., s_N with m pluses and
n = N - m minuses (m != n, N >= 3).  Everything downstream is driven by a
handful of integer maps derived from it: the running sum bar, the Cartan
matrix, the lattice twist M, node parities, and the root sign sigma.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Parity:
    """Sign sequence s_1..s_N, extended N-periodically (s_0 = s_N)."""

    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.signs) < 3:
            raise ValueError("need at least 3 signs")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")
        if self.m == self.n:
            raise ValueError("equal numbers of + and - are not allowed")

    @classmethod
    def from_string(cls, text: str) -> "Parity":
        """Parse a string like '+++--' into a Parity (s_1..s_N)."""
        table = {"+": 1, "-": -1}
        try:
            return cls(tuple(table[c] for c in text.strip()))
        except KeyError as exc:
            raise ValueError(f"bad parity character {exc.args[0]!r}") from exc

    @classmethod
    def standard(cls, m: int, n: int) -> "Parity":
        """The standard parity: m pluses followed by n minuses."""
        return cls((1,) * m + (-1,) * n)

    def __str__(self) -> str:
        return "".join("+" if s == 1 else "-" for s in self.signs)

    @property
    def N(self) -> int:
        return len(self.signs)

    @property
    def m(self) -> int:
        return sum(1 for s in self.signs if s == 1)

    @property
    def n(self) -> int:
        return sum(1 for s in self.signs if s == -1)

    def s(self, i: int) -> int:
        """s_i for any integer i, N-periodic."""
        return self.signs[(i - 1) % self.N]

    def bar(self, j: int) -> int:
        """Running sum bar(j) = s_1 + ... + s_j, with bar(0) = 0.

        Extended to all integers by bar(j + N) = bar(j) + m - n, so that
        bar(j + 1) - bar(j) = s_{j+1} everywhere.
        """
        r = j % self.N
        periods = (j - r) // self.N
        return sum(self.signs[:r]) + periods * (self.m - self.n)

    def node_parity(self, i: int) -> int:
        """Z_2 parity of node i: 0 if s_i = s_{i+1}, else 1."""
        return (1 - self.s(i) * self.s(i + 1)) // 2

    def cartan(self, i: int, j: int) -> int:
        """Cartan matrix entry A_{ij} on nodes mod N."""
        a = 0
        if (i - j) % self.N == 0:
            a += self.s(i) + self.s(i + 1)
        if (i - j - 1) % self.N == 0:
            a -= self.s(i)
        if (j - i - 1) % self.N == 0:
            a -= self.s(j)
        return a

    def twist_m(self, i: int, j: int) -> int:
        """Antisymmetric lattice twist M_{ij}: M_{i+1,i} = s_{i+1}, else 0."""
        if (i - j - 1) % self.N == 0:
            return self.s(i)
        if (j - i - 1) % self.N == 0:
            return -self.s(j)
        return 0

    def root_sign(self, i: int, j: int) -> int:
        """sigma(i,j) = (-1)^{|i| + |i+1| + ... + |j|} for i <= j."""
        if j < i:
            raise ValueError("root_sign needs i <= j")
        total = sum(self.node_parity(k) for k in range(i, j + 1))
        return -1 if total % 2 else 1

    def twist_parity(self) -> "Parity":
        """The parity s'_i = -s_{-i+1} attached to the twist map."""
        return Parity(tuple(-self.s(-i + 1) for i in range(1, self.N + 1)))

    def tableau_parity(self) -> "Parity":
        """The reflected parity s'_i = s_{1-i} used for the tableau pairing."""
        return Parity(tuple(self.s(1 - i) for i in range(1, self.N + 1)))

    def is_standard(self) -> bool:
        return self.signs == (1,) * self.m + (-1,) * self.n

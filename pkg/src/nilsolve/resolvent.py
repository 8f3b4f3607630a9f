"""Resolvent coefficients as finite pole expansions, and the Psi polynomials.

For ``zeta = xi + sum_s xi_s I_s`` the resolvent ``(t - zeta)^{-1}`` has the
components ``A_k``, each a finite sum ``sum_s q_{k,s}(xi_1..xi_k) / (t - xi)^s``.
Only the pole orders are tracked; ``t`` itself never appears.

Replacing every ``(t - xi)^{-s}`` by ``1/(s-1)!`` (the residue of
``e^t (t - xi)^{-s}`` up to the factor ``e^xi``) turns ``A_k`` into ``Psi_k``,
and ``exp zeta = e^xi sum_k Psi_k I_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

import numpy as np

from .errors import InvalidDimension
from .nilalg import AlgebraTable, make_rho_chain
from .sparsepoly import Poly


@dataclass(frozen=True)
class PoleExpansion:
    """``A_k`` as a map ``pole order s -> q_{k,s}``."""

    k: int
    terms: Mapping[int, Poly] = field(default_factory=dict)

    def poles(self) -> list[int]:
        return sorted(self.terms)

    def coefficient(self, s: int) -> Poly:
        return self.terms.get(s, Poly())

    def shift(self) -> "PoleExpansion":
        """Multiply by ``1/(t - xi)``."""
        return PoleExpansion(self.k, {s + 1: q for s, q in self.terms.items()})

    def evaluate(self, t: complex, xi: complex, xis) -> complex:
        d = t - xi
        return sum(q.evaluate(xis) / d**s for s, q in self.terms.items())

    def close_to(self, other: "PoleExpansion", tol: float = 1e-12) -> bool:
        poles = set(self.terms) | set(other.terms)
        return all(self.coefficient(s).close_to(other.coefficient(s), tol) for s in poles)

    def to_json(self) -> list[dict]:
        return [{"pole": s, "monomials": self.terms[s].to_json()} for s in self.poles()]

    @classmethod
    def from_json(cls, k: int, data: list[Mapping]) -> "PoleExpansion":
        return cls(k, {int(t["pole"]): Poly.from_json(t["monomials"]) for t in data})

    def to_latex(self) -> str:
        parts = []
        for s in self.poles():
            num = self.terms[s].to_latex()
            parts.append(rf"\frac{{{num}}}{{(t-\xi)^{{{s}}}}}")
        return f"A_{{{self.k}}}=" + "+".join(parts)


def _accumulate(acc: dict[int, Poly], a: PoleExpansion, factor: Poly) -> None:
    for s, q in a.terms.items():
        prod = q * factor
        acc[s] = acc[s] + prod if s in acc else prod


@lru_cache(maxsize=None)
def resolvent_rho(n: int) -> tuple[PoleExpansion, ...]:
    """``A_0..A_{n-1}`` on the rho-chain from ``A_s = (sum_j xi_{s-j} A_j)/(t - xi)``."""
    if n < 2:
        raise InvalidDimension(f"dimension must be >= 2, got {n}")
    out = [PoleExpansion(0, {1: Poly.const(1.0)})]
    for s in range(1, n):
        acc: dict[int, Poly] = {}
        for j in range(s):
            _accumulate(acc, out[j], Poly.var(s - j))
        out.append(PoleExpansion(s, acc).shift())
    return tuple(out)


@lru_cache(maxsize=None)
def resolvent_general(table: AlgebraTable, n: int | None = None) -> tuple[PoleExpansion, ...]:
    """``A_0..A_{n-1}`` for an arbitrary triangular table.

    Uses ``A_s = xi_s/(t-xi)^2 + (1/(t-xi)) sum_{r<s} A_r B_{r,s}`` with
    ``B_{r,s} = sum_k xi_k Y_{r,s}^k`` (the ``I_s`` coefficient of ``I_r I_k``).
    """
    n = table.n if n is None else n
    if n < 2 or n > table.n:
        raise InvalidDimension(f"dimension {n} not available in a table of size {table.n}")
    out = [PoleExpansion(0, {1: Poly.const(1.0)})]
    for s in range(1, n):
        acc: dict[int, Poly] = {}
        _accumulate(acc, out[0], Poly.var(s))
        for r in range(1, s):
            b = Poly()
            for k in range(1, s):
                c = table.constant(r, k, s)
                if c != 0:
                    b = b + Poly.var(k).scale(c)
            if not b.is_zero():
                _accumulate(acc, out[r], b)
        out.append(PoleExpansion(s, acc).shift())
    return tuple(out)


@dataclass(frozen=True)
class PsiPolynomial:
    r: int
    poly: Poly

    def evaluate(self, xis) -> complex | np.ndarray:
        return self.poly.evaluate(xis)

    def to_json(self) -> list[dict]:
        return [{"pole": 0, "monomials": self.poly.to_json()}]

    def to_latex(self) -> str:
        return rf"\Psi_{{{self.r}}}=" + self.poly.to_latex()


def p_operator(a: PoleExpansion) -> PsiPolynomial:
    """Substitute ``(t - xi)^{-s} -> 1/(s-1)!`` term by term."""
    total = Poly()
    for s, q in a.terms.items():
        f = math.factorial(s - 1)
        total = total + Poly({k: v / f for k, v in q.terms.items()})
    return PsiPolynomial(a.k, total)


@lru_cache(maxsize=None)
def psi_rho(n: int) -> tuple[PsiPolynomial, ...]:
    return tuple(p_operator(a) for a in resolvent_rho(n))


@lru_cache(maxsize=None)
def psi_general(table: AlgebraTable, n: int | None = None) -> tuple[PsiPolynomial, ...]:
    return tuple(p_operator(a) for a in resolvent_general(table, n))


@dataclass(frozen=True)
class XiValues:
    """Spectrum ``xi`` and nilpotent components ``xi_1..xi_{n-1}`` of a point."""

    xi: complex
    xis: np.ndarray

    def __post_init__(self):
        arr = np.array(self.xis, dtype=complex).reshape(-1)
        arr.flags.writeable = False
        object.__setattr__(self, "xis", arr)
        object.__setattr__(self, "xi", complex(self.xi))

    @property
    def n(self) -> int:
        return self.xis.shape[0] + 1


def exp_decomposition(xiv: XiValues, n: int | None = None, table: AlgebraTable | None = None) -> np.ndarray:
    """Components ``V_r = Psi_r(xi_1..xi_r) e^xi`` of ``exp zeta``, ``r < n``."""
    n = xiv.n if n is None else n
    if xiv.n != n:
        raise InvalidDimension(f"XiValues sized for n={xiv.n}, requested n={n}")
    if table is None or table == make_rho_chain(n):
        psis = psi_rho(n)
    else:
        psis = psi_general(table, n)
    xis = xiv.xis if xiv.xis.size else np.zeros(1, dtype=complex)
    e = np.exp(xiv.xi)
    return np.array([p.evaluate(xis) * e for p in psis], dtype=complex)

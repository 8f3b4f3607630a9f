"""Sparse multivariate polynomials in the symbols xi_1, xi_2, ...

A polynomial is a mapping from exponent tuples to complex coefficients.
Exponent tuples are stored with trailing zeros stripped, so ``xi_1`` has the
key ``(1,)`` whatever the number of symbols in play.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

# coefficients below this magnitude are dropped after arithmetic
CLEANUP = 1e-14


def _norm(exps: Iterable[int]) -> tuple[int, ...]:
    e = list(exps)
    while e and e[-1] == 0:
        e.pop()
    return tuple(e)


class Poly:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, ...], complex] | None = None):
        clean: dict[tuple[int, ...], complex] = {}
        for exps, c in (terms or {}).items():
            c = complex(c)
            if abs(c) < CLEANUP:
                continue
            key = _norm(exps)
            clean[key] = clean.get(key, 0j) + c
        self.terms = {k: v for k, v in clean.items() if abs(v) >= CLEANUP}

    @classmethod
    def const(cls, c: complex) -> "Poly":
        return cls({(): c})

    @classmethod
    def var(cls, j: int) -> "Poly":
        """The symbol ``xi_j`` (1-based)."""
        return cls({(0,) * (j - 1) + (1,): 1.0})

    @property
    def nvars(self) -> int:
        return max((len(k) for k in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0j) + v
        return Poly(out)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + other.scale(-1)

    def scale(self, c: complex) -> "Poly":
        return Poly({k: c * v for k, v in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        out: dict[tuple[int, ...], complex] = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                n = max(len(ka), len(kb))
                key = tuple(
                    (ka[i] if i < len(ka) else 0) + (kb[i] if i < len(kb) else 0)
                    for i in range(n)
                )
                out[key] = out.get(key, 0j) + va * vb
        return Poly(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def close_to(self, other: "Poly", tol: float = 1e-12) -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(
            abs(self.terms.get(k, 0j) - other.terms.get(k, 0j)) <= tol for k in keys
        )

    def weighted_degrees(self) -> set[int]:
        """Degrees of the monomials when ``xi_j`` carries weight ``j``."""
        return {sum((i + 1) * e for i, e in enumerate(k)) for k in self.terms}

    def evaluate(self, xis) -> complex | np.ndarray:
        """Evaluate at ``xis[..., j-1] = xi_j``; leading axes broadcast."""
        xis = np.asarray(xis, dtype=complex)
        total = np.zeros(xis.shape[:-1], dtype=complex)
        for exps, c in self.terms.items():
            term = np.full(xis.shape[:-1], c, dtype=complex)
            for i, e in enumerate(exps):
                if e:
                    term = term * xis[..., i] ** e
            total = total + term
        return total if total.shape else complex(total)

    # serialisation ----------------------------------------------------
    def to_json(self) -> list[dict]:
        return [
            {"exps": list(k), "re": v.real, "im": v.imag}
            for k, v in sorted(self.terms.items(), key=lambda kv: _sort_key(kv[0]))
        ]

    @classmethod
    def from_json(cls, data: list[Mapping]) -> "Poly":
        return cls({tuple(int(e) for e in m["exps"]): complex(m["re"], m.get("im", 0.0)) for m in data})

    def to_latex(self, symbol: str = r"\xi") -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, c in sorted(self.terms.items(), key=lambda kv: _sort_key(kv[0])):
            mono = "".join(
                f"{symbol}_{i + 1}" + (f"^{{{e}}}" if e > 1 else "")
                for i, e in enumerate(exps)
                if e
            )
            coef = latex_number(c)
            if mono and coef in ("1", "-1"):
                coef = coef[:-1]
            parts.append(f"{coef}{mono}" if mono else coef)
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out

    def __repr__(self) -> str:
        return f"Poly({self.to_latex()})"


def _sort_key(exps: tuple[int, ...]):
    # lower weighted degree, then fewer factors, then xi_1-heavy first
    weighted = sum((i + 1) * e for i, e in enumerate(exps))
    return (weighted, sum(exps), tuple(-e for e in exps))


def latex_number(c: complex) -> str:
    """Short LaTeX for a coefficient; small rationals come out as fractions."""

    def real_part(x: float) -> str:
        f = Fraction(x).limit_denominator(10**6)
        if abs(float(f) - x) <= 1e-12 * max(1.0, abs(x)):
            if f.denominator == 1:
                return str(f.numerator)
            sign = "-" if f < 0 else ""
            return f"{sign}\\frac{{{abs(f.numerator)}}}{{{f.denominator}}}"
        return f"{x:.12g}"

    if c.imag == 0:
        return real_part(c.real)
    if c.real == 0:
        s = real_part(c.imag)
        return "i" if s == "1" else "-i" if s == "-1" else f"{s}i"
    return f"({real_part(c.real)}{'+' if c.imag > 0 else '-'}{real_part(abs(c.imag))}i)"

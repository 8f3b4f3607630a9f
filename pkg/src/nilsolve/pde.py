"""Linear constant-coefficient PDEs ``sum_alpha C_alpha d^alpha u = 0``."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidDimension


@dataclass(frozen=True)
class PdeSpec:
    """Terms ``(alpha, C_alpha)`` of the operator; ``alpha`` has length ``d``."""

    d: int
    terms: tuple[tuple[tuple[int, ...], complex], ...]
    name: str = ""

    def __post_init__(self):
        seen = set()
        clean = []
        for alpha, c in self.terms:
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.d or min(alpha) < 0:
                raise ValueError(f"multi-index {alpha} does not fit d={self.d}")
            if alpha in seen:
                raise ValueError(f"duplicate multi-index {alpha}")
            seen.add(alpha)
            if complex(c) != 0:
                clean.append((alpha, complex(c)))
        if self.d < 1:
            raise InvalidDimension("a PDE needs at least one variable")
        object.__setattr__(self, "terms", tuple(sorted(clean, key=lambda t: (-sum(t[0]), t[0]))))
        if self.p < 1:
            raise ValueError("PDE order must be >= 1")

    @classmethod
    def from_mapping(cls, d: int, terms: Mapping[Sequence[int], complex], name: str = "") -> "PdeSpec":
        return cls(d, tuple((tuple(a), complex(c)) for a, c in terms.items()), name)

    @property
    def p(self) -> int:
        return max((sum(a) for a, _ in self.terms), default=0)

    @property
    def is_homogeneous(self) -> bool:
        """Only top-order terms present (the analytic family applies)."""
        return all(sum(a) == self.p for a, _ in self.terms)

    def univariate(self, values: Sequence[complex], lift_index: int) -> np.ndarray:
        """Coefficients (ascending) of ``c -> P(values with slot lift_index := c)``."""
        deg = max(a[lift_index] for a, _ in self.terms)
        out = np.zeros(deg + 1, dtype=complex)
        for alpha, c in self.terms:
            w = c
            for j, e in enumerate(alpha):
                if j != lift_index and e:
                    w *= complex(values[j]) ** e
            out[alpha[lift_index]] += w
        return out

    def symbol(self, y: Sequence[complex]) -> complex:
        """The characteristic polynomial ``sum C_alpha y^alpha`` at a numeric point."""
        total = 0j
        for alpha, c in self.terms:
            w = c
            for j, e in enumerate(alpha):
                if e:
                    w *= complex(y[j]) ** e
            total += w
        return total

    def to_json(self) -> dict:
        out = {
            "d": self.d,
            "terms": [{"alpha": list(a), "re": c.real, "im": c.imag} for a, c in self.terms],
        }
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "PdeSpec":
        try:
            d = int(data["d"])
            terms = [(tuple(t["alpha"]), complex(t["re"], t.get("im", 0.0))) for t in data["terms"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed PDE spec: missing field {exc}") from exc
        return cls(d, tuple(terms), data.get("name", ""))

    @classmethod
    def load(cls, path: str | Path) -> "PdeSpec":
        return cls.from_json(json.loads(Path(path).read_text()))


def _exact(c: complex):
    import sympy as sp

    return sp.Rational(Fraction(c.real)) + sp.I * sp.Rational(Fraction(c.imag))


@lru_cache(maxsize=None)
def squarefree_part(pde: PdeSpec) -> PdeSpec:
    """Drop repeated factors of the symbol, e.g. ``(y1^2 + y2^2)^2 -> y1^2 + y2^2``.

    Every zero of the reduced symbol is a zero of the original, and the
    reduced symbol has simple order-0 roots for generic free data.
    Coefficients are converted to exact Gaussian rationals first.
    """
    import sympy as sp

    ys = sp.symbols(f"y1:{pde.d + 1}")
    expr = sum(_exact(c) * sp.Mul(*[y**e for y, e in zip(ys, a)]) for a, c in pde.terms)
    try:
        poly = sp.Poly(expr, *ys, domain="QQ_I")
        part = sp.sqf_part(poly)
    except (sp.PolynomialError, NotImplementedError):  # pragma: no cover - defensive
        return pde
    if part.total_degree() == poly.total_degree():
        return pde
    terms = tuple((tuple(m), complex(sp.sympify(c))) for m, c in part.terms())
    return PdeSpec(pde.d, terms, pde.name + ":squarefree" if pde.name else "squarefree")

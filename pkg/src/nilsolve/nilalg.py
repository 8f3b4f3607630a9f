"""Finite-dimensional commutative algebras with a triangular multiplication table.

An algebra of dimension ``n`` has the basis ``I_0 = 1, I_1, ..., I_{n-1}`` and
products ``I_r I_s = sum_k Y[r, s, k] I_k`` where the structure constant
``Y[r, s, k]`` may be nonzero only for ``k >= max(r, s) + 1``.  Every ``I_r``
with ``r >= 1`` is therefore nilpotent.

The rho-chain ``{1, rho, ..., rho^{n-1}}`` with ``rho^n = 0`` is the special
case ``Y[r, s, r + s] = 1``.  It is the only table used by the solvers, so it
gets a fast multiplication path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import AlgebraMismatch, InvalidDimension, InvalidTable, NonInvertible

RHO_CHAIN = "rho_chain"
GENERAL = "general"

# below this |c_0| an element is treated as singular (underflow guard only)
INVERT_THRESHOLD = 1e-300
ASSOC_RTOL = 1e-12


@dataclass(frozen=True)
class AlgebraTable:
    """Structure constants of an ``n``-dimensional triangular algebra.

    ``constants`` holds ``((r, s, k), value)`` pairs with ``r <= s``; the
    mirrored entry ``(s, r, k)`` is implied by commutativity.  Build instances
    through :func:`make_rho_chain` or :meth:`AlgebraTable.general` so the
    invariants are checked.
    """

    n: int
    constants: tuple[tuple[tuple[int, int, int], complex], ...]
    kind: str = GENERAL

    @classmethod
    def general(
        cls,
        n: int,
        constants: Mapping[tuple[int, int, int], complex],
        check: bool = True,
    ) -> "AlgebraTable":
        if n < 2:
            raise InvalidDimension(f"algebra dimension must be >= 2, got {n}")
        canon: dict[tuple[int, int, int], complex] = {}
        for (r, s, k), value in constants.items():
            value = complex(value)
            if not (1 <= r <= n - 1 and 1 <= s <= n - 1 and 0 <= k <= n - 1):
                raise InvalidTable(f"index out of range in constant {(r, s, k)} for n={n}")
            if value == 0:
                continue
            if k < max(r, s) + 1:
                raise InvalidTable(
                    f"constant {(r, s, k)} violates triangularity (need k >= {max(r, s) + 1})"
                )
            key = (min(r, s), max(r, s), k)
            if key in canon and canon[key] != value:
                raise InvalidTable(f"asymmetric constants for I_{r} I_{s} -> I_{k}")
            canon[key] = value
        table = cls(n=n, constants=tuple(sorted(canon.items())), kind=GENERAL)
        if check:
            table.check_associative()
        return table

    @cached_property
    def products(self) -> dict[tuple[int, int], tuple[tuple[int, complex], ...]]:
        """``(r, s) -> ((k, Y[r, s, k]), ...)`` for both orderings of ``r, s``."""
        out: dict[tuple[int, int], list[tuple[int, complex]]] = {}
        for (r, s, k), value in self.constants:
            out.setdefault((r, s), []).append((k, value))
            if r != s:
                out.setdefault((s, r), []).append((k, value))
        return {key: tuple(v) for key, v in out.items()}

    def constant(self, r: int, s: int, k: int) -> complex:
        for kk, value in self.products.get((r, s), ()):
            if kk == k:
                return value
        return 0j

    def basis_product(self, r: int, s: int) -> np.ndarray:
        """Coefficient vector of ``I_r I_s``."""
        out = np.zeros(self.n, dtype=complex)
        if r == 0 or s == 0:
            out[r + s] = 1.0
            return out
        for k, value in self.products.get((r, s), ()):
            out[k] += value
        return out

    def check_associative(self) -> None:
        scale = max([1.0] + [abs(v) for _, v in self.constants]) ** 2
        basis = [basis_element(self, r) for r in range(1, self.n)]
        for a in basis:
            for b in basis:
                ab = mul(a, b)
                for c in basis:
                    left = mul(ab, c).coeffs
                    right = mul(a, mul(b, c)).coeffs
                    if np.max(np.abs(left - right)) > ASSOC_RTOL * scale:
                        raise InvalidTable("multiplication table is not associative")

    def truncate(self, m: int) -> "AlgebraTable":
        """Restriction to ``{I_0, ..., I_{m-1}}`` (drop the last rows, zero ``I_{>=m}``)."""
        if m < 2 or m > self.n:
            raise InvalidDimension(f"cannot truncate dimension {self.n} to {m}")
        if self.kind == RHO_CHAIN:
            return make_rho_chain(m)
        kept = {key: v for key, v in self.constants if key[2] < m}
        return AlgebraTable(n=m, constants=tuple(sorted(kept.items())), kind=GENERAL)

    def is_extension_of(self, smaller: "AlgebraTable") -> bool:
        """True when truncating this table to ``smaller.n`` reproduces ``smaller``."""
        if smaller.n >= self.n:
            return False
        mine = dict(self.truncate(smaller.n).constants)
        return mine == dict(smaller.constants)

    # JSON ---------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "n": self.n,
            "kind": self.kind,
            "constants": [
                {"r": r, "s": s, "k": k, "re": v.real, "im": v.imag}
                for (r, s, k), v in self.constants
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "AlgebraTable":
        n = int(data["n"])
        kind = data.get("kind", GENERAL)
        constants = {
            (int(c["r"]), int(c["s"]), int(c["k"])): complex(c["re"], c.get("im", 0.0))
            for c in data.get("constants", [])
        }
        if kind == RHO_CHAIN:
            table = make_rho_chain(n)
            if constants and dict(table.constants) != {
                (min(r, s), max(r, s), k): v for (r, s, k), v in constants.items()
            }:
                raise InvalidTable("rho_chain table carries non-chain constants")
            return table
        return cls.general(n, constants)


def make_rho_chain(n: int) -> AlgebraTable:
    """The chain algebra with basis ``1, rho, ..., rho^{n-1}`` and ``rho^n = 0``."""
    if n < 2:
        raise InvalidDimension(f"algebra dimension must be >= 2, got {n}")
    constants = tuple(
        ((r, s, r + s), 1 + 0j) for r in range(1, n) for s in range(r, n) if r + s <= n - 1
    )
    return AlgebraTable(n=n, constants=constants, kind=RHO_CHAIN)


@dataclass(frozen=True, eq=False)
class TruncatedElement:
    """An algebra element ``sum_r coeffs[r] I_r``.  Immutable."""

    table: AlgebraTable
    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=complex).reshape(-1)
        if arr.shape[0] != self.table.n:
            raise InvalidDimension(
                f"expected {self.table.n} coefficients, got {arr.shape[0]}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)

    @property
    def n(self) -> int:
        return self.table.n

    def scalar_part(self) -> complex:
        return complex(self.coeffs[0])

    def nilpotent_part(self) -> "TruncatedElement":
        c = self.coeffs.copy()
        c[0] = 0
        return TruncatedElement(self.table, c)

    def truncate(self, m: int) -> "TruncatedElement":
        return TruncatedElement(self.table.truncate(m), self.coeffs[:m])

    def __add__(self, other):
        if isinstance(other, TruncatedElement):
            return add(self, other)
        return add(self, scalar(self.table, other))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return neg(self)

    def __mul__(self, other):
        if isinstance(other, TruncatedElement):
            return mul(self, other)
        return scale(other, self)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return power(self, e)

    def __repr__(self) -> str:
        terms = ", ".join(f"{c:.6g}" for c in self.coeffs)
        return f"TruncatedElement(n={self.n}, kind={self.table.kind}, [{terms}])"

    def to_json(self) -> dict:
        return {"n": self.n, "coeffs": [[c.real, c.imag] for c in self.coeffs.tolist()]}

    @classmethod
    def from_json(cls, data: Mapping, table: AlgebraTable | None = None) -> "TruncatedElement":
        n = int(data["n"])
        table = table if table is not None else make_rho_chain(n)
        if table.n != n:
            raise AlgebraMismatch(f"element of dimension {n} does not fit table of dimension {table.n}")
        return cls(table, [complex(re, im) for re, im in data["coeffs"]])


def element(table: AlgebraTable, coeffs: Sequence[complex]) -> TruncatedElement:
    """Element from a possibly short coefficient list (missing entries are zero)."""
    c = np.zeros(table.n, dtype=complex)
    vals = np.asarray(coeffs, dtype=complex).reshape(-1)
    if vals.shape[0] > table.n:
        raise InvalidDimension(f"{vals.shape[0]} coefficients for dimension {table.n}")
    c[: vals.shape[0]] = vals
    return TruncatedElement(table, c)


def scalar(table: AlgebraTable, value: complex) -> TruncatedElement:
    return element(table, [value])


def one(table: AlgebraTable) -> TruncatedElement:
    return scalar(table, 1.0)


def basis_element(table: AlgebraTable, r: int) -> TruncatedElement:
    c = np.zeros(table.n, dtype=complex)
    c[r] = 1.0
    return TruncatedElement(table, c)


def _same_table(a: TruncatedElement, b: TruncatedElement) -> None:
    if a.table is not b.table and a.table != b.table:
        raise AlgebraMismatch(
            f"cannot combine elements of different algebras (n={a.n} {a.table.kind} "
            f"vs n={b.n} {b.table.kind})"
        )


def add(a: TruncatedElement, b: TruncatedElement) -> TruncatedElement:
    _same_table(a, b)
    return TruncatedElement(a.table, a.coeffs + b.coeffs)


def scale(c: complex, a: TruncatedElement) -> TruncatedElement:
    return TruncatedElement(a.table, complex(c) * a.coeffs)


def neg(a: TruncatedElement) -> TruncatedElement:
    return TruncatedElement(a.table, -a.coeffs)


def _mul_rho(a: list[complex], b: list[complex]) -> list[complex]:
    # explicit loop: coefficient k must not depend on n (bitwise extension property)
    n = len(a)
    return [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n)]


def mul(a: TruncatedElement, b: TruncatedElement) -> TruncatedElement:
    """Product in the algebra shared by ``a`` and ``b``."""
    _same_table(a, b)
    ac = a.coeffs.tolist()
    bc = b.coeffs.tolist()
    if a.table.kind == RHO_CHAIN:
        return TruncatedElement(a.table, _mul_rho(ac, bc))
    n = a.n
    out = [0j] * n
    a0, b0 = ac[0], bc[0]
    out[0] = a0 * b0
    for k in range(1, n):
        out[k] = a0 * bc[k] + b0 * ac[k]
    for (r, s), entries in a.table.products.items():
        ar, bs = ac[r], bc[s]
        if ar == 0 or bs == 0:
            continue
        w = ar * bs
        for k, value in entries:
            out[k] += w * value
    return TruncatedElement(a.table, out)


def power(a: TruncatedElement, e: int) -> TruncatedElement:
    """``a**e`` by binary exponentiation; negative exponents go through :func:`invert`."""
    e = int(e)
    if e < 0:
        return power(invert(a), -e)
    result = one(a.table)
    base = a
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


def invert(a: TruncatedElement) -> TruncatedElement:
    """Multiplicative inverse, ``a^{-1} = c_0^{-1} sum_j (-N/c_0)^j``."""
    c0 = a.scalar_part()
    if abs(c0) < INVERT_THRESHOLD:
        raise NonInvertible(f"element with scalar part {c0!r} is not invertible")
    u = scale(1.0 / c0, a.nilpotent_part())
    s = one(a.table)
    for _ in range(a.n - 1):
        s = one(a.table) - mul(u, s)
    return scale(1.0 / c0, s)


def exp_elem(z: TruncatedElement) -> TruncatedElement:
    """``exp z = e^{c_0} sum_{r<n} N^r / r!``; the series terminates because ``N^n = 0``."""
    nil = z.nilpotent_part()
    s = one(z.table)
    for r in range(z.n - 1, 0, -1):
        s = one(z.table) + scale(1.0 / r, mul(nil, s))
    return scale(np.exp(z.scalar_part()), s)


def exp_series(z: TruncatedElement, terms: int = 50) -> TruncatedElement:
    """Plain partial sum of ``sum z^r / r!``; slow reference used by the tests."""
    term = one(z.table)
    total = one(z.table)
    for r in range(1, terms):
        term = scale(1.0 / r, mul(term, z))
        total = add(total, term)
    return total


def mul_bruteforce(a: TruncatedElement, b: TruncatedElement) -> TruncatedElement:
    """Double sum over basis products; independent of the fast paths in :func:`mul`."""
    _same_table(a, b)
    out = np.zeros(a.n, dtype=complex)
    for r in range(a.n):
        for s in range(a.n):
            out += a.coeffs[r] * b.coeffs[s] * a.table.basis_product(r, s)
    return TruncatedElement(a.table, out)


def linear_combination(
    coeffs: Iterable[complex], elements: Sequence[TruncatedElement]
) -> TruncatedElement:
    elements = list(elements)
    total = np.zeros(elements[0].n, dtype=complex)
    for c, e in zip(coeffs, elements):
        _same_table(elements[0], e)
        total = total + complex(c) * e.coeffs
    return TruncatedElement(elements[0].table, total)


def random_table(n: int, rng: np.random.Generator, nvars: int = 2, mix: float = 1.0) -> AlgebraTable:
    """A random valid triangular table.

    The base algebra is ``C[t_1..t_v]`` modulo all monomials outside a random
    order ideal of size ``n`` (monomials sorted by total degree, so products
    move strictly up the basis).  A random unitriangular change of the
    nilpotent basis then mixes the constants.  Associativity holds by
    construction, up to rounding.
    """
    if n < 2:
        raise InvalidDimension(f"algebra dimension must be >= 2, got {n}")
    zero = (0,) * nvars
    ideal = [zero]
    while len(ideal) < n:
        corners = set()
        for mono in ideal:
            for v in range(nvars):
                cand = tuple(e + (i == v) for i, e in enumerate(mono))
                if cand in ideal:
                    continue
                # every divisor must already be present
                if all(
                    cand[i] == 0 or tuple(e - (j == i) for j, e in enumerate(cand)) in ideal
                    for i in range(nvars)
                ):
                    corners.add(cand)
        corners = sorted(corners)
        ideal.append(corners[rng.integers(len(corners))])
    monos = sorted(ideal, key=lambda m: (sum(m), m))
    index = {m: i for i, m in enumerate(monos)}

    m = n - 1
    T = np.eye(m, dtype=complex)
    for r in range(m):
        for j in range(r + 1, m):
            if sum(monos[j + 1]) > sum(monos[r + 1]):
                T[r, j] = mix * (rng.normal() + 1j * rng.normal())
    Tinv = np.linalg.inv(T)

    def mono_product(i: int, j: int) -> np.ndarray:
        out = np.zeros(m, dtype=complex)
        prod = tuple(a + b for a, b in zip(monos[i], monos[j]))
        if prod in index:
            out[index[prod] - 1] = 1.0
        return out

    constants: dict[tuple[int, int, int], complex] = {}
    for r in range(1, n):
        for s in range(r, n):
            prod = np.zeros(m, dtype=complex)
            for i in range(m):
                for j in range(m):
                    w = T[r - 1, i] * T[s - 1, j]
                    if w != 0:
                        prod += w * mono_product(i + 1, j + 1)
            # prod holds monomial coordinates; convert to the J basis
            y = prod @ Tinv
            for k in range(1, n):
                if abs(y[k - 1]) > 1e-13:
                    constants[(r, s, k)] = complex(y[k - 1])
    return AlgebraTable.general(n, constants)


def factorial_weights(n: int) -> list[float]:
    return [1.0 / math.factorial(r) for r in range(n)]

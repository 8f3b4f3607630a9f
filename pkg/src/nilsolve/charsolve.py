"""Solve the characteristic equation on the rho-chain extension sequence.

The PDE ``sum C_alpha d^alpha u = 0`` is solved by ``exp zeta`` with
``zeta = sum_j x_j e_j`` whenever ``P(e_1, ..., e_d) = 0`` in the algebra,
``P`` being the symbol ``sum C_alpha y^alpha``.  ``d - 1`` vectors are free;
the remaining one is found order by order in ``rho``: a polynomial root at
order 0, then one linear equation per order with the slope ``q'(c_0)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import AlgebraMismatch, DegenerateCharacteristic, DegenerateLift, NoRoot
from .nilalg import (
    RHO_CHAIN,
    AlgebraTable,
    TruncatedElement,
    element,
    make_rho_chain,
    mul,
    one,
    power,
)
from .pde import PdeSpec, squarefree_part

ROOT_CLUSTER_RTOL = 1e-6
LIFT_RTOL = 1e-10
RESIDUAL_RTOL = 1e-9


class RealSpectrumWarning(UserWarning):
    """All scalar parts are real, so the spectrum ``xi`` is real for real x."""


@dataclass(frozen=True)
class Root:
    value: complex
    multiplicity: int = 1

    @property
    def simple(self) -> bool:
        return self.multiplicity == 1


RootChoice = Union[int, str, complex, Callable[[list[Root]], int]]


@dataclass(frozen=True, eq=False)
class CharBasis:
    """Vectors ``e_1..e_d`` solving the characteristic equation, with provenance."""

    table: AlgebraTable
    vectors: tuple[TruncatedElement, ...]
    free_index: int
    pde: PdeSpec
    branch: dict = field(default_factory=dict)
    provenance: str = "generic"

    @property
    def n(self) -> int:
        return self.table.n

    @property
    def d(self) -> int:
        return len(self.vectors)

    @property
    def matrix(self) -> np.ndarray:
        """``a[j, r]``: coefficient of ``I_r`` in ``e_{j+1}``."""
        return np.array([v.coeffs for v in self.vectors])

    @property
    def nonreal_spectrum(self) -> bool:
        return bool(np.any(np.abs(self.matrix[:, 0].imag) > 0))

    def truncate(self, m: int) -> "CharBasis":
        table = self.table.truncate(m)
        vecs = tuple(TruncatedElement(table, v.coeffs[:m]) for v in self.vectors)
        return CharBasis(table, vecs, self.free_index, self.pde, dict(self.branch), self.provenance)

    def residual(self) -> float:
        return characteristic_residual(self.pde, self.vectors)

    def to_json(self) -> dict:
        branch = {
            k: ([v.real, v.imag] if isinstance(v, complex) else v) for k, v in self.branch.items()
        }
        return {
            "table": self.table.to_json(),
            "pde": self.pde.to_json(),
            "vectors": [v.to_json() for v in self.vectors],
            "free_index": self.free_index,
            "branch": branch,
            "provenance": {"method": self.provenance},
            "nonreal_spectrum": self.nonreal_spectrum,
        }

    @classmethod
    def from_json(cls, data: dict) -> "CharBasis":
        table = AlgebraTable.from_json(data["table"])
        vecs = tuple(TruncatedElement.from_json(v, table) for v in data["vectors"])
        branch = dict(data.get("branch", {}))
        if "root" in branch and isinstance(branch["root"], list):
            branch["root"] = complex(*branch["root"])
        return cls(
            table,
            vecs,
            int(data["free_index"]),
            PdeSpec.from_json(data["pde"]),
            branch,
            data.get("provenance", {}).get("method", "generic"),
        )


def eval_characteristic(pde: PdeSpec, vectors: Sequence[TruncatedElement]) -> TruncatedElement:
    """``sum_alpha C_alpha e_1^{alpha_1} ... e_d^{alpha_d}`` in the vectors' algebra."""
    if len(vectors) != pde.d:
        raise ValueError(f"need {pde.d} vectors, got {len(vectors)}")
    table = vectors[0].table
    for v in vectors[1:]:
        if v.table != table:
            raise AlgebraMismatch("characteristic vectors live in different algebras")
    cache: dict[tuple[int, int], TruncatedElement] = {}

    def pw(j: int, e: int) -> TruncatedElement:
        if (j, e) not in cache:
            cache[(j, e)] = power(vectors[j], e)
        return cache[(j, e)]

    total = np.zeros(table.n, dtype=complex)
    for alpha, c in pde.terms:
        term = one(table)
        for j, e in enumerate(alpha):
            if e:
                term = mul(term, pw(j, e))
        total = total + c * term.coeffs
    return TruncatedElement(table, total)


def characteristic_residual(pde: PdeSpec, vectors: Sequence[TruncatedElement]) -> float:
    """Largest coefficient of the characteristic element, relative to the term sizes."""
    res = eval_characteristic(pde, vectors).coeffs
    norms = [max(1e-300, float(np.max(np.abs(v.coeffs)))) for v in vectors]
    scale = sum(abs(c) * np.prod([norms[j] ** e for j, e in enumerate(a)]) for a, c in pde.terms)
    return float(np.max(np.abs(res)) / max(scale, 1e-300))


# order 0 ---------------------------------------------------------------

def _companion_roots(coeffs: np.ndarray) -> np.ndarray:
    """Eigenvalues of the companion matrix of an ascending coefficient vector."""
    deg = coeffs.shape[0] - 1
    lead = coeffs[-1]
    comp = np.zeros((deg, deg), dtype=complex)
    comp[1:, :-1] = np.eye(deg - 1)
    comp[:, -1] = -coeffs[:-1] / lead
    return np.linalg.eigvals(comp)


def _polyval(coeffs: np.ndarray, x: complex) -> complex:
    acc = 0j
    for c in coeffs[::-1]:
        acc = acc * x + c
    return acc


def _polyder(coeffs: np.ndarray) -> np.ndarray:
    return coeffs[1:] * np.arange(1, coeffs.shape[0])


def _polish(coeffs: np.ndarray, x: complex, steps: int = 3) -> complex:
    d1 = _polyder(coeffs)
    for _ in range(steps):
        f = _polyval(coeffs, x)
        g = _polyval(d1, x)
        if g == 0 or not np.isfinite(g):
            break
        dx = f / g
        if not np.isfinite(dx) or abs(dx) > 1e-3 * max(1.0, abs(x)):
            break
        x = x - dx
    return complex(x)


def univariate_roots(coeffs: np.ndarray) -> list[Root]:
    """Distinct roots of ``sum coeffs[j] c^j`` with multiplicities, sorted by (re, im)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    mag = float(np.max(np.abs(coeffs))) if coeffs.size else 0.0
    if mag == 0.0:
        raise DegenerateCharacteristic("order-0 polynomial is identically zero")
    nz = np.nonzero(np.abs(coeffs) > 1e-14 * mag)[0]
    coeffs = coeffs[: nz[-1] + 1]
    if coeffs.shape[0] == 1:
        raise NoRoot("order-0 polynomial is a nonzero constant")
    raw = sorted(_companion_roots(coeffs), key=lambda z: (z.real, z.imag))
    clusters: list[list[complex]] = []
    for z in raw:
        for cl in clusters:
            c = np.mean(cl)
            if abs(z - c) <= ROOT_CLUSTER_RTOL * max(1.0, abs(c)):
                cl.append(z)
                break
        else:
            clusters.append([z])
    roots = []
    for cl in clusters:
        c = complex(np.mean(cl))
        if len(cl) == 1:
            c = _polish(coeffs, c)
        roots.append(Root(c, len(cl)))
    return sorted(roots, key=lambda r: (round(r.value.real, 9), round(r.value.imag, 9)))


def solve_order0(pde: PdeSpec, free0: Sequence[complex], lift_index: int) -> list[Root]:
    """Roots of ``q(c) = P(free0 with the lifted scalar set to c)``.

    ``free0`` lists the scalar parts of the ``d - 1`` free vectors in order,
    skipping ``lift_index``.
    """
    values = _insert(list(free0), lift_index, 0j)
    return univariate_roots(pde.univariate(values, lift_index))


def _insert(free: list, lift_index: int, value):
    out = list(free)
    out.insert(lift_index, value)
    return out


def _select(roots: list[Root], choice: RootChoice) -> int:
    if callable(choice):
        return int(choice(roots))
    if isinstance(choice, (int, np.integer)) and not isinstance(choice, bool):
        if not -len(roots) <= choice < len(roots):
            raise IndexError(f"root index {choice} out of range for {len(roots)} roots")
        return int(choice) % len(roots)
    if isinstance(choice, str):
        keys = {
            "upper": lambda r: (r.value.imag, r.value.real),
            "lower": lambda r: (-r.value.imag, -r.value.real),
            "right": lambda r: (r.value.real, r.value.imag),
            "left": lambda r: (-r.value.real, -r.value.imag),
        }
        if choice not in keys:
            raise ValueError(f"unknown root selector {choice!r}")
        return max(range(len(roots)), key=lambda i: keys[choice](roots[i]))
    target = complex(choice)
    return min(range(len(roots)), key=lambda i: abs(roots[i].value - target))


# lifting ---------------------------------------------------------------

def _slope(pde: PdeSpec, values0: Sequence[complex], lift_index: int) -> tuple[complex, float]:
    q = pde.univariate(values0, lift_index)
    c0 = values0[lift_index]
    dq = _polyval(_polyder(q), c0) if q.shape[0] > 1 else 0j
    scale = float(np.sum(np.abs(q) * max(1.0, abs(c0)) ** np.arange(q.shape[0])))
    return dq, scale


def _known_term(pde: PdeSpec, rows: list[list[complex]], r: int) -> complex:
    """rho^r coefficient of P evaluated with the given (r+1)-long coefficient rows."""
    table = make_rho_chain(max(r + 1, 2))
    vecs = [element(table, row[: r + 1]) for row in rows]
    return complex(eval_characteristic(pde, vecs).coeffs[r])


def lift_order(pde: PdeSpec, partial: CharBasis, free_r: Sequence[complex]) -> complex:
    """Coefficient of the lifted vector at the next order ``r = partial.n``.

    ``partial`` is solved through order ``r - 1``; ``free_r`` holds the order
    ``r`` coefficients of the free vectors.  Solves
    ``q'(c_0) m_r + K_r = 0`` where ``K_r`` is the ``rho^r`` coefficient with
    ``m_r = 0``.
    """
    work = squarefree_part(pde) if partial.branch.get("reduced") else pde
    j = partial.free_index
    r = partial.n
    rows = [list(v.coeffs) for v in partial.vectors]
    free_iter = iter(free_r)
    for i, row in enumerate(rows):
        row.append(0j if i == j else complex(next(free_iter)))
    return _lift_coefficient(work, rows, j, r)


def _lift_coefficient(work: PdeSpec, rows: list[list[complex]], j: int, r: int) -> complex:
    values0 = [row[0] for row in rows]
    dq, scale = _slope(work, values0, j)
    if abs(dq) < LIFT_RTOL * max(scale, 1e-300):
        raise DegenerateLift(
            f"q'(c0) = {dq:.3g} vanishes at the order-0 root {values0[j]:.6g}: multiple root"
        )
    saved = rows[j][r]
    rows[j][r] = 0j
    known = _known_term(work, rows, r)
    rows[j][r] = saved
    return -known / dq


def solve_characteristic(
    pde: PdeSpec,
    n: int,
    free,
    lift_index: int | None = None,
    root_choice: RootChoice = 0,
    reduce: bool = True,
) -> CharBasis:
    """Solve ``P(e_1..e_d) = 0`` in the rho-chain algebra of dimension ``n``.

    Parameters
    ----------
    pde : PdeSpec
    n : int
        Algebra dimension (``n >= 2``).
    free : array_like, shape (d-1, >=n)
        Coefficients of the free vectors in order, skipping ``lift_index``.
    lift_index : int, optional
        0-based index of the vector solved for; defaults to the last one.
    root_choice : int, str, complex or callable
        Which order-0 root to lift: an index into the sorted roots, one of
        ``"upper" | "lower" | "right" | "left"``, a complex target (nearest
        root wins), or a callable taking the root list.
    reduce : bool
        Lift on the square-free part of the symbol.  Repeated factors
        (e.g. the biharmonic operator) otherwise give multiple roots.

    Raises
    ------
    DegenerateCharacteristic, NoRoot, DegenerateLift
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    d = pde.d
    j = d - 1 if lift_index is None else int(lift_index)
    free = np.asarray(free, dtype=complex)
    free = free.reshape(d - 1, -1) if free.size else np.zeros((d - 1, n), dtype=complex)
    if free.shape[0] != d - 1 or (d > 1 and free.shape[1] < n):
        raise ValueError(f"free data must have shape ({d - 1}, >= {n}), got {free.shape}")
    work = squarefree_part(pde) if reduce else pde
    reduced = work is not pde

    roots = solve_order0(work, free[:, 0], j)
    idx = _select(roots, root_choice)
    root = roots[idx]
    if not root.simple:
        raise DegenerateLift(
            f"order-0 root {root.value:.6g} has multiplicity {root.multiplicity}; lifting is not unique"
        )
    rows: list[list[complex]] = []
    fi = 0
    for i in range(d):
        if i == j:
            rows.append([root.value] + [0j] * (n - 1))
        else:
            rows.append([complex(c) for c in free[fi, :n]])
            fi += 1
    for r in range(1, n):
        rows[j][r] = _lift_coefficient(work, rows, j, r)

    table = make_rho_chain(n)
    vectors = tuple(TruncatedElement(table, row) for row in rows)
    branch = {
        "root": root.value,
        "root_index": idx,
        "roots": [[x.value.real, x.value.imag, x.multiplicity] for x in roots],
        "reduced": reduced,
    }
    basis = CharBasis(table, vectors, j, pde, branch, "generic")
    if not basis.nonreal_spectrum:
        warnings.warn("all scalar parts are real: spectrum is real", RealSpectrumWarning, stacklevel=2)
    return basis


def check_basis(basis: CharBasis, rtol: float = RESIDUAL_RTOL) -> float:
    res = basis.residual()
    if not res < rtol:
        raise AssertionError(f"characteristic residual {res:.3g} exceeds {rtol}")
    return res


def scale_vector(basis: CharBasis, index: int, factor: complex, pde: PdeSpec, provenance: str) -> CharBasis:
    """Multiply one vector by a scalar (transform laws between related PDEs)."""
    vecs = list(basis.vectors)
    vecs[index] = TruncatedElement(basis.table, factor * vecs[index].coeffs)
    return CharBasis(basis.table, tuple(vecs), basis.free_index, pde, dict(basis.branch), provenance)


def is_rho_chain(table: AlgebraTable) -> bool:
    return table.kind == RHO_CHAIN

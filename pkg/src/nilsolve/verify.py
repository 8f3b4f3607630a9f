"""Independent checks of generated solutions.

The PDE is applied through Taylor jets of each member, which are exact for
compositions with linear forms and share no code with the resolvent
expansion beyond the member's coefficient polynomials.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .charsolve import CharBasis, eval_characteristic
from .errors import InsufficientDepth, InsufficientMembers
from .jets import MultiJet, multi_indices
from .nilalg import AlgebraTable
from .pde import PdeSpec
from .solutions import FamilyMember, XiForms
from .sparsepoly import Poly

RESIDUAL_THRESHOLD = 1e-8


# jets of members ----------------------------------------------------

def _poly_jet(poly: Poly, lin: list[MultiJet], d: int, deg: int, npts: int) -> MultiJet:
    total = MultiJet.constant(d, deg, np.zeros(npts))
    powers: dict[tuple[int, int], MultiJet] = {}

    def pw(j: int, e: int) -> MultiJet:
        if (j, e) not in powers:
            powers[(j, e)] = lin[j] if e == 1 else pw(j, e - 1) * lin[j]
        return powers[(j, e)]

    for exps, c in poly.terms.items():
        term = MultiJet.constant(d, deg, np.full(npts, c))
        for j, e in enumerate(exps):
            if e:
                term = term * pw(j, e)
        total = total + term
    return total


def jet_of_member(member: FamilyMember, xf: XiForms | None, x, deg: int) -> MultiJet:
    """Taylor jet of ``member`` to total degree ``deg`` at points ``x`` (shape ``(N, d)`` or ``(d,)``)."""
    xf = member.xf if xf is None else xf
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    npts, d = pts.shape
    vals = xf.values(pts)  # (N, n)
    forms = xf.matrix
    lin = [MultiJet.linear(d, deg, vals[:, r], forms[r]) for r in range(1, forms.shape[0])]
    xi_jet = MultiJet.linear(d, deg, vals[:, 0], forms[0])
    outer = member.outer_jets(vals[:, 0], deg)
    total = MultiJet.constant(d, deg, np.zeros(npts))
    for s, q in member.terms.items():
        total = total + _poly_jet(q, lin, d, deg, npts) * xi_jet.compose(outer[s])
    return total


def pde_residual(pde: PdeSpec, jet: MultiJet) -> np.ndarray:
    """``sum C_alpha d^alpha u`` from the jet, one value per base point."""
    if jet.deg < pde.p:
        raise InsufficientDepth(f"jet degree {jet.deg} below PDE order {pde.p}")
    return sum(c * jet.derivative(alpha) for alpha, c in pde.terms)


# sampling and reports -----------------------------------------------

@dataclass(frozen=True)
class SampleSpec:
    points: int = 100
    low: float = -1.0
    high: float = 1.0
    seed: int = 0

    def draw(self, d: int) -> np.ndarray:
        return np.random.default_rng(self.seed).uniform(self.low, self.high, (self.points, d))


@dataclass
class MemberReport:
    kind: str
    index: int
    max_abs: float
    max_rel: float
    threshold: float
    worst_point: list[float]

    @property
    def passed(self) -> bool:
        return self.max_rel < self.threshold


@dataclass
class ResidualReport:
    """Aggregate residuals; ``max_rel = max_abs / (1 + max |u|)`` per member, maximised."""

    max_abs: float
    max_rel: float
    points: int
    worst_point: list[float]
    seed: int
    members: list[MemberReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(m.passed for m in self.members)

    def to_json(self) -> dict:
        out = asdict(self)
        for m, src in zip(out["members"], self.members):
            m["passed"] = src.passed
        out["passed"] = self.passed
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "ResidualReport":
        members = [
            MemberReport(**{k: v for k, v in m.items() if k != "passed"}) for m in data["members"]
        ]
        return cls(
            data["max_abs"], data["max_rel"], data["points"], data["worst_point"], data["seed"], members
        )


def member_threshold(xf: XiForms, index: int, base: float = RESIDUAL_THRESHOLD) -> float:
    """``base (1 + |forms|)^k``: room for coefficient growth with the member index."""
    return base * (1 + xf.norm()) ** index


def _member_residuals(pde: PdeSpec, member: FamilyMember, pts: np.ndarray):
    jet = jet_of_member(member, None, pts, pde.p)
    return np.abs(pde_residual(pde, jet)), np.abs(jet.coeffs[0])


def verify_family(
    pde: PdeSpec,
    members: Sequence[FamilyMember],
    xf: XiForms | None = None,
    sample: SampleSpec = SampleSpec(),
    threshold: float | None = None,
    jobs: int = 1,
) -> ResidualReport:
    """Residual of every member at ``sample.points`` random points.

    ``threshold`` fixes a flat pass level; by default it grows with the
    member index as in :func:`member_threshold`.  ``jobs > 1`` splits the
    points across threads; the result does not depend on it.
    """
    if not members:
        raise InsufficientMembers("no members to verify")
    d = pde.d
    pts = sample.draw(d)
    chunks = np.array_split(np.arange(pts.shape[0]), max(1, jobs))
    reports = []
    best = (-1.0, -1.0, 0)
    for member in members:
        if jobs > 1:
            with ThreadPoolExecutor(jobs) as pool:
                parts = list(pool.map(lambda c: _member_residuals(pde, member, pts[c]), chunks))
            res = np.concatenate([p[0] for p in parts])
            val = np.concatenate([p[1] for p in parts])
        else:
            res, val = _member_residuals(pde, member, pts)
        worst = int(np.argmax(res))  # first index on ties
        max_abs = float(res[worst])
        max_rel = max_abs / (1 + float(np.max(val)))
        thr = threshold if threshold is not None else member_threshold(xf or member.xf, member.index)
        reports.append(
            MemberReport(member.kind, member.index, max_abs, max_rel, thr, pts[worst].tolist())
        )
        if max_rel > best[0]:
            best = (max_rel, max_abs, worst)
    return ResidualReport(best[1], best[0], int(pts.shape[0]), pts[best[2]].tolist(), sample.seed, reports)


# finite differences ------------------------------------------------

def fd_derivative(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, alpha: Sequence[int], h: float) -> np.ndarray:
    """Central-difference ``d^alpha f`` (second order in ``h``) at points ``x``.

    The stencil is the tensor product of ``delta^q`` over coordinates,
    with nodes at ``(q/2 - i) h``.
    """
    x = np.atleast_2d(x)
    axes = []
    for j, q in enumerate(alpha):
        axes.append([((q / 2 - i) * h, (-1) ** i * math.comb(q, i)) for i in range(q + 1)])
    total = np.zeros(x.shape[0], dtype=complex)
    for combo in _product(axes):
        shift = np.array([c[0] for c in combo])
        w = math.prod(c[1] for c in combo)
        total = total + w * f(x + shift)
    return total / h ** sum(alpha)


def _product(axes):
    out = [()]
    for ax in axes:
        out = [o + (c,) for o in out for c in ax]
    return out


def richardson(f, x, alpha, h: float, levels: int = 2) -> np.ndarray:
    """Romberg table over steps ``h, h/2, ...``; each level removes one ``h^2`` term."""
    table = [fd_derivative(f, x, alpha, h / 2**i) for i in range(levels + 1)]
    for lev in range(1, levels + 1):
        fac = 4.0**lev
        table = [(fac * table[i + 1] - table[i]) / (fac - 1) for i in range(len(table) - 1)]
    return table[0]


def default_fd_step(order: int) -> float:
    """Balances rounding ``eps/h^q`` against the ``h^6`` truncation of two Richardson levels."""
    return float(np.finfo(float).eps ** (1.0 / (order + 6))) * 4


@dataclass
class FdComparison:
    max_rel_diff: float
    fd_residual: float
    jet_residual: float

    def agrees(self, tol: float = 1e-5) -> bool:
        return self.max_rel_diff < tol


def fd_cross_check(
    pde: PdeSpec,
    member: FamilyMember,
    x,
    step: float | None = None,
    levels: int = 2,
) -> FdComparison:
    """Compare every derivative the PDE uses, jets against finite differences.

    Differences are relative to ``1 + max |d^alpha u|``.  ``step=None``
    picks :func:`default_fd_step` per derivative order.
    """
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    jet = jet_of_member(member, None, pts, pde.p)
    worst = 0.0
    fd_res = np.zeros(pts.shape[0], dtype=complex)
    for alpha, c in pde.terms:
        exact = jet.derivative(alpha)
        h = step if step is not None else default_fd_step(sum(alpha))
        approx = richardson(member.evaluate, pts, alpha, h, levels) if sum(alpha) else member.evaluate(pts)
        worst = max(worst, float(np.max(np.abs(approx - exact)) / (1 + np.max(np.abs(exact)))))
        fd_res = fd_res + c * approx
    jet_res = float(np.max(np.abs(pde_residual(pde, jet))))
    return FdComparison(worst, float(np.max(np.abs(fd_res))), jet_res)


# algebra-level checks ----------------------------------------------

def _alg_mul(table: AlgebraTable, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of element arrays ``a, b`` of shape ``(n, ...)`` (leading axis = basis)."""
    shape = np.broadcast_shapes(a.shape, b.shape)
    out = np.zeros(shape, dtype=complex)
    out[0] = a[0] * b[0]
    out[1:] = a[0] * b[1:] + b[0] * a[1:]
    for (r, s), entries in table.products.items():
        w = a[r] * b[s]
        for k, value in entries:
            out[k] += value * w
    return out


def cauchy_riemann_check(basis: CharBasis, phi: Sequence[MultiJet]) -> float:
    """``max_j |(dPhi/dx_j) e_1 - (dPhi/dx_1) e_j|`` over components and points."""
    d = basis.d
    grads = [np.stack([c.coeffs[1 + j] for c in phi]) for j in range(d)]  # (n, N)
    vec = [v.coeffs[:, None] for v in basis.vectors]
    worst = 0.0
    for j in range(1, d):
        dev = _alg_mul(basis.table, grads[j], vec[0]) - _alg_mul(basis.table, grads[0], vec[j])
        worst = max(worst, float(np.max(np.abs(dev))))
    return worst


def exp_zeta_jets(members: Sequence[FamilyMember], x, deg: int = 1) -> list[MultiJet]:
    """Component jets of ``exp zeta`` from ``V_0..V_{n-1}``."""
    return [jet_of_member(m, None, x, deg) for m in members]


def identity_jets(xf: XiForms, x, deg: int = 1) -> list[MultiJet]:
    """Component jets of ``zeta`` itself."""
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    vals = xf.values(pts)
    return [MultiJet.linear(xf.d, deg, vals[:, r], xf.matrix[r]) for r in range(xf.n)]


def operator_on_exp(pde: PdeSpec, members: Sequence[FamilyMember], x) -> np.ndarray:
    """PDE applied to each component ``V_r`` of ``exp zeta``; shape ``(n, N)``."""
    return np.stack([pde_residual(pde, jet_of_member(m, None, x, pde.p)) for m in members])


def characteristic_times_exp(pde: PdeSpec, basis: CharBasis, members: Sequence[FamilyMember], x) -> np.ndarray:
    """Components of ``P(e_1..e_d) exp zeta``; equals :func:`operator_on_exp`."""
    char = eval_characteristic(pde, basis.vectors).coeffs[:, None]
    comps = np.stack([np.atleast_1d(m.evaluate(np.atleast_2d(x))) for m in members])
    return _alg_mul(basis.table, comps, char)


# contour integral --------------------------------------------------

@dataclass(frozen=True)
class CircleSpec:
    center: tuple[float, ...]
    radius: float = 1.0
    axes: tuple[int, int] = (0, 1)
    points: int = 1024

    def to_json(self) -> dict:
        return {"center": list(self.center), "radius": self.radius, "axes": list(self.axes), "points": self.points}

    @classmethod
    def from_json(cls, data: Mapping) -> "CircleSpec":
        return cls(tuple(data["center"]), float(data["radius"]), tuple(data["axes"]), int(data["points"]))


def cauchy_integral_check(
    members: Sequence[FamilyMember],
    xf: XiForms,
    loop: CircleSpec,
    n_index: int,
    quad_points: int | None = None,
) -> complex:
    """Trapezoidal ``sum_{r+s=n} oint V_r dxi_s`` around ``loop`` (``dxi_0 = dxi``)."""
    by_index = {m.index: m for m in members}
    missing = [r for r in range(n_index + 1) if r not in by_index]
    if missing or n_index > xf.n - 1:
        raise InsufficientMembers(f"n_index {n_index} needs V_0..V_{n_index}; missing {missing}")
    npts = loop.points if quad_points is None else quad_points
    theta = 2 * np.pi * np.arange(npts) / npts
    a, b = loop.axes
    pts = np.tile(np.asarray(loop.center, dtype=float), (npts, 1))
    pts[:, a] += loop.radius * np.cos(theta)
    pts[:, b] += loop.radius * np.sin(theta)
    vel = np.zeros_like(pts)
    vel[:, a] = -loop.radius * np.sin(theta)
    vel[:, b] = loop.radius * np.cos(theta)
    forms = xf.matrix
    total = 0j
    for r in range(n_index + 1):
        dxi = vel @ forms[n_index - r]
        total += np.sum(by_index[r].evaluate(pts) * dxi)
    return complex(total * 2 * np.pi / npts)

"""Closed-form recurrences for the worked equations.

These use only scalar arithmetic on coefficient lists (never the algebra
module) so they serve as independent oracles for the generic lifting in
:mod:`nilsolve.charsolve`.  Each returns a :class:`CharBasis` whose
provenance is ``"oracle:<name>"``.

Free-vector naming follows the usual convention: ``e_1 = sum k_r rho^r``,
``e_2 = sum m_r rho^r``, ``e_3 = sum g_r rho^r``.
"""

from __future__ import annotations

import cmath
import math
from typing import Sequence

import numpy as np

from .charsolve import CharBasis
from .errors import DegenerateSeed
from .nilalg import TruncatedElement, make_rho_chain
from . import equations as ppde

SEED_TOL = 1e-12
OMEGA = complex(math.sqrt(2) / 2, math.sqrt(2) / 2)  # OMEGA**2 == 1j


def _sign(branch: str) -> int:
    if branch in ("plus", "+", 1):
        return 1
    if branch in ("minus", "-", -1):
        return -1
    raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")


def square_coeffs(k: Sequence[complex]) -> list[complex]:
    """``B_r`` with ``(sum k_r rho^r)^2 = sum B_r rho^r``, split by parity of ``r``."""
    out = []
    for r in range(len(k)):
        if r % 2 == 0:
            h = r // 2
            b = k[h] ** 2 + 2 * sum(k[i] * k[r - i] for i in range(h))
        else:
            b = 2 * sum(k[i] * k[r - i] for i in range((r - 1) // 2 + 1))
        out.append(b)
    return out


def cauchy_product(a: Sequence[complex], b: Sequence[complex]) -> list[complex]:
    return [sum(a[i] * b[r - i] for i in range(r + 1)) for r in range(min(len(a), len(b)))]


def _basis(name: str, rows: list[list[complex]], free_index: int, pde, branch: dict) -> CharBasis:
    n = len(rows[0])
    table = make_rho_chain(n)
    vecs = tuple(TruncatedElement(table, np.asarray(row, dtype=complex)) for row in rows)
    return CharBasis(table, vecs, free_index, pde, branch, f"oracle:{name}")


def _coeffs(x, n: int) -> list[complex]:
    x = [complex(v) for v in np.asarray(x, dtype=complex).reshape(-1)]
    if len(x) < n:
        raise ValueError(f"need {n} free coefficients, got {len(x)}")
    return x[:n]


# Laplace and wave --------------------------------------------------------

def laplace_g(k: Sequence[complex], m: Sequence[complex], sign: int) -> list[complex]:
    n = len(k)
    s2 = k[0] ** 2 + m[0] ** 2
    if abs(s2) < SEED_TOL:
        raise DegenerateSeed("k_0^2 + m_0^2 = 0: Laplace seed denominator vanishes")
    root = cmath.sqrt(s2)
    g = [sign * 1j * root]
    if n > 1:
        g.append(sign * 1j * (k[0] * k[1] + m[0] * m[1]) / root)
    for r in range(2, n):
        if r % 2 == 0:
            h = r // 2
            inner = (
                sum(k[i] * k[r - i] for i in range(h))
                + sum(m[i] * m[r - i] for i in range(h))
                + sum(g[i] * g[r - i] for i in range(1, h))
            )
            g.append(-1 / (2 * g[0]) * (k[h] ** 2 + m[h] ** 2 + g[h] ** 2 + 2 * inner))
        else:
            h = (r - 1) // 2
            inner = (
                sum(k[i] * k[r - i] for i in range(h + 1))
                + sum(m[i] * m[r - i] for i in range(h + 1))
                + sum(g[i] * g[r - i] for i in range(1, h + 1))
            )
            g.append(-inner / g[0])
    return g


def oracle_laplace3d(k, m, n: int, branch: str = "plus") -> CharBasis:
    """``e_1^2 + e_2^2 + e_3^2 = 0``; ``g_0 = +-i sqrt(k_0^2 + m_0^2)``."""
    k, m = _coeffs(k, n), _coeffs(m, n)
    g = laplace_g(k, m, _sign(branch))
    return _basis("laplace3d", [k, m, g], 2, ppde.laplace3d(), {"sign": branch})


def oracle_wave3d(k, m, n: int, branch: str = "plus") -> CharBasis:
    """``e_1^2 + e_2^2 - e_3^2 = 0`` from the Laplace triple with ``e_3 -> i e_3``.

    ``branch="plus"`` gives ``g_0 = +sqrt(k_0^2 + m_0^2)``; it comes from the
    lower Laplace sign because ``i * (-i) = 1``.
    """
    k, m = _coeffs(k, n), _coeffs(m, n)
    g = laplace_g(k, m, -_sign(branch))
    return _basis("wave3d", [k, m, [1j * x for x in g]], 2, ppde.wave3d(), {"sign": branch})


# beams ------------------------------------------------------------------

def oracle_beam(m, n: int, a: float = 1.0, branch: str = "plus") -> CharBasis:
    """``e_1^2 + a^2 e_2^4 = 0`` solved as ``k_r = +-i a C_r`` with ``C = B(m)``."""
    m = _coeffs(m, n)
    if abs(a * m[0]) < SEED_TOL:
        raise DegenerateSeed("a m_0 = 0: beam seed k_0 vanishes (double root)")
    sign = _sign(branch)
    c = square_coeffs(m)
    k = [sign * 1j * a * cr for cr in c]
    return _basis("beam", [k, m], 0, ppde.beam(a), {"sign": branch})


def oracle_beam_hyp(m, n: int, a: float = 1.0, branch: str = "plus") -> CharBasis:
    """``e_1^2 - a^2 e_2^4 = 0`` via ``e_2 -> (sqrt2/2)(1+i) e_2`` on the beam pair.

    ``m`` are the coefficients of the hyperbolic ``e_2``; ``branch="plus"``
    gives ``k_0 = +a m_0^2``.
    """
    m = _coeffs(m, n)
    beam_m = [x / OMEGA for x in m]
    inner = oracle_beam(beam_m, n, a, branch)
    k = list(inner.vectors[0].coeffs)
    return _basis("beam_hyp", [k, m], 0, ppde.beam_hyp(a), {"sign": branch})


# generalized biharmonic ------------------------------------------------

def biharmonic_m0(k0: complex, p: float, outer: int, inner: int) -> complex:
    return outer * k0 * cmath.sqrt(inner * cmath.sqrt(p * p - 1) - p)


def oracle_biharmonic(k, n: int, p: float = 0.0, branch: str = "plus", inner: str = "plus") -> CharBasis:
    """``e_1^4 + 2p e_1^2 e_2^2 + e_2^4 = 0`` via ``D_r + 2p R_r + C_r = 0``.

    Seeds ``m_0, m_1, m_2`` are the closed forms; higher orders solve the
    linear equation in ``m_r`` with slope ``4 m_0^3 + 4 p k_0^2 m_0``.
    The printed ``m_2`` has ``3k_0^2(k_1^2 + 2k_0k_2 + p m_1^2)`` where the
    expansion gives ``k_0^2(3k_1^2 + 2k_0k_2 + p m_1^2)``; the latter is used.
    """
    k = _coeffs(k, n)
    m0 = biharmonic_m0(k[0], p, _sign(branch), _sign(inner))
    den = m0**3 + p * k[0] ** 2 * m0
    if abs(k[0]) < SEED_TOL or abs(den) < SEED_TOL * max(1.0, abs(k[0])) ** 3:
        raise DegenerateSeed(
            f"m_0^3 + p k_0^2 m_0 = 0 (p={p}): repeated root, closed recurrence undefined"
        )
    m = [m0]
    if n > 1:
        m.append(-(k[0] ** 3 * k[1] + p * k[0] * k[1] * m0**2) / den)
    if n > 2:
        m1 = m[1]
        num = (
            m0**2 * (3 * m1**2 + p * k[1] ** 2 + 2 * p * k[0] * k[2])
            + k[0] ** 2 * (3 * k[1] ** 2 + 2 * k[0] * k[2] + p * m1**2)
            + 4 * p * k[0] * k[1] * m0 * m1
        )
        m.append(-num / (2 * den))
    bk = square_coeffs(k)
    ck = square_coeffs(bk)
    for r in range(3, n):
        trial = m + [0j]
        h = square_coeffs(trial)
        dr = square_coeffs(h)[r]
        rr = cauchy_product(bk, h)[r]
        m.append(-(dr + 2 * p * rr + ck[r]) / (4 * den))
    return _basis(
        "biharmonic", [k, m], 1, ppde.biharmonic(p), {"sign": branch, "inner": inner}
    )


def biharmonic_system(k, m, p: float) -> list[complex]:
    """Left sides ``D_r + 2p R_r + C_r`` of the order-by-order biharmonic system."""
    bk = square_coeffs(list(k))
    h = square_coeffs(list(m))
    return [
        d + 2 * p * r + c
        for d, r, c in zip(square_coeffs(h), cauchy_product(bk, h), square_coeffs(bk))
    ]


# Helmholtz ------------------------------------------------------------

def oracle_helmholtz(k, n: int, lam: complex = 1.0, branch: str = "plus") -> CharBasis:
    """``e_1^2 + e_2^2 + lambda = 0``; ``m_0 = +-i sqrt(k_0^2 + lambda)``."""
    k = _coeffs(k, n)
    sign = _sign(branch)
    s2 = k[0] ** 2 + lam
    if abs(s2) < SEED_TOL:
        raise DegenerateSeed("k_0^2 + lambda = 0: Helmholtz seed denominator vanishes")
    root = cmath.sqrt(s2)
    m = [sign * 1j * root]
    if n > 1:
        m.append(sign * 1j * k[0] * k[1] / root)
    if n > 2:
        m.append(k[1] ** 2 * lam / (2 * m[0] ** 3) - k[0] * k[2] / m[0])
    for r in range(3, n):
        if r % 2 == 0:
            h = r // 2
            inner = sum(k[i] * k[r - i] for i in range(h)) + sum(m[i] * m[r - i] for i in range(1, h))
            m.append(-1 / (2 * m[0]) * (k[h] ** 2 + m[h] ** 2 + 2 * inner))
        else:
            h = (r - 1) // 2
            inner = sum(k[i] * k[r - i] for i in range(h + 1)) + sum(
                m[i] * m[r - i] for i in range(1, h + 1)
            )
            m.append(-inner / m[0])
    return _basis("helmholtz", [k, m], 1, ppde.helmholtz(lam), {"sign": branch})


# hydrodynamics ----------------------------------------------------------

def oracle_hydro(k, n: int, alpha: float = 1.0, beta: float = 1.0, branch: str = "plus") -> CharBasis:
    """``e_1^3 + alpha e_1^2 - beta e_2^2 = 0``; ``e_1`` pairs with t, ``e_2`` with x."""
    k = _coeffs(k, n)
    if beta == 0:
        raise DegenerateSeed("beta = 0")
    m0 = _sign(branch) * cmath.sqrt((k[0] ** 3 + alpha * k[0] ** 2) / beta)
    if abs(m0) < SEED_TOL:
        raise DegenerateSeed("k_0^3 + alpha k_0^2 = 0: hydro seed m_0 vanishes")
    m = [m0]
    if n > 1:
        m.append((3 * k[0] ** 2 * k[1] + 2 * alpha * k[0] * k[1]) / (2 * beta * m0))
    b = square_coeffs(k)
    # D_0 = k_0^3, D_1 = 3 k_0^2 k_1, D_r = sum_i k_i B_{r-i}
    dd = cauchy_product(k, b)
    for r in range(2, n):
        if r % 2 == 0:
            h = r // 2
            sq = m[h] ** 2 + 2 * sum(m[i] * m[r - i] for i in range(1, h))
        else:
            h = (r - 1) // 2
            sq = 2 * sum(m[i] * m[r - i] for i in range(1, h + 1))
        m.append((dd[r] + alpha * b[r] - beta * sq) / (2 * beta * m0))
    return _basis("hydro", [k, m], 1, ppde.hydro(alpha, beta), {"sign": branch})

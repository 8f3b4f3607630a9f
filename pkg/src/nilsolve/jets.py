"""Multivariate truncated Taylor jets, vectorised over a batch of points."""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Sequence

import numpy as np


@lru_cache(maxsize=None)
def multi_indices(d: int, deg: int) -> tuple[tuple[int, ...], ...]:
    """All ``alpha`` with ``|alpha| <= deg``, graded then lexicographic (descending)."""
    out = []
    for total in range(deg + 1):
        for combo in itertools.combinations_with_replacement(range(d), total):
            alpha = [0] * d
            for j in combo:
                alpha[j] += 1
            out.append(tuple(alpha))
    return tuple(out)


@lru_cache(maxsize=None)
def _tables(d: int, deg: int):
    idx = multi_indices(d, deg)
    pos = {a: i for i, a in enumerate(idx)}
    ii, jj, kk = [], [], []
    for i, a in enumerate(idx):
        for j, b in enumerate(idx):
            c = tuple(x + y for x, y in zip(a, b))
            k = pos.get(c)
            if k is not None:
                ii.append(i)
                jj.append(j)
                kk.append(k)
    return idx, pos, np.array(ii), np.array(jj), np.array(kk)


class MultiJet:
    """Taylor coefficients ``f_alpha = d^alpha f / alpha!`` at a batch of base points.

    ``coeffs`` has shape ``(M, N)``: one row per multi-index of
    :func:`multi_indices`, one column per point.
    """

    __slots__ = ("d", "deg", "coeffs")

    def __init__(self, d: int, deg: int, coeffs: np.ndarray):
        self.d, self.deg = d, deg
        self.coeffs = np.asarray(coeffs, dtype=complex)

    @property
    def npoints(self) -> int:
        return self.coeffs.shape[1]

    @classmethod
    def constant(cls, d: int, deg: int, value) -> "MultiJet":
        value = np.atleast_1d(np.asarray(value, dtype=complex))
        c = np.zeros((len(multi_indices(d, deg)), value.shape[0]), dtype=complex)
        c[0] = value
        return cls(d, deg, c)

    @classmethod
    def linear(cls, d: int, deg: int, value, grad: Sequence[complex]) -> "MultiJet":
        """Jet of ``value + grad . h``."""
        jet = cls.constant(d, deg, value)
        if deg >= 1:
            jet.coeffs[1 : d + 1] = np.asarray(grad, dtype=complex)[:, None]
        return jet

    def __getitem__(self, alpha: Sequence[int]) -> np.ndarray:
        _, pos, *_ = _tables(self.d, self.deg)
        return self.coeffs[pos[tuple(alpha)]]

    def derivative(self, alpha: Sequence[int]) -> np.ndarray:
        """``d^alpha f`` at the base points."""
        return self[alpha] * math.prod(math.factorial(a) for a in alpha)

    def __add__(self, other):
        if isinstance(other, MultiJet):
            return MultiJet(self.d, self.deg, self.coeffs + other.coeffs)
        out = self.coeffs.copy()
        out[0] = out[0] + other
        return MultiJet(self.d, self.deg, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiJet(self.d, self.deg, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, MultiJet):
            return MultiJet(self.d, self.deg, self.coeffs * other)
        _, _, ii, jj, kk = _tables(self.d, self.deg)
        out = np.zeros_like(self.coeffs)
        np.add.at(out, kk, self.coeffs[ii] * other.coeffs[jj])
        return MultiJet(self.d, self.deg, out)

    __rmul__ = __mul__

    def nilpotent(self) -> "MultiJet":
        out = self.coeffs.copy()
        out[0] = 0
        return MultiJet(self.d, self.deg, out)

    def compose(self, derivs: np.ndarray) -> "MultiJet":
        """``g(self)`` given ``derivs[m] = g^{(m)}(self[0])`` for ``m <= deg``."""
        h = self.nilpotent()
        out = MultiJet.constant(self.d, self.deg, derivs[0])
        power = MultiJet.constant(self.d, self.deg, np.ones(self.npoints))
        for m in range(1, self.deg + 1):
            power = power * h
            out = out + power * (derivs[m] / math.factorial(m))
        return out

    def truncate(self, deg: int) -> "MultiJet":
        n = len(multi_indices(self.d, deg))
        return MultiJet(self.d, deg, self.coeffs[:n])

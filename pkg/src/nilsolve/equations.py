"""The worked constant-coefficient equations as :class:`PdeSpec` values."""

from __future__ import annotations

from .pde import PdeSpec


def laplace3d() -> PdeSpec:
    """``u_xx + u_yy + u_zz``."""
    return PdeSpec(3, (((2, 0, 0), 1), ((0, 2, 0), 1), ((0, 0, 2), 1)), "laplace3d")


def wave3d() -> PdeSpec:
    """``u_xx + u_yy - u_zz``."""
    return PdeSpec(3, (((2, 0, 0), 1), ((0, 2, 0), 1), ((0, 0, 2), -1)), "wave3d")


def beam(a: float = 1.0) -> PdeSpec:
    """``u_xx + a^2 u_yyyy``."""
    return PdeSpec(2, (((2, 0), 1), ((0, 4), a * a)), f"beam(a={a:g})")


def beam_hyp(a: float = 1.0) -> PdeSpec:
    """``u_xx - a^2 u_yyyy``."""
    return PdeSpec(2, (((2, 0), 1), ((0, 4), -a * a)), f"beam_hyp(a={a:g})")


def biharmonic(p: float = 1.0) -> PdeSpec:
    """``u_xxxx + 2p u_xxyy + u_yyyy``; ``p = 1`` is the biharmonic operator."""
    return PdeSpec(2, (((4, 0), 1), ((2, 2), 2 * p), ((0, 4), 1)), f"biharmonic(p={p:g})")


def helmholtz(lam: complex = 1.0) -> PdeSpec:
    """``u_xx + u_yy + lambda u``."""
    return PdeSpec(2, (((2, 0), 1), ((0, 2), 1), ((0, 0), lam)), f"helmholtz(lambda={complex(lam):g})")


def hydro(alpha: float = 1.0, beta: float = 1.0) -> PdeSpec:
    """``u_ttt + alpha u_tt - beta u_xx`` in the variables ``(t, x)``."""
    return PdeSpec(
        2, (((3, 0), 1), ((2, 0), alpha), ((0, 2), -beta)), f"hydro(alpha={alpha:g},beta={beta:g})"
    )

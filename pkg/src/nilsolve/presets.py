"""Registry of the worked equations: PDE, free data layout, seeds and oracles."""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import equations, oracles
from .charsolve import CharBasis, solve_characteristic, univariate_roots
from .errors import DegenerateLift, DegenerateSeed
from .pde import PdeSpec, squarefree_part

# draws whose order-0 roots sit closer than this (relative) are rejected
MIN_ROOT_SEPARATION = 0.1


@dataclass(frozen=True)
class Preset:
    """One worked equation.

    Attributes
    ----------
    name : str
    variables : tuple of str
        Coordinate names, in order.
    letters : tuple of str
        Coefficient letters of ``e_1..e_d`` (``k, m, g``).
    lift_index : int
        Vector solved for; the others are free.
    defaults : dict
        Parameter defaults.
    build : callable
        ``params -> PdeSpec``.
    seed : callable
        ``(free0, branch, params) -> c_0`` closed-form order-0 value.
    oracle : callable
        ``(free, n, branch, params) -> CharBasis``.
    branches : tuple of str
    """

    name: str
    variables: tuple[str, ...]
    letters: tuple[str, ...]
    lift_index: int
    defaults: Mapping[str, complex]
    build: Callable[[Mapping], PdeSpec]
    seed: Callable[[np.ndarray, str, Mapping], complex]
    oracle: Callable[[np.ndarray, int, str, Mapping], CharBasis]
    branches: tuple[str, ...] = ("plus", "minus")
    homogeneous: bool = field(default=False)

    @property
    def d(self) -> int:
        return len(self.variables)

    @property
    def free_letters(self) -> tuple[str, ...]:
        return tuple(c for i, c in enumerate(self.letters) if i != self.lift_index)

    def params(self, overrides: Mapping | None = None) -> dict:
        out = dict(self.defaults)
        for k, v in (overrides or {}).items():
            if k not in out:
                raise KeyError(f"preset {self.name} has no parameter {k!r}")
            if v is not None:
                out[k] = v
        return out

    def pde(self, params: Mapping | None = None) -> PdeSpec:
        return self.build(self.params(params))


def _branch_parts(branch: str) -> tuple[str, str]:
    outer, _, inner = branch.partition(":")
    return outer, inner or "plus"


def _s(b: str) -> int:
    return oracles._sign(b)


PRESETS: dict[str, Preset] = {
    "laplace3d": Preset(
        "laplace3d", ("x", "y", "z"), ("k", "m", "g"), 2, {},
        lambda p: equations.laplace3d(),
        lambda f, b, p: _s(b) * 1j * cmath.sqrt(f[0] ** 2 + f[1] ** 2),
        lambda f, n, b, p: oracles.oracle_laplace3d(f[0], f[1], n, b),
        homogeneous=True,
    ),
    "wave3d": Preset(
        "wave3d", ("x", "y", "z"), ("k", "m", "g"), 2, {},
        lambda p: equations.wave3d(),
        lambda f, b, p: _s(b) * cmath.sqrt(f[0] ** 2 + f[1] ** 2),
        lambda f, n, b, p: oracles.oracle_wave3d(f[0], f[1], n, b),
        homogeneous=True,
    ),
    "beam": Preset(
        "beam", ("x", "y"), ("k", "m"), 0, {"a": 1.0},
        lambda p: equations.beam(p["a"]),
        lambda f, b, p: _s(b) * 1j * p["a"] * f[0] ** 2,
        lambda f, n, b, p: oracles.oracle_beam(f[0], n, p["a"], b),
    ),
    "beam_hyp": Preset(
        "beam_hyp", ("x", "y"), ("k", "m"), 0, {"a": 1.0},
        lambda p: equations.beam_hyp(p["a"]),
        lambda f, b, p: _s(b) * p["a"] * f[0] ** 2,
        lambda f, n, b, p: oracles.oracle_beam_hyp(f[0], n, p["a"], b),
    ),
    "biharmonic": Preset(
        "biharmonic", ("x", "y"), ("k", "m"), 1, {"p": 1.0},
        lambda p: equations.biharmonic(p["p"]),
        lambda f, b, p: oracles.biharmonic_m0(
            f[0], p["p"], _s(_branch_parts(b)[0]), _s(_branch_parts(b)[1])
        ),
        lambda f, n, b, p: oracles.oracle_biharmonic(f[0], n, p["p"], *_branch_parts(b)),
        branches=("plus:plus", "plus:minus", "minus:plus", "minus:minus"),
        homogeneous=True,
    ),
    "helmholtz": Preset(
        "helmholtz", ("x", "y"), ("k", "m"), 1, {"lambda": 1.0},
        lambda p: equations.helmholtz(p["lambda"]),
        lambda f, b, p: _s(b) * 1j * cmath.sqrt(f[0] ** 2 + p["lambda"]),
        lambda f, n, b, p: oracles.oracle_helmholtz(f[0], n, p["lambda"], b),
    ),
    "hydro": Preset(
        "hydro", ("t", "x"), ("k", "m"), 1, {"alpha": 1.0, "beta": 1.0},
        lambda p: equations.hydro(p["alpha"], p["beta"]),
        lambda f, b, p: _s(b) * cmath.sqrt((f[0] ** 3 + p["alpha"] * f[0] ** 2) / p["beta"]),
        lambda f, n, b, p: oracles.oracle_hydro(f[0], n, p["alpha"], p["beta"], b),
    ),
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def solve_preset(
    preset: Preset | str,
    free,
    n: int,
    branch: str = "plus",
    params: Mapping | None = None,
    method: str = "generic",
) -> CharBasis:
    """Solve a worked equation by generic lifting or by its closed recurrence.

    The generic path lifts the order-0 root nearest the closed-form seed of
    ``branch``, so both methods follow the same branch.
    """
    preset = get_preset(preset) if isinstance(preset, str) else preset
    if branch not in preset.branches:
        raise ValueError(f"branch {branch!r} not in {preset.branches}")
    params = preset.params(params)
    free = np.asarray(free, dtype=complex).reshape(preset.d - 1, -1)
    if method == "oracle":
        return preset.oracle(free, n, branch, params)
    if method != "generic":
        raise ValueError(f"unknown method {method!r}")
    target = preset.seed(free[:, 0], branch, params)
    try:
        basis = solve_characteristic(preset.pde(params), n, free, preset.lift_index, target)
    except DegenerateLift as exc:
        # every closed-form seed denominator is q'(c_0)
        raise DegenerateSeed(f"{preset.name}: seed denominator vanishes ({exc})") from exc
    basis.branch["branch"] = branch
    return basis


def order0_separation(pde: PdeSpec, free0, lift_index: int) -> float:
    """Smallest pairwise root distance over the largest root magnitude (reduced symbol)."""
    roots = [r.value for r in univariate_roots(squarefree_part(pde).univariate(
        list(free0[:lift_index]) + [0j] + list(free0[lift_index:]), lift_index))]
    if len(roots) < 2:
        return np.inf
    scale = max(1.0, max(abs(r) for r in roots))
    return min(abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1:]) / scale


def draw_free(
    preset: Preset | str,
    n: int,
    rng: np.random.Generator,
    params: Mapping | None = None,
    max_tries: int = 1000,
) -> np.ndarray:
    """Random free data, shape ``(d-1, n)``.

    Coefficients are uniform in the unit complex square; order-0 values have
    modulus in ``[0.5, 1.5]``.  Draws with nearly coincident order-0 roots
    are rejected so lifting stays well conditioned.
    """
    preset = get_preset(preset) if isinstance(preset, str) else preset
    pde = preset.pde(params)
    for _ in range(max_tries):
        free = rng.uniform(-1, 1, (preset.d - 1, n)) + 1j * rng.uniform(-1, 1, (preset.d - 1, n))
        mod = rng.uniform(0.5, 1.5, preset.d - 1)
        ang = rng.uniform(0, 2 * np.pi, preset.d - 1)
        free[:, 0] = mod * np.exp(1j * ang)
        try:
            if order0_separation(pde, free[:, 0], preset.lift_index) >= MIN_ROOT_SEPARATION:
                return free
        except DegenerateSeed:  # pragma: no cover - defensive
            continue
    raise DegenerateSeed(f"no admissible free draw for {preset.name} in {max_tries} tries")

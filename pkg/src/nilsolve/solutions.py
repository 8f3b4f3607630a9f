"""Solution families built from a characteristic basis.

With ``zeta = sum_j x_j e_j`` the spectrum ``xi`` and the components
``xi_r`` are linear forms in ``x``.  Two families are produced:

* exponential: ``V_r = Psi_r(xi_1..xi_r) e^xi``, solving the full equation;
* analytic: ``U_k = sum_s q_{k,s}(xi_1..xi_k) F^{(s-1)}(xi) / (s-1)!`` for
  ``A_k = sum_s q_{k,s} / (t - xi)^s``, solving equations whose terms all
  have the top order.  This is the residue of ``F(t) A_k`` at ``t = xi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import __version__
from .charsolve import CharBasis
from .errors import InsufficientMembers, PoleOnDomain, UnknownFunction
from .resolvent import XiValues, psi_rho, resolvent_rho
from .sparsepoly import Poly

EXP = "exp"
ANALYTIC = "analytic"


@dataclass(frozen=True, eq=False)
class XiForms:
    """Linear forms ``xi = sum_j a_{j0} x_j`` and ``xi_r = sum_j a_{jr} x_j``."""

    d: int
    xi_form: np.ndarray
    higher: np.ndarray  # shape (n-1, d)

    def __post_init__(self):
        a = np.array(self.xi_form, dtype=complex).reshape(self.d)
        h = np.array(self.higher, dtype=complex).reshape(-1, self.d)
        a.flags.writeable = False
        h.flags.writeable = False
        object.__setattr__(self, "xi_form", a)
        object.__setattr__(self, "higher", h)

    @property
    def n(self) -> int:
        return self.higher.shape[0] + 1

    @property
    def matrix(self) -> np.ndarray:
        """Row ``r`` holds the coefficients of ``xi_r`` (``xi_0 = xi``)."""
        return np.vstack([self.xi_form[None, :], self.higher])

    def norm(self) -> float:
        return float(np.max(np.abs(self.matrix)))

    def values(self, x) -> np.ndarray:
        """``[xi, xi_1, ..., xi_{n-1}]`` at points ``x`` of shape ``(..., d)``."""
        x = np.asarray(x, dtype=float)
        return x @ self.matrix.T

    def at(self, x: Sequence[float]) -> XiValues:
        v = self.values(np.asarray(x, dtype=float).reshape(self.d))
        return XiValues(v[0], v[1:])

    def truncate(self, m: int) -> "XiForms":
        return XiForms(self.d, self.xi_form, self.higher[: m - 1])

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "forms": [[[c.real, c.imag] for c in row] for row in self.matrix],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "XiForms":
        m = np.array([[complex(*c) for c in row] for row in data["forms"]], dtype=complex)
        return cls(int(data["d"]), m[0], m[1:])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, XiForms)
            and self.d == other.d
            and np.array_equal(self.matrix, other.matrix)
        )


def build_xi_forms(basis: CharBasis | np.ndarray) -> XiForms:
    """Transpose the basis coefficients ``a[j, r]`` into forms ``xi_r``."""
    m = basis.matrix if isinstance(basis, CharBasis) else np.asarray(basis, dtype=complex)
    if m.ndim == 1:
        m = m[:, None]
    return XiForms(m.shape[0], m[:, 0], m[:, 1:].T)


# analytic functions as jet providers ----------------------------------

@dataclass(frozen=True)
class AnalyticF:
    """Derivative jets ``(F(z), F'(z), ..., F^{(m)}(z))`` of one analytic function.

    ``jet(z, m)`` returns an array of shape ``(m + 1,) + z.shape``.
    """

    name: str
    params: tuple = ()
    provider: Callable[[np.ndarray, int], np.ndarray] | None = field(default=None, compare=False)

    def jet(self, z, depth: int) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return self.provider(z, depth)

    def __call__(self, z):
        return self.jet(z, 0)[0]

    def to_json(self) -> dict:
        return {"name": self.name, "params": [[complex(p).real, complex(p).imag] for p in self.params]}

    @classmethod
    def from_json(cls, data: Mapping) -> "AnalyticF":
        return builtin_analytic(data["name"], [complex(*p) for p in data.get("params", [])])


def _poly_jet(coeffs: Sequence[complex]):
    c = np.asarray(coeffs, dtype=complex)

    def jet(z, m):
        out = np.zeros((m + 1,) + z.shape, dtype=complex)
        cur = c
        for k in range(m + 1):
            acc = np.zeros(z.shape, dtype=complex)
            for a in cur[::-1]:
                acc = acc * z + a
            out[k] = acc
            cur = cur[1:] * np.arange(1, cur.shape[0]) if cur.shape[0] > 1 else np.zeros(1)
        return out

    return jet


def _exp_jet(z, m):
    e = np.exp(z)
    return np.broadcast_to(e, (m + 1,) + z.shape).copy()


def _trig_jet(phase: int):
    # d^k sin = sin(z + k pi/2); cos is sin shifted by one
    def jet(z, m):
        s, c = np.sin(z), np.cos(z)
        cycle = (s, c, -s, -c)
        return np.stack([cycle[(k + phase) % 4] for k in range(m + 1)])

    return jet


def _reciprocal_jet(shift: complex):
    def jet(z, m):
        w = z - shift
        if np.any(w == 0):
            raise PoleOnDomain(f"1/(z - {shift}) evaluated at its pole")
        inv = 1 / w
        out = np.empty((m + 1,) + z.shape, dtype=complex)
        out[0] = inv
        for k in range(1, m + 1):
            out[k] = -k * out[k - 1] * inv
        return out

    return jet


def builtin_analytic(name: str, params: Sequence[complex] = ()) -> AnalyticF:
    """Named analytic function with exact derivative jets.

    Parameters
    ----------
    name : {"polynomial", "exp", "reciprocal", "sin", "cos"}
    params : sequence of complex
        Ascending coefficients for ``polynomial``; ``(c,)`` for
        ``reciprocal``, which is ``1/(z - c)``.
    """
    params = tuple(complex(p) for p in params)
    if name == "polynomial":
        return AnalyticF(name, params, _poly_jet(params or (0j,)))
    if name == "exp":
        return AnalyticF(name, (), _exp_jet)
    if name == "sin":
        return AnalyticF(name, (), _trig_jet(0))
    if name == "cos":
        return AnalyticF(name, (), _trig_jet(1))
    if name == "reciprocal":
        shift = params[0] if params else 0j
        return AnalyticF(name, (shift,), _reciprocal_jet(shift))
    raise UnknownFunction(name)


def parse_function(spec: str) -> AnalyticF:
    """``"exp"``, ``"sin"``, ``"cos"``, ``"reciprocal:c"``, ``"polynomial:c0,c1,..."``."""
    name, _, rest = spec.partition(":")
    params = [complex(p.replace(" ", "")) for p in rest.split(",") if p.strip()]
    return builtin_analytic(name, params)


# family members ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class FamilyMember:
    """``V_r`` (kind ``exp``) or ``U_k`` (kind ``analytic``).

    ``terms`` maps pole order ``s`` to ``q_{k,s}``.  For the exponential kind
    the single entry under ``0`` is ``Psi_r``.
    """

    kind: str
    index: int
    terms: Mapping[int, Poly]
    xf: XiForms
    f: AnalyticF | None = None

    def outer_jets(self, xi: np.ndarray, depth: int) -> dict[int, np.ndarray]:
        """Per pole ``s``: jets of ``G_s = F^{(s-1)}/(s-1)!`` (or ``e^xi``) to ``depth``."""
        if self.kind == EXP:
            return {0: _exp_jet(np.asarray(xi, dtype=complex), depth)}
        top = max(self.terms) - 1
        base = self.f.jet(xi, top + depth)
        return {
            s: base[s - 1 : s - 1 + depth + 1] / math.factorial(s - 1) for s in self.terms
        }

    def evaluate(self, x) -> np.ndarray | complex:
        """Value at real points ``x`` of shape ``(..., d)``."""
        v = self.xf.values(x)
        xi, xis = v[..., 0], v[..., 1:]
        if xis.shape[-1] == 0:
            xis = np.zeros(xi.shape + (1,), dtype=complex)
        g = self.outer_jets(xi, 0)
        total = sum(self.terms[s].evaluate(xis) * g[s][0] for s in self.terms)
        total = np.asarray(total, dtype=complex)
        return total if total.shape else complex(total)

    def evaluate_xi(self, xiv: XiValues) -> complex:
        xis = xiv.xis if xiv.xis.size else np.zeros(1, dtype=complex)
        g = self.outer_jets(np.asarray(xiv.xi), 0)
        return complex(sum(self.terms[s].evaluate(xis) * g[s][0] for s in self.terms))

    def with_terms(self, terms: Mapping[int, Poly]) -> "FamilyMember":
        return FamilyMember(self.kind, self.index, dict(terms), self.xf, self.f)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "index": self.index,
            "terms": [{"pole": s, "poly": self.terms[s].to_json()} for s in sorted(self.terms)],
            "xi": self.xf.to_json(),
            "F": self.f.to_json() if self.f is not None else None,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FamilyMember":
        terms = {int(t["pole"]): Poly.from_json(t["poly"]) for t in data["terms"]}
        f = AnalyticF.from_json(data["F"]) if data.get("F") else None
        return cls(data["kind"], int(data["index"]), terms, XiForms.from_json(data["xi"]), f)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FamilyMember)
            and (self.kind, self.index, self.xf, self.f) == (other.kind, other.index, other.xf, other.f)
            and {s: q for s, q in self.terms.items()} == dict(other.terms)
        )

    def to_latex(self) -> str:
        if self.kind == EXP:
            return rf"V_{{{self.index}}}=\left({self.terms[0].to_latex()}\right)e^{{\xi}}"
        parts = []
        for s in sorted(self.terms):
            q = self.terms[s].scale(1 / math.factorial(s - 1)).to_latex()
            primes = "'" * (s - 1) if s <= 4 else f"^{{({s - 1})}}"
            parts.append(rf"\left({q}\right)F_{{{self.index}}}{primes}(\xi)")
        return f"U_{{{self.index}}}=" + "+".join(parts)


def _check_max(xf: XiForms, top: int) -> None:
    if top > xf.n - 1:
        raise InsufficientMembers(f"member index {top} needs n >= {top + 1}, basis has n = {xf.n}")


def exp_family(xf: XiForms, r_max: int) -> list[FamilyMember]:
    """``V_0..V_{r_max}``."""
    _check_max(xf, r_max)
    psis = psi_rho(max(xf.n, 2))
    return [FamilyMember(EXP, r, {0: psis[r].poly}, xf) for r in range(r_max + 1)]


def analytic_family(
    xf: XiForms, k_max: int, fs: AnalyticF | Sequence[AnalyticF]
) -> list[FamilyMember]:
    """``U_0..U_{k_max}``, one function per member or one shared."""
    _check_max(xf, k_max)
    if isinstance(fs, AnalyticF):
        fs = [fs] * (k_max + 1)
    if len(fs) < k_max + 1:
        raise ValueError(f"need {k_max + 1} functions, got {len(fs)}")
    res = resolvent_rho(max(xf.n, 2))
    return [FamilyMember(ANALYTIC, k, dict(res[k].terms), xf, fs[k]) for k in range(k_max + 1)]


def real_imag_split(value) -> tuple:
    """Real and imaginary parts; each is a real solution when the PDE is real."""
    v = np.asarray(value, dtype=complex)
    if v.shape:
        return v.real.copy(), v.imag.copy()
    return float(v.real), float(v.imag)


def latex_document(members: Sequence[FamilyMember]) -> str:
    lines = [f"% nilsolve {__version__}"]
    lines += [f"$${m.to_latex()}$$" for m in members]
    return "\n".join(lines) + "\n"

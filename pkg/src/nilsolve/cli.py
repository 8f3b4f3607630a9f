"""Command-line front end: ``solve``, ``families``, ``verify`` and ``pipeline``.

Exit codes: 0 ok, 2 usage, 3 degenerate characteristic polynomial,
4 verification failure, 5 multiple root (lifting not unique), 6 no root,
7 vanishing closed-form seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .charsolve import CharBasis, solve_characteristic
from .errors import DegenerateMath, InsufficientMembers, NilsolveError
from .pde import PdeSpec
from .presets import PRESETS, draw_free, get_preset, solve_preset
from .solutions import (
    EXP,
    FamilyMember,
    analytic_family,
    build_xi_forms,
    exp_family,
    latex_document,
    parse_function,
)
from .verify import CircleSpec, SampleSpec, cauchy_integral_check, verify_family

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 2, 4
CAUCHY_THRESHOLD = 1e-7


class UsageError(Exception):
    pass


# json helpers ----------------------------------------------------------

def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _cplx_json(z: complex):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def _cplx(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(*v)
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    return complex(v)


def resolve_seed(seed: int) -> int:
    env = os.environ.get("NILSOLVE_SEED")
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"NILSOLVE_SEED must be an integer, got {env!r}") from None
    return seed


# solve -----------------------------------------------------------------

def _preset_params(args) -> dict:
    return {
        "a": args.a,
        "p": args.p,
        "lambda": args.lam,
        "alpha": args.alpha,
        "beta": args.beta,
    }


def _apply_overrides(free: np.ndarray, letters: Sequence[str], items: Sequence[str]) -> None:
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or len(key) < 2 or key[0] not in letters or not key[1:].isdigit():
            raise UsageError(f"--free expects <letter><order>=<value> with letters {list(letters)}, got {item!r}")
        row, col = letters.index(key[0]), int(key[1:])
        if col >= free.shape[1]:
            raise UsageError(f"--free {key}: order {col} exceeds n - 1 = {free.shape[1] - 1}")
        try:
            free[row, col] = _cplx(value)
        except ValueError:
            raise UsageError(f"--free {key}: cannot parse {value!r} as a complex number") from None


def _load_free(path: str, rows: int, n: int) -> np.ndarray:
    data = _read_json(path)
    try:
        free = np.array([[_cplx(v) for v in row] for row in data], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{path}: free data must be a list of rows of numbers or [re, im] pairs ({exc})") from None
    if free.shape[0] != rows or free.shape[1] < n:
        raise UsageError(f"{path}: free data must have shape ({rows}, >= {n}), got {free.shape}")
    return free[:, :n]


def _root_choice(branch: str):
    try:
        return int(branch)
    except ValueError:
        pass
    if branch in ("upper", "lower", "right", "left"):
        return branch
    try:
        return complex(branch)
    except ValueError:
        raise UsageError(f"--branch for --pde must be an index, upper/lower/right/left or a complex root, got {branch!r}") from None


def run_solve(args) -> dict:
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    seed = resolve_seed(args.seed)
    rng = np.random.default_rng(seed)
    run: dict[str, Any] = {"n": args.n, "seed": seed, "method": args.method, "version": __version__}
    if args.preset:
        preset = get_preset(args.preset)
        params = preset.params({k: v for k, v in _preset_params(args).items() if k in preset.defaults})
        branch = args.branch or preset.branches[0]
        if branch not in preset.branches:
            raise UsageError(f"--branch for {preset.name} must be one of {list(preset.branches)}")
        if args.free_file:
            free = _load_free(args.free_file, preset.d - 1, args.n)
        else:
            free = draw_free(preset, args.n, rng, params)
        _apply_overrides(free, preset.free_letters, args.free or [])
        basis = solve_preset(preset, free, args.n, branch, params, args.method)
        run.update(preset=preset.name, params={k: _cplx_json(v) for k, v in params.items()}, branch=branch)
    else:
        if args.method != "generic":
            raise UsageError("--method oracle needs --preset")
        try:
            pde = PdeSpec.from_json(_read_json(args.pde))
        except ValueError as exc:
            raise UsageError(f"{args.pde}: {exc}") from None
        lift = pde.d - 1 if args.lift_index is None else args.lift_index
        if not 0 <= lift < pde.d:
            raise UsageError(f"--lift-index must be in [0, {pde.d - 1}]")
        letters = tuple(f"abcdefghij"[i] for i in range(pde.d) if i != lift)
        if args.free_file:
            free = _load_free(args.free_file, pde.d - 1, args.n)
        else:
            free = rng.uniform(-1, 1, (pde.d - 1, args.n)) + 1j * rng.uniform(-1, 1, (pde.d - 1, args.n))
        _apply_overrides(free, letters, args.free or [])
        branch = args.branch or "0"
        basis = solve_characteristic(pde, args.n, free, lift, _root_choice(branch))
        run.update(pde=args.pde, branch=branch, lift_index=lift)
    run["free"] = [[[c.real, c.imag] for c in row] for row in np.asarray(free)[:, : args.n]]
    return {"basis": basis.to_json(), "run": run}


def load_basis(path: str) -> CharBasis:
    data = _read_json(path)
    try:
        return CharBasis.from_json(data.get("basis", data))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: malformed basis file ({exc!r})") from None


# families --------------------------------------------------------------

def build_families(basis: CharBasis, kind: str, max_index: int, fname: str) -> list[FamilyMember]:
    xf = build_xi_forms(basis)
    if max_index > basis.n - 1:
        raise InsufficientMembers(f"--max {max_index} needs n >= {max_index + 1}; basis has n = {basis.n}")
    if kind == "exp":
        return exp_family(xf, max_index)
    if not basis.pde.is_homogeneous and fname != "exp":
        print(
            "warning: the analytic family solves only equations whose terms all have the top order",
            file=sys.stderr,
        )
    return analytic_family(xf, max_index, parse_function(fname))


def run_families(args) -> tuple[dict, str]:
    basis = load_basis(args.basis)
    members = build_families(basis, args.kind, args.max, args.F)
    out = {
        "kind": args.kind,
        "max": args.max,
        "F": args.F if args.kind == "analytic" else None,
        "members": [m.to_json() for m in members],
    }
    return out, latex_document(members)


def load_families(path: str) -> list[FamilyMember]:
    data = _read_json(path)
    try:
        return [FamilyMember.from_json(m) for m in data["members"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: malformed families file ({exc!r})") from None


# verify ----------------------------------------------------------------

def run_verify(basis: CharBasis, members: list[FamilyMember], args) -> dict:
    out: dict[str, Any] = {"checks": args.check}
    passed = True
    seed = resolve_seed(args.seed)
    if args.check in ("residual", "all"):
        rep = verify_family(
            basis.pde, members, None, SampleSpec(args.points, -1.0, 1.0, seed), args.threshold, args.jobs
        )
        out["residual"] = rep.to_json()
        passed &= rep.passed
    if args.check in ("cauchy", "all"):
        xf = build_xi_forms(basis)
        loop = CircleSpec(tuple([0.0] * basis.d), args.radius, (0, 1), args.quad_points)
        exp_members = [m for m in members if m.kind == EXP]
        if len(exp_members) < args.n_index + 1:
            exp_members = exp_family(xf, min(basis.n - 1, max(args.n_index, 0)))
        value = cauchy_integral_check(exp_members, xf, loop, args.n_index)
        ok = abs(value) < CAUCHY_THRESHOLD
        out["cauchy"] = {
            "n_index": args.n_index,
            "loop": loop.to_json(),
            "value": [value.real, value.imag],
            "magnitude": abs(value),
            "threshold": CAUCHY_THRESHOLD,
            "passed": ok,
        }
        passed &= ok
    out["passed"] = bool(passed)
    return out


# argument parsing ------------------------------------------------------

def _add_solve_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESETS), help="built-in equation")
    src.add_argument("--pde", help="PDE spec JSON file")
    p.add_argument("--n", type=int, default=4, help="algebra dimension (default 4)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed; NILSOLVE_SEED overrides")
    p.add_argument("--free", action="append", metavar="LETTER_ORDER=VALUE", help="fix one free coefficient, e.g. k0=0")
    p.add_argument("--free-file", help="JSON (d-1) x n array of free coefficients")
    p.add_argument("--lift-index", type=int, help="0-based vector to solve for (--pde only)")
    p.add_argument("--branch", help="preset branch (plus/minus, biharmonic outer:inner) or root selector")
    p.add_argument("--method", choices=("generic", "oracle"), default="generic")
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--lambda", dest="lam", type=complex, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)


def _add_family_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=("exp", "analytic"), default="exp")
    p.add_argument("--max", type=int, default=2, help="largest member index")
    p.add_argument("--F", default="exp", help="exp | sin | cos | reciprocal:c | polynomial:c0,c1,...")


def _add_verify_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--check", choices=("residual", "cauchy", "all"), default="residual")
    p.add_argument("--n-index", type=int, default=0)
    p.add_argument("--threshold", type=float, default=None, help="flat max_rel threshold")
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--quad-points", type=int, default=1024)
    p.add_argument("--jobs", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nilsolve", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"nilsolve {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve the characteristic equation")
    _add_solve_args(p)
    p.add_argument("-o", "--output", help="basis JSON (default stdout)")

    p = sub.add_parser("families", help="build solution families from a basis")
    p.add_argument("--basis", required=True)
    _add_family_args(p)
    p.add_argument("-o", "--output")
    p.add_argument("--latex", help="also write LaTeX here")

    p = sub.add_parser("verify", help="check families against the PDE")
    p.add_argument("--basis", required=True)
    p.add_argument("--families", required=True)
    _add_verify_args(p)
    p.add_argument("--seed", type=int, default=0, help="sampling seed; NILSOLVE_SEED overrides")
    p.add_argument("-o", "--output")

    p = sub.add_parser("pipeline", help="solve, families and verify in one go")
    _add_solve_args(p)
    _add_family_args(p)
    _add_verify_args(p)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--latex", action="store_true", help="write families.tex too")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            _write(dumps(run_solve(args)), args.output)
            return EXIT_OK
        if args.command == "families":
            out, tex = run_families(args)
            _write(dumps(out), args.output)
            if args.latex:
                _write(tex, args.latex)
            return EXIT_OK
        if args.command == "verify":
            report = run_verify(load_basis(args.basis), load_families(args.families), args)
            _write(dumps(report), args.output)
            return EXIT_OK if report["passed"] else EXIT_VERIFY
        # pipeline
        out_dir = Path(args.out_dir)
        solved = run_solve(args)
        _write(dumps(solved), str(out_dir / "basis.json"))
        basis = CharBasis.from_json(solved["basis"])
        members = build_families(basis, args.kind, args.max, args.F)
        fam = {
            "kind": args.kind,
            "max": args.max,
            "F": args.F if args.kind == "analytic" else None,
            "members": [m.to_json() for m in members],
        }
        _write(dumps(fam), str(out_dir / "families.json"))
        if args.latex:
            _write(latex_document(members), str(out_dir / "families.tex"))
        report = run_verify(basis, members, args)
        _write(dumps(report), str(out_dir / "report.json"))
        return EXIT_OK if report["passed"] else EXIT_VERIFY
    except UsageError as exc:
        print(f"nilsolve: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InsufficientMembers as exc:
        print(f"nilsolve: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateMath as exc:
        print(f"nilsolve: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (NilsolveError, KeyError, ValueError) as exc:
        print(f"nilsolve: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""JSON-in / JSON-out command line front end.

Exit codes: 0 success, 1 unparsable input, 2 domain error, 3 internal cap hit.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

import numpy as np

from .abelian_embed import phi_d, psi_d
from .cones_tubes import IntegralCone, cone_contains, cone_generators, theta0_constants, xd_member, xdk_member
from .config import Config
from .errors import CAP_ERRORS, DimensionMismatch, SiegelThetaError
from .reduction import Verdict, in_fundamental_set, siegel_reduce
from .sym_core import as_siegel, matrix_from_json, matrix_to_json
from .symplectic import SymplecticMatrix, polarization
from .theta_engine import Characteristic, theta, theta_char, transformation_constancy


class ParseError(Exception):
    code = "InvalidInput"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _text(v) -> str:
    return v if isinstance(v, str) else json.dumps(v)


def _json(v):
    try:
        return json.loads(_text(v))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


_BARE_I = re.compile(r"(?<![0-9.eE])[ij]")


def parse_complex(text) -> complex:
    """'2i', 'i', '0.7+0.8i', '-1.5', or a JSON pair [re, im]."""
    if not isinstance(text, str):
        text = json.dumps(text)
    s = text.strip()
    if s.startswith("["):
        pair = _json(s)
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ParseError("complex numbers are [re, im] pairs")
        return complex(float(pair[0]), float(pair[1]))
    s = _BARE_I.sub("1j", s.replace(" ", "")).replace("i", "j")
    try:
        return complex(s)
    except ValueError as exc:
        raise ParseError(f"cannot read {text!r} as a complex number") from exc


def parse_tau(text, g=None) -> np.ndarray:
    s = _text(text).strip()
    if s.startswith("{"):
        obj = _json(s)
        if g is not None:
            obj.setdefault("g", g)
        try:
            a = matrix_from_json(obj)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DimensionMismatch):
                raise
            raise ParseError(f"bad matrix object: {exc}") from exc
    elif s.startswith("["):
        rows = _json(s)
        try:
            a = np.array([[parse_complex(x) if isinstance(x, list) else complex(x) for x in row] for row in rows])
        except TypeError as exc:
            raise ParseError("matrix must be a list of rows") from exc
    else:
        a = np.array([[parse_complex(s)]])
    if g is not None and a.shape != (g, g):
        raise DimensionMismatch(f"tau has shape {a.shape}, expected ({g}, {g})")
    return a


def parse_z(text, g: int) -> np.ndarray:
    s = _text(text).strip()
    if s.startswith("["):
        items = _json(s)
        if not isinstance(items, list):
            raise ParseError("z must be a list")
        z = np.array([parse_complex(x) if isinstance(x, list) else complex(x) for x in items])
    else:
        z = np.full(g, parse_complex(s))
    if z.shape != (g,):
        raise DimensionMismatch(f"z has length {z.size}, expected {g}")
    return z


def parse_vec(text, g: int, default=0.0) -> list:
    if text is None:
        return [default] * g
    v = _json(text)
    if not isinstance(v, list):
        v = [v] * g
    try:
        out = [float(Fraction(str(x))) for x in v]
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad vector {text!r}") from exc
    if len(out) != g:
        raise DimensionMismatch(f"vector has length {len(out)}, expected {g}")
    return out


def parse_D(text):
    v = _json(text)
    if not isinstance(v, list):
        v = [v]
    return polarization(tuple(int(x) for x in v))


def parse_matrix(text) -> SymplecticMatrix:
    s = _text(text).strip()
    if s in ("J", "I"):
        return s
    obj = _json(s)
    if isinstance(obj, dict):
        return SymplecticMatrix.from_json(obj)
    return SymplecticMatrix(obj)


def _config(args) -> Config:
    return Config.from_env(eps=getattr(args, "eps", None), check_radius=getattr(args, "check_radius", None),
                           seed=getattr(args, "seed", None))


def _fund_pred(radius):
    return lambda t: in_fundamental_set(t, radius) != Verdict.NO


# commands

def cmd_theta(args, cfg: Config) -> dict:
    tau = as_siegel(parse_tau(args.tau, args.g), cfg.pd_tol)
    z = parse_z("0" if args.z is None else args.z, tau.g)
    if args.a is None and args.b is None:
        val = theta(z, tau, cfg.eps)
    else:
        ch = Characteristic(parse_vec(args.a, tau.g), parse_vec(args.b, tau.g))
        val = theta_char(ch, z, tau, cfg.eps)
    return val.to_json()


def cmd_theta_null(args, cfg: Config) -> dict:
    tau = as_siegel(parse_tau(args.tau, args.g), cfg.pd_tol)
    ch = Characteristic(parse_vec(args.a, tau.g), parse_vec(args.b, tau.g))
    return theta_char(ch, np.zeros(tau.g), tau, cfg.eps).to_json()


def cmd_reduce(args, cfg: Config) -> dict:
    tau = as_siegel(parse_tau(args.tau, args.g), cfg.pd_tol)
    cert = siegel_reduce(tau, cfg.check_radius)
    return {
        "tau_reduced": matrix_to_json(cert.tau_reduced.matrix),
        "sigma": cert.sigma.to_json(),
        "status": cert.status.value,
        "residual": cert.residual,
    }


def cmd_check(args, cfg: Config) -> dict:
    tau = as_siegel(parse_tau(args.tau, args.g), cfg.pd_tol)
    return {"verdict": in_fundamental_set(tau, cfg.check_radius).value}


def cmd_member(args, cfg: Config) -> dict:
    tau = as_siegel(parse_tau(args.tau, args.g), cfg.pd_tol)
    if args.fund:
        return {"verdict": in_fundamental_set(tau, cfg.check_radius).value}
    if args.z is None or args.D is None:
        raise ParseError("--xd and --xdk need --z and --D")
    z = parse_z(args.z, tau.g)
    D = parse_D(args.D)
    pred = _fund_pred(cfg.check_radius)
    if args.xdk:
        if args.K is None:
            raise ParseError("--xdk needs --K")
        ok = xdk_member(z, tau, D, float(args.K), pred)
    else:
        ok = xd_member(z, tau, D, pred)
    return {"verdict": "Yes" if ok else "No"}


def cmd_embed(args, cfg: Config) -> dict:
    tau = as_siegel(parse_tau(args.tau, args.g), cfg.pd_tol)
    D = parse_D(args.D)
    if args.psi or args.z is None:
        p = psi_d(tau, D, cfg.eps)
    else:
        p = phi_d(parse_z(args.z, tau.g), tau, D, cfg.eps)
    out = p.to_json()
    out["flagged"] = p.flagged
    return out


def cmd_cone(args, cfg: Config) -> dict:
    if args.theta0:
        if args.g is None or args.D is None or args.K is None:
            raise ParseError("--theta0 needs --g, --D and --K")
        D = parse_D(args.D)
        if D.g != args.g:
            raise DimensionMismatch("D does not have g entries")
        m, d, R = theta0_constants(args.g, D, float(args.K))
        return {"m": m, "d": d, "R": R}
    if args.cone is None:
        raise ParseError("need --theta0 or --cone")
    obj = _json(args.cone)
    try:
        C = IntegralCone.from_json(obj)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad cone object: {exc}") from exc
    if args.x is not None:
        x = [Fraction(str(v)) for v in _json(args.x)]
        return {"contains": cone_contains(C, x)}
    return {"rays": [list(v) for v in cone_generators(C)]}


def cmd_transform(args, cfg: Config) -> dict:
    M = parse_matrix(args.M)
    g = args.g
    if isinstance(M, str):
        if g is None:
            raise ParseError("named matrices need --g")
        M = SymplecticMatrix.J(g) if M == "J" else SymplecticMatrix.identity(g)
    g = M.g
    ch1 = Characteristic(parse_vec(args.a1, g), parse_vec(args.b1, g))
    ch = Characteristic(parse_vec(args.a, g), parse_vec(args.b, g))
    rng = np.random.default_rng(cfg.seed)
    samples = []
    for _ in range(args.samples):
        A = 0.3 * rng.normal(size=(g, g))
        X = rng.uniform(-0.5, 0.5, (g, g))
        tau1 = 0.5 * (X + X.T) + 1j * (A @ A.T + 0.8 * np.eye(g))
        z = 0.3 * (rng.normal(size=g) + 1j * rng.normal(size=g))
        samples.append((z, tau1))
    mean, rel_std = transformation_constancy(M, ch1, ch, samples, min(cfg.eps, 1e-12))
    return {"mean_ratio": [mean.real, mean.imag], "rel_std": rel_std}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="siegel-theta", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, tau_required=True):
        sp.add_argument("--g", type=int)
        sp.add_argument("--tau", required=tau_required)
        sp.add_argument("--eps", type=float)
        sp.add_argument("--check-radius", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--input", help="JSON object of further arguments, '-' for stdin")

    sp = sub.add_parser("theta", help="theta series or theta with characteristics")
    common(sp, tau_required=False)
    sp.add_argument("--z")
    sp.add_argument("--a")
    sp.add_argument("--b")
    sp.set_defaults(func=cmd_theta)

    sp = sub.add_parser("theta-null", help="theta constant theta[a;b](0, tau)")
    common(sp, tau_required=False)
    sp.add_argument("--a")
    sp.add_argument("--b")
    sp.set_defaults(func=cmd_theta_null)

    sp = sub.add_parser("reduce-tau", help="reduce tau into the Siegel fundamental set")
    common(sp, tau_required=False)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("check-fundamental", help="fundamental-set verdict")
    common(sp, tau_required=False)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("member", help="membership in F_g, X^D(F_g) or X^D_<K(F_g)")
    common(sp, tau_required=False)
    mode = sp.add_mutually_exclusive_group(required=True)
    mode.add_argument("--fund", action="store_true")
    mode.add_argument("--xd", action="store_true")
    mode.add_argument("--xdk", action="store_true")
    sp.add_argument("--z")
    sp.add_argument("--D")
    sp.add_argument("--K", type=float)
    sp.set_defaults(func=cmd_member)

    sp = sub.add_parser("embed", help="projective theta embedding phi^D (or Psi^D with --psi)")
    common(sp, tau_required=False)
    sp.add_argument("--D", required=False)
    sp.add_argument("--z")
    sp.add_argument("--psi", action="store_true")
    sp.set_defaults(func=cmd_embed)

    sp = sub.add_parser("cone", help="cone membership, generators, or the theta0 tube constants")
    sp.add_argument("--theta0", action="store_true")
    sp.add_argument("--g", type=int)
    sp.add_argument("--D")
    sp.add_argument("--K", type=float)
    sp.add_argument("--cone")
    sp.add_argument("--x")
    sp.add_argument("--input")
    sp.set_defaults(func=cmd_cone)

    sp = sub.add_parser("transform-check", help="constancy of the theta transformation ratio")
    sp.add_argument("--M", required=False)
    sp.add_argument("--g", type=int)
    sp.add_argument("--a1")
    sp.add_argument("--b1")
    sp.add_argument("--a")
    sp.add_argument("--b")
    sp.add_argument("--samples", type=int, default=20)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--input")
    sp.set_defaults(func=cmd_transform)
    return p


_REQUIRED = {"theta": ("tau",), "theta-null": ("tau",), "reduce-tau": ("tau",), "check-fundamental": ("tau",),
             "member": ("tau",), "embed": ("tau", "D"), "transform-check": ("M",)}


def _merge_input(args):
    src = getattr(args, "input", None)
    if not src:
        return
    raw = sys.stdin.read() if src == "-" else open(src).read()
    obj = _json(raw)
    if not isinstance(obj, dict):
        raise ParseError("--input must hold a JSON object")
    for key, val in obj.items():
        attr = key.replace("-", "_")
        if getattr(args, attr, None) in (None, False):
            setattr(args, attr, val)


def _emit(obj):
    print(json.dumps(obj))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _merge_input(args)
        for name in _REQUIRED.get(args.command, ()):
            if getattr(args, name, None) is None:
                raise ParseError(f"--{name} is required")
        cfg = _config(args)
        out = args.func(args, cfg)
    except ParseError as exc:
        print(str(exc), file=sys.stderr)
        _emit({"error": exc.code})
        return 1
    except CAP_ERRORS as exc:
        print(str(exc), file=sys.stderr)
        _emit({"error": exc.code})
        return 3
    except (SiegelThetaError, ValueError, ArithmeticError) as exc:
        print(str(exc), file=sys.stderr)
        _emit({"error": getattr(exc, "code", type(exc).__name__)})
        return 2
    _emit(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())

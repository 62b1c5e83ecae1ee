"""Command line: connect, verify, trace, elliptic, monodromy, domains.

Exit codes: 0 success, 1 verification mismatch, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
import warnings
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from . import asymptotics, connection, elliptic, fuchsian, integrator, monodromy
from .errors import DomainError, NumericalError
from .pipeline import auto_seed_radius, rational_critical_data, verify_connection, verify_rational
from .special import CoveringPoint

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"


class UsageError(DomainError):
    pass


# ---------------------------------------------------------------- parsing

_SQRT = re.compile(r"^([+-]?)sqrt\(?([0-9.]+)\)?$")


def parse_complex(text) -> complex:
    """'1.5', '0.3+0.2i', '-sqrt2', 'sqrt(3)' or a JSON pair '[re, im]'."""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip().replace(" ", "")
    if s.startswith("["):
        re_, im = json.loads(s)
        return complex(float(re_), float(im))
    m = _SQRT.match(s)
    if m:
        v = math.sqrt(float(m.group(2)))
        return complex(-v if m.group(1) == "-" else v)
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise UsageError(f"cannot read {text!r} as a complex number") from None


def parse_triple(text: str) -> monodromy.MonodromyTriple:
    s = text.strip()
    if s.startswith("[["):
        return monodromy.MonodromyTriple.from_json(json.loads(s))
    parts = [p for p in s.split(",") if p.strip()]
    if len(parts) != 3:
        raise UsageError(f"a triple needs three entries, got {len(parts)}")
    return monodromy.MonodromyTriple(*[parse_complex(p) for p in parts])


def parse_point(text: str) -> CoveringPoint:
    """Covering point as 'modulus,argument' or JSON [modulus, argument]."""
    s = text.strip()
    vals = json.loads(s) if s.startswith("[") else s.split(",")
    if len(vals) != 2:
        raise UsageError(f"a covering point is 'modulus,argument', got {text!r}")
    r, a = float(vals[0]), float(vals[1])
    if r <= 0:
        raise UsageError("modulus must be positive")
    return CoveringPoint(r, a)


def parse_points(text: str) -> list[CoveringPoint]:
    s = text.strip()
    if s.startswith("[["):
        return [CoveringPoint(float(r), float(a)) for r, a in json.loads(s)]
    return [parse_point(p) for p in s.split(";") if p.strip()]


def cjson(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


# ---------------------------------------------------------------- output

def provenance(args, **extra) -> dict:
    head = {"tool": "pvi-critical", "version": __version__, "command": args.command}
    for key in ("mu", "tol", "seed"):
        if getattr(args, key, None) is not None:
            v = getattr(args, key)
            head[key] = str(v)
    head.update({k: v for k, v in extra.items() if v is not None})
    return head


def emit_json(args, payload: dict):
    text = json.dumps(payload, indent=2, sort_keys=True)
    _write(args, text + "\n")


def emit_csv(args, header: dict, columns: list[str], rows):
    buf = io.StringIO()
    buf.write("# " + json.dumps(header, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])
    _write(args, buf.getvalue())


def _write(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _mu(args) -> monodromy.Mu:
    if args.mu is None:
        raise UsageError("--mu is required")
    return monodromy.Mu(parse_complex(args.mu))


def _critical_from_args(args, point: str = "zero") -> connection.CriticalData:
    if args.sigma is None or args.a is None:
        raise UsageError("give both --sigma and --a")
    return connection.CriticalData(parse_complex(args.sigma), parse_complex(args.a), point)


# ---------------------------------------------------------------- commands

def cmd_connect(args) -> int:
    mu = _mu(args)
    if args.triple is not None:
        t = parse_triple(args.triple)
        cd = connection.connect(t, mu, args.point)
        local = t if args.point == "zero" else (
            connection.substitute_one(t) if args.point == "one" else connection.substitute_infinity(t))
        aliases = []
        if cd.sigma != 0:
            aliases.append(connection.CriticalData(-cd.sigma, 1 / (16 * cd.a), args.point).to_json())
        for n in (-1, 1):
            for sign in (1, -1):
                try:
                    aliases.append(connection.alias(cd, n, sign, local, mu).to_json())
                except (DomainError, NumericalError):
                    pass
        out = cd.to_json()
        out.update(aliases=aliases, relation_residual=monodromy.relation_residual(t, mu),
                   triple=monodromy.canonicalize(t).to_json(), provenance=provenance(args))
        emit_json(args, out)
        return EXIT_OK
    if args.point != "zero":
        raise UsageError("(sigma, a) are read as data at x = 0; --point applies to --triple input")
    cd = _critical_from_args(args)
    t = connection.forward(cd.sigma, cd.a, mu)
    emit_json(args, {"triple": t.to_json(), "case": connection.classify_sigma(cd.sigma, mu).tag,
                     "relation_residual": monodromy.relation_residual(t, mu),
                     "provenance": provenance(args)})
    return EXIT_OK


def _verify_rational(args, mu) -> int:
    a = parse_complex(args.a)
    expect = None
    if args.expect_sigma is not None or args.expect_a is not None:
        pred = rational_critical_data(a, args.point)
        expect = connection.CriticalData(
            parse_complex(args.expect_sigma) if args.expect_sigma is not None else pred.sigma,
            parse_complex(args.expect_a) if args.expect_a is not None else pred.a, args.point)
    tol = args.tol if args.tol is not None else 1e-2
    rep = verify_rational(a, args.point, seed_radius=args.seed_radius, arg=args.arg,
                          window=(args.window_lo, args.window_hi), tol=tol, expect=expect)
    out = rep.to_json()
    out["provenance"] = provenance(args, fit_method=rep.fitted.method, family="rational")
    emit_json(args, out)
    return EXIT_OK if rep.passed else EXIT_MISMATCH


def cmd_verify(args) -> int:
    mu = _mu(args)
    if args.triple is None and args.sigma is not None and parse_complex(args.sigma) == 0 \
            and abs(mu.value - 1) < 1e-15:
        # sigma = 0 at mu = 1 is the rational family; its connection data is explicit
        if args.a is None:
            raise UsageError("give --a")
        return _verify_rational(args, mu)
    if args.triple is not None:
        t = parse_triple(args.triple)
    else:
        cd = _critical_from_args(args)
        t = connection.forward(cd.sigma, cd.a, mu)
    expect = None
    if args.expect_sigma is not None or args.expect_a is not None:
        pred = connection.connect(t, mu, args.point)
        expect = connection.CriticalData(
            parse_complex(args.expect_sigma) if args.expect_sigma is not None else pred.sigma,
            parse_complex(args.expect_a) if args.expect_a is not None else pred.a, args.point)
    tol = args.tol if args.tol is not None else 1e-2
    rep = verify_connection(t, mu, args.point, seed_radius=args.seed_radius, arg=args.arg,
                            window=(args.window_lo, args.window_hi), tol=tol, expect=expect)
    out = rep.to_json()
    out["provenance"] = provenance(args, fit_method=rep.fitted.method)
    emit_json(args, out)
    return EXIT_OK if rep.passed else EXIT_MISMATCH


def cmd_trace(args) -> int:
    mu = _mu(args)
    if args.path is None:
        raise UsageError("--path is required: waypoints 'modulus,argument;...'")
    wps = parse_points(args.path)
    if len(wps) < 2:
        raise UsageError("--path needs a start point and at least one waypoint")
    cd = _critical_from_args(args)
    y0, dy0 = asymptotics.eval_leading(wps[0], cd)
    tol = args.tol if args.tol is not None else 1e-12
    plan = integrator.PathPlan(wps, rel_tol=tol)
    tr = integrator.integrate(integrator.OdeState(wps[0], y0, dy0), plan, mu)
    rows = [[s.x.modulus, s.x.argument, s.y.real, s.y.imag, s.dy.real, s.dy.imag] for s in tr.states]
    head = provenance(args, case=connection.classify_sigma(cd.sigma, mu).tag, rel_tol=tol,
                      abs_tol=plan.abs_tol, events=tr.events or None)
    emit_csv(args, head, ["x_mod", "x_arg", "y_re", "y_im", "dy_re", "dy_im"], rows)
    return EXIT_OK


def cmd_elliptic(args) -> int:
    mu = _mu(args)
    if args.nu1 is None or args.nu2 is None or args.x is None:
        raise UsageError("--nu1, --nu2 and --x are required")
    ed = elliptic.EllipticData(parse_complex(args.nu1), parse_complex(args.nu2))
    tol = args.tol if args.tol is not None else 1e-12
    r = args.r
    rows = []
    for x in parse_points(args.x):
        sol = elliptic.solve_v(x, ed, mu, tol=tol, r=r)
        y = elliptic._wp_at(x, ed.nu1, ed.nu2, sol.v)
        rows.append([x.modulus, x.argument, sol.v.real, sol.v.imag, sol.w.real, sol.w.imag,
                     y.real, y.imag, sol.bound_ratio, sol.iterations])
    head = provenance(args, nu1=str(ed.nu1), nu2=str(ed.nu2), r=r)
    emit_csv(args, head, ["x_mod", "x_arg", "v_re", "v_im", "w_re", "w_im", "y_re", "y_im",
                          "bound_ratio", "iterations"], rows)
    return EXIT_OK


def _y_at(args, x: CoveringPoint, mu) -> tuple[complex, complex, str]:
    if args.y is not None:
        if args.dy is None:
            raise UsageError("--y needs --dy")
        return parse_complex(args.y), parse_complex(args.dy), "given"
    if args.nu1 is not None and args.nu2 is not None:
        if abs(mu.value - 0.5) > 1e-15:
            raise UsageError("the closed form from --nu1/--nu2 holds only for mu = 1/2")
        n1, n2 = parse_complex(args.nu1), parse_complex(args.nu2)
        f = lambda p: elliptic.picard_closed_form(p, n1, n2)
        y, dy, _ = integrator.cauchy_derivatives(f, x)
        return y, dy, "picard"
    cd = _critical_from_args(args)
    r0 = args.seed_radius if args.seed_radius is not None else auto_seed_radius(cd.sigma)
    x0 = CoveringPoint(r0, x.argument)
    y0, dy0 = asymptotics.eval_leading(x0, cd, warn_tol=1.0)
    tr = integrator.integrate(integrator.OdeState(x0, y0, dy0), integrator.PathPlan([x0, x]), mu,
                              raise_on_pole=True)
    return tr.final.y, tr.final.dy, "integrated"


def cmd_monodromy(args) -> int:
    mu = _mu(args)
    if args.x is None:
        raise UsageError("--x is required")
    x = parse_point(args.x)
    y, dy, source = _y_at(args, x, mu)
    fs = fuchsian.build_system(x, y, dy, mu)
    ms = fuchsian.numeric_monodromy(fs)
    tri = fuchsian.traces_to_triple(ms)
    out = {"matrices": ms.to_json(), "pair_traces": [cjson(v) for v in monodromy.pair_traces(ms)],
           "triple": tri.to_json(), "y": cjson(y), "dy": cjson(dy), "source": source,
           "invariants": {k: float(v) for k, v in fs.invariants().items()},
           "provenance": provenance(args)}
    emit_json(args, out)
    return EXIT_OK


def cmd_domains(args) -> int:
    rng = np.random.default_rng(args.seed)
    lo, hi = math.log(args.rmin), math.log(args.rmax)
    if args.samples:
        lr = rng.uniform(lo, hi, args.samples)
        ar = rng.uniform(args.arg_min, args.arg_max, args.samples)
        pts = list(zip(lr, ar))
    else:
        pts = [(a, b) for a in np.linspace(lo, hi, args.grid) for b in np.linspace(args.arg_min, args.arg_max, args.grid)]
    if args.kind == "script":
        if args.nu1 is None or args.nu2 is None:
            raise UsageError("--kind script needs --nu1 and --nu2")
        ed = elliptic.EllipticData(parse_complex(args.nu1), parse_complex(args.nu2))
        d = elliptic.DomainSpecScriptD(args.r, ed)
        test = lambda p: elliptic.script_domain_contains(p, d)
        extra = {"nu1": str(ed.nu1), "nu2": str(ed.nu2), "r": args.r}
    else:
        if args.sigma is None:
            raise UsageError(f"--kind {args.kind} needs --sigma")
        s = parse_complex(args.sigma)
        if args.kind == "D":
            d = asymptotics.DomainSpecD(args.eps, args.theta1, args.theta2, args.sigma_tilde, s, args.point)
            test = lambda p: asymptotics.domain_contains(p, d)
        else:
            if args.a is None:
                raise UsageError("--kind B needs --a")
            b = asymptotics.StripB(s, parse_complex(args.a), args.theta2, args.sigma_tilde)
            test = lambda p: asymptotics.strip_contains(p, b)
        extra = {"sigma": str(s), "eps": args.eps, "theta1": args.theta1, "theta2": args.theta2,
                 "sigma_tilde": args.sigma_tilde}
    rows = [[float(lr_), float(a_), int(test(CoveringPoint(math.exp(lr_), float(a_))))] for lr_, a_ in pts]
    emit_csv(args, provenance(args, kind=args.kind, **extra), ["ln_abs_x", "arg_x", "inside"], rows)
    return EXIT_OK


# ---------------------------------------------------------------- wiring

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pvi-critical", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, mu=True):
        if mu:
            sp.add_argument("--mu", help="equation parameter, e.g. 0.5 or 0.3+0.1i")
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--tol", type=float)
        sp.add_argument("--seed", type=int, default=0)

    def data(sp):
        sp.add_argument("--sigma")
        sp.add_argument("--a")
        sp.add_argument("--triple", help="'x0,x1,xinf'; entries may be sqrt2, 0.3+0.2i or [re,im]")

    sp = sub.add_parser("connect", help="triple <-> (sigma, a)")
    common(sp)
    data(sp)
    sp.add_argument("--point", choices=connection.POINTS, default="zero")
    sp.set_defaults(func=cmd_connect)

    sp = sub.add_parser("verify", help="integrate from 0 and compare the fit with the connection formula")
    common(sp)
    data(sp)
    sp.add_argument("--point", choices=("one", "infinity"), default="one")
    sp.add_argument("--seed-radius", type=float)
    sp.add_argument("--arg", type=float, help="argument of the seed ray")
    sp.add_argument("--window-lo", type=float, default=1e-4)
    sp.add_argument("--window-hi", type=float, default=1e-2)
    sp.add_argument("--expect-sigma")
    sp.add_argument("--expect-a")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("trace", help="integrate from a three-term seed along waypoints")
    common(sp)
    data(sp)
    sp.add_argument("--path", help="'mod,arg;mod,arg;...', first point is the seed")
    sp.set_defaults(func=cmd_trace)

    sp = sub.add_parser("elliptic", help="correction v, w and y of the elliptic representation")
    common(sp)
    sp.add_argument("--nu1")
    sp.add_argument("--nu2")
    sp.add_argument("--x", help="'mod,arg;...' or JSON [[mod,arg],...]")
    sp.add_argument("--r", type=float, default=None)
    sp.set_defaults(func=cmd_elliptic)

    sp = sub.add_parser("monodromy", help="numeric monodromy of the associated Fuchsian system")
    common(sp)
    data(sp)
    sp.add_argument("--x", help="'mod,arg'")
    sp.add_argument("--nu1")
    sp.add_argument("--nu2")
    sp.add_argument("--y")
    sp.add_argument("--dy")
    sp.add_argument("--seed-radius", type=float)
    sp.set_defaults(func=cmd_monodromy)

    sp = sub.add_parser("domains", help="membership samples for plotting")
    common(sp, mu=False)
    sp.add_argument("--kind", choices=("D", "B", "script"), default="D")
    sp.add_argument("--sigma")
    sp.add_argument("--a")
    sp.add_argument("--nu1")
    sp.add_argument("--nu2")
    sp.add_argument("--point", choices=connection.POINTS, default="zero")
    sp.add_argument("--eps", type=float, default=0.5)
    sp.add_argument("--theta1", type=float, default=-5.0)
    sp.add_argument("--theta2", type=float, default=5.0)
    sp.add_argument("--sigma-tilde", type=float, default=0.5)
    sp.add_argument("--r", type=float, default=0.05)
    sp.add_argument("--rmin", type=float, default=1e-6)
    sp.add_argument("--rmax", type=float, default=0.5)
    sp.add_argument("--arg-min", type=float, default=-10.0)
    sp.add_argument("--arg-max", type=float, default=10.0)
    sp.add_argument("--grid", type=int, default=41)
    sp.add_argument("--samples", type=int, default=0, help="random samples instead of a grid")
    sp.set_defaults(func=cmd_domains)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, ArithmeticError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

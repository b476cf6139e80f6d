"""Command-line interface: ``maycompat <command> [flags]``.

Exit status is 0 when every check passes, 1 when a verified property
fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time

from .complexes import (ChainMap, ComplexError, cone, cylinder, homology, is_acyclic)
from .generators import (random_chain_map, random_complex, random_endo_square, random_endomorphism,
                         random_ses_with_structure)
from .linalg import Ring, RingError
from .monoidal import (associator, beta_iso, check_diagdual, dual_complex, duality_unit_counit, is_chain_iso,
                       symmetry, tensor)
from .serialize import InputError, canonical, complex_to_json, load, map_to_json, ses_to_json

COMMANDS = ("homology", "cone", "cyl", "tensor", "dual", "trace", "lef", "tc-check", "additivity", "fuzz")
TC_AXIOMS = ("1", "2", "3", "4", "5a", "5b", "5dual")


def _rng(args, tag) -> random.Random:
    return random.Random(f"{args.seed}:{args.command}:{tag}")


def _window(args):
    if args.min_deg > args.max_deg:
        raise InputError("--min-deg must not exceed --max-deg")
    if args.max_rank < 0:
        raise InputError("--max-rank must be nonnegative")
    return (args.min_deg, args.max_deg)


def _gen(args, tag):
    rng = _rng(args, tag)
    return random_complex(args.ring, rng, _window(args), args.max_rank), rng


def _input(args):
    return load(args.input) if args.input else None


def _homology_json(E):
    out = {}
    for n in E.degrees:
        h = homology(E, n)
        out[str(n)] = {"free_rank": h.free_rank, "torsion": [E.ring.entry_to_json(t) for t in h.torsion]}
    return out


def _cell_json(cell):
    out = cell.summary()
    if cell.homotopy is not None and not cell.homotopy.is_trivial():
        out["homotopy"] = map_to_json(cell.homotopy.s, "source", "target")
    return out


# --- commands -----------------------------------------------------------------


def cmd_homology(args):
    b = _input(args)
    if b is not None:
        E = b.complex(args.name)
        return {"complex": complex_to_json(E), "homology": _homology_json(E)}, True
    gen, _ = _gen(args, 0)
    E = gen.complex
    got = {n: (homology(E, n).free_rank, sorted(homology(E, n).torsion)) for n in E.degrees}
    want = {n: v for n, v in gen.expected_homology().items() if n in E.ranks}
    return {"complex": complex_to_json(E), "homology": _homology_json(E),
            "matches_construction": got == want}, got == want


def _map_or_random(args, b, name):
    if b is not None:
        return b.map(name)
    rng = _rng(args, 0)
    E = random_complex(args.ring, rng, _window(args), args.max_rank).complex
    F = random_complex(args.ring, rng, _window(args), args.max_rank).complex
    return random_chain_map(E, F, rng)


def cmd_cone(args):
    f = _map_or_random(args, _input(args), args.name)
    cn = cone(f)
    from .triangulation import DistinguishednessCertificate
    checks = {"standard_triangle": DistinguishednessCertificate.standard(f).verify(),
              "cone_of_identity_acyclic": is_acyclic(cone(ChainMap.identity(f.source)).complex),
              "incl_chain": cn.incl.is_chain(), "proj_chain": cn.proj.is_chain()}
    return {"cone": complex_to_json(cn.complex), "checks": checks}, all(checks.values())


def cmd_cyl(args):
    f = _map_or_random(args, _input(args), args.name)
    cy = cylinder(f)
    checks = {"to_target f' = f": cy.to_target @ cy.f_prime == f,
              "to_target from_target = id": cy.to_target @ cy.from_target == ChainMap.identity(f.target),
              "id ~ from_target to_target": cy.homotopy.verify(),
              "g'' chain": cy.g_pp.is_chain()}
    return {"cylinder": complex_to_json(cy.complex), "checks": checks}, all(checks.values())


def _two_complexes(args):
    b = _input(args)
    if b is not None:
        names = sorted(b.complexes)
        E = b.complexes[names[0]]
        F = b.complexes[names[1]] if len(names) > 1 else E
        return E, F
    g1, _ = _gen(args, 0)
    g2, _ = _gen(args, 1)
    return g1.complex, g2.complex


def cmd_tensor(args):
    E, F = _two_complexes(args)
    T = tensor(E, F)
    g = symmetry(E, F)
    checks = {"symmetry_iso": is_chain_iso(g),
              "symmetry_involutive": symmetry(F, E) @ g == ChainMap.identity(T),
              "associator_iso": is_chain_iso(associator(E, F, E))}
    return {"tensor": complex_to_json(T), "checks": checks}, all(checks.values())


def cmd_dual(args):
    b = _input(args)
    E = b.complex(args.name) if b is not None else _gen(args, 0)[0].complex
    DE = dual_complex(E)
    checks = {"beta_iso": is_chain_iso(beta_iso(E)),
              "triangle_identities": duality_unit_counit(E).triangle_identities()}
    if b is not None and b.maps:
        f = b.map(args.map)
        checks["naturality_squares"] = check_diagdual(f)["ok"]
    return {"dual": complex_to_json(DE), "checks": checks}, all(checks.values())


def _endo(args, b):
    if b is not None:
        return b.map(args.name or "phi")
    gen, rng = _gen(args, 0)
    return random_endomorphism(gen, rng)


def cmd_trace(args):
    from .traces import euler_trace_oracle, tr
    b = _input(args)
    phi = _endo(args, b)
    if phi.degree != 0 or phi.source != phi.target:
        raise InputError("trace needs a degree-0 endomorphism")
    js = phi.ring.entry_to_json
    a, o = tr(phi), euler_trace_oracle(phi)
    return {"tr": js(a), "euler_oracle": js(o), "equal": a == o}, a == o


def cmd_lef(args):
    from .traces import demo_orientation, lef, tr, trivial_orientation
    b = _input(args)
    phi = _endo(args, b)
    A = trivial_orientation(phi.ring) if args.orientation == "trivial" else demo_orientation(phi.ring, args.scale)
    v = lef(phi, A)
    t = tr(phi)
    c = 1 if args.orientation == "trivial" else args.scale
    js = phi.ring.entry_to_json
    expected = phi.ring.reduce(c * t)
    nf = [[js(x), js(m)] for x, m in v.normal_form]
    ok = len(v.normal_form) == 1 and v.normal_form[0][0] == expected
    return {"orientation": A.name, "representative": [js(x) for x in v.representative],
            "normal_form": nf, "tr": js(t), "matches_scaled_trace": ok}, ok


def _ses_instances(args):
    b = _input(args)
    if b is not None:
        if b.ses is None:
            raise InputError("input has no 'ses' entry")
        return [(b.ses, None, None, b.square)]
    out = []
    for i in range(args.cases):
        rng = _rng(args, i)
        ses, gE, gG = random_ses_with_structure(args.ring, rng, _window(args), args.max_rank)
        out.append((ses, gE, gG, rng))
    return out


def _tc_case(axiom, ses, other):
    from .tc5 import build_tc5a, check_tc5_dual, check_tc5b
    from .triangulation import build_tc3, build_tc3prime, check_tc4, involute_braid
    if axiom == "3":
        bw, bv = build_tc3(ses, other), build_tc3prime(ses, other)
        inv = involute_braid(bw)
        res = {"W": _braid_json(bw), "V": _braid_json(bv), "involution": inv.summary()}
        return res, bw.verify() and bv.verify() and res["W"]["pass"] and res["V"]["pass"] and inv.verify()
    if axiom == "4":
        r = check_tc4(build_tc3(ses, other), build_tc3prime(ses, other))
        s = r.summary()
        return s, s["pass"]
    if axiom == "5a":
        w = build_tc5a(ses)
        res = w.summary()
        res["cells"] = [_cell_json(c) for c in w.cells]
        return res, w.verify()
    if axiom == "5b":
        r = check_tc5b(ses)
        res = r.summary()
        return res, r.verify()
    if axiom == "5dual":
        res = check_tc5_dual(ses)
        return res, res["pass"]
    raise InputError(f"unknown axiom {axiom!r}")


def _braid_json(b):
    s = b.summary()
    s["cells"] = [_cell_json(c) for c in b.cells]
    return s


def cmd_tc_check(args):
    from .triangulation import check_tc1, check_tc2
    ax = args.axiom
    if ax == "1":
        r = check_tc1(args.ring)
        return {"axiom": "TC1", "result": r}, r["pass"]
    if ax == "2":
        cases, ok = [], True
        for i in range(args.cases):
            rng = _rng(args, i)
            E = random_complex(args.ring, rng, _window(args), args.max_rank).complex
            F = random_complex(args.ring, rng, _window(args), args.max_rank).complex
            X = random_complex(args.ring, rng, _window(args), args.max_rank).complex
            r = check_tc2(random_chain_map(E, F, rng), X)
            cases.append({"case": i, **r})
            ok = ok and r["pass"]
        return {"axiom": "TC2", "cases": cases}, ok
    inst = _ses_instances(args)
    cases, ok = [], True
    for i, (ses, _, _, rng) in enumerate(inst):
        other = inst[(i + 1) % len(inst)][0]
        res, good = _tc_case(ax, ses, other)
        cases.append({"case": i, "pass": good, **res})
        ok = ok and good
    return {"axiom": "TC" + ax, "cases": cases}, ok


def _square(ses, gE, gG, extra):
    if isinstance(extra, random.Random):
        return random_endo_square(ses, gE, gG, extra)
    if extra is None:
        raise InputError("input has no 'square' entry (phi, psi, s)")
    return extra


def cmd_additivity(args):
    from .traces import additivity_run
    cases, ok = [], True
    for i, (ses, gE, gG, extra) in enumerate(_ses_instances(args)):
        phi, psi, s = _square(ses, gE, gG, extra)
        r = additivity_run(ses, phi, psi, s, full=not args.core)
        summ = r.summary()
        case = {"case": i, **summ}
        if args.witnesses:
            case["instance"] = ses_to_json(ses, (phi, psi, s))
        cases.append(case)
        ok = ok and r.passed
    return {"cases": cases}, ok


def cmd_fuzz(args):
    from .sign_audit import audit_instance, unexplained
    from .traces import additivity_run, euler_trace_oracle, tr
    cases, ok = [], True
    counts = {"additivity_equal": 0, "nonzero_homotopy": 0, "trace_oracle_agree": 0, "sign_audit_clean": 0}
    for i in range(args.cases):
        rng = _rng(args, i)
        ses, gE, gG = random_ses_with_structure(args.ring, rng, _window(args), args.max_rank)
        phi, psi, s = random_endo_square(ses, gE, gG, rng)
        r = additivity_run(ses, phi, psi, s, full=False)
        agree = tr(psi) == euler_trace_oracle(psi) and tr(phi) == euler_trace_oracle(phi)
        audit = unexplained(audit_instance(ses, phi, psi, s)) if args.audit else []
        verdict = {"case": i, "additivity": r.summary(), "trace_oracle_agree": agree,
                   "sign_audit_unexplained": audit}
        counts["additivity_equal"] += r.equal
        counts["nonzero_homotopy"] += not s.is_trivial()
        counts["trace_oracle_agree"] += agree
        counts["sign_audit_clean"] += not audit
        good = r.passed and agree and not audit
        verdict["pass"] = good
        ok = ok and good
        cases.append(verdict)
    return {"cases": cases, "counts": counts}, ok


HANDLERS = {"homology": cmd_homology, "cone": cmd_cone, "cyl": cmd_cyl, "tensor": cmd_tensor, "dual": cmd_dual,
            "trace": cmd_trace, "lef": cmd_lef, "tc-check": cmd_tc_check, "additivity": cmd_additivity,
            "fuzz": cmd_fuzz}


def _ring_arg(text):
    try:
        return Ring.parse(text)
    except RingError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", type=_ring_arg, default=Ring.parse("Z"), help="Z, Q or Fp:<p>")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cases", type=int, default=None, help="number of fuzzed cases (fuzz: 10, others: 1)")
    common.add_argument("--min-deg", type=int, default=-1)
    common.add_argument("--max-deg", type=int, default=1)
    common.add_argument("--max-rank", type=int, default=2)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--in", dest="input", default=None, help="JSON input file")
    common.add_argument("--name", default=None, help="complex or map to use from the input")
    p = argparse.ArgumentParser(prog="maycompat", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "tc-check":
            sp.add_argument("axiom", choices=TC_AXIOMS)
        if name == "dual":
            sp.add_argument("--map", default=None)
        if name == "lef":
            sp.add_argument("--orientation", choices=("trivial", "demo"), default="demo")
            sp.add_argument("--scale", type=int, default=2)
        if name == "additivity":
            sp.add_argument("--core", action="store_true", help="skip the m-squares on the evaluation side")
            sp.add_argument("--witnesses", action="store_true", help="embed each instance in the report")
        if name == "fuzz":
            sp.add_argument("--no-audit", dest="audit", action="store_false")
    return p


def _echo(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        out[k] = str(v) if isinstance(v, Ring) else v
    return out


def run(argv) -> tuple:
    """``(exit code, report)``; the report is ``None`` on input errors."""
    args = build_parser().parse_args(argv)
    if args.cases is None:
        args.cases = 10 if args.command == "fuzz" else 1
    if args.cases < 0:
        return 2, {"error": {"code": "E_INPUT", "message": "--cases must be nonnegative"}}
    t0 = time.perf_counter()
    try:
        result, ok = HANDLERS[args.command](args)
    except InputError as exc:
        return 2, {"command": _echo(args), "error": {"code": exc.code, "message": str(exc)}}
    except (ComplexError, RingError) as exc:
        code = getattr(exc, "code", "E_INPUT")
        return 2, {"command": _echo(args), "error": {"code": code, "message": str(exc)}}
    report = {"command": _echo(args), "result": result, "pass": bool(ok),
              "timing": {"seconds": round(time.perf_counter() - t0, 6)}}
    return (0 if ok else 1), report


def main(argv=None) -> int:
    code, report = run(sys.argv[1:] if argv is None else argv)
    text = canonical(report)
    if report is not None and "command" in report and report["command"].get("out"):
        with open(report["command"]["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == 2:
        sys.stderr.write(f"maycompat: {report['error']['code']}: {report['error']['message']}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())

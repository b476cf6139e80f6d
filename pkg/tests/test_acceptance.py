"""The ten acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL ...`` line, which is also
collected into the terminal summary.  Run standalone with
``python3 tests/test_acceptance.py``.
"""

import json
import random
import statistics
import subprocess
import sys
import time
from pathlib import Path

import pytest

from maycompat.generators import (random_chain_map, random_complex, random_endo_square, random_endomorphism,
                                  random_ses, random_ses_with_structure)
from maycompat.linalg import INTEGERS, RATIONALS, prime_field
from maycompat.monoidal import beta_iso, check_diagdual, dual_map, duality_unit_counit, is_chain_iso
from maycompat.sign_audit import RECORDED_FLIPS, audit_instance, unexplained
from maycompat.tc5 import build_tc5a, check_tc5b
from maycompat.traces import additivity_run, euler_trace_oracle, tr
from maycompat.triangulation import build_tc3, build_tc3prime, check_tc1, check_tc4

from conftest import ACCEPTANCE

Z, F7 = INTEGERS, prime_field(7)
ROOT = Path(__file__).resolve().parent.parent


def verdict(n, ok, detail, key=None):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE[key or f"{n:02d}"] = line
    return ok


def both_rings(count, seed):
    """``count`` independent rngs, alternating Z and F7."""
    return [((Z, F7)[i % 2], random.Random(f"{seed}:{i}")) for i in range(count)]


def test_criterion_1_tc1():
    rows, ok = [], True
    for ring in (Z, RATIONALS, prime_field(2), F7):
        times = []
        for _ in range(21):
            t0 = time.perf_counter()
            r = check_tc1(ring)
            times.append(time.perf_counter() - t0)
        ms = statistics.median(times) * 1e3
        minus_one = r["composite"] == {"-2": [[ring.entry_to_json(ring(-1))]]}
        good = r["pass"] and minus_one and ms < 1.0
        ok = ok and good
        rows.append(f"{ring} {ms:.2f}ms")
    verdict(1, ok, "composite on Sigma^2 S is -id; median runtime " + ", ".join(rows))
    assert ok


def test_criterion_2_trace_oracle():
    endos = []
    for ring, rng in both_rings(500, "trace"):
        lo = rng.randint(-3, 2)
        hi = rng.randint(lo + 1, 3)
        gen = random_complex(ring, rng, (lo, hi), 4)
        endos.append(random_endomorphism(gen, rng))
    assert all(max(phi.source.ranks.values(), default=0) <= 4 for phi in endos)
    t0 = time.perf_counter()
    agree = sum(tr(phi) == euler_trace_oracle(phi) for phi in endos)
    secs = time.perf_counter() - t0
    ok = agree == len(endos) and secs < 10
    verdict(2, ok, f"tr = sum (-1)^n tr(phi^n) on {agree}/{len(endos)} endomorphisms (Z, F7) in {secs:.2f}s")
    assert ok


def test_criterion_3_additivity():
    t0 = time.perf_counter()
    per_ring = {"Z": [0, 0, 0], "Fp:7": [0, 0, 0]}     # runs, equal, nonzero s
    full_ok = full_n = 0
    for i, (ring, rng) in enumerate(both_rings(400, "additivity")):
        ses, gE, gG = random_ses_with_structure(ring, rng)
        phi, psi, s = random_endo_square(ses, gE, gG, rng)
        # two of every twenty instances (one per ring) also run the evaluation-side squares
        full = i % 20 < 2
        r = additivity_run(ses, phi, psi, s, full=full)
        row = per_ring[str(ring)]
        row[0] += 1
        row[1] += r.equal and r.passed
        row[2] += not s.is_trivial()
        if full:
            full_n += 1
            full_ok += r.passed
    secs = time.perf_counter() - t0
    ok = (all(n >= 200 and eq == n and nz > 0 for n, eq, nz in per_ring.values())
          and full_ok == full_n and secs < 60)
    detail = "; ".join(f"{k}: {eq}/{n} equal, {nz} with s != 0" for k, (n, eq, nz) in per_ring.items())
    verdict(3, ok, f"Tr(psi) = Tr(phi) + Tr(omega): {detail}; full checks {full_ok}/{full_n}; {secs:.1f}s")
    assert ok


@pytest.fixture(scope="module")
def braid_corpus():
    """50 SES pairs with both braids built once and shared by criteria 4 and 5."""
    out = []
    for ring, rng in both_rings(50, "braids"):
        s1, s2 = random_ses(ring, rng, (-1, 1), 2), random_ses(ring, rng, (-1, 1), 1)
        out.append((s1, s2, build_tc3(s1, s2), build_tc3prime(s1, s2)))
    return out


def test_criterion_4_braids(braid_corpus):
    certified = exact_v = 0
    for _, _, bw, bv in braid_corpus:
        certs = list(bw.triangles.values()) + list(bv.triangles.values())
        certified += len(certs) == 6 and all(c.verify() for c in certs) and bw.verify() and bv.verify()
        exact_v += all(seq.verify() for seq in bv.sequences.values())
    n = len(braid_corpus)
    ok = certified == n and exact_v == n
    verdict(4, ok, f"six apex triangles through W and V re-verify on {certified}/{n} pairs; "
                   f"sequences through V exact on {exact_v}/{n}")
    assert ok


def test_criterion_5_tc4(braid_corpus):
    main = ext = 0
    obstructed = []
    for _, _, bw, bv in braid_corpus:
        r = check_tc4(bw, bv)
        c = r.certificates
        main += c["additivity"].verify() and r.euler["balanced"]
        ext += c["remark_extension"].verify()
        obstructed.append(r.remark_obstruction)
    n = len(braid_corpus)
    impossible = sum(o != 0 for o in obstructed)
    # The printed remark triangle W -> F(x)E' + E(x)G' -> V cannot be certified: whenever
    # chi(V) != 0 it does not exist, so this criterion is reported as failed.
    verdict(5, False, f"additivity triangle W -> FF' + EG' + GE' -> V certified on {main}/{n}; "
                      f"printed remark triangle impossible on {impossible}/{n} (obstruction = chi(V)); "
                      f"extension FE' -> W -> EG' certified on {ext}/{n}")
    assert main == n and ext == n and impossible > 0


@pytest.mark.xfail(strict=True, reason="the printed remark triangle is ruled out by Euler characteristics")
def test_criterion_5_printed_remark_triangle(braid_corpus):
    assert all(check_tc4(bw, bv).remark_obstruction == 0 for _, _, bw, bv in braid_corpus)


def test_criterion_6_tc5a():
    exact = found = zero_h = 0
    cases = both_rings(50, "tc5a")
    for ring, rng in cases:
        w = build_tc5a(random_ses(ring, rng))
        cells = {c.name: c for c in w.cells}
        exact += cells["tbar k2 = t_F"].exact and w.verify()
        pair = (cells["tbar k1 = t_G"], cells["tbar k3 = t_E"])
        found += all(c.homotopy is not None and c.verify() for c in pair)
        zero_h += all(c.exact for c in pair)
    n = len(cases)
    ok = exact == n and found == n
    verdict(6, ok, f"tbar k2 = t_F exactly on {exact}/{n}; homotopies for tbar k1 ~ t_G and "
                   f"tbar k3 ~ t_E found on {found}/{n} ({zero_h} of them zero, i.e. equal on the nose)")
    assert ok


def test_criterion_7_tc5b():
    good = inv = 0
    cases = both_rings(25, "tc5b")
    for ring, rng in cases:
        r = check_tc5b(random_ses(ring, rng))
        s = r.summary()
        good += r.verify() and all(c["verified"] for c in s["cells"])
        inv += s["xi_bar_invertible"]
    n = len(cases)
    ok = good == n and inv == n
    verdict(7, ok, f"comparison squares through xibar verify on {good}/{n}; xibar degreewise invertible on {inv}/{n}")
    assert ok


def test_criterion_8_duality():
    squares = natural = betas = 0
    cases = both_rings(200, "duality")
    for ring, rng in cases:
        E = random_complex(ring, rng, (-1, 1), 2).complex
        F = random_complex(ring, rng, (-1, 1), 2).complex
        f = random_chain_map(E, F, rng)
        squares += check_diagdual(f)["ok"]
        natural += dual_map(dual_map(f)) @ beta_iso(E) == beta_iso(F) @ f
        betas += is_chain_iso(beta_iso(E)) and duality_unit_counit(E).triangle_identities()
    n = len(cases)
    ok = squares == n and betas == n and natural == n
    verdict(8, ok, f"t and u squares exact on {squares}/{n} maps; beta a chain iso with triangle identities "
                   f"on {betas}/{n} complexes and natural on {natural}/{n}")
    assert ok


def test_criterion_9_sign_audit():
    audit_md = (ROOT / "SIGN_AUDIT.md").read_text()
    bad, failing, runs = [], set(), 0
    for ring, rng in both_rings(20, "audit"):
        ses, gE, gG = random_ses_with_structure(ring, rng)
        phi, psi, s = random_endo_square(ses, gE, gG, rng)
        if s.is_trivial():
            continue
        runs += 1
        entries = audit_instance(ses, phi, psi, s)
        bad += unexplained(entries)
        failing |= {e.name for e in entries if not e.printed_ok}
    documented = all(form in audit_md for form in RECORDED_FLIPS.values())
    ok = runs > 0 and not bad and failing <= set(RECORDED_FLIPS) and documented
    verdict(9, ok, f"{runs} instances with s != 0; printed forms failing: {sorted(failing)}, all recorded "
                   f"with a verified correction; unexplained: {len(bad)}")
    assert ok


def _fuzz_content():
    cmd = [sys.executable, "-m", "maycompat.cli", "fuzz", "--seed", "7"]
    proc = subprocess.run(cmd, capture_output=True, text=True, check=False)
    report = json.loads(proc.stdout)
    report.pop("timing", None)
    return proc.returncode, report


def test_criterion_10_determinism():
    (rc1, a), (rc2, b) = _fuzz_content(), _fuzz_content()
    ok = rc1 == rc2 == 0 and a == b
    verdict(10, ok, f"fuzz --seed 7 twice: {len(a['result']['cases'])} cases, identical content apart from timing")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-W", "ignore::pytest.PytestAssertRewriteWarning"]))

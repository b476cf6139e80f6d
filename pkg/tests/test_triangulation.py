import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from maycompat.complexes import ChainComplex, ChainMap, SemiSplitSES, unit_complex
from maycompat.generators import random_chain_map, random_complex, random_ses
from maycompat.linalg import INTEGERS, RATIONALS, Matrix, prime_field
from maycompat.tc5 import build_tc5a, check_tc5_dual, check_tc5b
from maycompat.triangulation import (alpha_iso, build_tc3, build_tc3prime, certify_cell, check_tc1, check_tc2,
                                     check_tc4, involute_braid, remark_obstruction)

from conftest import RINGS, rng_for

Z, F7 = INTEGERS, prime_field(7)
seeds = st.integers(0, 2**32 - 1)
rings = st.sampled_from([Z, F7])


def pair(ring, seed):
    rng = rng_for(seed)
    return random_ses(ring, rng, (-1, 1), 2), random_ses(ring, rng, (-1, 1), 1)


def sample_ses():
    E = ChainComplex(Z, {0: 1, 1: 1}, {0: Matrix.from_rows(Z, [[2]])})
    G = ChainComplex(Z, {-1: 1, 0: 1}, {-1: Matrix.from_rows(Z, [[3]])})
    w = ChainMap(G, E, {-1: Matrix.from_rows(Z, [[3]]), 0: Matrix.from_rows(Z, [[-2]])}, 1)
    return SemiSplitSES(E, G, w)


@pytest.mark.parametrize("ring", RINGS, ids=str)
def test_tc1_is_minus_one(ring):
    r = check_tc1(ring)
    assert r["pass"]
    assert r["composite"] == {"-2": [[ring.entry_to_json(ring(-1))]]}


def test_alpha_sign_alternates():
    E = ChainComplex(Z, {0: 1, 1: 1}, {0: Matrix.from_rows(Z, [[2]])})
    a = alpha_iso(E)
    assert a.is_chain()
    assert [a[n][0, 0] for n in sorted(a.source.degrees)] == [-1, 1]


@settings(max_examples=15)
@given(seeds, st.sampled_from(RINGS))
def test_tc2(seed, ring):
    rng = rng_for(seed)
    E = random_complex(ring, rng, (-1, 1), 2).complex
    F = random_complex(ring, rng, (-1, 1), 2).complex
    X = random_complex(ring, rng, (-1, 1), 2).complex
    r = check_tc2(random_chain_map(E, F, rng), X)
    assert r["pass"]
    assert r["dual"]["proj_square_sign"] == -1


@settings(max_examples=10)
@given(seeds, rings)
def test_tc3_braids(seed, ring):
    s1, s2 = pair(ring, seed)
    for braid in (build_tc3(s1, s2), build_tc3prime(s1, s2)):
        assert braid.verify()
        assert all(s.verify() for s in braid.sequences.values())
        assert len(braid.triangles) >= 3
        assert all(c.verify() for c in braid.triangles.values())


@settings(max_examples=10)
@given(seeds, rings)
def test_involution_is_an_involution(seed, ring):
    s1, s2 = pair(ring, seed)
    inv = involute_braid(build_tc3(s1, s2))
    assert inv.verify()


@settings(max_examples=10)
@given(seeds, rings)
def test_tc4(seed, ring):
    s1, s2 = pair(ring, seed)
    r = check_tc4(build_tc3(s1, s2), build_tc3prime(s1, s2))
    s = r.summary()
    assert s["pass"] and s["euler_balance"]["balanced"]
    assert set(s["triangles"]) >= {"additivity", "mayer_vietoris_W", "mayer_vietoris_V", "remark_extension"}


@settings(max_examples=10)
@given(seeds, rings)
def test_remark_obstruction_equals_euler_characteristic_of_v(seed, ring):
    s1, s2 = pair(ring, seed)
    bw, bv = build_tc3(s1, s2), build_tc3prime(s1, s2)
    r = check_tc4(bw, bv)
    E, G = s1.E, s1.G
    E2, G2 = s2.E, s2.G
    e, g, e2, g2 = (C.euler_characteristic() for C in (E, G, E2, G2))
    assert r.remark_obstruction == e * g2 + g * e2 + g * g2 == bv.apex.euler_characteristic()


@pytest.mark.xfail(strict=True, reason="chi(W) + chi(V) - chi(F(x)E' + E(x)G') = chi(V) != 0 here, so the "
                                       "printed triangle W -> F(x)E' + E(x)G' -> V -> Sigma W cannot exist")
def test_printed_remark_triangle_euler_balance():
    S = unit_complex(RATIONALS)
    split = SemiSplitSES(S, S, ChainMap.zero(S, S, 1))
    r = check_tc4(build_tc3(split, split), build_tc3prime(split, split))
    assert r.remark_obstruction == 0


def test_sample_tc5():
    ses = sample_ses()
    a = build_tc5a(ses)
    assert a.verify()
    b = check_tc5b(ses, a)
    assert b.verify()
    q2 = [c for c in b.summary()["cells"] if "q2" in c["cell"] or "p2" in c["cell"]]
    assert q2 and all(c["verified"] for c in q2)
    assert check_tc5_dual(ses)["pass"]


@settings(max_examples=10)
@given(seeds, rings)
def test_tc5a_evaluation_cells(seed, ring):
    ses = random_ses(ring, rng_for(seed))
    w = build_tc5a(ses)
    assert w.verify()
    names = {c.name: c for c in w.cells}
    assert names["tbar k2 = t_F"].exact
    assert names["tbar k1 = t_G"].verify() and names["tbar k3 = t_E"].verify()


@settings(max_examples=8)
@given(seeds, rings)
def test_tc5b_comparison(seed, ring):
    ses = random_ses(ring, rng_for(seed))
    r = check_tc5b(ses)
    s = r.summary()
    assert r.verify() and s["xi_bar_invertible"]


@settings(max_examples=10)
@given(seeds, rings)
def test_tc5_dual_coevaluation(seed, ring):
    assert check_tc5_dual(random_ses(ring, rng_for(seed)))["pass"]


def test_certify_cell_reports_missing():
    S = unit_complex(Z)
    one = ChainMap.identity(S)
    c = certify_cell("id = 0", one, ChainMap.zero(S, S))
    assert not c.verify() and c.summary()["kind"] == "missing"
    assert certify_cell("id = -(-id)", one, -one, signs=(1, -1)).sign == -1

import hypothesis.strategies as st
from hypothesis import given

from maycompat.complexes import ChainComplex, ChainMap, shift, unit_complex
from maycompat.generators import random_chain_map, random_complex, random_endomorphism
from maycompat.linalg import INTEGERS, Matrix, prime_field
from maycompat.monoidal import (associator, beta_iso, check_diagdual, coevaluation, dual_complex, dual_map,
                                duality_unit_counit, evaluation, is_chain_iso, labels, left_unitor, pairing,
                                right_unitor, symmetry, tensor, tensor_map, xi_iso)

from conftest import RINGS, rng_for

Z = INTEGERS
seeds = st.integers(0, 2**32 - 1)
rings = st.sampled_from(RINGS)


def small(ring, rng, rank=2):
    return random_complex(ring, rng, (-1, 1), rank).complex


def koszul_oracle(E, F, n):
    """d^n of E (x) F computed basis element by basis element."""
    ring = E.ring
    src = [(i, a, b) for i in sorted(E.degrees) for a in range(E.rank(i)) for b in range(F.rank(n - i))
           if F.rank(n - i)]
    tgt = [(i, a, b) for i in sorted(E.degrees) for a in range(E.rank(i)) for b in range(F.rank(n + 1 - i))
           if F.rank(n + 1 - i)]
    index = {t: k for k, t in enumerate(tgt)}
    rows = [[ring.zero] * len(src) for _ in tgt]
    for c, (i, a, b) in enumerate(src):
        j = n - i
        for a2 in range(E.rank(i + 1)):
            v = E.d(i)[a2, a]
            if v:
                rows[index[(i + 1, a2, b)]][c] += v
        sign = -1 if i % 2 else 1
        for b2 in range(F.rank(j + 1)):
            v = F.d(j)[b2, b]
            if v:
                rows[index[(i, a, b2)]][c] += sign * v
    return Matrix(ring, len(tgt), len(src), [[ring.reduce(x) for x in r] for r in rows])


@given(seeds, rings)
def test_tensor_differential_matches_koszul_rule(seed, ring):
    rng = rng_for(seed)
    E, F = small(ring, rng), small(ring, rng)
    T = tensor(E, F)
    for n in T.degrees:
        if T.rank(n + 1):
            assert T.d(n) == koszul_oracle(E, F, n)


def test_symmetry_on_two_odd_spheres_is_minus_one():
    S1 = shift(unit_complex(Z), 1)
    g = symmetry(S1, S1)
    assert g[-2] == Matrix.from_rows(Z, [[-1]])


@given(seeds, rings)
def test_symmetry_is_natural_and_involutive(seed, ring):
    rng = rng_for(seed)
    E, F = small(ring, rng), small(ring, rng)
    E2, F2 = small(ring, rng), small(ring, rng)
    f, g = random_chain_map(E, E2, rng), random_chain_map(F, F2, rng)
    gam = symmetry(E, F)
    assert is_chain_iso(gam)
    assert symmetry(F, E) @ gam == ChainMap.identity(tensor(E, F))
    assert symmetry(E2, F2) @ tensor_map(f, g) == tensor_map(g, f) @ gam


@given(seeds, rings)
def test_tensor_map_is_functorial(seed, ring):
    rng = rng_for(seed)
    E, F, G = small(ring, rng), small(ring, rng), small(ring, rng)
    f1, f2 = random_chain_map(E, F, rng), random_chain_map(F, G, rng)
    g = random_endomorphism(random_complex(ring, rng, (-1, 1), 2), rng)
    X = g.source
    assert tensor_map(f2 @ f1, g @ g) == tensor_map(f2, g) @ tensor_map(f1, g)
    assert tensor_map(ChainMap.identity(E), ChainMap.identity(X)) == ChainMap.identity(tensor(E, X))


@given(seeds, rings)
def test_associator_and_unitors(seed, ring):
    rng = rng_for(seed)
    E, F, G = small(ring, rng, 1), small(ring, rng, 1), small(ring, rng, 1)
    assert is_chain_iso(associator(E, F, G))
    assert is_chain_iso(right_unitor(E)) and is_chain_iso(left_unitor(E))


@given(seeds, rings)
def test_associator_is_natural(seed, ring):
    rng = rng_for(seed)
    E, F, G = small(ring, rng, 1), small(ring, rng, 1), small(ring, rng, 1)
    f = random_endomorphism(random_complex(ring, rng, (-1, 1), 1), rng)
    X = f.source
    a1, a2 = associator(X, F, G), associator(X, F, G)
    one_F, one_G = ChainMap.identity(F), ChainMap.identity(G)
    assert a2 @ tensor_map(tensor_map(f, one_F), one_G) == tensor_map(f, tensor_map(one_F, one_G)) @ a1


def test_dual_of_small_disc():
    E = ChainComplex(Z, {0: 1, 1: 1}, {0: Matrix.from_rows(Z, [[2]])})
    DE = dual_complex(E)
    assert DE.ranks == {-1: 1, 0: 1}
    assert DE.d(-1) == Matrix.from_rows(Z, [[2]])


@given(seeds, rings)
def test_duality_data(seed, ring):
    E = small(ring, rng_for(seed))
    assert evaluation(E).is_chain() and coevaluation(E).is_chain()
    assert duality_unit_counit(E).triangle_identities()
    assert is_chain_iso(beta_iso(E))


@given(seeds, rings)
def test_dual_is_contravariant(seed, ring):
    rng = rng_for(seed)
    E, F, G = small(ring, rng), small(ring, rng), small(ring, rng)
    f, g = random_chain_map(E, F, rng), random_chain_map(F, G, rng)
    assert dual_map(f).is_chain()
    assert dual_map(g @ f) == dual_map(f) @ dual_map(g)


@given(seeds, rings)
def test_evaluation_and_coevaluation_are_natural(seed, ring):
    rng = rng_for(seed)
    E, F = small(ring, rng), small(ring, rng)
    rep = check_diagdual(random_chain_map(E, F, rng))
    assert rep["ok"], rep["failures"]


@given(seeds, rings)
def test_beta_is_natural(seed, ring):
    rng = rng_for(seed)
    E, F = small(ring, rng), small(ring, rng)
    f = random_chain_map(E, F, rng)
    assert beta_iso(F) @ f == dual_map(dual_map(f)) @ beta_iso(E)


@given(seeds, rings)
def test_pairing_and_xi(seed, ring):
    rng = rng_for(seed)
    E, F = small(ring, rng, 1), small(ring, rng, 1)
    assert pairing(E, F).is_chain()
    assert is_chain_iso(xi_iso(E, F))


def test_labels_follow_blocks():
    S = unit_complex(Z)
    assert labels(tensor(S, S), 0) == [(0, ("T", (0, ("e", 0)), (0, ("e", 0))))]

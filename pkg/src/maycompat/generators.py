"""Random complexes, maps and sequences with known structure, for fuzzing."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .complexes import ChainComplex, ChainMap, Homotopy, MapEquations, SemiSplitSES
from .linalg import Matrix, Ring


def _rand_entry(ring: Ring, rng: random.Random, bound: int):
    if ring.kind == "Fp":
        return ring(rng.randrange(ring.p))
    return ring(rng.randint(-bound, bound))


def random_matrix(ring: Ring, rows: int, cols: int, rng: random.Random, bound: int = 2) -> Matrix:
    return Matrix(ring, rows, cols, [[_rand_entry(ring, rng, bound) for _ in range(cols)] for _ in range(rows)])


def random_unimodular(ring: Ring, n: int, rng: random.Random, steps: int | None = None):
    """``(U, U^{-1})`` built from elementary operations."""
    U = [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]
    V = [row[:] for row in U]
    if n == 0:
        return Matrix.zeros(ring, 0, 0), Matrix.zeros(ring, 0, 0)
    for _ in range(steps if steps is not None else 2 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if n > 1 and i != j:
            c = _rand_entry(ring, rng, 1)
            # row_i += c row_j on U; col_j -= c col_i on the inverse
            U[i] = [ring.reduce(a + c * b) for a, b in zip(U[i], U[j])]
            for row in V:
                row[j] = ring.reduce(row[j] - c * row[i])
        elif ring.kind != "Z" or rng.random() < 0.5:
            u = ring(-1) if ring.kind == "Z" else ring(rng.randrange(1, ring.p)) if ring.kind == "Fp" else ring(rng.choice([-2, -1, 2, 3]))
            ui = ring.inverse(u)
            U[i] = [ring.reduce(u * a) for a in U[i]]
            for row in V:
                row[i] = ring.reduce(row[i] * ui)
    return Matrix(ring, n, n, U), Matrix(ring, n, n, V)


@dataclass
class GeneratedComplex:
    """A complex isomorphic to a sum of spheres and discs, with the isomorphism kept."""

    complex: ChainComplex
    spheres: dict          # degree -> count
    discs: list            # (bottom degree, scalar)
    basis: dict            # degree -> U with d = U d_struct U^{-1}
    basis_inv: dict
    structured: ChainComplex

    def expected_homology(self) -> dict:
        """``degree -> (free rank, torsion scalars)`` read off the pieces."""
        ring = self.complex.ring
        out = {n: [self.spheres.get(n, 0), []] for n in self.complex.degrees}
        for n, c in self.discs:
            if c == 0:
                out.setdefault(n, [0, []])[0] += 1
                out.setdefault(n + 1, [0, []])[0] += 1
            elif not ring.is_unit(c):
                out.setdefault(n + 1, [0, []])[1].append(c)
        return {n: (v[0], _invariant_factors(v[1])) for n, v in out.items()}


def _invariant_factors(scalars) -> list:
    """Invariant factors of ``sum Z/c`` by collecting prime powers (no elimination involved)."""
    powers = {}
    for c in scalars:
        c = abs(int(c))
        p = 2
        while c > 1:
            k = 0
            while c % p == 0:
                c //= p
                k += 1
            if k:
                powers.setdefault(p, []).append(p ** k)
            p += 1
    width = max((len(v) for v in powers.values()), default=0)
    factors = [1] * width
    for v in powers.values():
        for i, q in enumerate(sorted(v, reverse=True)):
            factors[width - 1 - i] *= q
    return [f for f in factors if f != 1]


def random_complex(ring: Ring, rng: random.Random, degrees=(-1, 1), max_rank: int = 2,
                   torsion: bool = True, conjugate: bool = True) -> GeneratedComplex:
    lo, hi = degrees
    ranks = {n: 0 for n in range(lo, hi + 1)}
    spheres, discs = {}, []
    layout = {n: [] for n in ranks}        # per degree: ("s",) or ("d", index, end)
    for _ in range(rng.randint(1, 2 * (hi - lo + 1))):
        n = rng.randint(lo, hi)
        if rng.random() < 0.45 or n == hi:
            if ranks[n] < max_rank:
                ranks[n] += 1
                spheres[n] = spheres.get(n, 0) + 1
                layout[n].append(("s",))
        elif ranks[n] < max_rank and ranks[n + 1] < max_rank:
            if ring.kind == "Z" and torsion and rng.random() < 0.5:
                c = ring(rng.choice([2, 3, -2, 4]))
            else:
                c = ring.one if ring.kind == "Z" else ring(rng.choice([1, 2, 3])) if ring.kind != "Fp" else ring(rng.randrange(1, ring.p))
            ranks[n] += 1
            ranks[n + 1] += 1
            layout[n].append(("d", len(discs), 0))
            layout[n + 1].append(("d", len(discs), 1))
            discs.append((n, c))
    d = {}
    for n in range(lo, hi):
        rows = [[ring.zero] * ranks[n] for _ in range(ranks[n + 1])]
        for j, pj in enumerate(layout[n]):
            if pj[0] == "d" and pj[2] == 0:
                i = layout[n + 1].index(("d", pj[1], 1))
                rows[i][j] = discs[pj[1]][1]
        d[n] = Matrix(ring, ranks[n + 1], ranks[n], rows)
    ranks = {n: r for n, r in ranks.items() if r}
    S = ChainComplex(ring, ranks, {n: m for n, m in d.items() if m.rows and m.cols})
    U, Ui = {}, {}
    for n in S.degrees:
        U[n], Ui[n] = random_unimodular(ring, S.rank(n), rng) if conjugate else (
            Matrix.identity(ring, S.rank(n)), Matrix.identity(ring, S.rank(n)))
    dd = {n: U[n + 1] @ S.d(n) @ Ui[n] for n in S.degrees if S.rank(n + 1)}
    C = ChainComplex(ring, dict(S.ranks), dd)
    gen = GeneratedComplex(C, spheres, discs, U, Ui, S)
    gen.layout = layout
    return gen


def _null_homotopic(E: ChainComplex, F: ChainComplex, h: ChainMap, degree: int = 0) -> ChainMap:
    """``d h + (-1)^{k} h d`` for a map ``h`` of degree ``k - 1`` (a chain map of degree ``k``)."""
    ring = E.ring
    sign = -1 if degree % 2 else 1
    comps = {}
    for n in E.degrees:
        rows, cols = F.rank(n + degree), E.rank(n)
        if not rows:
            continue
        m = Matrix.zeros(ring, rows, cols)
        if F.rank(n + degree - 1) and F.rank(n + degree):
            m = m + F.d(n + degree - 1) @ h[n]
        if E.rank(n + 1):
            m = m + (h[n + 1] @ E.d(n)).scale(sign)
        comps[n] = m
    return ChainMap(E, F, comps, degree)


def random_graded_map(E: ChainComplex, F: ChainComplex, rng, degree: int = 0, bound: int = 2) -> ChainMap:
    ring = E.ring
    return ChainMap(E, F, {n: random_matrix(ring, F.rank(n + degree), E.rank(n), rng, bound)
                           for n in E.degrees if F.rank(n + degree)}, degree)


def random_endomorphism(gen: GeneratedComplex, rng, bound: int = 2) -> ChainMap:
    """Random chain endomorphism: structured part conjugated into place plus a null-homotopic term."""
    S, ring = gen.structured, gen.complex.ring
    comps = {}
    disc_scalar = [_rand_entry(ring, rng, bound) for _ in gen.discs]
    for n in S.degrees:
        lay = gen.layout[n]
        r = S.rank(n)
        rows = [[ring.zero] * r for _ in range(r)]
        for i, pi in enumerate(lay):
            for j, pj in enumerate(lay):
                if pi[0] == "s" and pj[0] == "s":
                    rows[i][j] = _rand_entry(ring, rng, bound)
                elif pi[0] == "d" and pj == pi:
                    rows[i][j] = disc_scalar[pi[1]]
                elif pi[0] == "d" and pi[2] == 1 and pj[0] == "s":
                    # sphere into the top of a disc
                    rows[i][j] = _rand_entry(ring, rng, bound)
        comps[n] = Matrix(ring, r, r, rows)
    E = gen.complex
    core = ChainMap(E, E, {n: gen.basis[n] @ comps[n] @ gen.basis_inv[n] for n in S.degrees})
    h = random_graded_map(E, E, rng, -1, 1)
    return core + _null_homotopic(E, E, h, 0)


def random_chain_map(E: ChainComplex, F: ChainComplex, rng, degree: int = 0, bound: int = 2,
                     null_part: bool = True) -> ChainMap:
    """Random integer combination of a basis of all chain maps (for small complexes)."""
    eq = MapEquations(E.ring)
    eq.unknown("f", E, F, degree)
    eq.chain("f")
    f = ChainMap.zero(E, F, degree)
    for sol in eq.kernel():
        c = _rand_entry(E.ring, rng, bound)
        if c != 0:
            f = f + sol["f"].scale(c)
    if null_part:
        f = f + _null_homotopic(E, F, random_graded_map(E, F, rng, degree - 1, 1), degree)
    return f


def random_ses(ring: Ring, rng, degrees=(-1, 1), max_rank: int = 2) -> SemiSplitSES:
    """``E -> E(+)G -> G`` with gluing ``w`` a random degree +1 chain map ``G -> E``."""
    E = random_complex(ring, rng, degrees, max_rank).complex
    G = random_complex(ring, rng, degrees, max_rank).complex
    w = random_chain_map(G, E, rng, 1)
    return SemiSplitSES(E, G, w)


def random_ses_with_structure(ring: Ring, rng, degrees=(-1, 1), max_rank: int = 2):
    gE = random_complex(ring, rng, degrees, max_rank)
    gG = random_complex(ring, rng, degrees, max_rank)
    w = random_chain_map(gG.complex, gE.complex, rng, 1)
    return SemiSplitSES(gE.complex, gG.complex, w), gE, gG


def random_endo_square(ses: SemiSplitSES, gE: GeneratedComplex, gG: GeneratedComplex, rng, tries: int = 4):
    """``(phi, psi, s)`` with ``s`` a homotopy ``f phi ~ psi f`` that is usually nonzero.

    ``psi_0 = [[phi, x], [0, chi]]`` commutes with ``f`` on the nose once
    ``d x - x d = phi w - w chi`` is solved; then ``psi = psi_0 + d t + t d``
    and ``s = -t f``.
    """
    E, G, F, w = ses.E, ses.G, ses.F, ses.w
    ring = ses.ring
    for attempt in range(tries + 1):
        if attempt < tries:
            phi, chi = random_endomorphism(gE, rng), random_endomorphism(gG, rng)
        else:
            c = _rand_entry(ring, rng, 2)
            phi, chi = ChainMap.scalar(E, c), ChainMap.scalar(G, c)
        eq = MapEquations(ring)
        eq.unknown("x", G, E, 0)
        rhs = phi @ w - w @ chi
        for n in G.degrees:
            rows, cols = E.rank(n + 1), G.rank(n)
            if not (rows and cols):
                continue
            terms = [(E.d(n), "x", n, Matrix.identity(ring, cols)),
                     (Matrix.scalar(ring, rows, -1), "x", n + 1, G.d(n))]
            eq.add(terms, rhs[n].scale(-1))
        sol = eq.solve()
        if sol is not None:
            break
    x = sol["x"] + _null_homotopic(G, E, random_graded_map(G, E, rng, -1, 1), 0)
    psi0 = ChainMap(F, F, {n: Matrix.block(ring, [[phi[n], x[n]], [Matrix.zeros(ring, G.rank(n), E.rank(n)), chi[n]]])
                           for n in F.degrees})
    t = random_graded_map(F, F, rng, -1, 1)
    psi = psi0 + _null_homotopic(F, F, t, 0)
    s = Homotopy(ses.f @ phi, psi @ ses.f, -(t @ ses.f))
    return phi, psi, s

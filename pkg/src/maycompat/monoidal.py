"""Tensor products, symmetry, duals and the duality maps for complexes.

Every basis vector of a tensor or dual complex carries a label recording how
it was built, so permutation-type maps (symmetry, reassociation, the dual
pairing) are assembled by matching labels instead of index arithmetic.
A label is ``(degree, payload)``.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

from .complexes import ChainComplex, ChainMap, ShapeMismatch, shift, unit_complex
from .linalg import Matrix, RingError, try_invert


class TensorComplex(ChainComplex):
    """``E (x) F`` with blocks ``E^i (x) F^j`` ordered by ``i`` and Kronecker order inside."""

    __slots__ = ("left", "right", "layout")


class DualComplex(ChainComplex):
    """``DE`` with ``(DE)^n`` the dual of ``E^{-n}`` in the dual basis."""

    __slots__ = ("base",)


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def tensor(E: ChainComplex, F: ChainComplex) -> TensorComplex:
    if E.ring != F.ring:
        raise RingError("cannot tensor complexes over different rings")
    ring = E.ring
    layout = {}
    for i in E.degrees:
        for j in F.degrees:
            layout.setdefault(i + j, []).append((i, j))
    blocks = {}
    ranks = {}
    for n, pairs in layout.items():
        pairs.sort()
        off = 0
        entries = []
        for i, j in pairs:
            size = E.rank(i) * F.rank(j)
            entries.append((i, j, off, size))
            off += size
        blocks[n] = entries
        ranks[n] = off
    d = {}
    for n, entries in blocks.items():
        if n + 1 not in blocks:
            continue
        tgt = {(i, j): off for i, j, off, _ in blocks[n + 1]}
        rows = [[ring.zero] * ranks[n] for _ in range(ranks[n + 1])]
        for i, j, off, size in entries:
            if (i + 1, j) in tgt and E.rank(i + 1):
                _paste(rows, tgt[(i + 1, j)], off, E.d(i).kron(Matrix.identity(ring, F.rank(j))), 1)
            if (i, j + 1) in tgt and F.rank(j + 1):
                _paste(rows, tgt[(i, j + 1)], off, Matrix.identity(ring, E.rank(i)).kron(F.d(j)), _sign(i))
        d[n] = Matrix(ring, ranks[n + 1], ranks[n], rows)
    out = TensorComplex(ring, ranks, d, check=False,
                        name=f"({E.name or 'E'}*{F.name or 'F'})")
    out.left, out.right, out.layout = E, F, blocks
    return out


def _paste(rows, r0, c0, m: Matrix, sign):
    for a in range(m.rows):
        row = rows[r0 + a]
        src = m.data[a]
        for b in range(m.cols):
            v = src[b]
            if v:
                row[c0 + b] = row[c0 + b] + (v if sign == 1 else -v)


def _block_offset(T: TensorComplex, n: int):
    return {(i, j): off for i, j, off, _ in T.layout.get(n, [])}


def tensor_map(f: ChainMap, g: ChainMap) -> ChainMap:
    """``f (x) g`` with sign ``(-1)^{|g| i}`` on the ``E^i`` block."""
    src = tensor(f.source, g.source)
    tgt = tensor(f.target, g.target)
    ring = f.ring
    p, q = f.degree, g.degree
    comps = {}
    for n, entries in src.layout.items():
        toff = _block_offset(tgt, n + p + q)
        rows = [[ring.zero] * src.rank(n) for _ in range(tgt.rank(n + p + q))]
        for i, j, off, _ in entries:
            key = (i + p, j + q)
            if key not in toff:
                continue
            m = f[i].kron(g[j])
            if m.rows and m.cols:
                _paste(rows, toff[key], off, m, _sign(q * i))
        comps[n] = Matrix(ring, tgt.rank(n + p + q), src.rank(n), rows)
    return ChainMap(src, tgt, comps, p + q)


def tensor_id_left(E: ChainComplex, g: ChainMap) -> ChainMap:
    return tensor_map(ChainMap.identity(E), g)


def tensor_id_right(f: ChainMap, F: ChainComplex) -> ChainMap:
    return tensor_map(f, ChainMap.identity(F))


# --- labels and permutation maps -----------------------------------------------------------------


def labels(C: ChainComplex, n: int) -> list:
    """Basis labels of ``C^n``."""
    if isinstance(C, TensorComplex):
        out = []
        for i, j, _, _ in C.layout.get(n, []):
            ls, rs = labels(C.left, i), labels(C.right, j)
            out.extend((n, ("T", x, y)) for x in ls for y in rs)
        return out
    if isinstance(C, DualComplex):
        return [(n, ("D", x)) for x in labels(C.base, -n)]
    return [(n, ("e", a)) for a in range(C.rank(n))]


def label_map(source: ChainComplex, target: ChainComplex,
              fn: Callable, degree: int = 0) -> ChainMap:
    """Signed permutation-type map sending basis label ``L`` to ``sign * fn(L)[0]``.

    ``fn`` returns ``(label, sign)`` or ``None`` for labels sent to zero.
    """
    ring = source.ring
    comps = {}
    for n in source.degrees:
        index = {lab: k for k, lab in enumerate(labels(target, n + degree))}
        rows = [[ring.zero] * source.rank(n) for _ in range(target.rank(n + degree))]
        for c, lab in enumerate(labels(source, n)):
            res = fn(lab)
            if res is None:
                continue
            lab2, sgn = res
            try:
                r = index[lab2]
            except KeyError:
                raise ShapeMismatch(f"label {lab2} missing in target") from None
            rows[r][c] = ring(sgn)
        comps[n] = Matrix(ring, target.rank(n + degree), source.rank(n), rows)
    return ChainMap(source, target, comps, degree)


def symmetry(E: ChainComplex, F: ChainComplex) -> ChainMap:
    """``gamma: E (x) F -> F (x) E``, ``x (x) y -> (-1)^{|x||y|} y (x) x``."""
    src, tgt = tensor(E, F), tensor(F, E)

    def fn(lab):
        n, (_, x, y) = lab
        return (n, ("T", y, x)), _sign(x[0] * y[0])

    return label_map(src, tgt, fn)


def associator(E: ChainComplex, F: ChainComplex, G: ChainComplex) -> ChainMap:
    """``(E (x) F) (x) G -> E (x) (F (x) G)``; an unsigned basis permutation."""
    src = tensor(tensor(E, F), G)
    tgt = tensor(E, tensor(F, G))

    def fn(lab):
        n, (_, xy, z) = lab
        _, (_, x, y) = xy
        return (n, ("T", x, (y[0] + z[0], ("T", y, z)))), 1

    return label_map(src, tgt, fn)


def right_unitor(E: ChainComplex) -> ChainMap:
    """``E (x) S -> E``; the identity matrix in every degree."""
    S = unit_complex(E.ring)
    src = tensor(E, S)
    return ChainMap(src, E, {n: Matrix.identity(E.ring, E.rank(n)) for n in E.degrees})


def left_unitor(E: ChainComplex) -> ChainMap:
    S = unit_complex(E.ring)
    src = tensor(S, E)
    return ChainMap(src, E, {n: Matrix.identity(E.ring, E.rank(n)) for n in E.degrees})


def sigma_left(E: ChainComplex, F: ChainComplex) -> ChainMap:
    """``Sigma E (x) F -> Sigma(E (x) F)``; no sign, identical matrices."""
    src = tensor(shift(E, 1), F)
    tgt = shift(tensor(E, F), 1)
    return ChainMap(src, tgt, {n: Matrix.identity(E.ring, src.rank(n)) for n in src.degrees})


def sigma_right(E: ChainComplex, F: ChainComplex) -> ChainMap:
    """``E (x) Sigma F -> Sigma(E (x) F)`` with sign ``(-1)^i`` on ``E^i``."""
    src = tensor(E, shift(F, 1))
    tgt = shift(tensor(E, F), 1)
    ring = E.ring
    comps = {}
    for n, entries in src.layout.items():
        diag = []
        for i, _, _, size in entries:
            diag.extend([_sign(i)] * size)
        comps[n] = Matrix.diagonal(ring, diag)
    return ChainMap(src, tgt, comps)


# --- duals -----------------------------------------------------------------


def dual_complex(E: ChainComplex) -> DualComplex:
    """``(DE)^n = (E^{-n})^*`` with ``d^n = (-1)^{n+1} (d_E^{-n-1})^T``."""
    ranks = {-n: r for n, r in E.ranks.items()}
    d = {}
    for n in ranks:
        if E.rank(-n - 1):
            d[n] = E.d(-n - 1).T.scale(_sign(n + 1))
    out = DualComplex(E.ring, ranks, d, check=False, name=f"D{E.name or 'E'}")
    out.base = E
    return out


def dual_map(f: ChainMap) -> ChainMap:
    """``Df: DF -> DE`` with ``(Df)^n = (-1)^{kn} (f^{-n-k})^T`` for ``f`` of degree ``k``."""
    k = f.degree
    DE, DF = dual_complex(f.source), dual_complex(f.target)
    comps = {n: f[-n - k].T.scale(_sign(k * n)) for n in DF.degrees}
    return ChainMap(DF, DE, comps, k)


class DualityData(NamedTuple):
    E: ChainComplex
    DE: DualComplex
    t: ChainMap      # DE (x) E -> S
    u: ChainMap      # S -> E (x) DE
    beta: ChainMap   # E -> DDE

    def triangle_identities(self) -> bool:
        """``(t (x) 1)(1 (x) u) = 1`` on DE and ``(1 (x) t)(u (x) 1) = 1`` on E up to unitors."""
        E, DE = self.E, self.DE
        ring = E.ring
        S = unit_complex(ring)
        # E -> S(x)E -> (E(x)DE)(x)E -> E(x)(DE(x)E) -> E(x)S -> E
        lu = left_unitor(E)
        lu_inv = ChainMap(E, lu.source, {n: m for n, m in lu.components().items()})
        step = tensor_map(self.u, ChainMap.identity(E)) @ lu_inv
        step = associator(E, DE, E) @ step
        step = tensor_map(ChainMap.identity(E), self.t) @ step
        first = right_unitor(E) @ step
        # DE -> DE(x)S -> DE(x)(E(x)DE) -> (DE(x)E)(x)DE -> S(x)DE -> DE
        ru = right_unitor(DE)
        ru_inv = ChainMap(DE, ru.source, {n: m for n, m in ru.components().items()})
        step = tensor_map(ChainMap.identity(DE), self.u) @ ru_inv
        inv_assoc = associator(DE, E, DE).graded_invertible()
        step = inv_assoc @ step
        step = tensor_map(self.t, ChainMap.identity(DE)) @ step
        second = left_unitor(DE) @ step
        return first == ChainMap.identity(E) and second == ChainMap.identity(DE) and S.ranks == {0: 1}


def evaluation(E: ChainComplex) -> ChainMap:
    """``t_E: DE (x) E -> S``, ``phi (x) x -> phi(x)``."""
    DE = dual_complex(E)
    src = tensor(DE, E)
    S = unit_complex(E.ring)

    def fn(lab):
        _, (_, phi, x) = lab
        if phi[1][1] == x:
            return (0, ("e", 0)), 1
        return None

    return label_map(src, S, fn)


def coevaluation(E: ChainComplex) -> ChainMap:
    """``u_E: S -> E (x) DE``, ``1 -> sum_a e_a (x) e^a``."""
    DE = dual_complex(E)
    tgt = tensor(E, DE)
    ring = E.ring
    col = [[ring.one if lab[1][2][1][1] == lab[1][1] else ring.zero] for lab in labels(tgt, 0)]
    S = unit_complex(ring)
    return ChainMap(S, tgt, {0: Matrix(ring, tgt.rank(0), 1, col)})


def beta_iso(E: ChainComplex) -> ChainMap:
    """``E -> DDE``, ``x -> (phi -> (-1)^{|x||phi|} phi(x))``: degreewise ``(-1)^n``."""
    DDE = dual_complex(dual_complex(E))
    return ChainMap(E, DDE, {n: Matrix.scalar(E.ring, E.rank(n), _sign(n)) for n in E.degrees})


def duality_unit_counit(E: ChainComplex) -> DualityData:
    return DualityData(E, dual_complex(E), evaluation(E), coevaluation(E), beta_iso(E))


def pairing(E: ChainComplex, F: ChainComplex) -> ChainMap:
    """``p: DE (x) DF -> D(E (x) F)``, ``(phi (x) chi)(a (x) b) = (-1)^{|chi||a|} phi(a) chi(b)``."""
    src = tensor(dual_complex(E), dual_complex(F))
    tgt = dual_complex(tensor(E, F))

    def fn(lab):
        n, (_, phi, chi) = lab
        a, b = phi[1][1], chi[1][1]
        return (n, ("D", (a[0] + b[0], ("T", a, b)))), _sign(chi[0] * a[0])

    return label_map(src, tgt, fn)


def xi_iso(E: ChainComplex, F: ChainComplex) -> ChainMap:
    """``xi: DE (x) F -> D(E (x) DF)``, the composite ``p o (1 (x) beta)``."""
    DF = dual_complex(F)
    step = tensor_map(ChainMap.identity(dual_complex(E)), beta_iso(F))
    return pairing(E, DF) @ step


def check_diagdual(f: ChainMap) -> dict:
    """Both naturality squares for ``t`` and ``u`` along ``f: E -> F``."""
    if f.degree != 0:
        raise ShapeMismatch("check_diagdual needs a degree-0 map")
    E, F = f.source, f.target
    Df = dual_map(f)
    t_lhs = evaluation(F) @ tensor_map(ChainMap.identity(dual_complex(F)), f)
    t_rhs = evaluation(E) @ tensor_map(Df, ChainMap.identity(E))
    u_lhs = tensor_map(f, ChainMap.identity(dual_complex(E))) @ coevaluation(E)
    u_rhs = tensor_map(ChainMap.identity(F), Df) @ coevaluation(F)
    report = {"t_square": t_lhs == t_rhs, "u_square": u_lhs == u_rhs, "failures": []}
    for name, a, b in (("t_square", t_lhs, t_rhs), ("u_square", u_lhs, u_rhs)):
        for n in sorted(set(a.components()) | set(b.components())):
            if a[n] != b[n]:
                report["failures"].append({"square": name, "degree": n})
    report["ok"] = report["t_square"] and report["u_square"]
    return report


def is_chain_iso(f: ChainMap) -> bool:
    return f.is_chain() and all(try_invert(f[n]) is not None for n in f.source.degrees) \
        and f.source.ranks == f.target.ranks

"""Bounded cochain complexes of finite free modules and the maps between them.

Conventions (fixed once, used everywhere):

* differentials raise degree: ``d^n : E^n -> E^{n+1}``;
* ``(Sigma^k E)^n = E^{n+k}`` with differential ``(-1)^k d``; shifting a map
  does not change its matrices;
* ``cone(f)^n = E^{n+1} (+) F^n`` with ``d = [[-d_E, 0], [f, d_F]]``;
* a homotopy ``s`` from ``f`` to ``g`` satisfies ``f - g = d s + s d``;
* a graded map of degree ``k`` is a chain map when ``d f = (-1)^k f d``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

from .linalg import DimensionError, Matrix, Ring, RingError, diagonalize, nullspace, solve_linear


class ComplexError(ValueError):
    """Invalid complex or map data."""

    code = "E_COMPLEX"


class ShapeMismatch(ComplexError):
    code = "E_SHAPE"


class NotSquareZero(ComplexError):
    code = "E_DSQUARE"


class NotAChainMap(ComplexError):
    code = "E_NOT_CHAIN"


class ChainComplex:
    """A bounded complex: ranks per degree and differential matrices."""

    __slots__ = ("ring", "_ranks", "_d", "summands", "name", "_hash")

    def __init__(self, ring: Ring, ranks: Mapping[int, int], d: Mapping[int, Matrix] | None = None,
                 *, summands: Sequence["ChainComplex"] | None = None, name: str | None = None,
                 check: bool = True):
        self.ring = ring
        self._ranks = {int(n): int(r) for n, r in ranks.items() if r}
        if any(r < 0 for r in self._ranks.values()):
            raise ShapeMismatch("ranks must be nonnegative")
        self._d = {}
        for n, m in (d or {}).items():
            n = int(n)
            if m.ring != ring:
                raise RingError(f"differential in degree {n} is over {m.ring}, not {ring}")
            if m.shape != (self.rank(n + 1), self.rank(n)):
                raise ShapeMismatch(
                    f"d^{n} has shape {m.shape}, expected {(self.rank(n + 1), self.rank(n))}")
            if m.rows and m.cols and not m.is_zero():
                self._d[n] = m
        self.summands = tuple(summands) if summands is not None else None
        self.name = name
        self._hash = None
        if check:
            self.validate()

    def validate(self):
        for n in self._d:
            if (n + 1) in self._d and not (self._d[n + 1] @ self._d[n]).is_zero():
                raise NotSquareZero(f"d^{n + 1} d^{n} != 0")

    # access ------------------------------------------------------------------

    def rank(self, n: int) -> int:
        return self._ranks.get(n, 0)

    def d(self, n: int) -> Matrix:
        m = self._d.get(n)
        if m is None:
            return Matrix.zeros(self.ring, self.rank(n + 1), self.rank(n))
        return m

    @property
    def ranks(self) -> dict:
        return dict(sorted(self._ranks.items()))

    @property
    def degrees(self) -> list:
        return sorted(self._ranks)

    @property
    def support(self):
        if not self._ranks:
            return None
        return min(self._ranks), max(self._ranks)

    def total_rank(self) -> int:
        return sum(self._ranks.values())

    def is_zero(self) -> bool:
        return not self._ranks

    def euler_characteristic(self) -> int:
        return sum((-1) ** (n % 2) * r for n, r in self._ranks.items())

    def __eq__(self, other):
        if not isinstance(other, ChainComplex):
            return NotImplemented
        return self.ring == other.ring and self._ranks == other._ranks and self._d == other._d

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, tuple(sorted(self._ranks.items())),
                               tuple(sorted(self._d.items()))))
        return self._hash

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"ChainComplex<{self.ring}{label} ranks={self.ranks}>"

    def with_summands(self, summands, name=None) -> "ChainComplex":
        return ChainComplex(self.ring, self._ranks, self._d, summands=summands,
                            name=name or self.name, check=False)

    def pieces(self) -> tuple:
        """Graded decomposition used for block bookkeeping."""
        return self.summands if self.summands is not None else (self,)

    def offset(self, n: int, index: int) -> int:
        return sum(p.rank(n) for p in self.pieces()[:index])


def zero_complex(ring: Ring) -> ChainComplex:
    return ChainComplex(ring, {})


def unit_complex(ring: Ring) -> ChainComplex:
    """The base object ``S``: rank one in degree zero."""
    return ChainComplex(ring, {0: 1}, name="S")


def point_complex(ring: Ring, degree: int, rank: int = 1) -> ChainComplex:
    return ChainComplex(ring, {degree: rank})


class ChainMap:
    """A graded map of some degree between complexes; a chain map when :meth:`is_chain`."""

    __slots__ = ("source", "target", "degree", "_c")

    def __init__(self, source: ChainComplex, target: ChainComplex, components: Mapping[int, Matrix],
                 degree: int = 0, *, check: bool = False):
        if source.ring != target.ring:
            raise RingError("source and target live over different rings")
        self.source = source
        self.target = target
        self.degree = degree
        self._c = {}
        for n, m in components.items():
            n = int(n)
            want = (target.rank(n + degree), source.rank(n))
            if m.shape != want:
                raise ShapeMismatch(f"component {n} has shape {m.shape}, expected {want}")
            if m.ring != source.ring:
                raise RingError("component over the wrong ring")
            if m.rows and m.cols and not m.is_zero():
                self._c[n] = m
        if check and not self.is_chain():
            raise NotAChainMap("map does not commute with the differentials")

    @property
    def ring(self):
        return self.source.ring

    def __getitem__(self, n: int) -> Matrix:
        m = self._c.get(n)
        if m is None:
            return Matrix.zeros(self.ring, self.target.rank(n + self.degree), self.source.rank(n))
        return m

    component = __getitem__

    def components(self) -> dict:
        return dict(sorted(self._c.items()))

    def _relevant_degrees(self):
        return sorted(set(self.source.degrees) | {n - self.degree for n in self.target.degrees})

    def commutator_defect(self) -> dict:
        """Degrees ``n`` where ``d f^n != (-1)^k f^{n+1} d^n`` and the defect matrix."""
        sign = -1 if self.degree % 2 else 1
        out = {}
        for n in sorted(set(self._relevant_degrees()) | {n - 1 for n in self._relevant_degrees()}):
            lhs = self.target.d(n + self.degree) @ self[n]
            rhs = self[n + 1] @ self.source.d(n)
            diff = lhs - rhs.scale(sign)
            if not diff.is_zero():
                out[n] = diff
        return out

    def is_chain(self) -> bool:
        return not self.commutator_defect()

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        return (self.degree == other.degree and self.source == other.source
                and self.target == other.target and self._c == other._c)

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self._c.items()))))

    def __repr__(self):
        return f"ChainMap<deg {self.degree}: {self.source!r} -> {self.target!r}>"

    def is_zero(self) -> bool:
        return not self._c

    def _same_shape(self, other):
        if (self.degree != other.degree or self.source.ranks != other.source.ranks
                or self.target.ranks != other.target.ranks):
            raise ShapeMismatch("maps are not parallel")

    def __add__(self, other):
        self._same_shape(other)
        degs = set(self._c) | set(other._c)
        return ChainMap(self.source, self.target, {n: self[n] + other[n] for n in degs}, self.degree)

    def __sub__(self, other):
        self._same_shape(other)
        degs = set(self._c) | set(other._c)
        return ChainMap(self.source, self.target, {n: self[n] - other[n] for n in degs}, self.degree)

    def __neg__(self):
        return ChainMap(self.source, self.target, {n: -m for n, m in self._c.items()}, self.degree)

    def scale(self, c) -> "ChainMap":
        return ChainMap(self.source, self.target, {n: m.scale(c) for n, m in self._c.items()}, self.degree)

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        """Composition ``self o other``."""
        if other.target.ranks != self.source.ranks or other.ring != self.ring:
            raise ShapeMismatch("maps are not composable")
        comps = {}
        for n, m in other._c.items():
            a = self._c.get(n + other.degree)
            if a is not None:
                comps[n] = a @ m
        return ChainMap(other.source, self.target, comps, self.degree + other.degree)

    def retarget(self, source: ChainComplex | None = None, target: ChainComplex | None = None) -> "ChainMap":
        """Same matrices, reinterpreted between complexes of identical ranks."""
        return ChainMap(source or self.source, target or self.target, self._c, self.degree)

    @classmethod
    def identity(cls, E: ChainComplex) -> "ChainMap":
        return cls(E, E, {n: Matrix.identity(E.ring, r) for n, r in E.ranks.items()})

    @classmethod
    def zero(cls, E: ChainComplex, F: ChainComplex, degree: int = 0) -> "ChainMap":
        return cls(E, F, {}, degree)

    @classmethod
    def scalar(cls, E: ChainComplex, c) -> "ChainMap":
        return cls(E, E, {n: Matrix.scalar(E.ring, r, c) for n, r in E.ranks.items()})

    def shift(self, k: int) -> "ChainMap":
        """``Sigma^k`` of the map, between the shifted complexes."""
        return ChainMap(shift(self.source, k), shift(self.target, k),
                        {n - k: m for n, m in self._c.items()}, self.degree)

    def graded_invertible(self):
        """Degreewise inverse as a graded map, or ``None``."""
        from .linalg import try_invert
        if self.degree != 0 or self.source.ranks != self.target.ranks:
            return None
        comps = {}
        for n in self.source.degrees:
            inv = try_invert(self[n])
            if inv is None:
                return None
            comps[n] = inv
        return ChainMap(self.target, self.source, comps)


class Homotopy:
    """Degree -1 map ``s`` with ``from_map - to_map = d s + s d``."""

    __slots__ = ("from_map", "to_map", "s")

    def __init__(self, from_map: ChainMap, to_map: ChainMap, s: ChainMap | Mapping[int, Matrix] | None = None):
        from_map._same_shape(to_map)
        if s is None:
            s = ChainMap(from_map.source, from_map.target, {}, -1)
        elif not isinstance(s, ChainMap):
            s = ChainMap(from_map.source, from_map.target, s, -1)
        if s.degree != -1:
            raise ShapeMismatch("a homotopy has degree -1")
        self.from_map = from_map
        self.to_map = to_map
        self.s = s

    def defect(self) -> dict:
        E, F = self.from_map.source, self.from_map.target
        out = {}
        degs = set(E.degrees) | set(F.degrees)
        for n in sorted(degs):
            lhs = self.from_map[n] - self.to_map[n]
            rhs = F.d(n - 1) @ self.s[n] + self.s[n + 1] @ E.d(n)
            if lhs != rhs:
                out[n] = lhs - rhs
        return out

    def verify(self) -> bool:
        return not self.defect()

    def is_trivial(self) -> bool:
        return self.s.is_zero()

    @classmethod
    def zero(cls, f: ChainMap) -> "Homotopy":
        return cls(f, f)

    def reversed(self) -> "Homotopy":
        return Homotopy(self.to_map, self.from_map, -self.s)

    def then(self, other: "Homotopy") -> "Homotopy":
        """Concatenate ``f ~ g`` with ``g ~ h``."""
        return Homotopy(self.from_map, other.to_map, self.s + other.s)

    def post(self, k: ChainMap) -> "Homotopy":
        """``k f ~ k g``."""
        return Homotopy(k @ self.from_map, k @ self.to_map, k @ self.s)

    def pre(self, k: ChainMap) -> "Homotopy":
        """``f k ~ g k``."""
        return Homotopy(self.from_map @ k, self.to_map @ k, self.s @ k)

    def __add__(self, other: "Homotopy") -> "Homotopy":
        return Homotopy(self.from_map + other.from_map, self.to_map + other.to_map, self.s + other.s)

    def __neg__(self):
        return Homotopy(-self.from_map, -self.to_map, -self.s)

    def shift(self, k: int) -> "Homotopy":
        s = self.s.shift(k)
        if k % 2:
            s = -s
        return Homotopy(self.from_map.shift(k), self.to_map.shift(k), s)


# --- constructions -----------------------------------------------------------------


def shift(E: ChainComplex, k: int) -> ChainComplex:
    """``Sigma^k E`` with ``(Sigma^k E)^n = E^{n+k}`` and differential ``(-1)^k d``."""
    if k == 0:
        return E
    sign = -1 if k % 2 else 1
    ranks = {n - k: r for n, r in E.ranks.items()}
    d = {n - k: E.d(n).scale(sign) for n in E.degrees if E.rank(n + 1)}
    name = f"S^{k}({E.name})" if E.name else None
    summands = tuple(shift(p, k) for p in E.summands) if E.summands else None
    return ChainComplex(E.ring, ranks, d, summands=summands, name=name, check=False)


def direct_sum(*complexes: ChainComplex) -> ChainComplex:
    """Degreewise direct sum with block-diagonal differential."""
    if not complexes:
        raise ValueError("direct_sum needs at least one complex")
    ring = complexes[0].ring
    if any(c.ring != ring for c in complexes):
        raise RingError("ring mismatch in direct sum")
    degs = sorted(set().union(*[c.degrees for c in complexes]))
    ranks = {n: sum(c.rank(n) for c in complexes) for n in degs}
    out = ChainComplex(ring, ranks, {}, summands=complexes, check=False)
    d = {}
    for n in degs:
        d[n] = _assemble(ring, out, out, n, 1, {(i, i): c.d(n) for i, c in enumerate(complexes)})
    return ChainComplex(ring, ranks, d, summands=complexes, check=False)


def _assemble(ring, src, tgt, n, degree, blocks):
    """Component at degree ``n`` of a block map; ``blocks[(i, j)]`` maps piece j to piece i."""
    sp, tp = src.pieces(), tgt.pieces()
    rows = []
    for i, t in enumerate(tp):
        row = []
        for j, s in enumerate(sp):
            m = blocks.get((i, j))
            if m is None:
                m = Matrix.zeros(ring, t.rank(n + degree), s.rank(n))
            row.append(m)
        rows.append(row)
    if not rows or not rows[0]:
        return Matrix.zeros(ring, tgt.rank(n + degree), src.rank(n))
    # drop empty rows/cols for Matrix.block bookkeeping
    out = Matrix.zeros(ring, tgt.rank(n + degree), src.rank(n))
    data = [list(r) for r in out.data]
    r0 = 0
    for i, t in enumerate(tp):
        c0 = 0
        for j, s in enumerate(sp):
            m = rows[i][j]
            if m.shape != (t.rank(n + degree), s.rank(n)):
                raise ShapeMismatch(f"block ({i},{j}) in degree {n} has shape {m.shape}")
            for a in range(m.rows):
                data[r0 + a][c0:c0 + m.cols] = m.data[a]
            c0 += s.rank(n)
        r0 += t.rank(n + degree)
    return Matrix(ring, out.rows, out.cols, data)


def whole(C: ChainComplex) -> ChainComplex:
    """``C`` viewed as a single block, forgetting any graded decomposition."""
    return C if C.summands is None else C.with_summands(None)


def block_map(source: ChainComplex, target: ChainComplex, blocks: Mapping, degree: int = 0) -> ChainMap:
    """Map assembled from maps between the graded pieces of ``source`` and ``target``.

    ``blocks[(i, j)]`` is a :class:`ChainMap` (or graded map) from piece ``j``
    of the source to piece ``i`` of the target.  Pass ``whole(C)`` for an
    endpoint that should count as a single piece.
    """
    degs = set(source.degrees)
    comps = {}
    for n in degs:
        comps[n] = _assemble(source.ring, source, target, n, degree,
                             {k: m[n] for k, m in blocks.items()})
    return ChainMap(source, target, comps, degree)


def inclusion(C: ChainComplex, i: int) -> ChainMap:
    """Graded inclusion of piece ``i``."""
    if C.summands is None:
        return ChainMap.identity(C)
    return _piece_map(C.pieces()[i], C, i, into=True)


def projection(C: ChainComplex, i: int) -> ChainMap:
    """Graded projection onto piece ``i``."""
    if C.summands is None:
        return ChainMap.identity(C)
    return _piece_map(C.pieces()[i], C, i, into=False)


def _piece_map(piece, C, i, into):
    ring = C.ring
    comps = {}
    for n in piece.degrees:
        off = C.offset(n, i)
        r = piece.rank(n)
        rows = []
        if into:
            for a in range(C.rank(n)):
                rows.append([1 if a - off == b else 0 for b in range(r)])
            comps[n] = Matrix(ring, C.rank(n), r, rows)
        else:
            for b in range(r):
                rows.append([1 if a - off == b else 0 for a in range(C.rank(n))])
            comps[n] = Matrix(ring, r, C.rank(n), rows)
    return ChainMap(piece, C, comps) if into else ChainMap(C, piece, comps)


class Cone(NamedTuple):
    complex: ChainComplex
    incl: ChainMap      # F -> cone(f)
    proj: ChainMap      # cone(f) -> Sigma E
    f: ChainMap


def cone(f: ChainMap) -> Cone:
    """Mapping cone of a degree-0 map with ``d = [[-d_E, 0], [f, d_F]]``."""
    if f.degree != 0:
        raise ShapeMismatch("cone needs a degree-0 map")
    E, F = f.source, f.target
    SE = shift(E, 1)
    proto = ChainComplex(E.ring, {n: SE.rank(n) + F.rank(n) for n in set(SE.degrees) | set(F.degrees)},
                         summands=(SE, F), check=False)
    d = {}
    for n in proto.degrees:
        d[n] = _assemble(E.ring, proto, proto, n, 1,
                         {(0, 0): SE.d(n), (1, 0): f[n + 1], (1, 1): F.d(n)})
    C = ChainComplex(E.ring, proto.ranks, d, summands=(SE, F),
                     name=f"cone({E.name or 'E'}->{F.name or 'F'})")
    incl = _piece_map(F, C, 1, True)
    proj = _piece_map(SE, C, 0, False)
    return Cone(C, incl, proj, f)


class Cylinder(NamedTuple):
    complex: ChainComplex
    f_prime: ChainMap       # E -> Cyl
    g_pp: ChainMap          # Cyl -> cone(f)
    to_target: ChainMap     # Cyl -> F
    from_target: ChainMap   # F -> Cyl
    homotopy: Homotopy      # id_Cyl ~ from_target o to_target
    cone: Cone


def cylinder(f: ChainMap) -> Cylinder:
    """Mapping cylinder ``Cyl^n = E^{n+1} (+) F^n (+) E^n``.

    Differential ``[[-d_E, 0, 0], [f, d_F, 0], [-1, 0, d_E]]``; this is
    ``Sigma^{-1} cone(cone(f) -> Sigma E)`` under the fixed conventions.
    """
    if f.degree != 0:
        raise ShapeMismatch("cylinder needs a degree-0 map")
    E, F = f.source, f.target
    ring = E.ring
    SE = shift(E, 1)
    pieces = (SE, F, E)
    degs = set(SE.degrees) | set(F.degrees) | set(E.degrees)
    proto = ChainComplex(ring, {n: SE.rank(n) + F.rank(n) + E.rank(n) for n in degs},
                         summands=pieces, check=False)
    minus_id = ChainMap(SE, shift(E, 0), {n: Matrix.scalar(ring, E.rank(n + 1), -1) for n in SE.degrees}, 1)
    d = {}
    for n in proto.degrees:
        d[n] = _assemble(ring, proto, proto, n, 1, {
            (0, 0): SE.d(n), (1, 0): f[n + 1], (1, 1): F.d(n),
            (2, 0): minus_id[n], (2, 2): E.d(n)})
    Cyl = ChainComplex(ring, proto.ranks, d, summands=pieces, name="cyl")
    cn = cone(f)
    f_prime = _piece_map(E, Cyl, 2, True)
    g_pp = block_map(Cyl, cn.complex, {(0, 0): ChainMap.identity(SE), (1, 1): ChainMap.identity(F)})
    Fw = whole(F)
    to_target = block_map(Cyl, Fw, {(0, 1): ChainMap.identity(F), (0, 2): f}).retarget(Cyl, F)
    from_target = block_map(Fw, Cyl, {(1, 0): ChainMap.identity(F)}).retarget(F, Cyl)
    # s(a, b, c) = (-c, 0, 0)
    s = block_map(Cyl, Cyl, {(0, 2): ChainMap(E, SE, {n: Matrix.scalar(ring, E.rank(n), -1)
                                                      for n in E.degrees}, -1)}, degree=-1)
    h = Homotopy(ChainMap.identity(Cyl), from_target @ to_target, s)
    return Cylinder(Cyl, f_prime, g_pp, to_target, from_target, h, cn)


class Homology(NamedTuple):
    free_rank: int
    torsion: tuple

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append(f"R^{self.free_rank}")
        parts.extend(f"R/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"


def homology(E: ChainComplex, n: int) -> Homology:
    """``ker d^n / im d^{n-1}``; over Z the torsion invariant factors come from the SNF."""
    from .linalg import invariant_factors
    r = E.rank(n)
    if r == 0:
        return Homology(0, ())
    out_rank = len(invariant_factors(E.d(n))) if E.rank(n + 1) else 0
    inc = invariant_factors(E.d(n - 1)) if E.rank(n - 1) else []
    free = r - out_rank - len(inc)
    torsion = tuple(int(x) for x in inc if not E.ring.is_unit(x)) if E.ring.kind == "Z" else ()
    return Homology(free, torsion)


def is_acyclic(E: ChainComplex) -> bool:
    return all(homology(E, n) == (0, ()) for n in E.degrees)


# --- homotopy solving -----------------------------------------------------------------


def _kron_id_left(A: Matrix, q: int) -> Matrix:
    """Coefficient of vec(X) in vec(A X) for X with q columns (row-major vec)."""
    return A.kron(Matrix.identity(A.ring, q))


def _kron_id_right(p: int, B: Matrix) -> Matrix:
    """Coefficient of vec(X) in vec(X B) for X with p rows."""
    return Matrix.identity(B.ring, p).kron(B.T)


class _System:
    """Sparse-ish assembly of a block linear system in matrix unknowns."""

    def __init__(self, ring):
        self.ring = ring
        self.unknowns = {}   # key -> (offset, rows, cols)
        self.size = 0
        self.eqs = []        # list of (dict key -> coefficient Matrix, rhs Matrix column)

    def unknown(self, key, rows, cols):
        if key not in self.unknowns:
            self.unknowns[key] = (self.size, rows, cols)
            self.size += rows * cols
        return key

    def equation(self, terms: dict, rhs: Matrix):
        self.eqs.append((terms, rhs))

    def assemble(self):
        """The system as ``(A, b)`` over the flattened unknowns (``None`` if all rows are trivial)."""
        ring = self.ring
        total_rows = sum(r.rows for _, r in self.eqs)
        rows = [[ring.zero] * self.size for _ in range(total_rows)]
        b = []
        r0 = 0
        for terms, rhs in self.eqs:
            for key, coef in terms.items():
                off = self.unknowns[key][0]
                for i in range(coef.rows):
                    row = rows[r0 + i]
                    for j, v in enumerate(coef.data[i]):
                        if v:
                            row[off + j] = ring.reduce(row[off + j] + v)
            b.extend([x] for x in (rhs.data[i][0] for i in range(rhs.rows)))
            r0 += rhs.rows
        # drop all-zero equations with zero right-hand side
        keep = [i for i in range(total_rows) if any(rows[i]) or b[i][0] != 0]
        if not keep:
            return None
        return (Matrix(ring, len(keep), self.size, [rows[i] for i in keep]),
                Matrix(ring, len(keep), 1, [b[i] for i in keep]))

    def unpack(self, x: Matrix) -> dict:
        ring = self.ring
        out = {}
        for key, (off, r, c) in self.unknowns.items():
            vals = [x[off + i * c + j, 0] for i in range(r) for j in range(c)]
            out[key] = Matrix(ring, r, c, [vals[i * c:(i + 1) * c] for i in range(r)])
        return out

    def solve(self):
        ring = self.ring
        if self.size == 0:
            if all(r.is_zero() for _, r in self.eqs):
                return {}
            return None
        sysm = self.assemble()
        if sysm is None:
            return self.unpack(Matrix.zeros(ring, self.size, 1))
        x = solve_linear(*sysm)
        if x is None:
            return None
        return self.unpack(x)

    def kernel(self) -> list:
        """Basis of the homogeneous solutions, one ``unpack``-ed dict per vector."""
        ring = self.ring
        if self.size == 0:
            return []
        sysm = self.assemble()
        if sysm is None:
            K = Matrix.identity(ring, self.size)
        else:
            K = nullspace(sysm[0])
        return [self.unpack(K.column(j)) for j in range(K.cols)]


def _vec(M: Matrix) -> Matrix:
    return Matrix(M.ring, M.rows * M.cols, 1, [[x] for row in M.data for x in row])


def _homotopy_equations(sys: _System, E, F, diff: Mapping[int, Matrix], tag, sign=1):
    """Add equations ``diff^n = sign * (d s^n + s^{n+1} d)`` for unknown s tagged ``tag``."""
    degs = sorted(set(E.degrees) | set(F.degrees))
    for n in degs:
        if E.rank(n) and F.rank(n - 1):
            sys.unknown((tag, n), F.rank(n - 1), E.rank(n))
    for n in degs:
        p, q = F.rank(n), E.rank(n)
        if not (p and q):
            continue
        terms = {}
        if (tag, n) in sys.unknowns:
            terms[(tag, n)] = _kron_id_left(F.d(n - 1), q).scale(sign)
        if (tag, n + 1) in sys.unknowns:
            terms[(tag, n + 1)] = _kron_id_right(p, E.d(n)).scale(sign)
        sys.equation(terms, _vec(diff[n]))


def _collect(E, F, sol, tag, degree):
    comps = {n: m for (t, n), m in sol.items() if t == tag}
    return ChainMap(E, F, comps, degree)


def find_homotopy(f: ChainMap, g: ChainMap) -> Homotopy | None:
    """A homotopy ``s`` with ``f - g = d s + s d``, or ``None`` when none exists."""
    f._same_shape(g)
    if f.degree != 0:
        raise ShapeMismatch("homotopies relate degree-0 maps")
    E, F = f.source, f.target
    diff = {n: f[n] - g[n] for n in set(E.degrees) | set(F.degrees)}
    if all(m.is_zero() for m in diff.values()):
        return Homotopy(f, g)
    sys = _System(f.ring)
    _homotopy_equations(sys, E, F, diff, "s")
    sol = sys.solve()
    if sol is None:
        return None
    h = Homotopy(f, g, _collect(E, F, sol, "s", -1))
    assert h.verify()
    return h


def homotopic(f: ChainMap, g: ChainMap) -> bool:
    return find_homotopy(f, g) is not None


class HomotopyEquivalence(NamedTuple):
    map: ChainMap
    inverse: ChainMap
    left: Homotopy   # inverse o map ~ id_source
    right: Homotopy  # map o inverse ~ id_target

    def verify(self) -> bool:
        f, g = self.map, self.inverse
        return (f.is_chain() and g.is_chain() and self.left.verify() and self.right.verify()
                and self.left.from_map == g @ f and self.left.to_map == ChainMap.identity(f.source)
                and self.right.from_map == f @ g and self.right.to_map == ChainMap.identity(f.target))

    def inverted(self) -> "HomotopyEquivalence":
        return HomotopyEquivalence(self.inverse, self.map, self.right, self.left)

    def then(self, other: "HomotopyEquivalence") -> "HomotopyEquivalence":
        """Composite ``other.map o self.map``."""
        f, g = self.map, other.map
        fi, gi = self.inverse, other.inverse
        # fi gi g f ~ fi f ~ id
        left = other.left.pre(f).post(fi).then(self.left)
        right = self.right.pre(gi).post(g).then(other.right)
        return HomotopyEquivalence(g @ f, fi @ gi, left, right)

    @classmethod
    def identity(cls, E: ChainComplex) -> "HomotopyEquivalence":
        i = ChainMap.identity(E)
        return cls(i, i, Homotopy.zero(i), Homotopy.zero(i))

    @classmethod
    def from_iso(cls, f: ChainMap) -> "HomotopyEquivalence | None":
        inv = f.graded_invertible()
        if inv is None:
            return None
        return cls(f, inv, Homotopy(inv @ f, ChainMap.identity(f.source)),
                   Homotopy(f @ inv, ChainMap.identity(f.target)))


def is_homotopy_equivalence(f: ChainMap) -> HomotopyEquivalence | None:
    """Find a homotopy inverse with both homotopies, or ``None``."""
    if f.degree != 0 or not f.is_chain():
        return None
    iso = HomotopyEquivalence.from_iso(f)
    if iso is not None:
        return iso
    E, F = f.source, f.target
    ring = f.ring
    if [homology(E, n) for n in sorted(set(E.degrees) | set(F.degrees))] != \
            [homology(F, n) for n in sorted(set(E.degrees) | set(F.degrees))]:
        return None
    sys = _System(ring)
    degs = sorted(set(E.degrees) | set(F.degrees))
    for n in degs:
        if E.rank(n) and F.rank(n):
            sys.unknown(("g", n), E.rank(n), F.rank(n))
    # chain condition d_E g^n - g^{n+1} d_F^n = 0
    for n in degs:
        p, q = E.rank(n + 1), F.rank(n)
        if not (p and q):
            continue
        terms = {}
        if ("g", n) in sys.unknowns:
            terms[("g", n)] = _kron_id_left(E.d(n), q)
        if ("g", n + 1) in sys.unknowns:
            terms[("g", n + 1)] = _kron_id_right(p, F.d(n)).scale(-1)
        if terms:
            sys.equation(terms, Matrix.zeros(ring, p * q, 1))
    # g f - id = d sE + sE d ;  f g - id = d sF + sF d
    for src, tgt, tag, first in ((E, E, "sE", "gf"), (F, F, "sF", "fg")):
        for n in degs:
            if src.rank(n) and tgt.rank(n - 1):
                sys.unknown((tag, n), tgt.rank(n - 1), src.rank(n))
        for n in degs:
            p, q = tgt.rank(n), src.rank(n)
            if not (p and q):
                continue
            terms = {}
            if first == "gf" and ("g", n) in sys.unknowns:
                terms[("g", n)] = _kron_id_right(p, f[n])          # g^n f^n
            if first == "fg" and ("g", n) in sys.unknowns:
                terms[("g", n)] = _kron_id_left(f[n], q)           # f^n g^n
            if (tag, n) in sys.unknowns:
                terms[(tag, n)] = _kron_id_left(tgt.d(n - 1), q).scale(-1)
            if (tag, n + 1) in sys.unknowns:
                terms[(tag, n + 1)] = _kron_id_right(p, src.d(n)).scale(-1)
            sys.equation(terms, _vec(Matrix.identity(ring, p)))
    sol = sys.solve()
    if sol is None:
        return None
    g = _collect(F, E, sol, "g", 0)
    sE = _collect(E, E, sol, "sE", -1)
    sF = _collect(F, F, sol, "sF", -1)
    eq = HomotopyEquivalence(f, g, Homotopy(g @ f, ChainMap.identity(E), sE),
                             Homotopy(f @ g, ChainMap.identity(F), sF))
    assert eq.verify()
    return eq


# --- short exact sequences -----------------------------------------------------------------


class SplitSequence:
    """Degreewise split short exact sequence ``0 -> X --a--> V --b--> Y -> 0``.

    ``section`` is a graded right inverse of ``b`` and ``retraction`` a graded
    left inverse of ``a`` with ``a r + s b = id``.  The gluing block is
    ``w = r d_V s`` (degree +1, ``Y -> X``) and the connecting map is ``-w``.
    """

    def __init__(self, a: ChainMap, b: ChainMap, section: ChainMap | None = None,
                 retraction: ChainMap | None = None):
        if a.target.ranks != b.source.ranks:
            raise ShapeMismatch("a and b are not composable")
        self.a, self.b = a, b
        self.X, self.V, self.Y = a.source, a.target, b.target
        if section is None or retraction is None:
            section, retraction = _compute_splitting(a, b, section)
        self.section = section
        self.retraction = retraction

    def verify(self) -> bool:
        a, b, s, r = self.a, self.b, self.section, self.retraction
        idV = ChainMap.identity(self.V)
        return (a.is_chain() and b.is_chain() and (b @ a).is_zero()
                and r @ a == ChainMap.identity(self.X) and b @ s == ChainMap.identity(self.Y)
                and (a @ r) + (s @ b) == idV)

    @property
    def w(self) -> ChainMap:
        dV = ChainMap(self.V, self.V, {n: self.V.d(n) for n in self.V.degrees}, 1)
        return self.retraction @ dV @ self.section

    def connecting(self) -> ChainMap:
        """The third map ``Y -> Sigma X`` of the associated triangle."""
        w = self.w
        return ChainMap(self.Y, shift(self.X, 1), {n: -w[n] for n in self.Y.degrees})

    def cone_equivalence(self):
        """Explicit ``cone(a) ~ Y`` with the triangle-comparison homotopies.

        Returns ``(cone, equiv, sq_incl, sq_proj)`` where ``equiv.map = (0 b)``,
        ``equiv.inverse = (-w ; s)``, ``sq_incl`` is the exact identity
        ``equiv.map o incl = b`` (zero homotopy) and ``sq_proj`` certifies
        ``proj ~ connecting o equiv.map``.
        """
        cn = cone(self.a)
        C = cn.complex
        SX, V = C.summands
        ring = self.V.ring
        Y = whole(self.Y)
        u = block_map(C, Y, {(0, 1): self.b}).retarget(C, self.Y)
        w = self.w
        lam = block_map(Y, C, {(0, 0): ChainMap(self.Y, SX, {n: -w[n] for n in self.Y.degrees}),
                               (1, 0): self.section}).retarget(self.Y, C)
        # homotopy s(x', v) = (r v, 0) certifies id - lam u = d s + s d
        r_to_SX = ChainMap(V, SX, {n: self.retraction[n] for n in V.degrees}, -1)
        sC = block_map(C, C, {(0, 1): r_to_SX}, degree=-1)
        idC = ChainMap.identity(C)
        left = Homotopy(lam @ u, idC, -sC)
        right = Homotopy(u @ lam, ChainMap.identity(self.Y))
        eq = HomotopyEquivalence(u, lam, left, right)
        sq_incl = Homotopy(u @ cn.incl, self.b)
        h = self.connecting()
        s2 = block_map(C, whole(SX), {(0, 1): r_to_SX}, degree=-1).retarget(C, SX)
        sq_proj = Homotopy(cn.proj, h @ u, s2)
        return cn, eq, sq_incl, sq_proj

    def block_form(self) -> "SemiSplitSES":
        return SemiSplitSES(self.X, self.Y, self.w)

    def to_block(self) -> ChainMap:
        """Chain isomorphism ``V -> X (+) Y`` (the block form's middle term)."""
        F = self.block_form().F
        return _stack_rows(self.V, F, [self.retraction, self.b])

    def from_block(self) -> ChainMap:
        F = self.block_form().F
        return _stack_cols(F, self.V, [self.a, self.section])


def _stack_rows(src, tgt, maps):
    comps = {}
    for n in src.degrees:
        comps[n] = Matrix.vstack(src.ring, [m[n] for m in maps], src.rank(n))
    return ChainMap(src, tgt, comps)


def _stack_cols(src, tgt, maps):
    comps = {}
    for n in src.degrees:
        comps[n] = Matrix.hstack(src.ring, [m[n] for m in maps], tgt.rank(n))
    return ChainMap(src, tgt, comps)


def _compute_splitting(a: ChainMap, b: ChainMap, section=None):
    from .linalg import try_invert
    ring = a.ring
    X, V, Y = a.source, a.target, b.target
    sec, ret = {}, {}
    for n in V.degrees:
        A, B = a[n], b[n]
        if section is not None:
            S = section[n]
        elif Y.rank(n):
            S = solve_linear(B, Matrix.identity(ring, Y.rank(n)))
            if S is None:
                raise ComplexError(f"b is not split surjective in degree {n}")
        else:
            S = Matrix.zeros(ring, V.rank(n), 0)
        sec[n] = S
        if X.rank(n):
            L = solve_linear(A.T, Matrix.identity(ring, X.rank(n)))
            if L is None:
                raise ComplexError(f"a is not split injective in degree {n}")
            L = L.T
            ret[n] = L @ (Matrix.identity(ring, V.rank(n)) - S @ B)
        else:
            ret[n] = Matrix.zeros(ring, 0, V.rank(n))
        full = Matrix.hstack(ring, [A, S], V.rank(n))
        if full.cols != V.rank(n) or try_invert(full) is None:
            raise ComplexError(f"sequence is not degreewise split exact in degree {n}")
    return ChainMap(Y, V, sec), ChainMap(V, X, ret)


class SemiSplitSES:
    """``0 -> E -> F -> G -> 0`` with ``F = E (+) G`` and ``d_F = [[d_E, w], [0, d_G]]``."""

    def __init__(self, E: ChainComplex, G: ChainComplex, w: ChainMap):
        if w.degree != 1 or w.source.ranks != G.ranks or w.target.ranks != E.ranks:
            raise ShapeMismatch("gluing block must be a degree +1 map G -> E")
        self.E, self.G = E, G
        self.w = ChainMap(G, E, w.components(), 1)
        ring = E.ring
        degs = sorted(set(E.degrees) | set(G.degrees))
        proto = ChainComplex(ring, {n: E.rank(n) + G.rank(n) for n in degs},
                             summands=(E, G), check=False)
        d = {n: _assemble(ring, proto, proto, n, 1,
                          {(0, 0): E.d(n), (0, 1): self.w[n], (1, 1): G.d(n)}) for n in degs}
        try:
            self.F = ChainComplex(ring, proto.ranks, d, summands=(E, G), name="F")
        except NotSquareZero as exc:
            raise NotSquareZero("gluing block violates d_E w + w d_G = 0") from exc
        self.f = ChainMap(E, self.F, _piece_map(E, self.F, 0, True).components())
        self.g = ChainMap(self.F, G, _piece_map(G, self.F, 1, False).components())
        self.psi = ChainMap(self.F, E, _piece_map(E, self.F, 0, False).components())
        self.phi = ChainMap(G, self.F, _piece_map(G, self.F, 1, True).components())

    @property
    def ring(self):
        return self.E.ring

    def sequence(self) -> SplitSequence:
        return SplitSequence(self.f, self.g, self.phi, self.psi)

    def verify(self) -> bool:
        return self.sequence().verify()

    def is_split(self) -> bool:
        return self.w.is_zero()

    def __repr__(self):
        return f"SemiSplitSES<E={self.E.ranks} G={self.G.ranks} split={self.is_split()}>"


def homotopy_invariant_h(ses: SemiSplitSES) -> ChainMap:
    """Connecting map ``G -> Sigma E``; equals ``-w`` under the fixed conventions."""
    return ses.sequence().connecting()


@dataclass(frozen=True)
class Triangle:
    """``X --f--> Y --g--> Z --h--> Sigma X``."""

    f: ChainMap
    g: ChainMap
    h: ChainMap

    def __post_init__(self):
        if self.f.target.ranks != self.g.source.ranks or self.g.target.ranks != self.h.source.ranks:
            raise ShapeMismatch("triangle maps are not composable")
        if self.h.target.ranks != shift(self.f.source, 1).ranks:
            raise ShapeMismatch("third map must land in Sigma X")

    @property
    def X(self):
        return self.f.source

    @property
    def Y(self):
        return self.f.target

    @property
    def Z(self):
        return self.g.target

    @classmethod
    def standard(cls, f: ChainMap) -> "Triangle":
        cn = cone(f)
        return cls(f, cn.incl, cn.proj)

    @classmethod
    def of_sequence(cls, seq: SplitSequence) -> "Triangle":
        return cls(seq.a, seq.b, seq.connecting())

    def rotate(self) -> "Triangle":
        """``Y -> Z -> Sigma X -> Sigma Y`` with third map ``-Sigma f``."""
        return Triangle(self.g, self.h, -self.f.shift(1).retarget(shift(self.X, 1), shift(self.Y, 1)))


# --- strictification -----------------------------------------------------------------


class Strictified(NamedTuple):
    cylinder: Cylinder
    cone: Cone
    phi: ChainMap
    psi_prime: ChainMap       # on Cyl
    omega_prime: ChainMap     # on cone(f)
    triangle: Triangle        # E -> Cyl -> cone(f) -> Sigma E

    def squares_commute(self) -> dict:
        t = self.triangle
        return {
            "f' phi = psi' f'": self.psi_prime @ t.f == t.f @ self.phi,
            "g'' psi' = omega' g''": t.g @ self.psi_prime == self.omega_prime @ t.g,
            "h' omega' = Sigma(phi) h'": t.h @ self.omega_prime == self.phi.shift(1).retarget(
                t.h.target, t.h.target) @ t.h,
        }


def strictify_endotriangle(ses: SemiSplitSES, phi: ChainMap, psi: ChainMap, s: Homotopy) -> Strictified:
    """Cylinder/cone replacement making the endomorphism square commute on the nose.

    ``s`` must be a homotopy from ``f phi`` to ``psi f``.  The replacement maps
    are ``omega' = [[Sigma phi, 0], [-s, psi]]`` and
    ``psi' = [[Sigma phi, 0, 0], [-s, psi, 0], [0, 0, phi]]`` (the sign of the
    ``s`` block is forced by the cone convention).
    """
    f = ses.f
    if not s.verify() or s.from_map != f @ phi or s.to_map != psi @ f:
        raise ComplexError("s does not certify f phi ~ psi f")
    cyl = cylinder(f)
    cn = cyl.cone
    E, F = ses.E, ses.F
    SE = shift(E, 1)
    sphi = ChainMap(SE, SE, {n - 1: m for n, m in phi.components().items()})
    minus_s = ChainMap(SE, F, {n - 1: -m for n, m in s.s.components().items()}, 0)
    omega = block_map(cn.complex, cn.complex, {(0, 0): sphi, (1, 0): minus_s, (1, 1): psi})
    psi_p = block_map(cyl.complex, cyl.complex, {(0, 0): sphi, (1, 0): minus_s, (1, 1): psi, (2, 2): phi})
    tri = Triangle(cyl.f_prime, cyl.g_pp, cn.proj)
    return Strictified(cyl, cn, phi, psi_p, omega, tri)


class MapEquations:
    """Linear equations whose unknowns are graded maps.

    Each equation is ``sum_k A_k X_k^{m_k} B_k + C = 0`` in one degree;
    :meth:`solve` returns the unknowns as :class:`ChainMap` objects.
    """

    def __init__(self, ring: Ring):
        self.ring = ring
        self._sys = _System(ring)
        self._maps = {}

    def unknown(self, name, source: ChainComplex, target: ChainComplex, degree: int = 0):
        self._maps[name] = (source, target, degree)
        for n in source.degrees:
            if target.rank(n + degree):
                self._sys.unknown((name, n), target.rank(n + degree), source.rank(n))
        return name

    def add(self, terms, const: Matrix):
        """``terms`` is a list of ``(A, name, m, B)`` standing for ``A @ X[m] @ B``."""
        if const.rows == 0 or const.cols == 0:
            return
        coeffs = {}
        for A, name, m, B in terms:
            key = (name, m)
            if key not in self._sys.unknowns:
                continue
            c = A.kron(B.T)
            coeffs[key] = coeffs[key] + c if key in coeffs else c
        self._sys.equation(coeffs, _vec(-const))

    def chain(self, name):
        """``d X = (-1)^k X d``."""
        src, tgt, k = self._maps[name]
        ring = self.ring
        sign = -1 if k % 2 else 1
        for n in sorted(set(src.degrees) | {m - 1 for m in src.degrees}):
            rows, cols = tgt.rank(n + k + 1), src.rank(n)
            if not (rows and cols):
                continue
            self.add([(tgt.d(n + k), name, n, Matrix.identity(ring, cols)),
                      (Matrix.identity(ring, rows).scale(-sign), name, n + 1, src.d(n))],
                     Matrix.zeros(ring, rows, cols))

    def _wrap(self, sol):
        out = {}
        for name, (src, tgt, k) in self._maps.items():
            out[name] = ChainMap(src, tgt, {n: m for (t, n), m in sol.items() if t == name}, k)
        return out

    def solve(self):
        sol = self._sys.solve()
        return None if sol is None else self._wrap(sol)

    def kernel(self) -> list:
        """Basis of the solutions of the homogeneous system."""
        return [self._wrap(v) for v in self._sys.kernel()]

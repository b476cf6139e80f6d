"""Traces, Lefschetz invariants and additivity on distinguished triangles."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .complexes import (ChainComplex, ChainMap, ComplexError, Homotopy, SemiSplitSES, SplitSequence,
                        block_map, cone, find_homotopy, shift, strictify_endotriangle, unit_complex, whole)
from .linalg import Matrix, diagonalize, nullspace, solve_linear
from .monoidal import (coevaluation, dual_complex, dual_map, evaluation, labels, label_map, right_unitor,
                       symmetry, tensor, tensor_map)


def euler_trace_oracle(phi: ChainMap):
    """``sum_n (-1)^n tr(phi^n)``, computed directly from the matrices."""
    ring = phi.ring
    total = ring.zero
    for n in phi.source.degrees:
        t = phi[n].trace()
        total = ring.reduce(total + t if n % 2 == 0 else total - t)
    return total


def tr(phi: ChainMap):
    """Trace as the composite ``S -u-> E(x)DE -gamma-> DE(x)E -1(x)phi-> DE(x)E -t-> S``.

    Only degree zero matters for a map out of ``S``, and there every piece is
    block diagonal over ``E^i (x) (E^i)^*``; each block is composed from its
    own coevaluation, symmetry, tensor and evaluation matrices.
    """
    if phi.degree != 0 or phi.source.ranks != phi.target.ranks:
        raise ComplexError("trace needs a degree-0 endomorphism")
    ring = phi.ring
    total = ring.zero
    for i in phi.source.degrees:
        r = phi.source.rank(i)
        ident = Matrix.identity(ring, r)
        # u block: e_a (x) e^b with a == b, Kronecker index a*r + b
        u = Matrix(ring, r * r, 1, [[1 if k // r == k % r else 0] for k in range(r * r)])
        # gamma block: e_a (x) e^b -> (-1)^{i(-i)} e^b (x) e_a
        sign = -1 if i % 2 else 1
        perm = [[0] * (r * r) for _ in range(r * r)]
        for a in range(r):
            for b in range(r):
                perm[b * r + a][a * r + b] = sign
        g = Matrix(ring, r * r, r * r, perm)
        one_phi = ident.kron(phi[i])
        t = Matrix(ring, 1, r * r, [[1 if k // r == k % r else 0 for k in range(r * r)]])
        total = ring.reduce(total + (t @ one_phi @ g @ u)[0, 0])
    return total


def tr_full(phi: ChainMap):
    """The same composite assembled from the full monoidal maps (slow; for cross-checks)."""
    E = phi.source
    DE = dual_complex(E)
    comp = evaluation(E) @ tensor_map(ChainMap.identity(DE), phi) @ symmetry(E, DE) @ coevaluation(E)
    return comp[0][0, 0] if comp.source.rank(0) and comp.target.rank(0) else phi.ring.zero


# --- Lefschetz invariants -----------------------------------------------------------------


@dataclass
class Orientation:
    """Coefficient complex ``C`` with a rule ``E -> (A_E : E -> E (x) C)``."""

    C: ChainComplex
    rule: Callable
    name: str = "orientation"
    _cache: dict = field(default_factory=dict, repr=False)

    def at(self, E: ChainComplex) -> ChainMap:
        key = E
        if key not in self._cache:
            A = self.rule(E)
            if A is None:
                raise ComplexError(f"{self.name} is undefined at {E!r}")
            self._cache[key] = A
        return self._cache[key]


def trivial_orientation(ring) -> Orientation:
    """``C = S`` and ``A_E`` the inverse right unitor (identity matrices)."""
    S = unit_complex(ring)

    def rule(E):
        return ChainMap(E, tensor(E, S), {n: Matrix.identity(ring, E.rank(n)) for n in E.degrees})

    return Orientation(S, rule, "trivial")


def demo_orientation(ring, c=1) -> Orientation:
    """``C = S + cone(id_S)``; ``A_E = (c * unitor^{-1}, x -> x (x) b)`` with ``b`` the degree-0 boundary.

    The second component is a cycle that is also a boundary, so it changes
    the representative but never the class: ``Lef(phi) = c * Tr(phi)``.
    """
    from .complexes import direct_sum
    S = unit_complex(ring)
    K = cone(ChainMap.identity(S)).complex
    C = direct_sum(S, K)
    b_index = K.offset(0, 1)          # the F-summand generator in degree 0

    def rule(E):
        T = tensor(E, C)
        comps = {}
        for n in E.degrees:
            index = {lab: k for k, lab in enumerate(labels(T, n))}
            rows = [[ring.zero] * E.rank(n) for _ in range(T.rank(n))]
            for a, xl in enumerate(labels(E, n)):
                rows[index[(n, ("T", xl, (0, ("e", 0))))]][a] = ring(c)
                rows[index[(n, ("T", xl, (0, ("e", 1 + b_index))))]][a] = ring.one
            comps[n] = Matrix(ring, T.rank(n), E.rank(n), rows)
        return ChainMap(E, T, comps)

    return Orientation(C, rule, f"demo(c={c})")


def broken_orientation(base: Orientation, bad: ChainComplex) -> Orientation:
    """``base`` with the sign of ``A`` flipped at the single object ``bad``."""

    def rule(E):
        A = base.at(E)
        return -A if E == bad else A

    return Orientation(base.C, rule, f"broken({base.name})")


@dataclass(frozen=True)
class LefschetzValue:
    representative: tuple     # entries of the cycle in C^0
    normal_form: tuple        # ((coordinate, modulus), ...) with modulus 0 for free parts

    def __eq__(self, other):
        return isinstance(other, LefschetzValue) and self.normal_form == other.normal_form

    def __hash__(self):
        return hash(self.normal_form)


def h0_normal_form(C: ChainComplex, v: Matrix) -> tuple:
    """Class of the cycle ``v`` (a column in ``C^0``) in ``H^0(C)``."""
    ring = C.ring
    if C.rank(0) == 0:
        return ()
    if not (C.d(0) @ v).is_zero():
        raise ComplexError("representative is not a cycle")
    K = nullspace(C.d(0)) if C.rank(1) else Matrix.identity(ring, C.rank(0))
    if K.cols == 0:
        return ()
    y = solve_linear(K, v)
    B = C.d(-1)
    M = solve_linear(K, B) if B.cols else Matrix.zeros(ring, K.cols, 0)
    if y is None or M is None:
        raise ComplexError("kernel basis does not span the cycles")
    U, D, _ = diagonalize(M)
    z = U @ y
    out = []
    for i in range(K.cols):
        di = D[i, i] if i < min(D.rows, D.cols) else ring.zero
        if di != 0 and ring.is_unit(di):
            continue
        if di == 0:
            out.append((ring.reduce(z[i, 0]), 0))
        else:
            out.append((z[i, 0] % di, di))
    return tuple(out)


def lef(phi: ChainMap, A: Orientation) -> LefschetzValue:
    """``S -> E(x)DE -> DE(x)E -> DE(x)E -> DE(x)(E(x)C) -> (DE(x)E)(x)C -> S(x)C = C``."""
    from .monoidal import associator
    E = phi.source
    DE = dual_complex(E)
    C = A.C
    step = symmetry(E, DE) @ coevaluation(E)
    step = tensor_map(ChainMap.identity(DE), phi) @ step
    step = tensor_map(ChainMap.identity(DE), A.at(E)) @ step
    inv_assoc = associator(DE, E, C).graded_invertible()
    step = inv_assoc @ step
    step = tensor_map(evaluation(E), ChainMap.identity(C)) @ step
    # S (x) C = C with identity matrices
    v = step[0] if step.target.rank(0) else Matrix.zeros(phi.ring, 0, 1)
    v = Matrix(phi.ring, C.rank(0), 1, v.data) if C.rank(0) else v
    return LefschetzValue(tuple(x for row in v.data for x in row), h0_normal_form(C, v))


def check_orientation_naturality(A: Orientation, f: ChainMap) -> dict:
    """``(f (x) 1_C) A_E ~ A_F f``; exact when possible, otherwise a solved homotopy."""
    lhs = tensor_map(f, ChainMap.identity(A.C)) @ A.at(f.source)
    rhs = A.at(f.target) @ f
    if lhs == rhs:
        return {"natural": True, "exact": True, "homotopy": None}
    h = find_homotopy(lhs, rhs)
    return {"natural": h is not None, "exact": False, "homotopy": h}


# --- additivity -----------------------------------------------------------------


def _tr_pair(phi):
    a, b = tr(phi), euler_trace_oracle(phi)
    return a, b


@dataclass
class AdditivityReport:
    tr_phi: object
    tr_psi: object
    tr_omega: object
    tr_psi_prime: object
    tr_omega_prime: object
    oracle_agrees: bool
    checks: dict
    witnesses: dict = field(default_factory=dict, repr=False)

    @property
    def equal(self) -> bool:
        ring_sum = self.witnesses["ring"].reduce(self.tr_phi + self.tr_omega)
        return self.tr_psi == ring_sum

    @property
    def passed(self) -> bool:
        return self.equal and self.oracle_agrees and all(self.checks.values())

    def summary(self) -> dict:
        ring = self.witnesses["ring"]
        js = ring.entry_to_json
        return {"tr_phi": js(self.tr_phi), "tr_psi": js(self.tr_psi), "tr_omega": js(self.tr_omega),
                "tr_psi_prime": js(self.tr_psi_prime), "tr_omega_prime": js(self.tr_omega_prime),
                "equal": self.equal, "oracle_agrees": self.oracle_agrees,
                "nonzero_homotopy": self.witnesses["nonzero_s"],
                "checks": dict(sorted(self.checks.items())), "pass": self.passed}


def additivity_run(ses: SemiSplitSES, phi: ChainMap, psi: ChainMap, s: Homotopy, full: bool = True) -> AdditivityReport:
    """Strictify the endomorphism square, build every witness, and compare traces.

    ``s`` must certify ``f phi ~ psi f``.  With ``full`` the evaluation-side
    squares for ``m`` are checked as well (these involve the large tensor
    complexes and dominate the cost).
    """
    st = strictify_endotriangle(ses, phi, psi, s)
    f = ses.f
    ring = ses.ring
    cn = st.cone
    cyl = st.cylinder
    checks = {}
    for k, v in st.squares_commute().items():
        checks[f"square {k}"] = v
    checks["omega' chain"] = st.omega_prime.is_chain()
    checks["psi' chain"] = st.psi_prime.is_chain()
    # cone(f) ~ G: omega = v omega' lambda
    seq = ses.sequence()
    _, eq, _, _ = seq.cone_equivalence()
    omega = eq.map @ st.omega_prime @ eq.inverse
    checks["omega chain"] = omega.is_chain()
    # Cyl ~ F carries psi' to psi up to homotopy
    tgt, frm = cyl.to_target, cyl.from_target
    checks["to_target psi' from_target = psi"] = tgt @ st.psi_prime @ frm == psi
    # theta: cone(f) -> cone(f'), theta(a, b) = (a; a, b, 0)
    th = theta_map(f, cyl)
    fp_cone = cone(cyl.f_prime)
    omega2 = block_map(fp_cone.complex, fp_cone.complex,
                       {(0, 0): st.phi.shift(1).retarget(fp_cone.complex.summands[0], fp_cone.complex.summands[0]),
                        (1, 1): st.psi_prime})
    checks["theta chain"] = th.is_chain()
    checks["theta omega' = omega'' theta"] = th @ st.omega_prime == omega2 @ th
    checks["omega'' chain"] = omega2.is_chain()
    pi = theta_inverse(f, cyl)
    checks["pi theta = id"] = pi @ th == ChainMap.identity(cn.complex)
    checks["id - theta pi = ds + sd"] = theta_homotopy(f, cyl).verify()
    if full:
        checks.update(_m_checks(st))
    tp, tp_o = _tr_pair(phi)
    tq, tq_o = _tr_pair(psi)
    to, to_o = _tr_pair(omega)
    tqp, tqp_o = _tr_pair(st.psi_prime)
    top, top_o = _tr_pair(st.omega_prime)
    agree = tp == tp_o and tq == tq_o and to == to_o and tqp == tqp_o and top == top_o
    checks["Tr(psi') = Tr(phi) + Tr(omega')"] = tqp == ring.reduce(tp + top)
    checks["Tr(psi') = Tr(psi)"] = tqp == tq
    checks["Tr(omega') = Tr(omega)"] = top == to
    wit = {"ring": ring, "strict": st, "omega": omega, "theta": th, "omega2": omega2,
           "nonzero_s": not s.is_trivial()}
    return AdditivityReport(tp, tq, to, tqp, top, agree, checks, wit)


def theta_map(f: ChainMap, cyl) -> ChainMap:
    """``cone(f) -> cone(f')``, ``(a, b) -> (a; a, b, 0)``."""
    cn = cone(f).complex
    fc = cone(cyl.f_prime).complex
    SE, F = cn.summands
    ring = f.ring
    comps = {}
    for n in cn.degrees:
        e1, fn_ = SE.rank(n), F.rank(n)
        rows = [[ring.zero] * (e1 + fn_) for _ in range(fc.rank(n))]
        for k in range(e1):
            rows[k][k] = ring.one                         # x slot
            rows[e1 + k][k] = ring.one                    # a slot of Cyl
        for k in range(fn_):
            rows[2 * e1 + k][e1 + k] = ring.one           # b slot
        comps[n] = Matrix(ring, fc.rank(n), e1 + fn_, rows)
    return ChainMap(cn, fc, comps)


def theta_inverse(f: ChainMap, cyl) -> ChainMap:
    """``(x; a, b, c) -> (x, b + f c)``."""
    cn = cone(f).complex
    fc = cone(cyl.f_prime).complex
    SE, F = cn.summands
    E = f.source
    ring = f.ring
    comps = {}
    for n in fc.degrees:
        e1, fn_, e0 = SE.rank(n), F.rank(n), E.rank(n)
        rows = [[ring.zero] * fc.rank(n) for _ in range(e1 + fn_)]
        for k in range(e1):
            rows[k][k] = ring.one
        for k in range(fn_):
            rows[e1 + k][2 * e1 + k] = ring.one
            for j in range(e0):
                rows[e1 + k][2 * e1 + fn_ + j] = f[n][k, j]
        comps[n] = Matrix(ring, e1 + fn_, fc.rank(n), rows)
    return ChainMap(fc, cn, comps)


def theta_homotopy(f: ChainMap, cyl) -> Homotopy:
    """``id - theta pi = d s + s d`` with ``s(x; a, b, c) = (0; -c, 0, 0)``."""
    th, pi = theta_map(f, cyl), theta_inverse(f, cyl)
    fc = th.target
    E = f.source
    ring = f.ring
    comps = {}
    for n in fc.degrees:
        e1n, fn_, e0 = E.rank(n + 1), cyl.complex.summands[1].rank(n), E.rank(n)
        # target degree n-1: x in E^n, a in E^n, b in F^{n-1}, c in E^{n-1}
        rows = [[ring.zero] * fc.rank(n) for _ in range(fc.rank(n - 1))]
        x_prev = E.rank(n)
        for j in range(e0):
            rows[x_prev + j][2 * e1n + fn_ + j] = ring(-1)
        comps[n] = Matrix(ring, fc.rank(n - 1), fc.rank(n), rows)
    sm = ChainMap(fc, fc, comps, -1)
    return Homotopy(ChainMap.identity(fc), th @ pi, sm)


def _m_checks(st) -> dict:
    """Evaluation-side squares for ``m = diag(1(x)phi, 1(x)psi')`` on ``cone(Dg''(x)f')``."""
    from .tc5 import build_tc5a
    from .triangulation import cone_tensor_iso
    tri = st.triangle
    fprime, gpp = tri.f, tri.g
    E, Cyl, Cn = fprime.source, fprime.target, gpp.target
    Dgpp = dual_map(gpp)
    DG, DF = dual_complex(Cn), dual_complex(Cyl)
    x0 = tensor_map(Dgpp, fprime)
    W = cone(x0)
    one = ChainMap.identity
    top = tensor_map(one(DG), st.phi).shift(1).retarget(W.complex.summands[0], W.complex.summands[0])
    m = block_map(W.complex, W.complex, {(0, 0): top, (1, 1): tensor_map(one(DF), st.psi_prime)})
    out = {"m chain": m.is_chain()}
    out["m k2 = k2 (1(x)psi')"] = m @ W.incl == W.incl @ tensor_map(one(DF), st.psi_prime)
    # k1' : cone(1(x)f') -> W  and  k3' : cone(Dg''(x)1) -> W
    c1 = cone(tensor_map(one(DG), fprime))
    k1p = block_map(c1.complex, W.complex, {(0, 0): one(c1.complex.summands[0]),
                                            (1, 1): tensor_map(Dgpp, one(Cyl))})
    m1 = block_map(c1.complex, c1.complex,
                   {(0, 0): tensor_map(one(DG), st.phi).shift(1).retarget(c1.complex.summands[0],
                                                                          c1.complex.summands[0]),
                    (1, 1): tensor_map(one(DG), st.psi_prime)})
    out["m k1' = k1' (1(x)phi-block)"] = m @ k1p == k1p @ m1
    c3 = cone(tensor_map(Dgpp, one(E)))
    k3p = block_map(c3.complex, W.complex, {(0, 0): one(c3.complex.summands[0]),
                                            (1, 1): tensor_map(one(DF), fprime)})
    # on cone(Dg''(x)1_E) the endomorphism is 1(x)phi on both blocks
    m3 = block_map(c3.complex, c3.complex,
                   {(0, 0): tensor_map(one(DG), st.phi).shift(1).retarget(c3.complex.summands[0],
                                                                          c3.complex.summands[0]),
                    (1, 1): tensor_map(one(DF), st.phi)})
    out["m k3' = k3' (1(x)phi)"] = m @ k3p == k3p @ m3
    # DG''(x)cone(f') = cone(1(x)f') carries 1(x)omega'' to m1-type block map
    iso = cone_tensor_iso(fprime, DG, side="left")
    out["TC2 iso chain"] = iso.is_chain()
    return out

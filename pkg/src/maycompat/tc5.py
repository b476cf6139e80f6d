"""Braid duality: the evaluation side, the comparison through xi, and the coevaluation side.

For ``0 -> E -f-> F -g-> G -> 0`` the apex is ``Wbar = cone(Dg (x) f)`` where
``Dg (x) f : DG (x) E -> DF (x) F``.  All splittings of derived sequences are
induced from the chosen ``(phi, psi)`` so that most comparison squares hold
on the nose.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import ChainMap, SplitSequence, cone, shift, unit_complex, whole
from .complexes import block_map
from .linalg import Matrix, try_invert
from .monoidal import coevaluation, dual_complex, dual_map, evaluation, tensor, tensor_map, xi_iso, beta_iso
from .triangulation import (DistinguishednessCertificate, TriangleIsoCertificate, _unshift_map, as_sequence,
                            build_tc3, build_tc3prime, certify_cell, dual_sequence)
from .complexes import Homotopy, HomotopyEquivalence, Triangle


def _id(C):
    return ChainMap.identity(C)


def _tm(a, b):
    return tensor_map(a, b)


@dataclass
class TC5aWitness:
    seq: SplitSequence
    Wbar: object              # Cone record of Dg (x) f
    tbar: ChainMap
    k1: ChainMap
    k2: ChainMap
    k3: ChainMap
    k1_prime: ChainMap
    k3_prime: ChainMap
    lam: ChainMap
    lam_prime: ChainMap
    q1: ChainMap
    cells: list = field(default_factory=list)
    aux: TriangleIsoCertificate | None = None

    def verify(self) -> bool:
        return (self.tbar.is_chain() and self.k1_prime.is_chain() and self.k3_prime.is_chain()
                and all(c.verify() for c in self.cells)
                and (self.aux is not None and self.aux.verify()))

    def summary(self) -> dict:
        return {"cells": [c.summary() for c in self.cells],
                "tbar_chain": self.tbar.is_chain(),
                "k1_prime_chain": self.k1_prime.is_chain(),
                "k3_prime_chain": self.k3_prime.is_chain(),
                "auxiliary_triangle": self.aux is not None and self.aux.verify(),
                "pass": self.verify()}


def build_tc5a(ses) -> TC5aWitness:
    s = as_sequence(ses)
    f, g, phi, psi = s.a, s.b, s.section, s.retraction
    E, F, G = s.X, s.V, s.Y
    DE, DF, DG = dual_complex(E), dual_complex(F), dual_complex(G)
    Dg, Df, Dphi, Dpsi = dual_map(g), dual_map(f), dual_map(phi), dual_map(psi)
    ring = E.ring
    S = unit_complex(ring)
    x0 = _tm(Dg, f)
    cn = cone(x0)
    C = cn.complex
    tF, tG, tE = evaluation(F), evaluation(G), evaluation(E)
    tbar = block_map(C, whole(S), {(0, 1): tF}).retarget(C, S)
    k2 = cn.incl
    # DG (x) G via the sequence DG(x)E -> DG(x)F -> DG(x)G
    seq1 = SplitSequence(_tm(_id(DG), f), _tm(_id(DG), g), _tm(_id(DG), phi), _tm(_id(DG), psi))
    cn1, eq1, _, _ = seq1.cone_equivalence()
    k1p = block_map(cn1.complex, C, {(0, 0): _id(cn1.complex.summands[0]), (1, 1): _tm(Dg, _id(F))})
    lam = eq1.inverse
    k1 = k1p @ lam
    # DE (x) E via DG(x)E -> DF(x)E -> DE(x)E
    seq3 = SplitSequence(_tm(Dg, _id(E)), _tm(Df, _id(E)), _tm(Dpsi, _id(E)), _tm(Dphi, _id(E)))
    cn3, eq3, _, _ = seq3.cone_equivalence()
    k3p = block_map(cn3.complex, C, {(0, 0): _id(cn3.complex.summands[0]), (1, 1): _tm(_id(DF), f)})
    lam3 = eq3.inverse
    k3 = k3p @ lam3
    q1 = block_map(C, whole(tensor(DE, F)), {(0, 1): _tm(Df, _id(F))}).retarget(C, tensor(DE, F))
    cells = [
        certify_cell("t_F (Dg(x)f) = 0", tF @ x0, ChainMap.zero(x0.source, S)),
        certify_cell("tbar k2 = t_F", tbar @ k2, tF),
        certify_cell("tbar k1 = t_G", tbar @ k1, tG),
        certify_cell("tbar k3 = t_E", tbar @ k3, tE),
        certify_cell("k1 (1(x)g) = k2 (Dg(x)1)", k1 @ _tm(_id(DG), g), k2 @ _tm(Dg, _id(F)),
                     hint=eq1.left.pre(cn1.incl).post(k1p)),
        certify_cell("k3 (Df(x)1) = k2 (1(x)f)", k3 @ _tm(Df, _id(E)), k2 @ _tm(_id(DF), f),
                     hint=eq3.left.pre(cn3.incl).post(k3p)),
    ]
    w = TC5aWitness(s, cn, tbar, k1, k2, k3, k1p, k3p, lam, lam3, q1, cells)
    w.aux = _auxiliary_triangle(s, w)
    return w


def _auxiliary_triangle(s: SplitSequence, w: TC5aWitness) -> TriangleIsoCertificate:
    """``DG(x)G -> Wbar -> DE(x)F`` is isomorphic to the quotient-apex triangle of ``(Ds, s)``."""
    br = build_tc3prime(dual_sequence(s), s)
    src = br.triangles["k1"]
    _, eqV, _, _ = br.sequences["k2"].cone_equivalence()   # Wbar -> V
    to_w = eqV.inverted()                                    # V -> Wbar
    delta = br.maps["delta1"]
    target = Triangle(w.k1, w.q1, delta)
    kV, qV = br.maps["k1"], br.maps["q1"]
    sq1 = certify_cell("lam k1V = k1", to_w.map @ kV, w.k1,
                       hint=eqV.left.pre(w.k1) if eqV.map @ w.k1 == kV else None)
    sq2 = certify_cell("q1 lam = q1V", w.q1 @ to_w.map, qV)
    X, Z = src.triangle.X, src.triangle.Z
    sq3 = certify_cell("delta = delta", delta, delta)
    ids = (HomotopyEquivalence.identity(X), to_w, HomotopyEquivalence.identity(Z))
    squares = tuple(c.homotopy if c.homotopy is not None else Homotopy(c.lhs, c.lhs) for c in (sq1, sq2, sq3))
    # squares compare u2 f with f' u1, and so on; u1, u3 are identities
    squares = (_retag(squares[0], to_w.map @ kV, w.k1 @ ids[0].map),
               _retag(squares[1], w.q1 @ to_w.map, ids[2].map @ qV),
               _retag(squares[2], ids[0].map.shift(1).retarget(shift(X, 1), shift(X, 1)) @ delta,
                      delta @ ids[2].map))
    return TriangleIsoCertificate(src, target, ids, squares)


def _retag(h: Homotopy, a: ChainMap, b: ChainMap) -> Homotopy:
    """Same homotopy data, endpoints rewritten as the (matrix-equal) composites ``a`` and ``b``."""
    return Homotopy(a, b, h.s.retarget(a.source, a.target))


# --- comparison through xi -----------------------------------------------------------------


@dataclass
class TC5bReport:
    xi_bar: ChainMap
    theta: HomotopyEquivalence
    cells: list
    xi_invertible: bool

    def verify(self) -> bool:
        return self.xi_bar.is_chain() and self.xi_invertible and all(c.verify() for c in self.cells)

    def summary(self) -> dict:
        return {"xi_bar_chain": self.xi_bar.is_chain(), "xi_bar_invertible": self.xi_invertible,
                "theta_verified": self.theta.verify(),
                "cells": [c.summary() for c in self.cells], "pass": self.verify()}


def dual_unshift_iso(X) -> ChainMap:
    """``D(Sigma^{-1} X) -> Sigma DX``, degreewise ``(-1)^n``."""
    src = dual_complex(shift(X, -1))
    tgt = shift(dual_complex(X), 1)
    return ChainMap(src, tgt, {n: Matrix.scalar(X.ring, src.rank(n), -1 if n % 2 else 1)
                               for n in src.degrees})


def check_tc5b(ses, tc5a: TC5aWitness | None = None) -> TC5bReport:
    s = as_sequence(ses)
    a = tc5a or build_tc5a(s)
    f, g = s.a, s.b
    E, F, G = s.X, s.V, s.Y
    DE, DF, DG = dual_complex(E), dual_complex(F), dual_complex(G)
    Ds = dual_sequence(s)
    W3 = build_tc3(s, Ds)
    Dgg = dual_map(_tm(g, dual_map(f)))
    C = a.Wbar.complex
    chat = cone(Dgg)
    xiGE, xiFF = xi_iso(G, E), xi_iso(F, F)
    xbar = block_map(C, chat.complex, {(0, 0): xiGE.shift(1), (1, 1): xiFF})
    inv = all(try_invert(xbar[n]) is not None for n in C.degrees) and C.ranks == chat.complex.ranks
    dseq = dual_sequence(W3.sequences["j2"])
    _, theta, _, sq_h = dseq.cone_equivalence()
    m = W3.maps
    Dj = {k: dual_map(m[k]) for k in ("j1", "j2", "j3")}
    Dp = {k: dual_map(m[k]) for k in ("p1", "p3")}
    top = theta.map @ xbar
    q3 = block_map(C, whole(tensor(DF, G)), {(0, 1): _tm(_id(DF), g)}).retarget(C, tensor(DF, G))
    q2 = a.Wbar.proj
    eps = dual_unshift_iso(tensor(G, DE))
    Dp2 = dual_map(m["p2"])
    cells = [
        certify_cell("Theta xibar k2 = D(j2) xi", top @ a.k2, Dj["j2"] @ xiFF),
        certify_cell("Theta xibar k1 = D(j3) xi", top @ a.k1, Dj["j3"] @ xi_iso(G, G)),
        certify_cell("Theta xibar k3 = D(j1) xi", top @ a.k3, Dj["j1"] @ xi_iso(E, E)),
        certify_cell("xi q1 = D(p3) Theta xibar", xi_iso(E, F) @ a.q1, Dp["p3"] @ top),
        certify_cell("xi q3 = D(p1) Theta xibar", xi_iso(F, G) @ q3, Dp["p1"] @ top),
        _q2_cell(xiGE.shift(1) @ q2, eps.retarget(Dp2.target) @ Dp2, dseq.connecting(), sq_h, xbar, top),
    ]
    for k in ("j1", "j2", "j3", "p1", "p3"):
        r = m[k]
        cells.append(certify_cell(f"DD({k}) beta = beta {k}", dual_map(dual_map(r)) @ beta_iso(r.source),
                                  beta_iso(r.target) @ r))
    return TC5bReport(xbar, theta, cells, inv)


def _q2_cell(lhs, rhs_head, h_dual, sq_h, xbar, top):
    """``proj ~ h_dual Theta`` (cone certificate) transported along ``xibar``; ``h_dual = +-rhs_head``."""
    rhs = rhs_head @ top
    hint = None
    for sg in (1, -1):
        if h_dual == (rhs_head if sg == 1 else -rhs_head).retarget(h_dual.source, h_dual.target):
            target = rhs if sg == 1 else -rhs
            hint = Homotopy(lhs, target, (sq_h.s @ xbar).retarget(lhs.source, lhs.target))
    return certify_cell("S(xi) q2 = D(p2) Theta xibar", lhs, rhs, signs=(1, -1), hint=hint, search_limit=0)


# --- coevaluation side -----------------------------------------------------------------


def check_tc5_dual(ses) -> dict:
    """``ubar = R u_F : S -> W`` for the kernel apex of ``(s, Ds)``; ``j_i ubar`` are the coevaluations."""
    s = as_sequence(ses)
    E, F, G = s.X, s.V, s.Y
    br = build_tc3(s, dual_sequence(s))
    uF = coevaluation(F)
    ubar = br.to_apex @ uF
    m = br.maps
    cells = [
        certify_cell("(g(x)Df) u_F = 0", tensor_map(s.b, dual_map(s.a)) @ uF,
                     ChainMap.zero(uF.source, tensor(G, dual_complex(E)))),
        certify_cell("j2 ubar = u_F", m["j2"] @ ubar, uF),
        certify_cell("j1 ubar = u_E", m["j1"] @ ubar, coevaluation(E)),
        certify_cell("j3 ubar = u_G", m["j3"] @ ubar, coevaluation(G)),
    ]
    return {"ubar_chain": ubar.is_chain(), "cells": [c.summary() for c in cells],
            "pass": ubar.is_chain() and all(c.verify() for c in cells)}

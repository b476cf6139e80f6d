"""Re-check the quoted block matrices of the additivity construction, verbatim and corrected.

Each entry rebuilds a matrix exactly as printed, tests it under this
package's conventions, and does the same for the corrected form actually
used.  A printed form that fails must appear in ``RECORDED_FLIPS`` (mirrored
in SIGN_AUDIT.md); anything else is an unexplained discrepancy.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import (ChainComplex, ChainMap, SemiSplitSES, block_map, cone, cylinder, is_homotopy_equivalence,
                        shift, strictify_endotriangle)
from .linalg import Matrix
from .monoidal import dual_complex, dual_map, evaluation, tensor_map
from .tc5 import build_tc5a
from .traces import theta_map

# name -> corrected form, as recorded in SIGN_AUDIT.md
RECORDED_FLIPS = {
    "cylinder differential": "[[-d_E, 0, 0], [f, d_F, 0], [-1, 0, +d_E]]",
    "omega'": "[[Sigma phi, 0], [-s, psi]]",
    "psi'": "[[Sigma phi, 0, 0], [-s, psi, 0], [0, 0, phi]]",
}


@dataclass
class AuditEntry:
    name: str
    printed: str
    printed_ok: bool
    corrected: str
    corrected_ok: bool

    @property
    def flipped(self) -> bool:
        return self.printed != self.corrected

    def summary(self) -> dict:
        return {"name": self.name, "printed": self.printed, "printed_ok": self.printed_ok,
                "corrected": self.corrected, "corrected_ok": self.corrected_ok}


def _square_zero(ring, ranks, d) -> bool:
    for n, m in d.items():
        nxt = d.get(n + 1)
        if nxt is not None and not (nxt @ m).is_zero():
            return False
    return True


def _matches(C: ChainComplex, d: dict) -> bool:
    return all(C.d(n) == m for n, m in d.items() if m.rows and m.cols)


def _cyl_differential(f: ChainMap, last_sign: int) -> dict:
    """``[[-d_E, 0, 0], [f, d_F, 0], [-1, 0, last_sign * d_E]]`` on ``E^{n+1} + F^n + E^n``."""
    E, F = f.source, f.target
    ring = f.ring
    degs = sorted(set(n - 1 for n in E.degrees) | set(F.degrees) | set(E.degrees))
    out = {}
    for n in degs:
        a0, b0, c0 = E.rank(n + 1), F.rank(n), E.rank(n)
        a1, b1, c1 = E.rank(n + 2), F.rank(n + 1), E.rank(n + 1)
        Z = Matrix.zeros
        rows = [[-E.d(n + 1), Z(ring, a1, b0), Z(ring, a1, c0)],
                [f[n + 1], F.d(n), Z(ring, b1, c0)],
                [Matrix.scalar(ring, c1, -1), Z(ring, c1, b0), E.d(n).scale(last_sign)]]
        out[n] = Matrix.block(ring, rows)
    return out


def audit_instance(ses: SemiSplitSES, phi: ChainMap, psi: ChainMap, s) -> list:
    f = ses.f
    ring = ses.ring
    E, F = ses.E, ses.F
    entries = []
    # cylinder differential
    printed_d = _cyl_differential(f, -1)
    fixed_d = _cyl_differential(f, +1)
    ranks = {n: m.cols for n, m in fixed_d.items()}
    entries.append(AuditEntry("cylinder differential", "[[-d_E, 0, 0], [f, d_F, 0], [-1, 0, -d_E]]",
                              _square_zero(ring, ranks, printed_d),
                              RECORDED_FLIPS["cylinder differential"],
                              _square_zero(ring, ranks, fixed_d) and _matches(cylinder(f).complex, fixed_d)))
    # omega' and psi' with the printed +s
    st = strictify_endotriangle(ses, phi, psi, s)
    cn, cyl = st.cone, st.cylinder
    SE = shift(E, 1)
    sphi = ChainMap(SE, SE, {n - 1: m for n, m in phi.components().items()})
    plus_s = ChainMap(SE, F, {n - 1: m for n, m in s.s.components().items()}, 0)
    om_printed = block_map(cn.complex, cn.complex, {(0, 0): sphi, (1, 0): plus_s, (1, 1): psi})
    entries.append(AuditEntry("omega'", "[[Sigma phi, 0], [s, psi]]", om_printed.is_chain(),
                              RECORDED_FLIPS["omega'"], st.omega_prime.is_chain()
                              and all(st.squares_commute().values())))
    ps_printed = block_map(cyl.complex, cyl.complex, {(0, 0): sphi, (1, 0): plus_s, (1, 1): psi, (2, 2): phi})
    entries.append(AuditEntry("psi'", "[[Sigma phi, 0, 0], [s, psi, 0], [0, 0, phi]]", ps_printed.is_chain(),
                              RECORDED_FLIPS["psi'"], st.psi_prime.is_chain()))
    # k1' = diag(1, Dg(x)1) and tbar = (0, t_F) on cone(Dg(x)f)
    w = build_tc5a(ses)
    k1_ok = w.k1_prime.is_chain()
    entries.append(AuditEntry("k1'", "[[1, 0], [0, Dg(x)1]]", k1_ok, "[[1, 0], [0, Dg(x)1]]", k1_ok))
    tb_ok = w.tbar.is_chain() and w.tbar @ w.k2 == evaluation(F)
    entries.append(AuditEntry("tbar", "(0, t_F)", tb_ok, "(0, t_F)", tb_ok))
    # m = diag(1(x)phi, 1(x)psi') on cone(Dg''(x)f') for the strict triangle
    tri = st.triangle
    Dgpp = dual_map(tri.g)
    W = cone(tensor_map(Dgpp, tri.f))
    DG, DF = dual_complex(tri.g.target), dual_complex(tri.f.target)
    top = tensor_map(ChainMap.identity(DG), phi).shift(1).retarget(W.complex.summands[0], W.complex.summands[0])
    m = block_map(W.complex, W.complex, {(0, 0): top, (1, 1): tensor_map(ChainMap.identity(DF), st.psi_prime)})
    m_ok = m.is_chain()
    entries.append(AuditEntry("m", "[[1(x)phi, 0], [0, 1(x)psi']]", m_ok, "[[1(x)phi, 0], [0, 1(x)psi']]", m_ok))
    # theta = [[id, 0], [alpha_1, alpha_2]]
    th = theta_map(f, cyl)
    th_ok = th.is_chain() and is_homotopy_equivalence(th) is not None
    entries.append(AuditEntry("theta", "[[id, 0], [alpha_1, alpha_2]]", th_ok, "[[id, 0], [alpha_1, alpha_2]]", th_ok))
    return entries


def unexplained(entries) -> list:
    """Entries whose printed form fails without a recorded flip, or whose corrected form fails."""
    bad = []
    for e in entries:
        if not e.corrected_ok:
            bad.append(e.name)
        elif not e.printed_ok and RECORDED_FLIPS.get(e.name) != e.corrected:
            bad.append(e.name)
    return bad

"""K-group descriptors for archimedean valuation rings of Q, Q(sqrt d) and Q(i).

The inputs are the unit group E = mu_F + Z^S, the homology of the cyclic group
mu_F computed from its periodic resolution, and a small table of stable stems.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .abgroup import OMEGA, AbGroupDescriptor, FiniteUnknown
from .errors import UnsupportedDegree, UnsupportedStem
from .field import FieldDescriptor, FieldKind

Z = AbGroupDescriptor.free(1)


def cyc(m: int) -> AbGroupDescriptor:
    return AbGroupDescriptor.cyclic(m)


def unit_group_structure(F: FieldDescriptor) -> tuple[int, object]:
    """(w, S): the order of the roots of unity and the free rank of the norm-one group."""
    if F.kind is FieldKind.GAUSSIAN:
        return 4, OMEGA
    return 2, 0


# ---------------------------------------------------------------------------
# homology of Z/w


def _ker_coker_mult(k: int, m: int) -> tuple[AbGroupDescriptor, AbGroupDescriptor]:
    """Kernel and cokernel of multiplication by k on Z/m (m = 0 meaning Z)."""
    if m == 0:
        if k == 0:
            return Z, Z
        return AbGroupDescriptor.trivial(), cyc(abs(k))
    g = gcd(k, m)
    return cyc(g), cyc(g)


def cyclic_homology(w: int, p: int, m: int = 0) -> AbGroupDescriptor:
    """H_p(Z/w; Z/m), with m = 0 for integer coefficients.

    The periodic resolution gives the chain complex
    M <-0- M <-w- M <-0- M <-w- ... (degree 0 on the left), where the map
    out of degree p is 0 for p odd and multiplication by w for p even > 0.
    """
    if w < 1 or p < 0 or m < 0:
        raise ValueError("need w >= 1, p >= 0, m >= 0")
    # d_p : C_p -> C_{p-1}; d_p = 0 for p odd, w for p even (p >= 2)
    def d(q: int) -> int:
        if q <= 0:
            return 0
        return 0 if q % 2 else w

    ker_dp, _ = _ker_coker_mult(d(p), m)
    # image of d_{p+1} inside ker d_p; both groups are cyclic here
    if d(p) == 0:
        # ker is all of M; H = M / (d_{p+1} M)
        _, coker = _ker_coker_mult(d(p + 1), m)
        return coker
    # d_p = w, d_{p+1} = 0: H = ker(w on M)
    return ker_dp


def order_or_none(G: AbGroupDescriptor) -> int | None:
    return G.order()


# ---------------------------------------------------------------------------
# stable stems and the E2 page


@dataclass
class StableStemTable:
    stems: dict[int, int] = field(default_factory=lambda: {0: 0, 1: 2, 2: 2})  # cyclic orders, 0 = Z

    def __post_init__(self):
        if self.stems.get(0) != 0:
            raise ValueError("the zeroth stable stem is Z")

    @property
    def qmax(self) -> int:
        q = 0
        while q + 1 in self.stems:
            q += 1
        return q

    def coefficient(self, q: int) -> int:
        if q not in self.stems:
            raise UnsupportedStem(f"stable stem {q} is not in the table (known up to {self.qmax})")
        return self.stems[q]

    def group(self, q: int) -> AbGroupDescriptor:
        return cyc(self.coefficient(q))


@dataclass(frozen=True)
class SpectralPage:
    w: int
    pmax: int
    qmax: int
    grid: dict[tuple[int, int], AbGroupDescriptor]

    def entry(self, p: int, q: int) -> AbGroupDescriptor:
        return self.grid[(p, q)]

    def to_json(self) -> dict:
        return {"w": self.w, "pmax": self.pmax, "qmax": self.qmax,
                "rows": {str(q): [str(self.grid[(p, q)]) for p in range(self.pmax + 1)]
                         for q in range(self.qmax + 1)}}

    def to_markdown(self) -> str:
        head = "| q \\ p | " + " | ".join(str(p) for p in range(self.pmax + 1)) + " |"
        sep = "|---" * (self.pmax + 2) + "|"
        lines = [head, sep]
        for q in range(self.qmax, -1, -1):
            cells = [str(self.grid[(p, q)]) for p in range(self.pmax + 1)]
            lines.append(f"| {q} | " + " | ".join(cells) + " |")
        return "\n".join(lines)


def ah_e2_page(w: int, pmax: int = 2, qmax: int = 2, stems: StableStemTable | None = None) -> SpectralPage:
    """E2_{p,q} = H_p(Z/w; pi_q^s)."""
    stems = stems or StableStemTable()
    if qmax > stems.qmax:
        raise UnsupportedStem(f"qmax={qmax} exceeds the stable stem table (up to {stems.qmax})")
    grid = {(p, q): cyclic_homology(w, p, stems.coefficient(q))
            for p in range(pmax + 1) for q in range(qmax + 1)}
    return SpectralPage(w, pmax, qmax, grid)


# ---------------------------------------------------------------------------
# K-groups


def _k2_unknown(w: int) -> FiniteUnknown:
    return FiniteUnknown((2, gcd(2, w)),
                         f"finite; filtered by subquotients of Z/2 and Z/{gcd(2, w)}; differentials unresolved")


def wedge_decompose(i: int, w: int, S) -> AbGroupDescriptor:
    """pi_i^s of B(mu_w)_+ wedge a wedge of S circles, for i <= 2."""
    stems = StableStemTable()
    if i < 0 or i > 2:
        raise UnsupportedDegree(f"degree {i} is outside 0..2")
    if i == 0:
        base = Z
    elif i == 1:
        # pi_1^s(S^0) + pi_1^s(B mu_w) = Z/2 + Z/w
        base = stems.group(1) + cyclic_homology(w, 1)
    else:
        base = AbGroupDescriptor(unknown=_k2_unknown(w))
    circles = stems.group(i - 1) if i >= 1 else AbGroupDescriptor.trivial()
    if S is OMEGA:
        return base + circles.times(OMEGA)
    return base + circles.times(S)


def k_group(F: FieldDescriptor, i: int) -> AbGroupDescriptor:
    if i < 0 or i > 2:
        raise UnsupportedDegree(f"K_{i} is not assembled (only 0 <= i <= 2)")
    if i == 0:
        return Z
    w, S = unit_group_structure(F)
    return wedge_decompose(i, w, S)

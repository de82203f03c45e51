"""Free modules over the valuation ring O of a normed field and maps between them.

O(n) is the L1 unit ball {x in K^n : sum |x_i| <= 1}.  A map O(m) -> O(n) is an
n x m matrix over K whose columns lie in O(n).  Cofibrations between free
modules are exactly the monomial matrices with norm-one entries and distinct
rows; everything here (cokernels, the unique splitting, cobase change) is
computed from that normal form.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NotAModuleVector, NotIdempotent
from .field import FieldDescriptor, FieldElement, Ordering, cmp_norm_sum, format_element, is_unit_norm


def is_module_vector(entries: Sequence[FieldElement]) -> bool:
    """True iff sum |x_i| <= 1 holds exactly."""
    return cmp_norm_sum(entries, 1) is not Ordering.GT


def is_boundary_vector(entries: Sequence[FieldElement]) -> bool:
    """True iff sum |x_i| = 1, i.e. the vector lies in E(n)."""
    return cmp_norm_sum(entries, 1) is Ordering.EQ


@dataclass(frozen=True)
class OVector:
    entries: tuple[FieldElement, ...]
    field: FieldDescriptor

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not is_module_vector(self.entries):
            raise NotAModuleVector(f"({', '.join(map(str, self.entries))}) has L1 norm > 1")

    @property
    def n(self) -> int:
        return len(self.entries)

    @classmethod
    def basis(cls, i: int, n: int, F: FieldDescriptor) -> "OVector":
        return cls(tuple(F(1) if k == i else F(0) for k in range(n)), F)

    def on_boundary(self) -> bool:
        return is_boundary_vector(self.entries)


@dataclass(frozen=True)
class KMatrix:
    """A matrix over K with no norm constraint (the base change to K)."""

    nrows: int
    ncols: int
    rows: tuple[tuple[FieldElement, ...], ...]
    field: FieldDescriptor

    def rank(self) -> int:
        return _rank([list(r) for r in self.rows], self.ncols)

    def nullspace(self) -> list[list[FieldElement]]:
        return _nullspace([list(r) for r in self.rows], self.ncols, self.field)


def _row_reduce(m: list[list[FieldElement]], ncols: int) -> list[int]:
    """In-place reduced row echelon form; returns pivot columns."""
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((k for k in range(r, len(m)) if m[k][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for k in range(len(m)):
            if k != r and m[k][c]:
                f = m[k][c]
                m[k] = [x - f * y for x, y in zip(m[k], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return pivots


def _rank(rows: list[list[FieldElement]], ncols: int) -> int:
    return len(_row_reduce([list(r) for r in rows], ncols))


def _nullspace(rows: list[list[FieldElement]], ncols: int, F: FieldDescriptor) -> list[list[FieldElement]]:
    m = [list(r) for r in rows]
    pivots = _row_reduce(m, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [F(0)] * ncols
        v[fc] = F(1)
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][fc]
        basis.append(v)
    return basis


@dataclass(frozen=True)
class OMatrix:
    """A morphism O(cols) -> O(rows), stored by columns (images of basis vectors)."""

    nrows: int
    ncols: int
    columns: tuple[tuple[FieldElement, ...], ...]
    field: FieldDescriptor

    def __post_init__(self):
        cols = tuple(tuple(c) for c in self.columns)
        object.__setattr__(self, "columns", cols)
        if len(cols) != self.ncols or any(len(c) != self.nrows for c in cols):
            raise DimensionMismatch(f"expected {self.ncols} columns of length {self.nrows}")
        for j, c in enumerate(cols):
            if not is_module_vector(c):
                raise NotAModuleVector(f"column {j + 1} ({', '.join(map(str, c))}) is not in O({self.nrows})")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[FieldElement]], F: FieldDescriptor,
                  ncols: int | None = None) -> "OMatrix":
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls(nrows, ncols, tuple(tuple(rows[r][c] for r in range(nrows)) for c in range(ncols)), F)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[FieldElement]], F: FieldDescriptor, nrows: int) -> "OMatrix":
        return cls(nrows, len(columns), tuple(tuple(c) for c in columns), F)

    @classmethod
    def identity(cls, n: int, F: FieldDescriptor) -> "OMatrix":
        return cls.from_columns([OVector.basis(i, n, F).entries for i in range(n)], F, n)

    @classmethod
    def zero(cls, nrows: int, ncols: int, F: FieldDescriptor) -> "OMatrix":
        return cls.from_columns([[F(0)] * nrows for _ in range(ncols)], F, nrows)

    def entry(self, r: int, c: int) -> FieldElement:
        return self.columns[c][r]

    @property
    def rows(self) -> list[list[FieldElement]]:
        return [[self.columns[c][r] for c in range(self.ncols)] for r in range(self.nrows)]

    def apply(self, v: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
        if len(v) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(v)} into a map from O({self.ncols})")
        out = [self.field(0)] * self.nrows
        for c, x in enumerate(v):
            if x:
                col = self.columns[c]
                out = [o + x * y for o, y in zip(out, col)]
        return tuple(out)

    def to_json(self) -> list[list[str]]:
        return [[format_element(x) for x in row] for row in self.rows]

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(map(str, r)) + "]" for r in self.rows) + "]"


def compose(A: OMatrix, B: OMatrix) -> OMatrix:
    """A o B (apply B first)."""
    if A.ncols != B.nrows:
        raise DimensionMismatch(f"cannot compose {A.nrows}x{A.ncols} with {B.nrows}x{B.ncols}")
    if A.field != B.field:
        raise DimensionMismatch("maps over different fields")
    cols = [A.apply(c) for c in B.columns]
    try:
        return OMatrix.from_columns(cols, A.field, A.nrows)
    except NotAModuleVector as exc:  # a composite of O-maps is an O-map
        raise AssertionError(f"composition left O(n): {exc}") from exc


def stack(top: OMatrix, bottom: OMatrix) -> OMatrix:
    """The map into a direct sum, (top; bottom).

    Columns are re-validated: the sum of two O-maps need not be an O-map.
    """
    if top.ncols != bottom.ncols:
        raise DimensionMismatch("stacked maps need the same source")
    return OMatrix.from_columns([t + b for t, b in zip(top.columns, bottom.columns)], top.field,
                                top.nrows + bottom.nrows)


def base_change_K(A: OMatrix) -> KMatrix:
    return KMatrix(A.nrows, A.ncols, tuple(tuple(r) for r in A.rows), A.field)


def is_monomorphism(A: OMatrix) -> bool:
    """Injective on O-points, equivalently full column rank over K."""
    return base_change_K(A).rank() == A.ncols


# ---------------------------------------------------------------------------
# cofibrations


@dataclass(frozen=True)
class CofibCertificate:
    """Monomial normal form of a cofibration O(n_from) >-> O(n_to).

    Basis vector i goes to units[i] * e_{col_to_row[i]}.  Indices are 0-based
    here and 1-based in ``to_json``.
    """

    n_from: int
    n_to: int
    col_to_row: tuple[int, ...]
    units: tuple[FieldElement, ...]
    field: FieldDescriptor

    def __post_init__(self):
        object.__setattr__(self, "col_to_row", tuple(self.col_to_row))
        object.__setattr__(self, "units", tuple(self.units))
        if len(self.col_to_row) != self.n_from or len(self.units) != self.n_from:
            raise DimensionMismatch("certificate length differs from the source rank")
        if len(set(self.col_to_row)) != self.n_from or any(not 0 <= r < self.n_to for r in self.col_to_row):
            raise ValueError(f"column-to-row map {self.col_to_row} is not injective into {self.n_to} rows")
        if not all(is_unit_norm(u) for u in self.units):
            raise ValueError("certificate units must have norm 1")

    @property
    def complement_rows(self) -> tuple[int, ...]:
        hit = set(self.col_to_row)
        return tuple(r for r in range(self.n_to) if r not in hit)

    def to_matrix(self) -> OMatrix:
        F = self.field
        cols = []
        for r, u in zip(self.col_to_row, self.units):
            col = [F(0)] * self.n_to
            col[r] = u
            cols.append(col)
        return OMatrix.from_columns(cols, F, self.n_to)

    def to_json(self) -> dict:
        return {"from": self.n_from, "to": self.n_to,
                "cols": [{"row": r + 1, "unit": format_element(u)} for r, u in zip(self.col_to_row, self.units)]}

    @classmethod
    def identity(cls, n: int, F: FieldDescriptor) -> "CofibCertificate":
        return cls(n, n, tuple(range(n)), tuple(F(1) for _ in range(n)), F)


@dataclass(frozen=True)
class Refusal:
    """Why a matrix is not a cofibration (or not an automorphism)."""

    reason: str  # NotMono | NonUnitEntry | MultipleEntries | SharedRow | NotSquare
    row: int | None = None
    col: int | None = None

    def to_json(self) -> dict:
        out: dict = {"reason": self.reason}
        if self.row is not None:
            out["row"] = self.row + 1
        if self.col is not None:
            out["col"] = self.col + 1
        return out

    def __str__(self) -> str:
        where = []
        if self.row is not None:
            where.append(f"row {self.row + 1}")
        if self.col is not None:
            where.append(f"column {self.col + 1}")
        return self.reason + (f" ({', '.join(where)})" if where else "")


def is_cofibration(A: OMatrix) -> CofibCertificate | Refusal:
    if not is_monomorphism(A):
        return Refusal("NotMono")
    rows: list[int] = []
    units: list[FieldElement] = []
    for c, col in enumerate(A.columns):
        nonzero = [r for r, x in enumerate(col) if x]
        for r in nonzero:
            if not is_unit_norm(col[r]):
                return Refusal("NonUnitEntry", row=r, col=c)
        if len(nonzero) != 1:
            # unreachable for valid columns: a norm-one entry exhausts the L1 budget
            return Refusal("MultipleEntries", col=c)
        rows.append(nonzero[0])
        units.append(col[nonzero[0]])
    seen: dict[int, int] = {}
    for c, r in enumerate(rows):
        if r in seen:
            return Refusal("SharedRow", row=r, col=c)
        seen[r] = c
    return CofibCertificate(A.ncols, A.nrows, tuple(rows), tuple(units), A.field)


@dataclass(frozen=True)
class Cokernel:
    rank: int
    projection: OMatrix


def cokernel(c: CofibCertificate) -> Cokernel:
    """Projection onto the complement rows, taken in increasing order."""
    F = c.field
    comp = c.complement_rows
    k = len(comp)
    cols = []
    for r in range(c.n_to):
        col = [F(0)] * k
        if r in comp:
            col[comp.index(r)] = F(1)
        cols.append(col)
    return Cokernel(k, OMatrix.from_columns(cols, F, k))


def standard_inclusion(m: int, n: int, F: FieldDescriptor) -> OMatrix:
    """O(m) -> O(n) onto the first m coordinates."""
    return OMatrix.from_columns([OVector.basis(i, n, F).entries for i in range(m)], F, n)


def standard_projection(m: int, n: int, F: FieldDescriptor) -> OMatrix:
    """O(n) = O(m) + O(n - m) -> O(n - m)."""
    k = n - m
    cols = [[F(0)] * k for _ in range(m)]
    cols += [OVector.basis(i, k, F).entries for i in range(k)]
    return OMatrix.from_columns(cols, F, k)


def splitting_iso(c: CofibCertificate) -> OMatrix:
    """The isomorphism O(n) -> O(n') + O(n - n') making both squares commute.

    e_{J(i)} goes to (units[i]^-1 e_i, 0) and the k-th complement row to (0, e_k).
    """
    F = c.field
    n, m = c.n_to, c.n_from
    cols: list[list[FieldElement]] = [[] for _ in range(n)]
    for i, (r, u) in enumerate(zip(c.col_to_row, c.units)):
        col = [F(0)] * n
        col[i] = u.inverse()
        cols[r] = col
    for k, r in enumerate(c.complement_rows):
        cols[r] = list(OVector.basis(m + k, n, F).entries)
    return OMatrix.from_columns(cols, F, n)


def splitting_commutes(c: CofibCertificate, phi: OMatrix) -> bool:
    """phi o f = incl and proj o phi = pi, checked as exact matrix identities."""
    F = c.field
    return (compose(phi, c.to_matrix()) == standard_inclusion(c.n_from, c.n_to, F)
            and compose(standard_projection(c.n_from, c.n_to, F), phi) == cokernel(c).projection)


def monomial_matrices(n: int, units: Sequence[FieldElement], F: FieldDescriptor) -> Iterable[OMatrix]:
    """All n x n monomial matrices with entries from ``units``, i.e. E wr S_n for finite E."""
    for perm in itertools.permutations(range(n)):
        for us in itertools.product(units, repeat=n):
            yield CofibCertificate(n, n, perm, us, F).to_matrix()


def find_splittings(c: CofibCertificate, units: Sequence[FieldElement]) -> list[OMatrix]:
    """Every automorphism of O(n) with entries in ``units`` that splits c (exhaustive).

    Candidates are kept in monomial form, phi(e_k) = us[k] e_{perm[k]}, and
    both squares are checked column by column against the inclusion and the
    cokernel projection before any matrix is built.
    """
    F = c.field
    n, m = c.n_to, c.n_from
    zero = F(0)
    incl = standard_inclusion(m, n, F).columns
    proj_cols = cokernel(c).projection.columns
    # columns of f are sparse: f(e_i) = units[i] e_{J(i)}
    out = []
    for perm in itertools.permutations(range(n)):
        # proj o phi = pi on e_k: phi(e_k) lands in coordinate perm[k]; proj keeps coordinates >= m
        if any((perm[k] >= m) != any(proj_cols[k]) for k in range(n)):
            continue
        for us in itertools.product(units, repeat=n):
            ok = True
            for i, (r, u) in enumerate(zip(c.col_to_row, c.units)):
                col = [zero] * n
                col[perm[r]] = us[r] * u
                if tuple(col) != incl[i]:
                    ok = False
                    break
            if ok:
                for k in range(n):
                    col = [zero] * (n - m)
                    if perm[k] >= m:
                        col[perm[k] - m] = us[k]
                    if tuple(col) != proj_cols[k]:
                        ok = False
                        break
            if ok:
                out.append(CofibCertificate(n, n, perm, us, F).to_matrix())
    return out


def is_strict_mono(c: CofibCertificate) -> bool:
    """Kernel over K of the cokernel projection equals the image of the cofibration."""
    A = base_change_K(c.to_matrix())
    N = cokernel(c).projection
    null = base_change_K(N).nullspace()
    if len(null) != A.ncols:
        return False
    joined = [list(A.rows[r]) + [v[r] for v in null] for r in range(c.n_to)]
    return _rank(joined, A.ncols + len(null)) == A.ncols == A.rank()


# ---------------------------------------------------------------------------
# cobase change


@dataclass(frozen=True)
class Pushout:
    """Cobase change of iota: M' >-> M along f: M' -> N.

    ``cofib`` is N >-> N + M'' (standard inclusion) and ``attach`` is the
    canonical map M -> N + M'', i.e. (f o psi ; pi) where psi is the first
    block of the splitting.
    """

    iota: CofibCertificate
    f: OMatrix
    cofib: CofibCertificate
    attach: OMatrix

    def square_commutes(self) -> bool:
        return compose(self.attach, self.iota.to_matrix()) == compose(self.cofib.to_matrix(), self.f)

    def mediating(self, g: OMatrix, h: OMatrix) -> OMatrix:
        """The map u: N + M'' -> X with u o cofib = g and u o attach = h.

        Requires g o f = h o iota; u is (g | h restricted to the complement rows).
        """
        if compose(g, self.f) != compose(h, self.iota.to_matrix()):
            raise ValueError("the cocone does not commute: g o f != h o iota")
        cols = list(g.columns) + [h.columns[r] for r in self.iota.complement_rows]
        return OMatrix.from_columns(cols, g.field, g.nrows)

    def check_universal(self, g: OMatrix, h: OMatrix) -> bool:
        u = self.mediating(g, h)
        return compose(u, self.cofib.to_matrix()) == g and compose(u, self.attach) == h


def pushout(iota: CofibCertificate, f: OMatrix) -> Pushout:
    if f.ncols != iota.n_from:
        raise DimensionMismatch(f"f starts at O({f.ncols}) but iota starts at O({iota.n_from})")
    F = iota.field
    m = f.nrows
    k = iota.n_to - iota.n_from
    phi = splitting_iso(iota)
    psi = OMatrix.from_columns([col[:iota.n_from] for col in phi.columns], F, iota.n_from)
    attach = stack(compose(f, psi), cokernel(iota).projection)
    cofib = CofibCertificate(m, m + k, tuple(range(m)), tuple(F(1) for _ in range(m)), F)
    po = Pushout(iota, f, cofib, attach)
    if not po.square_commutes():
        raise AssertionError("pushout square does not commute")
    return po


# ---------------------------------------------------------------------------
# automorphisms and projectives


def is_automorphism(A: OMatrix):
    """Wreath decomposition (units, permutation) of A, or a Refusal."""
    from .wreath import WreathElement

    if A.nrows != A.ncols:
        return Refusal("NotSquare")
    cert = is_cofibration(A)
    if isinstance(cert, Refusal):
        return cert
    return WreathElement(cert.units, cert.col_to_row)


@dataclass(frozen=True)
class ProjectiveModule:
    """The image of an idempotent endomorphism of O(n)."""

    idempotent: OMatrix

    def __post_init__(self):
        e = self.idempotent
        if e.nrows != e.ncols or compose(e, e) != e:
            raise NotIdempotent("projective modules are given by idempotent square matrices")

    @property
    def ambient_rank(self) -> int:
        return self.idempotent.nrows


def k0_class(P: ProjectiveModule) -> int:
    """Image of [P] under base change to K, K_0(K) = Z: the rank of the idempotent."""
    return base_change_K(P.idempotent).rank()

"""The residue field F_inf: faces of the octahedron and projective modules over it.

A face of the n-octahedron is a sign vector in {-1, 0, +1}^n; the zero vector
is the basepoint.  A map F_inf(m) -> F_inf(n) is a sign matrix whose columns
are the images of the basis faces.  Evaluation goes through barycentric lifts:
lift the argument and every column to the L1 sphere with equal weights on the
support, multiply, and read off signs.  A product that lands strictly inside
the unit ball represents the basepoint, since F_inf is Z_(inf) modulo its open
unit ball.

Module structure on a subset of faces is negation plus the binary join
``x v z``: the union of the two faces when both are nonzero and their signs
agree, and the basepoint otherwise.  Every n-ary operation is an iterate of
these, which is what the congruence closure in :func:`verify_ses` uses.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form

from .abgroup import AbGroupDescriptor
from .errors import BudgetExceeded, DimensionMismatch, NormalFormFailure, NotIdempotent

Face = tuple[int, ...]
FACE_BUDGET_N = 12


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def enumerate_faces(n: int) -> list[Face]:
    if n > FACE_BUDGET_N:
        raise BudgetExceeded(f"3^{n} faces exceed the budget (n <= {FACE_BUDGET_N})")
    return list(itertools.product((-1, 0, 1), repeat=n))


def zero_face(n: int) -> Face:
    return (0,) * n


def support(f: Face) -> frozenset[int]:
    return frozenset(k for k, s in enumerate(f) if s)


def project(v: Sequence) -> Face:
    """Componentwise sign of a vector with rational (or real) entries."""
    return tuple(_sign(x) for x in v)


def barycentric_lift(f: Face) -> tuple[Fraction, ...]:
    k = len(support(f))
    if k == 0:
        return tuple(Fraction(0) for _ in f)
    return tuple(Fraction(s, k) for s in f)


def negate(f: Face) -> Face:
    return tuple(-s for s in f)


def join(x: Face, z: Face) -> Face:
    """The binary operation with barycentric weights (1/2, 1/2)."""
    if not any(x) or not any(z):
        return zero_face(len(x))
    out = []
    for a, b in zip(x, z):
        if a and b and a != b:
            return zero_face(len(x))
        out.append(a or b)
    return tuple(out)


def format_face(f: Face) -> str:
    return "".join("+" if s > 0 else "-" if s < 0 else "0" for s in f)


@dataclass(frozen=True)
class SignMatrix:
    """Sign pattern of a map F_inf(ncols) -> F_inf(nrows); rows[r][c]."""

    rows: tuple[tuple[int, ...], ...]
    ncols: int = -1

    def __post_init__(self):
        rows = tuple(tuple(int(s) for s in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        width = len(rows[0]) if rows else max(self.ncols, 0)
        if self.ncols < 0:
            object.__setattr__(self, "ncols", width)
        if any(len(r) != self.ncols for r in rows):
            raise DimensionMismatch("ragged sign matrix")
        if any(s not in (-1, 0, 1) for r in rows for s in r):
            raise ValueError("sign entries must be -1, 0 or +1")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @classmethod
    def from_columns(cls, columns: Sequence[Face], nrows: int | None = None) -> "SignMatrix":
        nrows = len(columns[0]) if nrows is None else nrows
        return cls(tuple(tuple(c[r] for c in columns) for r in range(nrows)), len(columns))

    @classmethod
    def identity(cls, n: int) -> "SignMatrix":
        return cls(tuple(tuple(int(r == c) for c in range(n)) for r in range(n)), n)

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "SignMatrix":
        return cls(tuple((0,) * ncols for _ in range(nrows)), ncols)

    def column(self, c: int) -> Face:
        return tuple(r[c] for r in self.rows)

    def columns(self) -> list[Face]:
        return [self.column(c) for c in range(self.ncols)]

    def column_support(self, c: int) -> frozenset[int]:
        return support(self.column(c))

    def delete(self, k: int) -> "SignMatrix":
        """Remove row k and column k."""
        return SignMatrix(tuple(tuple(s for c, s in enumerate(r) if c != k)
                                for i, r in enumerate(self.rows) if i != k), self.ncols - 1)

    def conjugate_by_signs(self, p: Sequence[int]) -> "SignMatrix":
        """P A P for the diagonal sign matrix P = diag(p)."""
        return SignMatrix(tuple(tuple(p[r] * s * p[c] for c, s in enumerate(row))
                                for r, row in enumerate(self.rows)), self.ncols)

    def to_json(self) -> list[str]:
        return [format_face(r) for r in self.rows]

    def __str__(self) -> str:
        return ",".join(self.to_json())


def apply_map(A: SignMatrix, f: Face) -> Face:
    """Evaluate A on a face through barycentric lifts, collapsing the open ball."""
    if len(f) != A.ncols:
        raise DimensionMismatch(f"face of length {len(f)} for a map with {A.ncols} columns")
    v = barycentric_lift(f)
    lifts = [barycentric_lift(A.column(c)) for c in range(A.ncols)]
    out = [sum((lifts[c][r] * v[c] for c in range(A.ncols) if v[c]), Fraction(0))
           for r in range(A.nrows)]
    if sum(abs(x) for x in out) != 1:
        return zero_face(A.nrows)
    return project(out)


apply_projector = apply_map


def is_idempotent_projector(A: SignMatrix) -> bool:
    if A.nrows != A.ncols:
        return False
    return all(apply_map(A, a) == a for a in A.columns())


@dataclass(frozen=True)
class FaceModule:
    ambient: int
    elements: frozenset[Face]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "elements", frozenset(self.elements))
        if zero_face(self.ambient) not in self.elements:
            raise ValueError("a face module contains the basepoint")

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, f: Face) -> bool:
        return f in self.elements

    def sorted_elements(self) -> list[Face]:
        return sorted(self.elements)

    def is_closed(self) -> bool:
        els = self.elements
        return all(negate(x) in els for x in els) and all(join(x, z) in els for x in els for z in els)

    def to_json(self) -> dict:
        return {"ambient": self.ambient, "size": len(self),
                "elements": [format_face(f) for f in self.sorted_elements()]}


def module_image(A: SignMatrix, name: str = "") -> FaceModule:
    if not is_idempotent_projector(A):
        raise NotIdempotent(f"{A} does not fix its own columns")
    return FaceModule(A.nrows, frozenset(apply_map(A, f) for f in enumerate_faces(A.ncols)), name)


def free_module(n: int) -> FaceModule:
    return FaceModule(n, frozenset(enumerate_faces(n)), "F_inf" if n == 1 else f"F_inf({n})")


# ---------------------------------------------------------------------------
# maps and short exact sequences


@dataclass(frozen=True)
class FaceMap:
    """A composite of sign matrices; ``stages[0]`` is applied first."""

    stages: tuple[SignMatrix, ...]

    def __call__(self, f: Face) -> Face:
        for A in self.stages:
            f = apply_map(A, f)
        return f

    @classmethod
    def of(cls, *stages: SignMatrix) -> "FaceMap":
        return cls(tuple(stages))

    def to_json(self) -> list[list[str]]:
        return [A.to_json() for A in self.stages]


@dataclass(frozen=True)
class SesCheck:
    ok: bool
    failure: str | None = None
    detail: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        out = {"ok": self.ok}
        if self.failure:
            out["failure"] = self.failure
            out["detail"] = self.detail
        return out


def congruence_classes(M: FaceModule, seed: Iterable[Face]) -> list[frozenset[Face]]:
    """Smallest module congruence on M identifying everything in ``seed``."""
    parent = {x: x for x in M.elements}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b) -> bool:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
        return True

    seed = list(seed)
    for a in seed[1:]:
        union(seed[0], a)
    els = sorted(M.elements)
    changed = True
    while changed:
        changed = False
        for x in els:
            for y in els:
                if x >= y or find(x) != find(y):
                    continue
                changed |= union(negate(x), negate(y))
                for z in els:
                    changed |= union(join(x, z), join(y, z))
    classes: dict[Face, set[Face]] = {}
    for x in els:
        classes.setdefault(find(x), set()).add(x)
    return sorted((frozenset(c) for c in classes.values()), key=lambda c: min(c))


def verify_ses(mono: FaceMap, epi: FaceMap, M1: FaceModule, M: FaceModule, M2: FaceModule) -> SesCheck:
    """Check that M1 >-> M ->> M2 is a cofibration sequence of finite carriers.

    mono must be injective into M, epi must map M onto M2, and the fibers of
    epi must be exactly the classes of the congruence generated by the image
    of mono (the quotient M / M1).
    """
    image = {}
    for x in M1.sorted_elements():
        y = mono(x)
        if y not in M:
            return SesCheck(False, "mono leaves the module", {"x": format_face(x), "image": format_face(y)})
        if y in image:
            return SesCheck(False, "mono not injective",
                            {"x": format_face(x), "y": format_face(image[y]), "image": format_face(y)})
        image[y] = x
    fibers: dict[Face, set[Face]] = {}
    for x in M.sorted_elements():
        y = epi(x)
        if y not in M2:
            return SesCheck(False, "epi leaves the target", {"x": format_face(x), "image": format_face(y)})
        fibers.setdefault(y, set()).add(x)
    missing = M2.elements - fibers.keys()
    if missing:
        return SesCheck(False, "epi not surjective", {"missed": format_face(min(missing))})
    want = {frozenset(c) for c in fibers.values()}
    got = set(congruence_classes(M, image))
    if want != got:
        bad = min(min(c) for c in want.symmetric_difference(got))
        return SesCheck(False, "fibers of epi differ from the quotient by the image of mono",
                        {"witness": format_face(bad)})
    return SesCheck(True)


def module_isomorphism(M: FaceModule, N: FaceModule, bijection: dict[Face, Face]) -> bool:
    """Is the given carrier bijection compatible with negation and join?"""
    if set(bijection) != set(M.elements) or set(bijection.values()) != set(N.elements):
        return False
    if len(set(bijection.values())) != len(bijection):
        return False
    for x in M.elements:
        if bijection[negate(x)] != negate(bijection[x]):
            return False
        for z in M.elements:
            if bijection[join(x, z)] != join(bijection[x], bijection[z]):
                return False
    return True


# ---------------------------------------------------------------------------
# K_0 bookkeeping


@dataclass(frozen=True)
class Relation:
    """[whole] = [sub] + [quotient], witnessed by a checked exact sequence."""

    whole: str
    sub: str
    quotient: str
    mono: FaceMap
    epi: FaceMap
    check: SesCheck

    def to_json(self) -> dict:
        return {"relation": f"[{self.whole}] = [{self.sub}] + [{self.quotient}]",
                "mono": self.mono.to_json(), "epi": self.epi.to_json(), "check": self.check.to_json()}


@dataclass
class K0Ledger:
    """Classes of face modules with witnessed relations among them.

    ``relations`` come from exact sequences; ``reductions`` record traces
    showing [M] = k [F_inf].
    """

    relations: list[Relation] = field(default_factory=list)
    modules: dict[str, FaceModule] = field(default_factory=dict)
    reductions: dict[str, "ReductionTrace"] = field(default_factory=dict)

    def add_module(self, name: str, M: FaceModule):
        self.modules[name] = M

    def record(self, whole: str, sub: str, quotient: str, mono: FaceMap, epi: FaceMap) -> Relation:
        chk = verify_ses(mono, epi, self.modules[sub], self.modules[whole], self.modules[quotient])
        rel = Relation(whole, sub, quotient, mono, epi, chk)
        self.relations.append(rel)
        return rel

    def record_reduction(self, name: str, trace: "ReductionTrace"):
        self.reductions[name] = trace

    def all_verified(self) -> bool:
        return all(r.check.ok for r in self.relations)

    def quotient_group(self) -> AbGroupDescriptor:
        """Free abelian group on the recorded modules modulo all relations."""
        names = sorted(self.modules)
        idx = {m: k for k, m in enumerate(names)}
        rows = []
        for r in self.relations:
            row = [0] * len(names)
            row[idx[r.whole]] += 1
            row[idx[r.sub]] -= 1
            row[idx[r.quotient]] -= 1
            rows.append(row)
        for name, trace in self.reductions.items():
            row = [0] * len(names)
            row[idx[name]] += 1
            row[idx["F_inf"]] -= trace.copies
            rows.append(row)
        return group_from_relations(len(names), rows)

    def to_json(self) -> dict:
        return {"modules": {k: v.to_json() for k, v in sorted(self.modules.items())},
                "relations": [r.to_json() for r in self.relations],
                "reductions": {k: f"[{k}] = {t.copies}[F_inf]" for k, t in sorted(self.reductions.items())}}


def group_from_relations(ngens: int, rows: list[list[int]]) -> AbGroupDescriptor:
    """Z^ngens modulo the row span, via Smith normal form."""
    if not rows:
        return AbGroupDescriptor.free(ngens)
    D = smith_normal_form(Matrix(rows))
    diag = [abs(int(D[k, k])) for k in range(min(D.shape))]
    nonzero = [d for d in diag if d]
    free = ngens - len(nonzero)
    return AbGroupDescriptor(free_rank=free, torsion=tuple(d for d in nonzero if d > 1))


P_PROJECTOR = SignMatrix(((1, 0), (1, 1)))  # columns (+,+) and (0,+)


def k0_f_infinity() -> tuple[AbGroupDescriptor, K0Ledger]:
    """K_0 of F_inf from the two sequences through P and the splitting of F_inf(2)."""
    ledger = K0Ledger()
    ledger.add_module("F_inf", free_module(1))
    ledger.add_module("F_inf(2)", free_module(2))
    ledger.add_module("P", module_image(P_PROJECTOR, "P"))
    diag = SignMatrix.from_columns([(1, 1)])
    # F_inf -> F_inf(2) -> P, then P ->> F_inf onto the second coordinate
    ledger.record("P", "F_inf", "F_inf", FaceMap.of(diag, P_PROJECTOR), FaceMap.of(SignMatrix(((0, 1),))))
    # P inside F_inf(2), quotient spanned by e_1
    ledger.record("F_inf(2)", "P", "F_inf", FaceMap.of(SignMatrix.identity(2)), FaceMap.of(SignMatrix(((1, 0),))))
    ledger.record_reduction("F_inf(2)", k0_reduce(SignMatrix.identity(2)))
    for r in ledger.relations:
        if not r.check.ok:
            raise AssertionError(f"witness failed for {r.to_json()['relation']}: {r.check.failure}")
    return ledger.quotient_group(), ledger


# ---------------------------------------------------------------------------
# reduction of an idempotent to copies of F_inf


@dataclass(frozen=True)
class ReductionStep:
    kind: str  # "sign-conjugation" | "eliminate-generator" | "peel"
    before: SignMatrix
    after: SignMatrix
    index: int | None
    witness: dict

    def to_json(self) -> dict:
        out = {"kind": self.kind, "before": self.before.to_json(), "after": self.after.to_json(),
               "witness": self.witness}
        if self.index is not None:
            out["index"] = self.index + 1
        return out


@dataclass(frozen=True)
class ReductionTrace:
    start: SignMatrix
    steps: tuple[ReductionStep, ...]
    copies: int  # [M] = copies * [F_inf]

    def to_json(self) -> dict:
        return {"start": self.start.to_json(), "steps": [s.to_json() for s in self.steps],
                "class": f"{self.copies}[F_inf]"}


def _forget(f: Face, k: int) -> Face:
    return f[:k] + f[k + 1:]


def _sign_normalizer(A: SignMatrix) -> list[int] | None:
    """Signs p making the widest column agree in sign with its diagonal entry."""
    best = max(range(A.ncols), key=lambda c: (len(A.column_support(c)), -c))
    col = A.column(best)
    d = col[best]
    if not d:
        return None
    p = [(-1 if s and s != d and k != best else 1) for k, s in enumerate(col)]
    return p if any(x < 0 for x in p) else None


def _try_eliminate(A: SignMatrix, M: FaceModule) -> tuple[SignMatrix, int, FaceModule] | None:
    """Drop a coordinate k when forgetting it is a module isomorphism onto the smaller image."""
    for k in range(A.nrows):
        B = A.delete(k)
        if not is_idempotent_projector(B):
            continue
        N = module_image(B)
        bij = {x: _forget(x, k) for x in M.elements}
        if len(set(bij.values())) == len(bij) and module_isomorphism(M, N, bij):
            return B, k, N
    return None


def _single_entry_row(A: SignMatrix) -> int | None:
    for k, row in enumerate(A.rows):
        if row[k] and sum(1 for s in row if s) == 1:
            return k
    return None


def k0_reduce(A: SignMatrix) -> ReductionTrace:
    if not is_idempotent_projector(A):
        raise NotIdempotent(f"{A} does not fix its own columns")
    start = A
    steps: list[ReductionStep] = []
    copies = 0
    normalized = False
    while A.nrows:
        M = module_image(A)
        if len(M) == 1:
            # the zero module: every remaining generator is redundant
            B = A.delete(A.nrows - 1)
            steps.append(ReductionStep("eliminate-generator", A, B, A.nrows - 1, {"zero_module": True}))
            A = B
            continue
        if not normalized:
            normalized = True
            p = _sign_normalizer(A)
            if p is not None:
                B = A.conjugate_by_signs(p)
                N = module_image(B)
                bij = {x: tuple(s * q for s, q in zip(x, p)) for x in M.elements}
                ok = module_isomorphism(M, N, bij)
                if not ok:
                    raise AssertionError("sign conjugation did not give an isomorphic module")
                steps.append(ReductionStep("sign-conjugation", A, B, None,
                                           {"signs": format_face(p), "isomorphism": ok}))
                A, M = B, N
        k = _single_entry_row(A)
        if k is not None:
            B = A.delete(k)
            N = module_image(B)
            mono = FaceMap.of(SignMatrix.from_columns([A.column(k)]))
            rho = SignMatrix(tuple(tuple(int(c == (r if r < k else r + 1)) for c in range(A.nrows))
                                   for r in range(A.nrows - 1)), A.nrows)
            chk = verify_ses(mono, FaceMap.of(rho), free_module(1), M, N)
            if not chk.ok:
                raise NormalFormFailure(f"peeling row {k + 1} of {A} failed: {chk.failure}")
            steps.append(ReductionStep("peel", A, B, k, {"mono": mono.to_json(), "epi": [rho.to_json()],
                                                         "check": chk.to_json()}))
            copies += 1
            A = B
            continue
        found = _try_eliminate(A, M)
        if found is None:
            raise NormalFormFailure(f"no single-entry row and no redundant generator in {A}")
        B, k, _ = found
        steps.append(ReductionStep("eliminate-generator", A, B, k, {"isomorphism": "forget coordinate"}))
        A = B
    return ReductionTrace(start, tuple(steps), copies)


def idempotent_sign_matrices(n: int) -> Iterable[SignMatrix]:
    for flat in itertools.product((-1, 0, 1), repeat=n * n):
        A = SignMatrix(tuple(flat[r * n:(r + 1) * n] for r in range(n)), n)
        if is_idempotent_projector(A):
            yield A

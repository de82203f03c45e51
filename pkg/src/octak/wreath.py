"""GL_n(O) = E wr S_n: the group law, abelianization, and brute-force checks.

An element is a pair (units, perm) acting on basis vectors by
e_k -> units[k] * e_{perm[k]}, so it is the monomial matrix with entry
units[k] at (perm[k], k).  With this convention multiplication is matrix
multiplication: (g h)(e_k) = g(units_h[k] e_{perm_h[k]}).

The enumeration helpers work on finite cyclic E = mu_w, encoding a unit by its
exponent against a fixed generator.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .abgroup import AbGroupDescriptor, invariants_from_counts
from .errors import BudgetExceeded, DimensionMismatch
from .field import QQ, QQ_I, FieldElement, require_unit

DEFAULT_BUDGET = 10 ** 6


def parity(perm: Sequence[int]) -> int:
    """0 for even, 1 for odd permutations."""
    seen = [False] * len(perm)
    swaps = 0
    for start in range(len(perm)):
        if seen[start]:
            continue
        k = start
        length = 0
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        swaps += length - 1
    return swaps % 2


@dataclass(frozen=True)
class WreathElement:
    units: tuple[FieldElement, ...]
    perm: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "units", tuple(self.units))
        object.__setattr__(self, "perm", tuple(self.perm))
        if sorted(self.perm) != list(range(len(self.perm))) or len(self.units) != len(self.perm):
            raise ValueError("perm must be a permutation of 0..n-1 matching the units")
        for u in self.units:
            require_unit(u)

    @property
    def n(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, n: int, F=QQ) -> "WreathElement":
        return cls(tuple(F(1) for _ in range(n)), tuple(range(n)))

    @classmethod
    def transposition(cls, i: int, j: int, n: int, F=QQ) -> "WreathElement":
        p = list(range(n))
        p[i], p[j] = p[j], p[i]
        return cls(tuple(F(1) for _ in range(n)), tuple(p))

    @classmethod
    def diagonal(cls, units: Sequence[FieldElement]) -> "WreathElement":
        return cls(tuple(units), tuple(range(len(units))))

    def to_matrix(self):
        from .omod import CofibCertificate

        F = self.units[0].field if self.units else QQ
        return CofibCertificate(self.n, self.n, self.perm, self.units, F).to_matrix()

    def stabilize(self, extra: int = 1) -> "WreathElement":
        """g + id in GL_{n + extra}."""
        F = self.units[0].field if self.units else QQ
        return WreathElement(self.units + tuple(F(1) for _ in range(extra)),
                             self.perm + tuple(range(self.n, self.n + extra)))


def multiply(g: WreathElement, h: WreathElement) -> WreathElement:
    if g.n != h.n:
        raise DimensionMismatch(f"GL_{g.n} and GL_{h.n}")
    return WreathElement(tuple(g.units[h.perm[k]] * h.units[k] for k in range(h.n)),
                         tuple(g.perm[h.perm[k]] for k in range(h.n)))


def invert(g: WreathElement) -> WreathElement:
    inv = [0] * g.n
    for k, p in enumerate(g.perm):
        inv[p] = k
    # g^-1(e_{perm[k]}) = units[k]^-1 e_k
    return WreathElement(tuple(g.units[inv[j]].inverse() for j in range(g.n)), tuple(inv))


@dataclass(frozen=True)
class AbImage:
    unit_product: FieldElement
    parity: int


def abelianize(g: WreathElement) -> AbImage:
    """(prod of units, parity of the permutation)."""
    F = g.units[0].field if g.units else QQ
    prod = F(1)
    for u in g.units:
        prod = prod * u
    return AbImage(prod, parity(g.perm))


# ---------------------------------------------------------------------------
# compact elements over mu_w for enumeration

Compact = tuple[tuple[int, ...], tuple[int, ...]]  # (perm, exponents)


def cyclic_units(w: int) -> list[FieldElement]:
    """mu_w inside a supported field, generator first after 1."""
    if w == 1:
        return [QQ(1)]
    if w == 2:
        return [QQ(1), QQ(-1)]
    if w == 4:
        return [QQ_I(1), QQ_I(0, 1), QQ_I(-1), QQ_I(0, -1)]
    raise ValueError(f"mu_{w} is not contained in Q or Q(i)")


class FiniteGroupTable:
    """A finite subgroup of mu_w wr S_n, held as a set of compact elements."""

    def __init__(self, n: int, w: int, elements: Iterable[Compact], generators: Sequence[Compact]):
        self.n = n
        self.w = w
        self.elements = sorted(elements)
        self.members = frozenset(self.elements)
        self.generators = list(generators)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> Compact:
        return (tuple(range(self.n)), (0,) * self.n)

    def mul(self, g: Compact, h: Compact) -> Compact:
        gp, ge = g
        hp, he = h
        w = self.w
        return (tuple(gp[k] for k in hp), tuple((ge[hp[k]] + he[k]) % w for k in range(self.n)))

    def inv(self, g: Compact) -> Compact:
        gp, ge = g
        n = self.n
        inv = [0] * n
        for k, p in enumerate(gp):
            inv[p] = k
        return (tuple(inv), tuple((-ge[inv[j]]) % self.w for j in range(n)))

    def commutator(self, g: Compact, h: Compact) -> Compact:
        """g h g^-1 h^-1."""
        return self.mul(self.mul(g, h), self.mul(self.inv(g), self.inv(h)))

    def power(self, g: Compact, m: int) -> Compact:
        out = self.identity
        for _ in range(m):
            out = self.mul(out, g)
        return out

    def to_wreath(self, g: Compact) -> WreathElement:
        units = cyclic_units(self.w)
        return WreathElement(tuple(units[e] for e in g[1]), g[0])

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(self.mul(a, b) == self.mul(b, a) for a in gens for b in gens)

    def __contains__(self, g: Compact) -> bool:
        return g in self.members

    def __len__(self) -> int:
        return len(self.elements)


def _closure(n: int, w: int, gens: Sequence[Compact], budget: int) -> FiniteGroupTable:
    shell = FiniteGroupTable(n, w, [], gens)
    seen = {shell.identity}
    frontier = [shell.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = shell.mul(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > budget:
                        raise BudgetExceeded(f"subgroup exceeds {budget} elements")
        frontier = nxt
    return FiniteGroupTable(n, w, seen, gens)


def wreath_generators(n: int, w: int) -> list[Compact]:
    """A unit generator at position 0 and the adjacent transpositions."""
    ident = tuple(range(n))
    gens: list[Compact] = []
    if w > 1 and n > 0:
        gens.append((ident, (1,) + (0,) * (n - 1)))
    for i in range(n - 1):
        p = list(ident)
        p[i], p[i + 1] = p[i + 1], p[i]
        gens.append((tuple(p), (0,) * n))
    return gens


def wreath_group(n: int, w: int, budget: int = DEFAULT_BUDGET) -> FiniteGroupTable:
    size = w ** n * math.factorial(n)
    if size > budget:
        raise BudgetExceeded(f"|mu_{w} wr S_{n}| = {size} exceeds the budget {budget}")
    G = _closure(n, w, wreath_generators(n, w), budget)
    if G.order != size:
        raise AssertionError(f"generated {G.order} elements, expected {size}")
    return G


def derived_subgroup(G: FiniteGroupTable, budget: int = DEFAULT_BUDGET) -> FiniteGroupTable:
    """[G, G] as the normal closure of the commutators of G's generators."""
    hgens = []
    for a in G.generators:
        for b in G.generators:
            c = G.commutator(a, b)
            if c != G.identity and c not in hgens:
                hgens.append(c)
    H = _closure(G.n, G.w, hgens, budget)
    grew = True
    while grew:
        grew = False
        for g in G.generators:
            ginv = G.inv(g)
            for h in list(H.generators):
                c = G.mul(G.mul(g, h), ginv)
                if c not in H:
                    H = _closure(G.n, G.w, H.generators + [c], budget)
                    grew = True
    return H


def is_perfect(G: FiniteGroupTable, budget: int = DEFAULT_BUDGET) -> bool:
    return derived_subgroup(G, budget).order == G.order


def quotient_invariants(G: FiniteGroupTable, H: FiniteGroupTable) -> AbGroupDescriptor:
    """Structure of the abelian quotient G/H, by counting cosets killed by m."""
    reps = []
    covered: set[Compact] = set()
    for g in G.elements:
        if g in covered:
            continue
        reps.append(g)
        covered.update(G.mul(g, h) for h in H.elements)
    index = len(reps)

    def killed_by(m: int) -> int:
        return sum(1 for g in reps if G.power(g, m) in H)

    if index == 1:
        return AbGroupDescriptor.trivial()
    return invariants_from_counts(index, killed_by)


def brute_abelianization(n: int, w: int, budget: int = DEFAULT_BUDGET) -> AbGroupDescriptor:
    G = wreath_group(n, w, budget)
    return quotient_invariants(G, derived_subgroup(G, budget))


def abelianize_compact(G: FiniteGroupTable, g: Compact) -> tuple[int, int]:
    """(exponent of the unit product mod w, parity)."""
    return (sum(g[1]) % G.w, parity(g[0]))


# ---------------------------------------------------------------------------
# the commutators [tau_i, f_j] in the alternating part


@dataclass(frozen=True)
class CaseResult:
    case: str
    checked: int
    failures: tuple[tuple[int, int, int], ...]  # (i, j, exponent) 1-based

    @property
    def passed(self) -> bool:
        return self.checked > 0 and not self.failures


COMMUTATOR_CASES = ("j<=i-2", "j=i-1", "j=i", "j=i+1", "j=i+2", "j>=i+3")


def _expected_commutator(n: int, i: int, j: int, e: int) -> tuple[str, list[int]]:
    """Case label and exponent vector of [tau_i, f_j^eps] for eps = zeta^e (0-based i, j)."""
    exp = [0] * n
    if j <= i - 2:
        case = "j<=i-2"
    elif j == i - 1:
        case = "j=i-1"
        exp[i] += e
        exp[i + 2] -= e
    elif j == i:
        case = "j=i"
        exp[i] -= 2 * e
        exp[i + 1] += e
        exp[i + 2] += e
    elif j == i + 1:
        case = "j=i+1"
        exp[i] += e
        exp[i + 1] -= 2 * e
        exp[i + 2] += e
    elif j == i + 2:
        case = "j=i+2"
        exp[i + 1] += e
        exp[i + 2] -= e
    else:
        case = "j>=i+3"
    return case, exp


def commutator_table_check(n: int, w: int = 2) -> dict[str, CaseResult]:
    """Evaluate [tau_i, f_j^eps] = tau f tau^-1 f^-1 for every i, j, eps and compare with the table.

    tau_i = sigma_{i+1} sigma_i is a 3-cycle and f_j^eps = eps_j (eps^-1)_{j+1}.
    """
    if n < 3:
        raise ValueError("the table needs n >= 3")
    G = FiniteGroupTable(n, w, [], [])
    ident = tuple(range(n))

    def sigma(i):
        p = list(ident)
        p[i], p[i + 1] = p[i + 1], p[i]
        return (tuple(p), (0,) * n)

    results: dict[str, list] = {c: [0, []] for c in COMMUTATOR_CASES}
    for e in range(1, w) if w > 1 else [0]:
        for i in range(n - 2):
            tau = G.mul(sigma(i + 1), sigma(i))
            for j in range(n - 1):
                d = [0] * n
                d[j] = e
                d[j + 1] = -e % w
                f = (ident, tuple(d))
                got = G.commutator(tau, f)
                case, exp = _expected_commutator(n, i, j, e)
                want = (ident, tuple(x % w for x in exp))
                slot = results[case]
                slot[0] += 1
                if got != want:
                    slot[1].append((i + 1, j + 1, e))
    return {c: CaseResult(c, k, tuple(f)) for c, (k, f) in results.items()}


def conjugacy_check(G: FiniteGroupTable, pairs: Iterable[tuple[Compact, Compact]]) -> bool:
    return all(G.mul(a, b) == G.mul(b, a) for a, b in pairs)


def kernel_of_abelianization(G: FiniteGroupTable) -> set[Compact]:
    return {g for g in G.elements if abelianize_compact(G, g) == (0, 0)}


def all_pairs(G: FiniteGroupTable) -> Iterable[tuple[Compact, Compact]]:
    return itertools.product(G.elements, repeat=2)


def as_function(G: FiniteGroupTable) -> Callable[[Compact, Compact], Compact]:
    return G.mul

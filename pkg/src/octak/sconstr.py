"""Object level of the S-construction over free modules, compared with pointed E-sets.

An object of S_n is a staircase of modules A_ij (0 <= i <= j <= n, A_ii = 0)
with cofibrations A_ij >-> A_ik and quotient maps A_ik ->> A_jk.  Between free
modules every such diagram is determined by the chain of cofibrations
A_01 >-> A_02 >-> ... >-> A_0n once quotients are fixed to the canonical
cokernel (complement rows in increasing order), so enumeration walks chains.

E is finite cyclic here (mu_2 over Q, mu_4 over Q(i)).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import perm as falling
from typing import Iterator

from .errors import BudgetExceeded
from .field import FieldElement
from .omod import CofibCertificate, OMatrix, cokernel, compose, is_cofibration
from .wreath import cyclic_units

DEFAULT_BUDGET = 10 ** 6


def cofib_count(n_from: int, n_to: int, w: int) -> int:
    """|E|^a * b! / (b - a)!: closed form for the number of cofibrations O(a) >-> O(b)."""
    if n_from > n_to:
        return 0
    return w ** n_from * falling(n_to, n_from)


def enumerate_cofibs(n_from: int, n_to: int, w: int, budget: int = DEFAULT_BUDGET) -> list[CofibCertificate]:
    units = cyclic_units(w)
    F = units[0].field
    if cofib_count(n_from, n_to, w) > budget:
        raise BudgetExceeded(f"{cofib_count(n_from, n_to, w)} cofibrations exceed the budget {budget}")
    out = []
    for rows in itertools.permutations(range(n_to), n_from):
        for us in itertools.product(units, repeat=n_from):
            out.append(CofibCertificate(n_from, n_to, rows, us, F))
    return out


# ---------------------------------------------------------------------------
# pointed E-sets


@dataclass(frozen=True)
class PointedESet:
    """Free pointed mu_w-set on ``gens`` generators; elements are (gen, exponent) or None."""

    gens: int
    w: int

    def elements(self) -> list[tuple[int, int] | None]:
        return [None] + [(g, e) for g in range(self.gens) for e in range(self.w)]

    def __len__(self) -> int:
        return self.gens * self.w + 1


@dataclass(frozen=True)
class ESetInjection:
    """Equivariant pointed injection; generator i goes to zeta^exps[i] * generator targets[i]."""

    source: int
    target: int
    w: int
    targets: tuple[int, ...]
    exps: tuple[int, ...]

    def __call__(self, x: tuple[int, int] | None) -> tuple[int, int] | None:
        if x is None:
            return None
        g, e = x
        return (self.targets[g], (self.exps[g] + e) % self.w)

    def compose(self, inner: "ESetInjection") -> "ESetInjection":
        """self o inner."""
        return ESetInjection(inner.source, self.target, self.w,
                             tuple(self.targets[t] for t in inner.targets),
                             tuple((self.exps[t] + e) % self.w for t, e in zip(inner.targets, inner.exps)))

    def is_valid(self) -> bool:
        X = PointedESet(self.source, self.w)
        imgs = [self(x) for x in X.elements()]
        return len(set(imgs)) == len(imgs) and imgs[0] is None


def _unit_exponent(u: FieldElement, w: int) -> int:
    units = cyclic_units(w)
    for k, v in enumerate(units):
        if v == u or (v.a == u.a and v.b == u.b):
            return k
    raise ValueError(f"{u} is not in mu_{w}")


def to_pointed_eset(c: CofibCertificate, w: int) -> ESetInjection:
    return ESetInjection(c.n_from, c.n_to, w, c.col_to_row, tuple(_unit_exponent(u, w) for u in c.units))


def from_pointed_eset(f: ESetInjection) -> CofibCertificate:
    units = cyclic_units(f.w)
    return CofibCertificate(f.source, f.target, f.targets, tuple(units[e] for e in f.exps), units[0].field)


def enumerate_injections(source: int, target: int, w: int, budget: int = DEFAULT_BUDGET) -> list[ESetInjection]:
    """Brute force: try every image for each generator and keep the injective extensions."""
    Y = PointedESet(target, w)
    if len(Y) ** source > budget:
        raise BudgetExceeded(f"{len(Y) ** source} candidate maps exceed the budget {budget}")
    out = []
    for images in itertools.product(Y.elements(), repeat=source):
        if any(y is None for y in images):
            continue
        f = ESetInjection(source, target, w, tuple(y[0] for y in images), tuple(y[1] for y in images))
        if f.is_valid():
            out.append(f)
    return out


# ---------------------------------------------------------------------------
# staircases


def _induced_cofib(outer: CofibCertificate, inner_ij: CofibCertificate, inner_ik: CofibCertificate,
                   ) -> CofibCertificate:
    """A_ij >-> A_ik induced by A_0j >-> A_0k on the canonical cokernels.

    inner_ij: A_0i >-> A_0j, inner_ik: A_0i >-> A_0k, outer: A_0j >-> A_0k.
    """
    src_rows = inner_ij.complement_rows
    tgt_rows = inner_ik.complement_rows
    pos = {r: k for k, r in enumerate(tgt_rows)}
    rows = tuple(pos[outer.col_to_row[r]] for r in src_rows)
    units = tuple(outer.units[r] for r in src_rows)
    return CofibCertificate(len(src_rows), len(tgt_rows), rows, units, outer.field)


def _compose_certs(g: CofibCertificate, f: CofibCertificate) -> CofibCertificate:
    """g o f."""
    return CofibCertificate(f.n_from, g.n_to, tuple(g.col_to_row[r] for r in f.col_to_row),
                            tuple(g.units[r] * u for r, u in zip(f.col_to_row, f.units)), f.field)


@dataclass
class StaircaseObject:
    n: int
    ranks: dict[tuple[int, int], int]
    cofibs: dict[tuple[int, int, int], CofibCertificate]  # (i, j, k): A_ij >-> A_ik, i <= j <= k
    quotients: dict[tuple[int, int, int], OMatrix]  # (i, j, k): A_ik ->> A_jk, i <= j <= k
    field_: object = field(default=None, repr=False)

    def validate(self) -> tuple[bool, str | None]:
        n = self.n
        for i in range(n + 1):
            if self.ranks[(i, i)] != 0:
                return False, f"A_{i}{i} is not zero"
        for i, j, k in itertools.combinations_with_replacement(range(n + 1), 3):
            r = self.ranks
            if r[(i, k)] != r[(i, j)] + r[(j, k)]:
                return False, f"ranks not additive at {(i, j, k)}"
            c = self.cofibs[(i, j, k)]
            if (c.n_from, c.n_to) != (r[(i, j)], r[(i, k)]):
                return False, f"cofibration at {(i, j, k)} has the wrong shape"
            if not isinstance(is_cofibration(c.to_matrix()), CofibCertificate):
                return False, f"map at {(i, j, k)} is not a cofibration"
            if self.quotients[(i, j, k)] != cokernel(c).projection:
                return False, f"quotient at {(i, j, k)} is not the canonical cokernel"
        for i, j, k, l in itertools.combinations_with_replacement(range(n + 1), 4):
            lhs = compose(self.cofibs[(i, k, l)].to_matrix(), self.cofibs[(i, j, k)].to_matrix())
            if lhs != self.cofibs[(i, j, l)].to_matrix():
                return False, f"cofibrations do not compose at {(i, j, k, l)}"
        return True, None

    def reindex(self, phi: list[int]) -> "StaircaseObject":
        """Pull back along a monotone map phi: [m] -> [n]."""
        m = len(phi) - 1
        ranks = {(i, j): self.ranks[(phi[i], phi[j])] for i in range(m + 1) for j in range(i, m + 1)}
        cofibs = {}
        quots = {}
        for i, j, k in itertools.combinations_with_replacement(range(m + 1), 3):
            key = (phi[i], phi[j], phi[k])
            cofibs[(i, j, k)] = self.cofibs[key]
            quots[(i, j, k)] = self.quotients[key]
        return StaircaseObject(m, ranks, cofibs, quots, self.field_)

    def face(self, t: int) -> "StaircaseObject":
        return self.reindex([x for x in range(self.n + 1) if x != t])

    def degeneracy(self, t: int) -> "StaircaseObject":
        return self.reindex([x if x <= t else x - 1 for x in range(self.n + 2)])

    def chain_ranks(self) -> tuple[int, ...]:
        return tuple(self.ranks[(0, j)] for j in range(1, self.n + 1))

    def to_json(self) -> dict:
        return {"n": self.n,
                "ranks": [[self.ranks.get((i, j)) for j in range(self.n + 1)] for i in range(self.n + 1)],
                "chain": [self.cofibs[(0, j, j + 1)].to_json() for j in range(1, self.n)]}

    def to_markdown(self) -> str:
        lines = ["| i \\ j | " + " | ".join(str(j) for j in range(self.n + 1)) + " |",
                 "|---" * (self.n + 2) + "|"]
        for i in range(self.n + 1):
            cells = [f"O({self.ranks[(i, j)]})" if j >= i else "" for j in range(self.n + 1)]
            lines.append(f"| {i} | " + " | ".join(cells) + " |")
        return "\n".join(lines)


def build_staircase(ranks0: tuple[int, ...], chain: list[CofibCertificate], F) -> StaircaseObject:
    """Staircase from the ranks r_01 <= ... <= r_0n and cofibrations A_0j >-> A_0,j+1."""
    n = len(ranks0)
    r = (0,) + tuple(ranks0)
    if len(chain) != max(n - 1, 0):
        raise ValueError("a chain of n ranks needs n - 1 cofibrations")
    # c0[(j, k)]: A_0j >-> A_0k
    c0: dict[tuple[int, int], CofibCertificate] = {}
    for j in range(n + 1):
        c0[(j, j)] = CofibCertificate.identity(r[j], F)
        if j == 0:
            for k in range(n + 1):
                c0[(0, k)] = CofibCertificate(0, r[k], (), (), F)
    for j in range(1, n):
        c0[(j, j + 1)] = chain[j - 1]
    for span in range(2, n + 1):
        for j in range(1, n + 1 - span):
            k = j + span
            c0[(j, k)] = _compose_certs(c0[(k - 1, k)], c0[(j, k - 1)])
    ranks = {(i, j): r[j] - r[i] for i in range(n + 1) for j in range(i, n + 1)}
    cofibs = {}
    quots = {}
    for i, j, k in itertools.combinations_with_replacement(range(n + 1), 3):
        c = _induced_cofib(c0[(j, k)], c0[(i, j)], c0[(i, k)])
        cofibs[(i, j, k)] = c
        quots[(i, j, k)] = cokernel(c).projection
    return StaircaseObject(n, ranks, cofibs, quots, F)


def rank_chains(n: int, max_rank: int) -> Iterator[tuple[int, ...]]:
    """Nondecreasing (r_01, ..., r_0n) with r_0n <= max_rank."""
    return itertools.combinations_with_replacement(range(max_rank + 1), n)


def count_chains(n: int, max_rank: int, step_count) -> int:
    """Sum over rank chains of the product of per-step counts."""
    if n == 0:
        return 1
    total = 0
    for ranks in rank_chains(n, max_rank):
        prod = 1
        for a, b in zip(ranks, ranks[1:]):
            prod *= step_count(a, b)
        total += prod
    return total


@dataclass
class SObjectCensus:
    n: int
    max_rank: int
    w: int
    count_free: int
    count_eset: int
    samples: list[StaircaseObject]
    faces_valid: bool

    @property
    def bijection_holds(self) -> bool:
        return self.count_free == self.count_eset

    def to_json(self) -> dict:
        return {"n": self.n, "max_rank": self.max_rank, "w": self.w,
                "count_free_modules": self.count_free, "count_pointed_esets": self.count_eset,
                "equal": self.bijection_holds, "samples_checked": len(self.samples),
                "faces_valid": self.faces_valid}


def iter_s_objects(n: int, max_rank: int, w: int) -> Iterator[StaircaseObject]:
    """Every staircase in S_n with r_0n <= max_rank, in a fixed order."""
    units = cyclic_units(w)
    F = units[0].field
    for ranks in rank_chains(n, max_rank):
        steps = [enumerate_cofibs(a, b, w) for a, b in zip(ranks, ranks[1:])]
        for chain in itertools.product(*steps):
            yield build_staircase(ranks, list(chain), F)


def enumerate_s_objects(n: int, max_rank: int, w: int, samples: int = 8,
                        budget: int = DEFAULT_BUDGET) -> SObjectCensus:
    if n > 3:
        raise BudgetExceeded("S_n is enumerated only for n <= 3")

    @lru_cache(maxsize=None)
    def free_step(a: int, b: int) -> int:
        return sum(1 for c in enumerate_cofibs(a, b, w, budget)
                   if isinstance(is_cofibration(c.to_matrix()), CofibCertificate))

    @lru_cache(maxsize=None)
    def eset_step(a: int, b: int) -> int:
        return len(enumerate_injections(a, b, w, budget))

    count_free = count_chains(n, max_rank, free_step)
    if count_free > budget * 100:
        raise BudgetExceeded(f"{count_free} objects exceed the census budget")
    count_eset = count_chains(n, max_rank, eset_step)

    picked = _spread_samples(n, max_rank, w, samples)
    faces_ok = True
    for obj in picked:
        ok, why = obj.validate()
        if not ok:
            raise AssertionError(f"constructed staircase is invalid: {why}")
        for t in range(obj.n + 1):
            if obj.n >= 1 and not obj.face(t).validate()[0]:
                faces_ok = False
            if not obj.degeneracy(t).validate()[0]:
                faces_ok = False
    return SObjectCensus(n, max_rank, w, count_free, count_eset, picked, faces_ok)


def _spread_samples(n: int, max_rank: int, w: int, k: int) -> list[StaircaseObject]:
    """The first and last staircase for each rank chain, up to k objects."""
    units = cyclic_units(w)
    F = units[0].field
    out = []
    for ranks in rank_chains(n, max_rank):
        steps = [enumerate_cofibs(a, b, w) for a, b in zip(ranks, ranks[1:])]
        if any(not s for s in steps):
            continue
        out.append(build_staircase(ranks, [s[0] for s in steps], F))
        out.append(build_staircase(ranks, [s[-1] for s in steps], F))
        if len(out) >= k:
            break
    return out[:k]

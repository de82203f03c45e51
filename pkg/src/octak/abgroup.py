"""Structural descriptors of abelian groups: free rank plus prime-power torsion."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

from sympy import factorint


class _Omega:
    """Countably infinite rank marker."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "OMEGA"

    def __str__(self) -> str:
        return "w"

    def __reduce__(self):
        return (_Omega, ())


OMEGA = _Omega()


def prime_power_parts(m: int) -> tuple[int, ...]:
    """Z/m as a sum of cyclic groups of prime-power order."""
    if m < 1:
        raise ValueError("cyclic group order must be positive")
    return tuple(sorted(p ** e for p, e in factorint(m).items()))


@dataclass(frozen=True)
class FiniteUnknown:
    """A finite group known only up to a filtration.

    The graded pieces are subquotients of the cyclic groups Z/k for k in
    ``pieces``, so the order divides prod(pieces).
    """

    pieces: tuple[int, ...]
    note: str

    @property
    def order_bound(self) -> int:
        return prod(self.pieces)


@dataclass(frozen=True)
class AbGroupDescriptor:
    free_rank: object = 0  # int or OMEGA
    torsion: tuple[int, ...] = ()
    torsion_infinite: tuple[int, ...] = ()  # prime powers with countably many copies
    unknown: FiniteUnknown | None = field(default=None)

    def __post_init__(self):
        if not (self.free_rank is OMEGA or (isinstance(self.free_rank, int) and self.free_rank >= 0)):
            raise ValueError(f"bad free rank {self.free_rank!r}")
        parts: list[int] = []
        for t in self.torsion:
            if t <= 1:
                raise ValueError("torsion coefficients must exceed 1")
            parts.extend(prime_power_parts(t))
        object.__setattr__(self, "torsion", tuple(sorted(parts)))
        inf: list[int] = []
        for t in self.torsion_infinite:
            inf.extend(prime_power_parts(t))
        object.__setattr__(self, "torsion_infinite", tuple(sorted(set(inf))))

    # constructors -----------------------------------------------------------
    @classmethod
    def trivial(cls) -> "AbGroupDescriptor":
        return cls()

    @classmethod
    def free(cls, rank) -> "AbGroupDescriptor":
        return cls(free_rank=rank)

    @classmethod
    def cyclic(cls, m: int) -> "AbGroupDescriptor":
        """Z/m; m = 0 means Z."""
        if m == 0:
            return cls(free_rank=1)
        return cls(torsion=(m,) if m > 1 else ())

    def __add__(self, other: "AbGroupDescriptor") -> "AbGroupDescriptor":
        """Direct sum."""
        if self.unknown and other.unknown:
            unknown = FiniteUnknown(self.unknown.pieces + other.unknown.pieces,
                                    f"{self.unknown.note}; {other.unknown.note}")
        else:
            unknown = self.unknown or other.unknown
        if OMEGA in (self.free_rank, other.free_rank):
            rank = OMEGA
        else:
            rank = self.free_rank + other.free_rank
        return AbGroupDescriptor(rank, self.torsion + other.torsion,
                                 self.torsion_infinite + other.torsion_infinite, unknown)

    def times(self, copies) -> "AbGroupDescriptor":
        """Direct sum of ``copies`` copies (an int or OMEGA)."""
        if copies is OMEGA:
            if self.unknown:
                raise ValueError("infinitely many unknown summands")
            free = OMEGA if self.free_rank else 0
            return AbGroupDescriptor(free, (), self.torsion + self.torsion_infinite)
        out = AbGroupDescriptor.trivial()
        for _ in range(copies):
            out = out + self
        return out

    # queries ----------------------------------------------------------------
    @property
    def qualifier(self) -> str:
        return "BoundOnly" if self.unknown else "Exact"

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0 and not self.torsion_infinite

    def order(self) -> int | None:
        if not self.is_finite or self.unknown:
            return None
        return prod(self.torsion)

    def __str__(self) -> str:
        parts = []
        if self.free_rank is OMEGA or self.free_rank:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        parts.extend(f"(Z/{t})^w" for t in self.torsion_infinite)
        if self.unknown:
            parts.append("G")
        text = " + ".join(parts) or "0"
        return f"[bound] {text}" if self.unknown else text

    def to_json(self) -> dict:
        out = {
            "free_rank": str(self.free_rank) if self.free_rank is OMEGA else self.free_rank,
            "torsion": list(self.torsion),
            "qualifier": self.qualifier,
            "text": str(self),
        }
        if self.torsion_infinite:
            out["torsion_infinite"] = list(self.torsion_infinite)
        if self.unknown:
            out["unknown"] = {"pieces": list(self.unknown.pieces), "order_bound": self.unknown.order_bound,
                              "note": self.unknown.note}
        return out


def invariants_from_counts(order: int, count_killed_by) -> AbGroupDescriptor:
    """Recover a finite abelian group from element counts.

    ``count_killed_by(m)`` must return #{x : m x = 0}.  For each prime p the
    counts at p, p^2, ... determine the partition of the p-primary part.
    """
    torsion: list[int] = []
    for p, e in factorint(order).items():
        logs = [0]
        k = 1
        while logs[-1] < e:
            c = count_killed_by(p ** k)
            lg = 0
            while c % p == 0 and c > 1:
                c //= p
                lg += 1
            logs.append(lg)
            k += 1
        # logs[k] - logs[k-1] = number of cyclic factors of order >= p^k
        at_least = [logs[k] - logs[k - 1] for k in range(1, len(logs))] + [0]
        for k in range(1, len(at_least)):
            exactly = at_least[k - 1] - at_least[k]
            torsion.extend([p ** k] * exactly)
    return AbGroupDescriptor(torsion=tuple(torsion))

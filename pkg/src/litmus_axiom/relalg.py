"""Finite relations and event sets over a dense universe ``0..n-1``.

Sets are stored as a single integer bitmask and relations as one bitmask per
row (row ``i`` holds the successors of ``i``).  Every value is immutable, so
relations can be shared freely between evaluators and worker processes.
"""

from __future__ import annotations

from typing import Iterable, Iterator


class UniverseMismatch(ValueError):
    """Raised when two operands live over different universes."""


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class EventSet:
    __slots__ = ("n", "mask")

    def __init__(self, n: int, mask: int = 0):
        if mask >> n:
            raise ValueError(f"set mask exceeds universe of size {n}")
        self.n = n
        self.mask = mask

    @classmethod
    def of(cls, n: int, members: Iterable[int]) -> "EventSet":
        mask = 0
        for e in members:
            if not 0 <= e < n:
                raise ValueError(f"event {e} outside universe of size {n}")
            mask |= 1 << e
        return cls(n, mask)

    @classmethod
    def full(cls, n: int) -> "EventSet":
        return cls(n, (1 << n) - 1)

    def _check(self, other: "EventSet") -> None:
        if not isinstance(other, EventSet):
            raise TypeError(f"expected EventSet, got {type(other).__name__}")
        if other.n != self.n:
            raise UniverseMismatch(f"universe {self.n} vs {other.n}")

    def __or__(self, other: "EventSet") -> "EventSet":
        self._check(other)
        return EventSet(self.n, self.mask | other.mask)

    def __and__(self, other: "EventSet") -> "EventSet":
        self._check(other)
        return EventSet(self.n, self.mask & other.mask)

    def __sub__(self, other: "EventSet") -> "EventSet":
        self._check(other)
        return EventSet(self.n, self.mask & ~other.mask)

    def complement(self) -> "EventSet":
        return EventSet(self.n, ((1 << self.n) - 1) ^ self.mask)

    def __invert__(self) -> "EventSet":
        return self.complement()

    def __contains__(self, e: int) -> bool:
        return 0 <= e < self.n and bool(self.mask >> e & 1)

    def __iter__(self) -> Iterator[int]:
        return _bits(self.mask)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __bool__(self) -> bool:
        return self.mask != 0

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EventSet) and other.n == self.n and other.mask == self.mask

    def __hash__(self) -> int:
        return hash((self.n, self.mask))

    def __repr__(self) -> str:
        return f"EventSet({self.n}, {sorted(self)})"

    def identity(self) -> "Relation":
        """``[s]``: the identity relation restricted to this set."""
        return Relation(self.n, tuple((1 << i) if self.mask >> i & 1 else 0 for i in range(self.n)))

    def product(self, other: "EventSet") -> "Relation":
        """``s1 * s2``: every pair from this set to ``other``."""
        self._check(other)
        m = other.mask
        return Relation(self.n, tuple(m if self.mask >> i & 1 else 0 for i in range(self.n)))


class Relation:
    __slots__ = ("n", "rows")

    def __init__(self, n: int, rows: tuple[int, ...]):
        self.n = n
        self.rows = rows

    @classmethod
    def empty(cls, n: int) -> "Relation":
        return cls(n, (0,) * n)

    @classmethod
    def full(cls, n: int) -> "Relation":
        m = (1 << n) - 1
        return cls(n, (m,) * n)

    @classmethod
    def ident(cls, n: int) -> "Relation":
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Relation":
        rows = [0] * n
        for a, b in pairs:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"pair {(a, b)} outside universe of size {n}")
            rows[a] |= 1 << b
        return cls(n, tuple(rows))

    @classmethod
    def from_order(cls, n: int, order: Iterable[int]) -> "Relation":
        """Strict total order over the listed events, in list order."""
        rows = [0] * n
        seen = 0
        for e in reversed(list(order)):
            rows[e] = seen
            seen |= 1 << e
        return cls(n, tuple(rows))

    def _check(self, other: "Relation") -> None:
        if not isinstance(other, Relation):
            raise TypeError(f"expected Relation, got {type(other).__name__}")
        if other.n != self.n:
            raise UniverseMismatch(f"universe {self.n} vs {other.n}")

    # set-theoretic operators

    def __or__(self, other: "Relation") -> "Relation":
        self._check(other)
        return Relation(self.n, tuple(a | b for a, b in zip(self.rows, other.rows)))

    def __and__(self, other: "Relation") -> "Relation":
        self._check(other)
        return Relation(self.n, tuple(a & b for a, b in zip(self.rows, other.rows)))

    def __sub__(self, other: "Relation") -> "Relation":
        self._check(other)
        return Relation(self.n, tuple(a & ~b for a, b in zip(self.rows, other.rows)))

    def complement(self) -> "Relation":
        m = (1 << self.n) - 1
        return Relation(self.n, tuple(m ^ r for r in self.rows))

    def __invert__(self) -> "Relation":
        return self.complement()

    # relational operators

    def compose(self, other: "Relation") -> "Relation":
        """``r1 ; r2``."""
        self._check(other)
        orows = other.rows
        out = []
        for r in self.rows:
            acc = 0
            while r:
                low = r & -r
                acc |= orows[low.bit_length() - 1]
                r ^= low
            out.append(acc)
        return Relation(self.n, tuple(out))

    def inverse(self) -> "Relation":
        rows = [0] * self.n
        for i, r in enumerate(self.rows):
            bit = 1 << i
            for j in _bits(r):
                rows[j] |= bit
        return Relation(self.n, tuple(rows))

    def optional(self) -> "Relation":
        """Reflexive closure ``r?``."""
        return Relation(self.n, tuple(r | (1 << i) for i, r in enumerate(self.rows)))

    def closure(self) -> "Relation":
        """Transitive closure ``r+`` (Warshall over bit rows)."""
        rows = list(self.rows)
        n = self.n
        for k in range(n):
            rk = rows[k]
            if not rk:
                continue
            bit = 1 << k
            for i in range(n):
                if rows[i] & bit:
                    rows[i] |= rk
        return Relation(n, tuple(rows))

    def restrict(self, s: EventSet) -> "Relation":
        """``[s] ; r ; [s]``."""
        m = s.mask
        return Relation(self.n, tuple((r & m) if m >> i & 1 else 0 for i, r in enumerate(self.rows)))

    # predicates

    def is_empty(self) -> bool:
        return not any(self.rows)

    def irreflexive(self) -> bool:
        return not any(r >> i & 1 for i, r in enumerate(self.rows))

    def acyclic(self) -> bool:
        # repeatedly peel off sinks of the remaining subgraph
        remaining = (1 << self.n) - 1
        rows = self.rows
        while remaining:
            progress = False
            for i in _bits(remaining):
                if not rows[i] & remaining:
                    remaining &= ~(1 << i)
                    progress = True
            if not progress:
                return False
        return True

    # views

    def __contains__(self, pair: tuple[int, int]) -> bool:
        a, b = pair
        return 0 <= a < self.n and bool(self.rows[a] >> b & 1)

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, r in enumerate(self.rows) for j in _bits(r)]

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.pairs())

    def __len__(self) -> int:
        return sum(bin(r).count("1") for r in self.rows)

    def domain(self) -> EventSet:
        mask = 0
        for i, r in enumerate(self.rows):
            if r:
                mask |= 1 << i
        return EventSet(self.n, mask)

    def range(self) -> EventSet:
        mask = 0
        for r in self.rows:
            mask |= r
        return EventSet(self.n, mask)

    def successors(self, e: int) -> EventSet:
        return EventSet(self.n, self.rows[e])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Relation) and other.n == self.n and other.rows == self.rows

    def __hash__(self) -> int:
        return hash((self.n, self.rows))

    def __repr__(self) -> str:
        return f"Relation({self.n}, {self.pairs()})"


def compose(r1: Relation, r2: Relation) -> Relation:
    return r1.compose(r2)


def acyclic(r: Relation) -> bool:
    return r.acyclic()


def irreflexive(r: Relation) -> bool:
    return r.irreflexive()


def is_empty(r: Relation) -> bool:
    return r.is_empty()

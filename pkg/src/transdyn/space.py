"""Space backends and subset algebra.

Two backends are supported:

* finite -- a finite metric space on points ``0..n-1`` with an explicit
  rational distance table.  The topology is discrete, so a subset is a
  bit mask and density collapses to equality with the whole space; the
  metric only matters for epsilon-density arguments.
* shift -- the one-sided full shift over a finite alphabet with metric
  ``d(x, y) = 2**-(first position of disagreement)`` (positions counted
  from 1).  Subsets are finite unions of cylinders kept in a canonical
  form: a prefix antichain whose complete sibling groups are merged.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    BackendMismatchError,
    InvalidEpsilonError,
    MetricViolationError,
)

FINITE = "finite"
SHIFT = "shift"


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


def check_epsilon(eps) -> Fraction:
    eps = as_fraction(eps)
    if eps <= 0:
        raise InvalidEpsilonError(f"radius must be positive, got {eps}")
    return eps


def canonical_cylinders(words, alphabet: int) -> frozenset[str]:
    """Reduce a set of prefix words to the unique canonical antichain.

    Words with a proper prefix already present are absorbed; groups of all
    ``alphabet`` siblings are merged into their parent.  The empty word
    denotes the whole space.
    """
    ws = set(words)
    while True:
        if "" in ws:
            return frozenset({""})
        absorbed = {w for w in ws if any(w[:i] in ws for i in range(len(w)))}
        if absorbed:
            ws -= absorbed
            continue
        children: dict[str, set[str]] = {}
        for w in ws:
            children.setdefault(w[:-1], set()).add(w[-1])
        complete = {p for p, cs in children.items() if len(cs) == alphabet}
        if not complete:
            return frozenset(ws)
        ws = {w for w in ws if w[:-1] not in complete} | complete


class PointSet:
    """An exact subset of a space: bit mask (finite) or cylinder union (shift).

    Instances are immutable and canonical, so ``==`` is structural set
    equality.  On the shift backend every representable set is clopen.
    """

    __slots__ = ("backend", "mask", "n", "words", "alphabet")

    def __init__(self, backend, *, mask=None, n=None, words=None, alphabet=None):
        self.backend = backend
        if backend == FINITE:
            self.mask = mask & ((1 << n) - 1)
            self.n = n
            self.words = None
            self.alphabet = None
        elif backend == SHIFT:
            self.mask = None
            self.n = None
            self.words = canonical_cylinders(words, alphabet)
            self.alphabet = alphabet
        else:
            raise ValueError(f"unknown backend {backend!r}")

    @staticmethod
    def from_mask(mask: int, n: int) -> "PointSet":
        return PointSet(FINITE, mask=mask, n=n)

    @staticmethod
    def from_points(points, n: int) -> "PointSet":
        mask = 0
        for p in points:
            if not 0 <= p < n:
                raise ValueError(f"point {p} outside 0..{n - 1}")
            mask |= 1 << p
        return PointSet(FINITE, mask=mask, n=n)

    @staticmethod
    def from_cylinders(words, alphabet: int) -> "PointSet":
        for w in words:
            for c in w:
                if not (c.isdigit() and int(c) < alphabet):
                    raise ValueError(f"symbol {c!r} outside alphabet of size {alphabet}")
        return PointSet(SHIFT, words=words, alphabet=alphabet)

    def _like(self, other: "PointSet"):
        if self.backend != other.backend:
            raise BackendMismatchError("sets live on different backends")
        if self.backend == FINITE and self.n != other.n:
            raise BackendMismatchError("sets live on different finite spaces")
        if self.backend == SHIFT and self.alphabet != other.alphabet:
            raise BackendMismatchError("sets live on different shift spaces")

    def is_empty(self) -> bool:
        return self.mask == 0 if self.backend == FINITE else not self.words

    def is_full(self) -> bool:
        if self.backend == FINITE:
            return self.mask == (1 << self.n) - 1
        return self.words == frozenset({""})

    def points(self):
        """Finite backend only: the member point ids in increasing order."""
        return [p for p in range(self.n) if self.mask >> p & 1]

    def union(self, other: "PointSet") -> "PointSet":
        self._like(other)
        if self.backend == FINITE:
            return PointSet.from_mask(self.mask | other.mask, self.n)
        return PointSet(SHIFT, words=self.words | other.words, alphabet=self.alphabet)

    def intersection(self, other: "PointSet") -> "PointSet":
        self._like(other)
        if self.backend == FINITE:
            return PointSet.from_mask(self.mask & other.mask, self.n)
        kept = set()
        for u in self.words:
            for v in other.words:
                if u.startswith(v):
                    kept.add(u)
                elif v.startswith(u):
                    kept.add(v)
        return PointSet(SHIFT, words=kept, alphabet=self.alphabet)

    def complement(self) -> "PointSet":
        if self.backend == FINITE:
            return PointSet.from_mask(~self.mask, self.n)
        out: set[str] = set()

        def walk(prefix: str):
            if prefix in self.words:
                return
            if not any(w.startswith(prefix) for w in self.words):
                out.add(prefix)
                return
            for c in range(self.alphabet):
                walk(prefix + str(c))

        walk("")
        return PointSet(SHIFT, words=out, alphabet=self.alphabet)

    def meets(self, other: "PointSet") -> bool:
        self._like(other)
        if self.backend == FINITE:
            return bool(self.mask & other.mask)
        return any(
            u.startswith(v) or v.startswith(u) for u in self.words for v in other.words
        )

    def is_subset(self, other: "PointSet") -> bool:
        self._like(other)
        if self.backend == FINITE:
            return self.mask & ~other.mask == 0
        return all(any(u.startswith(v) for v in other.words) for u in self.words)

    def depth(self) -> int:
        """Shift backend: largest defining prefix length."""
        return max((len(w) for w in self.words), default=0)

    def __or__(self, other):
        return self.union(other)

    def __and__(self, other):
        return self.intersection(other)

    def __invert__(self):
        return self.complement()

    def __eq__(self, other):
        if not isinstance(other, PointSet) or self.backend != other.backend:
            return NotImplemented
        if self.backend == FINITE:
            return self.n == other.n and self.mask == other.mask
        return self.alphabet == other.alphabet and self.words == other.words

    def __hash__(self):
        if self.backend == FINITE:
            return hash((FINITE, self.n, self.mask))
        return hash((SHIFT, self.alphabet, self.words))

    def __repr__(self):
        if self.backend == FINITE:
            return f"PointSet({{{', '.join(map(str, self.points()))}}}, n={self.n})"
        body = " ".join(sorted(self.words)) if self.words else "empty"
        return f"PointSet([{body}], k={self.alphabet})"


class FiniteSpace:
    """``n`` points with a validated rational metric (discrete topology)."""

    def __init__(self, dist):
        n = len(dist)
        if n < 1:
            raise MetricViolationError("space needs at least one point")
        table = tuple(tuple(as_fraction(x) for x in row) for row in dist)
        if any(len(row) != n for row in table):
            raise MetricViolationError("distance table is not square")
        for i in range(n):
            if table[i][i] != 0:
                raise MetricViolationError(f"d({i},{i}) = {table[i][i]} != 0")
            for j in range(n):
                if i != j and table[i][j] <= 0:
                    raise MetricViolationError(
                        f"d({i},{j}) = {table[i][j]} must be positive"
                    )
                if table[i][j] != table[j][i]:
                    raise MetricViolationError(f"d({i},{j}) != d({j},{i})")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if table[i][j] > table[i][k] + table[k][j]:
                        raise MetricViolationError(
                            f"triangle inequality fails on ({i},{j},{k})"
                        )
        self.n = n
        self.dist = table

    @staticmethod
    def uniform(n: int) -> "FiniteSpace":
        return FiniteSpace(
            [[0 if i == j else 1 for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def cyclic(n: int) -> "FiniteSpace":
        return FiniteSpace(
            [[min(abs(i - j), n - abs(i - j)) for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def line(coords) -> "FiniteSpace":
        cs = [as_fraction(c) for c in coords]
        return FiniteSpace([[abs(a - b) for b in cs] for a in cs])

    def full_set(self) -> PointSet:
        return PointSet.from_mask((1 << self.n) - 1, self.n)

    def empty_set(self) -> PointSet:
        return PointSet.from_mask(0, self.n)

    def subset(self, points) -> PointSet:
        return PointSet.from_points(points, self.n)

    def singleton(self, p: int) -> PointSet:
        return PointSet.from_points([p], self.n)

    def opene_sets(self):
        """All nonempty subsets in increasing mask order (exact quantifier range)."""
        full = 1 << self.n
        return [PointSet.from_mask(m, self.n) for m in range(1, full)]

    def diameter(self) -> Fraction:
        return max(self.dist[i][j] for i in range(self.n) for j in range(self.n))

    def realized_distances(self):
        return sorted({self.dist[i][j] for i in range(self.n) for j in range(self.n)})

    def epsilon_grid(self):
        """Complete grid for "for all eps > 0" quantifiers.

        Epsilon-density of a fixed set is a step function of eps whose jumps
        sit at realized distances, so realized values plus midpoints between
        consecutive ones cover every case.
        """
        vals = self.realized_distances()
        grid = [v for v in vals if v > 0]
        grid += [(a + b) / 2 for a, b in zip(vals, vals[1:])]
        return sorted(set(grid))

    def ball(self, center: int, eps) -> PointSet:
        eps = check_epsilon(eps)
        if not 0 <= center < self.n:
            raise ValueError(f"no point {center}")
        mask = 0
        for y in range(self.n):
            if self.dist[center][y] < eps:
                mask |= 1 << y
        return PointSet.from_mask(mask, self.n)

    def is_eps_dense(self, pset: PointSet, eps) -> bool:
        eps = check_epsilon(eps)
        return all(pset.meets(self.ball(x, eps)) for x in range(self.n))

    def is_dense(self, pset: PointSet) -> bool:
        return pset.is_full()

    def closure_interior(self, pset: PointSet):
        return pset, pset


class ShiftSpace:
    """One-sided full shift over ``alphabet`` symbols, ``d = 2**-i`` metric."""

    def __init__(self, alphabet: int):
        if not 2 <= alphabet <= 10:
            raise ValueError("alphabet size must be between 2 and 10")
        self.alphabet = alphabet

    def full_set(self) -> PointSet:
        return PointSet.from_cylinders([""], self.alphabet)

    def empty_set(self) -> PointSet:
        return PointSet.from_cylinders([], self.alphabet)

    def cylinder(self, word: str) -> PointSet:
        return PointSet.from_cylinders([word], self.alphabet)

    def cylinder_words(self, depth: int):
        words = [""]
        for _ in range(depth):
            words = [w + str(c) for w in words for c in range(self.alphabet)]
        return words

    def opene_sets(self, depth: int):
        """Basis cylinders up to the given depth (depth-bounded quantifier range)."""
        out = []
        for d in range(depth + 1):
            out.extend(self.cylinder(w) for w in self.cylinder_words(d))
        return out

    def ball_depth(self, eps) -> int:
        """Depth t with ball(x, eps) = cylinder on the first t symbols."""
        eps = check_epsilon(eps)
        t = 0
        while Fraction(1, 2 ** (t + 1)) >= eps:
            t += 1
        return t

    def ball(self, center: str, eps) -> PointSet:
        # a center word shorter than the ball depth is padded with 0s, i.e.
        # the word stands for its lexicographically smallest point
        t = self.ball_depth(eps)
        word = center[:t] if len(center) >= t else center + "0" * (t - len(center))
        return self.cylinder(word)

    def is_eps_dense(self, pset: PointSet, eps) -> bool:
        t = self.ball_depth(eps)
        if pset.is_full():
            return True
        if pset.is_empty():
            return False
        comp = pset.complement()
        return min(len(w) for w in comp.words) > t

    def is_dense(self, pset: PointSet) -> bool:
        return pset.is_full()

    def closure_interior(self, pset: PointSet):
        return pset, pset

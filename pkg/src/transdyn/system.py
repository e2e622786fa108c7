"""Self-maps, map sequences, finite words and the iteration engine.

A non-autonomous system is a space together with an eventually periodic
sequence of maps drawn from a finite family: the sequence is ``prefix``
followed by ``period`` repeated forever (indices into the family, the
n-th map of the sequence being applied n-th).  The n-th iterate composes
the first n maps, newest on the left.

On the finite backend the iterates live in a finite monoid, so the
sequence of iterates is eventually periodic; ``composition_trace``
detects that cycle and is what makes "for all n" and "there exists n"
quantifiers exactly decidable.
"""

from __future__ import annotations

import itertools

from .errors import (
    BackendMismatchError,
    HorizonError,
    InvalidIndexError,
    InvalidMapError,
    InvalidSequenceError,
)
from .space import FINITE, SHIFT, FiniteSpace, PointSet, ShiftSpace
from .verdict import Verdict

DEFAULT_MAX_WINDOW = 16


class FiniteMap:
    """Total lookup table on ``0..n-1``."""

    __slots__ = ("table",)

    def __init__(self, table):
        t = tuple(table)
        n = len(t)
        if n == 0 or any(not (0 <= v < n) for v in t):
            raise InvalidMapError(f"not a total self-map table: {t}")
        self.table = t

    @property
    def n(self):
        return len(self.table)

    def __call__(self, x: int) -> int:
        return self.table[x]

    def __eq__(self, other):
        return isinstance(other, FiniteMap) and self.table == other.table

    def __hash__(self):
        return hash(self.table)

    def __repr__(self):
        return f"FiniteMap({list(self.table)})"

    @staticmethod
    def identity(n: int) -> "FiniteMap":
        return FiniteMap(range(n))

    @staticmethod
    def rotation(n: int, step: int = 1) -> "FiniteMap":
        return FiniteMap([(x + step) % n for x in range(n)])

    @staticmethod
    def constant(n: int, value: int) -> "FiniteMap":
        return FiniteMap([value] * n)


class BlockCode:
    """Sliding block code: ``y_i = rule(x_i .. x_{i+w-1})``.

    The rule table is indexed by the window read as a base-``alphabet``
    integer, most significant symbol first.  Trailing window positions the
    rule does not depend on are trimmed so equal maps share one form.
    """

    __slots__ = ("alphabet", "window", "rule")

    def __init__(self, alphabet, window, rule):
        k, w = alphabet, window
        rule = tuple(rule)
        if w < 1 or len(rule) != k**w or any(not (0 <= v < k) for v in rule):
            raise InvalidMapError("block-code rule is not total on the window")
        while w > 1:
            # drop the last window position if the rule ignores it
            chunks = [rule[i : i + k] for i in range(0, len(rule), k)]
            if all(len(set(c)) == 1 for c in chunks):
                rule = tuple(c[0] for c in chunks)
                w -= 1
            else:
                break
        self.alphabet = k
        self.window = w
        self.rule = rule

    def __eq__(self, other):
        return (
            isinstance(other, BlockCode)
            and self.alphabet == other.alphabet
            and self.window == other.window
            and self.rule == other.rule
        )

    def __hash__(self):
        return hash((self.alphabet, self.window, self.rule))

    def __repr__(self):
        return f"BlockCode(k={self.alphabet}, w={self.window})"

    def rule_of(self, word: str) -> int:
        return self.rule[int(word, self.alphabet) if word else 0]

    def output_word(self, word: str) -> str:
        """Outputs fully determined by the given input prefix."""
        w = self.window
        return "".join(
            str(self.rule_of(word[i : i + w])) for i in range(len(word) - w + 1)
        )

    @staticmethod
    def identity(alphabet: int) -> "BlockCode":
        return BlockCode(alphabet, 1, range(alphabet))

    @staticmethod
    def shift(alphabet: int) -> "BlockCode":
        rule = [b for _ in range(alphabet) for b in range(alphabet)]
        return BlockCode(alphabet, 2, rule)

    @staticmethod
    def symbol_map(alphabet: int, images) -> "BlockCode":
        return BlockCode(alphabet, 1, images)


def compose(outer, inner):
    """``outer after inner`` (inner applied first)."""
    if isinstance(outer, FiniteMap) and isinstance(inner, FiniteMap):
        return FiniteMap(tuple(outer.table[v] for v in inner.table))
    if isinstance(outer, BlockCode) and isinstance(inner, BlockCode):
        return _compose_codes(outer, inner)
    raise BackendMismatchError("cannot compose maps from different backends")


def _compose_codes(outer: BlockCode, inner: BlockCode) -> BlockCode:
    import numpy as np

    k = inner.alphabet
    if k != outer.alphabet:
        raise BackendMismatchError("alphabet mismatch")
    w = inner.window + outer.window - 1
    z = np.arange(k**w, dtype=np.int64)
    inner_rule = np.asarray(inner.rule, dtype=np.int64)
    outer_rule = np.asarray(outer.rule, dtype=np.int64)
    wi_mask = k**inner.window
    mid = np.zeros_like(z)
    for j in range(outer.window):
        shift = k ** (w - inner.window - j)
        sub = (z // shift) % wi_mask
        mid = mid * k + inner_rule[sub]
    return BlockCode(k, w, outer_rule[mid].tolist())


# ---------------------------------------------------------------------------
# eventually periodic points (exact shift-space points)


def canonical_ep_point(prefix: str, cycle: str):
    """Canonical (prefix, cycle) form of the point ``prefix + cycle * inf``."""
    if not cycle:
        raise ValueError("cycle must be nonempty")
    for d in range(1, len(cycle) + 1):
        if len(cycle) % d == 0 and cycle == cycle[:d] * (len(cycle) // d):
            cycle = cycle[:d]
            break
    while prefix and prefix[-1] == cycle[-1]:
        prefix = prefix[:-1]
        cycle = cycle[-1] + cycle[:-1]
    return prefix, cycle


def ep_point_symbol(point, i: int) -> str:
    prefix, cycle = point
    if i < len(prefix):
        return prefix[i]
    return cycle[(i - len(prefix)) % len(cycle)]


def apply_code_to_ep(code: BlockCode, point):
    prefix, cycle = point
    w = code.window
    need = len(prefix) + len(cycle) + w - 1
    unrolled = "".join(ep_point_symbol(point, i) for i in range(need))
    out = code.output_word(unrolled)
    return canonical_ep_point(out[: len(prefix)], out[len(prefix) :])


# ---------------------------------------------------------------------------
# systems


class System:
    """A space plus an eventually periodic map sequence over a finite family.

    ``word_mode`` records how finite words pick maps: ``"sequence"`` letters
    are 1-based sequence positions (the non-autonomous reading), ``"family"``
    letters index the family directly (the generic-system reading).
    """

    def __init__(self, space, family, prefix=(), period=(0,), *,
                 word_mode="sequence", max_window=DEFAULT_MAX_WINDOW):
        family = tuple(family)
        prefix = tuple(prefix)
        period = tuple(period)
        if not family:
            raise InvalidSequenceError("family must be nonempty")
        if not period:
            raise InvalidSequenceError("period must be nonempty")
        for i in itertools.chain(prefix, period):
            if not 0 <= i < len(family):
                raise InvalidSequenceError(f"sequence index {i} out of range")
        if isinstance(space, FiniteSpace):
            self.backend = FINITE
            for f in family:
                if not isinstance(f, FiniteMap) or f.n != space.n:
                    raise InvalidMapError("family map does not act on this space")
        elif isinstance(space, ShiftSpace):
            self.backend = SHIFT
            for f in family:
                if not isinstance(f, BlockCode) or f.alphabet != space.alphabet:
                    raise InvalidMapError("family code does not act on this space")
        else:
            raise TypeError("space must be FiniteSpace or ShiftSpace")
        if word_mode not in ("sequence", "family"):
            raise ValueError("word_mode must be 'sequence' or 'family'")
        self.space = space
        self.family = family
        self.prefix = prefix
        self.period = period
        self.word_mode = word_mode
        self.max_window = max_window
        self._trace = None

    def map_at(self, n: int):
        """The n-th map of the sequence (1-based)."""
        if n < 1:
            raise InvalidIndexError(f"sequence position {n} must be >= 1")
        if n <= len(self.prefix):
            return self.family[self.prefix[n - 1]]
        return self.family[self.period[(n - len(self.prefix) - 1) % len(self.period)]]

    def sequence_index(self, n: int) -> int:
        if n < 1:
            raise InvalidIndexError(f"sequence position {n} must be >= 1")
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        return self.period[(n - len(self.prefix) - 1) % len(self.period)]

    def effective_maps(self):
        """Distinct maps occurring in the sequence, tagged with their smallest
        1-based position (sequence mode) or family letter (family mode)."""
        out = []
        seen = set()
        if self.word_mode == "family":
            for i, f in enumerate(self.family):
                if f not in seen:
                    seen.add(f)
                    out.append((i + 1, f))
            return out
        for n in range(1, len(self.prefix) + len(self.period) + 1):
            f = self.map_at(n)
            if f not in seen:
                seen.add(f)
                out.append((n, f))
        return out

    def word_map(self, alpha):
        """``f_alpha``: the first letter's map is applied first."""
        alpha = tuple(alpha)
        if not alpha or any(a < 1 for a in alpha):
            raise InvalidIndexError("words are nonempty tuples of positive letters")
        if self.word_mode == "family":
            if any(a > len(self.family) for a in alpha):
                raise InvalidIndexError("family letter out of range")
            maps = [self.family[a - 1] for a in alpha]
        else:
            maps = [self.map_at(a) for a in alpha]
        g = maps[0]
        for f in maps[1:]:
            g = compose(f, g)
        return g

    def iterate(self, n: int):
        """The n-th iterate ``f_n o ... o f_1``."""
        if n < 1:
            raise InvalidIndexError(f"iterate index {n} must be >= 1")
        if self.backend == FINITE:
            tr = self.trace()
            return tr.at(n)
        g = self.map_at(1)
        for i in range(2, n + 1):
            g = compose(self.map_at(i), g)
            if g.window > self.max_window:
                raise HorizonError(
                    f"iterate window {g.window} exceeds cap {self.max_window}"
                )
        return g

    def trace(self) -> "CompositionTrace":
        if self.backend != FINITE:
            raise BackendMismatchError("composition traces are finite-backend only")
        if self._trace is None:
            self._trace = composition_trace(self)
        return self._trace

    def shifted(self, m: int) -> "System":
        """The system whose sequence starts at position m+1."""
        if m < 0:
            raise InvalidIndexError("shift must be nonnegative")
        idx = [self.sequence_index(n) for n in range(m + 1, m + 1 + max(len(self.prefix) - m, 0))]
        if m >= len(self.prefix):
            off = (m - len(self.prefix)) % len(self.period)
            period = self.period[off:] + self.period[:off]
            return System(self.space, self.family, (), period,
                          word_mode=self.word_mode, max_window=self.max_window)
        return System(self.space, self.family, tuple(idx), self.period,
                      word_mode=self.word_mode, max_window=self.max_window)

    def all_surjective(self) -> bool:
        return all(is_surjective(f).is_true for _, f in self.effective_maps())

    def all_injective(self) -> bool:
        return all(is_injective(f).is_true for _, f in self.effective_maps())

    def all_commuting(self) -> bool:
        maps = [f for _, f in self.effective_maps()]
        return all(
            compose(f, g) == compose(g, f) for f in maps for g in maps
        )

    def __repr__(self):
        return (
            f"System({self.backend}, |family|={len(self.family)}, "
            f"prefix={list(self.prefix)}, period={list(self.period)})"
        )


class CompositionTrace:
    """The eventually periodic sequence of iterates ``g_n = f_1^n``.

    ``maps[i]`` is ``g_{i+1}``; ``g_{s+p+i} = g_{s+i}`` for all i >= 1, so
    positions ``1..s+p`` exhaust the distinct iterates and positions
    ``s+1..s+p`` are exactly the cofinally recurring ones.
    """

    __slots__ = ("maps", "preperiod", "period")

    def __init__(self, maps, preperiod, period):
        self.maps = tuple(maps)
        self.preperiod = preperiod
        self.period = period
        assert len(self.maps) == preperiod + period

    def __len__(self):
        return len(self.maps)

    def at(self, n: int):
        if n < 1:
            raise InvalidIndexError("iterate index must be >= 1")
        if n <= len(self.maps):
            return self.maps[n - 1]
        s, p = self.preperiod, self.period
        return self.maps[s + (n - s - 1) % p]

    def cycle_positions(self):
        """1-based positions of the recurring iterates."""
        return range(self.preperiod + 1, self.preperiod + self.period + 1)


def composition_trace(sys: System) -> CompositionTrace:
    if sys.backend != FINITE:
        raise BackendMismatchError("composition traces are finite-backend only")
    p0, length = len(sys.prefix), len(sys.period)
    gs = []
    seen = {}
    g = None
    n = 0
    while True:
        n += 1
        f = sys.map_at(n)
        g = f if g is None else compose(f, g)
        if n > p0:
            key = ((n - p0 - 1) % length, g)
            if key in seen:
                m = seen[key]
                return CompositionTrace(gs, preperiod=m - 1, period=n - m)
            seen[key] = n
        gs.append(g)


def symbolic_trace(sys: System, horizon: int):
    """Iterates of a shift-backend system up to ``horizon``.

    Returns ``(maps, preperiod, period)`` with ``period > 0`` when the
    normalized codes started repeating (then the list is exact and complete),
    else ``period = 0`` and the list is a truncation.
    """
    if sys.backend != SHIFT:
        raise BackendMismatchError("symbolic traces are shift-backend only")
    p0, length = len(sys.prefix), len(sys.period)
    gs = []
    seen = {}
    g = None
    for n in range(1, horizon + 1):
        f = sys.map_at(n)
        g = f if g is None else compose(f, g)
        if g.window > sys.max_window:
            raise HorizonError(
                f"iterate window {g.window} exceeds cap {sys.max_window}"
            )
        if n > p0:
            key = ((n - p0 - 1) % length, g)
            if key in seen:
                m = seen[key]
                return gs, m - 1, n - m
            seen[key] = n
        gs.append(g)
    return gs, len(gs), 0


# ---------------------------------------------------------------------------
# images, preimages and map classification


def image(f, pset: PointSet) -> PointSet:
    """Exact forward image (finite); depth-preserving cylinder hull (shift).

    On the shift backend the true image of a clopen set need not be clopen;
    the returned set is the smallest cylinder union at the natural output
    depth containing it.  Exact decisions about images should go through
    ``preimage`` / ``image_covers`` instead.
    """
    if isinstance(f, FiniteMap):
        mask = 0
        m = pset.mask
        while m:
            low = m & -m
            mask |= 1 << f.table[low.bit_length() - 1]
            m ^= low
        return PointSet.from_mask(mask, f.n)
    depth = max(pset.depth() - f.window + 1, 0)
    return image_hull(f, pset, depth)


def image_hull(f: BlockCode, pset: PointSet, depth: int) -> PointSet:
    """Smallest depth-``depth`` cylinder union containing ``f(pset)``."""
    k = f.alphabet
    need = depth + f.window - 1
    outs = set()

    def feasible(prefix: str) -> bool:
        return any(w.startswith(prefix) or prefix.startswith(w) for w in pset.words)

    def walk(prefix: str):
        if len(prefix) == need:
            outs.add(f.output_word(prefix)[:depth])
            return
        for c in range(k):
            nxt = prefix + str(c)
            if feasible(nxt):
                walk(nxt)

    if not pset.is_empty():
        if need == 0:
            outs.add("")
        else:
            walk("")
    return PointSet.from_cylinders(outs, k)


def preimage(f, pset: PointSet) -> PointSet:
    """Exact full preimage on both backends."""
    if isinstance(f, FiniteMap):
        mask = 0
        for x in range(f.n):
            if pset.mask >> f.table[x] & 1:
                mask |= 1 << x
        return PointSet.from_mask(mask, f.n)
    k = f.alphabet
    if pset.is_empty():
        return PointSet.from_cylinders([], k)
    if pset.is_full():
        return PointSet.from_cylinders([""], k)
    found = []

    def walk(prefix: str):
        out = f.output_word(prefix)
        # prune once the produced output already leaves pset
        if any(w.startswith(out) or out.startswith(w) for w in pset.words):
            if any(out.startswith(w) for w in pset.words):
                found.append(prefix)
                return
            for c in range(k):
                walk(prefix + str(c))

    walk("")
    return PointSet.from_cylinders(found, k)


def image_covers(f: BlockCode, source: PointSet, target: PointSet,
                 state_cap: int = 200000) -> bool:
    """Exact decision of ``target subset f(source)`` for clopen sets.

    Runs the powerset construction of the window automaton restricted to
    inputs compatible with ``source``: ``target`` is covered iff along every
    output in ``target`` the set of viable input windows never empties.
    """
    if target.is_empty():
        return True
    if source.is_empty():
        return False
    k, w = f.alphabet, f.window
    d_src = source.depth()
    m = max(d_src, w - 1)
    q = m - w + 1  # outputs fixed by the first m input symbols

    def src_ok(word: str) -> bool:
        return any(word.startswith(a) for a in source.words) or any(
            a.startswith(word) for a in source.words
        )

    init: dict[str, set[str]] = {}
    words = [""]
    for _ in range(m):
        words = [u + str(c) for u in words for c in range(k) if src_ok(u + str(c))]
    for u in words:
        init.setdefault(f.output_word(u), set()).add(u[q:])

    def step(windows: frozenset, b: str) -> frozenset:
        nxt = set()
        for win in windows:
            for c in range(k):
                if str(f.rule_of(win + str(c))) == b:
                    nxt.add((win + str(c))[1:])
        return frozenset(nxt)

    safe_cache: dict[frozenset, bool] = {}

    def always_alive(windows: frozenset) -> bool:
        # safety: no output continuation may kill every viable input window;
        # a safe start makes every reachable subset safe too, so those (and
        # only those) may be cached in bulk
        if windows in safe_cache:
            return safe_cache[windows]
        stack = [windows]
        seen = set()
        while stack:
            s = stack.pop()
            if s in seen or safe_cache.get(s):
                continue
            seen.add(s)
            if len(seen) > state_cap:
                raise HorizonError("cover check exceeded its state cap")
            for b in range(k):
                nxt = step(s, str(b))
                if not nxt or safe_cache.get(nxt) is False:
                    safe_cache[windows] = False
                    return False
                stack.append(nxt)
        for t in seen:
            safe_cache[t] = True
        return True

    def tgt_prefix_ok(word: str) -> bool:
        return any(word.startswith(a) for a in target.words) or any(
            a.startswith(word) for a in target.words
        )

    def tgt_inside(word: str) -> bool:
        return any(word.startswith(a) for a in target.words)

    # every target-compatible output prefix of length q must be producible
    words_t = [""]
    for _ in range(q):
        words_t = [
            u + str(c) for u in words_t for c in range(k) if tgt_prefix_ok(u + str(c))
        ]
    for u in words_t:
        if u not in init:
            return False

    # then walk target outputs symbol by symbol until the target constraint
    # is resolved, and require unconstrained safety from there on
    stack = [
        (kappa, frozenset(wins))
        for kappa, wins in init.items()
        if tgt_prefix_ok(kappa)
    ]
    while stack:
        out_word, wins = stack.pop()
        if not wins:
            return False
        if tgt_inside(out_word):
            if not always_alive(wins):
                return False
            continue
        for b in range(k):
            nxt_word = out_word + str(b)
            if not tgt_prefix_ok(nxt_word):
                continue
            stack.append((nxt_word, step(wins, str(b))))
    return True


def is_surjective(f) -> Verdict:
    if isinstance(f, FiniteMap):
        return Verdict.of(len(set(f.table)) == f.n)
    space = ShiftSpace(f.alphabet)
    return Verdict.of(image_covers(f, space.full_set(), space.full_set()))


def is_injective(f) -> Verdict:
    if isinstance(f, FiniteMap):
        return Verdict.of(len(set(f.table)) == f.n)
    return _code_injective(f)


def _code_injective(f: BlockCode) -> Verdict:
    """Exact injectivity for block codes on the one-sided full shift.

    Two distinct points with equal images exist iff the pair automaton on
    window pairs admits an infinite run through a diverged state.
    """
    k, w = f.alphabet, f.window
    if w == 1:
        return Verdict.of(len(set(f.rule)) == k)
    wins = [""]
    for _ in range(w - 1):
        wins = [u + str(c) for u in wins for c in range(k)]
    nodes = {(a, b, d) for a in wins for b in wins for d in (False, True)}

    def succs(node):
        a, b, div = node
        for ca in range(k):
            for cb in range(k):
                if f.rule_of(a + str(ca)) == f.rule_of(b + str(cb)):
                    yield (
                        (a + str(ca))[1:],
                        (b + str(cb))[1:],
                        div or ca != cb,
                    )

    # keep only nodes with infinite equal-output continuations
    live = set(nodes)
    changed = True
    while changed:
        changed = False
        for node in list(live):
            if not any(s in live for s in succs(node)):
                live.discard(node)
                changed = True
    # a collision is a live run from a legal start that diverges somewhere
    frontier = [(a, b, a != b) for a in wins for b in wins]
    reachable = {s for s in frontier if s in live}
    frontier = list(reachable)
    while frontier:
        node = frontier.pop()
        for s in succs(node):
            if s in live and s not in reachable:
                reachable.add(s)
                frontier.append(s)
    collision = any(div for (_, _, div) in reachable)
    return Verdict.of(not collision)


def is_open(f) -> Verdict:
    if isinstance(f, FiniteMap):
        return Verdict.true()  # discrete topology: every map is open
    k, w = f.alphabet, f.window
    if w == 1:
        return Verdict.of(len(set(f.rule)) == k)
    # relabelled shift powers are open; other codes are left undecided
    for pos in range(w):
        images = {}
        depends_only_pos = True
        for idx, v in enumerate(f.rule):
            digits = []
            x = idx
            for _ in range(w):
                digits.append(x % k)
                x //= k
            digits.reverse()
            key = digits[pos]
            if key in images and images[key] != v:
                depends_only_pos = False
                break
            images[key] = v
        if depends_only_pos and len(set(images.values())) == k:
            return Verdict.true()
    return Verdict.unknown(horizon=0)

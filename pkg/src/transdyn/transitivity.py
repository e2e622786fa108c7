"""Hitting-time sets and the transitivity-property deciders.

Every property comes with the full list of its equivalent formulations,
each implemented as an independently coded condition checker; the
equivalence suites run all of them and compare.  On the finite backend the
composition trace makes every quantifier exact.  Quantifiers over nonempty
open sets range over all nonempty subsets, in increasing bit-mask order,
so reported witnesses are lexicographically minimal.

Conditions whose proofs need a perfect space are still computable here but
are excluded from finite-backend agreement assertions and refuse to run
through :func:`decide` without ``allow_imperfect``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    BackendMismatchError,
    PerfectSpaceRequiredError,
    UnknownVariantError,
)
from .space import FINITE, SHIFT, PointSet
from .system import System
from .verdict import Verdict

# property ids
TT = "TT"
EXT_TT = "ExtTT"
ST = "ST"
STRONG_EXT_TT = "StrongExtTT"
VST = "VST"
EXT_MINIMAL = "ExtMinimal"
EXACT = "Exact"
FULLY_EXACT = "FullyExact"
EXACT_TT = "ExactTT"
STRONG_EXACT_TT = "StrongExactTT"
TM = "TM"
LEO = "LEO"

ALL_PROPERTIES = (
    TT, EXT_TT, ST, STRONG_EXT_TT, VST, EXT_MINIMAL,
    EXACT, FULLY_EXACT, EXACT_TT, STRONG_EXACT_TT, TM, LEO,
)


@dataclass(frozen=True)
class HitSet:
    """Exact eventually periodic representation of ``N(U, V)``.

    ``preperiod[i]`` answers membership of ``i+1``; ``cycle`` repeats from
    there on.  With ``exact=False`` (symbolic truncation) only the explicit
    entries are meaningful.
    """

    preperiod: tuple
    cycle: tuple
    exact: bool = True

    def contains(self, n: int) -> bool:
        if n < 1:
            return False
        if n <= len(self.preperiod):
            return self.preperiod[n - 1]
        if not self.cycle:
            return False
        return self.cycle[(n - len(self.preperiod) - 1) % len(self.cycle)]

    def nonempty(self) -> bool:
        return any(self.preperiod) or any(self.cycle)

    def infinite(self) -> bool:
        return any(self.cycle)

    def cofinite(self) -> bool:
        return bool(self.cycle) and all(self.cycle)

    def first_hit(self):
        for i, b in enumerate(self.preperiod):
            if b:
                return i + 1
        for i, b in enumerate(self.cycle):
            if b:
                return len(self.preperiod) + i + 1
        return None


@dataclass(frozen=True)
class WordHitSet:
    """Witness words for ``N_e(U, V)`` up to a length bound.

    ``saturated=True`` means the breadth-first closure of set images reached
    a fixed point, so emptiness (and unboundedness) are exact even when no
    witness short enough was stored.
    """

    words: tuple
    bound: int
    saturated: bool
    nonempty_exact: bool = None
    unbounded_exact: bool = None

    def nonempty(self) -> bool:
        if self.saturated:
            return self.nonempty_exact
        return bool(self.words)

    def infinite(self) -> bool:
        if self.saturated:
            return self.unbounded_exact
        return None


# ---------------------------------------------------------------------------
# finite-backend evaluation context


def finite_evaluator(sys: System) -> "FiniteEvaluator":
    """Shared per-system evaluator (the tables are worth caching)."""
    ev = getattr(sys, "_finite_evaluator", None)
    if ev is None:
        ev = FiniteEvaluator(sys)
        sys._finite_evaluator = ev
    return ev


class FiniteEvaluator:
    """Caches trace image/preimage tables for one finite-backend system."""

    MAX_POINTS = 16  # subset quantifiers enumerate 2^n masks

    def __init__(self, sys: System):
        if sys.backend != FINITE:
            raise BackendMismatchError("finite evaluator needs a finite backend")
        if sys.space.n > self.MAX_POINTS:
            raise BackendMismatchError(
                f"subset quantifiers support at most {self.MAX_POINTS} points"
            )
        self.sys = sys
        self.n = sys.space.n
        self.full = (1 << self.n) - 1
        self.tr = sys.trace()
        self.maps = self.tr.maps
        self.T = len(self.maps)
        self.img = [self._img_table(g.table) for g in self.maps]
        self.pre = [self._pre_table(g.table) for g in self.maps]
        self.eff = sys.effective_maps()
        self.eff_img = {pos: self._img_table(f.table) for pos, f in self.eff}
        self.eff_pre = {pos: self._pre_table(f.table) for pos, f in self.eff}
        self._word_forward: dict[int, tuple] = {}
        self._word_backward: dict[int, tuple] = {}
        self._balls: dict = {}

    def _img_table(self, table):
        size = 1 << self.n
        out = [0] * size
        for m in range(1, size):
            low = m & -m
            out[m] = out[m ^ low] | (1 << table[low.bit_length() - 1])
        return out

    def _pre_table(self, table):
        size = 1 << self.n
        single = [0] * self.n
        for x, y in enumerate(table):
            single[y] |= 1 << x
        out = [0] * size
        for m in range(1, size):
            low = m & -m
            out[m] = out[m ^ low] | single[low.bit_length() - 1]
        return out

    def opene_masks(self):
        return range(1, 1 << self.n)

    def cycle_indices(self):
        return range(self.tr.preperiod, self.T)

    def forward_union(self, mask: int, upto: int | None = None) -> int:
        acc = 0
        for t in range(upto if upto is not None else self.T):
            acc |= self.img[t][mask]
        return acc

    def backward_union(self, mask: int, upto: int | None = None) -> int:
        acc = 0
        for t in range(upto if upto is not None else self.T):
            acc |= self.pre[t][mask]
        return acc

    def word_forward(self, mask: int):
        """(union of f_alpha(U) over all words, set of reachable image masks)."""
        if mask not in self._word_forward:
            tables = list(self.eff_img.values())
            seen = set()
            frontier = [mask]
            union = 0
            while frontier:
                cur = frontier.pop()
                for tab in tables:
                    nxt = tab[cur]
                    if nxt not in seen:
                        seen.add(nxt)
                        union |= nxt
                        frontier.append(nxt)
            self._word_forward[mask] = (union, frozenset(seen))
        return self._word_forward[mask]

    def word_backward(self, mask: int):
        if mask not in self._word_backward:
            tables = list(self.eff_pre.values())
            seen = set()
            frontier = [mask]
            union = 0
            while frontier:
                cur = frontier.pop()
                for tab in tables:
                    nxt = tab[cur]
                    if nxt not in seen:
                        seen.add(nxt)
                        union |= nxt
                        frontier.append(nxt)
            self._word_backward[mask] = (union, frozenset(seen))
        return self._word_backward[mask]

    def word_reach_unbounded(self, mask: int, targets_pred) -> bool:
        """Are there arbitrarily long words alpha with f_alpha(U) meeting the
        target?  True iff a qualifying image mask is reachable through a
        cycle of the mask graph."""
        tables = list(self.eff_img.values())
        seen = set()
        frontier = [mask]
        while frontier:
            cur = frontier.pop()
            for tab in tables:
                nxt = tab[cur]
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        # masks lying on cycles of the reachable part
        on_cycle = set()
        for m in seen:
            stack = [tab[m] for tab in tables]
            visited = set()
            while stack:
                c = stack.pop()
                if c == m:
                    on_cycle.add(m)
                    break
                if c in visited:
                    continue
                visited.add(c)
                stack.extend(tab[c] for tab in tables)
        pumped = set()
        frontier = list(on_cycle)
        pumped |= on_cycle
        while frontier:
            cur = frontier.pop()
            for tab in tables:
                nxt = tab[cur]
                if nxt not in pumped:
                    pumped.add(nxt)
                    frontier.append(nxt)
        return any(targets_pred(m) for m in pumped)

    def orbit_mask(self, x: int) -> int:
        acc = 0
        for g in self.maps:
            acc |= 1 << g.table[x]
        return acc

    def negative_orbit_mask(self, x: int, upto: int | None = None) -> int:
        return self.backward_union(1 << x, upto)

    def point_word_reach(self, x: int) -> int:
        maps = [f for _, f in self.eff]
        reached = 0
        frontier = [x]
        while frontier:
            nxt = []
            for y in frontier:
                for f in maps:
                    z = f.table[y]
                    if not reached >> z & 1:
                        reached |= 1 << z
                        nxt.append(z)
            frontier = nxt
        return reached

    def eps_grid(self):
        return self.sys.space.epsilon_grid()

    def ball_mask(self, center: int, eps) -> int:
        key = (center, eps)
        if key not in self._balls:
            self._balls[key] = self.sys.space.ball(center, eps).mask
        return self._balls[key]

    def eps_dense(self, mask: int, eps) -> bool:
        return all(mask & self.ball_mask(x, eps) for x in range(self.n))

    def pset(self, mask: int) -> PointSet:
        return PointSet.from_mask(mask, self.n)


def hitting_set(sys: System, u: PointSet, v: PointSet, horizon: int = 32) -> HitSet:
    """``N(U, V)`` as an eventually periodic membership pattern."""
    if sys.backend == FINITE:
        ev = finite_evaluator(sys)
        um = u.mask
        bits = [bool(ev.img[t][um] & v.mask) for t in range(ev.T)]
        s = ev.tr.preperiod
        if u.is_empty() or v.is_empty():
            return HitSet((False,) * s, (False,) * ev.tr.period, True)
        return HitSet(tuple(bits[:s]), tuple(bits[s:]), True)
    from .symbolic import symbolic_hitting_set

    return symbolic_hitting_set(sys, u, v, horizon)


def extended_hitting_set(sys: System, u: PointSet, v: PointSet,
                         bound: int = 4) -> WordHitSet:
    """``N_e(U, V)``: witness words in length-lex order plus exact emptiness
    information from breadth-first saturation (finite backend)."""
    if sys.backend != FINITE:
        from .symbolic import symbolic_extended_hitting_set

        return symbolic_extended_hitting_set(sys, u, v, bound)
    ev = finite_evaluator(sys)
    letters = [pos for pos, _ in ev.eff]
    words = []
    if not u.is_empty() and not v.is_empty():
        layer = [((), u.mask)]
        for _ in range(bound):
            nxt = []
            for word, mask in layer:
                for pos in letters:
                    w2 = word + (pos,)
                    m2 = ev.eff_img[pos][mask]
                    if m2 & v.mask:
                        words.append(w2)
                    nxt.append((w2, m2))
            layer = nxt
    union, seen = ev.word_forward(u.mask)
    nonempty = (not u.is_empty()) and (not v.is_empty()) and bool(union & v.mask)
    unbounded = (
        nonempty
        and ev.word_reach_unbounded(u.mask, lambda m: bool(m & v.mask))
    )
    return WordHitSet(tuple(words), bound, True, nonempty, unbounded)


# ---------------------------------------------------------------------------
# condition checkers (finite backend)
#
# each returns (bool, witness-or-None); condition functions are deliberately
# separate code paths so the equivalence suites cross-validate real variety


def _c_tt_forward_hit_search(ev):
    for um in ev.opene_masks():
        for vm in ev.opene_masks():
            if not any(ev.img[t][um] & vm for t in range(ev.T)):
                return False, (um, vm)
    return True, None


def _c_tt_preimage_hit_search(ev):
    for um in ev.opene_masks():
        for vm in ev.opene_masks():
            if not any(ev.pre[t][um] & vm for t in range(ev.T)):
                return False, (um, vm)
    return True, None


def _c_tt_hitting_set_nonempty(ev):
    for um in ev.opene_masks():
        for vm in ev.opene_masks():
            bits = [bool(ev.img[t][um] & vm) for t in range(ev.T)]
            hs = HitSet(tuple(bits[: ev.tr.preperiod]), tuple(bits[ev.tr.preperiod :]))
            if not hs.nonempty():
                return False, (um, vm)
    return True, None


def _c_tt_hitting_set_infinite(ev):
    for um in ev.opene_masks():
        for vm in ev.opene_masks():
            if not any(ev.img[t][um] & vm for t in ev.cycle_indices()):
                return False, (um, vm)
    return True, None


def _c_tt_dense_orbit_exists(ev):
    for x in range(ev.n):
        if ev.orbit_mask(x) == ev.full:
            return True, x
    return False, None


def _c_tt_transitive_points_dense(ev):
    pts = [x for x in range(ev.n) if ev.orbit_mask(x) == ev.full]
    return len(pts) == ev.n, tuple(pts)


def _c_tt_image_union_dense(ev):
    for vm in ev.opene_masks():
        if ev.forward_union(vm) != ev.full:
            return False, vm
    return True, None


def _c_tt_image_union_eps_dense(ev):
    for um in ev.opene_masks():
        for eps in ev.eps_grid():
            hit = False
            acc = 0
            for t in range(ev.T):
                acc |= ev.img[t][um]
                if ev.eps_dense(acc, eps):
                    hit = True
                    break
            if not hit:
                return False, (um, eps)
    return True, None


def _c_tt_preimage_union_dense(ev):
    for um in ev.opene_masks():
        if ev.backward_union(um) != ev.full:
            return False, um
    return True, None


def _c_tt_preimage_union_eps_dense(ev):
    for um in ev.opene_masks():
        for eps in ev.eps_grid():
            hit = False
            acc = 0
            for t in range(ev.T):
                acc |= ev.pre[t][um]
                if ev.eps_dense(acc, eps):
                    hit = True
                    break
            if not hit:
                return False, (um, eps)
    return True, None


def _c_ext_word_hit_search(ev):
    for um in ev.opene_masks():
        union, _ = ev.word_forward(um)
        for vm in ev.opene_masks():
            if not union & vm:
                return False, (um, vm)
    return True, None


def _c_ext_word_preimage_hit_search(ev):
    for um in ev.opene_masks():
        union, _ = ev.word_backward(um)
        for vm in ev.opene_masks():
            if not union & vm:
                return False, (um, vm)
    return True, None


def _reachable_image_masks(ev, start: int) -> set:
    """All masks ``f_alpha(start)`` over nonempty words (fresh breadth-first
    walk, deliberately not sharing the cached union machinery)."""
    tables = list(ev.eff_img.values())
    seen = set()
    frontier = [start]
    while frontier:
        cur = frontier.pop()
        for tab in tables:
            nxt = tab[cur]
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def _c_ext_word_hitting_nonempty(ev):
    for um in ev.opene_masks():
        reached = _reachable_image_masks(ev, um)
        for vm in ev.opene_masks():
            if not any(m & vm for m in reached):
                return False, (um, vm)
    return True, None


def _c_ext_word_hitting_infinite(ev):
    for um in ev.opene_masks():
        for vm in ev.opene_masks():
            if not ev.word_reach_unbounded(um, lambda m: bool(m & vm)):
                return False, (um, vm)
    return True, None


def _c_ext_orbit_dense_exists(ev):
    for x in range(ev.n):
        if ev.point_word_reach(x) == ev.full:
            return True, x
    return False, None


def _c_ext_transitive_points_dense(ev):
    pts = [x for x in range(ev.n) if ev.point_word_reach(x) == ev.full]
    return len(pts) == ev.n, tuple(pts)


def _c_ext_word_image_union_dense(ev):
    for vm in ev.opene_masks():
        union, _ = ev.word_forward(vm)
        if union != ev.full:
            return False, vm
    return True, None


def _c_ext_word_image_union_eps_dense(ev):
    for vm in ev.opene_masks():
        union, _ = ev.word_forward(vm)
        for eps in ev.eps_grid():
            if not ev.eps_dense(union, eps):
                return False, (vm, eps)
    return True, None


def _c_ext_word_preimage_union_dense(ev):
    for vm in ev.opene_masks():
        union, _ = ev.word_backward(vm)
        if union != ev.full:
            return False, vm
    return True, None


def _c_ext_word_preimage_union_eps_dense(ev):
    for vm in ev.opene_masks():
        union, _ = ev.word_backward(vm)
        for eps in ev.eps_grid():
            if not ev.eps_dense(union, eps):
                return False, (vm, eps)
    return True, None


def _strong_minus_masks(ev):
    out = []
    pres = list(ev.eff_pre.values())
    for m in ev.opene_masks():
        if all(tab[m] & ~m == 0 for tab in pres):
            out.append(m)
    return out


def _strong_plus_masks(ev):
    out = []
    imgs = list(ev.eff_img.values())
    for m in range(1 << ev.n):
        if all(tab[m] & ~m == 0 for tab in imgs):
            out.append(m)
    return out


def _c_ext_strong_minus_opene_dense(ev):
    for m in _strong_minus_masks(ev):
        if m != ev.full:
            return False, m
    return True, None


def _c_ext_strong_plus_closed_small(ev):
    for m in _strong_plus_masks(ev):
        if m not in (0, ev.full):
            # proper nonempty closed strong + invariant set with interior
            return False, m
    return True, None


def _c_st_image_union_covers(ev):
    for vm in ev.opene_masks():
        if ev.forward_union(vm) != ev.full:
            return False, vm
    return True, None


def _c_st_point_in_some_image(ev):
    for um in ev.opene_masks():
        for x in range(ev.n):
            if not any(ev.img[t][um] >> x & 1 for t in range(ev.T)):
                return False, (um, x)
    return True, None


def _c_st_point_hitting_nonempty(ev):
    for um in ev.opene_masks():
        for x in range(ev.n):
            bits = [bool(ev.img[t][um] >> x & 1) for t in range(ev.T)]
            hs = HitSet(tuple(bits[: ev.tr.preperiod]), tuple(bits[ev.tr.preperiod :]))
            if not hs.nonempty():
                return False, (um, x)
    return True, None


def _c_st_negative_orbit_dense(ev):
    for x in range(ev.n):
        if ev.negative_orbit_mask(x) != ev.full:
            return False, x
    return True, None


def _c_st_negative_orbit_eps_dense(ev):
    for x in range(ev.n):
        for eps in ev.eps_grid():
            hit = False
            acc = 0
            for t in range(ev.T):
                acc |= ev.pre[t][1 << x]
                if ev.eps_dense(acc, eps):
                    hit = True
                    break
            if not hit:
                return False, (x, eps)
    return True, None


def _c_sext_word_image_union_covers(ev):
    for vm in ev.opene_masks():
        union, _ = ev.word_forward(vm)
        if union != ev.full:
            return False, vm
    return True, None


def _c_sext_point_in_some_word_image(ev):
    for um in ev.opene_masks():
        _, seen = ev.word_forward(um)
        covered = 0
        for m in seen:
            covered |= m
        for x in range(ev.n):
            if not covered >> x & 1:
                return False, (um, x)
    return True, None


def _c_sext_point_word_hitting_nonempty(ev):
    for um in ev.opene_masks():
        reached = _reachable_image_masks(ev, um)
        for x in range(ev.n):
            if not any(m >> x & 1 for m in reached):
                return False, (um, x)
    return True, None


def _c_sext_extended_negative_orbit_dense(ev):
    for x in range(ev.n):
        union, _ = ev.word_backward(1 << x)
        if union != ev.full:
            return False, x
    return True, None


def _c_sext_extended_negative_orbit_eps_dense(ev):
    for x in range(ev.n):
        union, _ = ev.word_backward(1 << x)
        for eps in ev.eps_grid():
            if not ev.eps_dense(union, eps):
                return False, (x, eps)
    return True, None


def _c_sext_strong_minus_nonempty_dense(ev):
    for m in _strong_minus_masks(ev):
        if m != ev.full:
            return False, m
    return True, None


def _c_vst_uniform_horizon_cover(ev):
    worst = 0
    for vm in ev.opene_masks():
        acc = 0
        k = None
        for t in range(ev.T):
            acc |= ev.img[t][vm]
            if acc == ev.full:
                k = t + 1
                break
        if k is None:
            return False, vm
        worst = max(worst, k)
    return True, worst


def _c_vst_uniform_eps_dense_negative_orbits(ev):
    worst = 0
    for eps in ev.eps_grid():
        found = None
        for bound in range(1, ev.T + 1):
            if all(
                ev.eps_dense(ev.negative_orbit_mask(x, bound), eps)
                for x in range(ev.n)
            ):
                found = bound
                break
        if found is None:
            return False, eps
        worst = max(worst, found)
    return True, worst


def _c_min_no_proper_strong_plus(ev):
    for m in _strong_plus_masks(ev):
        if m not in (0, ev.full):
            return False, m
    return True, None


def _c_min_every_point_word_hits(ev):
    for um in ev.opene_masks():
        for x in range(ev.n):
            if not ev.point_word_reach(x) & um:
                return False, (um, x)
    return True, None


def _c_min_point_word_hitting_nonempty(ev):
    for x in range(ev.n):
        for um in ev.opene_masks():
            whs = extended_hitting_set(ev.sys, ev.pset(1 << x), ev.pset(um), bound=1)
            if not whs.nonempty():
                return False, (x, um)
    return True, None


def _c_min_extended_orbits_all_dense(ev):
    for x in range(ev.n):
        if ev.point_word_reach(x) != ev.full:
            return False, x
    return True, None


def _c_min_extended_transitive_points_all(ev):
    from .orbit import extended_omega_limit

    pts = [
        x
        for x in range(ev.n)
        if extended_omega_limit(ev.sys, x).points.mask == ev.full
    ]
    return len(pts) == ev.n, tuple(pts)


def _c_min_word_preimage_union_covers(ev):
    for um in ev.opene_masks():
        union, _ = ev.word_backward(um)
        if union != ev.full:
            return False, um
    return True, None


def _c_min_finite_subfamily_preimage_covers(ev):
    # saturation of the backward mask closure is itself the finite witness
    for um in ev.opene_masks():
        union, seen = ev.word_backward(um)
        if union != ev.full:
            return False, um
    return True, None


def _c_min_closed_strong_plus_full(ev):
    for m in _strong_plus_masks(ev):
        if m != 0 and m != ev.full:
            return False, m
    return True, None


def _c_exact_def(ev):
    for um in ev.opene_masks():
        for vm in ev.opene_masks():
            if not any(ev.img[t][um] & ev.img[t][vm] for t in range(ev.T)):
                return False, (um, vm)
    return True, None


def _c_fully_exact_def(ev):
    for um in ev.opene_masks():
        for vm in ev.opene_masks():
            ok = False
            for t in range(ev.T):
                inter = ev.img[t][um] & ev.img[t][vm]
                interior = inter  # discrete topology
                if interior:
                    ok = True
                    break
            if not ok:
                return False, (um, vm)
    return True, None


def _c_fully_exact_union_interior(ev):
    for um in ev.opene_masks():
        for vm in ev.opene_masks():
            acc = 0
            for t in range(ev.T):
                acc |= ev.img[t][um] & ev.img[t][vm]
            if not acc:  # interior of the union, discrete topology
                return False, (um, vm)
    return True, None


def _c_exact_tt_def(ev):
    for um in ev.opene_masks():
        for vm in ev.opene_masks():
            acc = 0
            for t in range(ev.T):
                acc |= ev.img[t][um] & ev.img[t][vm]
            if acc != ev.full:
                return False, (um, vm)
    return True, None


def _c_sexact_simultaneous_cover(ev):
    for um in ev.opene_masks():
        for vm in ev.opene_masks():
            acc = 0
            for t in range(ev.T):
                acc |= ev.img[t][um] & ev.img[t][vm]
            if acc != ev.full:
                return False, (um, vm)
    return True, None


def _c_sexact_product_diagonal(ev):
    from .morphism import product

    prod = product(ev.sys, ev.sys)
    pev = FiniteEvaluator(prod.system)
    n = ev.n
    for um in ev.opene_masks():
        for vm in ev.opene_masks():
            # U x V inside the product space, then the union of product
            # images must contain every diagonal pair (x, x)
            uxv = 0
            for a in range(n):
                if um >> a & 1:
                    for b in range(n):
                        if vm >> b & 1:
                            uxv |= 1 << (a * n + b)
            acc = 0
            for t in range(pev.T):
                acc |= pev.img[t][uxv]
            for x in range(n):
                if not acc >> (x * n + x) & 1:
                    return False, (um, vm, x)
    return True, None


def _c_sexact_product_negative_orbit(ev):
    from .morphism import product

    prod = product(ev.sys, ev.sys)
    pev = FiniteEvaluator(prod.system)
    n = ev.n
    for x in range(n):
        if pev.negative_orbit_mask(x * n + x) != pev.full:
            return False, x
    return True, None


def _c_sexact_pointwise_hit(ev):
    for x in range(ev.n):
        for um in ev.opene_masks():
            for vm in ev.opene_masks():
                if not any(
                    ev.img[t][um] & ev.img[t][vm] & (1 << x) for t in range(ev.T)
                ):
                    return False, (x, um, vm)
    return True, None


def _c_tm_eventual_hitting(ev):
    for um in ev.opene_masks():
        for vm in ev.opene_masks():
            if not all(ev.img[t][um] & vm for t in ev.cycle_indices()):
                return False, (um, vm)
    return True, None


def _c_tm_hitting_cofinite(ev):
    for um in ev.opene_masks():
        for vm in ev.opene_masks():
            bits = [bool(ev.img[t][um] & vm) for t in range(ev.T)]
            hs = HitSet(tuple(bits[: ev.tr.preperiod]), tuple(bits[ev.tr.preperiod :]))
            if not hs.cofinite():
                return False, (um, vm)
    return True, None


def _c_tm_preimages_eventually_eps_dense(ev):
    for um in ev.opene_masks():
        for eps in ev.eps_grid():
            if not all(ev.eps_dense(ev.pre[t][um], eps) for t in ev.cycle_indices()):
                return False, (um, eps)
    return True, None


def _c_tm_images_eventually_eps_dense(ev):
    for um in ev.opene_masks():
        for eps in ev.eps_grid():
            if not all(ev.eps_dense(ev.img[t][um], eps) for t in ev.cycle_indices()):
                return False, (um, eps)
    return True, None


def _c_leo_finite_iterate_onto(ev):
    worst = 0
    for vm in ev.opene_masks():
        k = None
        for t in range(ev.T):
            if ev.img[t][vm] == ev.full:
                k = t + 1
                break
        if k is None:
            return False, vm
        worst = max(worst, k)
    return True, worst


def _c_leo_uniform_point_preimages(ev):
    for eps in ev.eps_grid():
        if not any(
            all(ev.eps_dense(ev.pre[t][1 << x], eps) for x in range(ev.n))
            for t in range(ev.T)
        ):
            return False, eps
    return True, None


def _c_leo_eventual_point_preimages(ev):
    for eps in ev.eps_grid():
        ok = all(
            ev.eps_dense(ev.pre[t][1 << x], eps)
            for t in ev.cycle_indices()
            for x in range(ev.n)
        )
        if not ok:
            return False, eps
    return True, None


@dataclass(frozen=True)
class Condition:
    cid: str
    checker: object
    requires_perfect: bool = False
    requires_surjective: bool = False
    in_finite_agreement: bool = True


_REGISTRY: dict[str, tuple] = {
    TT: (
        "image_union_dense",
        (
            Condition("forward_hit_search", _c_tt_forward_hit_search),
            Condition("preimage_hit_search", _c_tt_preimage_hit_search),
            Condition("hitting_set_nonempty", _c_tt_hitting_set_nonempty),
            Condition("hitting_set_infinite", _c_tt_hitting_set_infinite,
                      requires_perfect=True, in_finite_agreement=False),
            Condition("dense_orbit_exists", _c_tt_dense_orbit_exists,
                      requires_perfect=True, in_finite_agreement=False),
            Condition("transitive_points_dense", _c_tt_transitive_points_dense,
                      requires_perfect=True, in_finite_agreement=False),
            Condition("image_union_dense", _c_tt_image_union_dense),
            Condition("image_union_eps_dense", _c_tt_image_union_eps_dense),
            Condition("preimage_union_dense", _c_tt_preimage_union_dense),
            Condition("preimage_union_eps_dense", _c_tt_preimage_union_eps_dense),
        ),
        (
            ("hitting_set_infinite", "hitting_set_nonempty"),
            ("dense_orbit_exists", "hitting_set_nonempty"),
            ("transitive_points_dense", "dense_orbit_exists"),
        ),
    ),
    EXT_TT: (
        "word_image_union_dense",
        (
            Condition("word_hit_search", _c_ext_word_hit_search),
            Condition("word_preimage_hit_search", _c_ext_word_preimage_hit_search),
            Condition("word_hitting_nonempty", _c_ext_word_hitting_nonempty),
            Condition("word_hitting_infinite", _c_ext_word_hitting_infinite,
                      requires_perfect=True, requires_surjective=True,
                      in_finite_agreement=False),
            Condition("extended_orbit_dense_exists", _c_ext_orbit_dense_exists,
                      requires_perfect=True, requires_surjective=True,
                      in_finite_agreement=False),
            Condition("extended_transitive_points_dense",
                      _c_ext_transitive_points_dense,
                      requires_perfect=True, requires_surjective=True,
                      in_finite_agreement=False),
            Condition("word_image_union_dense", _c_ext_word_image_union_dense),
            Condition("word_image_union_eps_dense",
                      _c_ext_word_image_union_eps_dense),
            Condition("word_preimage_union_dense",
                      _c_ext_word_preimage_union_dense),
            Condition("word_preimage_union_eps_dense",
                      _c_ext_word_preimage_union_eps_dense),
            Condition("strong_minus_opene_dense", _c_ext_strong_minus_opene_dense,
                      requires_surjective=True),
            Condition("strong_plus_closed_small", _c_ext_strong_plus_closed_small,
                      requires_surjective=True),
        ),
        (
            ("word_hitting_infinite", "word_hitting_nonempty"),
            ("extended_orbit_dense_exists", "word_hitting_nonempty"),
            ("extended_transitive_points_dense", "extended_orbit_dense_exists"),
        ),
    ),
    ST: (
        "image_union_covers",
        (
            Condition("image_union_covers", _c_st_image_union_covers),
            Condition("point_in_some_image", _c_st_point_in_some_image),
            Condition("point_hitting_nonempty", _c_st_point_hitting_nonempty),
            Condition("negative_orbit_dense", _c_st_negative_orbit_dense),
            Condition("negative_orbit_eps_dense", _c_st_negative_orbit_eps_dense),
        ),
        (),
    ),
    STRONG_EXT_TT: (
        "word_image_union_covers",
        (
            Condition("word_image_union_covers", _c_sext_word_image_union_covers),
            Condition("point_in_some_word_image", _c_sext_point_in_some_word_image),
            Condition("point_word_hitting_nonempty",
                      _c_sext_point_word_hitting_nonempty),
            Condition("extended_negative_orbit_dense",
                      _c_sext_extended_negative_orbit_dense),
            Condition("extended_negative_orbit_eps_dense",
                      _c_sext_extended_negative_orbit_eps_dense),
            Condition("strong_minus_nonempty_dense",
                      _c_sext_strong_minus_nonempty_dense),
        ),
        (),
    ),
    VST: (
        "uniform_horizon_cover",
        (
            Condition("uniform_horizon_cover", _c_vst_uniform_horizon_cover),
            Condition("uniform_eps_dense_negative_orbits",
                      _c_vst_uniform_eps_dense_negative_orbits),
        ),
        (),
    ),
    EXT_MINIMAL: (
        "no_proper_strong_plus",
        (
            Condition("no_proper_strong_plus", _c_min_no_proper_strong_plus),
            Condition("every_point_word_hits", _c_min_every_point_word_hits),
            Condition("point_word_hitting_nonempty",
                      _c_min_point_word_hitting_nonempty),
            Condition("extended_orbits_all_dense", _c_min_extended_orbits_all_dense),
            Condition("extended_transitive_points_all",
                      _c_min_extended_transitive_points_all),
            Condition("word_preimage_union_covers",
                      _c_min_word_preimage_union_covers),
            Condition("finite_subfamily_preimage_covers",
                      _c_min_finite_subfamily_preimage_covers),
            Condition("closed_strong_plus_full", _c_min_closed_strong_plus_full),
        ),
        (),
    ),
    EXACT: (
        "simultaneous_hit",
        (
            Condition("simultaneous_hit", _c_exact_def),
        ),
        (),
    ),
    FULLY_EXACT: (
        "simultaneous_interior_hit",
        (
            Condition("simultaneous_interior_hit", _c_fully_exact_def),
            Condition("union_interior_nonempty", _c_fully_exact_union_interior),
        ),
        (),
    ),
    EXACT_TT: (
        "simultaneous_union_dense",
        (
            Condition("simultaneous_union_dense", _c_exact_tt_def),
        ),
        (),
    ),
    STRONG_EXACT_TT: (
        "simultaneous_union_covers",
        (
            Condition("simultaneous_union_covers", _c_sexact_simultaneous_cover),
            Condition("product_diagonal_cover", _c_sexact_product_diagonal),
            Condition("product_negative_orbit_dense",
                      _c_sexact_product_negative_orbit),
            Condition("pointwise_simultaneous_hit", _c_sexact_pointwise_hit),
        ),
        (),
    ),
    TM: (
        "eventual_hitting",
        (
            Condition("eventual_hitting", _c_tm_eventual_hitting),
            Condition("hitting_cofinite", _c_tm_hitting_cofinite),
            Condition("preimages_eventually_eps_dense",
                      _c_tm_preimages_eventually_eps_dense),
            Condition("images_eventually_eps_dense",
                      _c_tm_images_eventually_eps_dense),
        ),
        (),
    ),
    LEO: (
        "finite_iterate_onto",
        (
            Condition("finite_iterate_onto", _c_leo_finite_iterate_onto),
            Condition("uniform_point_preimages_eps_dense",
                      _c_leo_uniform_point_preimages),
            Condition("eventual_point_preimages_eps_dense",
                      _c_leo_eventual_point_preimages),
        ),
        (),
    ),
}


def conditions_of(prop: str):
    if prop not in _REGISTRY:
        raise UnknownVariantError(f"unknown property {prop!r}")
    return _REGISTRY[prop][1]


def definition_variant(prop: str) -> str:
    if prop not in _REGISTRY:
        raise UnknownVariantError(f"unknown property {prop!r}")
    return _REGISTRY[prop][0]


def expected_one_ways(prop: str):
    return _REGISTRY[prop][2]


def decide(sys: System, prop: str, variant: str | None = None, *,
           allow_imperfect: bool = False, depth: int = 4,
           horizon: int = 16) -> Verdict:
    """Evaluate one condition of one property; exact on the finite backend."""
    if sys.backend == SHIFT:
        from .symbolic import symbolic_decide

        return symbolic_decide(sys, prop, depth=depth, horizon=horizon)
    variant = variant or definition_variant(prop)
    conds = {c.cid: c for c in conditions_of(prop)}
    if variant not in conds:
        raise UnknownVariantError(f"{prop} has no condition {variant!r}")
    cond = conds[variant]
    if cond.requires_perfect and not allow_imperfect:
        raise PerfectSpaceRequiredError(
            f"{prop}/{variant} is an equivalence only on perfect spaces; "
            "finite spaces are not perfect (pass allow_imperfect to force)"
        )
    ev = FiniteEvaluator(sys)
    ok, witness = cond.checker(ev)
    return Verdict.of(ok, witness)


@dataclass
class SuiteReport:
    prop: str
    results: dict
    agreement_ok: bool = True
    disagreements: list = field(default_factory=list)
    implications: list = field(default_factory=list)
    implications_ok: bool = True
    skipped: list = field(default_factory=list)

    @property
    def ok(self):
        return self.agreement_ok and self.implications_ok


def equivalence_suite(sys: System, prop: str, *, depth: int = 3,
                      horizon: int = 16) -> SuiteReport:
    """Run every condition of ``prop`` and cross-compare.

    Finite backend: conditions in the agreement set must coincide exactly;
    perfectness-gated conditions are evaluated and checked only through the
    registered one-way implications.  Conditions needing an all-surjective
    family are skipped when the family is not.
    """
    if sys.backend == SHIFT:
        from .symbolic import symbolic_equivalence_suite

        return symbolic_equivalence_suite(sys, prop, depth=depth, horizon=horizon)
    ev = FiniteEvaluator(sys)
    surjective = sys.all_surjective()
    report = SuiteReport(prop, {})
    for cond in conditions_of(prop):
        if cond.requires_surjective and not surjective:
            report.skipped.append(cond.cid)
            continue
        ok, witness = cond.checker(ev)
        report.results[cond.cid] = Verdict.of(ok, witness)
    agreement = [
        c.cid
        for c in conditions_of(prop)
        if c.in_finite_agreement and c.cid in report.results
    ]
    for a, b in zip(agreement, agreement[1:]):
        va, vb = report.results[a], report.results[b]
        if va.is_true != vb.is_true:
            report.agreement_ok = False
            loser = a if va.is_false else b
            report.disagreements.append((a, b, report.results[loser].witness))
    for pre, post in expected_one_ways(prop):
        if pre not in report.results or post not in report.results:
            continue
        holds = (not report.results[pre].is_true) or report.results[post].is_true
        report.implications.append((pre, post, holds))
        if not holds:
            report.implications_ok = False
    return report


_LATTICE_EDGES = (
    (LEO, VST, None),
    (VST, ST, None),
    (ST, TT, None),
    (ST, STRONG_EXT_TT, None),
    (STRONG_EXT_TT, EXT_TT, None),
    (VST, STRONG_EXT_TT, None),
    (LEO, TM, "surjective"),
    (TM, TT, "surjective"),
    (LEO, STRONG_EXACT_TT, "surjective"),
    (STRONG_EXACT_TT, EXACT_TT, "surjective"),
    (EXACT_TT, TT, "surjective"),
    (EXACT_TT, EXACT, None),
    (STRONG_EXACT_TT, FULLY_EXACT, None),
)


def property_vector(sys: System) -> dict:
    """Definitional verdicts for every property (finite backend)."""
    return {prop: decide(sys, prop).is_true for prop in ALL_PROPERTIES}


@dataclass
class LatticeReport:
    values: dict
    violations: list
    exact_injective_ok: bool

    @property
    def ok(self):
        return not self.violations and self.exact_injective_ok


def implication_lattice_check(sys: System, values: dict | None = None) -> LatticeReport:
    """Check the implication diagram among the twelve properties.

    ``values`` may carry precomputed verdict booleans (e.g. from the
    accelerated kernel); otherwise the definitional deciders run.
    """
    vals = values if values is not None else property_vector(sys)
    surjective = sys.all_surjective()
    violations = []
    for a, b, guard in _LATTICE_EDGES:
        if guard == "surjective" and not surjective:
            continue
        if vals[a] and not vals[b]:
            violations.append((a, b))
    # an injective family on more than one point can never be exact
    exact_inj_ok = True
    if sys.all_injective() and sys.space.n >= 2 and vals[EXACT]:
        exact_inj_ok = False
    return LatticeReport(vals, violations, exact_inj_ok)


def transitive_points(sys: System, via: str = "orbit") -> PointSet:
    """Points with dense orbit (``via='orbit'``) or with full omega-limit set
    (``via='omega'``).  The omega route is one-directionally contained in the
    orbit route on finite spaces."""
    ev = FiniteEvaluator(sys)
    if via == "orbit":
        pts = [x for x in range(ev.n) if ev.orbit_mask(x) == ev.full]
    elif via == "omega":
        from .orbit import omega_limit

        pts = [
            x for x in range(ev.n) if omega_limit(sys, x).points.mask == ev.full
        ]
    else:
        raise ValueError(via)
    return PointSet.from_points(pts, ev.n)


def extended_transitive_points(sys: System, via: str = "orbit") -> PointSet:
    """Points with dense extended orbit; the omega route uses the
    arbitrarily-long-words characterization and agrees exactly."""
    ev = FiniteEvaluator(sys)
    if via == "orbit":
        pts = [x for x in range(ev.n) if ev.point_word_reach(x) == ev.full]
    elif via == "omega":
        from .orbit import extended_omega_limit

        pts = [
            x
            for x in range(ev.n)
            if extended_omega_limit(sys, x).points.mask == ev.full
        ]
    else:
        raise ValueError(via)
    return PointSet.from_points(pts, ev.n)


@dataclass
class CorollaryReport:
    checks: list

    @property
    def ok(self):
        return all(h for _, h, _ in self.checks)


def corollary_checks(sys: System) -> CorollaryReport:
    """Consequences of transitivity/strong transitivity for invariant sets."""
    from .invariance import MINUS_INV, PLUS_INV, check_invariance

    ev = FiniteEvaluator(sys)
    checks = []
    tt = decide(sys, TT).is_true
    st = decide(sys, ST).is_true
    if tt:
        for m in ev.opene_masks():
            ps = ev.pset(m)
            if check_invariance(sys, ps, MINUS_INV).is_true and m != ev.full:
                checks.append(("tt_opene_minus_invariant_dense", False, m))
                break
        else:
            checks.append(("tt_opene_minus_invariant_dense", True, None))
        bad = None
        for m in range(1 << ev.n):
            ps = ev.pset(m)
            if check_invariance(sys, ps, PLUS_INV).is_true:
                if m != ev.full and m != 0:  # nowhere dense = empty here
                    bad = m
                    break
        checks.append(("tt_closed_plus_invariant_full_or_nowhere_dense",
                       bad is None, bad))
    if st:
        bad = None
        for m in ev.opene_masks():
            ps = ev.pset(m)
            if check_invariance(sys, ps, MINUS_INV).is_true and m != ev.full:
                bad = m
                break
        checks.append(("st_nonempty_minus_invariant_dense", bad is None, bad))
    return CorollaryReport(checks)

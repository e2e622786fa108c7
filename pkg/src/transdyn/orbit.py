"""Orbits, negative orbits, word-extended orbits and omega-limit sets.

Orbits start at the first iterate: the base point belongs to its own orbit
only when some iterate revisits it.  Several equivalence results are
sensitive to exactly this convention.

Finite backend results are exact (``closed=True``).  Shift-backend points
are eventually periodic sequences given as ``(prefix, cycle)`` strings;
orbit sets are reported as cylinder hulls at a caller-chosen depth, and
``closed=False`` marks truncations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BackendMismatchError
from .space import FINITE, SHIFT, PointSet
from .system import (
    BlockCode,
    System,
    apply_code_to_ep,
    canonical_ep_point,
    compose,
    ep_point_symbol,
    preimage,
)
from .verdict import Verdict


@dataclass(frozen=True)
class OrbitResult:
    points: PointSet
    horizon: int
    closed: bool
    ep_points: tuple = field(default=None, compare=False)


@dataclass(frozen=True)
class OmegaSet:
    points: PointSet
    kind: str  # "omega" | "extended_omega"
    exact: bool = True


# ---------------------------------------------------------------------------
# finite backend


def _point_trace(sys: System, x: int):
    tr = sys.trace()
    return [g.table[x] for g in tr.maps], tr


def orbit(sys: System, x, horizon: int | None = None, depth: int = 8) -> OrbitResult:
    if sys.backend == FINITE:
        pts, tr = _point_trace(sys, x)
        return OrbitResult(
            points=PointSet.from_points(pts, sys.space.n),
            horizon=len(tr),
            closed=True,
        )
    return _shift_orbit(sys, x, horizon or 32, depth)


def partial_orbit(sys: System, x, n_max: int, depth: int = 8) -> PointSet:
    if sys.backend == FINITE:
        tr = sys.trace()
        return PointSet.from_points(
            [tr.at(n).table[x] for n in range(1, n_max + 1)], sys.space.n
        )
    res = _shift_orbit(sys, x, n_max, depth, exact_horizon=True)
    return res.points


def _shift_point_trace(sys: System, x, horizon: int, stop_on_cycle: bool = True):
    """Point iterates ``x_1..`` with the 0-based index where the cycle starts
    (or None if no cycle was detected within the horizon)."""
    pt = canonical_ep_point(*x)
    p0, length = len(sys.prefix), len(sys.period)
    pts = []
    seen = {}
    cycle_start = None
    cur = pt
    n = 0
    while n < horizon:
        n += 1
        cur = apply_code_to_ep(sys.map_at(n), cur)
        if stop_on_cycle and n > p0:
            key = ((n - p0 - 1) % length, cur)
            if key in seen:
                cycle_start = seen[key] - 1
                break
            seen[key] = n
        pts.append(cur)
    return pts, cycle_start


def _shift_orbit(sys: System, x, horizon: int, depth: int,
                 exact_horizon: bool = False) -> OrbitResult:
    pts, cycle_start = _shift_point_trace(
        sys, x, horizon, stop_on_cycle=not exact_horizon
    )
    hull = PointSet.from_cylinders(
        [_ep_prefix(p, depth) for p in pts], sys.space.alphabet
    )
    return OrbitResult(points=hull, horizon=len(pts),
                       closed=exact_horizon or cycle_start is not None,
                       ep_points=tuple(pts))


def _ep_prefix(point, depth: int) -> str:
    return "".join(ep_point_symbol(point, i) for i in range(depth))


def negative_orbit(sys: System, x, horizon: int | None = None,
                   depth: int = 8) -> OrbitResult:
    if sys.backend == FINITE:
        tr = sys.trace()
        acc = 0
        for g in tr.maps:
            for y in range(sys.space.n):
                if g.table[y] == x:
                    acc |= 1 << y
        return OrbitResult(PointSet.from_mask(acc, sys.space.n), len(tr), True)
    return _shift_negative_orbit(sys, x, horizon or 8, depth)


def partial_negative_orbit(sys: System, x, n_max: int, depth: int = 8) -> PointSet:
    if sys.backend == FINITE:
        tr = sys.trace()
        acc = 0
        for n in range(1, n_max + 1):
            g = tr.at(n)
            for y in range(sys.space.n):
                if g.table[y] == x:
                    acc |= 1 << y
        return PointSet.from_mask(acc, sys.space.n)
    return _shift_negative_orbit(sys, x, n_max, depth).points


def _shift_negative_orbit(sys: System, x, n_max: int, depth: int) -> OrbitResult:
    pt = canonical_ep_point(*x)
    k = sys.space.alphabet
    words: set[str] = set()
    g = None
    for n in range(1, n_max + 1):
        g = sys.map_at(n) if g is None else compose(sys.map_at(n), g)
        words.update(point_preimage_prefixes(g, pt, depth))
    return OrbitResult(
        PointSet.from_cylinders(words, k), n_max, closed=False
    )


def point_preimage_prefixes(code: BlockCode, point, depth: int) -> list[str]:
    """Length-``depth`` prefixes of the exact preimage set of an ep point.

    A prefix is kept iff it extends to a full preimage; liveness of the
    (window, output-phase) graph makes that check exact.
    """
    k, w = code.alphabet, code.window
    pre, cyc = point
    phases = len(pre) + len(cyc)

    def phase_next(p):
        p += 1
        return p if p < phases else len(pre)

    def symbol(p):
        return pre[p] if p < len(pre) else cyc[p - len(pre)]

    def phase_of(i):
        return i if i < len(pre) else len(pre) + (i - len(pre)) % len(cyc)

    def sym_at(i):
        return symbol(phase_of(i))

    wins = [""]
    for _ in range(w - 1):
        wins = [u + str(c) for u in wins for c in range(k)]
    live = {(win, p) for win in wins for p in range(phases)}
    changed = True
    while changed:
        changed = False
        for win, p in list(live):
            ok = any(
                str(code.rule_of(win + str(c))) == symbol(p)
                and ((win + str(c))[1:], phase_next(p)) in live
                for c in range(k)
            )
            if not ok:
                live.discard((win, p))
                changed = True

    if depth < w - 1:
        # not enough symbols to pin the window; enumerate one window deep
        deeper = point_preimage_prefixes(code, point, w - 1)
        return sorted({u[:depth] for u in deeper})

    out = []

    def walk(u: str):
        n = len(u)
        if n >= w and str(code.rule_of(u[n - w :])) != sym_at(n - w):
            return
        if n == depth:
            state = u[n - (w - 1) :] if w > 1 else ""
            if (state, phase_of(n - w + 1)) in live:
                out.append(u)
            return
        for c in range(k):
            walk(u + str(c))

    walk("")
    return out


def extended_orbit(sys: System, x, max_len: int = 8, depth: int = 8) -> OrbitResult:
    """``J(x)``: images of x under every finite word over the effective maps."""
    maps = [f for _, f in sys.effective_maps()]
    if sys.backend == FINITE:
        n = sys.space.n
        reached = 0
        frontier = {x}
        steps = 0
        while frontier:
            steps += 1
            nxt = set()
            for y in frontier:
                for f in maps:
                    z = f.table[y]
                    if not reached >> z & 1:
                        reached |= 1 << z
                        nxt.add(z)
            frontier = nxt
        return OrbitResult(PointSet.from_mask(reached, n), steps, True)
    pt = canonical_ep_point(*x)
    layer = {pt}
    all_pts: set = set()
    closed = False
    for _ in range(max_len):
        layer = {apply_code_to_ep(f, q) for q in layer for f in maps} - all_pts
        if not layer:
            closed = True
            break
        all_pts |= layer
    hull = PointSet.from_cylinders(
        [_ep_prefix(p, depth) for p in all_pts], sys.space.alphabet
    )
    return OrbitResult(hull, max_len, closed, ep_points=tuple(sorted(all_pts)))


def extended_negative_orbit(sys: System, x, max_len: int = 4,
                            depth: int = 8) -> OrbitResult:
    """``J^-(x)``: points some word maps onto x (reverse reachability)."""
    maps = [f for _, f in sys.effective_maps()]
    if sys.backend == FINITE:
        n = sys.space.n
        reached = 0
        frontier = {x}
        steps = 0
        while frontier:
            steps += 1
            nxt = set()
            for y in frontier:
                for f in maps:
                    for z in range(n):
                        if f.table[z] == y and not reached >> z & 1:
                            reached |= 1 << z
                            nxt.add(z)
            frontier = nxt
        return OrbitResult(PointSet.from_mask(reached, n), steps, True)
    # word images are enumerated breadth-first: the preimage of the target
    # point under f_alpha, word length bounded by max_len
    pt = canonical_ep_point(*x)
    k = sys.space.alphabet
    words: set[str] = set()
    layer = [None]
    for _ in range(max_len):
        nxt = []
        for g in layer:
            for f in maps:
                nxt.append(f if g is None else compose(g, f))
        for g in nxt:
            words.update(point_preimage_prefixes(g, pt, depth))
        layer = nxt
    return OrbitResult(PointSet.from_cylinders(words, k), max_len, False)


def omega_limit(sys: System, x, horizon: int | None = None,
                depth: int = 8) -> OmegaSet:
    """Values the iterate sequence attains cofinally (the point-trace cycle)."""
    if sys.backend == FINITE:
        tr = sys.trace()
        pts = {tr.at(n).table[x] for n in tr.cycle_positions()}
        return OmegaSet(PointSet.from_points(pts, sys.space.n), "omega", True)
    pts, cycle_start = _shift_point_trace(sys, x, horizon or 32)
    if cycle_start is not None:
        tail = set(pts[cycle_start:])
        hull = PointSet.from_cylinders(
            [_ep_prefix(p, depth) for p in tail], sys.space.alphabet
        )
        return OmegaSet(hull, "omega", True)
    hull = PointSet.from_cylinders(
        [_ep_prefix(p, depth) for p in pts], sys.space.alphabet
    )
    return OmegaSet(hull, "omega", False)


def extended_omega_limit(sys: System, x) -> OmegaSet:
    """Points reachable from x by arbitrarily long words.

    On a finite space these are the points reachable from some cycle vertex
    of the map-application graph that x reaches.
    """
    if sys.backend != FINITE:
        raise BackendMismatchError("extended omega sets are finite-backend only")
    n = sys.space.n
    maps = [f for _, f in sys.effective_maps()]
    adj = [sorted({f.table[v] for f in maps}) for v in range(n)]

    def reach_from(start, include_start):
        seen = set([start]) if include_start else set()
        frontier = [start]
        while frontier:
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if v not in seen:
                        seen.add(v)
                        nxt.append(v)
            frontier = nxt
        return seen

    on_cycle = {v for v in range(n) if v in reach_from(v, include_start=False)}
    reach_x = reach_from(x, include_start=True)
    omega = set()
    for w in on_cycle & reach_x:
        omega |= reach_from(w, include_start=True)
    return OmegaSet(PointSet.from_points(omega, n), "extended_omega", True)


def is_recurrent(sys: System, x, horizon: int = 64) -> Verdict:
    if sys.backend == FINITE:
        return Verdict.of(omega_limit(sys, x).points.mask >> x & 1 == 1)
    pt = canonical_ep_point(*x)
    pts, cycle_start = _shift_point_trace(sys, x, horizon)
    if cycle_start is not None:
        return Verdict.of(pt in set(pts[cycle_start:]))
    return Verdict.unknown(horizon=len(pts))

"""The seven invariance predicates and their algebraic laws.

Kinds quantified over iterates use the composition trace as the exact
quantifier range; kinds quantified over the family range over the distinct
sequence members.  The two law suites check the preservation facts that
hold for all-surjective families, clause by clause: a violation indicates
a bug, never a mathematical finding.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BackendMismatchError, PreconditionError
from .space import FINITE, PointSet
from .system import System, image, is_surjective, preimage, symbolic_trace
from .verdict import Verdict

PLUS_INV = "plus"
STRONG_PLUS_INV = "strong_plus"
MINUS_INV = "minus"
STRONG_MINUS_INV = "strong_minus"
WEAKLY_MINUS_INV = "weakly_minus"
EXTENDED_MINUS_INV = "extended_minus"
INVARIANT = "invariant"

ALL_KINDS = (
    PLUS_INV,
    STRONG_PLUS_INV,
    MINUS_INV,
    STRONG_MINUS_INV,
    WEAKLY_MINUS_INV,
    EXTENDED_MINUS_INV,
    INVARIANT,
)

_ITERATE_KINDS = {PLUS_INV, MINUS_INV, WEAKLY_MINUS_INV, INVARIANT}


def _family_condition(f, pset: PointSet, kind: str) -> bool:
    if kind == STRONG_PLUS_INV:
        # f(A) subset A decided through preimages so it stays exact on the
        # shift backend, where forward images need not be clopen
        return not preimage(f, pset.complement()).meets(pset)
    if kind == STRONG_MINUS_INV:
        return preimage(f, pset).is_subset(pset)
    if kind == EXTENDED_MINUS_INV:
        from .system import FiniteMap, image_covers

        if isinstance(f, FiniteMap):
            return pset.is_subset(image(f, pset))
        return image_covers(f, pset, pset)
    raise ValueError(kind)


def _iterate_condition(g, pset: PointSet, kind: str) -> bool:
    if kind == PLUS_INV:
        return not preimage(g, pset.complement()).meets(pset)
    if kind == MINUS_INV:
        return preimage(g, pset).is_subset(pset)
    if kind == WEAKLY_MINUS_INV:
        from .system import FiniteMap, image_covers

        if isinstance(g, FiniteMap):
            return pset.is_subset(image(g, pset))
        return image_covers(g, pset, pset)
    if kind == INVARIANT:
        from .system import FiniteMap, image_covers

        if isinstance(g, FiniteMap):
            return image(g, pset) == pset
        return _iterate_condition(g, pset, PLUS_INV) and image_covers(g, pset, pset)
    raise ValueError(kind)


def check_invariance(sys: System, pset: PointSet, kind: str,
                     horizon: int = 32) -> Verdict:
    if kind not in ALL_KINDS:
        raise ValueError(f"unknown invariance kind {kind!r}")
    if kind not in _ITERATE_KINDS:
        return Verdict.of(
            all(_family_condition(f, pset, kind) for _, f in sys.effective_maps())
        )
    if sys.backend == FINITE:
        tr = sys.trace()
        return Verdict.of(all(_iterate_condition(g, pset, kind) for g in tr.maps))
    maps, pre, per = symbolic_trace(sys, horizon)
    ok = all(_iterate_condition(g, pset, kind) for g in maps)
    if not ok:
        return Verdict.false()
    if per > 0:
        return Verdict.true()
    return Verdict.unknown(horizon=len(maps))


def weakly_minus_characterization(sys: System, pset: PointSet):
    """Left: A is weakly minus invariant.  Right: each iterate g satisfies
    ``g(A & g^-1(A)) == A``.  The two always agree."""
    if sys.backend != FINITE:
        raise BackendMismatchError("characterization requires the finite backend")
    tr = sys.trace()
    lhs = all(_iterate_condition(g, pset, WEAKLY_MINUS_INV) for g in tr.maps)
    rhs = all(
        image(g, pset & preimage(g, pset)) == pset for g in tr.maps
    )
    return lhs, rhs


def extended_minus_characterization(sys: System, pset: PointSet):
    """Family-map analogue of :func:`weakly_minus_characterization`."""
    if sys.backend != FINITE:
        raise BackendMismatchError("characterization requires the finite backend")
    maps = [f for _, f in sys.effective_maps()]
    lhs = all(_family_condition(f, pset, EXTENDED_MINUS_INV) for f in maps)
    rhs = all(image(f, pset & preimage(f, pset)) == pset for f in maps)
    return lhs, rhs


@dataclass(frozen=True)
class LawClause:
    clause: str
    holds: bool
    detail: str = ""


def _require_surjective(sys: System):
    bad = [pos for pos, f in sys.effective_maps() if not is_surjective(f).is_true]
    if bad:
        raise PreconditionError(
            f"family maps at sequence positions {bad} are not surjective"
        )


def surjective_sequence_laws(sys: System, pset: PointSet) -> list[LawClause]:
    """Iterate-level invariance laws valid for all-surjective families."""
    _require_surjective(sys)
    if sys.backend != FINITE:
        raise BackendMismatchError("law suites run on the finite backend")
    tr = sys.trace()
    inv = {k: check_invariance(sys, pset, k).is_true for k in ALL_KINDS}
    out = []
    out.append(LawClause(
        "minus_implies_weakly_minus",
        (not inv[MINUS_INV]) or inv[WEAKLY_MINUS_INV],
    ))
    out.append(LawClause(
        "invariant_iff_plus_and_weakly_minus",
        inv[INVARIANT] == (inv[PLUS_INV] and inv[WEAKLY_MINUS_INV]),
    ))
    pre_fixed = all(preimage(g, pset) == pset for g in tr.maps)
    out.append(LawClause(
        "preimage_fixed_iff_plus_and_minus",
        pre_fixed == (inv[PLUS_INV] and inv[MINUS_INV]),
    ))
    out.append(LawClause(
        "preimage_fixed_implies_invariant",
        (not pre_fixed) or inv[INVARIANT],
    ))
    closure, interior = sys.space.closure_interior(pset)
    for kind in (PLUS_INV, WEAKLY_MINUS_INV, INVARIANT):
        out.append(LawClause(
            f"closure_preserves_{kind}",
            (not inv[kind]) or check_invariance(sys, closure, kind).is_true,
        ))
    # open-map clauses hold vacuously in the discrete topology but are run
    # anyway so the suite shape matches the shift backend
    out.append(LawClause(
        "interior_plus_inv_under_open_maps",
        (not inv[PLUS_INV]) or check_invariance(sys, interior, PLUS_INV).is_true,
    ))
    out.append(LawClause(
        "closure_minus_inv_under_open_maps",
        (not inv[MINUS_INV]) or check_invariance(sys, closure, MINUS_INV).is_true,
    ))
    return out


def surjective_family_laws(sys: System, pset: PointSet) -> list[LawClause]:
    """Family-level analogue of :func:`surjective_sequence_laws`."""
    _require_surjective(sys)
    if sys.backend != FINITE:
        raise BackendMismatchError("law suites run on the finite backend")
    maps = [f for _, f in sys.effective_maps()]
    inv = {k: check_invariance(sys, pset, k).is_true for k in ALL_KINDS}
    family_invariant = all(image(f, pset) == pset for f in maps)
    out = []
    out.append(LawClause(
        "strong_minus_implies_extended_minus",
        (not inv[STRONG_MINUS_INV]) or inv[EXTENDED_MINUS_INV],
    ))
    out.append(LawClause(
        "invariant_iff_strong_plus_and_extended_minus",
        family_invariant == (inv[STRONG_PLUS_INV] and inv[EXTENDED_MINUS_INV]),
    ))
    pre_fixed = all(preimage(f, pset) == pset for f in maps)
    out.append(LawClause(
        "family_preimage_fixed_iff_strong_plus_and_strong_minus",
        pre_fixed == (inv[STRONG_PLUS_INV] and inv[STRONG_MINUS_INV]),
    ))
    out.append(LawClause(
        "family_preimage_fixed_implies_invariant",
        (not pre_fixed) or family_invariant,
    ))
    closure, interior = sys.space.closure_interior(pset)
    for kind in (STRONG_PLUS_INV, EXTENDED_MINUS_INV):
        out.append(LawClause(
            f"closure_preserves_{kind}",
            (not inv[kind]) or check_invariance(sys, closure, kind).is_true,
        ))
    out.append(LawClause(
        "closure_preserves_family_invariant",
        (not family_invariant)
        or all(image(f, closure) == closure for f in maps),
    ))
    out.append(LawClause(
        "interior_strong_plus_under_open_maps",
        (not inv[STRONG_PLUS_INV])
        or check_invariance(sys, interior, STRONG_PLUS_INV).is_true,
    ))
    out.append(LawClause(
        "closure_strong_minus_under_open_maps",
        (not inv[STRONG_MINUS_INV])
        or check_invariance(sys, closure, STRONG_MINUS_INV).is_true,
    ))
    return out


def plus_minus_duality(sys: System, pset: PointSet) -> bool:
    """Plus invariance of A coincides with minus invariance of its complement
    (and likewise for the strong kinds)."""
    comp = pset.complement()
    a = check_invariance(sys, pset, PLUS_INV) == check_invariance(sys, comp, MINUS_INV)
    b = check_invariance(sys, pset, STRONG_PLUS_INV) == check_invariance(
        sys, comp, STRONG_MINUS_INV
    )
    return a and b

"""Three-valued results for properties quantified over infinite index sets."""

from __future__ import annotations


class Verdict:
    """True / False / Unknown, optionally horizon-tagged and carrying a witness.

    Finite-backend deciders return exact True/False.  Symbolic deciders tag
    bounded positive answers with the horizon they searched and use Unknown
    when the search was inconclusive; a False is always an exact refutation.
    """

    __slots__ = ("status", "horizon", "witness")

    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __init__(self, status, horizon=None, witness=None):
        if status not in (self.TRUE, self.FALSE, self.UNKNOWN):
            raise ValueError(f"bad verdict status {status!r}")
        self.status = status
        self.horizon = horizon
        self.witness = witness

    @staticmethod
    def true(witness=None, horizon=None) -> "Verdict":
        return Verdict(Verdict.TRUE, horizon=horizon, witness=witness)

    @staticmethod
    def false(witness=None) -> "Verdict":
        return Verdict(Verdict.FALSE, witness=witness)

    @staticmethod
    def unknown(horizon, witness=None) -> "Verdict":
        return Verdict(Verdict.UNKNOWN, horizon=horizon, witness=witness)

    @staticmethod
    def of(flag: bool, witness=None) -> "Verdict":
        return Verdict.true(witness) if flag else Verdict.false(witness)

    @property
    def is_true(self) -> bool:
        return self.status == self.TRUE

    @property
    def is_false(self) -> bool:
        return self.status == self.FALSE

    @property
    def is_unknown(self) -> bool:
        return self.status == self.UNKNOWN

    def known(self) -> bool:
        """The boolean value; raises if the verdict is Unknown."""
        if self.is_unknown:
            raise ValueError("verdict is unknown")
        return self.is_true

    def __eq__(self, other):
        if isinstance(other, bool):
            return (self.is_true and other) or (self.is_false and not other)
        if isinstance(other, Verdict):
            return self.status == other.status
        return NotImplemented

    def __hash__(self):
        return hash(self.status)

    def __repr__(self):
        bits = [self.status.capitalize()]
        if self.horizon is not None:
            bits.append(f"horizon={self.horizon}")
        if self.witness is not None:
            bits.append(f"witness={self.witness!r}")
        return f"Verdict({', '.join(bits)})"

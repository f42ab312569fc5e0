"""Degeneration witnesses.

A structure mu degenerates to lambda when lambda lies in the closure of the
orbit of mu.  A witness is a curve g(t) of block-diagonal basis changes with
Laurent-polynomial entries such that g(t) * mu -> lambda as t -> 0.

Verification never divides.  Each transformed entry is kept as an exact
fraction num / den of Laurent polynomials (den a product of the two block
determinants) and the limit conditions are read off the lowest t-orders:

    a = ord(num) - ord(den)
    a < 0  -> the entry has no limit at t = 0
    a > 0  -> the limit is 0
    a = 0  -> the limit is lc(num) / lc(den); it equals the target value v
              exactly when lc(num) = v * lc(den)

The last line is a polynomial identity, so parametric families (entries
depending on a free parameter) are handled with no special casing.  For
parametric curves the check certifies the limit as a rational identity in
the parameters, which is the sufficiency direction: a confirmed witness is
a valid degeneration wherever the curve is defined.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .action import BasisChange, act, laurent_transformed_fractions
from .exact import MPoly
from .superalgebra import SuperStructure, canonical_triples


class WitnessStatus(enum.Enum):
    CONFIRMED = "confirmed"
    LIMIT_MISSING = "limit-missing"
    LIMIT_MISMATCH = "limit-mismatch"


@dataclass(frozen=True)
class Witness:
    source: SuperStructure
    target: SuperStructure
    curve: BasisChange

    def __post_init__(self):
        if (self.source.m, self.source.n) != (self.target.m, self.target.n):
            raise ValueError("source and target have different types")
        if (self.curve.m, self.curve.n) != (self.source.m, self.source.n):
            raise ValueError("curve type does not match the structures")
        if self.curve.domain != "laurent":
            raise ValueError("witness curves must have laurent entries")


@dataclass(frozen=True)
class EntryFailure:
    triple: tuple[int, int, int]
    reason: WitnessStatus
    detail: str


@dataclass(frozen=True)
class WitnessReport:
    status: WitnessStatus
    failures: tuple[EntryFailure, ...] = field(default_factory=tuple)

    @property
    def confirmed(self) -> bool:
        return self.status is WitnessStatus.CONFIRMED


def verify_witness(w: Witness) -> WitnessReport:
    """Check lim_{t->0} g(t) * source = target entrywise."""
    fractions = laurent_transformed_fractions(w.curve, w.source)
    failures: list[EntryFailure] = []
    worst = WitnessStatus.CONFIRMED
    for triple in canonical_triples(w.source.m, w.source.n):
        num, den = fractions[triple]
        v = w.target.entry(*triple)
        if num.is_zero():
            if not v.is_zero():
                failures.append(EntryFailure(triple, WitnessStatus.LIMIT_MISMATCH,
                                             f"limit 0, target {v.to_text()}"))
            continue
        a = num.order() - den.order()
        if a < 0:
            failures.append(EntryFailure(triple, WitnessStatus.LIMIT_MISSING,
                                         f"pole of order {-a} at t=0"))
        elif a > 0:
            if not v.is_zero():
                failures.append(EntryFailure(triple, WitnessStatus.LIMIT_MISMATCH,
                                             f"limit 0, target {v.to_text()}"))
        else:
            lhs = num.leading_coeff()
            rhs = v * den.leading_coeff()
            if lhs != rhs:
                failures.append(EntryFailure(triple, WitnessStatus.LIMIT_MISMATCH,
                                             f"leading coefficient {lhs.to_text()} != "
                                             f"target * {den.leading_coeff().to_text()}"))
    if failures:
        worst = (WitnessStatus.LIMIT_MISSING
                 if any(f.reason is WitnessStatus.LIMIT_MISSING for f in failures)
                 else WitnessStatus.LIMIT_MISMATCH)
    return WitnessReport(worst, tuple(failures))


def scaling_witness(source: SuperStructure) -> Witness:
    """The curve t^-1 * id, which degenerates every structure to the zero
    structure of the same type (each entry picks up a factor of t)."""
    target = SuperStructure.zero(source.m, source.n)
    return Witness(source, target, BasisChange.scaling(source.m, source.n, -1))


def orbit_equal_test(g: BasisChange, source: SuperStructure, target: SuperStructure) -> bool:
    """Does the basis change g carry source exactly onto target?

    This is the t-free special case of a witness: g . source = target as
    structures (entrywise equality of polynomials in any parameters), which
    puts source and target in the same orbit.
    """
    if (source.m, source.n) != (target.m, target.n):
        raise ValueError("source and target have different types")
    moved = act(g, source)
    return all(
        (moved.entry(*tr) - target.entry(*tr)).is_zero()
        for tr in canonical_triples(source.m, source.n)
    )

"""Non-degeneration certificates.

A certificate names a closed set R inside the variety of structure constants
of a fixed type, cut out by polynomials in the canonical coordinates with
zero constant term.  For a pair (mu, lambda) the verdict is assembled from
three exact components:

  membership         mu lies in R (for a parametric family: identically in
                     the parameters);
  stability          R is stable under the Borel subgroup of block upper or
                     lower triangular basis changes;
  representability   whether some point of the orbit of lambda lies in R.

When mu is in R, R is B-stable and the orbit of lambda misses R, lambda
cannot lie in the orbit closure of mu: that closure equals G applied to the
closure of the B-orbit of mu (the orbit lemma for the Borel subgroup), the
B-orbit closure stays inside the closed B-stable R, and a g with
g . x = lambda for x in R would put g^-1 . lambda in R.

Stability is decided coefficientwise.  Pulling an equation r of R back along
a generic triangular element (denominators cleared by a power of the block
determinants, which are invertible on the whole Borel group) gives a
polynomial in the Borel entries b and the coordinates c.  R is B-stable
exactly when every coefficient q(c) of a b-monomial vanishes on R, where R
means the locus cut out by the equations inside the structure variety: its
points also satisfy the defining identities of the ambient variety, so
vanishing is only needed modulo those.  Each q climbs a ladder of
sufficient conditions (small powers of q reduced against the equation
ideal, the same with the identity ideal added in, finally a Rabinowitsch
radical query); `b_stability` documents the exact modes.  Unstable needs a
conclusive radical-level negative on the identity locus for every requested
orientation; anything blocked by resource limits reports Timeout.
"""

from __future__ import annotations

import enum
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from .action import act_inverse_side_cleared, act_symbolic_cleared, generic_borel, generic_element
from .exact import MPoly, parse_poly, structure_var_indices
from .groebner import (
    DEFAULT_LIMITS,
    GroebnerLimits,
    Ideal,
    MonomialOrder,
    ResourceLimitExceeded,
    Triviality,
    is_homogeneous,
    is_trivial,
    saturate_by_unit,
)
from .superalgebra import SuperStructure, canonical_triples, generic_structure, jordan_identity_polynomials

ORIENTATIONS = ("upper", "lower")
MIXED_ORIENTATIONS = ("upper-lower", "lower-upper")


def orientations_for(mtype: tuple[int, int]) -> tuple[str, ...]:
    """All distinct triangular orientations of the acting group for a type.

    When either block is one dimensional the mixed orientations coincide
    with the plain ones, so only types with both blocks of size two or
    more get the hyphenated pairs.
    """
    m, n = mtype
    if m >= 2 and n >= 2:
        return ORIENTATIONS + MIXED_ORIENTATIONS
    return ORIENTATIONS


class StabilityStatus(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    TIMEOUT = "timeout"


class FeasibilityStatus(enum.Enum):
    INFEASIBLE = "infeasible"
    REPRESENTABLE = "representable"
    INCONCLUSIVE = "inconclusive"


class Outcome(enum.Enum):
    NON_DEGENERATION = "non-degeneration"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ClosedSet:
    """A closed subset of the structure variety of type mtype, given by
    equations in the canonical coordinates.  Equations with constant terms
    are legal here (the set then misses the zero structure); the certificate
    file grammar is stricter because shipped table data always vanishes
    at zero."""

    name: str
    mtype: tuple[int, int]
    equations: tuple[MPoly, ...]

    def __post_init__(self):
        m, n = self.mtype
        allowed = {f"c_{i}_{j}_{k}" for (i, j, k) in canonical_triples(m, n)}
        for idx, eq in enumerate(self.equations, start=1):
            if eq.is_zero():
                raise ValueError(f"{self.name}: equation {idx} is zero")
            for v in eq.vars:
                if v not in allowed:
                    if structure_var_indices(v):
                        raise ValueError(f"{self.name}: equation {idx} uses {v}, which is not a "
                                         f"canonical coordinate of type {self.mtype}")
                    raise ValueError(f"{self.name}: equation {idx} uses a non-coordinate "
                                     f"variable {v}")


@dataclass(frozen=True)
class MembershipResult:
    """mode records how the source was placed in R: "direct" for plain
    substitution, "orbit" when only a basis change of the source satisfies
    the equations (equally good for the closure argument).  A failed result
    with conclusive=False only means the orbit search hit a resource limit."""

    passed: bool
    residuals: tuple[tuple[int, str], ...] = ()
    mode: str = "direct"
    conclusive: bool = True


@dataclass(frozen=True)
class StabilityResult:
    status: StabilityStatus
    orientation: str | None = None
    mode: str | None = None
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class RepresentabilityResult:
    status: FeasibilityStatus
    witness: dict[str, Fraction] | None = None
    note: str = ""


@dataclass(frozen=True)
class Verdict:
    source_id: str
    target_id: str
    certificate: str
    outcome: Outcome
    membership: MembershipResult
    stability: StabilityResult
    representability: RepresentabilityResult
    reasons: tuple[str, ...] = ()


def membership(R: ClosedSet, J: SuperStructure) -> MembershipResult:
    """Does J satisfy every equation of R (identically in any parameters)?"""
    if (J.m, J.n) != R.mtype:
        raise ValueError("structure type does not match the certificate")
    bindings = {f"c_{i}_{j}_{k}": J.entry(i, j, k) for (i, j, k) in canonical_triples(J.m, J.n)}
    residuals = []
    for idx, eq in enumerate(R.equations, start=1):
        res = eq.substitute(bindings)
        if not res.is_zero():
            residuals.append((idx, res.to_text()))
    return MembershipResult(not residuals, tuple(residuals))


def membership_with_orbit_fallback(
    R: ClosedSet,
    J: SuperStructure,
    limits: GroebnerLimits | None = None,
    modular_precheck: bool = False,
) -> MembershipResult:
    """Plain membership first; on failure, ask whether some point of the
    orbit of J lies in R instead.

    Moving the source inside its own orbit changes nothing about the orbit
    closure, so a source that satisfies R only after a basis change is just
    as good; the result then carries mode "orbit".  The fallback reads the
    equations existentially, so it is skipped for parametric sources (their
    membership must hold identically in the parameters).
    """
    direct = membership(R, J)
    if direct.passed or J.parameters:
        return direct
    rep = representability(R, J, limits, modular_precheck, find_witness=False)
    if rep.status is FeasibilityStatus.REPRESENTABLE:
        return MembershipResult(True, direct.residuals, mode="orbit")
    conclusive = rep.status is FeasibilityStatus.INFEASIBLE
    return MembershipResult(False, direct.residuals, mode="orbit", conclusive=conclusive)


def substitute_cleared(poly: MPoly, table: Mapping[tuple[int, int, int], MPoly], clearing: MPoly) -> MPoly:
    """poly with c_ij^k replaced by table values scaled to a common
    denominator: table holds clearing * value, and every term of poly is
    topped up with a power of clearing so the result equals
    clearing^deg(poly) * poly(values)."""
    dmax = poly.total_degree()
    triples = []
    for v in poly.vars:
        t = structure_var_indices(v)
        if t is None:
            raise ValueError(f"{v} is not a structure coordinate")
        triples.append(t)
    out = MPoly.zero()
    for exps, coef in poly.terms.items():
        term = MPoly.const(coef) * clearing ** (dmax - sum(exps))
        for t, e in zip(triples, exps):
            if e:
                term = term * table[t] ** e
        out = out + term
    return out


def coefficients_in(poly: MPoly, keep: set[str]) -> list[MPoly]:
    """Coefficients of poly grouped by monomials in the variables outside
    `keep`: the returned polynomials involve only `keep` variables, and poly
    vanishes identically in the other variables iff all of them vanish."""
    kept_idx = [i for i, v in enumerate(poly.vars) if v in keep]
    other_idx = [i for i, v in enumerate(poly.vars) if v not in keep]
    kept_vars = tuple(poly.vars[i] for i in kept_idx)
    groups: dict[tuple, dict] = {}
    for exps, coef in poly.terms.items():
        okey = tuple(exps[i] for i in other_idx)
        ckey = tuple(exps[i] for i in kept_idx)
        bucket = groups.setdefault(okey, {})
        bucket[ckey] = bucket.get(ckey, Fraction(0)) + coef
    order = MonomialOrder.degrevlex(kept_vars)
    out = []
    for bucket in groups.values():
        p = order.from_exps({e: c for e, c in bucket.items() if c})
        if not p.is_zero():
            out.append(p)
    return out


def _normalize_lead(p: MPoly) -> MPoly:
    exps = max(p.terms)
    return p * (1 / p.terms[exps])


def borel_coefficients(R: ClosedSet, orientation: str) -> list[MPoly]:
    """The coordinate coefficients q(c) whose vanishing on R is equivalent
    to B-stability of R for the given triangular orientation."""
    m, n = R.mtype
    borel = generic_borel(m, n, orientation)
    table, D = act_symbolic_cleared(borel.change, generic_structure(m, n))
    cvars = {f"c_{i}_{j}_{k}" for (i, j, k) in canonical_triples(m, n)}
    seen = set()
    out = []
    for r in R.equations:
        pulled = substitute_cleared(r, table, D)
        for q in coefficients_in(pulled, cvars):
            qn = _normalize_lead(q)
            if qn not in seen:
                seen.add(qn)
                out.append(qn)
    return out


_IDENTITY_GB_DATA = Path(__file__).parent / "data" / "groebner"
_IDENTITY_GB_CACHE: dict[tuple[int, int], tuple[MPoly, ...]] = {}


def _read_identity_basis(path: Path, mtype: tuple[int, int]) -> tuple[MPoly, ...]:
    polys: list[MPoly] = []
    stated: tuple[int, int] | None = None
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "type":
            stated = tuple(int(x) for x in rest.split())
        elif head == "poly":
            polys.append(parse_poly(rest))
        else:
            raise ValueError(f"{path.name}:{lineno}: unknown directive {head!r}")
    if stated != mtype:
        raise ValueError(f"{path.name}: stated type {stated} does not match {mtype}")
    return tuple(polys)


_IDENTITY_GENS_CACHE: dict[tuple[int, int], tuple[MPoly, ...]] = {}


def _identity_generators(m: int, n: int) -> tuple[MPoly, ...]:
    key = (m, n)
    if key not in _IDENTITY_GENS_CACHE:
        _IDENTITY_GENS_CACHE[key] = tuple(jordan_identity_polynomials(m, n))
    return _IDENTITY_GENS_CACHE[key]


def identity_locus_basis(m: int, n: int, limits: GroebnerLimits | None = None,
                         compute: bool = True) -> tuple[MPoly, ...] | None:
    """Reduced Groebner basis (inferred degrevlex order) of the ideal of
    ambient structure identities for type (m, n).

    A full basis of this ideal is expensive (the generators are a hundred
    odd cubics); loads from `data/groebner/type{m}{n}.gb` when such a cache
    file exists, otherwise computes under `limits` and caches for the
    process.  With `compute=False` a cache miss returns None instead of
    starting the long computation; stability checking uses that to treat
    the basis as a speedup that may or may not be on hand.
    """
    key = (m, n)
    got = _IDENTITY_GB_CACHE.get(key)
    if got is None:
        path = _IDENTITY_GB_DATA / f"type{m}{n}.gb"
        if path.is_file():
            got = _read_identity_basis(path, key)
        elif compute:
            got = Ideal(_identity_generators(m, n)).groebner_basis(limits)
        else:
            return None
        _IDENTITY_GB_CACHE[key] = got
    return got


# default wall budget per certificate component (stability call, each
# representability query); generous basis cap for the seeded ambient runs
CERTIFY_LIMITS = GroebnerLimits(max_basis=20000, max_degree=120, max_seconds=600.0)


def b_stability(
    R: ClosedSet,
    limits: GroebnerLimits | None = None,
    orientations: Sequence[str] | None = None,
    radical_fallback: bool = True,
    identity_locus_fallback: bool = True,
    max_power: int = 4,
) -> StabilityResult:
    """Is R stable under a Borel subgroup of block triangular changes?

    Each coefficient q climbs a ladder of sufficient conditions, cheapest
    first; the first orientation with every coefficient settled wins:

      direct                  some power q^e (e <= max_power) reduces to
                              zero modulo the equation ideal of R, so q lies
                              in its radical and vanishes on the locus;
      identity-truncated      the same modulo the equation ideal plus the
                              ambient identity ideal (points of R inside the
                              structure variety satisfy those identities, so
                              vanishing is only needed there), via degree
                              truncated bases: the whole system is
                              homogeneous, so the cap deg(q^e) is exact for
                              each membership and no full basis is needed;
      identity-locus          full normal forms against the equation ideal
                              seeded with the precomputed identity basis;
                              only when such a basis is cached or shipped;
      identity-locus-radical  one Rabinowitsch query per surviving q: the
                              combined ideal plus q*y - 1 trivial proves q
                              vanishes on the locus, NonTrivial is a
                              conclusive negative for the orientation.

    With `identity_locus_fallback` off, the radical fallback runs against
    the equation ideal alone; its positive answers are still sound (the
    locus only shrinks inside the structure variety) but a negative no
    longer disproves stability, so Unstable is never reported that way.

    Unstable therefore requires a conclusive identity-locus-radical negative
    for every requested orientation.  `limits.max_seconds` is the wall
    budget for the whole call; Timeout reports whatever remained unsettled.
    """
    limits = limits or CERTIFY_LIMITS
    if orientations is None:
        orientations = orientations_for(R.mtype)
    for o in orientations:
        if o not in ORIENTATIONS + MIXED_ORIENTATIONS:
            raise ValueError(f"unknown orientation {o!r}")
    deadline = limits.deadline()
    notes: list[str] = []
    qs: dict[str, list[MPoly]] = {o: borel_coefficients(R, o) for o in orientations}
    pending: dict[str, list[MPoly]] = {}

    def budget() -> GroebnerLimits:
        if deadline is None:
            return limits
        left = deadline - time.monotonic()
        if left <= 0:
            raise ResourceLimitExceeded("stability wall budget exhausted")
        return GroebnerLimits(limits.max_basis, limits.max_degree, left)

    def direct_pass(ideal: Ideal, mode: str, truncated: bool = False):
        for o in orientations:
            todo = pending.get(o, qs[o])
            left = []
            try:
                for q in todo:
                    power = q
                    for e in range(1, max(1, max_power) + 1):
                        if truncated:
                            nf = ideal.truncated_reduce(
                                power, q.total_degree() * e, budget())
                        else:
                            nf = ideal.reduce(power, budget())
                        if nf.is_zero():
                            break
                        power = power * q
                    else:
                        left.append(q)
            except ResourceLimitExceeded:
                notes.append(f"{o}/{mode}: resource limit")
                pending[o] = todo
                continue
            if not left:
                return StabilityResult(StabilityStatus.STABLE, o, mode, tuple(notes))
            notes.append(f"{o}/{mode}: {len(left)} coefficient(s) not settled")
            pending[o] = left
        return None

    def radical_pass(gens: Sequence[MPoly], seed: Sequence[MPoly], mode: str, conclusive: bool):
        failed: dict[str, bool] = {}
        for o in orientations:
            todo = pending.get(o, qs[o])
            left = []
            bad = False
            for q in todo:
                try:
                    sat = saturate_by_unit(Ideal(gens, seed_gb=seed), q)
                    tv = is_trivial(sat, budget())
                except ResourceLimitExceeded:
                    tv = Triviality.TIMEOUT
                if tv is Triviality.TRIVIAL:
                    continue
                left.append(q)
                if tv is Triviality.NONTRIVIAL:
                    bad = True
                    break
            if not left:
                return StabilityResult(StabilityStatus.STABLE, o, mode, tuple(notes))
            pending[o] = left
            failed[o] = bad
            notes.append(f"{o}/{mode}: " + ("a coefficient provably misses the radical"
                                            if bad else "resource limit"))
        if conclusive and all(failed.get(o) for o in orientations):
            return StabilityResult(StabilityStatus.UNSTABLE, None, mode, tuple(notes))
        return None

    try:
        res = direct_pass(Ideal(R.equations), "direct")
        if res:
            return res
        if identity_locus_fallback:
            m, n = R.mtype
            combined = Ideal(tuple(R.equations) + _identity_generators(m, n))
            if combined.is_homogeneous() and all(
                    is_homogeneous(q) for o in orientations for q in qs[o]):
                res = direct_pass(combined, "identity-truncated", truncated=True)
                if res:
                    return res
            else:
                notes.append("inhomogeneous system, truncated pass skipped")
            identity_seed = identity_locus_basis(m, n, compute=False)
            if identity_seed is not None:
                ambient = Ideal(R.equations, seed_gb=identity_seed)
                res = direct_pass(ambient, "identity-locus")
                if res:
                    return res
            else:
                ambient = combined
            if radical_fallback:
                try:
                    gens: Sequence[MPoly] = ()
                    seed: Sequence[MPoly] = ambient.groebner_basis(budget())
                except ResourceLimitExceeded:
                    gens, seed = ambient.generators, ambient.seed_gb
                res = radical_pass(gens, seed, "identity-locus-radical", conclusive=True)
                if res:
                    return res
        elif radical_fallback:
            res = radical_pass(R.equations, (), "radical", conclusive=False)
            if res:
                return res
    except ResourceLimitExceeded:
        notes.append("wall budget exhausted")
    if not radical_fallback:
        # a nonzero normal form alone is no proof of instability, so a
        # direct-only run that found no stable orientation stays undecided
        notes.append("direct modes exhausted without radical fallback")
    return StabilityResult(StabilityStatus.TIMEOUT, None, None, tuple(notes))


def representability(
    R: ClosedSet,
    target: SuperStructure,
    limits: GroebnerLimits | None = None,
    modular_precheck: bool = False,
    find_witness: bool = True,
    rng: random.Random | None = None,
) -> RepresentabilityResult:
    """Does any point of the orbit of `target` lie in R?

    The system asks for an invertible block change g with g^-1 . target
    satisfying R, saturated by the block determinants.  Infeasible (no
    solution over the complex numbers, by a trivial ideal) supports a
    non-degeneration verdict; Representable refutes the certificate.  With
    `modular_precheck` the Representable branch may be decided by a single
    modular basis and becomes probabilistic; leave it off when the answer
    matters.

    A parametric target is handled by treating its parameters as further
    unknowns, so Representable then means: some member of the family has an
    orbit point in R.
    """
    limits = limits or CERTIFY_LIMITS
    if (target.m, target.n) != R.mtype:
        raise ValueError("structure type does not match the certificate")
    m, n = R.mtype
    g = generic_element(m, n)
    table, E = act_inverse_side_cleared(g, target)
    eqs = [substitute_cleared(r, table, E) for r in R.equations]
    ideal = saturate_by_unit(Ideal(eqs), E)
    tv = is_trivial(ideal, limits, modular_precheck=modular_precheck)
    if tv is Triviality.TRIVIAL:
        return RepresentabilityResult(FeasibilityStatus.INFEASIBLE)
    if tv is Triviality.TIMEOUT:
        return RepresentabilityResult(FeasibilityStatus.INCONCLUSIVE, note="resource limit")
    witness = None
    if find_witness:
        witness = _search_witness(eqs, E, rng or random.Random(20260813))
    note = "witness found" if witness else ("modular precheck may have decided this"
                                            if modular_precheck else "")
    return RepresentabilityResult(FeasibilityStatus.REPRESENTABLE, witness, note)


def _search_witness(eqs: Sequence[MPoly], E: MPoly, rng: random.Random, tries: int = 400):
    """Best-effort rational point with E != 0 and all eqs zero.  Tries the
    identity-like assignment first, then sparse random values."""
    names = sorted({v for p in list(eqs) + [E] for v in p.vars})
    diagonal = {v for v in names if len(v) == 3 and v[1] == v[2]}
    candidates = [Fraction(x) for x in (1, -1, 2, -2, 0)] + [Fraction(1, 2)]

    def check(point):
        if E.evaluate(point) == 0:
            return False
        return all(p.evaluate(point) == 0 for p in eqs)

    ident = {v: Fraction(1) if v in diagonal else Fraction(0) for v in names}
    if check(ident):
        return ident
    for _ in range(tries):
        point = {}
        for v in names:
            if v in diagonal:
                point[v] = candidates[rng.randrange(4)]
            else:
                point[v] = Fraction(0) if rng.random() < 0.6 else candidates[rng.randrange(len(candidates))]
        if check(point):
            return point
    return None


def assemble_verdict(
    source_id: str,
    target_id: str,
    certificate: str,
    mem: MembershipResult,
    stab: StabilityResult,
    rep: RepresentabilityResult,
) -> Verdict:
    """Combine the three components.  A proven defect refutes the
    certificate even when another component timed out."""
    reasons: list[str] = []
    defects: list[str] = []
    if not mem.passed and mem.conclusive:
        defects.append("source does not satisfy the certificate equations"
                       + (" in any basis" if mem.mode == "orbit" else ""))
    if stab.status is StabilityStatus.UNSTABLE:
        defects.append("certificate set is not Borel-stable for any tested orientation")
    if rep.status is FeasibilityStatus.REPRESENTABLE:
        msg = "the target orbit meets the certificate set"
        if rep.witness:
            msg += " (rational witness found)"
        defects.append(msg)
    if defects:
        return Verdict(source_id, target_id, certificate, Outcome.REFUTED,
                       mem, stab, rep, tuple(defects))
    if (mem.passed and stab.status is StabilityStatus.STABLE
            and rep.status is FeasibilityStatus.INFEASIBLE):
        return Verdict(source_id, target_id, certificate, Outcome.NON_DEGENERATION,
                       mem, stab, rep, ())
    if not mem.passed:
        reasons.append("membership undecided within resource limits")
    if stab.status is StabilityStatus.TIMEOUT:
        reasons.append("stability undecided within resource limits")
    if rep.status is FeasibilityStatus.INCONCLUSIVE:
        reasons.append("representability undecided within resource limits")
    return Verdict(source_id, target_id, certificate, Outcome.INCONCLUSIVE,
                   mem, stab, rep, tuple(reasons))


def certify_family(
    R: ClosedSet,
    sources: Mapping[str, SuperStructure],
    targets: Mapping[str, SuperStructure],
    limits: GroebnerLimits | None = None,
    orientations: Sequence[str] | None = None,
    modular_precheck: bool = False,
    find_witness: bool = True,
) -> list[Verdict]:
    """Verdicts for every (source, target) pair of a certificate, sharing
    the stability check and per-structure component results."""
    limits = limits or CERTIFY_LIMITS
    stab = b_stability(R, limits, orientations)
    memberships = {sid: membership_with_orbit_fallback(R, J, limits, modular_precheck)
                   for sid, J in sources.items()}
    reps = {tid: representability(R, J, limits, modular_precheck, find_witness)
            for tid, J in targets.items()}
    out = []
    for sid in sources:
        for tid in targets:
            out.append(assemble_verdict(sid, tid, R.name, memberships[sid], stab, reps[tid]))
    return out


def certify_pair(
    R: ClosedSet,
    source: SuperStructure,
    target: SuperStructure,
    source_id: str = "source",
    target_id: str = "target",
    limits: GroebnerLimits | None = None,
    orientations: Sequence[str] | None = None,
    modular_precheck: bool = False,
    find_witness: bool = True,
) -> Verdict:
    return certify_family(R, {source_id: source}, {target_id: target}, limits,
                          orientations, modular_precheck, find_witness)[0]


def _b_stability_joint(
    R: ClosedSet,
    orientation: str = "upper",
    limits: GroebnerLimits | None = None,
) -> bool | None:
    """Reference formulation of the stability test, used as a cross-check.

    Works in the joint ring of coordinates and Borel entries: R is B-stable
    for the orientation iff each pulled-back equation vanishes on
    V(R) x (Borel space), tested by one Rabinowitsch triviality query per
    equation.  Returns True / False, or None on a resource limit.
    """
    limits = limits or DEFAULT_LIMITS
    m, n = R.mtype
    borel = generic_borel(m, n, orientation)
    table, D = act_symbolic_cleared(borel.change, generic_structure(m, n))
    for r in R.equations:
        pulled = substitute_cleared(r, table, D)
        if pulled.is_zero():
            continue
        tv = is_trivial(saturate_by_unit(Ideal(R.equations), pulled), limits)
        if tv is Triviality.TIMEOUT:
            return None
        if tv is Triviality.NONTRIVIAL:
            return False
    return True

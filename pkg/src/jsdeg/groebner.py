"""Groebner bases over Q with Buchberger's algorithm.

Small by design: the ideals here come from certificate checking (a handful
of generators, rarely more than ~30 variables).  Buchberger with the product
and chain criteria, normal selection strategy and reduced output is enough;
resource caps (basis size, total degree, wall time) turn runaway
computations into an explicit Timeout outcome instead of a wrong answer.

A reduced Groebner basis over Q is also one over C, so `is_trivial` decides
complex solvability by the weak Nullstellensatz.  The optional modular
pre-check runs Buchberger over GF(2^31 - 1) first; see `is_trivial`.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import MPoly, structure_var_indices


class ResourceLimitExceeded(RuntimeError):
    """A Groebner run went past a configured cap; no answer was produced."""


@dataclass(frozen=True)
class GroebnerLimits:
    max_basis: int | None = 4000
    max_degree: int | None = 120
    max_seconds: float | None = None

    def deadline(self) -> float | None:
        if self.max_seconds is None:
            return None
        return time.monotonic() + self.max_seconds


DEFAULT_LIMITS = GroebnerLimits()


class Triviality(Enum):
    TRIVIAL = "trivial"
    NONTRIVIAL = "nontrivial"
    TIMEOUT = "timeout"


# ---------------------------------------------------------------------------
# Monomial orders
# ---------------------------------------------------------------------------


def _aux_rank(name: str) -> int:
    """Priority class: structure constants, then basis-change symbols, then
    auxiliary (saturation) variables."""
    if structure_var_indices(name) is not None:
        return 0
    if name.startswith("_"):
        return 2
    return 1


def default_priority(names: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(names), key=lambda v: (_aux_rank(v), v)))


def is_homogeneous(p: MPoly) -> bool:
    """All terms of the same total degree (zero counts as homogeneous)."""
    return len({sum(e) for e in p.terms}) <= 1


class MonomialOrder:
    """A monomial order: kind ('degrevlex' or 'lex') plus a variable
    priority tuple, highest priority first."""

    __slots__ = ("kind", "variables", "_pos")

    def __init__(self, kind: str, variables: Sequence[str]):
        if kind not in ("degrevlex", "lex"):
            raise ValueError(f"unknown monomial order kind: {kind!r}")
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variables in order")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "_pos", {v: i for i, v in enumerate(variables)})

    def __setattr__(self, name, value):
        raise AttributeError("MonomialOrder is immutable")

    @classmethod
    def degrevlex(cls, variables: Sequence[str]) -> "MonomialOrder":
        return cls("degrevlex", variables)

    @classmethod
    def lex(cls, variables: Sequence[str]) -> "MonomialOrder":
        return cls("lex", variables)

    def key(self, exps: tuple[int, ...]):
        """Sort key: bigger key = bigger monomial."""
        if self.kind == "degrevlex":
            return (sum(exps), tuple(-e for e in reversed(exps)))
        return exps

    def heap_key(self, exps: tuple[int, ...]):
        """Inverted key for min-heaps (smallest key = biggest monomial)."""
        if self.kind == "degrevlex":
            return (-sum(exps), tuple(reversed(exps)))
        return tuple(-e for e in exps)

    def extend(self, names: Iterable[str]) -> "MonomialOrder":
        extra = [n for n in default_priority(names) if n not in self._pos]
        if not extra:
            return self
        return MonomialOrder(self.kind, self.variables + tuple(extra))

    def to_exps(self, p: MPoly) -> dict[tuple[int, ...], Fraction]:
        missing = [v for v in p.vars if v not in self._pos]
        if missing:
            raise ValueError(f"polynomial variables {missing} not in order {self.variables}")
        n = len(self.variables)
        out = {}
        for exps, coeff in p.terms.items():
            e = [0] * n
            for name, k in zip(p.vars, exps):
                e[self._pos[name]] = k
            out[tuple(e)] = coeff
        return out

    def from_exps(self, d: dict[tuple[int, ...], Fraction]) -> MPoly:
        return MPoly(self.variables, d)

    def __eq__(self, other):
        return (
            isinstance(other, MonomialOrder)
            and self.kind == other.kind
            and self.variables == other.variables
        )

    def __hash__(self):
        return hash((self.kind, self.variables))

    def __repr__(self):
        return f"MonomialOrder({self.kind}, {self.variables})"


# ---------------------------------------------------------------------------
# Kernel: polynomials as exponent-dicts over an abstract coefficient field
# ---------------------------------------------------------------------------


class _Basis:
    __slots__ = ("terms", "lt", "lc", "tail", "seed")

    def __init__(self, terms: dict, order: MonomialOrder, seed: bool = False):
        self.terms = terms
        self.lt = max(terms, key=order.key)
        self.lc = terms[self.lt]
        self.tail = {e: c for e, c in terms.items() if e != self.lt}
        self.seed = seed


def _divides(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _check_deadline(deadline: float | None):
    if deadline is not None and time.monotonic() > deadline:
        raise ResourceLimitExceeded("wall time limit exceeded")


def _normal_form_raw(
    p: dict,
    basis: list[_Basis],
    order: MonomialOrder,
    deadline: float | None = None,
) -> dict:
    """Full normal form of p against basis (every term reduced)."""
    if not p:
        return {}
    work = dict(p)
    heap = [(order.heap_key(e), e) for e in work]
    heapq.heapify(heap)
    out: dict = {}
    steps = 0
    while heap:
        _, e = heapq.heappop(heap)
        c = work.pop(e, None)
        if c is None or not c:
            continue
        reducer = None
        for g in basis:
            if _divides(g.lt, e):
                reducer = g
                break
        if reducer is None:
            out[e] = c
            continue
        steps += 1
        if steps % 128 == 0:
            _check_deadline(deadline)
        shift = tuple(x - y for x, y in zip(e, reducer.lt))
        ratio = c / reducer.lc
        for ge, gc in reducer.tail.items():
            te = tuple(x + y for x, y in zip(ge, shift))
            prev = work.get(te)
            if prev is None:
                val = -ratio * gc
                if val:
                    work[te] = val
                    heapq.heappush(heap, (order.heap_key(te), te))
            else:
                val = prev - ratio * gc
                if val:
                    work[te] = val
                else:
                    del work[te]
    return out


def _monic(terms: dict, order: MonomialOrder) -> dict:
    lt = max(terms, key=order.key)
    lc = terms[lt]
    return {e: c / lc for e, c in terms.items()}


def _spair(gi: _Basis, gj: _Basis, order: MonomialOrder) -> dict:
    lcm = tuple(max(a, b) for a, b in zip(gi.lt, gj.lt))
    si = tuple(l - a for l, a in zip(lcm, gi.lt))
    sj = tuple(l - b for l, b in zip(lcm, gj.lt))
    out: dict = {}
    for e, c in gi.terms.items():
        te = tuple(x + y for x, y in zip(e, si))
        out[te] = out.get(te, 0) + c / gi.lc
    for e, c in gj.terms.items():
        te = tuple(x + y for x, y in zip(e, sj))
        val = out.get(te, 0) - c / gj.lc
        if val:
            out[te] = val
        else:
            out.pop(te, None)
    return {e: c for e, c in out.items() if c}


def _buchberger(
    gens: list[dict],
    order: MonomialOrder,
    limits: GroebnerLimits,
    seed_count: int = 0,
    truncate_degree: int | None = None,
) -> list[dict]:
    """Reduced Groebner basis of <gens>.

    The first `seed_count` entries are trusted to already form a Groebner
    basis of the ideal they generate: S-pairs internal to that prefix reduce
    to zero by assumption and are never scheduled.  (Normal forms against the
    full basis stay valid membership certificates either way; only the
    completeness of the result rides on the trust.)

    With `truncate_degree` set, S-pairs above that degree are never
    processed.  Pairs come off the queue in ascending degree, and for
    homogeneous generators an S-pair of degree d can only contribute basis
    elements of degree d, so the result is the complete degree <= cap part
    of the basis: normal forms of homogeneous polynomials within the cap
    are exact.  (For inhomogeneous generators a truncated run proves
    memberships but cannot refute them.)

    A nonzero constant entering the basis settles everything: the reduced
    basis of the unit ideal is {1}, returned immediately.
    """
    deadline = limits.deadline()
    G: list[_Basis] = []
    seen = set()
    for pos, terms in enumerate(gens):
        if not terms:
            continue
        t = tuple(sorted(_monic(terms, order).items()))
        if t in seen:
            continue
        seen.add(t)
        g = _Basis(dict(t), order, seed=pos < seed_count)
        if not any(g.lt):
            return [{g.lt: g.lc}]
        G.append(g)
    G.sort(key=lambda g: order.key(g.lt))

    pending: set[tuple[int, int]] = set()
    heap: list[tuple[int, int, int]] = []

    def push_pair(i: int, j: int):
        i, j = (i, j) if i < j else (j, i)
        lcm = tuple(max(a, b) for a, b in zip(G[i].lt, G[j].lt))
        pending.add((i, j))
        heapq.heappush(heap, (sum(lcm), i, j))

    for i in range(len(G)):
        for j in range(i + 1, len(G)):
            if G[i].seed and G[j].seed:
                continue
            push_pair(i, j)

    while heap:
        _check_deadline(deadline)
        pair_degree, i, j = heapq.heappop(heap)
        if truncate_degree is not None and pair_degree > truncate_degree:
            break
        if (i, j) not in pending:
            continue
        pending.discard((i, j))
        gi, gj = G[i], G[j]
        lcm = tuple(max(a, b) for a, b in zip(gi.lt, gj.lt))
        # product criterion: coprime leading monomials
        if lcm == tuple(a + b for a, b in zip(gi.lt, gj.lt)):
            continue
        # chain criterion: some g_k divides the lcm and both mixed pairs done
        skip = False
        for k in range(len(G)):
            if k == i or k == j:
                continue
            if _divides(G[k].lt, lcm):
                a = (i, k) if i < k else (k, i)
                b = (j, k) if j < k else (k, j)
                if a not in pending and b not in pending:
                    skip = True
                    break
        if skip:
            continue
        r = _normal_form_raw(_spair(gi, gj, order), G, order, deadline)
        if not r:
            continue
        deg = max(sum(e) for e in r)
        if deg == 0:
            return [_monic(r, order)]
        if limits.max_degree is not None and deg > limits.max_degree:
            raise ResourceLimitExceeded(f"degree limit exceeded ({deg} > {limits.max_degree})")
        G.append(_Basis(_monic(r, order), order))
        if limits.max_basis is not None and len(G) > limits.max_basis:
            raise ResourceLimitExceeded(f"basis size limit exceeded ({len(G)})")
        new = len(G) - 1
        for k in range(new):
            push_pair(k, new)

    # minimalize: drop elements whose lt is divisible by another's lt
    order_idx = sorted(range(len(G)), key=lambda i: order.key(G[i].lt))
    kept: list[int] = []
    for i in order_idx:
        if not any(_divides(G[k].lt, G[i].lt) for k in kept):
            kept.append(i)
    minimal = [G[i] for i in kept]
    # tail-reduce each against the others for the unique reduced basis
    reduced: list[dict] = []
    for i, g in enumerate(minimal):
        others = [h for j, h in enumerate(minimal) if j != i]
        r = _normal_form_raw(g.terms, others, order, deadline)
        if r:
            reduced.append(_monic(r, order))
    reduced.sort(key=lambda terms: order.key(max(terms, key=order.key)))
    return reduced


# ---------------------------------------------------------------------------
# Modular arithmetic for the pre-check
# ---------------------------------------------------------------------------

PRECHECK_PRIME = 2**31 - 1


class _Fp:
    __slots__ = ("v",)
    p = PRECHECK_PRIME

    def __init__(self, v: int):
        self.v = v % self.p

    def __add__(self, other):
        return _Fp(self.v + other.v)

    def __sub__(self, other):
        return _Fp(self.v - other.v)

    def __neg__(self):
        return _Fp(-self.v)

    def __mul__(self, other):
        if isinstance(other, int):
            return _Fp(self.v * other)
        return _Fp(self.v * other.v)

    __rmul__ = __mul__

    def __radd__(self, other):
        if isinstance(other, int):
            return _Fp(other + self.v)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, int):
            return _Fp(other - self.v)
        return NotImplemented

    def __truediv__(self, other):
        return _Fp(self.v * pow(other.v, -1, self.p))

    def __bool__(self):
        return self.v != 0

    def __eq__(self, other):
        if isinstance(other, int):
            return self.v == other % self.p
        return isinstance(other, _Fp) and self.v == other.v

    def __hash__(self):
        return hash(self.v)

    def __repr__(self):
        return f"Fp({self.v})"


class _BadPrime(ValueError):
    pass


def _to_fp(terms: dict) -> dict:
    out = {}
    for e, c in terms.items():
        den = c.denominator % PRECHECK_PRIME
        if den == 0:
            raise _BadPrime
        v = _Fp(c.numerator) / _Fp(den)
        if v:
            out[e] = v
    return out


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------


def _is_one_basis(basis: list[dict]) -> bool:
    if len(basis) != 1 or len(basis[0]) != 1:
        return False
    exps = next(iter(basis[0]))
    return not any(exps)


class Ideal:
    """An ideal of Q[x...] given by generators and a monomial order.

    `seed_gb` primes Buchberger with an already-computed Groebner basis
    whose ideal is contained in this one (typically: the same ideal minus a
    few extra generators).  Its elements join the generators, but S-pairs
    internal to the seed are skipped.  The seed must really be a Groebner
    basis under a compatible order; normal forms that reach zero are sound
    membership certificates regardless, but a bogus seed can make the
    computed basis incomplete (so nonzero normal forms and NonTrivial
    verdicts would be untrustworthy).

    Compatible order means: the seed's variables keep their relative
    priority and the order kind is unchanged.  Extending an order with new
    variables never reorders old ones, so a seed computed with the default
    inferred order stays valid when generators add variables, and in
    particular survives `saturate_by_unit`.
    """

    def __init__(
        self,
        generators: Iterable[MPoly],
        order: MonomialOrder | None = None,
        seed_gb: Iterable[MPoly] = (),
    ):
        generators = list(generators)
        seed = list(seed_gb)
        for g in generators + seed:
            if not isinstance(g, MPoly):
                raise TypeError(f"ideal generator is not a polynomial: {g!r}")
        gens = [g for g in generators if not g.is_zero()]
        seed = [g for g in seed if not g.is_zero()]
        if order is None:
            names: set[str] = set()
            for g in gens + seed:
                names.update(g.vars)
            order = MonomialOrder.degrevlex(default_priority(names))
        else:
            extra = {v for g in gens + seed for v in g.vars if v not in order.variables}
            if extra:
                order = order.extend(extra)
        self.generators: tuple[MPoly, ...] = tuple(gens)
        self.seed_gb: tuple[MPoly, ...] = tuple(seed)
        self.order = order
        self._basis_raw: list[dict] | None = None
        self._trunc_raw: dict[int, list[dict]] = {}

    def _basis(self, limits: GroebnerLimits | None = None) -> list[dict]:
        if self._basis_raw is None:
            limits = limits or DEFAULT_LIMITS
            gens = [self.order.to_exps(g) for g in self.seed_gb]
            gens += [self.order.to_exps(g) for g in self.generators]
            self._basis_raw = _buchberger(gens, self.order, limits, seed_count=len(self.seed_gb))
        return self._basis_raw

    def groebner_basis(self, limits: GroebnerLimits | None = None) -> tuple[MPoly, ...]:
        """Reduced, monic Groebner basis (deterministic)."""
        return tuple(self.order.from_exps(d) for d in self._basis(limits))

    def _nf_against(self, p: MPoly, basis: list[dict],
                    limits: GroebnerLimits | None) -> MPoly:
        order = self.order
        extra = [v for v in p.vars if v not in order.variables]
        if extra:
            order = order.extend(extra)
            pad = len(order.variables) - len(self.order.variables)
            basis = [_pad_terms(d, pad) for d in basis]
        limits = limits or DEFAULT_LIMITS
        structured = [_Basis(d, order) for d in basis] if basis else []
        structured.sort(key=lambda g: order.key(g.lt))
        nf = _normal_form_raw(order.to_exps(p), structured, order, limits.deadline())
        return order.from_exps(nf)

    def reduce(self, p: MPoly, limits: GroebnerLimits | None = None) -> MPoly:
        """Full normal form of p modulo the ideal."""
        return self._nf_against(p, self._basis(limits), limits)

    def contains(self, p: MPoly, limits: GroebnerLimits | None = None) -> bool:
        return self.reduce(p, limits).is_zero()

    def is_homogeneous(self) -> bool:
        return all(is_homogeneous(g) for g in self.generators + self.seed_gb)

    def truncated_basis(self, degree: int,
                        limits: GroebnerLimits | None = None) -> tuple[MPoly, ...]:
        """The degree <= `degree` part of the Groebner basis.

        Only offered for homogeneous ideals, where S-pairs above the cap
        cannot influence anything at or below it, so the truncation is the
        exact low-degree part and costs far less than a full basis."""
        if not self.is_homogeneous():
            raise ValueError("truncated bases need homogeneous generators")
        if degree not in self._trunc_raw:
            limits = limits or DEFAULT_LIMITS
            gens = [self.order.to_exps(g) for g in self.seed_gb]
            gens += [self.order.to_exps(g) for g in self.generators]
            self._trunc_raw[degree] = _buchberger(
                gens, self.order, limits, seed_count=len(self.seed_gb),
                truncate_degree=degree)
        return tuple(self.order.from_exps(d) for d in self._trunc_raw[degree])

    def truncated_reduce(self, p: MPoly, degree: int | None = None,
                         limits: GroebnerLimits | None = None) -> MPoly:
        """Normal form of a homogeneous p against the truncated basis.

        Zero means p is in the ideal; for homogeneous p within the cap a
        nonzero normal form excludes plain membership just as the full
        basis would."""
        if not is_homogeneous(p):
            raise ValueError("truncated reduction needs a homogeneous polynomial")
        cap = p.total_degree() if degree is None else degree
        if p.total_degree() > cap:
            raise ValueError(f"degree cap {cap} below deg(p) = {p.total_degree()}")
        self.truncated_basis(cap, limits)
        return self._nf_against(p, self._trunc_raw[cap], limits)

    def __repr__(self):
        return f"Ideal({len(self.generators)} generators, {self.order.kind})"


def _pad_terms(d: dict, pad: int) -> dict:
    if not pad:
        return d
    return {e + (0,) * pad: c for e, c in d.items()}


def groebner_basis(ideal: Ideal, limits: GroebnerLimits | None = None) -> tuple[MPoly, ...]:
    return ideal.groebner_basis(limits)


def reduce_poly(p: MPoly, ideal: Ideal, limits: GroebnerLimits | None = None) -> MPoly:
    return ideal.reduce(p, limits)


def is_trivial(
    ideal: Ideal,
    limits: GroebnerLimits | None = None,
    modular_precheck: bool = False,
) -> Triviality:
    """Does the ideal contain 1 (equivalently: no common zero over C)?

    With `modular_precheck`, Buchberger first runs over GF(2^31 - 1).  A
    modular basis of {1} is always confirmed over Q before Trivial is
    reported.  A modular basis != {1} is reported NonTrivial immediately;
    that branch is probabilistic (a bad prime can mask rational
    triviality), so callers that feed a positive verdict must leave the
    flag off.
    """
    limits = limits or DEFAULT_LIMITS
    all_gens = ideal.seed_gb + ideal.generators
    if any(g.is_constant() and not g.is_zero() for g in all_gens):
        return Triviality.TRIVIAL
    if not all_gens:
        return Triviality.NONTRIVIAL
    if modular_precheck:
        try:
            gens = [_to_fp(ideal.order.to_exps(g)) for g in all_gens]
            modular = _buchberger(gens, ideal.order, limits, seed_count=len(ideal.seed_gb))
            if not _is_one_basis(modular):
                return Triviality.NONTRIVIAL
        except _BadPrime:
            pass
        except ResourceLimitExceeded:
            pass
    try:
        basis = ideal._basis(limits)
    except ResourceLimitExceeded:
        return Triviality.TIMEOUT
    return Triviality.TRIVIAL if _is_one_basis(basis) else Triviality.NONTRIVIAL


def fresh_aux_name(taken: Iterable[str], stem: str = "_u") -> str:
    taken = set(taken)
    if stem not in taken:
        return stem
    k = 2
    while f"{stem}{k}" in taken:
        k += 1
    return f"{stem}{k}"


def saturate_by_unit(ideal: Ideal, d: MPoly, var: str | None = None) -> Ideal:
    """Ideal of the locus where d is invertible: adjoin d*y - 1 for a fresh
    auxiliary y (Rabinowitsch)."""
    if d.is_zero():
        raise ValueError("cannot saturate by the zero polynomial")
    taken = set(ideal.order.variables) | set(d.vars)
    name = var or fresh_aux_name(taken)
    if name in taken:
        raise ValueError(f"saturation variable {name!r} already in use")
    y = MPoly.variable(name)
    return Ideal(
        list(ideal.generators) + [d * y - 1],
        ideal.order.extend({name} | set(d.vars)),
        seed_gb=ideal.seed_gb,
    )

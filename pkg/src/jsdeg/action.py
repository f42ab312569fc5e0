"""Base-change action on structure constants.

g = diag(A, B) in GL(V0) x GL(V1) acts by (g * mu)(x, y) = g mu(g^-1 x, g^-1 y),
so in coordinates

    c'_ij^k = sum_{p,q,r} G_kr c_pq^r (G^-1)_pi (G^-1)_qj

with all four indices confined to blocks.  Three entry domains:

  scalar   -- Fraction entries, exact inverse, returns a SuperStructure;
  symbolic -- MPoly entries, inverse via adjugate/determinant, returns the
              denominator-cleared table D * c' plus D (a power of the block
              determinants);
  laurent  -- LaurentPoly entries; exact entries are produced only when the
              adjugate numerators divide (witness checking never divides,
              see degeneration.verify_witness).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import LaurentPoly, MPoly, ScalarLike
from .superalgebra import SuperStructure, canonical_triples, parity


class SingularMatrixError(ValueError):
    pass


def _det(rows):
    """Determinant over any commutative ring via Laplace expansion."""
    n = len(rows)
    if n == 0:
        raise ValueError("empty matrix")
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = None
    for j in range(n):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = rows[0][j] * _det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def _adjugate(rows):
    """adj(M) with M * adj(M) = det(M) * I."""
    n = len(rows)
    if n == 1:
        x = rows[0][0]
        one = x * 0 + 1 if isinstance(x, (MPoly, LaurentPoly)) else Fraction(1)
        return [[one]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [r[:j] + r[j + 1 :] for k, r in enumerate(rows) if k != i]
            cof = _det(minor)
            if (i + j) % 2:
                cof = -cof
            out[j][i] = cof
    return out


def _invert_rational(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(rows)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col]), None)
        if pivot is None:
            raise SingularMatrixError("block is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


@dataclass(frozen=True)
class BasisChange:
    """Block-diagonal basis change for type (m, n): an m x m even block and
    an n x n odd block over one of the three entry domains."""

    m: int
    n: int
    even: tuple[tuple, ...]
    odd: tuple[tuple, ...]
    domain: str

    def __post_init__(self):
        if self.domain not in ("scalar", "symbolic", "laurent"):
            raise ValueError(f"unknown domain {self.domain!r}")
        if len(self.even) != self.m or any(len(r) != self.m for r in self.even):
            raise ValueError("even block has wrong shape")
        if len(self.odd) != self.n or any(len(r) != self.n for r in self.odd):
            raise ValueError("odd block has wrong shape")

    @classmethod
    def make(cls, m: int, n: int, even, odd, domain: str) -> "BasisChange":
        lift = {
            "scalar": lambda x: Fraction(x) if not isinstance(x, Fraction) else x,
            "symbolic": lambda x: x if isinstance(x, MPoly) else MPoly.const(x),
            "laurent": lambda x: x if isinstance(x, LaurentPoly) else LaurentPoly.from_mpoly(x),
        }[domain]
        ev = tuple(tuple(lift(x) for x in row) for row in even)
        od = tuple(tuple(lift(x) for x in row) for row in odd)
        return cls(m, n, ev, od, domain)

    @classmethod
    def identity(cls, m: int, n: int) -> "BasisChange":
        ev = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
        od = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        return cls.make(m, n, ev, od, "scalar")

    @classmethod
    def scaling(cls, m: int, n: int, k: int = -1) -> "BasisChange":
        """g = t^k * identity (laurent domain)."""
        ev = [[LaurentPoly.t_power(k) if i == j else LaurentPoly() for j in range(m)] for i in range(m)]
        od = [[LaurentPoly.t_power(k) if i == j else LaurentPoly() for j in range(n)] for i in range(n)]
        return cls(m, n, ev, od, "laurent")

    def block(self, side: int):
        return self.even if side == 0 else self.odd

    def matmul(self, other: "BasisChange") -> "BasisChange":
        """Blockwise matrix product self . other (domains may differ; the
        result is laurent if either factor is, else symbolic if either is)."""
        if (self.m, self.n) != (other.m, other.n):
            raise ValueError("type mismatch")
        domain = "laurent" if "laurent" in (self.domain, other.domain) else (
            "symbolic" if "symbolic" in (self.domain, other.domain) else "scalar")
        lift = {
            "scalar": lambda x: x,
            "symbolic": lambda x: x if isinstance(x, MPoly) else MPoly.const(x),
            "laurent": lambda x: x if isinstance(x, LaurentPoly) else LaurentPoly.from_mpoly(x),
        }[domain]

        def mulblock(a, b):
            size = len(a)
            rows = []
            for i in range(size):
                row = []
                for j in range(size):
                    acc = None
                    for k in range(size):
                        term = lift(a[i][k]) * lift(b[k][j])
                        acc = term if acc is None else acc + term
                    row.append(acc)
                rows.append(tuple(row))
            return tuple(rows)

        return BasisChange(self.m, self.n, mulblock(self.even, other.even), mulblock(self.odd, other.odd), domain)


def block_determinants(g: BasisChange):
    """(det even, det odd); an empty block has determinant 1 in its domain."""
    one_scalar = Fraction(1)
    one = {
        "scalar": one_scalar,
        "symbolic": MPoly.one(),
        "laurent": LaurentPoly.from_mpoly(1),
    }[g.domain]
    det_even = _det([list(r) for r in g.even]) if g.m else one
    det_odd = _det([list(r) for r in g.odd]) if g.n else one
    return det_even, det_odd


def act(g: BasisChange, J: SuperStructure) -> SuperStructure:
    """Transformed structure for a scalar g (exact inverse)."""
    if g.domain != "scalar":
        raise ValueError("act needs a scalar basis change; use act_symbolic_cleared or act_laurent")
    if (g.m, g.n) != (J.m, J.n):
        raise ValueError("type mismatch")
    inv_even = _invert_rational([list(r) for r in g.even]) if g.m else []
    inv_odd = _invert_rational([list(r) for r in g.odd]) if g.n else []

    def G(k, r):
        return g.even[k][r] if k < g.m else g.odd[k - g.m][r - g.m]

    def Ginv(p, i):
        return inv_even[p][i] if p < g.m else inv_odd[p - g.m][i - g.m]

    N = J.dimension
    entries: dict[tuple[int, int, int], MPoly] = {}
    for i in range(1, N + 1):
        bi = J.parity_of(i)
        for j in range(1, N + 1):
            bj = J.parity_of(j)
            for k in range(1, N + 1):
                if (bi + bj - J.parity_of(k)) % 2:
                    continue
                acc = MPoly.zero()
                for (p, q, r), c in J.table.items():
                    if J.parity_of(p) != bi or J.parity_of(q) != bj:
                        continue
                    w = G(k - 1, r - 1) * Ginv(p - 1, i - 1) * Ginv(q - 1, j - 1)
                    if w:
                        acc = acc + c * w
                if acc:
                    entries[(i, j, k)] = acc
    return SuperStructure(J.m, J.n, entries, parameters=J.parameters)


def transformed_entries_cleared(g: BasisChange, J: SuperStructure):
    """Numerators of the transformed canonical entries for a symbolic g.

    Returns (entries, det_even, det_odd) where entries maps each canonical
    (i,j,k) to a numerator N with the exact transformed constant equal to
    N / (det_bl(i) * det_bl(j)).
    """
    if g.domain != "symbolic":
        raise ValueError("symbolic basis change required")
    if (g.m, g.n) != (J.m, J.n):
        raise ValueError("type mismatch")
    m, n = g.m, g.n
    adj_even = _adjugate([list(r) for r in g.even]) if m else []
    adj_odd = _adjugate([list(r) for r in g.odd]) if n else []
    det_even, det_odd = block_determinants(g)

    def G(k, r):
        return g.even[k][r] if k < m else g.odd[k - m][r - m]

    def Adj(p, i):
        return adj_even[p][i] if p < m else adj_odd[p - m][i - m]

    entries: dict[tuple[int, int, int], MPoly] = {}
    for (i, j, k) in canonical_triples(m, n):
        bi, bj = parity(m, n, i), parity(m, n, j)
        acc = MPoly.zero()
        for (p, q, r), c in J.table.items():
            if parity(m, n, p) != bi or parity(m, n, q) != bj:
                continue
            w = G(k - 1, r - 1) * Adj(p - 1, i - 1) * Adj(q - 1, j - 1)
            if w:
                acc = acc + c * w
        entries[(i, j, k)] = acc
    return entries, det_even, det_odd


def act_symbolic_cleared(g: BasisChange, J: SuperStructure):
    """(table, D): table maps canonical triples to D * c'_ij^k with one
    common clearing factor D = (det even)^2 (det odd)^2."""
    entries, det_even, det_odd = transformed_entries_cleared(g, J)
    D = det_even * det_even * det_odd * det_odd
    m, n = g.m, g.n
    out = {}
    for (i, j, k), num in entries.items():
        pe = (1 if parity(m, n, i) == 0 else 0) + (1 if parity(m, n, j) == 0 else 0)
        po = 2 - pe
        comp = det_even ** (2 - pe) * det_odd ** (2 - po)
        out[(i, j, k)] = num * comp
    return out, D


def act_laurent(g: BasisChange, J: SuperStructure) -> dict[tuple[int, int, int], LaurentPoly]:
    """Transformed canonical table along a Laurent curve; requires every
    entry to be Laurent-polynomial (true e.g. for monomial determinants)."""
    fractions = laurent_transformed_fractions(g, J)
    out = {}
    for t, (num, d) in fractions.items():
        q = _laurent_exact_div(num, d)
        if q is None:
            raise ValueError(f"transformed entry c{t[0]}{t[1]}^{t[2]} is not a Laurent polynomial")
        out[t] = q
    return out


def laurent_transformed_fractions(g: BasisChange, J: SuperStructure):
    """Canonical entries of g * J as exact fractions (numerator, denominator)
    of Laurent polynomials, denominator = det_bl(i) * det_bl(j) != 0."""
    if g.domain != "laurent":
        raise ValueError("laurent basis change required")
    if (g.m, g.n) != (J.m, J.n):
        raise ValueError("type mismatch")
    m, n = g.m, g.n
    det_even, det_odd = block_determinants(g)
    if (m and det_even.is_zero()) or (n and det_odd.is_zero()):
        raise SingularMatrixError("curve block determinant is identically zero")
    adj_even = _adjugate([list(r) for r in g.even]) if m else []
    adj_odd = _adjugate([list(r) for r in g.odd]) if n else []

    def G(k, r):
        return g.even[k][r] if k < m else g.odd[k - m][r - m]

    def Adj(p, i):
        return adj_even[p][i] if p < m else adj_odd[p - m][i - m]

    dets = (det_even, det_odd)
    out = {}
    for (i, j, k) in canonical_triples(m, n):
        bi, bj = parity(m, n, i), parity(m, n, j)
        acc = LaurentPoly()
        for (p, q, r), c in J.table.items():
            if parity(m, n, p) != bi or parity(m, n, q) != bj:
                continue
            w = G(k - 1, r - 1) * Adj(p - 1, i - 1) * Adj(q - 1, j - 1)
            if w:
                acc = acc + w * c
        out[(i, j, k)] = (acc, dets[bi] * dets[bj])
    return out


def _laurent_exact_div(num: LaurentPoly, den: LaurentPoly) -> LaurentPoly | None:
    """num / den when the quotient is a Laurent polynomial, else None."""
    if num.is_zero():
        return LaurentPoly()
    if den.is_zero():
        raise ZeroDivisionError("laurent division by zero")
    # reduce to polynomial division in t by shifting out the orders
    no, do = num.order(), den.order()
    rem = {k - no: p for k, p in num.terms.items()}
    dshift = {k - do: p for k, p in den.terms.items()}
    ddeg = max(dshift)
    dlead = dshift[0] if 0 in dshift else None
    if dlead is None:
        raise AssertionError("shifted denominator lost its constant term")
    quot: dict[int, MPoly] = {}
    while rem:
        low = min(rem)
        q = _mpoly_exact_div(rem[low], dlead)
        if q is None:
            return None
        quot[low] = q
        for k, p in dshift.items():
            tgt = low + k
            cur = rem.get(tgt, MPoly.zero()) - q * p
            if cur:
                rem[tgt] = cur
            else:
                rem.pop(tgt, None)
        if max(quot) > max(num.terms) - no:  # cannot terminate: not divisible
            return None
    return LaurentPoly({k + no - do: p for k, p in quot.items()})


def _mpoly_exact_div(num: MPoly, den: MPoly) -> MPoly | None:
    """num / den when exact, else None (single-divisor division)."""
    if den.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if num.is_zero():
        return MPoly.zero()
    if den.is_constant():
        return num * (1 / den.constant_value())
    vars_ = tuple(sorted(set(num.vars) | set(den.vars)))
    from .groebner import MonomialOrder  # local import to avoid a cycle

    order = MonomialOrder.degrevlex(vars_)
    nd = order.to_exps(num)
    dd = order.to_exps(den)
    dlt = max(dd, key=order.key)
    dlc = dd[dlt]
    quot: dict[tuple[int, ...], Fraction] = {}
    while nd:
        lt = max(nd, key=order.key)
        shift = tuple(a - b for a, b in zip(lt, dlt))
        if any(s < 0 for s in shift):
            return None
        ratio = nd[lt] / dlc
        quot[shift] = quot.get(shift, Fraction(0)) + ratio
        for e, c in dd.items():
            te = tuple(a + b for a, b in zip(e, shift))
            val = nd.get(te, Fraction(0)) - ratio * c
            if val:
                nd[te] = val
            else:
                nd.pop(te, None)
    return order.from_exps(quot)


def act_inverse_side_cleared(g: BasisChange, J: SuperStructure):
    """Cleared canonical entries of g^-1 * J for a symbolic g.

    (g^-1 * J)_ij^k = sum_{p,q,r} (G^-1)_kr J_pq^r G_pi G_qj carries a single
    denominator det_bl(k).  Returns (table, E) with E = det_even * det_odd and
    table[(i,j,k)] = E * (g^-1 * J)_ij^k, a polynomial in the entries of g
    (and any parameters of J).  Useful when quantifying over the whole group:
    g and g^-1 range over the same set, and this side keeps degrees lower.
    """
    if g.domain != "symbolic":
        raise ValueError("symbolic basis change required")
    if (g.m, g.n) != (J.m, J.n):
        raise ValueError("type mismatch")
    m, n = g.m, g.n
    adj_even = _adjugate([list(r) for r in g.even]) if m else []
    adj_odd = _adjugate([list(r) for r in g.odd]) if n else []
    det_even, det_odd = block_determinants(g)

    def G(p, i):
        return g.even[p][i] if p < m else g.odd[p - m][i - m]

    def Adj(k, r):
        return adj_even[k][r] if k < m else adj_odd[k - m][r - m]

    table: dict[tuple[int, int, int], MPoly] = {}
    for (i, j, k) in canonical_triples(m, n):
        bi, bj = parity(m, n, i), parity(m, n, j)
        acc = MPoly.zero()
        for (p, q, r), c in J.table.items():
            if parity(m, n, p) != bi or parity(m, n, q) != bj:
                continue
            w = Adj(k - 1, r - 1) * G(p - 1, i - 1) * G(q - 1, j - 1)
            if w:
                acc = acc + c * w
        other = det_odd if parity(m, n, k) == 0 else det_even
        table[(i, j, k)] = acc * other
    return table, det_even * det_odd


# ---------------------------------------------------------------------------
# Generic (symbolic) group elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BorelElement:
    """Generic triangular element: the basis change, its diagonal variables
    (each must stay invertible) and the orientation used."""

    change: BasisChange
    diagonal_vars: tuple[str, ...]
    orientation: str

    @property
    def variables(self) -> tuple[str, ...]:
        out = []
        for block in (self.change.even, self.change.odd):
            for row in block:
                for x in row:
                    out.extend(v for v in x.vars if v not in out)
        return tuple(out)


def generic_borel(m: int, n: int, orientation: str = "upper", even_prefix: str = "a", odd_prefix: str = "d") -> BorelElement:
    """Generic block-triangular basis change with fresh symbolic entries.

    The group acting is a product of the even and odd general linear
    groups, so a Borel subgroup may be triangular in opposite directions
    on the two blocks.  A single word ("upper" or "lower") triangulates
    both blocks the same way; a hyphenated pair such as "upper-lower"
    gives the even block the first word and the odd block the second.
    """
    parts = orientation.split("-")
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2 or any(p not in ("upper", "lower") for p in parts):
        raise ValueError(f"unknown orientation {orientation!r}")
    even_orient, odd_orient = parts

    def block(size: int, prefix: str, direction: str):
        rows = []
        for r in range(1, size + 1):
            row = []
            for s in range(1, size + 1):
                above = s >= r if direction == "upper" else s <= r
                row.append(MPoly.variable(f"{prefix}{r}{s}") if above else MPoly.zero())
            rows.append(tuple(row))
        return tuple(rows)

    ev = block(m, even_prefix, even_orient)
    od = block(n, odd_prefix, odd_orient)
    diag = tuple(f"{even_prefix}{r}{r}" for r in range(1, m + 1)) + tuple(
        f"{odd_prefix}{r}{r}" for r in range(1, n + 1)
    )
    return BorelElement(BasisChange(m, n, ev, od, "symbolic"), diag, orientation)


def generic_element(m: int, n: int, even_prefix: str = "a", odd_prefix: str = "d") -> BasisChange:
    """Fully generic block-diagonal element (dense symbolic blocks)."""

    def block(size: int, prefix: str):
        return tuple(
            tuple(MPoly.variable(f"{prefix}{r}{s}") for s in range(1, size + 1))
            for r in range(1, size + 1)
        )

    return BasisChange(m, n, block(m, even_prefix), block(n, odd_prefix), "symbolic")

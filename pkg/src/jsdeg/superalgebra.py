"""Z2-graded structure constants and the graded Jordan checks.

A structure of type (m, n) has basis b_1..b_m (even), b_{m+1}..b_{m+n}
(odd) and products b_i b_j = sum_k c_ij^k b_k.  The grading forces
c_ij^k = 0 unless parity(i) + parity(j) = parity(k) mod 2; that is enforced
at construction.  Supercommutativity and the degree-4 graded Jordan
identity are checks, not constructor invariants, so defective input can be
loaded (not completed) and reported with its violation list.

Entries are MPoly values so one model covers numeric structures and
families with free parameters (and the fully generic structure whose
entries are the canonical c_ij^k variables themselves).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping, Sequence

from .exact import MPoly, ScalarLike, structure_var


def parity(m: int, n: int, i: int) -> int:
    if not 1 <= i <= m + n:
        raise IndexError(f"basis index {i} out of range for type ({m},{n})")
    return 0 if i <= m else 1


def grading_ok(m: int, n: int, i: int, j: int, k: int) -> bool:
    return (parity(m, n, i) + parity(m, n, j) - parity(m, n, k)) % 2 == 0


def canonical_index(m: int, n: int, i: int, j: int, k: int) -> tuple[int, tuple[int, int, int] | None]:
    """Rewrite (i,j,k) with i <= j by supercommutativity.

    Returns (sign, triple); sign 0 and triple None for an odd diagonal pair
    (f_i f_i = 0 identically)."""
    if not grading_ok(m, n, i, j, k):
        raise ValueError(f"grading violation: c{i}{j}^{k} for type ({m},{n})")
    if i <= j:
        if i == j and parity(m, n, i) == 1:
            return 0, None
        return 1, (i, j, k)
    sign = -1 if parity(m, n, i) == 1 and parity(m, n, j) == 1 else 1
    return sign, (j, i, k)


@lru_cache(maxsize=None)
def canonical_triples(m: int, n: int) -> tuple[tuple[int, int, int], ...]:
    """All (i,j,k) with i <= j, grading-compatible, odd diagonals dropped."""
    out = []
    N = m + n
    for i in range(1, N + 1):
        for j in range(i, N + 1):
            if i == j and parity(m, n, i) == 1:
                continue
            for k in range(1, N + 1):
                if grading_ok(m, n, i, j, k):
                    out.append((i, j, k))
    return tuple(out)


def canonical_variables(m: int, n: int) -> tuple[str, ...]:
    return tuple(structure_var(*t) for t in canonical_triples(m, n))


class SuperStructure:
    """Structure constants of a superalgebra of type (m, n)."""

    __slots__ = ("m", "n", "parameters", "table")

    def __init__(
        self,
        m: int,
        n: int,
        entries: Mapping[tuple[int, int, int], MPoly | ScalarLike] | None = None,
        parameters: Sequence[str] = (),
        complete: bool = False,
    ):
        if m < 0 or n < 0 or m + n == 0:
            raise ValueError(f"bad type ({m},{n})")
        table: dict[tuple[int, int, int], MPoly] = {}
        for (i, j, k), val in (entries or {}).items():
            if not grading_ok(m, n, i, j, k):
                raise ValueError(f"grading violation: c{i}{j}^{k} for type ({m},{n})")
            p = val if isinstance(val, MPoly) else MPoly.const(val)
            if p:
                table[(i, j, k)] = p
        if complete:
            for (i, j, k), p in list(table.items()):
                if i == j or (j, i, k) in table:
                    continue
                sign = -1 if parity(m, n, i) == 1 and parity(m, n, j) == 1 else 1
                mirror = p * sign
                if mirror:
                    table[(j, i, k)] = mirror
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "parameters", tuple(parameters))
        object.__setattr__(self, "table", table)

    def __setattr__(self, name, value):
        raise AttributeError("SuperStructure is immutable")

    @classmethod
    def zero(cls, m: int, n: int) -> "SuperStructure":
        return cls(m, n, {})

    @property
    def dimension(self) -> int:
        return self.m + self.n

    def parity_of(self, i: int) -> int:
        return parity(self.m, self.n, i)

    def entry(self, i: int, j: int, k: int) -> MPoly:
        """Raw table entry (zero when grading-incompatible or absent)."""
        for idx in (i, j, k):
            if not 1 <= idx <= self.dimension:
                raise IndexError(f"basis index {idx} out of range")
        return self.table.get((i, j, k), MPoly.zero())

    def is_parametric(self) -> bool:
        return any(not p.is_constant() for p in self.table.values())

    def specialize(self, point: Mapping[str, ScalarLike]) -> "SuperStructure":
        bindings = {k: MPoly.const(v) for k, v in point.items()}
        return SuperStructure(
            self.m,
            self.n,
            {t: p.substitute(bindings) for t, p in self.table.items()},
            parameters=tuple(q for q in self.parameters if q not in point),
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SuperStructure)
            and (self.m, self.n) == (other.m, other.n)
            and self.table == other.table
        )

    def __hash__(self):
        return hash((self.m, self.n, tuple(sorted(self.table.items(), key=lambda t: t[0]))))

    def __repr__(self):
        return f"SuperStructure(({self.m},{self.n}), {len(self.table)} entries)"


def multiply(J: SuperStructure, i: int, j: int) -> list[MPoly]:
    """Coordinates of b_i b_j."""
    return [J.entry(i, j, k) for k in range(1, J.dimension + 1)]


def vector_product(J: SuperStructure, u: Sequence[MPoly], v: Sequence[MPoly]) -> list[MPoly]:
    """Bilinear extension of the product to coordinate vectors."""
    N = J.dimension
    out = [MPoly.zero()] * N
    for i in range(1, N + 1):
        ui = u[i - 1]
        if not ui:
            continue
        for j in range(1, N + 1):
            vj = v[j - 1]
            if not vj:
                continue
            scale = ui * vj
            for k in range(1, N + 1):
                c = J.table.get((i, j, k))
                if c is not None:
                    out[k - 1] = out[k - 1] + scale * c
    return out


def _vec_times_basis(J: SuperStructure, u: Sequence[MPoly], j: int) -> list[MPoly]:
    N = J.dimension
    out = [MPoly.zero()] * N
    for i in range(1, N + 1):
        ui = u[i - 1]
        if not ui:
            continue
        for k in range(1, N + 1):
            c = J.table.get((i, j, k))
            if c is not None:
                out[k - 1] = out[k - 1] + ui * c
    return out


@dataclass(frozen=True)
class SupercommutativityViolation:
    i: int
    j: int
    k: int
    residual: MPoly

    def __str__(self):
        return f"c{self.i}{self.j}^{self.k} fails supercommutativity: residual {self.residual}"


def check_supercommutativity(J: SuperStructure) -> list[SupercommutativityViolation]:
    """Residuals of c_ji^k - (-1)^(|i||j|) c_ij^k over all pairs."""
    out = []
    N = J.dimension
    for i in range(1, N + 1):
        for j in range(i, N + 1):
            sign = -1 if J.parity_of(i) == 1 and J.parity_of(j) == 1 else 1
            for k in range(1, N + 1):
                if not grading_ok(J.m, J.n, i, j, k):
                    continue
                res = J.entry(j, i, k) - J.entry(i, j, k) * sign
                if res:
                    out.append(SupercommutativityViolation(j, i, k, res))
    return out


@dataclass(frozen=True)
class JordanViolation:
    quadruple: tuple[int, int, int, int]
    k: int
    residual: MPoly

    def __str__(self):
        p, q, r, s = self.quadruple
        return f"identity fails at (b{p},b{q},b{r},b{s}) in coordinate {self.k}: {self.residual}"


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


def check_jordan_superidentity(J: SuperStructure) -> list[JordanViolation]:
    """Evaluate the graded degree-4 identity on all basis quadruples.

    For homogeneous x,y,z,t:
      ((xy)z)t + (-1)^(|y||z|+|y||t|+|z||t|) ((xt)z)y
               + (-1)^(|x||y|+|x||z|+|x||t|+|z||t|) ((yt)z)x
      = (xy)(zt) + (-1)^(|t|(|y|+|z|)) (xt)(yz) + (-1)^(|y||z|) (xz)(yt)

    Multilinearity makes the basis quadruples exhaustive."""
    N = J.dimension
    out = []
    pair = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            pair[(i, j)] = multiply(J, i, j)
    par = [J.parity_of(i) for i in range(1, N + 1)]
    for p, q, r, s in product(range(1, N + 1), repeat=4):
        px, py, pz, pt = par[p - 1], par[q - 1], par[r - 1], par[s - 1]
        lhs1 = _vec_times_basis(J, _vec_times_basis(J, pair[(p, q)], r), s)
        lhs2 = _vec_times_basis(J, _vec_times_basis(J, pair[(p, s)], r), q)
        lhs3 = _vec_times_basis(J, _vec_times_basis(J, pair[(q, s)], r), p)
        s1 = _sign(py * pz + py * pt + pz * pt)
        s2 = _sign(px * py + px * pz + px * pt + pz * pt)
        rhs1 = vector_product(J, pair[(p, q)], pair[(r, s)])
        rhs2 = vector_product(J, pair[(p, s)], pair[(q, r)])
        rhs3 = vector_product(J, pair[(p, r)], pair[(q, s)])
        r2 = _sign(pt * (py + pz))
        r3 = _sign(py * pz)
        for k in range(N):
            res = (
                lhs1[k]
                + lhs2[k] * s1
                + lhs3[k] * s2
                - rhs1[k]
                - rhs2[k] * r2
                - rhs3[k] * r3
            )
            if res:
                out.append(JordanViolation((p, q, r, s), k + 1, res))
    return out


@dataclass(frozen=True)
class GradedVector:
    """Coordinate vector homogeneous of the declared parity."""

    coords: tuple[Fraction, ...]
    parity: int
    m: int
    n: int

    def __post_init__(self):
        if self.parity not in (0, 1):
            raise ValueError("parity must be 0 or 1")
        if len(self.coords) != self.m + self.n:
            raise ValueError("coordinate count does not match type")
        for idx, c in enumerate(self.coords, start=1):
            if c and parity(self.m, self.n, idx) != self.parity:
                raise ValueError(f"coordinate {idx} breaks homogeneity")

    def as_mpoly(self) -> list[MPoly]:
        return [MPoly.const(c) for c in self.coords]


def evaluate_jordan_superidentity(
    J: SuperStructure,
    x: GradedVector,
    y: GradedVector,
    z: GradedVector,
    t: GradedVector,
) -> list[MPoly]:
    """Dense evaluation of the identity at homogeneous vectors (LHS - RHS)."""
    px, py, pz, pt = x.parity, y.parity, z.parity, t.parity
    vx, vy, vz, vt = x.as_mpoly(), y.as_mpoly(), z.as_mpoly(), t.as_mpoly()
    xy = vector_product(J, vx, vy)
    xt = vector_product(J, vx, vt)
    yt = vector_product(J, vy, vt)
    xz = vector_product(J, vx, vz)
    yz = vector_product(J, vy, vz)
    zt = vector_product(J, vz, vt)
    lhs1 = vector_product(J, vector_product(J, xy, vz), vt)
    lhs2 = vector_product(J, vector_product(J, xt, vz), vy)
    lhs3 = vector_product(J, vector_product(J, yt, vz), vx)
    s1 = _sign(py * pz + py * pt + pz * pt)
    s2 = _sign(px * py + px * pz + px * pt + pz * pt)
    rhs1 = vector_product(J, xy, zt)
    rhs2 = vector_product(J, xt, yz)
    rhs3 = vector_product(J, xz, yt)
    r2 = _sign(pt * (py + pz))
    r3 = _sign(py * pz)
    return [
        lhs1[k] + lhs2[k] * s1 + lhs3[k] * s2 - rhs1[k] - rhs2[k] * r2 - rhs3[k] * r3
        for k in range(J.dimension)
    ]


def derivation_dimension(J: SuperStructure) -> int:
    """Dimension of the space of even derivations (block-diagonal D with
    D(uv) = D(u)v + u D(v)).  Numeric structures only."""
    if J.is_parametric():
        raise ValueError("derivation dimension needs a numeric structure")
    m, n, N = J.m, J.n, J.dimension
    cols: dict[tuple[int, int], int] = {}
    for a in range(1, N + 1):
        for b in range(1, N + 1):
            if J.parity_of(a) == J.parity_of(b):
                cols[(a, b)] = len(cols)
    rows: list[dict[int, Fraction]] = []
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            for k in range(1, N + 1):
                row: dict[int, Fraction] = {}

                def add(col: tuple[int, int], val: MPoly):
                    idx = cols.get(col)
                    if idx is None or not val:
                        return
                    c = val.constant_value()
                    if not c:
                        return
                    row[idx] = row.get(idx, Fraction(0)) + c
                    if not row[idx]:
                        del row[idx]

                for l in range(1, N + 1):
                    add((k, l), J.entry(i, j, l))
                    add((l, i), -J.entry(l, j, k))
                    add((l, j), -J.entry(i, l, k))
                if row:
                    rows.append(row)
    rank = _sparse_rank(rows, len(cols))
    return len(cols) - rank


def _sparse_rank(rows: list[dict[int, Fraction]], ncols: int) -> int:
    dense = [[row.get(c, Fraction(0)) for c in range(ncols)] for row in rows]
    rank = 0
    col = 0
    nrows = len(dense)
    while rank < nrows and col < ncols:
        pivot = next((r for r in range(rank, nrows) if dense[r][col]), None)
        if pivot is None:
            col += 1
            continue
        dense[rank], dense[pivot] = dense[pivot], dense[rank]
        pv = dense[rank][col]
        for r in range(rank + 1, nrows):
            f = dense[r][col]
            if f:
                ratio = f / pv
                for c in range(col, ncols):
                    dense[r][c] -= ratio * dense[rank][c]
        rank += 1
        col += 1
    return rank


def generic_structure(m: int, n: int) -> SuperStructure:
    """The structure whose canonical entries are the variables c_ij^k
    themselves (mirrors filled in by the sign rule)."""
    entries: dict[tuple[int, int, int], MPoly] = {}
    for (i, j, k) in canonical_triples(m, n):
        entries[(i, j, k)] = MPoly.variable(structure_var(i, j, k))
    return SuperStructure(m, n, entries, parameters=canonical_variables(m, n), complete=True)


@lru_cache(maxsize=None)
def jordan_identity_polynomials(m: int, n: int) -> tuple[MPoly, ...]:
    """Defining polynomials of the Jordan-identity locus in canonical
    coordinates (deduplicated, scaled to leading coefficient 1)."""
    seen: dict[MPoly, None] = {}
    for v in check_jordan_superidentity(generic_structure(m, n)):
        p = v.residual
        lead = sorted(p.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)[0][1]
        p = p * (1 / lead)
        if p not in seen and -p not in seen:
            seen[p] = None
    return tuple(seen)

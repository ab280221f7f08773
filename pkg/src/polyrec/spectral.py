"""Finite-order commuting unitary families as exact rational phase data.

A family U_1, ..., U_m of commuting unitaries that are simultaneously
diagonal with roots-of-unity eigenvalues is stored as a D x m matrix of
rational phases: eigenvector e is scaled by exp(2*pi*i*theta[e][i]) under
U_i.  For such families the long-run behaviour of products
U_1^{f_1(z)} ... U_m^{f_m(z)} along any sufficiently invariant set of z is
computable exactly: the product is the identity on an explicit finite-index
sublattice, which is returned as a verified certificate.  Projection
predicates and the quadratic averaging expansion are checked in exact
Gaussian-rational arithmetic, with an optional float mode for user data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple, Union

from . import keyengine, lattice
from .errors import (
    ArityMismatch,
    CapExceeded,
    DimMismatch,
    NonzeroConstantTerm,
    SweepCapExceeded,
    VerificationFailed,
)
from .intpoly import BinPoly
from .lattice import Lattice
from .numutil import lcm_upto

MAX_PHASE_DENOMINATOR = 720
SWEEP_CAP = 10**6


# ---------------------------------------------------------------------------
# Exact complex scalars and matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussRat:
    """Complex number with exact rational real and imaginary parts."""

    re: Fraction
    im: Fraction

    def __add__(self, other: "GaussRat") -> "GaussRat":
        return GaussRat(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussRat") -> "GaussRat":
        return GaussRat(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussRat") -> "GaussRat":
        return GaussRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def conj(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return not self.re and not self.im


def gq(re: Union[int, Fraction], im: Union[int, Fraction] = 0) -> GaussRat:
    return GaussRat(Fraction(re), Fraction(im))


GQ_ZERO = gq(0)
GQ_ONE = gq(1)

Entry = Union[GaussRat, complex]


@dataclass(frozen=True)
class ComplexMatrix:
    """Square matrix, either exact (GaussRat entries) or float (complex)."""

    entries: Tuple[Tuple[Entry, ...], ...]
    exact: bool

    @property
    def dim(self) -> int:
        return len(self.entries)


def matrix_exact(rows: Sequence[Sequence[Union[GaussRat, Fraction, int]]]) -> ComplexMatrix:
    dim = len(rows)
    out = []
    for row in rows:
        if len(row) != dim:
            raise DimMismatch(f"row of length {len(row)} in a {dim}x{dim} matrix")
        out.append(
            tuple(e if isinstance(e, GaussRat) else gq(Fraction(e)) for e in row)
        )
    return ComplexMatrix(tuple(out), exact=True)


def matrix_float(rows: Sequence[Sequence[complex]]) -> ComplexMatrix:
    dim = len(rows)
    out = []
    for row in rows:
        if len(row) != dim:
            raise DimMismatch(f"row of length {len(row)} in a {dim}x{dim} matrix")
        out.append(tuple(complex(e) for e in row))
    return ComplexMatrix(tuple(out), exact=False)


def mat_mul(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    if a.dim != b.dim or a.exact != b.exact:
        raise DimMismatch("matrix modes or dimensions differ")
    zero = GQ_ZERO if a.exact else 0j
    rows = []
    for i in range(a.dim):
        row = []
        for j in range(a.dim):
            acc = zero
            for t in range(a.dim):
                acc = acc + a.entries[i][t] * b.entries[t][j]
            row.append(acc)
        rows.append(tuple(row))
    return ComplexMatrix(tuple(rows), a.exact)


def mat_adjoint(a: ComplexMatrix) -> ComplexMatrix:
    if a.exact:
        rows = tuple(
            tuple(a.entries[j][i].conj() for j in range(a.dim)) for i in range(a.dim)
        )
    else:
        rows = tuple(
            tuple(a.entries[j][i].conjugate() for j in range(a.dim))
            for i in range(a.dim)
        )
    return ComplexMatrix(rows, a.exact)


def mat_close(a: ComplexMatrix, b: ComplexMatrix, tol: float) -> bool:
    if a.exact:
        return all(
            (x - y).is_zero() for ra, rb in zip(a.entries, b.entries) for x, y in zip(ra, rb)
        )
    return all(
        abs(x - y) <= tol for ra, rb in zip(a.entries, b.entries) for x, y in zip(ra, rb)
    )


@dataclass(frozen=True)
class ProjectionCheck:
    ok: bool
    normal: bool
    idempotent: bool
    mode: str


def is_orthogonal_projection(
    m: ComplexMatrix, tol: float = 1e-12, exact: Optional[bool] = None
) -> ProjectionCheck:
    """Normality (M M* = M* M) plus idempotence (M^2 = M), with diagnostics.

    A normal idempotent is exactly an orthogonal projection.  Exact mode
    compares entries literally; float mode entrywise within tol.
    """
    if exact is not None and exact != m.exact:
        raise DimMismatch("requested mode does not match the matrix storage mode")
    if tol < 0:
        raise ArityMismatch(f"tolerance must be non-negative, got {tol}")
    adj = mat_adjoint(m)
    normal = mat_close(mat_mul(m, adj), mat_mul(adj, m), tol)
    idempotent = mat_close(mat_mul(m, m), m, tol)
    return ProjectionCheck(
        ok=normal and idempotent,
        normal=normal,
        idempotent=idempotent,
        mode="exact" if m.exact else "float",
    )


# ---------------------------------------------------------------------------
# Rational-phase unitary families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhaseUnitary:
    """Commuting unitaries, diagonal on a common eigenbasis of size ``dim``.

    ``phases[e][i]`` is the rational phase (in [0, 1)) of eigenvector e
    under operator i; commutativity is automatic.
    """

    dim: int
    ops: int
    phases: Tuple[Tuple[Fraction, ...], ...]


def phase_unitary(
    phases: Sequence[Sequence[Union[Fraction, int, str]]],
    max_denominator: int = MAX_PHASE_DENOMINATOR,
) -> PhaseUnitary:
    """Normalize a D x m rational phase table into [0, 1) and validate."""
    rows = [[Fraction(p) for p in row] for row in phases]
    if not rows or not rows[0]:
        raise ArityMismatch("need at least one eigenvector and one operator")
    ops = len(rows[0])
    table = []
    for row in rows:
        if len(row) != ops:
            raise ArityMismatch("ragged phase table")
        normalized = tuple(p - math.floor(p) for p in row)
        for p in normalized:
            if p.denominator > max_denominator:
                raise CapExceeded(
                    f"phase denominator {p.denominator} exceeds {max_denominator}"
                )
        table.append(normalized)
    return PhaseUnitary(dim=len(table), ops=ops, phases=tuple(table))


def phase_lcm(u: PhaseUnitary) -> int:
    """lcm of all phase denominators (the common eigenvalue order)."""
    q = 1
    for row in u.phases:
        for p in row:
            q = math.lcm(q, p.denominator)
    return q


def power_phases(
    u: PhaseUnitary, fs: Sequence[BinPoly], z: Sequence[int]
) -> Tuple[Fraction, ...]:
    """Eigenvector phases of the product of U_i^{f_i(z)}, each in [0, 1)."""
    fs = tuple(fs)
    if len(fs) != u.ops:
        raise ArityMismatch(f"{len(fs)} polynomials for {u.ops} operators")
    n = fs[0].nvars
    for f in fs:
        if f.nvars != n:
            raise ArityMismatch(f"mixed variable counts {n} and {f.nvars}")
    exps = [f.evaluate(z) for f in fs]
    out = []
    for row in u.phases:
        total = sum((e * p for e, p in zip(exps, row)), Fraction(0))
        out.append(total - math.floor(total))
    return tuple(out)


@dataclass(frozen=True)
class ProjectionDesc:
    """Diagonal 0/1 projection, supported on ``fixed`` eigenvector indices.

    ``certificate``, when present, is the sublattice on which the defining
    operator products equal the identity (verified exhaustively).
    """

    dim: int
    fixed: FrozenSet[int]
    certificate: Optional[Lattice] = None

    def to_matrix(self) -> ComplexMatrix:
        return matrix_exact(
            [
                [GQ_ONE if (i == j and i in self.fixed) else GQ_ZERO for j in range(self.dim)]
                for i in range(self.dim)
            ]
        )


def limit_projection(
    u: PhaseUnitary, fs: Sequence[BinPoly], cap: int = SWEEP_CAP
) -> ProjectionDesc:
    """Long-run projection of the powered family, with a lattice certificate.

    For exponent polynomials vanishing at the origin and rational phases of
    common order q, every eigen-phase vanishes on N * Z^n with
    N = q * lcm(1..d): the powered product is the identity there.  The
    certificate lattice is swept exhaustively over one full period (of the
    lattice parameterization) before being returned, so the identity claim
    is checked, not assumed.
    """
    fs = tuple(fs)
    if len(fs) != u.ops:
        raise ArityMismatch(f"{len(fs)} polynomials for {u.ops} operators")
    for f in fs:
        if f.constant_term() != 0:
            raise NonzeroConstantTerm(
                f"exponent polynomial has value {f.constant_term()} at the origin"
            )
    q = phase_lcm(u)
    cert = keyengine.vanishing_lattice(fs, q)
    verify_limit_certificate(u, fs, cert, cap=cap)
    return ProjectionDesc(dim=u.dim, fixed=frozenset(range(u.dim)), certificate=cert)


def verify_limit_certificate(
    u: PhaseUnitary, fs: Sequence[BinPoly], cert: Lattice, cap: int = SWEEP_CAP
) -> None:
    """Exhaustively re-check that all eigen-phases vanish on the lattice.

    Sweeps the lattice points over one full period of the phase map in the
    lattice coordinates (q * lcm(1..d) per axis), which decides the claim
    for the whole lattice; raises :class:`VerificationFailed` with the
    first bad point.
    """
    fs = tuple(fs)
    if cert.ambient != fs[0].nvars:
        raise ArityMismatch(
            f"certificate lattice lives in Z^{cert.ambient}, polynomials take {fs[0].nvars} variables"
        )
    q = phase_lcm(u)
    n = fs[0].nvars
    d = max(f.degree for f in fs)
    side = q * lcm_upto(d)
    r = cert.rank
    if side**r * u.dim > cap:
        raise SweepCapExceeded(
            f"certificate sweep needs {side ** r} points x {u.dim} eigenvectors, cap {cap}"
        )
    for ks in product(range(side), repeat=r):
        point = [0] * n
        for c, col in zip(ks, cert.basis):
            for i in range(n):
                point[i] += c * col[i]
        if any(power_phases(u, fs, point)):
            raise VerificationFailed(
                witness=tuple(point),
                message=f"certificate lattice leaves a nonzero phase at {tuple(point)}",
            )


def orbit_fixed_projection(
    u: PhaseUnitary, exponents: Iterable[Sequence[int]]
) -> ProjectionDesc:
    """Projection onto the joint fixed space of the given operator products.

    Eigenvector e is fixed iff sum_i e'_i * theta[e][i] is an integer for
    every exponent vector e' in the collection; an empty collection fixes
    everything (the identity).
    """
    vecs = [tuple(int(x) for x in vec) for vec in exponents]
    for vec in vecs:
        if len(vec) != u.ops:
            raise ArityMismatch(f"exponent vector {vec} has length {len(vec)}, expected {u.ops}")
    fixed = set()
    for e, row in enumerate(u.phases):
        if all(
            sum((x * p for x, p in zip(vec, row)), Fraction(0)).denominator == 1
            for vec in vecs
        ):
            fixed.add(e)
    return ProjectionDesc(dim=u.dim, fixed=frozenset(fixed))


def projection_product_check(ps: Sequence[ProjectionDesc]) -> ProjectionDesc:
    """Product of commuting diagonal projections: intersect the fixed sets.

    Asserts (exactly) that the realized product matrix is again an
    orthogonal projection.
    """
    ps = list(ps)
    if not ps:
        raise ArityMismatch("need at least one projection")
    dim = ps[0].dim
    for p in ps:
        if p.dim != dim:
            raise DimMismatch(f"projection dimensions differ: {dim} vs {p.dim}")
    fixed = frozenset(range(dim))
    for p in ps:
        fixed &= p.fixed
    out = ProjectionDesc(dim=dim, fixed=fixed)
    check = is_orthogonal_projection(out.to_matrix())
    assert check.ok, "diagonal product stopped being a projection (bug)"
    return out


# ---------------------------------------------------------------------------
# Quadratic averaging expansion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AveragingExpansion:
    lhs: Fraction
    rhs: Fraction
    diagonal: Fraction
    cross: Fraction
    equal: bool


def _coerce_vector(vec: Sequence) -> Tuple[GaussRat, ...]:
    out = []
    for e in vec:
        if isinstance(e, GaussRat):
            out.append(e)
        elif isinstance(e, tuple):
            out.append(gq(Fraction(e[0]), Fraction(e[1])))
        else:
            out.append(gq(Fraction(e)))
    return tuple(out)


def inner(x: Sequence[GaussRat], y: Sequence[GaussRat]) -> GaussRat:
    if len(x) != len(y):
        raise DimMismatch(f"vector lengths differ: {len(x)} vs {len(y)}")
    acc = GQ_ZERO
    for a, b in zip(x, y):
        acc = acc + a * b.conj()
    return acc


def vdc_expansion(xs: Sequence[Sequence]) -> AveragingExpansion:
    """Exact expansion of the squared norm of an average of N vectors.

    lhs = || (1/N) sum x_n ||^2 ; rhs = (1/N^2) sum_{m,n} <x_m, x_n>, split
    into the diagonal part (1/N^2) sum ||x_n||^2 and the cross terms.  The
    two sides must agree exactly; ``equal`` records the comparison.
    """
    vecs = [_coerce_vector(v) for v in xs]
    if not vecs:
        raise ArityMismatch("need at least one vector")
    dim = len(vecs[0])
    for v in vecs:
        if len(v) != dim:
            raise DimMismatch("vectors of mixed dimension")
    n = len(vecs)
    total = tuple(
        sum((v[i] for v in vecs), GQ_ZERO) for i in range(dim)
    )
    lhs = inner(total, total).re / (n * n)
    rhs_c = GQ_ZERO
    diag = Fraction(0)
    for a in vecs:
        diag += inner(a, a).re
        for b in vecs:
            rhs_c = rhs_c + inner(a, b)
    assert rhs_c.im == 0, "full double sum must be real"
    rhs = rhs_c.re / (n * n)
    diag = diag / (n * n)
    return AveragingExpansion(
        lhs=lhs, rhs=rhs, diagonal=diag, cross=rhs - diag, equal=lhs == rhs
    )


# ---------------------------------------------------------------------------
# JSON form
# ---------------------------------------------------------------------------


def to_json(u: PhaseUnitary) -> dict:
    return {
        "dim": u.dim,
        "ops": u.ops,
        "phases": [[str(p) for p in row] for row in u.phases],
    }


def from_json(obj) -> PhaseUnitary:
    u = phase_unitary(obj["phases"])
    if u.dim != int(obj.get("dim", u.dim)) or u.ops != int(obj.get("ops", u.ops)):
        raise ArityMismatch("declared dim/ops disagree with the phase table")
    return u

"""Exact algebra of finitely generated subgroups of Z^n.

A subgroup is stored by its column Hermite normal form: columns ordered by
strictly increasing pivot row, pivot entries positive, entries to the left
of a pivot reduced into [0, pivot), zero columns dropped.  The form is
unique per subgroup, so equality, hashing, and serialization are structural.
All arithmetic is exact; scale is desk-sized (no reduction algorithms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import ArityMismatch
from .numutil import divisors, ext_gcd

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class Lattice:
    """Subgroup of Z^ambient, basis columns in canonical Hermite form."""

    ambient: int
    basis: Tuple[Vector, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def pivot_rows(self) -> Tuple[int, ...]:
        return tuple(next(i for i, e in enumerate(col) if e) for col in self.basis)

    def contains(self, v: Sequence[int]) -> bool:
        return contains(self, v)


def _combine_columns(a: List[int], b: List[int], row: int) -> None:
    """Unimodular column operation: after it, a[row] = gcd >= 0, b[row] = 0."""
    g, x, y = ext_gcd(a[row], b[row])
    pa, pb = a[row] // g, b[row] // g
    for i in range(len(a)):
        ai, bi = a[i], b[i]
        a[i] = x * ai + y * bi
        b[i] = -pb * ai + pa * bi


def hnf_from_generators(ambient: int, gens: Sequence[Sequence[int]]) -> Lattice:
    """Canonical lattice generated by the given integer vectors.

    An empty generator list (or all-zero generators) yields the zero
    lattice of rank 0.
    """
    if ambient < 1:
        raise ArityMismatch(f"ambient dimension must be positive, got {ambient}")
    work: List[List[int]] = []
    for g in gens:
        col = [int(e) for e in g]
        if len(col) != ambient:
            raise ArityMismatch(f"generator {tuple(g)} has length {len(col)}, expected {ambient}")
        if any(col):
            work.append(col)

    pivots: List[Tuple[int, List[int]]] = []
    for row in range(ambient):
        carrier = None
        for col in work:
            if col[row]:
                if carrier is None:
                    carrier = col
                else:
                    _combine_columns(carrier, col, row)
        if carrier is not None:
            work.remove(carrier)
            if carrier[row] < 0:
                carrier[:] = [-e for e in carrier]
            pivots.append((row, carrier))

    cols = [col for _, col in pivots]
    for j, (r, cj) in enumerate(pivots):
        p = cj[r]
        for k in range(j):
            q = cols[k][r] // p
            if q:
                cols[k] = [a - q * b for a, b in zip(cols[k], cj)]
    return Lattice(ambient, tuple(tuple(c) for c in cols))


def zero_lattice(ambient: int) -> Lattice:
    return hnf_from_generators(ambient, [])


def full_lattice(ambient: int) -> Lattice:
    return scaled(ambient, 1)


def scaled(ambient: int, factor: int) -> Lattice:
    """The lattice factor * Z^ambient."""
    if factor < 1:
        raise ArityMismatch(f"scale factor must be positive, got {factor}")
    cols = tuple(
        tuple(factor if i == j else 0 for i in range(ambient)) for j in range(ambient)
    )
    return Lattice(ambient, cols)


def rank(lat: Lattice) -> int:
    return lat.rank


def index(lat: Lattice) -> Optional[int]:
    """Group index in Z^ambient: the pivot product, or None when infinite."""
    if lat.rank < lat.ambient:
        return None
    out = 1
    for r, col in zip(lat.pivot_rows(), lat.basis):
        out *= col[r]
    return out


def _solve_rational(lat: Lattice, v: Sequence[Fraction]) -> Optional[List[Fraction]]:
    """Coefficients x with basis @ x = v over Q, or None if v is off-span."""
    residual = [Fraction(e) for e in v]
    coeffs: List[Fraction] = []
    for r, col in zip(lat.pivot_rows(), lat.basis):
        c = residual[r] / col[r]
        coeffs.append(c)
        if c:
            for i in range(r, lat.ambient):
                residual[i] -= c * col[i]
    if any(residual):
        return None
    return coeffs


def contains(lat: Lattice, v: Sequence[int]) -> bool:
    """Whether v is an integer combination of the basis columns."""
    if len(v) != lat.ambient:
        raise ArityMismatch(f"vector has length {len(v)}, expected {lat.ambient}")
    residual = [int(e) for e in v]
    for r, col in zip(lat.pivot_rows(), lat.basis):
        if residual[r] % col[r]:
            return False
        q = residual[r] // col[r]
        if q:
            for i in range(r, lat.ambient):
                residual[i] -= q * col[i]
    return not any(residual)


def smallest_multiple(lat: Lattice, v: Sequence[int | Fraction]) -> Optional[int]:
    """Minimal N >= 1 with N * v in the lattice; None if v is off the span.

    Accepts exact rational entries as well as integers.  Computed by the
    rational solve followed by the lcm of coefficient denominators; a scan
    over proper divisors re-asserts minimality (the set of valid N is
    closed under gcd, so divisors are the only candidates below the lcm).
    """
    if len(v) != lat.ambient:
        raise ArityMismatch(f"vector has length {len(v)}, expected {lat.ambient}")
    vec = [Fraction(e) for e in v]
    if not any(vec):
        return 1
    coeffs = _solve_rational(lat, vec)
    if coeffs is None:
        return None
    n = 1
    for c in coeffs:
        n = math.lcm(n, c.denominator)
    for d in divisors(n):
        if d < n and all((d * c).denominator == 1 for c in coeffs):
            return d
    return n


def _kernel_basis(columns: Sequence[Sequence[int]], nrows: int) -> List[List[int]]:
    """Basis of the integer kernel {x : sum x_j * columns[j] = 0}.

    Column-reduces the matrix while mirroring the operations on an identity
    matrix; the mirror columns sitting over zeroed-out matrix columns form a
    basis of the full integer kernel (the transform stays unimodular).
    """
    k = len(columns)
    work = [[int(e) for e in col] for col in columns]
    mirror = [[1 if i == j else 0 for i in range(k)] for j in range(k)]
    assigned = [False] * k
    for row in range(nrows):
        carrier = None
        for j in range(k):
            if assigned[j] or not work[j][row]:
                continue
            if carrier is None:
                carrier = j
            else:
                g, x, y = ext_gcd(work[carrier][row], work[j][row])
                pa, pb = work[carrier][row] // g, work[j][row] // g
                for vecs in (work, mirror):
                    a, b = vecs[carrier], vecs[j]
                    for i in range(len(a)):
                        ai, bi = a[i], b[i]
                        a[i] = x * ai + y * bi
                        b[i] = -pb * ai + pa * bi
        if carrier is not None:
            assigned[carrier] = True
    out = []
    for j in range(k):
        if not assigned[j]:
            assert not any(work[j]), "column survived elimination without a pivot"
            out.append(mirror[j])
    return out


def intersect(a: Lattice, b: Lattice) -> Lattice:
    """Canonical lattice of the intersection, via the stacked kernel."""
    if a.ambient != b.ambient:
        raise ArityMismatch(f"ambient dimensions differ: {a.ambient} vs {b.ambient}")
    if a.rank == 0 or b.rank == 0:
        return zero_lattice(a.ambient)
    columns = [list(col) for col in a.basis] + [[-e for e in col] for col in b.basis]
    gens = []
    for x in _kernel_basis(columns, a.ambient):
        coeff_a = x[: a.rank]
        vec = [0] * a.ambient
        for c, col in zip(coeff_a, a.basis):
            for i in range(a.ambient):
                vec[i] += c * col[i]
        gens.append(vec)
    return hnf_from_generators(a.ambient, gens)


def orthogonal_complement(lat: Lattice) -> Lattice:
    """Integer vectors orthogonal (standard bilinear form) to the lattice."""
    if lat.rank == 0:
        return full_lattice(lat.ambient)
    # columns of the transposed basis matrix: one per ambient coordinate
    columns = [
        [col[i] for col in lat.basis] for i in range(lat.ambient)
    ]
    gens = _kernel_basis(columns, lat.rank)
    return hnf_from_generators(lat.ambient, gens)


def saturate(lat: Lattice) -> Lattice:
    """Q-span(lattice) intersected with Z^ambient (the saturation)."""
    return orthogonal_complement(orthogonal_complement(lat))


def coordinates(lat: Lattice, v: Sequence[int]) -> Optional[List[Fraction]]:
    """Rational coefficients of v in the basis, or None if off-span."""
    if len(v) != lat.ambient:
        raise ArityMismatch(f"vector has length {len(v)}, expected {lat.ambient}")
    return _solve_rational(lat, [Fraction(e) for e in v])


def member_points(lat: Lattice, coeff_range: range) -> Dict[Vector, Tuple[int, ...]]:
    """All integer combinations with coefficients in the range (small scale)."""
    from itertools import product as iproduct

    out: Dict[Vector, Tuple[int, ...]] = {}
    for coeffs in iproduct(coeff_range, repeat=lat.rank):
        vec = [0] * lat.ambient
        for c, col in zip(coeffs, lat.basis):
            for i in range(lat.ambient):
                vec[i] += c * col[i]
        out[tuple(vec)] = coeffs
    return out


def to_json(lat: Lattice) -> dict:
    return {"ambient": lat.ambient, "basis": [list(col) for col in lat.basis]}


def from_json(obj) -> Lattice:
    return hnf_from_generators(int(obj["ambient"]), obj.get("basis", []))

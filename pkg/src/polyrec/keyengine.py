"""Witness lattices for polynomial tuples landing in a prescribed subgroup.

Everything here answers questions of the shape: given a tuple of
integer-valued polynomials v: Z^n -> Z^K and a subgroup V of Z^K, on which
finite-index sublattice of Z^n can we *prove*, exhaustively, that the
values of v (shifted to vanish at the origin) lie in V?

Claims of the form "v(a) - v(0) in V for every a in L" are decidable: on a
full-rank lattice the membership condition is periodic in the lattice
coordinates (period governed by the index of V inside its saturation and
the binomial divisibility of integer-valued polynomials), and the
off-saturation component is a polynomial identity, settled by a grid with
degree + 1 points per axis.  Every constructor below re-verifies its output
on one such complete fundamental domain before returning it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import List, Optional, Sequence, Tuple

from . import intpoly, lattice
from .errors import (
    ArityMismatch,
    HypothesisFailed,
    NonzeroConstantTerm,
    RankDeficientBasis,
    SaturationFailed,
    SweepCapExceeded,
    VerificationFailed,
)
from .intpoly import BinPoly, MonoPoly, PolyTuple
from .lattice import Lattice
from .numutil import lcm_upto

# Budget for exhaustive fundamental-domain sweeps; larger instances are
# refused loudly rather than silently truncated.
DOMAIN_CAP = 10**6


@dataclass(frozen=True)
class KeyInstance:
    """A polynomial tuple v: Z^n -> Z^K together with a target subgroup V."""

    v: PolyTuple
    V: Lattice


def key_instance(v: PolyTuple, V: Lattice) -> KeyInstance:
    if V.ambient != v.arity:
        raise ArityMismatch(
            f"target subgroup lives in Z^{V.ambient} but the tuple has {v.arity} components"
        )
    return KeyInstance(v, V)


@dataclass(frozen=True)
class RankCertificate:
    """Greedy rank witness: samples whose images span the image subgroup.

    Invariants (re-assertable via :func:`verify_rank_certificate`): V is the
    lattice generated by the sample images, rank(V) = r, and every point of
    the search window maps into the rational span of V.
    """

    r: int
    samples: Tuple[Tuple[int, ...], ...]
    V: Lattice
    saturation_window: int


def vanishing_lattice(fs: Sequence[BinPoly], q: int) -> Lattice:
    """A finite-index lattice on which every f_i is divisible by q.

    Requires f_i(0) = 0.  Returns N * Z^n with N = q * lcm(1..d), d the max
    degree: every binomial coefficient C(N k, j) with 1 <= j <= d is then
    divisible by q, so each basis term of each f_i is.  Sound but not
    claimed minimal.
    """
    fs = list(fs)
    if not fs:
        raise ArityMismatch("need at least one polynomial")
    if q < 1:
        raise ArityMismatch(f"modulus must be positive, got {q}")
    n = fs[0].nvars
    for f in fs:
        if f.nvars != n:
            raise ArityMismatch(f"mixed variable counts {n} and {f.nvars}")
        if f.constant_term() != 0:
            raise NonzeroConstantTerm(
                f"polynomial has value {f.constant_term()} at the origin, expected 0"
            )
    d = max(f.degree for f in fs)
    if d == 0:  # with f_i(0) = 0 forced, degree 0 means every f_i is zero
        return lattice.full_lattice(n)
    return lattice.scaled(n, q * lcm_upto(d))


# ---------------------------------------------------------------------------
# Complete membership verification on a lattice
# ---------------------------------------------------------------------------


def _membership_period(V: Lattice, degree: int) -> int:
    """Period (per lattice coordinate) of the condition u(k) in V.

    For u an integer-valued polynomial tuple of total degree <= degree: in
    coordinates on the saturation of V, membership only depends on the
    value modulo the finite-index coordinate lattice, whose index q' gives
    the shift-invariance u(k + q'*lcm(1..degree) * e_j) = u(k) modulo q'.
    """
    if V.rank == 0:
        return 1
    sat = lattice.saturate(V)
    coord_gens = []
    for col in V.basis:
        coords = lattice.coordinates(sat, col)
        assert coords is not None and all(c.denominator == 1 for c in coords)
        coord_gens.append([int(c) for c in coords])
    coord_lattice = lattice.hnf_from_generators(sat.rank, coord_gens)
    idx = lattice.index(coord_lattice)
    assert idx is not None, "saturation coordinates lost rank"
    return idx * lcm_upto(degree)


def verify_value_membership(
    v: PolyTuple,
    offset: Sequence[int],
    V: Lattice,
    witness: Lattice,
    cap: int = DOMAIN_CAP,
) -> Optional[Tuple[int, ...]]:
    """Decide whether v(a) - offset lies in V for *every* a in the witness.

    Returns None when the claim holds for all lattice points, or a concrete
    counterexample point otherwise.  The sweep covers one full period of
    the membership condition (and at least degree + 1 values per axis, so
    the rational-span component is settled as a polynomial identity); it is
    therefore a complete decision procedure, not a sample.
    """
    if witness.ambient != v.nvars:
        raise ArityMismatch(
            f"witness lattice lives in Z^{witness.ambient}, tuple takes {v.nvars} variables"
        )
    if V.ambient != v.arity:
        raise ArityMismatch(
            f"target subgroup lives in Z^{V.ambient}, tuple has {v.arity} components"
        )
    offset = [int(e) for e in offset]
    d = max(v.degree, 1)
    period = _membership_period(V, d)
    side = period * max(1, -(-(d + 1) // period))
    r = witness.rank
    if r == 0:
        pts = 1
    else:
        pts = side**r
    if pts > cap:
        raise SweepCapExceeded(f"membership sweep needs {pts} points, cap is {cap}")
    for ks in product(range(side), repeat=r):
        point = [0] * witness.ambient
        for c, col in zip(ks, witness.basis):
            for i in range(witness.ambient):
                point[i] += c * col[i]
        value = [a - b for a, b in zip(v.evaluate(point), offset)]
        if not V.contains(value):
            return tuple(point)
    return None


# ---------------------------------------------------------------------------
# The transfer construction
# ---------------------------------------------------------------------------


def _difference_on_basis(
    parts: Sequence[MonoPoly], t: int, js: Tuple[int, ...], n: int
) -> Tuple[Fraction, ...]:
    """Value of the t-fold difference of the degree-t parts at basis blocks.

    Blocks are the standard basis vectors e_{js[0]}, ..., e_{js[t-1]}; the
    value is computed pointwise by inclusion-exclusion.
    """
    out = [Fraction(0)] * len(parts)
    for mask in range(1, 1 << t):
        bits = [i for i in range(t) if mask >> i & 1]
        sign = (-1) ** (t - len(bits))
        point = [0] * n
        for i in bits:
            point[js[i]] += 1
        for c, h in enumerate(parts):
            if not h.is_zero():
                out[c] += sign * h.evaluate(point)
    return tuple(out)


def key_lemma_lattice(
    inst: KeyInstance, hypothesis: Lattice, cap: int = DOMAIN_CAP
) -> Lattice:
    """Full-rank lattice L with v(a) - v(0) in V for every a in L.

    The hypothesis lattice asserts that some nonzero multiple of every
    value v(b), b on that lattice, lies in V; this is checked first (it is
    a rational-span condition, settled by a grid of degree + 1 lattice
    points per axis) and reported via :class:`HypothesisFailed` with a
    counterexample if false.

    The construction peels off homogeneous parts from the top degree down.
    At degree t the t-fold difference of the degree-t part is multilinear
    in its t blocks, so a single integer N clears all of its values into V
    (the lcm of the smallest multiples of the finitely many block-basis
    values); the homogeneous identity (the t-fold difference on the
    diagonal equals t! times the part) then places the part itself in V on
    (N * t!) * Z^n.  The returned lattice is the intersection over degrees
    and is re-verified exhaustively before being returned; a verification
    failure signals an implementation bug, never a silent wrong answer.
    """
    v, V = inst.v, inst.V
    n = v.nvars
    if hypothesis.ambient != n:
        raise ArityMismatch(
            f"hypothesis lattice lives in Z^{hypothesis.ambient}, tuple takes {n} variables"
        )
    if hypothesis.rank != n:
        raise RankDeficientBasis(
            f"hypothesis lattice has rank {hypothesis.rank}, need full rank {n}"
        )

    d = v.degree
    for ks in product(range(d + 1), repeat=n):
        point = [0] * n
        for c, col in zip(ks, hypothesis.basis):
            for i in range(n):
                point[i] += c * col[i]
        if lattice.smallest_multiple(V, v.evaluate(point)) is None:
            raise HypothesisFailed(
                witness=tuple(point),
                message=f"no nonzero multiple of v({tuple(point)}) lies in the target subgroup",
            )

    offset = v.evaluate([0] * n)

    # Everything may already land in V on all of Z^n (e.g. V of full index 1).
    if verify_value_membership(v, offset, V, lattice.full_lattice(n), cap=cap) is None:
        return lattice.full_lattice(n)

    parts_per_component: List[Tuple[MonoPoly, ...]] = []
    for comp, off in zip(v.components, offset):
        shifted = intpoly.subtract(comp, intpoly.constant(n, off))
        parts_per_component.append(intpoly.homogeneous_parts(shifted))

    result = lattice.full_lattice(n)
    for t in range(d, 0, -1):
        parts_t = [
            ps[t] if t < len(ps) else intpoly.monopoly(n, {})
            for ps in parts_per_component
        ]
        if all(h.is_zero() for h in parts_t):
            continue
        clearing = 1
        for js in product(range(n), repeat=t):
            value = _difference_on_basis(parts_t, t, js, n)
            if not any(value):
                continue
            m = lattice.smallest_multiple(V, value)
            if m is None:
                raise VerificationFailed(
                    witness=js,
                    message="difference coefficient escaped the rational span of the target "
                    "after the hypothesis check passed (implementation bug)",
                )
            clearing = math.lcm(clearing, m)
        result = lattice.intersect(
            result, lattice.scaled(n, clearing * math.factorial(t))
        )

    counterexample = verify_value_membership(v, offset, V, result, cap=cap)
    if counterexample is not None:
        raise VerificationFailed(
            witness=counterexample,
            message=f"constructed lattice fails its post-check at {counterexample}",
        )
    return result


# ---------------------------------------------------------------------------
# Greedy image-rank stabilization
# ---------------------------------------------------------------------------


def window_points(n: int, window: int):
    """[-window, window]^n enumerated by increasing box radius, lex inside."""
    for radius in range(window + 1):
        for pt in product(range(-radius, radius + 1), repeat=n):
            if max((abs(c) for c in pt), default=0) == radius:
                yield pt


def stable_rank_subgroup(
    v: PolyTuple, window: int, cap: int = DOMAIN_CAP
) -> RankCertificate:
    """Greedily grow samples until the image subgroup's rank saturates.

    Sample points are drawn from [-window, window]^n in increasing-box
    order; a point is kept only if its image strictly increases the rank of
    the generated subgroup.  Afterwards, every window point must map into
    the rational span of the result (so a nonzero multiple lands inside);
    a violation raises :class:`SaturationFailed` with the offending point.
    The degenerate map (identically zero on the window) certifies r = 0
    with the zero subgroup.
    """
    if window < 1:
        raise ArityMismatch(f"window must be positive, got {window}")
    n = v.nvars
    if (2 * window + 1) ** n > cap:
        raise SweepCapExceeded(
            f"window sweep needs {(2 * window + 1) ** n} points, cap is {cap}"
        )
    gens: List[Tuple[int, ...]] = []
    samples: List[Tuple[int, ...]] = []
    current = lattice.zero_lattice(v.arity)
    changed = True
    while changed:
        changed = False
        for pt in window_points(n, window):
            img = v.evaluate(pt)
            if lattice.smallest_multiple(current, img) is None:
                gens.append(img)
                samples.append(pt)
                current = lattice.hnf_from_generators(v.arity, gens)
                changed = True
    for pt in window_points(n, window):
        if lattice.smallest_multiple(current, v.evaluate(pt)) is None:
            raise SaturationFailed(
                witness=pt,
                message=f"image of {pt} escapes the rational span of the image subgroup",
            )
    return RankCertificate(
        r=current.rank,
        samples=tuple(samples),
        V=current,
        saturation_window=window,
    )


def verify_rank_certificate(v: PolyTuple, cert: RankCertificate) -> None:
    """Re-assert every :class:`RankCertificate` invariant from scratch."""
    regenerated = lattice.hnf_from_generators(
        v.arity, [v.evaluate(pt) for pt in cert.samples]
    )
    if regenerated != cert.V:
        raise VerificationFailed(
            witness=cert.samples,
            message="sample images do not generate the recorded subgroup",
        )
    if cert.V.rank != cert.r:
        raise VerificationFailed(
            witness=cert.r,
            message=f"recorded rank {cert.r} differs from actual {cert.V.rank}",
        )
    for pt in window_points(v.nvars, cert.saturation_window):
        if lattice.smallest_multiple(cert.V, v.evaluate(pt)) is None:
            raise SaturationFailed(
                witness=pt,
                message=f"image of {pt} escapes the rational span of the image subgroup",
            )


# ---------------------------------------------------------------------------
# Certificate JSON
# ---------------------------------------------------------------------------


def key_certificate_json(inst: KeyInstance, witness: Lattice) -> dict:
    return {
        "certificate_kind": "key-lemma",
        "v": intpoly.polytuple_to_json(inst.v),
        "V": lattice.to_json(inst.V),
        "witness": lattice.to_json(witness),
    }


def verify_key_certificate_json(obj: dict, cap: int = DOMAIN_CAP) -> None:
    v = intpoly.polytuple_from_json(obj["v"])
    target = lattice.from_json(obj["V"])
    witness = lattice.from_json(obj["witness"])
    offset = v.evaluate([0] * v.nvars)
    counterexample = verify_value_membership(v, offset, target, witness, cap=cap)
    if counterexample is not None:
        raise VerificationFailed(
            witness=counterexample,
            message=f"certificate lattice fails membership at {counterexample}",
        )


def rank_certificate_json(v: PolyTuple, cert: RankCertificate) -> dict:
    return {
        "certificate_kind": "stable-rank",
        "v": intpoly.polytuple_to_json(v),
        "r": cert.r,
        "samples": [list(pt) for pt in cert.samples],
        "V": lattice.to_json(cert.V),
        "saturation_window": cert.saturation_window,
    }


def verify_rank_certificate_json(obj: dict) -> None:
    v = intpoly.polytuple_from_json(obj["v"])
    cert = RankCertificate(
        r=int(obj["r"]),
        samples=tuple(tuple(int(e) for e in pt) for pt in obj["samples"]),
        V=lattice.from_json(obj["V"]),
        saturation_window=int(obj["saturation_window"]),
    )
    verify_rank_certificate(v, cert)

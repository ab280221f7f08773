"""Shared deterministic generators for the test suite."""

from __future__ import annotations

import itertools
import random

from polyrec import intpoly as ip
from polyrec import lattice as lat


def random_binpoly(
    rng: random.Random,
    nvars: int,
    max_degree: int,
    bound: int = 9,
    max_terms: int = 6,
    ensure_nonconstant: bool = True,
) -> ip.BinPoly:
    """Random binomial-basis polynomial with bounded total degree."""
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        while True:
            idx = tuple(rng.randint(0, max_degree) for _ in range(nvars))
            if sum(idx) <= max_degree:
                break
        coef = rng.randint(-bound, bound)
        if coef:
            terms[idx] = coef
    f = ip.binpoly(nvars, terms)
    if ensure_nonconstant and f.degree < 1:
        one = (1,) + (0,) * (nvars - 1)
        f = ip.add(f, ip.binpoly(nvars, {one: 1}))
    return f


def random_homogeneous(rng: random.Random, nvars: int, degree: int, bound: int = 5):
    """Random monomial-homogeneous integer polynomial of exact degree."""
    idxs = [
        i
        for i in itertools.product(range(degree + 1), repeat=nvars)
        if sum(i) == degree
    ]
    mono = {i: rng.randint(-bound, bound) for i in idxs}
    if not any(mono.values()):
        mono[idxs[0]] = 1
    return ip.from_monomial_coeffs(nvars, mono)


def random_fullrank_lattice(rng: random.Random, dim: int, pivot_max: int = 2) -> lat.Lattice:
    """Random full-rank lattice with small index (pivots in 1..pivot_max)."""
    gens = []
    for j in range(dim):
        col = [0] * dim
        col[j] = rng.randint(1, pivot_max)
        for i in range(j + 1, dim):
            col[i] = rng.randint(-2, 2)
        gens.append(col)
    return lat.hnf_from_generators(dim, gens)

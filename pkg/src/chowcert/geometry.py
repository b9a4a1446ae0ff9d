"""Cubic Chow variety constructions over Z_m.

Random points (products of three linear forms), per-point tangent
bases, the stacked tangent matrix for several points, and the
curvature-form matrix obtained by contracting second derivatives of the
product map with a normal vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import PrimeModulus, SeededRng, _check_same_modulus
from .matrix import FfMatrix, _mod_matmul
from .poly import (
    LinearForm,
    Poly,
    _shift_map,
    expand_product,
    monomial_basis,
    multiply_by_variable,
)

DEGREE = 3


@dataclass(frozen=True)
class ChowPoint:
    """A point of the cubic Chow cone: an ordered triple of linear forms."""

    forms: tuple[LinearForm, LinearForm, LinearForm]

    def __post_init__(self):
        if len(self.forms) != DEGREE:
            raise ValueError(f"expected {DEGREE} linear forms")
        first = self.forms[0]
        for f in self.forms[1:]:
            _check_same_modulus(first.modulus, f.modulus)
            if f.n != first.n:
                raise ValueError("forms must share the variable count")
        if any(f.is_zero() for f in self.forms):
            raise ValueError("forms must be nonzero")

    @property
    def n(self) -> int:
        return self.forms[0].n

    @property
    def modulus(self) -> PrimeModulus:
        return self.forms[0].modulus

    def expand(self) -> Poly:
        return expand_product(self.forms)


@dataclass
class SamplingStats:
    """Counts rare resampling events (a drawn linear form was zero)."""

    resamples: int = 0


def sample_linear_form(
    n: int, modulus: PrimeModulus, rng: SeededRng, stats: SamplingStats | None = None
) -> LinearForm:
    """Uniform nonzero linear form; zero draws are discarded and counted."""
    while True:
        form = LinearForm(rng.vector(modulus, n + 1), modulus)
        if not form.is_zero():
            return form
        if stats is not None:
            stats.resamples += 1


def sample_point(
    n: int, modulus: PrimeModulus, rng: SeededRng, stats: SamplingStats | None = None
) -> ChowPoint:
    """One random point: three i.i.d. uniform linear forms."""
    if n < 1:
        raise ValueError("need n >= 1")
    return ChowPoint(
        tuple(sample_linear_form(n, modulus, rng, stats) for _ in range(DEGREE))
    )


@dataclass(frozen=True)
class TangentBasis:
    """The 3(n+1) spanning tangent vectors at a point, (k, i) row-major.

    Vector (k, i) is x_i times the product of the two forms other than
    form k.  At a generic point the span has dimension 3n+1.
    """

    point: ChowPoint
    vectors: tuple[Poly, ...]


def tangent_basis(point: ChowPoint) -> TangentBasis:
    n = point.n
    vectors = []
    for k in range(DEGREE):
        others = [point.forms[a] for a in range(DEGREE) if a != k]
        pair = expand_product(others)
        for i in range(n + 1):
            vectors.append(multiply_by_variable(pair, i))
    return TangentBasis(point, tuple(vectors))


def terracini_matrix(points) -> FfMatrix:
    """Stack every point's tangent vectors into one matrix.

    Rows are ordered point-major, then factor-major, then by variable;
    columns follow the degree-3 monomial order.  At r generic points the
    rank is min((3n+1) r, binom(n+3, 3)).
    """
    points = list(points)
    if not points:
        raise ValueError("need at least one point")
    modulus = points[0].modulus
    n = points[0].n
    for p in points[1:]:
        _check_same_modulus(modulus, p.modulus)
        if p.n != n:
            raise ValueError("points must share the variable count")
    dim = monomial_basis(n, DEGREE).dim
    rows = np.zeros((DEGREE * (n + 1) * len(points), dim), dtype=np.int64)
    for pi, point in enumerate(points):
        base = pi * DEGREE * (n + 1)
        for vi, vec in enumerate(tangent_basis(point).vectors):
            rows[base + vi] = vec.coeffs
    return FfMatrix(rows, modulus)


def cone_dimension(n: int) -> int:
    """Dimension of the cubic Chow cone: 3n + 1."""
    return 3 * n + 1


def ambient_dimension(n: int) -> int:
    """Dimension of the space of cubics in n+1 variables."""
    return math.comb(n + 3, 3)


def expected_tangent_rank(n: int, r: int) -> int:
    return cone_dimension(n) * r


def expected_hessian_rank(n: int) -> int:
    """Full contracted-curvature rank at a generic point and normal.

    The 3(n+1)-dimensional parameter space always contains three exact
    kernel directions (two rescaling trade-offs between factors plus the
    radial one), so the best possible rank is 3(n+1) - 3 = 3n.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    return 3 * n


@dataclass(frozen=True)
class HessianMatrix:
    """Curvature form contracted with a normal vector, frame (k, i).

    Symmetric, with identically zero diagonal blocks: the product map is
    multilinear, so repeated differentiation in one factor slot
    vanishes.
    """

    entries: FfMatrix
    n: int


def hessian_at(point: ChowPoint, normal: Poly) -> HessianMatrix:
    """Contract the second derivatives of the product map with a normal vector.

    Entry ((k, i), (l, j)) with k != l is the pairing of x_i x_j L_c
    against the normal vector, where c is the factor index other than
    k and l.
    """
    n = point.n
    modulus = point.modulus
    m = modulus.value
    basis3 = monomial_basis(n, DEGREE)
    if normal.basis != basis3:
        raise ValueError("normal vector must be a cubic over the same variables")
    _check_same_modulus(modulus, normal.modulus)
    # gathered[i, t] = normal-vector coefficient on x_i * (degree-2 monomial t)
    gathered = np.empty((n + 1, monomial_basis(n, 2).dim), dtype=np.int64)
    for i in range(n + 1):
        gathered[i] = normal.coeffs[_shift_map(n, 2, i)]
    size = DEGREE * (n + 1)
    out = np.zeros((size, size), dtype=np.int64)
    for k in range(DEGREE):
        for l in range(k + 1, DEGREE):
            c = 3 - k - l
            third = point.forms[c].as_poly()
            # q[j, t] = coefficient of x_j * L_c on degree-2 monomial t
            q = np.stack(
                [multiply_by_variable(third, j).coeffs for j in range(n + 1)]
            )
            block = _mod_matmul(gathered, q.T, m)
            out[
                k * (n + 1) : (k + 1) * (n + 1), l * (n + 1) : (l + 1) * (n + 1)
            ] = block
            out[
                l * (n + 1) : (l + 1) * (n + 1), k * (n + 1) : (k + 1) * (n + 1)
            ] = block.T
    return HessianMatrix(FfMatrix(out, modulus), n)


def scaling_fiber_directions(point: ChowPoint) -> list[np.ndarray]:
    """Exact kernel vectors of the contracted curvature form.

    Rescaling (L_0, L_1) to (t L_0, L_1 / t) fixes the product, so the
    parameter directions (L_0, -L_1, 0) and (L_0, 0, -L_2) must be
    annihilated by the form for any normal vector.
    """
    n = point.n
    m = point.modulus.value
    out = []
    for other in (1, 2):
        vec = np.zeros(DEGREE * (n + 1), dtype=np.int64)
        vec[0 : n + 1] = point.forms[0].coords
        vec[other * (n + 1) : (other + 1) * (n + 1)] = (
            -point.forms[other].coords
        ) % m
        out.append(vec)
    return out

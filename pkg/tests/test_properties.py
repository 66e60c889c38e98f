"""Suites de propriétés (hypothesis) sur les invariants polyédraux et le dictionnaire ℚ-factoriel."""

from fractions import Fraction
from math import factorial, floor, gcd

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from sympy import Matrix

from toriclab.services.exact_lattice import Lattice
from toriclab.services.oracle import oracle_gamma
from toriclab.services.polyconv import (
    Polyhedron,
    interval_gamma_closed_form,
    pikhurko_constant,
    polar,
    projection_gamma_bounds,
    successive_minimum,
)
from toriclab.services.reduction import series_dictionary
from toriclab.services.toric_germ import affine_germ

F = Fraction

small_rationals = st.builds(F, st.integers(-12, 12), st.integers(1, 6))


def unit_vectors(d: int) -> list[tuple[int, ...]]:
    return [tuple(int(i == j) for j in range(d)) for i in range(d)]


@st.composite
def intervals_with_interior_integer(draw):
    lo = draw(small_rationals)
    hi = draw(small_rationals)
    assume(hi > lo)
    assume(floor(lo) + 1 < hi)
    return lo, hi


@st.composite
def points(draw, d, lo=-3, hi=3, min_size=0, max_size=4):
    coords = st.builds(F, st.integers(lo * 2, hi * 2), st.sampled_from([1, 2]))
    return draw(st.lists(st.tuples(*[coords] * d), min_size=min_size, max_size=max_size))


# ============================================================
# INTERVALLES
# ============================================================

@given(intervals_with_interior_integer())
def test_interval_closed_form_matches_scan(bounds):
    lo, hi = bounds
    gamma = interval_gamma_closed_form(lo, hi)
    assert gamma == oracle_gamma(Lattice.standard(1), Polyhedron.interval(lo, hi))
    assert (1 - 2 * gamma) * (hi - lo) <= 1


@pytest.mark.slow
@settings(deadline=None, max_examples=1000)
@given(intervals_with_interior_integer())
def test_interval_closed_form_matches_pikhurko_constant(bounds):
    lo, hi = bounds
    p = Polyhedron.interval(lo, hi)
    assert interval_gamma_closed_form(lo, hi) == pikhurko_constant(Lattice.standard(1), p)[0]


@given(st.integers(1, 10), st.integers(-20, 20), st.integers(-20, 20))
def test_interval_pikhurko_bound(l, a, b):
    lo, hi = F(min(a, b), l), F(max(a, b), l)
    assume(floor(lo) + 1 < hi)
    gamma = interval_gamma_closed_form(lo, hi)
    assert gamma >= F(1, l + 2)
    extremal = hi - lo == 1 + F(2, l) and (lo * l) % l == l - 1
    assert (gamma == F(1, l + 2)) == extremal


@pytest.mark.parametrize("l", range(1, 11))
def test_interval_pikhurko_extremal(l):
    assert interval_gamma_closed_form(F(-1, l), 1 + F(1, l)) == F(1, l + 2)
    assert interval_gamma_closed_form(F(-1, l) + 5, F(1, l) + 6) == F(1, l + 2)


# ============================================================
# POLAIRE
# ============================================================

@st.composite
def polyhedra_containing_origin(draw):
    d = draw(st.integers(1, 3))
    vertices = [tuple(F(0) for _ in range(d))] + unit_vectors(d) + draw(points(d))
    rays = draw(st.lists(st.tuples(*[st.integers(0, 2)] * d).filter(any), max_size=2))
    return Polyhedron.from_vrep(vertices, rays, d)


@settings(deadline=None, max_examples=200)
@given(polyhedra_containing_origin())
def test_polar_is_an_involution(p):
    assert polar(polar(p)) == p


# ============================================================
# γ ET PROJECTIONS
# ============================================================

@st.composite
def polytope_and_projection(draw):
    d = draw(st.integers(2, 3))
    axes = unit_vectors(d) + [tuple(-x for x in v) for v in unit_vectors(d)]
    p = Polyhedron.from_vrep(axes + draw(points(d, min_size=1)), (), d)
    row = draw(st.tuples(*[st.integers(-2, 2)] * d).filter(any))
    return p, row


@settings(deadline=None, max_examples=200)
@given(polytope_and_projection())
def test_projection_sandwich(data):
    p, row = data
    g0, gp, g = projection_gamma_bounds(p, tuple(F(0) for _ in range(p.dim)), [row])
    assert g0 * gp <= g <= min(g0, gp)


# ============================================================
# MAHLER
# ============================================================

@st.composite
def symmetric_bodies(draw):
    d = draw(st.integers(1, 3))
    extra = draw(points(d, lo=-2, hi=2))
    vertices = unit_vectors(d) + extra
    vertices += [tuple(-x for x in v) for v in vertices]
    return Polyhedron.from_vrep(vertices, (), d)


@given(symmetric_bodies())
def test_mahler_sandwich(body):
    d = body.dim
    lat = Lattice.standard(d)
    lam1, _ = successive_minimum(lat, body, 1)
    lam_d, _ = successive_minimum(lat.dual(), polar(body), d)
    assert 1 <= lam1 * lam_d <= factorial(d)


# ============================================================
# DICTIONNAIRE ℚ-FACTORIEL
# ============================================================

def primitive(v):
    g = gcd(*v)
    return tuple(x // g for x in v)


@st.composite
def simplicial_germs(draw):
    d = draw(st.integers(1, 3))
    rays = draw(
        st.lists(st.tuples(*[st.integers(-2, 3)] * d).filter(any), min_size=d, max_size=d)
        .map(lambda vs: [primitive(v) for v in vs])
    )
    assume(Matrix(rays).det() != 0)
    assume(abs(Matrix(rays).det()) <= 6)
    coefficients = draw(st.lists(st.sampled_from(["1/3", "1/2", "2/3", "1"]), min_size=d, max_size=d))
    return affine_germ(Lattice.standard(d), rays, coefficients)


@pytest.mark.slow
@given(simplicial_germs())
def test_series_dictionary_matches_ct(g):
    report = series_dictionary(g, ["1/2", "1", "3/2"])
    for t, by_group, by_germ in report.checks:
        assert by_group == by_germ, t

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isogrow.errors import OutOfDomain, WrongParity
from isogrow.lattice import (QUAD_CENTER, VERTEX, X_EDGE, Y_EDGE, DiscreteSurface,
                             DomainSpec, StaggeredField, diff, elementary_square,
                             shift, slot_of)

idx_st = st.tuples(st.integers(-50, 50), st.integers(-50, 50))


def test_slot_parity_classes():
    assert slot_of((0, 0)) == VERTEX
    assert slot_of((1, 1)) == QUAD_CENTER
    assert slot_of((1, 0)) == X_EDGE
    assert slot_of((0, 1)) == Y_EDGE
    assert slot_of((-2, 4)) == VERTEX
    assert slot_of((-3, 5)) == QUAD_CENTER


def test_shift_basics():
    assert shift((0, 0), "x", +1) == (1, 0)
    assert shift((0, 0), "y", +1) == (0, 1)
    assert shift((0, 0), "eta", +1) == (1, 1)   # (xi, eta) moves by (0, eps/2)
    assert shift((0, 0), "xi", +1) == (1, -1)


@given(idx_st, st.sampled_from(["x", "y", "xi", "eta"]))
def test_shift_inverse_pairs(idx, direction):
    assert shift(shift(idx, direction, +1), direction, -1) == idx


@given(idx_st)
def test_xi_shift_composition(idx):
    # T_xi = T_x T_y^-1 and T_eta = T_x T_y
    assert shift(idx, "xi", +1) == shift(shift(idx, "x", +1), "y", -1)
    assert shift(idx, "eta", +1) == shift(shift(idx, "x", +1), "y", +1)


def test_domain_membership_integer_exact():
    spec = DomainSpec(r=1.0, h=0.3, eps=0.1)
    assert spec.m_max == 20
    # eta cut: -0.3 < eta <= 0.3 means -12 < m+n <= 12
    assert spec.contains((6, 6))          # eta = 0.3 exactly: included
    assert not spec.contains((7, 7))      # hypothetical; also beyond s_max
    assert not spec.contains((-6, -6))    # eta = -0.3: excluded (strict)
    assert spec.contains((-6, -4))
    assert spec.contains((20, -20))       # xi = r corner
    assert not spec.contains((22, -20))


def test_domain_coordinates():
    spec = DomainSpec(r=1.0, h=0.5, eps=0.2)
    xi, eta = spec.xi_eta((3, 1))
    assert xi == pytest.approx((3 - 1) * 0.05)
    assert eta == pytest.approx((3 + 1) * 0.05)
    x, y = spec.xy((3, 1))
    assert (x, y) == (pytest.approx(0.3), pytest.approx(0.1))
    assert xi == pytest.approx((x - y) / 2)
    assert eta == pytest.approx((x + y) / 2)


def test_field_slot_enforcement():
    spec = DomainSpec(r=1.0, h=0.3, eps=0.1)
    fld = StaggeredField(spec, VERTEX)
    fld.set((0, 0), 1.5)
    assert fld.get((0, 0)) == 1.5
    with pytest.raises(WrongParity):
        fld.set((1, 0), 2.0)
    with pytest.raises(OutOfDomain):
        fld.set((22, 0), 2.0)
    with pytest.raises(OutOfDomain):
        fld.get((2, 0))


def test_diff_constant_and_linear():
    spec = DomainSpec(r=1.0, h=1.0, eps=0.1)
    const = StaggeredField(spec, VERTEX)
    linear = StaggeredField(spec, VERTEX)
    for m in range(-20, 21, 2):
        for n in range(-20, 21, 2):
            if spec.contains((m, n)):
                const.set((m, n), 7.0)
                linear.set((m, n), m * spec.eps / 2)   # the x coordinate
    assert diff(const, "x", (1, 0)) == 0.0
    assert diff(const, "y", (0, 1)) == 0.0
    assert diff(linear, "x", (1, 0)) == pytest.approx(1.0)
    assert diff(linear, "y", (0, 1)) == 0.0


def test_mixed_differences_commute(rng):
    spec = DomainSpec(r=1.0, h=1.0, eps=0.25)
    fld = StaggeredField(spec, VERTEX)
    for m in range(-8, 9, 2):
        for n in range(-8, 9, 2):
            if spec.contains((m, n)):
                fld.set((m, n), float(rng.normal()))

    def d2(first, second, at):
        # build the nested difference by hand on the four shifted vertices
        eps = spec.eps
        f = fld.get
        a = shift(at, first, +1)
        b = shift(at, first, -1)
        return ((f(shift(a, second, +1)) - f(shift(a, second, -1)))
                - (f(shift(b, second, +1)) - f(shift(b, second, -1)))) / eps**2

    for at in [(0, 0), (2, -2), (-2, 0)]:
        # shifts commute exactly; evaluation order costs at most a few ulps
        assert d2("xi", "eta", at) == pytest.approx(d2("eta", "xi", at), rel=1e-13)


def test_elementary_square_order_and_parity():
    sq = elementary_square((1, 1))
    assert sq == ((0, 0), (2, 0), (2, 2), (0, 2))
    assert all(slot_of(p) == VERTEX for p in sq)
    with pytest.raises(WrongParity):
        elementary_square((2, 2))
    with pytest.raises(WrongParity):
        elementary_square((1, 2))


def test_strip_domain_has_two_rows():
    spec = DomainSpec(r=1.0, h=0.05, eps=0.1)
    rows = sorted({(m + n) // 2 for m in range(-20, 21, 2) for n in range(-20, 21, 2)
                   if spec.contains((m, n))})
    assert rows == [0, 1]


def test_discrete_surface_quad_listing():
    spec = DomainSpec(r=0.2, h=0.2, eps=0.1)
    surf = DiscreteSurface.empty(spec)
    for m in range(-4, 5, 2):
        for n in range(-4, 5, 2):
            if spec.contains((m, n)):
                surf.positions.set((m, n), np.array([m / 2, n / 2, 0.0]))
    centers = surf.complete_quad_centers()
    assert centers
    for c in centers:
        assert slot_of(c) == QUAD_CENTER
        assert len(surf.corner_points(c)) == 4

import random

import pytest
from hypothesis import given, strategies as st

from chromarith.exact import PreconditionError
from chromarith.newton import NewtonPolygon, from_slopes


slope_pairs = st.lists(
    st.tuples(st.integers(0, 6), st.integers(1, 6), st.integers(1, 3)).filter(
        lambda t: t[0] <= t[1]
    ),
    min_size=0,
    max_size=5,
)


def test_from_slopes_canonicalization():
    p = from_slopes([(2, 4, 1)])
    assert p.segments == ((1, 2, 2),)
    assert p.notes
    assert p.total() == (4, 2)

    q = from_slopes([(1, 1, 1), (1, 3, 1), (1, 2, 1)])
    assert q.segments == ((1, 3, 1), (1, 2, 1), (1, 1, 1))

    assert from_slopes([]).segments == ()
    assert from_slopes([]).total() == (0, 0)

    with pytest.raises(PreconditionError):
        from_slopes([(3, 2, 1)])
    with pytest.raises(PreconditionError):
        from_slopes([(1, 0, 1)])


def test_total_of_figure_polygon():
    figure = from_slopes([(1, 3, 1), (1, 2, 1), (1, 1, 1)])
    assert figure.total() == (6, 3)
    assert from_slopes([(1, 2, 2)]).total() == (4, 2)


def test_dual_examples():
    assert from_slopes([(1, 3, 1)]).dual().segments == ((2, 3, 1),)
    for k in (1, 2, 5):
        half = from_slopes([(1, 2, k)])
        assert half.dual() == half


def test_elliptic_curve_polygons():
    ordinary = from_slopes([(0, 1, 1), (1, 1, 1)])
    supersingular = from_slopes([(1, 2, 1)])
    assert ordinary.is_polarizable()
    assert supersingular.is_polarizable()
    assert ordinary.total() == (2, 1)
    assert supersingular.total() == (2, 1)


def test_polarizable_examples():
    assert from_slopes([(1, 3, 1), (2, 3, 1)]).is_polarizable()
    assert not from_slopes([(1, 3, 1)]).is_polarizable()


def test_breakpoints_of_paper_figure():
    figure = from_slopes([(1, 2, 1), (1, 3, 1), (1, 1, 1)])
    assert figure.breakpoints() == [(0, 0), (3, 1), (5, 2), (6, 3)]
    assert from_slopes([]).breakpoints() == [(0, 0)]
    assert from_slopes([(1, 1, 2)]).breakpoints() == [(0, 0), (2, 2)]


def test_render_ascii_figure():
    figure = from_slopes([(1, 3, 1), (1, 2, 1), (1, 1, 1)])
    grid = figure.render_ascii()
    lines = grid.splitlines()
    assert len(lines) == 4
    # '*' at breakpoints, top row holds (6,3)
    assert lines[0].split()[6] == "*"
    assert lines[3].split()[0] == "*"
    assert lines[2].split()[3] == "*"
    assert from_slopes([]).render_ascii() == "*"


@given(slope_pairs)
def test_dual_is_involution_and_swaps_height_dim(pairs):
    p = from_slopes(pairs)
    d = p.dual()
    assert d.dual() == p
    h, dim = p.total()
    assert d.total() == (h, h - dim)


@given(slope_pairs)
def test_sum_with_dual_is_polarizable(pairs):
    p = from_slopes(pairs)
    assert (p + p.dual()).is_polarizable()


@given(slope_pairs)
def test_breakpoints_convex(pairs):
    from fractions import Fraction

    p = from_slopes(pairs)
    pts = p.breakpoints()
    slopes = [
        Fraction(y1 - y0, x1 - x0)
        for (x0, y0), (x1, y1) in zip(pts, pts[1:])
        if x1 != x0
    ]
    assert slopes == sorted(slopes)


def test_json_export():
    figure = from_slopes([(1, 3, 1), (1, 2, 1), (1, 1, 1)])
    data = figure.to_json()
    assert data["breakpoints"] == [[0, 0], [3, 1], [5, 2], [6, 3]]
    assert data["height"] == 6 and data["dimension"] == 3

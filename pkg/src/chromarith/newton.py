"""Newton-polygon algebra for isogeny classes: canonical slope data,
duality, direct sums, the polarization symmetry test, and rendering."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .exact import PreconditionError


@dataclass(frozen=True)
class NewtonPolygon:
    """Multiset of coprime (dimension, height) slope pairs with
    multiplicities, sorted by slope; always in canonical form.

    Use ``from_slopes`` to construct; the raw constructor assumes canonical
    input.
    """

    segments: tuple  # ((d, h, mult), ...) sorted by d/h ascending
    notes: tuple = field(default=(), compare=False)

    @staticmethod
    def from_slopes(pairs) -> "NewtonPolygon":
        """Canonicalize a list of (d, h) or (d, h, mult) slope data.

        Non-coprime pairs are read as g copies of the reduced pair (heights
        add up), recorded in ``notes``.
        """
        counts: dict = {}
        notes = []
        for pair in pairs:
            if len(pair) == 2:
                d, h = pair
                mult = 1
            else:
                d, h, mult = pair
            if h <= 0:
                raise PreconditionError(f"height must be positive: {pair}")
            if not 0 <= d <= h:
                raise PreconditionError(f"need 0 <= d <= h: {pair}")
            if mult <= 0:
                raise PreconditionError(f"multiplicity must be positive: {pair}")
            g = gcd(d, h)
            if g > 1:
                notes.append(
                    f"({d},{h}) normalized to {g} copies of ({d // g},{h // g})"
                )
                d, h, mult = d // g, h // g, mult * g
            counts[(d, h)] = counts.get((d, h), 0) + mult
        segments = tuple(
            (d, h, counts[(d, h)])
            for (d, h) in sorted(counts, key=lambda s: Fraction(s[0], s[1]))
        )
        return NewtonPolygon(segments, tuple(notes))

    def slopes(self):
        return [Fraction(d, h) for (d, h, _) in self.segments]

    def total(self) -> tuple:
        """(height, dimension); both additive over segments."""
        height = sum(h * m for (_, h, m) in self.segments)
        dim = sum(d * m for (d, _, m) in self.segments)
        return height, dim

    def dual(self) -> "NewtonPolygon":
        """Slope lambda becomes 1 - lambda: (d, h) -> (h - d, h)."""
        return NewtonPolygon.from_slopes(
            [(h - d, h, m) for (d, h, m) in self.segments]
        )

    def direct_sum(self, other: "NewtonPolygon") -> "NewtonPolygon":
        return NewtonPolygon.from_slopes(
            list(self.segments) + list(other.segments)
        )

    __add__ = direct_sum

    def is_polarizable(self) -> bool:
        """True iff every slope lambda occurs as often as 1 - lambda,
        i.e. the polygon equals its dual."""
        return self.segments == self.dual().segments

    def breakpoints(self):
        """Vertices of the graph: cumulative (height, dimension) in slope
        order, starting at (0, 0)."""
        pts = [(0, 0)]
        x, y = 0, 0
        for (d, h, m) in self.segments:
            x += h * m
            y += d * m
            pts.append((x, y))
        return pts

    def render_ascii(self) -> str:
        """Dotted-grid picture: horizontal axis total height, vertical axis
        total dimension; '*' at breakpoints, 'o' at lattice points on the
        polygon."""
        pts = self.breakpoints()
        width, height = pts[-1]
        on_path = set()
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            dx, dy = x1 - x0, y1 - y0
            for x in range(x0, x1 + 1):
                num = (x - x0) * dy
                if dx and num % dx == 0:
                    on_path.add((x, y0 + num // dx))
        lines = []
        for y in range(height, -1, -1):
            row = []
            for x in range(width + 1):
                if (x, y) in pts:
                    row.append("*")
                elif (x, y) in on_path:
                    row.append("o")
                else:
                    row.append(".")
            lines.append(" ".join(row))
        if not lines:
            lines = ["*"]
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "segments": [list(s) for s in self.segments],
            "breakpoints": [list(p) for p in self.breakpoints()],
            "height": self.total()[0],
            "dimension": self.total()[1],
            "polarizable": self.is_polarizable(),
            "notes": list(self.notes),
        }

    def __repr__(self):
        body = ", ".join(f"{d}/{h} x{m}" for (d, h, m) in self.segments)
        return f"NewtonPolygon[{body}]"


def from_slopes(pairs) -> NewtonPolygon:
    return NewtonPolygon.from_slopes(pairs)


def total(polygon: NewtonPolygon) -> tuple:
    return polygon.total()


def dual(polygon: NewtonPolygon) -> NewtonPolygon:
    return polygon.dual()


def is_polarizable(polygon: NewtonPolygon) -> bool:
    return polygon.is_polarizable()


def render_ascii(polygon: NewtonPolygon) -> str:
    return polygon.render_ascii()

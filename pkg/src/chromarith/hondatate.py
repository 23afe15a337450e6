"""p-adic types over abstract CM place structures: validity, slopes,
local invariants and dimension formulas of the classification theorems,
minimality relative to substructures, and Weil integer checks for
imaginary quadratic fields."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exact import PreconditionError, is_prime
from .newton import NewtonPolygon


@dataclass(frozen=True)
class Place:
    id: str
    e: int  # ramification index
    f: int  # residue degree

    def __post_init__(self):
        if self.e < 1 or self.f < 1:
            raise PreconditionError("e and f must be positive")

    @property
    def local_degree(self) -> int:
        return self.e * self.f


@dataclass(frozen=True)
class CMPlaceStructure:
    """Places of a CM field over p with the conjugation involution.

    Only the abstract (e, f, conjugation) data enters any formula, so no
    defining polynomial is carried.  ``real_places`` is nonzero only for
    the degenerate totally-real cases (never for an honest CM field).
    """

    places: tuple  # of Place
    conj: dict  # id -> id, involution preserving (e, f)
    p: int
    real_places: int = 0

    def __post_init__(self):
        if not is_prime(self.p):
            raise PreconditionError(f"{self.p} is not prime")
        ids = {pl.id for pl in self.places}
        if len(ids) != len(self.places):
            raise PreconditionError("duplicate place ids")
        if set(self.conj) != ids or set(self.conj.values()) != ids:
            raise PreconditionError("conjugation must permute the place ids")
        by_id = {pl.id: pl for pl in self.places}
        for x, y in self.conj.items():
            if self.conj[y] != x:
                raise PreconditionError("conjugation is not an involution")
            if (by_id[x].e, by_id[x].f) != (by_id[y].e, by_id[y].f):
                raise PreconditionError("conjugation must preserve (e, f)")

    def place(self, place_id: str) -> Place:
        for pl in self.places:
            if pl.id == place_id:
                return pl
        raise PreconditionError(f"unknown place {place_id!r}")

    @property
    def degree(self) -> int:
        """Sum of local degrees over p; equals the global degree."""
        return sum(pl.local_degree for pl in self.places)


@dataclass(frozen=True)
class PAdicType:
    """A CM place structure together with a rational eta per place."""

    structure: CMPlaceStructure
    eta: dict  # id -> Fraction

    def __post_init__(self):
        ids = {pl.id for pl in self.structure.places}
        if set(self.eta) != ids:
            raise PreconditionError("eta must be defined exactly on the places")
        object.__setattr__(
            self, "eta", {k: Fraction(v) for k, v in self.eta.items()}
        )


def validate_type(t: PAdicType):
    """Check eta_x/e_x + eta_{c(x)}/e_x = 1 and 0 <= eta_x/e_x <= 1 at
    every place.  Returns a list of violation strings; empty means ok."""
    violations = []
    for pl in t.structure.places:
        cx = t.structure.conj[pl.id]
        s = t.eta[pl.id] / pl.e
        sc = t.eta[cx] / pl.e
        if s + sc != 1:
            violations.append(
                f"eta/e at {pl.id} plus eta/e at {cx} is {s + sc}, not 1"
            )
        if not 0 <= s <= 1:
            violations.append(f"slope {s} at {pl.id} outside [0, 1]")
    return violations


def slopes_of_type(t: PAdicType) -> dict:
    """The slope at each place: s_x = eta_x / e_x."""
    bad = validate_type(t)
    if bad:
        raise PreconditionError("; ".join(bad))
    return {pl.id: t.eta[pl.id] / pl.e for pl in t.structure.places}


def _reduced_mod_1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class HTInvariants:
    inv: dict  # place id -> Fraction in [0, 1)
    m: int
    dim: Fraction
    degree: int


def invariants_and_dimension(t: PAdicType, pi_valuation_mode: str = "eta") -> HTInvariants:
    """Local invariants inv_x = eta_x f_x (mod 1) at places over p, the
    least common denominator m (real places, if declared, contribute 1/2),
    and the dimension d*m/2.

    Only the "eta" mode is implemented: the type carries eta directly;
    Frobenius-valuation data should be converted to eta upstream.
    """
    if pi_valuation_mode != "eta":
        raise PreconditionError(f"unknown mode {pi_valuation_mode!r}")
    bad = validate_type(t)
    if bad:
        raise PreconditionError("; ".join(bad))
    inv = {
        pl.id: _reduced_mod_1(t.eta[pl.id] * pl.f) for pl in t.structure.places
    }
    m = 1
    for v in inv.values():
        m = m * v.denominator // _gcd(m, v.denominator)
    if t.structure.real_places > 0:
        m = m * 2 // _gcd(m, 2)
    d = t.structure.degree
    dim = Fraction(d * m, 2)
    return HTInvariants(inv, m, dim, d)


def _gcd(a: int, b: int) -> int:
    from math import gcd

    return gcd(a, b)


def kottwitz_invariants(t: PAdicType, b_inv: dict, place_kind: dict | None = None) -> dict:
    """Invariants of the twisted endomorphism algebra: at x over p the
    value is eta_x f_x - inv_x(B), at a real place 1/2 - inv_x(B), and at
    any other finite place -inv_x(B), all reduced mod 1.

    ``b_inv`` maps place ids to invariants of B; ids not in the structure
    are classified by ``place_kind`` ("finite" default, or "real")."""
    place_kind = place_kind or {}
    over_p = {pl.id for pl in t.structure.places}
    result = {}
    for pl in t.structure.places:
        shift = Fraction(b_inv.get(pl.id, 0))
        result[pl.id] = _reduced_mod_1(t.eta[pl.id] * pl.f - shift)
    for x, v in b_inv.items():
        if x in over_p:
            continue
        kind = place_kind.get(x, "finite")
        if kind == "real":
            result[x] = _reduced_mod_1(Fraction(1, 2) - Fraction(v))
        elif kind == "finite":
            result[x] = _reduced_mod_1(-Fraction(v))
        else:
            raise PreconditionError(f"unknown place kind {kind!r}")
    return result


@dataclass(frozen=True)
class Covering:
    """Declares which places of the big structure lie over which places of
    the substructure, with the relative ramification indices."""

    over: dict  # big place id -> sub place id
    e_rel: dict  # big place id -> relative e


@dataclass(frozen=True)
class MinimalityResult:
    descends: bool
    eta_witness: dict | None
    violations: tuple


def minimality_check(t: PAdicType, sub: CMPlaceStructure, covering: Covering) -> MinimalityResult:
    """Decide whether the type descends along the covering: descends iff
    some eta on ``sub`` satisfies eta_big = e_rel * eta_sub at every big
    place.  Minimality is always relative to the supplied substructure."""
    big_ids = {pl.id for pl in t.structure.places}
    if set(covering.over) != big_ids or set(covering.e_rel) != big_ids:
        raise PreconditionError("covering must assign every place of the type")
    for x in big_ids:
        if covering.over[x] not in {pl.id for pl in sub.places}:
            raise PreconditionError(f"covering target {covering.over[x]!r} not in substructure")
        e_big = t.structure.place(x).e
        e_sub = sub.place(covering.over[x]).e
        if covering.e_rel[x] * e_sub != e_big:
            raise PreconditionError(
                f"inconsistent covering data at {x!r}: e_rel * e_sub != e_big"
            )
        # conjugation compatibility
        cx = t.structure.conj[x]
        if covering.over[cx] != sub.conj[covering.over[x]]:
            raise PreconditionError(f"covering does not intertwine conjugation at {x!r}")
    witness: dict = {}
    violations = []
    for x in sorted(big_ids):
        target = covering.over[x]
        needed = t.eta[x] / covering.e_rel[x]
        if target in witness and witness[target] != needed:
            violations.append(
                f"places over {target!r} force eta {witness[target]} and {needed}"
            )
        witness[target] = needed
    if violations:
        return MinimalityResult(False, None, tuple(violations))
    candidate = PAdicType(sub, witness)
    bad = validate_type(candidate)
    if bad:
        return MinimalityResult(False, None, tuple(bad))
    return MinimalityResult(True, witness, ())


@dataclass(frozen=True)
class WeilInteger:
    """pi = a + b*sqrt(d) of norm q = p^r in an imaginary quadratic field."""

    d: int  # squarefree negative
    a: Fraction
    b: Fraction
    q: int

    def norm(self) -> Fraction:
        return Fraction(self.a) ** 2 - self.d * Fraction(self.b) ** 2


def verify_weil_integer(w: WeilInteger) -> tuple:
    """ok iff a^2 - d b^2 = q, the absolute-value-q^(1/2) condition for an
    imaginary quadratic field."""
    if w.d >= 0:
        raise PreconditionError("d must be negative")
    n = w.norm()
    if n == w.q:
        return ("ok", n)
    return ("violation", n)


def type_to_newton_polygon(t: PAdicType, m: int | None = None) -> NewtonPolygon:
    """Assemble the polygon with slope s_x and height d_x * m per place.

    Raises when some slope multiplicity would be non-integral at that
    height (the type is then not realizable at height m)."""
    slopes = slopes_of_type(t)
    if m is None:
        m = invariants_and_dimension(t).m
    pairs = []
    for pl in t.structure.places:
        s = slopes[pl.id]
        height = pl.local_degree * m
        if height % s.denominator != 0:
            raise PreconditionError(
                f"type not realizable at height {height} at place {pl.id!r}"
            )
        mult = height // s.denominator
        pairs.append((s.numerator, s.denominator, mult))
    return NewtonPolygon.from_slopes(pairs)


def split_height_n_type(n: int, p: int = 5) -> PAdicType:
    """The basic split type with slopes 1/n and (n-1)/n on a quadratic
    field where p splits."""
    if n < 2:
        raise PreconditionError("height must be >= 2")
    structure = CMPlaceStructure(
        (Place("u", 1, 1), Place("uc", 1, 1)),
        {"u": "uc", "uc": "u"},
        p,
    )
    return PAdicType(structure, {"u": Fraction(1, n), "uc": Fraction(n - 1, n)})

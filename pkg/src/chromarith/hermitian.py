"""Quadratic Hilbert symbols, local norm tests for imaginary quadratic
fields, the rank-1 translation between alternating and conjugate-symmetric
pairings, and the local/global classification of unitary and similitude
forms by discriminant classes and signatures."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import PreconditionError, is_prime, kronecker, val_p

INFINITE_PLACE = "oo"


@dataclass(frozen=True)
class QuadImagField:
    """Q(sqrt(d)) for squarefree d < 0; discriminant d or 4d."""

    d: int

    def __post_init__(self):
        if self.d >= 0:
            raise PreconditionError("d must be negative")
        if not _squarefree(self.d):
            raise PreconditionError(f"{self.d} is not squarefree")

    @property
    def discriminant(self) -> int:
        return self.d if self.d % 4 == 1 else 4 * self.d

    def split_type(self, place) -> str:
        """How the place of Q behaves in the field."""
        if place == INFINITE_PLACE:
            return "archimedean"
        symbol = kronecker(self.discriminant, place)
        return {1: "split", -1: "inert", 0: "ramified"}[symbol]


def _squarefree(n: int) -> bool:
    n = abs(n)
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


def _split_unit_and_val(x: Fraction, ell: int) -> tuple:
    """x = ell^v * u with u an ell-adic unit given as a fraction."""
    v = val_p(x, ell)
    u = x / Fraction(ell) ** v
    return v, u


def _unit_as_int(u: Fraction, modulus: int) -> int:
    return u.numerator * pow(u.denominator, -1, modulus) % modulus


def hilbert_symbol(a, b, place) -> int:
    """Quadratic Hilbert symbol (a, b) at a finite prime or at infinity."""
    a = Fraction(a)
    b = Fraction(b)
    if a == 0 or b == 0:
        raise PreconditionError("Hilbert symbol needs nonzero entries")
    if place == INFINITE_PLACE:
        return -1 if a < 0 and b < 0 else 1
    ell = place
    if not is_prime(ell):
        raise PreconditionError(f"{ell} is not prime")
    alpha, u = _split_unit_and_val(a, ell)
    beta, w = _split_unit_and_val(b, ell)
    if ell != 2:
        legendre_u = kronecker(_unit_as_int(u, ell), ell)
        legendre_w = kronecker(_unit_as_int(w, ell), ell)
        sign = 1
        if alpha * beta % 2 and ell % 4 == 3:
            sign = -sign
        if beta % 2 and legendre_u == -1:
            sign = -sign
        if alpha % 2 and legendre_w == -1:
            sign = -sign
        return sign
    u8 = _unit_as_int(u, 8)
    w8 = _unit_as_int(w, 8)
    eps_u = (u8 - 1) // 2 % 2
    eps_w = (w8 - 1) // 2 % 2
    omega_u = (u8 * u8 - 1) // 8 % 2
    omega_w = (w8 * w8 - 1) // 8 % 2
    exponent = eps_u * eps_w + alpha * omega_w + beta * omega_u
    return -1 if exponent % 2 else 1


def symbol_support(a: Fraction, b: Fraction):
    """Finite places where (a, b) could be nontrivial, plus infinity."""
    places = {2, INFINITE_PLACE}
    for x in (a, b):
        for n in (x.numerator, x.denominator):
            n = abs(n)
            d = 2
            while d * d <= n:
                if n % d == 0:
                    places.add(d)
                    while n % d == 0:
                        n //= d
                d += 1
            if n > 1:
                places.add(n)
    return places


def is_local_norm(a, F: QuadImagField, place) -> bool:
    """Whether a lies in the image of the norm map from the completion of F.

    Computed as (a, d) = +1 at the place; automatically true at split
    places."""
    a = Fraction(a)
    if a == 0:
        raise PreconditionError("norm test needs a nonzero input")
    return hilbert_symbol(a, F.d, place) == 1


def pairing_translate(value: tuple, direction: str, F: QuadImagField) -> tuple:
    """Rank-1 translation between the purely imaginary element encoding an
    alternating pairing and the totally real element encoding the
    conjugate-symmetric one: xi = 2*delta*beta and beta = xi/(2*delta).

    Elements are coordinates (x, y) = x + y*delta with delta^2 = d.
    """
    x, y = Fraction(value[0]), Fraction(value[1])
    if direction == "beta_to_xi":
        if x != 0 or y == 0:
            raise PreconditionError("beta must be purely imaginary and nonzero")
        return (2 * F.d * y, Fraction(0))
    if direction == "xi_to_beta":
        if y != 0 or x == 0:
            raise PreconditionError("xi must be totally real and nonzero")
        return (Fraction(0), x / (2 * F.d))
    raise PreconditionError(f"unknown direction {direction!r}")


@dataclass(frozen=True)
class LocalFormClass:
    """Per-place invariant of a diagonal hermitian form: trivial at split
    places, a discriminant class in Z/2 at nonsplit finite places, and a
    signature pair at infinity."""

    place: object
    kind: str  # "trivial" | "disc" | "signature"
    disc: int | None = None  # 0 or 1 in Z/2
    signature: tuple | None = None  # (pos, neg)

    def __post_init__(self):
        if self.kind == "disc" and self.disc not in (0, 1):
            raise PreconditionError("disc class must be 0 or 1")
        if self.kind == "signature" and (
            self.signature is None or len(self.signature) != 2
        ):
            raise PreconditionError("signature must be a pair")


def local_class_U(F: QuadImagField, n: int, place, entries) -> LocalFormClass:
    """Isometry class of the diagonal hermitian form with the given rational
    diagonal entries, at one place."""
    entries = [Fraction(e) for e in entries]
    if len(entries) != n:
        raise PreconditionError("need n diagonal entries")
    if any(e == 0 for e in entries):
        raise PreconditionError("degenerate diagonal entry")
    kind = F.split_type(place)
    if kind == "split":
        return LocalFormClass(place, "trivial")
    if kind == "archimedean":
        pos = sum(1 for e in entries if e > 0)
        return LocalFormClass(place, "signature", signature=(pos, n - pos))
    det = Fraction(1)
    for e in entries:
        det *= e
    cls = 0 if is_local_norm(det, F, place) else 1
    return LocalFormClass(place, "disc", disc=cls)


@dataclass(frozen=True)
class GlobalFormSpec:
    """Local data for a rank-n form: the classes at finitely many places,
    always including infinity."""

    field: QuadImagField
    n: int
    local: tuple  # of LocalFormClass

    def __post_init__(self):
        places = [c.place for c in self.local]
        if len(set(places)) != len(places):
            raise PreconditionError("duplicate places in local data")
        if not any(c.place == INFINITE_PLACE for c in self.local):
            raise PreconditionError("local data must include infinity")
        for c in self.local:
            kind = self.field.split_type(c.place)
            if kind == "archimedean":
                if c.kind != "signature":
                    raise PreconditionError("infinite place needs a signature")
                if sum(c.signature) != self.n or min(c.signature) < 0:
                    raise PreconditionError("signature does not match the rank")
            elif kind == "split":
                if c.kind != "trivial":
                    raise PreconditionError(f"split place {c.place} must be trivial")
            else:
                if c.kind != "disc":
                    raise PreconditionError(f"nonsplit place {c.place} needs a disc class")

    def signature(self) -> tuple:
        for c in self.local:
            if c.place == INFINITE_PLACE:
                return c.signature
        raise AssertionError("unreachable")


def _xi_U(cls: LocalFormClass) -> int:
    if cls.kind == "trivial":
        return 0
    if cls.kind == "disc":
        return cls.disc
    return cls.signature[1] % 2  # q mod 2 at infinity


def global_exists_U(spec: GlobalFormSpec) -> bool:
    """Exactness of the local-global sequence: the local data glue to a
    global form iff the Z/2 classes sum to zero."""
    return sum(_xi_U(c) for c in spec.local) % 2 == 0


def _xi_GU(cls: LocalFormClass) -> int:
    if cls.kind == "trivial":
        return 0
    if cls.kind == "disc":
        return cls.disc
    return cls.signature[0] % 2  # p = q mod 2 at infinity for n even


def global_classify_GU(spec: GlobalFormSpec, n: int | None = None) -> dict:
    """Similitude classification: for odd rank the unordered signature is a
    complete invariant and every one occurs; for even rank existence is the
    vanishing of the similitude Z/2 sum."""
    if n is None:
        n = spec.n
    if n != spec.n:
        raise PreconditionError("rank mismatch between spec and n")
    p, q = spec.signature()
    if p + q != n:
        raise PreconditionError("signature does not match the rank")
    if n % 2 == 1:
        return {
            "parity": "odd",
            "exists": True,
            "similitude_invariant": tuple(sorted((p, q), reverse=True)),
        }
    total = sum(_xi_GU(c) for c in spec.local) % 2
    return {"parity": "even", "exists": total == 0, "xi_sum": total}


def standard_form_matrix(n: int, principal_disc: bool, a_symbol: str = "a"):
    """The table of standard matrices: antidiagonal hyperbolic blocks plus
    the anisotropic tail, by rank parity and discriminant class.  Entries
    are ints or the symbol for a fixed non-norm scalar."""
    if n < 1:
        raise PreconditionError("rank must be positive")
    if n % 2 == 0 and principal_disc:
        hyp = n
        tail: list = []
    elif n % 2 == 0:
        hyp = n - 2
        tail = [1, f"-{a_symbol}"]
    elif principal_disc:
        hyp = n - 1
        tail = [1]
    else:
        hyp = n - 1
        tail = [a_symbol]
    size = n
    rows = [[0] * size for _ in range(size)]
    for i in range(hyp):
        rows[i][hyp - 1 - i] = 1
    for k, entry in enumerate(tail):
        rows[hyp + k][hyp + k] = entry
    return rows


def witt_index_from_table(n: int, principal_disc: bool) -> int:
    if n % 2 == 0:
        return n // 2 if principal_disc else (n - 2) // 2
    return (n - 1) // 2

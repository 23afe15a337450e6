"""Closed-form existence and order predicates for the chromatic level-1
and level-2 periodic-family invariants, plus stem arithmetic for the
associated composites."""

from __future__ import annotations

from dataclasses import dataclass

from .exact import PreconditionError, is_prime, val_p


@dataclass(frozen=True)
class GreekIndex:
    """Index data (p; i_0, ..., i_n) for a length-(n+1) exponent sequence."""

    p: int
    n: int
    exponents: tuple

    def __post_init__(self):
        if not is_prime(self.p):
            raise PreconditionError(f"{self.p} is not prime")
        if self.n < 1:
            raise PreconditionError("chromatic level must be >= 1")
        if len(self.exponents) != self.n + 1:
            raise PreconditionError("need n + 1 exponents")
        if any(e < 1 for e in self.exponents):
            raise PreconditionError("exponents must be positive")


def v_degree(p: int, k: int) -> int:
    """Topological degree of the k-th periodicity generator: 2(p^k - 1)."""
    return 2 * (p**k - 1)


def norm_I(idx: GreekIndex) -> int:
    """i_1|v_1| + ... + i_{n-1}|v_{n-1}| + n for I = (i_0, ..., i_n)."""
    total = idx.n
    for k in range(1, idx.n):
        total += idx.exponents[k] * v_degree(idx.p, k)
    return total


def greek_stem(idx: GreekIndex, s: int) -> int:
    """Stem of the s-fold composite: i_n * s * |v_n| - ||I||."""
    return idx.exponents[idx.n] * s * v_degree(idx.p, idx.n) - norm_I(idx)


@dataclass(frozen=True)
class InvariantVerdict:
    exists: bool
    order: int | None
    weight: int | None = None
    flagged: bool = False
    note: str = ""

    def __bool__(self):
        return self.exists


def alpha_invariant_order(p: int, t: int, j: int) -> InvariantVerdict:
    """Whether the order-p^j level-1 invariant in internal weight t exists.

    Exists iff t = (p-1) i with j <= v_p(i) + 1.
    """
    if not is_prime(p) or p == 2:
        raise PreconditionError("requires an odd prime")
    if j < 1:
        raise PreconditionError("order exponent j must be >= 1")
    if t <= 0 or t % (p - 1) != 0:
        return InvariantVerdict(False, None, note="weight not a positive multiple of p-1")
    i = t // (p - 1)
    if j > val_p(i, p) + 1:
        return InvariantVerdict(False, None, note=f"j exceeds v_p({i}) + 1")
    return InvariantVerdict(True, p**j)


def alpha_max_order_exponent(p: int, i: int) -> int:
    """Largest j for which the invariant at t = (p-1)i exists."""
    return val_p(i, p) + 1


def beta_invariant_exists(p: int, i: int, j: int, k: int) -> InvariantVerdict:
    """Literal evaluation of the level-2 existence predicate.

    Conditions, taken verbatim:
      (1) t = (p^2 - 1) i - (p - 1) j;
      (2) 1 <= j <= p^nu + p^(nu-1) - 1 with nu = v_p(i), and j = 1 when
          nu = 0;
      (3) with m the unique integer satisfying
          p^(nu-m-1) + p^(nu-m-2) - 1 < j <= p^(nu-m) + p^(nu-m-1) - 1,
          require k <= min(v_p(j) + 1, m + 1).

    For nu = 0 the bracketing in (3) admits only m = -1, so the literal
    predicate rejects every k >= 1; such verdicts carry ``flagged=True``
    and should be cross-checked against the congruence-group search.
    """
    if not is_prime(p) or p <= 3:
        raise PreconditionError("requires a prime p > 3")
    if min(i, j, k) < 1:
        raise PreconditionError("i, j, k must be positive")
    t = (p * p - 1) * i - (p - 1) * j
    nu = val_p(i, p)
    flagged = nu == 0
    if nu == 0:
        if j != 1:
            return InvariantVerdict(False, None, t, flagged, "condition (2): j = 1 forced when v_p(i) = 0")
    elif not (1 <= j <= p**nu + p ** (nu - 1) - 1):
        return InvariantVerdict(False, None, t, flagged, "condition (2) bound on j")
    m = _bracketing_m(p, nu, j)
    if m is None:
        return InvariantVerdict(False, None, t, flagged, "condition (3): no integer m solves the bracketing")
    cap = min(val_p(j, p) + 1, m + 1)
    if k > cap:
        return InvariantVerdict(False, None, t, flagged, f"condition (3): k > min(v_p(j)+1, m+1) = {cap}")
    return InvariantVerdict(True, p**k, t, flagged)


def _bracketing_m(p: int, nu: int, j: int):
    """The unique integer m with
    p^(nu-m-1) + p^(nu-m-2) - 1 < j <= p^(nu-m) + p^(nu-m-1) - 1,
    scanning all integers (negative included); None if there is none."""
    from fractions import Fraction

    hits = []
    for m in range(-2, nu + 3):
        lo = Fraction(p) ** (nu - m - 1) + Fraction(p) ** (nu - m - 2) - 1
        hi = Fraction(p) ** (nu - m) + Fraction(p) ** (nu - m - 1) - 1
        if lo < j <= hi:
            hits.append(m)
    # the bounds are strictly decreasing in m, so the window scan is total
    if len(hits) == 1:
        return hits[0]
    return None

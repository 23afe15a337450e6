"""Bernoulli numbers, exact q-expansions, Eisenstein series, the level-1
monomial spanning sets with negative powers of the discriminant form, and
the substitution operator f(q) -> f(q^l)."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .exact import PreconditionError, prime_power_split, val_p


class QSeries:
    """Truncated q-expansion with exact coefficients and explicit precision.

    Coefficients are Fractions (rational domain) or canonical integers mod
    p^k when ``modulus`` is set.  ``precision`` is the number of known
    coefficients; binary operations truncate to the minimum precision.
    Instances are immutable.
    """

    __slots__ = ("coeffs", "modulus")

    def __init__(self, coeffs, modulus=None):
        if modulus is not None:
            prime_power_split(modulus)
            coeffs = tuple(
                c % modulus if isinstance(c, int) else _reduce_scalar(c, modulus)
                for c in coeffs
            )
        else:
            coeffs = tuple(Fraction(c) for c in coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "modulus", modulus)

    def __setattr__(self, name, value):
        raise AttributeError("QSeries is immutable")

    @property
    def precision(self) -> int:
        return len(self.coeffs)

    def coefficient(self, i: int):
        if i >= self.precision:
            raise PreconditionError(f"coefficient {i} beyond precision {self.precision}")
        return self.coeffs[i]

    def _common(self, other):
        if not isinstance(other, QSeries):
            raise TypeError("expected QSeries")
        if self.modulus != other.modulus:
            raise PreconditionError("mixed coefficient domains")
        return min(self.precision, other.precision)

    def __add__(self, other):
        n = self._common(other)
        return QSeries(
            [self.coeffs[i] + other.coeffs[i] for i in range(n)], self.modulus
        )

    def __sub__(self, other):
        n = self._common(other)
        return QSeries(
            [self.coeffs[i] - other.coeffs[i] for i in range(n)], self.modulus
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        n = self._common(other)
        out = [0] * n
        for i, a in enumerate(self.coeffs[:n]):
            if not a:
                continue
            for j in range(n - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] += a * b
        return QSeries(out, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return QSeries([-c for c in self.coeffs], self.modulus)

    def scale(self, c):
        if self.modulus is not None:
            c = _reduce_scalar(c, self.modulus)
        return QSeries([c * a for a in self.coeffs], self.modulus)

    def __eq__(self, other):
        return (
            isinstance(other, QSeries)
            and self.modulus == other.modulus
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.modulus, self.coeffs))

    def truncate(self, prec: int) -> "QSeries":
        if prec > self.precision:
            raise PreconditionError("cannot extend precision by truncation")
        return QSeries(self.coeffs[:prec], self.modulus)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def reduce_mod(self, modulus: int) -> "QSeries":
        """Reduce rational coefficients mod p^k; denominators must be units."""
        if self.modulus is not None:
            p, k = prime_power_split(modulus)
            ps, ks = prime_power_split(self.modulus)
            if ps != p or ks < k:
                raise PreconditionError("cannot lift or change residue prime")
            return QSeries([c % modulus for c in self.coeffs], modulus)
        return QSeries(
            [_reduce_scalar(c, modulus) for c in self.coeffs], modulus
        )

    def power(self, e: int) -> "QSeries":
        if e < 0:
            raise PreconditionError("negative series power")
        result = QSeries([1] + [0] * (self.precision - 1), self.modulus)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def verschiebung(self, ell: int) -> "QSeries":
        """Substitute q -> q^ell; see module function ``verschiebung``."""
        n = self.precision
        out = [0] * n
        for i in range(n):
            if i % ell == 0:
                out[i] = self.coeffs[i // ell]
        return QSeries(out, self.modulus)

    def to_json(self) -> dict:
        if self.modulus is None:
            coeffs = [
                f"{c.numerator}/{c.denominator}" for c in self.coeffs
            ]
            return {"domain": "rational", "precision": self.precision, "coefficients": coeffs}
        return {
            "domain": "residue",
            "modulus": self.modulus,
            "precision": self.precision,
            "coefficients": list(self.coeffs),
        }

    @classmethod
    def from_json(cls, data: dict) -> "QSeries":
        if data["domain"] == "rational":
            return cls([Fraction(c) for c in data["coefficients"]])
        return cls(data["coefficients"], data["modulus"])

    def __repr__(self):
        shown = ", ".join(str(c) for c in self.coeffs[:6])
        tail = ", ..." if self.precision > 6 else ""
        dom = f" mod {self.modulus}" if self.modulus else ""
        return f"QSeries([{shown}{tail}]; prec {self.precision}{dom})"


def _reduce_scalar(c, modulus: int) -> int:
    c = Fraction(c)
    if c.denominator % prime_power_split(modulus)[0] == 0:
        raise PreconditionError(
            f"denominator {c.denominator} is not a unit mod {modulus}"
        )
    return c.numerator * pow(c.denominator, -1, modulus) % modulus


def verschiebung(f: QSeries, ell: int) -> QSeries:
    """The operator sending f(q) to f(q^ell) on q-expansions.

    Coefficient i*ell of the output is coefficient i of the input, all
    others vanish.  Output precision equals input precision, so only input
    coefficients below precision/ell are consumed; callers wanting full
    depth must request ell times the precision upstream.
    """
    return f.verschiebung(ell)


# Bernoulli memo: append-only list under a writer lock; concurrent readers
# are safe because list growth never mutates existing entries.
_BERN: list[Fraction] = [Fraction(1)]
_BERN_LOCK = threading.Lock()


def bernoulli(t: int) -> Fraction:
    """The t-th Bernoulli number, with B_2 = 1/6 and B_4 = -1/30.

    Sign convention: the one that makes
    E_t(q) = 1 - (2t/B_t) sum sigma_{t-1}(i) q^i hold on the nose (the
    other circulating convention flips B_1 only, which never enters here).
    """
    if t < 0:
        raise PreconditionError("negative Bernoulli index")
    if t >= len(_BERN):
        with _BERN_LOCK:
            while len(_BERN) <= t:
                m = len(_BERN)
                # sum_k C(m+1, k) B_k = 0 for m >= 1
                acc = Fraction(0)
                for k in range(m):
                    acc += comb(m + 1, k) * _BERN[k]
                _BERN.append(-acc / (m + 1))
    return _BERN[t]


def sigma(k: int, i: int) -> int:
    """Divisor power sum: sum of d^k over divisors d of i."""
    if i < 1:
        raise PreconditionError("sigma requires i >= 1")
    total = 0
    d = 1
    while d * d <= i:
        if i % d == 0:
            total += d**k
            e = i // d
            if e != d:
                total += e**k
        d += 1
    return total


# q-expansion memo keyed by series name; stores the best precision seen.
_SERIES_MEMO: dict[str, QSeries] = {}
_SERIES_LOCK = threading.Lock()


def _memo_series(name: str, prec: int, builder) -> QSeries:
    got = _SERIES_MEMO.get(name)
    if got is not None and got.precision >= prec:
        return got.truncate(prec)
    fresh = builder(prec)
    with _SERIES_LOCK:
        have = _SERIES_MEMO.get(name)
        if have is None or have.precision < fresh.precision:
            _SERIES_MEMO[name] = fresh
    return fresh


def eisenstein(t: int, prec: int, cache=None) -> QSeries:
    """Rational q-expansion of the weight-t level-1 Eisenstein series."""
    if t % 2 or t < 4:
        raise PreconditionError("Eisenstein weight must be even and >= 4")
    if prec < 1:
        raise PreconditionError("precision must be >= 1")
    if cache is not None:
        hit = cache.get(f"eisenstein-{t}", prec)
        if hit is not None:
            return hit

    def build(n):
        c = Fraction(-2 * t, 1) / bernoulli(t)
        coeffs = [Fraction(1)] + [c * sigma(t - 1, i) for i in range(1, n)]
        return QSeries(coeffs)

    result = _memo_series(f"E{t}", prec, build)
    if cache is not None:
        cache.put(f"eisenstein-{t}", result)
    return result


def eisenstein2_level(ell: int, prec: int) -> QSeries:
    """The weight-2 form l*E2(q^l) - E2(q) on the l-congruence group:
    (l - 1) + 24 * sum (sigma_1(n) - l*sigma_1(n/l)) q^n, always integral."""
    if prec < 1:
        raise PreconditionError("precision must be >= 1")

    def build(n):
        coeffs = [ell - 1]
        for i in range(1, n):
            s = sigma(1, i) - (ell * sigma(1, i // ell) if i % ell == 0 else 0)
            coeffs.append(24 * s)
        return QSeries(coeffs)

    return _memo_series(f"E2[{ell}]", prec, build)


def delta_qexp(prec: int) -> QSeries:
    """q-expansion of the weight-12 cusp form (E4^3 - E6^2)/1728."""

    def build(n):
        e4 = eisenstein(4, n)
        e6 = eisenstein(6, n)
        diff = e4.power(3) - e6.power(2)
        return diff.scale(Fraction(1, 1728))

    return _memo_series("Delta", prec, build)


@dataclass(frozen=True)
class WeightedForm:
    """A level-1 form of the stated weight divided by the pole_order-th
    power of the discriminant form.

    ``series`` stores the numerator expansion, a holomorphic form of
    weight ``weight + 12*pole_order``; the value of the object is
    series / Delta^pole_order.  Weights may be negative when the pole
    order is positive.
    """

    weight: int
    pole_order: int
    series: QSeries

    def __post_init__(self):
        if self.pole_order < 0:
            raise PreconditionError("pole order must be >= 0")

    def with_pole_order(self, m: int) -> "WeightedForm":
        """Re-express with a larger pole order by multiplying the numerator
        by Delta^(m - pole_order)."""
        if m < self.pole_order:
            raise PreconditionError("cannot lower pole order here")
        if m == self.pole_order:
            return self
        shift = delta_qexp(self.series.precision)
        if self.series.modulus is not None:
            shift = shift.reduce_mod(self.series.modulus)
        num = self.series
        for _ in range(m - self.pole_order):
            num = num * shift
        return WeightedForm(self.weight, m, num)

    def reduce_mod(self, modulus: int) -> "WeightedForm":
        return WeightedForm(self.weight, self.pole_order, self.series.reduce_mod(modulus))


@dataclass(frozen=True)
class MonomialBasis:
    """Monomials in the weight-4 and weight-6 Eisenstein series and powers
    of the discriminant form spanning a given weight, with poles capped.

    Spanning set, not a basis: relations such as the weight-12 one are
    retained and handled by the linear algebra downstream.
    """

    weight: int
    pole_cap: int
    triples: tuple  # (a, b, c) with 4a + 6b + 12c = weight, c >= -pole_cap
    forms: tuple  # WeightedForm numerators at pole order pole_cap


def monomial_numerator(a: int, b: int, c_shifted: int, prec: int) -> QSeries:
    """Integral expansion of E4^a * E6^b * Delta^c_shifted (c_shifted >= 0)."""
    if min(a, b, c_shifted) < 0:
        raise PreconditionError("exponents must be >= 0 after pole clearing")

    def build(n):
        out = QSeries([1] + [0] * (n - 1))
        if a:
            out = out * eisenstein(4, n).power(a)
        if b:
            out = out * eisenstein(6, n).power(b)
        if c_shifted:
            out = out * delta_qexp(n).power(c_shifted)
        return out

    return _memo_series(f"E4^{a}E6^{b}D^{c_shifted}", prec, build)


def weight_triples(t: int, m_max: int):
    """All (a, b, c) with 4a + 6b + 12c = t, a, b >= 0, c >= -m_max."""
    triples = []
    c = -m_max
    while 12 * c <= t:
        rem = t - 12 * c
        for b in range(rem // 6 + 1):
            rest = rem - 6 * b
            if rest % 4 == 0:
                triples.append((rest // 4, b, c))
        c += 1
    triples.sort()
    return tuple(triples)


def basis_of_weight(t: int, m_max: int, prec: int) -> MonomialBasis:
    """Spanning monomials of weight t with poles up to Delta^-m_max,
    evaluated as numerator expansions at pole order m_max."""
    if prec < 1:
        raise PreconditionError("precision must be >= 1")
    if m_max < 0:
        raise PreconditionError("pole cap must be >= 0")
    triples = weight_triples(t, m_max)
    forms = tuple(
        WeightedForm(t, m_max, monomial_numerator(a, b, c + m_max, prec))
        for (a, b, c) in triples
    )
    return MonomialBasis(t, m_max, triples, forms)

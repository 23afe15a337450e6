"""Exact arithmetic substrate: p-adic valuations, the Kronecker symbol,
and linear algebra over Z/p^k in Howell normal form."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd


class PreconditionError(ValueError):
    """A mathematical precondition of an operation is violated."""


class BudgetExceeded(RuntimeError):
    """An enumeration or search budget was exhausted."""


class PrecisionExhausted(BudgetExceeded):
    """A computation needs more working precision than was allocated."""


class _Infinity:
    """Tagged sentinel for the valuation of zero.

    Compares strictly above every integer; never a numeric overflow value.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "+oo"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("chromarith-valuation-infinity")

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __add__(self, other):
        return self

    __radd__ = __add__


INFINITY = _Infinity()


def _int_val(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is INFINITY, handle separately")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def val_p(x, p: int):
    """p-adic valuation of a rational; INFINITY for x = 0."""
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    x = Fraction(x)
    if x == 0:
        return INFINITY
    return _int_val(x.numerator, p) - _int_val(x.denominator, p)


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; the fixed base set is exact for n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n == q:
            return True
        if n % q == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _kronecker_int(D: int, n: int) -> int:
    if n == 0:
        return 1 if D in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    # n now odd > 1: Jacobi symbol via quadratic reciprocity.
    D %= n
    while D != 0:
        while D % 2 == 0:
            D //= 2
            if n % 8 in (3, 5):
                result = -result
        D, n = n, D
        if D % 4 == 3 and n % 4 == 3:
            result = -result
        D %= n
    return result if n == 1 else 0


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D|n), completely multiplicative in n.

    For D a fundamental discriminant and an odd prime l, the value is +1
    exactly when l splits in the quadratic field of discriminant D.
    """
    return _kronecker_int(int(D), int(n))


def prime_power_split(q: int) -> tuple[int, int]:
    """Write q = p^k for p prime, or raise."""
    if q < 2:
        raise PreconditionError(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            k = 0
            m = q
            while m % p == 0:
                m //= p
                k += 1
            if m != 1 or not is_prime(p):
                raise PreconditionError(f"{q} is not a prime power")
            return p, k
    raise PreconditionError(f"{q} is not a prime power")


@dataclass(frozen=True)
class ResidueElt:
    """An element of Z/p^k, stored as its canonical representative."""

    modulus: int
    value: int

    def __post_init__(self):
        prime_power_split(self.modulus)
        object.__setattr__(self, "value", self.value % self.modulus)

    def _check(self, other):
        if self.modulus != other.modulus:
            raise PreconditionError("mismatched moduli")

    def __add__(self, other):
        self._check(other)
        return ResidueElt(self.modulus, self.value + other.value)

    def __sub__(self, other):
        self._check(other)
        return ResidueElt(self.modulus, self.value - other.value)

    def __mul__(self, other):
        self._check(other)
        return ResidueElt(self.modulus, self.value * other.value)

    def __neg__(self):
        return ResidueElt(self.modulus, -self.value)

    def is_unit(self) -> bool:
        return gcd(self.value, self.modulus) == 1

    def inverse(self) -> "ResidueElt":
        if not self.is_unit():
            raise PreconditionError(f"{self.value} is not a unit mod {self.modulus}")
        return ResidueElt(self.modulus, pow(self.value, -1, self.modulus))


class ResidueMatrix:
    """Dense matrix over Z/p^k. Rows are lists of canonical representatives."""

    def __init__(self, modulus: int, rows):
        self.p, self.k = prime_power_split(modulus)
        self.modulus = modulus
        self.rows = [[x % modulus for x in row] for row in rows]
        if self.rows:
            ncols = len(self.rows[0])
            if any(len(r) != ncols for r in self.rows):
                raise PreconditionError("ragged rows")

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0]) if self.rows else 0

    @classmethod
    def identity(cls, modulus: int, n: int) -> "ResidueMatrix":
        return cls(modulus, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def entry(self, i: int, j: int) -> ResidueElt:
        return ResidueElt(self.modulus, self.rows[i][j])

    def apply(self, vec):
        """Matrix times column vector."""
        N = self.modulus
        return [sum(a * x for a, x in zip(row, vec)) % N for row in self.rows]

    def __eq__(self, other):
        return (
            isinstance(other, ResidueMatrix)
            and self.modulus == other.modulus
            and self.rows == other.rows
        )

    def __repr__(self):
        return f"ResidueMatrix(mod {self.modulus}, {self.rows})"


def _row_val(row, p: int, k: int) -> int:
    """Minimum p-valuation over entries; k for the zero row."""
    v = k
    for x in row:
        if x != 0:
            v = min(v, _int_val(x, p))
            if v == 0:
                break
    return v


def row_order(row, modulus: int) -> int:
    """Additive order of a vector over Z/p^k."""
    p, k = prime_power_split(modulus)
    return p ** (k - _row_val(row, p, k))


def _leading(row):
    for j, x in enumerate(row):
        if x != 0:
            return j
    return None


def _echelonize(rows, p: int, k: int, pivot_cols: int):
    """Row echelon over Z/p^k with pivots restricted to the first
    pivot_cols columns; pivots normalized to powers of p, entries above
    pivots reduced.  Returns (pivot rows, rows with zero pivot-part)."""
    N = p**k
    work = [list(r) for r in rows if any(x % N for x in r)]
    pivots = []  # (col, val, row)
    for col in range(pivot_cols):
        # pick the row with minimal valuation at this column
        best = None
        for r in work:
            x = r[col] % N
            if x:
                v = _int_val(x, p)
                if best is None or v < best[0]:
                    best = (v, r)
        if best is None:
            continue
        v, piv = best
        work.remove(piv)
        u = piv[col] // p**v
        uinv = pow(u, -1, N)
        piv = [x * uinv % N for x in piv]
        for r in work:
            x = r[col] % N
            if x:
                q = x // p**v
                for j in range(len(r)):
                    r[j] = (r[j] - q * piv[j]) % N
        pivots.append((col, v, piv))
        work = [r for r in work if any(x % N for x in r)]
    # reduce entries above pivots
    pivots.sort()
    for idx, (col, v, piv) in enumerate(pivots):
        for col2, v2, piv2 in pivots[idx + 1 :]:
            q = piv[col2] // p**v2
            if q:
                for j in range(len(piv)):
                    piv[j] = (piv[j] - q * piv2[j]) % N
    return pivots, work


def howell_form(matrix: ResidueMatrix) -> ResidueMatrix:
    """Howell normal form of the row module of the matrix.

    Canonical for the module: two generating sets of the same module over
    Z/p^k produce identical output.  Rows are echelon with pivots p^v and
    the span property holds (the extra p^{k-v} multiples are folded in).
    """
    p, k = prime_power_split(matrix.modulus)
    N = matrix.modulus
    ncols = matrix.ncols
    rows = [list(r) for r in matrix.rows]
    for _ in range(k * max(ncols, 1) + 2):
        pivots, _ = _echelonize(rows, p, k, ncols)
        rows = [piv for (_, _, piv) in pivots]
        extra = []
        for col, v, piv in pivots:
            if v > 0:
                cand = [x * p ** (k - v) % N for x in piv]
                if any(cand):
                    rem = reduce_against(cand, rows, N)
                    if any(rem):
                        extra.append(cand)
        if not extra:
            return ResidueMatrix(N, rows)
        rows = rows + extra
    raise AssertionError("Howell closure did not stabilize")


def reduce_against(vec, howell_rows, modulus: int):
    """Canonical coset representative of vec against rows in Howell form."""
    p, k = prime_power_split(modulus)
    v = [x % modulus for x in vec]
    for row in howell_rows:
        col = _leading(row)
        if col is None:
            continue
        pv = _int_val(row[col], p)
        q = v[col] // p**pv
        if q:
            for j in range(len(v)):
                v[j] = (v[j] - q * row[j]) % modulus
    return v


def in_span(vec, howell_rows, modulus: int) -> bool:
    return not any(reduce_against(vec, howell_rows, modulus))


def module_order(howell_rows, modulus: int) -> int:
    """Cardinality of the module generated by rows in Howell form."""
    total = 1
    for row in howell_rows:
        total *= row_order(row, modulus)
    return total


def howell_block_image(rows, modulus: int, block_cols: int):
    """Howell form of the module spanned by the first ``block_cols``
    columns, with trailing columns carried along as witnesses.

    Pivoting, normalization, and the span-property closure all happen in
    the block; rows whose block part vanishes (pure relations) are dropped.
    Returns the reduced rows (block canonical, witnesses attached).
    """
    p, k = prime_power_split(modulus)
    N = modulus
    work = [list(r) for r in rows if any(x % N for x in r[:block_cols])]
    for _ in range(k * max(block_cols, 1) + 2):
        pivots, _ = _echelonize(work, p, k, block_cols)
        work = [piv for (_, _, piv) in pivots]
        extra = []
        for col, v, piv in pivots:
            if v > 0:
                cand = [x * p ** (k - v) % N for x in piv]
                if any(cand[:block_cols]):
                    rem = reduce_against(cand, work, N)
                    if any(rem[:block_cols]):
                        extra.append(cand)
        if not extra:
            return work
        work = work + extra
    raise AssertionError("Howell closure did not stabilize")


def howell_kernel(matrix: ResidueMatrix) -> ResidueMatrix:
    """Generating set, in Howell form, of {v : M v = 0} over Z/p^k.

    The row module of [M^T | I] is {(Mv, v)}; by the span property of the
    Howell form, its rows with vanishing left block generate exactly the
    kernel.
    """
    N = matrix.modulus
    m, n = matrix.nrows, matrix.ncols
    aug = []
    for i in range(n):
        left = [matrix.rows[r][i] for r in range(m)]
        right = [1 if j == i else 0 for j in range(n)]
        aug.append(left + right)
    full = howell_form(ResidueMatrix(N, aug))
    kernel_rows = [row[m:] for row in full.rows if not any(row[:m])]
    result = howell_form(ResidueMatrix(N, kernel_rows or [[0] * n]))
    for row in result.rows:
        if any(matrix.apply(row)):
            raise AssertionError("kernel generator fails M v = 0")
    return result

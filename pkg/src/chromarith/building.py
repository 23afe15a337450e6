"""Lattice models of the affine buildings for the general linear, special
linear, unitary, and similitude groups over a local field: canonical
lattice forms, dual and preferred lattices, chambers, local enumeration,
vertex types, the similitude action parity rule, and the orbit skeleton of
the finite resolution."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iter_product

from .exact import BudgetExceeded, PreconditionError, PrecisionExhausted, is_prime
from .hermitian import hilbert_symbol


class LocalRing:
    """O / pi^prec for O the integers of Q_l or of a quadratic extension.

    Elements are ints mod l^k (no extension) or pairs (a, b) mod l^k
    standing for a + b*sqrt(d).  For the inert extension d is a unit
    non-residue and pi = l; for the ramified one v_l(d) = 1 after
    normalization and pi = sqrt(d).
    """

    def __init__(self, ell: int, ext: str = "none", d: int | None = None, k: int = 12):
        if not is_prime(ell):
            raise PreconditionError(f"{ell} is not prime")
        if k < 4:
            raise PreconditionError("working precision too small")
        self.ell = ell
        self.ext = ext
        self.k = k
        self.base_mod = ell**k
        if ext == "none":
            if d is not None:
                raise PreconditionError("no d for the trivial extension")
            self.d = None
            self.pi_prec = k
            self.residue_size = ell
        elif ext == "inert":
            if ell == 2:
                # the maximal order needs the half-integral basis, and the
                # preferred-lattice theory assumes odd residue characteristic
                raise PreconditionError("quadratic extensions need an odd prime")
            if d is None or d % ell == 0:
                raise PreconditionError("inert requires a unit d")
            if hilbert_is_square(d, ell):
                raise PreconditionError(f"{d} is a residue mod {ell}")
            self.d = d % self.base_mod
            self.pi_prec = k
            self.residue_size = ell * ell
        elif ext == "ramified":
            if ell == 2:
                raise PreconditionError("quadratic extensions need an odd prime")
            if d is None:
                raise PreconditionError("ramified requires d")
            v = 0
            dd = d
            while dd % ell == 0:
                dd //= ell
                v += 1
            if v % 2 == 0:
                raise PreconditionError("ramified requires odd valuation of d")
            if v > 1:
                d = d // ell ** (v - 1)  # strip square part
            self.d = d % self.base_mod
            self.pi_prec = 2 * k
            self.residue_size = ell
        else:
            raise PreconditionError(f"unknown extension kind {ext!r}")

    # -- element helpers ------------------------------------------------

    def zero(self):
        return 0 if self.ext == "none" else (0, 0)

    def one(self):
        return 1 if self.ext == "none" else (1, 0)

    def from_int(self, n: int):
        return n % self.base_mod if self.ext == "none" else (n % self.base_mod, 0)

    def is_zero(self, x) -> bool:
        return x == 0 if self.ext == "none" else x == (0, 0)

    def add(self, x, y):
        if self.ext == "none":
            return (x + y) % self.base_mod
        return ((x[0] + y[0]) % self.base_mod, (x[1] + y[1]) % self.base_mod)

    def neg(self, x):
        if self.ext == "none":
            return -x % self.base_mod
        return (-x[0] % self.base_mod, -x[1] % self.base_mod)

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        if self.ext == "none":
            return x * y % self.base_mod
        a, b = x
        c, e = y
        return ((a * c + b * e * self.d) % self.base_mod, (a * e + b * c) % self.base_mod)

    def conj(self, x):
        if self.ext == "none":
            return x
        return (x[0], -x[1] % self.base_mod)

    def pi(self):
        if self.ext == "ramified":
            return (0, 1)
        return self.from_int(self.ell)

    def _int_val(self, n: int) -> int:
        if n % self.base_mod == 0:
            return self.k
        v = 0
        n = n % self.base_mod
        while n % self.ell == 0:
            n //= self.ell
            v += 1
        return v

    def val(self, x) -> int:
        """pi-adic valuation, capped at pi_prec for zero."""
        if self.ext == "none":
            return self._int_val(x)
        a, b = x
        if self.ext == "inert":
            return min(self._int_val(a), self._int_val(b))
        return min(2 * self._int_val(a), 2 * self._int_val(b) + 1)

    def unit_inverse(self, x):
        """Inverse of a valuation-zero element."""
        if self.val(x) != 0:
            raise PreconditionError("not a unit")
        if self.ext == "none":
            return pow(x, -1, self.base_mod)
        a, b = x
        norm = (a * a - self.d * b * b) % self.base_mod
        ninv = pow(norm, -1, self.base_mod)
        return (a * ninv % self.base_mod, -b * ninv % self.base_mod)

    def mul_pi_power(self, x, s: int):
        """x * pi^s for s >= 0."""
        for _ in range(s):
            x = self.mul(x, self.pi())
        return x

    def divide_exact(self, x, y):
        """x / y when val(x) >= val(y); the top val(y) digits of the result
        are garbage, tracked by callers through effective precision."""
        vy = self.val(y)
        if self.val(x) < vy:
            raise PreconditionError("inexact division")
        if vy == 0:
            return self.mul(x, self.unit_inverse(y))
        # strip pi^vy from both
        return self.mul(self._shift_down(x, vy), self.unit_inverse(self._shift_down(y, vy)))

    def _shift_down(self, x, s: int):
        """x / pi^s assuming pi^s | x; loses s digits of precision."""
        if self.ext == "none":
            return (x % self.base_mod) // self.ell**s
        a, b = x
        if self.ext == "inert":
            return ((a % self.base_mod) // self.ell**s, (b % self.base_mod) // self.ell**s)
        # ramified: pi = sqrt(d); pi^2 = d = l * unit
        full, half = divmod(s, 2)
        a = (a % self.base_mod) // self.ell**full
        b = (b % self.base_mod) // self.ell**full
        if half:
            # divide once more by pi: (a + b pi)/pi = b + (a/d) pi
            unit = self.d // self.ell % self.base_mod
            uinv = pow(unit, -1, self.base_mod)
            return (b, a // self.ell * uinv % self.base_mod)
        return (a, b)

    def norm(self, x):
        """x * conj(x) as a base-ring integer (second coordinate zero)."""
        y = self.mul(x, self.conj(x))
        if self.ext == "none":
            return y
        assert y[1] == 0 or y[1] % self.base_mod == 0
        return y[0]

    def residue_repr(self, x):
        """Canonical representative of x mod pi."""
        if self.ext == "none":
            return x % self.ell
        if self.ext == "inert":
            return (x[0] % self.ell, x[1] % self.ell)
        return x[0] % self.ell

    def reduce_mod_pi_power(self, x, a: int):
        """Canonical representative of x modulo pi^a."""
        if a <= 0:
            return self.zero()
        if self.ext == "none":
            return x % self.ell ** min(a, self.k)
        if self.ext == "inert":
            m = self.ell ** min(a, self.k)
            return (x[0] % m, x[1] % m)
        s, odd = divmod(a, 2)
        m0 = self.ell ** min(s + odd, self.k)
        m1 = self.ell ** min(s, self.k)
        return (x[0] % m0, x[1] % m1 if m1 > 1 else 0)

    def residue_elements(self):
        """Representatives of O/pi."""
        if self.ext == "inert":
            return [(a, b) for a in range(self.ell) for b in range(self.ell)]
        if self.ext == "none":
            return list(range(self.ell))
        return [(a, 0) for a in range(self.ell)]

    def __repr__(self):
        if self.ext == "none":
            return f"Z_{self.ell} (prec {self.k})"
        return f"Z_{self.ell}[sqrt({self.d})] {self.ext} (prec {self.k})"


def hilbert_is_square(d: int, ell: int) -> bool:
    """Whether the unit d is a square mod the odd prime l."""
    return pow(d % ell, (ell - 1) // 2, ell) == 1


# -- matrices over the ring ---------------------------------------------


def mat_mul(ring: LocalRing, A, B):
    n, m, r = len(A), len(B), len(B[0])
    return [
        [
            _dot(ring, [A[i][t] for t in range(m)], [B[t][j] for t in range(m)])
            for j in range(r)
        ]
        for i in range(n)
    ]


def _dot(ring, xs, ys):
    acc = ring.zero()
    for x, y in zip(xs, ys):
        acc = ring.add(acc, ring.mul(x, y))
    return acc


def mat_conj_transpose(ring: LocalRing, A):
    return [[ring.conj(A[j][i]) for j in range(len(A))] for i in range(len(A[0]))]


def mat_det(ring: LocalRing, A):
    n = len(A)
    if n == 1:
        return A[0][0]
    acc = ring.zero()
    sign = 1
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in A[1:]]
        term = ring.mul(A[0][j], mat_det(ring, minor))
        acc = ring.add(acc, term if sign > 0 else ring.neg(term))
        sign = -sign
    return acc


def mat_adjugate(ring: LocalRing, A):
    n = len(A)
    if n == 1:
        return [[ring.one()]]
    adj = [[ring.zero()] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [A[r][c] for c in range(n) if c != j] for r in range(n) if r != i
            ]
            cof = mat_det(ring, minor)
            if (i + j) % 2:
                cof = ring.neg(cof)
            adj[j][i] = cof
    return adj


# -- lattices ------------------------------------------------------------


@dataclass(frozen=True)
class LocalLattice:
    """pi^scale times the column span of ``basis`` (an n x n matrix over
    the ring), carried at an effective pi-adic precision."""

    ring: LocalRing
    basis: tuple  # rows of tuples, columns are generators
    scale: int = 0
    eff_prec: int | None = None

    def __post_init__(self):
        n = len(self.basis)
        if any(len(row) != n for row in self.basis):
            raise PreconditionError("basis must be square")
        if self.eff_prec is None:
            object.__setattr__(self, "eff_prec", self.ring.pi_prec)

    @property
    def n(self):
        return len(self.basis)

    @classmethod
    def standard(cls, ring: LocalRing, n: int) -> "LocalLattice":
        basis = tuple(
            tuple(ring.one() if i == j else ring.zero() for j in range(n))
            for i in range(n)
        )
        return cls(ring, basis)

    @classmethod
    def from_columns(cls, ring: LocalRing, cols, scale: int = 0) -> "LocalLattice":
        n = len(cols[0])
        basis = tuple(tuple(cols[j][i] for j in range(len(cols))) for i in range(n))
        return cls(ring, basis, scale)

    def columns(self):
        return [
            [self.basis[i][j] for i in range(self.n)] for j in range(self.n)
        ]

    def det_val(self) -> int:
        v = self.ring.val(mat_det(self.ring, [list(r) for r in self.basis]))
        if v >= self.eff_prec:
            raise PrecisionExhausted("determinant valuation exceeds precision")
        return v

    def mul_pi(self, s: int) -> "LocalLattice":
        return LocalLattice(self.ring, self.basis, self.scale + s, self.eff_prec)

    def hnf(self) -> "LocalLattice":
        """Canonical form: content extracted into the scale, then column
        echelon with pivots pi^a on the diagonal (lower triangular) and
        entries left of each pivot reduced mod the pivot."""
        ring = self.ring
        cols = self.columns()
        n = self.n
        content = min(
            (ring.val(x) for col in cols for x in col), default=0
        )
        if content >= self.eff_prec:
            raise PrecisionExhausted("zero basis at working precision")
        if content:
            cols = [[_shift(ring, x, content) for x in col] for col in cols]
        eff = self.eff_prec - content
        loss = 0
        for i in range(n):
            # choose the remaining column with minimal valuation in row i
            best = None
            for j in range(i, n):
                v = ring.val(cols[j][i])
                if best is None or v < best[0]:
                    best = (v, j)
            v, j = best
            if v >= eff - loss:
                raise PrecisionExhausted("dependent columns at working precision")
            cols[i], cols[j] = cols[j], cols[i]
            # normalize pivot column so the pivot is exactly pi^v
            unit = _shift(ring, cols[i][i], v)
            uinv = ring.unit_inverse(unit)
            cols[i] = [ring.mul(x, uinv) for x in cols[i]]
            for j2 in range(i + 1, n):
                x = cols[j2][i]
                if ring.is_zero(x):
                    continue
                q = ring.mul(_shift(ring, x, v), ring.unit_inverse(_shift(ring, cols[i][i], v)))
                cols[j2] = [
                    ring.sub(a, ring.mul(q, b)) for a, b in zip(cols[j2], cols[i])
                ]
                cols[j2][i] = ring.zero()
            loss += v
        # reduce the entry in row i of each earlier column to its canonical
        # residue mod the pivot pi^(a_i)
        for i in range(n):
            piv = cols[i][i]
            piv_val = ring.val(piv)
            for j in range(i):
                x = cols[j][i]
                r = ring.reduce_mod_pi_power(x, piv_val)
                diff = ring.sub(x, r)
                if ring.is_zero(diff):
                    continue
                q = ring.mul(
                    _shift(ring, diff, piv_val),
                    ring.unit_inverse(_shift(ring, piv, piv_val)),
                )
                cols[j] = [
                    ring.sub(a, ring.mul(q, b)) for a, b in zip(cols[j], cols[i])
                ]
        remaining = eff - loss
        basis = tuple(
            tuple(ring.reduce_mod_pi_power(cols[j][i], remaining) for j in range(n))
            for i in range(n)
        )
        return LocalLattice(self.ring, basis, self.scale + content, remaining)


def _shift(ring: LocalRing, x, s: int):
    return ring._shift_down(x, s) if s else x


def hnf_normalize(L: LocalLattice) -> LocalLattice:
    return L.hnf()


def lattices_equal(L1: LocalLattice, L2: LocalLattice) -> bool:
    a, b = L1.hnf(), L2.hnf()
    if a.scale != b.scale or a.n != b.n:
        return False
    prec = min(a.eff_prec, b.eff_prec)
    return _basis_mod(a, prec) == _basis_mod(b, prec)


def _basis_mod(L: LocalLattice, prec: int):
    ring = L.ring
    if ring.ext == "none":
        m = ring.ell ** min(prec, ring.k)
        return tuple(tuple(x % m for x in row) for row in L.basis)
    m = ring.ell ** min((prec + 1) // 2 if ring.ext == "ramified" else prec, ring.k)
    return tuple(
        tuple((x[0] % m, x[1] % m) for x in row) for row in L.basis
    )


def lattice_contains(L: LocalLattice, M: LocalLattice) -> bool:
    """Whether M is a sublattice of L."""
    ring = L.ring
    a = L.hnf()
    b = M.hnf()
    shift = b.scale - a.scale
    target = a.basis
    cols = b.columns()
    if shift >= 0:
        cols = [[ring.mul_pi_power(x, shift) for x in col] for col in cols]
    else:
        target = tuple(
            tuple(ring.mul_pi_power(x, -shift) for x in row) for row in target
        )
    slack = a.det_val() + (-shift if shift < 0 else 0) * a.n + 1
    tol = min(a.eff_prec, b.eff_prec) - slack
    if tol <= 0:
        raise PrecisionExhausted("containment test beyond working precision")
    for col in cols:
        vec = list(col)
        ok = True
        for i in range(a.n):
            piv = target[i][i]
            pv = ring.val(piv)
            if ring.val(vec[i]) < pv:
                ok = False
                break
            q = ring.mul(
                _shift(ring, vec[i], pv), ring.unit_inverse(_shift(ring, piv, pv))
            )
            for r in range(a.n):
                vec[r] = ring.sub(vec[r], ring.mul(q, target[r][i]))
        if not ok or any(ring.val(v) < tol for v in vec):
            return False
    return True


def lattice_index_length(L: LocalLattice, M: LocalLattice) -> int:
    """Length of L/M in residue-field steps, for M <= L."""
    a, b = L.hnf(), M.hnf()
    shift = b.scale - a.scale
    return b.det_val() - a.det_val() + shift * a.n


@dataclass(frozen=True)
class LatticeChain:
    """Strictly increasing lattices with the top contained in pi^-1 times
    the bottom."""

    lattices: tuple

    def __post_init__(self):
        ls = self.lattices
        if not ls:
            raise PreconditionError("empty chain")
        for a, b in zip(ls, ls[1:]):
            if not (lattice_contains(b, a) and not lattices_equal(a, b)):
                raise PreconditionError("chain must strictly increase")
        top, bottom = ls[-1], ls[0]
        if not lattice_contains(bottom.mul_pi(-1), top):
            raise PreconditionError("top must lie in pi^-1 times the bottom")

    def __len__(self):
        return len(self.lattices)


def chamber_from_basis_GL(ring: LocalRing, vectors) -> LatticeChain:
    """The maximal simplex attached to a basis: the i-th lattice is spanned
    by pi^-1 times the first i vectors and the remaining ones, so the
    chain has n + 1 lattices ending at pi^-1 times the first."""
    n = len(vectors)
    if any(len(v) != n for v in vectors):
        raise PreconditionError("need n vectors of length n")
    test = LocalLattice.from_columns(ring, vectors)
    test.det_val()  # raises on dependent vectors
    chain = []
    for i in range(n + 1):
        # pi^-1 (v_1 .. v_i, pi v_{i+1} .. pi v_n)
        cols = [
            list(v) if j < i else [ring.mul(x, ring.pi()) for x in v]
            for j, v in enumerate(vectors)
        ]
        chain.append(LocalLattice.from_columns(ring, cols, scale=-1).hnf())
    return LatticeChain(tuple(chain))


def sublattices_of_index(L: LocalLattice, length: int, budget: int = 4000):
    """All sublattices M <= L with L/M of the given residue-field length,
    in canonical form.  Enumerates the lower-triangular normal forms with
    pivot valuations summing to the length."""
    ring = L.ring
    n = L.n
    if length < 0:
        raise PreconditionError("length must be >= 0")
    base = L.hnf()
    results = []
    for shape in _compositions(length, n):
        digit_ranges = []
        for i in range(n):
            row_digits = []
            for j in range(i):
                row_digits.append(shape[i])
            digit_ranges.append(row_digits)
        # entries H[i][j], j < i run over representatives mod pi^shape[i]
        slots = [(i, j) for i in range(n) for j in range(i)]
        reps_per_slot = [
            _pi_power_representatives(ring, shape[i]) for (i, j) in slots
        ]
        total = 1
        for reps in reps_per_slot:
            total *= len(reps)
            if total > budget:
                raise BudgetExceeded("sublattice enumeration budget exceeded")
        for combo in iter_product(*reps_per_slot):
            H = [[ring.zero()] * n for _ in range(n)]
            for i in range(n):
                H[i][i] = ring.mul_pi_power(ring.one(), shape[i])
            for (slot, value) in zip(slots, combo):
                i, j = slot
                H[slot[0]][slot[1]] = value
            cols_H = [[H[i][j] for i in range(n)] for j in range(n)]
            base_cols = base.columns()
            new_cols = []
            for col_idx in range(n):
                acc = [ring.zero()] * n
                for t in range(n):
                    c = cols_H[col_idx][t]
                    if not ring.is_zero(c):
                        for r in range(n):
                            acc[r] = ring.add(acc[r], ring.mul(c, base_cols[t][r]))
                new_cols.append(acc)
            results.append(
                LocalLattice.from_columns(ring, new_cols, base.scale).hnf()
            )
    # canonical forms are unique per lattice; guard against duplicates
    seen = set()
    unique = []
    for M in results:
        key = (M.scale, _basis_mod(M, min(M.eff_prec, ring.pi_prec // 2)))
        if key not in seen:
            seen.add(key)
            unique.append(M)
    if len(unique) != len(results):
        raise AssertionError("duplicate sublattices in normal-form enumeration")
    return unique


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _pi_power_representatives(ring: LocalRing, a: int):
    """Representatives of O / pi^a."""
    if a == 0:
        return [ring.zero()]
    if ring.ext == "none":
        return [x % ring.base_mod for x in range(ring.ell**a)]
    if ring.ext == "inert":
        m = ring.ell**a
        return [(x, y) for x in range(m) for y in range(m)]
    s, odd = divmod(a, 2)
    m0 = ring.ell ** (s + odd)
    m1 = ring.ell**s
    return [(x, y) for x in range(m0) for y in range(max(m1, 1))]


# -- hermitian spaces -----------------------------------------------------


@dataclass(frozen=True)
class HermitianSpace:
    """A nondegenerate conjugate-symmetric form on ring^n, with its Witt
    index and the dimension of the anisotropic kernel in the standard
    coordinates (hyperbolic block first, anisotropic tail last)."""

    ring: LocalRing
    n: int
    gram: tuple
    witt_index: int
    aniso_dim: int

    def pairing(self, v, w):
        """(v, w), linear in the first argument."""
        ring = self.ring
        acc = ring.zero()
        for i in range(self.n):
            if ring.is_zero(v[i]):
                continue
            for j in range(self.n):
                acc = ring.add(
                    acc, ring.mul(ring.mul(v[i], self.gram[i][j]), ring.conj(w[j]))
                )
        return acc


def non_norm_unit(ring: LocalRing) -> int:
    """A rational unit that is not a local norm from the extension."""
    if ring.ext == "none":
        raise PreconditionError("norms need a quadratic extension")
    for u in range(2, 50):
        if u % ring.ell == 0:
            continue
        if hilbert_symbol(u, ring.d if ring.ext != "ramified" else ring.d, ring.ell) == -1:
            return u
    raise AssertionError("no non-norm unit found in range")


def non_norm_scalar(ring: LocalRing) -> int:
    """A generator of the index-2 norm-class group of the extension."""
    if ring.ext == "inert":
        return ring.ell
    return non_norm_unit(ring)


def standard_hermitian_space(ring: LocalRing, n: int, principal_disc: bool = True) -> HermitianSpace:
    """The standard form from the classification table: an antidiagonal
    hyperbolic block plus, per rank parity and discriminant class, an
    anisotropic tail of dimension 0, 1, or 2."""
    if ring.ext not in ("inert", "ramified"):
        raise PreconditionError("unitary spaces need a quadratic extension")
    if n < 1:
        raise PreconditionError("rank must be positive")
    if n % 2 == 0 and principal_disc:
        r, tail = n // 2, []
    elif n % 2 == 0:
        a = non_norm_scalar(ring)
        r, tail = (n - 2) // 2, [1, -a]
    elif principal_disc:
        r, tail = (n - 1) // 2, [1]
    else:
        a = non_norm_scalar(ring)
        r, tail = (n - 1) // 2, [a]
    gram = [[ring.zero()] * n for _ in range(n)]
    for i in range(2 * r):
        gram[i][2 * r - 1 - i] = ring.one()
    for t, entry in enumerate(tail):
        gram[2 * r + t][2 * r + t] = ring.from_int(entry)
    return HermitianSpace(ring, n, tuple(tuple(row) for row in gram), r, len(tail))


def witt_index(H: HermitianSpace) -> int:
    """Computed from first principles of local hermitian forms: rank >= 3
    is always isotropic, a rank-2 form is isotropic iff minus its
    determinant class is a norm, rank 1 never is."""
    ring = H.ring
    det = mat_det(ring, [list(r) for r in H.gram])
    assert ring.ext == "none" or det[1] % ring.base_mod == 0
    n = H.n
    if n % 2 == 1:
        return (n - 1) // 2
    sign = 1 if n // 2 % 2 == 0 else -1
    return n // 2 if _is_norm_element(ring, det, sign) else (n - 2) // 2


def _is_norm_element(ring: LocalRing, det, sign: int) -> bool:
    """Whether sign * det (a base-field element of the ring) is a norm."""
    v = ring.val(det)
    unit = _shift(ring, det, v)
    u0 = unit if ring.ext == "none" else unit[0]
    if ring.ext == "ramified":
        v_ell, rem = divmod(v, 2)
        if rem:
            raise AssertionError("hermitian determinant has odd valuation")
    else:
        v_ell = v
    rep = sign * u0 * ring.ell**v_ell
    return hilbert_symbol(rep, ring.d, ring.ell) == 1


def dual_lattice(L: LocalLattice, H: HermitianSpace) -> LocalLattice:
    """L^# = {w : (w, L) integral} = conj((B^T G)^{-1}) as a column span."""
    ring = L.ring
    B = [list(row) for row in L.basis]
    G = [list(row) for row in H.gram]
    M = mat_mul(ring, _transpose(B), G)
    det = mat_det(ring, M)
    t = ring.val(det)
    if t + 1 >= L.eff_prec:
        raise PrecisionExhausted("dual lattice beyond working precision")
    adj = mat_adjugate(ring, M)
    uinv = ring.unit_inverse(_shift(ring, det, t))
    entries = tuple(
        tuple(ring.conj(ring.mul(adj[i][j], uinv)) for j in range(L.n))
        for i in range(L.n)
    )
    # span(entries) = pi^t * span(B)^#, so the pi^-t goes into the scale
    return LocalLattice(ring, entries, -L.scale - t, L.eff_prec - t).hnf()


def _transpose(A):
    return [[A[j][i] for j in range(len(A))] for i in range(len(A[0]))]


def is_preferred(L: LocalLattice, H: HermitianSpace):
    """Whether L <= L^# <= pi^-1 L; returns (flag, vertex type), the type
    being the residue length of L^#/L."""
    dual = dual_lattice(L, H)
    if not (lattice_contains(dual, L) and lattice_contains(L.mul_pi(-1), dual)):
        return False, None
    return True, lattice_index_length(dual, L)


def anisotropic_kernel_lattice(H: HermitianSpace) -> LocalLattice:
    """The unique preferred lattice of the anisotropic tail coordinates:
    for the standard table forms it is the standard lattice (ultrametric
    exactness of anisotropic norms forces integrality)."""
    if H.aniso_dim == 0:
        raise PreconditionError("no anisotropic part")
    if H.aniso_dim != H.n:
        raise PreconditionError("pass the anisotropic tail as its own space")
    return LocalLattice.standard(H.ring, H.n)


def chamber_from_hyperbolic_basis_U(vectors, H: HermitianSpace) -> LatticeChain:
    """The chamber of the unitary building attached to a normalized
    hyperbolic basis: r + 1 preferred lattices, where lattice i is spanned
    by pi times the first r - i hyperbolic vectors, the remaining
    hyperbolic vectors, and the anisotropic kernel."""
    ring = H.ring
    r = H.witt_index
    if len(vectors) != 2 * r:
        raise PreconditionError("need 2r hyperbolic vectors")
    for i, v in enumerate(vectors):
        for j, w in enumerate(vectors):
            expected = ring.one() if j == 2 * r - 1 - i else ring.zero()
            if H.pairing(v, w) != expected:
                raise PreconditionError("basis is not normalized hyperbolic")
        for t in range(2 * r, H.n):
            tail_vec = [ring.zero()] * H.n
            tail_vec[t] = ring.one()
            if not ring.is_zero(H.pairing(v, tail_vec)):
                raise PreconditionError("hyperbolic block must be orthogonal to the tail")
    chain = []
    for i in range(r + 1):
        cols = []
        for idx, v in enumerate(vectors):
            if idx < r - i:
                cols.append([ring.mul(x, ring.pi()) for x in v])
            else:
                cols.append(list(v))
        for t in range(2 * r, H.n):
            e = [ring.zero()] * H.n
            e[t] = ring.one()
            cols.append(e)
        L = LocalLattice.from_columns(ring, cols).hnf()
        flag, _ = is_preferred(L, H)
        if not flag:
            raise AssertionError("chamber lattice is not preferred")
        chain.append(L)
    return LatticeChain(tuple(chain))


def standard_chamber_U(H: HermitianSpace) -> LatticeChain:
    ring = H.ring
    r = H.witt_index
    vectors = []
    for i in range(2 * r):
        e = [ring.zero()] * H.n
        e[i] = ring.one()
        vectors.append(e)
    if r == 0:
        X = LocalLattice.standard(ring, H.n).hnf()
        flag, _ = is_preferred(X, H)
        if not flag:
            raise AssertionError("anisotropic kernel lattice is not preferred")
        return LatticeChain((X,))
    return chamber_from_hyperbolic_basis_U(vectors, H)


# -- the similitude action ------------------------------------------------


def similitude_norm_valuation(g, H: HermitianSpace) -> int:
    """Valuation of the similitude norm; raises when g is not a similitude."""
    ring = H.ring
    G = [list(r) for r in H.gram]
    lhs = mat_mul(ring, mat_conj_transpose(ring, g), mat_mul(ring, G, g))
    # lhs must equal nu * G for a base-field scalar nu
    nu = None
    for i in range(H.n):
        for j in range(H.n):
            if not ring.is_zero(G[i][j]):
                cand = ring.divide_exact(lhs[i][j], G[i][j])
                if nu is None:
                    nu = cand
    if nu is None:
        raise PreconditionError("degenerate form")
    check = [[ring.mul(nu, G[i][j]) for j in range(H.n)] for i in range(H.n)]
    tol = H.ring.pi_prec - ring.val(nu) - 2
    for i in range(H.n):
        for j in range(H.n):
            diff = ring.sub(check[i][j], lhs[i][j])
            if not ring.is_zero(diff) and ring.val(diff) < tol:
                raise PreconditionError("not a similitude of the form")
    return ring.val(nu)


def preferred_class_representative(L: LocalLattice, H: HermitianSpace, window: int = 6) -> LocalLattice:
    """The unique preferred lattice homothetic to L (there is at most one
    preferred representative per class)."""
    base = L.hnf()
    hits = []
    for s in range(-window, window + 1):
        cand = base.mul_pi(s)
        try:
            flag, _ = is_preferred(cand, H)
        except PrecisionExhausted:
            continue
        if flag:
            hits.append(cand)
    if not hits:
        raise PreconditionError("no preferred representative in the window")
    if len(hits) > 1:
        raise AssertionError("preferred representative is not unique")
    return hits[0]


def class_key(L: LocalLattice) -> tuple:
    """Scale-free canonical key of the homothety class of an HNF lattice
    with content extracted."""
    h = L.hnf()
    return _basis_mod(h, min(h.eff_prec, h.ring.pi_prec // 2))


def apply_matrix(L: LocalLattice, g) -> LocalLattice:
    ring = L.ring
    cols = [
        [_dot(ring, [g[r][t] for t in range(L.n)], col) for r in range(L.n)]
        for col in L.columns()
    ]
    return LocalLattice.from_columns(ring, cols, L.scale).hnf()


def gu_act(g, L: LocalLattice, H: HermitianSpace) -> LocalLattice:
    """The similitude action on preferred homothety classes: apply g, then
    pass to the dual when the similitude norm has odd valuation; the result
    is returned as the preferred representative."""
    flag, _ = is_preferred(L.hnf(), H)
    if not flag:
        raise PreconditionError("input must be a preferred lattice")
    k = similitude_norm_valuation(g, H)
    moved = apply_matrix(L, g)
    if k % 2:
        moved = dual_lattice(moved, H)
    return preferred_class_representative(moved, H)


# -- residue-field flag counting for the special linear building ----------


def _residue_vectors(ell: int, n: int):
    return list(iter_product(range(ell), repeat=n))


def _span_set(ell: int, vectors):
    """All F_ell combinations of the given vectors, as a frozenset."""
    space = {tuple([0] * len(vectors[0]))}
    for v in vectors:
        new = set()
        for c in range(ell):
            for w in space:
                new.add(tuple((a + c * b) % ell for a, b in zip(w, v)))
        space = new
    return frozenset(space)


def _subspaces_by_dim(ell: int, n: int):
    """All subspaces of F_ell^n grouped by dimension (desk scale)."""
    vectors = [v for v in _residue_vectors(ell, n) if any(v)]
    by_dim = {0: {frozenset({tuple([0] * n)})}, n: {_span_set(ell, [v for v in vectors])}}
    for dim in range(1, n):
        found = set()
        for combo in iter_product(vectors, repeat=dim):
            span = _span_set(ell, list(combo))
            if len(span) == ell**dim:
                found.add(span)
        by_dim[dim] = found
    return by_dim


def complete_flags(ell: int, n: int):
    """All complete flags of subspaces of F_ell^n."""
    by_dim = _subspaces_by_dim(ell, n)
    flags = [()]
    for dim in range(1, n):
        flags = [
            f + (V,)
            for f in flags
            for V in by_dim[dim]
            if not f or f[-1] < V
        ]
    return flags


def link_census_SL(ell: int, n: int) -> dict:
    """Radius-1 census of the special linear building at a vertex:
    chambers through the vertex are the complete flags in the residue
    space; panels through the vertex must lie in at least 3 chambers."""
    if not is_prime(ell):
        raise PreconditionError(f"{ell} is not prime")
    if n < 2 or ell**n > 260:
        raise BudgetExceeded("flag census budget: need n >= 2 and small residue space")
    flags = complete_flags(ell, n)
    chambers = len(flags)
    if n == 2:
        # chambers are edges; a panel is a vertex, lying in one chamber per
        # incident edge, so thickness equals the vertex valence
        panel_min = chambers
    else:
        panel_min = None
        for drop in range(1, n):
            counts = {}
            for f in flags:
                key = tuple(V for i, V in enumerate(f, start=1) if i != drop)
                counts[key] = counts.get(key, 0) + 1
            m = min(counts.values())
            panel_min = m if panel_min is None else min(panel_min, m)
    return {
        "chambers_through_vertex": chambers,
        "panel_min_chambers": panel_min,
        "thick": panel_min >= 3,
    }


def u_vertex_neighbors(L: LocalLattice, H: HermitianSpace, budget: int = 4000):
    """Preferred lattices M forming an edge with L: either L < M with
    M <= pi^-1 L, or M < L with L <= pi^-1 M; the radius-1 neighbors of
    [L] in the unitary building."""
    base = L.hnf()
    found = []
    seen = {class_key(base)}
    for big, small in ((base.mul_pi(-1).hnf(), base), (base, base.mul_pi(1).hnf())):
        total = lattice_index_length(big, small)
        for length in range(1, total):
            for M in sublattices_of_index(big, length, budget):
                if not lattice_contains(M, small):
                    continue
                try:
                    flag, t = is_preferred(M, H)
                except PrecisionExhausted:
                    continue
                if not flag:
                    continue
                key = class_key(M)
                if key not in seen:
                    seen.add(key)
                    found.append((M, t))
    return found


# -- the orbit skeleton of the finite resolution ---------------------------


@dataclass(frozen=True)
class SimplexOrbit:
    dim: int
    vertex_types: tuple
    representative: tuple  # lattices of the face, canonical forms
    stabilizer: str


def resolution_skeleton(H: HermitianSpace, s: int) -> dict:
    """Orbit representatives of s-simplices with stabilizer descriptions.

    Chamber transitivity pins every s-simplex to a face of the standard
    chamber; faces are separated by their vertex-type multisets, which are
    distinct along the chamber, so the orbit list is decided with no
    undecided pairs at this scale.  The top dimension has a single orbit.
    """
    r = H.witt_index
    if s > r:
        raise PreconditionError(f"no {s}-simplices: the building has dimension {r}")
    if s < 0:
        raise PreconditionError("dimension must be >= 0")
    chamber = standard_chamber_U(H)
    types = []
    for L in chamber.lattices:
        _, t = is_preferred(L, H)
        types.append(t)
    from itertools import combinations

    orbits = []
    seen_keys = set()
    for face in combinations(range(r + 1), s + 1):
        face_types = tuple(types[i] for i in face)
        key = tuple(sorted(face_types))
        if key in seen_keys:
            continue
        seen_keys.add(key)
        reps = tuple(chamber.lattices[i] for i in face)
        orbits.append(
            SimplexOrbit(
                s,
                face_types,
                reps,
                "joint stabilizer of the preferred classes of the face "
                f"(types {list(face_types)})",
            )
        )
    return {
        "dim": s,
        "witt_index": r,
        "building_dimension_U": r,
        "building_dimension_GU": r + 1,
        "orbits": orbits,
        "orbit_count": len(orbits),
        "undecided_pairs": [],
    }


def skeleton_to_json(H: HermitianSpace, s: int) -> dict:
    data = resolution_skeleton(H, s)
    return {
        "s": data["dim"],
        "witt_index": data["witt_index"],
        "building_dimension_U": data["building_dimension_U"],
        "building_dimension_GU": data["building_dimension_GU"],
        "orbit_count": data["orbit_count"],
        "orbits": [
            {
                "vertex_types": list(o.vertex_types),
                "stabilized_lattices": [lattice_label(L) for L in o.representative],
                "stabilizer": o.stabilizer,
            }
            for o in data["orbits"]
        ],
        "undecided_pairs": data["undecided_pairs"],
    }


def lattice_label(L: LocalLattice) -> str:
    h = L.hnf()
    if h.ring.ext == "none":
        entries = [[x for x in row] for row in h.basis]
    else:
        entries = [[list(x) for x in row] for row in h.basis]
    return f"pi^{h.scale} * {entries}"


def ball_dot_SL(ell: int, n: int) -> str:
    """DOT graph of the radius-1 ball of the special linear building at the
    standard vertex: neighbors are proper nonzero residue subspaces."""
    by_dim = _subspaces_by_dim(ell, n)
    lines = ["graph building_ball {", '  base [label="[O^n]"];']
    idx = 0
    for dim in range(1, n):
        for V in sorted(by_dim[dim], key=sorted):
            idx += 1
            lines.append(f'  v{idx} [label="dim {dim}"];')
            lines.append(f"  base -- v{idx};")
    lines.append("}")
    return "\n".join(lines)


def ball_dot_U(H: HermitianSpace, budget: int = 4000) -> str:
    """DOT graph of the radius-1 ball of the unitary building at the
    standard anisotropic-plus-hyperbolic vertex."""
    chamber = standard_chamber_U(H)
    base = chamber.lattices[-1]
    neighbors = u_vertex_neighbors(base, H, budget)
    lines = ["graph building_ball {", f'  base [label="type {is_preferred(base, H)[1]}"];']
    for i, (M, t) in enumerate(neighbors):
        lines.append(f'  v{i} [label="type {t}"];')
        lines.append(f"  base -- v{i};")
    lines.append("}")
    return "\n".join(lines)

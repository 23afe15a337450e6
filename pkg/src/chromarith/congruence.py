"""Finite-stage congruence groups of q-expansions: kernels of the
twisted-substitution conditions over Z/p^j on monomial spanning sets,
with and without quotients by lower-weight forms, plus the weight-rigidity
checker for congruent q-expansions."""

from __future__ import annotations

from dataclasses import dataclass, field

from .exact import (
    PreconditionError,
    ResidueMatrix,
    howell_block_image,
    howell_form,
    howell_kernel,
    in_span,
    is_prime,
    reduce_against,
    row_order,
    module_order,
)
from .modforms import (
    QSeries,
    WeightedForm,
    delta_qexp,
    eisenstein,
    eisenstein2_level,
    monomial_numerator,
    verschiebung,
    weight_triples,
)


def sturm_bound(t: int, ell: int, m_max: int) -> int:
    """Coefficients needed to certify vanishing at level ell for weight t
    with poles up to m_max: ceil((t + 12 m_max)(ell + 1)/12) + 1."""
    w = t + 12 * m_max
    return max((w * (ell + 1) + 11) // 12 + 1, 2)


def _internal_precision(t: int, ell: int, m_max: int) -> int:
    # zero tests run on pole-cleared series of weight t + 24*m_max
    w = t + 24 * m_max
    return max((w * (ell + 1) + 11) // 12 + 1, 2) + 2


@dataclass(frozen=True)
class CongruenceGroup:
    """Explicit generators of a finite congruence-group stage.

    Generators are numerator expansions mod p^j at the common pole order,
    paired with their additive orders and monomial coordinates; exponent is
    the maximal order.
    """

    weight: int
    modulus: int
    pole_order: int
    precision: int
    triples: tuple
    generators: tuple  # of (WeightedForm, order, coords)
    exponent: int
    group_order: int
    verdict: str = ""
    log: tuple = field(default=(), compare=False)

    def contains_series(self, series: QSeries) -> bool:
        rows = [list(g.series.coeffs) for (g, _, _) in self.generators]
        vec = list(series.reduce_mod(self.modulus).truncate(self.precision).coeffs)
        return in_span(vec, rows, self.modulus)

    def to_json(self) -> dict:
        return {
            "weight": self.weight,
            "modulus": self.modulus,
            "pole_order": self.pole_order,
            "precision": self.precision,
            "exponent": self.exponent,
            "group_order": self.group_order,
            "verdict": self.verdict,
            "generators": [
                {
                    "order": order,
                    "monomial_coordinates": [
                        {"monomial": list(tr), "coefficient": c}
                        for tr, c in zip(self.triples, coords)
                        if c
                    ],
                    "series": list(g.series.coeffs),
                }
                for (g, order, coords) in self.generators
            ],
        }


def _validate_primes(p: int, ell: int):
    if not is_prime(p) or p <= 3:
        raise PreconditionError("requires a prime p > 3")
    if not is_prime(ell) or ell == p:
        raise PreconditionError("requires a prime l distinct from p")


def _numerators(t: int, m_max: int, prec: int):
    triples = weight_triples(t, m_max)
    series = [
        monomial_numerator(a, b, c + m_max, prec) for (a, b, c) in triples
    ]
    return triples, series


def _condition_rows(series_list, modulus, prec):
    """Rows of the coefficient matrix: one column per series."""
    cols = [s.reduce_mod(modulus).coeffs for s in series_list]
    return [[col[i] for col in cols] for i in range(prec)]


def compute_A(p: int, ell: int, t: int, j: int, m_max: int = 0, prec: int | None = None) -> CongruenceGroup:
    """All classes in the mod-p^j span of the weight-t monomials killed by
    multiplication by (l^t - 1) and by the twisted-substitution comparison
    l^t f(q^l) = f(q), reported with generators and additive orders."""
    _validate_primes(p, ell)
    if j < 1:
        raise PreconditionError("j must be >= 1")
    bound = sturm_bound(t, ell, m_max)
    if prec is None:
        prec = bound
    if prec < bound:
        raise PreconditionError(
            f"precision {prec} below the determination bound {bound}"
        )
    P = max(prec, _internal_precision(t, ell, m_max))
    modulus = p**j
    triples, numerators = _numerators(t, m_max, P)
    if not triples:
        return CongruenceGroup(t, modulus, m_max, P, (), (), 1, 1, "empty-spanning-set")
    delta_m = delta_qexp(P).power(m_max)
    delta_ell_m = verschiebung(delta_qexp(P), ell).power(m_max)
    lt = _ell_power(ell, t, modulus)
    cond1 = [g.scale(lt - 1) for g in numerators]
    cond2 = [
        verschiebung(g, ell) * delta_m * lt - g * delta_ell_m for g in numerators
    ]
    rows = _condition_rows([c.reduce_mod(modulus) for c in cond1], modulus, P)
    rows += _condition_rows([c.reduce_mod(modulus) for c in cond2], modulus, P)
    kernel = howell_kernel(ResidueMatrix(modulus, rows))
    return _group_from_kernel(
        kernel.rows, numerators, triples, t, modulus, m_max, P
    )


def _ell_power(ell: int, t: int, modulus: int) -> int:
    if t >= 0:
        return pow(ell, t, modulus)
    return pow(pow(ell, -1, modulus), -t, modulus)


def _group_from_kernel(kernel_rows, numerators, triples, t, modulus, m_max, P, verdict=""):
    n = len(triples)
    pairs = []
    for v in kernel_rows:
        series = _combine(numerators, v, modulus, P)
        pairs.append(series + list(v))
    reduced = howell_block_image(pairs, modulus, P)
    gens = []
    for row in reduced:
        series = QSeries(row[:P], modulus)
        coords = tuple(row[P:])
        order = row_order(row[:P], modulus)
        gens.append((WeightedForm(t, m_max, series), order, coords))
    exponent = max((order for (_, order, _) in gens), default=1)
    group_order = module_order([list(g.series.coeffs) for (g, _, _) in gens], modulus)
    return CongruenceGroup(
        t, modulus, m_max, P, triples, tuple(gens), exponent, group_order, verdict
    )


def _combine(numerators, coeffs, modulus, P):
    out = [0] * P
    for c, g in zip(coeffs, numerators):
        if c:
            red = g.reduce_mod(modulus)
            for i in range(P):
                out[i] = (out[i] + c * red.coeffs[i]) % modulus
    return out


def _level_witness_rows(ell: int, weights, m_max: int, P: int, modulus: int):
    """Mod-p^k series spanning the cleared level-l witness space.

    Pole-cleared witnesses of weight W are spanned by A^e * u(q) and
    A^e * u(q^l) for A the weight-2 form l E2(q^l) - E2(q) and u running
    over the level-1 monomials; for l = 2 this presentation spans the
    whole graded ring of the congruence group, for other l it contains
    the old subspace (no completeness claim, mirrored by the verdict
    name)."""
    A = eisenstein2_level(ell, P).reduce_mod(modulus)
    a_powers = {0: QSeries([1] + [0] * (P - 1), modulus)}
    rows = []
    for W in weights:
        W_clear = W + 24 * m_max
        for e in range(W_clear // 2 + 1):
            rest = W_clear - 2 * e
            if e not in a_powers:
                a_powers[e] = a_powers[e - 1] * A
            ae = a_powers[e]
            for (a, b, c) in weight_triples(rest, 0):
                u = monomial_numerator(a, b, c, P).reduce_mod(modulus)
                rows.append(list((ae * u).coeffs))
                if rest:
                    rows.append(list((ae * verschiebung(u, ell)).coeffs))
    return rows


def compute_B(
    p: int,
    ell: int,
    t: int,
    j: int,
    k: int,
    m_max: int = 1,
    prec: int | None = None,
) -> CongruenceGroup:
    """The stage-(j, k) congruence group detecting the divided level-2
    family in internal weight t.

    The invariant of internal weight t at stage j corresponds to spans of
    forms of weight w = t + (p-1)j (the cleared numerator weight), taken
    modulo all forms of weight <= w - j in the same congruence class of
    weights, subject to: (l^w - 1) f lands in the lower span, and
    l^w f(q^l) - f(q) lands mod p^k in the level-l witness span of weight
    w - j.  Stages require j divisible by (p-1)p^(k-1); "witness-found"
    means a class of full order p^k survives the quotient.
    """
    _validate_primes(p, ell)
    if k < 1 or j < 1:
        raise PreconditionError("j and k must be >= 1")
    step = (p - 1) * p ** (k - 1)
    if j % step != 0:
        raise PreconditionError(
            f"stage requires j divisible by (p-1)p^(k-1) = {step}"
        )
    w_amb = t + (p - 1) * j
    bound = sturm_bound(w_amb, ell, m_max)
    if prec is None:
        prec = bound
    if prec < bound:
        raise PreconditionError(
            f"precision {prec} below the determination bound {bound}"
        )
    P = max(prec, _internal_precision(w_amb, ell, m_max))
    modulus = p**k

    num_weights = [w_amb - s * step for s in range(j // step)]
    low_weights = []
    w = w_amb - j
    while w >= -12 * m_max:
        low_weights.append(w)
        w -= step

    num_triples = []
    numerators = []
    for w in num_weights:
        for tr in weight_triples(w, m_max):
            num_triples.append((w, tr))
            a, b, c = tr
            numerators.append(monomial_numerator(a, b, c + m_max, P))
    if not numerators:
        return CongruenceGroup(
            t, modulus, m_max, P, (), (), 1, 1, "no-witness-in-old-subspace",
            ("empty spanning set",),
        )

    delta_m = delta_qexp(P).power(m_max)
    delta_ell_m = verschiebung(delta_qexp(P), ell).power(m_max)

    # lower-weight level-1 span (quotient denominators and the witnesses
    # for the scalar condition), cleared at the common pole order
    lower_rows = []
    for w in low_weights:
        for (a, b, c) in weight_triples(w, m_max):
            ser = monomial_numerator(a, b, c + m_max, P).reduce_mod(modulus)
            lower_rows.append(list(ser.coeffs))
    lower_howell = howell_form(ResidueMatrix(modulus, lower_rows or [[0] * P]))

    witness_rows = _level_witness_rows(ell, low_weights, m_max, P, modulus)
    witness_howell = howell_form(ResidueMatrix(modulus, witness_rows or [[0] * P]))

    cond1 = []
    cond2 = []
    for (w, _), g in zip(num_triples, numerators):
        lt = _ell_power(ell, w, modulus)
        cond1.append((g * (lt - 1)).reduce_mod(modulus))
        cond2.append(
            (verschiebung(g, ell) * delta_m * lt - g * delta_ell_m).reduce_mod(modulus)
        )

    nx = len(numerators)
    n1 = len(lower_howell.rows)
    n2 = len(witness_howell.rows)
    rows = []
    for i in range(P):
        rows.append(
            [c.coeffs[i] for c in cond1]
            + [r[i] for r in lower_howell.rows]
            + [0] * n2
        )
    for i in range(P):
        rows.append(
            [c.coeffs[i] for c in cond2]
            + [0] * n1
            + [r[i] for r in witness_howell.rows]
        )
    kernel = howell_kernel(ResidueMatrix(modulus, rows))
    x_rows = [v[:nx] for v in kernel.rows]

    solution = _group_from_kernel(
        x_rows, numerators, [tr for (_, tr) in num_triples], t, modulus, m_max, P
    )
    gens = []
    for (g, _, coords) in solution.generators:
        residue = reduce_against(list(g.series.coeffs), lower_howell.rows, modulus)
        if not any(residue):
            continue
        order = _coset_order(list(g.series.coeffs), lower_howell.rows, modulus, p, k)
        gens.append((WeightedForm(t, m_max, QSeries(residue, modulus)), order, coords))
    exponent = max((order for (_, order, _) in gens), default=1)
    joint = howell_form(
        ResidueMatrix(
            modulus,
            [list(g.series.coeffs) for (g, _, _) in solution.generators]
            + lower_howell.rows
            or [[0] * P],
        )
    )
    group_order = module_order(joint.rows, modulus) // module_order(
        lower_howell.rows, modulus
    )
    verdict = "witness-found" if exponent == modulus else "no-witness-in-old-subspace"
    return CongruenceGroup(
        t,
        modulus,
        m_max,
        P,
        tuple(num_triples),
        tuple(gens),
        exponent,
        group_order,
        verdict,
    )


def _coset_order(vec, lower_rows, modulus, p, k):
    for e in range(k + 1):
        scaled = [x * p**e % modulus for x in vec]
        if in_span(scaled, lower_rows, modulus):
            return p**e
    raise AssertionError("coset order must divide the modulus")


def serre_congruence_check(f1: WeightedForm, f2: WeightedForm, p: int, k: int) -> str:
    """Given two forms with congruent q-expansions mod p^k, verify the
    weight rigidity (weights congruent mod (p-1)p^(k-1)) and the explicit
    power-of-E_{p-1} comparison between them."""
    if not is_prime(p) or p <= 3:
        raise PreconditionError("requires a prime p > 3")
    if k < 1:
        raise PreconditionError("k must be >= 1")
    modulus = p**k
    m = max(f1.pole_order, f2.pole_order)
    g1 = f1.with_pole_order(m)
    g2 = f2.with_pole_order(m)
    prec = min(g1.series.precision, g2.series.precision)
    n1 = g1.series.truncate(prec).reduce_mod(modulus)
    n2 = g2.series.truncate(prec).reduce_mod(modulus)
    if n1 != n2:
        raise PreconditionError("inputs are not congruent mod p^k")
    dt = f2.weight - f1.weight
    if dt % ((p - 1) * p ** (k - 1)) != 0:
        return "weight-violation"
    lo, hi, dt = (n1, n2, dt) if dt >= 0 else (n2, n1, -dt)
    e = dt // (p - 1)
    factor = eisenstein(p - 1, prec).reduce_mod(modulus).power(e)
    if hi != lo * factor:
        return "congruence-violation"
    return "consistent"

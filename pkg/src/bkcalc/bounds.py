"""Closed-form and exact torsion-exponent bounds.

Everything here is integer/rational arithmetic around three quantities:
the colength threshold c(a, b) = min{c : p^c ∈ (u^a, E^b)}, the two
upper bounds for rho (the chain argument and the valuation-envelope
argument), and their combination d(e, j), from which the crystalline
exponent gap is assembled.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InsufficientPrecision
from .howell import SpanModule
from .ideals import CofiniteIdeal, FrobeniusConditionReport, check_frobenius_conditions
from .ring import RingParams, eisenstein_params


def frobenius_depth(p: int, e: int, j: int) -> int:
    """Smallest n >= 0 with e*j < p^n * (p-1)."""
    n = 0
    t = p - 1
    ej = e * j
    while ej >= t:
        n += 1
        t *= p
    return n


@dataclass(frozen=True)
class BoundInputs:
    """Bound parameters (p, e, j) and the derived depth n."""

    p: int
    e: int
    j: int

    @property
    def n(self) -> int:
        return frobenius_depth(self.p, self.e, self.j)

    @property
    def sigma_cap(self) -> int:
        """Ceiling for sigma: floor(e*j / (p-1))."""
        return (self.e * self.j) // (self.p - 1)


def p_power_threshold_estimate(a: int, b: int, e: int) -> int:
    """Upper bound ceil(a/e) + b - 1 for the threshold (0 when b = 0)."""
    if b == 0:
        return 0
    return -(-a // e) + b - 1


def p_power_threshold_exact(
    a: int, b: int, params: RingParams | None = None, *, p: int | None = None, e: int | None = None
) -> int:
    """Least c with p^c ∈ (u^a, E^b), by exact membership.

    Works in the rank-e*b free Z_p-module S/(E^b) (E^b has unit leading
    coefficient, so u-powers reduce by division): the image of (u^a) is the
    Z_p-span of u^{a+t} mod E^b for t < e*b, and p^c enters (u^a, E^b) iff
    its class joins that span.  Verdicts mod p^N are exact for c < N since
    1 - p*x is a unit.  Defaults to E = u^e + p when params is omitted.
    """
    if b == 0 or a == 0:
        return 0
    est = p_power_threshold_estimate(a, b, params.e if params else e)
    if params is None:
        if p is None or e is None:
            raise ValueError("need params or both p and e")
        params = eisenstein_params(p, est + 2, max(a, e * b) + 2, e)
    else:
        if a >= params.M or params.e * b >= params.M:
            raise InsufficientPrecision("u^a or E^b not representable; raise M")
        if params.N <= est:
            raise InsufficientPrecision("answer may not fit below N; raise N")
    p_, e_ = params.p, params.e
    N = params.N
    pN = params.modulus
    d = e_ * b

    Eb = [1]
    for _ in range(b):
        nxt = [0] * (len(Eb) + e_)
        for i, x in enumerate(Eb):
            if x:
                for k, y in enumerate(params.E_coeffs):
                    if y:
                        nxt[i + k] = (nxt[i + k] + x * y) % pN
        Eb = nxt
    inv_lead = pow(Eb[d], -1, pN)
    top = [(-inv_lead * Eb[i]) % pN for i in range(d)]  # u^d mod E^b

    v = [0] * d
    v[0] = 1
    powers = {0: tuple(v)}
    for m in range(1, a + d):
        carry = v[d - 1]
        v = [0] + v[: d - 1]
        if carry:
            v = [(x + carry * t) % pN for x, t in zip(v, top)]
        powers[m] = tuple(v)
    rows = [powers[a + t] for t in range(d)]
    module = SpanModule.from_rows(p_, N, d, rows)
    target = [0] * d
    for c in range(N):
        target[0] = pow(p_, c, pN)
        if module.contains_all([target]):
            return c
    raise InsufficientPrecision("no threshold below N; raise precision")


def rho_bound_chain(p: int, e: int, j: int) -> int:
    """Chain-argument bound: sum of per-step colength estimates along the
    sequence a_i = p^i, a_n = floor(e*j/(p-1)) + 1."""
    if j < 1:
        raise ValueError("j must be at least 1")
    inp = BoundInputs(p, e, j)
    n = inp.n
    if n == 0:
        return 0
    total = sum(p**i // e for i in range(1, n))
    total += (inp.sigma_cap + 1) // e
    total += n * j
    return total


def rho_bound_envelope(p: int, e: int, j: int, sigma: int | None = None) -> Fraction:
    """Envelope-argument bound (sigma/(p^{n-1}(p-1)) + n) * j as an exact
    rational; sigma defaults to its ceiling floor(e*j/(p-1))."""
    if j < 1:
        raise ValueError("j must be at least 1")
    inp = BoundInputs(p, e, j)
    n = inp.n
    if n == 0:
        return Fraction(0)
    if sigma is None:
        sigma = inp.sigma_cap
    return (Fraction(sigma, p ** (n - 1) * (p - 1)) + n) * j


def rho_bound_combined(p: int, e: int, j: int) -> int:
    """d(e, j): minimum of the chain bound and the floored envelope bound
    (rho is an integer, so flooring the rational bound is sound)."""
    chain = rho_bound_chain(p, e, j)
    env = rho_bound_envelope(p, e, j)
    return min(chain, int(env))


def rho_bound_j1(p: int, e: int) -> int:
    """Sharper bound for j = 1: the least n with e < p^n(p-1), plus one
    extra when p = 2."""
    if e < 1:
        raise ValueError("e must be at least 1")
    n = 0
    t = p - 1
    while e >= t:
        n += 1
        t *= p
    return n + 1 if p == 2 else n


def crystalline_gap_constant(p: int, e: int, i: int) -> int:
    """2*d(e, i-1) + d(e, i), with d(e, 0) = 0."""
    if i < 1:
        raise ValueError("i must be at least 1")
    prev = rho_bound_combined(p, e, i - 1) if i > 1 else 0
    return 2 * prev + rho_bound_combined(p, e, i)


@dataclass(frozen=True)
class BoundednessReport:
    """The three boundedness conclusions for (J, j, ell); conclusions are
    None when the Frobenius conditions do not both hold."""

    conditions: FrobeniusConditionReport
    sigma: int
    rho: int
    length: int
    p_exponent: int
    p_power_in_ideal: bool | None
    length_cap: int
    length_within: bool | None
    corner_exponent: int
    corner_contained: bool | None

    @property
    def applicable(self) -> bool:
        return self.conditions.both

    @property
    def all_pass(self) -> bool:
        return self.applicable and bool(
            self.p_power_in_ideal and self.length_within and self.corner_contained
        )


def verify_boundedness(
    J: CofiniteIdeal, j: int, ell: int, conditions: FrobeniusConditionReport | None = None
) -> BoundednessReport:
    """Check p^{(rho+max(j,ell))*sigma} ∈ J, length(S/J) ≤ (rho+max)*sigma^2,
    and (u,p)^{(rho+max)*sigma^2} ⊂ J, the last by membership of every
    representable monomial on the diagonal (the rest lie in (p^N, u^M) ⊂ J)."""
    if conditions is None or conditions.j != j or conditions.ell != ell:
        conditions = check_frobenius_conditions(J, j, ell)
    inv = J.invariants()
    mx = max(j, ell)
    p_exp = (inv.rho + mx) * inv.sigma
    length_cap = (inv.rho + mx) * inv.sigma**2
    corner_exp = length_cap
    if not conditions.both:
        return BoundednessReport(
            conditions, inv.sigma, inv.rho, inv.length, p_exp, None, length_cap, None,
            corner_exp, None,
        )
    power_ok = J.contains_p_power(p_exp)
    length_ok = inv.length <= length_cap
    params = J.params
    vecs = []
    for a in range(min(params.N, corner_exp + 1)):
        b = corner_exp - a
        if b < params.M:
            vec = [0] * params.M
            vec[b] = params.p**a
            vecs.append(vec)
    corner_ok = J.module.contains_all(vecs) if vecs else True
    return BoundednessReport(
        conditions, inv.sigma, inv.rho, inv.length, p_exp, power_ok, length_cap,
        length_ok, corner_exp, corner_ok,
    )

"""Witt vectors in Teichmuller-expansion coordinates over a truncated
rational-exponent Hahn-series model of a perfect characteristic-p base.

An element is written x = sum_i p^i [x_i] with each coordinate x_i a
finite F_p-combination of monomials t^q, q in Q>=0, carrying a cutoff:
exponents at or beyond the cutoff are unknown.  Addition follows the
carry identity [x] + [y] = [x+y] + sum_{i>=1} p^i [Q_i(x^{1/p^i}, y^{1/p^i})]
with the universal carry polynomials Q_i defined by
X^{p^n} + Y^{p^n} = sum_i p^i Q_i^{p^{n-i}}; in expansion coordinates
multiplication by p is a plain coordinate shift, so multiplication
distributes one Teichmuller level at a time.

Every p-th root divides a cutoff by p, so cutoffs shrink by exactly p per
level a carry descends; budgets are chosen so the final annotations still
cover whatever valuation is being asserted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from .errors import OddPrimeRequired, PrecisionUnderflow

Q = Fraction

_DENSE_SLOT_CAP = 2_000_000


def _min_cutoff(a: Fraction | None, b: Fraction | None) -> Fraction | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


@dataclass(frozen=True)
class HahnElement:
    """Finite F_p-combination of t^q with a 'known below cutoff' annotation
    (cutoff None means exact)."""

    p: int
    terms: tuple[tuple[Fraction, int], ...]
    cutoff: Fraction | None = None

    def is_zero(self) -> bool:
        return not self.terms

    def is_exact_zero(self) -> bool:
        return not self.terms and self.cutoff is None

    def valuation(self) -> Fraction | None:
        """Least exponent; None plays the role of +infinity."""
        return self.terms[0][0] if self.terms else None

    def add(self, other: "HahnElement") -> "HahnElement":
        cut = _min_cutoff(self.cutoff, other.cutoff)
        acc = dict(self.terms)
        for q, c in other.terms:
            acc[q] = (acc.get(q, 0) + c) % self.p
        return hahn(self.p, acc, cut)

    def neg(self) -> "HahnElement":
        return HahnElement(self.p, tuple((q, (-c) % self.p) for q, c in self.terms), self.cutoff)

    def mul(self, other: "HahnElement") -> "HahnElement":
        cut = _min_cutoff(self.cutoff, other.cutoff)
        acc: dict[Fraction, int] = {}
        for q1, c1 in self.terms:
            for q2, c2 in other.terms:
                q = q1 + q2
                if cut is not None and q >= cut:
                    continue
                acc[q] = (acc.get(q, 0) + c1 * c2) % self.p
        return hahn(self.p, acc, cut)

    def pow_int(self, k: int) -> "HahnElement":
        out = hahn(self.p, {Q(0): 1}, self.cutoff if k else None)
        base = self
        while k:
            if k & 1:
                out = out.mul(base)
            base = base.mul(base)
            k >>= 1
        return out

    def p_root(self) -> "HahnElement":
        """p-th root: exponents divide by p (coefficients are Frobenius-fixed
        in F_p) and the reliable range shrinks by the same factor."""
        cut = None if self.cutoff is None else self.cutoff / self.p
        return HahnElement(self.p, tuple((q / self.p, c) for q, c in self.terms), cut)

    def agrees_with(self, other: "HahnElement") -> bool:
        """Equality of the known parts below the common cutoff."""
        cut = _min_cutoff(self.cutoff, other.cutoff)
        mine = {q: c for q, c in self.terms if cut is None or q < cut}
        theirs = {q: c for q, c in other.terms if cut is None or q < cut}
        return mine == theirs


def hahn(p: int, terms, cutoff: Fraction | None = None) -> HahnElement:
    """Normalized element: coefficients reduced mod p, zero terms and terms
    at or beyond the cutoff dropped, exponents sorted."""
    if cutoff is not None:
        cutoff = Q(cutoff)
    out = []
    items = terms.items() if isinstance(terms, dict) else terms
    acc: dict[Fraction, int] = {}
    for q, c in items:
        q = Q(q)
        if q < 0:
            raise ValueError("negative exponent in Hahn element")
        acc[q] = (acc.get(q, 0) + c) % p
    for q in sorted(acc):
        c = acc[q]
        if c and (cutoff is None or q < cutoff):
            out.append((q, c))
    return HahnElement(p, tuple(out), cutoff)


def hahn_zero(p: int, cutoff: Fraction | None = None) -> HahnElement:
    return HahnElement(p, (), None if cutoff is None else Q(cutoff))


def hahn_one(p: int) -> HahnElement:
    return hahn(p, {Q(0): 1})


# -- universal carry polynomials ----------------------------------------------


class CarryTable:
    """Q_0..Q_imax as mod-p coefficient arrays; entry m of table i is the
    coefficient of X^m Y^{p^i - m}."""

    def __init__(self, p: int, imax: int, polys: list[np.ndarray]):
        self.p = p
        self.imax = imax
        self.polys = polys
        self._validate()

    def _validate(self) -> None:
        p = self.p
        assert list(self.polys[0]) == [1, 1], "Q_0 must be X + Y"
        for i in range(1, self.imax + 1):
            tab = self.polys[i]
            assert len(tab) == p**i + 1, "Q_i must be homogeneous of degree p^i"
            assert tab[0] == 0 and tab[-1] == 0, "no pure X or Y power in Q_i"
            # comparing X·Y^{p^n - 1} coefficients in the defining recursion
            # forces both edge coefficients to be -1
            assert tab[1] == p - 1 and tab[-2] == p - 1, "edge coefficients must be -1 mod p"


def _poly_pow_p(P: np.ndarray, p: int, mod: int) -> np.ndarray:
    R = P
    for _ in range(p - 1):
        R = np.convolve(R, P) % mod
    return R


def q_table(p: int, imax: int) -> CarryTable:
    """Build the carry table by the defining recursion, with coefficient
    arithmetic carried mod p^{n+1} (enough to recover Q_n mod p, since
    congruence mod p^k propagates through p-th powers one level at a time)."""
    if p ** (3 * imax + 2) * (p**imax + 1) >= (1 << 62):
        raise ValueError("carry table budget exceeded for this p and depth")
    polys: list[np.ndarray] = []
    for n in range(imax + 1):
        mod = p ** (n + 1)
        S = np.zeros(p**n + 1, dtype=np.int64)
        S[0] += 1
        S[-1] += 1
        for i in range(n):
            P = polys[i].astype(np.int64)
            for t in range(n - i):
                P = _poly_pow_p(P, p, p ** (t + 2))
            S = (S - p**i * P) % mod
        if n and (S % p**n).any():
            raise AssertionError("carry recursion produced a non-divisible remainder")
        polys.append((S // p**n) % p)
    return CarryTable(p, imax, polys)


# -- Witt vectors --------------------------------------------------------------


@dataclass(frozen=True)
class WittVector:
    """Teichmuller-expansion coordinates x = sum p^i [coords[i]]."""

    p: int
    coords: tuple[HahnElement, ...]

    def __len__(self) -> int:
        return len(self.coords)

    def agrees_with(self, other: "WittVector") -> bool:
        return self.p == other.p and len(self) == len(other) and all(
            a.agrees_with(b) for a, b in zip(self.coords, other.coords)
        )


def teichmuller(x: HahnElement, levels: int) -> WittVector:
    return WittVector(x.p, (x,) + tuple(hahn_zero(x.p) for _ in range(levels - 1)))


def witt_zero(p: int, levels: int) -> WittVector:
    return WittVector(p, tuple(hahn_zero(p) for _ in range(levels)))


def witt_neg(x: WittVector, table: CarryTable | None = None) -> WittVector:
    """Coordinatewise negation; valid for odd p where [-1] = -1."""
    if x.p == 2:
        raise OddPrimeRequired("negation by coordinate sign needs odd p")
    return WittVector(x.p, tuple(c.neg() for c in x.coords))


def _common_grid(elems) -> Fraction | None:
    num = 0
    den = 1
    for e in elems:
        for q, _ in e.terms:
            den = lcm(den, q.denominator)
    for e in elems:
        for q, _ in e.terms:
            num = gcd(num, q.numerator * (den // q.denominator))
    if num == 0:
        return None
    return Q(num, den)


def _to_dense(e: HahnElement, q: Fraction, length: int) -> np.ndarray:
    """Coefficient array on the grid q·Z, truncated to ``length`` slots;
    terms beyond the window can only feed terms beyond it (exponents are
    nonnegative and only add), so dropping them here is sound."""
    out = np.zeros(length, dtype=np.int64)
    for exp, c in e.terms:
        slot = exp / q
        if slot.denominator != 1:
            raise ValueError("exponent off the common grid")
        if slot < length:
            out[int(slot)] = c
    return out


def _defect(a0: HahnElement, b0: HahnElement, depth: int, table: CarryTable):
    """Carry coordinates d_1..d_depth with [a0] + [b0] = [a0+b0] + sum p^i [d_i].

    Computed on the unrooted exponent grid: the arrays of a0^{1/p^i} are the
    arrays of a0 with rescaled grid metadata, so one pair of power chains
    serves every level.
    """
    p = table.p
    cut = _min_cutoff(a0.cutoff, b0.cutoff)

    def zeros(exact: bool):
        out = []
        for i in range(1, depth + 1):
            c = None if exact or cut is None else cut / p**i
            out.append(hahn_zero(p, c))
        return tuple(out)

    if a0.is_zero() or b0.is_zero():
        # Q_i has no pure power for i >= 1, so an exactly-zero argument kills
        # every carry; a zero known only below its cutoff leaves blind carries
        exact = (a0.is_exact_zero() or b0.is_exact_zero())
        return zeros(exact)

    q = _common_grid([a0, b0])
    n_max = p**depth - 1
    if cut is None:
        top = max(a0.terms[-1][0], b0.terms[-1][0])
        length = int((top * (n_max + 1)) / q) + 1
    else:
        length = int(-(-cut // q))
    if length > _DENSE_SLOT_CAP:
        raise PrecisionUnderflow(
            "carry computation would need too many exponent slots; lower the cutoff budget"
        )
    X = _to_dense(a0, q, length)
    Y = _to_dense(b0, q, length)
    powX = [np.zeros(length, dtype=np.int64) for _ in range(n_max + 1)]
    powY = [np.zeros(length, dtype=np.int64) for _ in range(n_max + 1)]
    powX[0][0] = 1
    powY[0][0] = 1
    for m in range(1, n_max + 1):
        powX[m] = np.convolve(powX[m - 1], X)[:length] % p
        powY[m] = np.convolve(powY[m - 1], Y)[:length] % p
    out = []
    for i in range(1, depth + 1):
        n = p**i
        tab = table.polys[i]
        acc = np.zeros(length, dtype=np.int64)
        for m in range(1, n):
            c = int(tab[m])
            if c:
                acc = (acc + c * np.convolve(powX[m], powY[n - m])[:length]) % p
        qi = q / p**i
        cut_i = None if cut is None else cut / p**i
        terms = {qi * int(s): int(acc[s]) for s in np.flatnonzero(acc)}
        out.append(hahn(p, terms, cut_i))
    return tuple(out)


def _add_coords(xs, ys, table: CarryTable):
    L = len(xs)
    if L == 0:
        return ()
    if all(y.is_exact_zero() for y in ys):
        return tuple(xs)
    if all(x.is_exact_zero() for x in xs):
        return tuple(ys)
    s0 = xs[0].add(ys[0])
    if L == 1:
        return (s0,)
    carries = _defect(xs[0], ys[0], L - 1, table)
    tails = _add_coords(xs[1:], ys[1:], table)
    return (s0,) + _add_coords(tails, carries, table)


def witt_add(x: WittVector, y: WittVector, table: CarryTable, floor: Fraction | None = None) -> WittVector:
    if x.p != y.p or len(x) != len(y):
        raise ValueError("witt_add needs equal prime and length")
    if table.imax < len(x) - 1:
        raise ValueError("carry table too shallow for this length")
    out = WittVector(x.p, _add_coords(x.coords, y.coords, table))
    if floor is not None:
        for i, c in enumerate(out.coords):
            if c.cutoff is not None and c.cutoff < floor:
                raise PrecisionUnderflow(f"coordinate {i} known only below {c.cutoff} < {floor}")
    return out


def witt_mul(x: WittVector, y: WittVector, table: CarryTable) -> WittVector:
    """Distribute x over y's Teichmuller levels: in expansion coordinates
    p^k [x_k] · sum p^m [y_m] = sum p^{k+m} [x_k y_m]."""
    if x.p != y.p or len(x) != len(y):
        raise ValueError("witt_mul needs equal prime and length")
    p, L = x.p, len(x)
    acc = witt_zero(p, L)
    for k, xk in enumerate(x.coords):
        if xk.is_exact_zero():
            continue
        partial = tuple(hahn_zero(p) for _ in range(k)) + tuple(
            xk.mul(y.coords[m]) for m in range(L - k)
        )
        acc = witt_add(acc, WittVector(p, partial), table)
    return acc


def witt_pow(x: WittVector, j: int, table: CarryTable) -> WittVector:
    out = x
    for _ in range(j - 1):
        out = witt_mul(out, x, table)
    return out


# -- the element mu = [eps] - 1 ------------------------------------------------


def expected_mu_valuation(p: int, j: int, ell: int, model_valuation: Fraction | None = None) -> Fraction:
    """Claimed coordinate valuation at index j*ell: j * v(eps-1) / p^ell."""
    v = Q(p, p - 1) if model_valuation is None else Q(model_valuation)
    return j * v / p**ell


def mu_budget(p: int, j: int, levels: int, model_valuation: Fraction) -> Fraction:
    """Cutoff budget so that after the worst root chain into level i the
    annotation B/p^i still exceeds the valuation the polygon needs there
    (the claim at the last checkpoint at or before i), with a 2x margin."""
    need = Q(0)
    for i in range(levels):
        claim = j * model_valuation / p ** (i // j)
        need = max(need, claim * p**i)
    return 2 * need


def mu_expansion(
    p: int,
    j: int,
    levels: int,
    model_valuation: Fraction | None = None,
    extra_exponents=(),
    budget: Fraction | None = None,
    table: CarryTable | None = None,
) -> WittVector:
    """Teichmuller expansion of mu^j for mu = [eps] - 1 in the Hahn model
    eps = 1 + t^{v} (v defaults to p/(p-1)), computed to the given number of
    levels.  Coordinate annotations are checked to cover the expected
    valuations at every index j*ell inside the window."""
    if p == 2:
        raise OddPrimeRequired("mu expansion implemented for odd p")
    if j < 1 or levels < 1:
        raise ValueError("need j >= 1 and levels >= 1")
    v = Q(p, p - 1) if model_valuation is None else Q(model_valuation)
    B = mu_budget(p, j, levels, v)
    if budget is not None:
        B = max(B, Q(budget))
    if table is None:
        table = q_table(p, levels - 1)
    eps_terms = {Q(0): 1, v: 1}
    for q in extra_exponents:
        eps_terms[Q(q)] = eps_terms.get(Q(q), 0) + 1
    eps = hahn(p, eps_terms, B)
    mu = witt_add(teichmuller(eps, levels), witt_neg(teichmuller(hahn_one(p), levels)), table)
    out = witt_pow(mu, j, table)
    for ell in range(0, (levels - 1) // j + 1):
        idx = j * ell
        claim = j * v / p**ell
        c = out.coords[idx]
        if c.cutoff is not None and c.cutoff <= claim:
            raise PrecisionUnderflow(
                f"annotation at index {idx} is {c.cutoff}, not beyond the claim {claim}"
            )
    return out

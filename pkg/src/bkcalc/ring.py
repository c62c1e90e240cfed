"""Exact arithmetic in the truncated ring (Z/p^N)[u]/(u^M).

Every element stores exactly M coefficients reduced mod p^N, so all
operations are exact images of the corresponding operations upstairs in
Z_p[[u]].  The ring carries a distinguished Eisenstein polynomial E of
degree e and the Frobenius endomorphism that fixes coefficients (the
residue field is F_p, so the coefficient Frobenius is the identity) and
sends u to u^p.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

from .errors import MismatchedParams, NotEisenstein, ParseError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def residue_valuation(x: int, p: int, cap: int) -> int:
    """ord_p of a residue in [0, p^cap); ``cap`` stands in for +infinity at 0."""
    if x == 0:
        return cap
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@dataclass(frozen=True)
class RingParams:
    """Parameters of the truncated ring: prime p, precisions N (p-adic) and M
    (u-adic), and the Eisenstein polynomial E of degree e given by its e+1
    coefficients (index = u-degree) reduced mod p^N."""

    p: int
    N: int
    M: int
    e: int
    E_coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.N <= 1:
            raise ValueError("p-adic precision N must exceed 1")
        if self.M < 1:
            raise ValueError("u-adic precision M must be at least 1")
        if not 1 <= self.e < self.M:
            raise ValueError("need 1 <= e < M so E is faithfully representable")
        if len(self.E_coeffs) != self.e + 1:
            raise NotEisenstein("E must have exactly e+1 coefficients")
        pN = self.p**self.N
        if any(not 0 <= c < pN for c in self.E_coeffs):
            raise NotEisenstein("E coefficients must be reduced mod p^N")
        if self.E_coeffs[self.e] % self.p == 0:
            raise NotEisenstein("leading coefficient of E must be a unit")
        if residue_valuation(self.E_coeffs[0], self.p, self.N) != 1:
            raise NotEisenstein("constant term of E must have p-valuation exactly 1")
        if any(c % self.p != 0 for c in self.E_coeffs[1 : self.e]):
            raise NotEisenstein("middle coefficients of E must be divisible by p")

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def series(self, coeffs) -> "PrecSeries":
        """Build a series from an iterable or {degree: coefficient} mapping."""
        pN = self.modulus
        out = [0] * self.M
        if isinstance(coeffs, dict):
            items = coeffs.items()
        else:
            items = enumerate(coeffs)
        for i, c in items:
            if i < 0:
                raise ValueError("negative u-degree")
            if i < self.M:
                out[i] = (out[i] + c) % pN
        return PrecSeries(tuple(out), self)

    def zero(self) -> "PrecSeries":
        return self.series({})

    def one(self) -> "PrecSeries":
        return self.series({0: 1})

    def u_power(self, k: int) -> "PrecSeries":
        return self.series({k: 1} if k < self.M else {})

    def p_power(self, a: int) -> "PrecSeries":
        return self.series({0: self.p**a} if a < self.N else {})

    def eisenstein(self) -> "PrecSeries":
        return self.series(dict(enumerate(self.E_coeffs)))

    def eisenstein_power(self, j: int) -> "PrecSeries":
        return _eisenstein_power(self, j)

    def with_precision(self, N: int | None = None, M: int | None = None) -> "RingParams":
        """Same p and E at a different precision (E coefficients re-reduced)."""
        N2 = self.N if N is None else N
        M2 = self.M if M is None else M
        pN2 = self.p**N2
        return RingParams(self.p, N2, M2, self.e, tuple(c % pN2 for c in self.E_coeffs))


def eisenstein_params(p: int, N: int, M: int, e: int, coeffs=None) -> RingParams:
    """Validated ring parameters; the default choice is E = u^e + p."""
    pN = p**N
    if coeffs is None:
        coeffs = [p % pN] + [0] * (e - 1) + [1]
    return RingParams(p, N, M, e, tuple(c % pN for c in coeffs))


@lru_cache(maxsize=None)
def _eisenstein_power(params: RingParams, j: int) -> "PrecSeries":
    out = params.one()
    E = params.eisenstein()
    for _ in range(j):
        out = out * E
    return out


@dataclass(frozen=True)
class PrecSeries:
    """An element of (Z/p^N)[u]/(u^M): exactly M residues, index = u-degree."""

    coeffs: tuple[int, ...]
    params: RingParams

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.params.M:
            raise ValueError("series must store exactly M coefficients")

    def _check(self, other: "PrecSeries") -> None:
        if self.params != other.params:
            raise MismatchedParams("operands have different ring parameters")

    def __add__(self, other: "PrecSeries") -> "PrecSeries":
        self._check(other)
        pN = self.params.modulus
        return PrecSeries(
            tuple((a + b) % pN for a, b in zip(self.coeffs, other.coeffs)), self.params
        )

    def __sub__(self, other: "PrecSeries") -> "PrecSeries":
        self._check(other)
        pN = self.params.modulus
        return PrecSeries(
            tuple((a - b) % pN for a, b in zip(self.coeffs, other.coeffs)), self.params
        )

    def __neg__(self) -> "PrecSeries":
        pN = self.params.modulus
        return PrecSeries(tuple((-a) % pN for a in self.coeffs), self.params)

    def __mul__(self, other: "PrecSeries") -> "PrecSeries":
        self._check(other)
        M = self.params.M
        pN = self.params.modulus
        out = [0] * M
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for k in range(M - i):
                b = other.coeffs[k]
                if b:
                    out[i + k] = (out[i + k] + a * b) % pN
        return PrecSeries(tuple(out), self.params)

    def frobenius(self) -> "PrecSeries":
        """phi: coefficientwise identity, u^i -> u^{p i}; degrees >= M drop."""
        p, M = self.params.p, self.params.M
        out = [0] * M
        for i, a in enumerate(self.coeffs):
            if a and i * p < M:
                out[i * p] = a
        return PrecSeries(tuple(out), self.params)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def u_valuation(self) -> int:
        """Index of the first nonzero coefficient (M if zero)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return self.params.M

    def __str__(self) -> str:
        return format_series(self)


_TERM_RE = re.compile(r"^(-?\d+)(?:\*u\^(\d+))?$")


def parse_series(text: str, params: RingParams) -> PrecSeries:
    """Parse the series literal grammar ``term ("+" term)*`` with
    ``term := INT ("*u^" INT)?``; coefficients are reduced mod p^N."""
    terms: dict[int, int] = {}
    body = text.strip()
    if not body:
        raise ParseError("empty series literal")
    for raw in body.split("+"):
        m = _TERM_RE.match(raw.replace(" ", ""))
        if not m:
            raise ParseError(f"bad term {raw.strip()!r} in series literal")
        c = int(m.group(1))
        d = int(m.group(2)) if m.group(2) is not None else 0
        terms[d] = terms.get(d, 0) + c
    return params.series(terms)


def format_series(s: PrecSeries) -> str:
    """Canonical literal, highest degree first, e.g. ``1*u^4 + 3``."""
    parts = []
    for d in range(s.params.M - 1, -1, -1):
        c = s.coeffs[d]
        if c == 0:
            continue
        parts.append(f"{c}*u^{d}" if d else f"{c}")
    return " + ".join(parts) if parts else "0"

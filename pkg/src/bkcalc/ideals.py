"""Cofinite ideals of the truncated ring with exact, certified membership.

An ideal J is stored as the Howell-form span of the u-shifts of its
generators inside (Z/p^N)^M together with a cofiniteness witness: the
least K with (p,u)^K contained in J.  Once K < min(N, M) is certified,
(p^N, u^M) lands inside (p,u)^K and hence inside J, so every membership
verdict computed at the truncation is a statement about the untruncated
ring, not an artifact of precision.

The witness search itself is sound by a bootstrap: if every monomial of
total degree K reduces to zero at the truncation, then (p,u)^K lies in
J + (p,u)^{min(N,M)-K}·(p,u)^K, and iterating (ideals of the complete
local ring are closed) gives genuine containment whenever K < min(N, M).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    InsufficientPrecision,
    MismatchedParams,
    NotCofiniteAtPrecision,
    ParseError,
)
from .howell import SpanModule
from .ring import PrecSeries, RingParams, eisenstein_params, format_series, parse_series


@dataclass(frozen=True)
class IdealInvariants:
    """sigma, rho and the Z_p-length of the quotient, where
    J + (p) = (p, u^sigma) and J + (u) = (u, p^rho)."""

    sigma: int
    rho: int
    length: int


@dataclass(frozen=True)
class FrobeniusConditionReport:
    """Outcome of the two Frobenius containments for a given (j, ell):
    ``scaled_in_frobenius``  E^j·J  ⊂ phi(J)·S
    ``frobenius_scaled_back``  E^ell·phi(J) ⊂ J   (None when ell is None)."""

    j: int
    ell: int | None
    scaled_in_frobenius: bool
    frobenius_scaled_back: bool | None

    @property
    def both(self) -> bool:
        return self.scaled_in_frobenius and bool(self.frobenius_scaled_back)


class CofiniteIdeal:
    """A cofinite ideal with canonical basis and cofiniteness witness."""

    __slots__ = ("params", "gens", "module", "witness", "_frob")

    def __init__(self, params, gens, module, witness):
        self.params = params
        self.gens = gens
        self.module = module
        self.witness = witness
        self._frob = None

    # -- construction ---------------------------------------------------

    @classmethod
    def generated_by(cls, gens, params: RingParams | None = None) -> "CofiniteIdeal":
        gens = tuple(gens)
        if not gens:
            raise ValueError("need at least one generator")
        if params is None:
            params = gens[0].params
        for g in gens:
            if g.params != params:
                raise MismatchedParams("generators from different rings")
        module = SpanModule.from_rows(
            params.p, params.N, params.M, [g.coeffs for g in gens], close_under_shift=True
        )
        witness = _witness_search(module, params)
        return cls(params, gens, module, witness)

    @classmethod
    def _from_module(cls, params, gens, module) -> "CofiniteIdeal":
        witness = _witness_search(module, params)
        return cls(params, gens, module, witness)

    # -- membership and comparison ---------------------------------------

    def contains(self, x: PrecSeries) -> bool:
        if x.params != self.params:
            raise MismatchedParams("element from a different ring")
        return self.module.contains_all([x.coeffs])

    def contains_p_power(self, a: int) -> bool:
        """p^a ∈ J, valid for any a ≥ 0 (powers at or above N fall into
        (p^N) ⊂ J by the witness)."""
        if a >= self.params.N:
            return True
        return self.contains(self.params.p_power(a))

    def contains_corner(self, c: int) -> bool:
        """(p,u)^c ⊂ J, by minimality of the witness."""
        return self.witness <= c

    def equals(self, other: "CofiniteIdeal") -> bool:
        if self.params != other.params:
            raise MismatchedParams("ideals from different rings")
        return self.module.equals(other.module)

    # -- ideal operations --------------------------------------------------

    def sum(self, other: "CofiniteIdeal") -> "CofiniteIdeal":
        if self.params != other.params:
            raise MismatchedParams("ideals from different rings")
        return CofiniteIdeal.generated_by(self.gens + other.gens, self.params)

    def scaled_by(self, f: PrecSeries) -> "CofiniteIdeal":
        if f.params != self.params:
            raise MismatchedParams("scalar from a different ring")
        return CofiniteIdeal.generated_by(tuple(f * g for g in self.gens), self.params)

    def frobenius(self) -> "CofiniteIdeal":
        """The ideal phi(J)·S.  Needs headroom p·K ≤ min(N, M): the image
        witness is at most p·K because phi((p,u)^K)·S ⊃ (p,u)^{pK}."""
        if self._frob is not None:
            return self._frob
        params = self.params
        cap = min(params.N, params.M)
        if params.p * self.witness > cap:
            raise InsufficientPrecision(
                f"frobenius needs p*witness = {params.p * self.witness} <= min(N, M) = {cap}"
            )
        out = CofiniteIdeal.generated_by(tuple(g.frobenius() for g in self.gens), params)
        self._frob = out
        return out

    def colon_p(self) -> "CofiniteIdeal":
        """(J : p) = {f : p·f ∈ J}, exact, returned at p-precision N-1."""
        params = self.params
        if params.N < 2:
            raise InsufficientPrecision("colon by p consumes one level of p-precision")
        rows = self.module.colon_p_rows()
        low = params.with_precision(N=params.N - 1)
        pN2 = low.modulus
        reduced = [tuple(int(x) % pN2 for x in r) for r in rows]
        module = SpanModule.from_rows(low.p, low.N, low.M, reduced, close_under_shift=False)
        gens = tuple(PrecSeries(r, low) for r in reduced)
        return CofiniteIdeal._from_module(low, gens, module)

    def monomial_hull(self) -> "CofiniteIdeal":
        """Smallest monomial ideal containing every monomial term of every
        element of J: per u-degree c, the least p-valuation the span attains
        there (exact below the witness, forced to 0 at and beyond it)."""
        params = self.params
        m = [int(v) for v in self.module.column_min_valuations()]
        # running minimum turns column minima into the staircase profile
        prof = []
        best = params.N
        for c in range(params.M):
            best = min(best, m[c])
            prof.append(best)
        module = SpanModule.from_staircase(params.p, params.N, params.M, prof)
        gens = []
        last = params.N + 1
        for c, a in enumerate(prof):
            if a < last:
                gens.append(params.series({c: params.p**a}))
                last = a
            if a == 0:
                break
        sigma = next(c for c, a in enumerate(prof) if a == 0)
        witness = max([sigma] + [prof[c] + c for c in range(sigma)])
        return CofiniteIdeal(params, tuple(gens), module, witness)

    # -- invariants ---------------------------------------------------------

    def invariants(self) -> IdealInvariants:
        m = self.module.column_min_valuations()
        sigma = int(next(c for c in range(self.params.M) if m[c] == 0))
        rho = int(m[0])
        return IdealInvariants(sigma=sigma, rho=rho, length=self.module.log_index())

    def __repr__(self) -> str:
        gens = ", ".join(format_series(g) for g in self.gens)
        return f"CofiniteIdeal({gens}; witness={self.witness})"


def _witness_search(module: SpanModule, params: RingParams) -> int:
    """Least K with (p,u)^K ⊂ J, certified sound for K < min(N, M)."""
    p, N, M = params.p, params.N, params.M
    cap = min(N, M)
    m = module.column_min_valuations()
    rho_lb = int(m[0])
    sigma_lb = next((c for c in range(M) if m[c] == 0), None)
    if rho_lb >= N or sigma_lb is None:
        # no p-power alone, or no u-power alone, can ever enter the span
        raise NotCofiniteAtPrecision("no cofiniteness witness below precision")
    start = max(rho_lb, sigma_lb)
    for K in range(start, cap):
        vecs = []
        for a in range(0, K + 1):
            b = K - a
            if a < N and b < M:
                vec = [0] * M
                vec[b] = p**a
                vecs.append(vec)
        if not vecs or module.contains_all(vecs):
            return K
    raise NotCofiniteAtPrecision(
        f"no witness K < min(N, M) = {cap}; raise the working precision"
    )


def check_frobenius_conditions(
    J: CofiniteIdeal, j: int, ell: int | None = None
) -> FrobeniusConditionReport:
    """Decide E^j·J ⊂ phi(J)·S and, when ell is given, E^ell·phi(J) ⊂ J,
    by exact membership of every scaled generator."""
    params = J.params
    top = max(j, ell if ell is not None else 0)
    if params.e * top >= params.M:
        raise InsufficientPrecision("E power not representable at this u-precision")
    phiJ = J.frobenius()
    Ej = params.eisenstein_power(j)
    cond_a = all(phiJ.contains(Ej * g) for g in J.gens)
    cond_b = None
    if ell is not None:
        El = params.eisenstein_power(ell)
        cond_b = all(J.contains(El * g.frobenius()) for g in J.gens)
    return FrobeniusConditionReport(
        j=j, ell=ell, scaled_in_frobenius=cond_a, frobenius_scaled_back=cond_b
    )


# -- ideal spec files --------------------------------------------------------

_HEADER_KEYS = ("p", "N", "M", "e")


def parse_ideal_file(text: str) -> CofiniteIdeal:
    """Header ``p=; N=; M=; e=; E=<poly>`` then one generator per line in the
    series literal grammar.  Blank lines and ``#`` comments are skipped."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty ideal file")
    header, *gen_lines = lines
    fields: dict[str, str] = {}
    tokens = header.split()
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if "=" not in tok:
            raise ParseError(f"bad header token {tok!r}")
        key, val = tok.split("=", 1)
        if key == "E":
            val = " ".join([val] + tokens[i + 1 :])
            fields[key] = val
            break
        fields[key] = val
        i += 1
    missing = [k for k in _HEADER_KEYS if k not in fields]
    if missing:
        raise ParseError(f"header missing fields {missing}")
    p, N, M, e = (int(fields[k]) for k in _HEADER_KEYS)
    if "E" in fields:
        probe = eisenstein_params(p, N, M, e)
        E = parse_series(fields["E"], probe)
        params = eisenstein_params(p, N, M, e, coeffs=E.coeffs[: e + 1])
    else:
        params = eisenstein_params(p, N, M, e)
    if not gen_lines:
        raise ParseError("ideal file lists no generators")
    gens = [parse_series(ln, params) for ln in gen_lines]
    return CofiniteIdeal.generated_by(gens, params)


def format_ideal_file(J: CofiniteIdeal) -> str:
    params = J.params
    E_text = format_series(params.eisenstein())
    head = f"p={params.p} N={params.N} M={params.M} e={params.e} E={E_text}"
    return "\n".join([head] + [format_series(g) for g in J.gens]) + "\n"

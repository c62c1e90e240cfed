"""Gauss valuations and exact piecewise-linear envelopes over Q.

v_r(sum a_i u^i) = min_i (ord_p(a_i) + i*r) is an additive valuation for
each r >= 0; an ideal's valuation profile r -> v_r(I) is the lower
envelope of finitely many lines with nonnegative slopes, equal to the
profile of its monomial hull.  All arithmetic is in Fractions; nothing
here touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import StabilizationFailure, ZeroElement
from .ideals import CofiniteIdeal
from .ring import PrecSeries, residue_valuation

Q = Fraction


def gauss_valuation(x: PrecSeries, r: Fraction) -> Fraction:
    """v_r of a nonzero series: min over stored terms of ord_p + degree*r.

    Terms that vanish at the truncation are skipped, so in general the
    result is a lower-bound certificate; against the witness discipline of
    the callers in this package it is exact.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    p, N = x.params.p, x.params.N
    best = None
    for i, c in enumerate(x.coeffs):
        if c == 0:
            continue
        v = residue_valuation(c, p, N) + i * r
        if best is None or v < best:
            best = v
    if best is None:
        raise ZeroElement("v_r of the zero element")
    return Q(best)


@dataclass(frozen=True)
class PLFunction:
    """Lower envelope of lines slope*r + intercept on [0, oo).

    ``lines`` are the participating lines in segment order (slopes strictly
    decreasing left to right, which is what concavity of a min of lines
    means); ``breakpoints`` are the abscissas where the active line changes.
    """

    lines: tuple[tuple[Fraction, Fraction], ...]
    breakpoints: tuple[Fraction, ...]

    @classmethod
    def lower_envelope(cls, lines, natural_slopes: bool = False) -> "PLFunction":
        cleaned: dict[Fraction, Fraction] = {}
        for a, b in lines:
            a, b = Q(a), Q(b)
            if natural_slopes and (a.denominator != 1 or b.denominator != 1 or a < 0 or b < 0):
                raise ValueError("envelope restricted to natural slopes and intercepts")
            if a not in cleaned or b < cleaned[a]:
                cleaned[a] = b
        if not cleaned:
            raise ValueError("envelope of an empty line set")
        # steepest first; each later (flatter) line can only win from some
        # crossing point onward
        order = sorted(cleaned.items(), key=lambda ab: -ab[0])
        hull: list[tuple[Fraction, Fraction]] = []
        starts: list[Fraction] = []
        for a, b in order:
            while hull:
                a0, b0 = hull[-1]
                cross = Q(b - b0, a0 - a)
                if cross <= starts[-1]:
                    hull.pop()
                    starts.pop()
                else:
                    break
            if not hull:
                hull.append((a, b))
                starts.append(Q(0))
            else:
                a0, b0 = hull[-1]
                cross = Q(b - b0, a0 - a)
                hull.append((a, b))
                starts.append(cross)
        # drop a leading segment that never wins on [0, oo) is impossible by
        # construction; starts[0] == 0
        return cls(tuple(hull), tuple(starts[1:]))

    def __call__(self, r: Fraction) -> Fraction:
        r = Q(r)
        if r < 0:
            raise ValueError("r must be nonnegative")
        return min(a * r + b for a, b in self.lines)

    def final_slope(self) -> Fraction:
        return self.lines[-1][0]

    def leq(self, other: "PLFunction") -> bool:
        """Decide self <= other on all of [0, oo) exactly: compare at 0 and
        every breakpoint of either side, then compare final slopes."""
        pts = {Q(0), *self.breakpoints, *other.breakpoints}
        if any(self(r) > other(r) for r in pts):
            return False
        return self.final_slope() <= other.final_slope()

    def eq(self, other: "PLFunction") -> bool:
        return self.leq(other) and other.leq(self)

    def rescale_argument(self, factor: int) -> "PLFunction":
        """The function r -> self(factor*r): every slope multiplies."""
        return PLFunction.lower_envelope([(a * factor, b) for a, b in self.lines])

    def slopes_strictly_decrease(self) -> bool:
        return all(self.lines[i][0] > self.lines[i + 1][0] for i in range(len(self.lines) - 1))

    def nondecreasing(self) -> bool:
        return all(a >= 0 for a, _ in self.lines)

    def active_line(self, r: Fraction) -> tuple[Fraction, Fraction]:
        """The line realizing the envelope on the segment containing r."""
        idx = 0
        for s in self.breakpoints:
            if r >= s:
                idx += 1
            else:
                break
        return self.lines[idx]


def pl_add(f: PLFunction, g: PLFunction) -> PLFunction:
    """Pointwise sum of two envelopes (concave again): on each segment of
    the common refinement the sum is the sum of the active lines, and a
    concave piecewise-linear function is the min of its segment lines."""
    pts = sorted({Q(0), *f.breakpoints, *g.breakpoints})
    lines = []
    for i, s in enumerate(pts):
        r = s + 1 if i + 1 == len(pts) else (s + pts[i + 1]) / 2
        af, bf = f.active_line(r)
        ag, bg = g.active_line(r)
        lines.append((af + ag, bf + bg))
    return PLFunction.lower_envelope(lines)


def ideal_profile(J: CofiniteIdeal) -> PLFunction:
    """The profile r -> v_r(J) as an exact envelope, read off the monomial
    hull staircase: one line (degree, valuation) per staircase column."""
    params = J.params
    m = [int(v) for v in J.module.column_min_valuations()]
    lines = []
    best = params.N
    for c in range(params.M):
        best = min(best, m[c])
        lines.append((Q(c), Q(best)))
        if best == 0:
            break
    return PLFunction.lower_envelope(lines, natural_slopes=True)


def eisenstein_power_profile(e: int, j: int) -> PLFunction:
    """v_r(E^j) = min(e*j*r, j)."""
    return PLFunction.lower_envelope([(Q(e * j), Q(0)), (Q(0), Q(j))])


def comparison_envelope(p: int, sigma: int, j: int, rmax: Fraction) -> PLFunction:
    """The descent envelope with pieces (sigma/p^n)*r + n*j, generated far
    enough that the envelope is exact on [0, rmax].  Slopes are genuinely
    rational here, unlike ideal profiles."""
    if sigma == 0:
        return PLFunction.lower_envelope([(Q(0), Q(0))])
    rmax = Q(rmax)
    lines = []
    n = 0
    while True:
        lines.append((Q(sigma, p**n), Q(n * j)))
        start = Q(p**n * j, sigma * (p - 1))
        if start > rmax:
            break
        n += 1
    return PLFunction.lower_envelope(lines)


def stabilization_radius(p: int, j: int) -> Fraction:
    return Q(p * j, p - 1)


def stabilized_rho(J: CofiniteIdeal, j: int) -> int:
    """Evaluate the profile at r = p*j/(p-1); under the Frobenius containment
    for j this equals rho.  Any disagreement is reported, since it indicates
    the containment fails upstream."""
    p = J.params.p
    value = ideal_profile(J)(stabilization_radius(p, j))
    rho = J.invariants().rho
    if value.denominator != 1 or int(value) != rho:
        raise StabilizationFailure(
            f"profile value {value} at the stabilization radius differs from rho = {rho}"
        )
    return rho

"""Newton polygons of Witt vectors and their convolution.

The polygon of x = sum p^i [x_i] is the highest convex non-increasing
function below the points (i, v(x_i)); it is multiplicative: the polygon
of a product is the slope-multiset merge (convolution) of the factors'
polygons, and powers scale the polygon.  Polygons here are finite
windows — verdicts are only asserted where both operands' windows
suffice — and all arithmetic is exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ImpreciseCoordinate, OddPrimeRequired, ZeroElement
from .witt import (
    CarryTable,
    WittVector,
    expected_mu_valuation,
    mu_expansion,
    q_table,
    witt_pow,
)

Q = Fraction


@dataclass(frozen=True)
class NewtonPolygon:
    """Convex non-increasing polygon through (index, value) vertices; the
    graph is undefined beyond the last index (finite window)."""

    vertices: tuple[tuple[int, Fraction], ...]

    def __post_init__(self) -> None:
        vs = self.vertices
        if not vs:
            raise ValueError("polygon needs at least one vertex")
        slopes = []
        for (n0, v0), (n1, v1) in zip(vs, vs[1:]):
            if n1 <= n0:
                raise ValueError("vertex indices must increase")
            slopes.append(Q(v1 - v0, n1 - n0))
        if any(s > 0 for s in slopes):
            raise ValueError("polygon must be non-increasing")
        if any(s1 <= s0 for s0, s1 in zip(slopes, slopes[1:])):
            raise ValueError("polygon must be strictly convex at its vertices")

    @property
    def start_index(self) -> int:
        return self.vertices[0][0]

    @property
    def last_index(self) -> int:
        return self.vertices[-1][0]

    def value(self, x: Fraction) -> Fraction | None:
        """Height at x; None outside [start, last] (before the start the
        polygon is +infinity, beyond the window it is unknown)."""
        x = Q(x)
        if x < self.start_index or x > self.last_index:
            return None
        vs = self.vertices
        for (n0, v0), (n1, v1) in zip(vs, vs[1:]):
            if n0 <= x <= n1:
                return v0 + Q(v1 - v0, n1 - n0) * (x - n0)
        return vs[-1][1] if x == vs[-1][0] else vs[0][1]

    def edges(self):
        """(width, slope) pairs, steepest first."""
        out = []
        for (n0, v0), (n1, v1) in zip(self.vertices, self.vertices[1:]):
            out.append((n1 - n0, Q(v1 - v0, n1 - n0)))
        return out

    def equals_on(self, other: "NewtonPolygon", upto: int) -> bool:
        """Agreement of the two graphs on indices [start, upto]."""
        if self.start_index != other.start_index:
            return False
        pts = {Q(n) for n, _ in self.vertices if n <= upto}
        pts |= {Q(n) for n, _ in other.vertices if n <= upto}
        pts |= {Q(self.start_index), Q(upto)}
        return all(self.value(x) == other.value(x) for x in pts)


def polygon_of_points(points: dict[int, Fraction]) -> NewtonPolygon:
    """Highest convex non-increasing minorant of finitely many points:
    prefix-minimize (monotonicity caps everything to the right), then take
    the lower convex hull."""
    if not points:
        raise ValueError("no points")
    idx = sorted(points)
    best = None
    staged = []
    for n in idx:
        v = Q(points[n])
        best = v if best is None else min(best, v)
        staged.append((n, best))
    hull: list[tuple[int, Fraction]] = []
    for n, v in staged:
        while len(hull) >= 2:
            (n0, v0), (n1, v1) = hull[-2], hull[-1]
            # drop middle vertex if it is not strictly below the chord
            if (v1 - v0) * (n - n0) >= (v - v0) * (n1 - n0):
                hull.pop()
            else:
                break
        hull.append((n, v))
    return NewtonPolygon(tuple(hull))


def newt_of_witt(w: WittVector) -> NewtonPolygon:
    """Polygon of the coordinate valuations.  Coordinates that vanish below
    their cutoff only certify 'valuation >= cutoff', so the hull of the known
    points must stay at or below every such cutoff, else the polygon cannot
    be certified at this precision."""
    points: dict[int, Fraction] = {}
    blind: list[tuple[int, Fraction]] = []
    for i, c in enumerate(w.coords):
        v = c.valuation()
        if v is not None:
            points[i] = v
        elif c.cutoff is not None:
            blind.append((i, c.cutoff))
    if not points:
        raise ZeroElement("no known coordinate valuations")
    poly = polygon_of_points(points)
    for i, cut in blind:
        h = poly.value(Q(i))
        if h is not None and h > cut:
            raise ImpreciseCoordinate(
                f"coordinate {i} is only known below {cut}, above the hull value {h}"
            )
    return poly


def np_convolve(P: NewtonPolygon, Q_: NewtonPolygon) -> NewtonPolygon:
    """Convolution of convex non-increasing polygons: start at the sum of the
    starting points and lay out the merged slope multiset steepest-first."""
    x = P.start_index + Q_.start_index
    y = P.vertices[0][1] + Q_.vertices[0][1]
    edges = sorted(P.edges() + Q_.edges(), key=lambda e: e[1])
    verts = [(x, y)]
    for width, slope in edges:
        x += width
        y += slope * width
        lx, ly = verts[-1]
        # merge collinear continuations
        if len(verts) >= 2:
            px, py = verts[-2]
            if (ly - py) * (x - px) == (y - py) * (lx - px):
                verts.pop()
        verts.append((x, y))
    return NewtonPolygon(tuple(verts))


def scale_polygon(P: NewtonPolygon, j: int) -> NewtonPolygon:
    """Each vertex (n, v) -> (j n, j v); equals the j-fold convolution."""
    if j < 1:
        raise ValueError("j must be at least 1")
    return NewtonPolygon(tuple((j * n, j * v) for n, v in P.vertices))


@dataclass(frozen=True)
class MuCheckRow:
    ell: int
    index: int
    computed: Fraction
    expected: Fraction
    covered: bool

    @property
    def passed(self) -> bool:
        return self.covered and self.computed == self.expected


@dataclass(frozen=True)
class MuVerificationReport:
    p: int
    j: int
    ell_max: int
    rows: tuple[MuCheckRow, ...]
    scaling_consistent: bool
    index_convention: str

    @property
    def all_pass(self) -> bool:
        return self.scaling_consistent and all(r.passed for r in self.rows)


def verify_mu_valuations(p: int, j: int, ell_max: int, table: CarryTable | None = None) -> MuVerificationReport:
    """Expand mu^j far enough to see index j*ell_max, compare each coordinate
    valuation there with j·p/(p^ell (p-1)) as exact rationals, and check that
    the polygon of mu^j is the j-fold scaling of the polygon of mu.

    The report also records which index convention the computation supports:
    the values above sit at index j*ell; the shifted variant (the same values
    at index j*(ell+1)) is tested alongside and reported.
    """
    if p == 2:
        raise OddPrimeRequired("mu expansion implemented for odd p")
    levels = j * ell_max + 1
    if table is None:
        table = q_table(p, levels - 1)
    muj = mu_expansion(p, j, levels, table=table)
    rows = []
    for ell in range(ell_max + 1):
        idx = j * ell
        coord = muj.coords[idx]
        v = coord.valuation()
        expected = expected_mu_valuation(p, j, ell)
        covered = v is not None and (coord.cutoff is None or coord.cutoff > v)
        rows.append(MuCheckRow(ell, idx, v if v is not None else Q(-1), expected, covered))
    mu = mu_expansion(p, 1, levels, table=table)
    scaled = scale_polygon(newt_of_witt(mu), j)
    direct = newt_of_witt(muj)
    scaling_ok = scaled.equals_on(direct, levels - 1) if j > 1 else scaled.equals_on(direct, levels - 1)
    main_ok = all(r.passed for r in rows)
    shifted_ok = all(
        muj.coords[j * (ell + 1)].valuation() == expected_mu_valuation(p, j, ell)
        for ell in range(ell_max)
        if j * (ell + 1) < levels
    )
    if main_ok and not shifted_ok:
        convention = "value j*p/(p^ell(p-1)) sits at index j*ell"
    elif shifted_ok and not main_ok:
        convention = "values sit one checkpoint later (shifted convention)"
    elif main_ok and shifted_ok:
        convention = "both conventions agree on this window"
    else:
        convention = "neither convention matches"
    return MuVerificationReport(p, j, ell_max, tuple(rows), scaling_ok, convention)

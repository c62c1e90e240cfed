"""Randomized generation and end-to-end verification of Frobenius-containment
instances.

Candidates come from three heuristic families (monomial pairs, random
staircases, perturbations); every candidate is re-checked against the exact
Frobenius containment before any bound is asserted, so generator bias can
only cost coverage, never soundness.  Precision per instance starts from the
policy defaults and escalates on demand; rows that still cannot be decided
are reported as inconclusive rather than failed.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bounds import (
    BoundInputs,
    rho_bound_combined,
    rho_bound_j1,
    verify_boundedness,
)
from .errors import BKError, InsufficientPrecision, NotCofiniteAtPrecision
from .gauss import (
    PLFunction,
    comparison_envelope,
    eisenstein_power_profile,
    ideal_profile,
    pl_add,
    stabilization_radius,
)
from .ideals import CofiniteIdeal, check_frobenius_conditions
from .ring import PrecSeries, RingParams, eisenstein_params, format_series

Q = Fraction

CHECK_NAMES = (
    "sigma_within_cap",
    "rho_within_combined_bound",
    "rho_within_j1_bound",
    "p_power_in_ideal",
    "length_within_cap",
    "corner_contained",
    "profile_matches_elements",
    "profile_concave_nondecreasing",
    "frobenius_subadditive",
    "profile_below_descent_envelope",
    "stabilizes_to_rho",
    "frobenius_rescales_profile",
)


@dataclass(frozen=True)
class InstanceConfig:
    """One grid cell: parameters, instance count and seed; precision defaults
    to the policy N = d(e,j) + max(j, ell) + 2, M = p·(e·j + sigma_cap) + 1."""

    p: int
    e: int
    j: int
    ell: int | None = None
    count: int = 200
    seed: int = 0
    N: int | None = None
    M: int | None = None

    @property
    def ell_effective(self) -> int:
        return self.j + 1 if self.ell is None else self.ell

    def precision(self) -> tuple[int, int]:
        ell = self.ell_effective
        sigma_cap = BoundInputs(self.p, self.e, self.j).sigma_cap
        N = self.N
        if N is None:
            N = max(rho_bound_combined(self.p, self.e, self.j) + max(self.j, ell) + 2, 4)
        M = self.M
        if M is None:
            M = max(self.p * (self.e * self.j + sigma_cap) + 1, self.e * max(self.j, ell) + 2, 8)
        return N, M


def _params_for(cfg: InstanceConfig, scale: int = 1) -> RingParams:
    N, M = cfg.precision()
    return eisenstein_params(cfg.p, N * scale, M * scale, cfg.e)


# -- candidate recipes (precision-independent descriptions) --------------------


def _recipe_gens(recipe, params: RingParams) -> list[PrecSeries]:
    kind = recipe[0]
    if kind == "unit":
        return [params.one()]
    if kind == "stairs":
        corners = recipe[1]
        return [params.series({b: params.p**a}) for a, b in corners]
    if kind == "perturb":
        _, corners, which, mode, h_spec = recipe
        gens = [params.series({b: params.p**a}) for a, b in corners]
        h = params.series({d: c for d, c in h_spec})
        bump = params.u_power(1) if mode == "u" else params.p_power(1)
        gens[which] = gens[which] + bump * h
        return gens
    raise ValueError(f"unknown recipe {recipe!r}")


def _recipe_text(recipe, cfg: InstanceConfig) -> list[str]:
    params = _params_for(cfg)
    return [format_series(g) for g in _recipe_gens(recipe, params)]


def _candidate_recipes(cfg: InstanceConfig, rng: random.Random, attempts: int):
    """Yield candidate recipes: the unit ideal, the monomial-pair grid biased
    by the termwise-expansion heuristic, then random staircases and
    perturbations.  The exact checker downstream remains authoritative."""
    p, e, j = cfg.p, cfg.e, cfg.j
    sigma_cap = BoundInputs(p, e, j).sigma_cap
    yield ("unit",)
    pairs = []
    for a in range(1, j + 1):
        for b in range(1, sigma_cap + 2):
            heur = e * (j - (a - 1)) >= (p - 1) * b
            pairs.append((not heur, a, b))
    for _, a, b in sorted(pairs):
        yield ("stairs", ((a, 0), (0, b)))
    bmax = max(sigma_cap + 1, 2)
    for _ in range(attempts):
        roll = rng.random()
        if roll < 0.5:
            k = min(rng.randint(2, 3), j + 2, bmax)
            vals = sorted(rng.sample(range(1, j + 3), k=k), reverse=True)
            degs = sorted(rng.sample(range(1, bmax + 1), k=k))
            corners = [(vals[0], 0)] + [(vals[i], degs[i - 1]) for i in range(1, k)]
            corners.append((0, degs[k - 1]))
            yield ("stairs", tuple(corners))
        else:
            a = rng.randint(1, j)
            b = rng.randint(1, sigma_cap + 1)
            corners = ((a, 0), (0, b))
            which = rng.randint(0, 1)
            mode = rng.choice(("u", "p"))
            h_deg = rng.randint(0, 2)
            h_spec = tuple(
                (d, rng.randint(0, p - 1)) for d in range(h_deg + 1)
            )
            if all(c == 0 for _, c in h_spec):
                h_spec = ((0, 1),)
            yield ("perturb", corners, which, mode, h_spec)


def gen_situations(cfg: InstanceConfig):
    """Accepted (recipe, ideal, conditions) triples for the cell, deduplicated
    by recipe, each certified by the exact containment check."""
    rng = random.Random(f"{cfg.seed}/{cfg.p}/{cfg.e}/{cfg.j}/{cfg.ell_effective}")
    accepted = []
    seen = set()
    attempts_cap = max(4 * cfg.count, cfg.count + 200)
    attempts = 0
    for recipe in _candidate_recipes(cfg, rng, attempts_cap):
        if len(accepted) >= cfg.count or attempts >= attempts_cap:
            break
        if recipe in seen:
            continue
        seen.add(recipe)
        attempts += 1
        found = _materialize(cfg, recipe)
        if found is None:
            continue
        J, report = found
        if report.scaled_in_frobenius:
            accepted.append((recipe, J, report))
    return accepted


def _materialize(cfg: InstanceConfig, recipe, escalations: int = 2):
    """Build the ideal and run the containment check, escalating precision
    when the witness or the Frobenius headroom does not fit.  None means the
    candidate stays undecided at the precision cap."""
    for scale in [1, 2, 4][: escalations + 1]:
        params = _params_for(cfg, scale)
        try:
            J = CofiniteIdeal.generated_by(_recipe_gens(recipe, params), params)
            report = check_frobenius_conditions(J, cfg.j, cfg.ell_effective)
            return J, report
        except (NotCofiniteAtPrecision, InsufficientPrecision):
            continue
    return None


# -- per-instance verification --------------------------------------------------


def _profile_element_samples(J: CofiniteIdeal, f: PLFunction, rng: random.Random, k: int = 20) -> bool:
    """At k random radii, the minimum of v_r over polynomial lifts of the
    basis rows must reproduce the envelope (profile = monomial-hull profile).

    The lifts are genuine elements of J ((p^N, u^M) ⊂ J by the witness), and
    v_r of a lift is min over its entries of ord_p + degree·r; with r = a/b
    that is an integer minimum of b·ord + degree·a, so the whole sweep is one
    vectorized pass over the valuation matrix.
    """
    from .howell import _valuation_matrix

    params = J.params
    B = J.module.rows
    vals = _valuation_matrix(B, params.p, params.N)
    degs = np.arange(params.M, dtype=np.int64)[None, :]
    missing = vals >= params.N  # zero entries contribute nothing
    top = stabilization_radius(params.p, 3) + 2
    big = np.int64(1) << 50
    for _ in range(k):
        num = rng.randint(0, int(top * 12))
        den = 12
        scores = vals * den + degs * num
        scores = np.where(missing, big, scores)
        best = Q(int(scores.min()), den)
        if best != f(Q(num, den)):
            return False
    return True


def verify_instance(J: CofiniteIdeal, cfg: InstanceConfig, rng: random.Random, conditions=None) -> dict:
    """All per-instance checks; raises BKError subclasses on precision
    shortfalls, which the caller records as inconclusive."""
    p, e, j = cfg.p, cfg.e, cfg.j
    ell = cfg.ell_effective
    inv = J.invariants()
    inputs = BoundInputs(p, e, j)
    checks: dict[str, bool | None] = {}
    checks["sigma_within_cap"] = inv.sigma <= inputs.sigma_cap
    checks["rho_within_combined_bound"] = inv.rho <= rho_bound_combined(p, e, j)
    checks["rho_within_j1_bound"] = inv.rho <= rho_bound_j1(p, e) if j == 1 else None

    bound_report = verify_boundedness(J, j, ell, conditions=conditions)
    checks["p_power_in_ideal"] = bound_report.p_power_in_ideal
    checks["length_within_cap"] = bound_report.length_within
    checks["corner_contained"] = bound_report.corner_contained

    f = ideal_profile(J)
    g = eisenstein_power_profile(e, j)
    checks["profile_matches_elements"] = _profile_element_samples(J, f, rng)
    checks["profile_concave_nondecreasing"] = f.slopes_strictly_decrease() and f.nondecreasing()
    checks["frobenius_subadditive"] = f.rescale_argument(p).leq(pl_add(f, g))
    rmax = max([stabilization_radius(p, j)] + list(f.breakpoints)) + 1
    h = comparison_envelope(p, inv.sigma, j, rmax)
    checks["profile_below_descent_envelope"] = f.leq(h)
    checks["stabilizes_to_rho"] = f(stabilization_radius(p, j)) == inv.rho
    phi_profile = ideal_profile(J.frobenius())
    checks["frobenius_rescales_profile"] = phi_profile.eq(f.rescale_argument(p))

    row = {
        "p": p,
        "e": e,
        "j": j,
        "ell": ell,
        "N": J.params.N,
        "M": J.params.M,
        "gens": [format_series(gn) for gn in J.gens],
        "witness": J.witness,
        "sigma": inv.sigma,
        "rho": inv.rho,
        "length": inv.length,
        "cond_a": bound_report.conditions.scaled_in_frobenius,
        "cond_b": bound_report.conditions.frobenius_scaled_back,
        "checks": checks,
    }
    row["status"] = "pass" if all(v is not False for v in checks.values()) else "fail"
    return row


@dataclass
class SuiteResult:
    rows: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def failures(self) -> list[dict]:
        return [r for r in self.rows if r["status"] == "fail"]

    @property
    def all_pass(self) -> bool:
        return not self.failures


def run_cell(cfg: InstanceConfig) -> list[dict]:
    rows = []
    for idx, (recipe, J, report) in enumerate(gen_situations(cfg)):
        rng = random.Random(f"{cfg.seed}/{cfg.p}/{cfg.e}/{cfg.j}/{cfg.ell_effective}/inst{idx}")
        try:
            row = verify_instance(J, cfg, rng, conditions=report)
        except BKError as exc:
            row = {
                "p": cfg.p,
                "e": cfg.e,
                "j": cfg.j,
                "ell": cfg.ell_effective,
                "gens": _recipe_text(recipe, cfg),
                "status": "inconclusive",
                "reason": f"raise precision: {exc}",
            }
        row["index"] = idx
        rows.append(row)
    return rows


def run_suite(configs) -> SuiteResult:
    """Deterministic given seeds: cells are independent and merged in grid
    order, never completion order."""
    result = SuiteResult()
    per_cell = []
    for cfg in configs:
        rows = run_cell(cfg)
        result.rows.extend(rows)
        verified = [r for r in rows if r["status"] != "inconclusive"]
        per_cell.append(
            {
                "p": cfg.p,
                "e": cfg.e,
                "j": cfg.j,
                "ell": cfg.ell_effective,
                "instances": len(rows),
                "inconclusive": len(rows) - len(verified),
                "failures": sum(1 for r in rows if r["status"] == "fail"),
                "max_rho": max((r["rho"] for r in verified), default=0),
                "rho_bound": rho_bound_combined(cfg.p, cfg.e, cfg.j),
            }
        )
    result.summary = {
        "cells": per_cell,
        "instances": len(result.rows),
        "failures": sum(1 for r in result.rows if r["status"] == "fail"),
        "inconclusive": sum(1 for r in result.rows if r["status"] == "inconclusive"),
    }
    return result


def replay_rows(lines) -> SuiteResult:
    """Re-verify serialized rows (one JSON object per line)."""
    result = SuiteResult()
    for raw in lines:
        raw = raw.strip()
        if not raw:
            continue
        data = json.loads(raw)
        if "gens" not in data:
            continue
        cfg = InstanceConfig(
            p=data["p"], e=data["e"], j=data["j"], ell=data.get("ell"),
            N=data.get("N"), M=data.get("M"),
        )
        params = _params_for(cfg)
        from .ring import parse_series

        gens = [parse_series(text, params) for text in data["gens"]]
        rng = random.Random(f"replay/{data.get('index', 0)}")
        try:
            J = CofiniteIdeal.generated_by(gens, params)
            row = verify_instance(J, cfg, rng)
        except BKError as exc:
            row = {"status": "inconclusive", "reason": str(exc), "gens": data["gens"]}
        row["index"] = data.get("index", 0)
        result.rows.append(row)
    result.summary = {
        "instances": len(result.rows),
        "failures": sum(1 for r in result.rows if r["status"] == "fail"),
        "inconclusive": sum(1 for r in result.rows if r["status"] == "inconclusive"),
    }
    return result

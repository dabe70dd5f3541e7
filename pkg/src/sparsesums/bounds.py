"""Numeric bound catalog: every estimate evaluated with constant 1 and o(1)=0.

Bound values here are comparable indices, not certified majorants; only the
Weil and trivial estimates (and, elsewhere, the bilinear and Cauchy-step
inequalities) are asserted as true inequalities by the test suites. Piecewise
bounds carry a regime label naming the branch whose condition held; branch
conditions are tested top-to-bottom with >= thresholds, and all thresholds use
the natural logarithm.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log, sqrt

from .errors import OrderingViolated
from .field import FieldCtx, SparsePoly
from .subgroups import GcdParams, gcd_params
from .sums import CharacterIndex, sum_exact

EXACT_MAGNITUDE_BUDGET = 10**6
CATALOG_ORDER = ("weil", "ccp", "cp", "gcd")


def threshold(p: int) -> float:
    """The regime threshold sqrt(p) * ln(p)."""
    return sqrt(p) * log(p)


def weil_bound(p: int, exponents) -> float:
    """max(k_i) * sqrt(p)."""
    return max(exponents) * sqrt(p)


def ccp_bound(p: int, k: int, l: int, m: int, n: int) -> tuple[float, bool]:
    """(klmn/max)^(1/9) * p^(8/9); nontrivial iff klmn/max < p."""
    reduced = k * l * m * n / max(k, l, m, n)
    return reduced ** (1 / 9) * p ** (8 / 9), reduced < p


def cp_bound(p: int, k: int, l: int, m: int, n: int) -> tuple[float, bool]:
    """(klmn)^(1/16) * p^(7/8); nontrivial iff klmn < p^2."""
    prod = k * l * m * n
    return prod ** (1 / 16) * p ** (7 / 8), prod < p * p


@dataclass(frozen=True)
class PiecewiseBound:
    """A two-part bound: leading term plus the selected regime term."""

    value: float
    regime: str
    leading_term: float
    regime_term: float


@dataclass(frozen=True)
class GcdBound(PiecewiseBound):
    params: GcdParams = None  # type: ignore[assignment]


def _gcd_bound_for_params(pk: GcdParams) -> GcdBound:
    p, f, g, delta = pk.p, pk.f, pk.g, pk.delta
    t = threshold(p)
    leading = p * g ** (-1 / 8)
    if g >= t:
        regime, term = "g_large", p ** (15 / 16) * delta ** (1 / 32)
    elif f >= t:
        regime, term = "f_large", p ** (31 / 32) * delta ** (1 / 32) * g ** (-1 / 16)
    elif p / delta >= t:
        regime, term = "pdelta_large", p * delta ** (1 / 32) * (f * g) ** (-1 / 16)
    else:
        regime, term = "pdelta_small", p ** (31 / 32) * delta ** (3 / 32) * (f * g) ** (-1 / 16)
    return GcdBound(
        value=leading + term, regime=regime, leading_term=leading, regime_term=term, params=pk
    )


def quadrinomial_gcd_bound(
    p: int, k: int, l: int, m: int, n: int, mode: str = "canonical"
) -> GcdBound:
    """The gcd-parameterized four-regime bound p*g^(-1/8) + regime term.

    canonical mode evaluates the pack with the last exponent in the delta
    role; best mode minimizes the value over all four delta-role assignments.
    """
    packs = gcd_params(p, k, l, m, n, mode=mode)
    if isinstance(packs, GcdParams):
        return _gcd_bound_for_params(packs)
    return min((_gcd_bound_for_params(pk) for pk in packs), key=lambda b: b.value)


def quadlinear_subgroup_bound(p: int, w: int, x: int, y: int, z: int) -> PiecewiseBound:
    """Bound for the quadrilinear sum over subgroups with W >= X >= Y >= Z."""
    if not w >= x >= y >= z >= 1:
        raise OrderingViolated(f"need W >= X >= Y >= Z >= 1, got {(w, x, y, z)}")
    t = threshold(p)
    leading = w * x * z * y ** (7 / 8)
    if y >= t:
        regime, term = "y_large", w ** (31 / 32) * x * y * z * p ** (-1 / 32)
    elif x >= t:
        regime, term = "x_large", w ** (31 / 32) * x * y ** (15 / 16) * z
    elif w >= t:
        regime, term = "w_large", w ** (31 / 32) * (x * y) ** (15 / 16) * z * p ** (1 / 32)
    else:
        regime, term = "w_small", w ** (29 / 32) * (x * y) ** (15 / 16) * z * p ** (1 / 16)
    return PiecewiseBound(value=leading + term, regime=regime, leading_term=leading, regime_term=term)


def quadlinear_general_bound(p: int, w: int, x: int, y: int, z: int) -> float:
    """Arbitrary-set quadrilinear bound p^(1/16) W^(15/16) (XY)^(61/64) Z^(31/32)."""
    return p ** (1 / 16) * w ** (15 / 16) * (x * y) ** (61 / 64) * z ** (31 / 32)


def dx_bound(p: int, g: int) -> tuple[float, str]:
    """Two-regime bound on the difference-product count of a subgroup."""
    if g >= threshold(p):
        return g**8 / p, "large"
    return g**6 * log(g) if g > 1 else 0.0, "small"


def shifted_energy_bound(p: int, g: int) -> tuple[float, str]:
    """Three-regime bound on |E(G + lam) - G^4/p|."""
    if g >= p ** (2 / 3):
        return sqrt(p) * g ** (3 / 2), "top"
    if g >= threshold(p):
        return g**3 / sqrt(p), "middle"
    return g**2 * log(g) if g > 1 else 0.0, "small"


def n_triples_bound(p: int, f: int, g: int, h: int) -> tuple[float, str]:
    """Three-regime bound on the count of f1(g1-g2) == f2(h1-h2), G >= H."""
    if g < h:
        raise OrderingViolated(f"need G >= H, got G={g}, H={h}")
    lead = f * f / sqrt(max(f, g))
    t = threshold(p)
    if h >= t:
        return lead * g * g * h * h / sqrt(p), "h_large"
    if g >= t:
        return lead * g * g * h ** (3 / 2) * p ** (-1 / 4), "g_large"
    return lead * (g * h) ** (3 / 2), "g_small"


@dataclass(frozen=True)
class BoundEntry:
    value: float
    regime: str | None
    nontrivial: bool  # value < p - 1


@dataclass(frozen=True)
class BoundReport:
    p: int
    bounds: dict[str, BoundEntry]
    params: GcdParams
    winner: str
    exact_magnitude: float | None


def compare_bounds(
    ctx: FieldCtx, psi: SparsePoly, chi: CharacterIndex, mode: str = "canonical"
) -> BoundReport:
    """Evaluate the whole catalog for one quadrinomial and pick the winner.

    The report-level nontrivial flag is uniform (value < p-1) for every entry;
    the classical validity conditions of ccp/cp are separate and returned by
    those functions directly. Winner is the smallest nontrivial bound, ties
    broken by catalog order; trivial wins only if nothing beats p-1.
    """
    if psi.t != 4:
        raise ValueError(f"need a quadrinomial, got t={psi.t}")
    p = ctx.p
    k, l, m, n = psi.exponents
    gb = quadrinomial_gcd_bound(p, k, l, m, n, mode=mode)
    values: dict[str, tuple[float, str | None]] = {
        "weil": (weil_bound(p, (k, l, m, n)), None),
        "ccp": (ccp_bound(p, k, l, m, n)[0], None),
        "cp": (cp_bound(p, k, l, m, n)[0], None),
        "gcd": (gb.value, gb.regime),
    }
    trivial = float(p - 1)
    bounds = {
        name: BoundEntry(value=v, regime=r, nontrivial=v < trivial)
        for name, (v, r) in values.items()
    }
    bounds["trivial"] = BoundEntry(value=trivial, regime=None, nontrivial=False)
    winner = "trivial"
    best = float("inf")
    for name in CATALOG_ORDER:
        entry = bounds[name]
        if entry.nontrivial and entry.value < best:
            winner, best = name, entry.value
    exact = None
    if p <= EXACT_MAGNITUDE_BUDGET:
        exact = sum_exact(ctx, psi, chi).magnitude
    return BoundReport(p=p, bounds=bounds, params=gb.params, winner=winner, exact_magnitude=exact)

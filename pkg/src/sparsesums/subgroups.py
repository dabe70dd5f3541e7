"""Multiplicative subgroups, power-map images, and the gcd parameter pack.

The bound machinery needs, for exponents (k, l, m, n) of a quadrinomial, the
gcds with p-1 and the reduced quotients

    f = alpha / gcd(alpha, delta),  g = beta / gcd(beta, delta),
    h = gamma / gcd(gamma, delta),

ordered f >= g >= h. The roles of the first three exponents are
interchangeable (the sum is symmetric in its terms), so `canonical` mode
permutes only those; `best` mode additionally tries each exponent in the
delta role and returns all four candidate packs for downstream selection.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, lcm

import numpy as np

from .errors import NonUniformImage, NotADivisor
from .field import FieldCtx


@dataclass(frozen=True)
class Subgroup:
    """The unique multiplicative subgroup of a given order d | p-1."""

    order: int
    elements: tuple[int, ...]  # sorted residues

    def __len__(self) -> int:
        return self.order

    def as_array(self) -> np.ndarray:
        return np.asarray(self.elements, dtype=np.int64)


def subgroup_of_order(ctx: FieldCtx, d: int) -> Subgroup:
    """Elements x with x**d == 1 mod p, i.e. the image of g**((p-1)/d)."""
    if d < 1 or (ctx.p - 1) % d != 0:
        raise NotADivisor(f"order {d} does not divide p-1={ctx.p - 1}")
    step = (ctx.p - 1) // d
    elems = ctx.g_pow[np.arange(d, dtype=np.int64) * step]
    return Subgroup(order=d, elements=tuple(sorted(int(x) for x in elems)))


def all_subgroups(ctx: FieldCtx) -> list[Subgroup]:
    """Every subgroup of F_p^*, ordered by increasing order."""
    n = ctx.p - 1
    divisors = sorted(d for d in range(1, n + 1) if n % d == 0)
    return [subgroup_of_order(ctx, d) for d in divisors]


def product_set(ctx: FieldCtx, subgroups: list[Subgroup]) -> Subgroup:
    """Set of all products a_1 * ... * a_r, one factor per subgroup.

    For subgroups of a cyclic group this is again a subgroup, of order
    lcm(orders); the enumeration result is asserted against that closed form.
    """
    if not subgroups:
        raise ValueError("need at least one subgroup")
    acc = subgroups[0].as_array()
    for sub in subgroups[1:]:
        prods = (acc[:, None] * sub.as_array()[None, :]) % ctx.p
        acc = np.unique(prods.reshape(-1))
    expected = subgroup_of_order(ctx, lcm(*[s.order for s in subgroups]))
    computed = tuple(int(x) for x in np.sort(acc))
    if computed != expected.elements:
        raise AssertionError(
            f"product set of orders {[s.order for s in subgroups]} is not the "
            f"lcm-order subgroup (p={ctx.p})"
        )
    return expected


@dataclass(frozen=True)
class ImageWithMultiplicity:
    """Image of a power map together with its (uniform) fiber size."""

    image: tuple[int, ...]  # sorted residues
    multiplicity: int
    source_size: int


def power_image(ctx: FieldCtx, source: Subgroup | None, n: int) -> ImageWithMultiplicity:
    """Image of x -> x**n on a subgroup (or, with source=None, on all of F_p^*).

    The closed forms: on the full group the image has (p-1)/delta elements with
    multiplicity delta = gcd(n, p-1); on a subgroup of order a it has
    a/gcd(a, n) elements with multiplicity gcd(a, n). Uniformity is verified by
    counting rather than assumed.
    """
    p = ctx.p
    if source is None:
        xs = np.arange(1, p, dtype=np.int64)
    else:
        xs = source.as_array()
    k = n % (p - 1)
    if k == 0:
        values = np.ones_like(xs)
    else:
        values = ctx.g_pow[(k * ctx.dlog[xs]) % (p - 1)]
    image, counts = np.unique(values, return_counts=True)
    mult = int(counts[0])
    if not np.all(counts == mult):
        raise NonUniformImage(
            f"power map x**{n} on source of size {len(xs)} has fibers {set(counts.tolist())}"
        )
    return ImageWithMultiplicity(
        image=tuple(int(x) for x in image), multiplicity=mult, source_size=len(xs)
    )


@dataclass(frozen=True)
class GcdParams:
    """Parameter pack (alpha, beta, gamma, delta, f, g, h) for a quadrinomial.

    role_perm[i] is the index (into the input exponent tuple) assigned to role
    i, roles ordered (k, l, m, n); the n-role exponent supplies delta.
    """

    p: int
    alpha: int
    beta: int
    gamma: int
    delta: int
    f: int
    g: int
    h: int
    role_perm: tuple[int, int, int, int]

    @property
    def p_over_delta(self) -> float:
        return self.p / self.delta


def _pack_for_delta_role(p: int, exps: tuple[int, int, int, int], delta_pos: int) -> GcdParams:
    delta = gcd(exps[delta_pos], p - 1)
    rest = [i for i in range(4) if i != delta_pos]
    scored = []
    for pos in rest:
        a = gcd(exps[pos], p - 1)
        scored.append((a // gcd(a, delta), a, pos))
    # descending quotient; ties keep input order for determinism
    scored.sort(key=lambda t: (-t[0], t[2]))
    (f, alpha, pf), (g, beta, pg), (h, gamma, ph) = scored
    # f*delta = lcm(alpha, delta) divides p-1, so f <= p/delta always
    assert f * delta < p, (p, exps, delta_pos)
    return GcdParams(
        p=p, alpha=alpha, beta=beta, gamma=gamma, delta=delta,
        f=f, g=g, h=h, role_perm=(pf, pg, ph, delta_pos),
    )


def gcd_params(
    p: int, k: int, l: int, m: int, n: int, mode: str = "canonical"
) -> GcdParams | tuple[GcdParams, ...]:
    """Gcd parameter pack(s) for exponents (k, l, m, n) of a quadrinomial.

    canonical: the last exponent keeps the delta role; the first three are
    permuted so f >= g >= h. best: all four delta-role assignments are
    returned (a 4-tuple) for the caller to minimize over.
    """
    exps = (k, l, m, n)
    if any(e < 1 for e in exps):
        raise ValueError(f"exponents must be >= 1, got {exps}")
    if mode == "canonical":
        return _pack_for_delta_role(p, exps, 3)
    if mode == "best":
        return tuple(_pack_for_delta_role(p, exps, i) for i in range(4))
    raise ValueError(f"mode must be 'canonical' or 'best', got {mode!r}")

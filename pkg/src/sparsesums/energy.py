"""Exact combinatorial counts: multiplicative energy, difference-product counts.

Every quantity has two routes that must agree to the integer:

  * oracle    - brute-force comparison or direct loops, heavily size-gated,
  * optimized - frequency tables, weighted bincounts, and (for the
                difference-product count) a cyclic convolution in the
                discrete-log domain.

Counts are returned as Python ints (unbounded), and every accumulation of
squared or multiplied frequencies is done in Python-int arithmetic so no
64-bit overflow is possible regardless of input sizes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded
from .field import FieldCtx
from .subgroups import Subgroup

ORACLE_PAIR_BUDGET = 5_000       # all-pairs comparison arrays
ORACLE_LOOP_BUDGET = 4_000_000   # python-loop enumerations
DTIMES_ORACLE_MAX = 60           # |U| cap for the d_times oracle route
DTIMES_OPT_MAX = 10_000          # |U| cap for the optimized route
DTIMES_OPT_P_MAX = 10**6
FREQ_BUDGET = 10**8              # frequency-table products
DIRECT_CONV_MAX = 4096           # above this, cyclic convolution goes through FFT


@dataclass(frozen=True)
class CountValue:
    count: int
    method: str  # "oracle" | "optimized"


@dataclass(frozen=True)
class Distribution:
    """Counts per residue; zero_count carries mass at 0 when the table omits it."""

    table: dict[int, int] = field(hash=False)
    total: int
    zero_count: int = 0


def _as_array(s) -> np.ndarray:
    if isinstance(s, Subgroup):
        return s.as_array()
    return np.asarray(sorted(int(x) for x in s), dtype=np.int64)


def _chunked_bincount(rows: np.ndarray, cols: np.ndarray, p: int, op) -> np.ndarray:
    """Accumulate bincount of op(rows[i], cols[j]) % p over all pairs, in blocks."""
    out = np.zeros(p, dtype=np.int64)
    step = max(1, 2**22 // max(1, len(cols)))
    for start in range(0, len(rows), step):
        block = op(rows[start : start + step, None], cols[None, :]) % p
        out += np.bincount(block.reshape(-1), minlength=p)
    return out


def diff_counts(p: int, u: np.ndarray) -> np.ndarray:
    """d[a] = #{(x, y) in U^2 : x - y == a mod p}, length-p table."""
    return _chunked_bincount(u, u, p, np.subtract)


def _sum_of_squares(counts: np.ndarray) -> int:
    return sum(int(c) * int(c) for c in counts[counts > 0].tolist())


def mult_energy(ctx: FieldCtx, us, vs, method: str = "optimized") -> CountValue:
    """Solutions of u1 v1 == u2 v2 mod p with u_i in U, v_i in V."""
    p = ctx.p
    u = _as_array(us)
    v = _as_array(vs)
    n = len(u) * len(v)
    if method == "optimized":
        if n > FREQ_BUDGET:
            raise BudgetExceeded(f"product table of size {n} exceeds {FREQ_BUDGET}")
        counts = _chunked_bincount(u, v, p, np.multiply)
        return CountValue(count=_sum_of_squares(counts), method=method)
    if method == "oracle":
        if n > ORACLE_PAIR_BUDGET:
            raise BudgetExceeded(f"oracle pair comparison at n={n} exceeds {ORACLE_PAIR_BUDGET}")
        prods = ((u[:, None] * v[None, :]) % p).reshape(-1)
        total = 0
        for start in range(0, n, 512):
            total += int((prods[start : start + 512, None] == prods[None, :]).sum())
        return CountValue(count=total, method=method)
    raise ValueError(f"unknown method {method!r}")


def shifted_energy(ctx: FieldCtx, g: Subgroup, lam: int, method: str = "optimized") -> CountValue:
    """mult_energy of the shifted set G + lam (which may contain 0)."""
    shifted = (g.as_array() + lam) % ctx.p
    return mult_energy(ctx, shifted.tolist(), shifted.tolist(), method=method)


def d_times(ctx: FieldCtx, us, method: str = "optimized") -> CountValue:
    """Solutions of (u1-v1)(u2-v2) == (u3-v3)(u4-v4) over U, all eight free.

    Both routes go through the difference table d(a); they differ in how the
    multiplicative convolution r(mu) = sum over ab == mu of d(a) d(b) is
    formed: the oracle accumulates the outer product of supports directly, the
    optimized route maps nonzero differences through the discrete log and
    performs a cyclic convolution of length p-1. The answer is sum of r(mu)^2.
    """
    p = ctx.p
    u = _as_array(us)
    d = diff_counts(p, u)
    d0 = int(d[0])
    # pairs (a, b) with ab == 0: a == 0 or b == 0
    total_mass = len(u) * len(u)
    r0 = 2 * d0 * total_mass - d0 * d0

    if method == "oracle":
        if len(u) > DTIMES_ORACLE_MAX:
            raise BudgetExceeded(f"|U|={len(u)} exceeds oracle cap {DTIMES_ORACLE_MAX}")
        support = np.nonzero(d[1:])[0] + 1
        weights = d[support]
        r = np.zeros(p, dtype=np.int64)
        for a, wa in zip(support.tolist(), weights.tolist()):
            np.add.at(r, (a * support) % p, wa * weights)
        return CountValue(count=r0 * r0 + _sum_of_squares(r), method=method)

    if method == "optimized":
        if len(u) > DTIMES_OPT_MAX or p > DTIMES_OPT_P_MAX:
            raise BudgetExceeded(f"|U|={len(u)}, p={p} out of optimized range")
        n = p - 1
        vec = np.zeros(n, dtype=np.int64)
        support = np.nonzero(d[1:])[0] + 1
        vec[ctx.dlog[support]] = d[support]
        if n <= DIRECT_CONV_MAX:
            full = np.convolve(vec, vec)
            conv = full[:n].copy()
            conv[: n - 1] += full[n:]
        else:
            f = np.fft.rfft(vec.astype(np.float64))
            approx = np.fft.irfft(f * f, n)
            conv = np.rint(approx).astype(np.int64)
            if np.max(np.abs(approx - conv)) > 0.25 or conv.sum() != int(vec.sum()) ** 2:
                raise AssertionError("FFT convolution failed its exactness checks")
        return CountValue(count=r0 * r0 + _sum_of_squares(conv), method=method)

    raise ValueError(f"unknown method {method!r}")


def _difference_values(p: int, s: np.ndarray) -> np.ndarray:
    return ((s[:, None] - s[None, :]) % p).reshape(-1)


def n_triples(
    ctx: FieldCtx, fs, gs, hs, method: str = "optimized"
) -> CountValue:
    """Solutions of f1 (g1 - g2) == f2 (h1 - h2)."""
    p = ctx.p
    f = _as_array(fs)
    g = _as_array(gs)
    h = _as_array(hs)
    left_n = len(f) * len(g) ** 2
    right_n = len(f) * len(h) ** 2
    if method == "optimized":
        if left_n > FREQ_BUDGET or right_n > FREQ_BUDGET:
            raise BudgetExceeded(
                f"triple tables {left_n}/{right_n} exceed {FREQ_BUDGET}"
            )
        r_fg = _chunked_bincount(f, _difference_values(p, g), p, np.multiply)
        r_fh = _chunked_bincount(f, _difference_values(p, h), p, np.multiply)
        count = sum(
            int(a) * int(b)
            for a, b in zip(r_fg.tolist(), r_fh.tolist())
            if a and b
        )
        return CountValue(count=count, method=method)
    if method == "oracle":
        if left_n > ORACLE_PAIR_BUDGET or right_n > ORACLE_PAIR_BUDGET:
            raise BudgetExceeded(
                f"oracle pair comparison {left_n}x{right_n} exceeds {ORACLE_PAIR_BUDGET}"
            )
        left = ((f[:, None] * _difference_values(p, g)[None, :]) % p).reshape(-1)
        right = ((f[:, None] * _difference_values(p, h)[None, :]) % p).reshape(-1)
        count = 0
        for start in range(0, len(left), 512):
            count += int((left[start : start + 512, None] == right[None, :]).sum())
        return CountValue(count=count, method=method)
    raise ValueError(f"unknown method {method!r}")


def j_distribution(ctx: FieldCtx, xs, ys, method: str = "optimized") -> Distribution:
    """J(mu) = #{(x1,x2,y1,y2) : (x1-x2)(y1-y2) == mu}, nonzero mu only.

    Zero products are excluded from the table and reported via zero_count;
    table total + zero_count equals |X|^2 |Y|^2.
    """
    p = ctx.p
    x = _as_array(xs)
    y = _as_array(ys)
    mass = len(x) ** 2 * len(y) ** 2
    if method == "optimized":
        if mass > FREQ_BUDGET:
            raise BudgetExceeded(f"J frequency product {mass} exceeds {FREQ_BUDGET}")
        dx = diff_counts(p, x)
        dy = diff_counts(p, y)
        dx0, dy0 = int(dx[0]), int(dy[0])
        sx = np.nonzero(dx[1:])[0] + 1
        sy = np.nonzero(dy[1:])[0] + 1
        r = np.zeros(p, dtype=np.int64)
        for a, wa in zip(sx.tolist(), dx[sx].tolist()):
            np.add.at(r, (a * sy) % p, wa * dy[sy])
        zero_count = dx0 * len(y) ** 2 + dy0 * len(x) ** 2 - dx0 * dy0
    elif method == "oracle":
        if mass > ORACLE_LOOP_BUDGET:
            raise BudgetExceeded(f"J oracle enumeration {mass} exceeds {ORACLE_LOOP_BUDGET}")
        r = np.zeros(p, dtype=np.int64)
        zero_count = 0
        dx_list = _difference_values(p, x).tolist()
        dy_list = _difference_values(p, y).tolist()
        for a in dx_list:
            for b in dy_list:
                mu = a * b % p
                if mu == 0:
                    zero_count += 1
                else:
                    r[mu] += 1
    else:
        raise ValueError(f"unknown method {method!r}")
    table = {int(i): int(c) for i, c in enumerate(r.tolist()) if c}
    return Distribution(table=table, total=sum(table.values()), zero_count=zero_count)


@dataclass(frozen=True)
class CauchyStepReport:
    """Exact integer audit of the Cauchy step for one subgroup triple.

    The true consequence of applying Cauchy's inequality to
    N = (F^2 G H / |S|) * sum over lam in S of cnt(lam), with
    cnt(lam) = #{(g, h) : lam (g - 1) == h - 1}, is

        N^2 * |S| <= F^4 G^2 H^2 * sum of cnt(lam)^2      (intermediate form).

    Collapsing sum cnt^2 to (E(G-1) E(H-1))^(1/2) gives the stated

        N^4 * |S|^2 <= F^8 G^4 H^4 * E(G-1) * E(H-1)      (collapsed form),

    but the degenerate pair g == h == 1 satisfies lam * 0 == 0 for every
    lam in S, contributing |S| to the square sum while the energy product
    absorbs it only once; the collapsed form is therefore falsifiable (and
    is falsified) when G and H are small relative to F, while the
    intermediate form holds on every triple.
    """

    n: int
    product_order: int
    energy_g: int
    energy_h: int
    lambda_square_sum: int
    collapsed_holds: bool
    intermediate_holds: bool


def _shifted_elements(p: int, sub: Subgroup, lam: int) -> np.ndarray:
    return (sub.as_array() + lam) % p


def lambda_square_sum(ctx: FieldCtx, s: Subgroup, g: Subgroup, h: Subgroup) -> int:
    """sum over lam in S of #{(g, h) in G x H : lam (g - 1) == h - 1}, squared."""
    p = ctx.p
    h_ind = np.zeros(p, dtype=np.int64)
    h_ind[_shifted_elements(p, h, p - 1)] = 1
    g_shift = _shifted_elements(p, g, p - 1)
    total = 0
    lams = s.as_array()
    for start in range(0, len(lams), 512):
        block = lams[start : start + 512]
        cnt = h_ind[(block[:, None] * g_shift[None, :]) % p].sum(axis=1)
        total += sum(int(c) * int(c) for c in cnt.tolist())
    return total


def cauchy_step_report(ctx: FieldCtx, f: Subgroup, g: Subgroup, h: Subgroup) -> CauchyStepReport:
    """Audit both forms of the Cauchy step on (F, G, H), exactly in integers."""
    from .subgroups import product_set

    p = ctx.p
    n = n_triples(ctx, f, g, h, method="optimized").count
    s = product_set(ctx, [f, g, h])
    eg = mult_energy(
        ctx, _shifted_elements(p, g, p - 1).tolist(), _shifted_elements(p, g, p - 1).tolist()
    ).count
    eh = mult_energy(
        ctx, _shifted_elements(p, h, p - 1).tolist(), _shifted_elements(p, h, p - 1).tolist()
    ).count
    sq = lambda_square_sum(ctx, s, g, h)
    fo, go, ho = f.order, g.order, h.order
    collapsed = n**4 * s.order**2 <= fo**8 * go**4 * ho**4 * eg * eh
    intermediate = n**2 * s.order <= fo**4 * go**2 * ho**2 * sq
    return CauchyStepReport(
        n=n,
        product_order=s.order,
        energy_g=eg,
        energy_h=eh,
        lambda_square_sum=sq,
        collapsed_holds=collapsed,
        intermediate_holds=intermediate,
    )


def i_distribution(ctx: FieldCtx, ws, zs, method: str = "optimized") -> Distribution:
    """I(lam) = #{(w1,w2,z) : z (w1 - w2) == lam}, lam == 0 included."""
    p = ctx.p
    w = _as_array(ws)
    z = _as_array(zs)
    mass = len(w) ** 2 * len(z)
    if method == "optimized":
        if mass > FREQ_BUDGET:
            raise BudgetExceeded(f"I frequency product {mass} exceeds {FREQ_BUDGET}")
        dw = diff_counts(p, w)
        sw = np.nonzero(dw[1:])[0] + 1
        r = np.zeros(p, dtype=np.int64)
        for a, wa in zip(sw.tolist(), dw[sw].tolist()):
            np.add.at(r, (a * z) % p, wa)
        r[0] += int(dw[0]) * len(z)
    elif method == "oracle":
        if mass > ORACLE_LOOP_BUDGET:
            raise BudgetExceeded(f"I oracle enumeration {mass} exceeds {ORACLE_LOOP_BUDGET}")
        r = np.zeros(p, dtype=np.int64)
        w_list = w.tolist()
        for w1 in w_list:
            for w2 in w_list:
                for zz in z.tolist():
                    r[zz * (w1 - w2) % p] += 1
    else:
        raise ValueError(f"unknown method {method!r}")
    table = {int(i): int(c) for i, c in enumerate(r.tolist()) if c}
    return Distribution(table=table, total=sum(table.values()), zero_count=0)

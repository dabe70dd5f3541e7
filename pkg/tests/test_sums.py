"""Exact sums, the grouped decomposition, and the inequality-shaped sums."""

from __future__ import annotations

from math import gcd, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsesums import (
    BudgetExceeded,
    CharacterIndex,
    NonzeroRequired,
    SparsePoly,
    bilinear_sum,
    quadlinear_sum,
    subgroup_of_order,
    sum_decomposed,
    sum_exact,
    unit_weights,
)
from conftest import ctx_for


def brute_sum(p: int, terms, j: int) -> complex:
    """Direct double-precision oracle, no tables."""
    from math import pi

    ctx = ctx_for(p)
    total = 0.0 + 0.0j
    for x in range(1, p):
        val = sum(c * pow(x, k, p) for c, k in terms) % p
        t = ctx.dlog[x]
        total += np.exp(2j * pi * j * t / (p - 1)) * np.exp(2j * pi * val / p)
    return total


def test_sum_exact_trivial_character_is_real_plus_noise(ctx13):
    psi = SparsePoly.parse(13, "1,3;1,1")
    sv = sum_exact(ctx13, psi, CharacterIndex(0))
    # for j=0 the sum is a real algebraic number
    assert abs(sv.value.imag) < 1e-12
    assert sv.value.real == pytest.approx(4.6799784917049525, abs=1e-12)


def test_sum_exact_frozen_value_p31():
    ctx = ctx_for(31)
    psi = SparsePoly.parse(31, "2,6;3,10;5,15;7,5")
    sv = sum_exact(ctx, psi, CharacterIndex(1))
    assert sv.value.real == pytest.approx(9.291842982352723, abs=1e-12)
    assert sv.value.imag == pytest.approx(-0.8635608470892147, abs=1e-12)


@pytest.mark.parametrize("p", [11, 13, 31, 101])
def test_sum_exact_matches_brute_oracle(p):
    ctx = ctx_for(p)
    rng = np.random.default_rng(p)
    for _ in range(5):
        exps = rng.choice(p - 2, size=3, replace=False) + 1
        coeffs = rng.integers(1, p, size=3)
        terms = list(zip(coeffs.tolist(), exps.tolist()))
        j = int(rng.integers(0, p - 1))
        psi = SparsePoly.from_terms(p, terms)
        sv = sum_exact(ctx, psi, CharacterIndex(j))
        assert abs(sv.value - brute_sum(p, terms, j)) < 1e-9


def test_character_index_normalizes_mod_p_minus_1(ctx13):
    psi = SparsePoly.parse(13, "1,3;1,1")
    a = sum_exact(ctx13, psi, CharacterIndex(5))
    b = sum_exact(ctx13, psi, CharacterIndex(5 + 12))
    assert a.value == b.value


@settings(deadline=None, max_examples=40)
@given(
    p=st.sampled_from([11, 13, 31, 61]),
    j=st.integers(min_value=0, max_value=100),
    data=st.data(),
)
def test_decomposition_identity_property(p, j, data):
    exps = data.draw(
        st.lists(
            st.integers(min_value=1, max_value=p - 2),
            min_size=4,
            max_size=4,
            unique=True,
        )
    )
    coeffs = data.draw(
        st.lists(st.integers(min_value=1, max_value=p - 1), min_size=4, max_size=4)
    )
    ctx = ctx_for(p)
    psi = SparsePoly.from_terms(p, list(zip(coeffs, exps)))
    chi = CharacterIndex(j)
    direct = sum_exact(ctx, psi, chi)
    grouped = sum_decomposed(ctx, psi, chi)
    assert abs(direct.value - grouped.value) / (direct.magnitude + 1.0) < 1e-6


def test_decomposition_term_count_and_budget(ctx13):
    psi = SparsePoly.parse(13, "1,4;1,6;1,3;1,2")
    sv = sum_decomposed(ctx13, psi, CharacterIndex(0))
    a, b, c = gcd(4, 12), gcd(6, 12), gcd(3, 12)
    assert sv.term_count == a * b * c * 12
    with pytest.raises(BudgetExceeded):
        sum_decomposed(ctx13, psi, CharacterIndex(0), budget=10)


def test_decomposition_needs_four_terms(ctx13):
    psi = SparsePoly.parse(13, "1,3;1,1")
    with pytest.raises(ValueError):
        sum_decomposed(ctx13, psi, CharacterIndex(0))


def test_bilinear_sum_unit_weights_inequality():
    ctx = ctx_for(101)
    rng = np.random.default_rng(5)
    for _ in range(20):
        nx, ny = int(rng.integers(2, 40)), int(rng.integers(2, 40))
        xs = rng.choice(101, size=nx, replace=False)
        ys = rng.choice(101, size=ny, replace=False)
        sv = bilinear_sum(ctx, xs, ys, unit_weights(nx), unit_weights(ny))
        assert sv.magnitude <= sqrt(101 * nx * ny) + 1e-9


def test_bilinear_sum_oracle(ctx13):
    xs, ys = [1, 2, 5], [3, 4]
    aw = np.array([1.0, 1j, -1.0])
    bw = np.array([0.5, -0.5j])
    sv = bilinear_sum(ctx13, xs, ys, aw, bw)
    expect = sum(
        a * b * np.exp(2j * np.pi * (x * y % 13) / 13)
        for x, a in zip(xs, aw)
        for y, b in zip(ys, bw)
    )
    assert abs(sv.value - expect) < 1e-12


def test_quadlinear_sum_matches_direct(ctx13):
    ws = subgroup_of_order(ctx13, 3).elements
    xs = subgroup_of_order(ctx13, 2).elements
    ys = (1, 2)
    zs = (1, 5, 8)
    nw, nx, ny, nz = len(ws), len(xs), len(ys), len(zs)
    theta = unit_weights(nw, nx, ny)
    rho = unit_weights(nw, nx, nz)
    sigma = unit_weights(nw, ny, nz)
    tau = unit_weights(nx, ny, nz)
    sv = quadlinear_sum(ctx13, ws, xs, ys, zs, theta, rho, sigma, tau, a=1)
    expect = sum(
        np.exp(2j * np.pi * (w * x * y * z % 13) / 13)
        for w in ws
        for x in xs
        for y in ys
        for z in zs
    )
    assert abs(sv.value - expect) < 1e-12


def test_quadlinear_sum_weighted_oracle(ctx13):
    # non-unit triple weights exercise the axis alignment under sorting
    ws, xs, ys, zs = (3, 1), (1, 5), (2, 1, 6), (4,)
    rng = np.random.default_rng(42)

    def w3(*shape):
        return np.exp(2j * np.pi * rng.random(shape))

    theta, rho = w3(2, 2, 3), w3(2, 2, 1)
    sigma, tau = w3(2, 3, 1), w3(2, 3, 1)
    sv = quadlinear_sum(ctx13, ws, xs, ys, zs, theta, rho, sigma, tau, a=2)
    expect = 0j
    for iw, w in enumerate(ws):
        for ix, x in enumerate(xs):
            for iy, y in enumerate(ys):
                for iz, z in enumerate(zs):
                    expect += (
                        theta[iw, ix, iy]
                        * rho[iw, ix, iz]
                        * sigma[iw, iy, iz]
                        * tau[ix, iy, iz]
                        * np.exp(2j * np.pi * (2 * w * x * y * z % 13) / 13)
                    )
    assert abs(sv.value - expect) < 1e-12


def test_quadlinear_sum_rejects_zero_scale(ctx13):
    sets = ((1,), (1,), (1,), (1,))
    one = unit_weights(1, 1, 1)
    with pytest.raises(NonzeroRequired):
        quadlinear_sum(ctx13, *sets, one, one, one, one, a=13)

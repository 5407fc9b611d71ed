import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nflab.lattice import SPACETIME, SPATIAL, SpectralField, make_grid, random_field
from nflab.multiplier import (MultiplierSpec, SpaceIndex, StrichartzTriple,
                              apply, cal_norm, check_thmB, check_thmC,
                              is_wave_admissible, spatial_hs_norm, strichartz_s,
                              symbol_values, time_derivative, ws_norm)

TWO_PI = 2.0 * math.pi

FIXTURE = json.loads((Path(__file__).parent / "data" / "bilinear_checker_fixture.json").read_text())


def _single(grid, kt, ks):
    c = np.zeros(grid.spacetime_shape, dtype=complex)
    c[(kt % grid.N_t,) + tuple(k % grid.N_x for k in ks)] = 1.0
    return SpectralField(grid=grid, kind=SPACETIME, coeffs=c)


def test_identity_spec_noop(grid2d):
    u = random_field(grid2d, SPACETIME, 0, real=False)
    out = apply(MultiplierSpec("identity"), u)
    assert np.array_equal(out.coeffs, u.coeffs)


def test_lambda_minus_is_one_on_the_cone(grid2d):
    u = _single(grid2d, 3, (3, 0))  # tau = |xi| = 3
    out = apply(MultiplierSpec("lambda_minus", 1.0), u)
    assert abs(out.coeffs[3, 3, 0] - 1.0) <= 1e-14


def test_lambda_squared_scales_by_one_plus_xi_sq(grid2d):
    u = _single(grid2d, 5, (3, 4))
    out = apply(MultiplierSpec("lambda", 2.0), u)
    assert abs(out.coeffs[5, 3, 4] - 26.0) <= 1e-12


def test_riesz_axis_and_zero_mode_flag(grid2d):
    u = _single(grid2d, 1, (2, 0))
    out = apply(MultiplierSpec("riesz", axis=1), u)
    assert abs(out.coeffs[1, 2, 0] - 1j) <= 1e-14
    assert out.zero_mode_projected
    dc = _single(grid2d, 0, (0, 0))
    out_dc = apply(MultiplierSpec("riesz", axis=1), dc)
    assert out_dc.coeffs[0, 0, 0] == 0.0


def test_negative_homogeneous_power_projects_zero_mode(grid2d):
    u = random_field(grid2d, SPACETIME, 1, real=False)
    out = apply(MultiplierSpec("d", -1.0), u)
    assert out.zero_mode_projected
    assert np.max(np.abs(out.coeffs[:, 0, 0])) == 0.0


def test_composition_within_families(grid2d):
    u = random_field(grid2d, SPACETIME, 2, real=False)
    for fam in ("lambda", "lambda_plus", "lambda_minus", "d_plus"):
        a = apply(MultiplierSpec(fam, 0.7), apply(MultiplierSpec(fam, 0.5), u))
        b = apply(MultiplierSpec(fam, 1.2), u)
        top = np.max(np.abs(b.coeffs))
        assert np.max(np.abs(a.coeffs - b.coeffs)) <= 1e-12 * top


def test_multiplier_inverts_ws_weight(grid2d):
    u = random_field(grid2d, SPACETIME, 3, real=False)
    idx = SpaceIndex(0.8, 0.6)
    moved = apply(MultiplierSpec("lambda_minus", -idx.theta),
                  apply(MultiplierSpec("lambda", -idx.s), u))
    assert abs(ws_norm(moved, idx) - u.l2()) <= 1e-10 * u.l2()


def test_symbols_even_in_xi_and_tau(grid2d):
    for fam in ("lambda", "lambda_plus", "lambda_minus", "d", "d_plus", "d_minus"):
        sym, _ = symbol_values(MultiplierSpec(fam, 0.9), grid2d, SPACETIME)
        flipped = sym
        for ax in range(sym.ndim):
            flipped = np.roll(np.flip(flipped, axis=ax), 1, axis=ax)
        assert np.max(np.abs(sym - flipped)) <= 1e-12 * np.max(np.abs(sym))


def test_ws_norm_unit_modes(grid2d):
    u0 = _single(grid2d, 0, (0, 0))
    for idx in (SpaceIndex(0.0, 0.0), SpaceIndex(1.3, 0.4), SpaceIndex(-0.7, 2.0)):
        assert abs(ws_norm(u0, idx) - 1.0) <= 1e-14
    cone = _single(grid2d, 4, (4, 0))
    # s = 0 leaves only the hyperbolic factor, which is 1 on the cone
    for theta in (0.0, 0.6, 1.7):
        assert abs(ws_norm(cone, SpaceIndex(0.0, theta)) - 1.0) <= 1e-13


def test_ws_norm_zero_index_is_l2(grid2d):
    u = random_field(grid2d, SPACETIME, 4, real=False)
    assert abs(ws_norm(u, SpaceIndex(0.0, 0.0)) - u.l2()) <= 1e-12 * u.l2()


def test_cal_norm_unit_mode_and_exponent_bookkeeping(grid2d):
    u0 = _single(grid2d, 0, (0, 0))
    assert abs(cal_norm(u0, SpaceIndex(1.0, 0.7)) - 1.0) <= 1e-14
    u = random_field(grid2d, SPACETIME, 5, real=False)
    single = cal_norm(u, SpaceIndex(1.0, 0.0))
    plus = apply(MultiplierSpec("lambda_plus", 1.0), u)
    assert abs(single - plus.l2()) <= 1e-12 * plus.l2()


def test_cal_norm_two_forms_equivalent(grid2d):
    idx = SpaceIndex(1.3, 0.6)
    ratios = []
    for seed in range(100):
        u = random_field(grid2d, SPACETIME, 100 + seed, max_freq=6, real=False)
        single, two = cal_norm(u, idx, du_dt=time_derivative(u))
        ratios.append(two / single)
    assert min(ratios) >= 0.25 and max(ratios) <= 4.0


def test_energy_embedding_ratio_stable_under_refinement():
    # sup_t H^s slice norm over ws_norm at theta = 0.6, ensemble of 100
    def sup_ratio(grid, n_fields):
        idx_s = 0.9
        best = 0.0
        from nflab.lattice import time_spatial_rep
        for seed in range(n_fields):
            u = random_field(grid, SPACETIME, seed, max_freq=4, real=False)
            mr = time_spatial_rep(u)
            lam2 = (1.0 + grid.abs_xi(SPATIAL) ** 2) ** idx_s
            slices = np.sqrt(np.sum(lam2 * np.abs(mr) ** 2, axis=(1, 2))
                             * grid.spatial_volume)
            best = max(best, float(slices.max()) / ws_norm(u, SpaceIndex(idx_s, 0.6)))
        return best

    g1 = make_grid(2, 16, 16, TWO_PI, TWO_PI)
    g2 = g1.refined()
    r1 = sup_ratio(g1, 100)
    r2 = sup_ratio(g2, 100)
    assert abs(r2 - r1) / r1 <= 0.25


# ---------------------------------------------------------------------------
# admissibility and theorem checkers


def test_strichartz_original_inequality_point():
    assert is_wave_admissible(4, 4, 3)
    assert abs(strichartz_s(4, 4, 3) - 0.5) <= 1e-15
    t = StrichartzTriple(4, 4, 3)
    assert t.admissible and abs(t.s - 0.5) <= 1e-15


def test_energy_pair_is_admissible_any_dimension():
    for n in (1, 2, 3, 5):
        assert is_wave_admissible(math.inf, 2, n)
        assert abs(strichartz_s(math.inf, 2, n)) <= 1e-15


def test_r_infinity_rejected():
    assert not is_wave_admissible(2, math.inf, 2)


@given(st.floats(2.0, 64.0), st.floats(2.0, 64.0), st.integers(2, 4))
@settings(max_examples=200, deadline=None)
def test_strichartz_s_formula(q, r, n):
    assert abs(strichartz_s(q, r, n) - (n / 2 - n / r - 1 / q)) <= 1e-12


@pytest.mark.parametrize("case", FIXTURE["thmB"])
def test_thmB_fixture_table(case):
    r = math.inf if case["r"] == "inf" else case["r"]
    got = check_thmB(case["q"], r, case["n"], case["sigma"], case["s1"], case["s2"])
    assert got == case["expect"], case["note"]


@pytest.mark.parametrize("case", FIXTURE["thmC"])
def test_thmC_fixture_table(case):
    got = check_thmC(case["n"], case["gamma"], case["gamma_plus"],
                     case["gamma_minus"], case["s1"], case["s2"])
    assert got == case["expect"], case["note"]


def test_thmB_sigma_boundary_strict():
    assert not check_thmB(4, 4, 3, 0.0, 0.5, 0.5)


def test_checkers_exact_on_rationals():
    # rational inputs decide equalities exactly, no epsilon
    assert check_thmC(3, Fraction(0), Fraction(0), Fraction(0), Fraction(1, 2), Fraction(1, 2))
    assert not check_thmC(3, Fraction(-1, 2), Fraction(0), Fraction(0),
                          Fraction(3, 10), Fraction(1, 5))
    assert check_thmB(Fraction(4), Fraction(4), 3, Fraction(1, 4),
                      Fraction(3, 8), Fraction(3, 8))


def test_spatial_hs_norm_matches_ws_on_slices(grid2d):
    f = random_field(grid2d, SPATIAL, 9, real=False)
    direct = spatial_hs_norm(f.coeffs, grid2d, 1.1)
    lam = (1.0 + grid2d.abs_xi(SPATIAL) ** 2) ** 0.55
    assert abs(direct - float(np.sqrt(np.sum((lam * np.abs(f.coeffs)) ** 2)))) <= 1e-12

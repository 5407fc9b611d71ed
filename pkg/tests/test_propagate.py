import math

import numpy as np
import pytest

from nflab.lattice import (SPACETIME, SPATIAL, SpectralField, inverse_transform,
                           make_grid, random_field, time_spatial_rep, transform)
from nflab.multiplier import SpaceIndex, spatial_hs_norm, ws_norm
from nflab.propagate import (CauchyData, Step1Report, duhamel, duhamel_mixed,
                             half_wave, homogeneous, homogeneous_spacetime,
                             homogeneous_velocity, pm_decompose, signed_times,
                             step1_bound_check)

TWO_PI = 2.0 * math.pi


def _data(grid, seed, velocity=True):
    f = random_field(grid, SPATIAL, seed, max_freq=3)
    g = random_field(grid, SPATIAL, seed + 1, max_freq=3) if velocity else \
        transform(grid, np.zeros(grid.spatial_shape), SPATIAL)
    return CauchyData(f, g)


def test_half_wave_identity_at_zero(grid2d):
    f = random_field(grid2d, SPATIAL, 0, real=False)
    out = half_wave(1, 0.0, f)
    assert np.array_equal(out.coeffs, f.coeffs)


def test_half_wave_hs_isometry(grid2d):
    f = random_field(grid2d, SPATIAL, 1, real=False)
    for t in (0.3, 1.7, -2.2):
        out = half_wave(1, t, f)
        for s in (0.0, 1.3):
            a = spatial_hs_norm(out.coeffs, grid2d, s)
            b = spatial_hs_norm(f.coeffs, grid2d, s)
            assert abs(a - b) <= 1e-12 * b


def test_half_wave_composition(grid2d):
    f = random_field(grid2d, SPATIAL, 2, real=False)
    a = half_wave(1, 0.4, half_wave(1, 0.9, f))
    b = half_wave(1, 1.3, f)
    assert np.max(np.abs(a.coeffs - b.coeffs)) <= 1e-12 * np.max(np.abs(b.coeffs))


def test_homogeneous_initial_data(grid2d):
    d = _data(grid2d, 3)
    out = homogeneous(d, 0.0)
    assert np.max(np.abs(out.coeffs - d.f.coeffs)) <= 1e-13


def test_homogeneous_mean_mode_linear_growth(grid2d):
    g0 = np.zeros(grid2d.spatial_shape, dtype=complex)
    g0[0, 0] = 1.0
    zero = SpectralField(grid=grid2d, kind=SPATIAL,
                         coeffs=np.zeros(grid2d.spatial_shape, dtype=complex))
    d = CauchyData(zero, SpectralField(grid=grid2d, kind=SPATIAL, coeffs=g0))
    for t in (0.5, 2.0):
        out = homogeneous(d, t)
        assert abs(out.coeffs[0, 0] - t) <= 1e-13


def test_homogeneous_per_mode_energy_conservation(grid2d):
    d = _data(grid2d, 4)
    ax = grid2d.abs_xi(SPATIAL)
    e0 = None
    for t in np.linspace(0.0, 3.0, 7):
        u = homogeneous(d, t)
        v = homogeneous_velocity(d, t)
        e = ax**2 * np.abs(u.coeffs) ** 2 + np.abs(v.coeffs) ** 2
        if e0 is None:
            e0 = e
        drift = np.max(np.abs(e - e0)) / max(np.max(e0), 1e-300)
        assert drift <= 1e-10


def test_homogeneous_discrete_wave_residual_second_order():
    # centered second time difference of the per-mode analytic evolution
    # satisfies the wave equation to O(dt^2)
    res = []
    for Nt in (32, 64):
        g = make_grid(2, Nt, 8, 1.0, TWO_PI)
        d = _data(g, 20)
        ax = g.abs_xi(SPATIAL)
        t = g.times()[: Nt // 2]
        coeffs = np.stack([homogeneous(d, tj).coeffs for tj in t])
        dtt = (coeffs[2:] - 2 * coeffs[1:-1] + coeffs[:-2]) / g.dt**2
        resid = -dtt - ax**2 * coeffs[1:-1]
        res.append(float(np.max(np.abs(resid))))
    assert res[1] <= res[0] / 3.0  # about fourfold reduction per doubling


def test_homogeneous_half_wave_consistency(grid2d):
    f = random_field(grid2d, SPATIAL, 5, real=False)
    zero = SpectralField(grid=grid2d, kind=SPATIAL,
                         coeffs=np.zeros(grid2d.spatial_shape, dtype=complex),
                         real_flag=f.real_flag)
    d = CauchyData(f, zero)
    for t in (0.7, 1.9):
        direct = homogeneous(d, t).coeffs
        split = 0.5 * (half_wave(1, t, f).coeffs + half_wave(-1, t, f).coeffs)
        assert np.max(np.abs(direct - split)) <= 1e-13 * max(np.max(np.abs(direct)), 1e-300)


def test_duhamel_constant_force_exact():
    g = make_grid(1, 32, 8, 1.0, TWO_PI)
    F = transform(g, np.ones(g.spacetime_shape), SPACETIME)
    P = inverse_transform(duhamel(F))
    ts = signed_times(g)
    assert np.max(np.abs(P - (-ts[:, None] ** 2 / 2.0))) <= 1e-12


def test_duhamel_resonance_second_order():
    errs = []
    for Nt in (64, 128, 256):
        g = make_grid(1, Nt, 8, 1.0, TWO_PI)
        w = 2.0
        a_F = np.zeros((Nt, 8), dtype=complex)
        ts = signed_times(g)
        a_F[:, 2] = np.sin(w * ts)
        a_u = duhamel_mixed(g, a_F)
        exact = -(np.sin(w * ts) - w * ts * np.cos(w * ts)) / (2.0 * w * w)
        errs.append(float(np.max(np.abs(a_u[:, 2] - exact))))
    order1 = math.log2(errs[0] / errs[1])
    order2 = math.log2(errs[1] / errs[2])
    assert abs(order1 - 2.0) <= 0.2 and abs(order2 - 2.0) <= 0.2
    assert errs[-1] <= 1e-5


def test_duhamel_wave_residual_second_order():
    # centered second difference of the solution reproduces F at interior times
    res = []
    for Nt in (64, 128):
        g = make_grid(2, Nt, 8, 1.0, TWO_PI)
        F = random_field(g, SPACETIME, 6, max_freq=2)
        a_F = time_spatial_rep(F)
        a_u = duhamel_mixed(g, a_F)
        ax = g.abs_xi(SPATIAL)
        j = slice(1, Nt // 2 - 1)
        dtt = (a_u[2:Nt // 2] - 2 * a_u[1:Nt // 2 - 1] + a_u[0:Nt // 2 - 2]) / g.dt**2
        resid = -dtt - ax**2 * a_u[j] - a_F[j]
        res.append(float(np.max(np.abs(resid))))
    assert res[1] <= res[0] / 2.5  # about fourfold reduction per doubling
    assert res[0] <= 1e-2 * max(1.0, float(np.max(np.abs(a_F))))


def test_duhamel_linearity(grid2d):
    F = random_field(grid2d, SPACETIME, 7, real=False)
    G = random_field(grid2d, SPACETIME, 8, real=False)
    comb = F.copy_with(2.0 * F.coeffs - 3.0 * G.coeffs)
    lhs = duhamel(comb).coeffs
    rhs = 2.0 * duhamel(F).coeffs - 3.0 * duhamel(G).coeffs
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(np.max(np.abs(rhs)), 1e-300)


def test_pm_decompose_supports_and_pythagoras(grid2d):
    u = random_field(grid2d, SPACETIME, 9, real=False)
    up, um = pm_decompose(u)
    tau = grid2d.tau_broadcast() + np.zeros(grid2d.spacetime_shape)
    assert np.max(np.abs(up.coeffs[tau < 0])) == 0.0
    assert np.max(np.abs(um.coeffs[tau >= 0])) == 0.0
    assert np.max(np.abs(up.coeffs + um.coeffs - u.coeffs)) == 0.0
    idx = SpaceIndex(0.7, 0.6)
    total = ws_norm(u, idx) ** 2
    parts = ws_norm(up, idx) ** 2 + ws_norm(um, idx) ** 2
    assert abs(total - parts) <= 1e-12 * total


def test_pm_decompose_positive_spectrum_passthrough(grid2d):
    u = random_field(grid2d, SPACETIME, 10, real=False)
    tau = grid2d.tau_broadcast() + np.zeros(grid2d.spacetime_shape)
    c = np.where(tau > 0, u.coeffs, 0.0)
    up, um = pm_decompose(u.copy_with(c))
    assert np.max(np.abs(up.coeffs - c)) == 0.0
    assert np.max(np.abs(um.coeffs)) == 0.0


def test_pm_decompose_real_field_conjugate_symmetry(grid2d):
    u = random_field(grid2d, SPACETIME, 11)  # real
    up, um = pm_decompose(u)
    flipped = um.coeffs
    for ax in range(flipped.ndim):
        flipped = np.roll(np.flip(flipped, axis=ax), 1, axis=ax)
    tau = grid2d.tau_broadcast() + np.zeros(grid2d.spacetime_shape)
    sel = tau > 0
    assert np.max(np.abs(np.conj(up.coeffs[sel]) - flipped[sel])) <= 1e-12


def test_half_wave_evolution_slice_l2_constant(grid2d):
    # L^infty_t L^2_x of a half-wave spacetime field equals every slice norm:
    # the per-mode modulus is conserved
    from nflab.lattice import from_time_spatial_rep, mixed_norm, plane_wave_coeffs
    f = random_field(grid2d, SPATIAL, 21, max_freq=4, real=False)
    a = np.empty((grid2d.N_t,) + grid2d.spatial_shape, dtype=complex)
    for j, t in enumerate(grid2d.times()):
        a[j] = plane_wave_coeffs(half_wave(1, t, f))
    U = from_time_spatial_rep(grid2d, a)
    slices = np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2)) * grid2d.spatial_volume)
    assert (slices.max() - slices.min()) / slices.max() <= 1e-10
    assert abs(mixed_norm(U, math.inf, 2) - slices.max()) <= 1e-10 * slices.max()


def test_step1_bounds_single_mode(grid2d):
    u = random_field(grid2d, SPACETIME, 12, max_freq=2)
    rep = step1_bound_check(u, 1.0)
    assert isinstance(rep, Step1Report)
    assert rep.fitted_C < math.inf and rep.fitted_C >= 0.0
    assert rep.bound2_violations == 0


def test_step1_small_time_ratio_bounded(grid2d):
    F = random_field(grid2d, SPACETIME, 13, max_freq=2)
    rep = step1_bound_check(F, grid2d.dt)
    assert rep.bound2_violations == 0
    assert rep.bound2_max_ratio <= 1.0 + 1e-9


def test_step1_ensemble_t2_bound_never_violated(grid2d):
    for seed in range(50):
        F = random_field(grid2d, SPACETIME, 100 + seed, max_freq=3, real=False)
        rep = step1_bound_check(F, 1.2)
        assert rep.bound2_violations == 0

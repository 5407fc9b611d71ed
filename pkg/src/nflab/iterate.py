"""Picard iteration for the model quadratic wave systems.

The iteration is u_{j+1} = u_0 + inverse_wave(N(M_phi u_j)): the temporal
cutoff is applied before the nonlinearity, so every field fed to spectral
derivatives is smooth and periodic, and on the inner window |t| <= width/2
the iterates agree with the uncut iteration (the Duhamel integral is causal).

Iterates are carried in the mixed representation (time slice x spatial mode);
space-time spectra are formed only for the cutoffed fields.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import (SPACETIME, SPATIAL, Grid, SpectralField, cutoff_profile,
                      field_from_fine_samples, fine_samples,
                      from_time_spatial_rep, inverse_transform,
                      time_spatial_rep, transform)
from .multiplier import MultiplierSpec, SpaceIndex, apply, ws_norm
from .nullform import BilinearFormSpec, apply_form
from .propagate import (CauchyData, duhamel_mixed, homogeneous,
                        homogeneous_spacetime, signed_times)

KINDS = ("WM", "YMmodel", "MKGmodel", "WMM", "scalarQ0")

_DIVERGENCE_CAP = 1e8


@dataclass
class SystemSpec:
    """One of the model nonlinearities with its coefficient tables.

    WM:       N(u)^I = -sum_{J,K} Gamma^I_JK(u) Q0(u^J, u^K), Gamma polynomial
    YMmodel:  N(u) = D^-1 Q(u,u) + Q(D^-1 u, u)
    MKGmodel: N(u,v) = (D^-1 Q(v,v), Q(D^-1 u, v)), components split N1 + N2
    WMM:      N(u)^I = sum_{J,K} a^I_JK Qtilde(u^J, u^K)
    scalarQ0: N(u) = Q0(u, u)

    Q(u,v)^I is the all-pairs combination sum_{i<j,J,K} q_coeff[I,p,J,K]
    Q_ij(u^J, v^K); q_coeff defaults to all ones.
    """

    kind: str
    N: int = 1
    N1: int = 0
    N2: int = 0
    gamma_const: np.ndarray | None = None
    gamma_poly: list = field(default_factory=list)  # [(table (N,N,N), powers (N,))]
    a_table: np.ndarray | None = None
    q_coeff: np.ndarray | None = None
    q_coeff_second: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown system kind {self.kind!r}")
        if self.kind == "scalarQ0":
            self.N = 1
        if self.kind == "MKGmodel":
            if self.N1 <= 0 or self.N2 <= 0:
                raise ValueError("MKGmodel needs positive component counts N1, N2")
            self.N = self.N1 + self.N2
        if self.kind == "WM":
            if self.gamma_const is None:
                self.gamma_const = np.ones((self.N, self.N, self.N))
            self.gamma_const = np.asarray(self.gamma_const, dtype=float)
            if self.gamma_const.shape != (self.N, self.N, self.N):
                raise ValueError("Gamma table must have shape (N, N, N)")
            for table, powers in self.gamma_poly:
                if np.asarray(table).shape != (self.N, self.N, self.N):
                    raise ValueError("Gamma monomial tables must have shape (N, N, N)")
                if len(powers) != self.N or sum(powers) > 4:
                    raise ValueError("Gamma monomials limited to total degree 4")
        if self.kind == "WMM":
            if self.a_table is None:
                self.a_table = np.ones((self.N, self.N, self.N))
            self.a_table = np.asarray(self.a_table, dtype=float)
            if self.a_table.shape != (self.N, self.N, self.N):
                raise ValueError("a table must have shape (N, N, N)")

    def gamma_degree(self) -> int:
        return max([0] + [int(sum(p)) for _, p in self.gamma_poly])


def _pairs(n: int):
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def _default_q_coeff(n_out: int, n_pairs: int, n_left: int, n_right: int) -> np.ndarray:
    return np.ones((n_out, n_pairs, n_left, n_right))


def _d_inverse(u: SpectralField) -> SpectralField:
    return apply(MultiplierSpec("d", -1.0), u)


def _q_combination(coeff: np.ndarray, left: list, right: list, grid: Grid) -> list:
    """Components sum_{p,J,K} coeff[I,p,J,K] Q_{ij_p}(left^J, right^K)."""
    pairs = _pairs(grid.n)
    n_out = coeff.shape[0]
    out = [np.zeros(grid.spacetime_shape, dtype=complex) for _ in range(n_out)]
    projected = any(f.zero_mode_projected for f in left + right)
    real = all(f.real_flag for f in left + right)
    for p, (i, j) in enumerate(pairs):
        spec = BilinearFormSpec("qij", i=i, j=j)
        for J in range(coeff.shape[2]):
            for K in range(coeff.shape[3]):
                col = coeff[:, p, J, K]
                if not np.any(col):
                    continue
                q = apply_form(spec, left[J], right[K])
                for I in range(n_out):
                    if col[I]:
                        out[I] += col[I] * q.coeffs
    fields = []
    for c in out:
        f = SpectralField(grid=grid, kind=SPACETIME, coeffs=c, real_flag=real)
        f.zero_mode_projected = projected
        fields.append(f)
    return fields


def _wm_nonlinearity(sys_spec: SystemSpec, comps: list, sign: float) -> list:
    """-(or +) sum Gamma^I_JK(u) Q0(u^J,u^K) on a lattice padded for the degree."""
    grid = comps[0].grid
    deg = 2 + sys_spec.gamma_degree()
    factor = (deg + 1) / 2.0
    N = sys_spec.N
    U = [fine_samples(c, factor) for c in comps]
    dt = [fine_samples(c.copy_with(c.coeffs * (1j * grid.tau_broadcast())), factor) for c in comps]
    grads = []
    for c in comps:
        grads.append([fine_samples(
            c.copy_with(c.coeffs * (1j * grid.xi_component(ax, SPACETIME))), factor)
            for ax in range(grid.n)])
    real = all(c.real_flag for c in comps)

    q0 = {}
    for J in range(N):
        for K in range(J, N):
            acc = -dt[J] * dt[K]
            for ax in range(grid.n):
                acc = acc + grads[J][ax] * grads[K][ax]
            q0[(J, K)] = acc
            q0[(K, J)] = acc

    out = []
    for I in range(N):
        acc = np.zeros_like(U[0])
        for J in range(N):
            for K in range(N):
                g_val = sys_spec.gamma_const[I, J, K]
                gamma = None
                for table, powers in sys_spec.gamma_poly:
                    if table[I, J, K] == 0.0:
                        continue
                    mono = np.ones_like(U[0])
                    for c_idx, power in enumerate(powers):
                        for _ in range(int(power)):
                            mono = mono * U[c_idx]
                    gamma = (gamma if gamma is not None else 0.0) + table[I, J, K] * mono
                total = g_val if gamma is None else g_val + gamma
                if np.isscalar(total) and total == 0.0:
                    continue
                acc = acc + total * q0[(J, K)]
        out.append(field_from_fine_samples(grid, SPACETIME, sign * acc, real_flag=real))
    return out


def apply_nonlinearity(sys_spec: SystemSpec, comps: list) -> list:
    """Evaluate the model nonlinearity on a list of spacetime component fields."""
    if len(comps) != sys_spec.N:
        raise ValueError(f"expected {sys_spec.N} components, got {len(comps)}")
    grid = comps[0].grid
    if sys_spec.kind == "scalarQ0":
        return [apply_form(BilinearFormSpec("q0"), comps[0], comps[0])]
    if sys_spec.kind == "WM":
        return _wm_nonlinearity(sys_spec, comps, sign=-1.0)
    if sys_spec.kind == "WMM":
        qt = {}
        out = []
        real = all(c.real_flag for c in comps)
        spec = BilinearFormSpec("qtilde")
        acc = [np.zeros(grid.spacetime_shape, dtype=complex) for _ in range(sys_spec.N)]
        projected = False
        for J in range(sys_spec.N):
            for K in range(sys_spec.N):
                col = sys_spec.a_table[:, J, K]
                if not np.any(col):
                    continue
                key = (J, K)
                if key not in qt:
                    qt[key] = apply_form(spec, comps[J], comps[K])
                projected = projected or qt[key].zero_mode_projected
                for I in range(sys_spec.N):
                    if col[I]:
                        acc[I] += col[I] * qt[key].coeffs
        for c in acc:
            f = SpectralField(grid=grid, kind=SPACETIME, coeffs=c, real_flag=real)
            f.zero_mode_projected = projected
            out.append(f)
        return out
    n_pairs = len(_pairs(grid.n))
    if sys_spec.kind == "YMmodel":
        coeff = sys_spec.q_coeff
        if coeff is None:
            coeff = _default_q_coeff(sys_spec.N, n_pairs, sys_spec.N, sys_spec.N)
        coeff2 = sys_spec.q_coeff_second
        if coeff2 is None:
            coeff2 = coeff
        first = _q_combination(coeff, comps, comps, grid)
        first = [_d_inverse(f) for f in first]
        dinv = [_d_inverse(c) for c in comps]
        second = _q_combination(coeff2, dinv, comps, grid)
        out = []
        for a, b in zip(first, second):
            f = a.copy_with(a.coeffs + b.coeffs)
            f.zero_mode_projected = a.zero_mode_projected or b.zero_mode_projected
            f.real_flag = a.real_flag and b.real_flag
            out.append(f)
        return out
    if sys_spec.kind == "MKGmodel":
        u_comps = comps[: sys_spec.N1]
        v_comps = comps[sys_spec.N1:]
        coeff_u = sys_spec.q_coeff
        if coeff_u is None:
            coeff_u = _default_q_coeff(sys_spec.N1, n_pairs, sys_spec.N2, sys_spec.N2)
        coeff_v = sys_spec.q_coeff_second
        if coeff_v is None:
            coeff_v = _default_q_coeff(sys_spec.N2, n_pairs, sys_spec.N1, sys_spec.N2)
        top = [_d_inverse(f) for f in _q_combination(coeff_u, v_comps, v_comps, grid)]
        dinv_u = [_d_inverse(c) for c in u_comps]
        bottom = _q_combination(coeff_v, dinv_u, v_comps, grid)
        return top + bottom
    raise AssertionError(sys_spec.kind)


@dataclass
class IterationTrace:
    """Per-iterate diagnostics of a Picard run.

    d[j-1] is the window-sup H^s norm of u_j - u_{j-1} (root sum of squares
    over components); ws values are of the time-cutoffed iterates.
    """

    s: float
    theta: float
    cutoff_width: float
    sup_hs: list
    ws: list
    d: list
    ratios: list
    flag: str
    diverged_at: int | None = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("j,sup_Hs,d_j,ratio_j,flag\n")
        for j, sup in enumerate(self.sup_hs):
            dj = repr(self.d[j - 1]) if 1 <= j <= len(self.d) else ""
            rj = repr(self.ratios[j - 2]) if 2 <= j <= len(self.ratios) + 1 else ""
            flag = self.flag if j == len(self.sup_hs) - 1 else ""
            buf.write(f"{j},{sup!r},{dj},{rj},{flag}\n")
        return buf.getvalue()


def _slice_hs_sq(grid: Grid, a: np.ndarray, s: float) -> np.ndarray:
    """Squared H^s norms of every time slice of a mixed-representation array."""
    lam2 = (1.0 + grid.abs_xi(SPATIAL) ** 2) ** s
    V = grid.spatial_volume
    return np.sum(lam2 * np.abs(a) ** 2, axis=tuple(range(1, grid.n + 1))) * V


def picard_run(sys_spec: SystemSpec, data: list, iterations: int, idx: SpaceIndex,
               cutoff_width: float) -> IterationTrace:
    """Run u_{j+1} = u_0 + inverse_wave(N(M_phi u_j)) and record norms."""
    if iterations < 1:
        raise ValueError("need at least one iteration")
    if len(data) != sys_spec.N:
        raise ValueError(f"expected {sys_spec.N} Cauchy pairs, got {len(data)}")
    grid = data[0].f.grid
    if not (0.0 < cutoff_width < grid.T_per):
        raise ValueError("grid period does not accommodate the cutoff width")
    real = all(d.f.real_flag for d in data)
    phi = cutoff_profile(grid, cutoff_width).reshape((grid.N_t,) + (1,) * grid.n)
    window = np.abs(signed_times(grid)) <= cutoff_width / 2.0 + 1e-12

    u0 = [homogeneous_spacetime(d) for d in data]
    current = [a.copy() for a in u0]

    def window_sup_hs(arrs):
        tot = np.zeros(grid.N_t)
        for a in arrs:
            tot += _slice_hs_sq(grid, a, idx.s)
        return float(np.sqrt(np.max(tot[window])))

    sup_hs = [window_sup_hs(current)]
    ws_list = [float(np.sqrt(sum(
        ws_norm(from_time_spatial_rep(grid, phi * a, real_flag=real), idx) ** 2
        for a in current)))]
    d_list = []
    ratios = []
    flag = "stalled"
    diverged_at = None

    for j in range(1, iterations + 1):
        cut = [from_time_spatial_rep(grid, phi * a, real_flag=real) for a in current]
        F = apply_nonlinearity(sys_spec, cut)
        nxt = []
        for c, Fc in zip(u0, F):
            nxt.append(c + duhamel_mixed(grid, time_spatial_rep(Fc)))
        top = max(float(np.max(np.abs(a))) for a in nxt)
        if not math.isfinite(top) or top > _DIVERGENCE_CAP:
            flag = "diverged"
            diverged_at = j
            current = nxt
            break
        diff_sq = np.zeros(grid.N_t)
        for a, b in zip(nxt, current):
            diff_sq += _slice_hs_sq(grid, a - b, idx.s)
        d_list.append(float(np.sqrt(np.max(diff_sq[window]))))
        current = nxt
        sup_hs.append(window_sup_hs(current))
        ws_list.append(float(np.sqrt(sum(
            ws_norm(from_time_spatial_rep(grid, phi * a, real_flag=real), idx) ** 2
            for a in current))))

    for k in range(1, len(d_list)):
        denom = d_list[k - 1]
        ratios.append(d_list[k] / denom if denom > 0 else 0.0)

    if flag != "diverged":
        scale = max(sup_hs[0], 1e-300)
        if d_list and d_list[-1] <= 1e-12 * scale:
            flag = "converged"
        elif ratios and all(r < 1.0 for r in ratios[-2:]):
            flag = "converged"
        else:
            flag = "stalled"

    return IterationTrace(s=idx.s, theta=idx.theta, cutoff_width=cutoff_width,
                          sup_hs=sup_hs, ws=ws_list, d=d_list, ratios=ratios,
                          flag=flag, diverged_at=diverged_at)


def iterate_samples(sys_spec: SystemSpec, data: list, iterations: int,
                    cutoff_width: float) -> list:
    """Mixed representation of the final iterate (helper for oracle comparisons)."""
    grid = data[0].f.grid
    real = all(d.f.real_flag for d in data)
    phi = cutoff_profile(grid, cutoff_width).reshape((grid.N_t,) + (1,) * grid.n)
    u0 = [homogeneous_spacetime(d) for d in data]
    current = [a.copy() for a in u0]
    for _ in range(iterations):
        cut = [from_time_spatial_rep(grid, phi * a, real_flag=real) for a in current]
        F = apply_nonlinearity(sys_spec, cut)
        current = [c + duhamel_mixed(grid, time_spatial_rep(Fc)) for c, Fc in zip(u0, F)]
    return current


def q0_closed_form(data: CauchyData, t: float) -> SpectralField:
    """Exact solution sample of (wave op) u = Q0(u,u) via u = -log w, wave w = 0.

    w carries data (exp(-f), -g exp(-f)); refuses when w drops to 1/2 anywhere
    on the evaluation slice.
    """
    grid = data.f.grid
    f_samp = inverse_transform(data.f)
    g_samp = inverse_transform(data.g)
    if not data.f.real_flag:
        raise ValueError("closed form needs real data")
    w0 = np.exp(-f_samp.real)
    w1 = -g_samp.real * w0
    wdata = CauchyData(transform(grid, w0, SPATIAL), transform(grid, w1, SPATIAL))
    wt = homogeneous(wdata, t)
    w_samp = inverse_transform(wt).real
    if np.min(w_samp) <= 0.5:
        raise ValueError("closed form refused: w reaches 1/2 (log branch safety)")
    return transform(grid, -np.log(w_samp), SPATIAL)

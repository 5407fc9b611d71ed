"""Periodic space-time sampling lattice and its Fourier calculus.

The computational domain is the torus [0, T_per) x [0, L_per)^n sampled on a
regular lattice of N_t x N_x^n points.  Frequencies live on the dual lattice
{2*pi*k/T_per} x {2*pi*m/L_per}^n with k in [-N_t/2, N_t/2) and m in
[-N_x/2, N_x/2)^n, stored throughout in unshifted FFT order.

Normalization: the discrete transform is unitary with respect to the
measure-weighted inner products, so the sum of squared coefficients equals
the measure-weighted L^2 norm of the samples (Plancherel as a plain sum).
With this choice a product of two fields corresponds to a plain coefficient
convolution scaled by 1/sqrt(domain volume).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, replace

import numpy as np

TWO_PI = 2.0 * math.pi

SPACETIME = "spacetime"
SPATIAL = "spatial"

MAGIC = b"NFLB1"


def _is_pow2(m: int) -> bool:
    return m >= 2 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Sampling lattice for the periodic box [0,T_per) x [0,L_per)^n."""

    n: int
    N_t: int
    N_x: int
    T_per: float
    L_per: float

    @property
    def dt(self) -> float:
        return self.T_per / self.N_t

    @property
    def dx(self) -> float:
        return self.L_per / self.N_x

    @property
    def spatial_shape(self) -> tuple:
        return (self.N_x,) * self.n

    @property
    def spacetime_shape(self) -> tuple:
        return (self.N_t,) + self.spatial_shape

    @property
    def volume(self) -> float:
        """Total space-time measure T_per * L_per^n."""
        return self.T_per * self.L_per**self.n

    @property
    def spatial_volume(self) -> float:
        return self.L_per**self.n

    def times(self) -> np.ndarray:
        return np.arange(self.N_t) * self.dt

    def tau(self) -> np.ndarray:
        """Temporal frequencies in FFT order, shape (N_t,)."""
        return TWO_PI * np.fft.fftfreq(self.N_t, d=self.dt)

    def xi_axis(self) -> np.ndarray:
        """Spatial frequencies along one axis in FFT order, shape (N_x,)."""
        return TWO_PI * np.fft.fftfreq(self.N_x, d=self.dx)

    def xi_component(self, j: int, kind: str) -> np.ndarray:
        """Frequency component xi_j broadcastable over the coefficient array."""
        ax = self.xi_axis()
        ndim = self.n + (1 if kind == SPACETIME else 0)
        pos = j + (1 if kind == SPACETIME else 0)
        shape = [1] * ndim
        shape[pos] = self.N_x
        return ax.reshape(shape)

    def abs_xi(self, kind: str) -> np.ndarray:
        """|xi| broadcastable over the coefficient array."""
        sq = sum(self.xi_component(j, kind) ** 2 for j in range(self.n))
        return np.sqrt(sq)

    def tau_broadcast(self) -> np.ndarray:
        return self.tau().reshape((self.N_t,) + (1,) * self.n)

    def shape_for(self, kind: str) -> tuple:
        return self.spacetime_shape if kind == SPACETIME else self.spatial_shape

    def refined(self, factor: int = 2) -> "Grid":
        return replace(self, N_t=self.N_t * factor, N_x=self.N_x * factor)


def make_grid(n: int, N_t: int, N_x: int, T_per: float, L_per: float) -> Grid:
    """Validate sizes and build a Grid.

    Sizes must be powers of two (hence even); n is restricted to 1..3.
    """
    if n not in (1, 2, 3):
        raise ValueError(f"spatial dimension must be 1, 2 or 3, got {n}")
    if not _is_pow2(N_t):
        raise ValueError(f"N_t must be an even power of two, got {N_t}")
    if not _is_pow2(N_x):
        raise ValueError(f"N_x must be an even power of two, got {N_x}")
    if not (T_per > 0 and L_per > 0):
        raise ValueError("periods must be positive")
    return Grid(n=n, N_t=int(N_t), N_x=int(N_x), T_per=float(T_per), L_per=float(L_per))


@dataclass(frozen=True)
class FrequencyPoint:
    """A single space-time frequency (tau, xi)."""

    tau: float
    xi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float))

    @property
    def abs_xi(self) -> float:
        return float(np.linalg.norm(self.xi))

    @property
    def euclid(self) -> float:
        """Euclidean norm |Xi| of the full space-time frequency."""
        return math.hypot(self.tau, self.abs_xi)

    @property
    def lorentz(self) -> float:
        """Lorentzian form <Xi,Xi> = -tau^2 + |xi|^2 (signature -,+,..,+)."""
        return self.abs_xi**2 - self.tau**2

    @property
    def hyperbolic(self) -> float:
        """Distance to the light cone, ||tau| - |xi||."""
        return abs(abs(self.tau) - self.abs_xi)


@dataclass
class SpectralField:
    """Complex coefficient lattice on a Grid (space-time or spatial-only)."""

    grid: Grid
    kind: str
    coeffs: np.ndarray
    real_flag: bool = False
    zero_mode_projected: bool = False

    def __post_init__(self):
        want = self.grid.shape_for(self.kind)
        if self.coeffs.shape != want:
            raise ValueError(f"coefficient shape {self.coeffs.shape} does not match {want}")

    def copy_with(self, coeffs: np.ndarray, **kw) -> "SpectralField":
        opts = dict(grid=self.grid, kind=self.kind, coeffs=coeffs,
                    real_flag=self.real_flag, zero_mode_projected=self.zero_mode_projected)
        opts.update(kw)
        return SpectralField(**opts)

    def l2(self) -> float:
        """Plain Plancherel norm sqrt(sum |c|^2)."""
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def hermitian_error(self) -> float:
        """Max deviation from coeffs(-Xi) = conj(coeffs(Xi))."""
        c = self.coeffs
        flipped = c
        for ax in range(c.ndim):
            flipped = np.roll(np.flip(flipped, axis=ax), 1, axis=ax)
        return float(np.max(np.abs(c - np.conj(flipped))))


def _measure(grid: Grid, kind: str) -> float:
    return grid.volume if kind == SPACETIME else grid.spatial_volume


def transform(grid: Grid, samples: np.ndarray, kind: str = SPACETIME) -> SpectralField:
    """Forward transform of physical samples, unitary in the weighted norms."""
    samples = np.asarray(samples)
    want = grid.shape_for(kind)
    if samples.shape != want:
        raise ValueError(f"sample shape {samples.shape} does not match {want}")
    N = samples.size
    w = _measure(grid, kind) / N
    coeffs = np.fft.fftn(samples) * math.sqrt(w / N)
    real = bool(np.isrealobj(samples)) or bool(np.max(np.abs(samples.imag)) < 1e-14 * (1.0 + np.max(np.abs(samples))))
    return SpectralField(grid=grid, kind=kind, coeffs=coeffs, real_flag=real)


def inverse_transform(fieldv: SpectralField) -> np.ndarray:
    """Physical sample lattice of a spectral field."""
    N = fieldv.coeffs.size
    w = _measure(fieldv.grid, fieldv.kind) / N
    out = np.fft.ifftn(fieldv.coeffs) * math.sqrt(N / w)
    if fieldv.real_flag:
        return out.real
    return out


def plane_wave_coeffs(fieldv: SpectralField) -> np.ndarray:
    """Amplitudes A_k with u(x) = sum_k A_k exp(i Xi_k . x); A = c / sqrt(volume)."""
    return fieldv.coeffs / math.sqrt(_measure(fieldv.grid, fieldv.kind))


def from_plane_wave_coeffs(grid: Grid, A: np.ndarray, kind: str, real_flag=False) -> SpectralField:
    c = np.asarray(A, dtype=complex) * math.sqrt(_measure(grid, kind))
    return SpectralField(grid=grid, kind=kind, coeffs=c, real_flag=real_flag)


def time_spatial_rep(fieldv: SpectralField) -> np.ndarray:
    """Mixed representation a[j, xi]: per-time-slice plane-wave amplitudes.

    u(t_j, x) = sum_xi a[j, xi] exp(i xi . x).
    """
    if fieldv.kind != SPACETIME:
        raise ValueError("mixed representation needs a spacetime field")
    P = inverse_transform(fieldv)
    spatial_axes = tuple(range(1, fieldv.grid.n + 1))
    return np.fft.fftn(P, axes=spatial_axes) / fieldv.grid.N_x**fieldv.grid.n


def from_time_spatial_rep(grid: Grid, a: np.ndarray, real_flag=False) -> SpectralField:
    spatial_axes = tuple(range(1, grid.n + 1))
    P = np.fft.ifftn(a * grid.N_x**grid.n, axes=spatial_axes)
    if real_flag:
        P = P.real
    return transform(grid, P, SPACETIME)


def random_field(grid: Grid, kind: str, seed: int, max_freq: int | None = None,
                 real: bool = True, decay: float = 1.0) -> SpectralField:
    """Seeded random band-limited field; spectrum supported on |k_axis| <= max_freq."""
    rng = np.random.default_rng(seed)
    shape = grid.shape_for(kind)
    P = rng.standard_normal(shape)
    if not real:
        P = P + 1j * rng.standard_normal(shape)
    f = transform(grid, P, kind)
    c = f.coeffs
    if max_freq is None:
        max_freq = (grid.N_x // 4)
    idx_axes = []
    if kind == SPACETIME:
        idx_axes.append(np.fft.fftfreq(grid.N_t) * grid.N_t)
    for _ in range(grid.n):
        idx_axes.append(np.fft.fftfreq(grid.N_x) * grid.N_x)
    mask = np.ones(shape, dtype=bool)
    weight = np.zeros(shape)
    for ax, kvals in enumerate(idx_axes):
        sh = [1] * len(shape)
        sh[ax] = len(kvals)
        kk = np.abs(kvals.reshape(sh))
        mask &= kk <= max_freq
        weight = weight + kk**2
    c = np.where(mask, c, 0.0) / (1.0 + weight) ** (decay / 2.0)
    return SpectralField(grid=grid, kind=kind, coeffs=c, real_flag=not np.iscomplexobj(P))


# ---------------------------------------------------------------------------
# mixed norms


def _check_exponent(p) -> float:
    p = float(p)
    if not (p >= 1.0):
        raise ValueError(f"Lebesgue exponent must be in [1, inf], got {p}")
    return p


def mixed_norm(u: SpectralField, q, r) -> float:
    """L^q in time of the spatial L^r norm, by quadrature on the sample lattice.

    q = r = 2 recovers the plain Plancherel sum of squared coefficients.
    """
    q = _check_exponent(q)
    r = _check_exponent(r)
    if u.kind != SPACETIME:
        raise ValueError("mixed_norm needs a spacetime field")
    g = u.grid
    P = np.abs(inverse_transform(u))
    spatial_axes = tuple(range(1, g.n + 1))
    if math.isinf(r):
        slices = P.max(axis=spatial_axes)
    else:
        slices = (np.sum(P**r, axis=spatial_axes) * g.dx**g.n) ** (1.0 / r)
    if math.isinf(q):
        return float(slices.max())
    return float((np.sum(slices**q) * g.dt) ** (1.0 / q))


def spatial_lp(samples: np.ndarray, grid: Grid, p) -> float:
    p = _check_exponent(p)
    a = np.abs(samples)
    if math.isinf(p):
        return float(a.max())
    return float((np.sum(a**p) * grid.dx**grid.n) ** (1.0 / p))


def _dual(p: float) -> float:
    if math.isinf(p):
        return 1.0
    if p == 1.0:
        return math.inf
    return p / (p - 1.0)


def _witness_dictionary(grid: Grid) -> list:
    """Fixed family of nonnegative-spectrum witnesses (frequency-index Gaussians)."""
    shape = grid.spacetime_shape
    kt = np.abs(np.fft.fftfreq(grid.N_t) * grid.N_t).reshape((grid.N_t,) + (1,) * grid.n)
    k2 = np.zeros(shape)
    for j in range(grid.n):
        sh = [1] * (grid.n + 1)
        sh[j + 1] = grid.N_x
        k2 = k2 + (np.abs(np.fft.fftfreq(grid.N_x) * grid.N_x).reshape(sh)) ** 2
    out = []
    dc = np.zeros(shape)
    dc[(0,) * (grid.n + 1)] = 1.0
    out.append(dc)
    for st in (0.5, 2.0, 8.0):
        for sx in (0.5, 2.0, 8.0):
            out.append(np.exp(-((kt / st) ** 2) - k2 / sx**2))
    return out


def _pairing_value(mod_u: np.ndarray, w_hat: np.ndarray, u: SpectralField, qd, rd) -> float:
    """sum |u_hat| w_hat divided by the (q',r') mixed norm of the witness."""
    pairing = float(np.sum(mod_u * w_hat))
    wfield = SpectralField(grid=u.grid, kind=SPACETIME, coeffs=w_hat.astype(complex))
    denom = mixed_norm(wfield, qd, rd)
    if denom == 0.0:
        return 0.0
    return pairing / denom


def modified_mixed_norm_detailed(u: SpectralField, q, r, max_steps: int = 60):
    """All three surrogate modes of the |hat u|-only mixed norm.

    Returns (lower, ascent, upper, ascent_converged).  The chain
    lower <= ascent <= upper holds by construction: `upper` dominates the
    duality pairing via Hoelder, `lower` maximizes the pairing over a witness
    family, and `ascent` refines the best witness by monotone line search.
    """
    q = _check_exponent(q)
    r = _check_exponent(r)
    if u.kind != SPACETIME:
        raise ValueError("modified mixed norm needs a spacetime field")
    qd, rd = _dual(q), _dual(r)
    mod = np.abs(u.coeffs)
    upper = mixed_norm(u.copy_with(mod.astype(complex), real_flag=False), q, r)

    witnesses = _witness_dictionary(u.grid)
    witnesses.append(mod.copy())
    vals = [_pairing_value(mod, w, u, qd, rd) for w in witnesses]
    best = int(np.argmax(vals))
    lower = float(vals[best])

    w = witnesses[best].copy()
    cur = lower
    gnorm = mod.max()
    converged = gnorm == 0.0
    if not converged:
        g = mod / gnorm
        for _ in range(max_steps):
            improved = False
            scale = w.max() if w.max() > 0 else 1.0
            for sigma in (1.0, 0.3, 0.1, 0.03, 0.01):
                cand = w + sigma * scale * g
                val = _pairing_value(mod, cand, u, qd, rd)
                if val > cur * (1.0 + 1e-12):
                    w, cur, improved = cand, val, True
                    break
            if not improved:
                converged = True
                break
    ascent = max(cur, lower)
    ascent = min(ascent, upper)
    return lower, ascent, upper, converged


def modified_mixed_norm(u: SpectralField, q, r, mode: str = "upper") -> float:
    lower, ascent, upper, _ = modified_mixed_norm_detailed(u, q, r)
    if mode == "upper":
        return upper
    if mode == "lower":
        return lower
    if mode == "ascent":
        return ascent
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# temporal cutoff


def _smoothstep7(x: np.ndarray) -> np.ndarray:
    """Degree-7 smoothstep: 0 at 0, 1 at 1, three vanishing derivatives at both ends."""
    x = np.clip(x, 0.0, 1.0)
    return x**4 * (35.0 - 84.0 * x + 70.0 * x**2 - 20.0 * x**3)


def cutoff_profile(grid: Grid, width: float) -> np.ndarray:
    """Values of the fixed C^3 bump on the time lattice (periodic distance to 0)."""
    if not (0.0 < width < grid.T_per):
        raise ValueError("cutoff width must satisfy 0 < width < T_per")
    t = grid.times()
    d = np.minimum(t, grid.T_per - t)
    half = width / 2.0
    out = np.zeros_like(d)
    out[d <= half] = 1.0
    trans = (d > half) & (d < width)
    out[trans] = _smoothstep7((width - d[trans]) / half)
    return out


def time_cutoff(u: SpectralField, width: float) -> SpectralField:
    """Multiply by the fixed temporal bump: 1 on |t| <= width/2, 0 outside |t| <= width."""
    if u.kind != SPACETIME:
        raise ValueError("time_cutoff needs a spacetime field")
    phi = cutoff_profile(u.grid, width).reshape((u.grid.N_t,) + (1,) * u.grid.n)
    P = inverse_transform(u) * phi
    out = transform(u.grid, P, SPACETIME)
    out.real_flag = u.real_flag
    out.zero_mode_projected = u.zero_mode_projected
    return out


# ---------------------------------------------------------------------------
# dealiased products


def _pad_spectrum(c: np.ndarray, fine_shape: tuple) -> np.ndarray:
    out = np.zeros(fine_shape, dtype=complex)
    src = np.fft.fftshift(c)
    slices = []
    for N, M in zip(c.shape, fine_shape):
        lo = (M - N) // 2
        slices.append(slice(lo, lo + N))
    shifted = np.zeros(fine_shape, dtype=complex)
    shifted[tuple(slices)] = src
    out = np.fft.ifftshift(shifted)
    return out


def _crop_spectrum(c: np.ndarray, coarse_shape: tuple) -> np.ndarray:
    src = np.fft.fftshift(c)
    slices = []
    for N, M in zip(coarse_shape, c.shape):
        lo = (M - N) // 2
        slices.append(slice(lo, lo + N))
    return np.fft.ifftshift(src[tuple(slices)])


def fine_samples(fieldv: SpectralField, factor: float = 1.5) -> np.ndarray:
    """Values of the band-limited interpolant on a lattice refined by `factor`."""
    shape = fieldv.coeffs.shape
    fine = tuple(int(math.ceil(N * factor / 2.0)) * 2 for N in shape)
    A = plane_wave_coeffs(fieldv)
    Af = _pad_spectrum(A, fine)
    out = np.fft.ifftn(Af) * np.prod(fine)
    if fieldv.real_flag:
        return out.real
    return out


def field_from_fine_samples(grid: Grid, kind: str, P_fine: np.ndarray,
                            real_flag: bool = False) -> SpectralField:
    """Transform fine-lattice samples and truncate to the representable band."""
    shape = grid.shape_for(kind)
    A_fine = np.fft.fftn(P_fine) / P_fine.size
    A = _crop_spectrum(A_fine, shape)
    return from_plane_wave_coeffs(grid, A, kind, real_flag=real_flag)


def dealiased_product(u: SpectralField, v: SpectralField, factor: float = 1.5) -> SpectralField:
    """Pointwise product with 3/2 zero-padding per axis (alias-free quadratics)."""
    if u.grid != v.grid or u.kind != v.kind:
        raise ValueError("fields must share grid and kind")
    Pu = fine_samples(u, factor)
    Pv = fine_samples(v, factor)
    real = u.real_flag and v.real_flag
    out = field_from_fine_samples(u.grid, u.kind, Pu * Pv, real_flag=real)
    out.zero_mode_projected = u.zero_mode_projected or v.zero_mode_projected
    return out


# ---------------------------------------------------------------------------
# serialization (flat binary container, magic "NFLB1")

_HEADER = struct.Struct("<5sBBII dd")
_KIND_CODE = {SPATIAL: 0, SPACETIME: 1}
_KIND_NAME = {0: SPATIAL, 1: SPACETIME}


def write_field(fieldv: SpectralField, path) -> None:
    g = fieldv.grid
    head = _HEADER.pack(MAGIC, g.n, _KIND_CODE[fieldv.kind], g.N_t, g.N_x, g.T_per, g.L_per)
    flat = np.ascontiguousarray(fieldv.coeffs).ravel()
    payload = np.empty(2 * flat.size, dtype="<f8")
    payload[0::2] = flat.real
    payload[1::2] = flat.imag
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(payload.tobytes())


def read_field(path) -> SpectralField:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        magic, n, kind_code, N_t, N_x, T_per, L_per = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ValueError("not an NFLB1 container")
        grid = make_grid(n, N_t, N_x, T_per, L_per)
        kind = _KIND_NAME[kind_code]
        count = int(np.prod(grid.shape_for(kind)))
        payload = np.frombuffer(fh.read(16 * count), dtype="<f8")
    coeffs = (payload[0::2] + 1j * payload[1::2]).reshape(grid.shape_for(kind))
    f = SpectralField(grid=grid, kind=kind, coeffs=coeffs.copy())
    f.real_flag = f.hermitian_error() <= 1e-12 * max(1.0, float(np.max(np.abs(coeffs))))
    return f

"""Polar grids, quadrature, spectral transforms and norms.

Radial quadrature is composite Gauss-Legendre on [0, R]; the angular
direction is uniform with FFT transforms, exact for band-limited content.
Radial derivatives are taken with local polynomial (Fornberg) stencils on
the non-uniform node set.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_legendre

from . import spectrum
from .errors import (
    GridMismatchError,
    GridResolutionError,
    TruncationError,
    UnsupportedCombinationError,
)

__all__ = [
    "PolarGrid",
    "GridField",
    "SpectralCoefficients",
    "build_polar_grid",
    "analyze",
    "synthesize",
    "apply_H_radial",
    "lp_norm",
    "sobolev_besov_norm",
    "eigen_residual",
]

# Nodes per Gauss-Legendre panel; stencil half-width for radial derivatives.
_PANEL = 16
STENCIL_POINTS = 7
STENCIL_MARGIN = STENCIL_POINTS // 2


@dataclass(frozen=True)
class PolarGrid:
    """Composite Gauss-Legendre radial rule plus uniform angular nodes."""

    R: float
    Nr: int
    Ntheta: int
    r: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)

    @property
    def dtheta(self):
        return 2.0 * np.pi / self.Ntheta

    def same_as(self, other):
        return (
            self.R == other.R
            and self.Nr == other.Nr
            and self.Ntheta == other.Ntheta
        )

    def interior_mask(self, margin=STENCIL_MARGIN):
        """Radial nodes whose derivative stencils are fully centered."""
        mask = np.zeros(self.Nr, dtype=bool)
        mask[margin : self.Nr - margin] = True
        return mask

    def quad2d(self, values):
        """Integrate grid samples against r dr dtheta."""
        return np.sum(values * (self.w * self.r)[:, None]) * self.dtheta


def build_polar_grid(R, Nr, Ntheta):
    """Build a PolarGrid; Ntheta must be a power of two, Nr >= 16."""
    if not R > 0:
        raise GridResolutionError("R must be positive")
    if Nr < 16:
        raise GridResolutionError("Nr must be at least 16")
    if Ntheta < 8 or (Ntheta & (Ntheta - 1)) != 0:
        raise GridResolutionError("Ntheta must be a power of two >= 8")
    n_panels = max(1, Nr // _PANEL)
    sizes = np.full(n_panels, Nr // n_panels)
    sizes[: Nr % n_panels] += 1
    edges = np.linspace(0.0, R, n_panels + 1)
    rs, ws = [], []
    for i, size in enumerate(sizes):
        x, w = roots_legendre(int(size))
        a, b = edges[i], edges[i + 1]
        rs.append(0.5 * (b - a) * (x + 1.0) + a)
        ws.append(0.5 * (b - a) * w)
    r = np.concatenate(rs)
    w = np.concatenate(ws)
    theta = 2.0 * np.pi * np.arange(Ntheta) / Ntheta
    return PolarGrid(R=float(R), Nr=int(Nr), Ntheta=int(Ntheta), r=r, w=w, theta=theta)


@dataclass
class GridField:
    """Complex samples on a polar grid, indexed [radial, angular]."""

    grid: PolarGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.Nr, self.grid.Ntheta):
            raise GridMismatchError(
                f"samples shaped {self.values.shape}, grid wants "
                f"({self.grid.Nr}, {self.grid.Ntheta})"
            )

    def copy(self):
        return GridField(self.grid, self.values.copy())


@dataclass
class SpectralCoefficients:
    """Coefficients c[k, ell] in the normalized Landau eigenbasis.

    Stored as a dense (2K+1, L+1) array with row index k + K.
    """

    params: "spectrum.FieldParams"
    K: int
    L: int
    c: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=complex)
        if self.c.shape != (2 * self.K + 1, self.L + 1):
            raise TruncationError(
                f"coefficient array shaped {self.c.shape}, truncation wants "
                f"({2 * self.K + 1}, {self.L + 1})"
            )
        if not np.all(np.isfinite(self.c)):
            raise ValueError("coefficients must be finite")

    @classmethod
    def zeros(cls, params, K, L):
        return cls(params, K, L, np.zeros((2 * K + 1, L + 1), dtype=complex))

    def k_values(self):
        return np.arange(-self.K, self.K + 1)

    def __getitem__(self, idx):
        k, ell = idx
        return self.c[k + self.K, ell]

    def __setitem__(self, idx, val):
        k, ell = idx
        self.c[k + self.K, ell] = val

    def copy(self):
        return SpectralCoefficients(self.params, self.K, self.L, self.c.copy())

    def l2_norm(self):
        return float(np.linalg.norm(self.c))

    def eigenvalues(self):
        return spectrum.mode_eigenvalues(self.params, self.K, self.L)


# ---------------------------------------------------------------------------
# Radial finite differences (Fornberg weights on arbitrary nodes)

def _fornberg(z, x, m):
    """Weights for derivatives 0..m at z from samples at nodes x."""
    n = len(x)
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for s in range(mn, 0, -1):
                    c[i, s] = c1 * (s * c[i - 1, s - 1] - c5 * c[i - 1, s]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for s in range(mn, 0, -1):
                c[j, s] = (c4 * c[j, s] - s * c[j, s - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c


_DERIV_CACHE = {}


def radial_derivative_matrices(grid):
    """Dense first/second derivative matrices on the radial nodes.

    7-point local polynomial stencils (6th order in the interior, one-sided
    near the ends).  Cached per grid signature.
    """
    key = (grid.R, grid.Nr)
    hit = _DERIV_CACHE.get(key)
    if hit is not None:
        return hit
    n = grid.Nr
    p = STENCIL_POINTS
    D1 = np.zeros((n, n))
    D2 = np.zeros((n, n))
    for i in range(n):
        lo = min(max(0, i - p // 2), n - p)
        sten = slice(lo, lo + p)
        w = _fornberg(grid.r[i], grid.r[sten], 2)
        D1[i, sten] = w[:, 1]
        D2[i, sten] = w[:, 2]
    _DERIV_CACHE[key] = (D1, D2)
    return D1, D2


# ---------------------------------------------------------------------------
# Transforms

def _angular_modes(f):
    """FFT rows: hat[k] = dtheta * sum_j f(.,theta_j) exp(-ik theta_j)."""
    return np.fft.fft(f.values, axis=1) * f.grid.dtheta


def analyze(f, basis):
    """Project a grid field onto the normalized eigenbasis.

    c[k, ell] = integral of f times the conjugate normalized eigenfunction,
    evaluated by angular FFT plus radial quadrature.
    """
    if not f.grid.same_as(basis.grid):
        raise GridMismatchError("field and basis grids differ")
    hat = _angular_modes(f)
    g = f.grid
    wr = g.w * g.r
    K, L = basis.K, basis.L
    out = np.zeros((2 * K + 1, L + 1), dtype=complex)
    for k in range(-K, K + 1):
        fk = hat[:, k % g.Ntheta]
        out[k + K, :] = basis.profiles[k + K] @ (wr * fk)
    return SpectralCoefficients(basis.params, K, L, out)


def synthesize(c, basis):
    """Sum coefficient-weighted normalized eigenfunctions on the basis grid."""
    if c.K > basis.K or c.L > basis.L:
        raise TruncationError("coefficients exceed basis truncation")
    g = basis.grid
    hat = np.zeros((g.Nr, g.Ntheta), dtype=complex)
    for k in range(-c.K, c.K + 1):
        radial = c.c[k + c.K, :] @ basis.profiles[k + basis.K, : c.L + 1]
        hat[:, k % g.Ntheta] += radial
    values = np.fft.ifft(hat, axis=1) * g.Ntheta
    return GridField(g, values)


def apply_H_radial(f, params):
    """Apply the Landau Hamiltonian mode-by-mode in the angular index.

    Per angular mode k the radial action is
    -d_rr - (1/r) d_r + k^2/r^2 + B0^2 r^2/4 + B0 k,
    discretized with the stencil derivative matrices.  Rows inside the
    one-sided stencil margin are returned but flagged by interior_mask().
    """
    g = f.grid
    B0 = params.B0
    hat = np.fft.fft(f.values, axis=1)
    D1, D2 = radial_derivative_matrices(g)
    r = g.r
    out = np.zeros_like(hat)
    half = g.Ntheta // 2
    for idx in range(g.Ntheta):
        k = idx if idx < half else idx - g.Ntheta
        gk = hat[:, idx]
        if not np.any(gk):
            continue
        d2 = D2 @ gk
        d1 = D1 @ gk
        out[:, idx] = (
            -d2 - d1 / r + (k * k) / (r * r) * gk
            + (B0 * B0) * (r * r) / 4.0 * gk
            + B0 * k * gk
        )
    return GridField(g, np.fft.ifft(out, axis=1))


def eigen_residual(basis, k, ell):
    """Relative interior residual of H applied to a sampled eigenfunction."""
    g = basis.grid
    profile = basis.profiles[k + basis.K, ell]
    field = GridField(g, np.outer(profile, np.exp(1j * k * g.theta)))
    lam = basis.lam[k + basis.K, ell]
    hf = apply_H_radial(field, basis.params)
    mask = g.interior_mask()
    wr = (g.w * g.r)[mask]
    diff = hf.values[mask] - lam * field.values[mask]
    num = np.sqrt(np.sum(np.abs(diff) ** 2 * wr[:, None]))
    den = lam * np.sqrt(np.sum(np.abs(field.values[mask]) ** 2 * wr[:, None]))
    return float(num / den)


# ---------------------------------------------------------------------------
# Norms

def lp_norm(f, p):
    """L^p norm by grid quadrature; grid maximum for p = inf."""
    if p < 1:
        raise ValueError("p must be >= 1")
    a = np.abs(f.values)
    if np.isinf(p):
        return float(a.max())
    return float(f.grid.quad2d(a**p) ** (1.0 / p))


def sobolev_besov_norm(c, s, p=2.0, r=2.0, variant="homogeneous-sobolev",
                       basis=None):
    """Sobolev and Besov norms built from the Landau spectral data.

    Sobolev variants require p = r = 2 and act directly on coefficients.
    The Besov norm aggregates dyadic pieces, with the low-frequency cap
    phi_0 collecting every block j <= 0; for p != 2 the pieces are
    synthesized on the basis grid, so `basis` is required.
    """
    lam = c.eigenvalues()
    if variant == "homogeneous-sobolev":
        if p != 2 or r != 2:
            raise UnsupportedCombinationError("sobolev norms require p = r = 2")
        return float(np.sqrt(np.sum(lam**s * np.abs(c.c) ** 2)))
    if variant == "inhomogeneous-sobolev":
        if p != 2 or r != 2:
            raise UnsupportedCombinationError("sobolev norms require p = r = 2")
        shift = c.params.m**2 + c.params.B0
        return float(np.sqrt(np.sum((lam + shift) ** s * np.abs(c.c) ** 2)))
    if variant != "besov":
        raise UnsupportedCombinationError(f"unknown variant {variant!r}")
    if not (1 <= p < np.inf and 1 <= r < np.inf):
        raise UnsupportedCombinationError("besov norm needs finite p, r >= 1")

    from . import multipliers  # local import; multipliers builds on this module

    jmax = int(np.ceil(np.log2(np.sqrt(lam.max())))) + 1
    total = 0.0
    for j in range(0, jmax + 1):
        if j == 0:
            piece = multipliers.apply_multiplier(
                multipliers.bump_phi0, c, argument="sqrtH"
            )
        else:
            piece = multipliers.lp_project(j, c)
        if p == 2:
            piece_norm = piece.l2_norm()
        else:
            if basis is None:
                raise UnsupportedCombinationError(
                    "besov norm with p != 2 needs a basis for synthesis"
                )
            piece_norm = lp_norm(synthesize(piece, basis), p)
        total += (2.0 ** (j * s * r)) * piece_norm**r
    return float(total ** (1.0 / r))


# ---------------------------------------------------------------------------
# Plain-text serialization

def save_coefficients(c, path):
    """Write coefficients as a documented text table (k ell re im rows)."""
    with open(path, "w") as fh:
        fh.write("# magdirac coefficients v1\n")
        fh.write(f"# B0 = {c.params.B0!r}\n")
        fh.write(f"# m = {c.params.m!r}\n")
        fh.write(f"# K = {c.K}\n")
        fh.write(f"# L = {c.L}\n")
        fh.write("# columns: k ell re im\n")
        for k in range(-c.K, c.K + 1):
            for ell in range(c.L + 1):
                z = c.c[k + c.K, ell]
                fh.write(f"{k} {ell} {z.real!r} {z.imag!r}\n")


def load_coefficients(path):
    header = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "=" in line:
                    key, _, val = line[1:].partition("=")
                    header[key.strip()] = val.strip()
                continue
            rows.append(line.split())
    params = spectrum.FieldParams(B0=float(header["B0"]), m=float(header["m"]))
    K, L = int(header["K"]), int(header["L"])
    c = SpectralCoefficients.zeros(params, K, L)
    for k, ell, re, im in rows:
        c[int(k), int(ell)] = float(re) + 1j * float(im)
    return c


def save_grid_field(f, path):
    with open(path, "w") as fh:
        fh.write("# magdirac grid field v1\n")
        fh.write(f"# R = {f.grid.R!r}\n")
        fh.write(f"# Nr = {f.grid.Nr}\n")
        fh.write(f"# Ntheta = {f.grid.Ntheta}\n")
        fh.write("# columns: i j re im\n")
        for i in range(f.grid.Nr):
            for j in range(f.grid.Ntheta):
                z = f.values[i, j]
                fh.write(f"{i} {j} {z.real!r} {z.imag!r}\n")


def load_grid_field(path):
    header = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "=" in line:
                    key, _, val = line[1:].partition("=")
                    header[key.strip()] = val.strip()
                continue
            rows.append(line.split())
    grid = build_polar_grid(float(header["R"]), int(header["Nr"]), int(header["Ntheta"]))
    values = np.zeros((grid.Nr, grid.Ntheta), dtype=complex)
    for i, j, re, im in rows:
        values[int(i), int(j)] = float(re) + 1j * float(im)
    return GridField(grid, values)

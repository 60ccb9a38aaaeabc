"""Landau spectral data: eigenvalues, eigenfunctions, norms, multiplicities.

Conventions are fixed by the eigenvalue formula
lambda_{k,ell} = (2 ell + 1 + |k| + k) B0 paired with the angular factor
exp(i k theta); every other sign in the package (ladder maps, kernel
phases) follows from keeping that pair self-consistent.
"""

import os
from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarseError
from .specfun import laguerre_p, weighted_laguerre_rows

__all__ = [
    "FieldParams",
    "ModeIndex",
    "ModeBasis",
    "eigenvalue",
    "kg_frequency",
    "eigenfunction_eval",
    "radial_profile",
    "multiplicity_formula",
    "multiplicity_brute",
    "level_column",
    "suggest_radius",
]


@dataclass(frozen=True)
class FieldParams:
    """Uniform field strength B0 > 0 and particle mass m >= 0."""

    B0: float = 1.0
    m: float = 0.0

    def __post_init__(self):
        if not self.B0 > 0:
            raise ValueError("B0 must be positive")
        if self.m < 0:
            raise ValueError("m must be non-negative")


@dataclass(frozen=True)
class ModeIndex:
    k: int
    ell: int

    def __post_init__(self):
        if self.ell < 0:
            raise ValueError("ell must be non-negative")


def eigenvalue(k, ell, params):
    """lambda_{k,ell} = (2 ell + 1 + |k| + k) B0; always >= B0."""
    if ell < 0:
        raise ValueError("ell must be non-negative")
    return (2 * ell + 1 + abs(k) + k) * params.B0


def mode_eigenvalues(params, K, L):
    """Eigenvalue table shaped (2K+1, L+1), row index k + K."""
    k = np.arange(-K, K + 1)[:, None]
    ell = np.arange(L + 1)[None, :]
    return (2 * ell + 1 + np.abs(k) + k) * params.B0


def kg_frequency(k, ell, params, spin):
    """Klein-Gordon frequency sqrt(lambda + m^2 -+ B0) for spin up/down.

    The radicand is assembled in integer form so the massless spin-up
    zero modes (ell = 0, k <= 0) come out exactly zero.
    """
    if spin == "up":
        radicand = (2 * ell + abs(k) + k) * params.B0 + params.m**2
    elif spin == "down":
        radicand = (2 * ell + 2 + abs(k) + k) * params.B0 + params.m**2
    else:
        raise ValueError("spin must be 'up' or 'down'")
    return np.sqrt(radicand)


def mode_kg_frequencies(params, K, L, spin):
    k = np.arange(-K, K + 1)[:, None]
    ell = np.arange(L + 1)[None, :]
    shift = 0 if spin == "up" else 2
    if spin not in ("up", "down"):
        raise ValueError("spin must be 'up' or 'down'")
    radicand = (2 * ell + shift + np.abs(k) + k) * params.B0 + params.m**2
    return np.sqrt(radicand)


def radial_profile(k, ell, params, r):
    """Unnormalized radial part r^{|k|} e^{-B0 r^2/4} P_{k,ell}(B0 r^2/2)."""
    r = np.asarray(r, dtype=float)
    x = params.B0 * r * r / 2.0
    return r ** abs(k) * np.exp(-x / 2.0) * laguerre_p(k, ell, x)


def eigenfunction_eval(k, ell, params, x):
    """Evaluate V_{k,ell} at a planar point (or array of points).

    `x` is a pair (x1, x2) or an ndarray whose last axis has length 2.
    At the origin the angular factor is undefined; the value is 0 for
    k != 0 and the polynomial value (= 1) for k = 0.
    """
    pt = np.asarray(x, dtype=float)
    scalar = pt.ndim == 1
    pt = np.atleast_2d(pt)
    r = np.hypot(pt[..., 0], pt[..., 1])
    out = np.zeros(r.shape, dtype=complex)
    origin = r == 0.0
    reg = ~origin
    if np.any(reg):
        theta = np.arctan2(pt[..., 1][reg], pt[..., 0][reg])
        out[reg] = radial_profile(k, ell, params, r[reg]) * np.exp(1j * k * theta)
    if np.any(origin):
        out[origin] = 1.0 if k == 0 else 0.0
    return complex(out[0]) if scalar else out


def multiplicity_formula(lam, params, K):
    """Count j in [-K, K] passing the integer-membership multiplicity test."""
    count = 0
    for j in range(-K, K + 1):
        v = (lam - j * params.B0) / (2.0 * params.B0) - (abs(j) + 1) / 2.0
        if v > -1e-9 and abs(v - round(v)) < 1e-9:
            count += 1
    return count


def multiplicity_brute(lam, params, K, L):
    """Count eigenvalue hits by direct enumeration over the (k, ell) window."""
    count = 0
    for k in range(-K, K + 1):
        for ell in range(L + 1):
            if abs(eigenvalue(k, ell, params) - lam) < 1e-9 * params.B0:
                count += 1
    return count


def suggest_radius(K, L, B0, tol=1e-12):
    """Smallest R with R^(K+2L) exp(-B0 R^2/4) below tol (0.5 steps)."""
    deg = K + 2 * L
    R = max(2.0, np.sqrt(2.0 * (2 * L + 1 + 2 * K) / B0))
    while deg * np.log(R) - B0 * R * R / 4.0 >= np.log(tol):
        R += 0.5
    return float(R)


def level_column(params, nmax, r, k=0):
    """Normalized radial profiles for angular mode k in {0, -1}, all
    levels n = 0..nmax, sampled on `r`.  Shape (nmax+1, len(r)).

    These extend the sampled basis to arbitrarily high Landau levels via
    the stable weighted Laguerre recurrence; used by the kernel-column
    scans where only the origin-reaching modes contribute.
    """
    r = np.asarray(r, dtype=float)
    x = params.B0 * r * r / 2.0
    if k == 0:
        rows = np.array(list(weighted_laguerre_rows(nmax, x, alpha=0)))
        return np.sqrt(params.B0 / (2.0 * np.pi)) * rows
    if k == -1:
        rows = np.array(list(weighted_laguerre_rows(nmax, x, alpha=1)))
        scale = params.B0 * r / np.sqrt(4.0 * np.pi)
        fac = 1.0 / np.sqrt(np.arange(1, nmax + 2))
        return scale[None, :] * rows * fac[:, None]
    raise ValueError("level_column supports k = 0 or k = -1")


class ModeBasis:
    """Sampled normalized eigenfunctions with eigenvalues and norms.

    profiles[k + K, ell] holds the normalized radial profile on the grid
    nodes; the unnormalized L^2 norm constants are kept alongside.
    """

    def __init__(self, params, grid, K, L, lam, norms, profiles):
        self.params = params
        self.grid = grid
        self.K = K
        self.L = L
        self.lam = lam
        self.norms = norms
        self.profiles = profiles

    @classmethod
    def build(cls, grid, params, K, L, validate=True, tail_tol=1e-6,
              gram_tol=1e-8, norm_tol=1e-8):
        """Sample and normalize every mode with |k| <= K, ell <= L.

        Raises GridTooCoarseError when the boundary tail of a mode is not
        negligible (R too small for the truncation), when norm constants
        move under radial refinement, or when same-k profiles fail to come
        out orthogonal.
        """
        from .fields import build_polar_grid  # deferred: fields imports us

        lam = mode_eigenvalues(params, K, L)
        raw = np.zeros((2 * K + 1, L + 1, grid.Nr))
        for k in range(-K, K + 1):
            for ell in range(L + 1):
                raw[k + K, ell] = radial_profile(k, ell, params, grid.r)
        sq = 2.0 * np.pi * np.einsum("kli,i->kl", raw**2, grid.w * grid.r)
        norms = np.sqrt(sq)
        profiles = raw / norms[:, :, None]

        if validate:
            worst = np.max(np.abs(profiles[:, :, -1]))
            if worst > tail_tol:
                raise GridTooCoarseError(
                    f"boundary amplitude {worst:.2e} exceeds {tail_tol:.0e}; "
                    f"increase R (suggest_radius gives "
                    f"{suggest_radius(K, L, params.B0):.1f})"
                )
            # spot-check the extreme modes against a doubled radial rule
            fine = build_polar_grid(grid.R, 2 * grid.Nr, grid.Ntheta)
            for k, ell in ((K, L), (-K, L), (0, L), (K, 0)):
                g2 = radial_profile(k, ell, params, fine.r)
                ref = 2.0 * np.pi * np.sum(g2 * g2 * fine.w * fine.r)
                rel = abs(ref - sq[k + K, ell]) / ref
                if rel > norm_tol:
                    raise GridTooCoarseError(
                        f"norm of mode ({k},{ell}) moved by {rel:.2e} under "
                        "radial refinement"
                    )
            wr = 2.0 * np.pi * grid.w * grid.r
            for k in range(-K, K + 1):
                gram = profiles[k + K] @ (profiles[k + K] * wr).T
                off = gram - np.diag(np.diag(gram))
                if np.max(np.abs(off)) > gram_tol:
                    raise GridTooCoarseError(
                        f"Gram off-diagonal {np.max(np.abs(off)):.2e} at k={k}"
                    )
        return cls(params, grid, K, L, lam, norms, profiles)

    def norm_constant(self, k, ell):
        """Quadrature L^2 norm of the unnormalized eigenfunction."""
        return float(self.norms[k + self.K, ell])

    def profile(self, k, ell):
        return self.profiles[k + self.K, ell]

    # -- plain-text cache -------------------------------------------------

    def metadata(self):
        return {
            "B0": repr(self.params.B0),
            "m": repr(self.params.m),
            "K": str(self.K),
            "L": str(self.L),
            "R": repr(self.grid.R),
            "Nr": str(self.grid.Nr),
            "Ntheta": str(self.grid.Ntheta),
        }

    def save(self, directory):
        """Write the mode table and radial sample table (text, versioned)."""
        os.makedirs(directory, exist_ok=True)
        meta = self.metadata()
        header = "".join(f"# {key} = {val}\n" for key, val in meta.items())
        with open(os.path.join(directory, "modes.txt"), "w") as fh:
            fh.write("# magdirac mode table v1\n")
            fh.write(header)
            fh.write("# columns: k ell lambda norm\n")
            for k in range(-self.K, self.K + 1):
                for ell in range(self.L + 1):
                    fh.write(
                        f"{k} {ell} {self.lam[k + self.K, ell]!r} "
                        f"{self.norms[k + self.K, ell]!r}\n"
                    )
        with open(os.path.join(directory, "profiles.txt"), "w") as fh:
            fh.write("# magdirac radial samples v1\n")
            fh.write(header)
            fh.write("# columns: k ell then Nr normalized samples\n")
            for k in range(-self.K, self.K + 1):
                for ell in range(self.L + 1):
                    row = " ".join(repr(v) for v in self.profiles[k + self.K, ell])
                    fh.write(f"{k} {ell} {row}\n")

    @staticmethod
    def cache_metadata(directory):
        path = os.path.join(directory, "modes.txt")
        if not os.path.exists(path):
            return None
        meta = {}
        with open(path) as fh:
            for line in fh:
                if not line.startswith("#"):
                    break
                if "=" in line:
                    key, _, val = line[1:].partition("=")
                    meta[key.strip()] = val.strip()
        return meta

    @classmethod
    def load(cls, directory):
        from .fields import build_polar_grid

        meta = cls.cache_metadata(directory)
        if meta is None:
            raise FileNotFoundError(f"no mode cache under {directory}")
        params = FieldParams(B0=float(meta["B0"]), m=float(meta["m"]))
        K, L = int(meta["K"]), int(meta["L"])
        grid = build_polar_grid(float(meta["R"]), int(meta["Nr"]), int(meta["Ntheta"]))
        lam = np.zeros((2 * K + 1, L + 1))
        norms = np.zeros_like(lam)
        with open(os.path.join(directory, "modes.txt")) as fh:
            for line in fh:
                if line.startswith("#"):
                    continue
                k, ell, lv, nv = line.split()
                lam[int(k) + K, int(ell)] = float(lv)
                norms[int(k) + K, int(ell)] = float(nv)
        profiles = np.zeros((2 * K + 1, L + 1, grid.Nr))
        with open(os.path.join(directory, "profiles.txt")) as fh:
            for line in fh:
                if line.startswith("#"):
                    continue
                parts = line.split()
                k, ell = int(parts[0]), int(parts[1])
                profiles[k + K, ell] = [float(v) for v in parts[2:]]
        return cls(params, grid, K, L, lam, norms, profiles)

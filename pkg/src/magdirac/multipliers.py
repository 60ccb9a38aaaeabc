"""Littlewood-Paley bump, dyadic projectors, and diagonal spectral multipliers.

One fixed bump is used everywhere: phi(lambda) = psi(lambda) - psi(2 lambda)
with psi the exp(-1/x)-quotient smooth step (1 on [0,1], 0 on [2,inf)),
giving supp phi = [1/2, 2] and the exact dyadic partition of unity
sum_j phi(2^-j lambda) = 1 for lambda > 0.
"""

import numpy as np

from . import spectrum
from .errors import MultiplierError
from .fields import SpectralCoefficients

__all__ = ["bump_phi", "bump_phi0", "apply_multiplier", "lp_project", "BUMP_ID"]

BUMP_ID = "exp-quotient-step[1/2,2]"


def _eta(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def _psi(lam):
    """Smooth step: 1 on [0,1], 0 on [2,inf)."""
    lam = np.asarray(lam, dtype=float)
    a = _eta(2.0 - lam)
    b = _eta(lam - 1.0)
    return a / (a + b + (a + b == 0.0))


def bump_phi(lam):
    """Dyadic bump, supported in [1/2, 2] with values in [0, 1]."""
    lam = np.asarray(lam, dtype=float)
    out = _psi(lam) - _psi(2.0 * lam)
    return float(out) if out.ndim == 0 else out


def bump_phi0(lam):
    """Low-frequency cap sum_{j<=0} phi(2^-j lam); 1 below 1/2, 0 above 2.

    The finitely many nonzero terms are summed explicitly; lam = 0 (where
    every individual bump vanishes) returns the cap value 1.
    """
    lam = np.asarray(lam, dtype=float)
    out = np.zeros_like(lam)
    pos = lam > 0
    if np.any(pos):
        lp = lam[pos]
        acc = np.zeros_like(lp)
        jlo = int(np.floor(np.log2(lp.min()))) - 1 if lp.min() > 0 else -1
        for j in range(min(jlo, -1), 1):
            acc += bump_phi(2.0 ** (-j) * lp)
        out[pos] = acc
    out[~pos] = 1.0
    return float(out) if out.ndim == 0 else out


def apply_multiplier(F, c, argument="sqrtH"):
    """Multiply coefficients by F evaluated on the chosen mode quantity.

    argument: 'sqrtH' (sqrt of the eigenvalue), 'kg-up'/'kg-down'
    (Klein-Gordon frequencies), or 'plain-lambda'.  F must accept ndarray
    input and return finite values on every mode in the truncation.
    """
    lam = c.eigenvalues()
    if argument == "sqrtH":
        arg = np.sqrt(lam)
    elif argument == "kg-up":
        arg = spectrum.mode_kg_frequencies(c.params, c.K, c.L, "up")
    elif argument == "kg-down":
        arg = spectrum.mode_kg_frequencies(c.params, c.K, c.L, "down")
    elif argument == "plain-lambda":
        arg = lam
    else:
        raise ValueError(f"unknown argument {argument!r}")
    vals = np.asarray(F(arg))
    if not np.all(np.isfinite(vals)):
        raise MultiplierError("multiplier produced non-finite values")
    return SpectralCoefficients(c.params, c.K, c.L, c.c * vals)


def lp_project(j, c):
    """Dyadic frequency projector phi(2^-j sqrt(H)) on coefficients."""
    return apply_multiplier(lambda x: bump_phi(2.0 ** (-j) * x), c, "sqrtH")


def active_j_range(c):
    """Dyadic blocks that can meet the coefficient truncation's spectrum."""
    lam = c.eigenvalues()
    lo = int(np.floor(np.log2(np.sqrt(lam.min())))) - 1
    hi = int(np.ceil(np.log2(np.sqrt(lam.max())))) + 1
    return range(lo, hi + 1)

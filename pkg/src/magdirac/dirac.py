"""The magnetic Dirac operator on the Landau eigenbasis.

Spinor layout: the sector attached to upper angular mode k couples it to
lower angular mode k - 1.  This pairing is the one compatible with the
package's eigenvalue convention lambda = (2 ell + 1 + |k| + k) B0: it
puts the squaring identity D^2 = diag(H + m^2 - B0, H + m^2 + B0) with
the -B0 block on the upper component and the massless kernel on the
upper lowest-Landau modes k <= 0.

Radial ladder maps (first-order, shifting the angular mode by -1/+1):
  on upper profiles, mode k:   i (d_r + k/r + (B0/2) r)      -> mode k-1
  on lower profiles, mode j:   i (d_r - j/r - (B0/2) r)      -> mode j+1
These are mutual adjoints in L^2(r dr), so the assembled sector matrix
[[m, -D+], [-D-, -m]] is Hermitian.
"""

from dataclasses import dataclass, field

import numpy as np

from . import spectrum
from .errors import LeakageError, TruncationError
from .fields import radial_derivative_matrices

__all__ = [
    "SpinorCoefficients",
    "LadderTable",
    "ladder_coefficients",
    "apply_dirac",
    "squaring_residual",
    "evolve_dirac",
    "dirac_norm_identity",
    "deficiency_window_check",
    "sector_matrix",
    "spinor_lp_project",
    "boundary_mask",
]

# Ladder images below this L2 magnitude are snapped to an exact kernel row.
KERNEL_SNAP = 1e-7


def _lower_eigenvalues(params, K, L):
    """Eigenvalue table for the lower component, rows j = -K-1 .. K-1."""
    j = np.arange(-K - 1, K)[:, None]
    ell = np.arange(L + 1)[None, :]
    return (2 * ell + 1 + np.abs(j) + j) * params.B0


def _lower_kg(params, K, L):
    j = np.arange(-K - 1, K)[:, None]
    ell = np.arange(L + 1)[None, :]
    return np.sqrt((2 * ell + 2 + np.abs(j) + j) * params.B0 + params.m**2)


def _upper_kg(params, K, L):
    k = np.arange(-K, K + 1)[:, None]
    ell = np.arange(L + 1)[None, :]
    return np.sqrt((2 * ell + np.abs(k) + k) * params.B0 + params.m**2)


@dataclass
class SpinorCoefficients:
    """Two-component state: upper rows k in [-K, K], lower rows k-1.

    `upper` is indexed [k + K, ell]; `lower` is indexed [j + K + 1, ell]
    with j the lower component's own angular mode, j = k - 1.
    """

    params: "spectrum.FieldParams"
    K: int
    L: int
    upper: np.ndarray
    lower: np.ndarray

    def __post_init__(self):
        shape = (2 * self.K + 1, self.L + 1)
        self.upper = np.asarray(self.upper, dtype=complex)
        self.lower = np.asarray(self.lower, dtype=complex)
        if self.upper.shape != shape or self.lower.shape != shape:
            raise TruncationError("spinor arrays do not match truncation")

    @classmethod
    def zeros(cls, params, K, L):
        shape = (2 * K + 1, L + 1)
        return cls(params, K, L, np.zeros(shape, complex), np.zeros(shape, complex))

    def copy(self):
        return SpinorCoefficients(
            self.params, self.K, self.L, self.upper.copy(), self.lower.copy()
        )

    def l2_norm(self):
        return float(np.sqrt(np.sum(np.abs(self.upper) ** 2)
                             + np.sum(np.abs(self.lower) ** 2)))

    def set_upper(self, k, ell, val):
        self.upper[k + self.K, ell] = val

    def set_lower(self, j, ell, val):
        self.lower[j + self.K + 1, ell] = val


@dataclass
class LadderTable:
    """Single-target ladder data on a mode basis.

    For every basis mode the image under each first-order map is stored as
    (target ell, complex coefficient); the angular target is always k - 1
    for the down map and j + 1 for the up map.  `*_valid` is False where
    the target falls outside the basis truncation (boundary modes).
    """

    params: "spectrum.FieldParams"
    K: int
    L: int
    down_tl: np.ndarray = field(repr=False)
    down_coef: np.ndarray = field(repr=False)
    down_valid: np.ndarray = field(repr=False)
    up_tl: np.ndarray = field(repr=False)
    up_coef: np.ndarray = field(repr=False)
    up_valid: np.ndarray = field(repr=False)
    down_measured: np.ndarray = field(repr=False, default=None)
    up_measured: np.ndarray = field(repr=False, default=None)


def ladder_coefficients(basis, leak_tol=1e-8, coef_tol=1e-6):
    """Measure both ladder maps on every basis mode by finite differences.

    Each image is projected onto the target angular sector's profiles;
    anything but single-target support raises LeakageError.  Images below
    the kernel snap threshold are stored as exact zeros.

    The measured coefficient must agree with the spectral value
    +-i sqrt(lambda -+ B0) to `coef_tol`; the stored table then carries
    the exact spectral value (sign taken from the measurement), so that
    the assembled operator is exactly Hermitian and the squared ladder
    reproduces the Klein-Gordon frequencies to rounding.  The raw
    measurements are kept in the *_measured arrays.
    """
    g = basis.grid
    K, L = basis.K, basis.L
    D1, _ = radial_derivative_matrices(g)
    r = g.r
    wr = 2.0 * np.pi * g.w * g.r
    B0 = basis.params.B0
    mask = g.interior_mask()

    shape = (2 * K + 1, L + 1)
    down_tl = np.zeros(shape, dtype=int)
    down_coef = np.zeros(shape, dtype=complex)
    down_valid = np.zeros(shape, dtype=bool)
    up_tl = np.zeros(shape, dtype=int)
    up_coef = np.zeros(shape, dtype=complex)
    up_valid = np.zeros(shape, dtype=bool)
    down_meas = np.zeros(shape, dtype=complex)
    up_meas = np.zeros(shape, dtype=complex)

    def snap(measured, magnitude_sq, label):
        """Replace a measured coefficient by its exact spectral value."""
        exact_mag = np.sqrt(magnitude_sq)
        sign = 1.0 if measured.imag >= 0 else -1.0
        exact = sign * 1j * exact_mag
        if abs(measured - exact) > coef_tol * max(1.0, exact_mag):
            raise LeakageError(
                f"{label}: measured ladder coefficient {measured:.8e} is "
                f"{abs(measured - exact):.2e} from spectral value {exact:.8e}"
            )
        return exact

    def project(w, target_k):
        """Single-target projection of a radial image onto sector target_k."""
        total = float(np.sum(np.abs(w[mask]) ** 2 * wr[mask]))
        if total < KERNEL_SNAP**2:
            return None, 0.0 + 0.0j, True
        coefs = basis.profiles[target_k + K] @ (wr * w)
        main = int(np.argmax(np.abs(coefs)))
        # residual after removing the main target, on interior nodes
        resid = w - coefs[main] * basis.profiles[target_k + K, main]
        off = float(np.sum(np.abs(resid[mask]) ** 2 * wr[mask]))
        if off / total > leak_tol:
            raise LeakageError(
                f"off-target mass fraction {off / total:.2e} exceeds "
                f"{leak_tol:.0e} (target sector k={target_k})"
            )
        return main, complex(coefs[main]), False

    for k in range(-K, K + 1):
        for ell in range(L + 1):
            prof = basis.profiles[k + K, ell]
            # down map on upper profiles: i (d_r + k/r + B0 r/2), k -> k-1.
            # Eigenvalue arithmetic puts the target at ell (k >= 1) or
            # ell - 1 (k <= 0); out-of-range targets stay invalid.
            if k - 1 >= -K and (ell if k >= 1 else ell - 1) >= 0:
                w = 1j * (D1 @ prof + (k / r) * prof + (B0 * r / 2.0) * prof)
                main, coef, is_kernel = project(w, k - 1)
                if is_kernel:
                    down_valid[k + K, ell] = True
                else:
                    lam = basis.lam[k + K, ell]
                    down_tl[k + K, ell] = main
                    down_meas[k + K, ell] = coef
                    down_coef[k + K, ell] = snap(coef, lam - B0,
                                                 f"down ({k},{ell})")
                    down_valid[k + K, ell] = True
            elif k - 1 >= -K:
                # annihilated lowest-level mode; image is exactly zero
                down_valid[k + K, ell] = True
            # up map on lower profiles: i (d_r - j/r - B0 r/2), j -> j+1;
            # target radial index ell (j >= 0) or ell + 1 (j <= -1).
            j = k
            if j + 1 <= K and (ell if j >= 0 else ell + 1) <= L:
                w = 1j * (D1 @ prof - (j / r) * prof - (B0 * r / 2.0) * prof)
                main, coef, is_kernel = project(w, j + 1)
                if not is_kernel and main is not None:
                    lam = basis.lam[j + K, ell]
                    up_tl[j + K, ell] = main
                    up_meas[j + K, ell] = coef
                    up_coef[j + K, ell] = snap(coef, lam + B0,
                                               f"up ({j},{ell})")
                    up_valid[j + K, ell] = True
    return LadderTable(basis.params, K, L, down_tl, down_coef, down_valid,
                       up_tl, up_coef, up_valid, down_meas, up_meas)


def _check_table(s, table):
    if table.K < s.K + 1 or table.L < s.L:
        raise TruncationError(
            "ladder table truncation too small for the spinor; need "
            f"K >= {s.K + 1}, L >= {s.L}"
        )


def boundary_mask(s, table):
    """Masks of spinor modes whose ladder image leaves the truncation.

    Returns (upper_mask, lower_mask); True entries are boundary modes and
    are excluded from residual assertions.
    """
    upper = np.zeros_like(s.upper, dtype=bool)
    lower = np.zeros_like(s.lower, dtype=bool)
    # lower modes j <= -1 raise ell by one; the top radial row leaves L
    for j in range(-s.K - 1, s.K):
        if j <= -1:
            lower[j + s.K + 1, s.L] = True
    return upper, lower


def apply_dirac(s, table):
    """Matrix action [[m, -D+], [-D-, -m]] on spinor coefficients.

    Contributions whose ladder target leaves the truncation are dropped;
    the affected modes are those flagged by `boundary_mask`.
    """
    _check_table(s, table)
    p = s.params
    K, L, TK = s.K, s.L, table.K
    out = SpinorCoefficients.zeros(p, K, L)
    out.upper = p.m * s.upper.copy()
    out.lower = -p.m * s.lower.copy()
    # -D- on upper: k -> k-1 feeds lower row (k-1) + K + 1 = k + K
    for k in range(-K, K + 1):
        row = s.upper[k + K]
        if not row.any():
            continue
        tl = table.down_tl[k + TK]
        cf = table.down_coef[k + TK]
        ok = table.down_valid[k + TK]
        for ell in np.nonzero(row)[0]:
            if ok[ell] and cf[ell] != 0:
                out.lower[k + K, tl[ell]] -= cf[ell] * row[ell]
    # -D+ on lower: j -> j+1 feeds upper row (j+1) + K
    for j in range(-K - 1, K):
        row = s.lower[j + K + 1]
        if not row.any():
            continue
        tl = table.up_tl[j + TK]
        cf = table.up_coef[j + TK]
        ok = table.up_valid[j + TK]
        for ell in np.nonzero(row)[0]:
            if ok[ell] and cf[ell] != 0 and tl[ell] <= L:
                out.upper[j + 1 + K, tl[ell]] -= cf[ell] * row[ell]
    return out


def squaring_residual(s, table):
    """Relative defect of D^2 against diag(H + m^2 - B0, H + m^2 + B0).

    Boundary modes (ladder leaves truncation) are excluded on both sides.
    """
    _check_table(s, table)
    p = s.params
    dd = apply_dirac(apply_dirac(s, table), table)
    lam_up = spectrum.mode_eigenvalues(p, s.K, s.L) + p.m**2 - p.B0
    lam_lo = _lower_eigenvalues(p, s.K, s.L) + p.m**2 + p.B0
    bu, bl = boundary_mask(s, table)
    du = (dd.upper - lam_up * s.upper) * ~bu
    dl = (dd.lower - lam_lo * s.lower) * ~bl
    num = np.sqrt(np.sum(np.abs(du) ** 2) + np.sum(np.abs(dl) ** 2))
    den = np.sqrt(
        np.sum(np.abs(lam_up * s.upper * ~bu) ** 2)
        + np.sum(np.abs(lam_lo * s.lower * ~bl) ** 2)
    )
    if den == 0.0:
        return 0.0
    return float(num / den)


def evolve_dirac(t, s, table):
    """Flow of i d_t u = D u via the cos / sinc functional calculus.

    u(t) = cos(t |D|) s - i sin(t |D|)/|D| (D s), with |D| acting as the
    Klein-Gordon frequency on each component and sin(x)/x -> t on the
    massless zero modes.
    """
    _check_table(s, table)
    p = s.params
    om_up = _upper_kg(p, s.K, s.L)
    om_lo = _lower_kg(p, s.K, s.L)
    ds = apply_dirac(s, table)
    out = SpinorCoefficients.zeros(p, s.K, s.L)
    sinc_up = t * np.sinc(t * om_up / np.pi)
    sinc_lo = t * np.sinc(t * om_lo / np.pi)
    out.upper = np.cos(t * om_up) * s.upper - 1j * sinc_up * ds.upper
    out.lower = np.cos(t * om_lo) * s.lower - 1j * sinc_lo * ds.lower
    return out


def dirac_norm_identity(s, table):
    """(lhs, rhs) of ||D s||^2 = <(H-B0)s1, s1> + <(H+B0)s2, s2> at m = 0.

    Also enforces the H^1 domination ||D s|| <= ||s||_{H^1} built from the
    inhomogeneous Sobolev weight (lambda + m^2 + B0) on both components.
    """
    if s.params.m != 0:
        raise ValueError("the displayed identity is the massless case")
    _check_table(s, table)
    ds = apply_dirac(s, table)
    lhs = ds.l2_norm() ** 2
    lam_up = spectrum.mode_eigenvalues(s.params, s.K, s.L)
    lam_lo = _lower_eigenvalues(s.params, s.K, s.L)
    B0 = s.params.B0
    rhs = float(
        np.sum((lam_up - B0) * np.abs(s.upper) ** 2)
        + np.sum((lam_lo + B0) * np.abs(s.lower) ** 2)
    )
    h1 = float(
        np.sum((lam_up + B0) * np.abs(s.upper) ** 2)
        + np.sum((lam_lo + B0) * np.abs(s.lower) ** 2)
    )
    if lhs > h1 * (1.0 + 1e-8) + 1e-12:
        raise AssertionError("H^1 domination violated")
    return lhs, rhs


def deficiency_window_check():
    """Integer windows from the endpoint analysis: solution sets of
    0 < |k|+1 < 2 and 0 < |k+1|+1 < 2, and their intersection."""
    window1 = {k for k in range(-5, 6) if 0 < abs(k) + 1 < 2}
    window2 = {k for k in range(-5, 6) if 0 < abs(k + 1) + 1 < 2}
    return window1, window2, window1 & window2


def sector_matrix(k, L, table):
    """Dense Hermitian sector matrix on (upper (k, 0..L), lower (k-1, 0..L)).

    Independent oracle: its eigenvalues must pair as +-kg_frequency except
    for unpaired +-m entries on the kernel / truncation-edge rows.
    """
    if not (-table.K + 1 <= k <= table.K):
        raise TruncationError("sector outside table truncation")
    p = table.params
    n = L + 1
    M = np.zeros((2 * n, 2 * n), dtype=complex)
    M[:n, :n] = p.m * np.eye(n)
    M[n:, n:] = -p.m * np.eye(n)
    for ell in range(n):
        # -D- : upper (k, ell) -> lower (k-1, tl)
        if table.down_valid[k + table.K, ell] and table.down_coef[k + table.K, ell] != 0:
            tl = table.down_tl[k + table.K, ell]
            if tl <= L:
                M[n + tl, ell] = -table.down_coef[k + table.K, ell]
        # -D+ : lower (k-1, ell) -> upper (k, tl)
        j = k - 1
        if table.up_valid[j + table.K, ell] and table.up_coef[j + table.K, ell] != 0:
            tl = table.up_tl[j + table.K, ell]
            if tl <= L:
                M[tl, n + ell] = -table.up_coef[j + table.K, ell]
    return M


def spinor_lp_project(j, s, localization="sqrtH"):
    """Dyadic projector on spinors.

    localization 'sqrtH' uses phi(2^-j sqrt(lambda)) per component (the
    statement's convention); 'dirac-modulus' uses phi(2^-j |D|), which
    commutes exactly with the Dirac flow.
    """
    from .multipliers import bump_phi

    p = s.params
    if localization == "sqrtH":
        au = np.sqrt(spectrum.mode_eigenvalues(p, s.K, s.L))
        al = np.sqrt(_lower_eigenvalues(p, s.K, s.L))
    elif localization == "dirac-modulus":
        au = _upper_kg(p, s.K, s.L)
        al = _lower_kg(p, s.K, s.L)
    else:
        raise ValueError("localization must be 'sqrtH' or 'dirac-modulus'")
    out = s.copy()
    out.upper = s.upper * bump_phi(2.0 ** (-j) * au)
    out.lower = s.lower * bump_phi(2.0 ** (-j) * al)
    return out

"""Numerical measurement of the decay, Bernstein, square-function,
norm-equivalence and Strichartz inequalities.

L^1 -> L^inf operator norms of functions of H are evaluated on the y = 0
kernel column: every eigenfunction with k != 0 vanishes at the origin, and
magnetic translation invariance makes the column supremum the full kernel
supremum.  The column only involves the k = 0 Landau-level family, which
the weighted Laguerre recurrence extends far beyond the sampled basis, so
dyadic blocks up to j ~ 6 stay desk-scale.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import multipliers, spectrum
from .errors import AdmissibilityError, TruncationError, UnsupportedCombinationError
from .fields import GridField, lp_norm, sobolev_besov_norm, synthesize
from .propagators import level_kernel_column

__all__ = [
    "EstimateReport",
    "AdmissiblePair",
    "admissible_check",
    "keel_tao_bound",
    "decay_scan",
    "bernstein_scan",
    "square_function_check",
    "strichartz_norm",
    "norm_equivalence_scan",
    "kernel_sup_bruteforce",
]


@dataclass
class EstimateReport:
    """Rows of measured-vs-bound quantities plus reproducibility metadata."""

    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    fit: dict = None

    def ratios(self):
        return np.array([row["ratio"] for row in self.rows])

    def to_csv(self, path, columns):
        with open(path, "w") as fh:
            fh.write(",".join(columns) + "\n")
            for row in self.rows:
                fh.write(",".join(_fmt(row[col]) for col in columns) + "\n")


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


@dataclass(frozen=True)
class AdmissiblePair:
    q: float
    p: float
    s: float

    def __post_init__(self):
        if not (2 <= self.q) or not (2 <= self.p < np.inf):
            raise AdmissibilityError("need q in [2,inf], p in [2,inf)")
        if 2.0 / self.q > 0.5 - 1.0 / self.p + 1e-12:
            raise AdmissibilityError(f"(q,p)=({self.q},{self.p}) not admissible")
        want = 1.0 - 1.0 / self.q - 2.0 / self.p
        if abs(self.s - want) > 1e-12:
            raise AdmissibilityError(f"s={self.s} violates the scaling relation")


def admissible_check(q, p):
    """(is_admissible, s) for the pair; s from the scaling relation."""
    ok = (2 <= q) and (2 <= p < np.inf) and (2.0 / q <= 0.5 - 1.0 / p + 1e-12)
    s = 1.0 - 1.0 / q - 2.0 / p
    return ok, s


def keel_tao_bound(alpha, sigma, q, p, h):
    """Lambda(h) = h^{-(alpha+sigma)(1/2 - 1/p) + 1/q}."""
    if not h > 0:
        raise ValueError("h must be positive")
    expo = -(alpha + sigma) * (0.5 - 1.0 / p) + 1.0 / q
    return float(h**expo)


# ---------------------------------------------------------------------------
# Level-window helpers (k = 0 column machinery)

def _level_window(params, j, phi_floor=1e-3, max_level=None):
    """Levels n with phi(2^-j sqrt(lambda_n)) possibly nonzero.

    Raises when a cap `max_level` cuts modes where the bump still exceeds
    `phi_floor`.
    """
    nmax = int(np.floor((4.0 ** (j + 1) / params.B0 - 1.0) / 2.0)) + 1
    if max_level is not None and max_level < nmax:
        lam_edge = (2 * max_level + 1) * params.B0
        if multipliers.bump_phi(2.0 ** (-j) * np.sqrt(lam_edge)) > phi_floor:
            raise TruncationError(
                f"level cap {max_level} cuts the dyadic block j={j} "
                f"(needs {nmax} levels)"
            )
        nmax = max_level
    return nmax


def _levels(params, nmax):
    return (2.0 * np.arange(nmax + 1) + 1.0) * params.B0


def _kg(lam, params, spin):
    shift = -params.B0 if spin == "up" else params.B0
    return np.sqrt(lam + params.m**2 + shift)


def _column_sup(F, params, d):
    return float(np.max(np.abs(level_kernel_column(F, params, d))))


def _decay_d_grid(j, t, B0):
    """Distances covering the light cone of a block-j half-wave kernel."""
    d_max = t + 2.0 + 48.0 * 2.0 ** (-j)
    step = 2.0 ** (-j) / 8.0 / np.sqrt(B0)
    return np.linspace(0.0, d_max, int(d_max / step) + 2)


def default_decay_times(j, params, targets=None):
    """Per-block times hitting log-spaced 2^j t targets, capped by the
    sub-cyclotron condition 2^-j t <= pi / (8 B0)."""
    if targets is None:
        targets = [2.0, 2.83, 4.0, 5.66, 8.0, 11.31, 16.0, 22.63, 32.0, 45.25, 64.0]
    tcap = (np.pi / (8.0 * params.B0)) * 2.0**j
    return [tau * 2.0 ** (-j) for tau in targets if tau * 2.0 ** (-j) <= tcap]


def decay_scan(j_range, params, spins=("up", "down"), t_grids=None,
               max_level=None, fit_window=(4.0, 64.0)):
    """Measure the microlocalized L^1 -> L^inf half-wave decay.

    For each (j, t) the operator norm of phi_j(sqrt H) e^{it sqrt(H+m^2-+B0)}
    is the supremum over distances of the level-sum kernel column; the
    recorded bound is 2^{2j} (1 + 2^j t)^{-1/2}.  A log-log slope of
    measured / 2^{2j} against 2^j t is fitted inside `fit_window`
    (sub-cyclotron times only).
    """
    report = EstimateReport()
    report.metadata = {
        "B0": params.B0, "m": params.m, "bump": multipliers.BUMP_ID,
        "fit_window": list(fit_window),
        "time_cap": "2^-j t <= pi/(8 B0)",
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    fit_x, fit_y = [], []
    for j in j_range:
        nmax = _level_window(params, j, max_level=max_level)
        lam = _levels(params, nmax)
        phi = multipliers.bump_phi(2.0 ** (-j) * np.sqrt(lam))
        times = t_grids[j] if t_grids else default_decay_times(j, params)
        for spin in spins:
            om = _kg(lam, params, spin)
            for t in times:
                d = _decay_d_grid(j, t, params.B0)
                measured = _column_sup(phi * np.exp(1j * t * om), params, d)
                bound = 4.0**j * (1.0 + 2.0**j * t) ** (-0.5)
                report.rows.append({
                    "j": j, "t": t, "B0": params.B0, "m": params.m,
                    "spin": spin, "measured": measured, "bound": bound,
                    "ratio": measured / bound,
                })
                tau = 2.0**j * t
                if fit_window[0] <= tau <= fit_window[1]:
                    fit_x.append(np.log(tau))
                    fit_y.append(np.log(measured / 4.0**j))
    def _fit(lo, hi):
        xs = [x for x, y in zip(fit_x, fit_y) if np.log(lo) - 1e-12 <= x <= np.log(hi) + 1e-12]
        ys = [y for x, y in zip(fit_x, fit_y) if np.log(lo) - 1e-12 <= x <= np.log(hi) + 1e-12]
        if len(xs) < 2:
            return None
        coef, res = np.polyfit(xs, ys, 1, full=True)[:2]
        return {
            "slope": float(coef[0]),
            "intercept": float(coef[1]),
            "residual": float(res[0]) if len(res) else 0.0,
            "points": len(xs),
            "window": [lo, hi],
        }

    report.fit = _fit(*fit_window)
    # The kernel supremum sits on the d = 0 coherent spike until
    # 2^j t ~ 8; the light-cone law t^{-1/2} is clean beyond that, so a
    # tail fit is recorded alongside the requested window.
    report.metadata["fit_tail"] = _fit(max(fit_window[0], 8.0), fit_window[1])
    return report


BERNSTEIN_PAIRS = ((1.0, np.inf), (2.0, np.inf), (2.0, 2.0))


def bernstein_scan(j_range, pairs, params, max_level=None):
    """Ratios of dyadic-projector operator norms to 2^{2j(1/q - 1/p)}.

    Supported pairs: (1, inf) kernel supremum, (2, inf) kernel row L^2
    norm, (2, 2) exact multiplier bound.
    """
    for q, p in pairs:
        if (q, p) not in BERNSTEIN_PAIRS:
            raise UnsupportedCombinationError(f"unsupported pair ({q},{p})")
    report = EstimateReport()
    report.metadata = {"B0": params.B0, "bump": multipliers.BUMP_ID}
    for j in j_range:
        nmax = _level_window(params, j, max_level=max_level)
        lam = _levels(params, nmax)
        phi = multipliers.bump_phi(2.0 ** (-j) * np.sqrt(lam))
        for q, p in pairs:
            scale = 2.0 ** (2 * j * (1.0 / q - (0.0 if np.isinf(p) else 1.0 / p)))
            if (q, p) == (2.0, 2.0):
                measured = float(phi.max())
            else:
                dmax = 2.0 + 64.0 * 2.0 ** (-j)
                step = 2.0 ** (-j) / 16.0 / np.sqrt(params.B0)
                d = np.linspace(0.0, dmax, int(dmax / step) + 2)
                S = level_kernel_column(phi, params, d)
                if q == 1.0:
                    measured = float(np.max(np.abs(S)))
                else:
                    # row L^2 norm; the row integral is d-translation invariant
                    measured = float(np.sqrt(
                        2.0 * np.pi * np.trapezoid(np.abs(S) ** 2 * d, d)
                    ))
            report.rows.append({
                "j": j, "q": q, "p": p, "measured": measured,
                "scale": scale, "ratio": measured / scale,
            })
    return report


def square_function_check(f, p, basis):
    """(lhs, rhs, ratio) of the square function against the plain L^p norm."""
    if not 1 < p < np.inf:
        raise ValueError("p must lie in (1, inf)")
    from .fields import analyze

    c = analyze(f, basis)
    acc = np.zeros_like(f.values, dtype=float)
    for j in multipliers.active_j_range(c):
        piece = synthesize(multipliers.lp_project(j, c), basis)
        acc += np.abs(piece.values) ** 2
    lhs = lp_norm(GridField(f.grid, np.sqrt(acc)), p)
    rhs = lp_norm(f, p)
    return lhs, rhs, lhs / rhs


def norm_equivalence_scan(family, s):
    """Besov(2,2) against both Sobolev norms over a family of states."""
    report = EstimateReport()
    for idx, c in enumerate(family):
        besov = sobolev_besov_norm(c, s, 2, 2, "besov")
        hom = sobolev_besov_norm(c, s, 2, 2, "homogeneous-sobolev")
        inhom = sobolev_besov_norm(c, s, 2, 2, "inhomogeneous-sobolev")
        report.rows.append({
            "id": idx, "s": s, "besov": besov, "sobolev_hom": hom,
            "sobolev_inhom": inhom, "ratio1": besov / hom,
            "ratio2": besov / inhom, "ratio": besov / hom,
        })
    return report


# ---------------------------------------------------------------------------
# Strichartz norms on frequency-localized radial packets

def _packet(params, j, max_level=None):
    """Coefficients of phi_j(sqrt H) applied to a unit mass at the origin,
    expanded over the k = 0 level family."""
    nmax = _level_window(params, j, max_level=max_level)
    lam = _levels(params, nmax)
    phi = multipliers.bump_phi(2.0 ** (-j) * np.sqrt(lam))
    a = phi * np.sqrt(params.B0 / (2.0 * np.pi))
    return lam, a


def _packet_profiles(params, nmax, d, k=0):
    return spectrum.level_column(params, nmax, d, k=k)


def strichartz_norm(pair, j, T, params, flow="halfwave-up", n_time=96,
                    max_level=None):
    """One mixed-norm measurement row for a frequency-localized packet.

    The state is phi_j(sqrt H) delta_0 (spin-up component for the Dirac
    flow), evolved exactly in the level representation.  Spatial L^p
    norms are radial quadratures; L^2 norms use Parseval.  For
    flow='dirac' a companion row keyed 'dirac-hs' referencing the
    inhomogeneous Sobolev norm of the data is returned as well.

    Returns a list of row dicts.
    """
    pair = pair if isinstance(pair, AdmissiblePair) else AdmissiblePair(*pair)
    q, p, s = pair.q, pair.p, pair.s
    lam, a = _packet(params, j, max_level=max_level)
    nmax = len(lam) - 1
    l2 = float(np.sqrt(np.sum(a**2)))

    d_max = T + 2.0 + 48.0 * 2.0 ** (-j)
    step = 2.0 ** (-j) / 10.0 / np.sqrt(params.B0)
    d = np.linspace(1e-9, d_max, int(d_max / step) + 2)
    ts = np.linspace(0.0, T, int(n_time) + 1)

    need_grid = p != 2
    G0 = _packet_profiles(params, nmax, d, k=0) if need_grid else None

    if flow in ("halfwave-up", "halfwave-down"):
        spin = "up" if flow.endswith("up") else "down"
        om = _kg(lam, params, spin)
        coefs = a[None, :] * np.exp(1j * ts[:, None] * om[None, :])
        if p == 2:
            space = np.sqrt(np.sum(np.abs(coefs) ** 2, axis=1))
        else:
            S = coefs @ G0
            space = (2.0 * np.pi *
                     np.trapezoid(np.abs(S) ** p * d[None, :], d, axis=1)) ** (1.0 / p)
    elif flow == "dirac":
        om = _kg(lam, params, "up")
        cos = np.cos(ts[:, None] * om[None, :])
        # sin(t w)/w with the massless zero-mode limit t
        sinc = ts[:, None] * np.sinc(ts[:, None] * om[None, :] / np.pi)
        upper = a[None, :] * (cos - 1j * params.m * sinc)
        ladder = np.sqrt(np.maximum(lam - params.B0, 0.0))
        lower = a[None, :] * ladder[None, :] * sinc  # modulus pattern
        if p == 2:
            space = np.sqrt(np.sum(np.abs(upper) ** 2 + np.abs(lower) ** 2, axis=1))
        else:
            G1 = np.zeros((nmax + 1, len(d)))
            G1[1:, :] = _packet_profiles(params, nmax - 1, d, k=-1)
            Su = upper @ G0
            Sl = lower @ G1
            dens = (np.abs(Su) ** 2 + np.abs(Sl) ** 2) ** (p / 2.0)
            space = (2.0 * np.pi *
                     np.trapezoid(dens * d[None, :], d, axis=1)) ** (1.0 / p)
    else:
        raise ValueError(f"unknown flow {flow!r}")

    if np.isinf(q):
        measured = float(np.max(space))
    else:
        measured = float(np.trapezoid(space**q, ts) ** (1.0 / q))
    reference = 2.0 ** (j * s) * l2
    rows = [{
        "q": q, "p": p, "s": s, "j": j, "T": T, "flow": flow,
        "measured": measured, "reference": reference,
        "ratio": measured / reference,
    }]
    if flow == "dirac":
        hs = float(np.sqrt(np.sum(
            (lam + params.m**2 + params.B0) ** s * a**2)))
        rows.append({
            "q": q, "p": p, "s": s, "j": j, "T": T, "flow": "dirac-hs",
            "measured": measured, "reference": hs, "ratio": measured / hs,
        })
    return rows


# ---------------------------------------------------------------------------
# Small-truncation brute-force oracle

def kernel_sup_bruteforce(mode_filter, basis, n_radii=96):
    """Supremum over sampled (x, y) pairs of |sum F Ṽ(x) conj(Ṽ(y))|.

    Direct two-point evaluation over the full truncated basis; a test
    oracle for the column route (cost grows quadratically in n_radii).
    `mode_filter` maps the eigenvalue table to scalar mode weights.
    """
    g = basis.grid
    sub = np.unique(np.linspace(0, g.Nr - 1, n_radii).astype(int))
    F = mode_filter(basis.lam)
    ntheta = g.Ntheta
    acc = np.zeros((len(sub), len(sub), ntheta), dtype=complex)
    for k in range(-basis.K, basis.K + 1):
        P = basis.profiles[k + basis.K][:, sub]
        Sk = np.einsum("l,li,lj->ij", F[k + basis.K], P, P)
        acc += Sk[:, :, None] * np.exp(1j * k * g.theta)[None, None, :]
    return float(np.max(np.abs(acc)))

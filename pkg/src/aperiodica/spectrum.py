"""Numerical diffraction estimation and closed-form spectra.

The periodogram is evaluated by exact direct summation (positions are
irrational in general, so no FFT gridding); values are

    value(k) = |sum_x v(x) T(x/n) e^(-2 pi i k x)|^2 / (vol(B_n) * mean(T)^2)

with T the boxcar taper by default.  With this normalization a Bragg atom
of intensity I produces value ~ vol(B_n) * I at its position, so intensity
estimates are value / vol; for the unit integer comb the estimate at
integer k is 1.  The optional Hann taper trades a slightly wider main lobe
for fast side-lobe decay, which matters when small atoms are read off next
to large ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .autocorr import estimate_autocorrelation
from .core import (
    AperiodicaError,
    EmptyInputError,
    LatticeBasis,
    OutOfRangeError,
    SpectralMeasure,
    WeightedComb,
    restrict,
)

_CHUNK = 1 << 18  # complex exponentials per evaluation block


class GridMismatchError(AperiodicaError):
    """Periodogram grid is incommensurate with the requested period."""


class SubsetError(AperiodicaError):
    """Points are not a subset of the stated lattice."""


@dataclass(frozen=True)
class Periodogram:
    """Periodogram on a uniform k grid."""

    ks: np.ndarray
    values: np.ndarray
    dk: float
    radius: float

    def __post_init__(self):
        ks = np.asarray(self.ks, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if len(ks) != len(vals):
            raise AperiodicaError("grid and values differ in length")
        if np.any(vals < 0):
            raise AperiodicaError("periodogram values must be non-negative")
        ks.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "ks", ks)
        object.__setattr__(self, "values", vals)

    @property
    def volume(self) -> float:
        return 2.0 * self.radius


def _taper_weights(comb: WeightedComb, taper: str):
    """Tapered weights with the taper's mean and mean square over [-1, 1]."""
    if taper == "boxcar":
        return comb.weights, 1.0, 1.0
    if taper == "hann":
        s = comb.positions / comb.radius
        t = np.cos(0.5 * math.pi * np.clip(s, -1.0, 1.0)) ** 2
        return comb.weights * t, 0.5, 0.375  # mean, mean square of cos^2
    raise AperiodicaError(f"unknown taper {taper!r}")


def periodogram_values(comb: WeightedComb, ks, taper: str = "boxcar",
                       normalization: str = "line") -> np.ndarray:
    """Periodogram values at arbitrary k, by direct summation.

    "line" normalization divides by vol * mean(T)^2, making Bragg atoms of
    intensity I read vol * I at their position; "density" divides by
    vol * mean(T^2), which is the unbiased scale for an absolutely
    continuous background.  The two agree for the boxcar taper.
    """
    if len(comb) == 0:
        raise EmptyInputError("empty comb")
    if comb.dim != 1:
        raise AperiodicaError("periodogram is implemented for dim 1")
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    w, t_mean, t_mean_sq = _taper_weights(comb, taper)
    if normalization == "line":
        norm = comb.volume * t_mean * t_mean
    elif normalization == "density":
        norm = comb.volume * t_mean_sq
    else:
        raise AperiodicaError(f"unknown normalization {normalization!r}")
    x = comb.positions
    out = np.empty(len(ks))
    block = max(1, _CHUNK // max(len(x), 1))
    for start in range(0, len(ks), block):
        kc = ks[start:start + block]
        phases = np.exp(-2j * math.pi * np.outer(kc, x))
        out[start:start + block] = np.abs(phases @ w) ** 2
    return out / norm


def periodogram(comb: WeightedComb, k_min: float, k_max: float,
                dk: float | None = None, use_fft: bool = False) -> Periodogram:
    """Periodogram on the uniform grid k_min, k_min + dk, ..., <= k_max.

    The default grid spacing 1/(8n) resolves the Dirichlet main lobes of
    Bragg peaks at averaging radius n.  use_fft enables a chirp-z transform
    over the dense integer grid, available only for integer-supported combs;
    it agrees with direct summation to 1e-10 relative.
    """
    if dk is None:
        dk = 1.0 / (8.0 * comb.radius)
    if dk <= 0:
        raise OutOfRangeError("dk must be positive")
    if k_max < k_min:
        raise OutOfRangeError("empty k range")
    count = int(math.floor((k_max - k_min) / dk + 1e-9)) + 1
    ks = k_min + dk * np.arange(count)
    if use_fft:
        values = _czt_values(comb, float(k_min), float(dk), count)
    else:
        values = periodogram_values(comb, ks)
    return Periodogram(ks, values, float(dk), comb.radius)


def _czt_values(comb: WeightedComb, k_min: float, dk: float, count: int) -> np.ndarray:
    """Chirp-z evaluation of |S(k)|^2 / vol on the uniform grid; needs exact
    integer support (the modulus is phase-shift invariant, so the grid
    offset of the dense array is irrelevant)."""
    from scipy.signal import czt
    from .core import IntegerCoords

    if not isinstance(comb.coords, IntegerCoords):
        raise AperiodicaError("the FFT path needs an integer-supported comb")
    values = comb.coords.values
    scale = comb.coords.scale
    lo, hi = int(values[0]), int(values[-1])
    dense = np.zeros(hi - lo + 1, dtype=complex)
    dense[values - lo] = comb.weights
    w = np.exp(-2j * math.pi * dk * scale)
    a = np.exp(2j * math.pi * k_min * scale)
    spectrum_line = czt(dense, m=count, w=w, a=a)
    return np.abs(spectrum_line) ** 2 / comb.volume


def bragg_extract(pgram: Periodogram, threshold: float,
                  radius: float | None = None) -> list[tuple[float, float]]:
    """Local maxima of the periodogram read as Bragg atoms: intensity
    estimate I = peak value / vol(B_n); peaks with I >= threshold."""
    if threshold <= 0:
        raise OutOfRangeError("threshold must be positive")
    n = pgram.radius if radius is None else radius
    vol = 2.0 * n
    v = pgram.values
    out = []
    for i in range(len(v)):
        left = v[i - 1] if i > 0 else -math.inf
        right = v[i + 1] if i + 1 < len(v) else -math.inf
        if v[i] >= left and v[i] > right:
            intensity = v[i] / vol
            if intensity >= threshold:
                out.append((float(pgram.ks[i]), float(intensity)))
    return out


def bragg_amplitudes(comb: WeightedComb, ks, taper: str = "hann") -> np.ndarray:
    """Bragg intensity estimates at prescribed positions: periodogram value
    over vol(B_n), with the Hann taper by default to suppress leakage from
    neighbouring atoms."""
    return periodogram_values(comb, ks, taper) / comb.volume


def bragg_scaling_ratio(comb: WeightedComb, ks, taper: str = "boxcar") -> np.ndarray:
    """Two-point volume-scaling probe: periodogram value at full radius over
    the value at half radius.  Bragg peaks grow linearly with volume (ratio
    near 2); an absolutely continuous background stays put (ratio near 1).
    A ratio of at least 1.7 classifies a peak as Bragg."""
    half = restrict(comb, comb.radius / 2.0)
    full_v = periodogram_values(comb, ks, taper)
    half_v = periodogram_values(half, ks, taper)
    return full_v / np.maximum(half_v, 1e-300)


BRAGG_RATIO_THRESHOLD = 1.7


# -- paperfolding closed form -------------------------------------------------

def _dyadic_split(k: float, r_cap: int = 60):
    """Write k as odd/2^r (r = 0 for integers); None when k is not dyadic."""
    if k == 0.0:
        return 0, 0
    for r in range(r_cap + 1):
        scaled = k * (1 << r)
        if scaled == round(scaled):
            m = int(round(scaled))
            return m, r
    return None


def paperfolding_intensity(a: complex, b: complex, c: complex, d: complex,
                           k: float) -> float:
    """Atom intensity of the quaternary paperfolding comb at position k.

    Integers carry |A+B+C+D|^2/16, odd halves |A-B+C-D|^2/16, odd quarters
    |A-C|^2/16 and odd m/2^r with r >= 3 carry |B-D|^2/4^r; every other k
    has no atom.
    """
    split = _dyadic_split(k)
    if split is None:
        return 0.0
    m, r = split
    if r == 0:
        return abs(a + b + c + d) ** 2 / 16.0
    if r == 1:
        return abs(a - b + c - d) ** 2 / 16.0
    if r == 2:
        return abs(a - c) ** 2 / 16.0
    return abs(b - d) ** 2 / 4.0 ** r


def paperfolding_spectrum(a: complex, b: complex, c: complex, d: complex,
                          r_max: int, k_range: tuple[float, float]) -> SpectralMeasure:
    """Pure-point paperfolding diffraction with all atoms of denominator
    2^r, r <= r_max, inside the k range; zero-intensity positions are
    omitted (use paperfolding_intensity for the pointwise formula)."""
    if r_max < 3:
        raise OutOfRangeError("r_max must be at least 3")
    k_lo, k_hi = float(k_range[0]), float(k_range[1])
    if k_hi < k_lo:
        raise OutOfRangeError("empty k range")
    atoms = []
    for r in range(0, r_max + 1):
        denom = 1 << r
        m_lo = math.ceil(k_lo * denom - 1e-12)
        m_hi = math.floor(k_hi * denom + 1e-12)
        for m in range(m_lo, m_hi + 1):
            if r > 0 and m % 2 == 0:
                continue  # even numerators reduce to a smaller r
            k = m / denom
            intensity = paperfolding_intensity(a, b, c, d, k)
            if intensity > 0:
                atoms.append((k, intensity))
    atoms.sort()
    return SpectralMeasure(np.array(atoms).reshape(-1, 2), provenance="closed-form")


def paperfolding_total_intensity(a: complex, b: complex, c: complex, d: complex,
                                 r_max: int) -> float:
    """Total atom intensity per unit k interval, summed up to denominator
    2^r_max: |A+B+C+D|^2/16 + |A-B+C-D|^2/16 + 2|A-C|^2/16 +
    sum_{3<=r<=r_max} 2^(r-1) |B-D|^2/4^r."""
    total = abs(a + b + c + d) ** 2 / 16.0
    total += abs(a - b + c - d) ** 2 / 16.0
    total += 2.0 * abs(a - c) ** 2 / 16.0
    for r in range(3, r_max + 1):
        total += 2.0 ** (r - 1) * abs(b - d) ** 2 / 4.0 ** r
    return total


# -- lattice periodicity and complement homometry -----------------------------

@dataclass(frozen=True)
class PeriodicityReport:
    period: float
    max_discrepancy: float       # max |v(k + g*) - v(k)|
    max_relative: float          # normalized by the largest compared value
    mean_discrepancy: float
    passed: bool


def lattice_periodicity_check(pgram: Periodogram, dual_basis: LatticeBasis,
                              tolerance: float) -> PeriodicityReport:
    """Check periodogram periodicity under a dual-lattice generator: values
    at k and k + g* are compared for every grid point where both lie on the
    grid.  The grid spacing must divide the period."""
    if dual_basis.dim != 1:
        raise AperiodicaError("periodicity check is one-dimensional")
    period = float(abs(dual_basis.matrix[0, 0]))
    steps = period / pgram.dk
    if abs(steps - round(steps)) > 1e-9 or round(steps) == 0:
        raise GridMismatchError(
            f"grid spacing {pgram.dk} does not divide the period {period}")
    s = int(round(steps))
    if s >= len(pgram.values):
        raise GridMismatchError("grid shorter than one period")
    a = pgram.values[:-s]
    b = pgram.values[s:]
    diff = np.abs(b - a)
    scale = max(float(np.max(pgram.values)), 1e-300)
    max_rel = float(np.max(diff)) / scale
    return PeriodicityReport(period, float(np.max(diff)), max_rel,
                             float(np.mean(diff)), bool(max_rel <= tolerance))


@dataclass(frozen=True)
class ComplementReport:
    dens_s: float
    dens_c: float
    identity_max_deviation: float    # (a) eta_c - dens_c vs eta_s - dens_s
    bragg_shift_max_deviation: float  # (b) spectral difference at dual points
    spectral_max_difference: float | None  # (c) near-equal densities, intensity scale
    spectral_mean_difference: float | None
    degenerate: bool                 # S^c empty: identity holds trivially
    message: str = ""


def complement_check(s_points, lattice: LatticeBasis, radius: float,
                     k_grid=None) -> ComplementReport:
    """Compare a lattice subset against its complement inside B_radius.

    (a) the finite-volume identity eta_c(z) - dens(S^c) = eta_s(z) - dens(S)
        over |z| <= radius/2 (boundary bias is O(1/n));
    (b) the periodogram difference against the predicted pure Bragg shift
        (dens(S^c) - dens(S)) * dens(lattice) at dual lattice points;
    (c) when the densities agree, the maximal spectral difference on the
        intensity scale over the k grid.
    """
    if lattice.dim != 1:
        raise AperiodicaError("complement check is one-dimensional")
    a = float(lattice.matrix[0, 0])
    s_points = np.asarray(s_points, dtype=float)
    ratios = s_points / a
    if np.any(np.abs(ratios - np.round(ratios)) > 1e-9):
        raise SubsetError("S is not a subset of the lattice")
    if np.any(np.abs(s_points) > radius + 1e-9):
        raise SubsetError("S reaches outside the ball")
    s_idx = np.round(ratios).astype(np.int64)
    all_idx = np.arange(math.ceil(-radius / a - 1e-9),
                        math.floor(radius / a + 1e-9) + 1, dtype=np.int64)
    c_idx = np.setdiff1d(all_idx, s_idx)
    vol = 2.0 * radius
    dens_s = len(s_idx) / vol
    dens_c = len(c_idx) / vol

    if len(c_idx) == 0:
        return ComplementReport(dens_s, dens_c, 0.0, 0.0, None, None, True,
                                "complement is empty; identity holds trivially")
    comb_s = WeightedComb.from_integers(s_idx, np.ones(len(s_idx)), radius, a)
    comb_c = WeightedComb.from_integers(c_idx, np.ones(len(c_idx)), radius, a)

    max_z = radius / 2.0
    est_s = estimate_autocorrelation(comb_s, max_z)
    est_c = estimate_autocorrelation(comb_c, max_z)
    lags = np.arange(0, int(math.floor(max_z / a)) + 1) * a
    dev = [abs((est_c.eta_at(z).real - dens_c) - (est_s.eta_at(z).real - dens_s))
           for z in lags]
    identity_dev = float(np.max(dev))

    dual = 1.0 / a
    dual_ks = np.array([0.0, dual, 2.0 * dual])
    i_s = bragg_amplitudes(comb_s, dual_ks, taper="boxcar")
    i_c = bragg_amplitudes(comb_c, dual_ks, taper="boxcar")
    predicted = (dens_c - dens_s) * (1.0 / a)
    bragg_dev = float(np.max(np.abs((i_c - i_s) - predicted)))

    spectral_max = spectral_mean = None
    if abs(dens_c - dens_s) <= 0.1 / a:  # near-equal densities: homometric regime
        if k_grid is None:
            k_grid = np.linspace(0.0, 2.0 / a, 512)
        v_s = periodogram_values(comb_s, k_grid)
        v_c = periodogram_values(comb_c, k_grid)
        diff = np.abs(v_c - v_s) / vol
        spectral_max = float(np.max(diff))
        spectral_mean = float(np.mean(diff))
    return ComplementReport(dens_s, dens_c, identity_dev, bragg_dev,
                            spectral_max, spectral_mean, False)

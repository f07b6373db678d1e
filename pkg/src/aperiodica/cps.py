"""Cut-and-project machinery with two concrete internal spaces: the
Euclidean line (quadratic-irrational star map, e.g. the golden-ratio module)
and residue-class completions of Z (Q-adic windows).

The Euclidean scheme embeds the module Z*theta + Z as the planar lattice
with basis columns (theta, theta') and (1, 1); physical and internal
coordinates are the two components, so the canonical projections are the
orthogonal coordinate projections and the fundamental-domain volume is
|theta - theta'| (sqrt(5) for the golden ratio).

Q-adic windows are finite unions of residue classes r mod Q^k plus finite
exception sets, which is exactly enough to encode the paperfolding letter
sets including the single extra point -1 that distinguishes the two
bi-infinite fixed points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    GOLDEN,
    AperiodicaError,
    LatticeBasis,
    ModuleElement,
    OutOfRangeError,
    QuadraticGenerator,
    WeightedComb,
)


class EmptyWindowError(AperiodicaError):
    """Window accepts nothing."""


class ProfileError(AperiodicaError):
    """Weight profile unsuitable for the requested operation."""


# -- internal spaces and schemes ----------------------------------------------

@dataclass(frozen=True)
class EuclideanInternal:
    generator: QuadraticGenerator = GOLDEN


@dataclass(frozen=True)
class QAdicInternal:
    q: int = 2

    def __post_init__(self):
        if self.q < 2:
            raise AperiodicaError("Q must be at least 2")


@dataclass(frozen=True)
class CutProjectScheme:
    """Cut-and-project scheme with one-dimensional physical space."""

    internal: EuclideanInternal | QAdicInternal
    physical_dim: int = 1

    @property
    def embedding_basis(self) -> LatticeBasis:
        if not isinstance(self.internal, EuclideanInternal):
            raise AperiodicaError("embedding basis exists for Euclidean internal space")
        g = self.internal.generator
        return LatticeBasis(np.array([[g.theta, 1.0], [g.conj, 1.0]]))

    @property
    def fd_volume(self) -> float:
        """Covolume of the embedding lattice (Euclidean internal space)."""
        g = self.internal.generator
        return abs(g.theta - g.conj)

    def star(self, x):
        return star(self, x)


def fibonacci_scheme() -> CutProjectScheme:
    return CutProjectScheme(EuclideanInternal(GOLDEN))


def qadic_scheme(q: int = 2) -> CutProjectScheme:
    return CutProjectScheme(QAdicInternal(q))


def star(scheme: CutProjectScheme, x):
    """Star map into internal space.

    Euclidean: m*theta + n maps to m*theta' + n (algebraic conjugation,
    exact on the integer pair).  Q-adic: the integer itself represents its
    image in the completion; window tests reduce mod Q^k.
    """
    if isinstance(scheme.internal, EuclideanInternal):
        if not isinstance(x, ModuleElement):
            raise AperiodicaError("Euclidean star map needs a ModuleElement")
        if x.generator != scheme.internal.generator:
            raise AperiodicaError("module element has a different generator")
        return x.star()
    return int(x)


# -- windows -------------------------------------------------------------------

@dataclass(frozen=True)
class EuclideanWindow:
    """Finite union of disjoint half-open intervals [lo, hi) with nonempty
    interior."""

    intervals: tuple

    def __post_init__(self):
        ivs = tuple((float(lo), float(hi)) for lo, hi in self.intervals)
        if not ivs:
            raise EmptyWindowError("window has no intervals")
        ivs = tuple(sorted(ivs))
        total = 0.0
        for i, (lo, hi) in enumerate(ivs):
            if hi <= lo:
                raise AperiodicaError(f"interval ({lo}, {hi}) is empty or reversed")
            if i and lo < ivs[i - 1][1]:
                raise AperiodicaError("window intervals overlap")
            total += hi - lo
        if total <= 0:
            raise EmptyWindowError("window has empty interior")
        object.__setattr__(self, "intervals", ivs)

    @property
    def total_length(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals)

    def bounds(self) -> tuple[float, float]:
        return self.intervals[0][0], self.intervals[-1][1]

    def contains(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        inside = np.zeros(y.shape, dtype=bool)
        for lo, hi in self.intervals:
            inside |= (y >= lo) & (y < hi)
        return inside


@dataclass(frozen=True)
class QAdicWindow:
    """Finite union of residue classes (r mod modulus) with finite added and
    removed integer sets.

    complete_below, when set, bounds the region on which the truncated class
    union is exact: generation outside |x| < complete_below is refused.
    """

    classes: tuple                      # ((residue, modulus), ...)
    added: frozenset = frozenset()
    removed: frozenset = frozenset()
    complete_below: int | None = None

    def __post_init__(self):
        cls = tuple(sorted((int(r) % int(mod), int(mod)) for r, mod in self.classes))
        for _, mod in cls:
            if mod < 1:
                raise AperiodicaError("modulus must be positive")
        added = frozenset(int(x) for x in self.added)
        removed = frozenset(int(x) for x in self.removed)
        if added & removed:
            raise AperiodicaError("a point cannot be both added and removed")
        object.__setattr__(self, "classes", cls)
        object.__setattr__(self, "added", added)
        object.__setattr__(self, "removed", removed)

    def is_empty(self) -> bool:
        return not self.classes and not self.added

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        inside = np.zeros(x.shape, dtype=bool)
        for r, mod in self.classes:
            inside |= (x - r) % mod == 0
        for a in self.added:
            inside |= x == a
        for a in self.removed:
            inside &= x != a
        return inside

    def union(self, other: "QAdicWindow") -> "QAdicWindow":
        cb = self.complete_below
        if other.complete_below is not None:
            cb = other.complete_below if cb is None else min(cb, other.complete_below)
        return QAdicWindow(self.classes + other.classes,
                           self.added | other.added,
                           self.removed | other.removed, cb)


# -- model set generation --------------------------------------------------

def generate_model_set(scheme: CutProjectScheme, window,
                       region: tuple[float, float]) -> WeightedComb:
    """All module points x in the region whose star image lies in the
    window, as a unit-weight comb; enumeration is exact.

    Euclidean: lattice points of the embedding are walked in the slab
    region x window.  Q-adic: integers of the region are tested against the
    residue classes.
    """
    lo, hi = float(region[0]), float(region[1])
    if hi < lo:
        raise OutOfRangeError("region is empty")
    if isinstance(scheme.internal, QAdicInternal):
        if not isinstance(window, QAdicWindow):
            raise AperiodicaError("Q-adic scheme needs a QAdicWindow")
        if window.is_empty():
            raise EmptyWindowError("window accepts nothing")
        if window.complete_below is not None:
            if max(abs(lo), abs(hi)) >= window.complete_below:
                raise OutOfRangeError(
                    f"region exceeds the window truncation bound "
                    f"|x| < {window.complete_below}")
        xs = np.arange(math.ceil(lo), math.floor(hi) + 1, dtype=np.int64)
        xs = xs[window.contains(xs)]
        radius = max(abs(lo), abs(hi))
        return WeightedComb.from_integers(xs, np.ones(len(xs)), radius)

    if not isinstance(window, EuclideanWindow):
        raise AperiodicaError("Euclidean scheme needs a EuclideanWindow")
    mn = _slab_points(scheme.internal.generator, window, lo, hi)
    radius = max(abs(lo), abs(hi))
    return WeightedComb.from_module(mn, np.ones(len(mn)), radius,
                                    scheme.internal.generator)


def _slab_points(gen: QuadraticGenerator, window: EuclideanWindow,
                 lo: float, hi: float) -> np.ndarray:
    """Integer pairs (m, n) with m*theta + n in [lo, hi] and the star image
    in the window."""
    w_lo, w_hi = window.bounds()
    det = abs(gen.theta - gen.conj)
    m_min = math.floor((lo - w_hi) / det) - 1
    m_max = math.ceil((hi - w_lo) / det) + 1
    rows = []
    for m in range(m_min, m_max + 1):
        # physical constraint on n and internal constraint (window bounds)
        n_lo = max(lo - m * gen.theta, w_lo - m * gen.conj)
        n_hi = min(hi - m * gen.theta, w_hi - m * gen.conj)
        if n_hi < n_lo:
            continue
        ns = np.arange(math.ceil(n_lo - 1e-9), math.floor(n_hi + 1e-9) + 1,
                       dtype=np.int64)
        if not len(ns):
            continue
        x = m * gen.theta + ns
        y = m * gen.conj + ns
        keep = (x >= lo) & (x <= hi) & window.contains(y)
        ns = ns[keep]
        if len(ns):
            rows.append(np.stack([np.full(len(ns), m, dtype=np.int64), ns], axis=1))
    if not rows:
        return np.empty((0, 2), dtype=np.int64)
    return np.concatenate(rows)


# -- paperfolding windows ---------------------------------------------------

def paperfolding_windows(fixed_point_choice: str = "w1", m_max: int = 24) -> dict:
    """The four 2-adic letter windows of the paperfolding fixed points.

    a: 4Z, c: 4Z + 2; b and d are unions over m = 1..m_max of the classes
    2^m - 1 and 3*2^m - 1 mod 2^(m+2).  The 2-adic limit point -1 belongs to
    b for the first fixed point and to d for the second; with it, the
    truncated unions are exact for |x| < 2^m_max.
    """
    if fixed_point_choice not in ("w1", "w2"):
        raise AperiodicaError("fixed_point_choice must be 'w1' or 'w2'")
    bound = 2 ** m_max
    b_classes = tuple((2 ** m - 1, 2 ** (m + 2)) for m in range(1, m_max + 1))
    d_classes = tuple((3 * 2 ** m - 1, 2 ** (m + 2)) for m in range(1, m_max + 1))
    exceptional = frozenset({-1})
    return {
        "a": QAdicWindow(((0, 4),), complete_below=bound),
        "b": QAdicWindow(b_classes,
                         added=exceptional if fixed_point_choice == "w1" else frozenset(),
                         complete_below=bound),
        "c": QAdicWindow(((2, 4),), complete_below=bound),
        "d": QAdicWindow(d_classes,
                         added=exceptional if fixed_point_choice == "w2" else frozenset(),
                         complete_below=bound),
    }


def binary_reduction(windows: dict) -> tuple[QAdicWindow, QAdicWindow]:
    """Windows of the binary paperfolding reduction: letter 1 collects a and
    b, letter 0 collects c and d.  The unions coincide with the closed-form
    classes 2^m - 1 and 3*2^m - 1 mod 2^(m+2) taken from m = 0."""
    one = windows["a"].union(windows["b"])
    zero = windows["c"].union(windows["d"])
    m_max = max(mod for _, mod in one.classes).bit_length() - 3
    closed_one = tuple((2 ** m - 1, 2 ** (m + 2)) for m in range(0, m_max + 1))
    closed_zero = tuple((3 * 2 ** m - 1, 2 ** (m + 2)) for m in range(0, m_max + 1))
    if set(one.classes) != set((r % mod, mod) for r, mod in closed_one):
        raise AperiodicaError("binary reduction does not match its closed form")
    if set(zero.classes) != set((r % mod, mod) for r, mod in closed_zero):
        raise AperiodicaError("binary reduction does not match its closed form")
    return one, zero


# -- density-weighted combs and their closed-form diffraction ----------------

@dataclass(frozen=True)
class GaussianProfile:
    """Internal weight profile phi(u) = exp(-u^2 / (2 sigma^2))."""

    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ProfileError("sigma must be positive")

    def __call__(self, u):
        return np.exp(-np.square(u) / (2.0 * self.sigma ** 2))

    def integral(self) -> float:
        return self.sigma * math.sqrt(2.0 * math.pi)

    def transform(self, k):
        """Fourier transform with the e^(-2 pi i k u) convention:
        phi_hat(k) = sigma * sqrt(2 pi) * exp(-2 pi^2 sigma^2 k^2)."""
        return self.sigma * math.sqrt(2.0 * math.pi) * np.exp(
            -2.0 * math.pi ** 2 * self.sigma ** 2 * np.square(k))


@dataclass(frozen=True)
class IndicatorProfile:
    """Indicator of a Euclidean window; admissible for model sets but lacks
    the decay needed by the closed-form diffraction of weighted combs."""

    window: EuclideanWindow

    def __call__(self, u):
        return self.window.contains(u).astype(float)


def density_weighted_comb(scheme: CutProjectScheme, profile, region,
                          cutoff: float = 1e-12) -> WeightedComb:
    """Comb sum of phi(x*) delta_x over module points x in the region.

    For a Gaussian profile, points with phi below the cutoff are dropped
    (the enumeration slab in internal space is finite); an indicator profile
    reproduces the model set of its window with unit weights.
    """
    if not isinstance(scheme.internal, EuclideanInternal):
        raise AperiodicaError("density-weighted combs need a Euclidean scheme")
    lo, hi = float(region[0]), float(region[1])
    gen = scheme.internal.generator
    if isinstance(profile, IndicatorProfile):
        return generate_model_set(scheme, profile.window, region)
    if not isinstance(profile, GaussianProfile):
        raise ProfileError("profile must be Gaussian or an indicator")
    y_max = profile.sigma * math.sqrt(2.0 * math.log(1.0 / cutoff))
    window = EuclideanWindow(((-y_max, y_max + 1e-12),))
    mn = _slab_points(gen, window, lo, hi)
    weights = profile(mn[:, 0] * gen.conj + mn[:, 1])
    radius = max(abs(lo), abs(hi))
    return WeightedComb.from_module(mn, weights, radius, gen)


def point_density(scheme: CutProjectScheme, profile: GaussianProfile) -> float:
    """Density of the weighted comb: integral of the profile over internal
    space divided by the fundamental-domain volume."""
    return profile.integral() / scheme.fd_volume


def theorem10_autocorrelation(scheme: CutProjectScheme, profile,
                              z: ModuleElement) -> complex:
    """Closed-form autocorrelation coefficient of a Gaussian-weighted comb:

        eta(z) = (1 / vol(FD)) * integral phi(u) conj(phi(u - z*)) du
               = (sigma sqrt(pi) / vol(FD)) * exp(-(z*)^2 / (4 sigma^2))

    for the unit-amplitude Gaussian phi(u) = exp(-u^2 / (2 sigma^2)): the
    product of the two shifted Gaussians is exp(-(u - a/2)^2 / sigma^2) *
    exp(-a^2 / (4 sigma^2)) with a = z*, and the remaining integral is
    sigma sqrt(pi).
    """
    if not isinstance(profile, GaussianProfile):
        raise ProfileError("closed-form autocorrelation requires a Gaussian profile")
    zs = star(scheme, z)
    s = profile.sigma
    value = s * math.sqrt(math.pi) / scheme.fd_volume * math.exp(
        -zs * zs / (4.0 * s * s))
    return complex(value)


def theorem10_spectrum(scheme: CutProjectScheme, profile,
                       k_range: tuple[float, float],
                       prune: float = 1e-14):
    """Closed-form pure-point diffraction of a Gaussian-weighted comb:
    atoms at the physical projections y of the dual embedding lattice with
    intensity |phi_hat(-y*)|^2 / vol(FD)^2; atoms below `prune` are dropped.

    Dual lattice points are (p - q theta')/det and internal parts
    (q theta - p)/det for integer (p, q), det = theta - theta'.
    """
    from .core import SpectralMeasure

    if not isinstance(profile, GaussianProfile):
        raise ProfileError("closed-form spectrum requires a Gaussian profile")
    if not isinstance(scheme.internal, EuclideanInternal):
        raise AperiodicaError("closed-form spectrum needs a Euclidean scheme")
    k_lo, k_hi = float(k_range[0]), float(k_range[1])
    if k_hi < k_lo:
        raise OutOfRangeError("empty k range")
    gen = scheme.internal.generator
    det = gen.theta - gen.conj
    vol = scheme.fd_volume
    # |phi_hat(y*)|^2 / vol^2 >= prune bounds the internal part
    amp0 = profile.sigma * math.sqrt(2.0 * math.pi)
    bound = prune * vol * vol
    if amp0 ** 2 <= bound:
        return SpectralMeasure(np.empty((0, 2)), provenance="closed-form")
    y_max = math.sqrt(math.log(amp0 ** 2 / bound) /
                      (4.0 * math.pi ** 2 * profile.sigma ** 2))
    atoms = []
    # q = k_phys + k_int for this embedding, so q ranges over the k window
    # widened by the internal cutoff
    for q in range(math.floor(k_lo - y_max) - 1, math.ceil(k_hi + y_max) + 2):
        p_lo = max(k_lo * det + q * gen.conj, q * gen.theta - y_max * det)
        p_hi = min(k_hi * det + q * gen.conj, q * gen.theta + y_max * det)
        for p in range(math.ceil(p_lo - 1e-9), math.floor(p_hi + 1e-9) + 1):
            k_phys = (p - q * gen.conj) / det
            k_int = (q * gen.theta - p) / det
            if not (k_lo - 1e-12 <= k_phys <= k_hi + 1e-12):
                continue
            intensity = float(np.abs(profile.transform(-k_int)) ** 2) / (vol * vol)
            if intensity >= prune:
                atoms.append((k_phys, intensity))
    atoms.sort()
    return SpectralMeasure(np.array(atoms).reshape(-1, 2), provenance="closed-form")

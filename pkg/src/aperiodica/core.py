"""Shared domain types: weighted Dirac combs, quadratic-module coordinates,
spectral measures and lattice bases.

Positions of a comb are stored either as plain floats or with an exact
integer payload (integer multiples of a scale, or pairs (m, n) representing
m*theta + n in a rank-2 module with irrational generator theta).  All
generators in this package emit the exact form; algebraic conjugation is
only well defined on the integer pairs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

TAU = (1.0 + math.sqrt(5.0)) / 2.0
TAU_CONJ = (1.0 - math.sqrt(5.0)) / 2.0
SQRT5 = math.sqrt(5.0)

_POSITION_TOL = 1e-9


class AperiodicaError(ValueError):
    """Base class for domain errors."""


class OutOfRangeError(AperiodicaError):
    """A numeric argument violates its documented range."""


class DegenerateLatticeError(AperiodicaError):
    """Lattice basis is singular."""


class EmptyInputError(AperiodicaError):
    """An operation received an empty comb or list where it needs data."""


@dataclass(frozen=True)
class QuadraticGenerator:
    """Irrational generator theta of a rank-2 module Z*theta + Z, together
    with its algebraic conjugate."""

    theta: float
    conj: float
    name: str = ""

    def embed(self, m, n):
        return m * self.theta + n

    def star(self, m, n):
        return m * self.conj + n


GOLDEN = QuadraticGenerator(TAU, TAU_CONJ, "tau")


@dataclass(frozen=True)
class ModuleElement:
    """Element m*theta + n of a quadratic module, stored exactly."""

    m: int
    n: int
    generator: QuadraticGenerator = GOLDEN

    def embed(self) -> float:
        return self.generator.embed(self.m, self.n)

    def star(self) -> float:
        return self.generator.star(self.m, self.n)

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        self._check_same(other)
        return ModuleElement(self.m + other.m, self.n + other.n, self.generator)

    def __sub__(self, other: "ModuleElement") -> "ModuleElement":
        self._check_same(other)
        return ModuleElement(self.m - other.m, self.n - other.n, self.generator)

    def __neg__(self) -> "ModuleElement":
        return ModuleElement(-self.m, -self.n, self.generator)

    def _check_same(self, other):
        if self.generator != other.generator:
            raise AperiodicaError("module elements have different generators")


@dataclass(frozen=True)
class IntegerCoords:
    """Exact positions k*scale for integer k (scale 1: the lattice Z)."""

    values: np.ndarray  # int64
    scale: float = 1.0
    scale_exact: Fraction | None = None

    def positions(self) -> np.ndarray:
        return self.values * self.scale


@dataclass(frozen=True)
class ModuleCoords:
    """Exact positions m*theta + n as integer pairs, one row per point."""

    mn: np.ndarray  # int64, shape (N, 2)
    generator: QuadraticGenerator = GOLDEN

    def positions(self) -> np.ndarray:
        return self.mn[:, 0] * self.generator.theta + self.mn[:, 1]

    def stars(self) -> np.ndarray:
        return self.mn[:, 0] * self.generator.conj + self.mn[:, 1]


def _as_readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class WeightedComb:
    """Finite weighted Dirac comb: scatterer positions with complex weights,
    truncated to the ball of the stated radius around the origin.

    In dimension 1 the ball is the interval [-radius, radius] and positions
    are sorted ascending; in dimension 2 it is the Euclidean disk.
    """

    positions: np.ndarray          # float64, (N,) or (N, 2)
    weights: np.ndarray            # complex128, (N,)
    radius: float
    dim: int = 1
    coords: IntegerCoords | ModuleCoords | None = None

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        w = np.asarray(self.weights, dtype=complex)
        if self.dim not in (1, 2):
            raise AperiodicaError("dim must be 1 or 2")
        if self.dim == 1 and pos.ndim != 1:
            raise AperiodicaError("dim-1 comb needs 1-d positions")
        if self.dim == 2 and (pos.ndim != 2 or pos.shape[1] != 2):
            raise AperiodicaError("dim-2 comb needs (N, 2) positions")
        if len(pos) != len(w):
            raise AperiodicaError("positions and weights differ in length")
        if len(w) and not np.all(np.isfinite(w.view(float))):
            raise AperiodicaError("weights must be finite")
        if self.dim == 1:
            if len(pos) > 1 and not np.all(np.diff(pos) > 0):
                raise AperiodicaError("dim-1 positions must be strictly ascending")
            inside = np.abs(pos) <= self.radius + _POSITION_TOL
        else:
            if len(pos) != len(np.unique(pos, axis=0)):
                raise AperiodicaError("positions must be pairwise distinct")
            inside = np.hypot(pos[:, 0], pos[:, 1]) <= self.radius + _POSITION_TOL
        if len(pos) and not np.all(inside):
            raise AperiodicaError("points outside the stated radius")
        object.__setattr__(self, "positions", _as_readonly(pos))
        object.__setattr__(self, "weights", _as_readonly(w))

    def __len__(self) -> int:
        return len(self.positions)

    @property
    def volume(self) -> float:
        """Volume of the averaging ball B_n (length 2n in dim 1)."""
        if self.dim == 1:
            return 2.0 * self.radius
        return math.pi * self.radius ** 2

    def total_weight(self) -> complex:
        return complex(np.sum(self.weights))

    @staticmethod
    def from_integers(values, weights, radius, scale=1.0, scale_exact=None) -> "WeightedComb":
        values = np.asarray(values, dtype=np.int64)
        order = np.argsort(values, kind="stable")
        values = values[order]
        w = np.asarray(weights, dtype=complex)[order]
        coords = IntegerCoords(_as_readonly(values), float(scale), scale_exact)
        return WeightedComb(values * float(scale), w, float(radius), 1, coords)

    @staticmethod
    def from_module(mn, weights, radius, generator=GOLDEN) -> "WeightedComb":
        mn = np.asarray(mn, dtype=np.int64).reshape(-1, 2)
        pos = mn[:, 0] * generator.theta + mn[:, 1]
        order = np.argsort(pos, kind="stable")
        coords = ModuleCoords(_as_readonly(mn[order]), generator)
        return WeightedComb(pos[order], np.asarray(weights, dtype=complex)[order],
                            float(radius), 1, coords)

    @staticmethod
    def from_positions(positions, weights, radius, dim=1) -> "WeightedComb":
        pos = np.asarray(positions, dtype=float)
        w = np.asarray(weights, dtype=complex)
        if dim == 1:
            order = np.argsort(pos, kind="stable")
            pos, w = pos[order], w[order]
        return WeightedComb(pos, w, float(radius), dim, None)


def restrict(comb: WeightedComb, radius: float) -> WeightedComb:
    """Truncate a comb to the smaller ball B_radius, keeping weights.

    Raises OutOfRangeError if radius exceeds the comb's stated radius.
    """
    if radius > comb.radius:
        raise OutOfRangeError(
            f"restriction radius {radius} exceeds comb radius {comb.radius}")
    if comb.dim == 1:
        keep = np.abs(comb.positions) <= radius
    else:
        keep = np.hypot(comb.positions[:, 0], comb.positions[:, 1]) <= radius
    coords = comb.coords
    if isinstance(coords, IntegerCoords):
        coords = IntegerCoords(_as_readonly(coords.values[keep]), coords.scale,
                               coords.scale_exact)
    elif isinstance(coords, ModuleCoords):
        coords = ModuleCoords(_as_readonly(coords.mn[keep]), coords.generator)
    return WeightedComb(comb.positions[keep], comb.weights[keep], float(radius),
                        comb.dim, coords)


@dataclass(frozen=True)
class LatticeBasis:
    """Full-rank lattice basis; columns of `matrix` are the basis vectors."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise AperiodicaError("basis matrix must be square")
        if abs(np.linalg.det(m)) < 1e-300:
            raise DegenerateLatticeError("basis matrix is singular")
        object.__setattr__(self, "matrix", _as_readonly(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def covolume(self) -> float:
        return abs(np.linalg.det(self.matrix))


def dual_lattice(basis: LatticeBasis) -> LatticeBasis:
    """Dual (reciprocal) lattice basis: the inverse transpose of the input."""
    m = basis.matrix
    try:
        inv = np.linalg.inv(m)
    except np.linalg.LinAlgError as exc:
        raise DegenerateLatticeError("basis matrix is singular") from exc
    return LatticeBasis(inv.T)


@dataclass(frozen=True)
class SpectralMeasure:
    """Pure-point atoms plus an absolutely continuous density on a grid.

    provenance is "closed-form" or "estimated"; estimator_radius records the
    averaging radius for estimated measures.
    """

    pp_atoms: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    ac_grid: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    provenance: str = "closed-form"
    estimator_radius: float | None = None

    def __post_init__(self):
        pp = np.asarray(self.pp_atoms, dtype=float).reshape(-1, 2)
        ac = np.asarray(self.ac_grid, dtype=float).reshape(-1, 2)
        if len(pp):
            if np.any(pp[:, 1] < 0):
                raise AperiodicaError("atom intensities must be non-negative")
            ks = np.sort(pp[:, 0])
            if len(ks) > 1 and np.min(np.diff(ks)) == 0:
                raise AperiodicaError("atom positions must be pairwise distinct")
        if len(ac) and np.any(ac[:, 1] < 0):
            raise AperiodicaError("ac density values must be non-negative")
        object.__setattr__(self, "pp_atoms", _as_readonly(pp))
        object.__setattr__(self, "ac_grid", _as_readonly(ac))

    def atom_at(self, k: float, tol: float = 1e-9) -> float:
        """Intensity of the atom at position k (0.0 if absent)."""
        if not len(self.pp_atoms):
            return 0.0
        i = np.argmin(np.abs(self.pp_atoms[:, 0] - k))
        if abs(self.pp_atoms[i, 0] - k) <= tol:
            return float(self.pp_atoms[i, 1])
        return 0.0


# -- CSV serialization of combs ---------------------------------------------
# dim 1: x,re_weight,im_weight      dim 2: x,y,re_weight,im_weight

def write_comb_csv(comb: WeightedComb, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if comb.dim == 1:
            writer.writerow(["x", "re_weight", "im_weight"])
            for x, w in zip(comb.positions, comb.weights):
                writer.writerow([f"{x:.17g}", f"{w.real:.17g}", f"{w.imag:.17g}"])
        else:
            writer.writerow(["x", "y", "re_weight", "im_weight"])
            for (x, y), w in zip(comb.positions, comb.weights):
                writer.writerow([f"{x:.17g}", f"{y:.17g}",
                                 f"{w.real:.17g}", f"{w.imag:.17g}"])


def read_comb_csv(path, radius: float | None = None) -> WeightedComb:
    """Read a comb written by write_comb_csv.  If radius is omitted, the
    smallest ball containing all points is used."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyInputError(f"empty comb file: {path}")
        header = [h.strip() for h in header]
        if header == ["x", "re_weight", "im_weight"]:
            dim = 1
        elif header == ["x", "y", "re_weight", "im_weight"]:
            dim = 2
        else:
            raise AperiodicaError(f"unrecognized comb header {header!r} in {path}")
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise EmptyInputError(f"comb file has no points: {path}")
    data = np.asarray(rows, dtype=float)
    if dim == 1:
        pos, w = data[:, 0], data[:, 1] + 1j * data[:, 2]
        rmax = np.max(np.abs(pos)) if radius is None else radius
    else:
        pos, w = data[:, :2], data[:, 2] + 1j * data[:, 3]
        rmax = np.max(np.hypot(pos[:, 0], pos[:, 1])) if radius is None else radius
    return WeightedComb.from_positions(pos, w, float(rmax), dim)

"""Synthetic benchmark data: dependence regimes and planted space-time cubes.

Randomness is drawn from PCG64 generators seeded through SeedSequence
with a fixed stream map, so every output is reproducible bit-for-bit
from the spec object alone, and adding draws to one stream never shifts
another:

* regime pairs: stream 0 drives x (or the angle), stream 1 the noise
  (or the independent y);
* planted cubes: stream 0 drives the noise field, stream 1 + k the
  innovations of an autoregressive mode at position k.

Planted cubes have an exact variance budget.  Each mode's temporal
series is centered and re-orthonormalized against the ones before it,
the noise is projected off the span of all temporal series and the
constant, and every component is rescaled so its energy is exactly its
requested fraction of the total n*d.  Mode fields are then mutually
orthogonal, so requested and realized fractions agree to rounding.
"""

from dataclasses import dataclass

import numpy as np

from .analytic import hilbert_analytic
from .data import Datacube

__all__ = [
    "REGIMES",
    "PATTERNS",
    "TEMPORALS",
    "RegimeSpec",
    "gen_regime",
    "ModeSpec",
    "PlantedCubeSpec",
    "PlantedCube",
    "gen_cube",
]

REGIMES = ("linear", "ring", "independent")
PATTERNS = ("gaussian-blob", "dipole", "uniform-trend")
TEMPORALS = ("sinusoid", "linear-trend", "ar1")

_DEFAULT_NOISE = {"linear": 0.35, "ring": 0.05, "independent": 0.0}


def _stream(seed, k):
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(k,)))


@dataclass(frozen=True)
class RegimeSpec:
    """One paired dependence benchmark: regime name, size, jitter, seed.

    noise=None picks the regime default (0.35 for linear, 0.05 for ring;
    the independent regime ignores it).
    """

    regime: str
    n: int
    noise: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(
                f"unknown regime {self.regime!r}; choose from {list(REGIMES)}")
        if self.n < 10:
            raise ValueError(f"n must be at least 10, got {self.n}")
        if self.noise is not None and self.noise < 0:
            raise ValueError(f"noise must be non-negative, got {self.noise}")


def gen_regime(spec):
    """Generate one paired sample; returns (x, y) as (n, 1) float arrays.

    * ``linear``: x standard normal, y = x + noise * e (strong linear
      correlation);
    * ``ring``: points on the unit circle with radial jitter of scale
      ``noise``; x and y are strongly dependent but almost uncorrelated;
    * ``independent``: two separate standard normals.
    """
    if not isinstance(spec, RegimeSpec):
        raise TypeError(f"spec must be a RegimeSpec, got {type(spec).__name__}")
    n = spec.n
    noise = _DEFAULT_NOISE[spec.regime] if spec.noise is None else spec.noise
    rng0 = _stream(spec.seed, 0)
    rng1 = _stream(spec.seed, 1)
    if spec.regime == "linear":
        x = rng0.standard_normal(n)
        y = x + noise * rng1.standard_normal(n)
    elif spec.regime == "ring":
        theta = rng0.uniform(0.0, 2.0 * np.pi, n)
        r = 1.0 + noise * rng1.standard_normal(n)
        x = r * np.cos(theta)
        y = r * np.sin(theta)
    else:
        x = rng0.standard_normal(n)
        y = rng1.standard_normal(n)
    return x[:, None], y[:, None]


@dataclass(frozen=True)
class ModeSpec:
    """One planted space-time mode.

    fraction is the mode's share of the total energy n*d.  Temporal
    kinds:

    * ``sinusoid``: integer frequency bin ``freq_bin`` in [1, n/2)
      (cycles over the record) with initial phase ``phase0``; a non-zero
      ``gradient`` makes it propagate, advancing the phase by that many
      radians per flattened cell index;
    * ``linear-trend``: a centered ramp (at most one per cube);
    * ``ar1``: a seeded AR(1) series with coefficient ``ar_coef``,
      |ar_coef| < 1, stationary start.

    Patterns: ``gaussian-blob`` (optional center (row, col) and width),
    ``dipole`` (opposite-sign blob pair, optional width),
    ``uniform-trend`` (flat map).  Only sinusoids may set phase0 or
    gradient.
    """

    fraction: float
    temporal: str = "sinusoid"
    pattern: str = "uniform-trend"
    freq_bin: int | None = None
    phase0: float = 0.0
    gradient: float = 0.0
    ar_coef: float | None = None
    center: tuple | None = None
    width: float | None = None


@dataclass(frozen=True)
class PlantedCubeSpec:
    """Planted cube layout: grid shape, record length, modes, noise, seed."""

    shape: tuple
    n: int
    modes: tuple
    noise_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        rows, cols = self.shape
        if rows < 1 or cols < 1:
            raise ValueError(f"grid shape must be positive, got {self.shape}")
        if self.n < 8:
            raise ValueError(f"n must be at least 8, got {self.n}")
        if not self.modes:
            raise ValueError("at least one mode is required")
        total = self.noise_fraction + sum(m.fraction for m in self.modes)
        if self.noise_fraction < 0 or any(m.fraction < 0 for m in self.modes):
            raise ValueError("fractions must be non-negative")
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"fractions and noise must sum to 1, got {total!r}")
        bins = []
        trends = 0
        for m in self.modes:
            if m.temporal not in TEMPORALS:
                raise ValueError(f"temporal must be one of {list(TEMPORALS)}, "
                                 f"got {m.temporal!r}")
            if m.pattern not in PATTERNS:
                raise ValueError(f"pattern must be one of {list(PATTERNS)}, "
                                 f"got {m.pattern!r}")
            if m.temporal == "sinusoid":
                if not (isinstance(m.freq_bin, (int, np.integer)) and
                        1 <= m.freq_bin < self.n / 2):
                    raise ValueError(
                        f"freq_bin must be an integer in [1, {self.n / 2}), "
                        f"got {m.freq_bin}")
                bins.append(int(m.freq_bin))
                continue
            if m.freq_bin is not None or m.phase0 != 0.0 or m.gradient != 0.0:
                raise ValueError(
                    f"freq_bin, phase0 and gradient apply to sinusoids only "
                    f"(temporal {m.temporal!r})")
            if m.temporal == "linear-trend":
                trends += 1
                if m.ar_coef is not None:
                    raise ValueError("ar_coef applies to ar1 modes only")
            else:
                if m.ar_coef is None or not abs(m.ar_coef) < 1:
                    raise ValueError(
                        f"ar1 needs ar_coef with |ar_coef| < 1, got {m.ar_coef}")
        if len(set(bins)) != len(bins):
            raise ValueError(f"sinusoid frequency bins must be distinct, got {bins}")
        if trends > 1:
            raise ValueError("a second linear-trend mode duplicates the first")


@dataclass(frozen=True)
class PlantedCube:
    """A generated cube with its planted ground truth.

    temporal holds the series actually planted (centered, unit norm; the
    cosine leg for a propagating mode), one column per mode, and
    oscillators their analytic versions, so recovered complex scores can
    be scored by plain complex correlation.  complex_patterns carry the
    matched spatial maps; a propagating mode's map has modulus = scaled
    pattern and argument = phase0 + gradient * cell, every other map is
    the scaled real pattern (phase0 already lives in the series).  The
    analytic signal of the noise-free field is exactly
    oscillators @ complex_patterns.T.  patterns are the raw real maps
    before scaling, and fractions the realized energy shares, equal to
    the requested ones to rounding.
    """

    cube: Datacube
    spec: PlantedCubeSpec
    temporal: np.ndarray
    oscillators: np.ndarray
    patterns: np.ndarray
    complex_patterns: np.ndarray
    fractions: np.ndarray
    noise_fraction: float


def _blob(shape, center, width):
    rows, cols = shape
    ii, jj = np.meshgrid(np.arange(rows, dtype=float),
                         np.arange(cols, dtype=float), indexing="ij")
    ci, cj = center
    return np.exp(-((ii - ci) ** 2 + (jj - cj) ** 2) / (2.0 * width * width)).ravel()


def _pattern(mode, shape):
    rows, cols = shape
    if mode.pattern == "uniform-trend":
        return np.ones(rows * cols)
    if mode.pattern == "gaussian-blob":
        center = mode.center if mode.center is not None \
            else ((rows - 1) / 3.0, (cols - 1) / 3.0)
        width = mode.width if mode.width is not None else max(rows, cols) / 4.0
        return _blob(shape, center, width)
    width = mode.width if mode.width is not None else max(rows, cols) / 6.0
    return (_blob(shape, ((rows - 1) / 2.0, (cols - 1) / 4.0), width)
            - _blob(shape, ((rows - 1) / 2.0, 3.0 * (cols - 1) / 4.0), width))


def _ar1_series(n, phi, rng):
    e = rng.standard_normal(n)
    q = np.empty(n)
    q[0] = e[0] / np.sqrt(1.0 - phi * phi)
    for t in range(1, n):
        q[t] = phi * q[t - 1] + e[t]
    return q


def _raw_temporals(spec):
    """Per-mode raw series, a list of 1 or 2 (quadrature) columns each."""
    t = np.arange(spec.n, dtype=float)
    raw = []
    for k, m in enumerate(spec.modes):
        if m.temporal == "sinusoid":
            angle = 2.0 * np.pi * m.freq_bin * t / spec.n
            if m.gradient == 0.0:
                raw.append([np.cos(angle + m.phase0)])
            else:
                raw.append([np.cos(angle), np.sin(angle)])
        elif m.temporal == "linear-trend":
            raw.append([t.copy()])
        else:
            raw.append([_ar1_series(spec.n, m.ar_coef, _stream(spec.seed, 1 + k))])
    return raw


def _orthonormalize(columns):
    """Modified Gram-Schmidt with reorthogonalization on centered columns."""
    basis = []
    for col in columns:
        v = col - col.mean()
        scale = np.linalg.norm(v)
        for _ in range(2):
            for u in basis:
                v = v - u * (u @ v)
        norm = np.linalg.norm(v)
        if norm < 1e-8 * max(scale, 1e-300):
            raise ValueError("temporal series are linearly dependent")
        basis.append(v / norm)
    return basis


def _mode_basis(spec, raw):
    """Orthonormal columns for each mode, keyed by mode index.

    Sinusoid columns are orthonormalized first: bin sinusoids are already
    mutually orthogonal, so they come out unchanged up to normalization
    (quadrature pairs stay exact) and only the trend/ar1 series absorb
    the cross projections.
    """
    order = [k for k, m in enumerate(spec.modes) if m.temporal == "sinusoid"]
    order += [k for k in range(len(spec.modes)) if k not in order]
    flat = [(k, j) for k in order for j in range(len(raw[k]))]
    basis = _orthonormalize([raw[k][j] for k, j in flat])
    by_mode = [dict() for _ in spec.modes]
    for (k, j), column in zip(flat, basis):
        by_mode[k][j] = column
    return by_mode


def gen_cube(spec):
    """Build a planted cube with an exact variance budget.

    Returns a :class:`PlantedCube`; its ``cube`` field is a real
    :class:`~kmva.data.Datacube` of shape (n, rows*cols) with cells
    flattened row-major.
    """
    if not isinstance(spec, PlantedCubeSpec):
        raise TypeError(f"spec must be a PlantedCubeSpec, got {type(spec).__name__}")
    rows, cols = spec.shape
    n, d = spec.n, rows * cols
    n_modes = len(spec.modes)
    t = np.arange(n, dtype=float)
    cells = np.arange(d, dtype=float)
    total_energy = float(n * d)

    raw = _raw_temporals(spec)
    by_mode = _mode_basis(spec, raw)
    basis = [column for group in by_mode for column in group.values()]

    values = np.zeros((n, d))
    energies = np.empty(n_modes)
    temporal = np.empty((n, n_modes))
    oscillators = np.empty((n, n_modes), dtype=np.complex128)
    patterns = np.empty((d, n_modes))
    complex_patterns = np.empty((d, n_modes), dtype=np.complex128)
    for k, m in enumerate(spec.modes):
        p = _pattern(m, spec.shape)
        norm = np.linalg.norm(p)
        if norm == 0.0:
            raise ValueError(f"mode {k} pattern has zero energy")
        scale = np.sqrt(m.fraction * total_energy) / norm
        if len(raw[k]) == 2:
            beta = m.phase0 + m.gradient * cells
            qc, qs = by_mode[k][0], by_mode[k][1]
            field = (np.outer(qc, scale * p * np.cos(beta))
                     - np.outer(qs, scale * p * np.sin(beta)))
            temporal[:, k] = qc
            oscillators[:, k] = qc + 1j * qs
            complex_patterns[:, k] = scale * p * np.exp(1j * beta)
        else:
            q = by_mode[k][0]
            field = np.outer(q, scale * p)
            temporal[:, k] = q
            oscillators[:, k] = hilbert_analytic(q)[:, 0]
            complex_patterns[:, k] = scale * p
        values += field
        energies[k] = float(np.sum(field * field))
        patterns[:, k] = p

    noise_energy = 0.0
    if spec.noise_fraction > 0.0:
        rng = _stream(spec.seed, 0)
        noise = rng.standard_normal((n, d))
        noise -= noise.mean(axis=0)
        for _ in range(2):
            for u in basis:
                noise -= np.outer(u, u @ noise)
        fro = np.linalg.norm(noise)
        if fro == 0.0:
            raise ValueError("noise field vanished after projection")
        noise *= np.sqrt(spec.noise_fraction * total_energy) / fro
        values += noise
        noise_energy = float(np.sum(noise * noise))

    total = energies.sum() + noise_energy
    grid = np.stack([np.repeat(np.arange(rows, dtype=float), cols),
                     np.tile(np.arange(cols, dtype=float), rows)], axis=1)
    cube = Datacube(values=values, time=t, grid=grid)
    return PlantedCube(cube=cube, spec=spec, temporal=temporal,
                       oscillators=oscillators, patterns=patterns,
                       complex_patterns=complex_patterns,
                       fractions=energies / total,
                       noise_fraction=noise_energy / total)

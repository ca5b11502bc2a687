"""Harmonic-measure engines: walk-on-spheres, polar-grid finite differences,
and exact conformal-map oracles.

The three engines cross-validate each other: WoS is unbiased up to the
epsilon-shell classification bias, the FD solver is deterministic with a
measurable discretization error, and the closed forms are exact.
"""
from __future__ import annotations

import math
import cmath
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import geometry
from .geometry import (BlockedCircleDomain, BoundaryFeature, CircleDomain,
                       NotInteriorError)
from .hfunction import beurling_bound

__all__ = [
    "MeasureEstimate",
    "HFunctionTable",
    "ExitEnsemble",
    "OffCenterDisk",
    "WosConfig",
    "wos_exit_sample",
    "wos_exit_ensemble",
    "estimate_h",
    "feature_measures",
    "fd_harmonic_measure",
    "exact_offcenter_disk_h",
    "exact_slit_disk_gate",
    "beurling_lower_bound",
]

_BATCH = 1 << 15
_KIND_NAMES = (geometry.KIND_ARC, geometry.KIND_GATE, geometry.KIND_OUTER)


@dataclass(frozen=True)
class MeasureEstimate:
    """One harmonic-measure value with its uncertainty and provenance."""

    value: float
    std_error: float
    method: str  # "wos" | "fd" | "exact"
    sample_count: int = 0
    grid_resolution: int = 0
    discard_count: int = 0


@dataclass(frozen=True)
class HFunctionTable:
    """h(r) sampled at a sorted list of radii."""

    radii: tuple[float, ...]
    estimates: tuple[MeasureEstimate, ...]

    @property
    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.estimates])

    @property
    def std_errors(self) -> np.ndarray:
        return np.array([e.std_error for e in self.estimates])


@dataclass(frozen=True)
class OffCenterDisk:
    """Disk B(center, radius) containing the origin; WoS test domain with a
    continuous h-function."""

    center: complex
    radius: float

    def __post_init__(self):
        if abs(self.center) >= self.radius:
            raise ValueError("origin must be interior: need |center| < radius")

    @property
    def mu(self) -> float:
        return self.radius - abs(self.center)

    @property
    def outer_radius(self) -> float:
        return self.radius + abs(self.center)


WosDomain = Union[CircleDomain, BlockedCircleDomain, OffCenterDisk]


@dataclass(frozen=True)
class WosConfig:
    """Walk-on-spheres settings.  ``epsilon`` is the absorbing-shell
    thickness relative to the outer radius; walks hitting ``max_steps``
    are discarded from the estimate and tallied."""

    epsilon: float = 1e-5
    max_steps: int = 10_000
    seed: int = 0


@dataclass(frozen=True)
class ExitEnsemble:
    """Terminal data of a WoS ensemble: per-walk nearest boundary feature
    (kind code, index) and the modulus of its nearest point."""

    kinds: np.ndarray
    indices: np.ndarray
    moduli: np.ndarray
    discard_count: int
    sample_count: int


def _nearest(dom: WosDomain, z: np.ndarray):
    if isinstance(dom, OffCenterDisk):
        w = z - dom.center
        aw = np.abs(w)
        dist = dom.radius - aw
        with np.errstate(invalid="ignore", divide="ignore"):
            bp = dom.center + dom.radius * np.where(aw > 0, w / np.where(aw > 0, aw, 1.0), 1.0)
        mod = np.abs(bp)
        kinds = np.full(z.shape, 2, dtype=np.int8)
        idx = np.zeros(z.shape, dtype=np.int64)
        return dist, kinds, idx, mod
    return geometry.nearest_boundary(z, dom)


def _check_interior(dom: WosDomain, z0: complex) -> None:
    if isinstance(dom, OffCenterDisk):
        if abs(z0 - dom.center) >= dom.radius:
            raise NotInteriorError(f"{z0} not interior to the disk")
        return
    if not bool(geometry.is_interior(np.array([z0]), dom)[0]):
        raise NotInteriorError(f"{z0} not interior to the domain")


def wos_exit_ensemble(dom: WosDomain, z0: complex = 0.0, n_samples: int = 10_000,
                      config: WosConfig = WosConfig(),
                      reflect: bool = False) -> ExitEnsemble:
    """Run ``n_samples`` walks from ``z0``.

    Walks jump to a uniform point of the largest inscribed circle until
    they enter the epsilon shell; the nearest feature there is the exit.
    Batches are seeded as (seed, batch_index) so results depend only on
    (seed, n_samples), independent of any parallel scheduling.
    ``reflect`` negates every angular draw (domain symmetry tests).
    """
    if config.epsilon <= 0:
        raise ValueError("epsilon must be positive")
    _check_interior(dom, z0)
    eps_abs = config.epsilon * dom.outer_radius
    kinds = np.empty(n_samples, dtype=np.int8)
    indices = np.empty(n_samples, dtype=np.int64)
    moduli = np.empty(n_samples, dtype=float)
    done_mask = np.zeros(n_samples, dtype=bool)
    discards = 0
    for b_start in range(0, n_samples, _BATCH):
        b = min(_BATCH, n_samples - b_start)
        rng = np.random.default_rng([config.seed, b_start // _BATCH])
        z = np.full(b, complex(z0))
        alive = np.arange(b)
        for _ in range(config.max_steps):
            dist, kk, ii, mm = _nearest(dom, z)
            hit = dist < eps_abs
            if hit.any():
                sel = alive[hit]
                kinds[b_start + sel] = kk[hit]
                indices[b_start + sel] = ii[hit]
                moduli[b_start + sel] = mm[hit]
                done_mask[b_start + sel] = True
                keep = ~hit
                z = z[keep]
                alive = alive[keep]
                dist = dist[keep]
            if z.size == 0:
                break
            u = rng.random(z.size)
            if reflect:
                u = -u
            z = z + dist * np.exp(2j * math.pi * u)
        discards += alive.size
    done = done_mask.sum()
    return ExitEnsemble(kinds[done_mask], indices[done_mask], moduli[done_mask],
                        int(discards), int(done))


def wos_exit_sample(dom: WosDomain, z0: complex = 0.0,
                    config: WosConfig = WosConfig()) -> tuple[BoundaryFeature, float] | None:
    """One walk: the exit feature and the modulus of its nearest boundary
    point, or None if the walk hit the step cap."""
    ens = wos_exit_ensemble(dom, z0, 1, config)
    if ens.sample_count == 0:
        return None
    feat = BoundaryFeature(_KIND_NAMES[int(ens.kinds[0])], int(ens.indices[0]),
                           float(ens.moduli[0]))
    return feat, float(ens.moduli[0])


def feature_measures(ens: ExitEnsemble) -> dict[tuple[str, int], MeasureEstimate]:
    """Empirical harmonic measure of every boundary feature hit by the
    ensemble, with binomial standard errors."""
    out: dict[tuple[str, int], MeasureEstimate] = {}
    m = ens.sample_count
    if m == 0:
        return out
    keys = np.stack([ens.kinds.astype(np.int64), ens.indices], axis=1)
    uniq, counts = np.unique(keys, axis=0, return_counts=True)
    for (kc, idx), c in zip(uniq, counts):
        p = c / m
        se = math.sqrt(p * (1.0 - p) / m)
        out[(_KIND_NAMES[int(kc)], int(idx))] = MeasureEstimate(
            p, se, "wos", sample_count=m, discard_count=ens.discard_count)
    return out


def estimate_h(dom: WosDomain, radii: Sequence[float], z0: complex = 0.0,
               n_samples: int = 100_000,
               config: WosConfig = WosConfig()) -> HFunctionTable:
    """Estimate the h-function at the given sorted radii from one exit
    ensemble: h(r) is the CDF of the exit-point modulus (closed ball)."""
    radii = [float(r) for r in radii]
    if any(r2 < r1 for r1, r2 in zip(radii, radii[1:])):
        raise ValueError("radii must be sorted")
    ens = wos_exit_ensemble(dom, z0, n_samples, config)
    m = ens.sample_count
    ests = []
    mod_sorted = np.sort(ens.moduli)
    for r in radii:
        c = int(np.searchsorted(mod_sorted, r, side="right"))
        p = c / m if m else 0.0
        se = math.sqrt(p * (1.0 - p) / m) if m else 0.0
        ests.append(MeasureEstimate(p, se, "wos", sample_count=m,
                                    discard_count=ens.discard_count))
    return HFunctionTable(tuple(radii), tuple(ests))


# ---------------------------------------------------------------------------
# Deterministic engine (delegates to the adaptive polar-grid solver).


def fd_harmonic_measure(dom: CircleDomain | BlockedCircleDomain,
                        targets: Sequence[tuple[str, int]],
                        resolution: int = 512) -> list[MeasureEstimate]:
    """Harmonic measure at 0 of each target feature by the deterministic
    polar-grid Dirichlet solver.  Targets are (kind, index) pairs with
    kind "arc", "gate" or "outer-circle"."""
    from .fd import FdSolver
    solver = FdSolver(dom, n_theta=resolution)
    out = []
    for kind, idx in targets:
        out.append(MeasureEstimate(solver.measure(kind, idx), 0.0, "fd",
                                   grid_resolution=resolution))
    return out


# ---------------------------------------------------------------------------
# Exact oracles.


def exact_offcenter_disk_h(center: complex, radius: float, r: float) -> float:
    """h-function of the off-center disk B(center, radius) at radius r,
    via the disk automorphism fixing 0: the measure is the normalized
    arclength of the image arc."""
    t = abs(center)
    if t >= radius:
        raise ValueError("origin must be interior: need |center| < radius")
    if r <= 0:
        raise ValueError("radius must be positive")
    if t == 0.0:
        return 1.0 if r >= radius else 0.0
    c = (r * r - t * t - radius * radius) / (2.0 * t * radius)
    if c <= -1.0:
        return 0.0
    if c >= 1.0:
        return 1.0
    theta_star = math.acos(c)
    s = t / radius
    w = (cmath.exp(1j * theta_star) + s) / (1.0 + s * cmath.exp(1j * theta_star))
    g = cmath.phase(w)  # in (0, pi) for theta_star in (0, pi)
    return 1.0 - g / math.pi


def exact_slit_disk_gate(r_k: float, r_k1: float, M: float) -> float:
    """Exact harmonic measure at 0 of the segment [r_k, r_{k+1}] in the
    slit disk B(0, M) minus [r_k, M]:
    (2/pi) arctan sqrt((r_{k+1}-r_k)(M^2 - r_{k+1} r_k) /
    (r_k (r_{k+1}+M)^2))."""
    if not (0 < r_k <= r_k1 <= M):
        raise ValueError("need 0 < r_k <= r_{k+1} <= M")
    if r_k1 == r_k:
        return 0.0
    arg = (r_k1 - r_k) * (M * M - r_k1 * r_k) / (r_k * (r_k1 + M) ** 2)
    return (2.0 / math.pi) * math.atan(math.sqrt(arg))


def beurling_lower_bound(mu: float, r: float) -> float:
    """Necessary lower bound 1 - (4/pi) arctan sqrt(mu/r) for simply
    connected domains with inner radius mu."""
    if not 0 < mu <= r:
        raise ValueError("need 0 < mu <= r")
    return beurling_bound(mu, r)


def slit_disk(r_k: float, r_k1: float, M: float) -> BlockedCircleDomain:
    """The slit disk B(0, M) minus [r_k, M] as a blocked circle domain:
    point arcs at r_k and r_{k+1} joined by on-axis gates."""
    base = CircleDomain.from_arrays([r_k, r_k1, M], [0.0, 0.0, math.pi])
    return BlockedCircleDomain(base, (0.0, 0.0))

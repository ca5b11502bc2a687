"""Circle-type planar domains.

A circle domain is a disk ``B(0, r_n)`` minus closed concentric circular
arcs, every arc centered on the positive real axis.  A blocked circle
domain additionally carries radial "gates" that close off the annular
channels between consecutive arcs, making the domain simply connected.

All domains here are symmetric about the real axis by construction, so an
arc is described by its radius and half-arclength psi, and a gate pair by
a single nonnegative angle phi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Arc",
    "CircleDomain",
    "BlockedCircleDomain",
    "BoundaryFeature",
    "Domain",
    "NotInteriorError",
    "distance_to_boundary",
    "nearest_boundary",
    "is_interior",
    "validate",
    "eta",
    "theta",
]

KIND_ARC = "arc"
KIND_GATE = "gate"
KIND_OUTER = "outer-circle"


class NotInteriorError(ValueError):
    """The query point is outside the domain or on its boundary."""


@dataclass(frozen=True)
class Arc:
    """Closed circular arc of half-arclength ``psi`` centered at angle 0.

    ``psi == pi`` is a full circle; ``psi == 0`` is a degenerate
    single-point arc on the positive real axis (allowed, but carries no
    harmonic measure).
    """

    radius: float
    half_arclength: float


@dataclass(frozen=True)
class CircleDomain:
    """Disk minus concentric arcs; the last arc is the full outer circle."""

    arcs: tuple[Arc, ...]

    @property
    def radii(self) -> np.ndarray:
        return np.array([a.radius for a in self.arcs], dtype=float)

    @property
    def psis(self) -> np.ndarray:
        return np.array([a.half_arclength for a in self.arcs], dtype=float)

    @property
    def n_arcs(self) -> int:
        """Number of proper (non-outer) arcs."""
        return len(self.arcs) - 1

    @property
    def mu(self) -> float:
        return self.arcs[0].radius

    @property
    def outer_radius(self) -> float:
        return self.arcs[-1].radius

    @staticmethod
    def from_arrays(radii, psis) -> "CircleDomain":
        return CircleDomain(tuple(Arc(float(r), float(p)) for r, p in zip(radii, psis)))

    @staticmethod
    def disk(radius: float) -> "CircleDomain":
        """The plain disk ``B(0, radius)``."""
        return CircleDomain((Arc(float(radius), math.pi),))


@dataclass(frozen=True)
class BlockedCircleDomain:
    """A circle domain with each annular channel blocked by a gate pair.

    ``gate_angles[k]`` is the angle phi_k of the gates joining arc k to
    arc k+1; phi_k = 0 means a single gate on the positive real axis.
    """

    base: CircleDomain
    gate_angles: tuple[float, ...]

    @property
    def radii(self) -> np.ndarray:
        return self.base.radii

    @property
    def psis(self) -> np.ndarray:
        return self.base.psis

    @property
    def phis(self) -> np.ndarray:
        return np.array(self.gate_angles, dtype=float)

    @property
    def chis(self) -> np.ndarray:
        """Inset angles chi_k = min(psi_k, psi_{k+1}) - phi_k."""
        psi = self.psis
        return np.minimum(psi[:-1], psi[1:]) - self.phis

    @property
    def mu(self) -> float:
        return self.base.mu

    @property
    def outer_radius(self) -> float:
        return self.base.outer_radius


Domain = Union[CircleDomain, BlockedCircleDomain]


@dataclass(frozen=True)
class BoundaryFeature:
    """A boundary component hit by a walk: which feature, and the modulus
    of the feature point nearest the query."""

    kind: str  # "arc" | "gate" | "outer-circle"
    index: int
    modulus: float


def _base(d: Domain) -> CircleDomain:
    return d.base if isinstance(d, BlockedCircleDomain) else d


def validate(d: Domain) -> list[str]:
    """Check all structural invariants; returns violations, never raises.

    Entries starting with ``"warning:"`` are advisory (capacity-zero
    point arcs); anything else makes the domain unusable.
    """
    out: list[str] = []
    base = _base(d)
    radii = base.radii
    psis = base.psis
    if len(base.arcs) == 0:
        return ["domain has no arcs"]
    if np.any(radii <= 0):
        out.append("radii must be positive")
    if np.any(np.diff(radii) <= 0):
        out.append("radii not increasing")
    if np.any((psis < 0) | (psis > math.pi)):
        out.append("half-arclength outside [0, pi]")
    if psis[-1] != math.pi:
        out.append("outer boundary not full circle")
    if np.any(psis[:-1] >= math.pi):
        out.append("inner arc is a full circle")
    for k, p in enumerate(psis[:-1]):
        if p == 0.0:
            out.append(f"warning: capacity-zero feature: arc {k} has zero arclength")
    if isinstance(d, BlockedCircleDomain):
        phi = d.phis
        if len(phi) != len(base.arcs) - 1:
            out.append("gate count must equal arc count minus one")
        else:
            cap = np.minimum(psis[:-1], psis[1:])
            if np.any(phi < 0):
                out.append("gate angle negative")
            if np.any(phi > cap + 1e-15):
                out.append("gate angle exceeds neighboring arcs; channel not blocked")
    # Symmetry about the real axis is structural for these parametric
    # classes; report it explicitly as the definition asks.
    return out


def is_usable(d: Domain) -> bool:
    return all(v.startswith("warning:") for v in validate(d))


# ---------------------------------------------------------------------------
# Distance queries.  Everything is vectorized over complex arrays because the
# walk-on-spheres engine calls this in bulk.


def _feature_arrays(d: Domain):
    """Feature table: arcs (without the outer circle), gate pairs, outer.

    Returns (radii, psis, gate_phi, gate_lo, gate_hi, outer_radius).
    """
    base = _base(d)
    radii = base.radii
    psis = base.psis
    if isinstance(d, BlockedCircleDomain):
        phi = d.phis
        glo = radii[:-1]
        ghi = radii[1:]
    else:
        phi = np.empty(0)
        glo = np.empty(0)
        ghi = np.empty(0)
    return radii[:-1], psis[:-1], phi, glo, ghi, radii[-1]


def nearest_boundary(z: np.ndarray, d: Domain):
    """Distance from points ``z`` to the nearest boundary feature.

    Returns arrays ``(dist, kind_code, index, modulus)`` where kind_code is
    0 for arcs, 1 for gates, 2 for the outer circle.  Ties resolve to the
    lowest feature index with arcs before gates before the outer circle.
    """
    z = np.asarray(z, dtype=complex)
    arc_r, arc_psi, gate_phi, gate_lo, gate_hi, M = _feature_arrays(d)

    rho = np.abs(z)
    ang = np.abs(np.angle(z))

    best_d = M - rho
    np.abs(best_d, out=best_d)
    best_kind = np.full(z.shape, 2, dtype=np.int8)
    best_idx = np.full(z.shape, len(arc_r), dtype=np.int64)
    best_mod = np.full(z.shape, M, dtype=float)

    # Gates first, then arcs, so that the final arc pass wins ties and the
    # arcs < gates < outer preference order holds under argmin semantics.
    for k in range(len(gate_phi) - 1, -1, -1):
        a, b, phi = gate_lo[k], gate_hi[k], gate_phi[k]
        w = z * np.exp(-1j * phi)
        t = np.clip(w.real, a, b)
        dist = np.hypot(w.real - t, w.imag)
        if phi > 0.0:
            # mirror gate at -phi == gate at +phi seen from conj(z)
            w2 = np.conj(z) * np.exp(-1j * phi)
            t2 = np.clip(w2.real, a, b)
            dist2 = np.hypot(w2.real - t2, w2.imag)
            t = np.where(dist2 < dist, t2, t)
            dist = np.minimum(dist, dist2)
        take = dist <= best_d
        best_d = np.where(take, dist, best_d)
        best_kind = np.where(take, np.int8(1), best_kind)
        best_idx = np.where(take, k, best_idx)
        best_mod = np.where(take, t, best_mod)

    for k in range(len(arc_r) - 1, -1, -1):
        r, psi = arc_r[k], arc_psi[k]
        onarc = ang <= psi
        end = r * np.exp(1j * psi)
        dist = np.where(onarc, np.abs(rho - r),
                        np.minimum(np.abs(z - end), np.abs(z - np.conj(end))))
        take = dist <= best_d
        best_d = np.where(take, dist, best_d)
        best_kind = np.where(take, np.int8(0), best_kind)
        best_idx = np.where(take, k, best_idx)
        best_mod = np.where(take, r, best_mod)

    return best_d, best_kind, best_idx, best_mod


def is_interior(z: np.ndarray, d: Domain) -> np.ndarray:
    """True where ``z`` lies in the open component of the domain containing 0.

    For blocked circle domains the closed-off pockets behind the gates
    (between arcs, inside the gate angle) are excluded explicitly.
    """
    z = np.asarray(z, dtype=complex)
    arc_r, arc_psi, gate_phi, gate_lo, gate_hi, M = _feature_arrays(d)
    rho = np.abs(z)
    ang = np.abs(np.angle(z))
    ok = rho < M
    for k in range(len(arc_r)):
        on = (ang <= arc_psi[k]) & (rho == arc_r[k])
        ok &= ~on
    for k in range(len(gate_phi)):
        pocket = (rho > gate_lo[k]) & (rho < gate_hi[k]) & (ang < gate_phi[k])
        ok &= ~pocket
    d0, _, _, _ = nearest_boundary(z, d)
    ok &= d0 > 0.0
    return ok


def distance_to_boundary(z: complex, d: Domain) -> tuple[float, BoundaryFeature]:
    """Exact distance from an interior point to the nearest boundary feature."""
    zz = np.array([z], dtype=complex)
    if not bool(is_interior(zz, d)[0]):
        raise NotInteriorError(f"point {z} is not interior to the domain")
    dist, kind, idx, mod = nearest_boundary(zz, d)
    kind_name = (KIND_ARC, KIND_GATE, KIND_OUTER)[int(kind[0])]
    return float(dist[0]), BoundaryFeature(kind_name, int(idx[0]), float(mod[0]))


# ---------------------------------------------------------------------------
# Channel-depth combinatorics.


def eta(d: Domain, j: int, k: int) -> float:
    """Depth of the shortest arc between arcs j and k:
    min(psi_j, psi_k) - min over psi_l for j <= l <= k."""
    psi = _base(d).psis
    if not (0 <= j < k <= len(psi) - 1):
        raise IndexError(f"need 0 <= j < k <= n, got j={j}, k={k}")
    return float(min(psi[j], psi[k]) - psi[j:k + 1].min())


def theta(d: BlockedCircleDomain, j: int, k: int) -> float:
    """Depth of the deepest gate between arcs j and k:
    min(psi_j, psi_k) - min over phi_l for j <= l < k."""
    psi = d.psis
    phi = d.phis
    if not (0 <= j < k <= len(psi) - 1):
        raise IndexError(f"need 0 <= j < k <= n, got j={j}, k={k}")
    return float(min(psi[j], psi[k]) - phi[j:k].min())

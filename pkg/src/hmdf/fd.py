"""Deterministic Dirichlet solver on an adaptive polar grid.

The solver discretizes the Laplacian in polar coordinates on a tensor-ish
grid whose angular rays pass exactly through every arc endpoint and gate
angle, and whose rings pass exactly through every arc radius.  Because the
feature rays move with the feature angles, the computed harmonic measure of
an arc varies continuously with its half-arclength -- the property the
inversion loop relies on.

Harmonic measure of every boundary feature at the origin is read off a
single adjoint solve: if A u_int + B u_dir = 0 is the interior system, the
vector w = -B^T A^{-T} e_origin holds one nonnegative weight per Dirichlet
node, and the measure of any feature is the sum of its nodes' weights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import splu

from . import geometry
from .geometry import BlockedCircleDomain, CircleDomain

__all__ = ["FdSolver"]

_MERGE = 1e-9   # rays closer than this are merged
_MATCH = 2e-9   # membership tolerance against merged rays / rings


def _angular_rays(d, n_theta: int) -> np.ndarray:
    """Symmetric full-circle angle list: required feature rays on [0, pi]
    plus uniform filler to spacing <= 2*pi/n_theta, mirrored to (-pi, pi]."""
    base = d.base if isinstance(d, BlockedCircleDomain) else d
    req = {0.0, math.pi}
    for p in base.psis[:-1]:
        if 0.0 < p < math.pi:
            req.add(float(p))
    if isinstance(d, BlockedCircleDomain):
        for f in d.phis:
            if 0.0 < f < math.pi:
                req.add(float(f))
    pos = sorted(req)
    merged = [pos[0]]
    for a in pos[1:]:
        if a - merged[-1] > _MERGE:
            merged.append(a)
    h = 2.0 * math.pi / n_theta
    out = []
    for a, b in zip(merged, merged[1:]):
        out.append(a)
        n_sub = max(1, math.ceil((b - a) / h))
        for s in range(1, n_sub):
            out.append(a + (b - a) * s / n_sub)
    out.append(math.pi)
    pos_arr = np.array(out)
    return np.concatenate([-pos_arr[-2:0:-1], pos_arr])


def _ring_radii(d, n_theta: int) -> np.ndarray:
    """Log-spaced rings through every arc radius, with an inner ring band
    from half the first radius (the origin closes the disk below it)."""
    radii = (d.base if isinstance(d, BlockedCircleDomain) else d).radii
    h = 2.0 * math.pi / n_theta
    knots = [0.5 * radii[0]] + [float(r) for r in radii]
    out = []
    for a, b in zip(knots, knots[1:]):
        n_sub = max(2, math.ceil(math.log(b / a) / h))
        for s in range(n_sub):
            out.append(a * (b / a) ** (s / n_sub))
    out.append(knots[-1])
    return np.array(out)


class FdSolver:
    """Finite-difference harmonic measure of a circle-type domain at 0.

    One construction performs one sparse factorization and one adjoint
    solve; afterwards every feature measure, cumulative measure, and
    endpoint-density query is a cheap array reduction.
    """

    def __init__(self, dom: CircleDomain | BlockedCircleDomain, n_theta: int = 512):
        bad = [v for v in geometry.validate(dom) if not v.startswith("warning:")]
        if bad:
            raise ValueError("; ".join(bad))
        self.domain = dom
        self.n_theta = int(n_theta)
        base = dom.base if isinstance(dom, BlockedCircleDomain) else dom
        self._radii = base.radii
        self._psis = base.psis
        self._phis = dom.phis if isinstance(dom, BlockedCircleDomain) else np.empty(0)
        self.thetas = _angular_rays(dom, self.n_theta)
        self.rho = _ring_radii(dom, self.n_theta)
        self._label()
        self._assemble_and_solve()

    # -- grid labeling ----------------------------------------------------

    def _ring_index(self, r: float) -> int:
        i = int(np.argmin(np.abs(self.rho - r)))
        if abs(self.rho[i] - r) > _MATCH * max(1.0, r):
            raise RuntimeError(f"arc radius {r} missing from ring set")
        return i

    def _label(self) -> None:
        nr, N = len(self.rho), len(self.thetas)
        kind = np.full((nr, N), -1, dtype=np.int8)
        idx = np.full((nr, N), -1, dtype=np.int64)
        absth = np.abs(self.thetas)
        # gates first; arcs overwrite them so shared corner nodes count as
        # arc nodes, matching the arcs-before-gates tie rule.
        for k in range(len(self._phis)):
            on_ray = np.abs(absth - self._phis[k]) <= _MATCH
            i0 = self._ring_index(self._radii[k])
            i1 = self._ring_index(self._radii[k + 1])
            block = np.ix_(np.arange(i0, i1 + 1), np.nonzero(on_ray)[0])
            fresh = kind[block] == -1
            kind[block] = np.where(fresh, np.int8(1), kind[block])
            idx[block] = np.where(fresh, k, idx[block])
        self._arc_ring = {}
        for k in range(len(self._radii) - 1):
            psi = self._psis[k]
            if psi <= 0.0:
                continue  # capacity-zero point arc
            i = self._ring_index(self._radii[k])
            self._arc_ring[k] = i
            on = absth <= psi + _MATCH
            kind[i, on] = 0
            idx[i, on] = k
        kind[-1, :] = 2
        idx[-1, :] = len(self._radii) - 1
        self._kind = kind
        self._idx = idx

    # -- assembly and the adjoint solve -----------------------------------

    def _assemble_and_solve(self) -> None:
        rho, thetas = self.rho, self.thetas
        nr, N = len(rho), len(thetas)
        is_dir = self._kind >= 0
        if is_dir[0].any():
            raise RuntimeError("innermost ring must not touch the boundary")

        uid = np.full((nr, N), -1, dtype=np.int64)
        uid[~is_dir] = np.arange((~is_dir).sum())
        n_int = int((~is_dir).sum())
        origin = n_int
        n_unk = n_int + 1
        did = np.full((nr, N), -1, dtype=np.int64)
        did[is_dir] = np.arange(is_dir.sum())
        n_dir = int(is_dir.sum())

        h_m = np.empty(nr - 1)
        h_m[0] = rho[0]
        h_m[1:] = rho[1:nr - 1] - rho[:nr - 2]
        h_p = rho[1:] - rho[:-1]
        g_m = thetas - np.roll(thetas, 1)
        g_m[0] += 2.0 * math.pi
        g_p = np.roll(thetas, -1) - thetas
        g_p[-1] += 2.0 * math.pi
        self._g_m, self._g_p = g_m, g_p

        r = rho[:nr - 1][:, None]
        hm = h_m[:, None]
        hp = h_p[:nr - 1][:, None]
        D = hm * hp * (hm + hp)
        c_in = np.broadcast_to(hp * (2.0 - hp / r) / D, (nr - 1, N))
        c_out = np.broadcast_to(hm * (2.0 + hm / r) / D, (nr - 1, N))
        c_ctr = (-2.0 * (hm + hp) + (hp * hp - hm * hm) / r) / D
        r2 = r * r
        a_in = 2.0 / (g_m * (g_m + g_p))[None, :] / r2
        a_out = 2.0 / (g_p * (g_m + g_p))[None, :] / r2
        a_ctr = -2.0 / (g_m * g_p)[None, :] / r2

        I, J = np.nonzero(~is_dir[:nr - 1])
        row = uid[I, J]
        a_rows, a_cols, a_vals = [row], [row], [(c_ctr + a_ctr)[I, J]]
        b_rows, b_cols, b_vals = [], [], []

        def _push(rows, ni, nj, coeff):
            d_mask = is_dir[ni, nj]
            a_rows.append(rows[~d_mask])
            a_cols.append(uid[ni[~d_mask], nj[~d_mask]])
            a_vals.append(coeff[~d_mask])
            b_rows.append(rows[d_mask])
            b_cols.append(did[ni[d_mask], nj[d_mask]])
            b_vals.append(coeff[d_mask])

        # radial inward: origin for ring 0, ring i-1 otherwise
        inner = I == 0
        a_rows.append(row[inner])
        a_cols.append(np.full(inner.sum(), origin))
        a_vals.append(c_in[I[inner], J[inner]])
        _push(row[~inner], I[~inner] - 1, J[~inner], c_in[I[~inner], J[~inner]])
        _push(row, I + 1, J, c_out[I, J])
        _push(row, I, (J - 1) % N, a_in[I, J])
        _push(row, I, (J + 1) % N, a_out[I, J])

        # origin closure: the exact circle mean over the innermost ring
        a_rows.append(np.full(N + 1, origin))
        a_cols.append(np.concatenate([[origin], uid[0]]))
        cell = 0.5 * (g_m + g_p)
        a_vals.append(np.concatenate([[1.0], -cell / (2.0 * math.pi)]))

        A = coo_matrix((np.concatenate(a_vals),
                        (np.concatenate(a_rows), np.concatenate(a_cols))),
                       shape=(n_unk, n_unk)).tocsc()
        B = coo_matrix((np.concatenate(b_vals),
                        (np.concatenate(b_rows), np.concatenate(b_cols))),
                       shape=(n_unk, n_dir)).tocsr()

        lu = splu(A)
        e0 = np.zeros(n_unk)
        e0[origin] = 1.0
        y = lu.solve(e0, trans="T")
        w = -(B.T @ y)

        di, dj = np.nonzero(is_dir)
        order = did[di, dj]
        self.dir_kind = np.empty(n_dir, dtype=np.int8)
        self.dir_index = np.empty(n_dir, dtype=np.int64)
        self.dir_radius = np.empty(n_dir)
        self.dir_theta = np.empty(n_dir)
        self.dir_kind[order] = self._kind[di, dj]
        self.dir_index[order] = self._idx[di, dj]
        self.dir_radius[order] = rho[di]
        self.dir_theta[order] = thetas[dj]
        self.weights = w
        self.weight_sum = float(w.sum())
        self.n_unknowns = n_unk
        self._did = did
        self._is_dir = is_dir

    # -- measure queries --------------------------------------------------

    _KIND_CODE = {"arc": 0, "gate": 1, "outer-circle": 2}

    def measure(self, kind: str, index: int) -> float:
        """Harmonic measure at 0 of one boundary feature."""
        code = self._KIND_CODE[kind]
        sel = (self.dir_kind == code) & (self.dir_index == index)
        return float(self.weights[sel].sum())

    def arc_measures(self) -> np.ndarray:
        """Per-arc measures for the proper arcs 0..n-1 (capacity-zero arcs
        report 0)."""
        n = len(self._radii) - 1
        out = np.zeros(n)
        sel = self.dir_kind == 0
        np.add.at(out, self.dir_index[sel], self.weights[sel])
        return out

    def gate_measures(self) -> np.ndarray:
        n = max(len(self._phis), 0)
        out = np.zeros(n)
        sel = self.dir_kind == 1
        np.add.at(out, self.dir_index[sel], self.weights[sel])
        return out

    def outer_measure(self) -> float:
        return float(self.weights[self.dir_kind == 2].sum())

    def h_table(self, radii) -> np.ndarray:
        """h(r) = measure of the boundary within the closed ball of each
        radius, from the node moduli."""
        radii = np.atleast_1d(np.asarray(radii, dtype=float))
        order = np.argsort(self.dir_radius)
        rs = self.dir_radius[order]
        cw = np.cumsum(self.weights[order])
        pos = np.searchsorted(rs, radii * (1.0 + 1e-12), side="right")
        return np.where(pos > 0, cw[np.maximum(pos - 1, 0)], 0.0)

    def endpoint_density(self, k: int) -> float:
        """Rough derivative of arc k's measure with respect to its
        half-arclength.  The boundary density diverges at the arc tips, so
        the tip-node weights badly overestimate the derivative; sample a
        few cells inside each end instead and halve, which lands within a
        small factor of the true slope.  Callers refine by secant."""
        if k not in self._arc_ring:
            raise ValueError(f"arc {k} carries no boundary nodes")
        i = self._arc_ring[k]
        on = np.nonzero(self._kind[i] == 0)[0]
        on = on[self._idx[i, on] == k]
        back = min(8, (len(on) - 1) // 2)
        total = 0.0
        for j in (on[back], on[-1 - back]):
            w = self.weights[self._did[i, j]]
            cell = 0.5 * (self._g_m[j] + self._g_p[j])
            total += w / cell
        if on[back] == on[-1 - back]:
            total *= 0.5  # single shared node counted twice above
        return float(0.5 * total)

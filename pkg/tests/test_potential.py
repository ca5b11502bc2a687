"""Harmonic-measure engines: walk-on-spheres statistics against exact
conformal oracles, an independent Poisson-kernel quadrature oracle, and the
deterministic grid solver."""
import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import kstest

from hmdf import geometry, potential
from hmdf.fd import FdSolver
from hmdf.geometry import BlockedCircleDomain, CircleDomain
from hmdf.potential import (OffCenterDisk, WosConfig, estimate_h,
                            exact_offcenter_disk_h, exact_slit_disk_gate,
                            feature_measures, slit_disk, wos_exit_ensemble)


def poisson_offcenter_h(a: float, R: float, r: float) -> float:
    """Independent oracle: harmonic measure of {|z| <= r} on the boundary
    of B(a, R) seen from 0, by direct Poisson-kernel quadrature."""
    c = (r * r - a * a - R * R) / (2 * a * R)
    if c <= -1:
        return 0.0
    if c >= 1:
        return 1.0
    t0 = math.acos(c)

    def kern(t):
        return (R * R - a * a) / abs(a + R * np.exp(1j * t)) ** 2

    val, _ = quad(kern, t0, math.pi, limit=200)
    return val / math.pi


class TestExactOracles:
    def test_offcenter_against_poisson_quadrature(self):
        for r in (0.55, 0.8, 1.0, 1.2, 1.45):
            assert exact_offcenter_disk_h(0.5, 1.0, r) == pytest.approx(
                poisson_offcenter_h(0.5, 1.0, r), abs=1e-10)

    def test_offcenter_limits(self):
        assert exact_offcenter_disk_h(0.5, 1.0, 0.5) == 0.0
        assert exact_offcenter_disk_h(0.5, 1.0, 1.5) == 1.0
        assert exact_offcenter_disk_h(0.0, 1.0, 0.99) == 0.0
        assert exact_offcenter_disk_h(0.0, 1.0, 1.0) == 1.0

    def test_slit_whole_slit_closed_form(self):
        # independently simplified: whole slit [r, M] has measure
        # (2/pi) arctan((M - r) / (2 sqrt(M r)))
        for r, M in ((1.0, 2.0), (0.3, 1.0), (2.0, 5.0)):
            expect = (2 / math.pi) * math.atan((M - r) / (2 * math.sqrt(M * r)))
            assert exact_slit_disk_gate(r, M, M) == pytest.approx(expect, abs=1e-14)

    def test_slit_reference_value(self):
        assert exact_slit_disk_gate(1.0, 2.0, 2.0) == pytest.approx(
            0.2163468959, abs=1e-9)

    def test_slit_monotone_in_segment(self):
        vals = [exact_slit_disk_gate(1.0, r1, 2.0) for r1 in (1.0, 1.2, 1.5, 2.0)]
        assert vals[0] == 0.0
        assert all(b > a for a, b in zip(vals, vals[1:]))


class TestWos:
    def test_deterministic_for_seed(self):
        dom = OffCenterDisk(0.5, 1.0)
        e1 = wos_exit_ensemble(dom, 0.0, 5000, WosConfig(seed=3))
        e2 = wos_exit_ensemble(dom, 0.0, 5000, WosConfig(seed=3))
        assert np.array_equal(e1.moduli, e2.moduli)
        e3 = wos_exit_ensemble(dom, 0.0, 5000, WosConfig(seed=4))
        assert not np.array_equal(e1.moduli, e3.moduli)

    def test_exit_modulus_distribution_ks(self):
        # the exit-modulus CDF is the exact h-function: KS test
        dom = OffCenterDisk(0.5, 1.0)
        ens = wos_exit_ensemble(dom, 0.0, 20_000, WosConfig(seed=11))
        res = kstest(ens.moduli, lambda r: np.array(
            [exact_offcenter_disk_h(0.5, 1.0, float(x)) for x in np.atleast_1d(r)]))
        assert res.pvalue > 0.01

    def test_offcenter_h_matches_exact(self):
        dom = OffCenterDisk(0.5, 1.0)
        table = estimate_h(dom, [0.8, 1.0, 1.2], 0.0, 50_000, WosConfig(seed=5))
        for r, est in zip(table.radii, table.estimates):
            exact = exact_offcenter_disk_h(0.5, 1.0, r)
            assert abs(est.value - exact) <= 3 * est.std_error + 1e-3

    def test_slit_disk_gate_measures(self):
        dom = slit_disk(1.0, 1.5, 2.0)
        ens = wos_exit_ensemble(dom, 0.0, 60_000, WosConfig(seed=9))
        fm = feature_measures(ens)
        seg = fm[("gate", 0)]
        exact = exact_slit_disk_gate(1.0, 1.5, 2.0)
        assert abs(seg.value - exact) <= 3 * seg.std_error + 1e-3
        # exits within the shell of a slit endpoint tie-break to the point
        # arcs; their share vanishes with epsilon and belongs to the slit
        tips = sum(fm[k].value for k in (("arc", 0), ("arc", 1)) if k in fm)
        assert tips < 5e-3
        whole = seg.value + fm[("gate", 1)].value + tips
        exact_whole = exact_slit_disk_gate(1.0, 2.0, 2.0)
        assert abs(whole - exact_whole) <= 3 * (seg.std_error +
                                                fm[("gate", 1)].std_error) + 1e-3

    def test_reflection_invariance_walkwise(self):
        # on a symmetric domain, negating every angular draw mirrors each
        # walk exactly, so exit moduli match walk for walk
        base = CircleDomain.from_arrays([1.0, 2.0], [0.9, math.pi])
        dom = BlockedCircleDomain(base, (0.4,))
        e1 = wos_exit_ensemble(dom, 0.0, 4000, WosConfig(seed=2))
        e2 = wos_exit_ensemble(dom, 0.0, 4000, WosConfig(seed=2), reflect=True)
        assert np.array_equal(e1.moduli, e2.moduli)
        assert np.array_equal(e1.kinds, e2.kinds)
        assert np.array_equal(e1.indices, e2.indices)

    def test_not_interior_rejected(self):
        with pytest.raises(geometry.NotInteriorError):
            wos_exit_ensemble(OffCenterDisk(0.5, 1.0), 2.0, 10)


class TestFdSolver:
    def test_disk_weights_normalized(self):
        s = FdSolver(CircleDomain.disk(2.0), n_theta=128)
        assert s.weight_sum == pytest.approx(1.0, abs=1e-10)
        assert s.outer_measure() == pytest.approx(1.0, abs=1e-10)
        assert np.all(s.weights > -1e-12)

    def test_slit_disk_richardson(self):
        dom = slit_disk(1.0, 1.5, 2.0)
        lo = FdSolver(dom, n_theta=256).gate_measures()
        hi = FdSolver(dom, n_theta=512).gate_measures()
        rich = 2 * hi - lo  # first-order accurate at the slit tip
        grid_err = float(np.abs(hi - lo).max())
        exact = np.array([exact_slit_disk_gate(1.0, 1.5, 2.0),
                          exact_slit_disk_gate(1.0, 2.0, 2.0)
                          - exact_slit_disk_gate(1.0, 1.5, 2.0)])
        assert np.abs(rich - exact).max() <= 2 * grid_err

    def test_matches_wos_on_blocked_domain(self):
        base = CircleDomain.from_arrays([1.0, 1.4, 2.0], [1.1, 0.7, math.pi])
        dom = BlockedCircleDomain(base, (0.3, 0.0))
        s = FdSolver(dom, n_theta=512)
        ens = wos_exit_ensemble(dom, 0.0, 100_000, WosConfig(seed=7))
        fm = feature_measures(ens)
        for (kind, idx), est in fm.items():
            fd_val = s.measure(kind, idx)
            assert abs(fd_val - est.value) <= 3 * est.std_error + 3e-3

    def test_h_table_monotone_and_saturates(self):
        base = CircleDomain.from_arrays([1.0, 1.4, 2.0], [1.1, 0.7, math.pi])
        s = FdSolver(base, n_theta=256)
        rs = np.linspace(0.5, 2.0, 31)
        hv = s.h_table(rs)
        assert np.all(np.diff(hv) >= -1e-12)
        assert hv[0] == 0.0
        assert hv[-1] == pytest.approx(1.0, abs=1e-10)

    def test_measure_continuous_in_psi(self):
        # the adaptive rays keep the measure continuous in the arc angle
        vals = []
        for psi in (1.0, 1.0 + 1e-3):
            s = FdSolver(CircleDomain.from_arrays([1.0, 2.0], [psi, math.pi]), 256)
            vals.append(s.arc_measures()[0])
        assert abs(vals[1] - vals[0]) < 5e-3

    def test_endpoint_density_positive(self):
        s = FdSolver(CircleDomain.from_arrays([1.0, 2.0], [1.0, math.pi]), 256)
        assert s.endpoint_density(0) > 0.0

    def test_invalid_domain_rejected(self):
        with pytest.raises(ValueError):
            FdSolver(CircleDomain.from_arrays([2.0, 1.0], [0.5, math.pi]))

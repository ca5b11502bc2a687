"""Inversion of step targets, gate insertion, candidate certification, and
the limit-uniformity diagnostics."""
import math

import numpy as np
import pytest

from hmdf import bounds, construct, geometry, hfunction
from hmdf.construct import (SolveError, SolveSettings, build_blocked,
                            check_candidate, solve_circle_domain,
                            ulc_diagnostics)
from hmdf.geometry import BlockedCircleDomain, CircleDomain
from hmdf.hfunction import CONSTANT, LINEAR, CandidateH, StepH

# Regression value for the two-jump target (0.5 at 1, 0.5 at 2), frozen
# after cross-engine agreement: deterministic grid solver at resolution 512
# and the Monte Carlo solver agree within their tolerances.
PSI0_TWO_JUMP = 0.860769


class TestSolveCircleDomain:
    def test_single_jump_is_disk(self):
        res = solve_circle_domain(StepH((2.0,), (1.0,)))
        assert res.converged
        assert res.domain.n_arcs == 0
        assert res.domain.outer_radius == 2.0

    def test_two_jump_frozen_regression(self):
        res = solve_circle_domain(StepH((1.0, 2.0), (0.5, 1.0)))
        assert res.converged
        assert res.domain.psis[0] == pytest.approx(PSI0_TWO_JUMP, abs=2e-3)
        assert res.domain.psis[-1] == math.pi

    def test_two_jump_wos_engine_agrees(self):
        settings = SolveSettings(engine="wos", wos_samples=60_000, seed=1)
        res = solve_circle_domain(StepH((1.0, 2.0), (0.5, 1.0)), settings)
        assert res.converged
        # stochastic engine: tolerance inflated to the sampling noise
        assert res.domain.psis[0] == pytest.approx(
            PSI0_TWO_JUMP, abs=3 * res.tol_effective / 0.3)

    def test_round_trip(self):
        steps = StepH((1.0, 1.4, 2.0), (0.3, 0.65, 1.0))
        res = solve_circle_domain(steps)
        from hmdf.fd import FdSolver
        solver = FdSolver(res.domain, n_theta=512)
        hv = solver.h_table(steps.radii)
        assert np.abs(hv - np.array(steps.values)).max() <= 1e-3

    def test_warm_start_uniqueness(self):
        steps = StepH((1.0, 1.4, 2.0), (0.3, 0.65, 1.0))
        a = solve_circle_domain(steps, SolveSettings(warm_start="proportional"))
        b = solve_circle_domain(steps, SolveSettings(warm_start="uniform"))
        assert np.abs(a.domain.psis - b.domain.psis).max() <= 2e-3

    def test_nonconvergence_reported(self):
        steps = StepH((1.0, 2.0), (0.5, 1.0))
        with pytest.raises(SolveError, match="residual"):
            solve_circle_domain(steps, SolveSettings(tol=1e-18, max_sweeps=4))


class TestBuildBlocked:
    def test_inset_formula(self):
        x = CircleDomain.from_arrays([1.0, 1.5, 2.0], [1.0, 0.4, math.pi])
        om = build_blocked(x, 0.25)
        # phi_k = max(0, min(psi_k, psi_{k+1}) - kappa)
        assert om.gate_angles == pytest.approx((0.15, 0.15))
        assert om.chis == pytest.approx([0.25, 0.25])
        assert geometry.validate(om) == []

    def test_kappa_larger_than_arcs(self):
        x = CircleDomain.from_arrays([1.0, 2.0], [0.3, math.pi])
        om = build_blocked(x, 1.0)
        assert om.gate_angles == (0.0,)
        assert om.chis[0] == pytest.approx(0.3)


class TestCheckCandidate:
    def test_jump_ramp_passes(self):
        rep = check_candidate(hfunction.example_jump_ramp())
        assert rep.verdict == "PASS"
        assert rep.alpha == pytest.approx(0.5)
        assert rep.beta == 0.5
        assert rep.ratio == pytest.approx(0.0992)
        assert rep.ratio < rep.thresholds.m_min

    def test_wide_gap_fails(self):
        f = hfunction.example_jump_ramp(gap=0.2)
        rep = check_candidate(f)
        assert rep.verdict == "FAIL"
        assert not rep.ratio_ok

    def test_flat_piece_fails(self):
        # a flat stretch kills the minimal secant slope
        f = CandidateH((1.0, 1.02, 1.05), (0.5, 0.5, 1.0), (CONSTANT, LINEAR))
        rep = check_candidate(f)
        assert rep.alpha == 0.0
        assert rep.verdict == "FAIL"


class TestUlcDiagnostics:
    def test_tight_domain_passes(self):
        x = CircleDomain.from_arrays([1.0, 1.05, 1.0992],
                                     [1.5, 2.2, math.pi])
        om = build_blocked(x, 0.02)
        checks = ulc_diagnostics(om, alpha=0.5)
        assert all(c.ok for c in checks)

    def test_adversarial_shallow_arc_fails(self):
        # an arc nearly closing the circle but far inside: angular depth
        # tiny, radial depth large
        x = CircleDomain.from_arrays([1.0, 2.0], [math.pi - 0.01, math.pi])
        om = build_blocked(x, 0.05)
        checks = ulc_diagnostics(om, alpha=0.5, eps_list=(0.5,))
        assert not checks[0].radius_ok

    def test_adversarial_deep_gate_fails(self):
        # two close radii but a gate plunging far below both arcs
        x = CircleDomain.from_arrays([1.0, 1.001, 1.1], [2.0, 2.0, math.pi])
        om = BlockedCircleDomain(x, (0.1, 1.9))
        checks = ulc_diagnostics(om, alpha=0.5, eps_list=(0.5,))
        assert not checks[0].theta_ok


class TestPipeline:
    def test_jump_ramp_small(self):
        rep = construct.run_pipeline(hfunction.example_jump_ramp(),
                                     n_list=(2, 4), verify_samples=40_000)
        assert rep.check.ok
        assert rep.stages[0].sup_gap >= rep.stages[1].sup_gap - 3 * (
            rep.stages[0].sup_gap_se + rep.stages[1].sup_gap_se)
        for st in rep.stages:
            assert geometry.validate(st.blocked) == []
            assert st.sigma_n == 0
            assert st.beurling_ok
            assert st.inversion_residual <= 1e-3
        assert rep.verdict == "PASS"

    def test_sigma_counts_small_arcs(self):
        x = CircleDomain.from_arrays([1.0, 1.5, 2.0], [0.01, 1.0, math.pi])
        kap = 0.05
        psis = x.psis[:-1]
        assert int(np.sum(psis <= kap)) == 1


class TestBoundaryProfile:
    def test_endpoints(self):
        f = hfunction.example_jump_ramp()
        prof = construct.boundary_profile(f, n_theta=361)
        thetas, rs = prof[:, 0], prof[:, 1]
        mid = np.argmin(np.abs(thetas))
        assert rs[mid] == pytest.approx(f.mu)
        assert rs[0] == pytest.approx(f.M)
        assert rs[-1] == pytest.approx(f.M)
        assert np.all(rs >= f.mu - 1e-12) and np.all(rs <= f.M + 1e-12)

import numpy as np
import pytest

from discflux import (LimiterConfig, LimiterKind, Mesh, Parity,
                      SchemeConfig, StaggeredState, accumulate_cubic,
                      builtin_burgers_const_k, builtin_multiplicative,
                      cell_average_coefficient, cfl_bound, CflLevel,
                      correction_bound_check, entropy_residual_lf, lf_step,
                      nt_step, nu_coefficient, onesided_check, psi_constant,
                      slopes)
from discflux.diagnostics import DiagnosticsReport


def burgers_state(values, x_min=0.0, x_max=None):
    values = np.asarray(values, dtype=float)
    model, coeff = builtin_burgers_const_k()
    x_max = float(len(values)) if x_max is None else x_max
    mesh = Mesh.from_cells(x_min, x_max, len(values))
    state = StaggeredState(mesh=mesh, values=values,
                           kbar=cell_average_coefficient(mesh, coeff, Parity.BASE),
                           parity=Parity.BASE, time=0.0, step_index=0)
    return model, coeff, state


class TestPsiConstant:
    def test_hand_formula(self):
        model, _ = builtin_burgers_const_k()
        lam, k_sup = 0.01, 1.0
        c = 1.0  # max(|0|, |1|)
        expected = (72 * lam**2 * c**2 * 1.0
                    + 114 * lam * c**2 * 1.0
                    + (708 * c**2 + 48 * lam * 1.0) * lam**2 * 1.0 * 1.0
                    + (48 * lam**2 * c * k_sup + 132 * lam**2 * c**2 * 1.0 * 1.0
                       + 64 * lam * 0.5 * k_sup + 88 * c) * lam * 0.5)
        assert psi_constant(model, lam, k_sup) == pytest.approx(expected, rel=1e-15)


class TestOnesidedCheck:
    def test_monotone_decreasing_convex_is_exact_zero(self):
        model, coeff, state = burgers_state(np.linspace(0.9, 0.1, 12))
        cfg = SchemeConfig(lam=cfl_bound(model, CflLevel.ONE_SIDED),
                           cfl_level=CflLevel.ONE_SIDED)
        new, _ = nt_step(state, model, coeff, cfg)
        lhs, rhs, holds = onesided_check(state, new, model, cfg.lam)
        assert lhs == 0.0 and rhs == 0.0 and holds

    def test_single_positive_jump_rhs(self):
        delta = 0.6
        values = np.concatenate([np.full(6, 0.2), np.full(6, 0.2 + delta)])
        model, coeff, state = burgers_state(values)
        lam = cfl_bound(model, CflLevel.ONE_SIDED)
        cfg = SchemeConfig(lam=lam, cfl_level=CflLevel.ONE_SIDED)
        new, _ = nt_step(state, model, coeff, cfg)
        lhs, rhs, holds = onesided_check(state, new, model, lam)
        # constant coefficient: the bound is exactly the decayed jump sum
        assert rhs == pytest.approx(delta**2 - (lam * 1.0 / 500.0) * delta**3, rel=1e-14)
        assert holds and lhs <= rhs

    def test_coefficient_norms_default_from_state(self):
        model, coeff = builtin_multiplicative(3.0, 1.0)
        mesh = Mesh.from_cells(-1.0, 1.0, 10)
        rng = np.random.default_rng(1)
        state = StaggeredState(mesh=mesh, values=rng.uniform(0, 1, 10),
                               kbar=cell_average_coefficient(mesh, coeff, Parity.BASE),
                               parity=Parity.BASE, time=0.0, step_index=0)
        cfg = SchemeConfig(lam=1 / 30)
        new, _ = nt_step(state, model, coeff, cfg)
        defaulted = onesided_check(state, new, model, cfg.lam)
        explicit = onesided_check(state, new, model, cfg.lam,
                                  k_sup=coeff.sup_norm, k_bv=coeff.bv_norm)
        # piecewise-constant coefficient with an interface jump: identical
        assert defaulted == explicit


class TestNuCoefficient:
    def test_flat_interface_contributes_zero(self):
        model, coeff, state = burgers_state([0.4, 0.4, 0.7, 0.9])
        sig = slopes(state.values, state.mesh.dx, LimiterConfig())
        nu = nu_coefficient(state, sig, model, lam=1e-4)
        du = np.diff(state.values)
        assert (nu * du**2)[0] == 0.0

    def test_zero_slopes_collapse_to_quarter_bracket(self):
        model, coeff, state = burgers_state([0.1, 0.4, 0.2, 0.6])
        nu = nu_coefficient(state, np.zeros(4), model, lam=0.1)
        ut = 0.5 * (state.values[:-1] + state.values[1:])
        beta = 0.1 * ut  # f_u = u for the unit-coefficient convex flux
        assert nu == pytest.approx(0.125 * (1 - 4 * beta**2), rel=1e-14)
        assert np.all(nu >= 0.0)

    def test_nonnegative_under_strict_cfl_random_walk(self):
        model, coeff, _ = burgers_state([0.0, 1.0])
        lam = cfl_bound(model, CflLevel.CUBIC_ESTIMATE)
        cfg = SchemeConfig(lam=lam, cfl_level=CflLevel.CUBIC_ESTIMATE)
        rng = np.random.default_rng(42)
        mesh = Mesh.from_cells(0.0, 1.0, 50)
        state = StaggeredState(mesh=mesh, values=rng.uniform(0, 1, 50),
                               kbar=np.ones(50), parity=Parity.BASE,
                               time=0.0, step_index=0)
        worst = np.inf
        for _ in range(50):
            sig = slopes(state.values, mesh.dx, cfg.limiter)
            worst = min(worst, np.min(nu_coefficient(state, sig, model, lam)))
            state, _ = nt_step(state, model, coeff, cfg)
        assert worst >= -1e-12

    def test_concave_model_sign_adjusted(self):
        model, coeff = builtin_multiplicative(3.0, 1.0)
        mesh = Mesh.from_cells(-1.0, 1.0, 10)
        state = StaggeredState(mesh=mesh, values=np.linspace(0.2, 0.8, 10),
                               kbar=cell_average_coefficient(mesh, coeff, Parity.BASE),
                               parity=Parity.BASE, time=0.0, step_index=0)
        lam = cfl_bound(model, CflLevel.CUBIC_ESTIMATE) / model.sup_fu
        nu = nu_coefficient(state, np.zeros(10), model, lam)
        assert np.all(nu >= 0.0)  # uses |f_uu| for concave fluxes

    def test_alignment_enforced(self):
        model, coeff, state = burgers_state([0.1, 0.2, 0.3])
        with pytest.raises(ValueError):
            nu_coefficient(state, np.zeros(2), model, 0.1)


class TestEntropyResidual:
    def test_constant_state_zero(self):
        model, coeff, state = burgers_state([0.4] * 6)
        new = lf_step(state, model, coeff, lam=0.1)
        res = entropy_residual_lf(state, new, model, 0.1, np.array([0.4]))
        assert res == 0.0

    def test_constant_far_from_data_nonpositive(self):
        model, coeff, state = burgers_state(np.linspace(0.1, 0.9, 8))
        new = lf_step(state, model, coeff, lam=0.1)
        assert entropy_residual_lf(state, new, model, 0.1, np.array([10.0])) <= 1e-12

    def test_both_transition_directions(self):
        model, coeff, state = burgers_state(np.linspace(0.9, 0.1, 8))
        mid = lf_step(state, model, coeff, lam=0.1)
        back = lf_step(mid, model, coeff, lam=0.1)
        grid = np.linspace(0, 1, 11)
        assert entropy_residual_lf(state, mid, model, 0.1, grid) <= 1e-12
        assert entropy_residual_lf(mid, back, model, 0.1, grid) <= 1e-12

    def test_parity_mismatch_rejected(self):
        model, coeff, state = burgers_state([0.4] * 6)
        with pytest.raises(ValueError):
            entropy_residual_lf(state, state, model, 0.1, np.array([0.0]))


class TestAccumulateCubic:
    def test_constant_adds_nothing(self):
        _, _, state = burgers_state([0.5] * 8)
        report = DiagnosticsReport()
        accumulate_cubic(report, state, window_x=None)
        assert report.cubic_accumulator == 0.0

    def test_single_jump(self):
        delta = 0.3
        _, _, state = burgers_state([0.1] * 4 + [0.1 + delta] * 4,
                                    x_min=-4.0, x_max=4.0)
        report = DiagnosticsReport()
        accumulate_cubic(report, state, window_x=None)
        assert report.cubic_accumulator == pytest.approx(state.mesh.dx * delta**3, rel=1e-14)

    def test_window_excludes_outside_jumps(self):
        _, _, state = burgers_state([0.1] * 4 + [0.4] * 4, x_min=-4.0, x_max=4.0)
        report = DiagnosticsReport()
        accumulate_cubic(report, state, window_x=2.0)  # jump at x = 0 is inside
        inside = report.cubic_accumulator
        report2 = DiagnosticsReport()
        accumulate_cubic(report2, state, window_x=0.4)  # ... and still inside
        report3 = DiagnosticsReport()
        shifted = state.with_values(np.array([0.1] * 2 + [0.4] * 6))
        accumulate_cubic(report3, shifted, window_x=0.4)  # jump at x = -2: outside
        assert inside > 0 and report2.cubic_accumulator == inside
        assert report3.cubic_accumulator == 0.0


class TestCorrectionBound:
    def test_zero_slopes_within_bound(self):
        model, coeff, state = burgers_state([0.5] * 8)
        cfg = SchemeConfig(lam=0.1, limiter=LimiterConfig(
            kind=LimiterKind.MINMOD_MODIFIED, k_tilde=1.0, alpha=0.75))
        _, corr = nt_step(state, model, coeff, cfg)
        max_a, bound, holds = correction_bound_check(corr, cfg, model, state.mesh.dx)
        assert max_a == 0.0 and holds

    def test_plain_minmod_not_applicable(self):
        model, coeff, state = burgers_state([0.1, 0.5, 0.9, 0.4])
        cfg = SchemeConfig(lam=0.1)
        _, corr = nt_step(state, model, coeff, cfg)
        assert correction_bound_check(corr, cfg, model, state.mesh.dx) is None

    def test_tiny_cap_reaches_near_equality(self):
        # steep monotone ramp: every slope clamps to k_tilde * dx^alpha and
        # the a = s/8 part saturates the bound up to the lam^2 term
        model, coeff, state = burgers_state(np.linspace(1.0, 0.0, 40),
                                            x_min=0.0, x_max=1.0)
        cfg = SchemeConfig(lam=0.01, limiter=LimiterConfig(
            kind=LimiterKind.MINMOD_MODIFIED, k_tilde=1e-6, alpha=0.75))
        _, corr = nt_step(state, model, coeff, cfg)
        max_a, bound, holds = correction_bound_check(corr, cfg, model, state.mesh.dx)
        assert holds
        assert max_a >= 0.9 * bound


class TestReportJson:
    def test_schema_keys(self):
        report = DiagnosticsReport(scheme="lax-friedrichs", lam=0.05, dx=0.16)
        expected = {"scheme", "lambda", "dx", "steps", "snapped_time", "u_min",
                    "u_max", "onesided_holds", "onesided_worst_margin",
                    "cubic_accumulator", "quad_accumulator", "nu_min",
                    "entropy_max_residual", "correction_max", "correction_bound",
                    "cfl_level", "kappa_used", "kappa_bound"}
        payload = report.to_json_dict()
        assert set(payload) == expected
        assert payload["lambda"] == 0.05
        assert payload["u_min"] is None  # no states observed yet

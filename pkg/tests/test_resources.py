import math

import pytest

from qautocall.errors import NumericalError
from qautocall.resources import (
    QSP_BASELINE_T_DEPTH,
    ResourceParams,
    block_depths,
    d_adder,
    d_amplitude_loading,
    d_arith,
    d_c_comparator,
    d_comparator,
    d_cry,
    d_gaussian,
    d_mcx,
    d_multiplier,
    d_ry,
    d_total,
    solve_truncation,
)


def params(**overrides):
    base = dict(steps=20, assets=3, epsilon=2e-3, accumulator_width=8)
    base.update(overrides)
    return ResourceParams(**base)


class TestBlockDepths:
    def test_frozen_table_values(self):
        assert block_depths(8, 1e-3).toffoli == 3.0
        assert d_comparator(8) == 45.0
        assert d_mcx(2) == 5.0
        assert d_adder(8) == 33.0
        assert d_multiplier(4) == 4 * (d_adder(4) + 6)
        assert d_multiplier(4) == 132.0
        # hand-evaluated: 45 + (14*log3(1.5) + 5) - 3
        assert d_c_comparator(8) == pytest.approx(52.16698, abs=1e-4)

    def test_rotation_depths(self):
        assert d_ry(1 / 8) == 9.0
        assert d_ry(1e-3) == pytest.approx(3 * math.log2(1000), abs=1e-12)
        assert d_cry(1e-3) == pytest.approx(6 * math.log2(2000), abs=1e-12)

    def test_mcx_clamps_small_widths(self):
        assert d_mcx(1) == d_mcx(2) == 5.0

    @pytest.mark.parametrize("fn", [d_mcx, d_comparator, d_c_comparator, d_adder, d_multiplier])
    def test_nondecreasing_in_width(self, fn):
        values = [fn(n) for n in range(2, 65)]
        assert all(b >= a for a, b in zip(values, values[1:]))
        assert all(v > 0 for v in values)

    def test_integer_mode_ceils(self):
        real = block_depths(6, 2e-3)
        integer = block_depths(6, 2e-3, integer=True)
        for name in vars(real):
            assert getattr(integer, name) == math.ceil(getattr(real, name))

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            block_depths(0, 1e-3)
        with pytest.raises(ValueError):
            block_depths(4, 1.5)


class TestTruncationSolver:
    def test_self_consistency_residual(self):
        p = params()
        sol = solve_truncation(p)
        assert abs(sol.residual(p)) <= 1e-12
        assert sol.w > 0
        assert sol.scale > 0

    def test_minimality(self):
        p = params()
        sol = solve_truncation(p)
        w_less = sol.w - 1e-6
        lhs = 2 * p.assets * p.steps * math.exp(-(w_less**2) / 2)
        r_t_min = math.exp(p.mu * p.dt * p.steps - w_less * p.sigma_max * math.sqrt(p.dt) * p.steps)
        scale = p.f_max + (p.strike - r_t_min) * p.notional
        assert lhs > p.epsilon / scale  # the inequality breaks just below w

    def test_larger_error_budget_lowers_truncation(self):
        tight = solve_truncation(params(epsilon=1e-3))
        loose = solve_truncation(params(epsilon=4e-3))
        assert loose.w < tight.w

    def test_seed_formula_is_close(self):
        p = params()
        sol = solve_truncation(p)
        seed = math.sqrt(2 * math.log(2 * p.assets * p.steps * sol.scale / p.epsilon))
        assert sol.w == pytest.approx(seed, abs=1e-9)

    def test_non_convergence_reports(self):
        # enormous drift pushes the rescaling factor negative
        with pytest.raises(NumericalError):
            solve_truncation(params(mu=50.0))


class TestDepthComposition:
    def test_gaussian_single_layer(self):
        p = params(layers=0, gaussian_qubits=2)
        want = 3 * math.log2(2 * 20 * 3 / 2e-3)
        assert d_gaussian(p) == pytest.approx(want, abs=1e-12)

    def test_doubling_assets_adds_constant(self):
        for layers in (0, 2):
            lo = d_gaussian(params(assets=3, layers=layers))
            hi = d_gaussian(params(assets=6, layers=layers))
            assert hi - lo == pytest.approx(3 * (layers + 1), abs=1e-9)

    def test_arith_single_step_no_binaries(self):
        p = params(steps=1, binaries=0, accumulator_width=6)
        want = d_adder(6) + d_comparator(6) + 2 * d_cry(2e-3) + d_mcx(2)
        assert d_arith(p) == pytest.approx(want, abs=1e-12)

    def test_arith_increases_with_steps(self):
        values = [d_arith(params(steps=t)) for t in range(1, 12)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_amplitude_loading_depths(self):
        p = params(accumulator_width=8)
        d_al, d_exp = d_amplitude_loading(p)
        assert d_al == pytest.approx(52.16698, abs=1e-4)
        assert d_exp > d_al  # contains two controlled comparators


class TestTotalDepth:
    def test_identity_reconstructs_exactly(self):
        report = d_total(params())
        n = report.n_iqae
        rebuilt = (1 + 2 * n) * (
            max(report.d_gaussian + report.d_arith, report.d_exp)
            + report.d_amplitude_loading
        )
        assert report.d_total == rebuilt

    def test_toy_epsilon_half(self):
        report = d_total(params(epsilon=0.5))
        assert report.n_iqae == 2
        assert report.d_total == 5 * (
            max(report.d_gaussian + report.d_arith, report.d_exp)
            + report.d_amplitude_loading
        )

    def test_n_iqae_is_ceiling(self):
        assert d_total(params(epsilon=2e-3)).n_iqae == 500
        assert d_total(params(epsilon=3e-3)).n_iqae == 334

    def test_headline_band_and_ratio(self):
        for m in range(4, 33):
            report = d_total(params(accumulator_width=m))
            assert 20.0 <= report.d_amplitude_loading <= 80.0
            assert report.qsp_ratio >= 25.0
        assert QSP_BASELINE_T_DEPTH == 2.1e3


class TestParamsValidation:
    def test_ranges(self):
        with pytest.raises(ValueError):
            params(epsilon=0.0)
        with pytest.raises(ValueError):
            params(steps=0)
        with pytest.raises(ValueError):
            params(epsilon_truncation=5e-3)  # above the total budget

    def test_budget_defaults_to_epsilon(self):
        p = params(epsilon_approximation=1e-3)
        assert p.budget("approximation") == 1e-3
        assert p.budget("arithmetic") == 2e-3

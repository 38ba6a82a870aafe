import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discflux import LimiterConfig, LimiterKind, minmod, slopes

MODIFIED = LimiterConfig(kind=LimiterKind.MINMOD_MODIFIED, k_tilde=1.0, alpha=0.75)
PLAIN = LimiterConfig()

finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)
sequences = st.lists(finite, min_size=3, max_size=30)


class TestMinmod:
    @pytest.mark.parametrize("args,expected", [
        ((2.0, 1.5, 1.0), 1.0),
        ((1.0, -1.0, 2.0), 0.0),
        ((-3.0, -1.0, -2.0), -1.0),
        ((0.0, 1.0), 0.0),
        ((5.0,), 5.0),
    ])
    def test_examples(self, args, expected):
        assert minmod(args) == expected

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            minmod([])

    @given(st.lists(finite, min_size=1, max_size=8))
    def test_result_bounded_by_every_argument(self, args):
        result = minmod(args)
        assert all(abs(result) <= abs(a) + 1e-15 for a in args)
        if result != 0.0:
            assert all(np.sign(a) == np.sign(result) for a in args)


class TestSlopes:
    def test_linear_data(self):
        sig = slopes(np.array([0.0, 1.0, 2.0]), 0.1, PLAIN)
        assert sig.tolist() == [0.0, 1.0, 0.0]

    def test_local_extremum(self):
        sig = slopes(np.array([0.0, 1.0, 0.0]), 0.1, PLAIN)
        assert sig[1] == 0.0

    def test_modified_cap_dominates(self):
        sig = slopes(np.array([0.0, 1.0, 2.0]), 1e-4, MODIFIED)
        assert sig[1] == pytest.approx(1e-3, rel=1e-12)  # (1e-4)**0.75

    def test_zero_kind(self):
        cfg = LimiterConfig(kind=LimiterKind.ZERO)
        assert np.all(slopes(np.array([0.0, 1.0, 0.5, 2.0]), 0.1, cfg) == 0.0)

    def test_short_input_rejected(self):
        with pytest.raises(ValueError):
            slopes(np.array([0.0, 1.0]), 0.1, PLAIN)

    @given(sequences)
    @settings(max_examples=200)
    def test_slope_to_jump_ratio_in_unit_interval(self, values):
        u = np.asarray(values)
        sig = slopes(u, 0.1, PLAIN)
        fwd = u[1:] - u[:-1]
        for j in range(1, len(u) - 1):
            for jump in (fwd[j], fwd[j - 1]):
                if jump != 0.0:
                    assert 0.0 <= sig[j] / jump <= 1.0 + 1e-12
                else:
                    assert sig[j] == 0.0

    @given(sequences)
    def test_zero_at_local_extrema(self, values):
        u = np.asarray(values)
        sig = slopes(u, 0.1, PLAIN)
        for j in range(1, len(u) - 1):
            if (u[j] - u[j - 1]) * (u[j + 1] - u[j]) < 0:
                assert sig[j] == 0.0

    @given(sequences, st.floats(min_value=1e-4, max_value=1.0))
    def test_modified_magnitude_cap(self, values, dx):
        sig = slopes(np.asarray(values), dx, MODIFIED)
        assert np.all(np.abs(sig) <= MODIFIED.k_tilde * dx**MODIFIED.alpha + 1e-12)

    @given(sequences, finite)
    def test_translation_invariance(self, values, shift):
        # exact in exact arithmetic; the shift perturbs differences by rounding
        u = np.asarray(values)
        shifted = slopes(u + shift, 0.1, PLAIN)
        assert np.allclose(shifted, slopes(u, 0.1, PLAIN), rtol=0, atol=1e-12)


class TestLimiterConfig:
    def test_alpha_range_enforced_for_modified(self):
        with pytest.raises(ValueError):
            LimiterConfig(kind=LimiterKind.MINMOD_MODIFIED, alpha=0.5)
        with pytest.raises(ValueError):
            LimiterConfig(kind=LimiterKind.MINMOD_MODIFIED, alpha=1.0)

    def test_plain_minmod_allows_any_alpha(self):
        LimiterConfig(kind=LimiterKind.MINMOD, alpha=0.5)

    def test_k_tilde_positive(self):
        with pytest.raises(ValueError):
            LimiterConfig(k_tilde=0.0)

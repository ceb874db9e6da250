"""Coherent-state layer: coefficients, overlaps, wavefunctions, phase-space
maps, resolutions of unity, expectations, displacement, projection.

Reference values are either hand computations (small binomials, geometric
sums), high-order partial sums evaluated in the test itself, or quadrature
cross-checks with a scheme independent of the implementation under test.
"""

import cmath
import math
import warnings

import numpy as np
import pytest

from morsecs.coherent import (
    CoherentLabel,
    CoherentState,
    PhaseSpaceLabel,
    coefficient_tail_bound,
    coefficients,
    displacement_matrix,
    expectation_P,
    expectation_X,
    from_phase_space,
    gen_factorial,
    overlap,
    phase_factor,
    phase_space_measure_check,
    phase_space_tail_estimate,
    project_onto_basis,
    resolution_of_unity,
    to_phase_space,
    wavefunction_closed,
    wavefunction_series,
)
from morsecs.errors import ConsistencyError, DomainError, TruncationWarning
from morsecs.morse_core import ground_x_expectation, pseudo_wavefunction
from morsecs.numerics import digamma, gauss_laguerre_rule


class TestLabels:
    def test_disk_boundary_rejected(self):
        with pytest.raises(DomainError):
            CoherentLabel(1.0)
        with pytest.raises(DomainError):
            CoherentLabel(0.8 + 0.7j)
        with pytest.raises(DomainError):
            CoherentLabel(complex("inf"))

    def test_interior_accepted(self):
        assert CoherentLabel(0.999).beta == 0.999 + 0j

    def test_phase_space_label_finite(self):
        with pytest.raises(DomainError):
            PhaseSpaceLabel(math.nan, 0.0)
        lab = PhaseSpaceLabel(-2, 3)
        assert lab.x_tilde == -2.0 and lab.p_tilde == 3.0

    def test_state_coeffs_read_only(self):
        st = coefficients(0.2, 1.0, 5)
        with pytest.raises(ValueError):
            st.coeffs[0] = 0.0


class TestGenFactorial:
    def test_small_values(self):
        # Hand: {0}! = 1, {1}! = 1/(2s), {2}! = 2/(2s(2s+1)) = 1/3 at s = 1.
        assert gen_factorial(0, 2.7) == 1.0
        assert abs(gen_factorial(1, 1.0) - 0.5) < 1e-15
        assert abs(gen_factorial(2, 1.0) - 1.0 / 3.0) < 1e-15

    def test_decreasing_when_s_above_half(self):
        vals = [gen_factorial(n, 1.6) for n in range(10)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_negative_n_rejected(self):
        with pytest.raises(DomainError):
            gen_factorial(-1, 1.0)


class TestCoefficients:
    def test_origin_is_ground_state(self):
        c = coefficients(0.0, 1.75, 6).coeffs
        assert c[0] == 1.0 + 0j
        assert np.all(c[1:] == 0.0)

    def test_hand_value_s_one(self):
        # s = 1: C(n+1, n) = n+1, so c_2 = 0.75 * sqrt(3) * 0.25.
        c = coefficients(0.5, 1.0, 4).coeffs
        assert abs(c[2] - 0.1875 * math.sqrt(3.0)) < 1e-15

    def test_normalization_within_tail_bound(self):
        for s, beta, n in [(1.75, 0.4 + 0.2j, 400), (0.75, -0.6, 400),
                           (3.6, 0.55j, 300)]:
            st = coefficients(beta, s, n)
            bound = coefficient_tail_bound(beta, s, n)
            assert abs(st.norm_sq() - 1.0) <= bound + 5e-14

    def test_tail_bound_brackets_true_tail(self):
        s, beta = 1.25, 0.62
        full = coefficients(beta, s, 3000).coeffs
        total = float(np.add.reduce(np.abs(full) ** 2))
        for n in (10, 30, 80):
            part = float(np.add.reduce(np.abs(full[:n]) ** 2))
            true_tail = total - part
            assert true_tail <= coefficient_tail_bound(beta, s, n) + 1e-15

    def test_tail_bound_edge_cases(self):
        assert coefficient_tail_bound(0.0, 1.0, 5) == 0.0
        # q r^2 >= 1: ratio still above 1 at this truncation depth.
        assert math.isinf(coefficient_tail_bound(0.9999, 5.0, 1))

    def test_bad_sizes(self):
        with pytest.raises(DomainError):
            coefficients(0.1, 1.0, 0)


class TestOverlap:
    def test_self_overlap_is_one(self):
        for beta in (0.0, 0.3 - 0.5j, 0.85):
            assert abs(overlap(beta, beta, 1.25) - 1.0) < 1e-14

    def test_ground_overlap(self):
        s, beta = 2.2, 0.4 + 0.35j
        expected = (1.0 - abs(beta) ** 2) ** s
        assert abs(overlap(0.0, beta, s) - expected) < 1e-14

    def test_conjugate_symmetry(self):
        s = 1.4
        for b1, b2 in [(0.3, 0.5j), (0.2 + 0.6j, -0.4 + 0.1j)]:
            assert abs(overlap(b1, b2, s)
                       - overlap(b2, b1, s).conjugate()) < 1e-14

    def test_series_oracle(self):
        # <b1|b2> = sum conj(c_n(b1)) c_n(b2); 2000 terms saturate the
        # geometric decay far below the tolerance.
        s, b1, b2 = 1.25, 0.3, 0.5j
        c1 = coefficients(b1, s, 2000).coeffs
        c2 = coefficients(b2, s, 2000).coeffs
        series = complex(np.add.reduce(c1.conj() * c2))
        assert abs(series - overlap(b1, b2, s)) < 1e-12

    def test_cauchy_schwarz(self):
        assert abs(overlap(0.7, -0.6j, 3.6)) < 1.0


class TestWavefunction:
    def test_origin_reduces_to_ground_state(self):
        y = np.linspace(0.05, 40.0, 97)
        for s in (0.75, 1.75):
            closed = wavefunction_closed(0.0, s, y)
            assert np.abs(closed.imag).max() == 0.0
            assert np.abs(closed.real - pseudo_wavefunction(0, s, y)).max() < 1e-15

    def test_series_matches_closed(self):
        y = np.linspace(0.05, 60.0, 301)
        for s in (0.75, 1.75, 3.6):
            for beta in (0.5, -0.6, 0.3 + 0.4j, 0.6j):
                diff = np.abs(wavefunction_series(beta, s, y, 400)
                              - wavefunction_closed(beta, s, y)).max()
                assert diff < 1e-9, (s, beta, diff)

    def test_scalar_input(self):
        val = wavefunction_closed(0.2j, 1.0, 3.0)
        assert isinstance(val, complex)
        arr = wavefunction_closed(0.2j, 1.0, np.array([3.0]))
        assert abs(val - arr[0]) == 0.0

    def test_closed_form_is_normalized(self):
        # integral |phi|^2 dy/y under the native rule; the ratio against
        # the rule weight stays finite for this label.
        s, beta = 1.25, -0.35
        rule = gauss_laguerre_rule(200, 2.0 * s - 1.0)
        live = rule.weights > 0.0
        y = rule.nodes[live]
        phi = wavefunction_closed(beta, s, y)
        # assemble the envelope ratio in the exponent; the bare
        # exp(y - 2s ln y) overflows at the top nodes before the tiny
        # |phi|^2 can cancel it
        vals = np.exp(2.0 * np.log(np.abs(phi)) + y - 2.0 * s * np.log(y))
        total = float(np.add.reduce(vals * rule.weights[live]))
        assert abs(total - 1.0) < 1e-12

    def test_domain_checks(self):
        with pytest.raises(DomainError):
            wavefunction_closed(0.2, 1.0, -1.0)
        with pytest.raises(DomainError):
            wavefunction_series(0.2, 1.0, np.array([1.0, 0.0]), 50)


class TestPhaseSpaceMaps:
    def test_forward_values(self):
        ps = to_phase_space(0.5, 1.0)
        assert abs(ps.x_tilde - math.log(3.0)) < 1e-15
        assert ps.p_tilde == 0.0
        ps = to_phase_space(0.5j, 1.0)
        # w = (1+i/2)/(1-i/2) = (3 + 4i)/5.
        assert abs(ps.x_tilde - math.log(0.6)) < 1e-15
        assert abs(ps.p_tilde - 4.0 / 3.0) < 1e-15

    def test_origin_fixed_point(self):
        ps = to_phase_space(0.0, 2.3)
        assert ps.x_tilde == 0.0 and ps.p_tilde == 0.0
        assert from_phase_space(ps, 2.3).beta == 0.0 + 0j

    def test_round_trip(self):
        s = 1.6
        for beta in (0.95, -0.95, 0.67j, 0.5 - 0.7j, 1e-8 + 0j):
            lab = from_phase_space(to_phase_space(beta, s), s)
            assert abs(lab.beta - beta) < 1e-14
        for xt, pt in ((0.0, 0.0), (2.5, -30.0), (-3.0, 7.0)):
            ps = to_phase_space(from_phase_space(PhaseSpaceLabel(xt, pt), s), s)
            assert abs(ps.x_tilde - xt) < 1e-12
            assert abs(ps.p_tilde - pt) < 1e-12 * max(1.0, abs(pt))

    def test_tuple_accepted(self):
        assert from_phase_space((0.0, 0.0), 1.0).beta == 0.0 + 0j


class TestPhaseFactor:
    def test_real_labels_have_no_phase(self):
        for beta in (0.0, 0.5, -0.8):
            assert phase_factor(beta, 1.75) == 1.0 + 0j

    def test_unit_modulus(self):
        for beta in (0.3 + 0.4j, -0.2 + 0.65j):
            assert abs(abs(phase_factor(beta, 2.4)) - 1.0) < 1e-15

    def test_hand_value(self):
        # s = 1, beta = i/2: ((1 + i/2)/|1 + i/2|)^2 = (0.6 + 0.8i).
        assert abs(phase_factor(0.5j, 1.0) - (0.6 + 0.8j)) < 1e-15


class TestExpectations:
    def test_ground_state_values(self):
        for s in (0.75, 1.75):
            assert abs(expectation_X(0.0, s)
                       - (math.log(2.0) - digamma(2.0 * s))) < 1e-14
            assert expectation_P(0.0, s) == 0.0

    def test_real_label_shifts_X_only(self):
        val = expectation_X(0.5, 1.0)
        assert abs(val - (math.log(3.0) + ground_x_expectation(1.0))) < 1e-12
        assert expectation_P(0.5, 1.0) == 0.0

    def test_imaginary_label_momentum(self):
        assert abs(expectation_P(0.5j, 1.0) - 4.0 / 3.0) < 1e-12
        assert abs(expectation_X(0.5j, 1.0)
                   - (math.log(0.6) + ground_x_expectation(1.0))) < 1e-12

    def test_quadrature_guard_fires_on_drift(self, monkeypatch):
        import morsecs.coherent as mod
        monkeypatch.setattr(mod, "ground_x_expectation", lambda s: 1e3)
        with pytest.raises(ConsistencyError):
            expectation_X(0.3, 1.0)


class TestResolutionOfUnity:
    def test_disk_integral_is_pi_identity(self):
        m = 12
        out = resolution_of_unity(1.75, m, n_radial=200, n_angular=64)
        assert np.abs(out - math.pi * np.eye(m)).max() < 1e-10

    def test_small_s_above_threshold(self):
        m = 6
        out = resolution_of_unity(0.75, m, n_radial=200, n_angular=32)
        assert np.abs(out - math.pi * np.eye(m)).max() < 1e-10

    def test_measure_divergence_rejected(self):
        with pytest.raises(DomainError):
            resolution_of_unity(0.5, 4)

    def test_angular_undersampling_rejected(self):
        with pytest.raises(DomainError):
            resolution_of_unity(1.75, 8, n_angular=10)


class TestPhaseSpaceMeasure:
    def test_sheared_box_reaches_tolerance(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            out = phase_space_measure_check(1.75, 8, box=(8.0, 80.0))
        assert np.abs(out - math.pi * np.eye(8)).max() < 1e-3

    def test_matches_disk_form(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            ps = phase_space_measure_check(1.75, 6, box=(10.0, 200.0))
        disk = resolution_of_unity(1.75, 6, n_radial=200, n_angular=64)
        assert np.abs(ps - disk).max() < 1e-4

    def test_small_box_warns(self):
        with pytest.warns(TruncationWarning):
            phase_space_measure_check(1.75, 4, box=(2.0, 5.0),
                                      n_x=100, n_p=100)

    def test_tail_estimate_shrinks_with_box(self):
        est = [phase_space_tail_estimate(1.75, 8, box)
               for box in ((4.0, 20.0), (8.0, 80.0), (12.0, 400.0))]
        assert est[0] > est[1] > est[2] > 0.0

    def test_measure_divergence_rejected(self):
        with pytest.raises(DomainError):
            phase_space_measure_check(0.5, 4)


class TestDisplacement:
    def test_identity_at_origin(self):
        d = displacement_matrix(PhaseSpaceLabel(0.0, 0.0), 1.75, 8)
        assert np.abs(d - np.eye(8)).max() == 0.0

    def test_unitarity(self):
        n = 200
        for ordering in ("xp", "px"):
            d = displacement_matrix(PhaseSpaceLabel(0.5, 1.0), 1.75, n,
                                    ordering=ordering)
            assert np.abs(d.conj().T @ d - np.eye(n)).max() < 1e-10

    def test_generates_coherent_state_with_phase(self):
        s, n = 1.75, 300
        ps = PhaseSpaceLabel(0.5, 1.0)
        d = displacement_matrix(ps, s, n)
        want = coefficients(from_phase_space(ps, s), s, n).coeffs
        assert np.abs(d[:, 0] - want).max() < 1e-12

    def test_orderings_agree_away_from_truncation_edge(self):
        # The corner rows commit different truncation errors; matrix
        # elements on the protected top-left block are ordering-free.
        s, n = 1.75, 300
        ps = PhaseSpaceLabel(0.5, 1.0)
        d1 = displacement_matrix(ps, s, n, ordering="xp")
        d2 = displacement_matrix(ps, s, n, ordering="px")
        k = n // 2
        assert np.abs((d1 - d2)[:k, :k]).max() < 1e-10

    def test_validation(self):
        with pytest.raises(DomainError):
            displacement_matrix(PhaseSpaceLabel(0.0, 0.0), 1.0, 8,
                                ordering="northwest")
        with pytest.raises(DomainError):
            displacement_matrix(PhaseSpaceLabel(0.0, 0.0), 1.0, 1)


class TestProjection:
    def test_basis_functions_project_to_unit_vectors(self):
        s = 1.75
        rule = gauss_laguerre_rule(200, 2.0 * s - 1.0)
        got = project_onto_basis(lambda y: pseudo_wavefunction(3, s, y),
                                 s, 8, rule)
        want = np.zeros(8)
        want[3] = 1.0
        assert np.abs(got - want).max() < 1e-12

    def test_coherent_wavefunction_recovers_coefficients(self):
        s, beta = 1.75, 0.4
        rule = gauss_laguerre_rule(200, 2.0 * s - 1.0)
        got = project_onto_basis(lambda y: wavefunction_closed(beta, s, y),
                                 s, 12, rule)
        assert np.abs(got - coefficients(beta, s, 12).coeffs).max() < 1e-10

    def test_linearity(self):
        s = 1.0
        rule = gauss_laguerre_rule(150, 2.0 * s - 1.0)

        def f(y):
            return (2.0 * pseudo_wavefunction(1, s, y)
                    + 3.0j * pseudo_wavefunction(4, s, y))

        got = project_onto_basis(f, s, 6, rule)
        want = np.zeros(6, dtype=complex)
        want[1] = 2.0
        want[4] = 3.0j
        assert np.abs(got - want).max() < 1e-12

    def test_default_rule(self):
        got = project_onto_basis(lambda y: pseudo_wavefunction(2, 1.0, y),
                                 1.0, 4)
        assert abs(got[2] - 1.0) < 1e-12


class TestStrongContinuity:
    def test_norm_difference_scales_linearly(self):
        s, beta = 1.75, 0.9 + 0j

        def dist(delta):
            other = beta - delta * (1.0 + 1.0j) / math.sqrt(2.0)
            ovl = overlap(beta, other, s)
            return math.sqrt(max(0.0, 2.0 - 2.0 * ovl.real))

        d1 = dist(1e-6)
        d2 = dist(5e-7)
        assert d1 < 1e-2
        assert 1.9 < d1 / d2 < 2.1

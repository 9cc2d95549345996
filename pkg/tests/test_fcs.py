import dataclasses
import math

import numpy as np
import pytest
import scipy.linalg

from amqhe import fcs, model
from amqhe.fcs import (CumulantSet, OpenLoopError, cumulants, dynamic_cgf,
                       geometric_cgf)
from amqhe.model import DrivingSpec, EngineParams


@pytest.fixture
def base():
    return EngineParams(), DrivingSpec()


class TestDynamicCgf:
    def test_conserving_variant_vanishes_at_lambda_zero(self, base):
        params, spec = base
        res = dynamic_cgf(params, spec, 0.0)
        assert abs(res.sd) < 1e-10

    def test_undriven_limit_is_static_eigenvalue(self, base):
        params, spec = base
        sp = dataclasses.replace(spec, a0=0.0)
        res = dynamic_cgf(params, sp, 0.05)
        m = model.assemble_liouvillian(params, sp, 0.05, 0.0).matrix
        zeta_static = float(np.max(scipy.linalg.eigvals(m).real))
        assert res.sd == pytest.approx(zeta_static, rel=1e-12)

    def test_quadrature_metadata(self, base):
        params, spec = base
        res = dynamic_cgf(params, spec, 0.05)
        assert res.n_nodes >= 33
        assert res.err_sd < 1e-9 * abs(res.sd) + 1e-12
        assert res.sg is None


class TestGeometricCgf:
    def test_vanishes_without_phase_difference(self, base):
        params, spec = base
        sp = dataclasses.replace(spec, phi=0.0)
        res = geometric_cgf(params, sp, 0.05)
        assert abs(res.sg) < 1e-10

    def test_exactly_zero_without_driving(self, base):
        params, spec = base
        sp = dataclasses.replace(spec, a0=0.0)
        res = geometric_cgf(params, sp, 0.05)
        assert res.sg == 0.0

    def test_gauge_rescaling_invariance(self, base):
        params, spec = base
        ref = geometric_cgf(params, spec, 0.05).sg
        for seed in range(5):
            jittered = geometric_cgf(params, spec, 0.05,
                                     gauge_jitter=np.random.default_rng(seed)).sg
            assert jittered == pytest.approx(ref, rel=1e-9)

    def test_open_loop_is_rejected(self, base):
        # envelope peak at the window edge: T(0) != T(t_p) for a short envelope
        params, spec = base
        sp = dataclasses.replace(spec, center=0.0)
        with pytest.raises(OpenLoopError):
            geometric_cgf(params, sp, 0.05)

    def test_constant_envelope_closes_for_any_center(self, base):
        params, spec = base
        sp = dataclasses.replace(spec, envelope="constant", center=0.0)
        res = geometric_cgf(params, sp, 0.05)
        assert res.loop_overlap > 1 - 1e-10

    def test_integrand_consistency_check_passes(self, base):
        params, spec = base
        assert fcs.check_integrand_consistency(params, spec, 0.05,
                                               rng=np.random.default_rng(3))


class TestCumulants:
    def test_geometric_part_vanishes_at_zero_phase(self, base):
        params, spec = base
        sp = dataclasses.replace(spec, phi=0.0)
        c = cumulants(params, sp)
        assert abs(c.jg) <= 1e-8
        assert abs(c.ng) <= 1e-8

    def test_totals_are_sums(self, base):
        params, spec = base
        c = cumulants(params, spec)
        assert c.j == c.jd + c.jg
        assert c.n == c.nd + c.ng

    def test_stencil_matches_cubic_fit(self, base):
        # independent extraction: cubic polynomial fit over 7 lambda nodes
        params, spec = base
        st = cumulants(params, spec, scheme="stencil")
        fit = cumulants(params, spec, scheme="cubic_fit")
        assert fit.jd == pytest.approx(st.jd, rel=1e-5)
        assert fit.nd == pytest.approx(st.nd, rel=1e-5)

    def test_halving_validation_recorded(self, base):
        params, spec = base
        c = cumulants(params, spec)
        assert set(c.validation) == {"jd", "jg", "nd", "ng"}
        assert c.validation["jd"] <= 1e-5 * abs(c.jd) + 1e-12

    def test_first_order_skips_noise_validation(self, base):
        params, spec = base
        c = cumulants(params, spec, order=1)
        assert np.isfinite(c.jd) and np.isfinite(c.jg)

    def test_bad_arguments(self, base):
        params, spec = base
        with pytest.raises(ValueError):
            cumulants(params, spec, order=3)
        with pytest.raises(ValueError):
            cumulants(params, spec, scheme="spline")

    def test_flux_positive_in_engine_regime(self, base):
        params, spec = base
        c = cumulants(params, spec)
        assert c.jd > 0 and c.nd > 0


class TestCgfRange:
    def test_total_cgf_finite_on_lambda_window(self, base):
        params, spec = base
        for lam in (-0.5, -0.25, 0.25, 0.5):
            res = fcs._cgf_pair(params, spec, lam, geometric=True)
            assert np.isfinite(res.sd) and np.isfinite(res.sg)
        zero = fcs._cgf_pair(params, spec, 0.0, geometric=True)
        assert abs(zero.sd + zero.sg) < 1e-10

    def test_resolution_precondition(self, base):
        params, spec = base
        with pytest.raises(ValueError, match=">= 33"):
            fcs.dynamic_cgf(params, spec, 0.05, n_start=9)


class TestSaturationPhysics:
    """Wide envelopes reproduce plain sinusoidal driving."""

    def test_gaussian_25tp_matches_constant_envelope(self, base):
        params, spec = base
        wide = dataclasses.replace(spec, te=25 * spec.t_p)
        sine = dataclasses.replace(spec, envelope="constant")
        cw = cumulants(params, wide)
        cs = cumulants(params, sine)
        for name in ("jd", "jg", "nd", "ng"):
            assert getattr(cw, name) == pytest.approx(getattr(cs, name), rel=0.01)

    def test_lorentzian_envelope_supported(self, base):
        params, spec = base
        lor = dataclasses.replace(spec, envelope="lorentzian")
        c = cumulants(params, lor, order=1)
        assert np.isfinite(c.jd) and np.isfinite(c.jg)

import math

import numpy as np
import pytest

from conewave.fields import (
    DiscreteField,
    ManufacturedField,
    PotentialSpec,
    box_operator,
    constant_field,
    gaussian_pulse,
    gradient_norm_sq,
    nonlinear_residual,
    ode_field,
    polynomial_gaussian,
    read_snapshot,
    signed_power,
    traveling_bump,
    write_snapshot,
    zero_field,
)
from conewave.exact_solutions import OdeSolution


def linear_field(n=1):
    return ManufacturedField(
        n,
        lambda t, r: t + r,
        lambda t, r: np.ones(np.broadcast(t, r).shape),
        lambda t, r: np.ones(np.broadcast(t, r).shape),
        lambda t, r: (n - 1) / r * np.ones(np.broadcast(t, r).shape),
        label="t+r",
    )


class TestPotential:
    def test_constant(self):
        V = PotentialSpec.constant(2.0)
        assert V.value(0.3, 1.2) == 2.0
        assert V.gradient(0.3, 1.2) == (0.0, 0.0)
        assert V.bound == 2.0

    def test_perturbed_unit_gradient_profile(self):
        V = PotentialSpec(kind="perturbed", c0=1.0, eps=0.3,
                          center=(0.0, 1.0), width=0.5)
        tt = np.linspace(-2, 2, 101)
        rr = np.linspace(0, 3, 101)
        T, R = np.meshgrid(tt, rr)
        Vt, Vr = V.gradient(T, R)
        assert np.max(np.hypot(Vt, Vr)) <= abs(V.eps) + 1e-12
        assert np.all(V.value(T, R) >= 1.0 / V.bound - 1e-12)

    def test_slab_smallness_enforced(self):
        with pytest.raises(ValueError):
            PotentialSpec.perturbed(1.0, 0.5, (0.0, 1.0), 0.5, alpha=0.1,
                                    t_star=1.0)
        V = PotentialSpec.perturbed(1.0, 0.05, (0.0, 1.0), 0.5, alpha=0.1,
                                    t_star=1.0)
        assert V.max_gradient_times(1.0) <= 0.1

    def test_positivity_guard(self):
        with pytest.raises(ValueError):
            PotentialSpec(kind="perturbed", c0=0.5, eps=1.0,
                          center=(0.0, 0.0), width=1.0)


class TestGradientNormSq:
    def test_constant_is_zero(self):
        assert gradient_norm_sq(constant_field(3.0, 3), 0.5, 1.0) == 0.0

    def test_ode_field_p2(self):
        # d_t phi* = 12 (-t)^{-3} at t = -1 gives 144
        assert gradient_norm_sq(ode_field(2.0, 3), -1.0, 0.7) == pytest.approx(144.0)

    def test_linear_field(self):
        assert gradient_norm_sq(linear_field(), 0.2, 1.5) == pytest.approx(2.0)


class TestBoxOperator:
    def test_t_squared(self):
        f = ManufacturedField(
            3,
            lambda t, r: t * t + 0.0 * r,
            lambda t, r: 2.0 * t + 0.0 * r,
            lambda t, r: np.zeros(np.broadcast(t, r).shape),
            lambda t, r: -2.0 + 0.0 * (t + r),
        )
        assert box_operator(f, 0.3, 1.0) == pytest.approx(-2.0)

    def test_r_squared_discrete(self):
        # box r^2 = 2n for the radial Laplacian; exercised through the
        # discrete stencil including the regularized axis
        n = 3
        r = np.linspace(0.0, 2.0, 129)
        times = np.array([0.0, 0.01, 0.02])
        phi = np.vstack([r * r] * 3)
        phit = np.zeros_like(phi)
        fld = DiscreteField(times, r, phi, phit, n)
        assert box_operator(fld, 0.01, r[4]) == pytest.approx(6.0, rel=1e-9)
        assert box_operator(fld, 0.01, 0.0) == pytest.approx(6.0, rel=1e-9)

    def test_ode_solution_closed_form(self):
        # box phi* = -|phi*| phi* for p = 2: at t = -1 that is -36
        f = ode_field(2.0, 3)
        assert box_operator(f, -1.0, 0.3) == pytest.approx(-36.0)

    def test_discrete_errors(self):
        r = np.linspace(0.0, 1.0, 65)
        times = np.array([0.0, 0.01, 0.02])
        fld = DiscreteField(times, r, np.zeros((3, 65)), np.zeros((3, 65)), 3)
        with pytest.raises(IndexError):
            box_operator(fld, 0.0, r[3])   # first level: no centered stencil
        with pytest.raises(IndexError):
            box_operator(fld, 0.01, r[-1])  # outer boundary


class TestNonlinearResidual:
    def test_zero_field(self):
        V = PotentialSpec.constant(1.0)
        assert nonlinear_residual(zero_field(3), V, 2.0, 0.5, 1.0) == 0.0

    def test_constant_field(self):
        V = PotentialSpec.constant(1.0)
        c = 1.7
        val = nonlinear_residual(constant_field(c, 3), V, 2.0, 0.5, 1.0)
        assert val == pytest.approx(c ** 2)

    def test_ode_solution_exact_zero(self):
        V = PotentialSpec.constant(1.0)
        for p in (1.5, 2.0, 3.0):
            val = nonlinear_residual(ode_field(p, 3), V, p, -0.7, 0.2)
            assert val == pytest.approx(0.0, abs=1e-10)

    @pytest.mark.parametrize("p,n", [(1.5, 3), (2.0, 3), (3.0, 2)])
    def test_discrete_residual_second_order(self, p, n):
        # sample phi* on grids and check the stencil residual vanishes at
        # second order in the spacing
        sol = OdeSolution(p)
        V = PotentialSpec.constant(1.0)
        errs = []
        hs = (2e-3, 1e-3, 5e-4)
        for h in hs:
            times = np.array([-1.0 - h, -1.0, -1.0 + h])
            r = np.arange(9) * h
            phi = np.vstack([np.full_like(r, sol.value(t)) for t in times])
            phit = np.vstack([np.full_like(r, sol.dvalue(t)) for t in times])
            fld = DiscreteField(times, r, phi, phit, n)
            errs.append(abs(nonlinear_residual(fld, V, p, -1.0, r[2])))
        slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
        assert slope == pytest.approx(2.0, abs=0.3)


class TestManufacturedDerivatives:
    @pytest.mark.parametrize("field", [
        gaussian_pulse(3, 1.2, 0.3, 0.7, 0.5),
        polynomial_gaussian(3, 0.8, -0.2, 0.6, 0.7, c1=0.4, c2=-0.3),
        traveling_bump(3, 1.0, 0.4, 1.5, 0.3),
        ode_field(2.0, 3),
    ], ids=["gauss", "polygauss", "travel", "ode"])
    def test_derivatives_match_finite_differences(self, field):
        t0, r0 = (-0.5, 0.8) if field.label.startswith("ode") else (0.25, 0.9)
        hs = np.array([1e-2, 1e-3, 1e-4])
        for supplied, axis in ((field.value_t, "t"), (field.value_r, "r")):
            errs = []
            for h in hs:
                if axis == "t":
                    fd = (field.value(t0 + h, r0) - field.value(t0 - h, r0)) / (2 * h)
                else:
                    fd = (field.value(t0, r0 + h) - field.value(t0, r0 - h)) / (2 * h)
                errs.append(abs(fd - supplied(t0, r0)) + 1e-300)
            if max(errs) < 1e-13:
                continue  # exactly-linear direction: nothing to fit
            slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
            assert slope == pytest.approx(2.0, abs=0.3)

    @pytest.mark.parametrize("field", [
        gaussian_pulse(3, 1.2, 0.3, 0.7, 0.5),
        polynomial_gaussian(2, 0.8, -0.2, 0.6, 0.7, c1=0.4, c2=-0.3),
        traveling_bump(3, 1.0, 0.4, 1.5, 0.3),
    ], ids=["gauss", "polygauss", "travel"])
    def test_box_matches_stencil(self, field):
        t0, r0 = 0.25, 0.9
        h = 1e-4
        n = field.dim
        phitt = (field.value(t0 + h, r0) - 2 * field.value(t0, r0)
                 + field.value(t0 - h, r0)) / h ** 2
        phirr = (field.value(t0, r0 + h) - 2 * field.value(t0, r0)
                 + field.value(t0, r0 - h)) / h ** 2
        phir = (field.value(t0, r0 + h) - field.value(t0, r0 - h)) / (2 * h)
        stencil = -phitt + phirr + (n - 1) / r0 * phir
        assert field.box_at(t0, r0) == pytest.approx(stencil, rel=1e-5, abs=1e-6)

    def test_gaussian_box_regular_at_axis(self):
        field = gaussian_pulse(3, 1.0, 0.0, 1.0, 0.5)
        val = field.box_at(0.0, 0.0)
        # -d_tt + n d_rr at the axis for the even gaussian
        expected = (1.0 / 1.0 ** 2) - 3 * (1.0 / 0.5 ** 2)
        assert val == pytest.approx(expected * field.value(0.0, 0.0))


class TestSignedPower:
    def test_odd_extension(self):
        assert signed_power(-2.0, 1.5) == pytest.approx(-(2.0 ** 1.5))
        assert signed_power(0.0, 1.5) == 0.0

    def test_matches_plain_power_for_positive(self):
        assert signed_power(1.7, 2.0) == pytest.approx(1.7 ** 2)


class TestSnapshots:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "snap.dat"
        r = np.linspace(0, 2, 33)
        phi = np.sin(r) * 1e-5
        phit = np.cos(r) * math.pi
        write_snapshot(path, 3, 2.0, -0.625, r, phi, phit)
        n, p, t, r2, phi2, phit2 = read_snapshot(str(path))
        assert (n, p, t) == (3, 2.0, -0.625)
        np.testing.assert_array_equal(r2, r)
        np.testing.assert_array_equal(phi2, phi)
        np.testing.assert_array_equal(phit2, phit)

    def test_header_rejected(self, tmp_path):
        path = tmp_path / "bad.dat"
        path.write_text("nonsense\n1 2 3\n")
        with pytest.raises(ValueError):
            read_snapshot(str(path))

    def test_field_from_snapshot_files(self, tmp_path):
        r = np.linspace(0, 1, 17)
        paths = []
        for i, t in enumerate((0.0, 0.1)):
            path = tmp_path / f"s{i}.dat"
            write_snapshot(path, 2, 2.0, t, r, r * t, r * 0)
            paths.append(str(path))
        fld = DiscreteField.from_snapshot_files(paths)
        assert fld.dim == 2
        assert fld.value(0.05, 0.5) == pytest.approx(0.025)


class TestDiscreteFieldEvaluation:
    def test_reproduces_bilinear_functions(self):
        r = np.linspace(0, 2, 41)
        times = np.array([0.0, 0.5, 1.0])
        phi = np.vstack([3.0 * t + 2.0 * r for t in times])
        phit = np.vstack([np.full_like(r, 3.0) for _ in times])
        fld = DiscreteField(times, r, phi, phit, 1)
        assert fld.value(0.25, 0.33) == pytest.approx(3 * 0.25 + 2 * 0.33)
        assert fld.value_t(0.7, 1.0) == pytest.approx(3.0)
        assert fld.value_r(0.7, 1.3) == pytest.approx(2.0)

    def test_even_extension(self):
        r = np.linspace(0, 1, 11)
        fld = DiscreteField(np.array([0.0]), r, (r * r)[None, :],
                            np.zeros((1, 11)), 3)
        assert fld.value(0.0, -0.5) == fld.value(0.0, 0.5)

    def test_out_of_range_raises(self):
        r = np.linspace(0, 1, 11)
        fld = DiscreteField(np.array([0.0, 1.0]), r, np.zeros((2, 11)),
                            np.zeros((2, 11)), 3)
        with pytest.raises(ValueError):
            fld.value(2.0, 0.5)
        with pytest.raises(ValueError):
            fld.value(0.5, 1.5)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            DiscreteField(np.array([0.0]), np.array([0.5, 1.0]),
                          np.zeros((1, 2)), np.zeros((1, 2)), 3)

import math

import numpy as np
import pytest

from bellexp.quantum import (
    coplanar_triple,
    qm_correlation,
    qm_correlation_density,
    qm_marginal,
    rearrangement_check,
)
from bellexp.spin import (
    DOWN,
    UP,
    X,
    Z,
    DensityMatrix,
    Direction,
    density_from_pure,
    product_state,
    singlet,
)

from oracles import (
    correlation_oracle,
    random_direction,
    random_rotation,
    random_spinor,
    random_state,
)


class TestQmCorrelation:
    def test_singlet_sixty_degrees(self):
        a, b, _ = coplanar_triple()
        assert qm_correlation(singlet(), a, b) == pytest.approx(-0.5, abs=1e-12)

    def test_singlet_equal_axes(self, rng):
        a = random_direction(rng)
        assert qm_correlation(singlet(), a, a) == pytest.approx(-1.0, abs=1e-12)

    @pytest.mark.parametrize("deg", [0, 30, 90, 120, 180])
    def test_singlet_angles_against_oracle(self, deg):
        a, b = Direction.from_angle(0), Direction.from_angle(deg)
        oracle = correlation_oracle(singlet().amplitudes, a.vector, b.vector)
        assert abs(qm_correlation(singlet(), a, b) - oracle) <= 1e-12
        assert abs(oracle + math.cos(math.radians(deg))) <= 1e-12

    def test_bounded(self, rng):
        for _ in range(1000):
            v = qm_correlation(random_state(rng), random_direction(rng), random_direction(rng))
            assert -1 - 1e-12 <= v <= 1 + 1e-12

    def test_singlet_closed_form(self, rng):
        psi = singlet()
        for _ in range(1000):
            a, b = random_direction(rng), random_direction(rng)
            assert abs(correlation_oracle(psi.amplitudes, a.vector, b.vector) + a.dot(b)) <= 1e-12
            assert abs(qm_correlation(psi, a, b) + a.dot(b)) <= 1e-12

    def test_singlet_rotational_invariance(self, rng):
        psi = singlet()
        for _ in range(200):
            a, b = random_direction(rng), random_direction(rng)
            R = random_rotation(rng)
            ra, rb = Direction.from_vector(R @ a.vector), Direction.from_vector(R @ b.vector)
            assert abs(qm_correlation(psi, a, b) - qm_correlation(psi, ra, rb)) <= 1e-12


class TestMarginal:
    def test_singlet_marginals_vanish(self, rng):
        for _ in range(50):
            d = random_direction(rng)
            assert abs(qm_marginal(singlet(), d, "A")) <= 1e-12
            assert abs(qm_marginal(singlet(), d, "B")) <= 1e-12

    def test_up_down(self):
        psi = product_state(UP, DOWN)
        assert qm_marginal(psi, Z, "A") == 1.0
        assert qm_marginal(psi, Z, "B") == -1.0

    def test_bad_side(self):
        with pytest.raises(ValueError):
            qm_marginal(singlet(), Z, "C")

    def test_product_state_factorizes(self, rng):
        for _ in range(500):
            psi = product_state(random_spinor(rng), random_spinor(rng))
            a, b = random_direction(rng), random_direction(rng)
            product = qm_marginal(psi, a, "A") * qm_marginal(psi, b, "B")
            assert abs(qm_correlation(psi, a, b) - product) <= 1e-12


class TestDensityRoute:
    def test_singlet_sixty(self):
        a, b, _ = coplanar_triple()
        assert qm_correlation_density(density_from_pure(singlet()), a, b) == pytest.approx(-0.5, abs=1e-12)

    def test_maximally_mixed(self, rng):
        rho = DensityMatrix.maximally_mixed()
        for _ in range(20):
            assert abs(qm_correlation_density(rho, random_direction(rng), random_direction(rng))) <= 1e-15

    def test_pure_consistency(self, rng):
        for _ in range(100):
            psi = random_state(rng)
            a, b = random_direction(rng), random_direction(rng)
            assert abs(qm_correlation_density(density_from_pure(psi), a, b) - qm_correlation(psi, a, b)) <= 1e-12

    def test_rejects_invalid_density(self):
        with pytest.raises(ValueError):
            qm_correlation_density(np.eye(4), Z, Z)

    def test_mixed_bound(self, rng):
        for _ in range(100):
            w = rng.random(3)
            rho = DensityMatrix.mixture([random_state(rng) for _ in range(3)], w / w.sum())
            v = qm_correlation_density(rho, random_direction(rng), random_direction(rng))
            assert -1 - 1e-12 <= v <= 1 + 1e-12


class TestRearrangement:
    def test_sixty_sixty_counterexample(self):
        a, b, c = coplanar_triple(60, 60)
        assert math.degrees(a.angle_to(c)) == pytest.approx(120)
        rep = rearrangement_check(singlet(), a, b, c, c)
        assert rep.lhs == pytest.approx(-1.0, abs=1e-9)
        assert rep.rhs_plus == pytest.approx(-0.25, abs=1e-9)
        assert rep.rhs_minus == pytest.approx(-1.75, abs=1e-9)
        assert abs(rep.lhs - rep.rhs_plus) == pytest.approx(0.75, abs=1e-9)
        assert abs(rep.lhs - rep.rhs_minus) == pytest.approx(0.75, abs=1e-9)
        assert not rep.equal_plus and not rep.equal_minus
        assert rep.tolerance == 1e-9

    def test_counterexample_independent_of_realization(self, rng):
        a, b, c = coplanar_triple(60, 60)
        R = random_rotation(rng)
        rot = [Direction.from_vector(R @ d.vector) for d in (a, b, c)]
        base = rearrangement_check(singlet(), a, b, c, c)
        moved = rearrangement_check(singlet(), rot[0], rot[1], rot[2], rot[2])
        assert moved.lhs == pytest.approx(base.lhs, abs=1e-12)
        assert moved.rhs_plus == pytest.approx(base.rhs_plus, abs=1e-12)

    def test_product_state_trivial_case(self, rng):
        psi = product_state(random_spinor(rng), random_spinor(rng))
        a, b = random_direction(rng), random_direction(rng)
        rep = rearrangement_check(psi, a, b, a, b)
        e = qm_correlation(psi, a, b)
        assert rep.lhs == 0.0
        # with a2 = a and b2 = b both rhs variants reduce to e*(1 +/- e) - e*(1 +/- e) = 0
        assert rep.rhs_plus == pytest.approx(e * (1 + e) - e * (1 + e), abs=1e-15)
        assert rep.rhs_minus == pytest.approx(0.0, abs=1e-15)
        assert rep.equal_plus and rep.equal_minus

    def test_flags_follow_tolerance(self):
        a, b, c = coplanar_triple()
        rep = rearrangement_check(singlet(), a, b, c, c, tolerance=0.8)
        assert rep.equal_plus and rep.equal_minus

    def test_rejects_nonpositive_tolerance(self):
        with pytest.raises(ValueError):
            rearrangement_check(singlet(), X, Z, X, Z, tolerance=0)

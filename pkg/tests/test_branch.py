"""Branch point location, membership filtering, and the redirection rule."""

import math

import numpy as np
import pytest

from dtlocus.boundary import RegionSpec
from dtlocus.branch import branch_points, redirect
from dtlocus.errors import InputError
from dtlocus.plant import Plant

from oracles import locus_residual


class TestRedirect:
    def test_even_rotates(self):
        assert redirect(0.0, 2) == pytest.approx(-math.pi / 2)
        assert redirect(math.pi, 2) == pytest.approx(math.pi / 2)
        assert redirect(0.0, 4) == pytest.approx(-math.pi / 4)

    def test_odd_passes_through(self):
        assert redirect(1.234, 3) == pytest.approx(1.234)
        assert redirect(-2.0, 5) == pytest.approx(-2.0)

    def test_normalization(self):
        assert redirect(-math.pi + 0.1, 2) == pytest.approx(math.pi / 2 + 0.1)

    def test_rejects_simple(self):
        with pytest.raises(InputError):
            redirect(0.0, 1)

    def test_real_pair_goes_vertical(self):
        # two real arrivals at an N=2 point leave as a conjugate pair
        up, down = redirect(0.0, 2), redirect(math.pi, 2)
        assert sorted((up, down)) == pytest.approx([-math.pi / 2, math.pi / 2])


class TestBranchPoints:
    def test_p1_single_branch(self, p1):
        got = branch_points(p1, RegionSpec(-2.0, 1.0))
        assert len(got) == 1
        bp = got[0]
        assert bp.s == pytest.approx(-1.0 + 0j, abs=1e-10)
        assert bp.k == pytest.approx(math.exp(-1.0), rel=1e-10)
        assert bp.Kval == pytest.approx(-1.0, abs=1e-10)
        assert bp.multiplicity == 2
        assert bp.active

    def test_p1_region_filter(self, p1):
        assert branch_points(p1, RegionSpec(-0.5, 1.0)) == []

    def test_p1_inactive_when_capped(self, p1):
        got = branch_points(p1, RegionSpec(-2.0, 0.2))
        assert len(got) == 1
        assert not got[0].active  # k = e^-1 > 0.2

    def test_p2_branch_near_minus_0_7(self, p2):
        region = RegionSpec(-3.5, 5.0)
        got = branch_points(p2, region)
        assert len(got) == 1
        bp = got[0]
        assert bp.s.imag == pytest.approx(0.0, abs=1e-10)
        assert bp.s.real == pytest.approx(-0.6977, abs=5e-4)
        assert bp.k == pytest.approx(9.3e-4, rel=0.05)
        assert bp.multiplicity == 2
        assert bp.active

    def test_membership_residual(self, p2):
        for bp in branch_points(p2, RegionSpec(-3.5, 5.0)):
            assert locus_residual(p2, bp.s, bp.k) <= 1e-6

    def test_alpha_scaling_halves_gain(self, p2):
        doubled = Plant(2.0, p2.delay, p2.zeros, p2.poles)
        a = branch_points(p2, RegionSpec(-3.5, 5.0))
        b = branch_points(doubled, RegionSpec(-3.5, 5.0))
        assert len(a) == len(b)
        for x, y in zip(a, b):
            assert y.s == pytest.approx(x.s, abs=1e-9)
            assert y.k == pytest.approx(x.k / 2.0, rel=1e-9)
            assert y.multiplicity == x.multiplicity

    def test_p3_candidates_fail_phase_test(self, p3):
        # the branch polynomial has real roots at -3 +- sqrt(3) but neither
        # satisfies the phase condition for positive gain
        got = branch_points(p3, RegionSpec(-5.0, 100.0))
        assert got == []

    def test_sorted_by_gain(self):
        rng = np.random.RandomState(43)
        from oracles import random_plant

        for _ in range(10):
            plant = random_plant(rng, Plant)
            got = branch_points(plant, RegionSpec(-4.0, 100.0))
            kvals = [bp.Kval for bp in got]
            assert kvals == sorted(kvals)
            for bp in got:
                assert bp.s.real >= -4.0 - 1e-9
                assert locus_residual(plant, bp.s, bp.k) <= 1e-6
                assert bp.active == (bp.Kval <= math.log(100.0))

    def test_conjugate_pairs_both_reported(self):
        # plant engineered to push a conjugate branch pair into the region:
        # poles at 0 and -4, zeros at -1 +- 2j pull the locus off-axis
        plant = Plant(1.0, 0.3, (-1 + 2j, -1 - 2j), (0j, -4 + 0j))
        got = branch_points(plant, RegionSpec(-6.0, 1e6))
        complex_bps = [bp for bp in got if abs(bp.s.imag) > 1e-6]
        if complex_bps:  # structure-dependent; when present, must pair up
            ims = sorted(bp.s.imag for bp in complex_bps)
            assert len(ims) % 2 == 0
            for lo, hi in zip(ims, reversed(ims)):
                assert lo == pytest.approx(-hi, abs=1e-8)

# ----------------------------------------------------------------------------
# Copyright (c) 2024-, LieProfile development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import warnings
from unittest import main

import numpy as np
import numpy.testing as npt
from hypothesis import given, settings, strategies as st

from lieprofile.core import exceptions
from lieprofile.core.group import CustomGroup, abelian, heisenberg
from lieprofile.core.sampling import (
    AtomIndex, SamplingSet, atom_index, preset_sampling_set)
from lieprofile.core.testing import LieProfileTestCase


lattice_point = st.lists(st.integers(-50, 50), min_size=3, max_size=3)


class TestSamplingSet(LieProfileTestCase):
    def setUp(self):
        super(TestSamplingSet, self).setUp()
        self.h1 = SamplingSet(heisenberg(1), 1.)
        self.r1 = SamplingSet(abelian(1), 0.5)

    def test_units(self):
        npt.assert_equal(self.h1.units, [1., 1., 0.5])
        npt.assert_equal(self.r1.units, [0.5])
        self.assertEqual(self.h1.cell_volume, 0.5)
        self.assertEqual(self.r1.cell_volume, 0.5)
        npt.assert_equal(SamplingSet(heisenberg(1), 0.5).units,
                         [0.5, 0.5, 0.125])

    def test_constructor_errors(self):
        with self.assertRaises(exceptions.LieProfileDomainError):
            SamplingSet(abelian(1), 0.)
        with self.assertRaises(exceptions.LieProfileLayoutError):
            SamplingSet(abelian(2), 1., tile=[1.])
        custom = CustomGroup([1, 1], [])
        with self.assertRaises(exceptions.LieProfileUnsupportedError):
            SamplingSet(custom, 1.)

    def test_serialization(self):
        gs = SamplingSet(heisenberg(1), 0.5, tile=[1., 1., 0.25])
        self.assertEqual(SamplingSet.from_dict(gs.to_dict()), gs)
        self.assertEqual(SamplingSet.from_dict(self.r1.to_dict()), self.r1)
        self.assertNotIn('tile', self.r1.to_dict())
        self.assertEqual(preset_sampling_set(abelian(1), 0.5), self.r1)

    def test_atom_index(self):
        idx = atom_index(np.int64(2), np.array([1, -3, 4]))
        self.assertEqual(idx, AtomIndex(2, (1, -3, 4)))
        self.assertIsInstance(idx.j, int)
        self.assertIsInstance(idx.gamma[0], int)
        self.assertLess(atom_index(0, [5]), atom_index(1, [-5]))
        self.assertLess(atom_index(0, [-5]), atom_index(0, [5]))

    def test_lattice_arithmetic_matches_group(self):
        gs, g = self.h1, self.h1.group
        a = np.array([1, 2, -3])
        b = np.array([-4, 1, 5])
        npt.assert_allclose(gs.decode(gs.lattice_multiply(a, b)),
                            g.multiply(gs.decode(a), gs.decode(b)))
        npt.assert_equal(gs.lattice_inverse(a), [-1, -2, 3])
        npt.assert_allclose(gs.decode(gs.lattice_dilate(a, 2)),
                            g.dilate_dyadic(2, gs.decode(a)))
        with self.assertRaises(exceptions.LieProfileDomainError):
            gs.lattice_dilate(a, -1)

    def test_encode(self):
        self.assertEqual(self.h1.encode([1., 2., 1.5]), (1, 2, 3))
        self.assertIsNone(self.h1.encode([0.5, 0., 0.]))
        self.assertEqual(self.r1.encode([-1.5]), (-3, ))

    def test_position_and_place(self):
        gs = self.h1
        idx = atom_index(1, [2, 0, 4])
        npt.assert_equal(gs.position(idx), [1., 0., 0.5])
        j, point = gs.place(atom_index(1, [1, 0, 0]), 2, [0., 1., 0.])
        self.assertEqual(j, 3)
        npt.assert_allclose(point, gs.group.multiply([4., 0., 0.],
                                                     [0., 1., 0.]))

    def test_locate(self):
        z = np.array([[0.3, 1.7, 0.2], [-0.5, 0.5, -0.1]])
        base = self.h1.locate(z)
        g = self.h1.group
        w = g.multiply(g.inverse(self.h1.decode(base)), z)
        self.assertTrue(np.all(w >= 0))
        self.assertTrue(np.all(w < self.h1.units))
        npt.assert_equal(self.r1.locate([[0.7], [-0.2]]), [[1], [-1]])

    def test_enumerate(self):
        indices = self.r1.enumerate(1, ([0.], [1.]))
        self.assertEqual([i.gamma for i in indices],
                         [(0, ), (1, ), (2, ), (3, )])
        self.assertTrue(all(i.j == 1 for i in indices))
        self.assertEqual(self.r1.enumerate(0, ([0.], [0.])), [])
        with self.assertRaises(exceptions.LieProfileLayoutError):
            self.r1.enumerate(0, ([0., 0.], [1., 1.]))

    def test_verify_tiling_abelian(self):
        report = SamplingSet(abelian(2), 0.5).verify_tiling(
            ([-1., -1.], [1., 1.]), 16)
        self.assertEqual(report.max_overlap_fraction, 0.)
        self.assertEqual(report.uncovered_fraction, 0.)
        self.assertEqual(report.n_points, 256)

    def test_verify_tiling_heisenberg(self):
        report = self.h1.verify_tiling(([-2., -2., -2.], [2., 2., 2.]), 10)
        self.assertEqual(report.max_overlap_fraction, 0.)
        self.assertEqual(report.uncovered_fraction, 0.)

    def test_verify_tiling_doubled_tile(self):
        gs = SamplingSet(abelian(1), 0.5, tile=[1.])
        report = gs.verify_tiling(([-2.], [2.]), 64)
        self.assertAlmostEqual(report.max_overlap_fraction, 0.5)
        self.assertEqual(report.uncovered_fraction, 0.)

    def test_verify_tiling_half_tile(self):
        gs = SamplingSet(abelian(1), 0.5, tile=[0.25])
        report = gs.verify_tiling(([-2.], [2.]), 64)
        self.assertEqual(report.max_overlap_fraction, 0.)
        self.assertAlmostEqual(report.uncovered_fraction, 0.5)
        with self.assertRaises(exceptions.LieProfileDomainError):
            gs.verify_tiling(([0.], [1.]), 1)

    def test_column_decay_bounded_in_j(self):
        gs = SamplingSet(abelian(1), 1.)
        values = [gs.column_decay_certificate(0, j, 3, [0.3],
                                              max_points=20000)
                  for j in range(0, 5)]
        # the sum approximates the integral, uniformly in j
        self.assertLess(max(values) / min(values), 2.)
        self.assertLess(max(values), 10.)

    def test_column_decay_report(self):
        gs = SamplingSet(abelian(1), 1.)
        report = gs.column_decay_report(0, 2, 4, [0.])
        self.assertGreater(report.n_points, 0)
        self.assertGreaterEqual(report.tail_estimate, 0.)
        self.assertAlmostEqual(report.value,
                               report.partial_sum + report.tail_estimate)
        with self.assertRaises(exceptions.LieProfileDomainError):
            gs.column_decay_report(3, 2, 4, [0.])

    def test_column_decay_slow_decay(self):
        gs = SamplingSet(abelian(1), 1.)
        with warnings.catch_warnings():
            warnings.simplefilter('error')
            report = gs.column_decay_report(0, 0, 2, [0.],
                                            max_points=200000)
        # the point budget stops the ball before the summand gets small
        self.assertEqual(report.radius, 65536.)
        self.assertGreaterEqual(report.tail_estimate, 0.)
        npt.assert_allclose(report.tail_estimate, 2. / 65537., rtol=1e-8)
        npt.assert_allclose(report.value, np.pi ** 2 / 3 - 1, atol=1e-6)

    def test_column_decay_divergence_warning(self):
        gs = SamplingSet(abelian(1), 1.)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')
            value = gs.column_decay_certificate(0, 0, 1, [0.],
                                                max_points=1000)
        self.assertTrue(any(issubclass(w.category,
                                       exceptions.LieProfileDivergenceWarning)
                            for w in caught))
        self.assertEqual(value, np.inf)

    @settings(max_examples=100, deadline=None)
    @given(a=lattice_point, b=lattice_point, k=st.integers(0, 4))
    def test_lattice_closure(self, a, b, k):
        gs, g = self.h1, self.h1.group
        ab = gs.lattice_multiply(a, b)
        npt.assert_allclose(gs.decode(ab),
                            g.multiply(gs.decode(a), gs.decode(b)))
        npt.assert_allclose(
            gs.decode(gs.lattice_dilate(ab, k)),
            g.dilate_dyadic(k, g.multiply(gs.decode(a), gs.decode(b))))
        npt.assert_equal(gs.lattice_multiply(a, gs.lattice_inverse(a)),
                         [0, 0, 0])


if __name__ == '__main__':
    main()

# ----------------------------------------------------------------------------
# Copyright (c) 2024-, LieProfile development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

from unittest import main

import numpy as np
import numpy.testing as npt
import pandas as pd

from lieprofile.core import exceptions
from lieprofile.core.coefficients import L1_ATOMS, CoefficientField
from lieprofile.core.profiler import (
    CORE_ORTHOGONAL, NOT_ORTHOGONAL, SCALE_ORTHOGONAL, UNDECIDED,
    ExtractionParams, ScaleCorePair, SequenceSnapshots, classify_pair,
    energy_check, energy_trend, extract, remainder_split)
from lieprofile.core.testing import LieProfileTestCase


def params(**overrides):
    values = dict(M_max=2, L_max=4, eps_conv=1e-9, T_div=8., eps_stable=1e-9,
                  tail=8, mode='strict')
    values.update(overrides)
    return ExtractionParams(**values)


class ProfilerTestCase(LieProfileTestCase):
    def snapshots(self, gs, horizon, bundles):
        """Snapshots from bundles (core, atoms)

        core maps n to (j, gamma); atoms are (dj, dgamma, value) placed at
        (j + dj, 2^dj . gamma * dgamma). Colliding atoms add up.
        """
        fields = []
        for n in range(1, horizon + 1):
            entries = {}
            for core, atoms in bundles:
                j, gamma = core(n)
                for dj, dgamma, value in atoms:
                    value = value(n) if callable(value) else value
                    key = (j + dj, tuple(gs.lattice_multiply(
                        gs.lattice_dilate(gamma, dj), dgamma)))
                    entries[key] = entries.get(key, 0.) + value
            fields.append(self.lp_field(gs, entries))
        return SequenceSnapshots(gs, range(1, horizon + 1), fields)


class TestClassifyPair(ProfilerTestCase):
    def setUp(self):
        super(TestClassifyPair, self).setUp()
        self.gs = self.abelian_sampling(beta=1.)
        self.n = np.arange(1, 17)

    def pair(self, j, gamma):
        return ScaleCorePair.from_indices(
            self.gs, [(int(a), (int(b), )) for a, b in zip(j, gamma)])

    def test_scale_orthogonal(self):
        a = self.pair(0 * self.n, 0 * self.n)
        b = self.pair(self.n, 0 * self.n)
        v = classify_pair(a, b, 8, 4., 1e-9)
        self.assertEqual(v.kind, SCALE_ORTHOGONAL)
        self.assertEqual(v.scale_gap, 16.)

    def test_core_orthogonal(self):
        a = self.pair(0 * self.n, 0 * self.n)
        b = self.pair(0 * self.n, 3 * self.n)
        v = classify_pair(a, b, 8, 4., 1e-9)
        self.assertEqual(v.kind, CORE_ORTHOGONAL)
        self.assertEqual(v.scale_gap, 0.)

    def test_not_orthogonal(self):
        a = self.pair(self.n, 0 * self.n)
        b = self.pair(self.n + 1, 0 * self.n + 3)
        v = classify_pair(a, b, 8, 4., 1e-9)
        self.assertEqual(v.kind, NOT_ORTHOGONAL)
        self.assertEqual(v.scale_gap, 1)
        npt.assert_allclose(v.rel_pos, [3.])

    def test_undecided(self):
        a = self.pair(0 * self.n, 0 * self.n)
        oscillating_scale = self.pair(self.n % 2, 0 * self.n)
        self.assertEqual(classify_pair(a, oscillating_scale, 8, 4.,
                                       1e-9).kind, UNDECIDED)
        wandering = self.pair(0 * self.n, 5 + self.n % 2)
        v = classify_pair(a, wandering, 8, 8., 1e-9)
        self.assertEqual(v.kind, UNDECIDED)
        self.assertIsNone(v.rel_pos)

    def test_heisenberg_translation(self):
        gs = self.heisenberg_sampling()
        a = ScaleCorePair.from_indices(gs, [(0, (0, 0, 0))] * 16)
        b = ScaleCorePair.from_indices(gs, [(0, (0, 0, 4 * n))
                                            for n in self.n])
        self.assertEqual(classify_pair(a, b, 8, 4., 1e-9).kind,
                         CORE_ORTHOGONAL)

    def test_errors(self):
        a = self.pair(0 * self.n, 0 * self.n)
        with self.assertRaises(exceptions.LieProfileInsufficientDataError):
            classify_pair(a, a, 20, 4., 1e-9)
        short = self.pair([0] * 4, [0] * 4)
        with self.assertRaises(exceptions.LieProfileLayoutError):
            classify_pair(a, short, 4, 4., 1e-9)
        with self.assertRaises(exceptions.LieProfileDomainError):
            ScaleCorePair(self.gs.group, [1., 0.], [[0.], [1.]])
        with self.assertRaises(exceptions.LieProfileLayoutError):
            ScaleCorePair(self.gs.group, [1., 1.], [[0.]])

    def test_pair_serialization(self):
        a = self.pair(self.n[:3], [1, 2, 3])
        desc = a.to_dict()
        npt.assert_equal(desc['h'], [0.5, 0.25, 0.125])
        b = ScaleCorePair.from_dict(self.gs.group, desc)
        npt.assert_equal(b.kappa, a.kappa)
        c = ScaleCorePair.from_dict(self.gs.group,
                                    {'j': [1, 2, 3], 'gamma': [[1], [2], [3]]},
                                    self.gs)
        npt.assert_equal(c.h, a.h)
        with self.assertRaises(exceptions.LieProfilePreconditionError):
            ScaleCorePair.from_dict(self.gs.group, {'j': [1], 'gamma': [[1]]})


class TestExtractionParams(LieProfileTestCase):
    def test_validated(self):
        p = params().validated()
        self.assertEqual(p.M_max, 2)
        self.assertIsInstance(p.T_div, float)
        self.assertEqual(ExtractionParams.from_dict(p.to_dict()), p)

    def test_errors(self):
        with self.assertRaises(exceptions.LieProfileDomainError):
            params(M_max=0).validated()
        with self.assertRaises(exceptions.LieProfileDomainError):
            params(eps_conv=0.).validated()
        with self.assertRaises(exceptions.LieProfileDomainError):
            params(mode='lenient').validated()
        with self.assertRaises(exceptions.LieProfileDomainError):
            ExtractionParams.from_dict({'M_max': 4, 'horizon': 3})

    def test_from_settings(self):
        p = ExtractionParams.from_settings(M_max=3)
        self.assertEqual(p.M_max, 3)
        self.assertIn(p.mode, ('strict', 'exploratory'))


class TestSequenceSnapshots(ProfilerTestCase):
    def test_errors(self):
        gs = self.abelian_sampling()
        field = self.lp_field(gs, {(0, (0, )): 1.})
        with self.assertRaises(exceptions.LieProfileLayoutError):
            SequenceSnapshots(gs, [1, 2], [field])
        with self.assertRaises(exceptions.LieProfilePreconditionError):
            SequenceSnapshots(gs, [2, 1], [field, field])
        with self.assertRaises(exceptions.LieProfileInsufficientDataError):
            SequenceSnapshots(gs, [], [])
        l1 = CoefficientField(gs, {(0, (0, )): 1.}, L1_ATOMS, floor=0.)
        with self.assertRaises(exceptions.LieProfileNormalizationError):
            SequenceSnapshots(gs, [1, 2], [field, l1])
        other = self.lp_field(self.abelian_sampling(beta=1.),
                              {(0, (0, )): 1.})
        with self.assertRaises(exceptions.LieProfilePreconditionError):
            SequenceSnapshots(gs, [1, 2], [field, other])

    def test_access(self):
        gs = self.abelian_sampling()
        fields = [self.lp_field(gs, {(0, (0, )): v}) for v in (1., 3.)]
        s = SequenceSnapshots(gs, [4, 9], fields)
        self.assertEqual(len(s), 2)
        self.assertEqual(s.K_bound, 3.)
        self.assertEqual(s.field(9), fields[1])
        self.assertEqual([n for n, _ in s], [4, 9])
        with self.assertRaises(exceptions.LieProfileRangeError):
            s.field(5)


class TestTwoProfiles(ProfilerTestCase):
    """A concentrating and a translating bundle with interleaved moduli"""

    def bundles(self, gs):
        dim = gs.group.dim
        if dim == 1:
            offsets = [(a, ) for a in range(-8, 8)]
        else:
            offsets = [(a, b, 0) for a in range(-2, 2) for b in range(-2, 2)]
        shape = sorted([(dj, o) for o in offsets for dj in (0, 1)],
                       key=lambda t: (t[0] != 0 or any(t[1]), t))
        zero = (0, ) * dim
        translation = np.eye(dim, dtype=int)[0]
        concentrating = (lambda n: (n + 2, zero),
                         [(dj, o, 0.95 ** (2 * k))
                          for k, (dj, o) in enumerate(shape)])
        translating = (lambda n: (0, tuple(4 * n * translation)),
                       [(dj, o, 0.95 ** (2 * k + 1))
                        for k, (dj, o) in enumerate(shape)])
        return [concentrating, translating], shape

    def run_case(self, gs):
        bundles, shape = self.bundles(gs)
        s = self.snapshots(gs, 32, bundles)
        d = extract(s, params(M_max=64))
        self.assertEqual(d.n_profiles, 2)
        self.assertEqual(d.nonconvergent, [])
        self.assertEqual(d.flagged, [])
        self.assertEqual(d.nu[:2], [1, 2])
        self.assertEqual(d.nu[-1], 2)
        for profile, offset in zip(d.profiles, (0, 1)):
            self.assertEqual(len(profile.atoms), 32)
            self.assertEqual(sorted(profile.provenance),
                             list(range(1 + offset, 65, 2)))
            for k, (atom, (dj, o)) in enumerate(zip(profile.atoms, shape)):
                self.assertEqual(atom.rel_scale, dj)
                npt.assert_allclose(atom.rel_pos, gs.decode(o), atol=1e-9)
                self.assertAlmostEqual(atom.coeff,
                                       0.95 ** (2 * k + offset), places=12)
        self.assertEqual([p.escape for p in d.profiles], ['scale', 'core'])
        defects = energy_check(d, 2)
        self.assertIsInstance(defects, pd.Series)
        npt.assert_allclose(defects.values, 0., atol=1e-12)
        return d

    def test_abelian(self):
        d = self.run_case(self.abelian_sampling(beta=1.))
        report = d.check_bookkeeping()
        self.assertTrue(report.passed)

    def test_heisenberg(self):
        self.run_case(self.heisenberg_sampling())

    def test_remainder_split(self):
        d = self.run_case(self.abelian_sampling(beta=1.))
        split = remainder_split(d, 20, 2, 64)
        self.assertLessEqual(split.r1_norm, 1e-12)
        self.assertEqual(split.r2_lp_proxy, 0.)
        self.assertLessEqual(split.r_norm, 1e-12)
        partial = d.remainder_split(20, 1, 64)
        self.assertGreater(partial.r2_lp_proxy, 0.)
        with self.assertRaises(exceptions.LieProfileRangeError):
            d.remainder_split(20, 3, 64)
        with self.assertRaises(exceptions.LieProfileRangeError):
            d.remainder_split(20, 2, 65)

    def test_track_alignment(self):
        # relative positions are exact at every n, so the rendered
        # profiles sit on the snapshot atoms
        for gs in (self.abelian_sampling(beta=1.),
                   self.heisenberg_sampling()):
            d = self.run_case(gs)
            for n in d.n_values:
                for L in (1, 2):
                    for M in (2, 16, 64):
                        split = d.remainder_split(n, L, M)
                        self.assertLessEqual(split.track_alignment, 1e-12)
                        self.assertLessEqual(split.coefficient_drift, 1e-12)
                self.assertLessEqual(
                    d.remainder_split(n, 2, 64).profile_error, 1e-12)

    def test_report(self):
        d = self.run_case(self.abelian_sampling(beta=1.))
        report = d.to_dict()
        self.assertEqual(report['normalization'], {'kind': 'Lp', 'p': 4.})
        self.assertEqual(len(report['profiles']), 2)
        self.assertEqual(report['diagnostics']['n_profiles'], 2)
        self.assertAlmostEqual(report['diagnostics']['sup_limit_over_K'],
                               1. / d.snapshots.K_bound)
        ledger = d.energy_ledger()
        self.assertEqual(sorted(ledger['L'].unique()), [0, 1, 2])
        self.assertEqual(len(ledger), 3 * 32)


class TestCompactSequence(ProfilerTestCase):
    """A sequence that does not move yields one non-escaping profile"""

    def run_case(self, gs, j0):
        dim = gs.group.dim
        zero = (0, ) * dim
        steps = [(1, ), (2, )] if dim == 1 else [(1, 0, 0), (0, 1, 0)]
        atoms = [(0, zero, 1.), (0, steps[0], 0.5), (0, steps[1], 0.25)]
        s = self.snapshots(gs, 16, [(lambda n: (j0, zero), atoms)])
        d = extract(s, params(M_max=3))
        self.assertEqual(d.n_profiles, 1)
        self.assertEqual(list(d.nu), [1, 1, 1])
        profile = d.profiles[0]
        self.assertEqual(profile.provenance, [1, 2, 3])
        self.assertEqual(profile.escape, 'stationary')
        npt.assert_allclose([a.coeff for a in profile.atoms],
                            [1., 0.5, 0.25], atol=1e-12)
        npt.assert_allclose(d.energy_check(1).values, 0., atol=1e-12)

    def test_abelian(self):
        gs = self.abelian_sampling(beta=1.)
        for j0 in (0, 3):
            self.run_case(gs, j0)

    def test_heisenberg(self):
        gs = self.heisenberg_sampling()
        for j0 in (0, 3):
            self.run_case(gs, j0)


class TestNearCollision(ProfilerTestCase):
    def setUp(self):
        super(TestNearCollision, self).setUp()
        self.gs = self.abelian_sampling(beta=1.)
        compact = (lambda n: (0, (0, )), [(0, (0, ), 1.), (0, (1, ), 0.5)])
        translating = (lambda n: (0, (n - 2, )),
                       [(0, (0, ), 0.8), (0, (1, ), 0.4)])
        self.s = self.snapshots(self.gs, 16, [compact, translating])

    def test_energy_defects(self):
        d = extract(self.s, params(M_max=2, T_div=4.))
        self.assertEqual(d.n_profiles, 2)
        self.assertEqual(d.classification_log[0]['kind'], CORE_ORTHOGONAL)
        defects = d.energy_check(2)
        expected = [0.8, 1.76, 0.92] + [0.] * 13
        npt.assert_allclose(defects.values, expected, atol=1e-12)
        self.assertEqual(list(defects.index), list(range(1, 17)))
        self.assertTrue(energy_trend(defects))
        self.assertTrue(d.check_bookkeeping().passed)

    def test_insufficient_data(self):
        with self.assertRaises(exceptions.LieProfileInsufficientDataError):
            extract(self.s, params(M_max=2, tail=17))
        with self.assertRaises(exceptions.LieProfileInsufficientDataError):
            extract(self.s, params(M_max=5))

    def test_energy_trend(self):
        self.assertFalse(energy_trend(pd.Series([0., 0., 1., 1.])))
        self.assertTrue(energy_trend(pd.Series([2., 1., 0.5, 0.])))


class TestModes(ProfilerTestCase):
    def setUp(self):
        super(TestModes, self).setUp()
        self.gs = self.abelian_sampling(beta=1.)

    def test_undecidable(self):
        fixed = (lambda n: (0, (0, )), [(0, (0, ), 1.)])
        wandering = (lambda n: (0, (5 + n % 2, )), [(0, (0, ), 0.5)])
        s = self.snapshots(self.gs, 16, [fixed, wandering])
        with self.assertRaises(exceptions.LieProfileUndecidableError):
            extract(s, params())
        with self.assertLogs('lieprofile.core.profiler', 'WARNING'):
            d = extract(s, params(mode='exploratory'))
        self.assertEqual(d.n_profiles, 2)
        self.assertEqual(d.flagged, [2])

    def test_nonconvergent(self):
        drifting = (lambda n: (0, (0, )),
                    [(0, (0, ), lambda n: 1. + 0.1 * (-1) ** n)])
        translating = (lambda n: (0, (3 * n, )), [(0, (0, ), 0.5)])
        s = self.snapshots(self.gs, 16, [drifting, translating])
        with self.assertRaises(exceptions.LieProfileNonconvergentError):
            extract(s, params())
        with self.assertLogs('lieprofile.core.profiler', 'WARNING'):
            d = extract(s, params(mode='exploratory'))
        self.assertEqual(d.nonconvergent, [1])
        self.assertAlmostEqual(d.limits[0].radius, 0.1)
        self.assertEqual(d.n_profiles, 2)


if __name__ == '__main__':
    main()

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

from lieprofile.core import exceptions
from lieprofile.core.group import abelian
from lieprofile.core.profiler import ExtractionParams, extract
from lieprofile.core.sampling import atom_index
from lieprofile.core.testing import LieProfileTestCase
from lieprofile.workbench.generator import (
    GeneratorSpec, bump_bundle, generate)


BUNDLE = [{'re': 1.}, {'gamma': [1], 're': 0.5}]


def mixture(**extra):
    description = {
        'kind': 'mixture', 'horizon': 16, 't_div': 4.,
        'components': [
            {'kind': 'concentrating', 'track': {'j0': 0},
             'bundle': [{'re': 1.}, {'dj': 1, 're': 0.5}]},
            {'kind': 'translating', 'track': {'gamma1': [4]},
             'bundle': [{'re': 0.8}, {'gamma': [1], 're': 0.4}]}]}
    description.update(extra)
    return description


class TestGeneratorSpec(LieProfileTestCase):
    def test_defaults(self):
        spec = GeneratorSpec({'kind': 'concentrating', 'bundle': BUNDLE}, 1)
        self.assertEqual(spec.horizon, 16)
        self.assertEqual(spec.p, 4.)
        self.assertEqual(spec.n_values, list(range(1, 17)))
        j, gamma = spec.core(3)
        self.assertEqual(j, 3)
        npt.assert_equal(gamma, [0])
        spreading = GeneratorSpec({'kind': 'spreading', 'bundle': BUNDLE,
                                   'track': {'j0': 2}}, 1)
        self.assertEqual(spreading.core(5)[0], -3)
        self.assertEqual(spec.to_dict()['kind'], 'concentrating')

    def test_inconsistent_kinds(self):
        bad = [{'kind': 'wave', 'bundle': BUNDLE},
               {'kind': 'translating', 'bundle': BUNDLE},
               {'kind': 'concentrating', 'bundle': BUNDLE,
                'track': {'j1': 0}},
               {'kind': 'spreading', 'bundle': BUNDLE, 'track': {'j1': 1}},
               {'kind': 'compact', 'bundle': BUNDLE,
                'track': {'gamma1': [1]}},
               {'kind': 'compact'},
               {'kind': 'compact', 'bundle': []},
               {'kind': 'compact', 'bundle': [{'dj': -1, 're': 1.}]},
               {'kind': 'compact', 'bundle': [{'re': 1.}, {'re': 2.}]},
               {'kind': 'compact', 'bundle': BUNDLE, 'horizon': 0},
               {'kind': 'concentrating', 'bundle': BUNDLE, 'horizon': 80},
               {'kind': 'mixture', 'components': [
                   {'kind': 'compact', 'bundle': BUNDLE}]},
               {'kind': 'mixture', 'components': [
                   {'kind': 'compact', 'bundle': BUNDLE}, mixture()]}]
        for description in bad:
            with self.assertRaises(exceptions.LieProfileGeneratorError):
                GeneratorSpec(description, 1)

    def test_layout_errors(self):
        with self.assertRaises(exceptions.LieProfileLayoutError):
            GeneratorSpec({'kind': 'compact',
                           'bundle': [{'gamma': [0, 0], 're': 1.}]}, 1)
        with self.assertRaises(exceptions.LieProfileLayoutError):
            GeneratorSpec({'kind': 'translating', 'bundle': BUNDLE,
                           'track': {'gamma1': [1, 0]}}, 1)


class TestGenerate(LieProfileTestCase):
    def setUp(self):
        super(TestGenerate, self).setUp()
        self.gs = self.abelian_sampling(beta=1.)

    def test_translating(self):
        s = generate({'kind': 'translating', 'bundle': BUNDLE, 'horizon': 8,
                      'track': {'gamma1': [4]}}, self.gs.group, self.gs)
        self.assertEqual(s.n_values, list(range(1, 9)))
        field = s.field(3)
        self.assertEqual(len(field), 2)
        self.assertEqual(field[atom_index(0, (12, ))], 1.)
        self.assertEqual(field[atom_index(0, (13, ))], 0.5)
        self.assertAlmostEqual(s.K_bound, np.sqrt(1.25))
        self.assertEqual(s.normalization.p, 4.)

    def test_concentrating_heisenberg(self):
        gs = self.heisenberg_sampling()
        bundle = [{'re': 1.}, {'dj': 1, 'gamma': [1, 0, 0], 're': 0.5},
                  {'gamma': [0, 1, 2], 'im': 0.25}]
        s = generate({'kind': 'concentrating', 'bundle': bundle,
                      'track': {'gamma0': [1, 0, 0]}}, gs.group, gs)
        field = s.field(2)
        self.assertEqual(field[atom_index(2, (1, 0, 0))], 1.)
        # (2 . gamma0) * (1, 0, 0) at the finer scale
        self.assertEqual(field[atom_index(3, (3, 0, 0))], 0.5)
        self.assertEqual(field[atom_index(2, (1, 1, 3))], 0.25j)

    def test_mixture(self):
        s = generate(mixture(), self.gs.group, self.gs)
        d = extract(s, ExtractionParams(4, 4, 1e-9, 4., 1e-9, 8, 'strict'))
        self.assertEqual(d.n_profiles, 2)
        self.assertEqual(d.nu, [1, 2, 2, 2])

    def test_mixture_not_orthogonal(self):
        description = {'kind': 'mixture', 'components': [
            {'kind': 'compact', 'bundle': [{'re': 1.}]},
            {'kind': 'compact', 'bundle': [{'re': 0.5}],
             'track': {'gamma0': [5]}}]}
        with self.assertRaises(exceptions.LieProfileGeneratorError):
            generate(description, self.gs.group, self.gs)

    def test_collisions(self):
        description = {'kind': 'mixture', 'horizon': 16, 't_div': 4.,
                       'components': [
                           {'kind': 'compact',
                            'bundle': [{'re': 1.}, {'gamma': [1], 're': .5}]},
                           {'kind': 'translating',
                            'track': {'gamma0': [-2], 'gamma1': [1]},
                            'bundle': [{'re': .8}, {'gamma': [1], 're': .4}]}]}
        with self.assertRaises(exceptions.LieProfileGeneratorError):
            generate(description, self.gs.group, self.gs)
        description['allow_collisions'] = True
        s = generate(description, self.gs.group, self.gs)
        field = s.field(2)
        self.assertEqual(len(field), 2)
        self.assertAlmostEqual(field[atom_index(0, (0, ))], 1.8)
        self.assertAlmostEqual(field[atom_index(0, (1, ))], 0.9)
        self.assertEqual(len(s.field(8)), 4)

    def test_noise_is_seeded(self):
        description = {'kind': 'compact', 'bundle': BUNDLE, 'horizon': 4,
                       'noise': {'count': 5, 'scale': 1e-6, 'reach': 50},
                       'seed': 3}
        a = generate(description, self.gs.group, self.gs)
        b = generate(description, self.gs.group, self.gs)
        self.assertEqual(a.fields, b.fields)
        self.assertGreater(len(a.field(1)), 2)
        c = generate(dict(description, seed=4), self.gs.group, self.gs)
        self.assertNotEqual(a.fields, c.fields)
        small = [abs(v) for k, v in a.field(1).items()
                 if k not in (atom_index(0, (0, )), atom_index(0, (1, )))]
        self.assertTrue(all(v <= 1e-6 for v in small))

    def test_group_mismatch(self):
        with self.assertRaises(exceptions.LieProfilePreconditionError):
            generate({'kind': 'compact', 'bundle': BUNDLE}, abelian(2),
                     self.gs)

    def test_bump_bundle(self):
        gs = self.abelian_sampling()
        shape = {'name': 'bump', 'width': 1., 'N': 128, 'extent': 8.,
                 'atoms': 8}
        bundle = bump_bundle(gs, shape, 4.)
        self.assertEqual(len(bundle), 8)
        self.assertEqual(min(dj for dj, _, _ in bundle), 0)
        moduli = [abs(v) for _, _, v in bundle]
        self.assertEqual(moduli, sorted(moduli, reverse=True))
        s = generate({'kind': 'translating', 'shape': shape, 'horizon': 4,
                      'track': {'gamma1': [40]}}, gs.group, gs)
        self.assertEqual(len(s.field(4)), 8)
        with self.assertRaises(exceptions.LieProfileGeneratorError):
            bump_bundle(gs, {'name': 'ring'}, 4.)


if __name__ == '__main__':
    main()

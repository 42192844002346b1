# ----------------------------------------------------------------------------
# Copyright (c) 2024-, LieProfile development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

from unittest import TestCase

import numpy as np

from lieprofile.core.coefficients import CoefficientField, lp_atoms
from lieprofile.core.group import abelian, heisenberg
from lieprofile.core.sampling import SamplingSet
from lieprofile.core.transform import GridFunction, grid_descriptor


class LieProfileTestCase(TestCase):
    """TestCase with a seeded generator and small fixtures"""
    seed = 20240521

    def setUp(self):
        self.rng = np.random.default_rng(self.seed)

    @staticmethod
    def abelian_sampling(d=1, beta=0.5):
        return SamplingSet(abelian(d), beta)

    @staticmethod
    def heisenberg_sampling(d=1, beta=1.):
        return SamplingSet(heisenberg(d), beta)

    @staticmethod
    def lp_field(sampling, entries, p=4):
        """An Lp_atoms(p) field from {(j, gamma): value}"""
        return CoefficientField(sampling, entries, lp_atoms(p), floor=0.)

    @staticmethod
    def bump(desc, center=0., width=1., frequency=0.):
        """A modulated gaussian exp(-|x - c|^2 / 2w^2) cos(w0 x_1)"""
        desc = grid_descriptor(*desc)

        def func(*mesh):
            r2 = sum((x - center) ** 2 for x in mesh)
            return np.exp(-r2 / (2 * width ** 2)) * \
                np.cos(frequency * mesh[0])
        return GridFunction.from_callable(func, desc)

    def random_field(self, sampling, size, p=4, scales=(0, 3)):
        """A field with `size` random entries at distinct indices"""
        dim = sampling.group.dim
        entries = {}
        while len(entries) < size:
            j = int(self.rng.integers(*scales))
            gamma = tuple(int(v) for v in self.rng.integers(-20, 20, dim))
            entries[(j, gamma)] = complex(self.rng.standard_normal(),
                                          self.rng.standard_normal())
        return self.lp_field(sampling, entries, p)

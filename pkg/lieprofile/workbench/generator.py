# ----------------------------------------------------------------------------
# Copyright (c) 2024-, LieProfile development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

"""Synthetic sequences realizing the escape mechanisms of bounded sequences

A generated snapshot places a coefficient bundle {(dj, dgamma, d)} on a
track (j(n), gamma(n)): the atom (dj, dgamma) lands at scale j(n) + dj and
lattice point (2^{dj} . gamma(n)) . dgamma. Tracks are affine in n:
j(n) = j0 + j1 n and gamma(n) = gamma0 + gamma1 n in lattice coordinates.
"""

import logging
from itertools import combinations

import numpy as np

from lieprofile.core import exceptions
from lieprofile.core.coefficients import CoefficientField, lp_atoms, reorder
from lieprofile.core.profiler import (
    SequenceSnapshots, ScaleCorePair, classify_pair, ORTHOGONAL_KINDS)
from lieprofile.core.sampling import atom_index


logger = logging.getLogger(__name__)

KINDS = ('translating', 'concentrating', 'spreading', 'mixture', 'compact')

# Largest |j| a track may reach
MAX_SCALE = 60


def _bundle_from_list(entries, dim):
    bundle = []
    seen = set()
    for entry in entries:
        dj = int(entry.get('dj', 0))
        if dj < 0:
            raise exceptions.LieProfileGeneratorError(
                'Bundle scale offsets must be nonnegative, got dj=%d' % dj)
        gamma = tuple(int(v) for v in entry.get('gamma', [0] * dim))
        if len(gamma) != dim:
            raise exceptions.LieProfileLayoutError('bundle gamma', dim,
                                                   len(gamma))
        if (dj, gamma) in seen:
            raise exceptions.LieProfileGeneratorError(
                'Bundle repeats the atom (%d, %s)' % (dj, gamma))
        seen.add((dj, gamma))
        bundle.append((dj, gamma, complex(entry.get('re', 0.),
                                          entry.get('im', 0.))))
    if not bundle:
        raise exceptions.LieProfileGeneratorError('Empty coefficient bundle')
    return bundle


def bump_bundle(sampling, shape, p):
    """A bundle holding the largest analysis coefficients of a grid bump

    Parameters
    ----------
    sampling : SamplingSet
        An abelian sampling set
    shape : dict
        {"name": "bump", "width": w, "N": N, "extent": R, "atoms": K}
    p : float
        Integrability of the atoms

    Returns
    -------
    list of (dj, gamma, d)
        Scale offsets from the coarsest kept scale
    """
    from lieprofile.core.transform import (
        GridFunction, KernelSet, analyze, grid_descriptor)
    from lieprofile.core.window import build_window

    if shape.get('name') != 'bump':
        raise exceptions.LieProfileGeneratorError(
            'Unknown shape %r, only "bump" is available' % shape.get('name'))
    dim = sampling.group.dim
    desc = grid_descriptor(dim, shape.get('N', 128), shape.get('extent', 8.))
    width = float(shape.get('width', 1.))
    f = GridFunction.from_callable(
        lambda *mesh: np.exp(-sum(x ** 2 for x in mesh) / (2 * width ** 2)),
        desc).without_mean()
    ks = KernelSet.covering(build_window(), f)
    field = analyze(f, ks, sampling, p)
    kept = reorder(field)[:int(shape.get('atoms', 16))]
    j0 = min(r.index.j for r in kept)
    return [(r.index.j - j0, r.index.gamma, r.value) for r in kept]


class GeneratorSpec(object):
    """Description of a synthetic sequence

    Parameters
    ----------
    description : dict
        {kind, bundle | shape, track, horizon, noise, seed, p, components,
        allow_collisions, tail, t_div}. A mixture lists its components as
        descriptions of the other kinds
    dim : int
        Dimension of the group, for validation

    Raises
    ------
    LieProfileGeneratorError
        If the description is inconsistent with its kind
    """
    def __init__(self, description, dim):
        from lieprofile.core.settings import lieprofile_settings

        self.description = dict(description)
        self.kind = description.get('kind')
        if self.kind not in KINDS:
            raise exceptions.LieProfileGeneratorError(
                'Unknown generator kind %r, use one of %s'
                % (self.kind, ', '.join(KINDS)))
        self.dim = int(dim)
        self.horizon = int(description.get('horizon', 16))
        if self.horizon < 1:
            raise exceptions.LieProfileGeneratorError(
                'The horizon must be positive, got %d' % self.horizon)
        self.p = float(description.get('p', 4))
        self.seed = int(description.get('seed',
                                        lieprofile_settings.generator_seed))
        self.noise = description.get('noise')
        self.allow_collisions = bool(description.get('allow_collisions',
                                                     False))
        self.tail = int(description.get('tail', lieprofile_settings.tail))
        self.t_div = float(description.get('t_div',
                                           lieprofile_settings.t_div))
        if self.kind == 'mixture':
            parts = description.get('components', [])
            if len(parts) < 2:
                raise exceptions.LieProfileGeneratorError(
                    'A mixture needs at least two components')
            self.components = []
            for part in parts:
                if part.get('kind') == 'mixture':
                    raise exceptions.LieProfileGeneratorError(
                        'Mixtures cannot be nested')
                part = dict(part, horizon=self.horizon, p=self.p)
                self.components.append(GeneratorSpec(part, dim))
            self.track = None
            self.bundle = None
        else:
            self.components = [self]
            self.track = self._track(description.get('track', {}))
            if 'bundle' in description:
                self.bundle = _bundle_from_list(description['bundle'], dim)
            elif 'shape' in description:
                self.bundle = None
            else:
                raise exceptions.LieProfileGeneratorError(
                    'A %s generator needs a bundle or a shape' % self.kind)

    def _track(self, track):
        dim = self.dim
        j0 = int(track.get('j0', 0))
        j1 = int(track.get('j1', {'concentrating': 1,
                                  'spreading': -1}.get(self.kind, 0)))
        gamma0 = np.array(track.get('gamma0', [0] * dim), dtype=np.int64)
        gamma1 = np.array(track.get('gamma1', [0] * dim), dtype=np.int64)
        if gamma0.shape != (dim, ) or gamma1.shape != (dim, ):
            raise exceptions.LieProfileLayoutError(
                'track', dim, (gamma0.shape, gamma1.shape))
        moving = bool(np.any(gamma1))
        checks = {'translating': j1 == 0 and moving,
                  'concentrating': j1 > 0,
                  'spreading': j1 < 0,
                  'compact': j1 == 0 and not moving}
        if not checks[self.kind]:
            raise exceptions.LieProfileGeneratorError(
                'Track %s does not describe a %s sequence'
                % (track, self.kind))
        for n in (1, self.horizon):
            if abs(j0 + j1 * n) > MAX_SCALE:
                raise exceptions.LieProfileGeneratorError(
                    'Track leaves the scale bounds at n=%d' % n)
        return j0, j1, gamma0, gamma1

    @property
    def n_values(self):
        return list(range(1, self.horizon + 1))

    def core(self, n):
        """The track point (j(n), gamma(n))"""
        j0, j1, gamma0, gamma1 = self.track
        return j0 + j1 * n, gamma0 + gamma1 * n

    def to_dict(self):
        return dict(self.description)


def _place_bundle(sampling, spec, bundle, n):
    j, gamma = spec.core(n)
    for dj, dgamma, value in bundle:
        point = sampling.lattice_multiply(
            sampling.lattice_dilate(gamma, dj), dgamma)
        yield atom_index(j + dj, point), value


def _noise(rng, noise, sampling, scales):
    count = int(noise.get('count', 0))
    scale = float(noise.get('scale', 1e-6))
    reach = int(noise.get('reach', 16))
    dim = sampling.group.dim
    for _ in range(count):
        j = int(rng.integers(scales[0] - 1, scales[1] + 2))
        gamma = rng.integers(-reach, reach + 1, dim)
        value = scale * rng.uniform(0, 1) * np.exp(
            2j * np.pi * rng.uniform(0, 1))
        yield atom_index(j, gamma), value


def _check_orthogonality(spec, sampling):
    """Each pair of mixture tracks must be scale or core orthogonal"""
    pairs = [ScaleCorePair.from_indices(
        sampling, [atom_index(*c.core(n)) for n in spec.n_values])
        for c in spec.components]
    tail = min(spec.tail, spec.horizon)
    for (a, pa), (b, pb) in combinations(enumerate(pairs), 2):
        verdict = classify_pair(pa, pb, tail, spec.t_div, 1e-9)
        if verdict.kind not in ORTHOGONAL_KINDS:
            raise exceptions.LieProfileGeneratorError(
                'Components %d and %d are not orthogonal: %s (%s)'
                % (a, b, verdict.kind, verdict.detail))
        logger.debug('Components %d and %d: %s', a, b, verdict.kind)


def generate(spec, g, gs):
    """Builds the snapshots u_1, ..., u_horizon of a GeneratorSpec

    Parameters
    ----------
    spec : GeneratorSpec or dict
        The sequence description
    g : GroupSpec
        The group
    gs : SamplingSet
        The sampling set of g

    Returns
    -------
    SequenceSnapshots
        Lp_atoms(p) fields

    Raises
    ------
    LieProfileGeneratorError
        If mixture tracks collide or are not orthogonal
    """
    if gs.group != g:
        raise exceptions.LieProfilePreconditionError(
            'Sampling set on %s, expected %s' % (gs.group.to_json(),
                                                 g.to_json()))
    if not isinstance(spec, GeneratorSpec):
        spec = GeneratorSpec(spec, g.dim)
    bundles = [c.bundle if c.bundle is not None else
               bump_bundle(gs, c.description['shape'], spec.p)
               for c in spec.components]
    if spec.kind == 'mixture':
        _check_orthogonality(spec, gs)
    rng = np.random.default_rng(spec.seed)
    normalization = lp_atoms(spec.p)
    fields, collisions = [], 0
    for n in spec.n_values:
        entries = {}
        for component, bundle in zip(spec.components, bundles):
            for index, value in _place_bundle(gs, component, bundle, n):
                if index in entries:
                    if not spec.allow_collisions:
                        raise exceptions.LieProfileGeneratorError(
                            'Tracks collide at n=%d on %s' % (n, index))
                    collisions += 1
                entries[index] = entries.get(index, 0j) + value
        if spec.noise:
            scales = (min(k.j for k in entries), max(k.j for k in entries))
            for index, value in _noise(rng, spec.noise, gs, scales):
                entries[index] = entries.get(index, 0j) + value
        fields.append(CoefficientField(gs, entries, normalization, floor=0.))
    snapshots = SequenceSnapshots(gs, spec.n_values, fields)
    norms = np.array([np.linalg.norm(f.values) for f in fields])
    if not spec.noise and not collisions and \
            np.ptp(norms) > 1e-12 * max(norms.max(), 1.):
        raise exceptions.LieProfileInvariantError(
            'Generated sequence norms vary by %g' % np.ptp(norms))
    logger.info('Generated %s sequence: %d snapshots, K = %.6g, %d '
                'collisions', spec.kind, len(fields), snapshots.K_bound,
                collisions)
    return snapshots

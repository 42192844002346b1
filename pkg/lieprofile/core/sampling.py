# ----------------------------------------------------------------------------
# Copyright (c) 2024-, LieProfile development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import logging
import warnings
from collections import namedtuple
from itertools import product

import numpy as np
from scipy import integrate

from . import exceptions
from .base import LieProfileObject
from .group import GroupSpec, AbelianGroup, HeisenbergGroup

logger = logging.getLogger(__name__)

AtomIndex = namedtuple('AtomIndex', ['j', 'gamma'])
AtomIndex.__doc__ = """Wavelet index (j, gamma), gamma in lattice coordinates

Tuples order lexicographically, which gives the total order (j ascending,
then gamma lexicographic) used to break ties.
"""

TilingReport = namedtuple('TilingReport', ['max_overlap_fraction',
                                           'uncovered_fraction', 'n_points'])

DecayCertificate = namedtuple('DecayCertificate', [
    'value', 'partial_sum', 'tail_estimate', 'radius', 'n_points'])


def atom_index(j, gamma):
    """Builds an AtomIndex with python int entries"""
    return AtomIndex(int(j), tuple(int(g) for g in gamma))


class SamplingSet(LieProfileObject):
    """A regular sampling set of a preset group and its tile

    Abelian(d): Gamma = (beta Z)^d with tile [0, beta)^d.
    Heisenberg(d): Gamma = {(beta a, beta b, beta^2 c / 2)} with tile
    [0, beta)^{2d} x [0, beta^2 / 2). Lattice points are stored as integer
    coordinates (a[, b, c]) so that closure under the group law and under
    the dyadic dilation is exact.

    Parameters
    ----------
    group : AbelianGroup or HeisenbergGroup
        The group
    beta : float
        The density factor
    tile : sequence of float, optional
        Upper corner of the box tile [0, tile). Defaults to the fundamental
        domain above

    Raises
    ------
    LieProfileUnsupportedError
        If the group is not a preset
    LieProfileDomainError
        If beta <= 0
    """
    _kind = 'sampling'

    def __init__(self, group, beta, tile=None):
        if not isinstance(group, (AbelianGroup, HeisenbergGroup)):
            raise exceptions.LieProfileUnsupportedError(
                'preset sampling sets exist only for Abelian(d) and '
                'Heisenberg(d); supply a lattice and tile and check them '
                'with verify_tiling')
        if not beta > 0:
            raise exceptions.LieProfileDomainError('beta', beta, 'beta > 0')
        self._group = group
        self._beta = float(beta)
        # Decoded coordinate = unit * lattice coordinate
        self._units = np.where(group.weights == 1, self._beta,
                               self._beta ** 2 / 2.)
        if tile is None:
            tile = self._units.copy()
        tile = np.asarray(tile, dtype=float)
        if tile.shape != (group.dim, ):
            raise exceptions.LieProfileLayoutError(
                'tile', group.dim, tile.shape)
        self._tile = tile

    def _key(self):
        return (self._group, self._beta, tuple(self._tile))

    @property
    def group(self):
        return self._group

    @property
    def beta(self):
        return self._beta

    @property
    def tile(self):
        """Upper corner of the box tile [0, tile)"""
        return self._tile.copy()

    @property
    def units(self):
        return self._units.copy()

    @property
    def tile_volume(self):
        return float(np.prod(self._tile))

    @property
    def cell_volume(self):
        """Volume of the fundamental domain of Gamma"""
        return float(np.prod(self._units))

    def to_dict(self):
        desc = {'group': self._group.to_dict(), 'beta': self._beta}
        if not np.array_equal(self._tile, self._units):
            desc['tile'] = self._tile.tolist()
        return desc

    @classmethod
    def from_dict(cls, description):
        return cls(GroupSpec.from_dict(description['group']),
                   description['beta'], description.get('tile'))

    # Lattice arithmetic on integer coordinates

    def _check_lattice(self, gamma):
        gamma = np.asarray(gamma, dtype=np.int64)
        if gamma.ndim == 0 or gamma.shape[-1] != self._group.dim:
            raise exceptions.LieProfileLayoutError(
                'lattice point', self._group.dim,
                gamma.shape[-1] if gamma.ndim else 0)
        return gamma

    def lattice_multiply(self, g1, g2):
        """Group product of two lattice points, in lattice coordinates"""
        g1 = self._check_lattice(g1)
        g2 = self._check_lattice(g2)
        out = g1 + g2
        if isinstance(self._group, HeisenbergGroup):
            d = self._group.d
            out[..., -1] += (
                np.sum(g1[..., :d] * g2[..., d:2 * d], axis=-1) -
                np.sum(g1[..., d:2 * d] * g2[..., :d], axis=-1))
        return out

    def lattice_inverse(self, gamma):
        return -self._check_lattice(gamma)

    def lattice_dilate(self, gamma, k):
        """The dilation by 2^k of a lattice point, for k >= 0

        Raises
        ------
        LieProfileDomainError
            If k < 0, since 2^k . Gamma is not contained in Gamma then
        """
        if k < 0:
            raise exceptions.LieProfileDomainError(
                'k', k, 'k >= 0 for an acceptable dilation')
        gamma = self._check_lattice(gamma)
        return gamma * (2 ** (int(k) * self._group.weights))

    def decode(self, gamma):
        """Group coordinates of lattice point(s)"""
        return self._check_lattice(gamma) * self._units

    def encode(self, point, tol=1e-9):
        """Lattice coordinates of a point of Gamma

        Returns
        -------
        tuple of int or None
            None if the point is not in Gamma up to `tol` (relative to the
            lattice units)
        """
        coords = self._group._check(point) / self._units
        rounded = np.round(coords)
        if np.max(np.abs(coords - rounded), initial=0.) > tol:
            return None
        return tuple(int(v) for v in rounded)

    def position(self, index):
        """The point 2^{-j} . gamma of an AtomIndex"""
        return self._group.dilate_dyadic(-index.j, self.decode(index.gamma))

    def place(self, core, rel_scale, rel_pos):
        """An atom given relative to a core index

        Parameters
        ----------
        core : AtomIndex
            The core (j, gamma)
        rel_scale : int
            Scale offset
        rel_pos : array_like
            Relative position, in group coordinates

        Returns
        -------
        j : int
            core.j + rel_scale
        point : numpy.ndarray
            (2^{rel_scale} . gamma) . rel_pos, so that the atom sits at
            2^{-j} . point
        """
        g = self._group
        base = g.dilate_dyadic(int(rel_scale), self.decode(core.gamma))
        return (int(core.j) + int(rel_scale),
                g.multiply(base, np.asarray(rel_pos, dtype=float)))

    def locate(self, points):
        """Lattice points gamma with gamma^{-1} . z in the fundamental tile

        Parameters
        ----------
        points : array_like
            Point(s) z

        Returns
        -------
        numpy.ndarray of int
            Lattice coordinates, one row per point
        """
        z = self._group._check(points)
        g = self._group
        if isinstance(g, AbelianGroup):
            return np.floor(z / self._units).astype(np.int64)
        d = g.d
        horizontal = np.floor(z[..., :2 * d] / self._beta).astype(np.int64)
        base = np.concatenate(
            [horizontal, np.zeros(horizontal.shape[:-1] + (1, ),
                                  dtype=np.int64)], axis=-1)
        w = g.multiply(g.inverse(self.decode(base)), z)
        base[..., -1] = np.floor(w[..., -1] / self._units[-1])
        return base

    def enumerate(self, j, box):
        """All lattice points whose position 2^{-j} . gamma lies in a box

        Parameters
        ----------
        j : int
            The scale
        box : pair of sequences
            Lower and upper corners of the half-open box [lower, upper)

        Returns
        -------
        list of AtomIndex
            In lexicographic order of gamma
        """
        lower, upper = (np.asarray(b, dtype=float) for b in box)
        if lower.shape != (self._group.dim, ) or upper.shape != lower.shape:
            raise exceptions.LieProfileLayoutError(
                'box', self._group.dim, (lower.shape, upper.shape))
        step = np.ldexp(self._units, -int(j) * self._group.weights)
        first = np.ceil(lower / step).astype(np.int64)
        stop = np.ceil(upper / step).astype(np.int64)
        if np.any(stop <= first):
            return []
        ranges = [range(a, b) for a, b in zip(first, stop)]
        return [AtomIndex(int(j), gamma) for gamma in product(*ranges)]

    def verify_tiling(self, test_box, grid_res):
        """Checks that the translates gamma . W tile a test box

        Parameters
        ----------
        test_box : pair of sequences
            Lower and upper corners of the box to sample
        grid_res : int
            Number of cell-centred samples per axis

        Returns
        -------
        TilingReport
            The redundant share of the tile coverage
            (sum of max(count - 1, 0) over sum of counts) and the fraction
            of points covered by no translate
        """
        if grid_res < 2:
            raise exceptions.LieProfileDomainError(
                'grid_res', grid_res, 'grid_res >= 2')
        lower, upper = (np.asarray(b, dtype=float) for b in test_box)
        g = self._group
        axes = [lo + (hi - lo) * (np.arange(grid_res) + 0.5) / grid_res
                for lo, hi in zip(lower, upper)]
        z = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(
            -1, g.dim)
        base = self.locate(z)
        w = g.multiply(g.inverse(self.decode(base)), z)
        reach = np.maximum(np.ceil(self._tile / self._units).astype(int), 1)
        if isinstance(g, HeisenbergGroup):
            # horizontal shifts shear the center by up to one extra unit
            reach[-1] += 1
        counts = np.zeros(len(z), dtype=np.int64)
        for offset in product(*[range(-r, r + 1) for r in reach]):
            delta = self.decode(np.array(offset, dtype=np.int64))
            shifted = g.multiply(g.inverse(delta), w)
            inside = np.all((shifted >= 0) & (shifted < self._tile), axis=-1)
            counts += inside
        total = counts.sum()
        overlap = float(np.maximum(counts - 1, 0).sum() / total) if total \
            else 0.
        uncovered = float(np.mean(counts == 0))
        return TilingReport(overlap, uncovered, len(z))

    # Column decay of the sampled kernel bound

    def _ball_box(self, x, rho):
        """A coordinate box containing every position within rho of x"""
        g = self._group
        half = np.full(g.dim, rho)
        if isinstance(g, HeisenbergGroup):
            horizontal = np.linalg.norm(x[:-1])
            half[-1] = rho ** 2 + rho * horizontal / 2.
        return x - half, x + half

    def column_decay_report(self, eta, j, n, x, max_points=None):
        """Lattice sum of the sampled decay envelope with a tail estimate

        Computes S = sum_gamma 2^{-jQ} / (1 + 2^eta |p_gamma^{-1} . x|)^n
        over the positions p_gamma = 2^{-j} . gamma inside a homogeneous
        ball around x, grown until the boundary summand is under 1e-14 of
        the sum or the lattice point budget is spent, plus the integral
        tail over the complement of the ball.

        Parameters
        ----------
        eta : int
            Decay scale, eta <= j
        j : int
            Sampling scale
        n : int
            Decay exponent, n >= Q + 1
        x : array_like
            The point
        max_points : int, optional
            Lattice point budget. Defaults to the configured value

        Returns
        -------
        DecayCertificate
            With `value` = (partial + tail) * 2^{eta Q}

        Raises
        ------
        LieProfileDomainError
            If eta > j
        """
        from .settings import lieprofile_settings

        g = self._group
        Q = g.Q
        if eta > j:
            raise exceptions.LieProfileDomainError('eta', eta, 'eta <= j')
        if max_points is None:
            max_points = lieprofile_settings.decay_max_points
        x = g._check(x)
        weight = 2. ** (-j * Q)
        if n <= Q:
            warnings.warn('Decay exponent n = %d <= Q = %d, the lattice sum '
                          'diverges' % (n, Q),
                          exceptions.LieProfileDivergenceWarning)

        def summand(r):
            return weight / (1 + 2. ** eta * r) ** n

        step = np.ldexp(self._units, -int(j) * g.weights)

        def box_size(rho):
            lower, upper = self._ball_box(x, rho)
            return np.prod(np.ceil(upper / step) - np.ceil(lower / step))

        rho = 4 * 2. ** (-eta)
        while box_size(rho) > max_points and rho > np.max(step):
            rho /= 2
        radius, partial, count = rho, 0., 0
        while True:
            indices = self.enumerate(j, self._ball_box(x, rho))
            gammas = np.array([idx.gamma for idx in indices],
                              dtype=np.int64).reshape(-1, g.dim)
            positions = g.dilate_dyadic(-j, self.decode(gammas))
            dist = g.hom_norm(g.multiply(g.inverse(positions), x))
            inside = dist < rho
            radius = rho
            partial = float(np.sum(summand(dist[inside])))
            count = int(inside.sum())
            if summand(rho) < 1e-14 * partial or n <= Q:
                break
            rho *= 2
            if box_size(rho) > max_points:
                break
        if n <= Q:
            tail = np.inf
        else:
            # r = radius / u maps [radius, inf) onto (0, 1]
            scale = 2. ** eta * radius
            integral, _ = integrate.quad(
                lambda u: u ** (n - Q - 1) * (u + scale) ** (-n), 0., 1.)
            integral *= radius ** Q
            tail = Q * g.unit_ball_volume() * integral / self.cell_volume
        value = (partial + tail) * 2. ** (eta * Q)
        logger.debug('Column decay sum: partial %.12g, tail %.3g, radius %g, '
                     '%d points', partial, tail, radius, count)
        return DecayCertificate(value, partial, tail, radius, count)

    def column_decay_certificate(self, eta, j, n, x, max_points=None):
        """The bounded quantity S * 2^{eta Q}, see `column_decay_report`"""
        return self.column_decay_report(eta, j, n, x, max_points).value


def preset_sampling_set(group, density):
    """The preset regular sampling set of a preset group

    Parameters
    ----------
    group : GroupSpec
        Abelian(d) or Heisenberg(d)
    density : float
        The lattice spacing factor beta

    Returns
    -------
    SamplingSet
    """
    return SamplingSet(group, density)

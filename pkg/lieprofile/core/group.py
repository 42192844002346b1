# ----------------------------------------------------------------------------
# Copyright (c) 2024-, LieProfile development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import logging
from collections import namedtuple

import numpy as np
from scipy import integrate, special

from . import exceptions
from .base import LieProfileObject


logger = logging.getLogger(__name__)

NORM_KINDS = ('euclidean', 'koranyi', 'root_sum')

LawReport = namedtuple('LawReport', ['associativity', 'identity', 'inverse',
                                     'dilation', 'tolerance', 'passed'])


class GroupSpec(LieProfileObject):
    """A stratified Lie group in exponential coordinates

    Points are numpy arrays whose last axis holds the coordinates, grouped
    by stratum. All methods broadcast over leading axes.

    Parameters
    ----------
    strata_dims : sequence of int
        dim V_1, ..., dim V_m
    norm_kind : str, optional
        The homogeneous norm, one of `NORM_KINDS`. Defaults to the preset
        norm of the group

    Attributes
    ----------
    strata_dims
    dim
    weights
    Q
    norm_kind

    Methods
    -------
    multiply
    inverse
    dilate
    dilate_dyadic
    hom_norm
    hom_dimension
    critical_exponent
    critical_smoothness
    identity
    quasi_triangle_constant
    validate_law
    unit_ball_volume
    """
    _default_norm = 'root_sum'

    def __init__(self, strata_dims, norm_kind=None):
        strata_dims = tuple(int(k) for k in strata_dims)
        if not strata_dims or any(k <= 0 for k in strata_dims):
            raise exceptions.LieProfileDomainError(
                'strata_dims', strata_dims, 'non-empty, positive integers')
        if norm_kind is None:
            norm_kind = self._default_norm
        if norm_kind not in NORM_KINDS:
            raise exceptions.LieProfileDomainError(
                'norm_kind', norm_kind, 'one of %s' % ', '.join(NORM_KINDS))
        if norm_kind == 'euclidean' and len(strata_dims) > 1:
            raise exceptions.LieProfileUnsupportedError(
                'the euclidean norm is not homogeneous on a group of step %d'
                % len(strata_dims))
        self._strata_dims = strata_dims
        self._norm_kind = norm_kind
        self._weights = np.repeat(np.arange(1, len(strata_dims) + 1),
                                  strata_dims)
        self._slices = []
        start = 0
        for k in strata_dims:
            self._slices.append(slice(start, start + k))
            start += k

    @property
    def strata_dims(self):
        return self._strata_dims

    @property
    def dim(self):
        """The number of coordinates of a point"""
        return int(sum(self._strata_dims))

    @property
    def weights(self):
        """Dilation weight of each coordinate"""
        return self._weights.copy()

    @property
    def Q(self):
        """The homogeneous dimension, sum of k * dim V_k"""
        return int(sum(k * d for k, d in enumerate(self._strata_dims, 1)))

    @property
    def norm_kind(self):
        return self._norm_kind

    def hom_dimension(self):
        """Returns the homogeneous dimension Q"""
        return self.Q

    def identity(self):
        return np.zeros(self.dim)

    def _check(self, x, name='point'):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[-1] != self.dim:
            raise exceptions.LieProfileLayoutError(
                name, self.dim, x.shape[-1] if x.ndim else 0)
        return x

    def _multiply(self, x, y):
        raise NotImplementedError()

    def multiply(self, x, y):
        """Computes the group product x . y

        Parameters
        ----------
        x, y : array_like
            Points (or stacks of points) with the group layout

        Returns
        -------
        numpy.ndarray
            The product

        Raises
        ------
        LieProfileLayoutError
            If x or y does not match the group layout
        """
        return self._multiply(self._check(x), self._check(y))

    def inverse(self, x):
        """Computes x^{-1}, coordinate negation in exponential coordinates"""
        return -self._check(x)

    def _scale_factors(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        if np.any(alpha <= 0):
            raise exceptions.LieProfileDomainError('alpha', alpha, 'alpha > 0')
        return alpha[..., np.newaxis] ** self._weights

    def dilate(self, alpha, x):
        """Applies the dilation alpha . x, scaling stratum k by alpha^k

        Parameters
        ----------
        alpha : float or array_like
            Positive dilation factor(s). An array broadcasts against the
            leading axes of x
        x : array_like
            Point(s)

        Raises
        ------
        LieProfileDomainError
            If alpha <= 0
        """
        x = self._check(x)
        return x * self._scale_factors(alpha)

    def dilate_dyadic(self, k, x):
        """Applies the dilation by 2^k exactly, for integer k"""
        x = self._check(x)
        k = np.asarray(k, dtype=int)
        return np.ldexp(x, k[..., np.newaxis] * self._weights)

    def _stratum(self, x, k):
        return x[..., self._slices[k]]

    def hom_norm(self, x):
        """Evaluates the homogeneous norm |x|_G

        Parameters
        ----------
        x : array_like
            Point(s)

        Returns
        -------
        float or numpy.ndarray
            The norm, symmetric, homogeneous of degree one and definite
        """
        x = self._check(x)
        if self._norm_kind == 'euclidean':
            return np.linalg.norm(x, axis=-1)
        if self._norm_kind == 'koranyi':
            horizontal = np.sum(self._stratum(x, 0) ** 2, axis=-1)
            center = np.sum(self._stratum(x, 1) ** 2, axis=-1)
            return (horizontal ** 2 + 16 * center) ** 0.25
        total = 0.
        for k in range(len(self._strata_dims)):
            total = total + np.linalg.norm(self._stratum(x, k), axis=-1) ** (
                1. / (k + 1))
        return total

    def critical_exponent(self, s):
        """Returns p with s/Q + 1/p = 1/2

        Raises
        ------
        LieProfileDomainError
            If s is not in (0, Q/2)
        """
        Q = self.Q
        if not 0 < s < Q / 2.:
            raise exceptions.LieProfileDomainError(
                's', s, '0 < s < Q/2 = %s' % (Q / 2.))
        return 1. / (0.5 - s / Q)

    def critical_smoothness(self, p):
        """Returns s with s/Q + 1/p = 1/2, for p >= 2"""
        if not 2 <= p < np.inf:
            raise exceptions.LieProfileDomainError('p', p, '2 <= p < inf')
        return self.Q * (0.5 - 1. / p)

    def quasi_triangle_constant(self, n_pairs=10000, rng=None):
        """Measures c' in |x.y| <= c'(|x| + |y|) on random pairs

        Parameters
        ----------
        n_pairs : int, optional
            Number of random pairs
        rng : numpy.random.Generator, optional
            Source of randomness

        Returns
        -------
        float
            The largest observed ratio
        """
        rng = np.random.default_rng(rng)
        x = rng.standard_normal((n_pairs, self.dim))
        y = rng.standard_normal((n_pairs, self.dim))
        ratio = self.hom_norm(self.multiply(x, y)) / (
            self.hom_norm(x) + self.hom_norm(y))
        constant = float(np.max(ratio))
        logger.info('Measured quasi-triangle constant %.6f on %d pairs',
                    constant, n_pairs)
        return constant

    def validate_law(self, n_trials=1000, rng=None, tol=1e-9):
        """Fuzzes the group law axioms on random points

        Checks associativity, the identity, inversion by coordinate negation
        and that the dyadic dilation is an automorphism.

        Parameters
        ----------
        n_trials : int, optional
            Number of random triples
        rng : numpy.random.Generator or int, optional
            Source of randomness
        tol : float, optional
            Absolute tolerance on each identity

        Returns
        -------
        LawReport
            The maximal absolute error of each identity and the verdict
        """
        rng = np.random.default_rng(rng)
        x, y, z = (rng.standard_normal((n_trials, self.dim))
                   for _ in range(3))
        e = np.zeros_like(x)

        def err(a, b):
            return float(np.max(np.abs(a - b)))

        assoc = err(self.multiply(self.multiply(x, y), z),
                    self.multiply(x, self.multiply(y, z)))
        ident = max(err(self.multiply(e, x), x), err(self.multiply(x, e), x))
        inv = max(err(self.multiply(x, self.inverse(x)), e),
                  err(self.multiply(self.inverse(x), x), e))
        dil = err(self.dilate_dyadic(1, self.multiply(x, y)),
                  self.multiply(self.dilate_dyadic(1, x),
                                self.dilate_dyadic(1, y)))
        passed = max(assoc, ident, inv, dil) <= tol
        if not passed:
            logger.warning('Group law validation failed: associativity %g, '
                           'identity %g, inverse %g, dilation %g',
                           assoc, ident, inv, dil)
        return LawReport(assoc, ident, inv, dil, tol, passed)

    def _ball_profile(self, r):
        """Measure of the non-horizontal fibre over a horizontal radius r"""
        raise exceptions.LieProfileUnsupportedError(
            'unit ball volume for %s' % self.to_json())

    def unit_ball_volume(self):
        """Lebesgue measure of {|x|_G <= 1}

        Returns
        -------
        float

        Raises
        ------
        LieProfileUnsupportedError
            If no formula is available for the group and norm
        """
        n = self._strata_dims[0]
        if len(self._strata_dims) == 1:
            return float(np.pi ** (n / 2.) / special.gamma(n / 2. + 1))
        sphere = 2 * np.pi ** (n / 2.) / special.gamma(n / 2.)
        value, _ = integrate.quad(
            lambda r: r ** (n - 1) * self._ball_profile(r), 0, 1)
        return float(sphere * value)

    @staticmethod
    def from_dict(description):
        """Builds a group from its JSON description

        Parameters
        ----------
        description : dict
            Either {kind, d[, norm_kind]} for a preset or
            {strata_dims, law: "custom", coefficients[, norm_kind]}
        """
        if description.get('law') == 'custom':
            return CustomGroup(description['strata_dims'],
                               description['coefficients'],
                               description.get('norm_kind'))
        return LieProfileObject.factory(description)


class AbelianGroup(GroupSpec):
    """The abelian group R^d with the euclidean norm"""
    _kind = 'abelian'
    _default_norm = 'euclidean'

    def __init__(self, d, norm_kind=None):
        super(AbelianGroup, self).__init__([d], norm_kind)
        self.d = int(d)

    def _key(self):
        return (self.d, self.norm_kind)

    def _multiply(self, x, y):
        return x + y

    def to_dict(self):
        desc = {'kind': self._kind, 'd': self.d}
        if self.norm_kind != self._default_norm:
            desc['norm_kind'] = self.norm_kind
        return desc

    @classmethod
    def from_dict(cls, description):
        return cls(description['d'], description.get('norm_kind'))


class HeisenbergGroup(GroupSpec):
    """The Heisenberg group H^d with coordinates (x, y, t)

    The law is (x, y, t).(x', y', t') = (x + x', y + y',
    t + t' + (<x, y'> - <y, x'>) / 2) and the default norm is the Koranyi
    gauge ((|x|^2 + |y|^2)^2 + 16 t^2)^{1/4}.
    """
    _kind = 'heisenberg'
    _default_norm = 'koranyi'

    def __init__(self, d, norm_kind=None):
        super(HeisenbergGroup, self).__init__([2 * d, 1], norm_kind)
        self.d = int(d)

    def _key(self):
        return (self.d, self.norm_kind)

    def _multiply(self, x, y):
        d = self.d
        out = x + y
        out[..., -1] += 0.5 * (
            np.sum(x[..., :d] * y[..., d:2 * d], axis=-1) -
            np.sum(x[..., d:2 * d] * y[..., :d], axis=-1))
        return out

    def _ball_profile(self, r):
        if self.norm_kind == 'koranyi':
            return np.sqrt(max(1 - r ** 4, 0.)) / 2.
        return 2 * (1 - r) ** 2

    def to_dict(self):
        desc = {'kind': self._kind, 'd': self.d}
        if self.norm_kind != self._default_norm:
            desc['norm_kind'] = self.norm_kind
        return desc

    @classmethod
    def from_dict(cls, description):
        return cls(description['d'], description.get('norm_kind'))


class CustomGroup(GroupSpec):
    """A group with a user-supplied polynomial law

    The product is x + y plus a sum of monomials. Each term is a dict
    {"out": i, "c": c, "x": [[a, pa], ...], "y": [[b, pb], ...]} adding
    c * prod x_a^pa * prod y_b^pb to coordinate i. Inversion is coordinate
    negation, which `validate_law` checks.

    Parameters
    ----------
    strata_dims : sequence of int
        dim V_1, ..., dim V_m
    coefficients : list of dict
        The monomial terms
    norm_kind : str, optional
        Defaults to `root_sum`
    """
    _kind = 'custom'

    def __init__(self, strata_dims, coefficients, norm_kind=None):
        super(CustomGroup, self).__init__(strata_dims, norm_kind)
        terms = []
        for term in coefficients:
            out = int(term['out'])
            if not 0 <= out < self.dim:
                raise exceptions.LieProfileLayoutError(
                    'law term output', self.dim, out)
            xs = tuple((int(a), int(pa)) for a, pa in term.get('x', []))
            ys = tuple((int(b), int(pb)) for b, pb in term.get('y', []))
            for a, _ in xs + ys:
                if not 0 <= a < self.dim:
                    raise exceptions.LieProfileLayoutError(
                        'law term variable', self.dim, a)
            terms.append((out, float(term['c']), xs, ys))
        self._terms = tuple(terms)

    def _key(self):
        return (self.strata_dims, self._terms, self.norm_kind)

    def _multiply(self, x, y):
        out = x + y
        for i, c, xs, ys in self._terms:
            mono = c
            for a, pa in xs:
                mono = mono * x[..., a] ** pa
            for b, pb in ys:
                mono = mono * y[..., b] ** pb
            out[..., i] += mono
        return out

    def to_dict(self):
        desc = {'strata_dims': list(self.strata_dims), 'law': 'custom',
                'coefficients': [
                    {'out': i, 'c': c, 'x': [list(v) for v in xs],
                     'y': [list(v) for v in ys]}
                    for i, c, xs, ys in self._terms]}
        if self.norm_kind != self._default_norm:
            desc['norm_kind'] = self.norm_kind
        return desc

    @classmethod
    def from_dict(cls, description):
        return GroupSpec.from_dict(dict(description, law='custom'))


def abelian(d):
    """The preset Abelian(d)"""
    return AbelianGroup(d)


def heisenberg(d=1):
    """The preset Heisenberg(d)"""
    return HeisenbergGroup(d)

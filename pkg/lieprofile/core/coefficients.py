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

from . import exceptions
from .sampling import AtomIndex, atom_index


logger = logging.getLogger(__name__)

Normalization = namedtuple('Normalization', ['kind', 'p'])
Normalization.__doc__ = """Coefficient convention of a field

kind 'L1': c = <u, psi_{j,gamma}> against the L1-normalized atoms, which is
the sampled block u * psi_j^*(2^{-j} . gamma).
kind 'Lp': d = 2^{-jQ/p} c, the expansion coefficients against the
L^p-normalized atoms 2^{jQ/p} psi(gamma^{-1} . 2^j . x), whose l2 norm is
the homogeneous Sobolev norm of critical smoothness s = Q(1/2 - 1/p).
"""

L1_ATOMS = Normalization('L1', None)

NormParams = namedtuple('NormParams', ['s', 'p', 'q'])

Ranked = namedtuple('Ranked', ['rank', 'index', 'value'])

UnconditionalityEstimate = namedtuple('UnconditionalityEstimate',
                                      ['d_est', 'ratios'])


def lp_atoms(p):
    """The Lp_atoms(p) normalization tag"""
    if not 1 < p < np.inf:
        raise exceptions.LieProfileDomainError('p', p, '1 < p < inf')
    return Normalization('Lp', float(p))


def describe(normalization):
    if normalization.kind == 'L1':
        return 'L1_atoms'
    return 'Lp_atoms(%g)' % normalization.p


class CoefficientField(object):
    """A finite sparse map from AtomIndex to complex coefficients

    Parameters
    ----------
    sampling : SamplingSet
        The sampling set the indices refer to
    entries : dict or iterable of (index, value)
        The coefficients. Indices may be AtomIndex or (j, gamma) pairs
    normalization : Normalization
        The coefficient convention
    floor : float, optional
        Entries with modulus at most floor * max modulus are dropped.
        Defaults to the configured SPARSE_FLOOR

    Attributes
    ----------
    sampling
    group
    normalization

    Raises
    ------
    LieProfileDomainError
        If a value is not finite
    LieProfilePreconditionError
        If an index is repeated
    LieProfileLayoutError
        If an index does not match the lattice layout
    """
    def __init__(self, sampling, entries, normalization, floor=None):
        if floor is None:
            from .settings import lieprofile_settings
            floor = lieprofile_settings.sparse_floor
        if normalization.kind not in ('L1', 'Lp'):
            raise exceptions.LieProfileDomainError(
                'normalization', normalization, "kind 'L1' or 'Lp'")
        if isinstance(entries, dict):
            entries = entries.items()
        dim = sampling.group.dim
        values = {}
        for index, value in entries:
            index = atom_index(*index)
            if len(index.gamma) != dim:
                raise exceptions.LieProfileLayoutError(
                    'atom index %s' % (index, ), dim, len(index.gamma))
            if index in values:
                raise exceptions.LieProfilePreconditionError(
                    'Duplicate atom index %s' % (index, ))
            value = complex(value)
            if not np.isfinite(value):
                raise exceptions.LieProfileDomainError(
                    'coefficient %s' % (index, ), value, 'finite')
            values[index] = value
        if values:
            top = max(abs(v) for v in values.values())
            values = {k: v for k, v in values.items() if abs(v) > floor * top}
        self._sampling = sampling
        self._normalization = normalization
        self._entries = dict(sorted(values.items()))

    @property
    def sampling(self):
        return self._sampling

    @property
    def group(self):
        return self._sampling.group

    @property
    def normalization(self):
        return self._normalization

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __contains__(self, index):
        return atom_index(*index) in self._entries

    def __getitem__(self, index):
        return self._entries[atom_index(*index)]

    def __eq__(self, other):
        if not isinstance(other, CoefficientField):
            return False
        return (self._sampling == other._sampling and
                self._normalization == other._normalization and
                self._entries == other._entries)

    def __ne__(self, other):
        return not self.__eq__(other)

    def get(self, index, default=0j):
        return self._entries.get(atom_index(*index), default)

    def items(self):
        """(index, value) pairs in index order"""
        return list(self._entries.items())

    @property
    def indices(self):
        return list(self._entries)

    @property
    def values(self):
        return np.array(list(self._entries.values()), dtype=complex)

    @property
    def scales(self):
        return np.array([idx.j for idx in self._entries], dtype=int)

    def _new(self, entries, normalization=None):
        return CoefficientField(
            self._sampling, entries,
            self._normalization if normalization is None else normalization,
            floor=0.)

    def scaled(self, alpha):
        """The field multiplied by a scalar"""
        return self._new({k: alpha * v for k, v in self._entries.items()})

    def restricted(self, indices):
        """The field restricted to a set of indices"""
        indices = set(atom_index(*i) for i in indices)
        return self._new({k: v for k, v in self._entries.items()
                          if k in indices})

    def transformed(self, translation=None, scale_shift=0):
        """The field reindexed by a dyadic dilation then a lattice translation

        Index (j, gamma) goes to (j + k, t . 2^k . gamma), a bijection of
        the index set for k >= 0.

        Parameters
        ----------
        translation : sequence of int, optional
            Lattice point t applied on the left
        scale_shift : int, optional
            k >= 0
        """
        gs = self._sampling
        moved = {}
        for index, value in self._entries.items():
            gamma = gs.lattice_dilate(index.gamma, scale_shift)
            if translation is not None:
                gamma = gs.lattice_multiply(translation, gamma)
            moved[atom_index(index.j + scale_shift, gamma)] = value
        return self._new(moved)

    def convert(self, normalization):
        """The same coefficients in another normalization

        The L1 and Lp_atoms(p) coefficients of a layer j differ by the
        factor 2^{-jQ/p}; conversions are logged.

        Parameters
        ----------
        normalization : Normalization
            The target convention

        Returns
        -------
        CoefficientField
        """
        if normalization == self._normalization:
            return self
        Q = self.group.Q
        j = self.scales.astype(float)
        factor = np.ones_like(j)
        if self._normalization.kind == 'Lp':
            factor *= 2. ** (j * Q / self._normalization.p)
        if normalization.kind == 'Lp':
            factor *= 2. ** (-j * Q / normalization.p)
        logger.info('Converting %d coefficients from %s to %s', len(self),
                    describe(self._normalization), describe(normalization))
        return self._new(dict(zip(self._entries, self.values * factor)),
                         normalization)


def norm_params(s, p, q, Q=None):
    """Validated NormParams

    Parameters
    ----------
    s, p, q : float
        Smoothness, integrability and summability
    Q : int, optional
        If given, warn when (s, p) is not a critical pair

    Raises
    ------
    LieProfileUnsupportedError
        If p or q is infinite
    LieProfileDomainError
        If p or q is below one
    """
    for name, value in (('p', p), ('q', q)):
        if value == np.inf:
            raise exceptions.LieProfileUnsupportedError(
                'the endpoint %s = inf' % name)
        if not value >= 1:
            raise exceptions.LieProfileDomainError(name, value, '%s >= 1'
                                                   % name)
    if Q is not None and abs(s / Q + 1. / p - 0.5) > 1e-12:
        logger.debug('NormParams (s=%g, p=%g) is not a critical pair for '
                     'Q=%d', s, p, Q)
    return NormParams(float(s), float(p), float(q))


def discrete_besov_norm(c, np_):
    """The sequence norm of the homogeneous Besov space

    (sum_j (sum_gamma (2^{j(s - Q/p)} |c_{j gamma}|)^p)^{q/p})^{1/q}, on
    L1 coefficients. Lp_atoms fields are converted first.

    Parameters
    ----------
    c : CoefficientField
        The coefficients
    np_ : NormParams
        (s, p, q), with p and q finite

    Returns
    -------
    float
    """
    s, p, q = norm_params(*np_)
    if not len(c):
        return 0.
    if c.normalization.kind != 'L1':
        c = c.convert(L1_ATOMS)
    Q = c.group.Q
    scales = c.scales
    moduli = np.abs(c.values)
    total = 0.
    for j in np.unique(scales):
        layer = moduli[scales == j] * 2. ** (j * (s - Q / p))
        total += np.sum(layer ** p) ** (q / p)
    return float(total ** (1. / q))


def sobolev_seq_norm(c):
    """The l2 norm of Lp_atoms coefficients

    Raises
    ------
    LieProfileNormalizationError
        If c is not in an Lp_atoms normalization
    """
    if c.normalization.kind != 'Lp':
        raise exceptions.LieProfileNormalizationError(
            'Lp_atoms', describe(c.normalization))
    return float(np.linalg.norm(c.values))


def lp_proxy_norm(c):
    """The l^p norm of Lp_atoms(p) coefficients, the L^p proxy"""
    if c.normalization.kind != 'Lp':
        raise exceptions.LieProfileNormalizationError(
            'Lp_atoms', describe(c.normalization))
    if not len(c):
        return 0.
    return float(np.sum(np.abs(c.values) ** c.normalization.p) ** (
        1. / c.normalization.p))


def reorder(c):
    """Entries by decreasing modulus, ties by (j, gamma) ascending

    Returns
    -------
    list of Ranked
        rank starts at 1
    """
    ordered = sorted(c.items(), key=lambda kv: (-abs(kv[1]), kv[0]))
    return [Ranked(m, index, value)
            for m, (index, value) in enumerate(ordered, 1)]


def q_m(c, M):
    """The nonlinear projector keeping the M largest coefficients

    Parameters
    ----------
    c : CoefficientField
        The field
    M : int
        Number of kept entries, M >= 1

    Returns
    -------
    kept : CoefficientField
    E_M : frozenset of AtomIndex
    """
    if M < 1:
        raise exceptions.LieProfileDomainError('M', M, 'M >= 1')
    E_M = frozenset(r.index for r in reorder(c)[:M])
    return c.restricted(E_M), E_M


def mterm_error_curve(c, np_, M_list, target_norm=None):
    """Error of the best M-term approximation for each M

    Parameters
    ----------
    c : CoefficientField
        The field
    np_ : NormParams
        Parameters of the discrete Besov norm measuring c - Q_M c
    M_list : iterable of int
        Values of M, each >= 1
    target_norm : callable, optional
        Maps a CoefficientField to a norm, e.g. synthesis followed by a
        Lebesgue norm on the abelian model. Replaces the sequence norm

    Returns
    -------
    list of (int, float)
    """
    ranked = reorder(c)
    norm = target_norm
    if norm is None:
        def norm(field):
            return discrete_besov_norm(field, np_)
    curve = []
    for M in M_list:
        if M < 1:
            raise exceptions.LieProfileDomainError('M', M, 'M >= 1')
        residual = c.restricted(r.index for r in ranked[M:])
        curve.append((int(M), 0. if not len(residual) else norm(residual)))
    return curve


def _check_domination(c_small, c_big):
    missing = set(c_small.indices) - set(c_big.indices)
    if missing:
        raise exceptions.LieProfilePreconditionError(
            'c_small has entries outside the support of c_big: %s'
            % sorted(missing)[:5])
    for index, value in c_small.items():
        if abs(value) > abs(c_big[index]) * (1 + 1e-12):
            raise exceptions.LieProfilePreconditionError(
                'Domination violated at %s: |%s| > |%s|'
                % (index, value, c_big[index]))


def unconditionality_ratio(c_small, c_big, np_, target_norm=None):
    """Norm ratio of a dominated field to its dominating field

    Parameters
    ----------
    c_small, c_big : CoefficientField
        Fields with |c_small| <= |c_big| entrywise on the support of c_big
    np_ : NormParams
        Used for L1 fields when no target norm is given
    target_norm : callable, optional
        Function-level norm of a field, e.g. the homogeneous Sobolev norm of
        its synthesis on the abelian model

    Returns
    -------
    float
        The ratio; 0 when c_big vanishes
    """
    _check_domination(c_small, c_big)
    norm = target_norm
    if norm is None:
        if c_big.normalization.kind == 'Lp':
            norm = sobolev_seq_norm
        else:
            def norm(field):
                return discrete_besov_norm(field, np_)
    big = norm(c_big) if len(c_big) else 0.
    if big == 0:
        return 0.
    small = norm(c_small) if len(c_small) else 0.
    return float(small / big)


def estimate_unconditional_constant(c_big, np_, trials=100, rng=None,
                                    target_norm=None):
    """Monte-Carlo estimate of the unconditionality constant D

    Draws random sign flips of c_big and records the norm ratios.

    Returns
    -------
    UnconditionalityEstimate
        d_est is the largest observed ratio
    """
    rng = np.random.default_rng(rng)
    indices = c_big.indices
    values = c_big.values
    ratios = np.empty(trials)
    for t in range(trials):
        signs = rng.choice([-1., 1.], size=len(values))
        flipped = CoefficientField(c_big.sampling,
                                   dict(zip(indices, values * signs)),
                                   c_big.normalization, floor=0.)
        ratios[t] = unconditionality_ratio(flipped, c_big, np_, target_norm)
    d_est = float(ratios.max()) if trials else 0.
    logger.info('Unconditionality constant estimate D = %.6f over %d trials',
                d_est, trials)
    return UnconditionalityEstimate(d_est, ratios)


__all__ = ['AtomIndex', 'CoefficientField', 'Normalization', 'NormParams',
           'L1_ATOMS', 'lp_atoms', 'norm_params', 'discrete_besov_norm',
           'sobolev_seq_norm', 'lp_proxy_norm', 'reorder', 'q_m',
           'mterm_error_curve', 'unconditionality_ratio',
           'estimate_unconditional_constant']

# ----------------------------------------------------------------------------
# Copyright (c) 2024-, LieProfile development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

"""Finite-horizon profile decomposition of bounded coefficient sequences

The extraction works entirely on coefficient fields: a profile is a bundle
of atoms stored relative to a core track (scale h_n = 2^{-j}, core
kappa_n = 2^{-j} . gamma), so that it runs identically on every preset
group. Limits and orthogonality are decided on the last `tail` snapshots.
"""

import logging
from collections import namedtuple

import numpy as np
import pandas as pd

from . import exceptions
from .coefficients import reorder, sobolev_seq_norm
from .sampling import atom_index


logger = logging.getLogger(__name__)

SCALE_ORTHOGONAL = 'ScaleOrthogonal'
CORE_ORTHOGONAL = 'CoreOrthogonal'
NOT_ORTHOGONAL = 'NotOrthogonal'
UNDECIDED = 'Undecided'
ORTHOGONAL_KINDS = (SCALE_ORTHOGONAL, CORE_ORTHOGONAL)

MODES = ('strict', 'exploratory')

Verdict = namedtuple('Verdict', ['kind', 'scale_gap', 'rel_pos', 'detail'])
Verdict.__doc__ = """Outcome of `classify_pair`

scale_gap is log2(h_a / h_b) on the last snapshot, or the stabilized
integer gap for NotOrthogonal, where rel_pos holds the stabilized relative
position of b seen from a.
"""

ProfileAtom = namedtuple('ProfileAtom', ['rel_scale', 'rel_pos', 'coeff'])

Limit = namedtuple('Limit', ['rank', 'value', 'radius', 'converged'])

RemainderSplit = namedtuple('RemainderSplit', [
    'n', 'L', 'M', 'r1_norm', 'r2_lp_proxy', 'r_norm', 'profile_error',
    'coefficient_drift', 'track_alignment', 'mismatch'])

BookkeepingReport = namedtuple('BookkeepingReport', [
    'partition', 'increments', 'nested', 'r2_monotone',
    'max_m_dependence', 'passed'])


class SequenceSnapshots(object):
    """A finite horizon of coefficient fields u_n

    Parameters
    ----------
    sampling : SamplingSet
        The sampling set shared by every field
    n_values : sequence of int
        Strictly increasing snapshot labels
    fields : sequence of CoefficientField
        One Lp_atoms field per label

    Attributes
    ----------
    sampling
    group
    n_values
    fields
    normalization
    K_bound

    Raises
    ------
    LieProfileLayoutError
        If the labels and fields do not match
    LieProfileNormalizationError
        If the fields do not share one Lp_atoms normalization
    LieProfilePreconditionError
        If labels do not increase or a field uses another sampling set
    """
    def __init__(self, sampling, n_values, fields):
        n_values = [int(n) for n in n_values]
        fields = list(fields)
        if len(n_values) != len(fields):
            raise exceptions.LieProfileLayoutError(
                'snapshots', len(n_values), len(fields))
        if not fields:
            raise exceptions.LieProfileInsufficientDataError(0, 1)
        if any(b <= a for a, b in zip(n_values, n_values[1:])):
            raise exceptions.LieProfilePreconditionError(
                'Snapshot labels must increase strictly: %s' % n_values)
        norm = fields[0].normalization
        for field in fields:
            if field.sampling != sampling:
                raise exceptions.LieProfilePreconditionError(
                    'Snapshot uses sampling %s, expected %s'
                    % (field.sampling.to_json(), sampling.to_json()))
            if field.normalization != norm or norm.kind != 'Lp':
                raise exceptions.LieProfileNormalizationError(
                    'one shared Lp_atoms normalization',
                    '%s and %s' % (norm, field.normalization))
        self._sampling = sampling
        self._n_values = n_values
        self._fields = fields
        self._K = max(sobolev_seq_norm(f) for f in fields)
        if not np.isfinite(self._K):
            raise exceptions.LieProfileDomainError(
                'K_bound', self._K, 'finite')

    @property
    def sampling(self):
        return self._sampling

    @property
    def group(self):
        return self._sampling.group

    @property
    def n_values(self):
        return list(self._n_values)

    @property
    def fields(self):
        return list(self._fields)

    @property
    def normalization(self):
        return self._fields[0].normalization

    @property
    def K_bound(self):
        return self._K

    def __len__(self):
        return len(self._fields)

    def __iter__(self):
        return iter(zip(self._n_values, self._fields))

    def field(self, n):
        try:
            return self._fields[self._n_values.index(n)]
        except ValueError:
            raise exceptions.LieProfileRangeError(
                'n', n, self._n_values[0], self._n_values[-1])


class ScaleCorePair(object):
    """A scale sequence h_n and a core sequence kappa_n

    Parameters
    ----------
    group : GroupSpec
        The group the cores live in
    h : array_like
        Positive scales, one per snapshot
    kappa : array_like
        Cores, one point per snapshot
    """
    def __init__(self, group, h, kappa):
        h = np.asarray(h, dtype=float).ravel()
        kappa = group._check(np.atleast_2d(np.asarray(kappa, dtype=float)))
        if kappa.shape[0] != h.shape[0]:
            raise exceptions.LieProfileLayoutError(
                'cores', h.shape[0], kappa.shape[0])
        if np.any(h <= 0):
            raise exceptions.LieProfileDomainError('h', h.min(), 'h > 0')
        self._group = group
        self._h = h
        self._kappa = kappa

    @classmethod
    def from_indices(cls, sampling, indices):
        """The pair h_n = 2^{-j_n}, kappa_n = 2^{-j_n} . gamma_n"""
        indices = [atom_index(*i) for i in indices]
        h = np.ldexp(1., [-i.j for i in indices])
        kappa = np.array([sampling.position(i) for i in indices])
        return cls(sampling.group, h, kappa)

    @classmethod
    def from_dict(cls, group, description, sampling=None):
        """Builds a pair from {h, kappa} or, with a sampling set, {j, gamma}"""
        if 'h' in description:
            return cls(group, description['h'], description['kappa'])
        if sampling is None:
            raise exceptions.LieProfilePreconditionError(
                'Index tracks {j, gamma} need a sampling set')
        return cls.from_indices(
            sampling, zip(description['j'], description['gamma']))

    def to_dict(self):
        return {'h': self._h.tolist(), 'kappa': self._kappa.tolist()}

    @property
    def group(self):
        return self._group

    @property
    def h(self):
        return self._h.copy()

    @property
    def kappa(self):
        return self._kappa.copy()

    def __len__(self):
        return len(self._h)


def _nondecreasing(values, tol):
    return bool(np.all(np.diff(values) >= -tol))


def classify_pair(a, b, tail, T_div, eps_stable):
    """Decides the orthogonality of two scale/core pairs on a tail

    The checks run in order on the last `tail` snapshots:

    * ScaleOrthogonal when |log2(h_a / h_b)| exceeds T_div on the last
      snapshot, is nondecreasing and grows.
    * With a stable scale gap, CoreOrthogonal when
      rho_n = |kappa_a^{-1} . kappa_b|_G / max(h_a, h_b) exceeds T_div on
      the last snapshot, is nondecreasing and grows.
    * NotOrthogonal when the scale gap is an integer j and the relative
      position h_b^{-1} . (kappa_a^{-1} . kappa_b) is constant within
      eps_stable.
    * Undecided otherwise.

    Parameters
    ----------
    a, b : ScaleCorePair
        The pairs, on the same group and horizon
    tail : int
        Number of trailing snapshots examined
    T_div : float
        Divergence threshold
    eps_stable : float
        Stability tolerance

    Returns
    -------
    Verdict

    Raises
    ------
    LieProfileInsufficientDataError
        If the horizon is shorter than the tail
    """
    if len(a) != len(b):
        raise exceptions.LieProfileLayoutError('pair horizon', len(a), len(b))
    if len(a) < tail or tail < 1:
        raise exceptions.LieProfileInsufficientDataError(len(a), tail)
    g = a.group
    h_a, h_b = a.h[-tail:], b.h[-tail:]
    k_a, k_b = a.kappa[-tail:], b.kappa[-tail:]
    gap = np.log2(h_a / h_b)
    abs_gap = np.abs(gap)
    if (abs_gap[-1] > T_div and _nondecreasing(abs_gap, eps_stable) and
            np.ptp(abs_gap) > eps_stable):
        return Verdict(SCALE_ORTHOGONAL, float(gap[-1]), None,
                       '|scale gap| grows from %g to %g'
                       % (abs_gap[0], abs_gap[-1]))
    if np.ptp(gap) > eps_stable:
        return Verdict(UNDECIDED, float(gap[-1]), None,
                       'scale gap moves in [%g, %g] without diverging past '
                       '%g' % (gap.min(), gap.max(), T_div))
    diff = g.multiply(g.inverse(k_a), k_b)
    rho = g.hom_norm(diff) / np.maximum(h_a, h_b)
    if (rho[-1] > T_div and
            _nondecreasing(rho, eps_stable * max(1., rho.max())) and
            np.ptp(rho) > eps_stable * max(1., rho.max())):
        return Verdict(CORE_ORTHOGONAL, float(gap[-1]), None,
                       'rescaled core distance grows from %g to %g'
                       % (rho[0], rho[-1]))
    rel = g.dilate(1. / h_b, diff)
    spread = float(np.max(np.ptp(rel, axis=0)))
    scale = max(1., float(np.max(np.abs(rel))))
    gap_int = int(np.round(gap.mean()))
    if spread <= eps_stable * scale and \
            abs(gap.mean() - gap_int) <= eps_stable:
        rel_pos = tuple(float(v) for v in rel.mean(axis=0))
        return Verdict(NOT_ORTHOGONAL, gap_int, rel_pos,
                       'relative position stable within %g' % spread)
    return Verdict(UNDECIDED, float(gap[-1]), None,
                   'relative position spread %g, rescaled core distance '
                   '%g' % (spread, rho[-1]))


class ExtractionParams(namedtuple('ExtractionParams', [
        'M_max', 'L_max', 'eps_conv', 'T_div', 'eps_stable', 'tail',
        'mode'])):
    """Parameters of `extract`

    Attributes
    ----------
    M_max : int
        Number of ranks processed
    L_max : int
        Largest number of profiles entered in the ledgers
    eps_conv : float
        Cauchy radius tolerance for the limits d_m
    T_div : float
        Divergence threshold of `classify_pair`
    eps_stable : float
        Stability tolerance of `classify_pair`
    tail : int
        Number of trailing snapshots examined
    mode : str
        'strict' halts on Undecided pairs and nonconvergent ranks,
        'exploratory' flags them and continues
    """
    __slots__ = ()

    _JSON_KEYS = ('M_max', 'L_max', 'eps_conv', 'T_div', 'eps_stable',
                  'tail', 'mode')

    def validated(self):
        for name in ('M_max', 'L_max', 'tail'):
            if int(getattr(self, name)) < 1:
                raise exceptions.LieProfileDomainError(
                    name, getattr(self, name), '%s >= 1' % name)
        for name in ('eps_conv', 'T_div', 'eps_stable'):
            if not float(getattr(self, name)) > 0:
                raise exceptions.LieProfileDomainError(
                    name, getattr(self, name), '%s > 0' % name)
        if self.mode not in MODES:
            raise exceptions.LieProfileDomainError(
                'mode', self.mode, 'one of %s' % ', '.join(MODES))
        return ExtractionParams(int(self.M_max), int(self.L_max),
                                float(self.eps_conv), float(self.T_div),
                                float(self.eps_stable), int(self.tail),
                                self.mode)

    @classmethod
    def from_settings(cls, **overrides):
        """Parameters from the configuration, with keyword overrides"""
        from .settings import lieprofile_settings as s
        values = {'M_max': s.m_max, 'L_max': s.l_max,
                  'eps_conv': s.eps_conv, 'T_div': s.t_div,
                  'eps_stable': s.eps_stable, 'tail': s.tail,
                  'mode': s.mode}
        values.update(overrides)
        return cls(**values).validated()

    @classmethod
    def from_dict(cls, description):
        """Parameters from a params.json description

        Missing keys fall back to the configuration; unknown keys raise.
        """
        unknown = set(description) - set(cls._JSON_KEYS)
        if unknown:
            raise exceptions.LieProfileDomainError(
                'params', sorted(unknown),
                'keys among %s' % ', '.join(cls._JSON_KEYS))
        return cls.from_settings(**description)

    def to_dict(self):
        return dict(self._asdict())


class Profile(object):
    """A bundle of atoms relative to a core track

    Attributes
    ----------
    index : int
        Profile number, from 1
    founder : int
        Rank that opened the profile
    atoms : list of ProfileAtom
        (rel_scale, rel_pos, coeff) with coeff the limit d_m
    core_track : list of AtomIndex
        lambda_l(n), one per snapshot
    provenance : list of int
        The ranks absorbed, E(l, M_max)
    """
    def __init__(self, index, founder, core_track, pair, identity, coeff):
        self.index = index
        self.founder = founder
        self.core_track = list(core_track)
        self.pair = pair
        self.atoms = [ProfileAtom(0, tuple(float(v) for v in identity),
                                  coeff)]
        self.provenance = [founder]
        self.escape = None

    def absorb(self, rank, rel_scale, rel_pos, coeff):
        for atom in self.atoms:
            if atom.rel_scale == rel_scale and \
                    np.allclose(atom.rel_pos, rel_pos, rtol=0, atol=1e-9):
                raise exceptions.LieProfileInvariantError(
                    'Rank %d duplicates atom (%d, %s) of profile %d'
                    % (rank, rel_scale, rel_pos, self.index))
        self.atoms.append(ProfileAtom(int(rel_scale), tuple(rel_pos), coeff))
        self.provenance.append(rank)

    def atoms_up_to(self, M):
        """The atoms of phi^{l,M}, absorbed from ranks <= M"""
        return [a for a, m in zip(self.atoms, self.provenance) if m <= M]

    def ranks_up_to(self, M):
        """E(l, M)"""
        return [m for m in self.provenance if m <= M]

    @property
    def norm_squared(self):
        """||phi^l||^2 = sum |d|^2 on orthonormal atoms"""
        return float(sum(abs(a.coeff) ** 2 for a in self.atoms))

    def to_dict(self, n_values):
        return {
            'index': self.index,
            'founder_rank': self.founder,
            'escape': self.escape,
            'norm': float(np.sqrt(self.norm_squared)),
            'provenance': list(self.provenance),
            'atoms': [{'rel_scale': a.rel_scale,
                       'rel_pos': [float(v) for v in a.rel_pos],
                       're': float(np.real(a.coeff)),
                       'im': float(np.imag(a.coeff))} for a in self.atoms],
            'core_track': [{'n': n, 'j': idx.j, 'gamma': list(idx.gamma)}
                           for n, idx in zip(n_values, self.core_track)]}


def _estimate_limits(values, tail, eps_conv):
    """Tail means of the rank sequences with their Cauchy radii"""
    limits = []
    for m, seq in enumerate(values, 1):
        window = seq[-tail:]
        value = complex(window.mean())
        radius = float(np.max(np.abs(window - value)))
        limits.append(Limit(m, value, radius, radius <= eps_conv))
    return limits


def _escape_status(pair, tail, T_div, eps_stable):
    """How the core track of a profile leaves every compact set"""
    g = pair.group
    stationary = ScaleCorePair(g, np.ones(len(pair)),
                               np.zeros((len(pair), g.dim)))
    kind = classify_pair(pair, stationary, tail, T_div, eps_stable).kind
    return {SCALE_ORTHOGONAL: 'scale', CORE_ORTHOGONAL: 'core',
            NOT_ORTHOGONAL: 'stationary'}.get(kind, 'undetermined')


def extract(s, params=None):
    """Extracts profiles from a sequence of coefficient fields

    For each rank m (coefficients reordered by decreasing modulus) the
    limit d_m is the tail mean of d_{m,n}. Rank 1 opens profile 1; each
    later rank is classified against the core track of every profile:
    a NotOrthogonal verdict absorbs it into the lowest such profile with
    its stabilized (j~, gamma~), and when all verdicts are orthogonal it
    opens a new profile.

    Parameters
    ----------
    s : SequenceSnapshots
        The sequence
    params : ExtractionParams, optional
        Defaults to the configuration

    Returns
    -------
    ProfileDecomposition

    Raises
    ------
    LieProfileInsufficientDataError
        If the horizon is shorter than the tail or a field has fewer than
        M_max entries
    LieProfileNonconvergentError
        In strict mode, if a limit fails the Cauchy test
    LieProfileUndecidableError
        In strict mode, if a rank is Undecided against some profile and
        NotOrthogonal to none
    """
    params = ExtractionParams.from_settings() if params is None else \
        params.validated()
    if len(s) < params.tail:
        raise exceptions.LieProfileInsufficientDataError(len(s), params.tail)
    ranked = [reorder(f) for f in s.fields]
    available = min(len(r) for r in ranked)
    if available < params.M_max:
        raise exceptions.LieProfileInsufficientDataError(available,
                                                         params.M_max)
    M_max = params.M_max
    gs = s.sampling
    tracks = [[ranked[t][m].index for t in range(len(s))]
              for m in range(M_max)]
    values = [np.array([ranked[t][m].value for t in range(len(s))])
              for m in range(M_max)]

    limits = _estimate_limits(values, params.tail, params.eps_conv)
    nonconvergent = [lim.rank for lim in limits if not lim.converged]
    for lim in limits:
        if not lim.converged:
            if params.mode == 'strict':
                raise exceptions.LieProfileNonconvergentError(
                    lim.rank, lim.radius, params.eps_conv)
            logger.warning('Rank %d does not converge: Cauchy radius %.3g',
                           lim.rank, lim.radius)

    pairs = [ScaleCorePair.from_indices(gs, track) for track in tracks]
    identity = s.group.identity()
    profiles = [Profile(1, 1, tracks[0], pairs[0], identity,
                        limits[0].value)]
    nu, log, flagged = [1], [], []
    for i in range(2, M_max + 1):
        verdicts = [classify_pair(p.pair, pairs[i - 1], params.tail,
                                  params.T_div, params.eps_stable)
                    for p in profiles]
        for p, v in zip(profiles, verdicts):
            log.append({'rank': i, 'profile': p.index, 'kind': v.kind,
                        'scale_gap': v.scale_gap, 'detail': v.detail})
        absorbing = [(p, v) for p, v in zip(profiles, verdicts)
                     if v.kind == NOT_ORTHOGONAL]
        undecided = [(p, v) for p, v in zip(profiles, verdicts)
                     if v.kind == UNDECIDED]
        if absorbing:
            p, v = absorbing[0]
            p.absorb(i, v.scale_gap, v.rel_pos, limits[i - 1].value)
            logger.debug('Rank %d absorbed into profile %d at (%d, %s)',
                         i, p.index, v.scale_gap, v.rel_pos)
        else:
            if undecided:
                p, v = undecided[0]
                if params.mode == 'strict':
                    raise exceptions.LieProfileUndecidableError(i, p.index, v)
                logger.warning('Rank %d undecided against profile %d (%s), '
                               'opening a new profile', i, p.index, v.detail)
                flagged.append(i)
            profiles.append(Profile(len(profiles) + 1, i, tracks[i - 1],
                                    pairs[i - 1], identity,
                                    limits[i - 1].value))
            logger.debug('Rank %d opens profile %d', i, len(profiles))
        nu.append(len(profiles))

    for p in profiles:
        p.escape = _escape_status(p.pair, params.tail, params.T_div,
                                  params.eps_stable)
    logger.info('Extracted %d profiles from %d ranks over %d snapshots',
                len(profiles), M_max, len(s))
    return ProfileDecomposition(s, params, profiles, limits, tracks, values,
                                nu, log, flagged, nonconvergent)


def _lp_proxy(values, p):
    if not values:
        return 0.
    return float(np.sum(np.abs(np.array(values)) ** p) ** (1. / p))


def _l2(values):
    return float(np.sqrt(sum(abs(v) ** 2 for v in values)))


def _accumulate(target, items, sign=1.):
    for key, value in items:
        target[key] = target.get(key, 0j) + sign * value


class ProfileDecomposition(object):
    """The result of `extract`

    Rendered profile atoms are keyed by their AtomIndex when they land on
    the lattice, and by ('off', j, rounded point) otherwise; every key is
    treated as one orthonormal atom in the sequence norms.

    Attributes
    ----------
    snapshots
    params
    profiles
    limits
    nu
    classification_log
    flagged
    nonconvergent
    """
    def __init__(self, snapshots, params, profiles, limits, tracks, values,
                 nu, classification_log, flagged, nonconvergent):
        self.snapshots = snapshots
        self.params = params
        self.profiles = profiles
        self.limits = limits
        self.nu = nu
        self.classification_log = classification_log
        self.flagged = flagged
        self.nonconvergent = nonconvergent
        self._tracks = tracks
        self._values = values
        self._positions = {n: t for t, n in enumerate(snapshots.n_values)}
        self._render_cache = {}

    @property
    def n_profiles(self):
        return len(self.profiles)

    @property
    def n_values(self):
        return self.snapshots.n_values

    @property
    def p(self):
        return self.snapshots.normalization.p

    def _t(self, n):
        try:
            return self._positions[n]
        except KeyError:
            raise exceptions.LieProfileRangeError(
                'n', n, self.n_values[0], self.n_values[-1])

    def partition(self, M):
        """The sets E(l, M) of ranks absorbed by each profile"""
        return [set(p.ranks_up_to(M)) for p in self.profiles]

    def _key(self, j, point):
        gs = self.snapshots.sampling
        gamma = gs.encode(point)
        if gamma is not None:
            return atom_index(j, gamma)
        return ('off', int(j), tuple(round(float(v), 9) for v in point))

    def render(self, ell, n, M=None):
        """Coefficients of phi^{l,M} placed on the core lambda_l(n)

        Returns
        -------
        list of (key, value)
        """
        cache_key = (ell, n, M)
        if cache_key not in self._render_cache:
            profile = self.profiles[ell - 1]
            core = profile.core_track[self._t(n)]
            atoms = profile.atoms if M is None else profile.atoms_up_to(M)
            gs = self.snapshots.sampling
            items = []
            for atom in atoms:
                j, point = gs.place(core, atom.rel_scale, atom.rel_pos)
                items.append((self._key(j, point), atom.coeff))
            self._render_cache[cache_key] = items
        return self._render_cache[cache_key]

    def _check_L(self, L):
        if not 0 <= L <= self.n_profiles:
            raise exceptions.LieProfileRangeError('L', L, 0, self.n_profiles)

    def remainder(self, n, L):
        """r_{n,L} = u_n - sum_{l <= L} phi^l placed on lambda_l(n)"""
        self._check_L(L)
        r = dict(self.snapshots.field(n).items())
        for ell in range(1, L + 1):
            _accumulate(r, self.render(ell, n), -1.)
        return r

    def _rank_items(self, ranks, t, limit=False):
        return [(self._tracks[m - 1][t],
                 self.limits[m - 1].value if limit else
                 self._values[m - 1][t]) for m in ranks]

    def remainder_split(self, n, L, M):
        """Splits r_{n,L} into r1(n, L, M) and r2(n, L, M)

        r1 collects, for the profiles l <= L, the profile error
        phi^{l,M} - phi^l, the coefficient drift
        sum_{m in E(l,M)} (d_{m,n} - d_m) psi_{lambda(m,n)} and the track
        alignment sum_{m in E(l,M)} d_m psi_{lambda(m,n)} - phi^{l,M}. r2
        collects the ranks of E(l, M) for l > L and the ranks beyond M.

        Returns
        -------
        RemainderSplit
            The l2 norm of r1, the l^p proxy of r2 and the norm of r_{n,L}

        Raises
        ------
        LieProfileInvariantError
            If r1 + r2 differs from r_{n,L}
        """
        self._check_L(L)
        if not max(L, 1) <= M <= self.params.M_max:
            raise exceptions.LieProfileRangeError('M', M, max(L, 1),
                                                  self.params.M_max)
        t = self._t(n)
        profile_error, drift, alignment = {}, {}, {}
        r2 = {}
        for ell, profile in enumerate(self.profiles, 1):
            ranks = profile.ranks_up_to(M)
            if ell <= L:
                _accumulate(profile_error, self.render(ell, n, M))
                _accumulate(profile_error, self.render(ell, n), -1.)
                _accumulate(drift, self._rank_items(ranks, t))
                _accumulate(drift, self._rank_items(ranks, t, True), -1.)
                _accumulate(alignment, self._rank_items(ranks, t, True))
                _accumulate(alignment, self.render(ell, n, M), -1.)
            else:
                _accumulate(r2, self._rank_items(ranks, t))
        kept = set(self._tracks[m][t] for m in range(M))
        _accumulate(r2, [(k, v) for k, v in self.snapshots.field(n).items()
                         if k not in kept])
        r1 = {}
        for part in (profile_error, drift, alignment):
            _accumulate(r1, part.items())
        r = self.remainder(n, L)
        total = dict(r1)
        _accumulate(total, r2.items())
        _accumulate(total, r.items(), -1.)
        mismatch = _l2(total.values())
        scale = max(1., _l2(self.snapshots.field(n).values))
        if mismatch > 1e-10 * scale:
            raise exceptions.LieProfileInvariantError(
                'r1 + r2 differs from r_{n,L} by %g at n=%d, L=%d, M=%d'
                % (mismatch, n, L, M))
        return RemainderSplit(n, L, M, _l2(r1.values()),
                              _lp_proxy(list(r2.values()), self.p),
                              _l2(r.values()),
                              _l2(profile_error.values()),
                              _l2(drift.values()),
                              _l2(alignment.values()), mismatch)

    def _sum_r(self, n, L, M):
        t = self._t(n)
        split = {}
        for ell, profile in enumerate(self.profiles, 1):
            ranks = profile.ranks_up_to(M)
            if ell <= L:
                _accumulate(split, self.render(ell, n), -1.)
            _accumulate(split, self._rank_items(ranks, t))
        kept = set(self._tracks[m][t] for m in range(M))
        _accumulate(split, [(k, v) for k, v in
                            self.snapshots.field(n).items()
                            if k not in kept])
        return split

    def energy_check(self, L):
        """Per-snapshot energy defects
        e(n) = | ||u_n||^2 - sum_{l <= L} ||phi^l||^2 - ||r_{n,L}||^2 |

        Returns
        -------
        pandas.Series
            Indexed by n
        """
        self._check_L(L)
        profiles = sum(p.norm_squared for p in self.profiles[:L])
        defects = []
        for n, field in self.snapshots:
            u = float(np.sum(np.abs(field.values) ** 2))
            r = _l2(self.remainder(n, L).values()) ** 2
            defects.append(abs(u - profiles - r))
        return pd.Series(defects, index=pd.Index(self.n_values, name='n'),
                         name='defect')

    def ledger_L_values(self):
        return list(range(0, min(self.n_profiles, self.params.L_max) + 1))

    def energy_ledger(self):
        """Per (n, L): ||u_n||^2, sum ||phi^l||^2, ||r_{n,L}||^2, defect"""
        rows = []
        for L in self.ledger_L_values():
            profiles = sum(p.norm_squared for p in self.profiles[:L])
            for n, field in self.snapshots:
                u = float(np.sum(np.abs(field.values) ** 2))
                r = _l2(self.remainder(n, L).values()) ** 2
                rows.append({'n': n, 'L': L, 'u_norm_sq': u,
                             'profiles_norm_sq': profiles, 'r_norm_sq': r,
                             'defect': abs(u - profiles - r)})
        return pd.DataFrame(rows, columns=['n', 'L', 'u_norm_sq',
                                           'profiles_norm_sq', 'r_norm_sq',
                                           'defect'])

    def remainder_ledger(self, M=None):
        """Per (n, L): norms of r1, r2 and r_{n,L} at M (default M_max)"""
        M = self.params.M_max if M is None else M
        rows = []
        for L in self.ledger_L_values():
            for n in self.n_values:
                split = self.remainder_split(n, L, max(M, L, 1))
                rows.append(split._asdict())
        columns = list(RemainderSplit._fields)
        return pd.DataFrame(rows, columns=columns)

    def check_bookkeeping(self):
        """Checks the invariants of the induction

        E(l, M) partitions the first M ranks, the profile count grows by
        at most one per rank, E(l, M) grows with M, sup_n of the r2 proxy
        does not grow with L, and r1 + r2 does not depend on M.

        Returns
        -------
        BookkeepingReport
        """
        M_max = self.params.M_max
        partition = nested = True
        previous = None
        for M in range(1, M_max + 1):
            sets = self.partition(M)
            union = set().union(*sets)
            if union != set(range(1, M + 1)) or \
                    sum(len(e) for e in sets) != M:
                partition = False
            if previous is not None and not all(
                    a <= b for a, b in zip(previous, sets)):
                nested = False
            previous = sets
        increments = all(b - a in (0, 1) for a, b in zip(self.nu,
                                                          self.nu[1:]))
        ledger = self.remainder_ledger()
        sup_r2 = ledger.groupby('L')['r2_lp_proxy'].max().values
        r2_monotone = bool(np.all(np.diff(sup_r2) <= 1e-12))
        dependence = 0.
        for L in self.ledger_L_values():
            for n in self.n_values:
                ref = self._sum_r(n, L, M_max)
                for M in range(max(L, 1), M_max):
                    total = self._sum_r(n, L, M)
                    _accumulate(total, ref.items(), -1.)
                    dependence = max(dependence, _l2(total.values()))
        passed = partition and nested and increments and r2_monotone and \
            dependence <= 1e-12
        return BookkeepingReport(partition, increments, nested, r2_monotone,
                                 dependence, passed)

    def diagnostics(self):
        """Measured constants and flags of the run"""
        K = self.snapshots.K_bound
        top = max(abs(lim.value) for lim in self.limits)
        return {'K_bound': K,
                'sup_limit_over_K': top / K if K else 0.,
                'nonconvergent_ranks': list(self.nonconvergent),
                'flagged_ranks': list(self.flagged),
                'max_cauchy_radius': max(lim.radius for lim in self.limits),
                'n_profiles': self.n_profiles}

    def to_dict(self):
        """The JSON report of the decomposition"""
        energy = self.energy_ledger()
        remainder = self.remainder_ledger()
        return {
            'parameters': self.params.to_dict(),
            'normalization': {'kind': 'Lp', 'p': self.p},
            'n_values': self.n_values,
            'nu': list(self.nu),
            'profiles': [p.to_dict(self.n_values) for p in self.profiles],
            'limits': [{'rank': lim.rank, 're': lim.value.real,
                        'im': lim.value.imag, 'radius': lim.radius,
                        'converged': lim.converged} for lim in self.limits],
            'classification': list(self.classification_log),
            'energy_ledger': energy.to_dict(orient='records'),
            'remainder_ledger': remainder.to_dict(orient='records'),
            'diagnostics': self.diagnostics()}


def energy_check(d, L):
    """Per-snapshot energy defect of a decomposition, see
    `ProfileDecomposition.energy_check`"""
    return d.energy_check(L)


def remainder_split(d, n, L, M):
    """The r1 / r2 split of a decomposition, see
    `ProfileDecomposition.remainder_split`"""
    return d.remainder_split(n, L, M)


def energy_trend(defects):
    """True when the median defect of the last quarter is below the first

    Parameters
    ----------
    defects : pandas.Series
        Output of `energy_check`
    """
    values = np.asarray(defects, dtype=float)
    quarter = max(len(values) // 4, 1)
    return bool(np.median(values[-quarter:]) < np.median(values[:quarter]))


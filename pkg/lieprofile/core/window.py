# ----------------------------------------------------------------------------
# Copyright (c) 2024-, LieProfile development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import logging

import numpy as np

from . import exceptions
from .base import LieProfileObject


logger = logging.getLogger(__name__)


def smooth_step(t, sharpness=1.):
    """The C-infinity step g(t) / (g(t) + g(1 - t)), g(t) = exp(-s / t)

    Vanishes for t <= 0 and equals 1 for t >= 1.
    """
    t = np.asarray(t, dtype=float)

    def g(u):
        positive = u > 0
        return np.where(positive,
                        np.exp(-sharpness / np.where(positive, u, 1.)), 0.)

    a = g(t)
    b = g(1 - t)
    return np.where(t <= 0, 0., np.where(t >= 1, 1., a / (a + b)))


class Window(LieProfileObject):
    """A spectral window pair (phi_hat, psi_hat) on the half line

    phi_hat is 1 on [0, cutoff], decreases smoothly on
    [cutoff, cutoff * ladder] (in log scale) and vanishes beyond.
    psi_hat(xi) = sqrt(phi_hat(xi / ladder) - phi_hat(xi)) is supported in
    [cutoff, cutoff * ladder^2] and its squares along the ladder telescope
    to one.

    Parameters
    ----------
    sharpness : float, optional
        Steepness of the transition, positive
    cutoff : float, optional
        End of the flat part of phi_hat
    ladder : float, optional
        Ratio between consecutive windows, greater than one

    Attributes
    ----------
    sharpness
    cutoff
    ladder
    support

    Methods
    -------
    phi_hat
    psi_hat
    """
    _kind = 'window'

    def __init__(self, sharpness=1., cutoff=0.25, ladder=4.):
        if not sharpness > 0:
            raise exceptions.LieProfileDomainError(
                'sharpness', sharpness, 'sharpness > 0')
        if not cutoff > 0:
            raise exceptions.LieProfileDomainError(
                'cutoff', cutoff, 'cutoff > 0')
        if not ladder > 1:
            raise exceptions.LieProfileDomainError(
                'ladder', ladder, 'ladder > 1')
        self._sharpness = float(sharpness)
        self._cutoff = float(cutoff)
        self._ladder = float(ladder)

    def _key(self):
        return (self._sharpness, self._cutoff, self._ladder)

    @property
    def sharpness(self):
        return self._sharpness

    @property
    def cutoff(self):
        return self._cutoff

    @property
    def ladder(self):
        return self._ladder

    @property
    def support(self):
        """The interval containing the support of psi_hat"""
        return (self._cutoff, self._cutoff * self._ladder ** 2)

    def phi_hat(self, xi):
        xi = np.asarray(xi, dtype=float)
        ratio = np.where(xi > 0, xi, self._cutoff) / self._cutoff
        u = np.log2(ratio) / np.log2(self._ladder)
        return 1. - smooth_step(u, self._sharpness)

    def psi_hat(self, xi):
        xi = np.asarray(xi, dtype=float)
        diff = self.phi_hat(xi / self._ladder) - self.phi_hat(xi)
        return np.sqrt(np.maximum(diff, 0.))

    def covered_range(self, J):
        """The xi range on which the ladder terms |k| <= J sum to one"""
        return (self._cutoff * self._ladder ** (1 - J),
                self._cutoff * self._ladder ** (J + 1))

    def to_dict(self):
        return {'kind': self._kind, 'sharpness': self._sharpness,
                'cutoff': self._cutoff, 'ladder': self._ladder}

    @classmethod
    def from_dict(cls, description):
        return cls(description.get('sharpness', 1.),
                   description.get('cutoff', 0.25),
                   description.get('ladder', 4.))


class NarrowWindow(Window):
    """Window with psi_hat supported in [1/2, 1]

    The partition of unity runs along the ladder sqrt(2), so that the
    squares of psi_hat(2^{-k/2} xi) sum to one.
    """
    _kind = 'narrow_window'

    def __init__(self, sharpness=1.):
        super(NarrowWindow, self).__init__(sharpness, 0.5, np.sqrt(2.))

    @classmethod
    def from_dict(cls, description):
        return cls(description.get('sharpness', 1.))


def build_window(sharpness=None):
    """The standard window: flat on [0, 1/4], psi_hat supported in [1/4, 4]

    Parameters
    ----------
    sharpness : float, optional
        Defaults to the configured WINDOW_SHARPNESS

    Returns
    -------
    Window
    """
    if sharpness is None:
        from .settings import lieprofile_settings
        sharpness = lieprofile_settings.window_sharpness
    return Window(sharpness)


def build_narrow_window(sharpness=None):
    """The narrow-band window with psi_hat supported in [1/2, 1]"""
    if sharpness is None:
        from .settings import lieprofile_settings
        sharpness = lieprofile_settings.window_sharpness
    return NarrowWindow(sharpness)


def partition_sum(w, J, xi, power=2):
    """sum_{|k| <= J} psi_hat(ladder^{-k} xi)^power"""
    xi = np.asarray(xi, dtype=float)
    total = np.zeros_like(xi)
    for k in range(-J, J + 1):
        total += w.psi_hat(xi / w.ladder ** k) ** power
    return total


def verify_partition(w, J, grid, power=2):
    """Maximal deviation of the truncated partition of unity from one

    Parameters
    ----------
    w : Window
        The window
    J : int
        Truncation, terms |k| <= J
    grid : array_like
        Sample points xi > 0. Points outside the covered range are
        excluded with a warning
    power : int, optional
        Exponent applied to psi_hat, 2 for the partition identity

    Returns
    -------
    float
        max |sum_{|k| <= J} psi_hat(ladder^{-k} xi)^power - 1|
    """
    grid = np.asarray(grid, dtype=float)
    low, high = w.covered_range(J)
    covered = (grid >= low) & (grid <= high)
    if not covered.all():
        logger.warning('%d of %d grid points lie outside the covered range '
                       '[%g, %g] and were excluded', (~covered).sum(),
                       grid.size, low, high)
    if not covered.any():
        return 0.
    deviation = np.abs(partition_sum(w, J, grid[covered], power) - 1.)
    return float(deviation.max())

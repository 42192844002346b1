# ----------------------------------------------------------------------------
# Copyright (c) 2024-, LieProfile development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

"""Spectral calculus on the abelian model R^d

Functions live on the torus [-R, R)^d sampled at N points per axis,
x_n = -R + n h with h = 2R / N. A grid function is identified with its
trigonometric interpolant, so that point evaluation, translation and the
wavelet analysis at lattice points are exact operations on the torus.

The kernels are the Fourier multipliers m_j(xi) = psi_hat(4^{-j} |xi|^2),
i.e. psi_j = 2^{jQ} psi(2^j x) is the L1 dilate of the kernel psi whose
transform is psi_hat(|xi|^2).
"""

import logging
from collections import namedtuple

import numpy as np

from . import exceptions
from .coefficients import CoefficientField, L1_ATOMS, lp_atoms
from .group import AbelianGroup
from .sampling import atom_index


logger = logging.getLogger(__name__)

# Rows of an evaluation matrix built at once
_CHUNK = 2048

GridDescriptor = namedtuple('GridDescriptor', ['dim', 'N', 'extent'])

FrameReconstruction = namedtuple('FrameReconstruction',
                                 ['function', 'iterations', 'residual'])

ConvolutionBound = namedtuple('ConvolutionBound',
                              ['j', 'l', 'constant', 'max_abs'])


def grid_descriptor(dim, N, extent):
    """Validated GridDescriptor

    Raises
    ------
    LieProfileDomainError
        If N is not a power of two or the extent is not positive
    """
    dim, N = int(dim), int(N)
    if dim < 1:
        raise exceptions.LieProfileDomainError('dim', dim, 'dim >= 1')
    if N < 2 or N & (N - 1):
        raise exceptions.LieProfileDomainError(
            'N', N, 'N a power of two')
    if not extent > 0:
        raise exceptions.LieProfileDomainError(
            'extent', extent, 'extent > 0')
    return GridDescriptor(dim, N, float(extent))


def _spacing(desc):
    return 2 * desc.extent / desc.N


def _axis(desc):
    return -desc.extent + _spacing(desc) * np.arange(desc.N)


def _axis_frequencies(desc):
    return 2 * np.pi * np.fft.fftfreq(desc.N, _spacing(desc))


def _squared_frequencies(desc):
    """|xi|^2 on the full frequency grid"""
    xi2 = _axis_frequencies(desc) ** 2
    out = np.zeros((desc.N, ) * desc.dim)
    for axis in range(desc.dim):
        shape = [1] * desc.dim
        shape[axis] = desc.N
        out = out + xi2.reshape(shape)
    return out


class GridFunction(object):
    """Samples of a function on the torus [-R, R)^d

    Parameters
    ----------
    samples : array_like
        Complex samples of shape (N, ) * d, N a power of two
    extent : float
        The half period R

    Attributes
    ----------
    samples
    extent
    dim
    N
    spacing
    descriptor

    Raises
    ------
    LieProfileLayoutError
        If the samples are not a hypercube
    LieProfileDomainError
        If N is not a power of two or a sample is not finite
    """
    def __init__(self, samples, extent):
        samples = np.array(samples, dtype=complex)
        if samples.ndim < 1 or len(set(samples.shape)) != 1:
            raise exceptions.LieProfileLayoutError(
                'grid samples', 'a hypercube N^d', samples.shape)
        self._desc = grid_descriptor(samples.ndim, samples.shape[0], extent)
        if not np.all(np.isfinite(samples)):
            raise exceptions.LieProfileDomainError(
                'samples', 'non-finite values', 'finite')
        samples.setflags(write=False)
        self._samples = samples
        self._spectrum = None

    @classmethod
    def zeros(cls, desc):
        desc = grid_descriptor(*desc)
        return cls(np.zeros((desc.N, ) * desc.dim), desc.extent)

    @classmethod
    def from_callable(cls, func, desc):
        """Samples func(*mesh) on the grid of a GridDescriptor"""
        desc = grid_descriptor(*desc)
        mesh = np.meshgrid(*([_axis(desc)] * desc.dim), indexing='ij')
        return cls(np.broadcast_to(func(*mesh), mesh[0].shape), desc.extent)

    @classmethod
    def from_spectrum(cls, spectrum, extent):
        return cls(np.fft.ifftn(spectrum), extent)

    @property
    def samples(self):
        return self._samples

    @property
    def extent(self):
        return self._desc.extent

    @property
    def dim(self):
        return self._desc.dim

    @property
    def N(self):
        return self._desc.N

    @property
    def spacing(self):
        return _spacing(self._desc)

    @property
    def descriptor(self):
        return self._desc

    def axis(self):
        """Sample coordinates along one axis"""
        return _axis(self._desc)

    def mesh(self):
        return np.meshgrid(*([self.axis()] * self.dim), indexing='ij')

    def spectrum(self):
        """The DFT of the samples"""
        if self._spectrum is None:
            spectrum = np.fft.fftn(self._samples)
            spectrum.setflags(write=False)
            self._spectrum = spectrum
        return self._spectrum

    def mean(self):
        return complex(self._samples.mean())

    def without_mean(self):
        """The function with its zero-frequency mode removed"""
        return GridFunction(self._samples - self._samples.mean(), self.extent)

    def inner(self, other):
        """<self, other> = h^d sum self * conj(other)"""
        return complex(self.spacing ** self.dim *
                       np.vdot(other.samples, self._samples))

    def _check_compatible(self, other):
        if other.descriptor != self._desc:
            raise exceptions.LieProfileLayoutError(
                'grid function', self._desc, other.descriptor)

    def __add__(self, other):
        self._check_compatible(other)
        return GridFunction(self._samples + other.samples, self.extent)

    def __sub__(self, other):
        self._check_compatible(other)
        return GridFunction(self._samples - other.samples, self.extent)

    def __mul__(self, alpha):
        return GridFunction(alpha * self._samples, self.extent)

    __rmul__ = __mul__

    def __repr__(self):
        return 'GridFunction(dim=%d, N=%d, extent=%g)' % self._desc


class KernelSet(object):
    """Cached multipliers psi_hat(4^{-j} |xi|^2) for j in a range

    Parameters
    ----------
    window : Window
        The spectral window
    j_range : pair of int
        Inclusive range [j_min, j_max]
    desc : GridDescriptor
        The frequency grid

    Attributes
    ----------
    window
    j_range
    j_values
    descriptor
    """
    def __init__(self, window, j_range, desc):
        j_min, j_max = (int(j) for j in j_range)
        if j_max < j_min:
            raise exceptions.LieProfileDomainError(
                'j_range', j_range, 'j_min <= j_max')
        self._window = window
        self._j_range = (j_min, j_max)
        self._desc = grid_descriptor(*desc)
        xi2 = _squared_frequencies(self._desc)
        self._multipliers = {}
        for j in range(j_min, j_max + 1):
            m = window.psi_hat(xi2 * 4. ** (-j))
            m.setflags(write=False)
            self._multipliers[j] = m

    @classmethod
    def covering(cls, window, target, floor=None):
        """The KernelSet whose layers cover a band

        Parameters
        ----------
        window : Window
            The spectral window
        target : GridDescriptor or GridFunction
            With a descriptor, all nonzero grid frequencies are covered.
            With a function, only frequencies where its spectrum exceeds
            `floor` times its maximum
        floor : float, optional
            Defaults to the configured SPARSE_FLOOR
        """
        if isinstance(target, GridFunction):
            if floor is None:
                from .settings import lieprofile_settings
                floor = lieprofile_settings.sparse_floor
            desc = target.descriptor
            mod = np.abs(target.spectrum())
            band = _squared_frequencies(desc)[
                (mod > floor * mod.max()) if mod.max() > 0 else mod > 0]
        else:
            desc = grid_descriptor(*target)
            band = _squared_frequencies(desc)
        band = band[band > 0]
        if not band.size:
            band = np.array([(np.pi / desc.extent) ** 2])
        low, high = window.support
        j_min = int(np.floor(np.log(band.min() / high) / np.log(4.))) + 1
        j_max = int(np.ceil(np.log(band.max() / low) / np.log(4.))) - 1
        return cls(window, (j_min, max(j_min, j_max)), desc)

    @property
    def window(self):
        return self._window

    @property
    def j_range(self):
        return self._j_range

    @property
    def j_values(self):
        return list(range(self._j_range[0], self._j_range[1] + 1))

    @property
    def descriptor(self):
        return self._desc

    def multiplier(self, j):
        """The cached array psi_hat(4^{-j} |xi|^2)

        Raises
        ------
        LieProfileRangeError
            If j is outside the cached range
        """
        try:
            return self._multipliers[j]
        except KeyError:
            raise exceptions.LieProfileRangeError('j', j, *self._j_range)

    def partition(self):
        """sum_j m_j^2 over the cached range"""
        return sum(m ** 2 for m in self._multipliers.values())

    def _check(self, f):
        if f.descriptor != self._desc:
            raise exceptions.LieProfileLayoutError(
                'grid function', self._desc, f.descriptor)


def lp_block(f, ks, j):
    """The Littlewood-Paley block f * psi_j^*

    Parameters
    ----------
    f : GridFunction
        The function
    ks : KernelSet
        Kernels on the grid of f
    j : int
        The layer

    Returns
    -------
    GridFunction
    """
    ks._check(f)
    return GridFunction.from_spectrum(f.spectrum() * ks.multiplier(j),
                                      f.extent)


def calderon_residual(f, ks):
    """Relative L2 distance between f and its Calderon sum"""
    ks._check(f)
    spectrum = f.spectrum()
    total = np.linalg.norm(spectrum)
    if total == 0:
        return 0.
    return float(np.linalg.norm(spectrum * (1 - ks.partition())) / total)


def calderon_reconstruct(f, ks):
    """sum_j f * psi_j^* * psi_j over the layers of ks

    A warning reports the relative residual when the layers do not cover
    the band of f.
    """
    ks._check(f)
    residual = calderon_residual(f, ks)
    if residual > 1e-8:
        logger.warning('Layers %s leave a relative residual %.3g of the '
                       'band energy uncovered', ks.j_range, residual)
    return GridFunction.from_spectrum(f.spectrum() * ks.partition(),
                                      f.extent)


def boundary_mass_fraction(f):
    """Share of the L2 mass of f outside the central half [-R/2, R/2)^d"""
    mass = np.abs(f.samples) ** 2
    total = mass.sum()
    if total == 0:
        return 0.
    inside = np.abs(f.axis()) < f.extent / 2
    mask = np.ones_like(mass, dtype=bool)
    for axis in range(f.dim):
        shape = [1] * f.dim
        shape[axis] = f.N
        mask &= inside.reshape(shape)
    return float(mass[~mask].sum() / total)


def _check_abelian(gs):
    if not isinstance(gs.group, AbelianGroup):
        raise exceptions.LieProfileUnsupportedError(
            'function-level transforms on %s; only the abelian model is '
            'implemented' % gs.group.kind)


def _layer_axes(gs, j, desc):
    """Lattice coordinates and positions of the layer j along each axis"""
    R = desc.extent
    axes = []
    for unit in gs.units:
        step = np.ldexp(unit, -int(j))
        ratio = R / step
        if abs(ratio - round(ratio)) > 1e-9:
            logger.warning('The lattice of layer %d (step %g) does not tile '
                           'the torus of half period %g, frame identities '
                           'are approximate', j, step, R)
        idx = np.arange(int(np.ceil(-ratio)), int(np.ceil(ratio)),
                        dtype=np.int64)
        axes.append((idx, idx * step))
    return axes


def _evaluate(spectrum, positions, desc):
    """The trigonometric interpolant of a spectrum on a product of positions

    Parameters
    ----------
    spectrum : numpy.ndarray
        DFT on the grid of desc
    positions : list of numpy.ndarray
        Positions along each axis

    Returns
    -------
    numpy.ndarray
        Values on the product of the positions
    """
    xi = _axis_frequencies(desc)
    out = spectrum
    for axis, pos in enumerate(positions):
        pieces = []
        for start in range(0, len(pos), _CHUNK):
            E = np.exp(1j * np.outer(pos[start:start + _CHUNK] + desc.extent,
                                     xi))
            pieces.append(np.moveaxis(
                np.tensordot(E, out, axes=([1], [axis])), 0, axis))
        out = np.concatenate(pieces, axis=axis) if pieces else \
            np.zeros(out.shape[:axis] + (0, ) + out.shape[axis + 1:],
                     dtype=complex)
    return out / desc.N ** desc.dim


def _point_spectrum(points, weights, desc):
    """sum_c w_c exp(-i xi . (p_c + R)) on the frequency grid"""
    xi = _axis_frequencies(desc)
    d = desc.dim
    points = np.asarray(points, dtype=float).reshape(-1, d)
    weights = np.asarray(weights, dtype=complex).ravel()
    out = np.zeros((desc.N, ) * d, dtype=complex)
    for start in range(0, len(weights), _CHUNK):
        chunk = slice(start, start + _CHUNK)
        operands = [weights[chunk], [0]]
        for axis in range(d):
            operands += [np.exp(-1j * np.outer(points[chunk, axis] +
                                               desc.extent, xi)),
                         [0, axis + 1]]
        operands.append(list(range(1, d + 1)))
        out += np.einsum(*operands)
    return out


def analyze(f, ks, gs, p=None, floor=None):
    """Wavelet coefficients of f against the lattice of gs

    The L1 coefficient c_{j,gamma} = <f, psi_{j,gamma}> is the block
    f * psi_j^* sampled at 2^{-j} . gamma. With p given, the field holds
    d = 2^{-jQ/p} c, the Lp_atoms(p) expansion coefficients.

    Parameters
    ----------
    f : GridFunction
        The function
    ks : KernelSet
        Kernels on the grid of f
    gs : SamplingSet
        Abelian sampling set
    p : float, optional
        Integrability of the atoms, 1 < p < inf. L1 coefficients if None
    floor : float, optional
        Relative sparse floor, defaults to the configured SPARSE_FLOOR

    Returns
    -------
    CoefficientField
    """
    _check_abelian(gs)
    ks._check(f)
    if floor is None:
        from .settings import lieprofile_settings
        floor = lieprofile_settings.sparse_floor
    normalization = L1_ATOMS if p is None else lp_atoms(p)
    leak = boundary_mass_fraction(f)
    if leak > 1e-8:
        logger.warning('%.3g of the mass lies outside the central half of '
                       'the torus, coefficients feel the periodization', leak)
    Q = gs.group.Q
    spectrum = f.spectrum()
    top = np.abs(spectrum).max()
    entries = {}
    for j in ks.j_values:
        layer = spectrum * ks.multiplier(j)
        if top == 0 or np.abs(layer).max() <= floor * top:
            continue
        axes = _layer_axes(gs, j, f.descriptor)
        values = _evaluate(layer, [pos for _, pos in axes], f.descriptor)
        if p is not None:
            values = values * 2. ** (-j * Q / p)
        grids = np.meshgrid(*[idx for idx, _ in axes], indexing='ij')
        gammas = np.stack([g.ravel() for g in grids], axis=-1)
        for gamma, value in zip(gammas, values.ravel()):
            entries[atom_index(j, gamma)] = value
    return CoefficientField(gs, entries, normalization, floor=floor)


def _synthesize_points(items, ks, desc, Q, p):
    """sum of coefficients times atoms at arbitrary positions

    Parameters
    ----------
    items : iterable of (j, position, coefficient)
        Coefficients of L^p-normalized atoms, or of 2^{-jQ} psi_{j,gamma}
        when p is None
    """
    by_layer = {}
    for j, position, value in items:
        by_layer.setdefault(int(j), []).append((position, value))
    h = _spacing(desc)
    spectrum = np.zeros((desc.N, ) * desc.dim, dtype=complex)
    for j in sorted(by_layer):
        points, weights = zip(*by_layer[j])
        factor = 2. ** (j * Q * (1. / p - 1)) if p is not None else \
            2. ** (-j * Q)
        spectrum += (ks.multiplier(j) * factor *
                     _point_spectrum(points, weights, desc))
    return GridFunction.from_spectrum(spectrum / h ** desc.dim, desc.extent)


def synthesize(c, ks, gs, target=None):
    """sum_lambda d_lambda psi_lambda on a grid

    Lp_atoms(p) fields are expanded on the atoms
    2^{jQ/p} psi(gamma^{-1} . 2^j . x); L1 fields on 2^{-jQ} psi_{j,gamma},
    which gives the same function after conversion.

    Parameters
    ----------
    c : CoefficientField
        The coefficients
    ks : KernelSet
        Kernels covering the scales of c
    gs : SamplingSet
        Abelian sampling set
    target : GridDescriptor, optional
        Defaults to the grid of ks

    Returns
    -------
    GridFunction
    """
    _check_abelian(gs)
    desc = ks.descriptor if target is None else grid_descriptor(*target)
    if desc != ks.descriptor:
        raise exceptions.LieProfileLayoutError(
            'target grid', ks.descriptor, desc)
    p = c.normalization.p if c.normalization.kind == 'Lp' else None
    items = [(index.j, gs.position(index), value)
             for index, value in c.items()]
    return _synthesize_points(items, ks, desc, gs.group.Q, p)


def reconstruct(c, ks, gs, max_iter=None, tol=None):
    """Recovers a function from its analysis coefficients

    Solves S g = synthesize(c), S = synthesize o analyze, by the relaxed
    iteration g <- g + |W| (synthesize(c) - S g) started at |W| synthesize(c),
    |W| the volume of the fundamental domain of the lattice.

    Parameters
    ----------
    c : CoefficientField
        Coefficients produced by `analyze`
    ks : KernelSet
        Kernels covering the band
    gs : SamplingSet
        Abelian sampling set
    max_iter, tol : optional
        Default to FRAME_MAX_ITER and FRAME_TOLERANCE

    Returns
    -------
    FrameReconstruction
        The function, the number of corrections and the final relative
        residual
    """
    from .settings import lieprofile_settings

    if max_iter is None:
        max_iter = lieprofile_settings.frame_max_iter
    if tol is None:
        tol = lieprofile_settings.frame_tolerance
    p = c.normalization.p if c.normalization.kind == 'Lp' else None
    omega = gs.cell_volume
    y = synthesize(c, ks, gs)
    scale = np.linalg.norm(y.samples)
    g = omega * y
    residual, iterations = 0., 0
    if scale == 0:
        return FrameReconstruction(g, 0, 0.)
    while True:
        r = y - synthesize(analyze(g, ks, gs, p, floor=0.), ks, gs)
        residual = float(np.linalg.norm(r.samples) / scale)
        if residual <= tol or iterations >= max_iter:
            break
        g = g + omega * r
        iterations += 1
    if residual > tol:
        logger.warning('Frame correction stopped after %d iterations at '
                       'relative residual %.3g', iterations, residual)
    return FrameReconstruction(g, iterations, residual)


def sobolev_norm(f, s):
    """The homogeneous Sobolev norm ||(-Delta)^{s/2} f||_{L2}

    The zero frequency is excluded. A nonzero mean is logged, and raises
    for s < 0 where the mode is singular.

    Raises
    ------
    LieProfileDomainError
        If s < 0 and the mean of f does not vanish
    """
    spectrum = f.spectrum()
    dc = abs(spectrum.flat[0])
    if dc > 1e-12 * max(np.abs(spectrum).max(), 1e-300):
        if s < 0:
            raise exceptions.LieProfileDomainError(
                'zero-frequency mode', dc, 'vanishing mean for s < 0')
        logger.debug('Zero-frequency mode %.3g dropped from the homogeneous '
                     'norm', dc)
    xi2 = _squared_frequencies(f.descriptor)
    weight = np.zeros_like(xi2)
    nonzero = xi2 > 0
    weight[nonzero] = xi2[nonzero] ** s
    h, N, d = f.spacing, f.N, f.dim
    return float(np.sqrt(h ** d / N ** d *
                         np.sum(weight * np.abs(spectrum) ** 2)))


def lebesgue_norm(f, p):
    """Riemann-sum L^p norm with cell measure h^d, 1 <= p <= inf"""
    if not p >= 1:
        raise exceptions.LieProfileDomainError('p', p, 'p >= 1')
    moduli = np.abs(f.samples)
    if p == np.inf:
        return float(moduli.max())
    return float((f.spacing ** f.dim * np.sum(moduli ** p)) ** (1. / p))


def besov_norm_continuous(f, ks, s, p, q):
    """The l^q norm over j of 2^{js} ||f * psi_j^*||_{L^p}

    Band leakage outside the layers of ks is reported as a warning with
    the relative residual.
    """
    for name, value in (('p', p), ('q', q)):
        if value == np.inf:
            raise exceptions.LieProfileUnsupportedError(
                'the endpoint %s = inf' % name)
        if not value >= 1:
            raise exceptions.LieProfileDomainError(name, value,
                                                   '%s >= 1' % name)
    residual = calderon_residual(f.without_mean(), ks)
    if residual > 1e-8:
        logger.warning('Band leakage: layers %s miss a relative share %.3g '
                       'of the function', ks.j_range, residual)
    terms = np.array([2. ** (j * s) * lebesgue_norm(lp_block(f, ks, j), p)
                      for j in ks.j_values])
    return float(np.sum(terms ** q) ** (1. / q))


def atom(index, ks, gs, p=None):
    """Grid samples of the atom of an AtomIndex

    psi_{j,gamma} = 2^{jQ} psi(gamma^{-1} . 2^j . x) if p is None, else
    the L^p-normalized 2^{jQ/p} psi(gamma^{-1} . 2^j . x).
    """
    _check_abelian(gs)
    index = atom_index(*index)
    Q = gs.group.Q
    # synthesize expands on 2^{-jQ} psi_{j,gamma}
    value = 2. ** (index.j * Q) if p is None else 1.
    norm = L1_ATOMS if p is None else lp_atoms(p)
    field = CoefficientField(gs, {index: value}, norm, floor=0.)
    return synthesize(field, ks, gs)


def gram_matrix(indices, ks, gs, p=None):
    """Inner products <psi_a, psi_b> between atoms, row a, column b"""
    atoms = [atom(index, ks, gs, p) for index in indices]
    return np.array([[a.inner(b) for b in atoms] for a in atoms])


def _periodic_offset(f, point):
    """Per-axis offsets x - point reduced to [-R, R) on the mesh of f"""
    R = f.extent
    return [((x - a + R) % (2 * R)) - R for x, a in zip(f.mesh(), point)]


def kernel_decay_constant(ks, gs, j=0):
    """Fitted c in |psi_j(x)| <= c 2^{jQ} / (1 + 2^j |x|)^{Q+1}

    Measured on the grid samples of the atom psi_{j,0}, with distances
    taken on the torus.
    """
    Q = gs.group.Q
    psi = atom((j, (0, ) * gs.group.dim), ks, gs)
    offsets = _periodic_offset(psi, np.zeros(gs.group.dim))
    dist = np.sqrt(sum(o ** 2 for o in offsets))
    envelope = 2. ** (j * Q) / (1 + 2. ** j * dist) ** (Q + 1)
    return float(np.max(np.abs(psi.samples) / envelope))


def convolution_bound_check(ks, gs, index, l):
    """Checks the envelope of psi_{j,gamma} * psi_l^*

    The product is measured against
    2^{jQ} / (1 + |gamma^{-1} . 2^j . x|)^{Q+1}.

    Returns
    -------
    ConvolutionBound
        The fitted envelope constant and the largest modulus. The
        convolution vanishes when |l - j| > 1
    """
    index = atom_index(*index)
    Q = gs.group.Q
    conv = lp_block(atom(index, ks, gs), ks, l)
    offsets = _periodic_offset(conv, gs.position(index))
    dist = 2. ** index.j * np.sqrt(sum(o ** 2 for o in offsets))
    envelope = 2. ** (index.j * Q) / (1 + dist) ** (Q + 1)
    moduli = np.abs(conv.samples)
    return ConvolutionBound(index.j, int(l), float(np.max(moduli / envelope)),
                            float(moduli.max()))


def translate(f, point):
    """The left translate x -> f(a^{-1} x) = f(x - a)"""
    point = np.asarray(point, dtype=float)
    if point.shape != (f.dim, ):
        raise exceptions.LieProfileLayoutError('translation', f.dim,
                                               point.shape)
    xi = _axis_frequencies(f.descriptor)
    phase = np.ones((f.N, ) * f.dim, dtype=complex)
    for axis in range(f.dim):
        shape = [1] * f.dim
        shape[axis] = f.N
        phase = phase * np.exp(-1j * xi * point[axis]).reshape(shape)
    return GridFunction.from_spectrum(f.spectrum() * phase, f.extent)


def compose_dilation(f, h):
    """x -> f(h x), zero where h x leaves the torus"""
    if not h > 0:
        raise exceptions.LieProfileDomainError('h', h, 'h > 0')
    targets = h * f.axis()
    inside = (targets >= -f.extent) & (targets < f.extent)
    values = _evaluate(f.spectrum(), [targets] * f.dim, f.descriptor)
    mask = np.ones_like(values, dtype=bool)
    for axis in range(f.dim):
        shape = [1] * f.dim
        shape[axis] = f.N
        mask &= inside.reshape(shape)
    return GridFunction(np.where(mask, values, 0), f.extent)


def lp_dilate(f, h, p):
    """The L^p-normalized dilate h^{Q/p} f o delta_h"""
    return h ** (f.dim / p) * compose_dilation(f, h)


def render_profile(atoms, core, ks, gs, p):
    """Grid samples of a profile seen from a core index

    Parameters
    ----------
    atoms : iterable
        Triples (rel_scale, rel_pos, coeff) of L^p-normalized atoms relative
        to the core
    core : AtomIndex
        The index (j, gamma) the profile is attached to
    ks : KernelSet
        Kernels covering the rendered scales
    gs : SamplingSet
        Abelian sampling set
    p : float
        Integrability of the atoms

    Returns
    -------
    GridFunction
    """
    _check_abelian(gs)
    g = gs.group
    items = []
    for rel_scale, rel_pos, coeff in atoms:
        j, point = gs.place(core, rel_scale, rel_pos)
        items.append((j, g.dilate_dyadic(-j, point), coeff))
    return _synthesize_points(items, ks, ks.descriptor, g.Q, p)

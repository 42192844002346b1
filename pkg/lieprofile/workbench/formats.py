# ----------------------------------------------------------------------------
# Copyright (c) 2024-, LieProfile development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

"""File formats of the workbench

Coefficient fields and snapshot sequences are JSON-lines files: a header
object on the first line, then one {j, gamma, re, im} object per
coefficient (snapshot lines add their label n). Grids are stored either as
a little-endian binary file (uint32 dim, uint32 N, float64 R, then N^dim
complex64 samples in C order) or, for small grids, as JSON-lines.
"""

import json
import logging
from os.path import splitext

import numpy as np

from lieprofile.core import exceptions
from lieprofile.core.coefficients import (
    CoefficientField, L1_ATOMS, lp_atoms)
from lieprofile.core.profiler import SequenceSnapshots
from lieprofile.core.sampling import SamplingSet, atom_index
from lieprofile.core.transform import GridFunction
from lieprofile.core.util import canonical_json, split_complex


logger = logging.getLogger(__name__)

VERSION = 1
COEFFICIENTS = 'lieprofile.coefficients'
SNAPSHOTS = 'lieprofile.snapshots'
GRID = 'lieprofile.grid'

FORMATS = {'coefficients': COEFFICIENTS, 'snapshots': SNAPSHOTS,
           'grid-jsonl': GRID, 'grid': None}

_GRID_HEADER = np.dtype([('dim', '<u4'), ('N', '<u4'), ('extent', '<f8')])

_LEGACY_HINT = ('files without a normalization tag are no longer read; add '
                '"normalization": {"kind": "L1"} or {"kind": "Lp", "p": P} '
                'to the header line')


def _normalization_to_dict(normalization):
    if normalization.kind == 'L1':
        return {'kind': 'L1'}
    return {'kind': 'Lp', 'p': normalization.p}


def _normalization_from_dict(description):
    if description.get('kind') == 'L1':
        return L1_ATOMS
    if description.get('kind') == 'Lp':
        return lp_atoms(description['p'])
    raise exceptions.LieProfileDomainError(
        'normalization', description, "kind 'L1' or 'Lp'")


def _entry_line(index, value, **extra):
    re, im = split_complex(value)
    entry = {'j': index.j, 'gamma': list(index.gamma), 're': re, 'im': im}
    entry.update(extra)
    return json.dumps(entry, sort_keys=True)


def _header(fmt, sampling, normalization, **extra):
    header = {'format': fmt, 'version': VERSION,
              'sampling': sampling.to_dict(),
              'normalization': _normalization_to_dict(normalization)}
    header.update(extra)
    return json.dumps(header, sort_keys=True)


def write_field(field, path):
    """Writes a CoefficientField as JSON-lines"""
    with open(path, 'w') as f:
        f.write(_header(COEFFICIENTS, field.sampling, field.normalization))
        f.write('\n')
        for index, value in field.items():
            f.write(_entry_line(index, value))
            f.write('\n')


def write_snapshots(snapshots, path):
    """Writes a SequenceSnapshots as JSON-lines"""
    with open(path, 'w') as f:
        f.write(_header(SNAPSHOTS, snapshots.sampling,
                        snapshots.normalization,
                        n_values=snapshots.n_values))
        f.write('\n')
        for n, field in snapshots:
            for index, value in field.items():
                f.write(_entry_line(index, value, n=n))
                f.write('\n')


def write_grid(func, path):
    """Writes a GridFunction in the binary grid format"""
    header = np.array([(func.dim, func.N, func.extent)], dtype=_GRID_HEADER)
    with open(path, 'wb') as f:
        f.write(header.tobytes())
        f.write(np.ascontiguousarray(func.samples, dtype='<c8').tobytes())


def write_grid_jsonl(func, path):
    """Writes a GridFunction as JSON-lines, one flat C-order sample a line"""
    with open(path, 'w') as f:
        f.write(json.dumps({'format': GRID, 'version': VERSION,
                            'dim': func.dim, 'N': func.N,
                            'extent': func.extent}, sort_keys=True))
        f.write('\n')
        for i, value in enumerate(func.samples.ravel()):
            re, im = split_complex(value)
            f.write(json.dumps({'i': i, 're': re, 'im': im},
                               sort_keys=True))
            f.write('\n')


def write_report(report, path):
    """Writes a JSON report with sorted keys"""
    with open(path, 'w') as f:
        f.write(canonical_json(report))


def _json_lines(path):
    try:
        with open(path) as f:
            for number, line in enumerate(f, 1):
                if not line.strip():
                    continue
                try:
                    yield number, json.loads(line)
                except ValueError as e:
                    raise exceptions.LieProfileIngestionError(
                        path, number, 'invalid JSON (%s)' % e)
    except UnicodeDecodeError:
        raise exceptions.LieProfileIngestionError(
            path, None, 'not a JSON-lines text file')


def _read_header(path, lines, fmt=None):
    try:
        number, header = next(lines)
    except StopIteration:
        raise exceptions.LieProfileIngestionError(path, None, 'empty file')
    if not isinstance(header, dict) or 'format' not in header:
        raise exceptions.LieProfileIngestionError(
            path, number, 'missing header line with a "format" entry')
    if fmt is not None and header['format'] != fmt:
        raise exceptions.LieProfileIngestionError(
            path, number, 'expected format %s, found %s'
            % (fmt, header['format']))
    if header.get('version') != VERSION:
        raise exceptions.LieProfileIngestionError(
            path, number, 'unsupported version %r' % header.get('version'))
    return number, header


def _header_objects(path, number, header):
    if 'normalization' not in header:
        raise exceptions.LieProfileIngestionError(path, number, _LEGACY_HINT)
    try:
        sampling = SamplingSet.from_dict(header['sampling'])
        normalization = _normalization_from_dict(header['normalization'])
    except (KeyError, TypeError, exceptions.LieProfileError) as e:
        raise exceptions.LieProfileIngestionError(
            path, number, 'bad header: %s' % e)
    return sampling, normalization


def _parse_entry(path, number, entry, dim, seen):
    try:
        index = atom_index(entry['j'], entry['gamma'])
        value = complex(float(entry['re']), float(entry['im']))
    except (KeyError, TypeError, ValueError) as e:
        raise exceptions.LieProfileIngestionError(
            path, number, 'malformed coefficient line (%s)' % e)
    if len(index.gamma) != dim:
        raise exceptions.LieProfileIngestionError(
            path, number, 'gamma has %d entries, expected %d'
            % (len(index.gamma), dim))
    if not np.isfinite(value):
        raise exceptions.LieProfileIngestionError(
            path, number, 'non-finite coefficient %r' % value)
    if index in seen:
        raise exceptions.LieProfileIngestionError(
            path, number, 'duplicate index %s, first seen on line %d'
            % (index, seen[index]))
    seen[index] = number
    return index, value


def read_field(path):
    """Reads a JSON-lines CoefficientField

    Raises
    ------
    LieProfileIngestionError
        On a bad header, a missing normalization tag, a non-finite value or
        a repeated index, with the line number
    """
    lines = _json_lines(path)
    number, header = _read_header(path, lines, COEFFICIENTS)
    sampling, normalization = _header_objects(path, number, header)
    seen, entries = {}, {}
    for number, entry in lines:
        index, value = _parse_entry(path, number, entry,
                                    sampling.group.dim, seen)
        entries[index] = value
    return CoefficientField(sampling, entries, normalization, floor=0.)


def read_snapshots(path):
    """Reads a JSON-lines SequenceSnapshots

    Raises
    ------
    LieProfileIngestionError
        As `read_field`, and for labels missing from the header
    """
    lines = _json_lines(path)
    number, header = _read_header(path, lines, SNAPSHOTS)
    sampling, normalization = _header_objects(path, number, header)
    n_values = header.get('n_values')
    if not n_values:
        raise exceptions.LieProfileIngestionError(
            path, number, 'header has no n_values')
    entries = {int(n): {} for n in n_values}
    seen = {n: {} for n in entries}
    for number, entry in lines:
        n = entry.get('n')
        if n not in entries:
            raise exceptions.LieProfileIngestionError(
                path, number, 'snapshot label %r is not in the header' % n)
        index, value = _parse_entry(path, number, entry,
                                    sampling.group.dim, seen[n])
        entries[n][index] = value
    fields = [CoefficientField(sampling, entries[n], normalization, floor=0.)
              for n in sorted(entries)]
    try:
        return SequenceSnapshots(sampling, sorted(entries), fields)
    except exceptions.LieProfileError as e:
        raise exceptions.LieProfileIngestionError(path, None, str(e))


def read_grid(path):
    """Reads a binary grid file"""
    with open(path, 'rb') as f:
        raw = f.read()
    if len(raw) < _GRID_HEADER.itemsize:
        raise exceptions.LieProfileIngestionError(
            path, None, 'truncated grid header')
    header = np.frombuffer(raw[:_GRID_HEADER.itemsize],
                           dtype=_GRID_HEADER)[0]
    dim, N, extent = int(header['dim']), int(header['N']), \
        float(header['extent'])
    data = np.frombuffer(raw[_GRID_HEADER.itemsize:], dtype='<c8')
    if dim < 1 or data.size != N ** dim:
        raise exceptions.LieProfileIngestionError(
            path, None, 'header announces %d^%d samples, found %d'
            % (N, dim, data.size))
    try:
        return GridFunction(data.reshape((N, ) * dim), extent)
    except exceptions.LieProfileError as e:
        raise exceptions.LieProfileIngestionError(path, None, str(e))


def read_grid_jsonl(path):
    """Reads a JSON-lines grid file"""
    lines = _json_lines(path)
    number, header = _read_header(path, lines, GRID)
    try:
        dim, N = int(header['dim']), int(header['N'])
        extent = float(header['extent'])
    except (KeyError, TypeError, ValueError) as e:
        raise exceptions.LieProfileIngestionError(
            path, number, 'bad header: %s' % e)
    samples = np.full(N ** dim, np.nan, dtype=complex)
    for number, entry in lines:
        try:
            i = int(entry['i'])
            value = complex(float(entry['re']), float(entry['im']))
        except (KeyError, TypeError, ValueError) as e:
            raise exceptions.LieProfileIngestionError(
                path, number, 'malformed sample line (%s)' % e)
        if not 0 <= i < samples.size or not np.isnan(samples[i]):
            raise exceptions.LieProfileIngestionError(
                path, number, 'sample %d out of range or repeated' % i)
        if not np.isfinite(value):
            raise exceptions.LieProfileIngestionError(
                path, number, 'non-finite sample %r' % value)
        samples[i] = value
    if np.isnan(samples).any():
        raise exceptions.LieProfileIngestionError(
            path, None, '%d samples missing' % np.isnan(samples).sum())
    return GridFunction(samples.reshape((N, ) * dim), extent)


def detect_format(path):
    """The format of a file, from its extension or its header line"""
    if splitext(path)[1] == '.bin':
        return 'grid'
    lines = _json_lines(path)
    _, header = _read_header(path, lines)
    for name, fmt in FORMATS.items():
        if fmt == header['format']:
            return name
    raise exceptions.LieProfileIngestionError(
        path, 1, 'unknown format %s' % header['format'])


def ingest(path, format=None):
    """Reads and validates an input file

    Parameters
    ----------
    path : str
        The file
    format : {'coefficients', 'snapshots', 'grid', 'grid-jsonl'}, optional
        Detected from the file when omitted

    Returns
    -------
    CoefficientField, SequenceSnapshots or GridFunction

    Raises
    ------
    LieProfileIngestionError
        If the file does not match its format
    """
    if format is None:
        format = detect_format(path)
    readers = {'coefficients': read_field, 'snapshots': read_snapshots,
               'grid': read_grid, 'grid-jsonl': read_grid_jsonl}
    try:
        reader = readers[format]
    except KeyError:
        raise exceptions.LieProfileDomainError(
            'format', format, 'one of %s' % ', '.join(sorted(readers)))
    result = reader(path)
    logger.info('Ingested %s from %s', format, path)
    return result

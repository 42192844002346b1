# ----------------------------------------------------------------------------
# Copyright (c) 2024-, LieProfile development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import hashlib
import json
from datetime import datetime, timezone

import numpy as np


def _to_native(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError('%r is not JSON serializable' % (obj, ))


def canonical_json(obj, indent=2):
    """JSON text with sorted keys, so that equal objects give equal bytes

    numpy scalars and arrays are converted to their python counterparts
    """
    return json.dumps(obj, sort_keys=True, indent=indent,
                      default=_to_native) + '\n'


def file_digest(path, block_size=1 << 16):
    """The sha256 hex digest of a file's contents"""
    h = hashlib.sha256()
    with open(path, 'rb') as f:
        for block in iter(lambda: f.read(block_size), b''):
            h.update(block)
    return h.hexdigest()


def timestamp():
    """The current UTC time in ISO 8601"""
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


def split_complex(value):
    """(re, im) of a complex number as python floats"""
    value = complex(value)
    return value.real, value.imag

# ----------------------------------------------------------------------------
# Copyright (c) 2024-, LieProfile development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import hashlib
import json
from datetime import datetime
from tempfile import NamedTemporaryFile
from unittest import main, TestCase

import numpy as np

from lieprofile.core.util import (
    canonical_json, file_digest, split_complex, timestamp)


class TestUtil(TestCase):
    def test_canonical_json(self):
        a = canonical_json({'b': np.int64(2), 'a': np.float64(0.5)})
        b = canonical_json({'a': 0.5, 'b': 2})
        self.assertEqual(a, b)
        self.assertTrue(a.endswith('\n'))
        obs = json.loads(canonical_json({'v': np.arange(3),
                                         'z': 1 + 2j,
                                         's': frozenset([3, 1]),
                                         'ok': np.bool_(True)}))
        self.assertEqual(obs, {'v': [0, 1, 2], 'z': [1., 2.], 's': [1, 3],
                               'ok': True})
        with self.assertRaises(TypeError):
            canonical_json({'f': object()})

    def test_file_digest(self):
        with NamedTemporaryFile() as tmp_f:
            tmp_f.write(b'lieprofile\n')
            tmp_f.flush()
            self.assertEqual(file_digest(tmp_f.name, block_size=4),
                             hashlib.sha256(b'lieprofile\n').hexdigest())

    def test_timestamp(self):
        obs = datetime.fromisoformat(timestamp())
        self.assertIsNotNone(obs.tzinfo)
        self.assertEqual(obs.microsecond, 0)

    def test_split_complex(self):
        self.assertEqual(split_complex(1.5), (1.5, 0.))
        self.assertEqual(split_complex(np.complex128(1 - 2j)), (1., -2.))


if __name__ == '__main__':
    main()

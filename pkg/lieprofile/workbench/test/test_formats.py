# ----------------------------------------------------------------------------
# Copyright (c) 2024-, LieProfile development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import json
from os.path import join
from shutil import rmtree
from tempfile import mkdtemp
from unittest import main

import numpy as np
import numpy.testing as npt

from lieprofile.core import exceptions
from lieprofile.core.coefficients import L1_ATOMS, CoefficientField
from lieprofile.core.profiler import SequenceSnapshots
from lieprofile.core.testing import LieProfileTestCase
from lieprofile.workbench import formats


class FormatsTestCase(LieProfileTestCase):
    def setUp(self):
        super(FormatsTestCase, self).setUp()
        self.dir = mkdtemp()
        self.gs = self.heisenberg_sampling()

    def tearDown(self):
        rmtree(self.dir)

    def path(self, name):
        return join(self.dir, name)

    def write_lines(self, name, lines):
        path = self.path(name)
        with open(path, 'w') as f:
            for line in lines:
                f.write(line if isinstance(line, str) else json.dumps(line))
                f.write('\n')
        return path

    def header(self, **extra):
        header = {'format': formats.COEFFICIENTS, 'version': 1,
                  'sampling': self.gs.to_dict(),
                  'normalization': {'kind': 'Lp', 'p': 4}}
        header.update(extra)
        return header


class TestCoefficientFiles(FormatsTestCase):
    def test_field_round_trip(self):
        field = self.random_field(self.gs, 20)
        path = self.path('field.jsonl')
        formats.write_field(field, path)
        obs = formats.read_field(path)
        self.assertEqual(obs, field)
        self.assertEqual(obs.normalization, field.normalization)
        self.assertEqual(formats.detect_format(path), 'coefficients')
        self.assertEqual(formats.ingest(path), field)

    def test_l1_field(self):
        field = CoefficientField(self.gs, {(0, (1, 2, 3)): 2 - 1j}, L1_ATOMS,
                                 floor=0.)
        path = self.path('l1.jsonl')
        formats.write_field(field, path)
        with open(path) as f:
            header = json.loads(f.readline())
        self.assertEqual(header['normalization'], {'kind': 'L1'})
        self.assertEqual(formats.read_field(path), field)

    def test_snapshots_round_trip(self):
        fields = [self.random_field(self.gs, 5) for _ in range(3)]
        s = SequenceSnapshots(self.gs, [2, 5, 9], fields)
        path = self.path('snapshots.jsonl')
        formats.write_snapshots(s, path)
        obs = formats.read_snapshots(path)
        self.assertEqual(obs.n_values, [2, 5, 9])
        self.assertEqual(obs.fields, fields)
        self.assertEqual(formats.detect_format(path), 'snapshots')

    def test_non_finite_value(self):
        path = self.write_lines('nan.jsonl', [
            self.header(),
            {'j': 0, 'gamma': [0, 0, 0], 're': 1., 'im': 0.},
            '{"gamma": [1, 0, 0], "im": 0.0, "j": 0, "re": NaN}'])
        with self.assertRaisesRegex(exceptions.LieProfileIngestionError,
                                    'line 3: non-finite'):
            formats.read_field(path)

    def test_legacy_header(self):
        header = self.header()
        del header['normalization']
        path = self.write_lines('legacy.jsonl', [header])
        with self.assertRaisesRegex(exceptions.LieProfileIngestionError,
                                    'normalization tag'):
            formats.read_field(path)

    def test_bad_lines(self):
        entry = {'j': 0, 'gamma': [0, 0, 0], 're': 1., 'im': 0.}
        cases = [
            ('dup.jsonl', [self.header(), entry, entry], 'line 3: duplicate'),
            ('json.jsonl', [self.header(), '{"j": 0,'], 'line 2: invalid'),
            ('gamma.jsonl', [self.header(), dict(entry, gamma=[0])],
             'line 2: gamma has 1'),
            ('keys.jsonl', [self.header(), {'j': 0}], 'line 2: malformed'),
            ('version.jsonl', [self.header(version=7)], 'line 1: unsupported'),
            ('format.jsonl', [self.header(format=formats.GRID)],
             'line 1: expected format'),
            ('empty.jsonl', [], 'empty file'),
            ('norm.jsonl', [self.header(normalization={'kind': 'L2'})],
             'bad header')]
        for name, lines, message in cases:
            path = self.write_lines(name, lines)
            with self.assertRaisesRegex(exceptions.LieProfileIngestionError,
                                        message):
                formats.read_field(path)

    def test_snapshot_labels(self):
        header = self.header(format=formats.SNAPSHOTS, n_values=[1, 2])
        entry = {'j': 0, 'gamma': [0, 0, 0], 're': 1., 'im': 0.}
        path = self.write_lines('labels.jsonl',
                                [header, dict(entry, n=1), dict(entry, n=3)])
        with self.assertRaisesRegex(exceptions.LieProfileIngestionError,
                                    'line 3: snapshot label 3'):
            formats.read_snapshots(path)
        del header['n_values']
        path = self.write_lines('nolabels.jsonl', [header])
        with self.assertRaisesRegex(exceptions.LieProfileIngestionError,
                                    'n_values'):
            formats.read_snapshots(path)

    def test_ingest_unknown_format(self):
        path = self.write_lines('unknown.jsonl',
                                [self.header(format='lieprofile.other')])
        with self.assertRaises(exceptions.LieProfileIngestionError):
            formats.ingest(path)
        with self.assertRaises(exceptions.LieProfileDomainError):
            formats.ingest(path, 'parquet')


class TestGridFiles(FormatsTestCase):
    def setUp(self):
        super(TestGridFiles, self).setUp()
        self.f = self.bump((2, 16, 4.), width=0.8, frequency=2.)

    def test_binary_round_trip(self):
        path = self.path('grid.bin')
        formats.write_grid(self.f, path)
        obs = formats.ingest(path)
        self.assertEqual(obs.descriptor, self.f.descriptor)
        npt.assert_equal(obs.samples,
                         self.f.samples.astype(np.complex64))
        with open(path, 'rb') as f:
            raw = f.read()
        self.assertEqual(len(raw), 16 + 8 * 16 ** 2)

    def test_binary_truncated(self):
        path = self.path('short.bin')
        formats.write_grid(self.f, path)
        with open(path, 'rb') as f:
            raw = f.read()
        with open(path, 'wb') as f:
            f.write(raw[:-8])
        with self.assertRaisesRegex(exceptions.LieProfileIngestionError,
                                    'found 255'):
            formats.read_grid(path)
        with open(path, 'wb') as f:
            f.write(raw[:10])
        with self.assertRaisesRegex(exceptions.LieProfileIngestionError,
                                    'truncated'):
            formats.read_grid(path)

    def test_jsonl_round_trip(self):
        path = self.path('grid.jsonl')
        formats.write_grid_jsonl(self.f, path)
        self.assertEqual(formats.detect_format(path), 'grid-jsonl')
        obs = formats.ingest(path)
        npt.assert_equal(obs.samples, self.f.samples)
        self.assertEqual(obs.extent, 4.)

    def test_jsonl_missing_sample(self):
        path = self.path('grid.jsonl')
        formats.write_grid_jsonl(self.f, path)
        with open(path) as f:
            lines = f.readlines()
        with open(path, 'w') as f:
            f.writelines(lines[:-1])
        with self.assertRaisesRegex(exceptions.LieProfileIngestionError,
                                    '1 samples missing'):
            formats.read_grid_jsonl(path)
        with open(path, 'w') as f:
            f.writelines(lines + [lines[1]])
        with self.assertRaisesRegex(exceptions.LieProfileIngestionError,
                                    'out of range or repeated'):
            formats.read_grid_jsonl(path)


class TestReport(FormatsTestCase):
    def test_write_report(self):
        path = self.path('report.json')
        formats.write_report({'b': np.float64(1.5), 'a': [np.int64(2)]}, path)
        with open(path) as f:
            text = f.read()
        self.assertEqual(json.loads(text), {'a': [2], 'b': 1.5})
        self.assertLess(text.index('"a"'), text.index('"b"'))


if __name__ == '__main__':
    main()

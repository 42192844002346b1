# ----------------------------------------------------------------------------
# Copyright (c) 2024-, LieProfile development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import wraps
from glob import glob
from os import makedirs
from os.path import basename, expanduser, isdir, join, splitext

import click
import numpy as np
from natsort import natsorted

from lieprofile import __version__
from lieprofile.core import exceptions
from lieprofile.core.configuration_manager import ConfigurationManager
from lieprofile.core.group import GroupSpec, abelian
from lieprofile.core.profiler import (
    ExtractionParams, ScaleCorePair, classify_pair, extract)
from lieprofile.core.sampling import SamplingSet
from lieprofile.core.util import file_digest, timestamp
from lieprofile.workbench import formats
from lieprofile.workbench.generator import generate


logger = logging.getLogger('lieprofile')

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_UNDECIDABLE = 2
EXIT_IO = 3

REPORT_FORMAT = 'lieprofile.report'


def exit_code(error):
    """The exit code a failure maps to"""
    if isinstance(error, (exceptions.LieProfileUndecidableError,
                          exceptions.LieProfileNonconvergentError)):
        return EXIT_UNDECIDABLE
    if isinstance(error, (exceptions.LieProfileIngestionError, OSError)):
        return EXIT_IO
    return EXIT_VALIDATION


def _handled(func):
    """Runs a command and exits with the code of its failure"""
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            func(*args, **kwargs)
        except (exceptions.LieProfileError, OSError, ValueError) as e:
            logger.error('%s: %s', type(e).__name__, e)
            click.echo('Error: %s' % e, err=True)
            sys.exit(exit_code(e))
        sys.exit(EXIT_OK)
    return wrapper


class _StderrHandler(logging.StreamHandler):
    """A stream handler bound to whatever sys.stderr is at emit time"""
    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value):
        pass


def setup_logging():
    """Configures the lieprofile logger from the settings, once"""
    from lieprofile.core.settings import lieprofile_settings as settings

    if getattr(logger, '_lieprofile_configured', False):
        return
    logger.setLevel(settings.log_level.upper())
    fmt = logging.Formatter('%(asctime)s %(levelname)s %(name)s: '
                            '%(message)s')
    stream = _StderrHandler()
    stream.setFormatter(fmt)
    logger.addHandler(stream)
    if settings.log_dir:
        makedirs(settings.log_dir, exist_ok=True)
        handler = logging.FileHandler(join(settings.log_dir,
                                           'lieprofile.log'))
        handler.setFormatter(fmt)
        logger.addHandler(handler)
    logger._lieprofile_configured = True


def _load_json(path):
    with open(path) as f:
        try:
            return json.load(f)
        except ValueError as e:
            raise exceptions.LieProfileIngestionError(
                path, None, 'invalid JSON (%s)' % e)


def _input_record(path):
    return {'name': basename(path), 'sha256': file_digest(path)}


def _report(command, parameters, inputs, results):
    return {'format': REPORT_FORMAT, 'version': formats.VERSION,
            'lieprofile_version': __version__, 'command': command,
            'parameters': parameters, 'inputs': inputs,
            'results': results, 'generated_at': timestamp()}


def _sampling_from_spec(description):
    try:
        group = GroupSpec.from_dict(description['group'])
        beta = float(description.get('beta', 1.))
    except KeyError as e:
        raise exceptions.LieProfileGeneratorError(
            'The generator specification lacks %s' % e)
    return group, SamplingSet(group, beta, description.get('tile'))


def run_decomposition(snapshots_fp, params_fp=None, report_fp=None,
                      ledger_csv=None):
    """Ingests snapshots, extracts profiles and writes the report

    Returns
    -------
    dict
        The report
    """
    snapshots = formats.ingest(snapshots_fp, 'snapshots')
    inputs = {'snapshots': _input_record(snapshots_fp)}
    if params_fp is None:
        params = ExtractionParams.from_settings()
    else:
        params = ExtractionParams.from_dict(_load_json(params_fp))
        inputs['params'] = _input_record(params_fp)
    decomposition = extract(snapshots, params)
    bookkeeping = decomposition.check_bookkeeping()
    if not bookkeeping.passed:
        raise exceptions.LieProfileInvariantError(
            'bookkeeping checks failed: %s' % (bookkeeping, ))
    results = decomposition.to_dict()
    results['bookkeeping'] = dict(bookkeeping._asdict())
    report = _report('decompose', params.to_dict(), inputs, results)
    if report_fp is not None:
        formats.write_report(report, report_fp)
    if ledger_csv is not None:
        ledger = decomposition.energy_ledger().merge(
            decomposition.remainder_ledger(), on=['n', 'L'])
        ledger.to_csv(ledger_csv, index=False)
    logger.info('%s: %d profiles', snapshots_fp, decomposition.n_profiles)
    return report


def _batch_item(args):
    snapshots_fp, params_fp, report_fp = args
    try:
        run_decomposition(snapshots_fp, params_fp, report_fp)
    except (exceptions.LieProfileError, OSError, ValueError) as e:
        return snapshots_fp, exit_code(e), str(e)
    return snapshots_fp, EXIT_OK, None


@click.group()
@click.version_option(__version__)
def lieprofile():
    """Wavelet profile decomposition on stratified groups"""
    setup_logging()


@lieprofile.command()
@click.option('--config-fp', default=expanduser('~/.lieprofile.cfg'),
              show_default=True, help='Path to the configuration file')
@click.option('--log-dir', default='', help='Directory for log files')
@click.option('--log-level', default='INFO', show_default=True,
              type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR']))
@click.option('--generator-seed', default=0, show_default=True, type=int)
@click.option('--mode', default='strict', show_default=True,
              type=click.Choice(['strict', 'exploratory']))
def config(config_fp, log_dir, log_level, generator_seed, mode):
    """Writes a configuration file"""
    click.echo('Creating configuration file %s' % config_fp)
    ConfigurationManager.create(config_fp, log_dir, log_level=log_level,
                                generator_seed=generator_seed, mode=mode)


@lieprofile.command('generate')
@click.option('--spec', 'spec_fp', required=True,
              type=click.Path(exists=True, dir_okay=False),
              help='Generator specification (JSON)')
@click.option('--out', 'out_fp', required=True,
              type=click.Path(dir_okay=False),
              help='Output snapshots (JSON-lines)')
@_handled
def generate_cmd(spec_fp, out_fp):
    """Generates a synthetic sequence of coefficient fields"""
    description = _load_json(spec_fp)
    group, sampling = _sampling_from_spec(description)
    snapshots = generate(description, group, sampling)
    formats.write_snapshots(snapshots, out_fp)
    click.echo('%d snapshots written to %s' % (len(snapshots), out_fp))


@lieprofile.command()
@click.option('--in', 'in_fp', required=True,
              type=click.Path(exists=True, dir_okay=False),
              help='Snapshots (JSON-lines)')
@click.option('--params', 'params_fp', default=None,
              type=click.Path(exists=True, dir_okay=False),
              help='Extraction parameters (JSON)')
@click.option('--report', 'report_fp', required=True,
              type=click.Path(dir_okay=False), help='Output report (JSON)')
@click.option('--ledger-csv', default=None, type=click.Path(dir_okay=False),
              help='Also write the energy and remainder ledgers as CSV')
@_handled
def decompose(in_fp, params_fp, report_fp, ledger_csv):
    """Extracts the profiles of a sequence"""
    report = run_decomposition(in_fp, params_fp, report_fp, ledger_csv)
    click.echo('%d profiles, report written to %s'
               % (report['results']['diagnostics']['n_profiles'],
                  report_fp))


@lieprofile.command()
@click.argument('inputs', nargs=-1, required=True)
@click.option('--params', 'params_fp', default=None,
              type=click.Path(exists=True, dir_okay=False),
              help='Extraction parameters (JSON)')
@click.option('--out-dir', required=True,
              type=click.Path(file_okay=False),
              help='Directory receiving one report per input')
@click.option('--workers', default=1, show_default=True,
              type=click.IntRange(1, None), help='Worker processes')
def decompose_batch(inputs, params_fp, out_dir, workers):
    """Decomposes several snapshot files, directories are expanded"""
    files = []
    for path in inputs:
        files.extend(glob(join(path, '*.jsonl')) if isdir(path) else [path])
    files = natsorted(set(files))
    makedirs(out_dir, exist_ok=True)
    jobs = [(fp, params_fp,
             join(out_dir, '%s.report.json' % splitext(basename(fp))[0]))
            for fp in files]
    click.echo('%d input files' % len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_batch_item, jobs))
    else:
        results = [_batch_item(job) for job in jobs]
    status = EXIT_OK
    for fp, code, error in results:
        if code == EXIT_OK:
            click.echo('%s: ok' % fp)
        else:
            click.echo('%s: failed (%s)' % (fp, error), err=True)
        status = max(status, code)
    sys.exit(status)


@lieprofile.command()
@click.option('--sharpness', default=None, type=float,
              help='Window sharpness, defaults to the configuration')
@click.option('--J', 'J', default=8, show_default=True,
              type=click.IntRange(0, None), help='Truncation |k| <= J')
@click.option('--points', default=512, show_default=True,
              type=click.IntRange(2, None), help='Log-grid size')
@click.option('--narrow', is_flag=True, help='Use the narrow window')
@click.option('--tolerance', default=1e-12, show_default=True, type=float)
@_handled
def verify_window(sharpness, J, points, narrow, tolerance):
    """Checks the partition of unity of the spectral window"""
    from lieprofile.core.window import (
        build_narrow_window, build_window, verify_partition)

    w = build_narrow_window(sharpness) if narrow else build_window(sharpness)
    low, high = w.covered_range(J)
    grid = np.geomspace(low, high, points)
    deviation = verify_partition(w, J, grid)
    click.echo(json.dumps({'window': w.to_dict(), 'J': J,
                           'covered_range': [low, high],
                           'max_deviation': deviation}, sort_keys=True))
    if deviation > tolerance:
        raise exceptions.LieProfileInvariantError(
            'partition deviation %g exceeds %g' % (deviation, tolerance))


@lieprofile.command()
@click.option('--grid', 'grid_fp', required=True,
              type=click.Path(exists=True, dir_okay=False),
              help='Grid function, binary or JSON-lines')
@click.option('--density', default=0.5, show_default=True, type=float,
              help='Lattice density beta')
@click.option('--p', 'p', default=4., show_default=True, type=float,
              help='Integrability of the atoms')
@click.option('--tolerance', default=1e-6, show_default=True, type=float,
              help='Largest relative reconstruction error')
@click.option('--report', 'report_fp', default=None,
              type=click.Path(dir_okay=False))
@_handled
def verify_frame(grid_fp, density, p, tolerance, report_fp):
    """Checks the analysis/synthesis round trip on a grid function"""
    from lieprofile.core.coefficients import (
        discrete_besov_norm, norm_params, sobolev_seq_norm)
    from lieprofile.core.transform import (
        GridFunction, KernelSet, analyze, besov_norm_continuous,
        calderon_reconstruct, reconstruct)
    from lieprofile.core.window import build_window

    f = formats.ingest(grid_fp)
    if not isinstance(f, GridFunction):
        raise exceptions.LieProfileIngestionError(grid_fp, None,
                                                  'not a grid function')
    gs = SamplingSet(abelian(f.dim), density)
    ks = KernelSet.covering(build_window(), f)
    c = analyze(f, ks, gs, p)
    rec = reconstruct(c, ks, gs)
    target = calderon_reconstruct(f, ks)
    scale = np.linalg.norm(target.samples)
    error = float(np.linalg.norm((rec.function - target).samples) / scale) \
        if scale else 0.
    s = gs.group.critical_smoothness(p) if p >= 2 else 0.
    np_ = norm_params(s, 2, 2)
    continuous = besov_norm_continuous(f, ks, s, 2, 2)
    discrete = discrete_besov_norm(c, np_)
    results = {'j_range': list(ks.j_range), 'n_coefficients': len(c),
               'iterations': rec.iterations, 'residual': rec.residual,
               'relative_error': error, 's': s,
               'besov_continuous': continuous, 'besov_discrete': discrete,
               'sobolev_seq': sobolev_seq_norm(c),
               'ratio': continuous / discrete if discrete else None}
    report = _report('verify-frame', {'density': density, 'p': p,
                                      'tolerance': tolerance},
                     {'grid': _input_record(grid_fp)}, results)
    if report_fp is not None:
        formats.write_report(report, report_fp)
    click.echo(json.dumps(results, sort_keys=True))
    if error > tolerance:
        raise exceptions.LieProfileInvariantError(
            'reconstruction error %g exceeds %g' % (error, tolerance))


@lieprofile.command()
@click.option('--in', 'in_fp', required=True,
              type=click.Path(exists=True, dir_okay=False),
              help='Coefficient field (JSON-lines)')
@click.option('--s', 's', required=True, type=float)
@click.option('--p', 'p', required=True, type=float)
@click.option('--q', 'q', required=True, type=float)
@_handled
def norms(in_fp, s, p, q):
    """Sequence norms of a coefficient field"""
    from lieprofile.core.coefficients import (
        describe, discrete_besov_norm, lp_proxy_norm, norm_params,
        sobolev_seq_norm)

    field = formats.ingest(in_fp, 'coefficients')
    results = {'normalization': describe(field.normalization),
               'n_coefficients': len(field),
               'besov': discrete_besov_norm(
                   field, norm_params(s, p, q, field.group.Q))}
    if field.normalization.kind == 'Lp':
        results['sobolev_seq'] = sobolev_seq_norm(field)
        results['lp_proxy'] = lp_proxy_norm(field)
    click.echo(json.dumps(results, sort_keys=True))


def _load_pair(path):
    description = _load_json(path)
    try:
        if 'sampling' in description:
            sampling = SamplingSet.from_dict(description['sampling'])
            return ScaleCorePair.from_dict(sampling.group, description,
                                           sampling)
        return ScaleCorePair.from_dict(
            GroupSpec.from_dict(description['group']), description)
    except KeyError as e:
        raise exceptions.LieProfileIngestionError(
            path, None, 'missing entry %s' % e)


@lieprofile.command()
@click.option('--a', 'a_fp', required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option('--b', 'b_fp', required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option('--tail', default=None, type=click.IntRange(1, None))
@click.option('--t-div', default=None, type=float)
@click.option('--eps-stable', default=None, type=float)
@_handled
def classify(a_fp, b_fp, tail, t_div, eps_stable):
    """Orthogonality verdict of two scale/core pairs"""
    from lieprofile.core.settings import lieprofile_settings as settings

    a, b = _load_pair(a_fp), _load_pair(b_fp)
    if a.group != b.group:
        raise exceptions.LieProfilePreconditionError(
            'The pairs live on different groups')
    verdict = classify_pair(
        a, b, settings.tail if tail is None else tail,
        settings.t_div if t_div is None else t_div,
        settings.eps_stable if eps_stable is None else eps_stable)
    click.echo(json.dumps(dict(verdict._asdict()), sort_keys=True))


if __name__ == '__main__':
    lieprofile()

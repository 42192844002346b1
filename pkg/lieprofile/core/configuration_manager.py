# ----------------------------------------------------------------------------
# Copyright (c) 2024-, LieProfile development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

from os import environ
from os.path import expanduser, exists, dirname, abspath, join

from datetime import datetime
from configparser import ConfigParser


class ConfigurationManager(object):
    """Holds the lieprofile configuration

    Parameters
    ----------
    conf_fp : str, optional
        Filepath to the configuration file. If not provided, the
        `LIEPROFILE_CONFIG_FP` environment variable is used, then
        `~/.lieprofile.cfg`, then the packaged skeleton configuration.

    Attributes
    ----------
    log_dir : str
        Directory for log files. Empty means no file logging
    log_level : str
        Name of the logging level
    sparse_floor : float
        Relative threshold under which coefficients are dropped
    frame_max_iter : int
        Iteration cap of the frame-operator correction
    frame_tolerance : float
        Residual target of the frame-operator correction
    window_sharpness : float
        Default sharpness of the spectral window
    decay_max_points : int
        Lattice point budget of the column decay certificate
    generator_seed : int
        Seed for generator noise floors
    m_max, l_max, tail : int
        Extraction defaults
    eps_conv, t_div, eps_stable : float
        Extraction tolerances
    mode : str
        Extraction mode, `strict` or `exploratory`

    Raises
    ------
    RuntimeError
        When a required section is missing or the mode is unknown.
    """
    @staticmethod
    def create(config_fp, log_dir, log_level='INFO', sparse_floor=1e-14,
               frame_max_iter=50, frame_tolerance=1e-6, window_sharpness=1.0,
               decay_max_points=200000, generator_seed=0, m_max=64, l_max=16,
               eps_conv=1e-9, t_div=8.0, eps_stable=1e-9, tail=8,
               mode='strict'):
        """Creates a new lieprofile configuration file

        Parameters
        ----------
        config_fp : str
            Path to the configuration file
        log_dir : str
            Path to the log directory
        log_level : str, optional
            Logging level name
        sparse_floor, frame_tolerance, window_sharpness : float, optional
            Numerical defaults
        frame_max_iter, decay_max_points, generator_seed : int, optional
            Numerical defaults
        m_max, l_max, tail : int, optional
            Extraction defaults
        eps_conv, t_div, eps_stable : float, optional
            Extraction tolerances
        mode : {'strict', 'exploratory'}, optional
            Extraction mode
        """
        with open(config_fp, 'w') as f:
            f.write(CONFIG_TEMPLATE % {
                'date': str(datetime.now()),
                'logdir': log_dir,
                'loglevel': log_level,
                'sparse_floor': sparse_floor,
                'frame_max_iter': frame_max_iter,
                'frame_tolerance': frame_tolerance,
                'window_sharpness': window_sharpness,
                'decay_max_points': decay_max_points,
                'generator_seed': generator_seed,
                'm_max': m_max,
                'l_max': l_max,
                'eps_conv': eps_conv,
                't_div': t_div,
                'eps_stable': eps_stable,
                'tail': tail,
                'mode': mode})

    def __init__(self, conf_fp=None):
        self.install_dir = dirname(abspath(__file__))
        self.support_files = join(self.install_dir, 'support_files')

        if conf_fp is None:
            try:
                conf_fp = environ['LIEPROFILE_CONFIG_FP']
            except KeyError:
                conf_fp = expanduser('~/.lieprofile.cfg')
                if not exists(conf_fp):
                    conf_fp = join(self.support_files,
                                   'skeleton_lieprofile.cfg')
        self.conf_fp = conf_fp

        # Parse the configuration file
        config = ConfigParser()
        with open(self.conf_fp) as conf_file:
            config.read_file(conf_file)

        _required_sections = {'main', 'numerics', 'extraction'}
        if not _required_sections.issubset(set(config.sections())):
            missing = _required_sections - set(config.sections())
            raise RuntimeError(', '.join(sorted(missing)))

        self._get_main(config)
        self._get_numerics(config)
        self._get_extraction(config)

    def _get_main(self, config):
        """Get the main configuration"""
        self.log_dir = config.get('main', 'LOG_DIR')
        self.log_level = config.get('main', 'LOG_LEVEL') or 'INFO'

    def _get_numerics(self, config):
        """Get the configuration of the numerics section"""
        self.sparse_floor = config.getfloat('numerics', 'SPARSE_FLOOR')
        self.frame_max_iter = config.getint('numerics', 'FRAME_MAX_ITER')
        self.frame_tolerance = config.getfloat('numerics', 'FRAME_TOLERANCE')
        self.window_sharpness = config.getfloat(
            'numerics', 'WINDOW_SHARPNESS')
        self.decay_max_points = config.getint('numerics', 'DECAY_MAX_POINTS')
        self.generator_seed = config.getint('numerics', 'GENERATOR_SEED')

    def _get_extraction(self, config):
        """Get the configuration of the extraction section"""
        self.m_max = config.getint('extraction', 'M_MAX')
        self.l_max = config.getint('extraction', 'L_MAX')
        self.eps_conv = config.getfloat('extraction', 'EPS_CONV')
        self.t_div = config.getfloat('extraction', 'T_DIV')
        self.eps_stable = config.getfloat('extraction', 'EPS_STABLE')
        self.tail = config.getint('extraction', 'TAIL')
        self.mode = config.get('extraction', 'MODE')
        if self.mode not in ('strict', 'exploratory'):
            raise RuntimeError(
                "Unknown extraction MODE '%s', use strict or exploratory"
                % self.mode)


CONFIG_TEMPLATE = """# Configuration file generated by lieprofile on %(date)s

# ------------------------- MAIN SETTINGS ----------------------------------
[main]
LOG_DIR=%(logdir)s
LOG_LEVEL=%(loglevel)s

# ----------------------- NUMERICS SETTINGS --------------------------------
[numerics]
SPARSE_FLOOR=%(sparse_floor)s
FRAME_MAX_ITER=%(frame_max_iter)s
FRAME_TOLERANCE=%(frame_tolerance)s
WINDOW_SHARPNESS=%(window_sharpness)s
DECAY_MAX_POINTS=%(decay_max_points)s
GENERATOR_SEED=%(generator_seed)s

# ---------------------- EXTRACTION SETTINGS -------------------------------
[extraction]
M_MAX=%(m_max)s
L_MAX=%(l_max)s
EPS_CONV=%(eps_conv)s
T_DIV=%(t_div)s
EPS_STABLE=%(eps_stable)s
TAIL=%(tail)s
MODE=%(mode)s
"""

# ----------------------------------------------------------------------------
# Copyright (c) 2024-, LieProfile development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import re
from setuptools import setup, find_packages
from glob import glob

classes = """
    Development Status :: 3 - Alpha
    License :: OSI Approved :: BSD License
    Topic :: Scientific/Engineering :: Mathematics
    Topic :: Software Development :: Libraries :: Python Modules
    Programming Language :: Python
    Programming Language :: Python :: 3
    Operating System :: POSIX :: Linux
    Operating System :: MacOS :: MacOS X
"""

# show description
with open('README.md') as f:
    long_description = f.read()

with open('lieprofile/__init__.py') as f:
    version = re.search(r"__version__ = '([^']+)'", f.read()).group(1)

classifiers = [s.strip() for s in classes.split('\n') if s]

setup(name='lieprofile',
      long_description=long_description,
      long_description_content_type='text/markdown',
      version=version,
      license='BSD',
      description='Wavelet profile decomposition of bounded sequences on '
                  'stratified Lie groups',
      author='LieProfile development team',
      packages=find_packages(),
      include_package_data=True,
      package_data={
        'lieprofile.core': ['support_files/*']},
      scripts=glob('scripts/*'),
      python_requires='>=3.6',
      extras_require={'test': ['pytest', 'hypothesis', 'pycodestyle']},
      install_requires=['click >= 7.0', 'numpy', 'scipy', 'pandas',
                        'natsort'],
      classifiers=classifiers
      )

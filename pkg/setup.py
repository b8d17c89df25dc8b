#!/usr/bin/env python
# -*- coding: utf-8 -*-

from setuptools import setup

from flexgrid import __version__

install_requires = ['numpy', 'pandas']
tests_require = ['scipy']

classifiers = """\
Development Status :: 4 - Beta
Environment :: Console
Intended Audience :: Science/Research
Intended Audience :: Developers
License :: OSI Approved :: MIT License
Operating System :: OS Independent
Programming Language :: Python :: 3
Topic :: Scientific/Engineering
Topic :: Software Development :: Libraries :: Python Modules
"""

README = open('README.md').read()
CHANGES = open('CHANGES.txt').read()
LICENSE = open('LICENSE.txt').read()

config = dict(name='flexgrid',
              version=__version__,
              packages=['flexgrid'],
              test_suite='tests',
              license=LICENSE,
              long_description='%s\n\n%s' % (README, CHANGES),
              long_description_content_type='text/markdown',
              classifiers=[c for c in classifiers.split('\n') if c],
              description='Demand response of residential buildings with '
                          'deep reinforcement learning',
              author='flexgrid developers',
              url='https://pypi.org/project/flexgrid/',
              platforms='any',
              keywords=['demand response', 'reinforcement learning',
                        'smart grid', 'peak reduction'],
              python_requires='>=3.8',
              install_requires=install_requires,
              tests_require=tests_require,
              extras_require=dict(tests=tests_require),
              entry_points=dict(console_scripts=[
                  'flexgrid = flexgrid.cli:main']))

setup(**config)

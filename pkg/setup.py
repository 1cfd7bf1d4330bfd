#!/usr/bin/env python

CLASSIFIERS = """\
Development Status :: 3 - Alpha
Intended Audience :: Science/Research
License :: OSI Approved :: BSD License
Programming Language :: Python
Programming Language :: Python :: 3
Topic :: Scientific/Engineering
Topic :: Scientific/Engineering :: Physics
Operating System :: Microsoft :: Windows
Operating System :: POSIX
Operating System :: Unix
Operating System :: MacOS
"""

MAJOR               = 0
MINOR               = 1
MICRO               = 0
ISRELEASED          = not True
VERSION             = '%d.%d.%d' % (MAJOR, MINOR, MICRO)

import os
if os.path.exists('MANIFEST'): os.remove('MANIFEST')

def write_version_py(filename='ramancoupling/version.py'):
    cnt = """# THIS FILE IS GENERATED FROM setup.py
short_version = '%(version)s'
version = '%(version)s'
release = %(isrelease)s

if not release:
    version += '.dev'
"""
    with open(filename, 'w') as a:
        a.write(cnt % {'version': VERSION, 'isrelease': str(ISRELEASED)})

if __name__=='__main__':
    from setuptools import setup

    # Rewrite the version file everytime
    if os.path.exists('ramancoupling/version.py'): os.remove('ramancoupling/version.py')
    write_version_py()

    setup(name='ramancoupling',
          version=VERSION,
          author = 'ramancoupling developers',
          license = 'BSD',
          classifiers=[c for c in CLASSIFIERS.split('\n') if c],
          description = 'Microwave-induced coupling of a driven transmon and a resonator.',
          long_description = '''\
ramancoupling is a Python package that provides:

   model, spectral - truncated transmon-resonator Hamiltonians and dressed states.
   resolvent, stark - ac Stark shift and effective coupling by a self-energy
     series and by parallel transport of the resonant pair.
   dynamics - chirped pulse simulations and swap fidelities.
   spectroscopy - transmission response synthesis, peak finding and fits.
''',
          platforms = ["All"],
          packages = ['ramancoupling', 'ramancoupling.tests'],
          scripts = ['ramancoupling/scripts/raman.py'],
          entry_points = {'console_scripts': ['raman = ramancoupling.commands:main']},
          python_requires = '>=3.8',
          install_requires = ['numpy>=1.20', 'scipy>=1.7'],
          extras_require = {'test': ['pytest']},
          )

from pathlib import Path
from setuptools import setup, find_packages


doc = Path(__file__).parent / 'README.md'


setup(name='matchsim',
      version='0.1.0',
      author='Pythonian',
      description='Simulated admission markets: serial dictatorship under '
      'several preference reporting interfaces',
      long_description=doc.read_text(),
      long_description_content_type='text/markdown',
      packages=find_packages(),
      install_requires=[
          'numpy',
          'pandas >= 1.0.5',
          'scipy',
          'matplotlib',
          'click',
          'inireader',
          'tqdm'
      ],
      entry_points={
          'console_scripts': [
              'msim=matchsim.cli:msim'
          ]},
      classifiers=[
          'Development Status :: 4 - Beta',
          'Intended Audience :: Science/Research',
          'License :: OSI Approved :: GNU Lesser General Public License v3 (LGPLv3)',
          'Operating System :: OS Independent',
          'Programming Language :: Python :: 3',
          'Topic :: Scientific/Engineering'
      ]
)

from setuptools import setup, find_packages


setup(name='pysltc',
      version='0.1.0',
      description='Screenline-based tour calibration of agent-based freight demand models',
      keywords='freight transport demand calibration screenline',
      python_requires='>=3.7',
      license='GPL-3.0',
      install_requires=['numpy>=1.17',
                        'scipy>=1.4',
                        'networkx>=2.4',
                        'pandas>=1.0',
                        'matplotlib>=3.1'],
      entry_points={
          'console_scripts': ['sltc=pysltc.cli:main'],
      },
      packages=find_packages(exclude=('tests', 'tests.*')),
      test_suite='tests',
      zip_safe=False)

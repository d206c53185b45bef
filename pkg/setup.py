import logging

from setuptools import setup

logging.basicConfig()
log = logging.getLogger()

# Get version
with open('robj2r/version.py') as f:
    for line in f:
        if line.find('__version__') >= 0:
            version = line.split("=")[1].strip()
            version = version.strip('"')
            version = version.strip("'")
            continue

# Get README
with open('README.md') as f:
    readme = f.read()

# Installation requirements
install_requires = [
    'numpy',
    'scipy',
    'statsmodels',
    'scikit-learn',
    'pandas',
    'joblib',
    'click',
    'click_plugins',
    'pyyaml'
]

extras_require = {
    'dev': ['pytest', 'coverage']
}

# Setup
packages = ['robj2r',
            'robj2r.algorithms',
            'robj2r.cli',
            'robj2r.regression',
            'robj2r.simulation']

entry_points = '''
    [console_scripts]
    robj2r=robj2r.cli.main:cli
'''

desc = ('Robust jump-to-reference estimation of treatment effects in '
        'longitudinal trials with missing data')

setup_dict = dict(
    name='robj2r',
    version=version,
    packages=packages,
    include_package_data=True,
    entry_points=entry_points,
    license='MIT',
    description=desc,
    zip_safe=False,
    long_description=readme,
    long_description_content_type='text/markdown',
    python_requires='>=3.10',
    install_requires=install_requires,
    extras_require=extras_require
)

setup(**setup_dict)

# Always prefer setuptools over distutils
from setuptools import setup, find_packages

scripts = [
    'scripts/cellfree',
]
setup(
    # Installed as ``pip install cellfree``; the command-line entry point
    # below has the same name.
    name='cellfree',  # Required

    # Versions should comply with PEP 440:
    # https://www.python.org/dev/peps/pep-0440/
    version='0.1.0',  # Required

    description='Distributed RIS-assisted cell-free downlink simulator',

    # You can just specify package directories manually here if your project is
    # simple. Or you can use find_packages().
    packages=find_packages(exclude=['tests', 'tests.*']),  # Required

    # numpy/scipy for the linear algebra and root finding, h5py for the run
    # dumps, PyYAML for JSON/YAML configuration files.
    install_requires=[
        'numpy',
        'scipy',
        'h5py',
        'PyYAML',
    ],  # Optional

    scripts=scripts)

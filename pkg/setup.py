from setuptools import find_packages, setup

package_name = 'tiling_spectra'

setup(
    name=package_name,
    version='0.1.0',
    packages=find_packages(exclude=['test']),
    install_requires=['setuptools', 'numpy', 'scipy', 'matplotlib'],
    zip_safe=True,
    description='Floquet spectra, flat bands and band gaps of weighted Archimedean tilings',
    license='Apache-2.0',
    python_requires='>=3.8',
    tests_require=['pytest', 'flake8', 'pydocstyle'],
    extras_require={'test': ['pytest', 'flake8', 'pydocstyle']},
    entry_points={
        'console_scripts': [
            'tiling-spectra = tiling_spectra.cli:main',
        ],
    },
)

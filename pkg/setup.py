from setuptools import setup

install_requires = [
    'python-dotenv>=0.21.0',
    'sympy>=1.12',
]

tests_require = [
    'pytest>=5.1.2',
    'hypothesis>=6.0',
]

setup(
    name='coring-cdga',
    version="0.1.0",
    description='exact rational corings, semi-free curved DGAs, connections and divergences',
    packages=['coring_cdga'],
    install_requires=install_requires,
    tests_require=tests_require,
    entry_points={
        'console_scripts': ['coring-cdga=coring_cdga.cli:main'],
    },
    zip_safe=False,
)

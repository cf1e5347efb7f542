#! /usr/bin/env python
# -*- encoding: utf-8 -*-
import setuptools

requires = [
    'numpy',
    'PyYAML',
]


dev_extras = [
    'pytest',
    'tox',
    'pylint',
]


setuptools.setup(
    name='gaitembed',
    version='0.1.0',
    description='Gait embeddings from skeleton sequences trained with a triplet loss',
    license='MIT',
    python_requires='>=3.8',
    packages=setuptools.find_packages('src'),
    package_dir={'': 'src'},
    include_package_data=True,
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
    ],
    install_requires=requires,
    extras_require={
        'dev': dev_extras,
    },
    entry_points={
        'console_scripts': [
            'gaitembed = gaitembedcli:main',
        ],
    },
)

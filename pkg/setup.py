from setuptools import setup

with open('README.md', encoding='utf8') as fp:
    longdesc = fp.read()

setup(
    name='hybrid-sched',
    packages=['hybrid_sched'],
    entry_points={
        'console_scripts': [
            'hybrid-sched = hybrid_sched.cli:main',
        ]
    },
    install_requires=[
        'click>=7.0',
        'inifile>=0.4',
        'numpy>=1.17',
    ],
    extras_require={
        'test': ['pytest>=7'],
    },
    version='1.0.0',
    description='Online packet scheduling in hybrid reconfigurable '
                'networks, with a dual-fitting certifier.',
    long_description=longdesc,
    long_description_content_type="text/markdown",
    license='MIT',
    python_requires='>=3.7',
    keywords=[
        'scheduling',
        'reconfigurable network',
        'stable matching',
        'online algorithms',
        'dual fitting',
    ],
    classifiers=[
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3 :: Only',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Topic :: System :: Networking',
    ],
)

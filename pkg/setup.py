'''
Setup
'''

from setuptools import setup

setup(
    name='rumor_block',
    version='0.1.0',
    description='Rumor blocking by reverse R-tuple sampling under competitive independent cascade',
    license='MIT',
    classifiers=[
        'Development Status :: 4 - Beta',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3 :: Only',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
    ],
    keywords='social networks rumor blocking influence maximization',
    packages=['rumor_block'],
    python_requires='>=3.8',
    install_requires=[
        'pandas>=1.5',
        'numpy',
        'networkx',
    ],
    entry_points={
        'console_scripts': ['rumor-block=rumor_block.cli:main'],
    },
)

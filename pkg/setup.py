'''setup script for this module'''

from setuptools import setup

def readme():
    '''pull in the readme file for the long description'''
    with open('README.md') as rfile:
        return rfile.read()

setup(
    name='aamdemandlibrary',
    version='1.0.0',
    description='Ground versus Advanced Air Mobility mode choice demand model',
    long_description=readme(),
    long_description_content_type='text/markdown',
    license='MIT',
    packages=['aamdemandlibrary'],
    python_requires='>=3.8',
    install_requires=['numpy', 'scipy', 'pandas', 'requests', 'urllib3', 'PyYAML'],
    extras_require={'test': ['pytest']},
    zip_safe=False,
    keywords='AAM UAM RAM demand logit generalized cost OSRM',
    include_package_data=True,
    package_data={'aamdemandlibrary': ['data/*']},
    scripts=['bin/aamdemand.py']
)

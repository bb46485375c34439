from setuptools import setup, find_packages

# Read requirements files
with open('requirements.txt') as f:
    core_requirements = [line.split('#')[0].strip() for line in f.read().splitlines()
                         if line and not line.startswith('#') and not line.startswith('-r')]

setup(
    name="jacobi-kernels",
    version="0.1.0",
    description="Correlation kernels, scaling limits and Painleve III checks for the perturbed Jacobi unitary ensemble",
    author="Jacobi Kernels Team",
    packages=find_packages(exclude=["tests", "tests.*"]),
    py_modules=["jk_cli"],
    python_requires=">=3.8",
    install_requires=core_requirements,
    entry_points={
        'console_scripts': [
            'jacobi-kernels=jk_cli:main',
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
    ],
)

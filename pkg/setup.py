import setuptools

install_deps = [
        "numpy>=1.24.0",
        "scipy",
        "scikit-learn>=1.2",
        "numba>=0.57.0",
        "natsort",
        "tqdm"
        ]

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="arffbias",
    use_scm_version=True,
    description="Adaptive random Fourier features vs SGD: spectral bias and noise-attack robustness",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests"]),
	install_requires = install_deps,
    tests_require = ["pytest"],
    entry_points = {
        "console_scripts": ["arffbias = arffbias.__main__:main"]
    },
    include_package_data=True,
    classifiers=(
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
    ),
)

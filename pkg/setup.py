from setuptools import setup, find_packages

setup(
    author="scalesep developers",
    classifiers=[
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Physics",
        "Topic :: Utilities"
    ],
    license="GPLv3",
    description="This is scalesep, with which you can test continuous-variable states for entanglement by partial scaling.",
    install_requires=["attrs>=21.3", "numpy>=1.20", "scipy>=1.6", "termcolor>=1.1.0", "tqdm>=4.32,<5"],
    extras_require = {
        "develop": ["sphinx", "sphinx_rtd_theme", "sphinx-autobuild"]
    },
    keywords=["entanglement", "gaussian", "separability", "scalesep"],
    name="scalesep",
    python_requires=">=3.8",
    packages=find_packages(exclude=["tests"]),
    entry_points={"console_scripts": ["scalesep=scalesep.__main__:main"]},
    version="0.3.0",
    include_package_data=True,
)

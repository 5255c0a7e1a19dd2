from setuptools import setup, find_packages

setup(
    name="dilatoo",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    install_requires=[
        "numpy",
        "scipy",
    ],
    extras_require={
        "dev": [
            "pytest",
            "pytest-cov",
        ],
    },
    entry_points={
        "console_scripts": [
            "dilatoo = dilatoo.cli:main",
        ],
    },
    python_requires=">=3.7",
    description="Total and monotone dilations of matrices",
    author="Your Name",
    author_email="your.email@example.com",
    url="https://github.com/yourusername/dilatoo",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)

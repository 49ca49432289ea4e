from setuptools import setup, find_packages

setup(
    name="thermal-vbgmm",
    version="0.1.0",
    packages=find_packages(where="src", exclude=["tests", "tests.*"]),
    package_dir={"": "src"},
    install_requires=[
        # Core dependencies
        "numpy>=1.22.0",
        "scipy>=1.8.0",
        "pandas>=1.5.0",

        # Config & validation
        "pydantic>=2.0.0",
        "pydantic-settings>=2.0.0",
        "python-dotenv>=0.19.0",

        # Utils
        "loguru>=0.6.0",
    ],
    extras_require={
        "test": ["pytest>=7.0.0"],
    },
    entry_points={
        "console_scripts": [
            "thermal-vbgmm=thermal_vbgmm.cli:run",
        ],
    },
    python_requires=">=3.9",
    description="Per-pixel variational Gaussian mixture background subtraction for thermal video",
    long_description="Per-pixel variational Gaussian mixture background subtraction for thermal video",
    long_description_content_type="text/markdown",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
)

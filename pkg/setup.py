from setuptools import setup, find_namespace_packages

setup(
    name="ptlab",
    version="0.1",
    description="Phase transitions of l1 recovery under simple, block and tree sparsity.",
    packages=find_namespace_packages(include=["class_defs", "services", "infrastructure", "utils", "cli"]),
    py_modules=["app", "config"],
    include_package_data=True,
    python_requires=">=3.10",
    install_requires=[
        # Configuration & CLI
        "python-dotenv>=1.1.0",
        "pydantic>=2.11.5",
        "click>=8.2.1",

        # Numerics & statistics
        "numpy>=2.2.6",
        "scipy>=1.15.3",
        "scikit-learn>=1.6.1",
        "joblib>=1.5.1",

        # Output
        "pandas>=2.3.0",
        "matplotlib>=3.10.3",
    ],
    extras_require={
        "dev": [
            "pytest>=7.0",
            "flake8>=5.0",
        ]
    },
    entry_points={
        "console_scripts": [
            "ptlab=app:main",
        ],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
    ],
)

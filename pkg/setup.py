from pathlib import Path

from setuptools import find_packages, setup


BASE_DIR = Path(__file__).parent
README = (BASE_DIR / "README.md").read_text(encoding="utf-8") if (BASE_DIR / "README.md").exists() else ""


setup(
    name="heatbound",
    version="0.1.0",
    description="Numerical checks of Gaussian heat kernel bounds for higher order elliptic operators on planar domains",
    long_description=README,
    long_description_content_type="text/markdown" if README else "text/plain",
    author="",
    packages=find_packages(exclude=("tests", "examples")),
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.24",
        "scipy>=1.10",
        "shapely>=2.0",
        "mpmath>=1.3",
        "joblib>=1.2",
        "rich>=13.0.0",
        "wcwidth>=0.2.6",
    ],
    extras_require={"test": ["pytest>=7.0"]},
    include_package_data=True,
    package_data={"heatbound.cli": ["scenarios/*.json"]},
    entry_points={"console_scripts": ["heatbound = heatbound.cli.main:main"]},
)

'''
SETUP
'''

from setuptools import find_packages, setup

setup(
    name="amr-rematch",
    version="1.0.0",
    description="Motif-based AMR similarity and the RARE structural benchmark",
    packages=find_packages(include=["amr_rematch", "amr_rematch.*"]),
    python_requires=">=3.8",
    install_requires=[
        "penman>=1.2",
        "networkx>=2.6",
        "numpy",
        "scipy",
        "tqdm",
        "python-dotenv",
    ],
    extras_require={
        "test": ["pytest"],
    },
    entry_points={
        "console_scripts": [
            "amr-rematch = amr_rematch.main:main",
        ],
    },
)

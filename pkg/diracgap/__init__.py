# Filename: diracgap/__init__.py
"""Galerkin discretization of the radial Dirac-Coulomb operator in Gaussian bases, with
tools to provoke, track and classify spurious eigenvalues in the spectral gap."""
from .config import settings

__version__ = settings.app_version

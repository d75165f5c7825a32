"""Bi-stable point wave energy absorber: kernel identification, perturbation
branches, bifurcation loci, time-domain simulation, and design maps."""

from .params import BuoyGeometry, KernelConstants, NondimParams

__version__ = "0.1.0"

__all__ = ["BuoyGeometry", "KernelConstants", "NondimParams", "__version__"]

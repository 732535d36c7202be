"""Global-in-time domain decomposition for linear fluid-structure interaction.

Stokes flow coupled to linear elastodynamics across a fixed interface,
solved with Steklov-Poincare or Robin (Schwarz waveform relaxation)
space-time interface problems on independent time grids.
"""

__version__ = "0.1.0"

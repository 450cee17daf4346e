"""Numerical laboratory for the 2D Landau-Lifshitz(-Gilbert) flow into
embedded targets: discrete calculus, target geometry, time integration,
Coulomb-gauge diagnostics, the Townes-soliton constant pipeline, and
trajectory audits.
"""

__version__ = "0.1.0"

"""Offline precomputation of triangular switching-time systems.

This package symbolically builds the boundary/contact/terminal condition
polynomials for bang/cruise trajectory profiles of integrator chains,
eliminates the switching times down to a triangular sequence of univariate
solves, extracts singularity guards with substitute systems, and emits the
result as a JSON bundle consumed by the online planner.
"""

__version__ = "0.1.0"

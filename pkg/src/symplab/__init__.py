"""Verification laboratory for adjoint-operator symplectic currents in gauge theory and gravity."""

__version__ = "0.1.0"

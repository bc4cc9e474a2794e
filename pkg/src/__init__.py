"""
Rotation Algebra Toolkit

Finitely supported model of the weighted crossed product of C(T) by an
irrational rotation: norms, finite-section spectra, averaging toward the
conditional expectation, and the module C(T).
"""

__version__ = "1.0.0"

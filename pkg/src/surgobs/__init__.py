"""Quadratic forms over group rings, surgery obstruction reductions and
complete intersection diffeomorphism checks."""

__version__ = "0.1.0"

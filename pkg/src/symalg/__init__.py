"""Exact-arithmetic workbench for polynomial symmetry algebras of superintegrable systems."""

__version__ = "0.1.0"

from .polyring import Polynomial, monomials_of_degree, parse_polynomial

__all__ = ["Polynomial", "monomials_of_degree", "parse_polynomial", "__version__"]

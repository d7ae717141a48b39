"""Lattice laboratory for the continuous-variable GHZ paradox."""

from .lattice import LatticeParams, LocalOperator, StateVector, make_lattice
from .states import BVector, CombLabel, EigenSolution, psi_bz, solve_constraints, verify_eigensystem
from .weyl import WeylWord, ghz_family, make_word

__all__ = [
    "BVector",
    "CombLabel",
    "EigenSolution",
    "LatticeParams",
    "LocalOperator",
    "StateVector",
    "WeylWord",
    "ghz_family",
    "make_lattice",
    "make_word",
    "psi_bz",
    "solve_constraints",
    "verify_eigensystem",
]

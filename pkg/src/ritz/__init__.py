"""Rayleigh-Ritz eigenvalues for 1D polynomial potentials in arbitrary precision.

The basis functions carry the exact exponential tail exp(-|S_k(x)|) of the
eigenfunctions, S_k(x) = sqrt(a) x^(k+1)/(k+1) for V ~ a x^(2k).
"""
from .assemble import MatrixPair, assemble_harmonic_osc, assemble_polyexp, assemble_spec
from .basis import BasisSpec, Family, PolyExpFunction, Sector, build_basis, differentiate, specs_for
from .eigen import Spectrum, auto_precision_solve, solve_dense_complex, solve_generalized_symmetric
from .errors import RitzError
from .model import AsymptoticForm, Parity, Potential, analyze_asymptotics, parity_of, parse_potential
from .moments import MomentTable, moment, quadrature_oracle
from .mpkernel import PrecisionContext, gamma, with_precision
from .study import ConvergenceRecord, compute_levels, emit_csv, emit_svg, reference_table, run_study

__version__ = "0.1.0"

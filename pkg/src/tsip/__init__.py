"""Exact spectra, RS functions and eigenfunctions of translationally
shape-invariant potentials, with independent numerical checks."""

from .backlund import Level, cf_expansion, fold_ladder, rs_function
from .errors import TSIPError
from .families import FAMILY_NAMES, energy, get_family, instantiate, list_families, param_shift
from .groundstate import solve_first, solve_raw, solve_second
from .ratfun import GaussRational, Poly, RationalFunction, partial_fractions
from .verify import classify, full_report, numerov_spectrum, riccati_residual, shape_invariance_check
from .wavefun import assemble, eval_psi, normalize, overlap

__all__ = [
    "FAMILY_NAMES",
    "GaussRational",
    "Level",
    "Poly",
    "RationalFunction",
    "TSIPError",
    "assemble",
    "cf_expansion",
    "classify",
    "energy",
    "eval_psi",
    "fold_ladder",
    "full_report",
    "get_family",
    "instantiate",
    "list_families",
    "normalize",
    "numerov_spectrum",
    "overlap",
    "param_shift",
    "partial_fractions",
    "riccati_residual",
    "rs_function",
    "shape_invariance_check",
    "solve_first",
    "solve_raw",
    "solve_second",
]

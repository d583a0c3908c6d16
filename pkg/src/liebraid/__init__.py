"""Exact and numeric computation in the Kohno algebra of infinitesimal braids."""

from .freealg import Alphabet, Series, TensorSeries, series_exp, series_log
from .freelie import LieElement, is_grouplike, lyndon_basis
from .groupcal import GroupElement, PiecewisePath, bch, ordered_exp, ordered_exp_factorize
from .kernels import BACKEND
from .kohno import KohnoAlgebra, factorize, normal_form

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "Series",
    "TensorSeries",
    "series_exp",
    "series_log",
    "LieElement",
    "is_grouplike",
    "lyndon_basis",
    "GroupElement",
    "PiecewisePath",
    "bch",
    "ordered_exp",
    "ordered_exp_factorize",
    "KohnoAlgebra",
    "factorize",
    "normal_form",
    "BACKEND",
]

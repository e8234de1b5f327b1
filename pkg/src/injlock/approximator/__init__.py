"""Constructive universal approximation by sums of (smoothed) sign functions.

* :mod:`.signum` -- one-dimensional staircases ``sum b_k sgn(x - k a) + c``;
* :mod:`.tikhonov` -- H^2-regularized fits by ``sign_a(u - z_i)`` on a disc;
* :mod:`.radon` -- ridge decompositions via Radon-transform inversion;
* :mod:`.emit` -- flattening into three-layer laser networks.
"""

from .emit import compose_ridge_expansion, emit_network, eval_composed, ridge_inputs
from .radon import (RidgeApprox, eval_ridge, hilbert_transform, radon_transform,
                    ridge_decompose)
from .serialize import approx_from_dict, approx_to_dict, dumps, loads
from .signum import SignumApprox1D, eval_signum_1d, fit_signum_1d
from .tikhonov import SignAExpansion, center_grid, eval_expansion, tikhonov_fit

__all__ = [
    "SignumApprox1D", "fit_signum_1d", "eval_signum_1d",
    "SignAExpansion", "tikhonov_fit", "eval_expansion", "center_grid",
    "RidgeApprox", "radon_transform", "hilbert_transform", "ridge_decompose", "eval_ridge",
    "emit_network", "compose_ridge_expansion", "eval_composed", "ridge_inputs",
    "approx_to_dict", "approx_from_dict", "dumps", "loads",
]

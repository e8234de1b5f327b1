"""JSON (de)serialization of approximations.

Complex numbers use the ``[re, im]`` pair convention of network documents.
Every document carries a ``"kind"`` discriminator.
"""

from __future__ import annotations

import json
from typing import Union

import numpy as np

from ..errors import SchemaError
from ..field_math import complex_to_pair, pair_to_complex
from .radon import RidgeApprox
from .signum import SignumApprox1D
from .tikhonov import FitReport, SignAExpansion

__all__ = ["approx_to_dict", "approx_from_dict", "dumps", "loads"]

Approx = Union[SignumApprox1D, SignAExpansion, RidgeApprox]


def approx_to_dict(ap: Approx) -> dict:
    if isinstance(ap, SignumApprox1D):
        return {"kind": "signum1d", "a_step": ap.a_step, "N": ap.N, "b": ap.b.tolist(),
                "c": ap.c, "L": ap.L}
    if isinstance(ap, SignAExpansion):
        d = {"kind": "sign_a_expansion", "a": ap.a, "r0": ap.r0,
             "centers": [complex_to_pair(z) for z in ap.centers],
             "weights": [complex_to_pair(b) for b in ap.weights]}
        if ap.report is not None:
            d["report"] = dict(ap.report.__dict__)
        return d
    if isinstance(ap, RidgeApprox):
        return {"kind": "ridge", "thetas": ap.thetas.tolist(), "V": ap.V.tolist(), "h": ap.h,
                "L": ap.L, "coeffs": ap.coeffs.tolist(), "C": ap.C, "a": ap.a, "R": ap.R}
    raise SchemaError(f"unsupported approximation type {type(ap).__name__}")


def approx_from_dict(d: dict) -> Approx:
    try:
        kind = d["kind"]
        if kind == "signum1d":
            return SignumApprox1D(d["a_step"], d["N"], d["b"], d["c"], d["L"])
        if kind == "sign_a_expansion":
            rep = FitReport(**d["report"]) if "report" in d else None
            return SignAExpansion([pair_to_complex(p) for p in d["centers"]],
                                  [pair_to_complex(p) for p in d["weights"]], d["a"], d["r0"], rep)
        if kind == "ridge":
            return RidgeApprox(d["thetas"], d["V"], d["h"], d["L"], np.array(d["coeffs"], dtype=float),
                               d["C"], d["a"], d["R"])
    except TypeError as exc:
        raise SchemaError(f"malformed approximation document: {exc}") from None
    except KeyError as exc:
        raise SchemaError(f"missing field {exc.args[0]!r}") from None
    raise SchemaError(f"unknown approximation kind {kind!r}", "$.kind")


def dumps(ap: Approx) -> str:
    return json.dumps(approx_to_dict(ap), indent=1) + "\n"


def loads(text: str) -> Approx:
    try:
        return approx_from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}") from None

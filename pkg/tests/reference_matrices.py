"""Bundled reference dominance matrices, loaded from the package data files."""

import json
from importlib import resources

import numpy as np


def load_reference_certificate(stem: str) -> dict:
    with resources.files("aifdom").joinpath(f"data/{stem}.json").open() as fh:
        return json.load(fh)


def _matrix(stem: str) -> np.ndarray:
    data = load_reference_certificate(stem)
    n = int(data["n"])
    return np.asarray(data["P"], dtype=float).reshape(n, n)


P_0DOM_BASE = _matrix("cert_fop_baseline_0dom")
P_2DOM_THETA2_4 = _matrix("cert_fop_theta2_4_2dom")
P_2DOM_K4 = _matrix("cert_fop_k4_2dom")

"""Zeta-regularized determinants of Sturm-Liouville direct sums.

Functions take expressions in ``x`` as strings, e.g. ``"exp(-2*x)"``.
"""

import json

from ._zetasum import (
    Expression,
    NumericalError,
    __version__,
    eigenvalues,
    interior_h0,
    kernel,
    logdet,
    resolvent_trace,
)
from ._zetasum import run as _run

__all__ = [
    "Expression",
    "NumericalError",
    "__version__",
    "assemble",
    "eigenvalues",
    "interior_h0",
    "kernel",
    "logdet",
    "regint",
    "regsum",
    "resolvent_trace",
    "run",
]


def run(config):
    """Run one command described by a config dict; returns (exit_code, result dict)."""
    cfg = dict(config)
    cfg.setdefault("no_cache", True)
    code, out, err = _run(json.dumps(cfg))
    if code == 1:
        raise ValueError(err.strip())
    return code, (json.loads(out) if out else None)


def regint(expr, a=1.0, b=None, model=""):
    """Partie finie integral of expr over (a, b), b = None meaning infinity."""
    code, res = run({"command": "regint", "expr": expr, "from": a, "to": b, "model": model})
    if code != 0:
        raise NumericalError(f"regint failed with exit code {code}")
    return res["result"]["value"]


def regsum(expr, start=1, method="direct", model=""):
    """Regularized sum of expr over the integers from start on."""
    code, res = run(
        {"command": "regsum", "expr": expr, "from": start, "method": method, "model": model}
    )
    if code != 0:
        raise NumericalError(f"regsum failed with exit code {code}")
    return res["result"]["value"]


def assemble(r=None, V=None, W="0", bc0="dirichlet", bc1="dirichlet", convention="zeta",
             sigma="default"):
    """Decomposed and direct log det of the direct sum; returns the report dict."""
    cfg = {"command": "zetasum", "subcommand": "assemble", "bc0": bc0, "bc1": bc1,
           "convention": convention, "sigma": sigma}
    if r is not None:
        cfg["r"] = r
    else:
        cfg["V"], cfg["W"] = V, W
    code, res = run(cfg)
    res["exit_code"] = code
    return res

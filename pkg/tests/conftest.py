"""Shared test helpers: finite-difference jet oracle and sampling utilities."""

from __future__ import annotations

import numpy as np

from twistorkit.coords import SliceSpec
from twistorkit.fieldexpr import BranchSign, FieldExpr, eval_value


def fd_jet(expr: FieldExpr, slc: SliceSpec, u, h: float = 1e-4,
           branch: BranchSign = BranchSign.PLUS):
    """Central-difference value/gradient/Hessian oracle, independent of the
    forward-mode path it is checked against."""
    u = np.asarray(u, dtype=complex)
    k = u.shape[0]

    def f(v):
        return eval_value(expr, slc, v, branch)

    val = f(u)
    grad = np.zeros(k, dtype=complex)
    hess = np.zeros((k, k), dtype=complex)
    for i in range(k):
        e = np.zeros(k)
        e[i] = h
        fp, fm = f(u + e), f(u - e)
        grad[i] = (fp - fm) / (2 * h)
        hess[i, i] = (fp - 2 * val + fm) / h ** 2
    for i in range(k):
        for j in range(i + 1, k):
            ei = np.zeros(k)
            ej = np.zeros(k)
            ei[i] = h
            ej[j] = h
            mixed = (
                f(u + ei + ej) - f(u + ei - ej) - f(u - ei + ej) + f(u - ei - ej)
            ) / (4 * h ** 2)
            hess[i, j] = hess[j, i] = mixed
    return val, grad, hess


def rel_err(a, b, floor: float = 1.0) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    scale = max(floor, float(np.max(np.abs(b))))
    return float(np.max(np.abs(a - b)) / scale)

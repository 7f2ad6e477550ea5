"""Global numerical tolerances.

All catalog computations are closed form, so algebraic residuals sit near
1e-14; TAU_ALG gives them four orders of headroom.  TAU_BRANCH guards
division, sqrt and log against branch loci / poles.
"""

from __future__ import annotations

TAU_ALG = 1e-10
TAU_BRANCH = 1e-8


def set_tau_alg(value: float) -> None:
    global TAU_ALG
    TAU_ALG = float(value)


def set_tau_branch(value: float) -> None:
    global TAU_BRANCH
    TAU_BRANCH = float(value)

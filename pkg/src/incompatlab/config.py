"""Central tolerance record.

Every numerical contract in the package reads its default tolerance from one
``Tolerances`` instance, so a single overriding file changes them coherently.
The CLI looks for a JSON override file at ``incompatlab-tolerances.json`` in
the working directory; the environment variable ``INCOMPATLAB_TOL_FILE``
points it somewhere else.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass

ENV_TOL_FILE = "INCOMPATLAB_TOL_FILE"
DEFAULT_TOL_FILE = "incompatlab-tolerances.json"


@dataclass(frozen=True)
class Tolerances:
    # matrix-level contracts
    hermiticity: float = 1e-12        # entrywise H = H^dagger
    eig_reconstruction: float = 1e-9  # relative Frobenius reconstruction
    jacobi_offdiag: float = 1e-13     # off-diagonal Frobenius stop, relative
    jacobi_max_sweeps: int = 100
    psd_floor: float = -1e-10         # smallest eigenvalue accepted as PSD
    povm_closure: float = 1e-10       # effects sum to identity
    dichotomy: float = 1e-10          # op^2 = I

    # projection feasibility engine
    feas_tol: float = 1e-7
    feas_max_iter: int = 200_000
    stagnation_window: int = 500
    stagnation_eps: float = 1e-12

    # threshold bisection
    eta_tol: float = 1e-3

    # linear programming
    lp_tol: float = 1e-9
    lp_max_pivots: int = 50_000

    # witness bookkeeping
    sos_crosscheck: float = 1e-6


DEFAULTS = Tolerances()


def load_tolerances(path: str | None = None) -> Tolerances:
    """Return the active tolerance record, applying a JSON override file.

    Lookup order: explicit ``path`` argument, then ``$INCOMPATLAB_TOL_FILE``,
    then ``./incompatlab-tolerances.json``.  A missing file yields the
    defaults; unknown keys in the file are rejected.
    """
    candidate = path or os.environ.get(ENV_TOL_FILE) or DEFAULT_TOL_FILE
    if not os.path.exists(candidate):
        if path is not None or os.environ.get(ENV_TOL_FILE):
            raise FileNotFoundError(f"tolerance file not found: {candidate}")
        return DEFAULTS
    with open(candidate, encoding="utf-8") as fh:
        overrides = json.load(fh)
    known = {f.name for f in dataclasses.fields(Tolerances)}
    unknown = set(overrides) - known
    if unknown:
        raise KeyError(f"unknown tolerance keys: {sorted(unknown)}")
    return dataclasses.replace(DEFAULTS, **overrides)

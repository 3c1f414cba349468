"""N-wise joint measurability of dichotomic quantum POVMs.

A set of POVMs is jointly measurable when a single ``2**n``-outcome global
measurement marginalizes to every one of them.  The decision problem is
convex feasibility over the product PSD cone and is delegated to the shared
Dykstra engine; critical unsharpness thresholds come from bisection.  The
closed-form qubit criterion for unbiased POVMs and the harmonic dimension
bound are provided as reference formulas.

A witness-passing set is never labelled "compatible" here: the engine's
FEASIBLE verdict (with its explicit certificate) is the only source of a
compatibility claim.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .config import DEFAULTS, Tolerances
from .errors import DomainError
from .feasibility import (FeasibilityResult, FeasStatus, ThresholdResult,
                          bisect_threshold, masked_marginal_feasibility)
from .matcore import require_hermitian
from .observables import Povm, require_dichotomic, unsharp_povm


@dataclass(frozen=True)
class JointPovm:
    """Global measurement indexed by sign tuples ``a in {+1,-1}**n``."""

    n: int
    dim: int
    effects: dict[tuple[int, ...], np.ndarray]

    def __post_init__(self):
        if len(self.effects) != 2 ** self.n:
            raise DomainError(
                f"expected {2 ** self.n} effects, got {len(self.effects)}")

    def validate(self, tol: Tolerances = DEFAULTS, slack: float = 1.0) -> None:
        """Raise unless every effect is PSD and all sum to the identity
        (within ``slack`` times the configured tolerances)."""
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for a, e in self.effects.items():
            h = require_hermitian(e, tol.hermiticity * 10)
            if np.linalg.eigvalsh(h).min() < tol.psd_floor * slack:
                raise DomainError(f"joint effect {a} is not PSD")
            total = total + h
        if np.abs(total - np.eye(self.dim)).max() > tol.povm_closure * slack:
            raise DomainError("joint effects do not sum to identity")


def sign_tuples(n: int) -> list[tuple[int, ...]]:
    """All outcome tuples in lexicographic order, +1 before -1."""
    return [tuple(t) for t in itertools.product((+1, -1), repeat=n)]


def marginalize(joint: JointPovm, x: int, outcome: int) -> np.ndarray:
    """Sum of joint effects whose x-th entry equals ``outcome`` (0-based x)."""
    if not 0 <= x < joint.n:
        raise DomainError(f"setting index {x} out of range for n={joint.n}")
    if outcome not in (+1, -1):
        raise DomainError(f"outcome must be +1 or -1, got {outcome!r}")
    total = np.zeros((joint.dim, joint.dim), dtype=complex)
    for a, e in joint.effects.items():
        if a[x] == outcome:
            total = total + e
    return total


@dataclass(frozen=True)
class JmVerdict:
    status: FeasStatus
    residual: float
    certificate: JointPovm | None
    iterations: int


def _validated_dichotomic_povms(povms) -> tuple[list[Povm], int]:
    if not povms:
        raise DomainError("need at least one POVM")
    dims = {p.dim for p in povms}
    if len(dims) > 1:
        raise DomainError(f"POVMs live in different dimensions: {sorted(dims)}")
    for p in povms:
        p.validate()
    return list(povms), dims.pop()


def jm_feasible(povms, tol: float | None = None, max_iter: int | None = None,
                cfg: Tolerances = DEFAULTS) -> JmVerdict:
    """Search for a joint POVM reproducing every input as a marginal.

    FEASIBLE comes with a certificate whose marginals match the inputs within
    the feasibility residual; INFEASIBLE is the stagnation heuristic of the
    projection engine; UNDECIDED means the iteration budget ran out first.
    The verdict is exactly invariant under reordering the input list: the
    engine runs on an internally sorted copy and the certificate is relabelled
    back to the caller's order.
    """
    povms, dim = _validated_dichotomic_povms(povms)
    n = len(povms)
    order = sorted(range(n), key=lambda i: povms[i].plus.tobytes())
    result = masked_marginal_feasibility(
        [povms[i].plus for i in order], np.eye(dim, dtype=complex),
        tol=tol, max_iter=max_iter, cfg=cfg)
    certificate = None
    if result.status is FeasStatus.FEASIBLE:
        effects: dict[tuple[int, ...], np.ndarray] = {}
        for a in range(2 ** n):
            t = [0] * n
            for i in range(n):
                t[order[i]] = +1 if (a >> i) & 1 else -1
            effects[tuple(t)] = result.matrices[a]
        certificate = JointPovm(n=n, dim=dim, effects=effects)
    return JmVerdict(result.status, result.residual, certificate, result.iterations)


def jm_threshold(observables, eta_tol: float | None = None,
                 cfg: Tolerances = DEFAULTS) -> ThresholdResult:
    """Critical unsharpness for the unbiased smearings of the observables.

    Bisection of ``jm_feasible`` over eta in [0, 1].  An UNDECIDED verdict at
    a bracket midpoint is retried once with the feasibility tolerance widened
    tenfold; if still undecided the result carries the unresolved band.
    """
    obs = [require_dichotomic(a) for a in observables]

    def evaluate(eta: float) -> FeasStatus:
        povms = [unsharp_povm(a, eta) for a in obs]
        verdict = jm_feasible(povms, cfg=cfg)
        if verdict.status is FeasStatus.UNDECIDED:
            verdict = jm_feasible(povms, tol=cfg.feas_tol * 10, cfg=cfg)
        return verdict.status

    return bisect_threshold(evaluate, eta_tol, cfg)


def qubit_unbiased_threshold(axes) -> float:
    """Closed-form threshold for unbiased qubit POVMs along unit Bloch axes:
    ``(1/N) * max over sign vectors a of || sum_x a_x k_x ||``.

    This reproduces the exact threshold for orthogonal axes (``1/sqrt(N)``
    for N = 2, 3); for general axes it is an upper bound on the critical
    unsharpness, not the exact value.
    """
    ks = [np.asarray(k, dtype=float).reshape(-1) for k in axes]
    n = len(ks)
    if n < 1:
        raise DomainError("need at least one axis")
    for k in ks:
        if k.shape != (3,):
            raise DomainError(f"axes must be 3-vectors, got shape {k.shape}")
        if abs(np.linalg.norm(k) - 1.0) > 1e-10:
            raise DomainError(f"axis is not unit length: |k| = {np.linalg.norm(k)}")
    best = 0.0
    for signs in itertools.product((+1.0, -1.0), repeat=n):
        best = max(best, float(np.linalg.norm(sum(s * k for s, k in zip(signs, ks)))))
    return best / n


def harmonic_bound(d: int) -> float:
    """Unsharpness bound ``(H_d - 1)/(d - 1)`` with the d-th harmonic number
    ``H_d``, valid for arbitrarily many noisy measurements in dimension d."""
    if d < 2:
        raise DomainError(f"dimension must be at least 2, got {d}")
    h_d = sum(1.0 / k for k in range(1, d + 1))
    return (h_d - 1.0) / (d - 1.0)

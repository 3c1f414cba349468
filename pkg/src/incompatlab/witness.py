"""Bipartite incompatibility witness and its sum-of-squares certificate.

The witness is the ``2**(n-1)``-term correlation functional

    W = sum_y | sum_x s(y,x) <A_x (x) B_y>  -  delta_y |,

where the sign patterns ``s(y, x)`` run over all assignments with the first
setting positive.  A value above the classical bound ``2**(n-1)`` certifies
that Alice's n measurements cannot be n-wise compatible.  The quantum optimum
``eta * 2**(n-1) * sqrt(n)`` is attained by mutually anticommuting Alice
observables on a maximally entangled state.

The certificate operator built by :func:`sos_gap` is a sum of squares

    gamma = sum_y [ (w_y/2) L_y^dag L_y  +  ((w_y^2 I - S_y^2)/(2 w_y)) (x) I ]

with ``L_y = S_y (x) I / w_y - I (x) B_y`` (Bob sign-adjusted so the absolute
values match) and ``w_y`` the operator norm of ``S_y = sum_x s(y,x) A_x``.
The second, manifestly PSD term vanishes identically for anticommuting Alice
sets, where ``S_y^2 = n I``; keeping it makes ``Tr[gamma rho]`` equal the
scalar gap ``sum_y w_y - W`` for arbitrary observables, so the operator and
difference forms can be cross-checked on every instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import DEFAULTS, Tolerances
from .errors import DomainError, NumericError
from .jointmeas import JointPovm
from .matcore import (hs_inner, op_norm, partial_trace, require_hermitian,
                      tensor)

_OMEGA_FLOOR = 1e-12


@dataclass(frozen=True)
class SignTable:
    """Canonical sign patterns: bit strings of length n with first bit 0,
    remaining bits counting upward in binary."""

    n: int
    rows: np.ndarray  # (2**(n-1), n) uint8

    def signs(self) -> np.ndarray:
        return 1.0 - 2.0 * self.rows.astype(float)

    def validate(self) -> None:
        expected = 2 ** (self.n - 1)
        if self.rows.shape != (expected, self.n):
            raise DomainError(f"sign table shape {self.rows.shape} is wrong for n={self.n}")
        if self.rows[:, 0].any():
            raise DomainError("every sign-table row must start with bit 0")
        if len({tuple(r) for r in self.rows.tolist()}) != expected:
            raise DomainError("sign-table rows are not distinct")


def sign_strings(n: int) -> SignTable:
    """The canonical table of ``2**(n-1)`` sign patterns for n settings."""
    if not 2 <= n <= 9:
        raise DomainError(f"setting count must be in [2, 9], got {n}")
    rows = np.zeros((2 ** (n - 1), n), dtype=np.uint8)
    for y in range(2 ** (n - 1)):
        for x in range(1, n):
            rows[y, x] = (y >> (n - 1 - x)) & 1
    table = SignTable(n=n, rows=rows)
    table.validate()
    return table


def maximally_entangled(d: int) -> np.ndarray:
    """Density operator of the canonical maximally entangled state on d x d."""
    if d < 2:
        raise DomainError(f"local dimension must be at least 2, got {d}")
    vec = np.zeros(d * d, dtype=complex)
    vec[:: d + 1] = 1.0 / np.sqrt(d)
    return np.outer(vec, vec.conj())


def require_density(rho, dims: tuple[int, int] | None = None,
                    tol: Tolerances = DEFAULTS) -> np.ndarray:
    """Validate a (bipartite) density operator: Hermitian, PSD, unit trace."""
    m = require_hermitian(rho, tol.hermiticity)
    if dims is not None and m.shape[0] != dims[0] * dims[1]:
        raise DomainError(
            f"state dimension {m.shape[0]} does not factor as {dims[0]}x{dims[1]}")
    if abs(np.trace(m).real - 1.0) > 1e-9:
        raise DomainError(f"state trace is {np.trace(m).real}, expected 1")
    if np.linalg.eigvalsh(m).min() < -1e-9:
        raise DomainError("state is not positive semidefinite")
    return m


def correlation(rho, a, b, tol: Tolerances = DEFAULTS) -> float:
    """Joint correlator Tr[rho (a (x) b)] for observables on the two wings."""
    am = require_hermitian(a, tol.hermiticity)
    bm = require_hermitian(b, tol.hermiticity)
    rm = require_density(rho, (am.shape[0], bm.shape[0]), tol)
    return hs_inner(rm, tensor(am, bm), tol)


@dataclass(frozen=True)
class WitnessReport:
    n: int
    value: float
    bound_local: float
    bound_quantum: float
    per_y_terms: list[float]
    delta_used: list[float]
    sos_gap: float
    violation: bool


def _normalize_delta(delta, terms: int) -> list[float]:
    if np.isscalar(delta):
        return [float(delta)] * terms
    deltas = [float(v) for v in delta]
    if len(deltas) == 1:
        return deltas * terms
    if len(deltas) != terms:
        raise DomainError(f"delta must have length 1 or {terms}, got {len(deltas)}")
    return deltas


def _setting_sums(alice: Sequence[np.ndarray], table: SignTable) -> list[np.ndarray]:
    signs = table.signs()
    return [sum(signs[y, x] * alice[x] for x in range(table.n))
            for y in range(signs.shape[0])]


def witness_value(rho, alice, bob, delta=0.0, eta: float | None = None,
                  cfg: Tolerances = DEFAULTS) -> WitnessReport:
    """Evaluate the witness for given (possibly eta-scaled) Alice operators.

    ``alice`` holds the effective observables, i.e. ``eta * A_x`` for unbiased
    unsharp measurements; ``bob`` must hold ``2**(n-1)`` dichotomic
    observables.  ``delta`` is a shared offset or one per sign pattern
    (default 0, exact for mutually-maximally incompatible observables).  The
    reported quantum bound uses ``eta`` when given, else the largest Alice
    operator norm (which equals eta for scaled dichotomic inputs).
    """
    alice = [require_hermitian(a, cfg.hermiticity) for a in alice]
    bob = [require_hermitian(b, cfg.hermiticity) for b in bob]
    n = len(alice)
    table = sign_strings(n)
    terms = 2 ** (n - 1)
    if len(bob) != terms:
        raise DomainError(f"need {terms} Bob observables for n={n}, got {len(bob)}")
    deltas = _normalize_delta(delta, terms)
    rho = require_density(rho, (alice[0].shape[0], bob[0].shape[0]), cfg)

    sums = _setting_sums(alice, table)
    raw = [hs_inner(rho, tensor(s, b), cfg) for s, b in zip(sums, bob)]
    per_y = [abs(c - dl) for c, dl in zip(raw, deltas)]
    value = float(sum(per_y))
    if eta is None:
        eta = max(op_norm(a, cfg) for a in alice)
    gap = _sos_gap_checked(rho, alice, bob, sums, raw, cfg)
    return WitnessReport(
        n=n,
        value=value,
        bound_local=float(2 ** (n - 1)),
        bound_quantum=float(eta * 2 ** (n - 1) * np.sqrt(n)),
        per_y_terms=per_y,
        delta_used=deltas,
        sos_gap=gap,
        violation=value > 2 ** (n - 1) + 1e-9,
    )


def omega_factors(alice, cfg: Tolerances = DEFAULTS) -> list[float]:
    """Operator norms of the signed setting sums, one per sign pattern."""
    alice = [require_hermitian(a, cfg.hermiticity) for a in alice]
    table = sign_strings(len(alice))
    return [op_norm(s, cfg) for s in _setting_sums(alice, table)]


def optimize_bob(rho, alice, eta: float = 1.0,
                 cfg: Tolerances = DEFAULTS) -> tuple[list[np.ndarray], float]:
    """Bob observables maximizing the witness for fixed state and Alice.

    For each sign pattern, ``B_y = sign(chi_y)`` with ``chi_y`` the Bob-side
    reduction of ``(S_y (x) I) rho`` (zero eigenvalues count as +1, keeping
    the observable dichotomic).  The returned value ``eta * sum_y ||chi_y||_1``
    equals the witness value of the returned configuration with delta = 0.
    """
    alice = [require_hermitian(a, cfg.hermiticity) for a in alice]
    n = len(alice)
    d_a = alice[0].shape[0]
    rho = require_hermitian(rho, cfg.hermiticity)
    if rho.shape[0] % d_a:
        raise DomainError(f"state dim {rho.shape[0]} is no multiple of Alice dim {d_a}")
    d_b = rho.shape[0] // d_a
    table = sign_strings(n)
    eye_b = np.eye(d_b, dtype=complex)
    bobs: list[np.ndarray] = []
    value = 0.0
    for s in _setting_sums(alice, table):
        chi = partial_trace(tensor(s, eye_b) @ rho, d_a, d_b, keep="B")
        chi = (chi + chi.conj().T) / 2.0
        w, v = np.linalg.eigh(chi)
        bobs.append((v * np.where(w >= 0.0, 1.0, -1.0)) @ v.conj().T)
        value += float(np.abs(w).sum())
    return bobs, eta * value


def boundary_eta(rho, alice, cfg: Tolerances = DEFAULTS) -> float:
    """Unsharpness at which the optimized witness meets the classical bound.

    The optimized value is linear in eta, so the crossing is the bound divided
    by the sharp value; at that eta the witness stops certifying
    incompatibility.
    """
    _, sharp = optimize_bob(rho, alice, eta=1.0, cfg=cfg)
    if sharp <= 0.0:
        raise NumericError("witness value vanishes; no boundary crossing")
    return float(2 ** (len(alice) - 1) / sharp)


def _sos_gap_checked(rho, alice, bob, sums, raw, cfg: Tolerances) -> float:
    """Difference-form gap with the mandatory operator-form cross-check."""
    omegas = [op_norm(s, cfg) for s in sums]
    value = float(sum(abs(c) for c in raw))
    direct = float(sum(omegas)) - value

    d_a = alice[0].shape[0]
    d_b = bob[0].shape[0]
    gamma = np.zeros((d_a * d_b, d_a * d_b), dtype=complex)
    eye_a = np.eye(d_a, dtype=complex)
    eye_b = np.eye(d_b, dtype=complex)
    degenerate = False
    for s, b, om, c in zip(sums, bob, omegas, raw):
        if om <= _OMEGA_FLOOR:
            # L_y is undefined at omega = 0; the direct difference is
            # authoritative (such terms contribute nothing to either side)
            degenerate = True
            continue
        sign = 1.0 if c >= 0.0 else -1.0
        ell = tensor(s, eye_b) / om - tensor(eye_a, sign * b)
        gamma += (om / 2.0) * (ell.conj().T @ ell)
        gamma += tensor(om * eye_a / 2.0 - s @ s / (2.0 * om), eye_b)
    gamma = (gamma + gamma.conj().T) / 2.0
    operator_form = float(np.einsum("ij,ji->", gamma, rho).real)
    if not degenerate and abs(operator_form - direct) > cfg.sos_crosscheck:
        raise NumericError(
            f"sum-of-squares gap mismatch: operator form {operator_form:.3e} "
            f"vs direct {direct:.3e}")
    return direct


def sos_gap(rho, alice, bob, cfg: Tolerances = DEFAULTS) -> float:
    """Certificate slack ``sum_y omega_y - W(delta=0)``, computed both from
    the explicit PSD certificate operator and as a scalar difference.

    The two routes must agree within ``Tolerances.sos_crosscheck``; a larger
    discrepancy raises :class:`NumericError`.  Sign patterns with vanishing
    ``omega_y`` (repeated observables) are skipped in the operator route and
    the scalar difference is returned as authoritative.
    """
    alice = [require_hermitian(a, cfg.hermiticity) for a in alice]
    bob = [require_hermitian(b, cfg.hermiticity) for b in bob]
    table = sign_strings(len(alice))
    if len(bob) != 2 ** (len(alice) - 1):
        raise DomainError(f"need {2 ** (len(alice) - 1)} Bob observables")
    rho = require_density(rho, (alice[0].shape[0], bob[0].shape[0]), cfg)
    sums = _setting_sums(alice, table)
    raw = [hs_inner(rho, tensor(s, b), cfg) for s, b in zip(sums, bob)]
    return _sos_gap_checked(rho, alice, bob, sums, raw, cfg)


def concavity_bound(omegas) -> float:
    """Cauchy-Schwarz cap ``sqrt(m * sum w^2)`` on a sum of m nonnegative
    terms; saturated exactly when all entries are equal."""
    vals = np.asarray(list(omegas), dtype=float)
    if (vals < 0).any():
        raise DomainError("omega factors must be nonnegative")
    return float(np.sqrt(vals.size * float((vals ** 2).sum())))


def quantum_optimum(n: int, eta: float) -> float:
    """Largest quantum witness value, ``eta * 2**(n-1) * sqrt(n)``."""
    if n < 2:
        raise DomainError(f"need at least two settings, got {n}")
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"unsharpness must lie in [0, 1], got {eta}")
    return float(eta * 2 ** (n - 1) * np.sqrt(n))


def sign_pattern_probs(joint: JointPovm, state, cfg: Tolerances = DEFAULTS) -> np.ndarray:
    """Probabilities of the ``2**(n-1)`` relative-sign patterns of a joint
    measurement on an Alice-side state.

    Each outcome tuple belongs to exactly one pattern class {a, -a}, so the
    returned entries sum to one for any valid state, whatever conditioning
    produced it on the other wing.
    """
    rho = require_hermitian(state, cfg.hermiticity)
    if abs(np.trace(rho).real - 1.0) > 1e-9:
        raise DomainError("state must have unit trace")
    n = joint.n
    probs = np.zeros(2 ** (n - 1))
    for a, effect in joint.effects.items():
        rep = a if a[0] == +1 else tuple(-v for v in a)
        y = 0
        for x in range(1, n):
            y = (y << 1) | (rep[x] == -1)
        probs[y] += hs_inner(rho, effect, cfg)
    return probs

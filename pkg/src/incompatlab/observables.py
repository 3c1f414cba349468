"""Dichotomic observables, anticommuting generator sets, unsharp POVMs.

A dichotomic observable is a Hermitian matrix squaring to the identity
(eigenvalues all +-1).  Unsharp measurement is the unbiased smearing
``(I +- eta*A)/2`` with unsharpness ``eta in [0, 1]``; biased smearings are
representable through the generic ``Povm`` type but have no constructor here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULTS, Tolerances
from .errors import DomainError
from .matcore import require_hermitian, tensor

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def require_dichotomic(a, tol: float | None = None) -> np.ndarray:
    """Validate ``a*a = I`` within ``tol`` (default ``Tolerances.dichotomy``)."""
    m = require_hermitian(a)
    tol = DEFAULTS.dichotomy if tol is None else tol
    dev = np.abs(m @ m - np.eye(m.shape[0])).max()
    if dev > tol:
        raise DomainError(f"operator is not dichotomic: ||A^2 - I|| = {dev:.3e}")
    return m


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


def pauli(axis: str) -> np.ndarray:
    """Standard 2x2 Pauli matrix for axis 'x', 'y', or 'z'."""
    try:
        return _frozen(_PAULI[axis].copy())
    except KeyError:
        raise DomainError(f"axis must be one of x, y, z; got {axis!r}") from None


def bloch_observable(k, tol: float = 1e-10) -> np.ndarray:
    """Qubit observable ``k . sigma`` for a unit Bloch vector ``k``."""
    v = np.asarray(k, dtype=float).reshape(-1)
    if v.shape != (3,):
        raise DomainError(f"Bloch vector must have 3 components, got {v.shape}")
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise DomainError(f"Bloch vector is not unit length: |k| = {np.linalg.norm(v)}")
    return _frozen(v[0] * _PAULI["x"] + v[1] * _PAULI["y"] + v[2] * _PAULI["z"])


def clifford_generators(n: int) -> list[np.ndarray]:
    """``n`` mutually anticommuting dichotomic observables in dimension
    ``2**(n//2)``.

    Construction: the Jordan-Wigner ladder on ``n//2`` qubits,
    ``G(2j-1) = Z^(j-1) x X x I...`` and ``G(2j) = Z^(j-1) x Y x I...``;
    for odd ``n`` the final generator is the ladder's chirality element
    ``Z x Z x ... x Z``, which anticommutes with every ladder element.
    The degenerate case ``n = 1`` returns ``[sigma_z]`` in dimension 2
    (the dimension formula would give a scalar space).
    """
    if not 1 <= n <= 9:
        raise DomainError(f"generator count must be in [1, 9], got {n}")
    if n == 1:
        return [pauli("z")]
    m = n // 2
    eye = np.eye(2, dtype=complex)
    gens: list[np.ndarray] = []
    for j in range(m):
        for sig in ("x", "y"):
            factors = [_PAULI["z"]] * j + [_PAULI[sig]] + [eye] * (m - j - 1)
            g = factors[0]
            for f in factors[1:]:
                g = tensor(g, f)
            gens.append(g)
    if n % 2:
        g = _PAULI["z"]
        for _ in range(m - 1):
            g = tensor(g, _PAULI["z"])
        gens.append(g)
    return [_frozen(g) for g in gens[:n]]


def anticommutation_check(ops, tol: float = 1e-9) -> tuple[bool, float]:
    """Check that all operators square to I and pairwise anticommute.

    Returns ``(ok, worst)`` where ``worst`` is the largest residual operator
    norm over all squares ``A^2 - I`` and anticommutators ``{A, A'}``.
    """
    mats = [require_hermitian(a) for a in ops]
    dims = {m.shape[0] for m in mats}
    if len(dims) > 1:
        raise DomainError(f"operators live in different dimensions: {sorted(dims)}")
    d = dims.pop()
    eye = np.eye(d)
    worst = 0.0
    for i, a in enumerate(mats):
        worst = max(worst, float(np.linalg.norm(a @ a - eye, 2)))
        for b in mats[i + 1:]:
            worst = max(worst, float(np.linalg.norm(a @ b + b @ a, 2)))
    return worst <= tol, worst


@dataclass(frozen=True)
class Povm:
    """Two-outcome POVM with effects labelled +1 and -1."""

    plus: np.ndarray
    minus: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "plus", _frozen(self.plus))
        object.__setattr__(self, "minus", _frozen(self.minus))

    @property
    def dim(self) -> int:
        return self.plus.shape[0]

    @property
    def outcomes(self) -> tuple[tuple[int, np.ndarray], ...]:
        return ((+1, self.plus), (-1, self.minus))

    def effect(self, label: int) -> np.ndarray:
        if label == +1:
            return self.plus
        if label == -1:
            return self.minus
        raise DomainError(f"outcome label must be +1 or -1, got {label!r}")

    def validate(self, tol: Tolerances = DEFAULTS) -> None:
        """Raise unless both effects are PSD and sum to the identity."""
        for label, e in self.outcomes:
            h = require_hermitian(e, tol.hermiticity)
            evals = np.linalg.eigvalsh(h)
            if evals.min() < tol.psd_floor:
                raise DomainError(
                    f"effect {label:+d} is not PSD (min eigenvalue {evals.min():.3e})")
        closure = np.abs(self.plus + self.minus - np.eye(self.dim)).max()
        if closure > tol.povm_closure:
            raise DomainError(f"effects do not sum to identity (deviation {closure:.3e})")


def unsharp_povm(a, eta: float) -> Povm:
    """Unbiased smearing of a dichotomic observable: effects ``(I +- eta A)/2``.

    The effects are PSD for any ``eta in [0, 1]`` and sum to the identity
    exactly; ``eta = 1`` recovers the projective measurement, ``eta = 0`` the
    trivial one.
    """
    m = require_dichotomic(a)
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"unsharpness must lie in [0, 1], got {eta}")
    eye = np.eye(m.shape[0])
    return Povm(plus=(eye + eta * m) / 2.0, minus=(eye - eta * m) / 2.0)

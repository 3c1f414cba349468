"""Steering assemblages and local-hidden-state decomposability.

Measuring one wing of a bipartite state remotely prepares subnormalized
states on the other wing; an assemblage collects them per setting and
outcome.  The hidden-state question asks for PSD operators, one per
deterministic response strategy, reproducing every member by marginalization.
Because all measurements here are dichotomic, strategies range over sign
tuples in {+1,-1}**n and probabilistic responses add no generality (they are
convex mixtures of deterministic ones).  The search runs on the same Dykstra
engine and configuration as the joint-measurability module, so equivalence
checks between the two verdicts compare like with like.

The embeddability verdict exposed here is the theorem-backed mapping from
hidden-state decomposability of the steered fragment; it is not an
independent geometric embedding search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .config import DEFAULTS, Tolerances
from .errors import DomainError
from .feasibility import (FeasStatus, ThresholdResult, bisect_threshold,
                          masked_marginal_feasibility)
from .matcore import partial_trace, require_hermitian, tensor
from .observables import Povm, require_dichotomic, unsharp_povm
from .witness import require_density


@dataclass(frozen=True)
class Assemblage:
    """Subnormalized steered states, keyed by (setting index, outcome)."""

    n: int
    dim_b: int
    members: dict[tuple[int, int], np.ndarray]

    def member(self, x: int, outcome: int) -> np.ndarray:
        try:
            return self.members[(x, outcome)]
        except KeyError:
            raise DomainError(f"no member for setting {x}, outcome {outcome}") from None

    def reduced_state(self) -> np.ndarray:
        """Bob's marginal, averaged over settings for numerical symmetry."""
        acc = np.zeros((self.dim_b, self.dim_b), dtype=complex)
        for x in range(self.n):
            acc += self.member(x, +1) + self.member(x, -1)
        return acc / self.n

    def validate(self, tol: Tolerances = DEFAULTS) -> None:
        """PSD members, setting-independent totals, unit total trace."""
        if set(self.members) != {(x, o) for x in range(self.n) for o in (+1, -1)}:
            raise DomainError("assemblage members do not cover settings x outcomes")
        totals = []
        for x in range(self.n):
            for o in (+1, -1):
                m = require_hermitian(self.member(x, o), tol.hermiticity * 10)
                if np.linalg.eigvalsh(m).min() < tol.psd_floor:
                    raise DomainError(f"member ({x}, {o:+d}) is not PSD")
            totals.append(self.member(x, +1) + self.member(x, -1))
        for t in totals[1:]:
            if np.abs(t - totals[0]).max() > 1e-9:
                raise DomainError("totals differ across settings (signalling assemblage)")
        if abs(np.trace(totals[0]).real - 1.0) > 1e-9:
            raise DomainError("assemblage total trace is not 1")


def steer(rho, povms: list[Povm], cfg: Tolerances = DEFAULTS) -> Assemblage:
    """Assemblage remotely prepared on wing B by measuring the POVMs on A.

    Members are the B-side reductions of ``(E (x) I) rho``; the no-signalling
    consistency of the totals is inherited from the POVM closures.
    """
    if not povms:
        raise DomainError("need at least one POVM")
    dims = {p.dim for p in povms}
    if len(dims) > 1:
        raise DomainError(f"POVMs live in different dimensions: {sorted(dims)}")
    dim_a = dims.pop()
    rho = require_hermitian(rho, cfg.hermiticity)
    if rho.shape[0] % dim_a:
        raise DomainError(
            f"state dim {rho.shape[0]} is no multiple of Alice dim {dim_a}")
    dim_b = rho.shape[0] // dim_a
    require_density(rho, (dim_a, dim_b), cfg)
    eye_b = np.eye(dim_b, dtype=complex)
    members: dict[tuple[int, int], np.ndarray] = {}
    for x, p in enumerate(povms):
        p.validate(cfg)
        for o, effect in p.outcomes:
            red = partial_trace(tensor(effect, eye_b) @ rho, dim_a, dim_b, keep="B")
            members[(x, o)] = (red + red.conj().T) / 2.0
    asm = Assemblage(n=len(povms), dim_b=dim_b, members=members)
    asm.validate(cfg)
    return asm


@dataclass(frozen=True)
class LhsVerdict:
    status: FeasStatus
    residual: float
    model: dict[tuple[int, ...], np.ndarray] | None
    iterations: int


def lhs_feasible(asm: Assemblage, tol: float | None = None,
                 max_iter: int | None = None,
                 cfg: Tolerances = DEFAULTS) -> LhsVerdict:
    """Search for hidden states reproducing the assemblage.

    Feasibility of PSD operators ``sigma_lambda`` over deterministic
    strategies ``lambda in {+1,-1}**n`` with
    ``sum over {lambda : lambda_x = a} sigma_lambda = sigma_{a|x}``.
    Status semantics match the joint-measurability verdict.
    """
    if asm.n > 6:
        raise DomainError(f"2**{asm.n} hidden-state variables exceed the cap (n <= 6)")
    asm.validate(cfg)
    result = masked_marginal_feasibility(
        [asm.member(x, +1) for x in range(asm.n)], asm.reduced_state(),
        tol=tol, max_iter=max_iter, cfg=cfg)
    model = None
    if result.status is FeasStatus.FEASIBLE:
        model = {}
        for idx, lam in enumerate(np.asarray(result.matrices)):
            strategy = tuple(+1 if (idx >> x) & 1 else -1 for x in range(asm.n))
            model[strategy] = lam
    return LhsVerdict(result.status, result.residual, model, result.iterations)


def lhs_threshold(rho, observables, eta_tol: float | None = None,
                  cfg: Tolerances = DEFAULTS) -> ThresholdResult:
    """Critical unsharpness below which the steered assemblage admits a
    hidden-state model; bisection with the same retry policy as the
    joint-measurability threshold."""
    obs = [require_dichotomic(a) for a in observables]

    def evaluate(eta: float) -> FeasStatus:
        asm = steer(rho, [unsharp_povm(a, eta) for a in obs], cfg)
        verdict = lhs_feasible(asm, cfg=cfg)
        if verdict.status is FeasStatus.UNDECIDED:
            verdict = lhs_feasible(asm, tol=cfg.feas_tol * 10, cfg=cfg)
        return verdict.status

    return bisect_threshold(evaluate, eta_tol, cfg)


@dataclass(frozen=True)
class EmbeddabilityVerdict:
    """Simplex-embeddability of the steered preparation fragment.

    ``embeddable`` is None when the underlying feasibility run stayed
    undecided.  The verdict is the mapped hidden-state answer: the steered
    fragment embeds into a simplicial theory exactly when the assemblage
    admits a hidden-state decomposition, which in turn holds exactly when the
    steering measurements are compatible.
    """

    embeddable: bool | None
    residual: float
    status: FeasStatus


def simplex_embeddable_verdict(asm: Assemblage,
                               cfg: Tolerances = DEFAULTS) -> EmbeddabilityVerdict:
    verdict = lhs_feasible(asm, cfg=cfg)
    if verdict.status is FeasStatus.UNDECIDED:
        return EmbeddabilityVerdict(None, verdict.residual, verdict.status)
    return EmbeddabilityVerdict(verdict.status is FeasStatus.FEASIBLE,
                                verdict.residual, verdict.status)


def save_assemblage(asm: Assemblage, path: str) -> None:
    """Write the assemblage as plain text: header lines ``n`` and ``dimB``,
    then per member a ``member x outcome`` line followed by ``dimB`` rows of
    real/imaginary pairs in row-major order."""
    lines = ["# assemblage v1", f"n {asm.n}", f"dimB {asm.dim_b}"]
    for x in range(asm.n):
        for o in (+1, -1):
            lines.append(f"member {x} {o:+d}")
            for row in asm.member(x, o):
                lines.append(" ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_assemblage(path: str, cfg: Tolerances = DEFAULTS) -> Assemblage:
    """Parse the text schema written by :func:`save_assemblage`."""
    n = dim_b = None
    members: dict[tuple[int, int], np.ndarray] = {}
    current: tuple[int, int] | None = None
    rows: list[list[complex]] = []

    def flush():
        if current is not None:
            if dim_b is None or len(rows) != dim_b:
                raise DomainError(f"{path}: member {current} has wrong row count")
            members[current] = np.array(rows, dtype=complex)

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            try:
                if fields[0] == "n":
                    n = int(fields[1])
                elif fields[0] == "dimB":
                    dim_b = int(fields[1])
                elif fields[0] == "member":
                    flush()
                    current = (int(fields[1]), int(fields[2]))
                    rows = []
                else:
                    vals = [float(v) for v in fields]
                    if len(vals) % 2:
                        raise DomainError(f"{path}:{lineno}: odd number of scalars")
                    rows.append([complex(re, im)
                                 for re, im in zip(vals[::2], vals[1::2])])
            except (ValueError, IndexError) as exc:
                raise DomainError(f"{path}:{lineno}: {exc}") from None
    flush()
    if n is None or dim_b is None:
        raise DomainError(f"{path}: missing n or dimB header")
    asm = Assemblage(n=n, dim_b=dim_b, members=members)
    asm.validate(cfg)
    return asm

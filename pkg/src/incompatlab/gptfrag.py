"""Finite polytopic GPT fragments and GPT-level joint measurability.

A fragment lists extremal state vectors, extremal effect vectors, and the
unit effect of a convex operational theory; probabilities are plain dot
products.  Joint measurability of dichotomic measurements is decided by
linear programming: find ``2**n`` joint-effect vectors, nonnegative on every
extremal state, summing to the unit, with the prescribed marginals.  Joint
effects are only required to be consistent (nonnegative probability on all
listed states), matching the dual-cone reading of measurements.

Built-in fragments: the classical simplicial theory in any dimension and the
square-state-space "gbit" whose two fiducial measurements are maximally
incompatible (critical unsharpness 1/2, below every quantum pair).

Import/export uses a line-oriented text schema (see ``save_fragment``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .config import DEFAULTS, Tolerances
from .errors import DomainError, NumericError
from .feasibility import ThresholdResult, FeasStatus, bisect_threshold
from .simplex import LpProblem, LpSolution, LpStatus, solve_standard


@dataclass(frozen=True)
class GptFragment:
    states: np.ndarray   # (num_states, vec_dim) extremal states
    effects: np.ndarray  # (num_effects, vec_dim) extremal effects
    unit: np.ndarray     # (vec_dim,)

    def __post_init__(self):
        states = np.atleast_2d(np.asarray(self.states, dtype=float))
        effects = np.atleast_2d(np.asarray(self.effects, dtype=float))
        unit = np.asarray(self.unit, dtype=float).reshape(-1)
        if states.shape[1] != unit.size or effects.shape[1] != unit.size:
            raise DomainError("states, effects and unit disagree on vec_dim")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "effects", effects)
        object.__setattr__(self, "unit", unit)

    @property
    def vec_dim(self) -> int:
        return self.unit.size

    def validate(self, tol: float = 1e-9) -> None:
        """Check 0 <= <e, w> <= 1 for all listed pairs and <u, w> = 1."""
        probs = self.effects @ self.states.T
        if probs.min() < -tol or probs.max() > 1.0 + tol:
            raise DomainError(
                f"listed effect/state pair gives probability outside [0,1]: "
                f"range [{probs.min():.3e}, {probs.max():.3e}]")
        unit_vals = self.states @ self.unit
        if np.abs(unit_vals - 1.0).max() > tol:
            raise DomainError("unit effect does not evaluate to 1 on every state")


@dataclass(frozen=True)
class GptMeasurement:
    """Dichotomic GPT measurement: two effect vectors labelled +1 and -1."""

    plus: np.ndarray
    minus: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "plus", np.asarray(self.plus, dtype=float).reshape(-1))
        object.__setattr__(self, "minus", np.asarray(self.minus, dtype=float).reshape(-1))
        if self.plus.shape != self.minus.shape:
            raise DomainError("effect vectors disagree on vec_dim")

    def validate(self, fragment: GptFragment, tol: float = 1e-9) -> None:
        if np.abs(self.plus + self.minus - fragment.unit).max() > tol:
            raise DomainError("measurement effects do not sum to the unit effect")
        for e in (self.plus, self.minus):
            probs = fragment.states @ e
            if probs.min() < -tol or probs.max() > 1.0 + tol:
                raise DomainError("measurement effect leaves [0,1] on a listed state")


def gpt_prob(effect, state) -> float:
    """Outcome probability <effect, state> under the bilinear rule."""
    e = np.asarray(effect, dtype=float).reshape(-1)
    w = np.asarray(state, dtype=float).reshape(-1)
    if e.size != w.size:
        raise DomainError(f"vec_dim mismatch: {e.size} vs {w.size}")
    return float(e @ w)


def simplicial_gpt(d: int) -> GptFragment:
    """Classical theory on d perfectly distinguishable states.

    States are the standard basis of R^d; the 2**d extremal effects are all
    vertex-subset indicators (the hypercube), the unit is all-ones.
    """
    if d < 2:
        raise DomainError(f"simplicial dimension must be at least 2, got {d}")
    states = np.eye(d)
    effects = np.array(list(itertools.product((0.0, 1.0), repeat=d)))
    return GptFragment(states=states, effects=effects, unit=np.ones(d))


def gbit() -> GptFragment:
    """Square-state-space fragment: four vertices (+-1, +-1, 1), unit (0,0,1).

    The extremal effects listed are the two fiducial measurements' effects
    ((+-1/2, 0, 1/2) and (0, +-1/2, 1/2)) plus unit and zero.
    """
    states = np.array([[1, 1, 1], [1, -1, 1], [-1, 1, 1], [-1, -1, 1]], dtype=float)
    effects = np.array([
        [0.5, 0.0, 0.5], [-0.5, 0.0, 0.5],
        [0.0, 0.5, 0.5], [0.0, -0.5, 0.5],
        [0.0, 0.0, 1.0], [0.0, 0.0, 0.0],
    ])
    return GptFragment(states=states, effects=effects, unit=np.array([0.0, 0.0, 1.0]))


def gbit_fiducials() -> list[GptMeasurement]:
    """The two sharp fiducial measurements of the square state space."""
    f = gbit().effects
    return [GptMeasurement(plus=f[0], minus=f[1]),
            GptMeasurement(plus=f[2], minus=f[3])]


def measurement_from_effect(fragment: GptFragment, effect) -> GptMeasurement:
    """Dichotomic measurement (e, unit - e) built from one effect vector."""
    e = np.asarray(effect, dtype=float).reshape(-1)
    m = GptMeasurement(plus=e, minus=fragment.unit - e)
    m.validate(fragment)
    return m


def smear_measurement(fragment: GptFragment, m: GptMeasurement,
                      eta: float) -> GptMeasurement:
    """Unsharp version ``eta e + (1 - eta) u/2`` of both effects.

    Mirrors the quantum unbiased smearing; eta = 1 is the original
    measurement, eta = 0 the trivial coin flip.
    """
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"unsharpness must lie in [0, 1], got {eta}")
    noise = (1.0 - eta) * fragment.unit / 2.0
    return GptMeasurement(plus=eta * m.plus + noise, minus=eta * m.minus + noise)


def min_tensor(f1: GptFragment, f2: GptFragment) -> GptFragment:
    """Minimal tensor product: all Kronecker products of extremal states and
    effects, with unit = unit (x) unit."""
    states = np.array([np.kron(w1, w2) for w1 in f1.states for w2 in f2.states])
    effects = np.array([np.kron(e1, e2) for e1 in f1.effects for e2 in f2.effects])
    return GptFragment(states=states, effects=effects,
                       unit=np.kron(f1.unit, f2.unit))


def _jm_lp(fragment: GptFragment, measurements) -> LpProblem:
    """Standard-form LP for GPT joint measurability.

    Free joint-effect coordinates are split into positive and negative parts;
    state-positivity inequalities get surplus variables.  Equalities: the
    joint effects sum to the unit and the +1 marginals match each measurement.
    """
    n = len(measurements)
    v = fragment.vec_dim
    njoint = 2 ** n
    nstates = fragment.states.shape[0]
    nfree = njoint * v
    nvars = 2 * nfree + njoint * nstates

    rows: list[np.ndarray] = []
    rhs: list[float] = []

    def g_block(row: np.ndarray, a: int, coeff: np.ndarray) -> None:
        row[a * v:(a + 1) * v] += coeff
        row[nfree + a * v:nfree + (a + 1) * v] -= coeff

    # sum of all joint effects = unit (v rows)
    for k in range(v):
        row = np.zeros(nvars)
        unit_row = np.zeros(v)
        unit_row[k] = 1.0
        for a in range(njoint):
            g_block(row, a, unit_row)
        rows.append(row)
        rhs.append(fragment.unit[k])
    # per-setting +1 marginals (n * v rows); -1 marginals follow from closure
    for x, m in enumerate(measurements):
        for k in range(v):
            row = np.zeros(nvars)
            unit_row = np.zeros(v)
            unit_row[k] = 1.0
            for a in range(njoint):
                if (a >> x) & 1:
                    g_block(row, a, unit_row)
            rows.append(row)
            rhs.append(m.plus[k])
    # state positivity: <g_a, w_s> - t_{a,s} = 0
    for a in range(njoint):
        for s in range(nstates):
            row = np.zeros(nvars)
            g_block(row, a, fragment.states[s])
            row[2 * nfree + a * nstates + s] = -1.0
            rows.append(row)
            rhs.append(0.0)

    return LpProblem(objective=np.zeros(nvars), a_eq=np.array(rows),
                     b_eq=np.array(rhs))


def decode_joint_effects(fragment: GptFragment, n: int,
                         solution: LpSolution) -> np.ndarray:
    """Joint-effect vectors (2**n, vec_dim) from a FEASIBLE LP solution."""
    if solution.status is not LpStatus.FEASIBLE or solution.x is None:
        raise DomainError("solution is not feasible; no joint effects to decode")
    v = fragment.vec_dim
    njoint = 2 ** n
    nfree = njoint * v
    pos = solution.x[:nfree].reshape(njoint, v)
    neg = solution.x[nfree:2 * nfree].reshape(njoint, v)
    return pos - neg


def gpt_jm_feasible(fragment: GptFragment, measurements,
                    cfg: Tolerances = DEFAULTS) -> LpSolution:
    """LP feasibility of a joint measurement for dichotomic GPT measurements.

    Every FEASIBLE answer is re-verified against the raw constraints
    (marginals, unit closure, state positivity) independently of the solver's
    tableau; a violation above ``10 * lp_tol`` raises :class:`NumericError`.
    """
    n = len(measurements)
    if n < 1:
        raise DomainError("need at least one measurement")
    if n > 9:
        raise DomainError(f"2**{n} joint effects exceed the desk-scale cap (n <= 9)")
    fragment.validate()
    for m in measurements:
        m.validate(fragment)
    solution = solve_standard(_jm_lp(fragment, measurements), cfg)
    if solution.status is LpStatus.FEASIBLE:
        joints = decode_joint_effects(fragment, n, solution)
        worst = _joint_constraint_violation(fragment, measurements, joints)
        if worst > 10 * cfg.lp_tol:
            raise NumericError(
                f"LP self-check failed: constraint violation {worst:.3e}")
    return solution


def _joint_constraint_violation(fragment: GptFragment, measurements,
                                joints: np.ndarray) -> float:
    n = len(measurements)
    worst = float(np.abs(joints.sum(axis=0) - fragment.unit).max())
    for x, m in enumerate(measurements):
        marg = sum(joints[a] for a in range(2 ** n) if (a >> x) & 1)
        worst = max(worst, float(np.abs(marg - m.plus).max()))
    probs = joints @ fragment.states.T
    worst = max(worst, float(max(0.0, -probs.min())))
    return worst


def gpt_jm_threshold(fragment: GptFragment, measurements,
                     eta_tol: float | None = None,
                     cfg: Tolerances = DEFAULTS) -> ThresholdResult:
    """Critical smearing below which the measurements become compatible."""

    def evaluate(eta: float) -> FeasStatus:
        smeared = [smear_measurement(fragment, m, eta) for m in measurements]
        sol = gpt_jm_feasible(fragment, smeared, cfg)
        if sol.status is LpStatus.UNBOUNDED:
            raise NumericError("feasibility LP reported unbounded")
        return (FeasStatus.FEASIBLE if sol.status is LpStatus.FEASIBLE
                else FeasStatus.INFEASIBLE)

    return bisect_threshold(evaluate, eta_tol, cfg)


def save_fragment(fragment: GptFragment, path: str) -> None:
    """Write the fragment as plain text: ``vec_dim``, then one ``state``,
    ``effect``, or ``unit`` line per vector (whitespace-separated floats,
    ``#`` comments ignored)."""
    lines = [f"# gpt-fragment v1", f"vec_dim {fragment.vec_dim}"]
    lines.append("unit " + " ".join(repr(float(x)) for x in fragment.unit))
    for w in fragment.states:
        lines.append("state " + " ".join(repr(float(x)) for x in w))
    for e in fragment.effects:
        lines.append("effect " + " ".join(repr(float(x)) for x in e))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_fragment(path: str) -> GptFragment:
    """Parse the text schema written by :func:`save_fragment`."""
    vec_dim = None
    unit = None
    states: list[list[float]] = []
    effects: list[list[float]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tag, *fields = line.split()
            try:
                if tag == "vec_dim":
                    vec_dim = int(fields[0])
                elif tag == "unit":
                    unit = [float(x) for x in fields]
                elif tag == "state":
                    states.append([float(x) for x in fields])
                elif tag == "effect":
                    effects.append([float(x) for x in fields])
                else:
                    raise DomainError(f"{path}:{lineno}: unknown record {tag!r}")
            except (ValueError, IndexError) as exc:
                raise DomainError(f"{path}:{lineno}: {exc}") from None
    if vec_dim is None or unit is None or not states or not effects:
        raise DomainError(f"{path}: incomplete fragment file")
    fragment = GptFragment(states=np.array(states), effects=np.array(effects),
                           unit=np.array(unit))
    if fragment.vec_dim != vec_dim:
        raise DomainError(f"{path}: vec_dim header disagrees with vector lengths")
    fragment.validate()
    return fragment

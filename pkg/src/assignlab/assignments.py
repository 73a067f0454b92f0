"""Assignment maps from system states to system-environment operators.

Four families are provided: the general linear assignment acting on a
projector basis, the single-state (product) special case, the zero-discord
assignment built on an orthogonal measurement, and the broadcasting
assignment. Checkers certify linearity, consistency, and positivity, and
audit Hermiticity/trace preservation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from assignlab.operators import (
    HERMITICITY_TOL,
    PSD_TOL,
    TRACE_TOL,
    ProjectorBasis,
    decompose,
    hermiticity_defect,
    min_eigenvalue,
    partial_trace,
    qubit_states,
    random_density,
    random_pure,
    random_unitary,
    require_hermitian,
    tensor,
    trace_norm,
)

__all__ = [
    "LinearAssignment",
    "OrthogonalProjectorSet",
    "ZeroDiscordAssignment",
    "BroadcastAssignment",
    "product_assignment",
    "orthogonal_flag_assignment",
    "random_zero_discord_assignment",
    "consistency_defect",
    "dephase",
    "PositivityReport",
    "positivity_certificate",
    "EnvNegativityReport",
    "env_negativity_report",
    "EqualEnvVerdict",
    "equal_env_certificate",
    "PechukasResiduals",
    "pechukas_constraints",
    "AuditReport",
    "hermiticity_trace_audit",
]

ENV_EQUALITY_TOL = 1e-9  # trace-norm threshold for "same environment operator"


def _check_env_op(tau: np.ndarray, index: int) -> np.ndarray:
    tau = require_hermitian(tau, tol=HERMITICITY_TOL, name=f"environment operator {index}")
    tr = np.trace(tau).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"environment operator {index} has trace {tr!r}, expected 1")
    return tau


@dataclass(frozen=True, eq=False)
class LinearAssignment:
    """Linear assignment sending basis projector P_i to P_i (x) env_ops[i].

    Environment operators must be Hermitian and unit trace (that keeps the
    map Hermiticity and trace preserving); they are *not* required to be
    positive, which is exactly the property the checkers probe.
    """

    basis: ProjectorBasis
    env_ops: np.ndarray  # stacked (dim_s^2, dim_e, dim_e)

    def __post_init__(self):
        stack = np.stack([np.asarray(t, dtype=complex) for t in self.env_ops])
        if stack.shape[0] != self.basis.size:
            raise ValueError(
                f"need {self.basis.size} environment operators, got {stack.shape[0]}"
            )
        for i, tau in enumerate(stack):
            _check_env_op(tau, i)
        stack.setflags(write=False)
        object.__setattr__(self, "env_ops", stack)

    @property
    def dim_s(self) -> int:
        return self.basis.dim

    @property
    def dim_e(self) -> int:
        return self.env_ops.shape[1]

    @cached_property
    def _terms(self) -> np.ndarray:
        # stacked kron(P_i, tau_i), shape (dim_s^2, D, D) with D = dim_s*dim_e
        return np.stack([tensor(p, t) for p, t in zip(self.basis.projectors, self.env_ops)])

    def apply(self, state: np.ndarray) -> np.ndarray:
        """Map a Hermitian system operator to sum_i q_i P_i (x) env_ops[i]."""
        q = decompose(state, self.basis)
        return np.tensordot(q, self._terms, axes=1)


def _unchecked_linear_assignment(basis: ProjectorBasis, env_ops) -> LinearAssignment:
    # Validation bypass for negative tests of the Hermiticity/trace audit only.
    a = object.__new__(LinearAssignment)
    object.__setattr__(a, "basis", basis)
    stack = np.stack([np.asarray(t, dtype=complex) for t in env_ops])
    object.__setattr__(a, "env_ops", stack)
    return a


def product_assignment(basis: ProjectorBasis, env_state: np.ndarray) -> LinearAssignment:
    """Assignment sending every state to state (x) env_state."""
    env_state = np.asarray(env_state, dtype=complex)
    return LinearAssignment(basis, np.broadcast_to(env_state, (basis.size,) + env_state.shape))


def orthogonal_flag_assignment(basis: ProjectorBasis) -> LinearAssignment:
    """Assignment tagging each basis projector with a distinct orthonormal
    environment flag |i><i| on an environment of dimension dim_s^2."""
    n = basis.size
    flags = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        flags[i, i, i] = 1.0
    return LinearAssignment(basis, flags)


@dataclass(frozen=True, eq=False)
class OrthogonalProjectorSet:
    """Complete set of d mutually orthogonal rank-1 projectors."""

    projectors: np.ndarray  # stacked (d, d, d)

    def __post_init__(self):
        stack = np.stack([np.asarray(p, dtype=complex) for p in self.projectors])
        d = stack.shape[1]
        if stack.shape != (d, d, d):
            raise ValueError(f"need {d} projectors of dimension {d}, got shape {stack.shape}")
        for i, p in enumerate(stack):
            require_hermitian(p, name=f"projector {i}")
            if abs(np.trace(p).real - 1.0) > TRACE_TOL:
                raise ValueError(f"projector {i} has trace {np.trace(p).real!r}, expected 1")
        products = np.einsum("iab,jbc->ijac", stack, stack)
        expected = np.einsum("ij,jac->ijac", np.eye(d), stack)
        if np.max(np.abs(products - expected)) > 1e-10:
            raise ValueError("projectors are not mutually orthogonal")
        if np.max(np.abs(stack.sum(axis=0) - np.eye(d))) > 1e-10:
            raise ValueError("projectors do not resolve the identity")
        stack.setflags(write=False)
        object.__setattr__(self, "projectors", stack)

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]

    @classmethod
    def computational(cls, d: int) -> "OrthogonalProjectorSet":
        stack = np.zeros((d, d, d), dtype=complex)
        for i in range(d):
            stack[i, i, i] = 1.0
        return cls(stack)

    @classmethod
    def from_unitary(cls, u: np.ndarray) -> "OrthogonalProjectorSet":
        """Projectors onto the columns of a unitary."""
        u = np.asarray(u, dtype=complex)
        return cls(np.stack([np.outer(u[:, i], u[:, i].conj()) for i in range(u.shape[1])]))


@dataclass(frozen=True, eq=False)
class ZeroDiscordAssignment:
    """Assignment sum_i Tr[state Pi_i] Pi_i (x) env_states[i].

    Its output is classically correlated (zero quantum discord). The
    environment states must be Hermitian and unit trace; positivity of each
    env state is equivalent to positivity of the whole map.
    """

    measurement: OrthogonalProjectorSet
    env_states: np.ndarray  # stacked (dim_s, dim_e, dim_e)

    def __post_init__(self):
        stack = np.stack([np.asarray(t, dtype=complex) for t in self.env_states])
        if stack.shape[0] != self.measurement.dim:
            raise ValueError(
                f"need {self.measurement.dim} environment states, got {stack.shape[0]}"
            )
        for i, tau in enumerate(stack):
            _check_env_op(tau, i)
        stack.setflags(write=False)
        object.__setattr__(self, "env_states", stack)

    @property
    def dim_s(self) -> int:
        return self.measurement.dim

    @property
    def dim_e(self) -> int:
        return self.env_states.shape[1]

    @cached_property
    def _terms(self) -> np.ndarray:
        return np.stack(
            [tensor(p, t) for p, t in zip(self.measurement.projectors, self.env_states)]
        )

    def branch_probabilities(self, state: np.ndarray) -> np.ndarray:
        """Measurement weights Tr[state Pi_i]."""
        state = np.asarray(state, dtype=complex)
        if state.shape != (self.dim_s, self.dim_s):
            raise ValueError(f"state shape {state.shape} does not match dim {self.dim_s}")
        return np.einsum("iab,ba->i", self.measurement.projectors, state).real

    def apply(self, state: np.ndarray) -> np.ndarray:
        require_hermitian(state, tol=1e-9, name="state")
        return np.tensordot(self.branch_probabilities(state), self._terms, axes=1)

    def env_states_positive(self, tol: float = PSD_TOL) -> bool:
        return all(min_eigenvalue(t) >= -tol for t in self.env_states)

    @classmethod
    def classical_broadcast(cls, measurement: OrthogonalProjectorSet) -> "ZeroDiscordAssignment":
        """Broadcasts the measurement-diagonal part of the input to both legs."""
        return cls(measurement, measurement.projectors)


def random_zero_discord_assignment(
    dim_s: int, dim_e: int, rng: np.random.Generator
) -> ZeroDiscordAssignment:
    """Haar-random measurement basis with Hilbert-Schmidt-random (hence
    positive) environment states."""
    measurement = OrthogonalProjectorSet.from_unitary(random_unitary(dim_s, rng))
    envs = np.stack([random_density(dim_e, rng) for _ in range(dim_s)])
    return ZeroDiscordAssignment(measurement, envs)


@dataclass(frozen=True, eq=False)
class BroadcastAssignment:
    """Linear assignment copying each basis projector to both legs: P_i -> P_i (x) P_i.

    Both marginals of the output reproduce the input; positivity fails on
    states whose basis decomposition has a negative coefficient.
    """

    basis: ProjectorBasis

    @property
    def dim_s(self) -> int:
        return self.basis.dim

    @property
    def dim_e(self) -> int:
        return self.basis.dim

    @cached_property
    def _terms(self) -> np.ndarray:
        return np.stack([tensor(p, p) for p in self.basis.projectors])

    def apply(self, state: np.ndarray) -> np.ndarray:
        q = decompose(state, self.basis)
        return np.tensordot(q, self._terms, axes=1)


def consistency_defect(assignment, state: np.ndarray) -> float:
    """Trace-norm distance between the system marginal of the assigned
    operator and the input state; zero iff the assignment is consistent
    on this state."""
    state = np.asarray(state, dtype=complex)
    out = assignment.apply(state)
    marginal = partial_trace(out, assignment.dim_s, assignment.dim_e, "E")
    return trace_norm(marginal - state)


def dephase(state: np.ndarray, measurement: OrthogonalProjectorSet) -> np.ndarray:
    """Erase coherences: sum_i Tr[state Pi_i] Pi_i."""
    state = np.asarray(state, dtype=complex)
    weights = np.einsum("iab,ba->i", measurement.projectors, state)
    return np.tensordot(weights, measurement.projectors, axes=1)


@dataclass(frozen=True, eq=False)
class PositivityReport:
    """Worst output eigenvalue found over a probe set of input states."""

    min_eigenvalue: float
    witness_label: str
    witness_state: np.ndarray
    probes: int

    def passed(self, tol: float = PSD_TOL) -> bool:
        return self.min_eigenvalue >= -tol


def _probe_states(assignment, samples: int, rng: np.random.Generator):
    """Positivity probes: basis projectors, the six axis states on qubits,
    then seeded Haar-random pure and Hilbert-Schmidt-random mixed states."""
    d = assignment.dim_s
    basis = getattr(assignment, "basis", None)
    if basis is not None:
        for i, p in enumerate(basis.projectors):
            yield f"basis projector {i}", p
    else:
        for i, p in enumerate(assignment.measurement.projectors):
            yield f"measurement projector {i}", p
    if d == 2:
        for i, eta in enumerate(qubit_states()):
            yield f"axis state {i + 1}", eta
    n_pure = (samples + 1) // 2
    for k in range(n_pure):
        yield f"random pure {k}", random_pure(d, rng)
    for k in range(samples - n_pure):
        yield f"random mixed {k}", random_density(d, rng)


def positivity_certificate(assignment, samples: int, rng: np.random.Generator) -> PositivityReport:
    """Probe the assignment for negative outputs; deterministic under the rng seed.

    Returns the worst (most negative) output eigenvalue together with the
    witness state that produced it.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    best = np.inf
    witness_label = ""
    witness_state = None
    count = 0
    for label, state in _probe_states(assignment, samples, rng):
        count += 1
        lam = min_eigenvalue(assignment.apply(state))
        if lam < best:
            best, witness_label, witness_state = lam, label, state
    return PositivityReport(
        min_eigenvalue=float(best),
        witness_label=witness_label,
        witness_state=witness_state,
        probes=count,
    )


@dataclass(frozen=True, eq=False)
class EnvNegativityReport:
    """Smallest eigenvalue of each environment operator next to the smallest
    output eigenvalue on the matching basis projector."""

    env_min_eigs: np.ndarray
    output_min_eigs: np.ndarray
    holds: bool  # every negative env op shows up as a negative output


def env_negativity_report(assignment: LinearAssignment, tol: float = PSD_TOL) -> EnvNegativityReport:
    """Check that a negative environment operator forces a negative output.

    The output on basis projector P_i is P_i (x) tau_i, whose spectrum is
    {0} united with the spectrum of tau_i, so negativity must carry over.
    """
    env_eigs = np.array([min_eigenvalue(t) for t in assignment.env_ops])
    out_eigs = np.array(
        [min_eigenvalue(assignment.apply(p)) for p in assignment.basis.projectors]
    )
    holds = all(out < -tol for env, out in zip(env_eigs, out_eigs) if env < -tol)
    return EnvNegativityReport(env_min_eigs=env_eigs, output_min_eigs=out_eigs, holds=bool(holds))


@dataclass(frozen=True, eq=False)
class EqualEnvVerdict:
    """Certificate that probe positivity is equivalent to all environment
    operators being a single state."""

    all_env_ops_equal: bool
    max_env_distance: float
    positivity: PositivityReport
    biconditional_holds: bool


def equal_env_certificate(
    assignment: LinearAssignment,
    samples: int,
    rng: np.random.Generator,
    psd_tol: float = PSD_TOL,
    equality_tol: float = ENV_EQUALITY_TOL,
) -> EqualEnvVerdict:
    """Decide positivity via the exact algebraic condition (all env ops equal)
    and cross-check it against the probe certificate."""
    taus = assignment.env_ops
    max_dist = max(trace_norm(t - taus[0]) for t in taus)
    all_equal = max_dist <= equality_tol
    report = positivity_certificate(assignment, samples, rng)
    return EqualEnvVerdict(
        all_env_ops_equal=all_equal,
        max_env_distance=float(max_dist),
        positivity=report,
        biconditional_holds=all_equal == report.passed(psd_tol),
    )


@dataclass(frozen=True, eq=False)
class PechukasResiduals:
    """Residuals of the two-decomposition identity for the maximally mixed
    state and of the four expectation-value relations it implies."""

    mixture_residual: float
    expectation_residuals: tuple[float, float, float, float]

    @property
    def max_residual(self) -> float:
        return max(self.mixture_residual, *self.expectation_residuals)


def pechukas_constraints(taus, states=None) -> PechukasResiduals:
    """Constraint system for assigning product states to two antipodal pairs
    of pure states whose mixtures both give the maximally mixed state.

    ``taus`` are the four assigned environment operators and ``states`` the
    four pure system states (default: the x+/y+/x-/y- axis states; passing
    the z pair instead repeats the argument along the other axis). All
    residuals vanish iff the four environment operators coincide.
    """
    if states is None:
        eta = qubit_states()
        states = (eta[0], eta[1], eta[3], eta[4])
    if len(taus) != 4 or len(states) != 4:
        raise ValueError("need exactly four environment operators and four states")
    taus = [require_hermitian(np.asarray(t, dtype=complex), name=f"tau {i}") for i, t in enumerate(taus)]
    dim_e = taus[0].shape[0]
    for i, t in enumerate(taus):
        if t.shape != (dim_e, dim_e):
            raise ValueError("environment operators must share one dimension")
        if abs(np.trace(t).real - 1.0) > TRACE_TOL:
            raise ValueError(f"tau {i} must be unit trace")
    s1, s2, s4, s5 = (np.asarray(s, dtype=complex) for s in states)
    dim_s = s1.shape[0]
    t1, t2, t4, t5 = taus

    delta = 0.5 * (tensor(s1, t1) + tensor(s4, t4)) - 0.5 * (tensor(s2, t2) + tensor(s5, t5))
    mixture = trace_norm(delta)

    eye_e = np.eye(dim_e)
    expectations = []
    for probe in (s1, s2, s4, s5):
        # expectation of the identity over the probe state, scaled to match
        # the 2*tau_a - tau_b - tau_c normalization
        reduced = partial_trace(tensor(probe, eye_e) @ delta, dim_s, dim_e, "S")
        expectations.append(trace_norm(4.0 * reduced))
    return PechukasResiduals(
        mixture_residual=float(mixture),
        expectation_residuals=tuple(float(e) for e in expectations),
    )


@dataclass(frozen=True, eq=False)
class AuditReport:
    """Hermiticity/trace preservation audit of a linear assignment.

    Forward direction: valid environment operators give Hermitian,
    trace-preserving outputs on random states. Reverse direction: corrupting
    one environment operator (through the validation bypass) produces a
    detectable defect on the matching basis projector.
    """

    max_hermiticity_defect: float
    max_trace_defect: float
    corrupted_hermiticity_defect: float
    corrupted_trace_defect: float
    detects_corruption: bool


def hermiticity_trace_audit(
    assignment: LinearAssignment,
    samples: int,
    rng: np.random.Generator,
    herm_bump: float = 0.1,
    trace_scale: float = 1.1,
) -> AuditReport:
    """Audit both directions of the Hermiticity/trace preservation conditions."""
    max_herm = 0.0
    max_trace = 0.0
    for _ in range(max(samples, 1)):
        state = random_density(assignment.dim_s, rng)
        out = assignment.apply(state)
        max_herm = max(max_herm, hermiticity_defect(out))
        max_trace = max(max_trace, abs(np.trace(out).real - np.trace(state).real))

    p0 = assignment.basis.projectors[0]
    d_e = assignment.dim_e
    skew = np.zeros((d_e, d_e), dtype=complex)
    skew[0, 0], skew[1, 1] = 1.0, -1.0  # trace-free bump, trace norm 2

    bad_herm = np.array(assignment.env_ops)
    bad_herm[0] = bad_herm[0] + 1j * herm_bump * skew
    herm_out = _unchecked_linear_assignment(assignment.basis, bad_herm).apply(p0)
    corrupted_herm = hermiticity_defect(herm_out)

    bad_trace = np.array(assignment.env_ops)
    bad_trace[0] = trace_scale * bad_trace[0]
    trace_out = _unchecked_linear_assignment(assignment.basis, bad_trace).apply(p0)
    corrupted_trace = abs(np.trace(trace_out).real - np.trace(p0).real)

    return AuditReport(
        max_hermiticity_defect=float(max_herm),
        max_trace_defect=float(max_trace),
        corrupted_hermiticity_defect=float(corrupted_herm),
        corrupted_trace_defect=float(corrupted_trace),
        detects_corruption=bool(corrupted_herm > 1e-6 and corrupted_trace > 1e-6),
    )

"""Induced dynamical maps: trace out the environment after a unitary acts on
an assigned system-environment operator.

The composed map is represented as a superoperator on row-major vectorized
operators; complete positivity is certified through the spectrum of its Choi
matrix. Includes the seeded random search for unitaries that break complete
positivity, and the summary table of linearity/consistency/positivity per
correlation family.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from assignlab.assignments import (
    OrthogonalProjectorSet,
    ZeroDiscordAssignment,
    consistency_defect,
    orthogonal_flag_assignment,
    positivity_certificate,
    product_assignment,
    random_zero_discord_assignment,
)
from assignlab.operators import (
    canonical_basis,
    partial_trace,
    qubit_states,
    random_density,
    random_unitary,
    require_unitary,
    trace_norm,
)

__all__ = [
    "CP_TOL",
    "NONCP_THRESHOLD",
    "Superoperator",
    "induced_map",
    "ChoiMatrix",
    "choi_matrix",
    "CPReport",
    "cp_certificate",
    "replay_unitary",
    "NonCPSearch",
    "find_noncp_unitary",
    "CPSweep",
    "classical_cp_sweep",
    "ConditionRow",
    "ConditionTable",
    "EXPECTED_CONDITIONS",
    "assignment_condition_table",
]

# CP is decided at -1e-9 on the Choi spectrum; asserting genuine non-CP uses
# the stricter -1e-6 to stay clear of numerical noise.
CP_TOL = 1e-9
NONCP_THRESHOLD = -1e-6


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Matrix of a linear map on operators, acting on row-major vec(X)."""

    dim: int
    mat: np.ndarray  # (dim^2, dim^2) complex
    provenance: str = ""

    def apply(self, state: np.ndarray) -> np.ndarray:
        state = np.asarray(state, dtype=complex)
        if state.shape != (self.dim, self.dim):
            raise ValueError(f"state shape {state.shape} does not match dim {self.dim}")
        return (self.mat @ state.reshape(-1)).reshape(self.dim, self.dim)


def induced_map(assignment, u: np.ndarray, provenance: str = "") -> Superoperator:
    """Superoperator of: assign, conjugate by ``u``, trace out the environment.

    Assignments are defined on Hermitian operators only, so each matrix unit
    is extended complex-linearly through its Hermitian decomposition
    E = H + iK.
    """
    d_s, d_e = assignment.dim_s, assignment.dim_e
    u = require_unitary(u)
    if u.shape[0] != d_s * d_e:
        raise ValueError(f"unitary dimension {u.shape[0]} != {d_s * d_e}")
    u_dag = u.conj().T

    def act(h: np.ndarray) -> np.ndarray:
        return partial_trace(u @ assignment.apply(h) @ u_dag, d_s, d_e, "E")

    mat = np.zeros((d_s * d_s, d_s * d_s), dtype=complex)
    for j in range(d_s):
        for k in range(d_s):
            unit = np.zeros((d_s, d_s), dtype=complex)
            unit[j, k] = 1.0
            herm = (unit + unit.conj().T) / 2
            skew = (unit - unit.conj().T) / 2j
            out = act(herm) + 1j * act(skew)
            mat[:, j * d_s + k] = out.reshape(-1)
    mat.setflags(write=False)
    return Superoperator(dim=d_s, mat=mat, provenance=provenance)


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """Block matrix sum_jk E_jk (x) M[E_jk]; positive iff M is completely positive."""

    mat: np.ndarray
    spectrum: np.ndarray  # ascending real eigenvalues


def choi_matrix(superop: Superoperator) -> ChoiMatrix:
    d = superop.dim
    c = np.zeros((d * d, d * d), dtype=complex)
    for j in range(d):
        for k in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[j, k] = 1.0
            c += np.kron(unit, superop.mat[:, j * d + k].reshape(d, d))
    defect = np.max(np.abs(c - c.conj().T))
    if defect > 1e-9:
        raise ValueError(f"Choi matrix is not Hermitian (defect {defect:.3e}); "
                         "the underlying map does not preserve Hermiticity")
    spectrum = np.linalg.eigvalsh((c + c.conj().T) / 2)
    c.setflags(write=False)
    spectrum.setflags(write=False)
    return ChoiMatrix(mat=c, spectrum=spectrum)


@dataclass(frozen=True)
class CPReport:
    lambda_min_choi: float
    is_cp: bool
    is_tp: bool
    witness: tuple[int, int] | None = None  # (seed, draw index) when found by search


def cp_certificate(superop: Superoperator, tol: float = CP_TOL) -> CPReport:
    """Complete positivity and trace preservation of a superoperator."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    choi = choi_matrix(superop)
    lam_min = float(choi.spectrum[0])
    d = superop.dim
    tp_defect = np.max(np.abs(partial_trace(choi.mat, d, d, "E") - np.eye(d)))
    return CPReport(lambda_min_choi=lam_min, is_cp=lam_min >= -tol, is_tp=tp_defect <= tol)


def replay_unitary(seed: int, index: int, dim: int) -> np.ndarray:
    """Regenerate the Haar draw used at one index of a seeded search."""
    return random_unitary(dim, np.random.default_rng([seed, index]))


@dataclass(frozen=True)
class NonCPSearch:
    """Outcome of a seeded random search for a CP-breaking unitary."""

    found: bool
    seed: int
    attempts: int
    threshold: float
    first_index: int | None
    first_lambda: float | None
    best_index: int
    best_lambda: float


def find_noncp_unitary(
    assignment, attempts: int, seed: int, threshold: float = NONCP_THRESHOLD
) -> NonCPSearch:
    """Search seeded Haar unitaries for one whose induced map is not CP.

    Draw ``i`` uses the stream keyed by (seed, i), so any witness is
    replayable with :func:`replay_unitary` independently of the scan order.
    """
    dim = assignment.dim_s * assignment.dim_e
    first_index = None
    first_lambda = None
    best_index = -1
    best_lambda = np.inf
    for i in range(attempts):
        u = replay_unitary(seed, i, dim)
        lam = cp_certificate(induced_map(assignment, u)).lambda_min_choi
        if lam < best_lambda:
            best_index, best_lambda = i, lam
        if first_index is None and lam < threshold:
            first_index, first_lambda = i, lam
    return NonCPSearch(
        found=first_index is not None,
        seed=seed,
        attempts=attempts,
        threshold=threshold,
        first_index=first_index,
        first_lambda=first_lambda,
        best_index=best_index,
        best_lambda=float(best_lambda),
    )


@dataclass(frozen=True)
class CPSweep:
    maps_checked: int
    min_lambda: float
    all_cp: bool


def classical_cp_sweep(
    n_assignments: int,
    unitaries_per_assignment: int,
    dim_s: int,
    dim_e: int,
    seed: int,
    tol: float = CP_TOL,
) -> CPSweep:
    """Check that randomly drawn zero-discord assignments with positive
    environment states always induce CP maps, over random unitary couplings."""
    rng = np.random.default_rng(seed)
    min_lambda = np.inf
    maps_checked = 0
    for _ in range(n_assignments):
        z = random_zero_discord_assignment(dim_s, dim_e, rng)
        for _ in range(unitaries_per_assignment):
            u = random_unitary(dim_s * dim_e, rng)
            lam = cp_certificate(induced_map(z, u)).lambda_min_choi
            min_lambda = min(min_lambda, lam)
            maps_checked += 1
    return CPSweep(maps_checked=maps_checked, min_lambda=float(min_lambda),
                   all_cp=min_lambda >= -tol)


EXPECTED_CONDITIONS = {
    "none": (True, True, True),
    "classical": (True, False, True),
    "quantum": (True, True, False),
}


@dataclass(frozen=True, eq=False)
class ConditionRow:
    family: str
    linear: bool
    consistent: bool
    positive: bool
    max_linearity_defect: float
    max_consistency_defect: float
    min_output_eigenvalue: float

    @property
    def conditions(self) -> tuple[bool, bool, bool]:
        return (self.linear, self.consistent, self.positive)


@dataclass(frozen=True, eq=False)
class ConditionTable:
    rows: tuple[ConditionRow, ...]

    @property
    def matches_expected(self) -> bool:
        return all(row.conditions == EXPECTED_CONDITIONS[row.family] for row in self.rows)


def _linearity_defect(assignment, samples: int, rng: np.random.Generator) -> float:
    worst = 0.0
    d = assignment.dim_s
    for _ in range(samples):
        a = rng.uniform(-1.0, 2.0)
        b = 1.0 - a
        rho1 = random_density(d, rng)
        rho2 = random_density(d, rng)
        mixed = assignment.apply(a * rho1 + b * rho2)
        split = a * assignment.apply(rho1) + b * assignment.apply(rho2)
        worst = max(worst, trace_norm(mixed - split))
    return worst


def _consistency_defect_max(assignment, samples: int, rng: np.random.Generator) -> float:
    probes = list(qubit_states()) if assignment.dim_s == 2 else []
    probes += [random_density(assignment.dim_s, rng) for _ in range(samples)]
    return max(consistency_defect(assignment, p) for p in probes)


def assignment_condition_table(
    seed: int,
    samples: int = 200,
    linearity_tol: float = 1e-9,
    consistency_tol: float = 1e-10,
    psd_tol: float = 1e-10,
) -> ConditionTable:
    """Linearity / consistency / positivity verdicts for the three qubit
    assignment families: uncorrelated product, classically correlated
    zero-discord, and quantum-correlated orthogonal flags."""
    rng = np.random.default_rng(seed)
    basis = canonical_basis(2)
    families = (
        ("none", product_assignment(basis, random_density(2, rng))),
        ("classical", ZeroDiscordAssignment(
            OrthogonalProjectorSet.computational(2),
            np.stack([random_density(2, rng), random_density(2, rng)]),
        )),
        ("quantum", orthogonal_flag_assignment(basis)),
    )
    n_lin = max(20, samples // 10)
    rows = []
    for family, assignment in families:
        lin = _linearity_defect(assignment, n_lin, rng)
        cons = _consistency_defect_max(assignment, n_lin, rng)
        pos = positivity_certificate(assignment, samples, rng)
        rows.append(ConditionRow(
            family=family,
            linear=lin <= linearity_tol,
            consistent=cons <= consistency_tol,
            positive=pos.passed(psd_tol),
            max_linearity_defect=float(lin),
            max_consistency_defect=float(cons),
            min_output_eigenvalue=float(pos.min_eigenvalue),
        ))
    return ConditionTable(rows=tuple(rows))

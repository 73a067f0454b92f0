"""Dense complex linear algebra for small quantum systems.

Tensor products, partial traces, Hermitian spectra, rank-1 projector bases
with dual frames for coefficient extraction, and seeded random sampling of
states and unitaries. Everything operates on plain complex ndarrays; the
composite index convention is system-major (s * dim_e + e).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "HERMITICITY_TOL",
    "TRACE_TOL",
    "PSD_TOL",
    "UNITARITY_TOL",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "tensor",
    "partial_trace",
    "eigvals_hermitian",
    "min_eigenvalue",
    "hs_inner",
    "trace_norm",
    "hermiticity_defect",
    "require_hermitian",
    "require_density",
    "require_unitary",
    "qubit_states",
    "bloch_state",
    "bloch_coeffs",
    "ProjectorBasis",
    "canonical_basis",
    "decompose",
    "recompose",
    "random_density",
    "random_pure",
    "random_unitary",
]

# Structural identities are held near machine precision; spectral decisions
# get an extra order of magnitude of slack (dense eigensolvers, dim <= 16).
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
UNITARITY_TOL = 1e-10
GRAM_MIN_SINGULAR_VALUE = 1e-10
IMAG_RESIDUE_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


PAULI_X = _frozen([[0, 1], [1, 0]])
PAULI_Y = _frozen([[0, -1j], [1j, 0]])
PAULI_Z = _frozen([[1, 0], [0, -1]])


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the system factor first."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(x: np.ndarray, dim_s: int, dim_e: int, trace_out: str = "E") -> np.ndarray:
    """Trace out one factor of a (dim_s*dim_e)-dimensional operator.

    ``trace_out`` names the subsystem removed: "E" keeps the dim_s x dim_s
    system block, "S" keeps the dim_e x dim_e environment block.
    """
    x = np.asarray(x, dtype=complex)
    n = dim_s * dim_e
    if x.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} operator, got shape {x.shape}")
    blocks = x.reshape(dim_s, dim_e, dim_s, dim_e)
    if trace_out == "E":
        return np.einsum("iaja->ij", blocks)
    if trace_out == "S":
        return np.einsum("aiaj->ij", blocks)
    raise ValueError(f"trace_out must be 'S' or 'E', got {trace_out!r}")


def hermiticity_defect(m: np.ndarray) -> float:
    """Trace norm of the anti-Hermitian part (m - m^dag)/2."""
    m = np.asarray(m, dtype=complex)
    skew = (m - m.conj().T) / 2j  # i * (anti-Hermitian) is Hermitian
    return float(np.abs(np.linalg.eigvalsh(skew)).sum())


def require_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL, name: str = "operator") -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError(f"{name} has non-finite entries")
    defect = np.max(np.abs(m - m.conj().T))
    if defect > tol:
        raise ValueError(f"{name} is not Hermitian (defect {defect:.3e} > {tol:.1e})")
    return m


def require_density(m: np.ndarray, trace_tol: float = TRACE_TOL, eig_tol: float = PSD_TOL,
                    name: str = "state") -> np.ndarray:
    m = require_hermitian(m, name=name)
    tr = np.trace(m).real
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"{name} has trace {tr!r}, expected 1")
    lam = np.linalg.eigvalsh(m)
    if lam[0] < -eig_tol:
        raise ValueError(f"{name} has negative eigenvalue {lam[0]:.3e}")
    return m


def require_unitary(u: np.ndarray, tol: float = UNITARITY_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"unitary must be square, got shape {u.shape}")
    defect = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if defect > tol:
        raise ValueError(f"matrix is not unitary (defect {defect:.3e} > {tol:.1e})")
    return u


def eigvals_hermitian(h: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Ascending real spectrum of a Hermitian operator; rejects non-Hermitian input."""
    h = require_hermitian(h, tol=tol)
    return np.linalg.eigvalsh(h)


def min_eigenvalue(h: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part of ``h``."""
    h = np.asarray(h, dtype=complex)
    return float(np.linalg.eigvalsh((h + h.conj().T) / 2)[0])


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product Tr[a^dag b]."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def trace_norm(h: np.ndarray) -> float:
    """Sum of absolute eigenvalues of the Hermitian part of ``h``."""
    h = np.asarray(h, dtype=complex)
    h = (h + h.conj().T) / 2
    return float(np.abs(np.linalg.eigvalsh(h)).sum())


def qubit_states() -> tuple[np.ndarray, ...]:
    """The six axis-aligned pure qubit states (x+, y+, z+, x-, y-, z-)."""
    eye = np.eye(2, dtype=complex)
    return tuple(
        _frozen((eye + sign * pauli) / 2)
        for sign in (1.0, -1.0)
        for pauli in (PAULI_X, PAULI_Y, PAULI_Z)
    )


def bloch_state(a) -> np.ndarray:
    """Qubit state (I + a . sigma)/2 for a Bloch vector inside the unit ball."""
    a = _require_bloch(a)
    return (np.eye(2, dtype=complex) + a[0] * PAULI_X + a[1] * PAULI_Y + a[2] * PAULI_Z) / 2


def _require_bloch(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"Bloch vector must have 3 real components, got shape {a.shape}")
    if a @ a > 1.0 + 1e-12:
        raise ValueError(f"Bloch vector has norm^2 {a @ a!r} > 1")
    return a


def bloch_coeffs(a) -> np.ndarray:
    """Coefficients of (I + a . sigma)/2 over the qubit axis basis (x+, y+, z+, x-)."""
    a1, a2, a3 = _require_bloch(a)
    return np.array([
        0.5 * (1.0 + a1 - a2 - a3),
        a2,
        a3,
        0.5 * (1.0 - a1 - a2 - a3),
    ])


@dataclass(frozen=True, eq=False)
class ProjectorBasis:
    """A spanning set of dim^2 rank-1 projectors with its dual frame.

    ``projectors`` is stacked (dim^2, dim, dim); ``dual_frame`` holds the
    Hermitian operators D_i with Tr[D_i P_j] = delta_ij, obtained by solving
    the Gram system of Hilbert-Schmidt overlaps.
    """

    dim: int
    projectors: np.ndarray
    gram: np.ndarray
    dual_frame: np.ndarray

    @property
    def size(self) -> int:
        return self.dim * self.dim

    @classmethod
    def from_projectors(cls, projectors) -> "ProjectorBasis":
        stack = np.stack([np.asarray(p, dtype=complex) for p in projectors])
        n, d, d2 = stack.shape[0], stack.shape[1], stack.shape[2]
        if d != d2:
            raise ValueError("projectors must be square")
        if n != d * d:
            raise ValueError(f"need {d * d} projectors to span dim {d}, got {n}")
        for i, p in enumerate(stack):
            require_hermitian(p, name=f"projector {i}")
            if abs(np.trace(p).real - 1.0) > TRACE_TOL:
                raise ValueError(f"projector {i} has trace {np.trace(p).real!r}, expected 1")
            if np.max(np.abs(p @ p - p)) > 1e-10:
                raise ValueError(f"projector {i} is not idempotent")
        gram = np.einsum("iab,jba->ij", stack, stack).real
        smallest = np.linalg.svd(gram, compute_uv=False)[-1]
        if smallest < GRAM_MIN_SINGULAR_VALUE:
            raise ValueError(
                f"projector set is too close to linear dependence "
                f"(smallest Gram singular value {smallest:.3e})"
            )
        dual = np.tensordot(np.linalg.inv(gram), stack, axes=1)
        basis = cls(dim=d, projectors=_frozen(stack), gram=_frozen(gram).real,
                    dual_frame=_frozen(dual))
        return basis


def canonical_basis(d: int) -> ProjectorBasis:
    """Standard rank-1 projector basis spanning the Hermitian d x d matrices.

    For d = 2 this is the axis basis (x+, y+, z+, x-); for d >= 3 it is the
    tomography-style set |j><j| together with the projectors onto
    (|j> + |k>)/sqrt2 and (|j> + i|k>)/sqrt2 for j < k.
    """
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    if d == 2:
        eta = qubit_states()
        return ProjectorBasis.from_projectors([eta[0], eta[1], eta[2], eta[3]])
    projs = []
    for j in range(d):
        v = np.zeros(d, dtype=complex)
        v[j] = 1.0
        projs.append(np.outer(v, v.conj()))
    for j in range(d):
        for k in range(j + 1, d):
            for amp in (1.0, 1.0j):
                v = np.zeros(d, dtype=complex)
                v[j] = 1.0
                v[k] = amp
                v /= np.sqrt(2.0)
                projs.append(np.outer(v, v.conj()))
    return ProjectorBasis.from_projectors(projs)


def decompose(h: np.ndarray, basis: ProjectorBasis) -> np.ndarray:
    """Real coefficients q with h = sum_i q_i P_i, extracted via the dual frame."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (basis.dim, basis.dim):
        raise ValueError(f"operator shape {h.shape} does not match basis dim {basis.dim}")
    q = np.einsum("kab,ba->k", basis.dual_frame, h)
    residue = np.max(np.abs(q.imag))
    if residue > IMAG_RESIDUE_TOL:
        raise ValueError(
            f"coefficients have imaginary residue {residue:.3e}; input is not Hermitian"
        )
    return q.real


def recompose(q, basis: ProjectorBasis) -> np.ndarray:
    """Weighted projector sum sum_i q_i P_i."""
    q = np.asarray(q)
    if q.shape != (basis.size,):
        raise ValueError(f"expected {basis.size} coefficients, got shape {q.shape}")
    return np.tensordot(q, basis.projectors, axes=1)


def random_density(d: int, rng: np.random.Generator) -> np.ndarray:
    """Hilbert-Schmidt random density operator (normalized Ginibre G G^dag)."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    m /= np.trace(m).real
    return (m + m.conj().T) / 2


def random_pure(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure-state projector."""
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase-fixed R diagonal."""
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(g)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases

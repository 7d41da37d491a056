"""Dense complex linear algebra and quantum-information primitives.

Everything here operates on plain numpy arrays; the thin dataclass wrappers
(`DensityMatrix`, `StateEnsemble`, `PureState`) exist to validate physical
invariants once at construction time so the numerical routines can assume
well-formed inputs. All functions are pure; target dimensions are small
(<= 64), so everything is dense and eigendecomposition-based.
"""

from __future__ import annotations

from dataclasses import dataclass, InitVar

import numpy as np

# Eigenvalues in [-EIG_CLAMP_TOL, 0) are treated as round-off and clamped to
# zero; anything below -EIG_CLAMP_TOL is genuine negativity and rejected.
EIG_CLAMP_TOL = 1e-10
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PRIOR_TOL = 1e-12
NORM_TOL = 1e-12


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def hermitian_part(a: np.ndarray) -> np.ndarray:
    """Return (A + A^dagger) / 2."""
    return (a + a.conj().T) / 2


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return a.shape[0] == a.shape[1] and np.max(np.abs(a - a.conj().T)) <= tol


def projector(vec: np.ndarray) -> np.ndarray:
    """Outer product |v><v|."""
    v = np.asarray(vec, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def kron_all(mats: list[np.ndarray]) -> np.ndarray:
    """Kronecker product of a list of matrices, left to right."""
    out = np.asarray(mats[0], dtype=complex)
    for m in mats[1:]:
        out = np.kron(out, np.asarray(m, dtype=complex))
    return out


def tensor_power(mat: np.ndarray, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("tensor power requires n >= 1")
    return kron_all([mat] * n)


@dataclass(frozen=True)
class DensityMatrix:
    """A Hermitian, positive semidefinite, unit-trace matrix.

    Pass ``validate=False`` to skip the invariant checks in hot inner loops
    (the caller is then responsible for well-formedness).
    """

    mat: np.ndarray
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool) -> None:
        m = np.asarray(self.mat, dtype=complex)
        object.__setattr__(self, "mat", m)
        if not validate:
            return
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m.view(float))):
            raise ValueError("density matrix contains non-finite entries")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian within tolerance")
        if abs(np.trace(m).real - 1.0) > TRACE_TOL or abs(np.trace(m).imag) > TRACE_TOL:
            raise ValueError("density matrix trace differs from 1 beyond tolerance")
        w = np.linalg.eigvalsh(hermitian_part(m))
        if w.min() < -EIG_CLAMP_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {w.min():.3e}")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def unchecked(cls, mat: np.ndarray) -> "DensityMatrix":
        return cls(mat, validate=False)


@dataclass(frozen=True)
class PureState:
    """A unit-norm complex amplitude vector."""

    amplitudes: np.ndarray
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool) -> None:
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        object.__setattr__(self, "amplitudes", v)
        if validate and abs(np.linalg.norm(v) - 1.0) > NORM_TOL:
            raise ValueError("pure state amplitudes are not unit norm")

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def density(self) -> DensityMatrix:
        return DensityMatrix.unchecked(projector(self.amplitudes))

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class StateEnsemble:
    """A list of density matrices with prior probabilities."""

    states: tuple[DensityMatrix, ...]
    priors: np.ndarray
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        p = np.asarray(self.priors, dtype=float).reshape(-1)
        object.__setattr__(self, "priors", p)
        if not validate:
            return
        if len(self.states) < 2:
            raise ValueError("ensemble needs at least two hypotheses")
        if len(self.states) != p.shape[0]:
            raise ValueError("number of states and priors differ")
        if np.any(p < 0):
            raise ValueError("priors must be nonnegative")
        if abs(p.sum() - 1.0) > PRIOR_TOL:
            raise ValueError("priors must sum to 1")
        dims = {s.dim for s in self.states}
        if len(dims) != 1:
            raise ValueError(f"states have mixed dimensions {sorted(dims)}")

    @property
    def m(self) -> int:
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def average_state(self) -> np.ndarray:
        return sum(p * s.mat for p, s in zip(self.priors, self.states))


def matrix_sqrt(a: np.ndarray) -> np.ndarray:
    """Principal square root of a PSD Hermitian matrix via eigendecomposition.

    Eigenvalues in [-EIG_CLAMP_TOL, 0) are clamped to zero; more negative
    values raise.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix_sqrt requires a square matrix")
    if not is_hermitian(a, tol=1e-8):
        raise ValueError("matrix_sqrt requires a Hermitian matrix")
    w, v = np.linalg.eigh(hermitian_part(a))
    if w.min() < -EIG_CLAMP_TOL:
        raise ValueError(f"matrix_sqrt of a non-PSD matrix (min eigenvalue {w.min():.3e})")
    w = np.sqrt(np.clip(w, 0.0, None))
    return hermitian_part((v * w) @ v.conj().T)


def trace_norm(a: np.ndarray) -> float:
    """One-norm of a Hermitian matrix: the sum of absolute eigenvalues."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("trace_norm requires a square matrix")
    if not is_hermitian(a, tol=1e-8):
        raise ValueError("trace_norm implemented for Hermitian matrices only")
    return float(np.sum(np.abs(np.linalg.eigvalsh(hermitian_part(a)))))


def fidelity(rho: DensityMatrix | np.ndarray, sigma: DensityMatrix | np.ndarray) -> float:
    """Uhlmann fidelity Tr sqrt(sqrt(sigma) rho sqrt(sigma)), in [0, 1].

    Computed as the nuclear norm of sqrt(rho) sqrt(sigma), which is symmetric
    in the arguments by construction.
    """
    r = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    s = sigma.mat if isinstance(sigma, DensityMatrix) else np.asarray(sigma, dtype=complex)
    if r.shape != s.shape:
        raise ValueError(f"fidelity dimension mismatch: {r.shape} vs {s.shape}")
    sr = matrix_sqrt(r)
    ss = matrix_sqrt(s)
    sv = np.linalg.svd(sr @ ss, compute_uv=False)
    return float(min(1.0, max(0.0, sv.sum())))


def max_entangled(d: int) -> PureState:
    """The d-dimensional maximally entangled state sum_l |l,l> / sqrt(d)."""
    if d < 2:
        raise ValueError("maximally entangled state needs local dimension >= 2")
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1.0 / np.sqrt(d)
    return PureState(v)


def partial_trace(
    rho: DensityMatrix | np.ndarray, dim_a: int, dim_b: int, trace_out: str = "B"
) -> DensityMatrix:
    """Trace out one tensor factor of a bipartite state on dim_a * dim_b.

    ``trace_out`` selects the factor that is removed ("A" or "B"); the result
    lives on the remaining factor.
    """
    m = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if m.shape[0] != dim_a * dim_b:
        raise ValueError(f"dimension {m.shape[0]} does not factor as {dim_a}x{dim_b}")
    t = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if trace_out == "B":
        out = np.trace(t, axis1=1, axis2=3)
    elif trace_out == "A":
        out = np.trace(t, axis1=0, axis2=2)
    else:
        raise ValueError("trace_out must be 'A' or 'B'")
    return DensityMatrix.unchecked(hermitian_part(out))


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Haar-ish random mixed state: G G^dagger normalized, G complex Gaussian."""
    r = rank if rank is not None else dim
    g = rng.standard_normal((dim, r)) + 1j * rng.standard_normal((dim, r))
    m = g @ g.conj().T
    return DensityMatrix.unchecked(hermitian_part(m / np.trace(m).real))


def random_pure_state(dim: int, rng: np.random.Generator) -> PureState:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(v / np.linalg.norm(v))

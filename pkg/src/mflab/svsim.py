"""Dense statevector engine and brute-force operator analysis.

This is the slow-but-exact side of the package: it applies the driven-chain
cycle gate by gate to a 2**N amplitude vector, evaluates Pauli-string
expectations, samples shots, and (at tiny N) builds full operator-space
objects such as the Pauli transfer matrix.  Everything here is meant to act
as an oracle for the free-fermion engine and the compiled circuits.

Qubit ordering: site 1 is the most significant bit of the amplitude index,
so ``amps.reshape((2,) * n)`` exposes site ``s`` on axis ``s - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CapacityError
from .model import (ChainSpec, MajoranaLabel, PauliString, majorana_pair_string,
                    majorana_probe, majorana_to_pauli)

MAX_STATEVECTOR_SITES = 24
MAX_RESIDUAL_SITES = 8
MAX_TRANSFER_SITES = 3

_G_MATRIX = np.array([[1.0, -1.0j], [1.0, 1.0j]]) / np.sqrt(2.0)  # G = H S^dagger


@dataclass
class StateVector:
    """Normalized amplitude vector over N qubits."""

    amps: np.ndarray
    n_sites: int

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=complex)
        if self.amps.shape != (2 ** self.n_sites,):
            raise ValueError(
                f"amplitude vector has shape {self.amps.shape}, expected (2**{self.n_sites},)"
            )

    def copy(self) -> "StateVector":
        return StateVector(self.amps.copy(), self.n_sites)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


@dataclass(frozen=True)
class NoiseModel:
    """Observable-level exponential damping: values at cycle n pick up exp(-gamma*n)."""

    gamma: float = 0.0

    def __post_init__(self):
        if self.gamma < 0.0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")


def prepare_state(kind: str, n_sites: int, *, a: float | None = None,
                  bits: Sequence[int] | None = None) -> StateVector:
    """Build one of the two product states used by the experiments.

    ``plus_product`` is |+>^N.  ``correlator`` is
    |psi_a> |s_2> ... |s_{N-1}> |psi_a> with |psi_a> = cos(a)|0> + i sin(a)|1>
    and ``bits`` the N-2 middle Z-basis values.
    """
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    if n_sites > MAX_STATEVECTOR_SITES:
        raise CapacityError(f"statevector capped at {MAX_STATEVECTOR_SITES} sites, got {n_sites}")
    if kind == "plus_product":
        amps = np.full(2 ** n_sites, 2.0 ** (-n_sites / 2.0), dtype=complex)
        return StateVector(amps, n_sites)
    if kind == "correlator":
        if a is None:
            raise ValueError("correlator state needs the boundary angle a")
        bits = tuple(int(b) for b in (bits if bits is not None else ()))
        if len(bits) != n_sites - 2:
            raise ValueError(f"need {n_sites - 2} middle bits, got {len(bits)}")
        if any(b not in (0, 1) for b in bits):
            raise ValueError("bits must be 0 or 1")
        edge = np.array([np.cos(a), 1.0j * np.sin(a)])
        amps = edge
        for b in bits:
            site = np.zeros(2, dtype=complex)
            site[b] = 1.0
            amps = np.kron(amps, site)
        amps = np.kron(amps, edge)
        return StateVector(amps, n_sites)
    raise ValueError(f"unknown state kind {kind!r}")


# ---------------------------------------------------------------------------
# gate primitives (operate in place on a flat complex array)

def _apply_letters_inplace(amps: np.ndarray, n: int, sites_letters) -> None:
    """Apply a product of single-site Pauli letters (no phase) in place.

    ``amps`` may be a (2**n,) vector or a (2**n, batch) matrix.
    """
    batch = amps.shape[1] if amps.ndim == 2 else 1
    for site, letter in sites_letters:
        pre = 1 << (site - 1)
        post = (1 << (n - site)) * batch
        v = amps.reshape(pre, 2, post)
        if letter == "X":
            v[:, [0, 1], :] = v[:, [1, 0], :]
        elif letter == "Y":
            v[:, [0, 1], :] = v[:, [1, 0], :]
            v[:, 0, :] *= -1.0j
            v[:, 1, :] *= 1.0j
        elif letter == "Z":
            v[:, 1, :] *= -1.0
        else:
            raise ValueError(f"unexpected letter {letter}")


def apply_pauli(psi: StateVector, pauli: PauliString) -> StateVector:
    """Return pauli |psi> (exact phase included)."""
    if pauli.n_sites != psi.n_sites:
        raise ValueError("operator and state sizes differ")
    out = psi.amps.copy()
    _apply_letters_inplace(out, psi.n_sites,
                           [(s + 1, c) for s, c in enumerate(pauli.letters) if c != "I"])
    out *= pauli.phase
    return StateVector(out, psi.n_sites)


def _apply_pauli_rotation_inplace(amps: np.ndarray, n: int, theta: float, sites_letters) -> None:
    """In-place exp(-i theta P) with P a product of the given letters."""
    if theta == 0.0 or not sites_letters:
        if theta != 0.0 and not sites_letters:
            amps *= np.exp(-1.0j * theta)  # P = identity, global phase
        return
    rotated = amps.copy()
    _apply_letters_inplace(rotated, n, sites_letters)
    amps *= np.cos(theta)
    amps -= 1.0j * np.sin(theta) * rotated


def _apply_1q_inplace(amps: np.ndarray, n: int, site: int, mat: np.ndarray) -> None:
    batch = amps.shape[1] if amps.ndim == 2 else 1
    pre = 1 << (site - 1)
    post = (1 << (n - site)) * batch
    v = amps.reshape(pre, 2, post)
    top = mat[0, 0] * v[:, 0, :] + mat[0, 1] * v[:, 1, :]
    bot = mat[1, 0] * v[:, 0, :] + mat[1, 1] * v[:, 1, :]
    v[:, 0, :] = top
    v[:, 1, :] = bot


def _apply_cycle_inplace(amps: np.ndarray, spec: ChainSpec) -> None:
    """One drive period: Z layer, then XX layer, then ZZ layer."""
    n = spec.n_sites
    for j, phi in enumerate(spec.z_angles(), start=1):
        if phi != 0.0:
            _apply_pauli_rotation_inplace(amps, n, phi, [(j, "Z")])
    for j, theta in enumerate(spec.xx_angles(), start=1):
        if theta != 0.0:
            _apply_pauli_rotation_inplace(amps, n, theta, [(j, "X"), (j + 1, "X")])
    for j, phz in enumerate(spec.zz_angles(), start=1):
        if phz != 0.0:
            _apply_pauli_rotation_inplace(amps, n, phz, [(j, "Z"), (j + 1, "Z")])


def apply_floquet_cycle(psi: StateVector, spec: ChainSpec) -> StateVector:
    """Apply one full drive period and return the new state."""
    if spec.n_sites != psi.n_sites:
        raise ValueError("spec and state sizes differ")
    out = psi.amps.copy()
    _apply_cycle_inplace(out, spec)
    return StateVector(out, psi.n_sites)


def apply_braid_unitary(psi: StateVector, alpha: float) -> StateVector:
    """Apply exp(-alpha gamma_1 gamma_2N) = cos(alpha) - sin(alpha) gamma_1 gamma_2N."""
    n = psi.n_sites
    string = majorana_pair_string(1, 2 * n, n)
    rotated = apply_pauli(psi, string)
    amps = np.cos(alpha) * psi.amps - np.sin(alpha) * rotated.amps
    return StateVector(amps, n)


# ---------------------------------------------------------------------------
# expectations and sampling

def pauli_expectation(psi: StateVector, pauli: PauliString):
    """<psi|P|psi>; returns a float for Hermitian P, complex otherwise."""
    value = complex(np.vdot(psi.amps, apply_pauli(psi, pauli).amps))
    if pauli.is_hermitian:
        if abs(value.imag) > 1e-12:
            raise AssertionError(f"Hermitian expectation has imaginary part {value.imag}")
        return value.real
    return value


def observable_series(spec: ChainSpec, init: StateVector, observables: Sequence[PauliString],
                      depth: int, noise: NoiseModel | None = None) -> np.ndarray:
    """Expectations of each observable after n cycles, n = 0..depth-1.

    Returns a complex (depth, n_obs) array.  With a noise model the row at
    cycle n is damped by exp(-gamma*n).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    psi = init.copy()
    out = np.empty((depth, len(observables)), dtype=complex)
    for n in range(depth):
        if n > 0:
            _apply_cycle_inplace(psi.amps, spec)
        for j, obs in enumerate(observables):
            value = complex(np.vdot(psi.amps, apply_pauli(psi, obs).amps))
            out[n, j] = value
    if noise is not None and noise.gamma > 0.0:
        out *= np.exp(-noise.gamma * np.arange(depth))[:, None]
    return out


def majorana_series(spec: ChainSpec, init: StateVector, rep: str, depth: int,
                    noise: NoiseModel | None = None) -> np.ndarray:
    """Series of all 2N edge-probe expectations for one encoding.

    Column mu-1 holds <probe_mu(n)>, with the R-encoding probe sign fix of
    :func:`mflab.model.majorana_probe` applied.
    """
    probes = [majorana_probe(MajoranaLabel(mu, rep), spec.n_sites)
              for mu in range(1, 2 * spec.n_sites + 1)]
    return observable_series(spec, init, probes, depth, noise)


def sample_shots(psi: StateVector, pauli: PauliString, shots: int, seed) -> float:
    """Unbiased +-1 shot estimate of a Hermitian Pauli expectation."""
    if not pauli.is_hermitian:
        raise ValueError("can only sample Hermitian observables")
    if shots < 1:
        raise ValueError("shots must be >= 1")
    exact = pauli_expectation(psi, pauli)
    p_plus = min(1.0, max(0.0, (1.0 + exact) / 2.0))
    rng = np.random.default_rng(seed)
    n_plus = rng.binomial(shots, p_plus)
    return (2.0 * n_plus - shots) / shots


# ---------------------------------------------------------------------------
# dense operator-space tools (tiny N only)

def pauli_matrix(pauli: PauliString) -> np.ndarray:
    """Dense 2**N x 2**N matrix of a Pauli string."""
    singles = {
        "I": np.eye(2, dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    }
    out = np.array([[pauli.phase]], dtype=complex)
    for c in pauli.letters:
        out = np.kron(out, singles[c])
    return out


def floquet_unitary_dense(spec: ChainSpec) -> np.ndarray:
    """Dense one-period unitary, built by pushing basis columns through the gates."""
    n = spec.n_sites
    if n > MAX_RESIDUAL_SITES:
        raise CapacityError(f"dense unitary capped at {MAX_RESIDUAL_SITES} sites, got {n}")
    mat = np.eye(2 ** n, dtype=complex)
    _apply_cycle_inplace(mat, spec)
    return mat


def majorana_conjugation_matrix(spec: ChainSpec, rep: str) -> np.ndarray:
    """Rows of U^dag gamma_mu U expanded over gamma_nu (same encoding).

    Brute-force oracle for the free-fermion single-particle matrix; only
    meaningful for interaction-free specs but computable for any.
    """
    n = spec.n_sites
    if n > 6:
        raise CapacityError("conjugation oracle capped at 6 sites")
    u_dense = floquet_unitary_dense(spec)
    gammas = [pauli_matrix(majorana_to_pauli(MajoranaLabel(mu, rep), n))
              for mu in range(1, 2 * n + 1)]
    out = np.empty((2 * n, 2 * n))
    dim = 2 ** n
    for i, g in enumerate(gammas):
        evolved = u_dense.conj().T @ g @ u_dense
        for j, h in enumerate(gammas):
            coeff = np.trace(evolved @ h) / dim
            out[i, j] = coeff.real
    return out


def operator_residual(spec: ChainSpec, candidate: Sequence[tuple[complex, PauliString]],
                      omega: float) -> float:
    """Spectral-norm defect of a candidate frequency-omega eigenoperator.

    ``candidate`` is a list of (coefficient, PauliString) terms.  Returns
    ||U^dag Delta U - exp(-i omega) Delta||; the inverse of this number
    sets the operator's lifetime in cycles.
    """
    n = spec.n_sites
    if n > MAX_RESIDUAL_SITES:
        raise CapacityError(f"operator residual capped at {MAX_RESIDUAL_SITES} sites, got {n}")
    delta = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for coeff, string in candidate:
        delta += coeff * pauli_matrix(string)
    u_dense = floquet_unitary_dense(spec)
    defect = u_dense.conj().T @ delta @ u_dense - np.exp(-1.0j * omega) * delta
    return float(np.linalg.svd(defect, compute_uv=False)[0])


def linear_majorana_candidate(coeffs: np.ndarray, n_sites: int, rep: str = "L"):
    """Terms list for Delta = sum_mu coeffs[mu-1] gamma_mu."""
    return [(complex(c), majorana_to_pauli(MajoranaLabel(mu, rep), n_sites))
            for mu, c in enumerate(np.asarray(coeffs), start=1) if c != 0]


def pauli_basis(n_sites: int) -> list[PauliString]:
    """All 4**N phase-free Pauli strings; index digits run I,X,Y,Z per site,
    site 1 most significant."""
    strings = []
    for idx in range(4 ** n_sites):
        letters = []
        rem = idx
        for _ in range(n_sites):
            rem, d = divmod(rem, 4)
            letters.append("IXYZ"[d])
        strings.append(PauliString(0, tuple(reversed(letters))))
    return strings


@dataclass
class TransferMatrixReport:
    """Self-checks of the operator transfer matrix and its eigenmodes."""

    max_imag: float
    orthogonality_residual: float
    unit_circle_residual: float
    eigen_identity_residual: float
    trace_orthonormality_residual: float
    frequencies: np.ndarray = field(repr=False)

    TOL = 1e-10

    @property
    def ok(self) -> bool:
        return (self.max_imag <= self.TOL
                and self.orthogonality_residual <= self.TOL
                and self.unit_circle_residual <= self.TOL
                and self.eigen_identity_residual <= 1e-8
                and self.trace_orthonormality_residual <= 1e-8)


def _orthonormalize_clusters(eigvals: np.ndarray, eigvecs: np.ndarray,
                             cluster_tol: float = 1e-12) -> np.ndarray:
    """QR-orthonormalize eigenvector columns inside exactly-degenerate clusters."""
    order = np.argsort(np.angle(eigvals))
    vecs = eigvecs.copy()
    used = np.zeros(len(eigvals), dtype=bool)
    for i in order:
        if used[i]:
            continue
        cluster = [j for j in range(len(eigvals)) if not used[j]
                   and abs(eigvals[j] - eigvals[i]) <= cluster_tol]
        for j in cluster:
            used[j] = True
        if len(cluster) > 1:
            q, _ = np.linalg.qr(vecs[:, cluster])
            vecs[:, cluster] = q
    return vecs


def pauli_transfer_matrix(spec: ChainSpec):
    """Operator-space transfer matrix E and a report of its structural checks.

    E[a, b] = Tr(U^dag P_a U P_b) / 2**N over the full Pauli basis; operator
    coefficient columns evolve as c -> E^T c per cycle.
    """
    n = spec.n_sites
    if n > MAX_TRANSFER_SITES:
        raise CapacityError(f"transfer matrix capped at {MAX_TRANSFER_SITES} sites, got {n}")
    basis = pauli_basis(n)
    dim = 2 ** n
    mats = np.stack([pauli_matrix(p) for p in basis])
    u_dense = floquet_unitary_dense(spec)
    evolved = np.einsum("ij,ajk,kl->ail", u_dense.conj().T, mats, u_dense, optimize=True)
    raw = np.einsum("aij,bji->ab", evolved, mats, optimize=True) / dim
    max_imag = float(np.abs(raw.imag).max())
    e_mat = raw.real.copy()

    ortho = float(np.linalg.norm(e_mat @ e_mat.T - np.eye(len(basis))))
    eigvals, eigvecs = np.linalg.eig(e_mat.T)  # right eigvecs of E^T = channel modes
    unit_circle = float(np.abs(np.abs(eigvals) - 1.0).max())
    eigvecs = _orthonormalize_clusters(eigvals, eigvecs)
    # Eigen identity on operator coefficients: v^T E = lambda v^T.
    ident = float(np.linalg.norm(e_mat.T @ eigvecs - eigvecs * eigvals[None, :]))
    gram = eigvecs.conj().T @ eigvecs
    trace_orth = float(np.linalg.norm(gram - np.eye(len(basis))))
    freqs = -np.angle(eigvals)
    report = TransferMatrixReport(
        max_imag=max_imag,
        orthogonality_residual=ortho,
        unit_circle_residual=unit_circle,
        eigen_identity_residual=ident,
        trace_orthonormality_residual=trace_orth,
        frequencies=freqs,
    )
    return e_mat, report

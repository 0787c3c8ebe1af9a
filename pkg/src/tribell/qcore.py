"""Complex linear algebra kernel for three-qubit pure states.

States are length-8 complex vectors indexed by the basis label b1 b2 b3 with
qubit 1 as the leftmost bit (index = 4*b1 + 2*b2 + b3).  Observables are
spin projections n.sigma built from unit vectors, and all matrices stay at
most 8x8, so the Hermitian eigenproblems are solved by an in-house cyclic
Jacobi rotation sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-9
HERM_TOL = 1e-12

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)
PAULIS = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])


class ValidationError(ValueError):
    """Raised when an input violates a structural invariant."""


@dataclass(frozen=True)
class GhzClassParams:
    """Angles (theta, theta3) of the GHZ-class family, both in [0, pi/2]."""

    theta: float
    theta3: float

    def __post_init__(self):
        for name, value in (("theta", self.theta), ("theta3", self.theta3)):
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite")
            if not -1e-12 <= value <= math.pi / 2 + 1e-12:
                raise ValidationError(f"{name}={value} outside [0, pi/2]")


@dataclass(frozen=True)
class WClassParams:
    """Real non-negative amplitudes (alpha, beta, gamma) with unit norm.

    Signs of the amplitudes are absorbable by local phases, so non-negativity
    loses no generality.
    """

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        amps = (self.alpha, self.beta, self.gamma)
        if any(not math.isfinite(a) for a in amps):
            raise ValidationError("amplitudes must be finite")
        if any(a < 0 for a in amps):
            raise ValidationError("amplitudes must be non-negative")
        norm_sq = sum(a * a for a in amps)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValidationError(f"alpha^2+beta^2+gamma^2 = {norm_sq}, not 1")


@dataclass(frozen=True)
class UnitVector:
    """Measurement direction given by polar angle in [0, pi] and azimuth."""

    polar: float
    azimuth: float

    def __post_init__(self):
        if not (math.isfinite(self.polar) and math.isfinite(self.azimuth)):
            raise ValidationError("angles must be finite")
        if not -1e-12 <= self.polar <= math.pi + 1e-12:
            raise ValidationError(f"polar={self.polar} outside [0, pi]")

    @property
    def cartesian(self) -> np.ndarray:
        st = math.sin(self.polar)
        return np.array([
            st * math.cos(self.azimuth),
            st * math.sin(self.azimuth),
            math.cos(self.polar),
        ])

    @classmethod
    def from_cartesian(cls, v) -> "UnitVector":
        v = np.asarray(v, dtype=float)
        norm = np.linalg.norm(v)
        if norm < 1e-14:
            raise ValidationError("cannot normalize a zero vector")
        v = v / norm
        polar = math.acos(min(1.0, max(-1.0, v[2])))
        azimuth = math.atan2(v[1], v[0]) % (2 * math.pi)
        return cls(polar, azimuth)


X_HAT = UnitVector(math.pi / 2, 0.0)
Y_HAT = UnitVector(math.pi / 2, math.pi / 2)
Z_HAT = UnitVector(0.0, 0.0)


class ThreeQubitPureState:
    """Unit-norm vector of 8 complex amplitudes."""

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes):
        amps = np.asarray(amplitudes, dtype=complex)
        if amps.shape != (8,):
            raise ValidationError("state needs exactly 8 amplitudes")
        if not np.all(np.isfinite(amps.view(float))):
            raise ValidationError("amplitudes must be finite")
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValidationError(f"squared norm {norm_sq} deviates from 1")
        object.__setattr__(self, "amplitudes", amps)
        amps.setflags(write=False)

    def __repr__(self):
        return f"ThreeQubitPureState({self.amplitudes.tolist()})"


def make_state(amplitudes, normalize: bool = False) -> ThreeQubitPureState:
    """Validate 8 amplitudes into a state, optionally rescaling to unit norm."""
    amps = np.asarray(amplitudes, dtype=complex)
    if amps.shape != (8,):
        raise ValidationError("state needs exactly 8 amplitudes")
    norm = float(np.linalg.norm(amps))
    if norm < 1e-14:
        raise ValidationError("all-zero amplitude vector")
    if normalize:
        amps = amps / norm
    return ThreeQubitPureState(amps)


def ghz_state(p: GhzClassParams) -> ThreeQubitPureState:
    """cos(theta)|000> + sin(theta)cos(theta3)|110> + sin(theta)sin(theta3)|111>."""
    amps = np.zeros(8, dtype=complex)
    amps[0] = math.cos(p.theta)
    amps[6] = math.sin(p.theta) * math.cos(p.theta3)
    amps[7] = math.sin(p.theta) * math.sin(p.theta3)
    return ThreeQubitPureState(amps)


def w_state(p: WClassParams) -> ThreeQubitPureState:
    """alpha|001> + beta|010> + gamma|100>."""
    amps = np.zeros(8, dtype=complex)
    amps[1] = p.alpha
    amps[2] = p.beta
    amps[4] = p.gamma
    return ThreeQubitPureState(amps)


def haar_random_state(rng: np.random.Generator) -> ThreeQubitPureState:
    """Uniform pure state: 8 complex standard normals, then normalized."""
    z = rng.normal(size=8) + 1j * rng.normal(size=8)
    return make_state(z, normalize=True)


def spin_observable(n: UnitVector) -> np.ndarray:
    """n . sigma as a 2x2 Hermitian matrix with eigenvalues +-1."""
    v = n.cartesian
    return v[0] * SIGMA_X + v[1] * SIGMA_Y + v[2] * SIGMA_Z


def tensor3(o1: np.ndarray, o2: np.ndarray, o3: np.ndarray) -> np.ndarray:
    """Kronecker product in qubit order 1 x 2 x 3."""
    return np.kron(np.kron(o1, o2), o3)


def expectation(s: ThreeQubitPureState, o: np.ndarray) -> float:
    """<psi|O|psi> for a Hermitian O; a large imaginary residue is a bug."""
    value = complex(np.vdot(s.amplitudes, o @ s.amplitudes))
    if abs(value.imag) > 1e-10:
        raise ValidationError(
            f"imaginary residue {value.imag} in expectation; operator not Hermitian")
    return value.real


_KEEP_PAIRS = {
    (1, 2): "abc,dec->abde",
    (2, 3): "abc,ade->bcde",
    (1, 3): "abc,dbe->acde",
}


def partial_trace(s: ThreeQubitPureState, keep) -> np.ndarray:
    """Reduced 4x4 density matrix of the retained qubit pair (labels ascending)."""
    keep = tuple(sorted(keep))
    if keep not in _KEEP_PAIRS:
        raise ValidationError(f"keep must be one of (1,2),(2,3),(1,3), got {keep}")
    psi = s.amplitudes.reshape(2, 2, 2)
    rho = np.einsum(_KEEP_PAIRS[keep], psi, psi.conj()).reshape(4, 4)
    return rho


def reduced_single(s: ThreeQubitPureState, qubit: int) -> np.ndarray:
    """2x2 reduced density matrix of one qubit."""
    if qubit not in (1, 2, 3):
        raise ValidationError(f"qubit label must be 1, 2 or 3, got {qubit}")
    psi = s.amplitudes.reshape(2, 2, 2)
    spec = {1: "abc,dbc->ad", 2: "abc,adc->bd", 3: "abc,abd->cd"}[qubit]
    return np.einsum(spec, psi, psi.conj())


def _check_hermitian(m: np.ndarray, tol: float):
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] > 8:
        raise ValidationError("expected a square matrix of size at most 8")
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise ValidationError("matrix is not Hermitian within tolerance")


def herm_eig(m: np.ndarray, tol: float = HERM_TOL):
    """Eigen-decomposition of a small Hermitian matrix by cyclic Jacobi sweeps.

    Returns (values, vectors) with values descending and vectors as columns.
    Sweeps run until the squared off-diagonal mass drops below 1e-14.
    """
    _check_hermitian(m, tol)
    n = m.shape[0]
    a = np.array(m, dtype=complex)
    v = np.eye(n, dtype=complex)
    prev_off = math.inf
    for _ in range(100):
        # Sum the off-diagonal mass directly; subtracting the diagonal mass
        # from the total would cancel catastrophically near convergence.
        off_block = np.abs(a) ** 2
        np.fill_diagonal(off_block, 0.0)
        off = float(np.sum(off_block))
        # Quadratic convergence: keep sweeping past the 1e-14 target until
        # roundoff stops making progress, which also tightens eigenvectors.
        if off == 0.0 or (off < 1e-14 and off >= prev_off):
            break
        prev_off = off
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-18:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                # Stable inner rotation: tan(2*theta) = 2|apq| / (app - aqq),
                # taking the small-angle root so the sweeps converge and tiny
                # couplings produce near-identity rotations.
                mag = abs(apq)
                phase = apq / mag
                tau = (app - aqq) / (2.0 * mag)
                if abs(tau) > 1e12:
                    t = 1.0 / (2.0 * tau)
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                cth = 1.0 / math.hypot(1.0, t)
                sth = t * cth
                s_fwd = sth * phase
                s_bwd = sth * np.conj(phase)
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = cth * col_p + s_bwd * col_q
                a[:, q] = cth * col_q - s_fwd * col_p
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = cth * row_p + s_fwd * row_q
                a[q, :] = cth * row_q - s_bwd * row_p
                col_p = v[:, p].copy()
                col_q = v[:, q].copy()
                v[:, p] = cth * col_p + s_bwd * col_q
                v[:, q] = cth * col_q - s_fwd * col_p
                a[p, q] = 0.0
                a[q, p] = 0.0
    vals = np.real(np.diag(a))
    order = np.argsort(vals)[::-1]
    return vals[order], v[:, order]


def herm_eigenvalues(m: np.ndarray, tol: float = HERM_TOL) -> np.ndarray:
    """Real spectrum of a Hermitian matrix up to 8x8, descending."""
    vals, _ = herm_eig(m, tol)
    return vals

"""Euler states, the lift to relaxed variables, and wave-cone tests.

Lifted states are 8-vectors laid out as

    (rho, m1, m2, U11, U12, U21, U22, q)

with U symmetric and trace-free, so slots 5 and 6 mirror U12 and -U11.
The capital matrix of z has rows/columns ordered (t, x1, x2).
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError

RHO, M1, M2, U11, U12, U21, U22, Q = range(8)
DIM = 8

DEFAULT_CONE_EPS = 1e-9


@dataclass(frozen=True)
class State:
    """Pointwise Euler state: density and velocity."""

    rho: float
    u: tuple = (0.0, 0.0)

    def __post_init__(self):
        rho = float(self.rho)
        u = tuple(float(v) for v in self.u)
        if len(u) != 2:
            raise DomainError(f"velocity must have two components, got {len(u)}")
        if not (np.isfinite(rho) and all(np.isfinite(u))):
            raise DomainError("state must be finite")
        if rho < 0:
            raise DomainError(f"negative density rho={rho}")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "u", u)

    def as_array(self):
        return np.array([self.rho, self.u[0], self.u[1]])


@dataclass(frozen=True)
class LiftedState:
    """Relaxed state (rho, m, U, q) with U stored through U11 and U12."""

    rho: float
    m: tuple
    U11: float
    U12: float
    q: float

    @property
    def U(self):
        return np.array([[self.U11, self.U12], [self.U12, -self.U11]])

    def as_vector(self):
        return np.array([self.rho, self.m[0], self.m[1],
                         self.U11, self.U12, self.U12, -self.U11, self.q])

    @classmethod
    def from_vector(cls, z):
        z = np.asarray(z, dtype=float)
        return cls(float(z[RHO]), (float(z[M1]), float(z[M2])),
                   float(z[U11]), float(z[U12]), float(z[Q]))

    def velocity(self):
        """Recover u = m / rho; undefined at vacuum."""
        if self.rho <= 0:
            raise DomainError("velocity undefined at rho = 0")
        return np.asarray(self.m) / self.rho


def as_vector(z):
    if isinstance(z, LiftedState):
        return z.as_vector()
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != DIM:
        raise DomainError(f"lifted states have {DIM} components, got {z.shape[-1]}")
    return z


def lift_arrays(rho, u, gamma=2.0):
    """Vectorised lift; ``rho`` has shape (...), ``u`` shape (..., 2)."""
    rho = np.asarray(rho, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(rho < 0):
        raise DomainError("negative density")
    if gamma <= 1:
        raise DomainError(f"gamma must exceed 1, got {gamma}")
    xi = np.sqrt(rho)[..., None] * u
    sq = np.sum(xi * xi, axis=-1)
    z = np.empty(rho.shape + (DIM,))
    z[..., RHO] = rho
    z[..., M1:M2 + 1] = np.sqrt(rho)[..., None] * xi
    z[..., U11] = xi[..., 0] ** 2 - sq / 2.0
    z[..., U12] = xi[..., 0] * xi[..., 1]
    z[..., U21] = z[..., U12]
    z[..., U22] = -z[..., U11]
    z[..., Q] = rho ** gamma + sq / 2.0
    z[rho == 0] = 0.0
    return z


def lift(s, gamma=2.0):
    """Lift an Euler state to the relaxed variables.

    Forms xi' = sqrt(rho) u and returns
    (rho, sqrt(rho) xi', xi' (x) xi' - |xi'|^2/2 I, rho^gamma + |xi'|^2/2).
    Vacuum maps to the zero state whatever the velocity.
    """
    if gamma <= 1:
        raise DomainError(f"gamma must exceed 1, got {gamma}")
    z = lift_arrays(s.rho, s.u, gamma)
    return LiftedState.from_vector(z)


def capital_matrices(z):
    """Batched capital matrices, shape (..., 3, 3)."""
    z = as_vector(z)
    out = np.empty(z.shape[:-1] + (3, 3))
    out[..., 0, 0] = z[..., RHO]
    out[..., 0, 1] = out[..., 1, 0] = z[..., M1]
    out[..., 0, 2] = out[..., 2, 0] = z[..., M2]
    out[..., 1, 1] = z[..., U11] + z[..., Q]
    out[..., 1, 2] = out[..., 2, 1] = z[..., U12]
    out[..., 2, 2] = -z[..., U11] + z[..., Q]
    return out


def capital_matrix(z):
    """3x3 matrix Z with Z @ xi == symbol(xi) @ z."""
    return capital_matrices(as_vector(z))


def from_capital_matrices(Z):
    """Inverse of ``capital_matrices`` on symmetric input."""
    Z = np.asarray(Z, dtype=float)
    z = np.empty(Z.shape[:-2] + (DIM,))
    z[..., RHO] = Z[..., 0, 0]
    z[..., M1] = Z[..., 0, 1]
    z[..., M2] = Z[..., 0, 2]
    z[..., U11] = 0.5 * (Z[..., 1, 1] - Z[..., 2, 2])
    z[..., U12] = Z[..., 1, 2]
    z[..., U21] = Z[..., 1, 2]
    z[..., U22] = -z[..., U11]
    z[..., Q] = 0.5 * (Z[..., 1, 1] + Z[..., 2, 2])
    return z


def galilean_boost(z, c):
    """Shift the x2-velocity of a lifted state by ``c``.

    Acts as Z -> G Z G^T where G maps (t, x1, x2) to (t, x1, x2 + c t),
    so lifts of Euler states go to lifts of the boosted states.
    """
    G = np.eye(3)
    G[2, 0] = c
    return from_capital_matrices(G @ capital_matrices(as_vector(z)) @ G.T)


def det_factored(s, s_tilde):
    """det(Z - Z~) of two lifted states for p(rho) = rho^2, in factored form."""
    return float(_kernels.det_factored(s.as_array(), s_tilde.as_array())[0])


def det_factored_arrays(states, states_tilde):
    """Batched ``det_factored`` for (M, 3) arrays of (rho, u1, u2)."""
    return _kernels.det_factored(np.asarray(states, dtype=float),
                                 np.asarray(states_tilde, dtype=float))


def _is_member(Z, eps):
    norm = np.linalg.norm(Z, 2)
    return abs(np.linalg.det(Z)) <= eps * norm ** 3


def wave_cone_member(zbar, eps=DEFAULT_CONE_EPS):
    """True iff zbar != 0 and its capital matrix is rank deficient."""
    zbar = as_vector(zbar)
    if not np.any(zbar):
        return False
    return bool(_is_member(capital_matrix(zbar), eps))


@dataclass(frozen=True)
class Connectedness:
    """Outcome of a wave-cone connectedness test between two states.

    Truthiness follows ``connected``. ``difference_zero`` is reported
    separately because rigidity needs a nonzero difference outside the cone.
    """

    connected: bool
    difference_zero: bool
    det: float

    def __bool__(self):
        return self.connected


def wave_cone_connected(s, s_tilde, gamma=2.0, eps=DEFAULT_CONE_EPS):
    zbar = lift(s, gamma).as_vector() - lift(s_tilde, gamma).as_vector()
    Z = capital_matrix(zbar)
    det = float(np.linalg.det(Z))
    if not np.any(zbar):
        return Connectedness(True, True, det)
    return Connectedness(bool(_is_member(Z, eps)), False, det)


def wave_direction(zbar, eps=DEFAULT_CONE_EPS, kernel_tol=1e-8):
    """Unit xi with Z(zbar) xi = 0, or None when zbar is not in the cone.

    The kernel is spanned by the right singular vectors whose singular
    values fall below ``kernel_tol * sigma_max`` (at least one). Among
    e1, e2, e3 the first with projection norm >= 1/2 onto the kernel is
    projected and normalised; this fixes both the choice inside a
    multi-dimensional kernel and the sign.
    """
    zbar = as_vector(zbar)
    if not wave_cone_member(zbar, eps):
        return None
    _, sv, vt = np.linalg.svd(capital_matrix(zbar))
    if sv[0] == 0:
        basis = np.eye(3)
    else:
        k = max(1, int(np.sum(sv <= kernel_tol * sv[0])))
        basis = vt[3 - k:].T
    proj = basis @ basis.T
    for i in range(3):
        v = proj[:, i]
        norm = np.linalg.norm(v)
        if norm >= 0.5:
            return v / norm
    raise AssertionError("no coordinate axis projects onto the kernel")

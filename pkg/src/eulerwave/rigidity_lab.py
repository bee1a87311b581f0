"""Symbol analysis, laminates and spectral projections for the relaxed operator.

Fields live on the periodic grid over [-pi, pi)^d in the coordinates
(t, x1, x2). A ``TorusField`` may cover all three coordinates or a 2-D slice
(a pair of them); it is constant along the omitted one.

Spectral conventions: a Fourier mode with a component at the Nyquist index is
given frequency zero in that component, both in ``afree_residual`` and in
``afree_projection``. This keeps the projection real and exactly idempotent.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConfigurationError, DomainError
from .lifted_algebra import (DIM, M1, M2, Q, RHO, U11, U12, State, capital_matrix,
                             lift, wave_cone_member, wave_direction)

RANK_TOL = 1e-9
AFREE_TOL = 1e-10
DEFAULT_N = 128
MAX_3D_N = 128
DEFAULT_FLOOR = 1e-3

OSCILLATION_OBSERVED = "OSCILLATION_OBSERVED"
RIGIDITY_CONSISTENT = "RIGIDITY_CONSISTENT"
INCONCLUSIVE = "INCONCLUSIVE"
DEGENERATE = "DEGENERATE"


def _relaxed_operator():
    A = np.zeros((3, 3, DIM))
    # time: rho, m1, m2
    A[0, 0, RHO] = A[0, 1, M1] = A[0, 2, M2] = 1.0
    # x1: m1, U11 + q, U12
    A[1, 0, M1] = 1.0
    A[1, 1, U11] = A[1, 1, Q] = 1.0
    A[1, 2, U12] = 1.0
    # x2: m2, U12, -U11 + q
    A[2, 0, M2] = 1.0
    A[2, 1, U12] = 1.0
    A[2, 2, U11], A[2, 2, Q] = -1.0, 1.0
    return A


OPERATOR_AL = _relaxed_operator()
OPERATOR_AL.flags.writeable = False


def symbol(xi, operator=OPERATOR_AL):
    """sum_l xi_l A^l; batched over leading axes of ``xi``."""
    xi = np.asarray(xi, dtype=float)
    return np.tensordot(xi, operator, axes=([-1], [0]))


@dataclass(frozen=True)
class RankScan:
    min_rank: int
    max_rank: int
    samples: int
    counts: dict = field(default_factory=dict)

    @property
    def constant(self):
        return self.min_rank == self.max_rank


def sphere_samples(count, dim=3):
    """Fibonacci points on S^2 (or equally spaced angles on S^1) plus the axes."""
    if count < 1:
        raise DomainError("need at least one sample")
    if dim == 2:
        ang = 2.0 * np.pi * (np.arange(count) + 0.5) / count
        pts = np.column_stack([np.cos(ang), np.sin(ang)])
    elif dim == 3:
        i = np.arange(count) + 0.5
        z = 1.0 - 2.0 * i / count
        r = np.sqrt(1.0 - z * z)
        phi = np.pi * (3.0 - math.sqrt(5.0)) * i
        pts = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    else:
        pts = np.random.default_rng(0).standard_normal((count, dim))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return np.vstack([pts, np.eye(dim)])


def matrix_ranks(M, tol=RANK_TOL):
    s = np.linalg.svd(M, compute_uv=False)
    top = s[..., :1]
    return np.sum(s > tol * np.where(top > 0, top, 1.0), axis=-1)


def rank_scan(samples, operator=OPERATOR_AL, tol=RANK_TOL):
    """Ranks of the symbol over unit frequencies; constant rank means min == max."""
    operator = np.asarray(operator, dtype=float)
    xi = sphere_samples(int(samples), operator.shape[0])
    ranks = matrix_ranks(symbol(xi, operator), tol)
    values, counts = np.unique(ranks, return_counts=True)
    return RankScan(int(ranks.min()), int(ranks.max()), len(xi),
                    {int(v): int(c) for v, c in zip(values, counts)})


def _is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class TorusField:
    """Values of shape (N,)*len(axes) + (8,) on the periodic grid.

    ``axes`` lists which of (t, x1, x2) the grid dimensions run along.
    """

    values: np.ndarray
    axes: tuple = (0, 1, 2)
    exact_direction: bool = True

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        axes = tuple(int(a) for a in self.axes)
        if v.ndim != len(axes) + 1 or v.shape[-1] != DIM:
            raise ConfigurationError("values must have shape (N,)*len(axes) + (8,)")
        if len(set(v.shape[:-1])) != 1:
            raise ConfigurationError("torus grids must be cubic")
        if not _is_power_of_two(v.shape[0]):
            raise ConfigurationError(f"grid size {v.shape[0]} is not a power of two")
        if sorted(set(axes)) != sorted(axes) or not set(axes) <= {0, 1, 2}:
            raise ConfigurationError(f"invalid axes {axes}")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "axes", axes)

    @property
    def N(self):
        return self.values.shape[0]

    def flat(self):
        return self.values.reshape(-1, DIM)

    def mean(self):
        return self.flat().mean(axis=0)

    def shifted(self, shifts):
        return TorusField(np.roll(self.values, shifts, axis=tuple(range(len(self.axes)))),
                          self.axes, self.exact_direction)


def _frequency_grid(N, axes):
    """Unit 3-vectors of the signed frequencies (Nyquist set to 0) and a nonzero mask."""
    k = np.fft.fftfreq(N, 1.0 / N)
    k[N // 2] = 0.0 if N > 1 else k[N // 2]
    grids = np.meshgrid(*([k] * len(axes)), indexing="ij")
    kappa = np.zeros(grids[0].shape + (3,))
    for g, a in zip(grids, axes):
        kappa[..., a] = g
    norm = np.linalg.norm(kappa, axis=-1)
    nonzero = norm > 0
    unit = np.zeros_like(kappa)
    unit[nonzero] = kappa[nonzero] / norm[nonzero, None]
    return unit, nonzero


def _spectrum(f):
    return np.fft.fftn(f.values, axes=tuple(range(len(f.axes))))


def afree_residual(f):
    """sqrt(sum over kappa != 0 of |A(kappa_hat) z_hat(kappa)|^2) / ||f||_2.

    Zero exactly when f is A-free on the torus (with the Nyquist convention).
    """
    zh = _spectrum(f)
    unit, nonzero = _frequency_grid(f.N, f.axes)
    Az = np.einsum("...l,lkm,...m->...k", unit, OPERATOR_AL, zh)
    num = np.sqrt(np.sum(np.abs(Az[nonzero]) ** 2))
    den = np.sqrt(np.sum(np.abs(zh) ** 2))
    return float(num / den) if den > 0 else 0.0


def afree_projection(f):
    """Apply I - A^T (A A^T)^{-1} A at every nonzero frequency; keep the mean."""
    zh = _spectrum(f)
    unit, nonzero = _frequency_grid(f.N, f.axes)
    A = symbol(unit[nonzero])
    G = A @ np.swapaxes(A, -1, -2)
    w = np.einsum("bkm,bm->bk", A, zh[nonzero])
    # constant rank keeps G invertible on the unit sphere
    assert np.all(np.abs(np.linalg.det(G)) > 1e-12), "singular normal matrix"
    y = np.linalg.solve(G, w[..., None])[..., 0]
    zh[nonzero] -= np.einsum("bkm,bk->bm", A, y)
    out = np.fft.ifftn(zh, axes=tuple(range(len(f.axes)))).real
    return TorusField(out, f.axes, f.exact_direction)


def lattice_direction(xi, max_entry=16, tol=1e-12):
    """Smallest integer vector parallel to xi (within ``tol``) with entries up to
    ``max_entry``; falls back to the best approximation.

    Returns (k, exact).
    """
    xi = np.asarray(xi, dtype=float)
    j = int(np.argmax(np.abs(xi)))
    if xi[j] == 0:
        raise DomainError("direction must be nonzero")
    ratios = xi / xi[j]
    fr = [Fraction(float(r)).limit_denominator(max_entry) for r in ratios]
    den = math.lcm(*(x.denominator for x in fr))
    k = np.array([int(x * den) for x in fr])
    if xi[j] < 0:
        k = -k
    g = math.gcd(*(abs(int(v)) for v in k)) or 1
    k = k // g
    unit = k / np.linalg.norm(k)
    exact = bool(np.linalg.norm(unit - xi / np.linalg.norm(xi)) <= tol)
    return k, exact


def _alias_free(k):
    nz = np.abs(k[k != 0])
    return bool(np.all(nz == nz[0]))


def _slice_axes(k):
    nz = [i for i in range(3) if k[i] != 0]
    if len(nz) == 3:
        return None
    pad = [i for i in (0, 2, 1) if i not in nz]
    return tuple(sorted(nz + pad[: 2 - len(nz)]))


def _profile(phase, N, lam, n, width, kind):
    """Periodic indicator of [0, lam N) in phase units (period N)."""
    if kind == "exact":
        return (phase % N < lam * N).astype(float)
    if kind == "cell":
        # mean of the indicator over [phase, phase + width)
        def cum(p):
            q, r = np.divmod(p, N)
            return q * lam * N + np.minimum(r, lam * N)
        return (cum(phase + width) - cum(phase)) / width
    raise ConfigurationError(f"unknown profile {kind!r}")


def two_state_field(z_a, z_b, lam, n, direction, N=DEFAULT_N, mode="2d", profile="cell"):
    """Field equal to z_a on a lambda-fraction of n stripes normal to ``direction``
    and to z_b elsewhere.

    ``direction`` is an integer 3-vector. The stripes depend on the grid index
    through the phase n (k . idx) mod N.
    """
    z_a = np.asarray(z_a, dtype=float)
    z_b = np.asarray(z_b, dtype=float)
    if not (0.0 <= lam <= 1.0):
        raise DomainError(f"lambda={lam} outside [0, 1]")
    if n < 1:
        raise DomainError("frequency n must be at least 1")
    if not _is_power_of_two(N):
        raise ConfigurationError(f"grid size {N} is not a power of two")
    k = np.asarray(direction, dtype=int)
    axes = _slice_axes(k) if mode == "2d" else (0, 1, 2)
    if axes is None:
        axes = (0, 1, 2)
    if len(axes) == 3 and N > MAX_3D_N:
        raise ConfigurationError(f"3-D grids are capped at N={MAX_3D_N}")
    idx = np.meshgrid(*([np.arange(N)] * len(axes)), indexing="ij")
    phase = n * sum(int(k[a]) * i for a, i in zip(axes, idx))
    width = n * int(np.max(np.abs(k)))
    chi = _profile(phase, N, lam, n, width, profile)
    values = z_b + chi[..., None] * (z_a - z_b)
    return TorusField(values, axes, _alias_free(k))


def laminate(zbar_a, zbar_b, lam, n, N=DEFAULT_N, mode="2d", profile="cell"):
    """Laminate of two lifted states along a wave direction of their difference.

    The field takes the value z_a on a lambda-fraction of the stripes, so its
    mean is lambda z_a + (1 - lambda) z_b.
    """
    zbar_a = np.asarray(zbar_a, dtype=float)
    zbar_b = np.asarray(zbar_b, dtype=float)
    diff = zbar_b - zbar_a
    if not np.any(diff):
        return two_state_field(zbar_a, zbar_b, lam, n, (0, 0, 1), N, mode, profile)
    xi = wave_direction(diff)
    if xi is None:
        raise DomainError("the difference of the two states is not in the wave cone")
    k, exact = lattice_direction(xi)
    f = two_state_field(zbar_a, zbar_b, lam, n, k, N, mode, profile)
    return TorusField(f.values, f.axes, exact and f.exact_direction)


@dataclass(frozen=True)
class EmpiricalYM:
    param_centers: np.ndarray
    param_masses: np.ndarray
    distance_edges: np.ndarray
    distance_masses: np.ndarray

    def mass_near(self, s, width=None):
        width = width if width is not None else 0.5 * (self.param_centers[1] - self.param_centers[0])
        sel = np.abs(self.param_centers - s) <= width + 1e-15
        return float(self.param_masses[sel].sum())

    def rows(self):
        return list(zip(self.param_centers.tolist(), self.param_masses.tolist()))


def empirical_ym(f, ref_a, ref_b, bins=20, distance_bins=10):
    """Histogram of the node values projected onto the segment from ref_a (0) to ref_b (1).

    Parameter bins are centred at 0, 1/bins, ..., 1, so exact copies of the
    reference states fall into the end bins.
    """
    a = np.asarray(ref_a, dtype=float)
    b = np.asarray(ref_b, dtype=float)
    d = b - a
    dd = float(d @ d)
    if dd == 0:
        raise DomainError("reference states coincide")
    v = f.flat()
    s = np.clip((v - a) @ d / dd, 0.0, 1.0)
    dist = np.linalg.norm(v - (a + s[:, None] * d), axis=1)
    centers = np.linspace(0.0, 1.0, bins + 1)
    which = np.rint(s * bins).astype(int)
    masses = np.bincount(which, minlength=bins + 1) / len(s)
    top = max(float(dist.max()), 1e-300)
    edges = np.linspace(0.0, top, distance_bins + 1)
    dm, _ = np.histogram(dist, bins=edges)
    return EmpiricalYM(centers, masses, edges, dm / len(s))


@dataclass(frozen=True)
class FrequencyRow:
    n: int
    afree_residual: float
    d_n: float
    mass_a: float
    mass_b: float


@dataclass(frozen=True)
class RigidityReport:
    outcome: str
    connected: bool
    difference_zero: bool
    det: float
    direction: tuple
    rows: tuple
    N: int
    lam: float
    floor: float
    checks: dict = field(default_factory=dict)


def _l1_distance_ratio(f, g):
    diff = np.abs(g.flat() - f.flat()).sum()
    spread = np.abs(f.flat() - f.mean()).sum()
    return float(diff / spread) if spread > 0 else 0.0


def _nondecreasing(values, rel_tol):
    return all(b >= a - rel_tol * max(abs(a), 1.0) for a, b in zip(values, values[1:]))


def rigidity_experiment(pair, lam=0.5, n_list=(1, 2, 4, 8, 16), N=64, gamma=2.0,
                        floor=DEFAULT_FLOOR, mode="2d", profile="cell", trend_tol=1e-9):
    """Oscillation test for two Euler states.

    Connected pairs: laminates at each n, checked for A-freeness and for a
    two-atom empirical measure with masses within 2/N of (lambda, 1 - lambda).
    Non-connected pairs: two-state stripes along the lattice direction closest
    to the least singular direction of the difference, projected onto A-free
    fields; d(n) is the L1 distance of the projection relative to the L1
    spread of the field.
    """
    if gamma != 2.0:
        raise DomainError("the experiment is set up for gamma = 2")
    if not _is_power_of_two(N):
        raise ConfigurationError(f"grid size {N} is not a power of two")
    s_a, s_b = (p if isinstance(p, State) else State(p[0], p[1:]) for p in pair)
    z_a, z_b = lift(s_a, gamma).as_vector(), lift(s_b, gamma).as_vector()
    diff = z_b - z_a
    det = float(np.linalg.det(capital_matrix(diff)))
    if not np.any(diff):
        rows = tuple(FrequencyRow(n, 0.0, 0.0, 1.0, 0.0) for n in n_list)
        return RigidityReport(DEGENERATE, True, True, det, (0, 0, 0), rows, N, lam, floor)

    connected = wave_cone_member(diff)
    if connected:
        k, exact = lattice_direction(wave_direction(diff))
    else:
        _, _, vt = np.linalg.svd(capital_matrix(diff))
        k, exact = lattice_direction(vt[-1])
    rows = []
    for n in n_list:
        f = two_state_field(z_a, z_b, lam, n, k, N, mode, profile)
        ym = empirical_ym(f, z_a, z_b)
        g = afree_projection(f)
        rows.append(FrequencyRow(int(n), afree_residual(f), _l1_distance_ratio(f, g),
                                 ym.mass_near(0.0), ym.mass_near(1.0)))
    rows = tuple(rows)

    mass_ok = all(abs(r.mass_a - lam) <= 2.0 / N and abs(r.mass_b - (1 - lam)) <= 2.0 / N
                  for r in rows)
    if connected:
        afree_ok = all(r.afree_residual <= AFREE_TOL for r in rows)
        checks = {"afree": afree_ok, "two_atoms": mass_ok, "exact_direction": exact}
        outcome = OSCILLATION_OBSERVED if (afree_ok and mass_ok) else INCONCLUSIVE
    else:
        d = [r.d_n for r in rows]
        above = min(d) > floor
        trend = _nondecreasing(d, trend_tol)
        checks = {"above_floor": above, "nondecreasing": trend, "two_atoms": mass_ok}
        outcome = RIGIDITY_CONSISTENT if (above and trend) else INCONCLUSIVE
    return RigidityReport(outcome, bool(connected), False, det, tuple(int(v) for v in k),
                          rows, N, lam, floor, checks)

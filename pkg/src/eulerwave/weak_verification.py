"""Distributional checks for piecewise-constant self-similar fans.

Jump conditions are evaluated in closed form. The weak form is evaluated by
quadrature against product bumps psi(t, x1, x2) on the time slab (0, 1].
Because fan fields do not depend on x1, the x1 integral factors out.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import ConfigurationError, DomainError
from .fan_construction import (EQUALITY_TOL, STRICT_TOL, SHOCK, FanPartition,
                               check_conditions)
from .lifted_algebra import M1, M2, Q, RHO, U11, U12, as_vector, galilean_boost, lift

DEFAULT_RESOLUTION = 256
GAUSS_ORDER = 64
MAX_RELATIVE_SPACING = 0.05


def relaxed_middle_state(f, C1=None):
    """z1 = (rho1, rho1 u1, rho1 w1, rho1^2 + rho1 C1 / 2)."""
    r = f.rho1
    c = f.C1 if C1 is None else C1
    return np.array([r, r * f.alpha, r * f.beta, r * f.gamma, r * f.delta,
                     r * f.delta, -r * f.gamma, r * r + r * c / 2.0])


@dataclass(frozen=True)
class PiecewiseFan:
    partition: FanPartition
    states: tuple  # three 8-vectors on P-, P1, P+

    def __post_init__(self):
        states = tuple(np.array(as_vector(z), dtype=float) for z in self.states)
        if len(states) != 3:
            raise DomainError("a fan has exactly three sector states")
        if not all(np.all(np.isfinite(z)) for z in states):
            raise DomainError("fan states must be finite")
        p = self.partition
        if not (math.isfinite(p.nu_minus) and math.isfinite(p.nu_plus)):
            raise DomainError("fan speeds must be finite")
        if not p.nu_minus < p.nu_plus:
            raise DomainError(f"need nu_minus < nu_plus, got {p.nu_minus} >= {p.nu_plus}")
        object.__setattr__(self, "states", states)

    @classmethod
    def from_subsolution(cls, f, gamma=2.0, shock=SHOCK):
        zm = lift(shock.minus, gamma).as_vector()
        zp = lift(shock.plus, gamma).as_vector()
        return cls(FanPartition(f.nu_minus, f.nu_plus), (zm, relaxed_middle_state(f), zp))

    @classmethod
    def constant(cls, z, nu_minus=-1.0, nu_plus=1.0):
        z = as_vector(z)
        return cls(FanPartition(nu_minus, nu_plus), (z, z, z))

    @property
    def speeds(self):
        return np.array([self.partition.nu_minus, self.partition.nu_plus])

    def stacked(self):
        return np.stack(self.states)

    def boosted(self, c):
        """The same fan seen from a frame moving with x2-velocity -c."""
        return PiecewiseFan(
            FanPartition(self.partition.nu_minus + c, self.partition.nu_plus + c),
            tuple(galilean_boost(z, c) for z in self.states),
        )


def balance_fluxes(z):
    """(..., 3, 2) array: time density and x2-flux of the three balance laws."""
    z = np.asarray(z, dtype=float)
    out = np.empty(z.shape[:-1] + (3, 2))
    out[..., 0, 0] = z[..., RHO]
    out[..., 1, 0] = z[..., M1]
    out[..., 2, 0] = z[..., M2]
    out[..., 0, 1] = z[..., M2]
    out[..., 1, 1] = z[..., U12]
    out[..., 2, 1] = -z[..., U11] + z[..., Q]
    return out


def rh_residual(fan):
    """Jump residuals -nu [time density] + [x2 flux], one row per interface.

    Jumps are right minus left. Both rows vanish iff the fan solves the
    relaxed system in the sense of distributions.
    """
    V = balance_fluxes(fan.stacked())
    out = np.empty((2, 3))
    for k, nu in enumerate(fan.speeds):
        jump = V[k + 1] - V[k]
        out[k] = -nu * jump[:, 0] + jump[:, 1]
    return out


@lru_cache(maxsize=None)
def bump_integral(n=4096):
    """Integral of the unit bump over (-1, 1) (midpoint rule, spectrally accurate)."""
    s = (np.arange(n) + 0.5) / n * 2.0 - 1.0
    return float(np.sum(_kernels.bump(s)) * 2.0 / n)


@dataclass(frozen=True)
class TestFunctionSet:
    """Product bumps phi((t-ct)/rt) phi((x1-c1)/r1) phi((x2-cx)/rx)."""

    __test__ = False  # not a pytest class

    centers: np.ndarray
    radii: np.ndarray
    resolution: int = DEFAULT_RESOLUTION
    gauss_order: int = GAUSS_ORDER

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=float)
        r = np.asarray(self.radii, dtype=float)
        if c.shape[-1:] != (3,) and c.size or r.shape[-1:] != (3,) and r.size:
            raise ConfigurationError("centers and radii need three columns (t, x1, x2)")
        c, r = c.reshape(-1, 3), r.reshape(-1, 3)
        if c.shape != r.shape:
            raise ConfigurationError("centers and radii must have matching shapes")
        if np.any(r <= 0) or not np.all(np.isfinite(c)) or not np.all(np.isfinite(r)):
            raise ConfigurationError("radii must be positive and all entries finite")
        if np.any(c[:, 0] - r[:, 0] <= 0):
            raise ConfigurationError("test supports must lie in t > 0")
        n = int(self.resolution)
        if n < 8:
            raise ConfigurationError(f"quadrature resolution {n} is below the minimum 8")
        worst = float(np.max(2.0 * r[:, 0] / n)) if len(r) else 0.0
        if worst > MAX_RELATIVE_SPACING:
            raise ConfigurationError(
                f"time step {worst:.3g} exceeds {MAX_RELATIVE_SPACING} for the declared supports")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "resolution", n)

    def __len__(self):
        return len(self.centers)

    @classmethod
    def random(cls, count, seed=0, t_slab=(0.0, 1.0), x2_range=(-3.0, 1.0),
               radius_range=(0.1, 0.4), resolution=DEFAULT_RESOLUTION):
        rng = np.random.default_rng(seed)
        lo, hi = radius_range
        r = rng.uniform(lo, hi, size=(count, 3))
        r[:, 0] = np.minimum(r[:, 0], 0.45 * (t_slab[1] - t_slab[0]))
        ct = rng.uniform(t_slab[0] + r[:, 0] + 1e-3, t_slab[1] - r[:, 0])
        c1 = rng.uniform(-1.0, 1.0, size=count)
        cx = rng.uniform(*x2_range, size=count)
        return cls(np.column_stack([ct, c1, cx]), r, resolution)

    @classmethod
    def on_interfaces(cls, speeds, count_each=3, seed=0, radius=0.2,
                      resolution=DEFAULT_RESOLUTION):
        """Bumps centred on the lines x2 = nu t, 0 < t <= 1."""
        rng = np.random.default_rng(seed)
        centers = []
        for nu in speeds:
            ct = rng.uniform(radius + 0.05, 1.0 - radius, size=count_each)
            centers += [(t, 0.0, nu * t) for t in ct]
        c = np.array(centers)
        return cls(c, np.full_like(c, radius), resolution)

    def kernel_rows(self):
        return np.column_stack([self.centers[:, 0], self.radii[:, 0],
                                self.centers[:, 2], self.radii[:, 2]])

    def x1_factors(self):
        return self.radii[:, 1] * bump_integral()

    def gauss_rule(self):
        return np.polynomial.legendre.leggauss(self.gauss_order)


def sector_integrals(speeds, values, tests):
    """(B, R) weak integrals of a fan-shaped field, x1 factor included."""
    nodes, weights = tests.gauss_rule()
    raw = _kernels.sector_weak_integrals(
        np.asarray(speeds, dtype=float), np.asarray(values, dtype=float),
        tests.kernel_rows(), tests.resolution, nodes, weights)
    return raw * tests.x1_factors()[:, None]


def weak_integrals(fan, tests):
    """Per-test (B, 3) values of int d_t psi z_t + div psi . z_x over the fan."""
    return sector_integrals(fan.speeds, balance_fluxes(fan.stacked()), tests)


def weak_form_residual(fan, tests):
    """Largest Euclidean norm of the per-test weak integrals."""
    if len(tests) == 0:
        return 0.0
    return float(np.max(np.linalg.norm(weak_integrals(fan, tests), axis=1)))


def interface_jump_integral(fan, tests, n=20000):
    """Closed-form limit of ``weak_integrals``: -int psi(t, nu t) r dt summed over
    interfaces, with r the jump residual; used as a quadrature oracle."""
    res = rh_residual(fan)
    out = np.zeros((len(tests), 3))
    for b, ((ct, _, cx), (rt, _, rx)) in enumerate(zip(tests.centers, tests.radii)):
        s = (np.arange(n) + 0.5) / n * 2.0 - 1.0
        t = ct + rt * s
        for k, nu in enumerate(fan.speeds):
            psi = _kernels.bump(s) * _kernels.bump((nu * t - cx) / rx)
            out[b] -= np.sum(psi) * (2.0 * rt / n) * res[k]
    return out * tests.x1_factors()[:, None]


def energy_density(z, gamma=2.0):
    """E = rho|u|^2/2 + rho^gamma/(gamma-1), recovered from q = rho^gamma + rho|u|^2/2."""
    z = np.asarray(z, dtype=float)
    p = z[..., RHO] ** gamma
    return z[..., Q] - p + p / (gamma - 1.0)


def energy_flux_x2(z, gamma=2.0):
    """(E + p) u2 with u2 = m2 / rho (zero at vacuum)."""
    z = np.asarray(z, dtype=float)
    rho = z[..., RHO]
    u2 = np.divide(z[..., M2], rho, out=np.zeros_like(rho), where=rho > 0)
    return (energy_density(z, gamma) + rho ** gamma) * u2


def entropy_jump_residual(fan, C1=None, gamma=2.0):
    """Per-interface slack nu [E] - [(E + p) u2]; nonnegative means admissible.

    ``C1`` replaces the kinetic level of the middle state when given.
    """
    Z = fan.stacked().copy()
    if C1 is not None:
        r = Z[1, RHO]
        Z[1, Q] = r ** gamma + r * C1 / 2.0
    E = energy_density(Z, gamma)
    F = energy_flux_x2(Z, gamma)
    out = np.empty(2)
    for k, nu in enumerate(fan.speeds):
        out[k] = nu * (E[k + 1] - E[k]) - (F[k + 1] - F[k])
    return out


@dataclass(frozen=True)
class Verdict:
    passed: bool
    checks: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed


def verify_subsolution(f, tol=EQUALITY_TOL):
    """Compose jump, strict-inequality and entropy checks for a fan subsolution.

    Tolerances are relative to the magnitudes of the terms in each relation,
    matching ``check_conditions``.
    """
    fan = PiecewiseFan.from_subsolution(f)
    report = check_conditions(f, tol=tol)
    rh = rh_residual(fan).reshape(-1)
    entropy = entropy_jump_residual(fan)
    eq_scales = np.asarray(report.equality_scales)
    in_scales = np.asarray(report.inequality_scales)
    m = report.inequalities
    checks = {
        "rh_residual": bool(np.all(np.abs(rh) <= tol * (1.0 + eq_scales))),
        "kinetic_strict": m[0] > STRICT_TOL * (1.0 + in_scales[0]),
        "definiteness_strict": m[1] > STRICT_TOL * (1.0 + in_scales[1]),
        "entropy_left": bool(entropy[0] >= -tol * (1.0 + in_scales[2])),
        "entropy_right": bool(entropy[1] >= -tol * (1.0 + in_scales[3])),
    }
    values = {
        "rh_residual": rh.tolist(),
        "kinetic_margin": m[0],
        "definiteness_margin": m[1],
        "entropy_margins": entropy.tolist(),
    }
    return Verdict(all(checks.values()), checks, values)

"""Two-atom Young measures over fan-valued atoms and their moment fields.

An atom is either a constant ``State`` or a ``FanSubsolution``. On the outer
sectors a fan atom is the lift of the shock state. On the middle sector only
the relaxed data z1 are known: density rho1 and speed |u| = sqrt(C1), with
the direction of u free. Moments there are computed from z1, and the
selection test treats the middle sector as the whole circle |u|^2 = C1.

The energy flux in the admissibility test is taken atom by atom, as the
lambda-weighted sum of each atom's (E + p) u.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import bump, dbump
from .errors import DomainError
from .fan_construction import SHOCK, FanSubsolution
from .lifted_algebra import M1, M2, Q, RHO, U11, U12, State, lift, wave_cone_connected
from .weak_verification import (PiecewiseFan, balance_fluxes, energy_density,
                                energy_flux_x2, sector_integrals)

FLUX_CONVENTION = "atomwise"
DEFAULT_THETA = 0.01
NOT_GENERABLE = "NOT_GENERABLE"
INCONCLUSIVE = "INCONCLUSIVE"


def _check_lambda(lam):
    lam = float(lam)
    if not (0.0 < lam < 1.0):
        raise DomainError(f"lambda={lam!r} must lie strictly between 0 and 1")
    return lam


@dataclass(frozen=True)
class TwoAtomYM:
    lam: float
    atom_a: object
    atom_b: object
    gamma: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "lam", _check_lambda(self.lam))
        if not self.gamma > 1.0:
            raise DomainError(f"gamma must exceed 1, got {self.gamma}")
        for atom in (self.atom_a, self.atom_b):
            if not isinstance(atom, (State, FanSubsolution)):
                raise DomainError(f"unsupported atom type {type(atom).__name__}")

    @property
    def weights(self):
        return (self.lam, 1.0 - self.lam)

    @property
    def atoms(self):
        return (self.atom_a, self.atom_b)


@dataclass(frozen=True)
class ConcentrationPart:
    """Cellwise-constant weight m on a (t, x2) grid with sphere atoms.

    Each atom is (beta1, beta_x, beta_y) on beta1^(2 gamma) + |beta'|^4 = 1,
    beta1 >= 0, with probabilities summing to one.
    """

    t_edges: np.ndarray
    x2_edges: np.ndarray
    weights: np.ndarray
    atoms: np.ndarray
    probabilities: np.ndarray
    gamma: float = 2.0

    def __post_init__(self):
        te = np.asarray(self.t_edges, dtype=float)
        xe = np.asarray(self.x2_edges, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        a = np.asarray(self.atoms, dtype=float).reshape(-1, 3)
        p = np.asarray(self.probabilities, dtype=float).reshape(-1)
        if w.shape != (te.size - 1, xe.size - 1):
            raise DomainError("weight grid does not match the cell edges")
        if np.any(w < 0):
            raise DomainError("concentration weight must be nonnegative")
        if len(a) != len(p) or (len(p) and abs(p.sum() - 1.0) > 1e-12) or np.any(p < 0):
            raise DomainError("sphere atom probabilities must be nonnegative and sum to 1")
        if np.any(a[:, 0] < 0):
            raise DomainError("sphere atoms need beta1 >= 0")
        sphere = a[:, 0] ** (2 * self.gamma) + np.sum(a[:, 1:] ** 2, axis=1) ** 2
        if np.any(np.abs(sphere - 1.0) > 1e-12):
            raise DomainError("sphere atoms violate beta1^(2 gamma) + |beta'|^4 = 1")
        for name, v in (("t_edges", te), ("x2_edges", xe), ("weights", w),
                        ("atoms", a), ("probabilities", p)):
            object.__setattr__(self, name, v)

    @classmethod
    def zero(cls, atoms=((1.0, 0.0, 0.0),), probabilities=(1.0,), gamma=2.0):
        return cls([0.0, 1.0], [-1.0, 1.0], [[0.0]], atoms, probabilities, gamma)

    def weight_at(self, t, x2):
        t = np.asarray(t, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        i = np.searchsorted(self.t_edges, t, side="right") - 1
        j = np.searchsorted(self.x2_edges, x2, side="right") - 1
        inside = (i >= 0) & (i < self.weights.shape[0]) & (j >= 0) & (j < self.weights.shape[1])
        out = np.zeros(np.broadcast(t, x2).shape)
        out[inside] = self.weights[i[inside], j[inside]]
        return out

    def second_moment(self):
        b = self.atoms[:, 1:]
        return np.einsum("k,ki,kj->ij", self.probabilities, b, b)

    def pressure_moment(self):
        return float(np.sum(self.probabilities * self.atoms[:, 0] ** self.gamma))


@dataclass(frozen=True)
class MomentFields:
    rho_bar: np.ndarray
    rho_u_bar: np.ndarray
    rho_uu_bar: np.ndarray
    p_rho_bar: np.ndarray
    rho_usq_bar: np.ndarray


def atom_values(atom, t, x2, gamma=2.0):
    """Lifted values of an atom at points (t, x2) and the sector index (-1, 0, 1)."""
    t = np.asarray(t, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    shape = np.broadcast(t, x2).shape
    if isinstance(atom, State):
        z = lift(atom, gamma).as_vector()
        return np.broadcast_to(z, shape + (8,)).copy(), np.full(shape, 2)
    fan = PiecewiseFan.from_subsolution(atom, gamma)
    idx = atom.partition.sector(t, x2)
    return fan.stacked()[idx + 1], idx


def moments_from_lifted(z, gamma=2.0):
    """Moment fields of a single atom with lifted value z, shape (..., 8)."""
    z = np.asarray(z, dtype=float)
    p = z[..., RHO] ** gamma
    kin = z[..., Q] - p  # rho |u|^2 / 2
    uu = np.empty(z.shape[:-1] + (2, 2))
    uu[..., 0, 0] = z[..., U11] + kin
    uu[..., 1, 1] = -z[..., U11] + kin
    uu[..., 0, 1] = uu[..., 1, 0] = z[..., U12]
    return MomentFields(z[..., RHO], z[..., M1:M2 + 1], uu, p, 2.0 * kin)


def moments(ym, at, conc=None):
    """Moment fields of ym (plus concentration) at points ``at`` = (t, x2) or (t, x1, x2)."""
    t, x2 = at[0], at[-1]
    parts = [moments_from_lifted(atom_values(a, t, x2, ym.gamma)[0], ym.gamma)
             for a in ym.atoms]
    la, lb = ym.weights
    mix = {name: la * getattr(parts[0], name) + lb * getattr(parts[1], name)
           for name in MomentFields.__dataclass_fields__}
    if conc is not None:
        m = conc.weight_at(t, x2)
        mix["rho_uu_bar"] = mix["rho_uu_bar"] + m[..., None, None] * conc.second_moment()
        mix["p_rho_bar"] = mix["p_rho_bar"] + m * conc.pressure_moment()
    return MomentFields(**mix)


def _atom_fan_data(atom, gamma):
    """Speeds and per-sector lifted values of an atom, as a fan."""
    if isinstance(atom, State):
        z = lift(atom, gamma).as_vector()
        return np.array([0.0]), np.stack([z, z])
    fan = PiecewiseFan.from_subsolution(atom, gamma)
    return fan.speeds, fan.stacked()


def _concentration_integrals(conc, tests, n=128):
    """Weak integrals of the concentration flux (x2 column of momentum rows)."""
    S = conc.second_moment()
    pm = conc.pressure_moment()
    out = np.zeros((len(tests), 3))
    s = (np.arange(n) + 0.5) / n * 2.0 - 1.0
    for b, ((ct, _, cx), (rt, _, rx)) in enumerate(zip(tests.centers, tests.radii)):
        T, X = np.meshgrid(ct + rt * s, cx + rx * s, indexing="ij")
        psi_x = np.outer(bump(s), dbump(s) / rx)
        m = conc.weight_at(T, X)
        integral = np.sum(psi_x * m) * (2.0 * rt / n) * (2.0 * rx / n)
        out[b, 1] = integral * S[0, 1]
        out[b, 2] = integral * (S[1, 1] + pm)
    return out * tests.x1_factors()[:, None]


def mvs_weak_integrals(ym, tests, conc=None):
    """(B, 3) weak integrals of the mass and momentum moment equations."""
    la, lb = ym.weights
    out = 0.0
    for w, atom in zip((la, lb), ym.atoms):
        speeds, Z = _atom_fan_data(atom, ym.gamma)
        out = out + w * sector_integrals(speeds, balance_fluxes(Z), tests)
    if conc is not None:
        out = out + _concentration_integrals(conc, tests)
    return out


def mvs_residual(ym, tests, conc=None):
    """Largest Euclidean norm over tests of the moment-equation weak integrals."""
    if len(tests) == 0:
        return 0.0
    return float(np.max(np.linalg.norm(mvs_weak_integrals(ym, tests, conc), axis=1)))


def energy_weak_integrals(ym, tests, conc=None):
    """(B,) values of int d_t psi E_bar + d_x2 psi F_bar; nonnegative when admissible."""
    la, lb = ym.weights
    out = 0.0
    for w, atom in zip((la, lb), ym.atoms):
        speeds, Z = _atom_fan_data(atom, ym.gamma)
        vals = np.stack([energy_density(Z, ym.gamma), energy_flux_x2(Z, ym.gamma)], axis=-1)
        out = out + w * sector_integrals(speeds, vals[:, None, :], tests)[:, 0]
    if conc is not None:
        # concentration adds to the energy density only
        S = conc.second_moment()
        extra = 0.5 * np.trace(S) + conc.pressure_moment() / (ym.gamma - 1.0)
        n = 128
        s = (np.arange(n) + 0.5) / n * 2.0 - 1.0
        vals = np.zeros(len(tests))
        for b, ((ct, _, cx), (rt, _, rx)) in enumerate(zip(tests.centers, tests.radii)):
            T, X = np.meshgrid(ct + rt * s, cx + rx * s, indexing="ij")
            psi_t = np.outer(dbump(s) / rt, bump(s))
            vals[b] = np.sum(psi_t * conc.weight_at(T, X)) * (2.0 * rt / n) * (2.0 * rx / n)
        out = out + extra * vals * tests.x1_factors()
    return out


def admissibility_residual(ym, tests, conc=None):
    """Most positive value of -(weak energy integral) over the nonnegative tests.

    A value <= tolerance means the averaged energy inequality holds on the set.
    """
    if len(tests) == 0:
        return 0.0
    return float(np.max(-energy_weak_integrals(ym, tests, conc)))


@dataclass(frozen=True)
class RegionGrid:
    """Points (k h, j h) of the lattice with spacing h inside a (t, x2) box.

    Anchoring the lattice at the origin makes a larger box sample a superset
    of the points of a smaller one.
    """

    t_min: float
    t_max: float
    x2_min: float
    x2_max: float
    spacing: float = 0.01

    def __post_init__(self):
        if not (self.spacing > 0 and self.t_min <= self.t_max and self.x2_min <= self.x2_max):
            raise DomainError("region grid needs positive spacing and ordered bounds")
        if self.t_min < 0:
            raise DomainError("region grid must lie in t >= 0")

    def axes(self):
        h = self.spacing
        kt = np.arange(math.ceil(self.t_min / h - 1e-9), math.floor(self.t_max / h + 1e-9) + 1)
        kx = np.arange(math.ceil(self.x2_min / h - 1e-9), math.floor(self.x2_max / h + 1e-9) + 1)
        t = kt * h
        return t[t > 0], kx * h

    def points(self):
        t, x = self.axes()
        return np.meshgrid(t, x, indexing="ij")

    @classmethod
    def wedge_box(cls, nu_lo, nu_hi, t_max=1.0, spacing=0.01):
        return cls(0.0, t_max, min(nu_lo * t_max, 0.0), max(nu_hi * t_max, 0.0), spacing)


def _sector_descriptor(atom, idx, gamma):
    """('exact', State) on outer sectors and State atoms, ('sphere', rho1, C1) in P1."""
    if isinstance(atom, State):
        return ("exact", atom)
    if idx < 0:
        return ("exact", SHOCK.minus)
    if idx > 0:
        return ("exact", SHOCK.plus)
    return ("sphere", atom.rho1, atom.C1)


def _speed(desc):
    if desc[0] == "sphere":
        return math.sqrt(max(desc[2], 0.0))
    return math.hypot(*desc[1].u)


def pair_is_witness(desc_a, desc_b, gamma=2.0):
    """True when every pair of values the atoms can take is non-connected with
    nonzero difference.

    For sphere sectors only |u| is known; for p = rho^2 the difference is
    rank deficient iff rho = rho~ or |u - u~|^2 = (rho + rho~)(rho - rho~)^2/(rho rho~),
    so a witness needs that value outside the attainable range of |u - u~|^2.
    """
    if desc_a[0] == "exact" and desc_b[0] == "exact":
        c = wave_cone_connected(desc_a[1], desc_b[1], gamma)
        return (not c.connected) and not c.difference_zero
    if gamma != 2.0:
        return False
    r = desc_a[1].rho if desc_a[0] == "exact" else desc_a[1]
    rt = desc_b[1].rho if desc_b[0] == "exact" else desc_b[1]
    if r <= 0 or rt <= 0 or r == rt:
        return False
    a, b = _speed(desc_a), _speed(desc_b)
    # |u - u~| sweeps [|a - b|, a + b] whether one or both speeds are free
    lo, hi = (a - b) ** 2, (a + b) ** 2
    critical = (r + rt) * (r - rt) ** 2 / (r * rt)
    return not (lo <= critical <= hi)


@dataclass(frozen=True)
class SelectionVerdict:
    outcome: str
    witness_fraction: float
    witness_area: float
    witness_points: int
    sampled_points: int
    theta: float
    witness_box: tuple = None
    details: dict = field(default_factory=dict)

    @property
    def not_generable(self):
        return self.outcome == NOT_GENERABLE


def selection_verdict(ym, region, theta=DEFAULT_THETA):
    """Decide whether the atoms' lifts fail to be wave-cone connected on a set of
    positive measure inside ``region``.

    Positive measure is judged by the area covered by witness lattice points,
    count * h^2 > theta, which can only grow when the region is enlarged.
    """
    _check_lambda(ym.lam)
    if not theta > 0:
        raise DomainError("theta must be positive")
    T, X = region.points()
    n = T.size
    if n == 0:
        return SelectionVerdict(INCONCLUSIVE, 0.0, 0.0, 0, 0, theta)
    idx = []
    for atom in ym.atoms:
        if isinstance(atom, State):
            idx.append(np.full(T.shape, 2))
        else:
            idx.append(atom.partition.sector(T, X))
    witness = np.zeros(T.shape, dtype=bool)
    combos = {}
    for ia in np.unique(idx[0]):
        for ib in np.unique(idx[1]):
            mask = (idx[0] == ia) & (idx[1] == ib)
            if not mask.any():
                continue
            hit = pair_is_witness(_sector_descriptor(ym.atom_a, ia, ym.gamma),
                                  _sector_descriptor(ym.atom_b, ib, ym.gamma), ym.gamma)
            combos[f"{int(ia)},{int(ib)}"] = {"points": int(mask.sum()), "witness": bool(hit)}
            if hit:
                witness |= mask
    count = int(witness.sum())
    area = count * region.spacing ** 2
    box = None
    if count:
        box = (float(T[witness].min()), float(T[witness].max()),
               float(X[witness].min()), float(X[witness].max()))
    outcome = NOT_GENERABLE if area > theta else INCONCLUSIVE
    return SelectionVerdict(outcome, count / n, area, count, n, theta, box,
                            {"sector_pairs": combos})

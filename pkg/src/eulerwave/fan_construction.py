"""Fan subsolutions for the shock (rho-, u-) = (1, (-1/4, 2 sqrt 2)),
(rho+, u+) = (4, (-1/4, 0)) with pressure p(rho) = rho^2.

A fan subsolution is piecewise constant on the sectors
P- = {x2 < nu- t}, P1 = {nu- t < x2 < nu+ t}, P+ = {x2 > nu+ t}. The outer
sectors carry the shock states; P1 carries (rho1, u1 = (alpha, beta),
w1 = [[gamma, delta], [delta, -gamma]]) with kinetic level C1.

Two forms of the first admissibility inequality are available. The default
``printed=False`` uses the energy jump of rho-|u-|^2/2 = (1/16 + 8)/2 across
the left interface; ``printed=True`` evaluates the form with (1/16 + 8)^2 in
place of (1/16 + 8).
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError, RangeError
from .lifted_algebra import State

SQRT2 = math.sqrt(2.0)
ETA_MIN = -2.0 * SQRT2 / 3.0

BASELINE_NU_MINUS = -7.0 / (2.0 * SQRT2)
BASELINE_RHO1 = 15.0 / 7.0
BASELINE_C1_LOW = 9049.0 / 1680.0
BASELINE_C1_HIGH_PRINTED_INTERVAL = 11273.0 / 1680.0

EQUALITY_LABELS = (
    "mass_left", "momentum1_left", "momentum2_left",
    "mass_right", "momentum1_right", "momentum2_right",
)
INEQUALITY_LABELS = (
    "kinetic_strict", "definiteness_strict",
    "admissible_left", "admissible_right",
)
LABELS = EQUALITY_LABELS + INEQUALITY_LABELS

EQUALITY_TOL = 1e-10
# strict inequalities must clear this relative floor, so that exact
# boundary values such as C1 = 9049/1680 do not pass on rounding noise
STRICT_TOL = 1e-12


@dataclass(frozen=True)
class ShockDatum:
    rho_minus: float = 1.0
    rho_plus: float = 4.0
    u_minus: tuple = (-0.25, 2.0 * SQRT2)
    u_plus: tuple = (-0.25, 0.0)

    @property
    def minus(self):
        return State(self.rho_minus, self.u_minus)

    @property
    def plus(self):
        return State(self.rho_plus, self.u_plus)


SHOCK = ShockDatum()


@dataclass(frozen=True)
class FanPartition:
    """Sectors of {t > 0} cut by x2 = nu_minus t and x2 = nu_plus t."""

    nu_minus: float
    nu_plus: float

    def sector(self, t, x2):
        """-1 on P-, 0 on P1, +1 on P+ (interfaces count as P1)."""
        t = np.asarray(t, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        out = np.zeros(np.broadcast(t, x2).shape, dtype=int)
        out[x2 < self.nu_minus * t] = -1
        out[x2 > self.nu_plus * t] = 1
        return out

    def contains(self, t, x2):
        t = np.asarray(t, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        return (t > 0) & (self.nu_minus * t < x2) & (x2 < self.nu_plus * t)


@dataclass(frozen=True)
class FanSubsolution:
    nu_minus: float
    nu_plus: float
    rho1: float
    alpha: float
    beta: float
    gamma: float
    delta: float
    C1: float

    FIELDS = ("nu_minus", "nu_plus", "rho1", "alpha", "beta", "gamma", "delta", "C1")

    def as_array(self):
        return np.array([getattr(self, k) for k in self.FIELDS], dtype=float)

    @classmethod
    def from_array(cls, p):
        return cls(*(float(v) for v in p))

    def to_dict(self):
        return asdict(self)

    @property
    def partition(self):
        return FanPartition(self.nu_minus, self.nu_plus)

    @property
    def u1(self):
        return np.array([self.alpha, self.beta])

    @property
    def w1(self):
        return np.array([[self.gamma, self.delta], [self.delta, -self.gamma]])


@dataclass(frozen=True)
class ConditionReport:
    """Residuals of the six equalities and margins of the four inequalities."""

    equalities: tuple
    inequalities: tuple
    equality_scales: tuple
    inequality_scales: tuple
    tol: float = EQUALITY_TOL
    printed: bool = False
    labels: tuple = field(default=LABELS)

    def _checks(self):
        ok = [abs(r) <= self.tol * (1.0 + s)
              for r, s in zip(self.equalities, self.equality_scales)]
        m, s = self.inequalities, self.inequality_scales
        ok.append(m[0] > STRICT_TOL * (1.0 + s[0]))
        ok.append(m[1] > STRICT_TOL * (1.0 + s[1]))
        ok.append(m[2] >= -self.tol * (1.0 + s[2]))
        ok.append(m[3] >= -self.tol * (1.0 + s[3]))
        return ok

    @property
    def passed(self):
        return dict(zip(self.labels, self._checks()))

    @property
    def overall(self):
        return all(self._checks())

    @property
    def failures(self):
        return tuple(k for k, ok in self.passed.items() if not ok)

    def values(self):
        return dict(zip(self.labels, self.equalities + self.inequalities))

    def __bool__(self):
        return self.overall


def _report_from_row(row, tol, printed):
    row = [float(v) for v in row]
    return ConditionReport(
        equalities=tuple(row[0:6]),
        inequalities=tuple(row[6:10]),
        equality_scales=tuple(row[10:16]),
        inequality_scales=tuple(row[16:20]),
        tol=tol,
        printed=printed,
    )


def check_conditions(f, tol=EQUALITY_TOL, printed=False):
    """Evaluate the ten relations characterising an admissible fan subsolution."""
    p = f.as_array()
    if not np.all(np.isfinite(p)):
        raise DomainError("fan parameters must be finite")
    row = _kernels.fan_conditions(p, printed)[0]
    return _report_from_row(row, tol, printed)


def reports_batch(params, tol=EQUALITY_TOL, printed=False, exact_inequalities=False):
    """Pass/fail mask for an (M, 8) parameter array.

    With ``exact_inequalities`` the four inequalities are tested on the bare
    sign of their margins; this locates interval endpoints without the
    tolerance band shifting them.
    """
    out = _kernels.fan_conditions(params, printed)
    res, scales = out[:, :10], out[:, 10:]
    strict = 0.0 if exact_inequalities else STRICT_TOL
    slack = 0.0 if exact_inequalities else tol
    ok = np.all(np.abs(res[:, :6]) <= tol * (1.0 + scales[:, :6]), axis=1)
    ok &= res[:, 6] > strict * (1.0 + scales[:, 6])
    ok &= res[:, 7] > strict * (1.0 + scales[:, 7])
    ok &= res[:, 8] >= -slack * (1.0 + scales[:, 8])
    ok &= res[:, 9] >= -slack * (1.0 + scales[:, 9])
    return ok


def _baseline_params(C1):
    return np.array([BASELINE_NU_MINUS, 0.0, BASELINE_RHO1, -0.25, 0.0,
                     C1 / 2.0 - 559.0 / 105.0, 0.0, C1])


def _perturbed_params(eta, C1t):
    eta = np.asarray(eta, dtype=float)
    C1t = np.asarray(C1t, dtype=float)
    eta, C1t = np.broadcast_arrays(eta, C1t)
    rho1 = (15.0 + 16.0 * SQRT2 * eta + 12.0 * eta ** 2) / (7.0 + 4.0 * SQRT2 * eta + 3.0 * eta ** 2)
    beta = eta * (rho1 - 4.0) / rho1
    delta = -beta / 4.0
    nu_minus = -(14.0 * SQRT2 + 29.0 * eta + 6.0 * SQRT2 * eta ** 2) / (3.0 * eta + 2.0 * SQRT2) ** 2
    gamma = rho1 - 16.0 / rho1 + C1t / 2.0 - eta * beta
    alpha = np.full_like(eta, -0.25)
    return np.stack([nu_minus, eta, rho1, alpha, beta, gamma, delta, C1t], axis=-1)


def _require(f, what, printed):
    rep = check_conditions(f, printed=printed)
    if not rep.overall:
        raise RangeError(f"{what} violates {', '.join(rep.failures)}", rep.failures)
    return f


def baseline_family(C1, printed=False):
    """beta = delta = nu+ = 0, alpha = -1/4, nu- = -7/(2 sqrt 2), rho1 = 15/7."""
    C1 = float(C1)
    if not math.isfinite(C1):
        raise DomainError("C1 must be finite")
    f = FanSubsolution.from_array(_baseline_params(C1))
    return _require(f, f"baseline fan with C1={C1!r}", printed)


def _check_eta(eta):
    eta = float(eta)
    if not (ETA_MIN < eta < 0.0):
        raise DomainError(f"eta={eta!r} outside (-2 sqrt 2/3, 0)")
    return eta


def perturbed_family(eta, C1t, printed=False):
    """The eta-perturbed fan with alpha = -1/4 and nu+ = eta."""
    eta = _check_eta(eta)
    f = FanSubsolution.from_array(_perturbed_params(eta, float(C1t)))
    return _require(f, f"perturbed fan with eta={eta!r}, C1={C1t!r}", printed)


def family_fan(eta, C1):
    """Unchecked member of the family; eta = 0 gives the baseline fan."""
    return FanSubsolution.from_array(_perturbed_params(float(eta), float(C1)))


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_open: bool = True
    hi_open: bool = False
    lo_binding: str = ""
    hi_binding: str = ""

    @property
    def empty(self):
        return not (self.lo <= self.hi)

    def __contains__(self, c):
        if self.empty:
            return False
        above = c > self.lo if self.lo_open else c >= self.lo
        below = c < self.hi if self.hi_open else c <= self.hi
        return above and below

    def __str__(self):
        if self.empty:
            return "(empty)"
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo!r}, {self.hi!r}{right}"


EMPTY_INTERVAL = Interval(math.inf, -math.inf)


def _bisect(pred, a, b, tol):
    # pred(a) != pred(b); returns the crossing point to within tol
    pa = pred(a)
    while b - a > tol:
        mid = 0.5 * (a + b)
        if mid in (a, b):
            break
        if pred(mid) == pa:
            a = mid
        else:
            b = mid
    return a, b


def admissible_c1_interval(eta, c_range=(0.0, 100.0), scan_points=512,
                           tol=0.0, printed=False):
    """The set of C1 for which the family fan at ``eta`` passes all checks.

    A ``scan_points`` scan over ``c_range`` locates the feasible run, and each
    end is refined by bisection on the feasibility predicate (to adjacent
    floats when ``tol`` is 0). The endpoint is open when the condition failing
    just outside it is one of the strict inequalities, closed when it is an
    admissibility inequality. Open endpoints report the last infeasible float
    and closed ones the last feasible float, so membership agrees with the
    checks.
    """
    eta = float(eta)
    if not (ETA_MIN < eta <= 0.0):
        raise DomainError(f"eta={eta!r} outside (-2 sqrt 2/3, 0]")

    def feasible(c):
        params = _perturbed_params(eta, c)
        return bool(reports_batch(params, printed=printed, exact_inequalities=True)[0])

    cs = np.linspace(c_range[0], c_range[1], scan_points)
    mask = reports_batch(_perturbed_params(np.full_like(cs, eta), cs), printed=printed)
    if not mask.any():
        return EMPTY_INTERVAL
    idx = np.flatnonzero(mask)
    i0, i1 = idx[0], idx[-1]

    def binding_at(c):
        # first inequality whose bare margin fails just outside the run
        m = _kernels.fan_conditions(_perturbed_params(eta, c), printed)[0, 6:10]
        for label, value, strict in zip(INEQUALITY_LABELS, m, (True, True, False, False)):
            if (value <= 0.0) if strict else (value < 0.0):
                return label, strict
        return "equalities", True

    def end(inside, outside):
        a, b = (outside, inside) if outside < inside else (inside, outside)
        a, b = _bisect(feasible, a, b, tol)
        probe, kept = (a, b) if outside < inside else (b, a)
        binding, is_open = binding_at(probe)
        return (probe if is_open else kept), is_open, binding

    if i0 == 0:
        lo, lo_open, lo_bind = cs[0], False, "scan_range"
    else:
        lo, lo_open, lo_bind = end(cs[i0], cs[i0 - 1])
    if i1 == len(cs) - 1:
        hi, hi_open, hi_bind = cs[-1], False, "scan_range"
    else:
        hi, hi_open, hi_bind = end(cs[i1], cs[i1 + 1])
    return Interval(float(lo), float(hi), lo_open, hi_open, lo_bind, hi_bind)


@dataclass(frozen=True)
class Separation:
    holds: bool
    margin: float
    lhs: float
    rhs: float

    def __bool__(self):
        return self.holds


def separation_holds(f, g):
    """sqrt((r + r~)(r - r~)^2 / (r r~)) < |sqrt C1 - sqrt C1~| for the P1 densities."""
    r, rt = f.rho1, g.rho1
    lhs = math.sqrt((r + rt) * (r - rt) ** 2 / (r * rt))
    rhs = abs(math.sqrt(f.C1) - math.sqrt(g.C1))
    return Separation(lhs < rhs, rhs - lhs, lhs, rhs)


def overlap_wedge(f, g):
    """Intersection of the two middle sectors, or None if it is empty."""
    lo = max(f.nu_minus, g.nu_minus)
    hi = min(f.nu_plus, g.nu_plus)
    if lo < hi:
        return FanPartition(lo, hi)
    return None


@dataclass(frozen=True)
class PairResult:
    eta: float
    C1: float
    C1_tilde: float
    baseline: FanSubsolution
    perturbed: FanSubsolution
    separation_margin: float
    wedge: FanPartition
    index: tuple

    def row(self):
        return (self.eta, self.C1, self.C1_tilde, self.separation_margin,
                self.wedge.nu_minus, self.wedge.nu_plus)


def _worker_count():
    try:
        return max(1, int(os.environ.get("EULERWAVE_THREADS", "1")))
    except ValueError:
        return 1


def search_pairs(eta_grid, c1_grid, c1t_grid=None, floor=0.0, printed=False,
                 workers=None):
    """All (baseline(C1), perturbed(eta, C1~)) grid pairs that pass every check,
    separate with margin >= ``floor`` and share a nonempty wedge.

    Results are ordered lexicographically by (eta, C1, C1~) grid index.
    """
    eta_grid = np.asarray(list(eta_grid), dtype=float)
    c1_grid = np.asarray(list(c1_grid), dtype=float)
    c1t_grid = c1_grid if c1t_grid is None else np.asarray(list(c1t_grid), dtype=float)
    if not (eta_grid.size and c1_grid.size and c1t_grid.size):
        return []

    base = np.stack([_baseline_params(c) for c in c1_grid])
    base_ok = reports_batch(base, printed=printed)

    def per_eta(i):
        eta = eta_grid[i]
        if not (ETA_MIN < eta < 0.0):
            return []
        pert = _perturbed_params(np.full_like(c1t_grid, eta), c1t_grid)
        pert_ok = reports_batch(pert, printed=printed)
        found = []
        for j in np.flatnonzero(base_ok):
            f = FanSubsolution.from_array(base[j])
            for k in np.flatnonzero(pert_ok):
                g = FanSubsolution.from_array(pert[k])
                sep = separation_holds(f, g)
                if not sep.holds or sep.margin < floor:
                    continue
                wedge = overlap_wedge(f, g)
                if wedge is None:
                    continue
                found.append(PairResult(float(eta), float(c1_grid[j]), float(c1t_grid[k]),
                                        f, g, sep.margin, wedge, (i, int(j), int(k))))
        return found

    n = workers or _worker_count()
    if n > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            chunks = list(pool.map(per_eta, range(eta_grid.size)))
    else:
        chunks = [per_eta(i) for i in range(eta_grid.size)]
    return [r for chunk in chunks for r in chunk]

"""High-precision reference computations, independent of the package kernels.

Fan relations are rebuilt here from first principles: lift the outer
states, form the relaxed jump conditions across each interface, and take
the energy inequality nu [E] - [(E + p) u2] >= 0.
"""

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 50

FROZEN_PATH = Path(__file__).with_name("frozen_values.json")

SQ2 = mp.sqrt(2)
RHO_MINUS, U_MINUS = mp.mpf(1), (mp.mpf(-1) / 4, 2 * SQ2)
RHO_PLUS, U_PLUS = mp.mpf(4), (mp.mpf(-1) / 4, mp.mpf(0))


def perturbed(eta, C):
    eta, C = mp.mpf(eta), mp.mpf(C)
    rho1 = (15 + 16 * SQ2 * eta + 12 * eta ** 2) / (7 + 4 * SQ2 * eta + 3 * eta ** 2)
    beta = eta * (rho1 - 4) / rho1
    return {
        "nu_minus": -(14 * SQ2 + 29 * eta + 6 * SQ2 * eta ** 2) / (3 * eta + 2 * SQ2) ** 2,
        "nu_plus": eta,
        "rho1": rho1,
        "alpha": mp.mpf(-1) / 4,
        "beta": beta,
        "gamma": rho1 - 16 / rho1 + C / 2 - eta * beta,
        "delta": -beta / 4,
        "C1": C,
    }


def baseline(C):
    C = mp.mpf(C)
    return {"nu_minus": -7 / (2 * SQ2), "nu_plus": mp.mpf(0), "rho1": mp.mpf(15) / 7,
            "alpha": mp.mpf(-1) / 4, "beta": mp.mpf(0),
            "gamma": C / 2 - mp.mpf(559) / 105, "delta": mp.mpf(0), "C1": C}


def _outer(rho, u):
    # (rho, m, U11, U12, q) for p = rho^2
    m = (rho * u[0], rho * u[1])
    U11 = rho * (u[0] ** 2 - u[1] ** 2) / 2
    U12 = rho * u[0] * u[1]
    q = rho ** 2 + rho * (u[0] ** 2 + u[1] ** 2) / 2
    return (rho, m, U11, U12, q)


def _middle(f):
    r = f["rho1"]
    return (r, (r * f["alpha"], r * f["beta"]), r * f["gamma"], r * f["delta"],
            r ** 2 + r * f["C1"] / 2)


def _balance(z):
    rho, m, U11, U12, q = z
    return [(rho, m[1]), (m[0], U12), (m[1], -U11 + q)]


def _energy(z):
    rho, m, _, _, q = z
    return q, (q + rho ** 2) * m[1] / rho


def relations(f):
    """Ten values: six jump residuals, then kinetic, definiteness and the two
    energy margins."""
    zm, z1, zp = _outer(RHO_MINUS, U_MINUS), _middle(f), _outer(RHO_PLUS, U_PLUS)
    out = []
    for nu, (zl, zr) in ((f["nu_minus"], (zm, z1)), (f["nu_plus"], (z1, zp))):
        for (dl, fl), (dr, fr) in zip(_balance(zl), _balance(zr)):
            out.append(-nu * (dr - dl) + (fr - fl))
    a, b, g, d, C = f["alpha"], f["beta"], f["gamma"], f["delta"], f["C1"]
    out.append(C - a ** 2 - b ** 2)
    out.append((C / 2 - a ** 2 + g) * (C / 2 - b ** 2 - g) - (d - a * b) ** 2)
    for nu, (zl, zr) in ((f["nu_minus"], (zm, z1)), (f["nu_plus"], (z1, zp))):
        (El, Fl), (Er, Fr) = _energy(zl), _energy(zr)
        out.append(nu * (Er - El) - (Fr - Fl))
    return out


def baseline_upper_endpoint():
    """Root in C of the left energy margin of the baseline fan (linear in C)."""
    return mp.findroot(lambda c: relations(baseline(c))[8], mp.mpf(6.8))


def baseline_lower_endpoint():
    return mp.findroot(lambda c: relations(baseline(c))[7], mp.mpf(5.4))


def separation(f, g):
    r, rt = f["rho1"], g["rho1"]
    lhs = mp.sqrt((r + rt) * (r - rt) ** 2 / (r * rt))
    rhs = abs(mp.sqrt(f["C1"]) - mp.sqrt(g["C1"]))
    return lhs, rhs


def compute_frozen():
    witness = perturbed(mp.mpf("-0.001"), mp.mpf("5.8"))
    base = baseline(6)
    lhs, rhs = separation(base, witness)
    return {
        "perturbed_witness": {k: float(v) for k, v in witness.items()},
        "baseline_6": {k: float(v) for k, v in base.items()},
        "baseline_6_relations": [float(v) for v in relations(base)],
        "perturbed_witness_relations": [float(v) for v in relations(witness)],
        "separation_lhs": float(lhs),
        "separation_rhs": float(rhs),
        "baseline_interval_lo": float(baseline_lower_endpoint()),
        "baseline_interval_hi": float(baseline_upper_endpoint()),
    }


def frozen():
    return json.loads(FROZEN_PATH.read_text())


if __name__ == "__main__":
    FROZEN_PATH.write_text(json.dumps(compute_frozen(), indent=2) + "\n")

"""Formulas of the G1-G13 suite and three engineering design problems.

Maximization problems (G2, G3, G8) are stated as minimization. Constraints
are ``c(x) <= 0``; equality constraints ``h(x) = 0`` are returned separately
and relaxed by the registry to ``|h(x)| - 1e-4 <= 0``.

Each builder returns ``(objective, inequalities, equalities, lower, upper)``.
The ``OPTIMA`` table holds published optimal solution vectors used to
cross-check the coded formulas.
"""
from __future__ import annotations

import math

import numpy as np


def g1():
    def f(x):
        return 5 * np.sum(x[:4]) - 5 * np.sum(x[:4] ** 2) - np.sum(x[4:13])

    ineq = [
        lambda x: 2 * x[0] + 2 * x[1] + x[9] + x[10] - 10,
        lambda x: 2 * x[0] + 2 * x[2] + x[9] + x[11] - 10,
        lambda x: 2 * x[1] + 2 * x[2] + x[10] + x[11] - 10,
        lambda x: -8 * x[0] + x[9],
        lambda x: -8 * x[1] + x[10],
        lambda x: -8 * x[2] + x[11],
        lambda x: -2 * x[3] - x[4] + x[9],
        lambda x: -2 * x[5] - x[6] + x[10],
        lambda x: -2 * x[7] - x[8] + x[11],
    ]
    upper = np.array([1.0] * 9 + [100.0] * 3 + [1.0])
    return f, ineq, [], np.zeros(13), upper


def g2(n=20):
    idx = np.arange(1, n + 1)

    def f(x):
        c = np.cos(x)
        den = math.sqrt(float(np.sum(idx * x ** 2)))
        if den == 0.0:
            return 0.0
        return -abs(float(np.sum(c ** 4) - 2 * np.prod(c ** 2))) / den

    ineq = [lambda x: 0.75 - np.prod(x), lambda x: np.sum(x) - 7.5 * n]
    return f, ineq, [], np.zeros(n), np.full(n, 10.0)


def g3(n=20):
    scale = math.sqrt(n) ** n

    def f(x):
        return -scale * np.prod(x)

    return f, [], [lambda x: np.sum(x ** 2) - 1.0], np.zeros(n), np.ones(n)


def g4():
    def f(x):
        return 5.3578547 * x[2] ** 2 + 0.8356891 * x[0] * x[4] + 37.293239 * x[0] - 40792.141

    def u(x):
        return 85.334407 + 0.0056858 * x[1] * x[4] + 0.0006262 * x[0] * x[3] - 0.0022053 * x[2] * x[4]

    def v(x):
        return 80.51249 + 0.0071317 * x[1] * x[4] + 0.0029955 * x[0] * x[1] + 0.0021813 * x[2] ** 2

    def w(x):
        return 9.300961 + 0.0047026 * x[2] * x[4] + 0.0012547 * x[0] * x[2] + 0.0019085 * x[2] * x[3]

    ineq = [lambda x: u(x) - 92, lambda x: -u(x),
            lambda x: v(x) - 110, lambda x: 90 - v(x),
            lambda x: w(x) - 25, lambda x: 20 - w(x)]
    return f, ineq, [], np.array([78.0, 33, 27, 27, 27]), np.array([102.0, 45, 45, 45, 45])


def g5():
    def f(x):
        return 3 * x[0] + 1e-6 * x[0] ** 3 + 2 * x[1] + (2e-6 / 3) * x[1] ** 3

    ineq = [lambda x: -x[3] + x[2] - 0.55, lambda x: -x[2] + x[3] - 0.55]
    eq = [
        lambda x: 1000 * math.sin(-x[2] - 0.25) + 1000 * math.sin(-x[3] - 0.25) + 894.8 - x[0],
        lambda x: 1000 * math.sin(x[2] - 0.25) + 1000 * math.sin(x[2] - x[3] - 0.25) + 894.8 - x[1],
        lambda x: 1000 * math.sin(x[3] - 0.25) + 1000 * math.sin(x[3] - x[2] - 0.25) + 1294.8,
    ]
    return f, ineq, eq, np.array([0.0, 0, -0.55, -0.55]), np.array([1200.0, 1200, 0.55, 0.55])


def g6():
    def f(x):
        return (x[0] - 10) ** 3 + (x[1] - 20) ** 3

    ineq = [lambda x: -(x[0] - 5) ** 2 - (x[1] - 5) ** 2 + 100,
            lambda x: (x[0] - 6) ** 2 + (x[1] - 5) ** 2 - 82.81]
    return f, ineq, [], np.array([13.0, 0.0]), np.array([100.0, 100.0])


def g7():
    def f(x):
        return (x[0] ** 2 + x[1] ** 2 + x[0] * x[1] - 14 * x[0] - 16 * x[1]
                + (x[2] - 10) ** 2 + 4 * (x[3] - 5) ** 2 + (x[4] - 3) ** 2
                + 2 * (x[5] - 1) ** 2 + 5 * x[6] ** 2 + 7 * (x[7] - 11) ** 2
                + 2 * (x[8] - 10) ** 2 + (x[9] - 7) ** 2 + 45)

    ineq = [
        lambda x: -105 + 4 * x[0] + 5 * x[1] - 3 * x[6] + 9 * x[7],
        lambda x: 10 * x[0] - 8 * x[1] - 17 * x[6] + 2 * x[7],
        lambda x: -8 * x[0] + 2 * x[1] + 5 * x[8] - 2 * x[9] - 12,
        lambda x: 3 * (x[0] - 2) ** 2 + 4 * (x[1] - 3) ** 2 + 2 * x[2] ** 2 - 7 * x[3] - 120,
        lambda x: 5 * x[0] ** 2 + 8 * x[1] + (x[2] - 6) ** 2 - 2 * x[3] - 40,
        lambda x: x[0] ** 2 + 2 * (x[1] - 2) ** 2 - 2 * x[0] * x[1] + 14 * x[4] - 6 * x[5],
        lambda x: 0.5 * (x[0] - 8) ** 2 + 2 * (x[1] - 4) ** 2 + 3 * x[4] ** 2 - x[5] - 30,
        lambda x: -3 * x[0] + 6 * x[1] + 12 * (x[8] - 8) ** 2 - 7 * x[9],
    ]
    return f, ineq, [], np.full(10, -10.0), np.full(10, 10.0)


def g8():
    two_pi = 2 * math.pi

    def f(x):
        # sin(2 pi x1)^3 / x1^3 written with sinc so x1 = 0 stays finite
        s = two_pi * np.sinc(2 * x[0])
        total = x[0] + x[1]
        if total == 0.0:
            return 0.0
        return -float(s ** 3 * math.sin(two_pi * x[1]) / total)

    ineq = [lambda x: x[0] ** 2 - x[1] + 1, lambda x: 1 - x[0] + (x[1] - 4) ** 2]
    return f, ineq, [], np.zeros(2), np.full(2, 10.0)


def g9():
    def f(x):
        return ((x[0] - 10) ** 2 + 5 * (x[1] - 12) ** 2 + x[2] ** 4 + 3 * (x[3] - 11) ** 2
                + 10 * x[4] ** 6 + 7 * x[5] ** 2 + x[6] ** 4 - 4 * x[5] * x[6]
                - 10 * x[5] - 8 * x[6])

    ineq = [
        lambda x: -127 + 2 * x[0] ** 2 + 3 * x[1] ** 4 + x[2] + 4 * x[3] ** 2 + 5 * x[4],
        lambda x: -282 + 7 * x[0] + 3 * x[1] + 10 * x[2] ** 2 + x[3] - x[4],
        lambda x: -196 + 23 * x[0] + x[1] ** 2 + 6 * x[5] ** 2 - 8 * x[6],
        lambda x: 4 * x[0] ** 2 + x[1] ** 2 - 3 * x[0] * x[1] + 2 * x[2] ** 2 + 5 * x[5] - 11 * x[6],
    ]
    return f, ineq, [], np.full(7, -10.0), np.full(7, 10.0)


def g10():
    def f(x):
        return x[0] + x[1] + x[2]

    ineq = [
        lambda x: -1 + 0.0025 * (x[3] + x[5]),
        lambda x: -1 + 0.0025 * (x[4] + x[6] - x[3]),
        lambda x: -1 + 0.01 * (x[7] - x[4]),
        lambda x: -x[0] * x[5] + 833.33252 * x[3] + 100 * x[0] - 83333.333,
        lambda x: -x[1] * x[6] + 1250 * x[4] + x[1] * x[3] - 1250 * x[3],
        lambda x: -x[2] * x[7] + 1250000 + x[2] * x[4] - 2500 * x[4],
    ]
    lower = np.array([100.0, 1000, 1000, 10, 10, 10, 10, 10])
    upper = np.array([10000.0, 10000, 10000, 1000, 1000, 1000, 1000, 1000])
    return f, ineq, [], lower, upper


def g11():
    def f(x):
        return x[0] ** 2 + (x[1] - 1) ** 2

    return f, [], [lambda x: x[1] - x[0] ** 2], np.full(2, -1.0), np.full(2, 1.0)


_G12_CENTERS = np.array([(p, q, r) for p in range(1, 10) for q in range(1, 10)
                         for r in range(1, 10)], dtype=float)


def g12():
    def f(x):
        return -(100 - (x[0] - 5) ** 2 - (x[1] - 5) ** 2 - (x[2] - 5) ** 2) / 100

    def inside_some_sphere(x):
        # feasible region is the union of 729 balls of radius 0.25
        return float(np.min(np.sum((x - _G12_CENTERS) ** 2, axis=1))) - 0.0625

    return f, [inside_some_sphere], [], np.zeros(3), np.full(3, 10.0)


def g13():
    def f(x):
        return math.exp(x[0] * x[1] * x[2] * x[3] * x[4])

    eq = [lambda x: float(np.sum(x ** 2)) - 10,
          lambda x: x[1] * x[2] - 5 * x[3] * x[4],
          lambda x: x[0] ** 3 + x[1] ** 3 + 1]
    return f, [], eq, np.array([-2.3, -2.3, -3.2, -3.2, -3.2]), np.array([2.3, 2.3, 3.2, 3.2, 3.2])


def pvd():
    """Pressure vessel: shell/head thickness, inner radius, length.

    The length limit ``x4 <= 240`` is implied by the box and not listed.
    """
    def f(x):
        return (0.6224 * x[0] * x[2] * x[3] + 1.7781 * x[1] * x[2] ** 2
                + 3.1661 * x[0] ** 2 * x[3] + 19.84 * x[0] ** 2 * x[2])

    ineq = [lambda x: -x[0] + 0.0193 * x[2],
            lambda x: -x[1] + 0.00954 * x[2],
            lambda x: -math.pi * x[2] ** 2 * x[3] - (4 / 3) * math.pi * x[2] ** 3 + 1296000]
    return f, ineq, [], np.array([0.0, 0.0, 10.0, 10.0]), np.array([99.0, 99.0, 200.0, 200.0])


def tcs():
    """Tension/compression spring: wire diameter, coil diameter, active coils."""
    def f(x):
        return (x[2] + 2) * x[1] * x[0] ** 2

    def shear(x):
        den = 12566 * x[0] ** 3 * (x[1] - x[0])
        if den == 0.0:
            den = 1e-300
        return (4 * x[1] ** 2 - x[0] * x[1]) / den + 1 / (5108 * x[0] ** 2) - 1

    ineq = [lambda x: 1 - x[1] ** 3 * x[2] / (71785 * x[0] ** 4),
            shear,
            lambda x: 1 - 140.45 * x[0] / (x[1] ** 2 * x[2]),
            lambda x: (x[0] + x[1]) / 1.5 - 1]
    return f, ineq, [], np.array([0.05, 0.25, 2.0]), np.array([2.0, 1.3, 15.0])


def wbd():
    """Welded beam: weld thickness h, weld length l, bar height t, bar thickness b.

    ``h - b = 0`` is kept as an equality; the weld cannot be thicker than
    the bar and the optimum sits on that constraint. ``h >= 0.125`` is a bound.
    """
    P, L, E, G = 6000.0, 14.0, 30e6, 12e6
    tau_max, sigma_max, delta_max = 13600.0, 30000.0, 0.25

    def f(x):
        return 1.10471 * x[0] ** 2 * x[1] + 0.04811 * x[2] * x[3] * (14.0 + x[1])

    def tau(x):
        h, l, t, _ = x
        t1 = P / (math.sqrt(2) * h * l)
        m = P * (L + l / 2)
        r = math.sqrt(l ** 2 / 4 + ((h + t) / 2) ** 2)
        j = 2 * (math.sqrt(2) * h * l * (l ** 2 / 12 + ((h + t) / 2) ** 2))
        t2 = m * r / j
        return math.sqrt(t1 ** 2 + 2 * t1 * t2 * l / (2 * r) + t2 ** 2)

    def buckling_load(x):
        t, b = x[2], x[3]
        return (4.013 * E * math.sqrt(t ** 2 * b ** 6 / 36) / L ** 2
                * (1 - t / (2 * L) * math.sqrt(E / (4 * G))))

    ineq = [
        lambda x: tau(x) - tau_max,
        lambda x: 6 * P * L / (x[3] * x[2] ** 2) - sigma_max,
        lambda x: 0.10471 * x[0] ** 2 + 0.04811 * x[2] * x[3] * (14.0 + x[1]) - 5.0,
        lambda x: 4 * P * L ** 3 / (E * x[2] ** 3 * x[3]) - delta_max,
        lambda x: P - buckling_load(x),
    ]
    eq = [lambda x: x[0] - x[3]]
    return f, ineq, eq, np.array([0.125, 0.1, 0.1, 0.1]), np.array([2.0, 10.0, 10.0, 2.0])


BUILDERS = {
    "G1": g1, "G2": g2, "G3": g3, "G4": g4, "G5": g5, "G6": g6, "G7": g7, "G8": g8,
    "G9": g9, "G10": g10, "G11": g11, "G12": g12, "G13": g13,
    "PVD": pvd, "TCS": tcs, "WBD": wbd,
}

# Best-known objective values as reported in the experimental tables.
BEST_KNOWN = {
    "G1": -15.0, "G2": -0.803619, "G3": -1.0, "G4": -30665.5, "G5": 5126.5,
    "G6": -6961.81, "G7": 24.3062, "G8": -0.095825, "G9": 680.63, "G10": 7049.33,
    "G11": 0.75, "G12": -1.0, "G13": 0.0539498, "PVD": 5868.76, "TCS": 0.0126653,
    "WBD": 1.725,
}

# Published optimal solution vectors. PVD has none matching its best-known value.
OPTIMA = {
    "G1": [1.0] * 9 + [3.0, 3.0, 3.0, 1.0],
    "G2": [3.16246061572185, 3.12833142812967, 3.09479212988791, 3.06145059523469,
           3.02792915885555, 2.99382606701730, 2.95866871765285, 2.92184227312450,
           0.49482511456933, 0.48835711005490, 0.48231642711865, 0.47664475092742,
           0.47129550835493, 0.46623099264167, 0.46142004984199, 0.45683664767217,
           0.45245876903267, 0.44826762241853, 0.44424700958760, 0.44038285956317],
    "G3": [1 / math.sqrt(20)] * 20,
    "G4": [78.0, 33.0, 29.9952560256815985, 45.0, 36.7758129057882073],
    "G5": [679.945148297028709, 1026.06697600004691, 0.118876369094410433,
           -0.39623348521517826],
    "G6": [14.09500000000000064, 0.8429607892154795668],
    "G7": [2.17199634142692, 2.3636830416034, 8.77392573913157, 5.09598443745173,
           0.990654756560493, 1.43057392853463, 1.32164415364306, 9.82872576524495,
           8.2800915887356, 8.3759266477347],
    "G8": [1.22797135260752599, 4.24537336612274885],
    "G9": [2.33049935147405174, 1.95137236847114592, -0.477541399510615805,
           4.36572624923625874, -0.624486959100388983, 1.03813099410962173,
           1.5942266780671519],
    "G10": [579.306685017979589, 1359.97067807935605, 5109.97065743133317, 182.01769963061534,
            295.601173702746792, 217.982300369384632, 286.41652592786852, 395.60117370274673],
    "G11": [1 / math.sqrt(2), 0.5],
    "G12": [5.0, 5.0, 5.0],
    "G13": [-1.71714224003, 1.59572124049468, 1.8272502406271, -0.763659881912867,
            -0.76365986736498],
    "TCS": [0.05168906, 0.35671773, 11.28896619],
    "WBD": [0.205730, 3.470489, 9.036624, 0.205730],
}

"""Independent reference values for the unit tests, computed with mpmath.

Regenerate with:  python3 tests/oracles/gen_oracles.py > tests/oracles/oracle_values.hpp
"""
from mpmath import mp, mpf, quad, npdf, erfinv, sqrt, log, exp, floor, nstr

mp.dps = 40


def normal_quantile(u):
    return sqrt(2) * erfinv(2 * u - 1)


def pieces(centers, scale, width=40, n=16):
    """Finite breakpoints covering +-width*scale around the centers, plus the centers themselves."""
    lo = min(centers) - width * scale
    hi = max(centers) + width * scale
    pts = sorted(set([lo + (hi - lo) * mpf(i) / n for i in range(n + 1)] + [mpf(c) for c in centers]))
    return pts


def abs_moment(mu, var):
    """E|Z| for Z ~ N(mu, var), by direct integration."""
    s = sqrt(var)
    return quad(lambda z: abs(z) * npdf(z, mu, s), pieces([0, mu], s))


def energy_mmd2(m1, v1, m2, v2):
    return 2 * abs_moment(m1 - m2, v1 + v2) - abs_moment(0, 2 * v1) - abs_moment(0, 2 * v2)


def kernel_mean(k, mu, var):
    s = sqrt(var)
    return quad(lambda z: k(z) * npdf(z, mu, s), pieces([0, mu], s))


def kl(mq, vq, mp_, vp):
    """KL(Q || P) by integrating q log(q/p)."""
    sq, sp = sqrt(vq), sqrt(vp)
    f = lambda z: npdf(z, mq, sq) * (log(npdf(z, mq, sq)) - log(npdf(z, mp_, sp)))
    return quad(f, pieces([mq, mp_], max(sq, sp)))


def pdf_l2(m1, v1, m2, v2):
    s1, s2 = sqrt(v1), sqrt(v2)
    return quad(lambda z: (npdf(z, m1, s1) - npdf(z, m2, s2)) ** 2, pieces([m1, m2], max(s1, s2)))


def w_p_quantile(p, m1, s1, m2, s2):
    g = lambda u: abs((m1 + s1 * normal_quantile(u)) - (m2 + s2 * normal_quantile(u))) ** p
    return quad(g, [0, mpf(1) / 2, 1]) ** (mpf(1) / p)


def choose_T(n, gamma, l=5, delta=1, c=1, q=1, alpha=0, c_divide=5):
    x = (1 / mpf(c_divide)) * (1 / (c - 1 / (2 * mpf(q)))) * min(mpf(delta), 1 / mpf(q)) / (2 * (l - 1) + alpha)
    return int(floor(x * log(n) / log(1 / mpf(gamma))))


def coulomb2_mmd2(x, y):
    k = lambda a, b: -log(sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2))
    n, m = len(x), len(y)
    sxx = sum(k(x[i], x[j]) for i in range(n) for j in range(n) if i != j)
    syy = sum(k(y[i], y[j]) for i in range(m) for j in range(m) if i != j)
    sxy = sum(k(a, b) for a in x for b in y)
    return sxx / (n * (n - 1)) + syy / (m * (m - 1)) - 2 * sxy / (n * m)


def dpi_cycle(gamma):
    # (1 - gamma) sum_{h >= 1} gamma^(h-1) 1[h odd]
    return (1 - gamma) / (1 - gamma ** 2)


gamma = mpf("0.99")
ret_var = 1 / (1 - gamma ** 2)
square = [(0, 0), (1, 0), (0, 1), (1, 1)]
shifted = [(a + 10, b) for a, b in square]

values = {
    "kQuantileN21": 2 + normal_quantile(mpf("0.841345")),
    "kEnergyK0Std": kernel_mean(lambda z: -abs(z), 0, 1),
    "kRbfK0Var2": kernel_mean(lambda z: exp(-z ** 2 / 4), 0, 2),
    "kLaplaceK0Var1": kernel_mean(lambda z: exp(-abs(z)), mpf("0.3"), 1),
    "kKlN0N1": kl(1, 1, 0, 1),
    "kKlGeneric": kl(mpf("-0.4"), mpf("2.5"), mpf("0.7"), mpf("0.6")),
    "kEnergyN0N2": energy_mmd2(0, 1, 2, 1),
    "kEnergyGeneric": energy_mmd2(mpf("0.3"), mpf("0.5"), mpf("-1.2"), mpf("2.2")),
    "kRbfGeneric": None,  # filled below
    "kPdfL2N0N2": pdf_l2(0, 1, 2, 1),
    "kPdfL2Generic": pdf_l2(mpf("0.3"), mpf("0.5"), mpf("-1.2"), mpf("2.2")),
    "kW2N01N04": w_p_quantile(2, 0, 1, 0, 2),
    "kW1Generic": w_p_quantile(1, mpf("0.5"), 1, mpf("-0.25"), mpf("1.5")),
    "kFdeObjectiveKl": kl(1, gamma ** 2 * ret_var, 0, ret_var),
    "kCoulombSquare": coulomb2_mmd2(square, shifted),
    "kDpiCycleHalf": dpi_cycle(mpf("0.5")),
}


def mmd_gauss(k, m1, v1, m2, v2):
    return 2 * kernel_mean(k, m1 - m2, v1 + v2) * (-1) + kernel_mean(k, 0, 2 * v1) + kernel_mean(k, 0, 2 * v2)


values["kRbfGeneric"] = mmd_gauss(lambda z: exp(-z ** 2 / 4), mpf("0.3"), mpf("0.5"), mpf("-1.2"), mpf("2.2"))
values["kLaplaceGeneric"] = mmd_gauss(lambda z: exp(-abs(z)), mpf("0.3"), mpf("0.5"), mpf("-1.2"), mpf("2.2"))

ints = {
    "kChooseT1000": choose_T(1000, mpf("0.99")),
    "kChooseT2": choose_T(2, mpf("0.5")),
    "kChooseT1000Cd10": choose_T(1000, mpf("0.99"), c_divide=10),
}

print("// Generated by tests/oracles/gen_oracles.py; do not edit.")
print("#pragma once\n")
print("#include <cstddef>\n")
print("namespace oracle {\n")
for k, v in values.items():
    print(f"inline constexpr double {k} = {nstr(v, 20)};")
for k, v in ints.items():
    print(f"inline constexpr std::size_t {k} = {v};")
print("\n}  // namespace oracle")

"""Reference implementations that share no code with the package.

Used to produce the frozen constants in the unit tests and, for the cheap
ones, to cross-check at test time.
"""
import math

import mpmath
import numpy as np
from scipy import stats

C = 299_792_458.0


def gl_marcum_q1(a, b, width=40.0, panels=400, order=20):
    """Composite Gauss-Legendre on [b, b + width]; the tail past it is below exp(-width^2/8)."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(b, b + width, panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        t = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        f = np.array([float(tt * mpmath.exp(-(tt * tt + a * a) / 2) * mpmath.besseli(0, a * tt)) for tt in t])
        total += 0.5 * (hi - lo) * np.dot(w, f)
    return total


def mp_marcum_q1(a, b, dps=30):
    """Q1 = 1 - int_0^b x exp(-(x^2+a^2)/2) I0(ax) dx in extended precision."""
    with mpmath.workdps(dps):
        a, b = mpmath.mpf(a), mpmath.mpf(b)
        f = lambda x: x * mpmath.exp(-(x * x + a * a) / 2) * mpmath.besseli(0, a * x)
        if b <= a + 10:
            return float(1 - mpmath.quad(f, [0, min(a, b), b]))
        return float(mpmath.quad(f, [b, b + 20, mpmath.inf]))


def mp_bessel_i0_integral(x, dps=30):
    with mpmath.workdps(dps):
        return float(mpmath.quad(lambda t: mpmath.exp(x * mpmath.cos(t)), [0, mpmath.pi]) / mpmath.pi)


def i0_series(x, terms=30):
    return math.fsum((x / 2) ** (2 * k) / math.factorial(k) ** 2 for k in range(terms))


def scipy_q1(a, b):
    return float(stats.ncx2.sf(b * b, 2, a * a)) if a > 0 else math.exp(-b * b / 2)


def rmin_brentq(l, sigma, eps):
    from scipy.optimize import brentq

    a = l / sigma
    return sigma * brentq(lambda b: scipy_q1(a, b) - eps, 0.0, a + 50.0, xtol=1e-14, rtol=1e-15)


def eta(f):
    return C * C / (16 * math.pi**2 * f * f)


def rate(x, y, x_pin, d, p, noise, f):
    return math.log2(1 + eta(f) * p / (noise * ((x - x_pin) ** 2 + y * y + d * d)))


def p_min(l, sigma, eps, rate_target, d, noise, f):
    r = rmin_brentq(l, sigma, eps)
    return (2**rate_target - 1) * (r * r + d * d) * noise / eta(f)


def mc_ncx2_cdf(x, lam, n=10_000_000, seed=12345):
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(n // 1_000_000):
        w1 = rng.normal(math.sqrt(lam), 1.0, 1_000_000)
        w2 = rng.normal(0.0, 1.0, 1_000_000)
        hits += np.count_nonzero(w1 * w1 + w2 * w2 <= x)
    return hits / n


def mc_coverage(l, sigma, r, n=10_000_000, seed=54321):
    return mc_ncx2_cdf((r / sigma) ** 2, (l / sigma) ** 2, n, seed)

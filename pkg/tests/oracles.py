"""Reference computations that share no code path with the package."""

import itertools
import math


def eigvec(theta, outcome):
    """Eigenvector of cos(t) Z + sin(t) X; outcome 0 is the +1 eigenvalue."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return (c, s) if outcome == 0 else (-s, c)


def amplitude_probability(alpha, a, b, x, y):
    """|<e_x(a) e_y(b)|psi>|^2 for psi = alpha|00> + beta|11>; all real."""
    beta = math.sqrt(1 - alpha * alpha)
    u, v = eigvec(a, x), eigvec(b, y)
    amp = alpha * u[0] * v[0] + beta * u[1] * v[1]
    return amp * amp


def chained_by_amplitudes(alpha, alice, bob):
    n = len(alice)
    total = 0.0
    for k in range(n):
        total += sum(amplitude_probability(alpha, alice[k], bob[k], x, 1 - x) for x in (0, 1))
        if k + 1 < n:
            total += sum(amplitude_probability(alpha, alice[k + 1], bob[k], x, 1 - x) for x in (0, 1))
    total += sum(amplitude_probability(alpha, alice[0], bob[-1], x, x) for x in (0, 1))
    return total


def local_minimum_loops(n):
    best = None
    for f in itertools.product((0, 1), repeat=n):
        for g in itertools.product((0, 1), repeat=n):
            v = sum(f[k] != g[k] for k in range(n))
            v += sum(f[k + 1] != g[k] for k in range(n - 1))
            v += f[0] == g[n - 1]
            best = v if best is None else min(best, v)
    return best

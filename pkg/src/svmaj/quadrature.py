"""Gauss-Legendre quadrature on [0, 1] at working precision.

Nodes and weights come from Newton iteration on the Legendre polynomial,
computed by the three-term recurrence.  They are cached per (digits, n):
the integral-representation checks evaluate the same rule on every matrix
entry, so reuse dominates.
"""

from __future__ import annotations

from mpmath import mp, mpf

from .numerics import NumericError, PrecisionConfig

_rule_cache: dict[tuple[int, int], tuple[list, list]] = {}


def _legendre_and_derivative(n: int, x):
    """(P_n(x), P_n'(x)) by the recurrence; stable for x in (-1, 1)."""
    p0, p1 = mpf(1), x
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1)
    return p1, dp


def nodes_weights(n: int, config: PrecisionConfig) -> tuple[list, list]:
    """Gauss-Legendre nodes and weights for the interval [0, 1]."""
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    key = (config.digits, n)
    cached = _rule_cache.get(key)
    if cached is not None:
        return cached
    with config.workdps():
        nodes, weights = [], []
        tol = mpf(10) ** (-(config.digits - 2))
        for k in range(1, n + 1):
            # Chebyshev-like initial guess on [-1, 1]
            x = mp.cos(mp.pi * (4 * k - 1) / (4 * n + 2))
            converged = False
            for _ in range(200):
                p, dp = _legendre_and_derivative(n, x)
                if dp == 0:
                    break
                dx = p / dp
                x = x - dx
                if abs(dx) <= tol * (abs(x) + 1):
                    converged = True
                    break
            if not converged:
                raise NumericError(f"Legendre root {k}/{n} did not converge")
            _, dp = _legendre_and_derivative(n, x)
            w = 2 / ((1 - x * x) * dp * dp)
            nodes.append((x + 1) / 2)
            weights.append(w / 2)
        order = sorted(range(n), key=lambda i: nodes[i])
        rule = ([nodes[i] for i in order], [weights[i] for i in order])
    _rule_cache[key] = rule
    return rule


def gauss_legendre(f, nodes: int, config: PrecisionConfig) -> mpf:
    """Fixed-rule estimate of the integral of f over [0, 1]."""
    xs, ws = nodes_weights(nodes, config)
    with config.workdps():
        return mp.fsum(w * f(x) for x, w in zip(xs, ws))


def integrate_adaptive(f, config: PrecisionConfig, start_nodes: int = 16,
                       max_nodes: int = 4096) -> mpf:
    """Double the node count until two successive estimates agree within tol."""
    with config.workdps():
        tol = config.tol()
        n = start_nodes
        prev = gauss_legendre(f, n, config)
        while n <= max_nodes:
            n *= 2
            cur = gauss_legendre(f, n, config)
            if abs(cur - prev) <= tol * (1 + abs(cur)):
                return cur
            prev = cur
        raise NumericError(f"quadrature did not stabilise below {max_nodes} nodes")

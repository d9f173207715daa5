"""Random matrix instances for checks and searches, all driven by RngStream."""

from __future__ import annotations

from mpmath import mp, mpf, mpc

from .numerics import PrecisionConfig, RngStream
from .linalg import (HERMITIAN, PSD, POSITIVE_DEFINITE, Matrix,
                     diagonal_matrix, hermitian_eig)


def complex_normal_matrix(stream: RngStream, d: int, config: PrecisionConfig) -> Matrix:
    with config.workdps():
        ent = [[stream.complex_normal(config) for _ in range(d)] for _ in range(d)]
    return Matrix(ent, config, check=False)


def random_psd(stream: RngStream, d: int, config: PrecisionConfig) -> Matrix:
    """Gram matrix F F* of a complex standard normal factor."""
    f = complex_normal_matrix(stream, d, config)
    g = f @ f.conj_transpose()
    return Matrix(g.entries, config, (HERMITIAN, PSD), check=False)


def random_positive_definite(stream: RngStream, d: int, config: PrecisionConfig) -> Matrix:
    """Gram matrix rejected until comfortably nonsingular."""
    with config.workdps():
        floor = mpf(10) ** (-(config.digits // 4))
        while True:
            g = random_psd(stream, d, config)
            eig = hermitian_eig(g)
            if eig.eigenvalues[-1] > floor * max(mpf(1), eig.eigenvalues[0]):
                return Matrix(g.entries, config,
                              (HERMITIAN, PSD, POSITIVE_DEFINITE), check=False)


def random_unitary(stream: RngStream, d: int, config: PrecisionConfig) -> Matrix:
    """Modified Gram-Schmidt orthonormalisation of a complex normal matrix."""
    f = complex_normal_matrix(stream, d, config)
    with config.workdps():
        cols = [[f.entries[i][j] for i in range(d)] for j in range(d)]
        for j in range(d):
            for k in range(j):
                proj = mp.fsum(cols[k][i].conjugate() * cols[j][i] for i in range(d))
                cols[j] = [x - proj * y for x, y in zip(cols[j], cols[k])]
            nrm = mp.sqrt(mp.fsum(abs(x) ** 2 for x in cols[j]))
            cols[j] = [x / nrm for x in cols[j]]
        ent = [[cols[j][i] for j in range(d)] for i in range(d)]
    return Matrix(ent, config, check=False)


def random_distinct_diagonal(stream: RngStream, d: int, config: PrecisionConfig,
                             lo=0.05, hi=0.95, min_gap=1e-3) -> Matrix:
    """Diagonal with entries uniform in (lo, hi), pairwise distance >= min_gap."""
    with config.workdps():
        gap = mpf(min_gap)
        while True:
            vals = [stream.uniform(config, lo, hi) for _ in range(d)]
            ok = all(abs(vals[i] - vals[j]) >= gap
                     for i in range(d) for j in range(i + 1, d))
            if ok:
                return diagonal_matrix(vals, config, nonneg=True, check=False)


def random_nonneg_vector(stream: RngStream, d: int, config: PrecisionConfig,
                         lo=0.0, hi=1.0) -> list:
    with config.workdps():
        return [stream.uniform(config, lo, hi) for _ in range(d)]


def random_psi(stream: RngStream, d: int, config: PrecisionConfig,
               modulus_floor=1e-3) -> list:
    """Complex standard normal entries, redrawn below the modulus floor."""
    with config.workdps():
        floor = mpf(modulus_floor)
        out = []
        for _ in range(d):
            z = stream.complex_normal(config)
            while abs(z) < floor:
                z = stream.complex_normal(config)
            out.append(z)
        return out


def random_invertible(stream: RngStream, d: int, config: PrecisionConfig) -> Matrix:
    """Complex normal matrix rejected until its condition estimate is tame."""
    from .linalg import SingularMatrixError, inverse
    while True:
        s = complex_normal_matrix(stream, d, config)
        try:
            inverse(s)
        except SingularMatrixError:
            continue
        return s

"""Dense extended-precision matrix algebra on small matrices.

The eigensolver is cyclic Jacobi: it converges unconditionally at any
precision, and for the dimensions this package targets (d <= 8, compounds
up to 70x70 in principle but d <= 8 in practice) its cost is irrelevant
next to the number of Monte Carlo trials.  Real-symmetric input takes a
real rotation path, complex Hermitian input a phase-absorbing one.

SVD goes through the eigendecomposition of X*X; the squaring halves the
relative accuracy of singular values near tau*||X||, which the precision
budget absorbs (documented contract: values below tau*||X|| carry absolute,
not relative, accuracy).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from mpmath import mp, mpf, mpc

from .numerics import (DomainError, NumericError, PrecisionConfig, Scalar,
                       exponent_fraction, exponent_value, scalar_to_json,
                       scalar_from_json, to_exact_decimal)

HERMITIAN = "hermitian"
PSD = "psd"
POSITIVE_DEFINITE = "positive_definite"
DIAGONAL = "diagonal"
NONNEG_DIAGONAL = "nonnegative_diagonal"

_VALID_FLAGS = {HERMITIAN, PSD, POSITIVE_DEFINITE, DIAGONAL, NONNEG_DIAGONAL}


class ContractViolation(ValueError):
    """A matrix does not satisfy a flag it was declared with."""


class SingularMatrixError(ArithmeticError):
    """Matrix numerically singular for the requested operation."""


def _as_scalar(x) -> Scalar:
    if isinstance(x, (mpf, mpc)):
        return x
    if isinstance(x, complex):
        return mpc(x.real, x.imag)
    return mpf(x)


def _conj(x: Scalar) -> Scalar:
    return x.conjugate() if isinstance(x, mpc) else x


def _re(x: Scalar) -> mpf:
    return x.real if isinstance(x, mpc) else x


def _im_abs(x: Scalar) -> mpf:
    return abs(x.imag) if isinstance(x, mpc) else mpf(0)


class Matrix:
    """Immutable dense matrix of mpmath scalars with certified flags.

    Flags are verified at construction (hermitian entrywise; psd and
    positive_definite through the eigendecomposition, which is cached and
    reused by subsequent spectral operations on the same object).
    """

    __slots__ = ("rows", "cols", "entries", "flags", "config", "_eig", "_svals")

    def __init__(self, entries: Sequence[Sequence], config: PrecisionConfig,
                 flags: Iterable[str] = (), check: bool = True):
        rows = len(entries)
        if rows == 0 or any(len(r) != len(entries[0]) for r in entries):
            raise ValueError("entries must be a nonempty rectangular grid")
        self.rows = rows
        self.cols = len(entries[0])
        self.entries = tuple(tuple(_as_scalar(x) for x in row) for row in entries)
        self.flags = frozenset(flags)
        self.config = config
        self._eig = None
        self._svals = None
        unknown = self.flags - _VALID_FLAGS
        if unknown:
            raise ValueError(f"unknown flags: {sorted(unknown)}")
        if check and self.flags:
            self._certify()

    # -- certification ----------------------------------------------------

    def _certify(self):
        cfg = self.config
        with cfg.workdps():
            if DIAGONAL in self.flags or NONNEG_DIAGONAL in self.flags:
                for i in range(self.rows):
                    for j in range(self.cols):
                        if i != j and self.entries[i][j] != 0:
                            raise ContractViolation("declared diagonal, has off-diagonal entries")
                if NONNEG_DIAGONAL in self.flags:
                    for i in range(min(self.rows, self.cols)):
                        d = self.entries[i][i]
                        if _im_abs(d) != 0 or _re(d) < 0:
                            raise ContractViolation("declared nonnegative_diagonal, diagonal not real >= 0")
            needs_herm = self.flags & {HERMITIAN, PSD, POSITIVE_DEFINITE}
            if needs_herm:
                if self.rows != self.cols:
                    raise ContractViolation("hermitian flag on non-square matrix")
                tol = cfg.tol(self.fro_norm())
                for i in range(self.rows):
                    if _im_abs(self.entries[i][i]) > tol:
                        raise ContractViolation("diagonal not real within tolerance")
                    for j in range(i + 1, self.cols):
                        if abs(self.entries[i][j] - _conj(self.entries[j][i])) > tol:
                            raise ContractViolation("not hermitian within tolerance")
            if self.flags & {PSD, POSITIVE_DEFINITE}:
                eig = hermitian_eig(self)
                scale = self.fro_norm()
                tol = cfg.tol(scale)
                lo = eig.eigenvalues[-1]
                if lo < -tol:
                    raise ContractViolation(f"declared psd, min eigenvalue {mp.nstr(lo, 8)}")
                if POSITIVE_DEFINITE in self.flags and lo <= tol:
                    raise ContractViolation("declared positive_definite, spectrum reaches zero")

    # -- basics ------------------------------------------------------------

    @property
    def dim(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def entry(self, i: int, j: int) -> Scalar:
        return self.entries[i][j]

    def fro_norm(self) -> mpf:
        with self.config.workdps():
            return mp.sqrt(mp.fsum(abs(x) ** 2 for row in self.entries for x in row))

    def conj_transpose(self) -> "Matrix":
        return Matrix([[_conj(self.entries[j][i]) for j in range(self.rows)]
                       for i in range(self.cols)], self.config,
                      self.flags & {HERMITIAN, PSD, POSITIVE_DEFINITE, DIAGONAL, NONNEG_DIAGONAL},
                      check=False)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"dimension mismatch {self.dim} @ {other.dim}")
        with self.config.workdps():
            a, b = self.entries, other.entries
            n, m, k = self.rows, other.cols, self.cols
            bt = tuple(zip(*b))
            out = [[mp.fsum(a[i][t] * bt[j][t] for t in range(k)) for j in range(m)]
                   for i in range(n)]
        return Matrix(out, self.config, check=False)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        with self.config.workdps():
            out = [[self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                   for i in range(self.rows)]
        return Matrix(out, self.config, check=False)

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        with self.config.workdps():
            out = [[self.entries[i][j] - other.entries[i][j] for j in range(self.cols)]
                   for i in range(self.rows)]
        return Matrix(out, self.config, check=False)

    def scaled(self, c) -> "Matrix":
        with self.config.workdps():
            cv = _as_scalar(c)
            out = [[cv * x for x in row] for row in self.entries]
        keep = self.flags & {DIAGONAL}
        return Matrix(out, self.config, keep, check=False)

    def to_json(self) -> dict:
        return {
            "dim": [self.rows, self.cols],
            "digits": self.config.digits,
            "entries": [[to_exact_decimal(_re(x)),
                         to_exact_decimal(x.imag if isinstance(x, mpc) else mpf(0))]
                        for row in self.entries for x in row],
            "flags": sorted(self.flags),
        }

    @classmethod
    def from_json(cls, obj: dict, config: PrecisionConfig | None = None) -> "Matrix":
        cfg = config or PrecisionConfig(digits=max(20, int(obj["digits"])))
        r, c = obj["dim"]
        with cfg.workdps():
            flat = []
            for re_s, im_s in obj["entries"]:
                re, im = mpf(re_s), mpf(im_s)
                flat.append(mpc(re, im) if im != 0 else re)
        rows = [flat[i * c:(i + 1) * c] for i in range(r)]
        return cls(rows, cfg, obj.get("flags", ()), check=False)

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, flags={sorted(self.flags)})"


def identity(n: int, config: PrecisionConfig) -> Matrix:
    with config.workdps():
        return Matrix([[mpf(1) if i == j else mpf(0) for j in range(n)] for i in range(n)],
                      config, (HERMITIAN, PSD, POSITIVE_DEFINITE, DIAGONAL, NONNEG_DIAGONAL),
                      check=False)


def diagonal_matrix(values: Sequence, config: PrecisionConfig,
                    nonneg: bool = False, check: bool = True) -> Matrix:
    n = len(values)
    with config.workdps():
        vals = [_as_scalar(v) for v in values]
        ent = [[vals[i] if i == j else mpf(0) for j in range(n)] for i in range(n)]
    flags = {DIAGONAL}
    if nonneg:
        flags |= {NONNEG_DIAGONAL, HERMITIAN, PSD}
    return Matrix(ent, config, flags, check=check)


# ---------------------------------------------------------------------------
# eigendecomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EigResult:
    eigenvalues: tuple          # real mpf, descending
    vectors: Matrix             # unitary, columns match eigenvalues
    residual: mpf               # ||H V - V diag|| (Frobenius)


def _jacobi_real(a, v, n, eps2):
    """One cyclic sweep of real symmetric Jacobi; returns rotation count."""
    rotations = 0
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = a[p][q]
            if apq * apq <= eps2:
                continue
            rotations += 1
            tau = (a[q][q] - a[p][p]) / (2 * apq)
            t = (1 if tau >= 0 else -1) / (abs(tau) + mp.sqrt(1 + tau * tau))
            c = 1 / mp.sqrt(1 + t * t)
            s = t * c
            for i in range(n):
                aip, aiq = a[i][p], a[i][q]
                a[i][p] = c * aip - s * aiq
                a[i][q] = s * aip + c * aiq
            for j in range(n):
                apj, aqj = a[p][j], a[q][j]
                a[p][j] = c * apj - s * aqj
                a[q][j] = s * apj + c * aqj
            for i in range(n):
                vip, viq = v[i][p], v[i][q]
                v[i][p] = c * vip - s * viq
                v[i][q] = s * vip + c * viq
    return rotations


def _jacobi_complex(a, v, n, eps2):
    """One cyclic sweep of Hermitian Jacobi with phase absorption."""
    rotations = 0
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = a[p][q]
            m2 = abs(apq) ** 2
            if m2 <= eps2:
                continue
            rotations += 1
            babs = mp.sqrt(m2)
            ph = apq / babs
            cph = _conj(ph)
            tau = (_re(a[q][q]) - _re(a[p][p])) / (2 * babs)
            t = (1 if tau >= 0 else -1) / (abs(tau) + mp.sqrt(1 + tau * tau))
            c = 1 / mp.sqrt(1 + t * t)
            s = t * c
            for i in range(n):
                aip, aiq = a[i][p], a[i][q] * cph
                a[i][p] = c * aip - s * aiq
                a[i][q] = (s * aip + c * aiq) * ph
            for j in range(n):
                apj, aqj = a[p][j], a[q][j] * ph
                a[p][j] = c * apj - s * aqj
                a[q][j] = (s * apj + c * aqj) * cph
            for i in range(n):
                vip, viq = v[i][p], v[i][q] * cph
                v[i][p] = c * vip - s * viq
                v[i][q] = (s * vip + c * viq) * ph
    return rotations


def hermitian_eig(H: Matrix) -> EigResult:
    """Eigendecomposition of a certified Hermitian matrix by cyclic Jacobi.

    Sweeps run until the off-diagonal Frobenius mass falls below the solver
    floor (well under the check tolerance); eigenvalues come back sorted
    descending with matching eigenvector columns.
    """
    if not H.flags & {HERMITIAN, PSD, POSITIVE_DEFINITE}:
        raise ContractViolation("hermitian_eig requires a hermitian-certified matrix")
    if H._eig is not None:
        return H._eig
    cfg = H.config
    n = H.rows
    with cfg.workdps():
        is_real = all(not isinstance(x, mpc) or x.imag == 0
                      for row in H.entries for x in row)
        if is_real:
            a = [[_re(x) for x in row] for row in H.entries]
            v = [[mpf(1) if i == j else mpf(0) for j in range(n)] for i in range(n)]
            sweep_fn = _jacobi_real
        else:
            a = [[x for x in row] for row in H.entries]
            v = [[mpc(1) if i == j else mpc(0) for j in range(n)] for i in range(n)]
            sweep_fn = _jacobi_complex
        nrm2 = mp.fsum(abs(x) ** 2 for row in a for x in row)
        if nrm2 == 0:
            vals = tuple(mpf(0) for _ in range(n))
            vecs = identity(n, cfg)
            result = EigResult(vals, vecs, mpf(0))
            H._eig = result
            return result
        floor2 = (cfg.solver_eps() ** 2) * nrm2
        converged = False
        for _ in range(max(30, cfg.digits)):
            off = mp.fsum(abs(a[i][j]) ** 2 for i in range(n) for j in range(n) if i != j)
            if off <= floor2:
                converged = True
                break
            if sweep_fn(a, v, n, floor2 / (4 * n * n)) == 0:
                converged = True
                break
        if not converged:
            raise NumericError("Jacobi eigensolver did not converge")
        pairs = sorted(((_re(a[i][i]), i) for i in range(n)),
                       key=lambda t: (-t[0], t[1]))
        vals = tuple(p[0] for p in pairs)
        perm = [p[1] for p in pairs]
        vecs_entries = [[v[i][perm[j]] for j in range(n)] for i in range(n)]
        vecs = Matrix(vecs_entries, cfg, check=False)
        # residual ||H V - V diag||_F
        hv = H @ vecs
        res2 = mp.fsum(abs(hv.entries[i][j] - vecs.entries[i][j] * vals[j]) ** 2
                       for i in range(n) for j in range(n))
        result = EigResult(vals, vecs, mp.sqrt(res2))
    H._eig = result
    return result


def _herm_apply(H: Matrix, fn, flags=(HERMITIAN,)) -> Matrix:
    """U f(diag) U* for a Hermitian H; fn maps a real eigenvalue to a real."""
    eig = hermitian_eig(H)
    cfg = H.config
    n = H.rows
    with cfg.workdps():
        fvals = [fn(x) for x in eig.eigenvalues]
        u = eig.vectors.entries
        out = [[mp.fsum(u[i][k] * fvals[k] * _conj(u[j][k]) for k in range(n))
                for j in range(n)] for i in range(n)]
    return Matrix(out, cfg, flags, check=False)


# ---------------------------------------------------------------------------
# singular values and powers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingularValues:
    values: tuple  # nonnegative mpf, descending

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def partial_sums(self):
        out, acc = [], mpf(0)
        for v in self.values:
            acc += v
            out.append(acc)
        return out


def svd_values(X: Matrix) -> SingularValues:
    """Singular values, descending, as sqrt of eig(X*X)."""
    if not X.is_square():
        raise ValueError("svd_values expects a square matrix")
    if X._svals is not None:
        return X._svals
    cfg = X.config
    with cfg.workdps():
        if DIAGONAL in X.flags:
            vals = sorted((abs(X.entries[i][i]) for i in range(X.rows)), reverse=True)
            result = SingularValues(tuple(vals))
            X._svals = result
            return result
        gram_entries = (X.conj_transpose() @ X).entries
        gram = Matrix(gram_entries, cfg, (HERMITIAN, PSD), check=False)
        eig = hermitian_eig(gram)
        vals = tuple(mp.sqrt(v) if v > 0 else mpf(0) for v in eig.eigenvalues)
        result = SingularValues(vals)
    X._svals = result
    return result


def operator_norm(X: Matrix) -> mpf:
    return svd_values(X).values[0]


def psd_power(H: Matrix, p, clamp_tol: bool = True) -> Matrix:
    """H**p for certified PSD H through its eigendecomposition.

    Eigenvalues within tau*||H|| of zero are clamped to exact zero before
    powering; anything more negative is rejected by certification.  A
    singular H requires p > 0.
    """
    if not H.flags & {PSD, POSITIVE_DEFINITE}:
        raise ContractViolation("psd_power requires a psd-certified matrix")
    cfg = H.config
    pf = exponent_fraction(p)
    pv = exponent_value(p, cfg)
    with cfg.workdps():
        if DIAGONAL in H.flags:
            diag = []
            for i in range(H.rows):
                x = _re(H.entries[i][i])
                if x < 0:
                    x = mpf(0)
                if x == 0:
                    if pf <= 0:
                        raise SingularMatrixError("singular diagonal with p <= 0")
                    diag.append(mpf(0))
                else:
                    diag.append(mp.exp(pv * mp.log(x)) if pv != 1 else x)
            return diagonal_matrix(diag, cfg, nonneg=True, check=False)
        eig = hermitian_eig(H)
        tol = cfg.tol(H.fro_norm())
        clamped = [x if (not clamp_tol or x > tol) else mpf(0) for x in eig.eigenvalues]
        if any(x == 0 for x in clamped) and pf <= 0:
            raise SingularMatrixError("psd_power: singular matrix with p <= 0")
        fvals = [mp.exp(pv * mp.log(x)) if x > 0 else mpf(0) for x in clamped] \
            if pv != 1 else clamped
        u = eig.vectors.entries
        n = H.rows
        out = [[mp.fsum(u[i][k] * fvals[k] * _conj(u[j][k]) for k in range(n))
                for j in range(n)] for i in range(n)]
        flags = {HERMITIAN, PSD}
        if all(x > 0 for x in fvals):
            flags.add(POSITIVE_DEFINITE)
    return Matrix(out, cfg, flags, check=False)


def similarity_power(S: Matrix, lam: Matrix, p) -> Matrix:
    """(S diag(lam) S^-1)**p = S diag(lam**p) S^-1 for nonnegative lam.

    This is how fractional powers of a product of PSD matrices are formed:
    the (S, Lambda) certificate guarantees real nonnegative eigenvalues, so
    no nonsymmetric eigensolver is ever needed.
    """
    if NONNEG_DIAGONAL not in lam.flags:
        raise ContractViolation("similarity_power requires a nonnegative-diagonal Lambda")
    cfg = S.config
    pf = exponent_fraction(p)
    pv = exponent_value(p, cfg)
    n = S.rows
    s_inv = inverse(S)
    with cfg.workdps():
        powered = []
        for i in range(n):
            x = _re(lam.entries[i][i])
            if x <= 0:
                if pf <= 0:
                    raise SingularMatrixError("zero eigenvalue with p <= 0")
                powered.append(mpf(0))
            else:
                powered.append(mp.exp(pv * mp.log(x)) if pv != 1 else x)
        sl = [[S.entries[i][k] * powered[k] for k in range(n)] for i in range(n)]
    return Matrix(sl, cfg, check=False) @ s_inv


def loewner_leq(X: Matrix, Y: Matrix):
    """Test X <= Y in the PSD order; returns (verdict, margin).

    margin is the minimum eigenvalue of Y - X; the verdict allows a slip of
    tau relative to max(1, ||X||, ||Y||).
    """
    if X.dim != Y.dim:
        raise ValueError("dimension mismatch")
    cfg = X.config
    with cfg.workdps():
        diff = Matrix((Y - X).entries, cfg, (HERMITIAN,), check=False)
        eig = hermitian_eig(diff)
        margin = eig.eigenvalues[-1]
        scale = max(mpf(1), X.fro_norm(), Y.fro_norm())
        verdict = margin >= -cfg.tol(scale)
    return verdict, margin


# ---------------------------------------------------------------------------
# inverse, hadamard, compounds
# ---------------------------------------------------------------------------

def inverse(X: Matrix) -> Matrix:
    """Gauss-Jordan inverse with partial pivoting and a condition gate."""
    if not X.is_square():
        raise ValueError("inverse expects a square matrix")
    cfg = X.config
    n = X.rows
    with cfg.workdps():
        a = [[x for x in row] for row in X.entries]
        inv = [[mpf(1) if i == j else mpf(0) for j in range(n)] for i in range(n)]
        scale = X.fro_norm()
        if scale == 0:
            raise SingularMatrixError("zero matrix")
        hard_floor = scale * mpf(10) ** (-(cfg.digits - 2))
        for col in range(n):
            piv = max(range(col, n), key=lambda r: abs(a[r][col]))
            if abs(a[piv][col]) <= hard_floor:
                raise SingularMatrixError("matrix numerically singular")
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                inv[col], inv[piv] = inv[piv], inv[col]
            d = a[col][col]
            a[col] = [x / d for x in a[col]]
            inv[col] = [x / d for x in inv[col]]
            for r in range(n):
                if r == col:
                    continue
                f = a[r][col]
                if f == 0:
                    continue
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
        out = Matrix(inv, cfg, check=False)
        cond_estimate = scale * out.fro_norm()
        if cond_estimate > mpf(10) ** (cfg.digits // 2):
            raise SingularMatrixError(
                f"condition estimate {mp.nstr(cond_estimate, 5)} beyond 10^(digits/2)")
    return out


def hadamard(X: Matrix, Y: Matrix) -> Matrix:
    if X.dim != Y.dim:
        raise ValueError("dimension mismatch")
    with X.config.workdps():
        out = [[X.entries[i][j] * Y.entries[i][j] for j in range(X.cols)]
               for i in range(X.rows)]
    return Matrix(out, X.config, check=False)


def _det(rows_ix, cols_ix, entries, cfg):
    """Determinant of the submatrix entries[rows_ix][cols_ix] via LU."""
    k = len(rows_ix)
    a = [[entries[r][c] for c in cols_ix] for r in rows_ix]
    det = mpf(1)
    sign = 1
    for col in range(k):
        piv = max(range(col, k), key=lambda r: abs(a[r][col]))
        if a[piv][col] == 0:
            return mpf(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        det *= a[col][col]
        for r in range(col + 1, k):
            f = a[r][col] / a[col][col]
            if f == 0:
                continue
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return sign * det


def compound(X: Matrix, k: int) -> Matrix:
    """k-th compound: all k x k minors on lexicographic index subsets."""
    if not X.is_square():
        raise ValueError("compound expects a square matrix")
    d = X.rows
    if not 1 <= k <= d:
        raise ValueError(f"compound order {k} out of range 1..{d}")
    if k == 1:
        return Matrix(X.entries, X.config, X.flags, check=False)
    cfg = X.config
    subsets = list(itertools.combinations(range(d), k))
    with cfg.workdps():
        out = [[_det(ri, ci, X.entries, cfg) for ci in subsets] for ri in subsets]
    flags = set()
    if X.flags & {HERMITIAN, PSD, POSITIVE_DEFINITE}:
        flags.add(HERMITIAN)
    if X.flags & {PSD, POSITIVE_DEFINITE}:
        flags.add(PSD)
    if DIAGONAL in X.flags:
        flags.add(DIAGONAL)
    return Matrix(out, cfg, flags, check=False)

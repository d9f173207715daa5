"""Weak majorisation between singular value vectors, with diagnostics.

The verdict convention: partial-sum margins within tau of zero count as
satisfying the inequality (the theorems include equality cases), and such
reports carry boundary=True so searches can demand strict clearance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from mpmath import mp, mpf

from .numerics import PrecisionConfig, to_exact_decimal
from .linalg import Matrix, SingularValues, compound, svd_values


@dataclass(frozen=True)
class MajorisationReport:
    left: SingularValues
    right: SingularValues
    partial_margins: tuple        # sum_{j<=k} right_j - sum_{j<=k} left_j
    verdict: bool
    worst_k: int                  # 1-based index of the minimal margin
    boundary: bool                # |min margin| < tau * scale
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def min_margin(self):
        return self.partial_margins[self.worst_k - 1]

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "margins": [to_exact_decimal(m) for m in self.partial_margins],
            "worst_k": self.worst_k,
            "boundary": self.boundary,
        }
        if self.meta:
            out["meta"] = dict(self.meta)
        return out


def weak_majorisation_leq(a: SingularValues, b: SingularValues,
                          config: PrecisionConfig,
                          meta: dict | None = None) -> MajorisationReport:
    """Report on a <=_w b: every partial sum of a at most the matching one of b."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch {len(a)} vs {len(b)}")
    for vec in (a, b):
        for x, y in zip(vec.values, vec.values[1:]):
            if x < y:
                raise ValueError("singular values must be sorted descending")
    with config.workdps():
        margins = []
        sa = sb = mpf(0)
        for x, y in zip(a.values, b.values):
            sa += x
            sb += y
            margins.append(sb - sa)
        scale = max(mpf(1), sb)
        tol = config.tol(scale)
        worst = min(range(len(margins)), key=lambda i: (margins[i], -i))
        min_margin = margins[worst]
        verdict = min_margin >= -tol
        boundary = abs(min_margin) < tol
    return MajorisationReport(a, b, tuple(margins), verdict, worst + 1,
                              boundary, meta or {})


def weyl_crosscheck(X: Matrix, Y: Matrix) -> bool:
    """Verify the compound route agrees with the direct partial-product route.

    For every k, sigma_1 of the k-th compounds must match the top-k singular
    value products of the base matrices, and the two comparison verdicts may
    only differ inside the tolerance band.
    """
    if not X.is_square() or X.dim != Y.dim:
        raise ValueError("weyl_crosscheck expects square matrices of equal size")
    cfg = X.config
    d = X.rows
    sx, sy = svd_values(X), svd_values(Y)
    with cfg.workdps():
        px = py = mpf(1)
        for k in range(1, d + 1):
            px *= sx.values[k - 1]
            py *= sy.values[k - 1]
            cx = operator_top(compound(X, k))
            cy = operator_top(compound(Y, k))
            scale = max(mpf(1), px, py, cx, cy)
            tol = cfg.tol(scale)
            # the two routes compute the same quantities
            if abs(cx - px) > tol or abs(cy - py) > tol:
                return False
            direct = px <= py + tol
            via_compound = cx <= cy + tol
            if direct != via_compound and abs(px - py) > tol:
                return False
    return True


def operator_top(X: Matrix):
    return svd_values(X).values[0]

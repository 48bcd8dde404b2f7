"""Incidence matrices, exact characteristic polynomials and Hausdorff dimension.

Polynomials are lists of :class:`fractions.Fraction`, constant term first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import NonConvergence

__all__ = [
    "incidence_matrix", "char_poly", "spectral_radius", "perron_root", "hausdorff_dim",
    "WeightedGifs", "poly_divmod", "poly_mul", "poly_eval", "strong_components",
    "component_roots", "dimension_report",
]


def incidence_matrix(system) -> np.ndarray:
    """Entry (k, l) counts the terms of equation k whose target is l."""
    n = system.n
    M = np.zeros((n, n), dtype=np.int64)
    for k, eq in enumerate(system.equations):
        for _, t in eq:
            M[k, t] += 1
    return M


def _as_fractions(M) -> list:
    rows = [[Fraction(x) if not isinstance(x, (float, np.floating)) else Fraction(float(x))
             for x in row] for row in (M.tolist() if isinstance(M, np.ndarray) else M)]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix must be square")
    return rows


def char_poly(M) -> list:
    """det(xI - M) exactly, via reduction to Hessenberg form over Q."""
    H = _as_fractions(M)
    n = len(H)
    # similarity transforms to upper Hessenberg form
    for m in range(1, n - 1):
        piv = next((i for i in range(m, n) if H[i][m - 1] != 0), None)
        if piv is None:
            continue
        if piv != m:
            H[piv], H[m] = H[m], H[piv]
            for row in H:
                row[piv], row[m] = row[m], row[piv]
        pv = H[m][m - 1]
        for j in range(m + 1, n):
            u = H[j][m - 1] / pv
            if u == 0:
                continue
            rowj, rowm = H[j], H[m]
            for c in range(n):
                if rowm[c]:
                    rowj[c] -= u * rowm[c]
            for row in H:
                if row[j]:
                    row[m] += u * row[j]
    polys = [[Fraction(1)]]
    for m in range(n):
        p = [Fraction(0)] + polys[m]  # x * p_m
        p = _padd(p, [-H[m][m] * c for c in polys[m]])
        t = Fraction(1)
        for i in range(m - 1, -1, -1):
            t *= H[i + 1][i]
            if t == 0:
                break
            coef = t * H[i][m]
            if coef:
                p = _padd(p, [-coef * c for c in polys[i]])
        polys.append(p)
    return _trim(polys[n])


def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for k, c in enumerate(b):
        out[k] += c
    return out


def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def poly_mul(a: Sequence, b: Sequence) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def poly_divmod(a: Sequence, b: Sequence):
    """Exact quotient and remainder of rational polynomials."""
    a = [Fraction(c) for c in a]
    b = _trim([Fraction(c) for c in b])
    if not any(b):
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    while len(a) >= len(b) and any(a):
        k = len(a) - len(b)
        c = a[-1] / b[-1]
        q[k] = c
        for i, bc in enumerate(b):
            a[k + i] -= c * bc
        a.pop()
        a = _trim(a) if a else [Fraction(0)]
    return _trim(q), _trim(a or [Fraction(0)])


def poly_eval(p: Sequence, x):
    numeric = isinstance(x, (float, complex))
    acc = 0
    for c in reversed(p):
        acc = acc * x + (float(c) if numeric else c)
    return acc


def strong_components(M) -> tuple:
    """(count, labels) of the strongly connected components of the support of M."""
    A = csr_matrix((np.asarray(M, dtype=float) != 0).astype(np.int8))
    return connected_components(A, directed=True, connection="strong")


def perron_root(A, tol: float = 1e-13, maxiter: int = 200_000, fallback: bool = True) -> float:
    """Perron root of an irreducible nonnegative matrix.

    Power iteration on A + I (primitive whenever A is irreducible), stopped
    when the Collatz-Wielandt bounds min(Ax/x) <= rho <= max(Ax/x) agree to
    ``tol`` relative.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n == 1:
        return float(A[0, 0])
    B = A + np.eye(n)
    x = np.ones(n)
    for _ in range(maxiter):
        y = B @ x
        if np.any(x <= 0):
            break
        q = y / x
        lo, hi = q.min(), q.max()
        if hi - lo <= tol * hi:
            return float(0.5 * (lo + hi) - 1.0)
        x = y / y.max()
    if not fallback:
        raise NonConvergence(f"power iteration did not converge in {maxiter} steps")
    return _root_fallback(A)


def _root_fallback(A) -> float:
    try:
        ev = np.linalg.eigvals(np.asarray(A, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(str(exc)) from None
    return float(max(ev.real))


def component_roots(M) -> tuple:
    """Strong components of M and the Perron root of each diagonal block."""
    A = np.asarray(M, dtype=float)
    ncomp, labels = strong_components(A)
    roots = []
    for c in range(ncomp):
        idx = np.flatnonzero(labels == c)
        roots.append(perron_root(A[np.ix_(idx, idx)]))
    return ncomp, labels, roots


def spectral_radius(M, fallback: bool = True) -> float:
    """Perron root of a nonnegative square matrix (max over strong components)."""
    A = np.asarray(M, dtype=float) if not _has_fractions(M) else np.array(
        [[float(x) for x in row] for row in M])
    if A.size == 0:
        return 0.0
    if np.any(A < 0):
        raise ValueError("matrix must be nonnegative")
    ncomp, labels = strong_components(A)
    best = 0.0
    for c in range(ncomp):
        idx = np.flatnonzero(labels == c)
        best = max(best, perron_root(A[np.ix_(idx, idx)], fallback=fallback))
    return best


def _has_fractions(M) -> bool:
    if isinstance(M, np.ndarray):
        return M.dtype == object
    return any(isinstance(x, Fraction) for row in M for x in row)


@dataclass
class WeightedGifs:
    """GIFS with a contraction ratio per term: equations[k] = [(target, ratio), ...].

    Targets are 0-based attractor indices.
    """

    equations: list

    def __post_init__(self):
        n = len(self.equations)
        for k, eq in enumerate(self.equations):
            for t, r in eq:
                if not 0 <= t < n:
                    raise ValueError(f"equation {k + 1} targets unknown attractor {t + 1}")
                if not 0 < r < 1:
                    raise ValueError(f"ratio {r} outside (0, 1)")

    @property
    def n(self) -> int:
        return len(self.equations)

    def matrix(self, beta: float) -> np.ndarray:
        M = np.zeros((self.n, self.n))
        for k, eq in enumerate(self.equations):
            for t, r in eq:
                M[k, t] += r ** beta
        return M

    @classmethod
    def from_json(cls, data: dict, constants: dict | None = None) -> "WeightedGifs":
        """``{"equations": [[[target, ratio], ...], ...]}`` with 1-based targets.

        A ratio may be a float or a name from ``constants`` (embedded).
        """
        eqs = []
        for eq in data["equations"]:
            terms = []
            for t, r in eq:
                if isinstance(r, str):
                    if not constants or r not in constants:
                        raise ValueError(f"unknown ratio constant {r!r}")
                    r = abs(complex(constants[r]))
                terms.append((int(t) - 1, float(r)))
            eqs.append(terms)
        return cls(eqs)


def hausdorff_dim(system, ratio: float | None = None, tol: float = 1e-12) -> float:
    """Dimension of the attractors of an equal-ratio system or a :class:`WeightedGifs`.

    Equal ratio r: log(rho) / -log(r).  Weighted: the beta with rho(M(beta)) = 1,
    found by bisection.
    """
    if isinstance(system, WeightedGifs):
        return _weighted_dim(system, tol)
    r = ratio if ratio is not None else system.ratio
    if r is None or not 0 < r < 1:
        raise ValueError("an equal-ratio system needs a contraction ratio in (0, 1)")
    rho = spectral_radius(incidence_matrix(system))
    if rho <= 0:
        return 0.0
    return math.log(rho) / -math.log(r)


def _weighted_dim(w: WeightedGifs, tol: float) -> float:
    def rho(beta):
        return spectral_radius(w.matrix(beta))

    if rho(0.0) <= 1.0:
        return 0.0
    rmax = max(r for eq in w.equations for _, r in eq)
    mmax = max(len(eq) for eq in w.equations)
    hi = 2 * math.log(max(mmax, 2)) / -math.log(rmax)
    while rho(hi) >= 1.0:
        hi *= 2
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if rho(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def dimension_report(M, ratio: float | None = None) -> dict:
    """Matrix, exact polynomial, Perron root, beta and (best effort) its factor."""
    poly = char_poly(M)
    rho = spectral_radius(M)
    report = {
        "matrix": [[str(x) for x in row] for row in (M.tolist() if isinstance(M, np.ndarray) else M)],
        "char_poly": [str(c) for c in poly],
        "spectral_radius": rho,
    }
    if ratio is not None and rho > 0:
        report["beta"] = math.log(rho) / -math.log(ratio)
    factor = perron_factor(poly, rho)
    if factor is not None:
        report["perron_factor"] = [str(c) for c in factor]
    return report


def perron_factor(poly: Sequence, rho: float):
    """Irreducible rational factor of ``poly`` vanishing at ``rho`` (sympy), or None."""
    try:
        import sympy
    except ImportError:  # pragma: no cover
        return None
    x = sympy.Symbol("x")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * x ** k for k, c in enumerate(poly))
    try:
        _, factors = sympy.factor_list(expr, x)
    except Exception:  # best effort only
        return None
    best = None
    for f, _ in factors:
        coeffs = sympy.Poly(f, x).all_coeffs()[::-1]
        val = abs(sum(float(c) * rho ** k for k, c in enumerate(coeffs)))
        scale = sum(abs(float(c)) * rho ** k for k, c in enumerate(coeffs))
        if val <= 1e-8 * max(scale, 1.0):
            lead = coeffs[-1]
            cand = [Fraction(int(sympy.numer(c / lead)), int(sympy.denom(c / lead))) for c in coeffs]
            if best is None or len(cand) < len(best):
                best = cand
    return best

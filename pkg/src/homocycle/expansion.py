"""Expansion coefficients c0, a, c_{1,0} and c_1(alpha) from beta's Taylor data.

Two modes:

``paper``
    The literal (2 pi)-scaling of the Fourier-side integrals:
    ``a = (2 pi)^(b/2+2) / (2h) * det M * M M^T`` and
    ``c10 = Z [ (3 E4 - 2 E6) / (72 h) - (b+2) / (2 h^2) ]`` with
    ``Z = (2 pi)^(b/2) / sqrt(det hess)``.
``normalized``
    Coefficients of ``pi(T, alpha) ~ e^{hT} / T^{b/2+1} (c0 + c1(alpha)/T)``
    from the local limit theorem: ``c0 = (2 pi)^(-b/2) / (h sqrt(det hess))``,
    ``a = (c0/2) hess^-1`` and
    ``c10 = c0 [ E4/24 - E6/72 + (b+2)/(2h) ]``.

``E4`` and ``E6`` are Gaussian expectations (covariance ``hess^-1``) of
``fourth(v,v,v,v)`` and ``third(v,v,v)^2``.  The normalized curvature term
has the opposite sign from the paper-mode one; the census decides (see
the README).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import ConsistencyError
from .thermo import ThermoProfile

MODES = ("paper", "normalized")
TWO_PI = 2.0 * math.pi


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def factor_M(hess: np.ndarray) -> np.ndarray:
    """``M = L^{-T}`` with ``hess = L L^T``, so ``M^T hess M = I`` and ``det M > 0``."""
    hess = np.asarray(hess, dtype=float)
    try:
        L = np.linalg.cholesky(hess)
    except np.linalg.LinAlgError:
        raise ValueError("hess is not positive definite") from None
    return np.linalg.inv(L).T


def c0_leading(tp: ThermoProfile) -> float:
    return TWO_PI ** (-tp.b / 2) / (tp.h * math.sqrt(np.linalg.det(tp.hess)))


def a_matrix(tp: ThermoProfile, mode: str = "normalized", M: np.ndarray | None = None) -> np.ndarray:
    """Quadratic-form matrix of ``c_1(alpha) = -alpha^T a alpha + c10``.

    Built from ``det M * M M^T`` so any ``M`` with ``M^T hess M = I`` and
    ``det M > 0`` gives the same answer.
    """
    _check_mode(mode)
    M = factor_M(tp.hess) if M is None else np.asarray(M, dtype=float)
    core = np.linalg.det(M) * (M @ M.T)
    if mode == "paper":
        a = TWO_PI ** (tp.b / 2 + 2) / (2 * tp.h) * core
    else:
        a = TWO_PI ** (-tp.b / 2) / (2 * tp.h) * core
    return 0.5 * (a + a.T)


@lru_cache(maxsize=None)
def pairings(n: int) -> tuple:
    """All perfect matchings of ``range(n)`` as tuples of index pairs."""
    if n == 0:
        return ((),)
    out = []
    for k in range(1, n):
        rest = [i for i in range(1, n) if i != k]
        for sub in pairings(n - 2):
            out.append(((0, k),) + tuple((rest[a], rest[c]) for a, c in sub))
    return tuple(out)


def isserlis(T: np.ndarray, C: np.ndarray) -> float:
    """``E[T(v, ..., v)]`` for ``v ~ N(0, C)``, summing over all pairings."""
    n = T.ndim
    if n % 2:
        return 0.0
    letters = "abcdefghijkl"[:n]
    total = 0.0
    for match in pairings(n):
        spec = letters + "," + ",".join(letters[i] + letters[j] for i, j in match) + "->"
        total += float(np.einsum(spec, T, *([C] * len(match))))
    return total


def gaussian_moment(C: np.ndarray, tensor) -> float:
    """Gaussian expectation of a symmetric form under covariance ``C``.

    ``tensor`` is an even-order array (e.g. the fourth-order tensor, giving
    the 3-pairing E4) or a pair of order-3 tensors ``(S, T)`` for the
    15-pairing contraction ``E[S(v,v,v) T(v,v,v)]``.
    """
    C = np.asarray(C, dtype=float)
    if np.linalg.eigvalsh(0.5 * (C + C.T)).min() <= 0:
        raise ValueError("covariance must be positive definite")
    if isinstance(tensor, (tuple, list)):
        S, T = (np.asarray(t, dtype=float) for t in tensor)
        tensor = np.multiply.outer(S, T)
    return isserlis(np.asarray(tensor, dtype=float), C)


def c1_constant(tp: ThermoProfile, mode: str = "normalized") -> tuple[float, dict]:
    """``c_{1,0}`` and the ingredients it was assembled from."""
    _check_mode(mode)
    b, h = tp.b, tp.h
    C = np.linalg.inv(tp.hess)
    C = 0.5 * (C + C.T)
    E4 = gaussian_moment(C, tp.fourth)
    E6 = gaussian_moment(C, (tp.third, tp.third))
    Z = TWO_PI ** (b / 2) / math.sqrt(np.linalg.det(tp.hess))
    c0 = c0_leading(tp)
    paper = Z * ((3 * E4 - 2 * E6) / (72 * h) - (b + 2) / (2 * h * h))
    scaled_paper = TWO_PI ** (-b) * paper
    normalized = c0 * (E4 / 24 - E6 / 72 + (b + 2) / (2 * h))
    breakdown = {
        "E4": E4,
        "E6": E6,
        "Z": Z,
        "c10_paper": paper,
        "c10_paper_rescaled": scaled_paper,
        "c10_normalized": normalized,
    }
    return (paper if mode == "paper" else normalized), breakdown


def linear_term(tp: ThermoProfile) -> np.ndarray:
    """``b_i = E[third(v,v,v) v_i]``; zero whenever beta is even."""
    C = np.linalg.inv(tp.hess)
    return np.array(
        [isserlis(np.multiply.outer(tp.third, np.eye(tp.b)[i]), C) for i in range(tp.b)]
    )


@dataclass(frozen=True)
class ExpansionReport:
    mode: str
    h: float
    c0: float
    a: np.ndarray
    c10: float
    M: np.ndarray
    breakdown: dict = field(default_factory=dict)

    @property
    def b(self) -> int:
        return self.a.shape[0]

    def c1(self, alpha) -> float:
        return c1_of_alpha(self, alpha)

    def predict(self, T: float, alpha=None, order: int = 1) -> float:
        """Truncated expansion of ``pi(T, alpha)``; meaningful in normalized mode."""
        base = math.exp(self.h * T) / T ** (self.b / 2 + 1)
        if order == 0:
            return self.c0 * base
        alpha = np.zeros(self.b) if alpha is None else alpha
        return (self.c0 + self.c1(alpha) / T) * base


def expansion_report(tp: ThermoProfile, mode: str = "normalized") -> ExpansionReport:
    _check_mode(mode)
    M = factor_M(tp.hess)
    if np.linalg.det(M) <= 0:
        raise ConsistencyError("det M is not positive")
    resid = np.abs(np.linalg.inv(M @ M.T) - tp.hess).max() / np.abs(tp.hess).max()
    if resid > 1e-10:
        raise ConsistencyError(f"(M M^T)^-1 differs from hess by {resid:.3e}")
    a = a_matrix(tp, mode, M)
    if np.linalg.eigvalsh(a).min() <= 0:
        raise ConsistencyError("coefficient matrix a is not positive definite")
    c10, breakdown = c1_constant(tp, mode)
    lin = linear_term(tp)
    breakdown["b_linear"] = lin
    if np.abs(lin).max(initial=0.0) > 1e-6 * max(1.0, abs(breakdown["E4"])):
        raise ConsistencyError("linear term b_i is not zero")
    return ExpansionReport(mode, tp.h, c0_leading(tp), a, c10, M, breakdown)


def c1_of_alpha(rep: ExpansionReport, alpha) -> float:
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (rep.b,):
        raise ValueError(f"class vector must have dimension {rep.b}, got shape {alpha.shape}")
    return -float(alpha @ rep.a @ alpha) + rep.c10


# closed-form examples


@dataclass(frozen=True)
class RoseConstants:
    h: float
    xi: float
    d: np.ndarray  # d_i
    dij: np.ndarray  # symmetric, zero diagonal
    d1: float  # sum over ordered pairs i != j
    d2: float
    c10: float  # prefactor 1/(2 pi^2)
    c10_short_prefactor: float  # prefactor 1/(2 pi)
    c10_wick: float  # mixed terms with their pairing multiplicity
    c10_k2_print: float | None
    a: np.ndarray

    def hess(self, lengths) -> np.ndarray:
        l = np.asarray(lengths, dtype=float)
        e = np.exp(-self.h * l)
        return np.diag(e / (l @ e))

    def fourth(self, lengths) -> np.ndarray:
        """The closed-form fourth-derivative tensor at 0."""
        l = np.asarray(lengths, dtype=float)
        e = np.exp(-self.h * l)
        S = float(l @ e)
        k = len(l)
        F = np.zeros((k,) * 4)
        for i in range(k):
            F[i, i, i, i] = 8 * self.d[i] * e[i] ** 2 / S
            for j in range(k):
                if i != j:
                    v = 24 * self.dij[i, j] * e[i] * e[j] / S
                    for p in ((i, i, j, j), (i, j, i, j), (i, j, j, i)):
                        F[p] = v
        return F


def _rose_entropy(l: np.ndarray) -> float:
    # 2 sum exp(-h l) = 1; decreasing in h
    lo, hi = 0.0, math.log(2 * len(l)) / l.min()
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 2 * np.exp(-mid * l).sum() > 1:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            break
    return 0.5 * (lo + hi)


def rose_constants(lengths: Sequence[float], h: float | None = None) -> RoseConstants:
    l = np.asarray([float(x) for x in lengths])
    if l.ndim != 1 or len(l) < 1 or np.any(l <= 0):
        raise ValueError("rose lengths must be positive")
    k = len(l)
    h = _rose_entropy(l) if h is None else float(h)
    e = np.exp(-h * l)
    S = float(l @ e)
    Q = float(l * l @ e)
    xi = TWO_PI ** (k / 2 + 2) * S ** (k / 2 + 1) / (2 * h * math.sqrt(float(np.prod(e))))
    d = (2 * np.exp(h * l) - 12 * l / S + 6 * Q / S**2) / 16
    dij = (Q / S**2 - (l[:, None] + l[None, :]) / S) / 24
    np.fill_diagonal(dij, 0.0)
    d1 = float(dij.sum())
    d2 = float(d.sum())
    curv = (k + 2) / (2 * h * S)
    c10 = (d1 + d2 - curv) * xi / (2 * math.pi**2)
    c10_print = (d1 + d2 - curv) * xi / (2 * math.pi)
    c10_wick = (d2 + 3 * d1 - curv) * xi / (2 * math.pi**2)
    k2 = None
    if k == 2:
        l1, l2 = l
        k2 = (
            4 * math.pi**3 * math.sqrt(math.exp(h * (l1 + l2))) / (96 * h)
            * ((108 + 12 * (math.exp(h * l1) + math.exp(h * l2))) * S**2 - 38 * l1 * l2 - 63 * Q)
        )
    return RoseConstants(h, xi, d, dij, d1, d2, c10, c10_print, c10_wick, k2, np.diag(xi * np.exp(h * l)))


@dataclass(frozen=True)
class TwoLoopConstants:
    h: float
    c: float
    a11: float
    a22: float
    a11_integral: float
    a22_integral: float
    hess_paper: np.ndarray  # measure taken as mu(i) = exp(-h l_i)
    hess_engine: np.ndarray | None
    discrepancy: bool | None


def two_loop_constants(
    lengths: Sequence[float], h: float, hess_engine: np.ndarray | None = None, rtol: float = 1e-6
) -> TwoLoopConstants:
    l1, l2, l3 = (float(x) for x in lengths)
    e1, e2, e3 = (math.exp(-h * x) for x in (l1, l2, l3))
    S = l1 * e1 + l2 * e2 + l3 * e3
    root = math.sqrt(math.exp(-h * (l1 + l2)) + math.exp(-h * (l1 + l3)))
    c = 8 * math.pi**3 * S**2 / (h * root)
    a11 = c * math.exp(h * l1)
    a22 = 4 * c * math.exp(h * (l2 + l3)) / (math.exp(h * l2) + math.exp(h * l3))
    cp = 1 / (2 * S)
    # the two displayed Gaussian integrals, evaluated term by term
    s1 = 2 * cp * e1
    s2 = 0.5 * cp * (e2 + e3)
    g = 2 * math.pi**2 / h
    a11_int = g * math.sqrt(TWO_PI / s2) * math.sqrt(TWO_PI) / s1**1.5
    a22_int = g * math.sqrt(TWO_PI / s1) * math.sqrt(TWO_PI) / s2**1.5
    hess_paper = cp * np.diag([2 * e1, 0.5 * (e2 + e3)])
    disc = None
    if hess_engine is not None:
        hess_engine = np.asarray(hess_engine, dtype=float)
        disc = bool(np.abs(hess_engine - hess_paper).max() > rtol * np.abs(hess_engine).max())
    return TwoLoopConstants(h, c, a11, a22, a11_int, a22_int, hess_paper, hess_engine, disc)


def engine_two_loop_hess(mu: np.ndarray, rbar: float) -> np.ndarray:
    """``diag(2 mu(1), (mu(3) + mu(5)) / 2) / rbar`` with 1-based symbol numbers."""
    return np.diag([2 * mu[0], 0.5 * (mu[2] + mu[4])]) / rbar

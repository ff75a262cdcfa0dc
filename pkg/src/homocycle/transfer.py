"""Transition matrix, weighted transfer matrices, Perron data and the
equilibrium Markov measure of a one-coordinate potential.

For the potential ``-s*r + <u, f>`` with ``r(x) = length(x0)`` the
pressure is the log of the Perron root of

    B(s, u)[i, j] = A[i, j] * exp(-s * length(j) + <u, f(j)>)

(weight attached to the entered symbol).  Attaching it to the source
symbol gives a diagonally similar matrix with the same spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, ConvergenceError, InadmissibleGraphError
from .graph import HomologyLabeling, SymbolTable


def transition_matrix(st: SymbolTable, check: bool = True) -> np.ndarray:
    """0/1 matrix with ``A[i, j] = 1`` iff symbol ``j`` can follow symbol ``i``.

    Backtracking (``j = reverse(i)``) is allowed.  With ``check`` the
    matrix must be irreducible and aperiodic.
    """
    A = (st.terminal[:, None] == st.initial[None, :]).astype(np.int64)
    if check:
        if not is_irreducible(A):
            raise InadmissibleGraphError(
                "disconnected graph: the transition matrix is not irreducible"
            )
        if primitivity_exponent(A) is None:
            raise InadmissibleGraphError(
                "bipartite: the transition matrix is periodic; "
                "passing to the square of the shift is not supported"
            )
    A.setflags(write=False)
    return A


def is_irreducible(A: np.ndarray) -> bool:
    N = A.shape[0]
    reach = (A > 0) | np.eye(N, dtype=bool)
    for _ in range(max(1, int(np.ceil(np.log2(max(N, 2)))) + 1)):
        reach = reach | ((reach.astype(np.int64) @ reach.astype(np.int64)) > 0)
    return bool(reach.all())


def primitivity_exponent(A: np.ndarray) -> int | None:
    """Smallest ``k <= N**2`` with ``A**k > 0`` entrywise, or ``None``."""
    N = A.shape[0]
    B = (A > 0).astype(np.int64)
    P = B.copy()
    for k in range(1, N * N + 1):
        if P.all():
            return k
        P = ((P @ B) > 0).astype(np.int64)
    return None


@dataclass(frozen=True)
class PerronData:
    eigenvalue: float
    right: np.ndarray
    left: np.ndarray
    residual: float
    iterations: int
    eigenvalue_right: float
    eigenvalue_left: float


def perron(B: np.ndarray, tol: float = 1e-12, max_iter: int = 200_000) -> PerronData:
    """Dominant eigenpair of a non-negative primitive matrix by power iteration.

    Left and right vectors are iterated together from the uniform vector;
    iteration stops once both scaled residuals are below ``tol`` and no
    longer improving.  ``right`` has max entry 1 and ``left @ right == 1``.
    """
    B = np.asarray(B, dtype=float)
    N = B.shape[0]
    v = np.ones(N)
    u = np.ones(N)
    best = np.inf
    stalled = 0
    it = 0
    res = np.inf
    lam = np.nan
    while it < max_iter:
        it += 1
        v = B @ v
        v /= v.max()
        u = u @ B
        u /= u.max()
        Bv = B @ v
        uB = u @ B
        lam = float(u @ Bv) / float(u @ v)
        res = max(
            float(np.abs(Bv - lam * v).max()) / (lam * float(v.max())),
            float(np.abs(uB - lam * u).max()) / (lam * float(u.max())),
        )
        if res <= tol:
            if res < 0.5 * best:
                best = res
                stalled = 0
            else:
                stalled += 1
                if stalled >= 3 or res == 0.0:
                    break
        elif res < best:
            best = res
    if not res <= tol:
        raise ConvergenceError(f"power iteration did not converge (residual {res:.3e})", res)
    v = B @ v
    v /= v.max()
    u = u / float(u @ v)
    lam_r = float((B @ v).sum() / v.sum())
    lam_l = float((u @ B).sum() / u.sum())
    return PerronData(lam, v, u, res, it, lam_r, lam_l)


class TransferSystem:
    """Precomputed data for evaluating ``B(s, u)`` and the pressure quickly."""

    def __init__(self, st: SymbolTable, hl: HomologyLabeling | None = None, f: np.ndarray | None = None):
        self.st = st
        self.A = transition_matrix(st)
        self.lengths = st.length_float
        if f is None:
            f = hl.f if hl is not None else np.zeros((st.size, 0))
        self.f = np.asarray(f, dtype=float)
        self.b = self.f.shape[1]
        self.log_spectral_radius = float(np.log(perron(self.A).eigenvalue))

    def weights(self, s: float, u=None) -> np.ndarray:
        expo = -s * self.lengths
        if u is not None and self.b:
            expo = expo + self.f @ np.asarray(u, dtype=float)
        return np.exp(expo)

    def matrix(self, s: float, u=None, convention: str = "target") -> np.ndarray:
        w = self.weights(s, u)
        if convention == "target":
            return self.A * w[None, :]
        if convention == "source":
            return self.A * w[:, None]
        raise ValueError(f"unknown convention {convention!r}")

    def perron(self, s: float, u=None) -> PerronData:
        return perron(self.matrix(s, u))

    def pressure(self, s: float, u=None, convention: str = "target") -> float:
        return float(np.log(perron(self.matrix(s, u, convention)).eigenvalue))

    def pressure_and_slope(self, s: float, u=None) -> tuple[float, float]:
        """Pressure and its exact s-derivative ``-sum_j length(j) * mu_j``."""
        pd = self.perron(s, u)
        mu = pd.left * pd.right
        mu /= mu.sum()
        return float(np.log(pd.eigenvalue)), -float(self.lengths @ mu)


def weighted_matrix(st: SymbolTable, hl: HomologyLabeling, s: float, u=None, convention: str = "target") -> np.ndarray:
    return TransferSystem(st, hl).matrix(s, u, convention)


def pressure(st: SymbolTable, hl: HomologyLabeling, s: float, u=None) -> float:
    return TransferSystem(st, hl).pressure(s, u)


@dataclass(frozen=True)
class MarkovMeasure:
    """Stationary Markov measure on symbol sequences.

    ``mu[s]`` is the one-cylinder weight and ``P[s, t]`` the transition
    probability; longer cylinders multiply along the word.
    """

    mu: np.ndarray
    P: np.ndarray
    lengths: np.ndarray

    @property
    def size(self) -> int:
        return len(self.mu)

    def cylinder(self, word: Sequence[int]) -> float:
        if not word:
            return 1.0
        value = float(self.mu[word[0]])
        for a, c in zip(word, word[1:]):
            value *= float(self.P[a, c])
        return value

    @property
    def rbar(self) -> float:
        """Integral of the roof function ``r(x) = length(x0)``."""
        return float(self.lengths @ self.mu)

    def integral(self, phi) -> float:
        return float(np.asarray(phi, dtype=float) @ self.mu)

    def fundamental_matrix(self) -> np.ndarray:
        N = self.size
        return np.linalg.inv(np.eye(N) - self.P + np.outer(np.ones(N), self.mu))


def equilibrium_measure(system: TransferSystem, h: float, tol: float = 1e-10) -> MarkovMeasure:
    """Markov measure of the potential ``-h*r``; requires zero pressure at ``h``."""
    B = system.matrix(h)
    pd = perron(B)
    if abs(np.log(pd.eigenvalue)) > tol:
        raise ConsistencyError(
            f"not at equilibrium: pressure {np.log(pd.eigenvalue):.3e} at s={h!r}"
        )
    v = pd.right
    P = B * v[None, :] / (pd.eigenvalue * v[:, None])
    P /= P.sum(axis=1, keepdims=True)
    mu = pd.left * pd.right
    mu = mu / mu.sum()
    return MarkovMeasure(mu, P, system.lengths.copy())


def correlation_moment(mm: MarkovMeasure, f: np.ndarray, i: int, j: int, n: int) -> float:
    """``E[S_i S_j]`` with ``S = sum_{t<n} f(x_t)`` under the stationary chain.

    Joint moments are carried forward one step at a time, so the cost is
    ``O(n * N**2)`` rather than exponential in ``n``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    f = np.asarray(f, dtype=float)
    fi, fj = f[:, i], f[:, j]
    m0 = mm.mu.copy()
    mi = m0 * fi
    mj = m0 * fj
    mij = m0 * fi * fj
    for _ in range(n - 1):
        m0n = m0 @ mm.P
        min_ = mi @ mm.P
        mjn = mj @ mm.P
        mij = mij @ mm.P + min_ * fj + mjn * fi + m0n * fi * fj
        mi = min_ + m0n * fi
        mj = mjn + m0n * fj
        m0 = m0n
    return float(mij.sum())


def asymptotic_covariance(mm: MarkovMeasure, phis: Sequence[np.ndarray]) -> np.ndarray:
    """Green-Kubo covariance matrix of one-coordinate observables.

    ``sum_{k in Z} Cov(phi_a(x_0), phi_b(x_k))``; at zero pressure this is the
    Hessian of the pressure in the directions ``phi_a``.
    """
    Z = mm.fundamental_matrix()
    centred = [np.asarray(p, dtype=float) - mm.integral(p) for p in phis]
    K = len(centred)
    out = np.empty((K, K))
    ZmI = Z - np.eye(mm.size)
    for a in range(K):
        for c in range(K):
            pa, pc = centred[a], centred[c]
            out[a, c] = (
                float((mm.mu * pa) @ pc)
                + float((mm.mu * pa) @ (ZmI @ pc))
                + float((mm.mu * pc) @ (ZmI @ pa))
            )
    return 0.5 * (out + out.T)

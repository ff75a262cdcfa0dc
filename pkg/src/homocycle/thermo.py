"""Entropy, the implicit function beta(u), and its Taylor tensors at u = 0.

``beta(u)`` is the root in ``s`` of ``P(-s*r + <u, f>) = 0``.  Its
derivatives at 0 come from implicit differentiation, using pressure
partials obtained by finite differences of the log-Perron root.  With
``rbar = int r dmu`` (so ``P_s = -rbar``) and ``grad beta(0) = 0``:

    hess_ij    = P_ij / rbar
    third_ijm  = (P_ijm + P_si hess_jm + P_sj hess_im + P_sm hess_ij) / rbar
    fourth_ijmn = (P_ijmn + P_ss (hess_ij hess_mn + hess_im hess_jn + hess_in hess_jm)
                   + sum over the 6 index pairs {a,b}|{c,d} of P_sab hess_cd
                   + sum over the 4 indices a|{b,c,d} of P_sa third_bcd) / rbar
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import CalibrationError, ConsistencyError
from .numdiff import CachedFunction, derivative_tensor, richardson_partial, symmetrize
from .transfer import MarkovMeasure, TransferSystem, asymptotic_covariance, equilibrium_measure

DEFAULT_S_STEP = 2.5e-2
DEFAULT_U_STEP = 5e-2
_EPS = np.finfo(float).eps


def _root_decreasing(fun_and_slope, lo: float, hi: float, x0: float, max_iter: int = 200) -> float:
    """Root of a decreasing function by Newton steps kept inside a shrinking bracket."""
    x = x0
    for _ in range(max_iter):
        p, dp = fun_and_slope(x)
        if p == 0.0:
            return x
        if p > 0:
            lo = max(lo, x)
        else:
            hi = min(hi, x)
        xn = x - p / dp if dp != 0 else 0.5 * (lo + hi)
        if not lo <= xn <= hi:
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= 4 * _EPS * max(abs(x), 1.0):
            return xn
        x = xn
    raise ConsistencyError(f"root bracket [{lo}, {hi}] did not close")


def solve_entropy(system: TransferSystem) -> float:
    """Unique ``h`` with ``P(-h r) = 0``."""
    lmin = float(system.lengths.min())
    # the root sits exactly at the upper end when all lengths are equal
    hi = system.log_spectral_radius / lmin * (1 + 1e-9) + 1e-12
    lo = 0.0
    if not system.pressure(hi) <= 0.0 < system.pressure(lo):
        raise ConsistencyError("entropy bracket failed")
    return _root_decreasing(lambda s: system.pressure_and_slope(s), lo, hi, 0.5 * (lo + hi))


def solve_beta(system: TransferSystem, u, h: float | None = None) -> float:
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("u must be finite")
    lo = 0.0 if h is None else h  # beta(u) >= beta(0) by convexity and evenness
    lmin = float(system.lengths.min())
    shift = float(np.abs(system.f @ u).max()) if system.b else 0.0
    hi = (system.log_spectral_radius + shift) / lmin * (1 + 1e-9) + 1e-12
    x0 = lo if h is not None else 0.5 * (lo + hi)
    return _root_decreasing(lambda s: system.pressure_and_slope(s, u), lo, hi, x0)


@dataclass(frozen=True)
class PressureDerivatives:
    """Partials of ``P(-s r + <u, f>)`` at ``(h, 0)``; first order exact, the rest by FD."""

    h: float
    P_s: float
    P_u: np.ndarray
    P_ss: float
    P_su: np.ndarray
    P_uu: np.ndarray
    P_suu: np.ndarray
    P_uuu: np.ndarray
    P_uuuu: np.ndarray
    steps: tuple
    calibration_error: float
    exact_hessian: np.ndarray = field(repr=False)

    @property
    def b(self) -> int:
        return len(self.P_u)


def _exact_first_and_second(system: TransferSystem, mm: MarkovMeasure):
    phis = [-system.lengths] + [system.f[:, i] for i in range(system.b)]
    grad = np.array([mm.integral(p) for p in phis])
    return grad, asymptotic_covariance(mm, phis)


def pressure_derivatives(
    system: TransferSystem,
    h: float,
    s_step: float = DEFAULT_S_STEP,
    u_step: float = DEFAULT_U_STEP,
    tol: float = 1e-7,
    scales=(1.0, 0.5, 2.0, 0.25),
) -> PressureDerivatives:
    """Pressure partials up to order 4 in ``u`` (order 2 in ``s``).

    The step pair is calibrated: FD first and second partials must match
    the exact gradient (integrals against the equilibrium measure) and
    the exact Hessian (Green-Kubo covariances) to ``tol`` relative.
    """
    b = system.b
    mm = equilibrium_measure(system, h)
    grad_exact, hess_exact = _exact_first_and_second(system, mm)
    func = CachedFunction(lambda x: system.pressure(x[0], x[1:]))
    x0 = np.zeros(b + 1)
    x0[0] = h
    best = np.inf
    for scale in scales:
        steps = [s_step * scale] + [u_step * scale] * b
        g_fd = derivative_tensor(func, x0, 1, steps)
        H_fd = derivative_tensor(func, x0, 2, steps)
        err = max(
            float(np.abs(g_fd - grad_exact).max()) / float(np.abs(grad_exact).max()),
            float(np.abs(H_fd - hess_exact).max()) / float(np.abs(hess_exact).max()),
        )
        best = min(best, err)
        if err <= tol:
            break
    else:
        raise CalibrationError(
            f"finite-difference calibration failed: best relative error {best:.3e}", best
        )

    def partial(s_count, u_idx):
        counts = [s_count] + [0] * b
        for i in u_idx:
            counts[1 + i] += 1
        return richardson_partial(func, x0, counts, steps)

    def tensor(s_count, order):
        out = np.zeros((b,) * order)
        for idx in itertools.combinations_with_replacement(range(b), order):
            value = partial(s_count, idx)
            for perm in set(itertools.permutations(idx)):
                out[perm] = value
        return out

    return PressureDerivatives(
        h=h,
        P_s=float(grad_exact[0]),
        P_u=grad_exact[1:].copy(),
        P_ss=float(H_fd[0, 0]),
        P_su=H_fd[0, 1:].copy(),
        P_uu=H_fd[1:, 1:].copy(),
        P_suu=tensor(1, 2),
        P_uuu=tensor(0, 3),
        P_uuuu=tensor(0, 4),
        steps=tuple(steps),
        calibration_error=err,
        exact_hessian=hess_exact,
    )


@dataclass(frozen=True)
class ThermoProfile:
    h: float
    rbar: float
    grad: np.ndarray
    hess: np.ndarray
    third: np.ndarray
    fourth: np.ndarray
    derivatives: PressureDerivatives | None = field(default=None, repr=False)

    @property
    def b(self) -> int:
        return len(self.grad)

    def check(self, system: TransferSystem | None = None) -> "ThermoProfile":
        if system is not None:
            p = system.pressure(self.h)
            if abs(p) > 1e-10:
                raise ConsistencyError(f"pressure at h is {p:.3e}, not 0")
        if np.abs(self.grad).max(initial=0.0) > 1e-10:
            raise ConsistencyError(
                "int f dmu != 0; the class labels are not centred under the equilibrium state"
            )
        if self.b and np.linalg.eigvalsh(self.hess).min() <= 0:
            raise ConsistencyError("Hessian of beta is not positive definite")
        if np.abs(self.third).max(initial=0.0) > 1e-8:
            raise ConsistencyError("third derivative of beta is not zero")
        return self


def beta_derivatives(pd: PressureDerivatives) -> ThermoProfile:
    rbar = -pd.P_s
    grad = pd.P_u / rbar
    H = symmetrize(pd.P_uu / rbar)
    Psu, Psuu = pd.P_su, pd.P_suu
    third = (
        pd.P_uuu
        + np.einsum("i,jm->ijm", Psu, H)
        + np.einsum("j,im->ijm", Psu, H)
        + np.einsum("m,ij->ijm", Psu, H)
    ) / rbar
    third = symmetrize(third)
    pairs = (
        np.einsum("ij,mn->ijmn", H, H)
        + np.einsum("im,jn->ijmn", H, H)
        + np.einsum("in,jm->ijmn", H, H)
    )
    six = (
        np.einsum("ij,mn->ijmn", Psuu, H)
        + np.einsum("im,jn->ijmn", Psuu, H)
        + np.einsum("in,jm->ijmn", Psuu, H)
        + np.einsum("jm,in->ijmn", Psuu, H)
        + np.einsum("jn,im->ijmn", Psuu, H)
        + np.einsum("mn,ij->ijmn", Psuu, H)
    )
    four = (
        np.einsum("i,jmn->ijmn", Psu, third)
        + np.einsum("j,imn->ijmn", Psu, third)
        + np.einsum("m,ijn->ijmn", Psu, third)
        + np.einsum("n,ijm->ijmn", Psu, third)
    )
    fourth = symmetrize((pd.P_uuuu + pd.P_ss * pairs + six + four) / rbar)
    return ThermoProfile(pd.h, rbar, grad, H, third, fourth, pd)


def thermo_profile(system: TransferSystem, **fd_options) -> ThermoProfile:
    h = solve_entropy(system)
    pd = pressure_derivatives(system, h, **fd_options)
    return beta_derivatives(pd).check(system)


def beta_taylor_fd(system: TransferSystem, h: float, step: float = DEFAULT_U_STEP, orders=(2, 3, 4)) -> dict:
    """Derivative tensors of ``u -> solve_beta(u)`` at 0 by direct finite differences.

    Independent of the pressure-partial route; used to cross-check it.
    """
    func = CachedFunction(lambda u: solve_beta(system, u, h))
    x0 = np.zeros(system.b)
    steps = [step] * system.b
    return {k: derivative_tensor(func, x0, k, steps) for k in orders}


def beta_expansion(tp: ThermoProfile, u) -> float:
    """``h + u.H.u/2 + fourth(u,u,u,u)/24`` (odd terms vanish)."""
    u = np.asarray(u, dtype=float)
    return (
        tp.h
        + 0.5 * float(u @ tp.hess @ u)
        + float(np.einsum("ijmn,i,j,m,n->", tp.fourth, u, u, u, u)) / 24.0
    )

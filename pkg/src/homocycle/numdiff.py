"""Central finite differences on tensor-product stencils with Richardson extrapolation."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

# 4th-order accurate central stencils: order -> (offsets, weights)
STENCILS = {
    1: ((-2, -1, 1, 2), tuple(Fraction(c, 12) for c in (1, -8, 8, -1))),
    2: ((-2, -1, 0, 1, 2), tuple(Fraction(c, 12) for c in (-1, 16, -30, 16, -1))),
    3: ((-3, -2, -1, 1, 2, 3), tuple(Fraction(c, 8) for c in (1, -8, 13, -13, 8, -1))),
    4: ((-3, -2, -1, 0, 1, 2, 3), tuple(Fraction(c, 6) for c in (-1, 12, -39, 56, -39, 12, -1))),
}
STENCIL_ORDER = 4


class CachedFunction:
    """Memoises a scalar function of a point; stencils share many points."""

    def __init__(self, func: Callable[[np.ndarray], float]):
        self.func = func
        self.cache: dict[tuple, float] = {}

    def __call__(self, x) -> float:
        key = tuple(float(t) for t in x)
        try:
            return self.cache[key]
        except KeyError:
            value = self.cache[key] = float(self.func(np.array(key)))
            return value


def mixed_partial(func, x0: Sequence[float], counts: Sequence[int], steps: Sequence[float]) -> float:
    """``d^|counts| func / prod dx_k^counts[k]`` at ``x0``, error O(step^4)."""
    x0 = np.asarray(x0, dtype=float)
    axes = [k for k, c in enumerate(counts) if c]
    if not axes:
        return float(func(x0))
    per_axis = [list(zip(*STENCILS[counts[k]])) for k in axes]
    total = 0.0
    for combo in itertools.product(*per_axis):
        x = x0.copy()
        weight = 1.0
        for k, (off, w) in zip(axes, combo):
            x[k] += off * steps[k]
            weight *= float(w)
        total += weight * func(x)
    scale = 1.0
    for k in axes:
        scale *= steps[k] ** counts[k]
    return total / scale


def richardson_partial(func, x0, counts, steps) -> float:
    """One Richardson step on step ratio 2 lifts the error to O(step^6)."""
    coarse = mixed_partial(func, x0, counts, steps)
    fine = mixed_partial(func, x0, counts, [h / 2 for h in steps])
    r = 2 ** STENCIL_ORDER
    return (r * fine - coarse) / (r - 1)


def derivative_tensor(func, x0, order: int, steps, variables: Sequence[int] | None = None) -> np.ndarray:
    """Full symmetric tensor of ``order``-th partials over ``variables``."""
    d = len(x0)
    variables = list(range(d)) if variables is None else list(variables)
    k = len(variables)
    out = np.zeros((k,) * order)
    for idx in itertools.combinations_with_replacement(range(k), order):
        counts = [0] * d
        for i in idx:
            counts[variables[i]] += 1
        value = richardson_partial(func, x0, counts, steps)
        for perm in set(itertools.permutations(idx)):
            out[perm] = value
    return out


def symmetrize(T: np.ndarray) -> np.ndarray:
    if T.ndim < 2:
        return T.copy()
    perms = list(itertools.permutations(range(T.ndim)))
    return sum(np.transpose(T, p) for p in perms) / len(perms)

import numpy as np
import pytest

from homocycle.graph import homology_labeling, oriented_double
from homocycle.reference import figure_one, rose, two_loop
from homocycle.transfer import TransferSystem


class Built:
    def __init__(self, g, tree_edges=None):
        self.g = g
        self.st = oriented_double(g)
        self.hl = homology_labeling(g, self.st, tree_edges)
        self._system = None

    @property
    def system(self):
        if self._system is None:
            self._system = TransferSystem(self.st, self.hl)
        return self._system


def build(g, tree_edges=None):
    return Built(g, tree_edges)


@pytest.fixture
def rose2():
    return build(rose([1, 1]))


@pytest.fixture
def rose2_sqrt2():
    return build(rose([1, {"q1": 1}]))


@pytest.fixture
def fig1():
    return build(figure_one())


@pytest.fixture
def twoloop():
    return build(two_loop())


def random_lengths(rng, k, lo=0.5, hi=2.0):
    """Random decimal lengths, kept as short decimal strings so they parse exactly."""
    return [f"{x:.6f}" for x in rng.uniform(lo, hi, k)]


def rel(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300))

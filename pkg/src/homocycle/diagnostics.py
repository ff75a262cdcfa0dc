"""Runtime evidence for the non-lattice and Diophantine conditions on cycle lengths.

Neither condition can be certified numerically.  The lattice test is
exact, because lengths live in Q(sqrt2, sqrt3, sqrt5): a set of lengths
sits in a discrete subgroup ``delta * Z`` iff all pairwise ratios are
rational.  For the Diophantine ratio we report continued-fraction partial
quotients, which is evidence only.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from fractions import Fraction

from .census import fixed_point_table, primitive_orbit_counts
from .graph import HomologyLabeling, SymbolTable
from .lengths import ExactLength

CF_DEPTH = 30
SEARCH_DEPTH = 8


@dataclass(frozen=True)
class LatticeReport:
    lattice: bool
    delta: ExactLength | None  # generator when lattice
    n_lengths: int


@dataclass(frozen=True)
class DiophantineDiagnostic:
    lengths: tuple  # the three cycle lengths, increasing
    xi: float | None
    xi_exact: Fraction | None  # set when xi is rational
    quotients: tuple
    max_quotient: int | None
    condition_b: str  # "violated", "evidence", "inconclusive"
    note: str
    weak_mixing: LatticeReport


def _fraction_gcd(values) -> Fraction:
    num = 0
    den = 1
    for v in values:
        num = math.gcd(num, v.numerator)
        den = den * v.denominator // math.gcd(den, v.denominator)
    return Fraction(num, den)


def lattice_test(lengths) -> LatticeReport:
    lengths = list(lengths)
    if not lengths:
        return LatticeReport(False, None, 0)
    base = lengths[0]
    ratios = []
    for L in lengths:
        r = L.ratio_if_commensurable(base)
        if r is None:
            return LatticeReport(False, None, len(lengths))
        ratios.append(r)
    return LatticeReport(True, base * _fraction_gcd(ratios), len(lengths))


def continued_fraction(x, depth: int = CF_DEPTH) -> list[int]:
    """Partial quotients of ``x`` (a Fraction, exact, or a Decimal, approximate)."""
    out = []
    if isinstance(x, Fraction):
        for _ in range(depth):
            a = math.floor(x)
            out.append(int(a))
            x -= a
            if x == 0:
                break
            x = 1 / x
        return out
    for _ in range(depth):
        a = int(x.to_integral_value(rounding=decimal.ROUND_FLOOR))
        out.append(a)
        x -= a
        if x.is_zero():
            break
        x = 1 / x
    return out


def xi_value(l1: ExactLength, l2: ExactLength, l3: ExactLength, digits: int = 150):
    """``(l1 - l2) / (l2 - l3)`` as a Fraction when rational, else a Decimal."""
    num, den = l1 - l2, l2 - l3
    exact = num.ratio_if_commensurable(den)
    if exact is not None:
        return exact
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        return num.to_decimal(digits + 10) / den.to_decimal(digits + 10)


def prime_cycle_lengths(st: SymbolTable, hl: HomologyLabeling, depth: int = SEARCH_DEPTH) -> set:
    """Distinct lengths of prime cycles with at most ``depth`` symbols."""
    table = primitive_orbit_counts(fixed_point_table(st, hl, depth))
    return {
        table.usage_length(usage)
        for layer in table.orbits[1:]
        for (_, usage), count in layer.items()
        if count
    }


def conditions_diagnostics(
    st: SymbolTable, hl: HomologyLabeling, depth: int = SEARCH_DEPTH, cf_depth: int = CF_DEPTH
) -> DiophantineDiagnostic:
    distinct = sorted(prime_cycle_lengths(st, hl, depth))
    lattice = lattice_test(distinct)
    if len(distinct) < 3:
        return DiophantineDiagnostic(
            tuple(distinct), None, None, (), None, "inconclusive",
            "fewer than three distinct cycle lengths", lattice,
        )
    l1, l2, l3 = distinct[:3]
    x = xi_value(l1, l2, l3)
    with decimal.localcontext() as ctx:
        ctx.prec = 160
        q = continued_fraction(x if isinstance(x, Fraction) else +x, cf_depth)
    if isinstance(x, Fraction):
        status, note, exact = "violated", "xi is rational", x
    else:
        exact = None
        status = "evidence"
        tail = q[1:]
        if tail and all(a == 1 for a in tail):
            note = "all partial quotients 1: best possible approximation constant"
        else:
            note = f"max partial quotient {max(tail or q)} over depth {len(q)}; bounded quotients are not proven"
    return DiophantineDiagnostic(
        (l1, l2, l3), float(x), exact, tuple(q), max(q[1:] or q), status, note, lattice
    )

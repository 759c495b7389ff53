"""Finitely many buyer values: exact posteriors, pricing, and menu checks.

Arithmetic is exact when inputs are :class:`fractions.Fraction`; ties in
pricing are resolved without tolerances, which matters because the
incentive constraints of interest bind with equality.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from infodesign.core import FiniteSignal, InfeasibleConstraints, ZeroProbabilityRealization

F = Fraction


class PriceTie(enum.Enum):
    LOWEST = "lowest"
    HIGHEST = "highest"


@dataclass(frozen=True)
class MultiMarket:
    values: tuple

    def __post_init__(self):
        if len(self.values) < 2:
            raise ValueError("need at least two values")
        if any(v <= 0 for v in self.values) or any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("values must be positive and strictly increasing")

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SimplexType:
    probs: tuple

    def __post_init__(self):
        if any(p < 0 for p in self.probs):
            raise ValueError("probabilities must be nonnegative")
        s = sum(self.probs)
        if abs(float(s) - 1) > 1e-12:
            raise ValueError(f"probabilities sum to {s}")

    def __len__(self):
        return len(self.probs)


@dataclass(frozen=True)
class MultiMenu:
    types: tuple[SimplexType, ...]
    weights: tuple
    signals: tuple[FiniteSignal, ...]

    def __post_init__(self):
        if not (len(self.types) == len(self.weights) == len(self.signals)) or not self.types:
            raise ValueError("types, weights and signals must match in length")
        if abs(float(sum(self.weights)) - 1) > 1e-12:
            raise ValueError("weights must sum to 1")


def _joint(theta: SimplexType, sig: FiniteSignal, s: int) -> list:
    """θ(v)·π(s|v) for every value."""
    return [p * row[s] for p, row in zip(theta.probs, sig.likelihood)]


def posterior_many(theta: SimplexType, sig: FiniteSignal, s: int) -> SimplexType:
    joint = _joint(theta, sig, s)
    total = sum(joint)
    if total == 0:
        raise ZeroProbabilityRealization(f"realization {s} has zero probability")
    return SimplexType(tuple(j / total for j in joint))


def _revenues(mass: Sequence, mkt: MultiMarket) -> list:
    """Revenue v_i · Σ_{k≥i} mass_k for every candidate price."""
    out = []
    tail = 0
    for v, m in zip(reversed(mkt.values), reversed(mass)):
        tail = tail + m
        out.append(v * tail)
    return out[::-1]


def _best_price(mass: Sequence, mkt: MultiMarket, tie: PriceTie) -> tuple[int, object]:
    rev = _revenues(mass, mkt)
    best = max(rev)
    idx = [i for i, r in enumerate(rev) if r == best]
    i = idx[0] if tie is PriceTie.LOWEST else idx[-1]
    return i, best


def optimal_price_many(belief: SimplexType, mkt: MultiMarket, tie_break: PriceTie = PriceTie.LOWEST) -> tuple[int, object]:
    """(price index, expected profit) maximizing p·Pr(v ≥ p)."""
    return _best_price(belief.probs, mkt, tie_break)


def _realization_prices(theta, sig, mkt, tie):
    """(joint masses, price index, revenue) for each positive-probability realization."""
    out = []
    for s in range(sig.realization_count):
        joint = _joint(theta, sig, s)
        if sum(joint) == 0:
            continue
        i, rev = _best_price(joint, mkt, tie)
        out.append((joint, i, rev))
    return out


def type_signal_value(theta: SimplexType, sig: FiniteSignal, mkt: MultiMarket, tie_break: PriceTie = PriceTie.LOWEST):
    """Expected profit of a type that prices optimally after every realization."""
    return sum((rev for _, _, rev in _realization_prices(theta, sig, mkt, tie_break)), 0)


def type_buyer_surplus(theta: SimplexType, sig: FiniteSignal, mkt: MultiMarket, tie_break: PriceTie = PriceTie.LOWEST):
    total = 0
    for joint, i, _ in _realization_prices(theta, sig, mkt, tie_break):
        p = mkt.values[i]
        total += sum(m * (v - p) for m, v in zip(joint, mkt.values) if v > p)
    return total


@dataclass(frozen=True)
class ManyICReport:
    ok: bool
    values: tuple  # values[i][j]: type i using signal j
    max_gain: object
    ties: int


def menu_ic_check_many(menu: MultiMenu, mkt: MultiMarket, tie_break: PriceTie = PriceTie.LOWEST, tol=1e-9) -> ManyICReport:
    vals = tuple(tuple(type_signal_value(t, s, mkt, tie_break) for s in menu.signals) for t in menu.types)
    gains = [vals[i][j] - vals[i][i] for i in range(len(vals)) for j in range(len(vals)) if i != j]
    max_gain = max(gains) if gains else 0
    ties = sum(1 for g in gains if g == 0)
    return ManyICReport(float(max_gain) <= tol, vals, max_gain, ties)


def efficient_outcome_check(menu: MultiMenu, mkt: MultiMarket, tie_break: PriceTie = PriceTie.LOWEST) -> bool:
    """Does every buyer value trade when each type uses its own signal?"""
    for t, s in zip(menu.types, menu.signals):
        for joint, i, _ in _realization_prices(t, s, mkt, tie_break):
            if any(m > 0 and v < mkt.values[i] for m, v in zip(joint, mkt.values)):
                return False
    return True


def menu_outcome(menu: MultiMenu, mkt: MultiMarket, tie_break: PriceTie = PriceTie.LOWEST) -> tuple:
    """Ex ante (buyer surplus, seller profit) under truthful selection."""
    u = sum(w * type_buyer_surplus(t, s, mkt, tie_break) for t, s, w in zip(menu.types, menu.signals, menu.weights))
    p = sum(w * type_signal_value(t, s, mkt, tie_break) for t, s, w in zip(menu.types, menu.signals, menu.weights))
    return u, p


def uninformative(n: int) -> FiniteSignal:
    return FiniteSignal(tuple((F(1),) for _ in range(n)))


def fully_informative(n: int) -> FiniteSignal:
    return FiniteSignal(tuple(tuple(F(int(i == j)) for j in range(n)) for i in range(n)))


# --------------------------------------------------------------------------
# Cheapest efficient public signal for one type
# --------------------------------------------------------------------------


def _solve_exact(rows, rhs):
    """Gaussian elimination over Fractions; None if singular."""
    n = len(rows)
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c] / m[c][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return [m[i][n] / m[i][i] for i in range(n)]


@dataclass(frozen=True)
class MinRentResult:
    signal: FiniteSignal
    profit: object
    pooled: tuple  # x_v = Pr(s0 | v)
    residual_efficient: bool


def rent_lp(mkt: MultiMarket, types: Sequence[SimplexType], target: int):
    """Constraint data of the cheapest-efficient-signal program.

    Variables are ``(x_2, ..., x_n, z)`` with ``x_1 = 1``: x_v is the chance a
    value-v buyer lands in the pooled low-price realization, z is the
    target's profit on the residual realization. Constraints ``A·y ≤ b``;
    objective ``c·y + c0`` is minimized.
    """
    n = mkt.n
    vals = mkt.values
    th = types[target].probs
    a_rows, b_rows = [], []
    # obedience at the pooled realization: v_1·Σθx ≥ v_j·Σ_{k≥j}θ_k x_k
    for t in types:
        for j in range(1, n):
            row = [0] * n
            for k in range(1, n):
                row[k - 1] += -vals[0] * t.probs[k]
                if k >= j:
                    row[k - 1] += vals[j] * t.probs[k]
            a_rows.append(row)
            b_rows.append(vals[0] * t.probs[0])
    # epigraph: z ≥ v_j·Σ_{k≥j}θ_k(1 − x_k)
    for j in range(n):
        row = [0] * n
        const = 0
        for k in range(max(j, 1), n):
            row[k - 1] += -vals[j] * th[k]
            const += vals[j] * th[k]
        row[n - 1] = -1
        a_rows.append(row)
        b_rows.append(-const)
    for k in range(n - 1):
        lo = [0] * n
        lo[k] = -1
        hi = [0] * n
        hi[k] = 1
        a_rows += [lo, hi]
        b_rows += [0, 1]
    c = [vals[0] * th[k] for k in range(1, n)] + [1]
    c0 = vals[0] * th[0]
    return a_rows, b_rows, c, c0


def min_rent_efficient_public(mkt: MultiMarket, types: Sequence[SimplexType], target: int) -> MinRentResult:
    """Public two-realization signal minimizing the target type's profit.

    Every low-value buyer lands in a pooled realization that all types must
    be willing to price at v₁; the residual is priced optimally by the
    target. Solved exactly by enumerating the vertices of the feasible set.
    """
    a_rows, b_rows, c, c0 = rent_lp(mkt, types, target)
    n = len(c)
    best, best_y = None, None
    for combo in itertools.combinations(range(len(a_rows)), n):
        y = _solve_exact([a_rows[i] for i in combo], [b_rows[i] for i in combo])
        if y is None:
            continue
        if all(sum(a * v for a, v in zip(r, y)) <= b for r, b in zip(a_rows, b_rows)):
            val = sum(ci * yi for ci, yi in zip(c, y)) + c0
            if best is None or val < best or (val == best and y[:-1] > best_y[:-1]):
                best, best_y = val, y
    if best is None:
        raise InfeasibleConstraints("no feasible pooled signal")
    x = (F(1),) + tuple(best_y[:-1])
    sig = FiniteSignal(tuple((xi, 1 - xi) for xi in x))
    th = types[target]
    resid = [p * (1 - xi) for p, xi in zip(th.probs, x)]
    resid_ok = True
    if sum(resid) > 0:
        i, _ = _best_price(resid, mkt, PriceTie.LOWEST)
        resid_ok = all(m == 0 or v >= mkt.values[i] for m, v in zip(resid, mkt.values))
    return MinRentResult(sig, best, x, resid_ok)


# --------------------------------------------------------------------------
# Worked three-value example
# --------------------------------------------------------------------------


def example_market(values=(1, 3, 4)) -> MultiMarket:
    return MultiMarket(tuple(F(v) for v in values))


def example_types() -> tuple[SimplexType, ...]:
    return (
        SimplexType((F(1, 2), F(1, 4), F(1, 4))),
        SimplexType((F(1, 2), F(1, 2), F(0))),
        SimplexType((F(1, 2), F(0), F(1, 2))),
    )


def example_menu() -> MultiMenu:
    shared = FiniteSignal(((F(1), F(0)), (F(1, 2), F(1, 2)), (F(1, 2), F(1, 2))))
    third = FiniteSignal(((F(1), F(0)), (F(2, 3), F(1, 3)), (F(1, 3), F(2, 3))))
    return MultiMenu(example_types(), (F(1, 3),) * 3, (shared, shared, third))


def no_data_buyer_surplus(menu: MultiMenu, mkt: MultiMarket, tie_break: PriceTie = PriceTie.LOWEST):
    null = uninformative(mkt.n)
    return sum(w * type_buyer_surplus(t, null, mkt, tie_break) for t, w in zip(menu.types, menu.weights))


def efficient_public_grid(mkt: MultiMarket, types: Sequence[SimplexType], denominator: int = 12):
    """All two-realization public signals with likelihoods on a grid of 1/denominator
    that every type prices efficiently."""
    ticks = [F(k, denominator) for k in range(denominator + 1)]
    out = []
    for col in itertools.product(ticks, repeat=mkt.n):
        sig = FiniteSignal(tuple((p, 1 - p) for p in col))
        menu = MultiMenu(tuple(types), (F(1, len(types)),) * len(types), (sig,) * len(types))
        if efficient_outcome_check(menu, mkt):
            out.append(sig)
    return out


def epsilon_type(eps: float, n: int) -> SimplexType:
    """Type with probabilities ε^{n-1}, ..., ε, and the remainder on the top value."""
    head = [eps ** (n - 1 - k) for k in range(n - 1)]
    return SimplexType(tuple(head) + (1 - sum(head),))


def greedy_pooling_signal(theta: SimplexType, mkt: MultiMarket) -> FiniteSignal:
    """Efficient obedient signal for one type that pools as much as possible downward.

    Realization j recommends price v_j. It takes every remaining value-j buyer
    and the same largest fraction c of each higher value's remaining mass
    that keeps the type willing to charge v_j.
    """
    n = mkt.n
    vals = mkt.values
    remaining = [1.0] * n
    cols = []
    for j in range(n):
        take = [0.0] * n
        take[j] = remaining[j]
        c = 1.0 if j < n - 1 else 0.0
        base = vals[j] * theta.probs[j] * remaining[j]
        above = sum(theta.probs[k] * remaining[k] for k in range(j + 1, n))
        for i in range(j + 1, n):
            higher = sum(theta.probs[k] * remaining[k] for k in range(i, n))
            denom = vals[i] * higher - vals[j] * above
            if denom > 0:
                c = min(c, base / denom)
        for k in range(j + 1, n):
            take[k] = c * remaining[k]
        for k in range(n):
            remaining[k] -= take[k]
        cols.append(take)
    rows = tuple(tuple(cols[j][v] for j in range(n)) for v in range(n))
    return FiniteSignal(rows)

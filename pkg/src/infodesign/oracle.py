"""Brute-force and Monte-Carlo cross-checks of the analytic solvers.

Randomness comes from numpy's counter-based Philox generator. A run with
seed ``s`` splits its samples into fixed-size chunks; chunk ``k`` draws from
``Philox(SeedSequence(s).spawn(K)[k])``. Chunk sums are combined with
``math.fsum`` in chunk order, so estimates do not depend on the thread count.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from infodesign.beliefs import TIE_TOL
from infodesign.core import BinarySignal, FiniteSignal, MarketPrimitives, TypeDistribution, WelfareOutcome
from infodesign.geometry import convex_hull, distances_outside_polygon
from infodesign.mechanisms import DirectMechanism, item_profit, item_surplus
from infodesign.persuasion import binary_outcomes, outcome_of_signal

CHUNK = 1 << 16


@dataclass(frozen=True)
class OracleConfig:
    grid_step: float = 0.05
    realization_cap: int = 3
    rng_seed: int = 20240601
    sample_count: int = 1_000_000

    def __post_init__(self):
        if not 0 < self.grid_step < 1:
            raise ValueError("grid_step must lie in (0, 1)")
        if abs(round(1 / self.grid_step) * self.grid_step - 1) > 1e-9:
            raise ValueError("grid_step must divide 1")
        if not 1 <= self.realization_cap <= 3:
            raise ValueError("realization_cap must be 1, 2 or 3")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must be a 64-bit unsigned integer")

    @property
    def ticks(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, int(round(1 / self.grid_step)) + 1)


def thread_count() -> int:
    env = os.environ.get("INFODESIGN_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def binary_grid(step: float) -> tuple[np.ndarray, np.ndarray]:
    """All (α, β) on the grid with β ≥ α."""
    t = np.linspace(0.0, 1.0, int(round(1 / step)) + 1)
    aa, bb = np.meshgrid(t, t, indexing="ij")
    keep = bb >= aa - 1e-15
    return aa[keep], bb[keep]


@dataclass(frozen=True)
class OutcomeCloud:
    points: np.ndarray
    labels: tuple[str, ...]

    def hull(self) -> np.ndarray:
        return convex_hull(self.points)


def _simplex_grid(step: float, k: int):
    n = int(round(1 / step))
    for parts in itertools.product(range(n + 1), repeat=k - 1):
        if sum(parts) <= n:
            yield tuple(p / n for p in parts) + ((n - sum(parts)) / n,)


def enumerate_public_outcomes(mkt: MarketPrimitives, dist: TypeDistribution, cfg: OracleConfig) -> OutcomeCloud:
    """Outcomes of every binary public signal on the grid, plus three-realization
    signals on a coarser grid when ``realization_cap`` allows."""
    a, b = binary_grid(cfg.grid_step)
    pts = [binary_outcomes(a, b, mkt, dist)]
    labels = [f"bin:{float(x)!r},{float(y)!r}" for x, y in zip(a, b)]
    if cfg.realization_cap >= 3:
        coarse = max(0.25, cfg.grid_step)
        rows = list(_simplex_grid(coarse, 3))
        extra = []
        for lo in rows:
            for hi in rows:
                sig = FiniteSignal((lo, hi))
                extra.append(outcome_of_signal(sig, mkt, dist).as_array())
                labels.append(f"tri:{lo}|{hi}")
        pts.append(np.array(extra))
    return OutcomeCloud(np.vstack(pts), tuple(labels))


def _responses(theta: float, a: np.ndarray, b: np.ndarray, mkt: MarketPrimitives):
    """Best response of type θ to binary signals; returns effective (α, β) and profit."""
    opts = [(a, b), (np.zeros_like(a), np.zeros_like(b)), (np.ones_like(a), np.ones_like(b)), (1 - a, 1 - b)]
    profits = np.stack([item_profit(theta, x, y, mkt) for x, y in opts])
    # first maximizer wins so obedience is preferred on ties
    best = np.argmax(profits >= profits.max(axis=0) - 1e-12, axis=0)
    ea = np.choose(best, [x for x, _ in opts])
    eb = np.choose(best, [y for _, y in opts])
    return ea, eb, profits.max(axis=0)


@dataclass(frozen=True)
class MenuCloud:
    points: np.ndarray
    menus: np.ndarray  # signal indices per type
    max_outside: float


def enumerate_small_menus(
    mkt: MarketPrimitives,
    dist: TypeDistribution,
    cfg: OracleConfig,
    public: OutcomeCloud | None = None,
) -> MenuCloud:
    """Outcomes of every IC menu assigning a grid binary signal to each atom type.

    ``max_outside`` is the largest distance from a menu outcome to the convex
    hull of the public-signal cloud.
    """
    th, w = dist.atoms()
    if dist.segments() or not 1 <= len(th) <= 3:
        raise ValueError("menu enumeration needs a discrete distribution with at most 3 types")
    a, b = binary_grid(cfg.grid_step)
    vals, us, ps = [], [], []
    for t in th:
        ea, eb, v = _responses(float(t), a, b, mkt)
        vals.append(v)
        us.append(item_surplus(t, ea, eb, mkt))
        ps.append(item_profit(t, ea, eb, mkt))
    m = len(th)
    k = len(a)
    idx = np.indices((k,) * m).reshape(m, -1)
    ok = np.ones(idx.shape[1], dtype=bool)
    for i in range(m):
        own = vals[i][idx[i]]
        for j in range(m):
            if j != i:
                ok &= own >= vals[i][idx[j]] - 1e-12
    idx = idx[:, ok]
    u = sum(w[i] * us[i][idx[i]] for i in range(m))
    p = sum(w[i] * ps[i][idx[i]] for i in range(m))
    pts = np.column_stack([u, p])
    if public is None:
        public = enumerate_public_outcomes(mkt, dist, cfg)
    hull = public.hull()
    uniq = np.unique(np.round(pts, 12), axis=0)
    outside = float(distances_outside_polygon(hull, uniq).max()) if len(uniq) else 0.0
    return MenuCloud(pts, idx.T, outside)


# --------------------------------------------------------------------------
# Monte Carlo
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloEstimate:
    buyer_surplus: float
    seller_profit: float
    se_buyer: float
    se_seller: float
    samples: int

    def agrees_with(self, target: WelfareOutcome, k: float = 3.0) -> bool:
        du = abs(self.buyer_surplus - target.buyer_surplus)
        dp = abs(self.seller_profit - target.seller_profit)
        return du <= k * self.se_buyer + 1e-12 and dp <= k * self.se_seller + 1e-12


def sample_types(dist: TypeDistribution, rng: np.random.Generator, n: int) -> np.ndarray:
    th, w = dist.atoms()
    segs = dist.segments()
    masses = list(w) + [d * (hi - lo) for lo, hi, d in segs]
    comp = rng.choice(len(masses), size=n, p=np.asarray(masses) / sum(masses))
    u = rng.random(n)
    out = np.empty(n)
    na = len(th)
    for c in range(len(masses)):
        sel = comp == c
        if c < na:
            out[sel] = th[c]
        else:
            lo, hi, _ = segs[c - na]
            out[sel] = lo + (hi - lo) * u[sel]
    return out


def _chunk_sums(game, mkt, dist, seq: np.random.SeedSequence, n: int):
    rng = np.random.Generator(np.random.Philox(seq))
    theta = sample_types(dist, rng, n)
    v_high = rng.random(n) < theta
    price = game(theta, v_high, rng)
    value = np.where(v_high, mkt.high, mkt.low)
    sale = value >= price - 1e-12
    profit = np.where(sale, price, 0.0)
    surplus = np.where(sale, value - price, 0.0)
    return (float(surplus.sum()), float((surplus**2).sum()), float(profit.sum()), float((profit**2).sum()))


def _signal_game(sig: FiniteSignal, mkt: MarketPrimitives, mu0: float):
    like = sig.as_array()
    cum = np.cumsum(like, axis=1)
    cum[:, -1] = 1.0
    prob = mu0 * like[1] + (1 - mu0) * like[0]
    mus = np.where(prob > 0, mu0 * like[1] / np.where(prob > 0, prob, 1.0), mu0)

    def game(theta, v_high, rng):
        u = rng.random(len(theta))
        s = np.where(v_high, np.searchsorted(cum[1], u, side="right"), np.searchsorted(cum[0], u, side="right"))
        s = np.minimum(s, like.shape[1] - 1)
        mu = mus[s]
        num = theta * mu * (1 - mu0)
        den = num + (1 - theta) * (1 - mu) * mu0
        t = np.where(den > 0, num / np.where(den > 0, den, 1.0), theta)
        return np.where(t > mkt.ratio + TIE_TOL, mkt.high, mkt.low)

    return game


def _menu_game(mech: DirectMechanism, mkt: MarketPrimitives):
    grid = np.asarray(mech.grid)
    alpha = np.asarray(mech.alpha)
    beta = np.asarray(mech.beta)

    def game(theta, v_high, rng):
        k = np.searchsorted(grid, theta)
        k = np.clip(k, 0, len(grid) - 1)
        if not np.allclose(grid[k], theta):
            raise ValueError("simulated types must lie on the mechanism grid")
        rate = np.where(v_high, beta[k], alpha[k])
        flag = rng.random(len(theta)) < rate
        return np.where(flag, mkt.high, mkt.low)

    return game


def simulate_game(game_spec, mkt: MarketPrimitives, dist: TypeDistribution, cfg: OracleConfig) -> MonteCarloEstimate:
    """Monte-Carlo estimate of (U, Π) for a public signal or a direct mechanism."""
    if isinstance(game_spec, BinarySignal):
        game_spec = game_spec.to_finite()
    if isinstance(game_spec, FiniteSignal):
        game = _signal_game(game_spec, mkt, dist.mean())
    elif isinstance(game_spec, DirectMechanism):
        game = _menu_game(game_spec, mkt)
    else:
        raise TypeError(f"cannot simulate {type(game_spec).__name__}")
    n = cfg.sample_count
    sizes = [CHUNK] * (n // CHUNK) + ([n % CHUNK] if n % CHUNK else [])
    seqs = np.random.SeedSequence(cfg.rng_seed).spawn(len(sizes))
    with ThreadPoolExecutor(max_workers=thread_count()) as ex:
        sums = list(ex.map(lambda a: _chunk_sums(game, mkt, dist, *a), zip(seqs, sizes)))
    su, su2, sp, sp2 = (math.fsum(s[i] for s in sums) for i in range(4))
    mu_u, mu_p = su / n, sp / n
    var_u = max(su2 / n - mu_u**2, 0.0) * n / (n - 1)
    var_p = max(sp2 / n - mu_p**2, 0.0) * n / (n - 1)
    return MonteCarloEstimate(mu_u, mu_p, math.sqrt(var_u / n), math.sqrt(var_p / n), n)


def oracle_report(check: str, passed: bool, max_violation: float, cfg: OracleConfig) -> str:
    return json.dumps({"check": check, "pass": bool(passed), "max_violation": float(max_violation), "config": asdict(cfg)}, sort_keys=True)

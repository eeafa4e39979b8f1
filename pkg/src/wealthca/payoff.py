"""Prisoner's-dilemma utility on the torus: payoffs, TPS, wealth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Coord, Pattern, window_indices


@dataclass(frozen=True)
class PayoffParams:
    """Two-player payoff table (T, R, P, S) plus the neighborhood mode.

    With self_play a cell also plays against its own state, so K = 9
    opponents out of the 3x3 Moore window; without it K = 8.
    """

    t: float = 3.0
    r: float = 1.0
    p: float = 0.0
    s: float = 0.0
    self_play: bool = True

    @property
    def k(self) -> int:
        return 9 if self.self_play else 8


DEFAULT_PARAMS = PayoffParams()


def pair_payoff(a: int, b: int, params: PayoffParams = DEFAULT_PARAMS) -> float:
    """Payoff received by a player in state a against an opponent in state b.

    State 0 is cooperate, 1 is defect.
    """
    if a == 0:
        return params.r if b == 0 else params.s
    return params.t if b == 0 else params.p


def total_payoff_grid(p: Pattern,
                      params: PayoffParams = DEFAULT_PARAMS) -> np.ndarray:
    """(n, n) array of each cell's summed payoff against its K opponents."""
    bits = np.asarray(p.cells, dtype=np.int64)
    idx = window_indices(p.n)
    windows = bits[idx]  # (N, 9), center first
    if params.self_play:
        n_coop = 9 - windows.sum(axis=1)
    else:
        n_coop = 8 - windows[:, 1:].sum(axis=1)
    n_def = params.k - n_coop
    coop_income = params.r * n_coop + params.s * n_def
    def_income = params.t * n_coop + params.p * n_def
    totals = np.where(bits == 1, def_income, coop_income)
    return totals.reshape(p.n, p.n)


def cell_total_payoff(p: Pattern, c: Coord,
                      params: PayoffParams = DEFAULT_PARAMS) -> float:
    n = p.n
    a = p.at(c.i, c.j)
    total = 0.0
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if (di, dj) == (0, 0) and not params.self_play:
                continue
            total += pair_payoff(a, p.at(c.i + di, c.j + dj), params)
    return total


def cell_utility(p: Pattern, c: Coord,
                 params: PayoffParams = DEFAULT_PARAMS) -> float:
    """Total payoff normalized by the number of opponents."""
    return cell_total_payoff(p, c, params) / params.k


def tps(p: Pattern, params: PayoffParams = DEFAULT_PARAMS) -> float:
    """Total payoff sum over all cells; integer-valued for integer payoffs."""
    return float(total_payoff_grid(p, params).sum())


def wealth(p: Pattern, params: PayoffParams = DEFAULT_PARAMS) -> float:
    """Average shared income per agent: TPS / (K * n^2). All-cooperate = 1."""
    return tps(p, params) / (params.k * p.n * p.n)


def expected_wealth(pi_c: float,
                    params: PayoffParams = DEFAULT_PARAMS) -> float:
    """Mean-field wealth for a population cooperating at rate pi_c."""
    if not 0.0 <= pi_c <= 1.0:
        raise ValueError(f"cooperation rate must be in [0, 1], got {pi_c}")
    pi_d = 1.0 - pi_c
    payoff_d = params.p * pi_d + params.t * pi_c
    payoff_c = params.r * pi_c + params.s * pi_d
    return pi_d * payoff_d + pi_c * payoff_c


@dataclass(frozen=True)
class Characteristic:
    """Summary tuple (W, TPS; n, n^2, b, b/n^2) of a pattern."""

    wealth: float
    tps: float
    n: int
    area: int
    ones: int
    density: float


def characteristic(p: Pattern,
                   params: PayoffParams = DEFAULT_PARAMS) -> Characteristic:
    total = tps(p, params)
    area = p.n * p.n
    ones = p.ones
    return Characteristic(
        wealth=total / (params.k * area),
        tps=total,
        n=p.n,
        area=area,
        ones=ones,
        density=ones / area,
    )


def tps_of_bits(bits: np.ndarray, n: int,
                params: PayoffParams = DEFAULT_PARAMS) -> float:
    """TPS of a flat 0/1 array without building a Pattern (hot path)."""
    bits = bits.astype(np.int64, copy=False)
    windows = bits[window_indices(n)]
    if params.self_play:
        n_coop = 9 - windows.sum(axis=1)
    else:
        n_coop = 8 - windows[:, 1:].sum(axis=1)
    n_def = params.k - n_coop
    totals = np.where(
        bits == 1,
        params.t * n_coop + params.p * n_def,
        params.r * n_coop + params.s * n_def,
    )
    return float(totals.sum())

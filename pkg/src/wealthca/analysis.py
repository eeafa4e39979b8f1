"""Structure analyzers, closed-form optima, exhaustive oracle, experiments."""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ca import CaConfig, CaRunResult, run_ca
from .ga import GaConfig, run_ga
from .grid import Pattern, symmetry_images
from .payoff import DEFAULT_PARAMS, PayoffParams, tps_of_bits

# Unique 5x5 optimum (up to symmetry), oriented so that border growth below
# keeps the added dominoes consistent across the torus seam.
_BASE5 = (
    "00000",
    "10110",
    "10000",
    "00010",
    "11010",
)

ORACLE_MAX_N = 4
ORACLE_MAX_N_LARGE = 5


@dataclass(frozen=True)
class StructureReport:
    points: int
    dominoes: int
    singularities: int
    ones: int
    zero_cells: int


def count_points(p: Pattern) -> int:
    """1-cells whose eight Moore neighbors are all 0."""
    n = p.n
    count = 0
    for i in range(n):
        for j in range(n):
            if p.at(i, j) == 1 and all(
                    p.at(i + di, j + dj) == 0
                    for di in (-1, 0, 1) for dj in (-1, 0, 1)
                    if (di, dj) != (0, 0)):
                count += 1
    return count


def count_dominoes(p: Pattern) -> int:
    """Adjacent 1-pairs whose surrounding 10-cell hull is all 0."""
    n = p.n
    count = 0
    for i in range(n):
        for j in range(n):
            if p.at(i, j) != 1:
                continue
            if p.at(i, j + 1) == 1:
                hull = [(i - 1, j - 1), (i - 1, j), (i - 1, j + 1),
                        (i - 1, j + 2), (i, j - 1), (i, j + 2),
                        (i + 1, j - 1), (i + 1, j), (i + 1, j + 1),
                        (i + 1, j + 2)]
                if all(p.at(a, b) == 0 for a, b in hull):
                    count += 1
            if p.at(i + 1, j) == 1:
                hull = [(i - 1, j - 1), (i, j - 1), (i + 1, j - 1),
                        (i + 2, j - 1), (i - 1, j), (i + 2, j),
                        (i - 1, j + 1), (i, j + 1), (i + 1, j + 1),
                        (i + 2, j + 1)]
                if all(p.at(a, b) == 0 for a, b in hull):
                    count += 1
    return count


def detect_singularities(p: Pattern) -> list[tuple[int, int]]:
    """Top-left corners of maximal 2x2 zero blocks.

    A block counts only if it cannot be extended to an all-zero 2x3 or 3x2
    block, so uniform zero regions report nothing.
    """
    n = p.n
    found = []
    for i in range(n):
        for j in range(n):
            if any(p.at(i + a, j + b) for a in (0, 1) for b in (0, 1)):
                continue
            extensions = (
                ((i - 1, j), (i - 1, j + 1)),
                ((i + 2, j), (i + 2, j + 1)),
                ((i, j - 1), (i + 1, j - 1)),
                ((i, j + 2), (i + 1, j + 2)),
            )
            if all(any(p.at(a, b) for a, b in ext) for ext in extensions):
                found.append((i, j))
    return found


def structure_report(p: Pattern) -> StructureReport:
    ones = p.ones
    return StructureReport(
        points=count_points(p),
        dominoes=count_dominoes(p),
        singularities=len(detect_singularities(p)),
        ones=ones,
        zero_cells=p.n * p.n - ones,
    )


def _require_odd(n: int) -> int:
    if n < 5 or n % 2 == 0:
        raise ValueError(f"size must be odd and >= 5, got {n}")
    return (n - 5) // 2


def n_domino_formula(n: int) -> int:
    _require_odd(n)
    return n - 1


def n_point_formula(n: int) -> int:
    m = _require_odd(n)
    return m + m * (m + 1)


def tps_formula_odd(n: int) -> int:
    """Closed-form optimal TPS for odd sizes (default payoff parameters)."""
    m = _require_odd(n)
    return 265 + 128 * m + 43 * m * (m + 2)


def wealth_formula_odd(n: int) -> float:
    return tps_formula_odd(n) / (9 * n * n)


def construct_optimal_odd(n: int) -> Pattern:
    """Build the optimal odd-size pattern by recursive border growth.

    Starting from the 5x5 optimum, each step to size q+2 appends one row of
    dominoes-and-points (110 followed by 10-repeats), one matching column,
    two all-zero separators and a corner square carrying a single 1.
    """
    _require_odd(n)
    arr = np.array([[int(c) for c in row] for row in _BASE5], dtype=np.uint8)
    while arr.shape[0] < n:
        q = arr.shape[0]
        m = (q - 3) // 2
        grown = np.zeros((q + 2, q + 2), dtype=np.uint8)
        grown[:q, :q] = arr
        grown[q + 1, :q] = [1, 1, 0] + [1, 0] * m
        grown[:q, q] = [0, 1, 1] + [0, 1] * m
        grown[q:, q:] = [[0, 0], [1, 0]]
        arr = grown
    return Pattern.from_array(arr)


def point_filled(n: int) -> Pattern:
    """A lattice of isolated points; odd sizes keep the border rows clear."""
    if n < 3:
        raise ValueError(f"size must be >= 3, got {n}")
    arr = np.zeros((n, n), dtype=np.uint8)
    limit = n if n % 2 == 0 else n - 2
    arr[0:limit:2, 0:limit:2] = 1
    return Pattern.from_array(arr)


@dataclass(frozen=True)
class OracleResult:
    max_tps: float
    n_optima: int  # raw argmax count over all 2^(n^2) patterns
    representatives: tuple[Pattern, ...]


def _canonical_bytes(arr: np.ndarray) -> bytes:
    """Minimal byte string over all shifts x rotations/reflections."""
    n = arr.shape[0]
    best = None
    for img in symmetry_images(arr):
        for di in range(n):
            rolled = np.roll(img, di, axis=0)
            for dj in range(n):
                cand = np.roll(rolled, dj, axis=1).tobytes()
                if best is None or cand < best:
                    best = cand
    return best


def brute_force_oracle(n: int, params: PayoffParams = DEFAULT_PARAMS,
                       allow_large: bool = False) -> OracleResult:
    """Exhaustively score all 2^(n^2) patterns.

    n <= 4 is always allowed; n = 5 (33M patterns) only with allow_large.
    """
    limit = ORACLE_MAX_N_LARGE if allow_large else ORACLE_MAX_N
    if n < 3 or n > limit:
        raise ValueError(
            f"oracle supports 3 <= n <= {limit}"
            + ("" if allow_large else " (n=5 needs allow_large)")
            + f", got {n}")
    nn = n * n
    from .grid import window_indices
    idx = window_indices(n)
    best = -np.inf
    best_codes: list[int] = []
    chunk = 1 << 18  # keeps the window tensor around 60 MB for n = 5
    t, r, pp, s = params.t, params.r, params.p, params.s
    for lo in range(0, 1 << nn, chunk):
        hi = min(lo + chunk, 1 << nn)
        codes = np.arange(lo, hi, dtype=np.int64)
        bits = ((codes[:, None] >> np.arange(nn)) & 1).astype(np.int8)
        windows = bits[:, idx]
        if params.self_play:
            n_coop = 9 - windows.sum(axis=2, dtype=np.int16)
        else:
            n_coop = 8 - windows[:, :, 1:].sum(axis=2, dtype=np.int16)
        n_def = params.k - n_coop
        totals = np.where(bits == 1, t * n_coop + pp * n_def,
                          r * n_coop + s * n_def)
        tps_all = totals.sum(axis=1)
        m = tps_all.max()
        if m > best:
            best = m
            best_codes = []
        if m == best:
            best_codes.extend(int(c) for c in codes[tps_all == best])
    reps = {}
    for code in best_codes:
        arr = np.array([(code >> k) & 1 for k in range(nn)],
                       dtype=np.uint8).reshape(n, n)
        key = _canonical_bytes(arr)
        if key not in reps:
            reps[key] = Pattern.from_array(
                np.frombuffer(key, dtype=np.uint8).reshape(n, n))
    return OracleResult(float(best), len(best_codes), tuple(reps.values()))


def derive_seed(seed: int, index: int) -> int:
    """Counter-mixed per-run seed (splitmix64 of seed + golden-ratio steps)."""
    z = (seed + (index + 1) * 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


@dataclass(frozen=True)
class ExperimentSummary:
    n_runs: int
    t_limit: int
    w_max_max: float
    w_max_avrg: float
    t_avrg: float
    t_min: int
    t_max: int
    n_opt_found: int | None
    n_stable: int
    wealth_histogram: tuple[tuple[float, int], ...]
    runs: tuple[tuple[float, int, bool], ...] = field(repr=False)


def _one_run(kind: str, cfg, n: int, start_cells, params: PayoffParams,
             seed: int) -> tuple[float, int, bool]:
    """Worker: returns (best wealth, first-attainment time, stable flag)."""
    if kind == "ca":
        run_cfg = dataclasses.replace(cfg, seed=seed)
        start = Pattern(*start_cells) if start_cells is not None else None
        res: CaRunResult = run_ca(run_cfg, n=n, start=start, params=params)
        return res.w_max, res.t_max, res.stable
    if kind == "ga":
        run_cfg = dataclasses.replace(cfg, seed=seed)
        res = run_ga(run_cfg, n, params)
        w = res.best_fitness / (params.k * n * n)
        return w, res.iterations, False
    raise ValueError(f"unknown experiment kind {kind!r}")


def run_experiment(kind: str, cfg, n: int, n_runs: int,
                   params: PayoffParams = DEFAULT_PARAMS,
                   start: Pattern | None = None,
                   optimum_wealth: float | None = None,
                   seed: int = 0, jobs: int = 1) -> ExperimentSummary:
    """n_runs independent seeded runs of the GA or the CA, aggregated.

    Per-run best wealth and its first-attainment time feed the summary
    statistics; the histogram buckets wealth rounded to 4 decimals. If
    optimum_wealth is given, n_opt_found counts the runs reaching it
    (compared after rounding to 4 decimals).
    """
    if kind not in ("ga", "ca"):
        raise ValueError(f"unknown experiment kind {kind!r}")
    if n_runs <= 0:
        raise ValueError("n_runs must be positive")
    start_cells = (start.n, start.cells) if start is not None else None
    seeds = [derive_seed(seed, i) for i in range(n_runs)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(
                _one_run, [kind] * n_runs, [cfg] * n_runs, [n] * n_runs,
                [start_cells] * n_runs, [params] * n_runs, seeds,
                chunksize=max(1, n_runs // (4 * jobs))))
    else:
        results = [_one_run(kind, cfg, n, start_cells, params, s)
                   for s in seeds]

    w_list = [w for w, _, _ in results]
    t_list = [t for _, t, _ in results]
    hist: dict[float, int] = {}
    for w in w_list:
        key = round(w, 4)
        hist[key] = hist.get(key, 0) + 1
    n_opt = None
    if optimum_wealth is not None:
        target = round(optimum_wealth, 4)
        n_opt = sum(1 for w in w_list if round(w, 4) >= target)
    t_limit = cfg.t_limit if kind == "ca" else cfg.max_iterations
    return ExperimentSummary(
        n_runs=n_runs,
        t_limit=t_limit,
        w_max_max=max(w_list),
        w_max_avrg=sum(w_list) / n_runs,
        t_avrg=sum(t_list) / n_runs,
        t_min=min(t_list),
        t_max=max(t_list),
        n_opt_found=n_opt,
        n_stable=sum(1 for _, _, stable in results if stable),
        wealth_histogram=tuple(sorted(hist.items())),
        runs=tuple(results),
    )

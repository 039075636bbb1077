"""Classical 23-function benchmark suite and a seeded campaign runner.

F1-F7 are unimodal, F8-F13 multimodal (30 dimensions each) and F14-F23
fixed-dimension multimodal.  Coefficient tables for F14, F15 and F19-F23 are
taken verbatim from the classical evolutionary-programming test suite
(Yao, Liu & Lin, 1999).
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError
from .optimizer import ContinuousBox, PfmParams, Problem, optimize

__all__ = [
    "BenchmarkFunction",
    "BENCHMARKS",
    "benchmark_names",
    "get_benchmark",
    "evaluate_benchmark",
    "make_problem",
    "CampaignResult",
    "run_campaign",
]


def _f1(x):
    return float(np.sum(x * x))


def _f2(x):
    ax = np.abs(x)
    return float(np.sum(ax) + np.prod(ax))


def _f3(x):
    return float(np.sum(np.cumsum(x) ** 2))


def _f4(x):
    return float(np.max(np.abs(x)))


def _f5(x):
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (x[:-1] - 1.0) ** 2))


def _f6(x):
    return float(np.sum(np.floor(x + 0.5) ** 2))


def _f7(x, rng):
    i = np.arange(1, x.size + 1)
    return float(np.sum(i * x**4) + rng.random())


def _f8(x):
    return float(np.sum(-x * np.sin(np.sqrt(np.abs(x)))))


def _f9(x):
    return float(np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x) + 10.0))


def _f10(x):
    n = x.size
    return float(
        -20.0 * np.exp(-0.2 * np.sqrt(np.sum(x * x) / n))
        - np.exp(np.sum(np.cos(2.0 * np.pi * x)) / n)
        + 20.0
        + np.e
    )


def _f11(x):
    i = np.arange(1, x.size + 1)
    return float(np.sum(x * x) / 4000.0 - np.prod(np.cos(x / np.sqrt(i))) + 1.0)


def _penalty(x, a, k, m):
    out = np.zeros_like(x)
    above = x > a
    below = x < -a
    out[above] = k * (x[above] - a) ** m
    out[below] = k * (-x[below] - a) ** m
    return float(np.sum(out))


def _f12(x):
    n = x.size
    y = 1.0 + (x + 1.0) / 4.0
    core = (
        10.0 * np.sin(np.pi * y[0]) ** 2
        + np.sum((y[:-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * y[1:]) ** 2))
        + (y[-1] - 1.0) ** 2
    )
    return float(np.pi / n * core + _penalty(x, 10.0, 100.0, 4))


def _f13(x):
    core = (
        np.sin(3.0 * np.pi * x[0]) ** 2
        + np.sum((x[:-1] - 1.0) ** 2 * (1.0 + np.sin(3.0 * np.pi * x[1:]) ** 2))
        + (x[-1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * x[-1]) ** 2)
    )
    return float(0.1 * core + _penalty(x, 5.0, 100.0, 4))


_FOXHOLES_A = np.array(
    [
        [-32, -16, 0, 16, 32] * 5,
        [-32] * 5 + [-16] * 5 + [0] * 5 + [16] * 5 + [32] * 5,
    ],
    dtype=float,
)


def _f14(x):
    j = np.arange(1, 26)
    inner = j + np.sum((x[:, None] - _FOXHOLES_A) ** 6, axis=0)
    return float(1.0 / (1.0 / 500.0 + np.sum(1.0 / inner)))


_KOWALIK_A = np.array(
    [0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627, 0.0456, 0.0342, 0.0323, 0.0235, 0.0246]
)
_KOWALIK_B = 1.0 / np.array([0.25, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0])


def _f15(x):
    b = _KOWALIK_B
    model = x[0] * (b * b + b * x[1]) / (b * b + b * x[2] + x[3])
    return float(np.sum((_KOWALIK_A - model) ** 2))


def _f16(x):
    x1, x2 = x
    return float(4 * x1**2 - 2.1 * x1**4 + x1**6 / 3.0 + x1 * x2 - 4 * x2**2 + 4 * x2**4)


def _f17(x):
    x1, x2 = x
    return float(
        (x2 - 5.1 / (4 * np.pi**2) * x1**2 + 5.0 / np.pi * x1 - 6.0) ** 2
        + 10.0 * (1.0 - 1.0 / (8 * np.pi)) * np.cos(x1)
        + 10.0
    )


def _f18(x):
    x1, x2 = x
    a = 1 + (x1 + x2 + 1) ** 2 * (19 - 14 * x1 + 3 * x1**2 - 14 * x2 + 6 * x1 * x2 + 3 * x2**2)
    b = 30 + (2 * x1 - 3 * x2) ** 2 * (
        18 - 32 * x1 + 12 * x1**2 + 48 * x2 - 36 * x1 * x2 + 27 * x2**2
    )
    return float(a * b)


_HARTMANN_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_HARTMANN3_A = np.array([[3, 10, 30], [0.1, 10, 35], [3, 10, 30], [0.1, 10, 35]], dtype=float)
_HARTMANN3_P = np.array(
    [
        [0.3689, 0.1170, 0.2673],
        [0.4699, 0.4387, 0.7470],
        [0.1091, 0.8732, 0.5547],
        [0.03815, 0.5743, 0.8828],
    ]
)
_HARTMANN6_A = np.array(
    [
        [10, 3, 17, 3.5, 1.7, 8],
        [0.05, 10, 17, 0.1, 8, 14],
        [3, 3.5, 1.7, 10, 17, 8],
        [17, 8, 0.05, 10, 0.1, 14],
    ],
    dtype=float,
)
_HARTMANN6_P = 1e-4 * np.array(
    [
        [1312, 1696, 5569, 124, 8283, 5886],
        [2329, 4135, 8307, 3736, 1004, 9991],
        [2348, 1451, 3522, 2883, 3047, 6650],
        [4047, 8828, 8732, 5743, 1091, 381],
    ]
)


def _hartmann(x, a, p):
    inner = np.sum(a * (x[None, :] - p) ** 2, axis=1)
    return float(-np.sum(_HARTMANN_ALPHA * np.exp(-inner)))


def _f19(x):
    return _hartmann(x, _HARTMANN3_A, _HARTMANN3_P)


def _f20(x):
    return _hartmann(x, _HARTMANN6_A, _HARTMANN6_P)


_SHEKEL_A = np.array(
    [
        [4, 4, 4, 4],
        [1, 1, 1, 1],
        [8, 8, 8, 8],
        [6, 6, 6, 6],
        [3, 7, 3, 7],
        [2, 9, 2, 9],
        [5, 5, 3, 3],
        [8, 1, 8, 1],
        [6, 2, 6, 2],
        [7, 3.6, 7, 3.6],
    ],
    dtype=float,
)
_SHEKEL_C = np.array([0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5])


def _shekel(x, m):
    diff = x[None, :] - _SHEKEL_A[:m]
    return float(-np.sum(1.0 / (np.sum(diff * diff, axis=1) + _SHEKEL_C[:m])))


def _f21(x):
    return _shekel(x, 5)


def _f22(x):
    return _shekel(x, 7)


def _f23(x):
    return _shekel(x, 10)


@dataclass(frozen=True)
class BenchmarkFunction:
    name: str
    dimension: int
    lower: float
    upper: float
    f_min: float
    fn: Callable
    noisy: bool = False


_SPECS = [
    ("F1", 30, -100, 100, 0.0, _f1, False),
    ("F2", 30, -10, 10, 0.0, _f2, False),
    ("F3", 30, -100, 100, 0.0, _f3, False),
    ("F4", 30, -100, 100, 0.0, _f4, False),
    ("F5", 30, -5, 10, 0.0, _f5, False),
    ("F6", 30, -100, 100, 0.0, _f6, False),
    ("F7", 30, -1.28, 1.28, 0.0, _f7, True),
    ("F8", 30, -500, 500, -418.9892 * 30, _f8, False),
    ("F9", 30, -5.12, 5.12, 0.0, _f9, False),
    ("F10", 30, -32, 32, 0.0, _f10, False),
    ("F11", 30, -600, 600, 0.0, _f11, False),
    ("F12", 30, -50, 50, 0.0, _f12, False),
    ("F13", 30, -50, 50, 0.0, _f13, False),
    ("F14", 2, -65, 65, 1.0, _f14, False),
    ("F15", 4, -5, 5, 0.00030, _f15, False),
    ("F16", 2, -5, 5, -1.0316, _f16, False),
    ("F17", 2, -5, 5, 0.398, _f17, False),
    ("F18", 2, -2, 2, 3.0, _f18, False),
    ("F19", 3, 0, 1, -3.86, _f19, False),
    ("F20", 6, 0, 1, -3.32, _f20, False),
    ("F21", 4, 0, 10, -10.1532, _f21, False),
    ("F22", 4, 0, 10, -10.4028, _f22, False),
    ("F23", 4, 0, 10, -10.5363, _f23, False),
]

BENCHMARKS: dict[str, BenchmarkFunction] = {
    name: BenchmarkFunction(name, dim, lo, hi, fmin, fn, noisy)
    for name, dim, lo, hi, fmin, fn, noisy in _SPECS
}


def benchmark_names() -> list[str]:
    return list(BENCHMARKS)


def get_benchmark(name: str) -> BenchmarkFunction:
    try:
        return BENCHMARKS[name]
    except KeyError:
        raise ConfigError(f"unknown benchmark function: {name}") from None


def evaluate_benchmark(name: str, x, rng: Optional[np.random.Generator] = None) -> float:
    """Evaluate one benchmark at x, validating dimension and bounds.

    The noisy function F7 requires an explicit generator so that runs stay
    reproducible; all others ignore ``rng``.
    """
    bench = get_benchmark(name)
    x = np.asarray(x, dtype=float)
    if x.shape != (bench.dimension,):
        raise ValueError(
            f"{name} expects a vector of length {bench.dimension}, got shape {x.shape}"
        )
    if np.any(x < bench.lower) or np.any(x > bench.upper):
        raise ValueError(f"{name}: input outside [{bench.lower}, {bench.upper}]")
    if bench.noisy:
        if rng is None:
            raise ValueError(f"{name} is noisy and needs an explicit rng")
        return bench.fn(x, rng)
    return bench.fn(x)


def make_problem(name: str, seed: Optional[int] = None) -> Problem:
    """Wrap a benchmark as a minimization problem over its box.

    For F7 the additive noise comes from a dedicated stream derived from
    ``seed`` so optimizer draws and noise draws never interleave.
    """
    bench = get_benchmark(name)
    box = ContinuousBox(
        lower=np.full(bench.dimension, bench.lower, dtype=float),
        upper=np.full(bench.dimension, bench.upper, dtype=float),
    )
    if bench.noisy:
        noise_rng = np.random.default_rng(None if seed is None else (seed, 0xF7))
        objective = lambda x: bench.fn(x, noise_rng)  # noqa: E731
    else:
        objective = bench.fn
    return Problem(dimension=bench.dimension, domain=box, objective=objective, sense="min")


@dataclass
class CampaignResult:
    function: str
    dimension: int
    runs: int
    avg: float
    std: float
    best: float
    worst: float
    per_run_best: list[float]
    params: dict
    wall_ms: float
    traces: list[list[float]]


def run_campaign(names: list[str], params: PfmParams, runs: int) -> list[CampaignResult]:
    """Independent seeded runs per function; aggregates final-best statistics.

    Run i uses seed ``params.seed + i``.  ``std`` is the population standard
    deviation of the per-run finals (divisor = runs).
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    results = []
    for name in names:
        bench = get_benchmark(name)
        t0 = time.perf_counter()
        finals = []
        traces = []
        for i in range(runs):
            run_params = replace(params, seed=params.seed + i)
            trace = optimize(make_problem(name, seed=run_params.seed), run_params)
            finals.append(trace.best_per_iteration[-1])
            traces.append(trace.best_per_iteration)
        wall_ms = (time.perf_counter() - t0) * 1000.0
        finals_arr = np.asarray(finals)
        results.append(
            CampaignResult(
                function=name,
                dimension=bench.dimension,
                runs=runs,
                avg=float(finals_arr.mean()),
                std=float(finals_arr.std()),
                best=float(finals_arr.min()),
                worst=float(finals_arr.max()),
                per_run_best=finals,
                params=asdict(params),
                wall_ms=wall_ms,
                traces=traces,
            )
        )
    return results

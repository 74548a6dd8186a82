"""Classical reference models: plain Monte Carlo, grid-discretized Monte
Carlo, an exact expectation over all grid paths, and the same expectation
under the circuit's quantized semantics.

Reproducibility contract: all randomness comes from numpy's PCG64 seeded
generator; path p consumes row p of a single (paths, steps) uniform block, so
results are bit-stable for a fixed seed regardless of how callers batch.
Standard normals are produced by inverse CDF, never rejection.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .circuit import QuantizedModel
from .contracts import AutocallableContract, FixedPointFormat
from .errors import CapacityError
from .loading import GaussianGridSpec

ENUMERATION_WARN = 2**24
ENUMERATION_LIMIT = 2**26
_CHUNK = 2**18


@dataclass(frozen=True)
class McResult:
    mean: float
    stderr: float
    paths: int
    seed: int


@dataclass(frozen=True)
class PathOutcome:
    log_returns: tuple[float, ...]
    barrier_crossed: bool
    binary_index: int | None
    terminal_return: float
    payoff: float


def path_outcome(log_increments, contract: AutocallableContract) -> PathOutcome:
    """Classify one path and value it; exactly one payoff branch applies."""
    incs = np.asarray(log_increments, dtype=float)
    if incs.shape != (contract.steps,):
        raise ValueError(f"need {contract.steps} increments, got shape {incs.shape}")
    l = np.cumsum(incs)
    r = np.exp(l)
    crossed = bool((r < contract.barrier).any())
    for i, b in enumerate(contract.binaries):
        if r[b.step - 1] > b.strike:
            return PathOutcome(tuple(l), crossed, i, float(r[-1]), contract.discounted_payout(i))
    if crossed and r[-1] < contract.strike:
        payoff = (
            contract.notional
            * (r[-1] - contract.strike)
            * math.exp(-contract.rate * contract.maturity)
        )
        return PathOutcome(tuple(l), crossed, None, float(r[-1]), payoff)
    return PathOutcome(tuple(l), crossed, None, float(r[-1]), 0.0)


def payoff_of_path(log_increments, contract: AutocallableContract) -> float:
    return path_outcome(log_increments, contract).payoff


def _payoffs_vector(incs: np.ndarray, contract: AutocallableContract) -> np.ndarray:
    """Vectorized path_outcome over an (M, T) increment block."""
    r = np.exp(np.cumsum(incs, axis=1))
    payoff = np.zeros(len(incs))
    alive = np.ones(len(incs), dtype=bool)
    for i, b in enumerate(contract.binaries):
        trig = alive & (r[:, b.step - 1] > b.strike)
        payoff[trig] = contract.discounted_payout(i)
        alive &= ~trig
    put = alive & (r < contract.barrier).any(axis=1) & (r[:, -1] < contract.strike)
    payoff[put] = (
        contract.notional
        * (r[put, -1] - contract.strike)
        * math.exp(-contract.rate * contract.maturity)
    )
    return payoff


def _mc_result(payoffs: np.ndarray, seed: int) -> McResult:
    n = len(payoffs)
    stderr = float(np.std(payoffs, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return McResult(mean=float(payoffs.mean()), stderr=stderr, paths=n, seed=seed)


def _uniform_block(rng: np.random.Generator, shape) -> np.ndarray:
    u = rng.random(shape)
    # keep ndtri finite at the (measure-zero) edge draws
    return np.clip(u, 1e-300, 1.0 - 1e-16)


def mc_price(contract: AutocallableContract, paths: int, seed: int) -> McResult:
    """Plain Monte Carlo with continuous standard normal shocks."""
    if paths < 1:
        raise ValueError(f"paths must be >= 1, got {paths}")
    rng = np.random.default_rng(seed)
    z = ndtri(_uniform_block(rng, (paths, contract.steps)))
    incs = contract.mu * contract.dt + contract.sigma * math.sqrt(contract.dt) * z
    return _mc_result(_payoffs_vector(incs, contract), seed)


def mc_price_discretized(
    contract: AutocallableContract, grid: GaussianGridSpec, paths: int, seed: int
) -> McResult:
    """Monte Carlo whose shocks are drawn from the discretized Gaussian grid."""
    if paths < 1:
        raise ValueError(f"paths must be >= 1, got {paths}")
    rng = np.random.default_rng(seed)
    g = draw_grid_indices(rng, grid, (paths, contract.steps))
    shocks = grid.points()[g]
    incs = contract.mu * contract.dt + contract.sigma * math.sqrt(contract.dt) * shocks
    return _mc_result(_payoffs_vector(incs, contract), seed)


def draw_grid_indices(rng: np.random.Generator, grid: GaussianGridSpec, shape) -> np.ndarray:
    """Inverse-CDF draws of grid indices under the renormalized grid weights."""
    cum = np.cumsum(grid.probabilities())
    cum[-1] = 1.0
    return np.searchsorted(cum, rng.random(shape), side="right")


def _check_enumeration(grid: GaussianGridSpec, steps: int) -> int:
    total = (2**grid.k) ** steps
    if total > ENUMERATION_LIMIT:
        raise CapacityError(
            f"{total} grid paths exceed the enumeration limit {ENUMERATION_LIMIT}; "
            "use the discretized Monte Carlo oracle instead"
        )
    if total > ENUMERATION_WARN:
        warnings.warn(
            f"enumerating {total} grid paths; this may be slow", RuntimeWarning, stacklevel=3
        )
    return total


def _path_chunks(total: int, steps: int, base: int):
    powers = base ** np.arange(steps, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        yield (idx[:, None] // powers) % base


def closed_form_discretized(contract: AutocallableContract, grid: GaussianGridSpec) -> float:
    """Exact expectation over all grid paths in real arithmetic."""
    total = _check_enumeration(grid, contract.steps)
    probs = grid.probabilities()
    points = grid.points()
    scale = contract.sigma * math.sqrt(contract.dt)
    value = 0.0
    for g in _path_chunks(total, contract.steps, 2**grid.k):
        incs = contract.mu * contract.dt + scale * points[g]
        weights = probs[g].prod(axis=1)
        value += float(weights @ _payoffs_vector(incs, contract))
    return value


def closed_form_quantized(
    contract: AutocallableContract, grid: GaussianGridSpec, fmt: FixedPointFormat
) -> float:
    """Exact expectation under the circuit's quantized semantics.

    Reuses :class:`QuantizedModel`: quantized increments and thresholds,
    strict comparators, and the put branch valued through the integration
    amplitude, then post-processed, exactly as the circuit does.
    """
    model = QuantizedModel(contract, grid, fmt)
    total = _check_enumeration(grid, contract.steps)
    probs = grid.probabilities()
    good_mass = 0.0
    for g in _path_chunks(total, contract.steps, 2**grid.k):
        v = np.cumsum(model.inc_codes[g], axis=1)
        weights = probs[g].prod(axis=1)
        levels = np.zeros(len(g))
        alive = np.ones(len(g), dtype=bool)
        for i, b in enumerate(contract.binaries):
            trig = alive & (v[:, b.step - 1] > model.strike_codes[i])
            levels[trig] = model.binary_levels[i]
            alive &= ~trig
        crossed = (v < model.barrier_code).any(axis=1)
        put = alive & crossed & (v[:, -1] < model.put_strike_code) & model.put_reachable
        if put.any():
            levels[put] = [model.put_level(int(code)) for code in v[put, -1]]
        zero = alive & ~put
        levels[zero] = model.mapping.zero_level
        good_mass += float(weights @ levels)
    return model.mapping.to_payoff(good_mass)

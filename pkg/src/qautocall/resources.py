"""Fault-tolerant T-depth model: per-block depths, the truncation-parameter
solver, and the assembled total with its amplitude-loading comparison against
a fixed QSP-style baseline.

Depths are real-valued by default; pass ``integer=True`` where offered to get
conservative per-block ceilings. Widths below 2 are clamped to 2 inside the
multi-controlled-X formula, whose log3 term would otherwise go negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import NumericalError

#: amplitude-loading T-depth of the polynomial-transform baseline we compare against
QSP_BASELINE_T_DEPTH = 2.1e3

D_TOFFOLI = 3.0


def d_ry(epsilon: float) -> float:
    return 3.0 * math.log2(1.0 / epsilon)


def d_cry(epsilon: float) -> float:
    return 6.0 * math.log2(2.0 / epsilon)


def d_rz(epsilon: float) -> float:
    return math.log2(1.0 / epsilon)


def d_mcx(n: int) -> float:
    n = max(n, 2)
    return 14.0 * math.log(n / 2.0, 3) + 5.0


def d_comparator(n: int) -> float:
    return (2.0 * math.log2(n) + 9.0) * D_TOFFOLI


def d_c_comparator(n: int) -> float:
    # control only the middle Toffoli (a CCCX): swap one Toffoli for an MCX(3)
    return d_comparator(n) + d_mcx(3) - D_TOFFOLI


def d_adder(n: int) -> float:
    return (2.0 * math.log2(n) + 5.0) * D_TOFFOLI


def d_multiplier(n: int) -> float:
    return n * (d_adder(n) + 6.0)


@dataclass(frozen=True)
class BlockDepths:
    ry: float
    cry: float
    rz: float
    toffoli: float
    mcx: float
    comparator: float
    c_comparator: float
    adder: float
    multiplier: float


def block_depths(n: int, epsilon: float, integer: bool = False) -> BlockDepths:
    """All building-block depths at width ``n`` and rotation error ``epsilon``."""
    if n < 1:
        raise ValueError(f"width must be >= 1, got {n}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    values = BlockDepths(
        ry=d_ry(epsilon),
        cry=d_cry(epsilon),
        rz=d_rz(epsilon),
        toffoli=D_TOFFOLI,
        mcx=d_mcx(n),
        comparator=d_comparator(n),
        c_comparator=d_c_comparator(n),
        adder=d_adder(n),
        multiplier=d_multiplier(n),
    )
    if integer:
        values = BlockDepths(**{k: float(math.ceil(v)) for k, v in vars(values).items()})
    return values


@dataclass(frozen=True)
class ResourceParams:
    """Inputs of the depth model; error fields are probability-domain budgets.

    Any per-source error left unset inherits ``epsilon``. ``epsilon_payoff``
    (currency) feeds the truncation solver and also defaults to ``epsilon``.
    """

    steps: int  # T
    assets: int  # d
    epsilon: float
    accumulator_width: int  # m, final log-return register width
    gaussian_qubits: int = 2  # k
    layers: int = 0  # L, Gaussian loader layers
    binaries: int = 2  # j
    epsilon_payoff: float | None = None
    epsilon_truncation: float | None = None
    epsilon_approximation: float | None = None
    epsilon_arithmetic: float | None = None
    epsilon_amplitude_loading: float | None = None
    sigma_max: float = 0.2382
    mu: float = 0.1274
    dt: float = 1.0
    notional: float = 18.0
    strike: float = 1.0
    f_max: float = 5.0 * math.exp(-0.08)

    def __post_init__(self):
        for name in ("steps", "assets", "accumulator_width", "gaussian_qubits"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.layers < 0 or self.binaries < 0:
            raise ValueError("layers and binaries must be >= 0")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        for name in (
            "epsilon_payoff",
            "epsilon_truncation",
            "epsilon_approximation",
            "epsilon_arithmetic",
            "epsilon_amplitude_loading",
        ):
            v = getattr(self, name)
            if v is not None and not 0.0 < v <= self.epsilon:
                raise ValueError(f"{name} must be in (0, epsilon], got {v}")

    def budget(self, name: str) -> float:
        v = getattr(self, f"epsilon_{name}")
        return self.epsilon if v is None else v


@dataclass(frozen=True)
class TruncationSolution:
    w: float
    r_t_min: float
    scale: float  # R(w)
    iterations: int

    def residual(self, params: "ResourceParams") -> float:
        lhs = 2.0 * params.assets * params.steps * math.exp(-self.w**2 / 2.0)
        return lhs - params.budget("payoff") / self.scale


def _rescale(params: ResourceParams, w: float) -> tuple[float, float]:
    r_t_min = math.exp(
        params.mu * params.dt * params.steps
        - w * params.sigma_max * math.sqrt(params.dt) * params.steps
    )
    scale = params.f_max + (params.strike - r_t_min) * params.notional
    return r_t_min, scale


def solve_truncation(params: ResourceParams, max_iter: int = 1000) -> TruncationSolution:
    """Smallest w with 2dT e^{-w^2/2} <= eps_payoff / R(w).

    R depends on w through the minimum terminal return, so the bound is
    solved by fixed-point iteration on w = sqrt(2 ln(2dT R(w)/eps)).
    """
    eps = params.budget("payoff")
    two_dt = 2.0 * params.assets * params.steps
    w = 1.0
    trace = []
    for it in range(1, max_iter + 1):
        try:
            _, scale = _rescale(params, w)
        except OverflowError:
            scale = -math.inf
        if scale <= 0.0:
            raise NumericalError(
                f"rescaling factor turned non-positive at w={w:.6g}; "
                f"iteration trace: {trace[-5:]}"
            )
        w_next = math.sqrt(2.0 * math.log(two_dt * scale / eps))
        trace.append(w_next)
        if abs(w_next - w) < 1e-15:
            r_t_min, scale = _rescale(params, w_next)
            return TruncationSolution(w=w_next, r_t_min=r_t_min, scale=scale, iterations=it)
        w = w_next
    raise NumericalError(
        f"truncation solver did not converge in {max_iter} iterations; "
        f"last iterates: {trace[-5:]}"
    )


def d_gaussian(params: ResourceParams) -> float:
    """(L+1) rotation layers, each at the per-rotation error split k*T*d ways."""
    eps = params.budget("approximation")
    per_ry = 3.0 * math.log2(
        params.gaussian_qubits * params.steps * params.assets / eps
    )
    return (params.layers + 1) * per_ry


def d_arith(params: ResourceParams) -> float:
    """Accumulator adds, barrier/binary comparators, exclusivity MCX, and the
    constant-payoff rotations, composed per the circuit's operation sequence.

    The composition is a model choice; swap pieces here if a different
    arithmetic layout is assumed.
    """
    m = params.accumulator_width
    j = params.binaries
    eps = params.budget("arithmetic")
    depth = params.steps * (d_adder(m) + d_comparator(m))
    depth += j * (d_comparator(m) + d_mcx(j))
    depth += (j + 2) * d_cry(eps)
    depth += d_mcx(params.steps)
    return depth


def d_amplitude_loading(params: ResourceParams) -> tuple[float, float]:
    """(D_AL, D_exp): the controlled integration comparator, and the partial
    exponential preparation that runs in parallel with everything else."""
    m = params.accumulator_width
    eps = params.budget("amplitude_loading") / (m + 1)
    d_al = d_c_comparator(m)
    d_exp = 3.0 * d_ry(eps) + d_mcx(m) + 2.0 * d_c_comparator(m)
    return d_al, d_exp


@dataclass(frozen=True)
class TDepthReport:
    params: ResourceParams
    w: float
    r_t_min: float
    scale: float
    n_iqae: int
    d_gaussian: float
    d_arith: float
    d_exp: float
    d_amplitude_loading: float
    d_total: float

    @property
    def qsp_ratio(self) -> float:
        return QSP_BASELINE_T_DEPTH / self.d_amplitude_loading


def d_total(params: ResourceParams) -> TDepthReport:
    """Assemble D_tot = (1 + 2 N) (max(D_G + D_arith, D_exp) + D_AL)."""
    truncation = solve_truncation(params)
    n_iqae = math.ceil(1.0 / params.epsilon)
    dg = d_gaussian(params)
    da = d_arith(params)
    d_al, d_exp = d_amplitude_loading(params)
    total = (1 + 2 * n_iqae) * (max(dg + da, d_exp) + d_al)
    return TDepthReport(
        params=params,
        w=truncation.w,
        r_t_min=truncation.r_t_min,
        scale=truncation.scale,
        n_iqae=n_iqae,
        d_gaussian=dg,
        d_arith=da,
        d_exp=d_exp,
        d_amplitude_loading=d_al,
        d_total=total,
    )

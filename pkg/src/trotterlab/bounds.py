"""Closed-form step-count bounds, entanglement-aware and worst-case.

Every formula evaluates exactly as documented, with the asymptotic
constants exposed on BoundConstants so callers can see (and vary) what
the defaults commit to. Logs inside bounds are base 2; the light-cone
radius uses the natural log. Large-entropy evaluations go through log
space so 2^{p S*/2} cannot overflow silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

SUPPORTED_ORDERS = (1, 2, 4, 6)


@dataclass
class BoundConstants:
    """Default constants: C1 = 8, C_p = (4p)^p, c_growth = 4 log2(e),
    worst-case prefactors c_1 = 1/2 and c_2 = 0.1, unit Lieb-Robinson
    and lower-bound prefactors, unit threshold constant."""

    C1: float = 8.0
    c_growth: float = 4.0 * math.log2(math.e)
    worst_case_prefactors: dict[int, float] = field(
        default_factory=lambda: {1: 0.5, 2: 0.1}
    )
    lr_velocity_prefactor: float = 1.0  # c' in v_LR = c' * d * J
    xi: float | None = None  # None -> 1 / ln(max(d, 2))
    threshold_constant: float = 1.0
    lower_bound_prefactor: float = 1.0
    grid2d_entropy_coeff: float = 1.0
    # Calibrated to the printed 3D resource row, which follows a natural-log
    # normalization while the others follow log2 (ln^2 x = 0.48 log2^2 x).
    grid3d_entropy_coeff: float = 0.5
    tree_entropy_coeff: float = 1.0

    def Cp(self, p: int) -> float:
        return (4.0 * p) ** p

    def resolve_xi(self, d: int) -> float:
        return self.xi if self.xi is not None else 1.0 / math.log(max(d, 2))

    def to_dict(self) -> dict:
        out = asdict(self)
        out["worst_case_prefactors"] = {str(k): v for k, v in out["worst_case_prefactors"].items()}
        return out


DEFAULT_CONSTANTS = BoundConstants()


def standard_bound(
    L: int, J: float, t: float, r: int, p: int,
    constants: BoundConstants = DEFAULT_CONSTANTS,
) -> float:
    """Worst-case product-formula error c_p (2 L J t)^{p+1} / r^p."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if L < 0 or J < 0 or t < 0:
        raise ValueError("L, J, t must be non-negative")
    if p not in constants.worst_case_prefactors:
        raise ValueError(f"no worst-case prefactor for order {p}")
    c = constants.worst_case_prefactors[p]
    return c * (2.0 * L * J * t) ** (p + 1) / r**p


def effective_entanglement(
    S_max: float, d: int, J: float, t: float,
    constants: BoundConstants = DEFAULT_CONSTANTS,
) -> float:
    """S* = S_max + c_growth * d * J * t, the growth-padded entropy budget."""
    if S_max < 0:
        raise ValueError("S_max must be non-negative")
    return S_max + constants.c_growth * d * J * abs(t)


def growth_bound(
    S0: float, boundary_size: int, J: float, t: float,
    constants: BoundConstants = DEFAULT_CONSTANTS,
) -> float:
    """Entropy ceiling S0 + c_growth * |boundary| * J * |t| after time t."""
    return S0 + constants.c_growth * boundary_size * J * abs(t)


def ent_bound_first(
    t: float, J: float, d: int, S_star: float, n: int, r: int,
    constants: BoundConstants = DEFAULT_CONSTANTS,
) -> float:
    """First-order entanglement-aware error bound C1 t^2 J^2 d S* log2^2(n) / r."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if r < 1:
        raise ValueError("r must be >= 1")
    return constants.C1 * t**2 * J**2 * d * S_star * math.log2(n) ** 2 / r


def ent_bound_p_log2(
    t: float, J: float, d: int, S_star: float, n: int, r: int, p: int,
    constants: BoundConstants = DEFAULT_CONSTANTS,
) -> float:
    """log2 of the order-p bound C_p (tJd)^{p+1} 2^{p S*/2} log2^{p+1}(n) / r^p."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if r < 1:
        raise ValueError("r must be >= 1")
    if p not in SUPPORTED_ORDERS:
        raise ValueError(f"order must be one of {SUPPORTED_ORDERS}")
    if p < 2:
        raise ValueError("the order-p bound needs p >= 2; use ent_bound_first for p = 1")
    base = t * J * d
    if base <= 0:
        return -math.inf
    return (
        math.log2(constants.Cp(p))
        + (p + 1) * math.log2(base)
        + p * S_star / 2.0
        + (p + 1) * math.log2(math.log2(n))
        - p * math.log2(r)
    )


def ent_bound_p(
    t: float, J: float, d: int, S_star: float, n: int, r: int, p: int,
    constants: BoundConstants = DEFAULT_CONSTANTS,
) -> float:
    log2_bound = ent_bound_p_log2(t, J, d, S_star, n, r, p, constants)
    if log2_bound == -math.inf:
        return 0.0
    if log2_bound > 1023:
        return math.inf
    return 2.0**log2_bound


@dataclass
class CommutatorBound:
    raw: float  # 2 * 2^S * ||A|| ||B||
    exponential: float | None  # 4 tau^2 ||A|| ||B|| min(2^S, rank)


def commutator_entropy_bound(
    S: float,
    norm_a: float,
    norm_b: float,
    tau: float | None = None,
    rank: int | None = None,
) -> CommutatorBound:
    """Entropy-suppressed commutator expectation bounds.

    ``raw`` caps |<[A, B]>| directly; ``exponential`` caps the expectation
    of the exponential-commutator at step size tau (None when tau is not
    given). The 2^S factor saturates at the Schmidt rank when known.
    """
    if S < 0:
        raise ValueError("entropy must be non-negative")
    two_s = 2.0**S
    raw = 2.0 * two_s * norm_a * norm_b
    exponential = None
    if tau is not None:
        capped = min(two_s, rank) if rank is not None else two_s
        exponential = 4.0 * tau**2 * norm_a * norm_b * capped
    return CommutatorBound(raw=raw, exponential=exponential)


def lr_velocity(d: int, J: float, constants: BoundConstants = DEFAULT_CONSTANTS) -> float:
    return constants.lr_velocity_prefactor * d * J


def light_cone_radius(tau: float, v_lr: float, xi: float, L: int) -> float:
    """Effective interaction radius v_LR * tau + xi * ln(L) (natural log)."""
    if L < 1:
        raise ValueError("L must be >= 1")
    return v_lr * tau + xi * math.log(L)


def lower_bound_steps(
    t: float, n: int, eps: float, h: float,
    constants: BoundConstants = DEFAULT_CONSTANTS,
) -> float:
    """Volume-law step floor c * t^2 * h * n / eps, valid for eps <= 1/4."""
    if eps <= 0 or eps > 0.25:
        raise ValueError("eps must lie in (0, 1/4] for the lower bound to apply")
    return constants.lower_bound_prefactor * t**2 * h * n / eps


def s_max_preset(
    geometry: str,
    n: int,
    S0: float = 1.0,
    treewidth: float = 1.0,
    constants: BoundConstants = DEFAULT_CONSTANTS,
) -> float:
    """Geometry-default entanglement ceilings used by the resource table."""
    if geometry in ("chain",):
        return S0
    if geometry == "grid2d":
        return constants.grid2d_entropy_coeff * math.sqrt(n)
    if geometry == "grid3d":
        return constants.grid3d_entropy_coeff * n ** (2.0 / 3.0)
    if geometry == "tree":
        return constants.tree_entropy_coeff * treewidth
    if geometry == "all-to-all":
        return n / 2.0
    raise ValueError(f"no entropy preset for geometry {geometry!r}")


@dataclass
class BoundParams:
    n: int
    L: int
    J: float
    d: int
    t: float
    p: int
    S_max: float
    constants: BoundConstants = field(default_factory=BoundConstants)

    @property
    def S_star(self) -> float:
        return effective_entanglement(self.S_max, self.d, self.J, self.t, self.constants)


def required_steps(params: BoundParams, eps: float, which: str) -> int:
    """Smallest r making the chosen bound <= eps (ceiling of the real solution)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    p = params.p
    c = params.constants
    if which == "standard":
        prod = 2.0 * params.L * params.J * params.t
        if p not in c.worst_case_prefactors:
            raise ValueError(f"no worst-case prefactor for order {p}")
        r_real = (c.worst_case_prefactors[p] * prod ** (p + 1) / eps) ** (1.0 / p)
    elif which == "entanglement":
        if p == 1:
            r_real = (
                c.C1 * params.t**2 * params.J**2 * params.d
                * params.S_star * math.log2(params.n) ** 2 / eps
            )
        else:
            log2_num = ent_bound_p_log2(
                params.t, params.J, params.d, params.S_star, params.n, 1, p, c
            )
            r_real = 2.0 ** ((log2_num - math.log2(eps)) / p)
    else:
        raise ValueError("which must be 'standard' or 'entanglement'")
    return max(1, math.ceil(r_real))


@dataclass
class BoundReport:
    params: BoundParams
    r: int
    standard: float
    ent_first: float
    ent_p: float
    S_star: float
    improvement_factor: float

    def to_dict(self) -> dict:
        return {
            "n": self.params.n,
            "L": self.params.L,
            "J": self.params.J,
            "d": self.params.d,
            "t": self.params.t,
            "p": self.params.p,
            "r": self.r,
            "S_max": self.params.S_max,
            "S_star": self.S_star,
            "bound_standard": self.standard,
            "bound_ent_first": self.ent_first,
            "bound_ent_p": self.ent_p,
            "improvement": self.improvement_factor,
        }


def evaluate_bounds(params: BoundParams, r: int, eps: float = 1e-3) -> BoundReport:
    """All bound curves at fixed r plus the required-steps improvement ratio."""
    c = params.constants
    has_std = params.p in c.worst_case_prefactors
    standard = standard_bound(params.L, params.J, params.t, r, params.p, c) if has_std else float("nan")
    ent1 = ent_bound_first(params.t, params.J, params.d, params.S_star, params.n, r, c)
    entp = ent_bound_p(params.t, params.J, params.d, params.S_star, params.n, r, params.p, c) \
        if params.p >= 2 else ent1
    r_std = required_steps(params, eps, "standard") if has_std else math.nan
    r_ent = required_steps(params, eps, "entanglement")
    improvement = r_std / r_ent if r_ent > 0 and not math.isnan(r_std) else float("nan")
    return BoundReport(
        params=params,
        r=r,
        standard=standard,
        ent_first=ent1,
        ent_p=entp,
        S_star=params.S_star,
        improvement_factor=improvement,
    )


@dataclass
class ThresholdReport:
    satisfied: bool
    S_star: float
    lhs: float
    rhs: float
    improvement: float


def threshold_check(
    S_max: float, n: int, d: int, J: float, t: float,
    constants: BoundConstants = DEFAULT_CONSTANTS,
) -> ThresholdReport:
    """Advantage condition S* log2^2(n) < C n^2, with the improvement ratio."""
    if n < 2:
        raise ValueError("n must be >= 2")
    s_star = effective_entanglement(S_max, d, J, t, constants)
    lhs = s_star * math.log2(n) ** 2
    rhs = constants.threshold_constant * n**2
    improvement = n**2 / lhs if lhs > 0 else math.inf
    return ThresholdReport(
        satisfied=lhs < rhs, S_star=s_star, lhs=lhs, rhs=rhs, improvement=improvement
    )


def order_recommendation(S_star: float, n: int) -> int:
    """Largest supported order with S* <= (2/p) log2(n); order 1 when none fit."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if S_star < 0:
        raise ValueError("S_star must be non-negative")
    best = 1
    for p in SUPPORTED_ORDERS:
        if p == 1:
            continue
        if S_star <= (2.0 / p) * math.log2(n):
            best = p
    return best


def separation_ratio(n: int, J: float = 1.0) -> float:
    """Volume-to-area required-step ratio shape n / (J^2 log2^2 n)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return n / (J**2 * math.log2(n) ** 2)

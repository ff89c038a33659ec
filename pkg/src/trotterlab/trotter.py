"""Product-formula construction, execution, and error measurement.

Plans expand a Suzuki recursion into a flat per-step stage list of
(term index, time-fraction multiplier) pairs. Order 1 is the plain
left-to-right product; even orders recurse on the palindromic
second-order step, splitting from order 2k to 2k+2 with
s_k = (4 - 4^{1/(2k+1)})^{-1}, so the middle segment runs backward in
time for orders >= 4. Executing a plan walks the stage list r times on
either backend.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .dense import (
    DenseState,
    ExactPropagator,
    apply_term_exponential,
    max_entropy,
    state_distance,
)
from .hamiltonians import HamiltonianModel
from .mps import MpsState, apply_single_site_gate, apply_two_site_gate
from .pauli import PauliTerm

SUPPORTED_ORDERS = (1, 2, 4, 6)
ERROR_FLOOR = 1e-12

_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def suzuki_split_coefficient(k: int) -> float:
    """s_k = 1 / (4 - 4^{1/(2k+1)}), the order 2k -> 2k+2 splitting weight."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return 1.0 / (4.0 - 4.0 ** (1.0 / (2 * k + 1)))


def suzuki_stage_multipliers(p: int) -> list[float]:
    """Time fractions of the expanded recursion's base segments; they sum to 1.

    Orders 1 and 2 are a single base segment. Each recursion level
    multiplies the segment count by five, with the middle fraction
    1 - 4 s_k negative.
    """
    if p not in SUPPORTED_ORDERS:
        raise ValueError(f"order must be one of {SUPPORTED_ORDERS}, got {p}")
    fractions = [1.0]
    k = 1
    while 2 * k < p:
        s = suzuki_split_coefficient(k)
        fractions = [f * seg for f in fractions for seg in (s, s, 1 - 4 * s, s, s)]
        k += 1
    return fractions


def _even_odd_order(model: HamiltonianModel) -> list[int]:
    """Permutation (single-site, even bonds, odd bonds) for chain-style models."""
    singles, even, odd, rest = [], [], [], []
    for i, t in enumerate(model.terms):
        supp = t.support
        if len(supp) == 1:
            singles.append(i)
        elif len(supp) == 2 and supp[1] == supp[0] + 1:
            (even if supp[0] % 2 == 0 else odd).append(i)
        else:
            rest.append(i)
    return singles + even + odd + rest


@dataclass
class TrotterPlan:
    """One product-formula step, repeated r times to cover total time t."""

    model: HamiltonianModel
    p: int
    t: float
    r: int
    stages: list[tuple[int, float]]
    ordering: str = "forward"

    @property
    def n(self) -> int:
        return self.model.n

    @property
    def tau(self) -> float:
        return self.t / self.r

    def exponential_count(self) -> int:
        return len(self.stages) * self.r


def build_plan(
    model: HamiltonianModel,
    p: int,
    t: float,
    r: int,
    ordering: str = "forward",
) -> TrotterPlan:
    if p not in SUPPORTED_ORDERS:
        raise ValueError(f"order must be one of {SUPPORTED_ORDERS}, got {p}")
    if r < 1:
        raise ValueError("r must be >= 1")
    if not model.terms:
        raise ValueError("cannot build a plan for an empty Hamiltonian")
    if ordering == "forward":
        order = list(range(len(model.terms)))
    elif ordering == "even-odd":
        order = _even_odd_order(model)
    else:
        raise ValueError(f"unknown ordering {ordering!r}")

    stages: list[tuple[int, float]] = []
    for fraction in suzuki_stage_multipliers(p):
        if p == 1:
            stages.extend((j, fraction) for j in order)
        else:
            half = fraction / 2.0
            stages.extend((j, half) for j in order)
            stages.extend((j, half) for j in reversed(order))
    return TrotterPlan(model=model, p=p, t=t, r=r, stages=stages, ordering=ordering)


def _term_gate(term: PauliTerm, angle: float) -> np.ndarray:
    """Dense exp(-i angle P) on the term's support, left site most significant."""
    supp = term.support
    mat = _PAULI[term.paulis[supp[0]]]
    for q in supp[1:]:
        mat = np.kron(mat, _PAULI[term.paulis[q]])
    dim = mat.shape[0]
    return math.cos(angle) * np.eye(dim) - 1j * math.sin(angle) * mat


def _execute_dense(plan: TrotterPlan, state: DenseState) -> DenseState:
    tau = plan.tau
    for _ in range(plan.r):
        for j, mult in plan.stages:
            state = apply_term_exponential(state, plan.model.terms[j], mult * tau)
    return state


def _execute_mps(
    plan: TrotterPlan,
    state: MpsState,
    chi_max: int | None,
    cutoff: float,
) -> MpsState:
    tau = plan.tau
    gates: list[tuple[str, int, np.ndarray]] = []
    for j, mult in plan.stages:
        term = plan.model.terms[j]
        if abs(term.coefficient.imag) > 1e-12:
            raise ValueError("term exponential requires a real coefficient")
        angle = mult * tau * term.coefficient.real
        supp = term.support
        if len(supp) == 1:
            gates.append(("one", supp[0], _term_gate(term, angle)))
        elif len(supp) == 2 and supp[1] == supp[0] + 1:
            gates.append(("two", supp[0], _term_gate(term, angle)))
        else:
            raise ValueError(
                "MPS backend supports single-site and nearest-neighbor terms only"
            )
    for _ in range(plan.r):
        for kind, site, gate in gates:
            if kind == "one":
                state = apply_single_site_gate(state, site, gate)
            else:
                state, _ = apply_two_site_gate(state, site, gate, chi_max, cutoff)
    return state


def execute(
    plan: TrotterPlan,
    state: DenseState | MpsState,
    chi_max: int | None = None,
    cutoff: float = 1e-12,
):
    """Run the full r-step product formula on a dense or MPS state."""
    if state.n != plan.n:
        raise ValueError("plan register size does not match the state")
    if isinstance(state, DenseState):
        return _execute_dense(plan, state)
    if isinstance(state, MpsState):
        return _execute_mps(plan, state, chi_max, cutoff)
    raise TypeError(f"unsupported state type {type(state).__name__}")


@dataclass
class ErrorSample:
    n: int
    p: int
    r: int
    t: float
    backend: str
    error: float
    runtime_s: float
    s_max_initial: float
    s_max_final: float


def measure_error(
    model: HamiltonianModel,
    psi0: DenseState,
    p: int,
    t: float,
    r: int,
    ordering: str = "forward",
    cut_mode: str = "contiguous",
    propagator: ExactPropagator | None = None,
) -> ErrorSample:
    """l2 distance between the r-step product formula and exact evolution."""
    start = time.perf_counter()
    plan = build_plan(model, p, t, r, ordering)
    approx = execute(plan, psi0)
    exact = (propagator or ExactPropagator(model)).evolve(psi0, t)
    err = state_distance(approx, exact)
    s0 = max_entropy(psi0, cut_mode) if psi0.n >= 2 else 0.0
    s1 = max_entropy(exact, cut_mode) if psi0.n >= 2 else 0.0
    return ErrorSample(
        n=model.n,
        p=p,
        r=r,
        t=t,
        backend="dense",
        error=err,
        runtime_s=time.perf_counter() - start,
        s_max_initial=s0,
        s_max_final=s1,
    )


def single_step_error(
    model: HamiltonianModel,
    psi0: DenseState,
    p: int,
    tau: float,
    propagator: ExactPropagator | None = None,
) -> float:
    plan = build_plan(model, p, tau, 1)
    approx = execute(plan, psi0)
    exact = (propagator or ExactPropagator(model)).evolve(psi0, tau)
    return state_distance(approx, exact)


@dataclass
class OrderFit:
    """Least-squares slope of log error against log tau."""

    p: int
    slope: float
    intercept: float
    stderr: float
    taus: list[float] = field(default_factory=list)
    errors: list[float] = field(default_factory=list)
    used: int = 0
    degenerate: bool = False


def order_scaling_fit(
    model: HamiltonianModel,
    psi0: DenseState,
    p: int,
    taus: list[float],
) -> OrderFit:
    """Fit the single-step error power law; expected slope is p + 1.

    Samples at or below the numerical floor are excluded; if fewer than
    two remain (fully commuting models, say) the fit is flagged
    degenerate instead of reporting a meaningless slope.
    """
    if len(taus) < 4:
        raise ValueError("need at least 4 tau samples")
    prop = ExactPropagator(model)
    errors = [single_step_error(model, psi0, p, tau, prop) for tau in taus]
    pairs = [(tau, e) for tau, e in zip(taus, errors) if e > ERROR_FLOOR]
    fit = OrderFit(p=p, slope=float("nan"), intercept=float("nan"), stderr=float("nan"),
                   taus=list(taus), errors=errors, used=len(pairs))
    if len(pairs) < 2:
        fit.degenerate = True
        return fit
    x = np.log([tau for tau, _ in pairs])
    y = np.log([e for _, e in pairs])
    coeffs, cov = np.polyfit(x, y, 1, cov=True) if len(pairs) > 2 else (
        np.polyfit(x, y, 1),
        np.full((2, 2), np.nan),
    )
    fit.slope = float(coeffs[0])
    fit.intercept = float(coeffs[1])
    fit.stderr = float(np.sqrt(cov[0, 0])) if np.isfinite(cov[0, 0]) else float("nan")
    return fit

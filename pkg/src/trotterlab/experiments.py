"""Experiment drivers: validation panels, scaling studies, and resource tables.

Every run is a pure function of (config, seed).  Records come back sorted by
key columns and serialize to byte-stable CSV so reruns diff clean; wall-clock
times go to the manifest, never into the CSV.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from itertools import combinations
from pathlib import Path

import numpy as np

from .bounds import (
    DEFAULT_CONSTANTS,
    BoundParams,
    commutator_entropy_bound,
    evaluate_bounds,
    required_steps,
    s_max_preset,
)
from .dense import (
    DENSE_LIMIT,
    DenseState,
    ExactPropagator,
    apply_single_qubit_unitary,
    commutator_expectation,
    entanglement_entropy,
    from_product,
    random_unitary_2x2,
    schmidt_spectrum,
)
from .hamiltonians import (
    HamiltonianModel,
    build_all_to_all_ising,
    build_heisenberg,
    build_syk4,
    build_tfim,
    interaction_metadata,
)
from .mps import mps_from_product, mps_max_bond_entropy, mps_overlap
from .pauli import PauliTerm
from .trotter import (
    SUPPORTED_ORDERS,
    build_plan,
    execute,
    measure_error,
    order_scaling_fit,
)

EXPERIMENTS = ("validate", "separation", "orders", "resources", "sweep")
MODEL_FAMILIES = ("tfim", "heisenberg", "all_to_all_ising", "syk4")
CUT_MODES = ("contiguous", "all-balanced")

# Fixed column order; every row carries every column, empty cells explicit.
CSV_COLUMNS = (
    "experiment", "model", "geometry", "n", "L", "J", "h", "d", "t", "p", "r",
    "chi_max", "cutoff", "seed", "backend", "curve_provenance",
    "S_max_initial", "S_star", "error", "bound_standard", "bound_ent_first",
    "bound_ent_p", "discarded_weight", "improvement", "runtime_ms",
)
_INT_COLUMNS = frozenset({"n", "L", "d", "p", "r", "chi_max", "seed"})
_STR_COLUMNS = frozenset({"experiment", "model", "geometry", "backend", "curve_provenance"})

# Only nearest-neighbour chain families have an MPS circuit; the rest are
# dense-only and therefore capped at DENSE_LIMIT qubits.
_CHAIN_FAMILIES = ("tfim", "heisenberg")


class ConfigError(ValueError):
    """Config rejected before any computation, with a one-line reason."""


@dataclass
class ExperimentConfig:
    experiment: str
    model: dict
    n_list: list[int]
    t: float
    r_list: list[int]
    p: int
    chi_max: int
    cutoff: float
    cut_mode: str
    seed: int
    out_dir: str

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "model": dict(self.model),
            "n_list": list(self.n_list),
            "t": self.t,
            "r_list": list(self.r_list),
            "p": self.p,
            "chi_max": self.chi_max,
            "cutoff": self.cutoff,
            "cut_mode": self.cut_mode,
            "seed": self.seed,
            "out_dir": self.out_dir,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError(f"config must be a JSON object, got {type(raw).__name__}")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        missing = sorted(known - set(raw))
        if missing:
            raise ConfigError(f"missing config keys: {', '.join(missing)}")
        try:
            cfg = cls(
                experiment=str(raw["experiment"]),
                model=dict(raw["model"]),
                n_list=[int(v) for v in raw["n_list"]],
                t=float(raw["t"]),
                r_list=[int(v) for v in raw["r_list"]],
                p=int(raw["p"]),
                chi_max=int(raw["chi_max"]),
                cutoff=float(raw["cutoff"]),
                cut_mode=str(raw["cut_mode"]),
                seed=int(raw["seed"]),
                out_dir=str(raw["out_dir"]),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed config value: {exc}") from exc
        validate_config(cfg)
        return cfg

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)


def validate_config(config: ExperimentConfig) -> None:
    """Raise ConfigError with a one-line reason; silence means runnable."""
    if config.experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {config.experiment!r}; expected one of {EXPERIMENTS}")
    family = config.model.get("family")
    if family not in MODEL_FAMILIES:
        raise ConfigError(f"unknown model family {family!r}; expected one of {MODEL_FAMILIES}")
    for key, value in config.model.items():
        if key == "family":
            continue
        if not isinstance(value, (int, float)):
            raise ConfigError(f"model parameter {key!r} must be numeric, got {value!r}")
    if not config.n_list or any(n < 1 for n in config.n_list):
        raise ConfigError("n_list must be a non-empty list of positive qubit counts")
    if not config.r_list or any(r < 1 for r in config.r_list):
        raise ConfigError("r_list must be a non-empty list of positive step counts")
    if not config.t > 0:
        raise ConfigError(f"t must be positive, got {config.t}")
    if config.p not in SUPPORTED_ORDERS:
        raise ConfigError(f"order p={config.p} unsupported; choose from {SUPPORTED_ORDERS}")
    if config.chi_max < 1:
        raise ConfigError(f"chi_max must be >= 1, got {config.chi_max}")
    if config.cutoff < 0:
        raise ConfigError(f"cutoff must be >= 0, got {config.cutoff}")
    if config.cut_mode not in CUT_MODES:
        raise ConfigError(f"cut_mode {config.cut_mode!r} not in {CUT_MODES}")
    if config.seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {config.seed}")
    big = max(config.n_list)
    if config.experiment in ("separation", "orders") and big > DENSE_LIMIT:
        raise ConfigError(f"{config.experiment} runs on the dense backend: n={big} exceeds {DENSE_LIMIT}")
    if config.experiment in ("validate", "sweep") and family not in _CHAIN_FAMILIES and big > DENSE_LIMIT:
        raise ConfigError(f"family {family!r} has no MPS circuit: n={big} exceeds the dense limit {DENSE_LIMIT}")
    if config.experiment == "validate" and family != "tfim":
        raise ConfigError(f"validate reproduces the TFIM quench; got family {family!r}")


def default_config(experiment: str, seed: int = 7, out_dir: str | None = None) -> ExperimentConfig:
    """Built-in parameter sets; `validate` carries the quench defaults
    (J=1, h=2.5, t=1, r=20, chi<=16, n in {8,...,128})."""
    out = out_dir if out_dir is not None else f"runs/{experiment}"
    if experiment == "validate":
        return ExperimentConfig(
            "validate", {"family": "tfim", "J": 1.0, "h": 2.5},
            [8, 16, 32, 64, 128], 1.0, [20], 1, 16, 0.0, "contiguous", seed, out,
        )
    if experiment == "separation":
        return ExperimentConfig(
            "separation", {"family": "tfim", "J": 1.0, "h": 1.0},
            [6, 8, 10, 12], 1.0, [32], 1, 16, 0.0, "contiguous", seed, out,
        )
    if experiment == "orders":
        return ExperimentConfig(
            "orders", {"family": "tfim", "J": 1.0, "h": 1.0},
            [6], 1.0, [1], 4, 16, 0.0, "contiguous", seed, out,
        )
    if experiment == "resources":
        return ExperimentConfig(
            "resources", {"family": "tfim", "J": 1.0, "h": 2.5},
            [100], 1.0, [1], 1, 16, 0.0, "contiguous", seed, out,
        )
    if experiment == "sweep":
        return ExperimentConfig(
            "sweep", {"family": "tfim", "J": 1.0, "h": 2.5},
            [4, 6, 8, 10], 1.0, [4, 8, 16, 32], 2, 32, 1e-12, "contiguous", seed, out,
        )
    raise ConfigError(f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")


@dataclass
class ExperimentRecord:
    """One CSV row.  None means an explicitly empty cell."""

    experiment: str
    model: str = ""
    geometry: str = ""
    n: int | None = None
    L: int | None = None
    J: float | None = None
    h: float | None = None
    d: int | None = None
    t: float | None = None
    p: int | None = None
    r: int | None = None
    chi_max: int | None = None
    cutoff: float | None = None
    seed: int | None = None
    backend: str = ""
    curve_provenance: str = ""
    S_max_initial: float | None = None
    S_star: float | None = None
    error: float | None = None
    bound_standard: float | None = None
    bound_ent_first: float | None = None
    bound_ent_p: float | None = None
    discarded_weight: float | None = None
    improvement: float | None = None
    runtime_ms: float | None = None

    def to_row(self) -> list[str]:
        return [_format_cell(getattr(self, col), col) for col in CSV_COLUMNS]

    @classmethod
    def from_row(cls, row: list[str]) -> "ExperimentRecord":
        if len(row) != len(CSV_COLUMNS):
            raise ValueError(f"row has {len(row)} cells, expected {len(CSV_COLUMNS)}")
        kwargs = {}
        for col, cell in zip(CSV_COLUMNS, row):
            if col in _STR_COLUMNS:
                kwargs[col] = cell
            elif cell == "":
                kwargs[col] = None
            elif col in _INT_COLUMNS:
                kwargs[col] = int(cell)
            else:
                kwargs[col] = float(cell)
        return cls(**kwargs)

    def sort_key(self) -> tuple:
        key = []
        for col in CSV_COLUMNS:
            value = getattr(self, col)
            if col in _STR_COLUMNS:
                key.append(value)
            else:
                key.append((0, 0.0) if value is None else (1, float(value)))
        return tuple(key)


def _format_cell(value, col: str) -> str:
    if col in _STR_COLUMNS:
        if "," in value or "\n" in value:
            raise ValueError(f"cell for {col!r} may not contain separators: {value!r}")
        return value
    if value is None:
        return ""
    if col in _INT_COLUMNS:
        return str(int(value))
    return repr(float(value))


def records_sorted(records: list[ExperimentRecord]) -> list[ExperimentRecord]:
    return sorted(records, key=ExperimentRecord.sort_key)


def records_to_csv(records: list[ExperimentRecord]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(",".join(rec.to_row()) for rec in records_sorted(records))
    return "\n".join(lines) + "\n"


def parse_records(path: str | Path) -> list[ExperimentRecord]:
    lines = Path(path).read_text().splitlines()
    if not lines or tuple(lines[0].split(",")) != CSV_COLUMNS:
        raise ValueError(f"{path} does not start with the expected column header")
    return [ExperimentRecord.from_row(line.split(",")) for line in lines[1:]]


@dataclass
class RunResult:
    records: list[ExperimentRecord]
    summary: dict
    timings_ms: dict = field(default_factory=dict)


def _pmap(fn, items, threads: int):
    """Order-preserving map; grid points are independent jobs."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def build_model(family: str, n: int, params: dict, seed: int = 0) -> HamiltonianModel:
    if family == "tfim":
        return build_tfim(n, float(params.get("J", 1.0)), float(params.get("h", 1.0)))
    if family == "heisenberg":
        return build_heisenberg(n, float(params.get("J", 1.0)))
    if family == "all_to_all_ising":
        return build_all_to_all_ising(n, float(params.get("h", 1.0)))
    if family == "syk4":
        return build_syk4(n, float(params.get("J", 1.0)), seed)
    raise ConfigError(f"unknown model family {family!r}")


# Quench experiments start from |0>^n; the separation and order studies use
# |+>^n, which the all-to-all construction is built around.
QUENCH_PATTERN = "zeros"


def _mps_final_state(model: HamiltonianModel, t: float, r: int, p: int,
                     chi_max: int, cutoff: float, pattern: str = QUENCH_PATTERN):
    plan = build_plan(model, p, t, r)
    start = mps_from_product(model.n, pattern, chi_max=chi_max)
    return execute(plan, start, chi_max=chi_max, cutoff=cutoff)


def mps_step_halving(model: HamiltonianModel, t: float, r: int, p: int,
                     chi_max: int, cutoff: float,
                     pattern: str = QUENCH_PATTERN) -> tuple[float, float, float]:
    """Self-consistency error proxy beyond the dense limit: the l2 distance
    between the r-step and 2r-step states brackets the true error within a
    factor ~2 for first order.  Returns (distance, final S_max, discarded)."""
    coarse = _mps_final_state(model, t, r, p, chi_max, cutoff, pattern)
    fine = _mps_final_state(model, t, 2 * r, p, chi_max, cutoff, pattern)
    overlap = mps_overlap(coarse, fine)
    dist = math.sqrt(max(0.0, 2.0 - 2.0 * overlap.real))
    return dist, mps_max_bond_entropy(coarse), coarse.cum_discarded


def controlled_entropy_state(n: int, cut: int, pairs: int,
                             rng: np.random.Generator) -> DenseState:
    """Product state entangled by `pairs` Bell pairs across `cut`, dressed
    with a random single-qubit rotation on every site.

    Local rotations leave the Schmidt spectrum alone, so the spectrum across
    the cut is exactly uniform on 2^pairs values and S = pairs bits.
    """
    if not 0 < cut < n:
        raise ValueError(f"cut must split the register, got cut={cut} for n={n}")
    if not 0 <= pairs <= min(cut, n - cut):
        raise ValueError(f"pairs must lie in [0, {min(cut, n - cut)}], got {pairs}")
    amps = np.zeros(2**n, dtype=complex)
    weight = 2.0 ** (-pairs / 2.0)
    for b in range(2**pairs):
        idx = 0
        for m in range(pairs):
            if (b >> m) & 1:
                idx |= (1 << (cut - 1 - m)) | (1 << (cut + m))
        amps[idx] = weight
    state = DenseState(n=n, amplitudes=amps)
    for q in range(n):
        state = apply_single_qubit_unitary(state, q, random_unitary_2x2(rng))
    return state


def straddling_pauli_pairs(cut: int) -> list[tuple[PauliTerm, PauliTerm]]:
    """All unordered pairs of two-site Pauli strings on the bond (cut-1, cut);
    each string has support on both sides, so the pair straddles the cut."""
    letters = "XYZ"
    strings = [
        PauliTerm(1.0, {cut - 1: a, cut: b}) for a in letters for b in letters
    ]
    return list(combinations(strings, 2))


def commutator_cut_sweep(state: DenseState, cut: int) -> tuple[float, float]:
    """Cut entropy and the largest |<[a,b]>| over the straddling-pair sweep."""
    spectrum = schmidt_spectrum(state, tuple(range(cut)))
    entropy = entanglement_entropy(spectrum)
    best = 0.0
    for a, b in straddling_pauli_pairs(cut):
        best = max(best, abs(commutator_expectation(state, a, b)))
    return entropy, best


def run_validation(config: ExperimentConfig, threads: int = 1) -> RunResult:
    """Four panels: (a) S_max vs n against the n/2 volume reference,
    (b) commutator expectations vs cut entropy against the 2*2^S curve,
    (c) measured error vs n with both bound curves, (d) the volume-bound to
    area-measured ratio."""
    if config.model.get("family") != "tfim":
        raise ConfigError("run_validation needs the tfim family")
    J = float(config.model.get("J", 1.0))
    h = float(config.model.get("h", 2.5))
    t, p, r = config.t, config.p, config.r_list[0]
    records: list[ExperimentRecord] = []
    timings: dict[str, float] = {}
    common = dict(J=J, h=h, t=t, p=p, r=r, seed=config.seed)

    # Panel a: final S_max stays flat for the area-law quench.
    tick = time.perf_counter()
    def _panel_a(n: int):
        final = _mps_final_state(build_tfim(n, J, h), t, r, p, config.chi_max, config.cutoff)
        return n, mps_max_bond_entropy(final), final.cum_discarded
    for n, s_max, discarded in _pmap(_panel_a, config.n_list, threads):
        records.append(ExperimentRecord(
            experiment="validate/panel_a", model="tfim", geometry="chain",
            n=n, L=2 * n - 1, chi_max=config.chi_max, cutoff=config.cutoff,
            backend="mps", curve_provenance="measured", S_max_initial=0.0,
            S_star=s_max, discarded_weight=discarded, **common,
        ))
        records.append(ExperimentRecord(
            experiment="validate/panel_a", n=n,
            curve_provenance="bound", S_star=n / 2.0,
        ))
    panel_a_bits = max(rec.S_star for rec in records
                       if rec.experiment == "validate/panel_a" and rec.curve_provenance == "measured")
    timings["panel_a_ms"] = (time.perf_counter() - tick) * 1e3

    # Panel b: straddling-pair commutators on controlled-entropy states.
    tick = time.perf_counter()
    n_b = 8
    cut = n_b // 2
    rng = np.random.default_rng(config.seed)
    for pairs in range(cut + 1):
        for _ in range(3):
            state = controlled_entropy_state(n_b, cut, pairs, rng)
            entropy, best = commutator_cut_sweep(state, cut)
            records.append(ExperimentRecord(
                experiment="validate/panel_b", model="tfim", geometry="chain",
                n=n_b, seed=config.seed, backend="dense",
                curve_provenance="measured", S_star=entropy, error=best,
            ))
        records.append(ExperimentRecord(
            experiment="validate/panel_b", n=n_b, curve_provenance="bound",
            S_star=float(pairs),
            error=commutator_entropy_bound(float(pairs), 1.0, 1.0).raw,
        ))
    timings["panel_b_ms"] = (time.perf_counter() - tick) * 1e3

    # Panel c: measured error (dense truth up to the limit, step-halving proxy
    # beyond) against the worst-case and entanglement bound curves.
    tick = time.perf_counter()
    def _panel_c(n: int):
        model = build_tfim(n, J, h)
        if n <= DENSE_LIMIT:
            sample = measure_error(model, from_product(n, QUENCH_PATTERN), p, t, r,
                                   cut_mode=config.cut_mode)
            return n, "dense", sample.error, None, sample.s_max_final
        proxy, s_max, discarded = mps_step_halving(model, t, r, p, config.chi_max, config.cutoff)
        return n, "mps", proxy, discarded, s_max
    panel_c_points = _pmap(_panel_c, config.n_list, threads)
    soundness = {"checked": 0, "violations": []}
    area_error: dict[int, float] = {}
    for n, backend, error, discarded, s_max in panel_c_points:
        area_error[n] = error
        records.append(ExperimentRecord(
            experiment="validate/panel_c", model="tfim", geometry="chain",
            n=n, L=2 * n - 1, chi_max=config.chi_max if backend == "mps" else None,
            cutoff=config.cutoff if backend == "mps" else None,
            backend=backend, curve_provenance="measured",
            S_max_initial=0.0, S_star=s_max, error=error,
            discarded_weight=discarded, **common,
        ))
        report = evaluate_bounds(BoundParams(n=n, L=2 * n - 1, J=J, d=2, t=t, p=p, S_max=0.0), r)
        records.append(ExperimentRecord(
            experiment="validate/panel_c", model="tfim", geometry="chain",
            n=n, L=2 * n - 1, curve_provenance="bound",
            S_star=report.S_star, bound_standard=report.standard,
            bound_ent_first=report.ent_first, bound_ent_p=report.ent_p,
            **common,
        ))
        if backend == "dense":
            soundness["checked"] += 1
            if error > report.ent_first:
                soundness["violations"].append(
                    {"n": n, "error": error, "bound_ent_first": report.ent_first})
    timings["panel_c_ms"] = (time.perf_counter() - tick) * 1e3

    # Panel d: volume-law lower-bound shape over the measured area-law error.
    tick = time.perf_counter()
    ratios = []
    for n in sorted(area_error):
        numerator = t**2 * 1.0 * n / r  # h=1 all-to-all lower-bound shape
        denominator = area_error[n]
        ratio = numerator / denominator
        ratios.append(ratio)
        records.append(ExperimentRecord(
            experiment="validate/panel_d", model="all_to_all_ising",
            geometry="all-to-all", n=n, t=t, p=p, r=r, h=1.0,
            curve_provenance="bound", error=numerator,
        ))
        records.append(ExperimentRecord(
            experiment="validate/panel_d", model="tfim", geometry="chain",
            n=n, curve_provenance="measured", error=denominator,
            improvement=ratio, **common,
        ))
    timings["panel_d_ms"] = (time.perf_counter() - tick) * 1e3

    summary = {
        "panel_a_max_bits": panel_a_bits,
        "panel_a_below_one_bit": panel_a_bits < 1.0,
        "ent_first_soundness": soundness,
        "panel_d_ratios": ratios,
        "panel_d_monotone": all(a < b for a, b in zip(ratios, ratios[1:])),
    }
    return RunResult(records, summary, timings)


def run_separation(config: ExperimentConfig, threads: int = 1) -> RunResult:
    """Area-law chain vs volume-law all-to-all error growth at identical
    (t, r): fits both exponents and the per-n error ratio."""
    J = float(config.model.get("J", 1.0))
    h = float(config.model.get("h", 1.0))
    t, p, r = config.t, config.p, config.r_list[0]
    if max(config.n_list) > DENSE_LIMIT:
        raise ConfigError(f"separation runs on the dense backend: n={max(config.n_list)} exceeds {DENSE_LIMIT}")

    def _point(n: int):
        psi0 = from_product(n, "plus")
        area = measure_error(build_tfim(n, J, h), psi0, p, t, r, cut_mode=config.cut_mode)
        volume = measure_error(build_all_to_all_ising(n, h), psi0, p, t, r, cut_mode=config.cut_mode)
        return n, area, volume

    tick = time.perf_counter()
    points = _pmap(_point, sorted(config.n_list), threads)
    records = []
    ratios = []
    for n, area, volume in points:
        ratio = volume.error / area.error
        ratios.append(ratio)
        records.append(ExperimentRecord(
            experiment="separation", model="tfim", geometry="chain",
            n=n, L=2 * n - 1, J=J, h=h, t=t, p=p, r=r, seed=config.seed,
            backend="dense", curve_provenance="measured",
            S_max_initial=area.s_max_initial, S_star=area.s_max_final,
            error=area.error,
        ))
        records.append(ExperimentRecord(
            experiment="separation", model="all_to_all_ising",
            geometry="all-to-all", n=n, L=n * (n - 1) // 2 + n, h=h,
            t=t, p=p, r=r, seed=config.seed, backend="dense",
            curve_provenance="measured", S_max_initial=volume.s_max_initial,
            S_star=volume.s_max_final, error=volume.error,
            improvement=ratio,
        ))

    ns = np.array([n for n, _, _ in points], dtype=float)
    area_errs = np.array([a.error for _, a, _ in points])
    vol_errs = np.array([v.error for _, _, v in points])
    log_n = np.log(ns)
    volume_slope = float(np.polyfit(log_n, np.log(vol_errs), 1)[0])
    area_slope = float(np.polyfit(log_n, np.log(area_errs), 1)[0])
    normalized_slope = float(np.polyfit(log_n, np.log(area_errs / np.log2(ns) ** 2), 1)[0])
    summary = {
        "volume_slope": volume_slope,
        "area_slope": area_slope,
        "area_normalized_slope": normalized_slope,
        "ratios": ratios,
        "ratio_increasing": all(a < b for a, b in zip(ratios, ratios[1:])),
    }
    return RunResult(records, summary, {"separation_ms": (time.perf_counter() - tick) * 1e3})


def run_order_sweep(config: ExperimentConfig, threads: int = 1) -> RunResult:
    """Single-step error vs tau for every supported order up to config.p;
    the fitted log-log slope should sit near p+1."""
    n = config.n_list[0]
    if n > DENSE_LIMIT:
        raise ConfigError(f"orders runs on the dense backend: n={n} exceeds {DENSE_LIMIT}")
    model = build_model(config.model.get("family", "tfim"), n, config.model, config.seed)
    taus = [2.0**-k for k in range(4, 11)]
    orders = [q for q in SUPPORTED_ORDERS if q <= config.p]
    psi0 = from_product(n, "plus")

    tick = time.perf_counter()
    results = _pmap(lambda q: order_scaling_fit(model, psi0, q, taus), orders, threads)
    records = []
    slopes = {}
    for fit in results:
        q = fit.p
        for tau, err in zip(fit.taus, fit.errors):
            records.append(ExperimentRecord(
                experiment="orders", model=config.model.get("family", "tfim"),
                geometry=model.geometry, n=n, L=model.term_count,
                J=float(config.model.get("J", 1.0)),
                h=float(config.model.get("h")) if "h" in config.model else None,
                t=tau, p=q, r=1, seed=config.seed, backend="dense",
                curve_provenance="measured", error=err,
            ))
        slopes[str(q)] = {
            "slope": fit.slope,
            "stderr": fit.stderr,
            "expected": float(q + 1),
            "points_used": fit.used,
        }
    summary = {"slopes": slopes, "taus": taus}
    return RunResult(records, summary, {"orders_ms": (time.perf_counter() - tick) * 1e3})


# (geometry, n, d, paper target) rows of the step-count comparison table.
RESOURCE_ROWS = (
    ("chain", 100, 2, 200.0),
    ("chain", 1000, 2, 1e4),
    ("grid2d", 100, 4, 20.0),
    ("grid2d", 1024, 4, 300.0),
    ("tree", 100, 3, 200.0),
    ("grid3d", 125, 6, 30.0),
)


def run_resource_table(config: ExperimentConfig, threads: int = 1) -> RunResult:
    """Normalized step-count shapes per t^2 J^2 / eps: worst case n^2 against
    the geometry entanglement ceiling times log2^2 n, for the six table rows."""
    tick = time.perf_counter()
    records = []
    rows = []
    for geometry, n, d, target in RESOURCE_ROWS:
        s_geo = s_max_preset(geometry, n)
        worst = float(n) ** 2
        ours = s_geo * math.log2(n) ** 2
        improvement = worst / ours
        params = BoundParams(n=n, L=n, J=1.0, d=d, t=1.0, p=1, S_max=s_geo)
        full_ratio = (required_steps(params, 1e-3, "standard")
                      / required_steps(params, 1e-3, "entanglement"))
        records.append(ExperimentRecord(
            experiment="resources", geometry=geometry, n=n, d=d,
            curve_provenance="bound", S_star=s_geo, bound_standard=worst,
            bound_ent_first=ours, improvement=improvement,
        ))
        rows.append({
            "geometry": geometry, "n": n, "worst": worst, "ours": ours,
            "improvement": improvement, "paper_target": target,
            "within_factor_2": max(improvement / target, target / improvement) <= 2.0,
            "full_constant_ratio": full_ratio,
        })
    summary = {"rows": rows, "all_within_factor_2": all(row["within_factor_2"] for row in rows)}
    return RunResult(records, summary, {"resources_ms": (time.perf_counter() - tick) * 1e3})


def run_sweep(config: ExperimentConfig, threads: int = 1) -> RunResult:
    """Generic (n, r) grid: dense truth plus bound columns up to the dense
    limit, step-halving proxy beyond it."""
    family = config.model.get("family", "tfim")
    J = float(config.model.get("J", 1.0))
    h = float(config.model.get("h")) if "h" in config.model else None
    t, p = config.t, config.p
    grid = [(n, r) for n in sorted(config.n_list) for r in sorted(config.r_list)]

    tick = time.perf_counter()
    models = {n: build_model(family, n, config.model, config.seed) for n in sorted(config.n_list)}
    propagators = {n: ExactPropagator(m) for n, m in models.items() if n <= DENSE_LIMIT}

    def _point(point):
        n, r = point
        model = models[n]
        meta = interaction_metadata(model)
        if n <= DENSE_LIMIT:
            sample = measure_error(model, from_product(n, QUENCH_PATTERN), p, t, r,
                                   cut_mode=config.cut_mode, propagator=propagators[n])
            report = evaluate_bounds(BoundParams(
                n=n, L=model.term_count, J=meta.max_interaction,
                d=meta.max_degree, t=t, p=p, S_max=sample.s_max_initial), r)
            return ExperimentRecord(
                experiment="sweep", model=family, geometry=model.geometry,
                n=n, L=model.term_count, J=J, h=h, d=meta.max_degree,
                t=t, p=p, r=r, seed=config.seed, backend="dense",
                curve_provenance="measured", S_max_initial=sample.s_max_initial,
                S_star=report.S_star, error=sample.error,
                bound_standard=report.standard, bound_ent_first=report.ent_first,
                bound_ent_p=report.ent_p,
            )
        proxy, s_max, discarded = mps_step_halving(model, t, r, p, config.chi_max, config.cutoff)
        return ExperimentRecord(
            experiment="sweep", model=family, geometry=model.geometry,
            n=n, L=model.term_count, J=J, h=h, d=meta.max_degree,
            t=t, p=p, r=r, chi_max=config.chi_max, cutoff=config.cutoff,
            seed=config.seed, backend="mps", curve_provenance="measured",
            S_max_initial=0.0, S_star=s_max, error=proxy,
            discarded_weight=discarded,
        )

    records = _pmap(_point, grid, threads)
    errors = [rec.error for rec in records]
    summary = {"points": len(records), "max_error": max(errors), "min_error": min(errors)}
    return RunResult(records, summary, {"sweep_ms": (time.perf_counter() - tick) * 1e3})


RUNNERS = {
    "validate": run_validation,
    "separation": run_separation,
    "orders": run_order_sweep,
    "resources": run_resource_table,
    "sweep": run_sweep,
}


def run_experiment(config: ExperimentConfig, threads: int = 1) -> RunResult:
    validate_config(config)
    start = time.perf_counter()
    result = RUNNERS[config.experiment](config, threads)
    result.records = records_sorted(result.records)
    result.timings_ms["total_ms"] = (time.perf_counter() - start) * 1e3
    return result


def _panel_name(experiment_field: str) -> str:
    return experiment_field.split("/", 1)[1] if "/" in experiment_field else experiment_field


def emit_outputs(records: list[ExperimentRecord], formats: tuple[str, ...],
                 config: ExperimentConfig, summary: dict | None = None,
                 timings_ms: dict | None = None) -> list[Path]:
    """Write per-panel CSVs, the manifest, and (optionally) SVG plots.

    All payloads are built before anything touches disk, so a bad request
    leaves no partial files behind.
    """
    if not records:
        raise ValueError("empty record set: nothing to emit")
    bad = [f for f in formats if f not in ("csv", "svg")]
    if bad:
        raise ValueError(f"unknown output formats: {bad}")

    panels: dict[str, list[ExperimentRecord]] = {}
    for rec in records_sorted(records):
        panels.setdefault(_panel_name(rec.experiment), []).append(rec)
    if config.experiment == "validate":
        expected = ("panel_a", "panel_b", "panel_c", "panel_d")
        missing = [name for name in expected if not panels.get(name)]
        if missing:
            raise ValueError(f"validate output needs all four panels; empty: {missing}")

    payloads = {f"{name}.csv": records_to_csv(recs) for name, recs in panels.items()}

    figures = []
    if "svg" in formats:
        from .plots import render_panels  # matplotlib stays optional at runtime
        figures = render_panels(panels, config)

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        for name, text in sorted(payloads.items()):
            path = out_dir / name
            try:
                path.write_text(text)
            except OSError as exc:
                raise OSError(f"failed writing {path}: {exc}") from exc
            written.append(path)
    for name, svg_text in figures:
        path = out_dir / name
        try:
            path.write_text(svg_text)
        except OSError as exc:
            raise OSError(f"failed writing {path}: {exc}") from exc
        written.append(path)

    manifest = build_manifest(config, summary=summary, timings_ms=timings_ms,
                              outputs=[p.name for p in written])
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    written.append(manifest_path)
    return written


def build_manifest(config: ExperimentConfig, summary: dict | None = None,
                   timings_ms: dict | None = None, outputs: list[str] | None = None) -> dict:
    import platform
    import scipy

    from . import __version__

    return {
        "config": config.to_dict(),
        "constants": DEFAULT_CONSTANTS.to_dict(),
        "versions": {
            "trotterlab": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "results": summary or {},
        "timings_ms": timings_ms or {},
        "outputs": outputs or [],
    }

import json

import numpy as np
import pytest

from trotterlab.dense import entanglement_entropy, schmidt_spectrum
from trotterlab.experiments import (
    CSV_COLUMNS,
    QUENCH_PATTERN,
    RESOURCE_ROWS,
    ConfigError,
    ExperimentConfig,
    ExperimentRecord,
    build_model,
    commutator_cut_sweep,
    controlled_entropy_state,
    default_config,
    emit_outputs,
    mps_step_halving,
    parse_records,
    records_sorted,
    records_to_csv,
    run_experiment,
    run_resource_table,
    run_separation,
    straddling_pauli_pairs,
    validate_config,
)
from trotterlab.hamiltonians import build_tfim


def _tiny_validate_config(tmp_path, threads_tag=""):
    return ExperimentConfig(
        "validate", {"family": "tfim", "J": 1.0, "h": 2.5},
        [4, 8], 0.5, [4], 1, 8, 0.0, "contiguous", 11,
        str(tmp_path / f"out{threads_tag}"),
    )


def test_default_configs_match_quench_parameters():
    cfg = default_config("validate")
    assert cfg.model == {"family": "tfim", "J": 1.0, "h": 2.5}
    assert cfg.n_list == [8, 16, 32, 64, 128]
    assert (cfg.t, cfg.r_list, cfg.p, cfg.chi_max) == (1.0, [20], 1, 16)
    assert cfg.cutoff == 0.0
    validate_config(cfg)
    for name in ("separation", "orders", "resources", "sweep"):
        validate_config(default_config(name))
    assert default_config("orders").p == 4
    assert default_config("separation").n_list == [6, 8, 10, 12]
    with pytest.raises(ConfigError):
        default_config("frobnicate")


def test_config_json_round_trip(tmp_path):
    cfg = default_config("sweep", seed=3, out_dir=str(tmp_path))
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg.to_dict()))
    back = ExperimentConfig.from_json(path)
    assert back == cfg


def test_config_rejects_unknown_and_missing_keys():
    base = default_config("orders").to_dict()
    extra = dict(base, colour="blue")
    with pytest.raises(ConfigError, match="unknown config keys"):
        ExperimentConfig.from_dict(extra)
    short = {k: v for k, v in base.items() if k != "seed"}
    with pytest.raises(ConfigError, match="missing config keys"):
        ExperimentConfig.from_dict(short)
    mangled = dict(base, t="soon")
    with pytest.raises(ConfigError, match="malformed config value"):
        ExperimentConfig.from_dict(mangled)


def test_config_rejects_bad_json_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        ExperimentConfig.from_json(path)
    with pytest.raises(ConfigError, match="cannot read"):
        ExperimentConfig.from_json(tmp_path / "absent.json")


def test_validate_config_one_line_reasons():
    good = default_config("sweep")
    cases = [
        ({"experiment": "dance"}, "unknown experiment"),
        ({"model": {"family": "hubbard"}}, "unknown model family"),
        ({"model": {"family": "tfim", "J": "strong"}}, "must be numeric"),
        ({"n_list": []}, "n_list"),
        ({"n_list": [0, 4]}, "n_list"),
        ({"r_list": []}, "r_list"),
        ({"t": 0.0}, "t must be positive"),
        ({"p": 3}, "unsupported"),
        ({"chi_max": 0}, "chi_max"),
        ({"cutoff": -1e-9}, "cutoff"),
        ({"cut_mode": "diagonal"}, "cut_mode"),
        ({"seed": -1}, "seed"),
    ]
    for patch, fragment in cases:
        cfg = ExperimentConfig(**{**good.to_dict(), **patch})
        with pytest.raises(ConfigError, match=fragment):
            validate_config(cfg)
        reason = str(pytest.raises(ConfigError, validate_config, cfg).value)
        assert "\n" not in reason


def test_validate_config_backend_limits():
    sep = default_config("separation")
    sep.n_list = [6, 16]
    with pytest.raises(ConfigError, match="dense backend"):
        validate_config(sep)
    val = default_config("validate")
    val.model = {"family": "heisenberg", "J": 1.0}
    with pytest.raises(ConfigError, match="TFIM quench"):
        validate_config(val)
    sweep = default_config("sweep")
    sweep.model = {"family": "syk4", "J": 1.0}
    sweep.n_list = [4, 16]
    with pytest.raises(ConfigError, match="no MPS circuit"):
        validate_config(sweep)


def test_build_model_families():
    assert build_model("tfim", 6, {"J": 1.0, "h": 2.0}, 0).geometry == "chain"
    assert build_model("heisenberg", 6, {"J": 1.0}, 0).term_count == 15
    assert build_model("all_to_all_ising", 4, {"h": 1.0}, 0).geometry == "all-to-all"
    syk = build_model("syk4", 6, {"J": 1.0}, 9)
    assert syk.term_count == 15
    with pytest.raises(ConfigError):
        build_model("hubbard", 4, {}, 0)


def test_record_row_round_trip():
    rec = ExperimentRecord(
        experiment="sweep", model="tfim", geometry="chain", n=6, L=11, J=1.0,
        h=0.1 + 0.2, t=1.0, p=2, r=8, chi_max=16, cutoff=0.0, seed=7,
        backend="dense", curve_provenance="measured", S_max_initial=0.0,
        S_star=1.765432109876543, error=1e-9, bound_standard=2.5,
    )
    row = rec.to_row()
    assert len(row) == len(CSV_COLUMNS) == 25
    back = ExperimentRecord.from_row(row)
    assert back == rec  # repr() float cells round-trip exactly
    assert row[CSV_COLUMNS.index("runtime_ms")] == ""


def test_record_rejects_separator_in_string_cell():
    rec = ExperimentRecord(experiment="sweep", model="tf,im")
    with pytest.raises(ValueError, match="separators"):
        rec.to_row()


def test_records_sorted_is_deterministic():
    rng = np.random.default_rng(81)
    records = [
        ExperimentRecord(experiment="sweep", model="tfim", n=int(n), r=int(r), error=float(e))
        for n, r, e in zip(rng.integers(2, 12, 30), rng.integers(1, 64, 30), rng.random(30))
    ]
    shuffled = list(records)
    rng.shuffle(shuffled)
    assert records_to_csv(records) == records_to_csv(shuffled)
    order = records_sorted(shuffled)
    assert order == records_sorted(order)


def test_csv_header_and_empty_cells():
    csv = records_to_csv([ExperimentRecord(experiment="orders")])
    header, row = csv.strip().split("\n")
    assert header == ",".join(CSV_COLUMNS)
    assert row.split(",")[0] == "orders"
    assert len(row.split(",")) == 25


def test_controlled_entropy_states_have_flat_spectra():
    rng = np.random.default_rng(82)
    n, cut = 8, 4
    for pairs in range(0, 4):
        psi = controlled_entropy_state(n, cut, pairs, rng)
        spec = schmidt_spectrum(psi, tuple(range(cut)))
        kept = spec.lambdas[spec.lambdas > 1e-12]
        assert len(kept) == 2**pairs
        assert np.allclose(kept, 2.0**-pairs, atol=1e-10)
        assert abs(entanglement_entropy(spec) - pairs) < 1e-9


def test_straddling_pairs_enumeration():
    pairs = straddling_pauli_pairs(4)
    assert len(pairs) == 36  # C(9, 2) over the two-site straddling strings
    seen = set()
    for a, b in pairs:
        for term in (a, b):
            assert sorted(term.paulis) == [3, 4]
            assert abs(term.coefficient - 1.0) < 1e-15
        seen.add((tuple(sorted(a.paulis.items())), tuple(sorted(b.paulis.items()))))
    assert len(seen) == 36


def test_commutator_cut_sweep_respects_bound():
    from trotterlab.bounds import commutator_entropy_bound

    rng = np.random.default_rng(83)
    for pairs in (0, 1, 2):
        psi = controlled_entropy_state(8, 4, pairs, rng)
        s, best = commutator_cut_sweep(psi, 4)
        assert abs(s - pairs) < 1e-9
        assert best <= commutator_entropy_bound(s, 1.0, 1.0).raw + 1e-9


def test_quench_pattern_is_pinned():
    assert QUENCH_PATTERN == "zeros"


def test_mps_step_halving_smoke():
    model = build_tfim(16, 1.0, 2.5)
    proxy, s_max, discarded = mps_step_halving(model, t=0.5, r=4, p=1, chi_max=8, cutoff=0.0)
    assert 0.0 <= proxy < 0.5
    assert 0.0 <= s_max < 1.0
    assert discarded >= 0.0


def test_order_sweep_runner():
    cfg = ExperimentConfig(
        "orders", {"family": "tfim", "J": 1.0, "h": 1.0},
        [4], 1.0, [1], 2, 16, 0.0, "contiguous", 5, "unused",
    )
    res = run_experiment(cfg, threads=2)
    slopes = res.summary["slopes"]
    assert set(slopes) == {"1", "2"}
    assert abs(slopes["1"]["slope"] - 2.0) < 0.2
    assert abs(slopes["2"]["slope"] - 3.0) < 0.25
    assert len(res.records) == 2 * len(res.summary["taus"])
    assert all(rec.backend == "dense" for rec in res.records)


def test_resource_table_runner():
    res = run_resource_table(default_config("resources"))
    rows = res.summary["rows"]
    assert [(r["geometry"], r["n"]) for r in rows] == [(g, n) for g, n, _, _ in RESOURCE_ROWS]
    assert res.summary["all_within_factor_2"]
    chain = rows[0]
    assert abs(chain["improvement"] - 100.0**2 / (np.log2(100.0) ** 2)) < 1e-9
    for row in rows:
        assert row["worst"] == float(row["n"]) ** 2
        assert row["improvement"] == pytest.approx(row["worst"] / row["ours"])
    assert len(res.records) == 6


def test_separation_runner_small():
    cfg = ExperimentConfig(
        "separation", {"family": "tfim", "J": 1.0, "h": 1.0},
        [4, 6], 1.0, [16], 1, 16, 0.0, "contiguous", 5, "unused",
    )
    res = run_separation(cfg)
    assert len(res.records) == 4  # one chain row and one all-to-all row per n
    assert len(res.summary["ratios"]) == 2
    assert np.isfinite(res.summary["volume_slope"])
    vol_rows = [rec for rec in res.records if rec.geometry == "all-to-all"]
    assert all(rec.improvement is not None for rec in vol_rows)


def test_validation_runner_and_outputs(tmp_path):
    cfg = _tiny_validate_config(tmp_path)
    res = run_experiment(cfg, threads=2)
    assert set(res.summary) == {
        "panel_a_max_bits", "panel_a_below_one_bit", "ent_first_soundness",
        "panel_d_ratios", "panel_d_monotone",
    }
    assert res.summary["ent_first_soundness"]["checked"] >= 1
    panels = {rec.experiment.split("/")[1] for rec in res.records}
    assert panels == {"panel_a", "panel_b", "panel_c", "panel_d"}
    half = [rec for rec in res.records
            if rec.experiment == "validate/panel_a" and rec.curve_provenance == "bound"]
    assert {rec.S_star for rec in half} == {n / 2.0 for n in cfg.n_list}

    written = emit_outputs(res.records, ("csv", "svg"), cfg,
                           summary=res.summary, timings_ms=res.timings_ms)
    names = sorted(p.name for p in written)
    assert names == [
        "manifest.json",
        "panel_a.csv", "panel_a.svg", "panel_b.csv", "panel_b.svg",
        "panel_c.csv", "panel_c.svg", "panel_d.csv", "panel_d.svg",
    ]
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["config"] == cfg.to_dict()
    assert "c_growth" in manifest["constants"]
    assert manifest["versions"]["trotterlab"]
    assert "total_ms" in manifest["timings_ms"]
    assert sorted(manifest["outputs"]) == [n for n in names if n != "manifest.json"]

    # parse(emit(records)) gives back the records
    back = parse_records(tmp_path / "out" / "panel_c.csv")
    want = [rec for rec in records_sorted(res.records) if rec.experiment == "validate/panel_c"]
    assert back == want

    # no wall-clock leaks into data or plots
    for name in names:
        if name.endswith(".csv"):
            for line in (tmp_path / "out" / name).read_text().splitlines()[1:]:
                assert line.rstrip().endswith(",")  # runtime_ms cell stays empty
        if name.endswith(".svg"):
            text = (tmp_path / "out" / name).read_text()
            assert "dc:date" not in text


def test_outputs_byte_identical_across_threads(tmp_path):
    texts = []
    for threads in (1, 3):
        cfg = _tiny_validate_config(tmp_path, threads_tag=str(threads))
        res = run_experiment(cfg, threads=threads)
        emit_outputs(res.records, ("csv", "svg"), cfg, summary=res.summary)
        out = tmp_path / f"out{threads}"
        texts.append({p.name: p.read_bytes() for p in sorted(out.iterdir())
                      if p.name != "manifest.json"})
    assert texts[0] == texts[1]


def test_emit_rejects_empty_and_partial_panels(tmp_path):
    cfg = _tiny_validate_config(tmp_path)
    with pytest.raises(ValueError, match="empty record set"):
        emit_outputs([], ("csv",), cfg)
    only_a = [ExperimentRecord(experiment="validate/panel_a", n=4, S_star=2.0)]
    with pytest.raises(ValueError, match="all four panels"):
        emit_outputs(only_a, ("csv",), cfg)
    assert not (tmp_path / "out").exists()  # no partial files on failure
    with pytest.raises(ValueError, match="unknown output formats"):
        emit_outputs(only_a, ("pdf",), default_config("orders", out_dir=str(tmp_path / "x")))


def test_sweep_runner_mixed_backends():
    cfg = ExperimentConfig(
        "sweep", {"family": "tfim", "J": 1.0, "h": 2.5},
        [4, 16], 0.5, [2, 4], 1, 8, 0.0, "contiguous", 5, "unused",
    )
    res = run_experiment(cfg)
    assert res.summary["points"] == 4
    backends = {rec.n: rec.backend for rec in res.records}
    assert backends[4] == "dense" and backends[16] == "mps"
    dense_rows = [rec for rec in res.records if rec.backend == "dense"]
    for rec in dense_rows:
        assert rec.bound_standard is not None and rec.error <= rec.bound_standard
    mps_rows = [rec for rec in res.records if rec.backend == "mps"]
    for rec in mps_rows:
        assert rec.discarded_weight is not None

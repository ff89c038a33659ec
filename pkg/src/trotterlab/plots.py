"""Static SVG renderings of experiment record sets.

Rendering is deterministic: the Agg backend, a seed-pinned hashsalt for SVG
element ids, and no embedded timestamps.
"""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .experiments import ExperimentConfig, ExperimentRecord


def _measured(recs: list[ExperimentRecord]) -> list[ExperimentRecord]:
    return [r for r in recs if r.curve_provenance == "measured"]


def _bound(recs: list[ExperimentRecord]) -> list[ExperimentRecord]:
    return [r for r in recs if r.curve_provenance == "bound"]


def _xy(recs, x_attr, y_attr):
    pts = [(getattr(r, x_attr), getattr(r, y_attr)) for r in recs
           if getattr(r, x_attr) is not None and getattr(r, y_attr) is not None]
    pts.sort()
    return [p[0] for p in pts], [p[1] for p in pts]


def _new_axes():
    fig, ax = plt.subplots(figsize=(5.0, 3.5), constrained_layout=True)
    return fig, ax


def _panel_a(recs):
    fig, ax = _new_axes()
    ns, s = _xy(_measured(recs), "n", "S_star")
    ax.plot(ns, s, "o-", label="max bipartite entropy after quench")
    ns_ref, ref = _xy(_bound(recs), "n", "S_star")
    ax.plot(ns_ref, ref, "--", color="gray", label="volume reference n/2")
    ax.set_xscale("log", base=2)
    ax.set_yscale("log", base=2)
    ax.set_xlabel("qubits n")
    ax.set_ylabel("S_max (bits)")
    ax.legend(fontsize=8)
    return fig


def _panel_b(recs):
    fig, ax = _new_axes()
    s_m, e_m = _xy(_measured(recs), "S_star", "error")
    ax.plot(s_m, e_m, "o", label="max |<[a,b]>| over straddling pairs")
    s_b, e_b = _xy(_bound(recs), "S_star", "error")
    ax.plot(s_b, e_b, "--", color="gray", label="2 * 2^S")
    ax.set_xlabel("cut entropy S (bits)")
    ax.set_ylabel("commutator expectation")
    ax.set_yscale("log", base=2)
    ax.legend(fontsize=8)
    return fig


def _panel_c(recs):
    fig, ax = _new_axes()
    measured = _measured(recs)
    for backend, marker in (("dense", "o"), ("mps", "s")):
        rows = [r for r in measured if r.backend == backend]
        if rows:
            ns, errs = _xy(rows, "n", "error")
            ax.plot(ns, errs, marker, label=f"measured ({backend})")
    bounds = _bound(recs)
    for attr, label in (("bound_standard", "worst-case bound"),
                        ("bound_ent_first", "entanglement bound")):
        ns, vals = _xy(bounds, "n", attr)
        if ns:
            ax.plot(ns, vals, "--", label=label)
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("qubits n")
    ax.set_ylabel("Trotter error")
    ax.legend(fontsize=8)
    return fig


def _panel_d(recs):
    fig, ax = _new_axes()
    ns, ratio = _xy(_measured(recs), "n", "improvement")
    ax.plot(ns, ratio, "o-", label="volume bound / area measured")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("qubits n")
    ax.set_ylabel("error ratio")
    ax.legend(fontsize=8)
    return fig


def _separation(recs):
    fig, ax = _new_axes()
    for model, marker in (("tfim", "o"), ("all_to_all_ising", "s")):
        rows = [r for r in _measured(recs) if r.model == model]
        ns, errs = _xy(rows, "n", "error")
        ax.plot(ns, errs, marker + "-", label=model)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("qubits n")
    ax.set_ylabel("Trotter error")
    ax.legend(fontsize=8)
    return fig


def _orders(recs):
    fig, ax = _new_axes()
    orders = sorted({r.p for r in recs if r.p is not None})
    for q in orders:
        rows = [r for r in _measured(recs) if r.p == q]
        taus, errs = _xy(rows, "t", "error")
        ax.plot(taus, errs, "o-", label=f"order p={q}")
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("step size tau")
    ax.set_ylabel("single-step error")
    ax.legend(fontsize=8)
    return fig


def _resources(recs):
    fig, ax = _new_axes()
    rows = sorted(_bound(recs), key=lambda r: (r.geometry, r.n))
    labels = [f"{r.geometry} n={r.n}" for r in rows]
    values = [r.improvement for r in rows]
    ax.barh(range(len(rows)), values)
    ax.set_yticks(range(len(rows)), labels=labels, fontsize=8)
    ax.set_xscale("log")
    ax.set_xlabel("step-count improvement (normalized shapes)")
    return fig


def _sweep(recs):
    fig, ax = _new_axes()
    ns = sorted({r.n for r in recs if r.n is not None})
    for n in ns:
        rows = [r for r in _measured(recs) if r.n == n]
        rs, errs = _xy(rows, "r", "error")
        if rs:
            ax.plot(rs, errs, "o-", label=f"n={n}")
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("Trotter steps r")
    ax.set_ylabel("error")
    ax.legend(fontsize=8)
    return fig


_RENDERERS = {
    "panel_a": _panel_a,
    "panel_b": _panel_b,
    "panel_c": _panel_c,
    "panel_d": _panel_d,
    "separation": _separation,
    "orders": _orders,
    "resources": _resources,
    "sweep": _sweep,
}


def render_panels(panels: dict[str, list[ExperimentRecord]],
                  config: ExperimentConfig) -> list[tuple[str, str]]:
    """Render every panel to (filename, svg text); nothing touches disk."""
    matplotlib.rcParams["svg.hashsalt"] = str(config.seed)
    out = []
    for name, recs in sorted(panels.items()):
        if not recs:
            raise ValueError(f"panel {name!r} has no records; refusing partial plot output")
        renderer = _RENDERERS.get(name, _sweep)
        fig = renderer(recs)
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
        out.append((f"{name}.svg", buf.getvalue()))
    return out

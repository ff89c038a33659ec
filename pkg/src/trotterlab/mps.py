"""Matrix product state backend with truncation accounting.

Site tensors have shape (left bond, 2, right bond). The orthogonality
center is tracked so two-site gates and bond spectra always act on a
mixed-canonical form; truncation keeps the squared Schmidt weights above
``cutoff`` up to ``chi_max`` of them, renormalizes, and accumulates the
discarded weight so downstream code can bound the truncation error by
sqrt(cum_discarded) per the triangle inequality over sweeps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dense import DENSE_LIMIT, DenseState

DEFAULT_CUTOFF = 1e-12


@dataclass
class MpsState:
    tensors: list[np.ndarray]
    chi_max: int
    cum_discarded: float = 0.0
    center: int | None = None

    def __post_init__(self) -> None:
        if not self.tensors:
            raise ValueError("empty tensor list")
        if self.chi_max < 1:
            raise ValueError("chi_max must be >= 1")
        for i, t in enumerate(self.tensors):
            if t.ndim != 3 or t.shape[1] != 2:
                raise ValueError(f"site {i} tensor must have shape (chi_l, 2, chi_r)")
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[2] != 1:
            raise ValueError("boundary bonds must have dimension 1")
        for left, right in zip(self.tensors, self.tensors[1:]):
            if left.shape[2] != right.shape[0]:
                raise ValueError("mismatched internal bond dimensions")

    @property
    def n(self) -> int:
        return len(self.tensors)

    def bond_dimensions(self) -> list[int]:
        return [t.shape[2] for t in self.tensors[:-1]]

    def copy(self) -> "MpsState":
        return MpsState(
            [t.copy() for t in self.tensors],
            self.chi_max,
            self.cum_discarded,
            self.center,
        )


def mps_from_product(n: int, pattern: str = "zeros", chi_max: int = 64) -> MpsState:
    """Bond-dimension-1 product state; pattern conventions match the dense backend."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if pattern == "zeros":
        pattern = "0" * n
    vecs: list[np.ndarray]
    if pattern == "plus":
        vecs = [np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)] * n
    else:
        if len(pattern) != n or set(pattern) - {"0", "1"}:
            raise ValueError("pattern must be 'zeros', 'plus', or an n-bit string")
        vecs = [
            np.array([1.0, 0.0], dtype=complex) if c == "0" else np.array([0.0, 1.0], dtype=complex)
            for c in pattern
        ]
    tensors = [v.reshape(1, 2, 1) for v in vecs]
    return MpsState(tensors, chi_max=chi_max, center=0)


def _push_right(tensors: list[np.ndarray], i: int) -> None:
    # Left-orthonormalize site i, absorbing the remainder into site i+1.
    a = tensors[i]
    chi_l, _, chi_r = a.shape
    q, r = np.linalg.qr(a.reshape(chi_l * 2, chi_r))
    tensors[i] = q.reshape(chi_l, 2, q.shape[1])
    tensors[i + 1] = np.tensordot(r, tensors[i + 1], axes=([1], [0]))


def _push_left(tensors: list[np.ndarray], i: int) -> None:
    # Right-orthonormalize site i, absorbing the remainder into site i-1.
    a = tensors[i]
    chi_l, _, chi_r = a.shape
    q, r = np.linalg.qr(a.reshape(chi_l, 2 * chi_r).conj().T)
    k = q.shape[1]
    tensors[i] = q.conj().T.reshape(k, 2, chi_r)
    tensors[i - 1] = np.tensordot(tensors[i - 1], r.conj().T, axes=([2], [0]))


def mps_canonicalize(mps: MpsState, center: int) -> MpsState:
    """Mixed-canonical form with the orthogonality center at site ``center``.

    Sites left of the center are left-orthonormal and sites right of it are
    right-orthonormal, so the Schmidt values of bond ``center`` (between
    sites center and center+1) are the singular values of the center tensor
    reshaped to (chi_l * 2, chi_r).
    """
    if not 0 <= center < mps.n:
        raise IndexError(f"center {center} out of range")
    out = mps.copy()
    start_left = 0 if out.center is None else min(out.center, center)
    for i in range(start_left, center):
        _push_right(out.tensors, i)
    start_right = out.n - 1 if out.center is None else max(out.center, center)
    for i in range(start_right, center, -1):
        _push_left(out.tensors, i)
    out.center = center
    return out


def bond_spectrum(mps: MpsState, bond: int) -> np.ndarray:
    """Descending squared Schmidt values across bond ``bond`` (sites bond|bond+1)."""
    if not 0 <= bond < mps.n - 1:
        raise IndexError(f"bond {bond} out of range")
    canon = mps_canonicalize(mps, bond)
    a = canon.tensors[bond]
    svals = np.linalg.svd(a.reshape(a.shape[0] * 2, a.shape[2]), compute_uv=False)
    lams = np.sort(svals**2)[::-1]
    return lams


def mps_entropy_at_bond(mps: MpsState, bond: int) -> float:
    """Von Neumann entropy in bits across one bond; bounded by log2 of its dimension."""
    from .dense import entanglement_entropy

    lams = bond_spectrum(mps, bond)
    entropy = entanglement_entropy(lams)
    assert entropy <= np.log2(len(lams)) + 1e-9
    return entropy


def mps_max_bond_entropy(mps: MpsState) -> float:
    if mps.n < 2:
        return 0.0
    return max(mps_entropy_at_bond(mps, b) for b in range(mps.n - 1))


def apply_single_site_gate(mps: MpsState, site: int, u: np.ndarray) -> MpsState:
    """Exact one-site update; preserves canonical structure and bond spectra."""
    if u.shape != (2, 2):
        raise ValueError("single-site gate must be 2x2")
    if np.linalg.norm(u.conj().T @ u - np.eye(2)) > 1e-10:
        raise ValueError("gate is not unitary")
    out = mps.copy()
    out.tensors[site] = np.tensordot(u, out.tensors[site], axes=([1], [1])).transpose(1, 0, 2)
    return out


def apply_two_site_gate(
    mps: MpsState,
    site: int,
    gate: np.ndarray,
    chi_max: int | None = None,
    cutoff: float = DEFAULT_CUTOFF,
) -> tuple[MpsState, float]:
    """Apply a 4x4 unitary on (site, site+1) and truncate the new bond.

    The gate's 4-dim index is ordered (s_site, s_site+1) with the left site
    as the most significant bit. Returns the new state and the discarded
    squared Schmidt weight of this single update.
    """
    if not 0 <= site < mps.n - 1:
        raise IndexError(f"site pair ({site}, {site + 1}) out of range")
    if gate.shape != (4, 4):
        raise ValueError("two-site gate must be 4x4")
    if np.linalg.norm(gate.conj().T @ gate - np.eye(4)) > 1e-10:
        raise ValueError("gate is not unitary")
    cap = mps.chi_max if chi_max is None else chi_max

    out = mps_canonicalize(mps, site)
    a, b = out.tensors[site], out.tensors[site + 1]
    chi_l, chi_r = a.shape[0], b.shape[2]
    theta = np.tensordot(a, b, axes=([2], [0]))  # (chi_l, s, t, chi_r)
    g = gate.reshape(2, 2, 2, 2)  # (s', t', s, t)
    theta = np.einsum("abcd,lcdr->labr", g, theta, optimize=True)
    # After the einsum the axes are (chi_l, s', t', chi_r).
    mat = theta.reshape(chi_l * 2, 2 * chi_r)

    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    weights = s**2
    total = weights.sum()
    keep = int(np.sum(weights / total >= cutoff))
    keep = max(1, min(cap, keep))
    discarded = float(weights[keep:].sum() / total)
    # Renormalize the retained spectrum so the state stays unit norm.
    s_kept = s[:keep] / np.linalg.norm(s[:keep])

    out.tensors[site] = u[:, :keep].reshape(chi_l, 2, keep)
    out.tensors[site + 1] = (s_kept[:, None] * vh[:keep, :]).reshape(keep, 2, chi_r)
    out.center = site + 1
    out.cum_discarded = out.cum_discarded + discarded
    return out, discarded


def mps_to_dense(mps: MpsState) -> DenseState:
    """Contract to a statevector; qubit q is MPS site q and the index LSB order matches."""
    if mps.n > DENSE_LIMIT:
        raise ValueError(f"dense conversion capped at n = {DENSE_LIMIT}")
    acc = mps.tensors[0].reshape(2, -1)
    for t in mps.tensors[1:]:
        acc = np.tensordot(acc, t, axes=([-1], [0]))
        acc = acc.reshape(-1, t.shape[2])
    psi = acc.reshape([2] * mps.n)
    amps = psi.transpose(tuple(reversed(range(mps.n)))).reshape(-1)
    return DenseState(mps.n, amps)


def mps_overlap(a: MpsState, b: MpsState) -> complex:
    """<a|b> by transfer-matrix contraction, left to right."""
    if a.n != b.n:
        raise ValueError("states have different lengths")
    env = np.ones((1, 1), dtype=complex)
    for ta, tb in zip(a.tensors, b.tensors):
        env = np.einsum("ab,asc,bsd->cd", env, ta.conj(), tb, optimize=True)
    return complex(env[0, 0])


def mps_save(mps: MpsState, path: str) -> None:
    """Versioned JSON checkpoint; float64 values round-trip exactly."""
    obj = {
        "format": "trotterlab-mps",
        "version": 1,
        "n": mps.n,
        "chi_max": mps.chi_max,
        "cum_discarded": mps.cum_discarded,
        "center": mps.center,
        "tensors": [
            {
                "shape": list(t.shape),
                "re": t.real.reshape(-1).tolist(),
                "im": t.imag.reshape(-1).tolist(),
            }
            for t in mps.tensors
        ],
    }
    with open(path, "w") as fh:
        json.dump(obj, fh)


def mps_load(path: str) -> MpsState:
    with open(path) as fh:
        obj = json.load(fh)
    if obj.get("format") != "trotterlab-mps" or obj.get("version") != 1:
        raise ValueError("unrecognized checkpoint format")
    tensors = [
        (np.array(t["re"]) + 1j * np.array(t["im"])).reshape(t["shape"])
        for t in obj["tensors"]
    ]
    return MpsState(
        tensors,
        chi_max=obj["chi_max"],
        cum_discarded=obj["cum_discarded"],
        center=obj["center"],
    )

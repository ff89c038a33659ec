"""Hamiltonian containers, standard model builders, and locality metadata.

Models are ordered lists of Pauli terms tagged with a geometry label. Term
order is meaningful: product formulas consume terms in list order, and the
builders emit blocks in the order the model definitions display them (for
the all-to-all Ising model that order realizes the two-block ZZ/X split,
since terms inside each block mutually commute).
"""

from __future__ import annotations

import json
import math
import warnings
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliTerm

GEOMETRIES = ("chain", "grid2d", "grid3d", "tree", "all-to-all", "custom")


@dataclass
class HamiltonianModel:
    """n qubits, an ordered term list, and a coarse geometry tag.

    ``blocks`` optionally names contiguous index groups of mutually
    commuting terms (e.g. the ZZ and X partitions of the all-to-all
    model); it is bookkeeping only and does not affect evolution.
    """

    n: int
    terms: list[PauliTerm]
    geometry: str = "custom"
    blocks: dict[str, list[int]] | None = None
    dims: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.geometry not in GEOMETRIES:
            raise ValueError(f"unknown geometry {self.geometry!r}")
        for t in self.terms:
            if t.paulis and max(t.paulis) >= self.n:
                raise ValueError(
                    f"term acts on qubit {max(t.paulis)} outside register of size {self.n}"
                )

    @property
    def term_count(self) -> int:
        return len(self.terms)

    def block_terms(self, name: str) -> list[PauliTerm]:
        if not self.blocks or name not in self.blocks:
            raise KeyError(f"no block named {name!r}")
        return [self.terms[i] for i in self.blocks[name]]

    def to_json(self) -> str:
        obj = {
            "n": self.n,
            "geometry": self.geometry,
            "terms": [t.to_json() for t in self.terms],
        }
        return json.dumps(obj, indent=2, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "HamiltonianModel":
        obj = json.loads(text)
        return HamiltonianModel(
            n=int(obj["n"]),
            terms=[PauliTerm.from_json(t) for t in obj["terms"]],
            geometry=obj["geometry"],
        )


def build_tfim(n: int, J: float, h: float) -> HamiltonianModel:
    """Transverse-field Ising chain: J * sum Z_i Z_{i+1} + h * sum X_i.

    Zero-coefficient blocks are omitted entirely, so e.g. h = 0 yields the
    pure ZZ chain with n - 1 terms.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    terms: list[PauliTerm] = []
    blocks: dict[str, list[int]] = {"ZZ": [], "X": []}
    if J != 0:
        for i in range(n - 1):
            blocks["ZZ"].append(len(terms))
            terms.append(PauliTerm(J, {i: "Z", i + 1: "Z"}))
    if h != 0:
        for i in range(n):
            blocks["X"].append(len(terms))
            terms.append(PauliTerm(h, {i: "X"}))
    return HamiltonianModel(n, terms, geometry="chain", blocks=blocks, dims=(n,))


def build_heisenberg(n: int, J: float) -> HamiltonianModel:
    """Heisenberg chain: J * sum_i (X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}).

    Terms are grouped per bond in display order (XX, YY, ZZ), L = 3(n-1).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    terms = []
    for i in range(n - 1):
        for letter in ("X", "Y", "Z"):
            terms.append(PauliTerm(J, {i: letter, i + 1: letter}))
    return HamiltonianModel(n, terms, geometry="chain", dims=(n,))


def build_all_to_all_ising(n: int, h: float) -> HamiltonianModel:
    """Normalized all-to-all Ising: (1/sqrt(n)) sum_{i<j} Z_i Z_j + h sum_i X_i.

    The ZZ block comes first and the X block second; each block is
    internally commuting, so executing the terms in order realizes the
    two-exponential splitting exp(-i H_ZZ tau) exp(-i H_X tau).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    coeff = 1.0 / math.sqrt(n)
    terms = []
    blocks: dict[str, list[int]] = {"ZZ": [], "X": []}
    for i in range(n):
        for j in range(i + 1, n):
            blocks["ZZ"].append(len(terms))
            terms.append(PauliTerm(coeff, {i: "Z", j: "Z"}))
    if h != 0:
        for i in range(n):
            blocks["X"].append(len(terms))
            terms.append(PauliTerm(h, {i: "X"}))
    return HamiltonianModel(n, terms, geometry="all-to-all", blocks=blocks)


def build_syk4(n: int, J: float, seed: int) -> HamiltonianModel:
    """Spinless SYK-like quartic model: sum_{i<j<k<l} J_ijkl X_i X_j X_k X_l.

    Couplings are i.i.d. Gaussian with variance J^2 / n^3, drawn by a
    Box-Muller transform of uniform deviates from np.random.default_rng,
    so identical (n, J, seed) always reproduces identical couplings.
    """
    if n < 4:
        raise ValueError("n must be >= 4")
    rng = np.random.default_rng(seed)
    sigma = J / n ** 1.5
    quads = [
        (i, j, k, l)
        for i in range(n)
        for j in range(i + 1, n)
        for k in range(j + 1, n)
        for l in range(k + 1, n)
    ]
    # Box-Muller on uniform pairs; open interval on u1 avoids log(0).
    m = len(quads)
    u1 = 1.0 - rng.random(m)
    u2 = rng.random(m)
    normals = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
    terms = [
        PauliTerm(sigma * g, {i: "X", j: "X", k: "X", l: "X"})
        for (i, j, k, l), g in zip(quads, normals)
    ]
    return HamiltonianModel(n, terms, geometry="all-to-all")


@dataclass
class InteractionMetadata:
    term_count: int
    max_interaction: float
    max_degree: int


def interaction_graph(model: HamiltonianModel) -> list[set[int]]:
    """Adjacency sets: qubits are adjacent iff they co-occur in some term."""
    adj: list[set[int]] = [set() for _ in range(model.n)]
    for t in model.terms:
        supp = t.support
        for a in supp:
            for b in supp:
                if a != b:
                    adj[a].add(b)
    return adj


def interaction_metadata(model: HamiltonianModel) -> InteractionMetadata:
    """(L, J, d): term count, max term norm, max interaction-graph degree."""
    adj = interaction_graph(model)
    return InteractionMetadata(
        term_count=len(model.terms),
        max_interaction=max((t.norm for t in model.terms), default=0.0),
        max_degree=max((len(s) for s in adj), default=0),
    )


def light_cone_term_cap(d: int, radius: float, D: int) -> float:
    """Asymptotic neighbor-count cap d * (d * radius)^D for a D-dim lattice."""
    return d * (d * radius) ** D


def light_cone_neighbor_count(
    model: HamiltonianModel,
    j: int,
    tau: float,
    v_lr: float,
    xi: float,
    D: int,
) -> int:
    """Number of terms within the effective light cone of term j.

    The radius is l(tau) = v_lr * tau + xi * ln(L) and distances are graph
    hops in the interaction graph between term supports (overlapping
    supports are at distance zero). The asymptotic cap d*(d*l)^D is checked
    and violations warn rather than raise: the cap drops additive constants
    and genuinely fails for multi-term-per-edge models at small radii.
    """
    if model.geometry == "all-to-all":
        raise ValueError("light cone is undefined for all-to-all geometry")
    if not 0 <= j < len(model.terms):
        raise IndexError(f"term index {j} out of range")
    L = len(model.terms)
    radius = v_lr * tau + xi * math.log(L)
    if radius < 0:
        raise ValueError("light-cone radius is negative")

    adj = interaction_graph(model)
    source = model.terms[j].support
    # Multi-source BFS from the support of term j.
    dist = {q: 0 for q in source}
    queue = deque(source)
    while queue:
        q = queue.popleft()
        for nb in adj[q]:
            if nb not in dist:
                dist[nb] = dist[q] + 1
                queue.append(nb)

    count = 0
    for t in model.terms:
        d_t = min((dist.get(q, math.inf) for q in t.support), default=math.inf)
        if d_t <= radius:
            count += 1

    d = interaction_metadata(model).max_degree
    cap = light_cone_term_cap(d, radius, D)
    if count > cap:
        warnings.warn(
            f"light-cone count {count} exceeds asymptotic cap {cap:.3g} "
            f"(radius {radius:.3g}); the cap's dropped constants matter here",
            stacklevel=2,
        )
    return count

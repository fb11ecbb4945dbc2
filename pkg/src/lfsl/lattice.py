"""Liouville Fock state lattices: the generator matrix read as a weighted digraph.

Each superket index ``n*D + m`` is a site labelled by the per-factor Fock indices
of ``n`` (ket side) and ``m`` (bra side).  Diagonal entries become onsite terms
and every other entry above the threshold becomes a directed edge
``from -> to`` with weight ``L[to, from]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import _format
from .hilbert import HilbertSpace, OperatorMatrix
from .liouville import LiouvillianMatrix, tag_class

DEFAULT_EDGE_THRESHOLD = 1e-12

_STYLE = {
    "coherent": ("solid", "blue"),
    "jump": ("dashed", "red"),
    "dissipator": ("dotted", "darkgreen"),
}


@dataclass(frozen=True)
class Site:
    index: int
    label: tuple[tuple[int, ...], tuple[int, ...]]
    onsite: complex

    @property
    def decaying(self) -> bool:
        return self.onsite.real < 0


@dataclass(frozen=True)
class Edge:
    source: int
    target: int
    weight: complex
    tags: tuple[str, ...]

    @property
    def kind(self) -> str:
        return "+".join(sorted({tag_class(t) for t in self.tags})) or "untagged"


@dataclass(frozen=True)
class LatticeGraph:
    space: HilbertSpace
    sites: tuple[Site, ...]
    edges: tuple[Edge, ...]
    components: tuple[tuple[int, ...], ...]

    def site(self, index: int) -> Site:
        for s in self.sites:
            if s.index == index:
                return s
        raise KeyError(index)

    def to_matrix(self) -> np.ndarray:
        """Rebuild the generator from onsite terms and edges."""
        d2 = self.space.total_dim ** 2
        m = np.zeros((d2, d2), dtype=complex)
        for s in self.sites:
            m[s.index, s.index] = s.onsite
        for e in self.edges:
            m[e.target, e.source] = e.weight
        return m

    def component_of(self, index: int) -> tuple[int, ...]:
        for c in self.components:
            if index in c:
                return c
        raise KeyError(index)


def site_label(space: HilbertSpace, index: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    n, m = divmod(index, space.total_dim)
    return space.unravel(n), space.unravel(m)


def _components(indices: list[int], edges: Iterable[Edge]) -> tuple[tuple[int, ...], ...]:
    pos = {k: i for i, k in enumerate(indices)}
    edges = list(edges)
    rows = [pos[e.source] for e in edges]
    cols = [pos[e.target] for e in edges]
    n = len(indices)
    if n == 0:
        return ()
    adj = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(adj, directed=True, connection="weak")
    groups: dict[int, list[int]] = {}
    for k, lab in zip(indices, labels):
        groups.setdefault(int(lab), []).append(k)
    return tuple(sorted((tuple(sorted(g)) for g in groups.values()), key=lambda c: c[0]))


def extract(L: LiouvillianMatrix, edge_threshold: float = DEFAULT_EDGE_THRESHOLD,
            relative: bool = True) -> LatticeGraph:
    """Build the lattice graph.

    With ``relative=True`` the cut is ``edge_threshold * max|L|``; otherwise it is
    the absolute value ``edge_threshold``.
    """
    if edge_threshold < 0:
        raise ValueError("edge_threshold must be non-negative")
    a = L.entries
    peak = float(np.max(np.abs(a), initial=0.0))
    cut = edge_threshold * peak if relative else edge_threshold
    d2 = a.shape[0]
    sites = tuple(Site(i, site_label(L.space, i), complex(a[i, i])) for i in range(d2))
    mask = np.abs(a) > cut
    np.fill_diagonal(mask, False)
    targets, sources = np.nonzero(mask)
    order = np.lexsort((targets, sources))
    edges = tuple(
        Edge(int(sources[k]), int(targets[k]), complex(a[targets[k], sources[k]]),
             tuple(sorted(L.term_tags.get((int(targets[k]), int(sources[k])), ()))))
        for k in order
    )
    return LatticeGraph(L.space, sites, edges, _components(list(range(d2)), edges))


def subgraph(g: LatticeGraph, keep: Callable[[Site], bool] | Iterable[int]) -> LatticeGraph:
    """Restrict to a set of sites (or the sites satisfying a predicate)."""
    if callable(keep):
        chosen = {s.index for s in g.sites if keep(s)}
    else:
        chosen = set(keep)
    sites = tuple(s for s in g.sites if s.index in chosen)
    edges = tuple(e for e in g.edges if e.source in chosen and e.target in chosen)
    return LatticeGraph(g.space, sites, edges, _components([s.index for s in sites], edges))


def hamiltonian_components(H: OperatorMatrix, threshold: float = 1e-12) -> tuple[tuple[int, ...], ...]:
    """Connected components of the closed-system Fock state lattice of ``H``."""
    h = H.entries
    mask = np.abs(h) > threshold * max(1.0, float(np.max(np.abs(h), initial=0.0)))
    np.fill_diagonal(mask, False)
    rows, cols = np.nonzero(mask)
    edges = [Edge(int(c), int(r), 0j, ()) for r, c in zip(rows, cols)]
    return _components(list(range(H.dim)), edges)


def _label_text(label) -> str:
    ket, bra = label
    return "(" + ",".join(map(str, ket)) + "|" + ",".join(map(str, bra)) + ")"


def export_dot(g: LatticeGraph) -> str:
    lines = ["digraph lfsl {", "  node [shape=circle];"]
    for s in g.sites:
        lines.append(
            f'  s{s.index} [label="{_label_text(s.label)}", '
            f'onsite_re="{_format.text(s.onsite.real)}", onsite_im="{_format.text(s.onsite.imag)}", '
            f'decay="{"true" if _format.clean(s.onsite.real) < 0 else "false"}"];'
        )
    for e in g.edges:
        style, color = _STYLE.get(e.kind, ("bold", "black"))
        lines.append(
            f'  s{e.source} -> s{e.target} [class="{e.kind}", style="{style}", color="{color}", '
            f'weight_re="{_format.text(e.weight.real)}", weight_im="{_format.text(e.weight.imag)}", '
            f'tags="{",".join(e.tags)}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_dict(g: LatticeGraph) -> dict:
    return {
        "sites": [
            {"index": s.index, "label": [list(s.label[0]), list(s.label[1])], "onsite": _format.pair(s.onsite)}
            for s in g.sites
        ],
        "edges": [
            {"from": e.source, "to": e.target, "weight": _format.pair(e.weight), "tags": list(e.tags)}
            for e in g.edges
        ],
        "components": [list(c) for c in g.components],
    }


def export_json(g: LatticeGraph) -> str:
    return json.dumps(graph_to_dict(g), indent=2) + "\n"

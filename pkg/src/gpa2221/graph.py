"""Bipartite graph model, Perron-Frobenius eigendata, walk counting.

Vertices are referred to by name externally and by integer id internally;
even vertices come first in the id ordering, in file order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
from mpmath import mp, mpf

from .numerics import TolerancePolicy

POWER_ITERATION_CAP = 100_000

GRAPH_2221_TEXT = """\
even: z0 z1 z2 c
odd: b0 b1 b2 d
edge: z0 b0
edge: c b0
edge: c b1
edge: c b2
edge: c d
edge: z1 b1
edge: z2 b2
"""


class GraphError(ValueError):
    pass


@dataclass
class BipartiteGraph:
    even: list[str]
    odd: list[str]
    edges: set[tuple[str, str]]  # (even_name, odd_name)
    name: str = ""
    # populated in __post_init__
    vertices: list[str] = field(default_factory=list)
    index: dict[str, int] = field(default_factory=dict)
    neighbors: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if set(self.even) & set(self.odd):
            raise GraphError("a vertex cannot be both even and odd")
        self.vertices = list(self.even) + list(self.odd)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        adj = {i: [] for i in range(len(self.vertices))}
        seen = set()
        for (u, w) in self.edges:
            if u not in self.index or w not in self.index:
                raise GraphError(f"edge ({u},{w}) uses unknown vertex")
            if u not in self.even or w not in self.odd:
                raise GraphError(f"edge ({u},{w}) violates bipartiteness")
            key = (u, w)
            if key in seen:
                raise GraphError(f"repeated edge ({u},{w}); graph must be simply laced")
            seen.add(key)
            adj[self.index[u]].append(self.index[w])
            adj[self.index[w]].append(self.index[u])
        for i, ns in adj.items():
            if not ns:
                raise GraphError(f"vertex {self.vertices[i]} has degree 0")
            self.neighbors[i] = tuple(sorted(ns))
        if not self._connected():
            raise GraphError("graph is not connected")

    def _connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            for w in self.neighbors[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    @property
    def n_even(self) -> int:
        return len(self.even)

    def is_even(self, vid: int) -> bool:
        return vid < self.n_even

    def adjacent(self, u: int, w: int) -> bool:
        return w in self.neighbors[u]

    def automorphism_alpha(self) -> dict[int, int] | None:
        """The order-3 leg symmetry z_j -> z_{j+1}, b_j -> b_{j+1} if present."""
        perm = {}
        for v in self.vertices:
            if len(v) >= 2 and v[0] in "zb" and v[1:].isdigit():
                j = int(v[1:])
                img = f"{v[0]}{(j + 1) % 3}"
                if img not in self.index:
                    return None
                perm[self.index[v]] = self.index[img]
            else:
                perm[self.index[v]] = self.index[v]
        # must preserve edges
        for (u, w) in self.edges:
            iu, iw = perm[self.index[u]], perm[self.index[w]]
            if not self.adjacent(iu, iw):
                return None
        return perm


def parse_graph(text: str, name: str = "") -> BipartiteGraph:
    even: list[str] = []
    odd: list[str] = []
    edges: set[tuple[str, str]] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("even:"):
            even = line[len("even:"):].split()
        elif line.startswith("odd:"):
            odd = line[len("odd:"):].split()
        elif line.startswith("edge:"):
            parts = line[len("edge:"):].split()
            if len(parts) != 2:
                raise GraphError(f"line {lineno}: edge needs exactly two vertices")
            u, w = parts
            if u in odd and w in even:
                u, w = w, u
            edges.add((u, w))
        else:
            raise GraphError(f"line {lineno}: unrecognized line {line!r}")
    if not even or not odd:
        raise GraphError("graph file must declare both even: and odd: vertex lines")
    return BipartiteGraph(even=even, odd=odd, edges=edges, name=name)


def builtin_2221() -> BipartiteGraph:
    return parse_graph(GRAPH_2221_TEXT, name="2221")


def load_graph(spec: str) -> BipartiteGraph:
    """`--graph` argument: a builtin name or a path to a graph file."""
    if spec == "2221":
        return builtin_2221()
    with open(spec, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read(), name=spec)


@dataclass
class PFData:
    delta: mpf
    lam: dict[int, mpf]  # vertex id -> eigenvector entry

    def of(self, vid: int) -> mpf:
        return self.lam[vid]


def adjacency_rect(g: BipartiteGraph) -> list[list[int]]:
    """Even x odd adjacency matrix Lambda as 0/1 ints."""
    ne, no = g.n_even, len(g.odd)
    lam = [[0] * no for _ in range(ne)]
    for (u, w) in g.edges:
        lam[g.index[u]][g.index[w] - ne] = 1
    return lam


def perron_frobenius(g: BipartiteGraph, tol=None) -> PFData:
    """Power iteration on Lambda*Lambda^T, then Rayleigh refinement.

    The eigenvector is normalized so that the even and the odd entries each
    have their squares summing to 1.
    """
    if tol is None:
        # drive the eigenvector residual down to near full working precision
        tol = mpf(2) ** (-(mp.prec - 8))
    ne = g.n_even
    no = len(g.odd)
    A = adjacency_rect(g)

    def mul_T(v):  # Lambda^T v (even -> odd)
        return [mpmath.fsum(A[i][j] * v[i] for i in range(ne)) for j in range(no)]

    def mul(v):  # Lambda v (odd -> even)
        return [mpmath.fsum(A[i][j] * v[j] for j in range(no)) for i in range(ne)]

    v = [mpf(1)] * ne
    ray = mpf(0)
    for _ in range(POWER_ITERATION_CAP):
        w = mul(mul_T(v))
        norm = mpmath.sqrt(mpmath.fsum(x * x for x in w))
        v = [x / norm for x in w]
        # Rayleigh quotient and eigen-residual for Lambda Lambda^T
        mv = mul(mul_T(v))
        ray = mpmath.fsum(x * y for x, y in zip(v, mv))
        resid = mpmath.sqrt(mpmath.fsum((x - ray * y) ** 2 for x, y in zip(mv, v)))
        if resid < tol * max(1, abs(ray)):
            break
    else:
        raise RuntimeError("power iteration failed to converge")
    delta2 = ray
    delta = mpmath.sqrt(delta2)
    even_part = v
    odd_part = [x / delta for x in mul_T(v)]
    se = mpmath.sqrt(mpmath.fsum(x * x for x in even_part))
    so = mpmath.sqrt(mpmath.fsum(x * x for x in odd_part))
    lam = {}
    for i in range(ne):
        lam[i] = even_part[i] / se
    for j in range(no):
        lam[ne + j] = odd_part[j] / so
    pf = PFData(delta=delta, lam=lam)
    _validate_pf(g, pf)
    return pf


def _validate_pf(g: BipartiteGraph, pf: PFData) -> None:
    pol = TolerancePolicy.default()
    for i in range(len(g.vertices)):
        if pf.lam[i] <= 0:
            raise RuntimeError("PF eigenvector must be strictly positive")
        resid = mpmath.fsum(pf.lam[w] for w in g.neighbors[i]) - pf.delta * pf.lam[i]
        if abs(resid) > pol.abs_tol * 100:
            raise RuntimeError(f"PF eigen-identity fails at {g.vertices[i]}: {resid}")


def walk_count(g: BipartiteGraph, base: str, length: int) -> int:
    """Number of closed walks of the given (even) length based at `base`."""
    if base not in g.index:
        raise GraphError(f"unknown vertex {base!r}")
    if length < 0:
        raise ValueError("length must be non-negative")
    b = g.index[base]
    counts = {b: 1}
    for _ in range(length):
        nxt: dict[int, int] = {}
        for v, c in counts.items():
            for w in g.neighbors[v]:
                nxt[w] = nxt.get(w, 0) + c
        counts = nxt
    return counts.get(b, 0)

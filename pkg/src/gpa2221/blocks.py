"""Artin-Wedderburn block-matrix image of k-boxes, and the weighted trace.

A loop based at v with midpoint w maps to the matrix unit indexed by its
ascending path (rows) and its returning path traversed from v to w
(columns), inside the block labelled (v, w).  Path labels are ordered
lexicographically on vertex ids, which reproduces the orderings
b0 < b1 < b2 < d and z0 < z1 < z2 < c on the 2221 graph.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
from mpmath import mpf, mpc

from .gpa import Element, GraphContext, Loop
from .numerics import default_tol


def paths_between(ctx: GraphContext, v: int, w: int, k: int) -> tuple[tuple[int, ...], ...]:
    key = ("paths", v, w, k)
    cache = ctx._embed_cache
    if key in cache:
        return cache[key]
    out: list[tuple[int, ...]] = []

    def rec(path):
        if len(path) == k + 1:
            if path[-1] == w:
                out.append(tuple(path))
            return
        for u in ctx.neighbors[path[-1]]:
            path.append(u)
            rec(path)
            path.pop()

    rec([v])
    out.sort()
    res = tuple(out)
    cache[key] = res
    return res


@dataclass
class BlockMatrix:
    ctx: GraphContext
    k: int
    parity: int
    blocks: dict[tuple[int, int], list[list[mpc]]] = field(default_factory=dict)

    def block(self, v: int, w: int) -> list[list[mpc]]:
        key = (v, w)
        if key not in self.blocks:
            d = len(paths_between(self.ctx, v, w, self.k))
            self.blocks[key] = [[mpc(0)] * d for _ in range(d)]
        return self.blocks[key]

    def vertex_pairs(self):
        ctx = self.ctx
        base = range(ctx.n_even) if self.parity > 0 else range(ctx.n_even, len(ctx.graph.vertices))
        mids = base if self.k % 2 == 0 else (
            range(ctx.n_even, len(ctx.graph.vertices)) if self.parity > 0 else range(ctx.n_even)
        )
        for v in base:
            for w in mids:
                yield (v, w)


def to_blocks(x: Element) -> BlockMatrix:
    ctx, k = x.ctx, x.k
    bm = BlockMatrix(ctx, k, x.parity)
    idx_cache: dict[tuple[int, int], dict] = {}
    for l, c in x.coeffs.items():
        v, w = l[0], l[k]
        key = (v, w)
        if key not in idx_cache:
            idx_cache[key] = {p: i for i, p in enumerate(paths_between(ctx, v, w, k))}
        idx = idx_cache[key]
        asc = l[: k + 1]
        ret = asc if k == 0 else (l[0],) + tuple(reversed(l[k + 1:])) + (l[k],)
        blk = bm.block(v, w)
        blk[idx[asc]][idx[ret]] += c
    return bm


def from_blocks(bm: BlockMatrix) -> Element:
    ctx, k = bm.ctx, bm.k
    out: dict[Loop, mpc] = {}
    for (v, w), blk in bm.blocks.items():
        paths = paths_between(ctx, v, w, k)
        for i, prow in enumerate(paths):
            for j, pcol in enumerate(paths):
                c = blk[i][j]
                if abs(c) < default_tol():
                    continue
                loop = prow + tuple(reversed(pcol[1: k]))
                out[loop] = out.get(loop, mpf(0)) + c
    return Element(ctx, k, bm.parity, out)


def block_multiply(a: BlockMatrix, b: BlockMatrix) -> BlockMatrix:
    if a.k != b.k or a.parity != b.parity:
        raise ValueError("block shape mismatch")
    out = BlockMatrix(a.ctx, a.k, a.parity)
    for key, A in a.blocks.items():
        B = b.blocks.get(key)
        if B is None:
            continue
        d = len(A)
        C = out.block(*key)
        for i in range(d):
            Ai = A[i]
            Ci = C[i]
            for t in range(d):
                ait = Ai[t]
                if not ait:
                    continue
                Bt = B[t]
                for j in range(d):
                    Ci[j] += ait * Bt[j]
    return out


def block_trace(bm: BlockMatrix) -> mpc:
    ctx = bm.ctx
    total = mpc(0)
    for (v, w), blk in bm.blocks.items():
        t = mpc(0)
        for i in range(len(blk)):
            t += blk[i][i]
        total += ctx.lam[v] * ctx.lam[w] * t
    return total


def block_adjoint(bm: BlockMatrix) -> BlockMatrix:
    out = BlockMatrix(bm.ctx, bm.k, bm.parity)
    for key, A in bm.blocks.items():
        d = len(A)
        B = out.block(*key)
        for i in range(d):
            for j in range(d):
                B[i][j] = mpmath.conj(A[j][i])
    return out


def block_transpose(bm: BlockMatrix) -> BlockMatrix:
    out = BlockMatrix(bm.ctx, bm.k, bm.parity)
    for key, A in bm.blocks.items():
        d = len(A)
        B = out.block(*key)
        for i in range(d):
            for j in range(d):
                B[i][j] = A[j][i]
    return out


def block_dims(ctx: GraphContext, k: int, parity: int) -> dict[tuple[int, int], int]:
    bm = BlockMatrix(ctx, k, parity)
    return {
        (v, w): len(paths_between(ctx, v, w, k))
        for (v, w) in bm.vertex_pairs()
    }


def export_csv(bm: BlockMatrix) -> dict[str, str]:
    """One CSV per (v,w) block; complex entries as 're|im' strings."""
    ctx = bm.ctx
    out = {}
    for (v, w), blk in sorted(bm.blocks.items()):
        labels = [" ".join(ctx.vname(u) for u in p)
                  for p in paths_between(ctx, v, w, bm.k)]
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow([""] + labels)
        for lab, row in zip(labels, blk):
            writer.writerow([lab] + [
                f"{mpmath.nstr(mpc(c).real, 20)}|{mpmath.nstr(mpc(c).imag, 20)}"
                for c in row
            ])
        out[f"{ctx.vname(v)}_{ctx.vname(w)}"] = buf.getvalue()
    return out

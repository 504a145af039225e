"""Structural checks for AoI SHS models."""
from __future__ import annotations

from typing import List

import numpy as np

from .model import ShsModel


def _strongly_connected(m, edges):
    adj = [[] for _ in range(m)]
    radj = [[] for _ in range(m)]
    for a, b in edges:
        adj[a].append(b)
        radj[b].append(a)

    def reach(g):
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in g[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == m

    return reach(adj) and reach(radj)


def validate(model: ShsModel) -> List[str]:
    """Return a list of diagnostics; an empty list means the model is well formed."""
    diags: List[str] = []
    m, n1 = model.num_states, model.cont_dim
    if m < 1 or n1 < 1:
        return ["empty model: need at least one state and one continuous variable"]
    b = model.b
    if b.shape != (m, n1):
        diags.append(f"b has shape {b.shape}, expected {(m, n1)}")
        return diags
    if not np.all((b == 0) | (b == 1)):
        diags.append("growth vectors must be binary")
    for q in range(m):
        if b[q, 0] != 1:
            diags.append(f"monitor age not growing: b[{q}][0] must be 1")
    if len(model.irrelevant) != m:
        diags.append(f"irrelevant sets given for {len(model.irrelevant)} states, expected {m}")
    else:
        for q, irr in enumerate(model.irrelevant):
            for j in sorted(irr):
                if not 0 <= j < n1:
                    diags.append(f"irrelevant index {j} out of range in state {q}")
                elif j == 0:
                    diags.append(f"x_0 cannot be irrelevant (state {q})")
                elif b[q, j] != 0:
                    diags.append(f"irrelevant variable x_{j} grows in state {q}")

    for l, t in enumerate(model.transitions):
        tag = f"transition {l} ({t.src}->{t.dst})"
        if not (0 <= t.src < m and 0 <= t.dst < m):
            diags.append(f"{tag}: state index out of range")
            continue
        if not (np.isfinite(t.rate) and t.rate > 0):
            diags.append(f"{tag}: rate must be > 0, got {t.rate}")
        a = t.reset
        if a.shape != (n1, n1):
            diags.append(f"{tag}: reset has shape {a.shape}, expected {(n1, n1)}")
            continue
        if not np.all((a == 0) | (a == 1)):
            diags.append(f"{tag}: reset entries must be 0 or 1")
        if np.any(a.sum(axis=0) > 1):
            diags.append(f"{tag}: reset column multiplicity > 1")
        if len(model.irrelevant) == m:
            for j in model.irrelevant[t.dst]:
                if 0 <= j < n1 and np.any(a[:, j] != 0):
                    diags.append(f"{tag}: column {j} must be zero (x_{j} irrelevant in state {t.dst})")

    if m > 1 or model.transitions:
        edges = [(t.src, t.dst) for t in model.transitions
                 if 0 <= t.src < m and 0 <= t.dst < m]
        if not _strongly_connected(m, edges):
            diags.append("state graph not irreducible (not strongly connected)")
    return diags


def is_valid(model: ShsModel) -> bool:
    return not validate(model)

"""Pure-Python scoring kernels.

Reference implementation of the hot inner loops: neighbour-evidence,
per-row contribution, the decayed batch sum, and the streaming step.
The compiled twin in ``_score_cy`` mirrors the exact operation order so
both backends agree to the last ulp on the same inputs.
"""

from __future__ import annotations

BACKEND = "python"


def evidence_at(values, confs, j: int, eps: float, clamp: bool) -> float:
    """Confidence-weighted agreement of reading j with the rest of its row."""
    p = len(values)
    target = values[j]
    acc = 0.0
    for k in range(p):
        if k == j:
            continue
        if abs(values[k] - target) <= eps:
            acc += confs[k]
        else:
            acc -= confs[k]
    ev = acc / (p - 1)
    if clamp:
        if ev < 0.0:
            ev = 0.0
        elif ev > 1.0:
            ev = 1.0
    return ev


def row_contribution(
    values,
    confs,
    t_min: float,
    t_max: float,
    d_max: float,
    d_min: float,
    eps: float,
    clamp: bool,
) -> float:
    """Sum over the row of (threshold weight) * confidence * evidence."""
    p = len(values)
    total = 0.0
    for j in range(p):
        v = values[j]
        d = d_max if (t_min < v < t_max) else d_min
        total += d * confs[j] * evidence_at(values, confs, j, eps, clamp)
    return total


def trust_step_raw(
    prev: float,
    values,
    confs,
    gamma: float,
    d_max: float,
    d_min: float,
    t_min: float,
    t_max: float,
    eps: float,
    clamp: bool,
) -> float:
    """One decayed update of the commodity-trust accumulator from a sensor row."""
    p = len(values)
    row = row_contribution(values, confs, t_min, t_max, d_max, d_min, eps, clamp)
    return gamma * prev + ((1.0 - gamma) / p) * row


def trust_batch_raw(
    values2d,
    confs2d,
    gamma: float,
    d_max: float,
    d_min: float,
    t_min: float,
    t_max: float,
    eps: float,
    clamp: bool,
) -> float:
    """Decayed double sum over an epoch-by-sensor matrix (newest row weight 1)."""
    o = len(values2d)
    if o == 0:
        return 0.0
    p = len(values2d[0])
    acc = 0.0
    w = 1.0
    for i in range(o - 1, -1, -1):
        acc += w * row_contribution(
            values2d[i], confs2d[i], t_min, t_max, d_max, d_min, eps, clamp
        )
        w *= gamma
    return ((1.0 - gamma) / p) * acc

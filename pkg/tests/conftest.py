"""Shared test helpers."""

import numpy as np


def mlp_loss_oracle(model, x, labels):
    """Independent forward pass: returns (cross-entropy loss, relu sign pattern).

    Written separately from the package so the gradient check has its own
    reference; the sign pattern lets callers skip finite-difference probes that
    straddle a rectifier kink, where the loss is not differentiable.
    """
    a = np.asarray(x, dtype=float)
    pattern = []
    for k, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ w + b
        if k < len(model.weights) - 1:
            pattern.append(z > 0)
            a = np.where(z > 0, z, 0.0)
        else:
            a = z
    z = a - a.max(axis=1, keepdims=True)
    probs = np.exp(z) / np.exp(z).sum(axis=1, keepdims=True)
    m = len(labels)
    loss = float(-np.mean(np.log(np.clip(probs[np.arange(m), labels], 1e-300, None))))
    return loss, [p.copy() for p in pattern]


def finite_difference_grads(model, x, labels, eps=1e-6):
    """Central differences for every parameter; entries whose perturbation
    flips a rectifier activation are returned as NaN (not differentiable)."""
    labels = np.asarray(labels, dtype=int)

    def probe(param, idx):
        orig = param[idx]
        param[idx] = orig + eps
        lp, pat_p = mlp_loss_oracle(model, x, labels)
        param[idx] = orig - eps
        lm, pat_m = mlp_loss_oracle(model, x, labels)
        param[idx] = orig
        if any((a != b).any() for a, b in zip(pat_p, pat_m)):
            return np.nan
        return (lp - lm) / (2 * eps)

    grads_w, grads_b = [], []
    for k in range(len(model.weights)):
        gw = np.zeros_like(model.weights[k])
        for idx in np.ndindex(*model.weights[k].shape):
            gw[idx] = probe(model.weights[k], idx)
        grads_w.append(gw)
        gb = np.zeros_like(model.biases[k])
        for idx in np.ndindex(*model.biases[k].shape):
            gb[idx] = probe(model.biases[k], idx)
        grads_b.append(gb)
    return grads_w, grads_b


def max_relative_error(analytic, numeric):
    """Worst relative disagreement, ignoring NaN (kink-straddling) entries."""
    worst = 0.0
    for a, n in zip(analytic, numeric):
        mask = ~np.isnan(n)
        if not mask.any():
            continue
        denom = np.maximum(np.maximum(np.abs(a[mask]), np.abs(n[mask])), 1e-8)
        worst = max(worst, float(np.max(np.abs(a[mask] - n[mask]) / denom)))
    return worst

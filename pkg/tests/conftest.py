"""Shared helpers: independent numerical oracles used to derive expected
values, kept deliberately separate from the package's own machinery."""

from __future__ import annotations

import numpy as np
import pytest


def central_derivative(f, x, axes, h=1e-3):
    """Mixed partial derivative of a scalar/array function by composed
    central differences with one Richardson step (ratio 2)."""

    def stencil(step):
        def go(point, remaining):
            if not remaining:
                return np.asarray(f(point), dtype=float)
            k, rest = remaining[0], remaining[1:]
            xp = np.array(point, dtype=float)
            xm = np.array(point, dtype=float)
            xp[k] += step
            xm[k] -= step
            return (go(xp, rest) - go(xm, rest)) / (2.0 * step)

        return go(np.asarray(x, dtype=float), tuple(axes))

    coarse = stencil(h)
    fine = stencil(h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def random_spd(rng, dim, scale=0.3):
    """Random symmetric positive-definite matrix near the identity."""
    a = rng.uniform(-scale, scale, size=(dim, dim))
    return np.eye(dim) + 0.5 * (a + a.T) + a @ a.T


def max_rel(a, b, floor=1e-12):
    """max |a - b| over max(|a|, |b|, floor)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), floor)
    return float(np.max(np.abs(a - b)) / scale)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)

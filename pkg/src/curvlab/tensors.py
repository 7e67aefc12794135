"""Dense small-dimension tensors with metric-aware slot operations.

Entries may be floats or Jet objects; every operation here goes through
``np.tensordot``/``np.trace``-style reductions that work for both.  Frames:
a symmetric 2-form carries a tag saying whether its components refer to the
coordinate basis or to the orthonormal frame built from the metric by
Cholesky factorization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError
from .jets import Jet

LOWER = "l"
UPPER = "u"

COORDINATE = "coordinate"
ORTHONORMAL = "orthonormal"

__all__ = [
    "LOWER",
    "UPPER",
    "COORDINATE",
    "ORTHONORMAL",
    "Tensor",
    "Sym2Form",
    "raise_index",
    "lower_index",
    "contract",
    "norm_sq",
    "to_orthonormal_frame",
    "orthonormal_frame",
    "value_tensor",
]


@dataclass(frozen=True)
class Tensor:
    """Dense rank-r tensor; ``variance[s]`` marks slot s as lower or upper."""

    dim: int
    variance: tuple
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "variance", tuple(self.variance))
        if any(v not in (LOWER, UPPER) for v in self.variance):
            raise ValueError(f"variance markers must be '{LOWER}' or '{UPPER}'")
        if entries.shape != (self.dim,) * len(self.variance):
            raise ValueError(
                f"entries shape {entries.shape} does not match dim {self.dim} "
                f"and rank {len(self.variance)}"
            )

    @property
    def rank(self) -> int:
        return len(self.variance)


@dataclass(frozen=True)
class Sym2Form:
    """Symmetric 2-form; entries are symmetrized exactly on construction."""

    dim: int
    entries: np.ndarray
    frame: str = COORDINATE

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.shape != (self.dim, self.dim):
            raise ValueError(f"expected a {self.dim}x{self.dim} matrix, got {m.shape}")
        # (a+b)/2 is computed identically for both triangle orders, so the
        # stored matrix equals its transpose exactly
        object.__setattr__(self, "entries", 0.5 * (m + m.T))
        if self.frame not in (COORDINATE, ORTHONORMAL):
            raise ValueError(f"unknown frame tag {self.frame!r}")


def _check_slot(t: Tensor, slot: int, want: str) -> None:
    if not 0 <= slot < t.rank:
        raise ValueError(f"slot {slot} out of range for rank {t.rank}")
    if t.variance[slot] != want:
        raise ValueError(f"slot {slot} is '{t.variance[slot]}', expected '{want}'")


def _contract_slot(metric: np.ndarray, t: Tensor, slot: int, flipped: str) -> Tensor:
    moved = np.tensordot(metric, t.entries, axes=([1], [slot]))
    entries = np.moveaxis(moved, 0, slot)
    variance = list(t.variance)
    variance[slot] = flipped
    return Tensor(t.dim, tuple(variance), entries)


def raise_index(g_inv: np.ndarray, t: Tensor, slot: int) -> Tensor:
    """Contract the inverse metric into a lower slot, turning it upper."""
    _check_slot(t, slot, LOWER)
    return _contract_slot(np.asarray(g_inv), t, slot, UPPER)


def lower_index(g: np.ndarray, t: Tensor, slot: int) -> Tensor:
    """Contract the metric into an upper slot, turning it lower."""
    _check_slot(t, slot, UPPER)
    return _contract_slot(np.asarray(g), t, slot, LOWER)


def contract(t: Tensor, slot_a: int, slot_b: int) -> Tensor:
    """Trace over an upper/lower slot pair; rank drops by two."""
    if slot_a == slot_b:
        raise ValueError("cannot contract a slot with itself")
    for s in (slot_a, slot_b):
        if not 0 <= s < t.rank:
            raise ValueError(f"slot {s} out of range for rank {t.rank}")
    if {t.variance[slot_a], t.variance[slot_b]} != {LOWER, UPPER}:
        raise ValueError(
            "contraction needs one upper and one lower slot; "
            "raise or lower an index first"
        )
    entries = np.trace(t.entries, axis1=slot_a, axis2=slot_b)
    variance = tuple(v for s, v in enumerate(t.variance) if s not in (slot_a, slot_b))
    if not variance:
        return entries if np.ndim(entries) else float(entries)
    return Tensor(t.dim, variance, entries)


def norm_sq(g: np.ndarray, g_inv: np.ndarray, t: Tensor):
    """Squared norm |t|^2 of a fully lower tensor, all slots raised by g_inv."""
    if any(v != LOWER for v in t.variance):
        raise ValueError("norm_sq expects a fully lower tensor")
    raised = t
    for slot in range(t.rank):
        raised = raise_index(g_inv, raised, slot)
    total = (raised.entries * t.entries).sum()
    return total if isinstance(total, Jet) else float(total)


def orthonormal_frame(g_value: np.ndarray) -> np.ndarray:
    """Columns form an orthonormal frame for the metric value (E^T g E = I).

    The frame is E = L^{-T} for the Cholesky factor g = L L^T; for a
    diagonal metric this is e_i = (g_ii)^{-1/2} d/dx_i.
    """
    g = np.asarray(g_value, dtype=float)
    try:
        L = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise GeometryError("metric value is not positive definite") from exc
    return np.linalg.inv(L).T


def to_orthonormal_frame(g_value: np.ndarray, s: Sym2Form) -> Sym2Form:
    """Components of a coordinate-frame 2-form against the Cholesky frame."""
    if s.frame != COORDINATE:
        raise ValueError("form is already expressed in an orthonormal frame")
    g = np.asarray(g_value, dtype=float)
    try:
        L = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise GeometryError("metric value is not positive definite") from exc
    half = np.linalg.solve(L, s.entries)
    frame_entries = np.linalg.solve(L, half.T).T
    return Sym2Form(s.dim, frame_entries, frame=ORTHONORMAL)


def value_tensor(t: Tensor) -> Tensor:
    """Replace Jet entries by their values, yielding a numeric tensor."""
    if t.entries.dtype != object:
        return t
    values = np.empty(t.entries.shape)
    flat_src = t.entries.reshape(-1)
    flat_dst = values.reshape(-1)
    for i, e in enumerate(flat_src):
        flat_dst[i] = e.value if isinstance(e, Jet) else float(e)
    return Tensor(t.dim, t.variance, values)

"""Truncated multivariate Taylor ("jet") arithmetic up to order 4.

A jet of order p in d variables stores the Taylor coefficients
``c_alpha = (d^alpha f)(x0) / alpha!`` of a smooth function f at a base
point x0, for every multi-index with ``|alpha| <= p``.  Sums, products,
reciprocals and exponentials of jets are exact truncated-polynomial
arithmetic, so the coefficients of a composed expression are the exact
partial derivatives of that expression at the base point, up to floating
point rounding.  There is no step-size error anywhere in this module.

Coefficients are stored densely over the multi-index basis, ordered by
total degree and then lexicographically.  The basis of order p-1 is a
prefix of the basis of order p, so truncating a jet is a slice.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

MAX_DIM = 6
MAX_ORDER = 4

__all__ = [
    "Jet",
    "jet_constant",
    "jet_var",
    "jet_from_terms",
    "jet_linear",
    "jet_mul",
    "jet_invert",
    "jet_exp",
    "jet_partial",
    "jet_truncate",
]


class _Space:
    """Multi-index basis plus precomputed tables for one (dim, order) pair."""

    __slots__ = ("dim", "order", "exponents", "index", "size", "_mul", "_diff")

    def __init__(self, dim: int, order: int):
        exps = sorted(
            (e for e in itertools.product(range(order + 1), repeat=dim) if sum(e) <= order),
            key=lambda e: (sum(e), e),
        )
        self.dim = dim
        self.order = order
        self.exponents = tuple(exps)
        self.size = len(exps)
        self.index = {e: i for i, e in enumerate(exps)}
        self._mul = None
        self._diff = {}

    def mul_table(self):
        # triples (ia, ib, iout) over all coefficient pairs that survive truncation
        if self._mul is None:
            ia, ib, io = [], [], []
            for i, a in enumerate(self.exponents):
                da = sum(a)
                for j, b in enumerate(self.exponents):
                    if da + sum(b) <= self.order:
                        ia.append(i)
                        ib.append(j)
                        io.append(self.index[tuple(x + y for x, y in zip(a, b))])
            self._mul = (np.asarray(ia), np.asarray(ib), np.asarray(io))
        return self._mul

    def diff_table(self, k: int):
        # source positions and factors mapping this space onto _space(dim, order-1)
        if k not in self._diff:
            lower = _space(self.dim, self.order - 1)
            src = np.empty(lower.size, dtype=np.intp)
            fac = np.empty(lower.size)
            for pos, e in enumerate(lower.exponents):
                up = list(e)
                up[k] += 1
                src[pos] = self.index[tuple(up)]
                fac[pos] = up[k]
            self._diff[k] = (src, fac)
        return self._diff[k]


@lru_cache(maxsize=None)
def _space(dim: int, order: int) -> _Space:
    return _Space(dim, order)


def _check_dims(dim: int, order: int) -> None:
    if not 1 <= dim <= MAX_DIM:
        raise ValueError(f"jet dimension must be in 1..{MAX_DIM}, got {dim}")
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"jet order must be in 0..{MAX_ORDER}, got {order}")


class Jet:
    """Immutable truncated Taylor polynomial.

    Do not mutate ``coeffs`` after construction; every operation returns a
    new jet, which keeps sharing across threads safe.
    """

    __slots__ = ("dim", "order", "coeffs")

    def __init__(self, dim: int, order: int, coeffs):
        _check_dims(dim, order)
        c = np.asarray(coeffs, dtype=float)
        n = _space(dim, order).size
        if c.shape != (n,):
            raise ValueError(f"expected {n} coefficients for dim={dim}, order={order}")
        self.dim = dim
        self.order = order
        self.coeffs = c

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def coefficient(self, alpha) -> float:
        """Taylor coefficient at multi-index ``alpha``."""
        sp = _space(self.dim, self.order)
        key = tuple(int(a) for a in alpha)
        if key not in sp.index:
            raise ValueError(f"multi-index {key} not stored at order {self.order}")
        return float(self.coeffs[sp.index[key]])

    def derivative(self, alpha) -> float:
        """Partial derivative d^alpha f at the base point (coefficient times alpha!)."""
        fact = 1.0
        for a in alpha:
            fact *= math.factorial(int(a))
        return self.coefficient(alpha) * fact

    def terms(self) -> dict:
        """Nonzero coefficients as a multi-index -> value mapping."""
        sp = _space(self.dim, self.order)
        return {e: float(c) for e, c in zip(sp.exponents, self.coeffs) if c != 0.0}

    def exp(self) -> "Jet":
        return jet_exp(self)

    # -- arithmetic -----------------------------------------------------

    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        if isinstance(other, (int, float, np.integer, np.floating)):
            return jet_constant(float(other), self.dim, self.order)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return jet_linear(self, o, 1.0, 1.0)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return jet_linear(self, o, 1.0, -1.0)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return jet_linear(o, self, 1.0, -1.0)

    def __neg__(self):
        return Jet(self.dim, self.order, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            return Jet(self.dim, self.order, self.coeffs * float(other))
        if isinstance(other, Jet):
            return jet_mul(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            return Jet(self.dim, self.order, self.coeffs / float(other))
        if isinstance(other, Jet):
            return jet_mul(self, jet_invert(other))
        return NotImplemented

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return jet_mul(o, jet_invert(self))

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            return NotImplemented
        if n < 0:
            return jet_invert(self) ** (-int(n))
        out = jet_constant(1.0, self.dim, self.order)
        for _ in range(int(n)):
            out = jet_mul(out, self)
        return out

    def __repr__(self):
        return f"Jet(dim={self.dim}, order={self.order}, value={self.value!r})"


def jet_constant(value: float, dim: int, order: int) -> Jet:
    """Jet of the constant function ``value``."""
    c = np.zeros(_space(dim, order).size)
    c[0] = value
    return Jet(dim, order, c)


def jet_var(index: int, value: float, dim: int, order: int) -> Jet:
    """Jet of the coordinate function x_index at base value ``value``."""
    _check_dims(dim, order)
    if not 0 <= index < dim:
        raise ValueError(f"coordinate index {index} out of range for dim {dim}")
    if order < 1:
        raise ValueError("a coordinate jet needs order >= 1")
    sp = _space(dim, order)
    c = np.zeros(sp.size)
    c[0] = value
    e = [0] * dim
    e[index] = 1
    c[sp.index[tuple(e)]] = 1.0
    return Jet(dim, order, c)


def jet_from_terms(dim: int, order: int, terms: dict) -> Jet:
    """Build a jet from an explicit multi-index -> coefficient mapping."""
    sp = _space(dim, order)
    c = np.zeros(sp.size)
    for alpha, v in terms.items():
        key = tuple(int(a) for a in alpha)
        if key not in sp.index:
            raise ValueError(f"multi-index {key} exceeds order {order}")
        c[sp.index[key]] = float(v)
    return Jet(dim, order, c)


def _check_same(a: Jet, b: Jet) -> None:
    if a.dim != b.dim or a.order != b.order:
        raise ValueError(
            f"jet mismatch: (dim={a.dim}, order={a.order}) vs (dim={b.dim}, order={b.order})"
        )


def jet_linear(a: Jet, b: Jet, alpha: float, beta: float) -> Jet:
    """Coefficient-wise alpha*a + beta*b."""
    _check_same(a, b)
    return Jet(a.dim, a.order, alpha * a.coeffs + beta * b.coeffs)


def jet_mul(a: Jet, b: Jet) -> Jet:
    """Cauchy product truncated to the common order."""
    _check_same(a, b)
    sp = _space(a.dim, a.order)
    ia, ib, io = sp.mul_table()
    out = np.bincount(io, weights=a.coeffs[ia] * b.coeffs[ib], minlength=sp.size)
    return Jet(a.dim, a.order, out)


def jet_invert(a: Jet) -> Jet:
    """Multiplicative inverse: jet b with a*b = 1 up to the truncation order.

    Uses the geometric series in u = (a - a0)/a0, which terminates exactly
    because u is nilpotent at fixed order.
    """
    v0 = float(a.coeffs[0])
    if v0 == 0.0:
        raise ZeroDivisionError("cannot invert a jet whose value is 0")
    u = a.coeffs / v0
    u[0] = 0.0
    neg_u = Jet(a.dim, a.order, -u)
    acc = jet_constant(1.0, a.dim, a.order)
    term = acc
    for _ in range(a.order):
        term = jet_mul(term, neg_u)
        acc = jet_linear(acc, term, 1.0, 1.0)
    return Jet(a.dim, a.order, acc.coeffs / v0)


def jet_exp(a: Jet) -> Jet:
    """Composition exp(a), via exp(a0) * sum_k (a - a0)^k / k!."""
    v0 = float(a.coeffs[0])
    u = a.coeffs.copy()
    u[0] = 0.0
    uj = Jet(a.dim, a.order, u)
    acc = jet_constant(1.0, a.dim, a.order)
    term = acc
    for k in range(1, a.order + 1):
        term = Jet(a.dim, a.order, jet_mul(term, uj).coeffs / k)
        acc = jet_linear(acc, term, 1.0, 1.0)
    return Jet(a.dim, a.order, acc.coeffs * math.exp(v0))


def jet_partial(a: Jet, index: int) -> Jet:
    """Formal partial derivative; the result has order reduced by one."""
    if a.order < 1:
        raise ValueError("cannot differentiate an order-0 jet")
    if not 0 <= index < a.dim:
        raise ValueError(f"coordinate index {index} out of range for dim {a.dim}")
    src, fac = _space(a.dim, a.order).diff_table(index)
    return Jet(a.dim, a.order - 1, a.coeffs[src] * fac)


def jet_truncate(a: Jet, order: int) -> Jet:
    """Drop coefficients above ``order`` (a no-op if already at that order)."""
    if order == a.order:
        return a
    if order > a.order:
        raise ValueError(f"cannot extend a jet from order {a.order} to {order}")
    return Jet(a.dim, order, a.coeffs[: _space(a.dim, order).size])

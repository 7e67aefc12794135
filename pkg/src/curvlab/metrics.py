"""Metric catalog, expression-tree metrics, and the metric-definition format.

A metric patch stores each component g_ij as a small expression tree over
constants, coordinates ``x1..xn``, named parameters, ``+ - * /``, integer
powers and ``exp``.  The same tree evaluates either with plain floats or
with jets, which is what makes every catalog metric differentiable to
order 4 without any symbolic algebra.

Metric-definition files are UTF-8 text::

    dim = 4
    param a = 1.0
    g[1][1] = (1 + (a/4)*(x1^2 + x2^2))^-2

Indices are 1-based, missing off-diagonal entries default to 0, the
diagonal must be present, and g[i][j], if given together with g[j][i],
must be the identical expression.  Blank lines and ``#`` comments are
ignored.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import GenerationError, ParseError
from .geometry import StructureConstants
from .jets import Jet, jet_exp, jet_var

__all__ = [
    "Expr",
    "Const",
    "Coord",
    "Param",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Neg",
    "Pow",
    "Exp",
    "MetricPatch",
    "CaseKind",
    "CaseSpec",
    "flat",
    "product_surfaces",
    "space_form_cross_line",
    "space_form4",
    "conformal_product",
    "solvable_lie_algebra",
    "random_polynomial_metric",
    "parse_metric_file",
    "metric_to_text",
    "default_case",
    "default_cases",
    "case_sample_points",
]


# ---------------------------------------------------------------------------
# expression trees


class Expr:
    """Base expression node; subclasses are frozen dataclasses."""

    def evaluate(self, coords, params):
        raise NotImplementedError


@dataclass(frozen=True)
class Const(Expr):
    value: float

    def evaluate(self, coords, params):
        return self.value


@dataclass(frozen=True)
class Coord(Expr):
    index: int  # 0-based

    def evaluate(self, coords, params):
        return coords[self.index]


@dataclass(frozen=True)
class Param(Expr):
    name: str

    def evaluate(self, coords, params):
        return params[self.name]


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr

    def evaluate(self, coords, params):
        return self.left.evaluate(coords, params) + self.right.evaluate(coords, params)


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr

    def evaluate(self, coords, params):
        return self.left.evaluate(coords, params) - self.right.evaluate(coords, params)


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr

    def evaluate(self, coords, params):
        return self.left.evaluate(coords, params) * self.right.evaluate(coords, params)


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr

    def evaluate(self, coords, params):
        return self.left.evaluate(coords, params) / self.right.evaluate(coords, params)


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    def evaluate(self, coords, params):
        return -self.operand.evaluate(coords, params)


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int

    def evaluate(self, coords, params):
        return self.base.evaluate(coords, params) ** self.exponent


@dataclass(frozen=True)
class Exp(Expr):
    operand: Expr

    def evaluate(self, coords, params):
        v = self.operand.evaluate(coords, params)
        return jet_exp(v) if isinstance(v, Jet) else math.exp(v)


def _free_symbols(e: Expr, coords: set, params: set) -> None:
    if isinstance(e, Coord):
        coords.add(e.index)
    elif isinstance(e, Param):
        params.add(e.name)
    elif isinstance(e, (Add, Sub, Mul, Div)):
        _free_symbols(e.left, coords, params)
        _free_symbols(e.right, coords, params)
    elif isinstance(e, (Neg, Exp)):
        _free_symbols(e.operand, coords, params)
    elif isinstance(e, Pow):
        _free_symbols(e.base, coords, params)


# ---------------------------------------------------------------------------
# metric patches


ZERO = Const(0.0)
ONE = Const(1.0)


@dataclass(frozen=True)
class MetricPatch:
    """Coordinate-chart metric as a symmetric matrix of expression trees."""

    name: str
    dim: int
    exprs: tuple
    parameters: dict = field(default_factory=dict)
    domain_note: str = ""

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.exprs)
        object.__setattr__(self, "exprs", rows)
        if len(rows) != self.dim or any(len(r) != self.dim for r in rows):
            raise ValueError(f"expression matrix must be {self.dim}x{self.dim}")
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"expression matrix asymmetric at ({i + 1},{j + 1})")
        coords: set = set()
        params: set = set()
        for row in rows:
            for e in row:
                _free_symbols(e, coords, params)
        if coords and max(coords) >= self.dim:
            raise ValueError(f"coordinate x{max(coords) + 1} exceeds dim {self.dim}")
        missing = params - set(self.parameters)
        if missing:
            raise ValueError(f"undeclared parameters: {sorted(missing)}")

    def evaluate(self, point) -> np.ndarray:
        """Metric value at a point, as a plain float matrix."""
        coords = [float(x) for x in point]
        if len(coords) != self.dim:
            raise ValueError(f"point has {len(coords)} coordinates, expected {self.dim}")
        g = np.empty((self.dim, self.dim))
        for i in range(self.dim):
            for j in range(i, self.dim):
                g[i, j] = g[j, i] = self.exprs[i][j].evaluate(coords, self.parameters)
        return g

    def jets_at(self, point, order: int = 4) -> np.ndarray:
        """Metric components as jets of the requested order at a point."""
        coords = [float(x) for x in point]
        if len(coords) != self.dim:
            raise ValueError(f"point has {len(coords)} coordinates, expected {self.dim}")
        xs = [jet_var(k, coords[k], self.dim, order) for k in range(self.dim)]
        g = np.empty((self.dim, self.dim), dtype=object)
        for i in range(self.dim):
            for j in range(i, self.dim):
                v = self.exprs[i][j].evaluate(xs, self.parameters)
                if not isinstance(v, Jet):
                    v = v + 0.0 * xs[0]  # lift constants
                g[i, j] = g[j, i] = v
        return g


def _diag_patch(name, dim, diag_exprs, parameters=None, domain_note=""):
    exprs = [[ZERO] * dim for _ in range(dim)]
    for i, e in enumerate(diag_exprs):
        exprs[i][i] = e
    return MetricPatch(name, dim, exprs, parameters or {}, domain_note)


def _sum_sq(indices) -> Expr:
    total = None
    for k in indices:
        sq = Mul(Coord(k), Coord(k))
        total = sq if total is None else Add(total, sq)
    return total


def _conformal_factor(param_name: str, indices) -> Expr:
    # (1 + (kappa/4) * |x|^2)^-2, the constant-curvature conformal factor
    return Pow(Add(ONE, Mul(Div(Param(param_name), Const(4.0)), _sum_sq(indices))), -2)


def flat(dim: int) -> MetricPatch:
    """Euclidean metric in ``dim`` coordinates."""
    if not 2 <= dim <= 6:
        raise ValueError("dim must be in 2..6")
    return _diag_patch("flat", dim, [ONE] * dim)


def product_surfaces(a: float, b: float) -> MetricPatch:
    """Product of two surfaces of constant Gaussian curvature a and b."""
    if a == 0.0 or b == 0.0:
        raise ValueError("curvature parameters must be nonzero")
    fa = _conformal_factor("a", (0, 1))
    fb = _conformal_factor("b", (2, 3))
    return _diag_patch(
        "product_surfaces",
        4,
        [fa, fa, fb, fb],
        {"a": float(a), "b": float(b)},
        "valid while 1 + (a/4)(x1^2+x2^2) > 0 and 1 + (b/4)(x3^2+x4^2) > 0",
    )


def space_form_cross_line(a: float) -> MetricPatch:
    """Product of a 3-dimensional space of constant curvature a and a line."""
    if a == 0.0:
        raise ValueError("curvature parameter must be nonzero")
    fa = _conformal_factor("a", (0, 1, 2))
    return _diag_patch(
        "space_form_cross_line",
        4,
        [fa, fa, fa, ONE],
        {"a": float(a)},
        "valid while 1 + (a/4)(x1^2+x2^2+x3^2) > 0",
    )


def space_form4(a: float) -> MetricPatch:
    """4-dimensional space of constant sectional curvature a."""
    if a == 0.0:
        raise ValueError("curvature parameter must be nonzero")
    fa = _conformal_factor("a", (0, 1, 2, 3))
    return _diag_patch(
        "space_form4",
        4,
        [fa] * 4,
        {"a": float(a)},
        "valid while 1 + (a/4)|x|^2 > 0",
    )


def conformal_product() -> MetricPatch:
    """Product of two conformally flat surfaces with factors e^(2(x1^2+x2^2))
    and e^(2(x3^2+x4^2)); curvature is non-constant and tau has nonzero
    Hessian, which no other catalog entry provides."""
    f1 = Exp(Mul(Const(2.0), _sum_sq((0, 1))))
    f2 = Exp(Mul(Const(2.0), _sum_sq((2, 3))))
    return _diag_patch("conformal_product", 4, [f1, f1, f2, f2], {}, "valid everywhere")


def constant_curvature_surface(a: float) -> MetricPatch:
    """Surface of constant Gaussian curvature a (2-dimensional chart)."""
    if a == 0.0:
        raise ValueError("curvature parameter must be nonzero")
    fa = _conformal_factor("a", (0, 1))
    return _diag_patch("constant_curvature_surface", 2, [fa, fa], {"a": float(a)})


def solvable_lie_algebra(a: float, b: float) -> StructureConstants:
    """Structure constants of the 4-dimensional solvable algebra with
    brackets [e1,e2] = a e2, [e1,e3] = -a e3 - b e4, [e1,e4] = b e3 - a e4,
    with the inner product making e1..e4 orthonormal."""
    if a == 0.0:
        raise ValueError("parameter a must be nonzero")
    c = np.zeros((4, 4, 4))  # c[k, i, j] = e_k component of [e_i, e_j]

    def bracket(i, j, comps):
        for k, v in comps.items():
            c[k, i, j] = v
            c[k, j, i] = -v

    bracket(0, 1, {1: a})
    bracket(0, 2, {2: -a, 3: -b})
    bracket(0, 3, {2: b, 3: -a})
    return StructureConstants(4, c, np.eye(4))


# monomial exponent lists are deterministic; only coefficients are random
def _monomials(dim: int, degree: int):
    out = [()]
    frontier = [()]
    for _ in range(degree):
        nxt = []
        for m in frontier:
            start = m[-1] if m else 0
            for k in range(start, dim):
                nxt.append(m + (k,))
        out.extend(nxt)
        frontier = nxt
    return out  # each entry is a sorted tuple of coordinate indices


def _poly_expr(rng, dim, degree, amplitude, lead: Expr | None = None) -> Expr:
    # left-associated Add chain so that serialization round-trips structurally
    total = lead
    for mono in _monomials(dim, degree):
        coeff = rng.uniform(-amplitude, amplitude)
        term: Expr = Const(coeff)
        for k in mono:
            term = Mul(term, Coord(k))
        total = term if total is None else Add(total, term)
    return total


def random_polynomial_metric(
    seed: int, dim: int, degree: int = 3, amplitude: float = 0.05
) -> MetricPatch:
    """Identity plus a random symmetric polynomial perturbation.

    Retries with fresh coefficients (up to 100 draws) until the metric is
    positive definite at a fixed probe grid inside [-0.5, 0.5]^dim.
    """
    if not 2 <= dim <= 6:
        raise ValueError("dim must be in 2..6")
    if degree > 3:
        raise ValueError("degree must be <= 3")
    rng = np.random.default_rng(seed)
    probe_rng = np.random.default_rng(seed + 1)
    probes = probe_rng.uniform(-0.5, 0.5, size=(16, dim))
    for _ in range(100):
        exprs = [[None] * dim for _ in range(dim)]
        for i in range(dim):
            for j in range(i, dim):
                lead = ONE if i == j else None
                exprs[i][j] = exprs[j][i] = _poly_expr(rng, dim, degree, amplitude, lead)
        patch = MetricPatch(f"random_polynomial(seed={seed})", dim, exprs)
        ok = True
        for pt in probes:
            try:
                np.linalg.cholesky(patch.evaluate(pt))
            except np.linalg.LinAlgError:
                ok = False
                break
        if ok:
            return patch
    raise GenerationError(
        f"no positive-definite draw in 100 attempts (seed={seed}, amplitude={amplitude})"
    )


# ---------------------------------------------------------------------------
# case catalog


class CaseKind(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    FLAT = "flat"
    RANDOM = "random"


_CONSTANT_CURVATURE = (CaseKind.I, CaseKind.II, CaseKind.III)

_DEFAULT_PARAMS = {
    CaseKind.I: {"a": 1.0, "b": 2.0},
    CaseKind.II: {"a": 1.0},
    CaseKind.III: {"a": 1.0},
    CaseKind.IV: {"a": 1.0, "b": 1.0},
    CaseKind.V: {},
    CaseKind.FLAT: {},
}

_CASE_POINT_SEED = {
    CaseKind.I: 101,
    CaseKind.II: 102,
    CaseKind.III: 103,
    CaseKind.V: 105,
    CaseKind.FLAT: 106,
    CaseKind.RANDOM: 107,
}


@dataclass(frozen=True)
class CaseSpec:
    """A catalog entry plus the sample points where it is evaluated."""

    kind: CaseKind
    params: dict = field(default_factory=dict)
    points: tuple = ()
    seed: int = 0
    degree: int = 3
    amplitude: float = 0.05

    def __post_init__(self):
        pts = tuple(np.asarray(p, dtype=float) for p in self.points)
        object.__setattr__(self, "points", pts)
        if self.kind in _CONSTANT_CURVATURE and self.params.get("a", 1.0) == 0.0:
            raise ValueError("constant-curvature cases need a nonzero curvature")
        if self.kind is CaseKind.I and self.params.get("b", 1.0) == 0.0:
            raise ValueError("case I needs nonzero curvature b")
        if self.kind is CaseKind.IV and self.params.get("a", 1.0) == 0.0:
            raise ValueError("case IV needs nonzero parameter a")
        if self.kind is CaseKind.IV and pts:
            raise ValueError("case IV is homogeneous and takes no sample points")


def case_sample_points(kind: CaseKind, n: int = 5, seed_base: int = 0, dim: int = 4):
    """Deterministic pseudo-random points in [-0.4, 0.4]^dim, seeded per case.

    The box stays clear of the chart singularity |x|^2 = -4/kappa of the
    negative-curvature conformal charts for kappa >= -6.
    """
    if kind is CaseKind.IV:
        return ()
    rng = np.random.default_rng([_CASE_POINT_SEED[kind], seed_base])
    return tuple(rng.uniform(-0.4, 0.4, size=dim) for _ in range(n))


def default_case(kind: CaseKind, n_points: int = 5, seed_base: int = 0) -> CaseSpec:
    """The catalog entry with its standard parameters and sample points."""
    params = dict(_DEFAULT_PARAMS[kind])
    return CaseSpec(kind, params, case_sample_points(kind, n_points, seed_base))


def default_cases(n_points: int = 5, seed_base: int = 0):
    """The five test manifolds used to pin down the identity coefficients."""
    return [
        default_case(k, n_points, seed_base)
        for k in (CaseKind.I, CaseKind.II, CaseKind.III, CaseKind.IV, CaseKind.V)
    ]


def build_patch(spec: CaseSpec) -> MetricPatch:
    """Chart for a coordinate case (all kinds except IV)."""
    kind = spec.kind
    if kind is CaseKind.I:
        return product_surfaces(spec.params["a"], spec.params["b"])
    if kind is CaseKind.II:
        return space_form_cross_line(spec.params["a"])
    if kind is CaseKind.III:
        return space_form4(spec.params["a"])
    if kind is CaseKind.V:
        return conformal_product()
    if kind is CaseKind.FLAT:
        return flat(4)
    if kind is CaseKind.RANDOM:
        return random_polynomial_metric(spec.seed, 4, spec.degree, spec.amplitude)
    raise ValueError(f"case {kind.value} has no coordinate chart")


# ---------------------------------------------------------------------------
# metric-definition format

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)

_COORD_RE = re.compile(r"^x([1-9]\d*)$")


class _ExprParser:
    """Recursive-descent parser for one expression, with column reporting."""

    def __init__(self, text: str, line: int, col_offset: int, dim: int, params):
        self.line = line
        self.col_offset = col_offset
        self.dim = dim
        self.params = params
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None or m.end() == pos:
                rest = text[pos:].lstrip()
                if not rest:
                    break
                self._fail(f"unexpected character {rest[0]!r}", pos + len(text[pos:]) - len(rest))
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.pos = 0

    def _fail(self, message: str, col: int) -> None:
        raise ParseError(message, self.line, self.col_offset + col + 1)

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None, -1)

    def _next(self):
        tok = self._peek()
        self.pos += 1
        return tok

    def parse(self) -> Expr:
        e = self._expr()
        kind, text, col = self._peek()
        if kind is not None:
            self._fail(f"unexpected token {text!r}", col)
        return e

    def _expr(self) -> Expr:
        e = self._term()
        while True:
            kind, text, _ = self._peek()
            if kind == "op" and text in "+-":
                self._next()
                rhs = self._term()
                e = Add(e, rhs) if text == "+" else Sub(e, rhs)
            else:
                return e

    def _term(self) -> Expr:
        e = self._unary()
        while True:
            kind, text, _ = self._peek()
            if kind == "op" and text in "*/":
                self._next()
                rhs = self._unary()
                e = Mul(e, rhs) if text == "*" else Div(e, rhs)
            else:
                return e

    def _unary(self) -> Expr:
        kind, text, _ = self._peek()
        if kind == "op" and text in "+-":
            self._next()
            inner = self._unary()
            if text == "+":
                return inner
            # fold a negated literal so serialization round-trips exactly
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Neg(inner)
        return self._power()

    def _power(self) -> Expr:
        e = self._atom()
        kind, text, _ = self._peek()
        if kind == "op" and text == "^":
            self._next()
            sign = 1
            kind, text, col = self._next()
            if kind == "op" and text == "-":
                sign = -1
                kind, text, col = self._next()
            if kind != "number" or "." in text or "e" in text or "E" in text:
                self._fail("exponent must be an integer", col)
            e = Pow(e, sign * int(text))
        return e

    def _atom(self) -> Expr:
        kind, text, col = self._next()
        if kind == "number":
            return Const(float(text))
        if kind == "op" and text == "(":
            e = self._expr()
            kind, text, col = self._next()
            if text != ")":
                self._fail("expected ')'", col)
            return e
        if kind == "name":
            if text == "exp":
                kind2, text2, col2 = self._next()
                if text2 != "(":
                    self._fail("expected '(' after exp", col2)
                e = self._expr()
                kind2, text2, col2 = self._next()
                if text2 != ")":
                    self._fail("expected ')'", col2)
                return Exp(e)
            m = _COORD_RE.match(text)
            if m:
                idx = int(m.group(1))
                if idx > self.dim:
                    self._fail(f"coordinate {text} exceeds dim {self.dim}", col)
                return Coord(idx - 1)
            if text in self.params:
                return Param(text)
            self._fail(f"unknown symbol {text!r}", col)
        self._fail("expected a number, symbol, or '('", col if col >= 0 else 0)


_DIM_LINE = re.compile(r"^\s*dim\s*=\s*(\d+)\s*$")
_PARAM_LINE = re.compile(r"^\s*param\s+([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(\S+)\s*$")
_ENTRY_LINE = re.compile(r"^\s*g\[(\d+)\]\[(\d+)\]\s*=")


def parse_metric_file(text: str, name: str = "file") -> MetricPatch:
    """Parse metric-definition text into a validated patch."""
    dim = None
    params: dict = {}
    entries: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _DIM_LINE.match(line)
        if m:
            if dim is not None:
                raise ParseError("duplicate dim line", lineno)
            dim = int(m.group(1))
            if not 2 <= dim <= 6:
                raise ParseError(f"dim must be in 2..6, got {dim}", lineno)
            continue
        m = _PARAM_LINE.match(line)
        if m:
            pname, pvalue = m.group(1), m.group(2)
            if pname == "exp" or _COORD_RE.match(pname):
                raise ParseError(f"parameter name {pname!r} is reserved", lineno)
            try:
                params[pname] = float(pvalue)
            except ValueError:
                raise ParseError(f"bad parameter value {pvalue!r}", lineno) from None
            continue
        m = _ENTRY_LINE.match(line)
        if m:
            if dim is None:
                raise ParseError("entry before the dim line", lineno)
            i, j = int(m.group(1)), int(m.group(2))
            if not (1 <= i <= dim and 1 <= j <= dim):
                raise ParseError(f"index g[{i}][{j}] out of range for dim {dim}", lineno)
            if (i, j) in entries:
                raise ParseError(f"duplicate entry g[{i}][{j}]", lineno)
            rhs = line[m.end():]
            expr = _ExprParser(rhs, lineno, m.end(), dim, params).parse()
            entries[(i, j)] = expr
            continue
        raise ParseError(f"unrecognized line {line.strip()!r}", lineno)

    if dim is None:
        raise ParseError("missing dim line")
    exprs = [[ZERO] * dim for _ in range(dim)]
    for i in range(1, dim + 1):
        if (i, i) not in entries:
            raise ParseError(f"missing diagonal entry g[{i}][{i}]")
        for j in range(i, dim + 1):
            upper = entries.get((i, j))
            lower = entries.get((j, i)) if j > i else upper
            if upper is not None and lower is not None and upper != lower:
                raise ParseError(f"g[{i}][{j}] and g[{j}][{i}] differ")
            e = upper if upper is not None else lower
            if e is not None:
                exprs[i - 1][j - 1] = exprs[j - 1][i - 1] = e
    return MetricPatch(name, dim, exprs, params)


def _render(e: Expr, parent_prec: int = 0) -> str:
    # precedence: add/sub 1, mul/div 2, unary minus 3, power 4
    if isinstance(e, Const):
        s = repr(e.value)
        return f"({s})" if e.value < 0 and parent_prec > 1 else s
    if isinstance(e, Coord):
        return f"x{e.index + 1}"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Exp):
        return f"exp({_render(e.operand)})"
    if isinstance(e, Add):
        s = f"{_render(e.left, 1)} + {_render(e.right, 1)}"
        prec = 1
    elif isinstance(e, Sub):
        s = f"{_render(e.left, 1)} - {_render(e.right, 2)}"
        prec = 1
    elif isinstance(e, Mul):
        s = f"{_render(e.left, 2)}*{_render(e.right, 2)}"
        prec = 2
    elif isinstance(e, Div):
        s = f"{_render(e.left, 2)}/{_render(e.right, 3)}"
        prec = 2
    elif isinstance(e, Neg):
        s = f"-{_render(e.operand, 3)}"
        prec = 3
    elif isinstance(e, Pow):
        s = f"{_render(e.base, 4)}^{e.exponent}"
        prec = 4
    else:
        raise TypeError(f"cannot render {type(e).__name__}")
    return f"({s})" if prec < parent_prec else s


def metric_to_text(patch: MetricPatch) -> str:
    """Serialize a patch in the metric-definition format (parse round-trips)."""
    lines = [f"dim = {patch.dim}"]
    for pname in sorted(patch.parameters):
        lines.append(f"param {pname} = {patch.parameters[pname]!r}")
    for i in range(patch.dim):
        for j in range(i, patch.dim):
            e = patch.exprs[i][j]
            if i != j and e == ZERO:
                continue
            lines.append(f"g[{i + 1}][{j + 1}] = {_render(e)}")
    return "\n".join(lines) + "\n"

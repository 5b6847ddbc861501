"""Immutable expression trees for analytic functions of one complex variable.

Trees are built from a small set of node types and can be evaluated on
scalars or numpy arrays and differentiated symbolically to any order::

    >>> phi = Mobius(1, 1, -1, 1)          # (1 + z) / (1 - z)
    >>> f = exp(phi)
    >>> complex(evaluate(derivative(f), 0))
    (5.43656365691809+0j)

Only constant folding (and trimming of trailing polynomial zeros) is applied
while building trees, so tree shapes stay predictable.
"""

from __future__ import annotations

import cmath
import functools
import json
from dataclasses import dataclass
from numbers import Number

import numpy as np

from .errors import DomainError, SingularPoint
from .sphere import DiskPoint


def _num(x) -> complex:
    """Parse a number given as a scalar or an ``[re, im]`` pair."""
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise DomainError(f"complex pair must have two entries, got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, str):
        return complex(x.replace(" ", ""))
    return complex(x)


def _fmt(c: complex) -> str:
    if c.imag == 0:
        return f"{c.real:g}"
    return f"({c.real:g}{c.imag:+g}j)"


class Expr:
    """Base class of all expression nodes."""

    __slots__ = ()

    def __call__(self, z):
        return evaluate(self, z)

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, mul(Const(-1), as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), mul(Const(-1), self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return mul(Const(-1), self)

    def __pow__(self, n):
        return power(self, n)

    def _eval(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _diff(self) -> "Expr":
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, repr=False)
class Const(Expr):
    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))

    def _eval(self, z):
        return np.full(z.shape, self.value, dtype=complex)

    def _diff(self):
        return ZERO

    def to_dict(self):
        return {"op": "const", "value": [self.value.real, self.value.imag]}

    def __repr__(self):
        return _fmt(self.value)


@dataclass(frozen=True, repr=False)
class Identity(Expr):
    def _eval(self, z):
        return z.copy()

    def _diff(self):
        return ONE

    def to_dict(self):
        return {"op": "z"}

    def __repr__(self):
        return "z"


@dataclass(frozen=True, repr=False)
class Add(Expr):
    left: Expr
    right: Expr

    def _eval(self, z):
        return self.left._eval(z) + self.right._eval(z)

    def _diff(self):
        return add(derivative(self.left), derivative(self.right))

    def to_dict(self):
        return {"op": "add", "args": [self.left.to_dict(), self.right.to_dict()]}

    def __repr__(self):
        return f"({self.left!r} + {self.right!r})"


@dataclass(frozen=True, repr=False)
class Mul(Expr):
    left: Expr
    right: Expr

    def _eval(self, z):
        return self.left._eval(z) * self.right._eval(z)

    def _diff(self):
        return add(
            mul(derivative(self.left), self.right),
            mul(self.left, derivative(self.right)),
        )

    def to_dict(self):
        return {"op": "mul", "args": [self.left.to_dict(), self.right.to_dict()]}

    def __repr__(self):
        return f"({self.left!r} * {self.right!r})"


@dataclass(frozen=True, repr=False)
class Div(Expr):
    num: Expr
    den: Expr

    def _eval(self, z):
        d = self.den._eval(z)
        if np.any(d == 0):
            raise SingularPoint(self, "zero denominator")
        return self.num._eval(z) / d

    def _diff(self):
        top = add(
            mul(derivative(self.num), self.den),
            mul(Const(-1), mul(self.num, derivative(self.den))),
        )
        return div(top, power(self.den, 2))

    def to_dict(self):
        return {"op": "div", "args": [self.num.to_dict(), self.den.to_dict()]}

    def __repr__(self):
        return f"({self.num!r} / {self.den!r})"


@dataclass(frozen=True, repr=False)
class Compose(Expr):
    """``outer(inner(z))``."""

    outer: Expr
    inner: Expr

    def _eval(self, z):
        return self.outer._eval(self.inner._eval(z))

    def _diff(self):
        return mul(compose(derivative(self.outer), self.inner), derivative(self.inner))

    def to_dict(self):
        return {"op": "compose", "outer": self.outer.to_dict(), "inner": self.inner.to_dict()}

    def __repr__(self):
        return f"{self.outer!r}∘{self.inner!r}"


@dataclass(frozen=True, repr=False)
class Exp(Expr):
    arg: Expr

    def _eval(self, z):
        return np.exp(self.arg._eval(z))

    def _diff(self):
        return mul(self, derivative(self.arg))

    def to_dict(self):
        return {"op": "exp", "arg": self.arg.to_dict()}

    def __repr__(self):
        return f"exp({self.arg!r})"


@dataclass(frozen=True, repr=False)
class Log(Expr):
    """Principal branch; arguments on (-inf, 0] are rejected."""

    arg: Expr

    def _eval(self, z):
        w = self.arg._eval(z)
        if np.any((w.imag == 0) & (w.real <= 0)):
            raise SingularPoint(self, "argument on the branch cut (-inf, 0]")
        return np.log(w)

    def _diff(self):
        return div(derivative(self.arg), self.arg)

    def to_dict(self):
        return {"op": "log", "arg": self.arg.to_dict()}

    def __repr__(self):
        return f"log({self.arg!r})"


@dataclass(frozen=True, repr=False)
class Pow(Expr):
    """Integer power ``base ** n``."""

    base: Expr
    n: int

    def __post_init__(self):
        if int(self.n) != self.n:
            raise DomainError("Pow exponent must be an integer")
        object.__setattr__(self, "n", int(self.n))

    def _eval(self, z):
        b = self.base._eval(z)
        if self.n < 0 and np.any(b == 0):
            raise SingularPoint(self, "negative power of zero")
        if self.n < 0:
            return 1.0 / b ** (-self.n)
        return b ** self.n

    def _diff(self):
        return mul(mul(Const(self.n), power(self.base, self.n - 1)), derivative(self.base))

    def to_dict(self):
        return {"op": "pow", "base": self.base.to_dict(), "n": self.n}

    def __repr__(self):
        return f"{self.base!r}^{self.n}"


@dataclass(frozen=True, repr=False)
class Poly(Expr):
    """Polynomial in z; ``coeffs[k]`` multiplies ``z**k``."""

    coeffs: tuple

    def __post_init__(self):
        c = [complex(x) for x in self.coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c:
            c = [0j]
        object.__setattr__(self, "coeffs", tuple(c))

    def _eval(self, z):
        out = np.full(z.shape, self.coeffs[-1], dtype=complex)
        for c in reversed(self.coeffs[:-1]):
            out = out * z + c
        return out

    def _diff(self):
        return poly([k * c for k, c in enumerate(self.coeffs)][1:])

    def to_dict(self):
        return {"op": "poly", "coeffs": [[c.real, c.imag] for c in self.coeffs]}

    def __repr__(self):
        return "poly[" + ", ".join(_fmt(c) for c in self.coeffs) + "]"


@dataclass(frozen=True, repr=False)
class Mobius(Expr):
    """``(a z + b) / (c z + d)`` with ``ad - bc != 0``."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.a * self.d - self.b * self.c == 0:
            raise DomainError("degenerate Mobius map: ad - bc = 0")

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def _eval(self, z):
        den = self.c * z + self.d
        if np.any(den == 0):
            raise SingularPoint(self, "pole of the Mobius map")
        return (self.a * z + self.b) / den

    def _diff(self):
        return div(Const(self.det), power(poly([self.d, self.c]), 2))

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def to_dict(self):
        return {
            "op": "mobius",
            **{k: [getattr(self, k).real, getattr(self, k).imag] for k in "abcd"},
        }

    def __repr__(self):
        return "mobius(" + ",".join(_fmt(getattr(self, k)) for k in "abcd") + ")"


ZERO = Const(0)
ONE = Const(1)
Z = Identity()


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, Number):
        return Const(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an expression")


def _is_const(e, value=None):
    return isinstance(e, Const) and (value is None or e.value == value)


def add(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    return Add(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0):
        raise SingularPoint(Div(a, b), "division by the zero constant")
    if _is_const(a, 0):
        return ZERO
    if _is_const(b, 1):
        return a
    if _is_const(a) and _is_const(b):
        return Const(a.value / b.value)
    return Div(a, b)


def power(base: Expr, n: int) -> Expr:
    if n == 0:
        return ONE
    if n == 1:
        return base
    if _is_const(base) and (n > 0 or base.value != 0):
        return Const(base.value ** n)
    return Pow(base, n)


def compose(outer: Expr, inner: Expr) -> Expr:
    if isinstance(outer, Const) or isinstance(inner, Identity):
        return outer
    if isinstance(outer, Identity):
        return inner
    return Compose(outer, inner)


def exp(arg: Expr = Z) -> Expr:
    arg = as_expr(arg)
    if isinstance(arg, Const):
        return Const(cmath.exp(arg.value))
    return Exp(arg)


def log(arg: Expr = Z) -> Expr:
    arg = as_expr(arg)
    if isinstance(arg, Const):
        if arg.value.imag == 0 and arg.value.real <= 0:
            raise SingularPoint(Log(arg), "argument on the branch cut (-inf, 0]")
        return Const(cmath.log(arg.value))
    return Log(arg)


def poly(coeffs) -> Expr:
    p = Poly(tuple(coeffs))
    if len(p.coeffs) == 1:
        return Const(p.coeffs[0])
    return p


def evaluate(e: Expr, z):
    """Evaluate ``e`` at a scalar or array of complex points.

    Raises :class:`SingularPoint` naming the offending subexpression when any
    point hits a pole or the log branch cut.
    """
    if isinstance(z, DiskPoint):
        z = z.z
    arr = np.asarray(z, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        out = e._eval(arr)
    if arr.ndim == 0:
        return complex(out)
    return out


@functools.lru_cache(maxsize=4096)
def derivative(e: Expr) -> Expr:
    """Exact symbolic derivative."""
    return e._diff()


def nth_derivative(e: Expr, n: int) -> Expr:
    if int(n) != n or n < 1:
        raise DomainError("derivative order must be a positive integer")
    for _ in range(int(n)):
        e = derivative(e)
    return e


def mobius_to_z0(z0) -> Mobius:
    """Disk automorphism ``(z0 - z) / (1 - conj(z0) z)``, an involution swapping 0 and z0."""
    z0 = DiskPoint.of(z0).z
    return Mobius(-1, z0, -z0.conjugate(), 1)


def mobius_boundary(xi_n: float) -> Mobius:
    """``(s + xi_n) / (1 + xi_n s)`` for real ``0 < xi_n < 1``; fixes -1 and 1."""
    xi_n = float(xi_n)
    if not 0.0 < xi_n < 1.0:
        raise DomainError("xi_n must lie in (0, 1)")
    return Mobius(1, xi_n, xi_n, 1)


def disk_automorphism(a, theta: float = 0.0) -> Mobius:
    """``e^{i theta} (a - z) / (1 - conj(a) z)``."""
    a = DiskPoint.of(a).z
    rot = cmath.exp(1j * theta)
    return Mobius(-rot, rot * a, -a.conjugate(), 1)


# -- map JSON --------------------------------------------------------------

def from_dict(d) -> Expr:
    """Build an expression from the tagged-object JSON form."""
    if isinstance(d, (int, float, list)):
        return Const(_num(d))
    if not isinstance(d, dict) or "op" not in d:
        raise DomainError(f"expression must be an object with an 'op' field, got {d!r}")
    op = d["op"]
    if op == "const":
        return Const(_num(d["value"]))
    if op in ("z", "identity", "id"):
        e = Z
    elif op in ("add", "sum"):
        e = _fold(add, d["args"])
    elif op in ("mul", "product"):
        e = _fold(mul, d["args"])
    elif op in ("div", "quotient"):
        num, den = d["args"]
        e = div(from_dict(num), from_dict(den))
    elif op == "compose":
        e = compose(from_dict(d["outer"]), from_dict(d["inner"]))
    elif op == "exp":
        e = exp(from_dict(d.get("arg", {"op": "z"})))
    elif op == "log":
        e = log(from_dict(d.get("arg", {"op": "z"})))
    elif op == "pow":
        e = power(from_dict(d.get("base", {"op": "z"})), int(d["n"]))
    elif op in ("poly", "polynomial"):
        e = poly([_num(c) for c in d["coeffs"]])
    elif op == "mobius":
        e = Mobius(*(_num(d[k]) for k in "abcd"))
    else:
        raise DomainError(f"unknown expression op {op!r}")
    # poly, mobius and z accept an optional argument meaning composition
    if op in ("z", "identity", "id", "poly", "polynomial", "mobius") and "arg" in d:
        e = compose(e, from_dict(d["arg"]))
    return e


def _fold(fn, args):
    if not args:
        raise DomainError("n-ary op needs at least one argument")
    out = from_dict(args[0])
    for a in args[1:]:
        out = fn(out, from_dict(a))
    return out


def to_json(e: Expr) -> str:
    return json.dumps(e.to_dict(), sort_keys=True)


def from_json(text: str) -> Expr:
    return from_dict(json.loads(text))


__all__ = [
    "Expr", "Const", "Identity", "Add", "Mul", "Div", "Compose", "Exp", "Log",
    "Pow", "Poly", "Mobius", "Z", "ZERO", "ONE", "as_expr", "add", "mul", "div",
    "power", "compose", "exp", "log", "poly", "evaluate", "derivative",
    "nth_derivative", "mobius_to_z0", "mobius_boundary", "disk_automorphism",
    "from_dict", "to_json", "from_json",
]

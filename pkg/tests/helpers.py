"""Shared test utilities: random expression trees and disk samples."""

import numpy as np

from harmonorm import expr as ex
from harmonorm.errors import SingularPoint


def random_const(rng, scale=1.0):
    return complex(rng.normal(scale=scale), rng.normal(scale=scale))


def random_tree(rng, depth):
    """Random tree with at most ``depth`` levels of non-leaf nodes."""
    if depth <= 0 or rng.random() < 0.2:
        k = rng.integers(3)
        if k == 0:
            return ex.Z
        if k == 1:
            return ex.Const(random_const(rng))
        return ex.Poly(tuple(random_const(rng, 0.7) for _ in range(rng.integers(2, 5))))
    k = rng.integers(9)
    sub = lambda: random_tree(rng, depth - 1)  # noqa: E731
    if k == 0:
        return ex.Add(sub(), sub())
    if k == 1:
        return ex.Mul(sub(), sub())
    if k == 2:
        return ex.Div(sub(), ex.Add(ex.Const(3.0), sub()))
    if k == 3:
        return ex.Exp(ex.Mul(ex.Const(0.3), sub()))
    if k == 4:
        return ex.Log(ex.Add(ex.Const(4.0), sub()))
    if k == 5:
        return ex.Pow(sub(), int(rng.integers(-2, 4)))
    if k == 6:
        a = 0.8 * rng.random() * np.exp(2j * np.pi * rng.random())
        return ex.disk_automorphism(a, float(rng.random() * 6))
    if k == 7:
        return ex.Compose(sub(), sub())
    return ex.Compose(ex.Mobius(*(random_const(rng) for _ in range(4))), sub())


def disk_points(rng, n, rmax=0.9):
    r = rmax * np.sqrt(rng.random(n))
    return r * np.exp(2j * np.pi * rng.random(n))


def safe_eval(e, z):
    """Value of ``e`` at ``z`` or None when singular or non-finite."""
    try:
        v = ex.evaluate(e, z)
    except SingularPoint:
        return None
    return v if np.isfinite(v) else None


def derivative_agrees(e, z, step=1e-6, rtol=1e-5, bound=1e4):
    """Compare the symbolic derivative with a central difference at ``z``.

    Returns None when the point is unusable (singular, or values above
    ``bound`` where rounding dominates the difference quotient).
    """
    vals = [safe_eval(e, z + s) for s in (-step, 0.0, step)]
    if any(v is None or abs(v) > bound for v in vals):
        return None
    d = safe_eval(ex.derivative(e), z)
    if d is None:
        return None
    fd = (vals[2] - vals[0]) / (2 * step)
    return abs(d - fd) <= rtol * max(abs(d), 1.0)

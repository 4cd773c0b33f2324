"""Forward-mode automatic differentiation with dual numbers.

A :class:`Dual` carries a value and a tangent (directional derivative).
Both slots may hold scalars or numpy arrays of matching shape, so a whole
heatmap can be pushed through an operator as a single dual with one seeded
tangent direction.

Numerical code elsewhere in the package is written against the small helper
functions below (``where``, ``relu``, ``asum`` ...) which dispatch on the
input type: plain floats/arrays take the fast numpy path, duals propagate
tangents.  Branches (``where``, clipping, bounce selection) carry the tangent
of the chosen branch only, i.e. subgradient semantics at the kink.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "Dual",
    "value",
    "tangent",
    "where",
    "relu",
    "clip",
    "absolute",
    "asum",
    "amean",
    "exp",
    "log",
    "log1p",
    "sqrt",
    "stack",
    "jacobian_forward",
    "jacobian_fd",
]


class Dual:
    """Dual number ``value + eps * tangent`` over scalars or numpy arrays."""

    __slots__ = ("value", "tangent")

    # keep numpy from absorbing us into object arrays; binary ops with
    # ndarrays are handled by the reflected operators below
    __array_ufunc__ = None

    def __init__(self, value, tangent=0.0):
        self.value = value
        self.tangent = tangent

    def __repr__(self):
        return f"Dual({self.value!r}, {self.tangent!r})"

    # ---- arithmetic -------------------------------------------------
    def __add__(self, other):
        ov, ot = _parts(other)
        return Dual(self.value + ov, self.tangent + ot)

    __radd__ = __add__

    def __sub__(self, other):
        ov, ot = _parts(other)
        return Dual(self.value - ov, self.tangent - ot)

    def __rsub__(self, other):
        ov, ot = _parts(other)
        return Dual(ov - self.value, ot - self.tangent)

    def __mul__(self, other):
        ov, ot = _parts(other)
        return Dual(self.value * ov, self.tangent * ov + self.value * ot)

    __rmul__ = __mul__

    def __truediv__(self, other):
        ov, ot = _parts(other)
        inv = 1.0 / ov
        return Dual(self.value * inv, (self.tangent * ov - self.value * ot) * inv * inv)

    def __rtruediv__(self, other):
        ov, ot = _parts(other)
        inv = 1.0 / self.value
        return Dual(ov * inv, (ot * self.value - ov * self.tangent) * inv * inv)

    def __neg__(self):
        return Dual(-self.value, -self.tangent)

    def __pow__(self, p):
        if not isinstance(p, (int, float)):
            raise TypeError("dual powers must be plain numbers")
        return Dual(self.value ** p, p * self.value ** (p - 1) * self.tangent)

    def __abs__(self):
        sign = np.sign(self.value)
        return Dual(self.value * sign, self.tangent * sign)

    # ---- comparisons compare primal values --------------------------
    def __lt__(self, other):
        return self.value < value(other)

    def __le__(self, other):
        return self.value <= value(other)

    def __gt__(self, other):
        return self.value > value(other)

    def __ge__(self, other):
        return self.value >= value(other)

    # ---- elementary functions ----------------------------------------
    def exp(self):
        e = np.exp(self.value)
        return Dual(e, e * self.tangent)

    def log(self):
        return Dual(np.log(self.value), self.tangent / self.value)

    def log1p(self):
        return Dual(np.log1p(self.value), self.tangent / (1.0 + self.value))

    def sqrt(self):
        s = np.sqrt(self.value)
        return Dual(s, 0.5 * self.tangent / s)

    # ---- array plumbing ----------------------------------------------
    def __getitem__(self, idx):
        t = self.tangent[idx] if isinstance(self.tangent, np.ndarray) else self.tangent
        return Dual(self.value[idx], t)

    def reshape(self, *shape):
        t = self.tangent
        if isinstance(t, np.ndarray):
            t = t.reshape(*shape)
        return Dual(self.value.reshape(*shape), t)

    @property
    def shape(self):
        return np.shape(self.value)


def _parts(x):
    if isinstance(x, Dual):
        return x.value, x.tangent
    return x, 0.0


# ---- dispatching helpers (fast path for floats/ndarrays) --------------


def value(x):
    """Primal value of ``x`` (identity for non-duals)."""
    return x.value if isinstance(x, Dual) else x


def tangent(x):
    return x.tangent if isinstance(x, Dual) else 0.0


def where(cond, a, b):
    """Select ``a`` where ``cond`` else ``b``; tangent follows the winner."""
    if isinstance(a, Dual) or isinstance(b, Dual):
        av, at = _parts(a)
        bv, bt = _parts(b)
        return Dual(np.where(cond, av, bv), np.where(cond, at, bt))
    return np.where(cond, a, b)


def relu(x):
    if isinstance(x, Dual):
        keep = x.value > 0
        return Dual(np.where(keep, x.value, 0.0), np.where(keep, x.tangent, 0.0))
    return np.maximum(x, 0.0)


def clip(x, lo, hi):
    return where(value(x) < lo, lo + 0.0 * x, where(value(x) > hi, hi + 0.0 * x, x))


def absolute(x):
    return abs(x) if isinstance(x, Dual) else np.abs(x)


def asum(x):
    if isinstance(x, Dual):
        t = x.tangent
        return Dual(np.sum(x.value), np.sum(t) if isinstance(t, np.ndarray) else t * np.size(x.value))
    return np.sum(x)


def amean(x):
    n = np.size(value(x))
    return asum(x) / n


def exp(x):
    return x.exp() if isinstance(x, Dual) else np.exp(x)


def log(x):
    return x.log() if isinstance(x, Dual) else np.log(x)


def log1p(x):
    return x.log1p() if isinstance(x, Dual) else np.log1p(x)


def sqrt(x):
    return x.sqrt() if isinstance(x, Dual) else np.sqrt(x)


def stack(xs):
    """Stack scalars (possibly duals) into a vector, dual iff any input is."""
    if any(isinstance(x, Dual) for x in xs):
        vals = np.array([value(x) for x in xs], dtype=float)
        tans = np.array([float(tangent(x)) for x in xs])
        return Dual(vals, tans)
    return np.array([float(x) for x in xs])


# ---- jacobians ---------------------------------------------------------


def jacobian_forward(f, x, cols=None):
    """Jacobian of ``f`` at ``x`` by forward-mode propagation.

    ``f`` maps a length-n vector (array or array-valued dual) to a length-m
    vector.  Column ``j`` is obtained by seeding a unit tangent on input
    ``j``.  ``cols`` restricts evaluation to a subset of input indices
    (useful for sampling pixels of large heatmap inputs).
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if cols is None:
        cols = range(n)
    cols = list(cols)
    columns = []
    for j in cols:
        seed = np.zeros(n)
        seed[j] = 1.0
        out = f(Dual(x.copy(), seed))
        columns.append(np.atleast_1d(np.asarray(out.tangent, dtype=float)))
    return np.stack(columns, axis=1)


def jacobian_fd(f, x, h=1e-4, cols=None):
    """Central finite-difference Jacobian, the oracle for forward mode.

    Truncation error is O(h^2); keep probe points at least ``h`` away from
    any branch boundary or the stencil straddles the kink.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if cols is None:
        cols = range(n)
    cols = list(cols)
    columns = []
    for j in cols:
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        fp = np.atleast_1d(np.asarray(f(xp), dtype=float))
        fm = np.atleast_1d(np.asarray(f(xm), dtype=float))
        columns.append((fp - fm) / (2.0 * h))
    return np.stack(columns, axis=1)


def max_relative_error(j_ref, j_test):
    """max |a-b| / max(1, |a|) over entries; the acceptance comparator."""
    j_ref = np.asarray(j_ref, dtype=float)
    j_test = np.asarray(j_test, dtype=float)
    denom = np.maximum(1.0, np.abs(j_ref))
    return float(np.max(np.abs(j_ref - j_test) / denom))


def softplus(x):
    """log(1 + exp(x)) in a form stable for large |x| and dual-friendly."""
    return relu(x) + log1p(exp(-absolute(x)))


def _fd_scalar(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2.0 * h)


if __name__ == "__main__":  # tiny smoke check
    d = Dual(3.0, 1.0)
    out = d * d
    assert out.value == 9.0 and out.tangent == 6.0
    assert math.isclose(_fd_scalar(lambda t: t * t, 3.0), 6.0, rel_tol=1e-8)
    print("dual smoke ok")

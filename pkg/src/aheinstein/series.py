r"""Truncated Taylor series arithmetic.

A :class:`Series` stores the normalized Taylor coefficients
``c[k] = f^{(k)}(x0) / k!`` of a function about some base point, truncated
at a fixed order.  Arithmetic and elementary functions act on the
coefficient arrays directly, so evaluating a formula on
``Series.variable(x0, K)`` yields all derivatives through order ``K`` to
rounding error.  This is the analytic derivative path used for curvature,
and the same class handles power series about a boundary point (with
exact :class:`fractions.Fraction` coefficients when the inputs are
rational).

Coefficient arrays may carry trailing batch dimensions: ``c`` has shape
``(K + 1, *batch)`` and every operation broadcasts over the batch.

Examples
--------
>>> x = Series.variable(0.5, 3)
>>> y = (x * x).exp()
>>> float(y.derivative(1))  # d/dx exp(x^2) = 2x exp(x^2)
1.2840254166877414
"""

from fractions import Fraction
from math import factorial

import numpy as np

__all__ = ["Series"]


def _is_exact(value):
    return isinstance(value, (int, Fraction))


class Series:
    """Truncated Taylor series with optional batch dimensions."""

    __slots__ = ("c",)
    __array_priority__ = 1000

    def __init__(self, coeffs):
        c = coeffs if isinstance(coeffs, np.ndarray) else np.asarray(coeffs)
        if c.ndim == 0:
            c = c.reshape(1)
        self.c = c

    # -- constructors -------------------------------------------------------

    @classmethod
    def variable(cls, x0, order):
        """The identity function expanded about ``x0`` (scalar or array)."""
        x0 = np.asarray(x0, dtype=float)
        c = np.zeros((order + 1,) + x0.shape)
        c[0] = x0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def exact_variable(cls, order):
        """The identity about 0 with Fraction coefficients."""
        c = np.empty(order + 1, dtype=object)
        c[:] = Fraction(0)
        if order >= 1:
            c[1] = Fraction(1)
        return cls(c)

    @classmethod
    def constant(cls, value, order, batch=()):
        if _is_exact(value):
            c = np.empty((order + 1,) + tuple(batch), dtype=object)
            c[...] = Fraction(0)
            c[0] = Fraction(value)
            return cls(c)
        value = np.asarray(value)
        dtype = object if value.dtype == object else float
        c = np.zeros((order + 1,) + np.broadcast_shapes(value.shape, tuple(batch)),
                     dtype=dtype)
        c[0] = value
        return cls(c)

    # -- basic properties ---------------------------------------------------

    @property
    def order(self):
        return self.c.shape[0] - 1

    @property
    def value(self):
        return self.c[0]

    def derivative(self, k):
        """The k-th derivative at the base point."""
        return self.c[k] * factorial(k)

    def derivatives(self):
        """Array of all derivatives f, f', ..., f^(K)."""
        fac = np.array([factorial(k) for k in range(self.order + 1)])
        fac = fac.reshape((-1,) + (1,) * (self.c.ndim - 1))
        return self.c * fac

    def truncate(self, order):
        return Series(self.c[: order + 1])

    def __repr__(self):
        return f"Series(order={self.order}, c={self.c!r})"

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Series):
            return other
        if _is_exact(other) and self.c.dtype == object:
            return Series.constant(other, self.order)
        c = np.zeros_like(self.c, dtype=np.result_type(self.c, np.asarray(other)))
        c[0] = other
        return Series(c)

    @staticmethod
    def _common(a, b):
        k = min(a.order, b.order)
        return a.c[: k + 1], b.c[: k + 1]

    def __add__(self, other):
        a, b = self._common(self, self._coerce(other))
        return Series(a + b)

    __radd__ = __add__

    def __neg__(self):
        return Series(-self.c)

    def __sub__(self, other):
        a, b = self._common(self, self._coerce(other))
        return Series(a - b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Series):
            return Series(self.c * other)
        a, b = self._common(self, other)
        out = [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(len(a))]
        return Series(np.array(out) if a.dtype != object and b.dtype != object
                      else _obj_stack(out))

    __rmul__ = __mul__

    def reciprocal(self):
        a = self.c
        out = [None] * len(a)
        a0 = a[0]
        out[0] = _exact_div(1, a0)
        for k in range(1, len(a)):
            acc = sum(a[j] * out[k - j] for j in range(1, k + 1))
            out[k] = _exact_div(-acc, a0)
        return Series(_stack_like(out, a))

    def __truediv__(self, other):
        if not isinstance(other, Series):
            if _is_exact(other) and self.c.dtype == object:
                return Series(self.c * Fraction(1) / Fraction(other))
            return Series(self.c / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, alpha):
        if isinstance(alpha, int) and alpha >= 0:
            result = Series.constant(1, self.order) if self.c.dtype == object \
                else Series(np.zeros_like(self.c))
            if self.c.dtype != object:
                result.c[0] = 1.0
            base = self
            n = alpha
            while n:
                if n & 1:
                    result = result * base
                base = base * base
                n >>= 1
            return result
        if isinstance(alpha, int):
            return (self ** (-alpha)).reciprocal()
        return self._real_power(alpha)

    def _real_power(self, alpha):
        # a0 p_k = (1/k) sum_{j=1..k} ((alpha + 1) j - k) a_j p_{k-j}
        a = self.c
        exact = a.dtype == object and isinstance(alpha, Fraction)
        out = [None] * len(a)
        if exact:
            if a[0] != 1:
                raise ValueError("exact real power requires a unit constant term")
            out[0] = Fraction(1)
        else:
            out[0] = np.asarray(a[0], dtype=float) ** float(alpha)
            alpha = float(alpha)
        for k in range(1, len(a)):
            acc = sum(((alpha + 1) * j - k) * a[j] * out[k - j] for j in range(1, k + 1))
            out[k] = _exact_div(acc, a[0] * k) if exact else acc / (a[0] * k)
        return Series(_stack_like(out, a))

    def sqrt(self):
        return self._real_power(Fraction(1, 2) if self.c.dtype == object else 0.5)

    def exp(self):
        # k e_k = sum_{j=1..k} j a_j e_{k-j}
        a = self.c
        out = [None] * len(a)
        if a.dtype == object:
            if a[0] != 0:
                raise ValueError("exact exp requires a zero constant term")
            out[0] = Fraction(1)
        else:
            out[0] = np.exp(np.asarray(a[0], dtype=float))
        for k in range(1, len(a)):
            acc = sum(j * a[j] * out[k - j] for j in range(1, k + 1))
            out[k] = _exact_div(acc, k) if a.dtype == object else acc / k
        return Series(_stack_like(out, a))

    def log(self):
        a = self.c
        out = [None] * len(a)
        if a.dtype == object:
            if a[0] != 1:
                raise ValueError("exact log requires a unit constant term")
            out[0] = Fraction(0)
        else:
            out[0] = np.log(np.asarray(a[0], dtype=float))
        for k in range(1, len(a)):
            acc = sum(j * out[j] * a[k - j] for j in range(1, k))
            out[k] = _exact_div(a[k] - _exact_div(acc, k), a[0]) if a.dtype == object \
                else (a[k] - acc / k) / a[0]
        return Series(_stack_like(out, a))

    def sinh(self):
        e = self.exp()
        return (e - e.reciprocal()) * 0.5

    def cosh(self):
        e = self.exp()
        return (e + e.reciprocal()) * 0.5

    # -- calculus and composition ------------------------------------------

    def deriv(self):
        """Series of the derivative (one order lower)."""
        k = np.arange(1, self.order + 1).reshape((-1,) + (1,) * (self.c.ndim - 1))
        return Series(self.c[1:] * k)

    def integral(self, c0=0):
        """Antiderivative with value ``c0`` at the base point (one order higher)."""
        k = np.arange(1, self.order + 2)
        if self.c.dtype == object:
            body = [_exact_div(self.c[i], int(k[i])) for i in range(self.order + 1)]
            return Series(_obj_stack([Fraction(c0) if _is_exact(c0) else c0] + body))
        k = k.reshape((-1,) + (1,) * (self.c.ndim - 1))
        head = np.broadcast_to(np.asarray(c0, dtype=float), self.c.shape[1:])[None]
        return Series(np.concatenate([head, self.c / k]))

    def divide_by_variable(self):
        """(f - f(0)) / x for a series whose constant term vanishes."""
        return Series(self.c[1:])

    def times_variable(self):
        zero = np.zeros_like(self.c[:1])
        if self.c.dtype == object:
            zero[...] = Fraction(0)
        return Series(np.concatenate([zero, self.c]))

    def compose(self, inner):
        """f(g(x)) for an inner series ``g`` with zero constant term."""
        k = min(self.order, inner.order)
        result = Series.constant(self.c[k], k) if self.c.dtype == object else None
        if result is None:
            c = np.zeros((k + 1,) + np.broadcast_shapes(self.c.shape[1:], inner.c.shape[1:]),
                         dtype=np.result_type(self.c, inner.c))
            c[0] = self.c[k]
            result = Series(c)
        inner = inner.truncate(k)
        for j in range(k - 1, -1, -1):
            result = result * inner + self.c[j]
        return result

    def revert(self):
        """Compositional inverse of a series with zero constant term."""
        if self.c.dtype == object:
            if self.c[0] != 0 or self.c[1] == 0:
                raise ValueError("reversion needs f(0) = 0 and f'(0) != 0")
        a1 = self.c[1]
        x = Series.exact_variable(self.order) if self.c.dtype == object \
            else Series(_variable_like(self.c))
        g = x / a1 if self.c.dtype != object else Series(x.c * _exact_div(1, a1))
        for _ in range(self.order):
            resid = self.compose(g) - x
            if self.c.dtype == object:
                g = g - Series(resid.c * _exact_div(1, a1))
            else:
                g = g - resid / a1
        return g


def _exact_div(num, den):
    if _is_exact(num) and _is_exact(den):
        return Fraction(num) / Fraction(den)
    return num / den


def _obj_stack(items):
    arr = np.empty(len(items), dtype=object)
    for i, v in enumerate(items):
        arr[i] = v
    return arr


def _stack_like(items, like):
    if like.dtype == object:
        return _obj_stack(items)
    return np.stack([np.broadcast_to(np.asarray(v, dtype=float), like.shape[1:])
                     for v in items])


def _variable_like(c):
    v = np.zeros_like(c, dtype=float)
    if len(v) > 1:
        v[1] = 1.0
    return v

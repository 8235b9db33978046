r"""Linearized Bach equation at the flat product dt^2 + g_{T^3}.

A ``T^3``-invariant symmetric form is stored by its matrix coefficients in
the parallel frame ``(e_1 = d/dt, e_2, e_3, e_4)``:

.. math::

    h(t) = \sum_k C_k t^k,

with exact rational entries.  On the flat background every operator is a
t-derivative: ``D*D = -d^2/dt^2``, ``Delta = d^2/dt^2`` and the Hessian of a
function of ``t`` alone only has an ``(1, 1)`` entry.  With ``f = tr h`` the
Bianchi gauge reads ``h_11' = f'/2`` and ``h_1i' = 0``, and the linearized
Bach equation becomes

.. math::

    h'''' = \tfrac13 f'''' e_1 \otimes e_1 + \tfrac16 f'''' g_F .

Everything here is exact; "zero" means the zero polynomial.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np
import sympy

from .errors import DomainError, GaugeInconsistencyError

__all__ = [
    "InvariantForm",
    "Polynomial",
    "gauge_check",
    "linearized_operators",
    "bach_residual",
    "general_solution",
    "random_admissible_blocks",
    "kernel_dimensions",
    "parameter_count",
    "check_polynomials",
    "MAX_DEGREE",
]

MAX_DEGREE = 8
DIM = 4


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, sympy.Rational):
        return Fraction(int(x.p), int(x.q))
    return Fraction(float(x))


@dataclass(frozen=True)
class Polynomial:
    """Scalar polynomial in t with Fraction coefficients, lowest degree first."""

    coeffs: tuple = ()

    def __post_init__(self):
        c = [_frac(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def is_zero(self):
        return not self.coeffs

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial((other,))
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(tuple(self[k] + other[k] for k in range(n)))

    def __neg__(self):
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a):
        a = _frac(a)
        return Polynomial(tuple(a * c for c in self.coeffs))

    def deriv(self, times=1):
        c = list(self.coeffs)
        for _ in range(times):
            c = [k * c[k] for k in range(1, len(c))]
        return Polynomial(tuple(c))

    def divide_by_t(self):
        if self[0] != 0:
            raise GaugeInconsistencyError("polynomial is not divisible by t")
        return Polynomial(self.coeffs[1:])

    def __str__(self):
        if self.is_zero:
            return "0"
        return " + ".join(f"({c})t^{k}" for k, c in enumerate(self.coeffs) if c)


@dataclass(frozen=True)
class InvariantForm:
    """Symmetric 4x4 matrix polynomial ``sum_k coeffs[k] t^k`` (Fractions)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=object)
        if c.ndim == 2:
            c = c[None]
        if c.ndim != 3 or c.shape[1:] != (DIM, DIM):
            raise DomainError("coefficients must have shape (degree + 1, 4, 4)")
        c = np.vectorize(_frac, otypes=[object])(c)
        deg = max((k for k in range(len(c)) if np.any(c[k] != 0)), default=0)
        c = c[: deg + 1]
        if deg > MAX_DEGREE:
            raise DomainError(f"degree {deg} exceeds the cap {MAX_DEGREE}")
        if np.any(c != np.transpose(c, (0, 2, 1))):
            raise DomainError("component matrix must be symmetric")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls):
        return cls(_zeros(1))

    @classmethod
    def monomial(cls, matrix, power):
        c = _zeros(power + 1)
        c[power] = np.vectorize(_frac, otypes=[object])(np.asarray(matrix, dtype=object))
        return cls(c)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_zero(self):
        return bool(np.all(self.coeffs == 0))

    def entry(self, i, j):
        return Polynomial(tuple(self.coeffs[:, i, j]))

    def trace(self):
        return Polynomial(tuple(sum(self.coeffs[k, i, i] for i in range(DIM))
                                for k in range(len(self.coeffs))))

    def deriv(self, times=1):
        c = self.coeffs
        for _ in range(times):
            if len(c) <= 1:
                return InvariantForm.zero()
            c = np.array([k * c[k] for k in range(1, len(c))], dtype=object)
        return InvariantForm(c)

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return InvariantForm(_pad(self.coeffs, n) + _pad(other.coeffs, n))

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return InvariantForm(_pad(self.coeffs, n) - _pad(other.coeffs, n))

    def scale(self, a):
        return InvariantForm(self.coeffs * _frac(a))

    def to_sympy(self, t=None):
        t = t or sympy.Symbol("t")
        return sympy.Matrix(DIM, DIM, lambda i, j: sum(
            sympy.Rational(c.numerator, c.denominator) * t ** k
            for k, c in enumerate(self.coeffs[:, i, j])))


def _zeros(n):
    c = np.empty((n, DIM, DIM), dtype=object)
    c[...] = Fraction(0)
    return c


def _pad(c, n):
    out = _zeros(n)
    out[: len(c)] = c
    return out


def _times_tensor(p, matrix):
    """Form p(t) * matrix for a scalar polynomial p."""
    m = np.asarray(matrix, dtype=object)
    c = _zeros(max(len(p.coeffs), 1))
    for k, a in enumerate(p.coeffs):
        c[k] = m * a
    return InvariantForm(c)


_E11 = np.array([[Fraction(int(i == j == 0)) for j in range(DIM)] for i in range(DIM)],
                dtype=object)
_ID = np.array([[Fraction(int(i == j)) for j in range(DIM)] for i in range(DIM)],
               dtype=object)


def gauge_check(h):
    """Residuals of the Bianchi gauge: [h_11' - f'/2, h_12', h_13', h_14']."""
    f = h.trace()
    out = [h.entry(0, 0).deriv() - f.deriv().scale(Fraction(1, 2))]
    out += [h.entry(0, i).deriv() for i in range(1, DIM)]
    return out


def _gauge_holds(h):
    return all(r.is_zero for r in gauge_check(h))


def linearized_operators(h):
    """Linearized Ricci form and scalar curvature at the flat background.

    The scalar linearization is computed as ``-f''/2`` and, separately, from
    the variation of the defining function as ``-(3/2) f'/t``; the two must
    agree as polynomials.
    """
    if not _gauge_holds(h):
        raise GaugeInconsistencyError("form is not in Bianchi gauge")
    ric = h.deriv(2).scale(Fraction(-1, 2))
    f = h.trace()
    s_laplace = f.deriv(2).scale(Fraction(-1, 2))
    s_defining = f.deriv().divide_by_t().scale(Fraction(-3, 2))
    if s_laplace != s_defining:
        raise GaugeInconsistencyError(
            f"scalar linearizations disagree: {s_laplace} vs {s_defining}")
    return ric, s_laplace


def bach_residual(h):
    """h'''' - (1/3) f'''' e11 - (1/6) f'''' Id, with f = tr h (exact)."""
    f4 = h.trace().deriv(4)
    rhs = _times_tensor(f4, _E11 * Fraction(1, 3) + _ID * Fraction(1, 6))
    return h.deriv(4) - rhs


# -- the quartic family -----------------------------------------------------

def _as_matrix(m, name):
    a = np.vectorize(_frac, otypes=[object])(np.asarray(m, dtype=object))
    if a.shape != (DIM, DIM):
        raise DomainError(f"{name} must be 4x4")
    if np.any(a != a.T):
        raise DomainError(f"{name} must be symmetric")
    return a


def _trace(a):
    return sum(a[i, i] for i in range(DIM))


def general_solution(c0=0, c1=0, C2=None, C3=None, A0=None, A1=None):
    """Assemble A0 + (c1/4) Id + A1 t + C2 t^2 + C3 t^3 + (c0/24) diag(3,1,1,1) t^4.

    A0 is traceless symmetric; A1, C2, C3 are traceless with vanishing
    first row (the gauge then holds at every order).
    """
    zero = np.zeros((DIM, DIM), dtype=int)
    A0 = _as_matrix(zero if A0 is None else A0, "A0")
    blocks = {"A1": A1, "C2": C2, "C3": C3}
    mats = {}
    if _trace(A0) != 0:
        raise DomainError("A0 must be traceless (the constant trace is c1)")
    for name, m in blocks.items():
        a = _as_matrix(zero if m is None else m, name)
        if _trace(a) != 0:
            raise DomainError(f"{name} must be traceless")
        if any(a[0, j] != 0 for j in range(DIM)):
            raise DomainError(f"{name} must have vanishing e1 row (gauge)")
        mats[name] = a
    quartic = np.diag([Fraction(3), Fraction(1), Fraction(1), Fraction(1)]).astype(object)
    c = _zeros(5)
    c[0] = A0 + _ID * (_frac(c1) / 4)
    c[1] = mats["A1"]
    c[2] = mats["C2"]
    c[3] = mats["C3"]
    c[4] = quartic * (_frac(c0) / 24)
    return InvariantForm(c)


def random_admissible_blocks(rng, bound=9):
    """Seeded admissible inputs for ``general_solution`` with small rational entries."""

    def entry():
        return Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1)))

    def sym(block_start):
        a = _zeros(1)[0]
        for i, j in combinations_with_replacement(range(block_start, DIM), 2):
            a[i, j] = a[j, i] = entry()
        a[DIM - 1, DIM - 1] -= _trace(a)
        return a

    return {"c0": entry(), "c1": entry(), "A0": sym(0), "A1": sym(1), "C2": sym(1),
            "C3": sym(1)}


def parameter_count():
    """Free parameters of ``general_solution``: A0 (9) + c1 + 3 x 5 + c0."""
    traceless4 = DIM * (DIM + 1) // 2 - 1
    traceless3 = (DIM - 1) * DIM // 2 - 1
    return traceless4 + 1 + 3 * traceless3 + 1


def _basis_forms(max_degree):
    pairs = list(combinations_with_replacement(range(DIM), 2))
    out = []
    for k in range(max_degree + 1):
        for i, j in pairs:
            m = _zeros(1)[0]
            m[i, j] = m[j, i] = Fraction(1)
            out.append(InvariantForm.monomial(m, k))
    return out


def _linear_rows(h, max_degree, with_scalar):
    """Coefficient rows of the linear conditions on h, as a flat list."""
    rows = []
    res = bach_residual(h)
    rows += list(_pad(res.coeffs, max_degree + 1).reshape(-1))
    for r in gauge_check(h):
        rows += [r[k] for k in range(max_degree + 1)]
    if with_scalar:
        f = h.trace()
        # -f''/2 + (3/2) f'/t, multiplied by t
        lap = f.deriv(2).scale(Fraction(-1, 2))
        tlap = Polynomial((0,) + lap.coeffs)
        defin = f.deriv().scale(Fraction(-3, 2))
        diff = tlap - defin
        rows += [diff[k] for k in range(max_degree + 2)]
    return rows


def kernel_dimensions(max_degree=4):
    """Brute-force kernel of the linear conditions on the monomial basis.

    Returns the kernel dimension of (Bach + gauge) and of (Bach + gauge +
    agreement of the two scalar linearizations).
    """
    basis = _basis_forms(max_degree)
    out = {}
    for label, scalar in (("bach_gauge", False), ("bach_gauge_scalar", True)):
        cols = [_linear_rows(b, max_degree, scalar) for b in basis]
        M = sympy.Matrix(len(cols[0]), len(cols),
                         lambda r, c: sympy.Rational(cols[c][r].numerator,
                                                     cols[c][r].denominator))
        out[label] = len(basis) - M.rank()
    out["unknowns"] = len(basis)
    return out


def check_polynomials(seed=0, draws=100):
    """Pass/fail report on the quartic family, degree-five forms and kernel sizes."""
    rng = np.random.default_rng(seed)
    family_ok = True
    for _ in range(draws):
        h = general_solution(**random_admissible_blocks(rng))
        ok = bach_residual(h).is_zero and _gauge_holds(h)
        linearized_operators(h)
        family_ok &= ok
    generic = InvariantForm.monomial(
        [[1, 2, 0, 1], [2, -1, 3, 0], [0, 3, 5, 1], [1, 0, 1, 2]], 5)
    special = InvariantForm.monomial(np.diag([3, 1, 1, 1]), 5)
    special_scalar_ok = True
    try:
        linearized_operators(special)
    except GaugeInconsistencyError:
        special_scalar_ok = False
    kernels = kernel_dimensions(4)
    kernels5 = kernel_dimensions(5)
    checks = {
        "quartic_family_residual_zero": family_ok,
        "degree5_generic_residual_nonzero": not bach_residual(generic).is_zero,
        "degree5_quartic_profile_rejected_by_scalar": not special_scalar_ok,
        "kernel_matches_parameters": kernels["bach_gauge_scalar"] == parameter_count(),
        "no_degree5_kernel": kernels5["bach_gauge_scalar"] == kernels["bach_gauge_scalar"],
    }
    return {"passed": all(checks.values()), "checks": checks, "draws": draws, "seed": seed,
            "kernel_dimension": kernels, "kernel_dimension_degree5": kernels5,
            "parameter_count": parameter_count(),
            "degree5_quartic_profile_bach_residual_zero": bach_residual(special).is_zero}

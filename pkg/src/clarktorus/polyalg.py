"""Bivariate polynomial arithmetic over Gaussian rationals and complex floats.

Exact coefficients are pairs of ``fractions.Fraction`` (real and imaginary
part); the float layer uses IEEE complex doubles.  Exact polynomials convert
to float polynomials, never the other way around.
"""

from __future__ import annotations

import cmath
from fractions import Fraction

import numpy as np

from . import kernels


class PolynomialError(ValueError):
    """Invalid argument to a polynomial operation."""


class GaussianRational:
    """Exact complex number a + b*i with rational a, b."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def coerce(x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussianRational(x)
        raise PolynomialError(f"cannot coerce {x!r} to a Gaussian rational")

    def __add__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussianRational.coerce(other)
        n = other.abs2()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GaussianRational(other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(self.re, self.im)

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        im = "i" if abs(self.im) == 1 else f"{abs(self.im)}i"
        if self.re == 0:
            return im if self.im > 0 else f"-{im}"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{im}"


GR_ZERO = GaussianRational(0)
GR_ONE = GaussianRational(1)
GR_I = GaussianRational(0, 1)

#: unimodular parameters with exact Gaussian-rational representation
EXACT_UNIMODULAR = {1: GR_ONE, -1: -GR_ONE, 1j: GR_I, -1j: -GR_I}


def as_exact_unimodular(alpha):
    """Return alpha as an exact unimodular GaussianRational, or None."""
    if isinstance(alpha, GaussianRational):
        return alpha if alpha.abs2() == 1 else None
    if isinstance(alpha, (int, Fraction)):
        g = GaussianRational(alpha)
        return g if g.abs2() == 1 else None
    if isinstance(alpha, complex):
        for key, g in EXACT_UNIMODULAR.items():
            if alpha == key:
                return g
    return None


def _coerce_coeff(c):
    if isinstance(c, GaussianRational):
        return c
    if isinstance(c, (int, Fraction)):
        return GaussianRational(c)
    if isinstance(c, (float, complex)):
        return complex(c)
    raise PolynomialError(f"unsupported coefficient {c!r}")


def _nonzero(c) -> bool:
    return bool(c) if _is_exact(c) else c != 0


def _conj(c):
    return c.conjugate()


def _is_exact(c):
    return isinstance(c, GaussianRational)


class Poly2:
    """Bivariate polynomial with a declared bidegree.

    ``coeffs`` maps exponent pairs (j, k) to nonzero coefficients; the
    declared bidegree bounds the stored exponents but may exceed the actual
    degree (this matters for the reflection operation).
    """

    __slots__ = ("coeffs", "deg", "exact")

    def __init__(self, coeffs, deg=None):
        clean = {}
        exact = True
        for (j, k), c in coeffs.items():
            c = _coerce_coeff(c)
            if j < 0 or k < 0:
                raise PolynomialError("negative exponent")
            if not _is_exact(c):
                exact = False
            if _nonzero(c):
                clean[(j, k)] = c
        if not exact:
            clean = {e: complex(c) for e, c in clean.items() if complex(c) != 0}
        d1 = max((j for j, _ in clean), default=0)
        d2 = max((k for _, k in clean), default=0)
        if deg is None:
            deg = (d1, d2)
        if d1 > deg[0] or d2 > deg[1]:
            raise PolynomialError(
                f"declared bidegree {deg} below actual ({d1}, {d2})"
            )
        self.coeffs = clean
        self.deg = (int(deg[0]), int(deg[1]))
        self.exact = exact

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(deg=(0, 0)) -> "Poly2":
        return Poly2({}, deg)

    @staticmethod
    def constant(c, deg=(0, 0)) -> "Poly2":
        return Poly2({(0, 0): c}, deg)

    @staticmethod
    def monomial(j, k, c=1) -> "Poly2":
        return Poly2({(j, k): c})

    # -- basic structure ---------------------------------------------------

    def actual_degree(self):
        d1 = max((j for j, _ in self.coeffs), default=0)
        d2 = max((k for _, k in self.coeffs), default=0)
        return (d1, d2)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, j, k):
        c = self.coeffs.get((j, k))
        if c is None:
            return GR_ZERO if self.exact else 0j
        return c

    def with_degree(self, deg) -> "Poly2":
        return Poly2(self.coeffs, deg)

    def to_float(self) -> "Poly2":
        return Poly2({e: complex(c) for e, c in self.coeffs.items()}, self.deg)

    def coeff_matrix(self) -> np.ndarray:
        """Dense complex matrix C with C[j, k] the coefficient of z1^j z2^k."""
        d1, d2 = self.actual_degree()
        mat = np.zeros((d1 + 1, d2 + 1), dtype=np.complex128)
        for (j, k), c in self.coeffs.items():
            mat[j, k] = complex(c)
        return mat

    # -- ring operations ---------------------------------------------------

    def _binop(self, other, op):
        if isinstance(other, (int, Fraction, GaussianRational, float, complex)):
            other = Poly2.constant(other)
        if self.exact and not other.exact:
            return self.to_float()._binop(other, op)
        if other.exact and not self.exact:
            other = other.to_float()
        out = dict(self.coeffs)
        zero = GR_ZERO if self.exact and other.exact else 0j
        for e, c in other.coeffs.items():
            out[e] = op(out.get(e, zero), c)
        deg = (max(self.deg[0], other.deg[0]), max(self.deg[1], other.deg[1]))
        return Poly2(out, deg)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Poly2({e: -c for e, c in self.coeffs.items()}, self.deg)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, float, complex)):
            c = _coerce_coeff(other)
            if not _is_exact(c) and self.exact:
                return self.to_float() * c
            if _is_exact(c) and not self.exact:
                c = complex(c)
            return Poly2({e: v * c for e, v in self.coeffs.items()}, self.deg)
        if self.exact and not other.exact:
            return self.to_float() * other
        if other.exact and not self.exact:
            other = other.to_float()
        out = {}
        zero = GR_ZERO if self.exact else 0j
        for (j1, k1), c1 in self.coeffs.items():
            for (j2, k2), c2 in other.coeffs.items():
                e = (j1 + j2, k1 + k2)
                out[e] = out.get(e, zero) + c1 * c2
        deg = (self.deg[0] + other.deg[0], self.deg[1] + other.deg[1])
        return Poly2(out, deg)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Poly2):
            return NotImplemented
        if self.exact != other.exact:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    # -- evaluation and calculus -------------------------------------------

    def __call__(self, z1, z2):
        return self.evaluate(z1, z2)

    def evaluate(self, z1, z2):
        """Horner evaluation; exact when self and both points are exact."""
        z1 = _coerce_coeff(z1)
        z2 = _coerce_coeff(z2)
        exact = self.exact and _is_exact(z1) and _is_exact(z2)
        zero = GR_ZERO if exact else 0j
        if not exact:
            z1 = complex(z1)
            z2 = complex(z2)
        d1, d2 = self.actual_degree()
        acc = zero
        for j in range(d1, -1, -1):
            row = zero
            for k in range(d2, -1, -1):
                c = self.coeffs.get((j, k))
                if c is None:
                    row = row * z2
                else:
                    row = row * z2 + (c if exact else complex(c))
            acc = acc * z1 + row
        return acc

    def evaluate_many(self, z1, z2) -> np.ndarray:
        """Float evaluation at paired sample arrays."""
        z1 = np.ascontiguousarray(z1, dtype=np.complex128)
        z2 = np.ascontiguousarray(z2, dtype=np.complex128)
        return kernels.poly2_eval(self.coeff_matrix(), z1.ravel(), z2.ravel()).reshape(z1.shape)

    def derivative(self, axis) -> "Poly2":
        ax = _axis_index(axis)
        out = {}
        for (j, k), c in self.coeffs.items():
            e = (j, k)[ax]
            if e == 0:
                continue
            ne = (j - 1, k) if ax == 0 else (j, k - 1)
            out[ne] = c * e
        deg = (max(self.deg[0] - 1, 0), self.deg[1]) if ax == 0 else (self.deg[0], max(self.deg[1] - 1, 0))
        return Poly2(out, deg)

    def slice(self, axis, a) -> "Poly1":
        """Fix the chosen variable to ``a``; univariate result in the other."""
        ax = _axis_index(axis)
        a = _coerce_coeff(a)
        exact = self.exact and _is_exact(a)
        n = self.actual_degree()[1 - ax]
        zero = GR_ZERO if exact else 0j
        out = [zero] * (n + 1)
        if not exact:
            a = complex(a)
        for (j, k), c in self.coeffs.items():
            fixed, free = (j, k) if ax == 0 else (k, j)
            term = c if exact else complex(c)
            if not exact:
                term = term * a**fixed
            else:
                for _ in range(fixed):
                    term = term * a
            out[free] = out[free] + term
        return Poly1(out)

    def slice_coeff_polys(self, axis) -> list["Poly1"]:
        """Coefficient polynomials in ``axis`` of each power of the other variable."""
        ax = _axis_index(axis)
        n = self.actual_degree()[1 - ax]
        cols = [dict() for _ in range(n + 1)]
        for (j, k), c in self.coeffs.items():
            fixed, free = (j, k) if ax == 0 else (k, j)
            cols[free][fixed] = c
        zero = GR_ZERO if self.exact else 0j
        out = []
        for col in cols:
            m = max(col, default=0)
            out.append(Poly1([col.get(i, zero) for i in range(m + 1)]))
        return out

    def coordinate_content(self, axis) -> "Poly1":
        """Monic gcd, in the ``axis`` variable, of the coefficient polynomials.

        Its roots are exactly the values a with (z_axis - a) dividing self.
        """
        if self.is_zero():
            raise PolynomialError("coordinate content of the zero polynomial")
        cols = self.slice_coeff_polys(axis)
        cols = [c for c in cols if not c.is_zero()]
        if self.exact:
            g = cols[0]
            for c in cols[1:]:
                g = g.gcd(c)
            return g.monic()
        return _float_content(cols)

    def divide_out_linear(self, axis, a) -> "Poly2":
        """Exact division by (z_axis - a); raises unless the remainder vanishes."""
        ax = _axis_index(axis)
        a = _coerce_coeff(a)
        exact = self.exact and _is_exact(a)
        cols = self.slice_coeff_polys(axis)  # cols[m]: coefficient of other^m, poly in axis var
        if not exact:
            a = complex(a)
            cols = [c.to_float() for c in cols]
        quots = []
        for c in cols:
            q, r = c.deflate(a)
            if exact:
                if not r.is_zero_value():
                    raise PolynomialError(f"(z{ax+1} - {a}) does not divide the polynomial")
            else:
                scale = max(c.max_abs(), 1.0)
                if abs(complex(r.value())) > 1e-9 * scale:
                    raise PolynomialError(f"(z{ax+1} - {a}) does not divide the polynomial")
            quots.append(q)
        out = {}
        for m, q in enumerate(quots):
            for i, c in enumerate(q.coeffs):
                if _nonzero(c):
                    e = (i, m) if ax == 0 else (m, i)
                    out[e] = c
        d1 = max(self.deg[0] - (1 if ax == 0 else 0), 0)
        d2 = max(self.deg[1] - (1 if ax == 1 else 0), 0)
        return Poly2(out, (d1, d2))

    # -- printing ---------------------------------------------------------

    def __str__(self):
        return poly_to_str(self)

    def __repr__(self):
        return f"Poly2({poly_to_str(self)!r}, deg={self.deg})"


def _axis_index(axis) -> int:
    if axis in (0, "first", "z1"):
        return 0
    if axis in (1, "second", "z2"):
        return 1
    raise PolynomialError(f"axis must be 'first' or 'second', got {axis!r}")


class Poly1:
    """Univariate polynomial, coefficients low to high."""

    __slots__ = ("coeffs", "exact")

    def __init__(self, coeffs):
        coeffs = [_coerce_coeff(c) for c in coeffs]
        exact = all(_is_exact(c) for c in coeffs)
        if not exact:
            coeffs = [complex(c) for c in coeffs]
        while len(coeffs) > 1 and not (bool(coeffs[-1]) if exact else coeffs[-1] != 0):
            coeffs.pop()
        if not coeffs:
            coeffs = [GR_ZERO if exact else 0j]
        self.coeffs = coeffs
        self.exact = exact

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and not (
            bool(self.coeffs[0]) if self.exact else self.coeffs[0] != 0
        )

    def is_zero_value(self) -> bool:
        return self.is_zero()

    def value(self):
        if self.degree() != 0:
            raise PolynomialError("not a constant polynomial")
        return self.coeffs[0]

    def to_float(self) -> "Poly1":
        return Poly1([complex(c) for c in self.coeffs])

    def max_abs(self) -> float:
        return max(abs(complex(c)) for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Poly1):
            return NotImplemented
        return self.exact == other.exact and self.coeffs == other.coeffs

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + [GR_ZERO if self.exact else 0j] * (n - len(self.coeffs))
        b = other.coeffs + [GR_ZERO if other.exact else 0j] * (n - len(other.coeffs))
        return Poly1([x + y for x, y in zip(a, b)])

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Poly1([-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, float, complex)):
            return Poly1([c * _coerce_coeff(other) for c in self.coeffs])
        out = [GR_ZERO if (self.exact and other.exact) else 0j] * (
            len(self.coeffs) + len(other.coeffs) - 1
        )
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly1(out)

    __rmul__ = __mul__

    def __call__(self, x):
        acc = self.coeffs[-1]
        if not (self.exact and _is_exact(x)):
            acc = complex(acc)
            x = complex(x)
            for c in reversed(self.coeffs[:-1]):
                acc = acc * x + complex(c)
            return acc
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Poly1":
        if self.degree() == 0:
            return Poly1([GR_ZERO if self.exact else 0j])
        return Poly1([c * i for i, c in enumerate(self.coeffs)][1:])

    def divmod(self, other):
        """Euclidean division over the coefficient field, exact where possible."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.exact and other.exact:
            a = list(self.coeffs)
            b = list(other.coeffs)
        else:
            a = [complex(c) for c in self.coeffs]
            b = [complex(c) for c in other.coeffs]
        q = [GR_ZERO if (self.exact and other.exact) else 0j] * max(
            len(a) - len(b) + 1, 1
        )
        r = a
        db = len(b) - 1
        lead = b[-1]
        while len(r) - 1 >= db and not _all_zero(r):
            k = len(r) - 1 - db
            c = r[-1] / lead
            q[k] = c
            for i in range(len(b)):
                r[k + i] = r[k + i] - c * b[i]
            r.pop()
            while len(r) > 1 and not _nonzero(r[-1]):
                r.pop()
        return Poly1(q), Poly1(r)

    def gcd(self, other) -> "Poly1":
        """Exact euclidean gcd (monic up to normalization by caller)."""
        a, b = self, other
        while not b.is_zero():
            _, r = a.divmod(b)
            a, b = b, r
        return a

    def monic(self) -> "Poly1":
        if self.is_zero():
            return self
        lead = self.coeffs[-1]
        return Poly1([c / lead for c in self.coeffs])

    def deflate(self, a):
        """Synthetic division by (x - a): returns (quotient, remainder constant)."""
        exact = self.exact and _is_exact(a)
        coeffs = self.coeffs if exact else [complex(c) for c in self.coeffs]
        if not exact:
            a = complex(a)
        out = []
        acc = coeffs[-1]
        for c in reversed(coeffs[:-1]):
            out.append(acc)
            acc = acc * a + c
        out.reverse()
        if not out:
            out = [GR_ZERO if exact else 0j]
        return Poly1(out), Poly1([acc])

    def roots(self) -> list[complex]:
        return poly1_roots(self)

    def __repr__(self):
        return f"Poly1({self.coeffs!r})"


def _all_zero(coeffs) -> bool:
    return all(not bool(c) if _is_exact(c) else c == 0 for c in coeffs)


def _float_content(cols: list[Poly1], tol: float = 1e-8) -> Poly1:
    """Approximate content gcd of float coefficient polynomials via common roots."""
    cols = sorted((c.to_float() for c in cols), key=lambda c: c.degree())
    base = cols[0]
    if base.degree() == 0:
        return Poly1([1.0 + 0j])
    common = []
    for r in poly1_roots(base):
        scale = max(base.max_abs(), 1.0)
        if all(abs(c(r)) <= tol * max(c.max_abs(), 1.0) for c in cols[1:]):
            if abs(base(r)) <= tol * scale:
                common.append(r)
    out = Poly1([1.0 + 0j])
    for r in common:
        out = out * Poly1([-r, 1.0])
    return out


def poly1_roots(q: Poly1) -> list[complex]:
    """All complex roots with multiplicity, companion matrix plus Newton polish."""
    if q.is_zero():
        raise PolynomialError("roots of the zero polynomial")
    c = np.array([complex(v) for v in q.coeffs], dtype=np.complex128)
    n = len(c) - 1
    if n == 0:
        return []
    scale = np.abs(c).max()
    if n == 1:
        roots = np.array([-c[0] / c[1]])
    else:
        comp = np.zeros((n, n), dtype=np.complex128)
        comp[1:, :-1] = np.eye(n - 1)
        comp[:, -1] = -c[:-1] / c[-1]
        roots = np.linalg.eigvals(comp)
    dq = q.to_float().derivative()
    qf = q.to_float()
    polished = []
    for r in roots:
        d = complex(dq(r))
        if d != 0:
            step = complex(qf(r)) / d
            if abs(step) < 0.1 * (1 + abs(r)):
                r = r - step
        polished.append(complex(r))
    return polished


def reflect(p: Poly2, deg=None) -> Poly2:
    """Reflection z1^d1 z2^d2 conj(p(1/conj(z1), 1/conj(z2))) at bidegree deg."""
    if deg is None:
        deg = p.deg
    d1, d2 = deg
    a1, a2 = p.actual_degree()
    if d1 < a1 or d2 < a2:
        raise PolynomialError(f"reflection bidegree {deg} below actual degree {(a1, a2)}")
    out = {(d1 - j, d2 - k): _conj(c) for (j, k), c in p.coeffs.items()}
    return Poly2(out, (d1, d2))


def evaluate(p: Poly2, z) -> complex:
    return p.evaluate(z[0], z[1])


def slice_poly(p: Poly2, axis, a) -> Poly1:
    return p.slice(axis, a)


def coordinate_content(p: Poly2, axis) -> Poly1:
    return p.coordinate_content(axis)


def divide_out_linear(p: Poly2, axis, a) -> Poly2:
    return p.divide_out_linear(axis, a)


def proportional_scalar(r: Poly2, s: Poly2):
    """Return c with r == c*s as an exact identity, else None.

    Both polynomials must be exact; raises on s == 0.
    """
    if s.is_zero():
        raise PolynomialError("proportionality against the zero polynomial")
    if r.is_zero():
        return GR_ZERO
    if not (r.exact and s.exact):
        raise PolynomialError("proportionality test requires exact coefficients")
    e, cs = next(iter(s.coeffs.items()))
    cr = r.coeffs.get(e)
    if cr is None:
        return None
    c = cr / cs
    if set(r.coeffs) != set(s.coeffs):
        return None
    for e, v in s.coeffs.items():
        if r.coeffs[e] != c * v:
            return None
    return c


# ---------------------------------------------------------------------------
# text grammar: terms over z1, z2 with exact rational / Gaussian-rational
# coefficients, operators + - * ^ and parentheses, e.g. "2 - z1*z2 - z1^2*z2"
# ---------------------------------------------------------------------------


class ParseError(ValueError):
    """Syntax error with source position for caret diagnostics."""

    def __init__(self, message, text, pos):
        self.message = message
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}")

    def caret(self) -> str:
        return f"{self.text}\n{' ' * self.pos}^ {self.message}"


class _Lexer:
    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.tokens = []
        self._scan()
        self.idx = 0

    def _scan(self):
        t = self.text
        i = 0
        while i < len(t):
            ch = t[i]
            if ch.isspace():
                i += 1
                continue
            if ch in "+-*^()":
                self.tokens.append((ch, ch, i))
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < len(t) and t[j].isdigit():
                    j += 1
                num = Fraction(t[i:j])
                if j < len(t) and t[j] == "/" and j + 1 < len(t) and t[j + 1].isdigit():
                    k = j + 1
                    while k < len(t) and t[k].isdigit():
                        k += 1
                    num = num / Fraction(t[j + 1 : k])
                    j = k
                if j < len(t) and t[j] == "i":
                    self.tokens.append(("num", GaussianRational(0, num), i))
                    j += 1
                else:
                    self.tokens.append(("num", GaussianRational(num), i))
                i = j
                continue
            if t.startswith("z1", i) or t.startswith("z2", i):
                self.tokens.append(("var", t[i : i + 2], i))
                i += 2
                continue
            if ch == "i":
                self.tokens.append(("num", GR_I, i))
                i += 1
                continue
            raise ParseError(f"unexpected character {ch!r}", t, i)
        self.tokens.append(("end", None, len(t)))

    def peek(self):
        return self.tokens[self.idx]

    def next(self):
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok


class _Parser:
    """Recursive descent over: expr := term (('+'|'-') term)*
    term := unary ('*' unary)* ; unary := '-' unary | power
    power := atom ('^' INT)? ; atom := NUM | VAR | '(' expr ')'
    """

    def __init__(self, text):
        self.lex = _Lexer(text)
        self.text = text

    def parse(self) -> Poly2:
        p = self.expr()
        kind, _, pos = self.lex.peek()
        if kind != "end":
            raise ParseError("trailing input", self.text, pos)
        return p

    def expr(self) -> Poly2:
        p = self.term()
        while True:
            kind, _, _ = self.lex.peek()
            if kind == "+":
                self.lex.next()
                p = p + self.term()
            elif kind == "-":
                self.lex.next()
                p = p - self.term()
            else:
                return p

    def term(self) -> Poly2:
        p = self.unary()
        while self.lex.peek()[0] == "*":
            self.lex.next()
            p = p * self.unary()
        return p

    def unary(self) -> Poly2:
        if self.lex.peek()[0] == "-":
            self.lex.next()
            return -self.unary()
        return self.power()

    def power(self) -> Poly2:
        p = self.atom()
        if self.lex.peek()[0] == "^":
            self.lex.next()
            kind, val, pos = self.lex.next()
            if kind != "num" or not isinstance(val, GaussianRational) or val.im != 0 or val.re.denominator != 1 or val.re < 0:
                raise ParseError("exponent must be a nonnegative integer", self.text, pos)
            n = int(val.re)
            out = Poly2.constant(GR_ONE)
            for _ in range(n):
                out = out * p
            return out
        return p

    def atom(self) -> Poly2:
        kind, val, pos = self.lex.next()
        if kind == "num":
            return Poly2.constant(val)
        if kind == "var":
            return Poly2.monomial(1, 0) if val == "z1" else Poly2.monomial(0, 1)
        if kind == "(":
            p = self.expr()
            kind, _, pos = self.lex.next()
            if kind != ")":
                raise ParseError("expected ')'", self.text, pos)
            return p
        raise ParseError("expected a number, variable, or '('", self.text, pos)


def parse_poly(text: str) -> Poly2:
    """Parse the polynomial grammar into an exact Poly2."""
    return _Parser(text).parse()


def poly_to_str(p: Poly2) -> str:
    """Canonical text form; exact polynomials round-trip through parse_poly."""
    if p.is_zero():
        return "0"
    terms = sorted(p.coeffs.items(), key=lambda it: (-(it[0][0] + it[0][1]), -it[0][0]))
    parts = []
    for (j, k), c in terms:
        mono = "*".join(
            ([f"z1^{j}"] if j > 1 else ["z1"] if j == 1 else [])
            + ([f"z2^{k}"] if k > 1 else ["z2"] if k == 1 else [])
        )
        if _is_exact(c):
            neg = c.im == 0 and c.re < 0 or (c.re == 0 and c.im < 0)
            mag = -c if neg else c
            body = str(mag)
            if "+" in body or "-" in body:
                body = f"({body})"
            if mono and body == "1":
                body = mono
            elif mono:
                body = f"{body}*{mono}"
        else:
            neg = False
            body = repr(c) if mono == "" else f"{c!r}*{mono}"
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f" - {body}" if neg else f" + {body}")
    return "".join(parts)

"""Rational inner functions p~/p on the bidisc: validation and boundary values."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .polyalg import Poly1, Poly2, PolynomialError, poly1_roots, reflect

STABILITY_TOL = 1e-8
SINGULARITY_CLUSTER_RADIUS = 1e-6


class UnstableDenominatorError(ValueError):
    """Denominator has a zero inside the open bidisc."""

    def __init__(self, witness, message=None):
        self.witness = witness
        super().__init__(message or f"denominator vanishes near z = {witness}")


class SingularPointError(ValueError):
    """Boundary evaluation at a torus zero of the denominator."""

    def __init__(self, point):
        self.point = point
        super().__init__(f"denominator vanishes at boundary point {point}")


@dataclass(frozen=True)
class StabilityReport:
    grid_n: int
    min_root_modulus: float
    checked_slices: int


@dataclass(frozen=True)
class RationalInnerFunction:
    """Validated pair (p, p~) with declared bidegree; phi = p~/p."""

    p: Poly2
    ptilde: Poly2
    deg: tuple[int, int]
    stability_report: StabilityReport
    _pmat: np.ndarray = field(repr=False, compare=False, default=None)
    _ptmat: np.ndarray = field(repr=False, compare=False, default=None)

    def eval(self, z1, z2) -> complex:
        return complex(self.ptilde.evaluate(z1, z2)) / complex(self.p.evaluate(z1, z2))

    __call__ = eval

    def boundary_eval(self, zeta1, zeta2) -> complex:
        pz = complex(self.p.evaluate(zeta1, zeta2))
        scale = max(sum(abs(complex(c)) for c in self.p.coeffs.values()), 1.0)
        if abs(pz) <= 1e-12 * scale:
            raise SingularPointError((zeta1, zeta2))
        return complex(self.ptilde.evaluate(zeta1, zeta2)) / pz

    def eval_many(self, z1, z2) -> np.ndarray:
        num = _eval_mat(self._ptmat, z1, z2)
        den = _eval_mat(self._pmat, z1, z2)
        return num / den


def _eval_mat(mat, z1, z2):
    from . import kernels

    z1 = np.ascontiguousarray(z1, dtype=np.complex128)
    z2 = np.ascontiguousarray(z2, dtype=np.complex128)
    return kernels.poly2_eval(mat, z1.ravel(), z2.ravel()).reshape(z1.shape)


def build(p: Poly2, deg, grid_n: int = 64) -> RationalInnerFunction:
    """Validate stability of p on the closed bidisc and attach its reflection.

    The check is a grid heuristic: for grid_n^2 points z1 with radii k/grid_n
    and uniform angles, every root of the z2-slice of p must have modulus at
    least 1 - 1e-8.  The minimal modulus seen is recorded.
    """
    if p.is_zero():
        raise PolynomialError("p must be nonzero")
    deg = (int(deg[0]), int(deg[1]))
    a1, a2 = p.actual_degree()
    if deg[0] < a1 or deg[1] < a2:
        raise PolynomialError(f"declared bidegree {deg} below actual ({a1}, {a2})")
    if abs(complex(p.evaluate(0, 0))) == 0:
        raise PolynomialError("p(0,0) must be nonzero")

    min_mod, witness, checked = _stability_scan(p, grid_n)
    if witness is not None:
        raise UnstableDenominatorError(witness)

    pf = p.with_degree(deg)
    pt = reflect(pf, deg)
    return RationalInnerFunction(
        p=pf,
        ptilde=pt,
        deg=deg,
        stability_report=StabilityReport(grid_n, min_mod, checked),
        _pmat=pf.coeff_matrix(),
        _ptmat=pt.coeff_matrix(),
    )


def _stability_scan(p: Poly2, grid_n: int):
    cols = [c.to_float() for c in p.slice_coeff_polys("first")]
    scale = max(max(c.max_abs() for c in cols), 1.0)
    radii = np.arange(1, grid_n + 1) / grid_n
    angles = 2 * np.pi * np.arange(grid_n) / grid_n
    z1 = np.concatenate(([0.0 + 0j], np.outer(radii, np.exp(1j * angles)).ravel()))
    vals = np.stack([np.polyval(list(reversed(c.coeffs)), z1) for c in cols])
    min_mod = np.inf
    witness = None
    for i in range(z1.shape[0]):
        cv = vals[:, i]
        nz = np.nonzero(np.abs(cv) > 1e-13 * scale)[0]
        if nz.size == 0:
            # p vanishes identically on this z2-line
            if abs(z1[i]) < 1 - STABILITY_TOL:
                witness = (complex(z1[i]), None)
                break
            continue
        top = nz.max()
        if top == 0:
            continue
        roots = np.roots(cv[: top + 1][::-1])
        mods = np.abs(roots)
        m = mods.min()
        if m < min_mod:
            min_mod = m
        if m < 1 - STABILITY_TOL and abs(z1[i]) <= 1 + 1e-12:
            r = roots[np.argmin(mods)]
            witness = (complex(z1[i]), complex(r))
            break
    return (float(min_mod) if np.isfinite(min_mod) else float("inf")), witness, z1.shape[0]


def torus_singularities(rif: RationalInnerFunction, grid_n: int = 256):
    """Boundary zeros of p found by scanning unimodular roots of z2-slices."""
    points = []
    cols = [c.to_float() for c in rif.p.slice_coeff_polys("first")]
    angles = 2 * np.pi * np.arange(grid_n) / grid_n
    zeta1 = np.exp(1j * angles)
    vals = np.stack([np.polyval(list(reversed(c.coeffs)), zeta1) for c in cols])
    scale = max(max(c.max_abs() for c in cols), 1.0)
    for i in range(grid_n):
        cv = vals[:, i]
        nz = np.nonzero(np.abs(cv) > 1e-13 * scale)[0]
        if nz.size == 0 or nz.max() == 0:
            continue
        roots = np.roots(cv[: nz.max() + 1][::-1])
        for r in roots:
            if abs(abs(r) - 1.0) <= STABILITY_TOL:
                points.append((complex(zeta1[i]), complex(r / abs(r))))
    return _cluster_torus_points(points)


def _cluster_torus_points(points, radius=SINGULARITY_CLUSTER_RADIUS):
    out = []
    for pt in points:
        for q in out:
            if _torus_dist(pt, q) <= radius:
                break
        else:
            out.append(pt)
    return out


def _torus_dist(a, b) -> float:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def verify_inner(rif: RationalInnerFunction, grid_n: int = 64) -> float:
    """Max of ||phi| - 1| over a boundary grid, singular points excluded."""
    angles = 2 * np.pi * np.arange(grid_n) / grid_n
    Z1, Z2 = np.meshgrid(np.exp(1j * angles), np.exp(1j * angles), indexing="ij")
    den = _eval_mat(rif._pmat, Z1, Z2)
    num = _eval_mat(rif._ptmat, Z1, Z2)
    scale = max(np.abs(den).max(), 1.0)
    ok = np.abs(den) > 1e-8 * scale
    vals = np.abs(num[ok] / den[ok])
    return float(np.abs(vals - 1.0).max())


def from_text(text: str, deg, grid_n: int = 64) -> RationalInnerFunction:
    from .polyalg import parse_poly

    return build(parse_poly(text), deg, grid_n)


def fav_rif(d: int, grid_n: int = 64) -> RationalInnerFunction:
    """The family (d z1 z2 - z1 - z2)/(d - z1 - z2), inner for |d| >= 2."""
    p = Poly2({(0, 0): d, (1, 0): -1, (0, 1): -1})
    return build(p, (1, 1), grid_n)


def monomial_rif(grid_n: int = 64) -> RationalInnerFunction:
    """phi = z1 z2, represented as p = 1 at declared bidegree (1, 1)."""
    return build(Poly2.constant(1), (1, 1), grid_n)

"""Clark-Aleksandrov measure models for rational inner functions at unimodular alpha.

A model is the level set {p~ - alpha p = 0} on the bitorus split into curve
branches (sampled uniformly in the angle of zeta1, each sample weighted by
1/|d phi/d z2|) plus finitely many coordinate lines carrying point masses.
Lebesgue measure is normalized to total mass 1 throughout, so the model's
total mass matches the Poisson integral Re((alpha+phi(0))/(alpha-phi(0))).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .polyalg import (
    Poly2,
    PolynomialError,
    as_exact_unimodular,
    poly1_roots,
)
from .rif import RationalInnerFunction

UNIMODULAR_ROOT_TOL = 1e-8
ANCHOR_TOL = 1e-10
LEVEL_EQUATION_TOL = 1e-8
LINE_QUAD_N = 256


class BranchDegeneracyError(ValueError):
    """The level curve has a point with d phi/d z2 = 0 (weight blows up)."""

    def __init__(self, point):
        self.point = point
        super().__init__(f"branch degeneracy at {point}")


class InvalidRIFError(ValueError):
    """Level-set factor anchored strictly inside the disc; input is not a RIF."""


@dataclass(frozen=True)
class CurveBranch:
    """Samples (theta, zeta2, weight) along one threaded branch."""

    thetas: np.ndarray
    zeta2: np.ndarray
    weights: np.ndarray
    branch_id: int

    def __len__(self):
        return self.thetas.shape[0]


@dataclass(frozen=True)
class DegenerateLine:
    axis: str  # 'first' for {a} x T, 'second' for T x {a}
    anchor: complex
    mass: float
    mass_trace: tuple = field(default=(), compare=False)


@dataclass(frozen=True)
class ClarkMeasureModel:
    rif: RationalInnerFunction
    alpha: complex
    grid_n: int
    branches: tuple[CurveBranch, ...]
    lines: tuple[DegenerateLine, ...]

    # quadrature arrays over all branch samples
    _zeta1: np.ndarray = field(repr=False, compare=False, default=None)
    _zeta2: np.ndarray = field(repr=False, compare=False, default=None)
    _weights: np.ndarray = field(repr=False, compare=False, default=None)

    def curve_mass(self) -> float:
        return float(self._weights.sum() / self.grid_n)

    def total_mass(self) -> float:
        return self.curve_mass() + sum(line.mass for line in self.lines)

    def expected_mass(self) -> float:
        phi0 = self.rif.eval(0.0, 0.0)
        return float(np.real((self.alpha + phi0) / (self.alpha - phi0)))

    def poisson(self, z) -> float:
        z1, z2 = _interior(z)
        total = kernels.poisson_sum(self._zeta1, self._zeta2, self._weights, z1, z2)
        total /= self.grid_n
        for line in self.lines:
            # the Lebesgue factor along the line integrates the kernel to 1
            zax = z1 if line.axis == "first" else z2
            total += line.mass * _poisson_kernel(zax, line.anchor)
        return float(total)

    def cauchy_transform(self, g, z) -> complex:
        """Quadrature of C(z, .) g against the model; g maps (zeta1, zeta2) arrays."""
        z1, z2 = _interior(z)
        gv = np.asarray(g(self._zeta1, self._zeta2), dtype=np.complex128)
        wg = np.ascontiguousarray(self._weights * gv)
        total = kernels.cauchy_sum(self._zeta1, self._zeta2, wg, z1, z2) / self.grid_n
        for line in self.lines:
            eta = np.exp(2j * np.pi * np.arange(LINE_QUAD_N) / LINE_QUAD_N)
            anchors = np.full(LINE_QUAD_N, line.anchor)
            l1, l2 = (anchors, eta) if line.axis == "first" else (eta, anchors)
            gl = np.asarray(g(l1, l2), dtype=np.complex128)
            wl = np.ascontiguousarray(np.full(LINE_QUAD_N, line.mass / LINE_QUAD_N) * gl)
            total += kernels.cauchy_sum(l1, l2, wl, z1, z2)
        return complex(total)

    def to_json(self) -> dict:
        return {
            "alpha": [self.alpha.real, self.alpha.imag],
            "grid_n": self.grid_n,
            "n_branches": len(self.branches),
            "curve_mass": self.curve_mass(),
            "total_mass": self.total_mass(),
            "expected_mass": self.expected_mass(),
            "lines": [
                {
                    "axis": line.axis,
                    "anchor": [line.anchor.real, line.anchor.imag],
                    "mass": line.mass,
                }
                for line in self.lines
            ],
        }

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("# " + json.dumps(self.to_json()) + "\n")
            fh.write("theta,re_zeta2,im_zeta2,weight,branch_id\n")
            for br in self.branches:
                for t, z, w in zip(br.thetas, br.zeta2, br.weights):
                    fh.write(
                        f"{t:.17g},{z.real:.17g},{z.imag:.17g},{w:.17g},{br.branch_id}\n"
                    )


def _interior(z):
    z1, z2 = complex(z[0]), complex(z[1])
    if abs(z1) >= 1 or abs(z2) >= 1:
        raise PolynomialError(f"point {z} is not strictly interior")
    return z1, z2


def _poisson_kernel(z: complex, zeta: complex) -> float:
    return (1.0 - abs(z) ** 2) / abs(zeta - z) ** 2


def _alpha_pair(alpha):
    """(exact unimodular alpha or None, float alpha)."""
    g = as_exact_unimodular(alpha)
    af = complex(g) if g is not None else complex(alpha)
    if abs(abs(af) - 1.0) > 1e-12:
        raise PolynomialError(f"alpha must be unimodular, got {alpha!r}")
    return g, af


def level_polynomial(rif: RationalInnerFunction, alpha) -> Poly2:
    """q = p~ - alpha p, exact when alpha is exactly unimodular."""
    g, af = _alpha_pair(alpha)
    if g is not None and rif.p.exact:
        return rif.ptilde - rif.p * g
    return rif.ptilde.to_float() - rif.p.to_float() * af


def _split_coordinate_factors(q: Poly2):
    """Split q into coordinate-linear factors (degenerate lines) and the rest."""
    anchors = {"first": [], "second": []}
    reduced = q
    for axis in ("first", "second"):
        if reduced.is_zero():
            raise PolynomialError("level polynomial is zero")
        content = reduced.coordinate_content(axis)
        if content.degree() == 0:
            continue
        for r in poly1_roots(content):
            m = abs(r)
            if m < 1 - ANCHOR_TOL:
                raise InvalidRIFError(
                    f"level-set line anchored at {r} strictly inside the disc"
                )
            if m > 1 + ANCHOR_TOL:
                # mirror of an interior anchor; cannot occur for a genuine RIF
                continue
            a = r / m
            anchors[axis].append(complex(a))
            reduced = reduced.divide_out_linear(axis, _exactify_anchor(a, content))
    return reduced, anchors


def _exactify_anchor(a: complex, content):
    """Snap float anchors to exact unimodular values when content is exact."""
    if not content.exact:
        return a
    from .polyalg import EXACT_UNIMODULAR

    for key, g in EXACT_UNIMODULAR.items():
        if abs(a - key) < 1e-9:
            return g
    return a


def degenerate_components(rif: RationalInnerFunction, alpha) -> list[DegenerateLine]:
    """Coordinate lines of the level set with their projected atom masses."""
    q = level_polynomial(rif, alpha)
    _, af = _alpha_pair(alpha)
    _, anchors = _split_coordinate_factors(q)
    lines = []
    for axis, axis_anchors in anchors.items():
        for a in axis_anchors:
            mass, trace = _atom_mass(rif, af, axis, a)
            lines.append(DegenerateLine(axis, a, mass, tuple(trace)))
    return lines


def _atom_mass(rif: RationalInnerFunction, alpha: complex, axis: str, anchor: complex):
    """Atom of the projected one-variable measure at the anchor.

    Radial-limit formula (1-r)/(1+r) * Re((alpha + phi_s(r a))/(alpha - phi_s(r a)))
    with phi_s the slice through the origin, Richardson-extrapolated over
    r = 1 - 2^-k, k = 4..12.
    """

    def slice_value(r):
        if axis == "first":
            val = rif.eval(r * anchor, 0.0)
        else:
            val = rif.eval(0.0, r * anchor)
        return (1 - r) / (1 + r) * float(np.real((alpha + val) / (alpha - val)))

    ks = range(4, 13)
    vals = [slice_value(1.0 - 2.0**-k) for k in ks]
    tbl = [list(vals)]
    for m in range(1, len(vals)):
        prev = tbl[-1]
        tbl.append(
            [
                (2.0**m * prev[i + 1] - prev[i]) / (2.0**m - 1.0)
                for i in range(len(prev) - 1)
            ]
        )
    mass = tbl[-1][0]
    if mass < 0 and mass > -1e-10:
        mass = 0.0
    if mass < 0:
        raise PolynomialError(f"negative extrapolated line mass {mass}")
    return float(mass), vals


def clark_support(rif: RationalInnerFunction, alpha, grid_n: int = 1024):
    """Sample the level curve over uniform zeta1 angles and thread branches."""
    q = level_polynomial(rif, alpha)
    reduced, _ = _split_coordinate_factors(q)
    dq2 = level_polynomial(rif, alpha).derivative("second")
    return _thread_branches(rif, reduced, dq2, grid_n)


def _slice_roots(reduced: Poly2, thetas: np.ndarray):
    """Unimodular roots of the z2-slices of the reduced level polynomial."""
    zeta1 = np.exp(1j * thetas)
    cols = [c.to_float() for c in reduced.slice_coeff_polys("first")]
    scale = max(max(c.max_abs() for c in cols), 1e-300)
    vals = np.stack([np.polyval(list(reversed(c.coeffs)), zeta1) for c in cols])
    roots_per_slice = []
    for i in range(thetas.shape[0]):
        cv = vals[:, i]
        nz = np.nonzero(np.abs(cv) > 1e-12 * scale)[0]
        if nz.size == 0 or nz.max() == 0:
            roots_per_slice.append([])
            continue
        top = nz.max()
        if top == 1:
            roots = [-cv[0] / cv[1]]
        else:
            roots = np.roots(cv[: top + 1][::-1])
        keep = [complex(r) for r in roots if abs(abs(r) - 1.0) <= UNIMODULAR_ROOT_TOL]
        roots_per_slice.append(keep)
    return zeta1, roots_per_slice


def _thread_branches(rif, reduced, dq2, grid_n):
    thetas = 2 * np.pi * np.arange(grid_n) / grid_n
    zeta1, roots_per_slice = _slice_roots(reduced, thetas)

    dq2_mat = dq2.coeff_matrix()
    p_mat = rif._pmat
    scale_d = max(sum(abs(complex(c)) for c in dq2.coeffs.values()), 1e-300)
    scale_p = max(sum(abs(complex(c)) for c in rif.p.coeffs.values()), 1e-300)

    samples = {}  # branch_id -> list of (theta, zeta2, weight)
    active = []  # (branch_id, last zeta2)
    next_id = 0
    for i, roots in enumerate(roots_per_slice):
        matched = {}
        if active and roots:
            pairs = sorted(
                (abs(last - r), bi, ri)
                for bi, (_, last) in enumerate(active)
                for ri, r in enumerate(roots)
            )
            taken_b = set()
            for _, bi, ri in pairs:
                if bi in taken_b or ri in matched:
                    continue
                matched[ri] = active[bi][0]
                taken_b.add(bi)
        new_active = []
        for ri, r in enumerate(roots):
            bid = matched.get(ri)
            if bid is None:
                bid = next_id
                next_id += 1
                samples[bid] = []
            w = _sample_weight(
                reduced, float(thetas[i]), complex(zeta1[i]), r,
                dq2_mat, p_mat, scale_d, scale_p,
            )
            samples[bid].append((float(thetas[i]), r, w))
            new_active.append((bid, r))
        active = new_active

    branches = []
    for bid in sorted(samples):
        rows = samples[bid]
        branches.append(
            CurveBranch(
                thetas=np.array([t for t, _, _ in rows]),
                zeta2=np.array([z for _, z, _ in rows], dtype=np.complex128),
                weights=np.array([w for _, _, w in rows]),
                branch_id=bid,
            )
        )
    return branches


def _sample_weight(reduced, theta, z1, z2, dq2_mat, p_mat, scale_d, scale_p):
    """weight = 1/|d phi/d z2| = |p| / |d q/d z2| on the level set.

    The second form follows from the quotient rule once p~ = alpha p holds at
    the sample.  A 0/0 of |p| and |dq/dz2| happens exactly where the curve
    crosses a removed degenerate line; there the weight extends continuously
    and is recovered by re-evaluating at a nudged angle along the branch.
    """
    dv = _eval_at(dq2_mat, z1, z2)
    pv = _eval_at(p_mat, z1, z2)
    if abs(dv) > 1e-9 * scale_d:
        return abs(pv) / abs(dv)
    if abs(pv) > 1e-9 * scale_p:
        raise BranchDegeneracyError((z1, z2))
    for eps in (1e-6, -1e-6, 1e-5):
        z1n = complex(np.exp(1j * (theta + eps)))
        sl = reduced.slice("first", z1n)
        if sl.degree() == 0:
            continue
        roots = [r for r in poly1_roots(sl) if abs(abs(r) - 1.0) <= 1e-6]
        if not roots:
            continue
        rn = min(roots, key=lambda r: abs(r - z2))
        dvn = _eval_at(dq2_mat, z1n, rn)
        pvn = _eval_at(p_mat, z1n, rn)
        if abs(dvn) > 1e-9 * scale_d:
            return abs(pvn) / abs(dvn)
    raise BranchDegeneracyError((z1, z2))


def _eval_at(mat, z1, z2) -> complex:
    z1a = np.array([z1], dtype=np.complex128)
    z2a = np.array([z2], dtype=np.complex128)
    return complex(kernels.poly2_eval(mat, z1a, z2a)[0])


def build_model(rif: RationalInnerFunction, alpha, grid_n: int = 1024) -> ClarkMeasureModel:
    """Full Clark measure model: curve branches plus degenerate lines."""
    _, af = _alpha_pair(alpha)
    branches = clark_support(rif, alpha, grid_n)
    lines = degenerate_components(rif, alpha)
    _validate_level_equation(rif, af, branches)
    if branches:
        zeta1 = np.ascontiguousarray(
            np.concatenate([np.exp(1j * br.thetas) for br in branches])
        )
        zeta2 = np.ascontiguousarray(np.concatenate([br.zeta2 for br in branches]))
        weights = np.ascontiguousarray(np.concatenate([br.weights for br in branches]))
    else:
        zeta1 = np.zeros(0, dtype=np.complex128)
        zeta2 = np.zeros(0, dtype=np.complex128)
        weights = np.zeros(0)
    return ClarkMeasureModel(
        rif=rif,
        alpha=af,
        grid_n=grid_n,
        branches=tuple(branches),
        lines=tuple(lines),
        _zeta1=zeta1,
        _zeta2=zeta2,
        _weights=weights,
    )


def _validate_level_equation(rif, alpha, branches):
    q = rif.ptilde.to_float() - rif.p.to_float() * alpha
    qmat = q.coeff_matrix()
    scale = max(sum(abs(c) for c in q.coeffs.values()), 1e-300)
    for br in branches:
        zeta1 = np.exp(1j * br.thetas)
        vals = kernels.poly2_eval(
            qmat,
            np.ascontiguousarray(zeta1),
            np.ascontiguousarray(br.zeta2),
        )
        worst = float(np.abs(vals).max()) if len(br) else 0.0
        if worst > LEVEL_EQUATION_TOL * scale:
            raise PolynomialError(
                f"level equation violated on branch {br.branch_id}: residual {worst}"
            )


def poisson(model: ClarkMeasureModel, z) -> float:
    return model.poisson(z)


def cauchy_transform(model: ClarkMeasureModel, g, z) -> complex:
    return model.cauchy_transform(g, z)


def v_operator(rif: RationalInnerFunction, alpha, model: ClarkMeasureModel, g, z) -> complex:
    """(V g)(z) = (1 - conj(alpha) phi(z)) * (g sigma_alpha)_+(z)."""
    _, af = _alpha_pair(alpha)
    return (1.0 - np.conj(af) * rif.eval(*z)) * model.cauchy_transform(g, z)


def verify_clark_identity(rif, alpha, model: ClarkMeasureModel, test_points) -> float:
    """Max over the points of |P[model](z) - Re((alpha+phi(z))/(alpha-phi(z)))|."""
    _, af = _alpha_pair(alpha)
    worst = 0.0
    for z in test_points:
        lhs = model.poisson(z)
        val = rif.eval(*z)
        rhs = float(np.real((af + val) / (af - val)))
        worst = max(worst, abs(lhs - rhs))
    return worst

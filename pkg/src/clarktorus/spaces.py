"""Cauchy and de Branges-Rovnyak kernels, H^2 membership, model-space tests.

H^2 membership of a rational function is decided through its boundary L^2
norm, reduced slicewise: the inner integral over zeta2 is evaluated in closed
form (affine denominators through the geometric-series identity behind
``slice_integral_affine``, higher degrees through residues at the slice
denominator roots outside the circle), and the outer angle integral runs on
dyadically refined grids with extra nodes graded toward the boundary zeros of
the denominator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from .polyalg import Poly2, PolynomialError, proportional_scalar
from .rif import RationalInnerFunction, torus_singularities
from .clark import _alpha_pair

PUNCTURE_RADIUS = 1e-3
GRADED_LEVELS = 42
BASE_LEVEL = 6


class DivergentSliceError(ValueError):
    """slice_integral_affine called with |a| <= |b| (divergent or singular)."""


def cauchy_kernel(z, w) -> complex:
    """Product Cauchy kernel C(z, w) = prod 1/(1 - z_j conj(w_j))."""
    out = 1.0 + 0.0j
    for zj, wj in zip(z, w):
        d = 1.0 - complex(zj) * np.conj(complex(wj))
        if abs(d) < 1e-14:
            raise PolynomialError(f"Cauchy kernel pole at z={z}, w={w}")
        out /= d
    return complex(out)


def dbr_kernel(b: RationalInnerFunction, z, w) -> complex:
    """Reproducing kernel (1 - b(z) conj(b(w))) C(z, w)."""
    return (1.0 - b.eval(*z) * np.conj(b.eval(*w))) * cauchy_kernel(z, w)


def slice_integral_affine(a: complex, b: complex) -> float:
    """Integral of 1/|a - b zeta|^2 over the unit circle: 1/(|a|^2 - |b|^2)."""
    gap = abs(a) ** 2 - abs(b) ** 2
    if gap <= 0:
        raise DivergentSliceError(f"|a| <= |b| for a={a}, b={b}")
    return 1.0 / gap


@dataclass(frozen=True)
class RationalFunction:
    """Quotient of bivariate polynomials with a disc-stable denominator."""

    num: Poly2
    den: Poly2

    @staticmethod
    def checked(num: Poly2, den: Poly2, grid_n: int = 32) -> "RationalFunction":
        from .rif import _stability_scan

        _, witness, _ = _stability_scan(den, grid_n)
        if witness is not None:
            from .rif import UnstableDenominatorError

            raise UnstableDenominatorError(witness)
        return RationalFunction(num, den)

    def boundary_values(self, Z1, Z2) -> np.ndarray:
        nv = _eval_many(self.num, Z1, Z2)
        dv = _eval_many(self.den, Z1, Z2)
        with np.errstate(divide="ignore", invalid="ignore"):
            return nv / dv


def _eval_many(p: Poly2, Z1, Z2):
    mat = p.coeff_matrix()
    Z1 = np.ascontiguousarray(Z1, dtype=np.complex128)
    Z2 = np.ascontiguousarray(Z2, dtype=np.complex128)
    return kernels.poly2_eval(mat, Z1.ravel(), Z2.ravel()).reshape(Z1.shape)


@dataclass(frozen=True)
class MembershipVerdict:
    """Finite(norm2) / Divergent / Inconclusive with the refinement trace."""

    kind: str  # 'finite' | 'divergent' | 'inconclusive'
    norm2: float | None
    trace: tuple
    note: str = ""

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def is_divergent(self) -> bool:
        return self.kind == "divergent"

    def to_json(self) -> dict:
        out = {"class": self.kind.capitalize(), "trace": [list(t) for t in self.trace]}
        if self.norm2 is not None:
            out["norm2"] = self.norm2
        if self.note:
            out["note"] = self.note
        return out


# ---------------------------------------------------------------------------
# inner integral over zeta2 for fixed zeta1 = e^{i theta}
# ---------------------------------------------------------------------------


class _InnerIntegral:
    """Closed-form integral of |num/den|^2 dm(zeta2) per zeta1 sample."""

    def __init__(self, num: Poly2, den: Poly2):
        self.ncols = [np.array([complex(v) for v in c.coeffs]) for c in num.slice_coeff_polys("first")]
        self.dcols = [np.array([complex(v) for v in c.coeffs]) for c in den.slice_coeff_polys("first")]
        self.Mn = len(self.ncols) - 1
        self.Md = len(self.dcols) - 1
        self.nscale = max(max(np.abs(c).max() for c in self.ncols), 1e-300)
        self.dscale = max(max(np.abs(c).max() for c in self.dcols), 1e-300)

    def _coef_at(self, cols, zeta1):
        return np.stack([_polyval_low(c, zeta1) for c in cols])

    def values(self, thetas: np.ndarray) -> np.ndarray:
        if thetas.size == 0:
            return np.zeros(0)
        zeta1 = np.exp(1j * thetas)
        N = self._coef_at(self.ncols, zeta1)
        D = self._coef_at(self.dcols, zeta1)
        if self.Md == 0:
            mag = np.abs(D[0]) ** 2
            out = np.full(thetas.shape, np.inf)
            ok = mag > (1e-13 * self.dscale) ** 2
            out[ok] = (np.abs(N[:, ok]) ** 2).sum(axis=0) / mag[ok]
            return out
        if self.Md == 1:
            h = _autocorrelation(N)
            a = np.ascontiguousarray(D[0])
            b = np.ascontiguousarray(-D[1])
            return kernels.affine_norm_sum(np.ascontiguousarray(h), a, b)
        return self._residue_values(N, D, thetas)

    def value(self, theta: float) -> float:
        return float(self.values(np.array([theta]))[0])

    # -- general z2-degree via residues -------------------------------------

    def _residue_values(self, N, D, thetas):
        n = thetas.shape[0]
        out = np.empty(n)
        lead = D[-1]
        ok = np.abs(lead) > 1e-12 * self.dscale
        slow = list(np.nonzero(~ok)[0])
        idx = np.nonzero(ok)[0]
        if idx.size:
            md = self.Md
            comp = np.zeros((idx.size, md, md), dtype=np.complex128)
            comp[:, 1:, :-1] = np.eye(md - 1)
            comp[:, :, -1] = -(D[:-1, idx] / lead[idx]).T
            roots = np.linalg.eigvals(comp)  # (n_ok, md)
            moduli = np.abs(roots)
            singular = (np.abs(moduli - 1.0) <= 1e-9).any(axis=1) | (
                moduli <= 1 - 1e-9
            ).any(axis=1)
            Q, R = _batch_polydiv(N[:, idx], D[:, idx])
            dprime = D[1:, idx] * np.arange(1, self.Md + 1)[:, None]
            dpr = _polyval_rows(dprime, roots)
            res_ok = (np.abs(dpr) > 1e-10 * self.dscale).all(axis=1)
            Aval = np.where(dpr != 0, _polyval_rows(R, roots) / np.where(dpr == 0, 1, dpr), 0)
            vals = _residue_norm(Q, Aval, roots)
            vals[singular] = np.inf
            bad = np.nonzero(~res_ok & ~singular)[0]
            out[idx] = vals
            slow += [int(idx[i]) for i in bad]
        for i in slow:
            out[i] = self._series_value(N[:, i], D[:, i])
        return out

    def _series_value(self, ncoef, dcoef, cap: int = 200000) -> float:
        if not np.abs(ncoef).any():
            return 0.0
        dc = np.trim_zeros(dcoef, "b")
        if dc.size == 0:
            return np.inf
        if abs(dc[0]) < 1e-13 * self.dscale:
            return np.inf
        order = dc.size - 1
        if order == 0:
            return float((np.abs(ncoef) ** 2).sum() / abs(dc[0]) ** 2)
        roots = np.roots(dc[::-1])
        if (np.abs(np.abs(roots) - 1.0) <= 1e-9).any() or (np.abs(roots) < 1 - 1e-9).any():
            return np.inf
        c = np.zeros(cap, dtype=np.complex128)
        total = 0.0
        window = 0.0
        for k in range(cap):
            acc = ncoef[k] if k < ncoef.size else 0.0
            for m in range(1, min(order, k) + 1):
                acc -= dc[m] * c[k - m]
            c[k] = acc / dc[0]
            term = abs(c[k]) ** 2
            total += term
            window = term + 0.9 * window
            if k > 2 * order + 10 and window < 1e-16 * max(total, 1e-300):
                break
        return float(total)

    # -- singular angle scan -------------------------------------------------

    def gap(self, thetas: np.ndarray) -> np.ndarray:
        """Distance-to-singularity indicator, ~0 where the slice is singular."""
        zeta1 = np.exp(1j * thetas)
        D = self._coef_at(self.dcols, zeta1)
        if self.Md == 0:
            return np.abs(D[0]) / self.dscale
        if self.Md == 1:
            return (np.abs(D[0]) - np.abs(D[1])) / self.dscale
        out = np.empty(thetas.shape)
        for i in range(thetas.shape[0]):
            dc = np.trim_zeros(D[:, i], "b")
            if dc.size <= 1:
                out[i] = np.abs(dc[0]) / self.dscale if dc.size else 0.0
                continue
            roots = np.roots(dc[::-1])
            out[i] = np.abs(np.abs(roots) - 1.0).min()
        return out

    def singular_angles(self, scan_n: int = 4096):
        thetas = 2 * np.pi * np.arange(scan_n) / scan_n
        g = self.gap(thetas)
        cand = g < 1e-3
        if cand.mean() > 0.10:
            return [], True
        # rotate so the scan does not split a candidate block across 0 = 2 pi
        shift = 0
        if cand[0] and cand[-1]:
            shift = int(np.argmin(cand))
            cand = np.roll(cand, -shift)
        step = 2 * np.pi / scan_n
        angles = []
        i = 0
        while i < scan_n:
            if not cand[i]:
                i += 1
                continue
            j = i
            while j + 1 < scan_n and cand[j + 1]:
                j += 1
            lo = (i + shift - 1) * step
            hi = (j + shift + 1) * step
            angles.append(_golden_min(lambda t: self.gap(np.array([t]))[0], lo, hi))
            i = j + 1
        if len(angles) > 32:
            return [], True
        out = []
        for a in sorted(a % (2 * np.pi) for a in angles):
            if not out or min(abs(a - b) for b in out) > 1e-9:
                out.append(a)
        return out, False


def _polyval_low(coeffs, x):
    """Polynomial with coefficients low-to-high evaluated on an array."""
    acc = np.full_like(x, coeffs[-1])
    for c in coeffs[-2::-1]:
        acc = acc * x + c
    return acc


def _polyval_rows(coeffs, x):
    """coeffs: (m, n) low-to-high per column; x: (n, r) -> (n, r)."""
    acc = np.broadcast_to(coeffs[-1][:, None], x.shape).copy()
    for k in range(coeffs.shape[0] - 2, -1, -1):
        acc = acc * x + coeffs[k][:, None]
    return acc


def _autocorrelation(N):
    """h[m] = sum_k N[k+m] conj(N[k]) along axis 0."""
    lags = N.shape[0]
    h = np.empty((lags, N.shape[1]), dtype=np.complex128)
    for m in range(lags):
        h[m] = (N[m:] * np.conj(N[: lags - m])).sum(axis=0)
    return h


def _batch_polydiv(N, D):
    """Euclidean division columnwise: N = Q*D + R with deg R < deg D."""
    md = D.shape[0] - 1
    mn = N.shape[0] - 1
    R = N.astype(np.complex128).copy()
    if mn < md:
        return np.zeros((0, N.shape[1]), dtype=np.complex128), R
    k0 = mn - md
    Q = np.zeros((k0 + 1, N.shape[1]), dtype=np.complex128)
    lead = D[-1]
    for k in range(k0, -1, -1):
        c = R[md + k] / lead
        Q[k] = c
        R[k : md + k + 1] -= c[None, :] * D
    return Q, R[:md]


def _residue_norm(Q, A, roots):
    """sum_{k>=0} |c_k|^2 for c_k = Q_k - sum_i A_i r_i^{-(k+1)}."""
    n, md = roots.shape
    k0 = Q.shape[0] - 1  # -1 when no polynomial part
    inv = 1.0 / roots
    head = np.zeros(n)
    pw = inv.copy()  # r^{-(k+1)} at k=0
    for k in range(k0 + 1):
        ck = Q[k] - (A * pw).sum(axis=1)
        head += np.abs(ck) ** 2
        pw = pw * inv
    P = roots[:, :, None] * np.conj(roots[:, None, :])
    Pinv = 1.0 / P
    tail = (
        A[:, :, None]
        * np.conj(A[:, None, :])
        * Pinv ** (k0 + 2)
        / (1.0 - Pinv)
    ).sum(axis=(1, 2))
    return head + np.real(tail)


def _golden_min(fn, lo, hi, iters: int = 60) -> float:
    phi = (np.sqrt(5.0) - 1) / 2
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


# ---------------------------------------------------------------------------
# outer dyadic ladder
# ---------------------------------------------------------------------------


def _graded_panels(th, lo, hi, levels):
    """Midpoints and widths of geometric panels filling [lo, hi] minus a
    vanishing gap around the singular angle th in between.

    The grading depth grows with the refinement level so that, for divergent
    integrands, the retained window keeps shrinking and the level sums keep
    growing instead of saturating at a float-cancellation floor.
    """
    mids = []
    widths = []
    for sgn, edge in ((1.0, hi), (-1.0, lo)):
        s = abs(edge - th)
        if s <= 0:
            continue
        for g in range(levels):
            w = s * 2.0 ** (-g - 1)
            x0 = th + sgn * w
            mids.append(x0 + sgn * w / 2)
            widths.append(w)
    return np.array(mids), np.array(widths)


def _circular_gap(a: float, b: float) -> float:
    d = abs(a - b) % (2 * np.pi)
    return min(d, 2 * np.pi - d)


def _level_estimate(inner: _InnerIntegral, sing, level: int) -> float:
    n = 2**level
    h = 2 * np.pi / n
    mids = (np.arange(n) + 0.5) * h
    drop = np.zeros(n, dtype=bool)
    regions = []
    for th in sing:
        j0 = int(np.floor(th / h))
        for cidx in ((j0 - 1) % n, j0 % n, (j0 + 1) % n):
            drop[cidx] = True
        others = [b for b in sing if b != th]
        # graded panels only once neighbouring singularities are resolved
        if not others or min(_circular_gap(th, b) for b in others) > 4 * h:
            regions.append((th, (j0 - 1) * h, (j0 + 2) * h))
    vals = inner.values(mids)
    kept = ~drop & np.isfinite(vals)
    if np.any(~drop & ~np.isfinite(vals)):
        return float("inf")
    total = float((vals[kept] * h).sum())
    depth = min(level + 8, GRADED_LEVELS)
    for th, lo, hi in regions:
        mids_g, w_g = _graded_panels(th, lo, hi, depth)
        gvals = inner.values(mids_g)
        good = np.isfinite(gvals)
        total += float((gvals[good] * w_g[good]).sum())
    return total / (2 * np.pi)


def _locate_infinite_nodes(inner: _InnerIntegral, sing, level: int):
    n = 2**level
    h = 2 * np.pi / n
    mids = (np.arange(n) + 0.5) * h
    vals = inner.values(mids)
    bad = np.nonzero(~np.isfinite(vals))[0]
    extra = []
    for i in bad[:8]:
        th = _golden_min(
            lambda t: inner.gap(np.array([t]))[0], mids[i] - h, mids[i] + h
        ) % (2 * np.pi)
        if not sing or min(_circular_gap(th, b) for b in sing) > 1e-9:
            extra.append(th)
    return extra


def h2_classify(f: RationalFunction, max_level: int = 20, rel_tol: float = 1e-6) -> MembershipVerdict:
    """Boundary L^2 classification of a rational function on the bitorus."""
    num = f.num.to_float()
    den = f.den.to_float()
    inner = _InnerIntegral(num, den)
    sing, curve_singular = inner.singular_angles()
    if curve_singular:
        return MembershipVerdict(
            "divergent", None, (), note="denominator vanishes along a boundary curve"
        )
    trace = []
    prev = None
    growth = 0
    for level in range(BASE_LEVEL, max_level + 1):
        val = _level_estimate(inner, sing, level)
        retries = 0
        while not np.isfinite(val) and retries < 3:
            # a singular slice slipped past the scan: locate and grade it
            extra = _locate_infinite_nodes(inner, sing, level)
            if not extra:
                break
            sing = sorted(set(sing) | set(extra))
            val = _level_estimate(inner, sing, level)
            retries += 1
        if not np.isfinite(val):
            return MembershipVerdict(
                "divergent", None, tuple(trace), note="non-finite slice integral"
            )
        trace.append((level, val))
        if val > 1e15:
            return MembershipVerdict(
                "divergent", None, tuple(trace), note="partial sums beyond overflow guard"
            )
        if prev is not None:
            if prev > 0 and val >= 1.5 * prev:
                growth += 1
                if growth >= 3:
                    return MembershipVerdict(
                        "divergent",
                        None,
                        tuple(trace),
                        note="partial sums grew by >= 1.5x across 3 dyadic levels",
                    )
            else:
                growth = 0
            if abs(val - prev) <= rel_tol * max(abs(val), 1e-300):
                return MembershipVerdict("finite", float(val), tuple(trace))
        prev = val
    return MembershipVerdict("inconclusive", None, tuple(trace), note="max_level reached")


# ---------------------------------------------------------------------------
# model-space orthogonality and the containment certificate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrthogonalityResult:
    residual: float
    norm2: float
    punctured: int = 0

    def __float__(self):
        return self.residual

    def to_json(self) -> dict:
        return {
            "residual": self.residual,
            "norm2": self.norm2,
            "punctured": self.punctured,
        }


def model_space_orthogonality(
    f, phi: RationalInnerFunction, K: int = 16, grid_n: int = 256
) -> OrthogonalityResult:
    """max_k |<f, phi z^k>| over 0 <= k1, k2 <= K via one FFT pass.

    Grid samples within the puncture radius of a torus zero of phi's (or f's)
    denominator are dropped and counted in the result.
    """
    if K > grid_n // 4:
        raise PolynomialError(f"K={K} exceeds grid_n/4={grid_n // 4} (aliasing)")
    th = 2 * np.pi * np.arange(grid_n) / grid_n
    Z1, Z2 = np.meshgrid(np.exp(1j * th), np.exp(1j * th), indexing="ij")
    with np.errstate(divide="ignore", invalid="ignore"):
        F = _boundary_samples(f, Z1, Z2)
        Phi = phi.eval_many(Z1, Z2)
    mask = ~np.isfinite(F) | ~np.isfinite(Phi)
    for pt in torus_singularities(phi, grid_n=max(grid_n, 256)):
        mask |= (np.abs(Z1 - pt[0]) < PUNCTURE_RADIUS) & (
            np.abs(Z2 - pt[1]) < PUNCTURE_RADIUS
        )
    if isinstance(f, RationalFunction):
        dscale = max(sum(abs(complex(c)) for c in f.den.coeffs.values()), 1e-300)
        mask |= np.abs(_eval_many(f.den, Z1, Z2)) < 1e-6 * dscale
    punctured = int(mask.sum())
    G = F * np.conj(Phi)
    G[mask] = 0.0
    coeffs = np.fft.fft2(G) / grid_n**2
    residual = float(np.abs(coeffs[: K + 1, : K + 1]).max())
    norm2 = float((np.abs(F[~mask]) ** 2).mean()) if punctured < F.size else float("nan")
    return OrthogonalityResult(residual, norm2, punctured)


def _boundary_samples(f, Z1, Z2):
    if isinstance(f, RationalFunction):
        return f.boundary_values(Z1, Z2)
    if isinstance(f, Poly2):
        return _eval_many(f, Z1, Z2)
    if isinstance(f, RationalInnerFunction):
        return f.eval_many(Z1, Z2)
    return np.asarray(f(Z1, Z2), dtype=np.complex128)


@dataclass(frozen=True)
class HbCertificate:
    """Evidence that ((alpha - b2)/(alpha - b1)) k_{b1}(., w) lies in H(b2)."""

    w: tuple
    membership: MembershipVerdict
    orthogonality: OrthogonalityResult | None
    proportional_c: object = None

    def to_json(self) -> dict:
        out = {"w": [str(self.w[0]), str(self.w[1])], "membership": self.membership.to_json()}
        if self.orthogonality is not None:
            out["orthogonality"] = self.orthogonality.to_json()
        if self.proportional_c is not None:
            out["c"] = str(self.proportional_c)
        return out


def hb_membership_certificate(
    b1: RationalInnerFunction,
    b2: RationalInnerFunction,
    alpha,
    w=(0.0, 0.0),
    K: int = 16,
    grid_n: int = 256,
    max_level: int = 20,
) -> HbCertificate:
    """Classify g = ((alpha - b2)/(alpha - b1)) k_{b1}(., w) inside H^2 and,
    when finite, test its orthogonality to b2 H^2.

    When alpha p2 - p~2 is exactly proportional to alpha p1 - p~1 the quotient
    collapses symbolically to c p1/p2 and g stays rational with a stable
    denominator; otherwise the level set of b1 survives in the denominator and
    the classifier sees boundary-curve singularities.
    """
    g_exact, af = _alpha_pair(alpha)
    c = None
    if g_exact is not None and b1.p.exact and b2.p.exact:
        r = b2.p * g_exact - b2.ptilde
        s = b1.p * g_exact - b1.ptilde
        if s.is_zero():
            raise PolynomialError("alpha p1 - p~1 vanishes identically")
        c = proportional_scalar(r, s)
    w1, w2 = complex(w[0]), complex(w[1])
    kb_num = b1.p.to_float() - b1.ptilde.to_float() * complex(np.conj(b1.eval(w1, w2)))
    wfactor = _cauchy_denominator(w1, w2)
    if c is not None:
        num = kb_num * complex(c)
        den = b2.p.to_float() * wfactor
        f = RationalFunction(num, den)
        verdict = h2_classify(f, max_level=max_level)
        orth = (
            model_space_orthogonality(f, b2, K=K, grid_n=grid_n)
            if verdict.is_finite
            else None
        )
        return HbCertificate((w1, w2), verdict, orth, c)
    alpha_c = complex(af)
    num = (b2.p.to_float() * alpha_c - b2.ptilde.to_float()) * kb_num
    den = (b1.p.to_float() * alpha_c - b1.ptilde.to_float()) * b2.p.to_float() * wfactor
    f = RationalFunction(num, den)
    verdict = h2_classify(f, max_level=max_level)
    orth = (
        model_space_orthogonality(f, b2, K=K, grid_n=grid_n)
        if verdict.is_finite
        else None
    )
    return HbCertificate((w1, w2), verdict, orth, None)


def _cauchy_denominator(w1: complex, w2: complex) -> Poly2:
    f1 = Poly2({(0, 0): 1.0 + 0j, (1, 0): -np.conj(w1)})
    f2 = Poly2({(0, 0): 1.0 + 0j, (0, 1): -np.conj(w2)})
    return f1 * f2


def verdict_json(verdict: MembershipVerdict) -> str:
    return json.dumps(verdict.to_json())

"""Hot numeric kernels with numba-jitted and pure-numpy implementations.

The jitted path is the default whenever numba imports; set the environment
variable ``CLARKTORUS_NO_NUMBA=1`` to force the vectorized numpy fallback.
Both paths compute identical quantities (tested against each other), so the
flag only trades compile latency against large-grid throughput.
"""

from __future__ import annotations

import os

import numpy as np

NUMBA_DISABLED = os.environ.get("CLARKTORUS_NO_NUMBA", "") not in ("", "0")

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


# -- pure numpy implementations ---------------------------------------------


def poly2_eval_numpy(c, z1, z2):
    """Evaluate sum c[j,k] z1^j z2^k at paired sample arrays (Horner in z1)."""
    acc = np.zeros_like(z1)
    for j in range(c.shape[0] - 1, -1, -1):
        row = np.full_like(z2, c[j, c.shape[1] - 1])
        for k in range(c.shape[1] - 2, -1, -1):
            row = row * z2 + c[j, k]
        acc = acc * z1 + row
    return acc


def poisson_sum_numpy(zeta1, zeta2, w, z1, z2):
    """Sum of w * P(z1; zeta1) * P(z2; zeta2) over the samples."""
    p1 = (1.0 - abs(z1) ** 2) / np.abs(zeta1 - z1) ** 2
    p2 = (1.0 - abs(z2) ** 2) / np.abs(zeta2 - z2) ** 2
    return float(np.sum(w * p1 * p2))


def cauchy_sum_numpy(zeta1, zeta2, wg, z1, z2):
    """Sum of wg / ((1 - z1*conj(zeta1)) (1 - z2*conj(zeta2)))."""
    return complex(np.sum(wg / ((1.0 - z1 * np.conj(zeta1)) * (1.0 - z2 * np.conj(zeta2)))))


def affine_norm_sum_numpy(h, a, b):
    """Inner torus integrals of |n(zeta)|^2 / |a - b zeta|^2 per sample.

    ``h`` has shape (lags, samples): row m holds the lag-m autocorrelation
    sum_k n_{k+m} conj(n_k) of the numerator slice at each sample.  The
    closed form is (h[0] + 2 Re sum_{m>=1} h[m] (conj(b)/conj(a))^m) * w0
    with w0 = 1/(|a|^2 - |b|^2); samples with |a| <= |b| yield +inf.
    """
    gap = np.abs(a) ** 2 - np.abs(b) ** 2
    out = np.full(a.shape, np.inf)
    ok = gap > 0.0
    ratio = np.zeros_like(a)
    ratio[ok] = np.conj(b[ok]) / np.conj(a[ok])
    acc = np.real(h[0]).astype(np.float64).copy()
    pw = np.ones_like(a)
    for m in range(1, h.shape[0]):
        pw = pw * ratio
        acc = acc + 2.0 * np.real(h[m] * pw)
    out[ok] = acc[ok] / gap[ok]
    return out


# -- numba twins -------------------------------------------------------------


@njit(cache=True)
def _poly2_eval_numba(c, z1, z2):  # pragma: no cover - measured via dispatch
    out = np.empty(z1.shape[0], dtype=np.complex128)
    d1 = c.shape[0]
    d2 = c.shape[1]
    for n in range(z1.shape[0]):
        acc = 0.0 + 0.0j
        for j in range(d1 - 1, -1, -1):
            row = c[j, d2 - 1]
            for k in range(d2 - 2, -1, -1):
                row = row * z2[n] + c[j, k]
            acc = acc * z1[n] + row
        out[n] = acc
    return out


@njit(cache=True)
def _poisson_sum_numba(zeta1, zeta2, w, z1, z2):  # pragma: no cover
    m1 = 1.0 - (z1.real * z1.real + z1.imag * z1.imag)
    m2 = 1.0 - (z2.real * z2.real + z2.imag * z2.imag)
    total = 0.0
    for n in range(zeta1.shape[0]):
        d1 = zeta1[n] - z1
        d2 = zeta2[n] - z2
        q1 = d1.real * d1.real + d1.imag * d1.imag
        q2 = d2.real * d2.real + d2.imag * d2.imag
        total += w[n] * (m1 / q1) * (m2 / q2)
    return total


@njit(cache=True)
def _cauchy_sum_numba(zeta1, zeta2, wg, z1, z2):  # pragma: no cover
    total = 0.0 + 0.0j
    for n in range(zeta1.shape[0]):
        total += wg[n] / ((1.0 - z1 * np.conj(zeta1[n])) * (1.0 - z2 * np.conj(zeta2[n])))
    return total


@njit(cache=True)
def _affine_norm_sum_numba(h, a, b):  # pragma: no cover
    out = np.empty(a.shape[0], dtype=np.float64)
    nlag = h.shape[0]
    for n in range(a.shape[0]):
        gap = (a[n].real * a[n].real + a[n].imag * a[n].imag) - (
            b[n].real * b[n].real + b[n].imag * b[n].imag
        )
        if gap <= 0.0:
            out[n] = np.inf
            continue
        ratio = np.conj(b[n]) / np.conj(a[n])
        acc = h[0, n].real
        pw = 1.0 + 0.0j
        for m in range(1, nlag):
            pw = pw * ratio
            acc = acc + 2.0 * (h[m, n] * pw).real
        out[n] = acc / gap
    return out


# -- dispatch -----------------------------------------------------------------

USING_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED

if USING_NUMBA:
    poly2_eval = _poly2_eval_numba
    poisson_sum = _poisson_sum_numba
    cauchy_sum = _cauchy_sum_numba
    affine_norm_sum = _affine_norm_sum_numba
else:
    poly2_eval = poly2_eval_numpy
    poisson_sum = poisson_sum_numpy
    cauchy_sum = cauchy_sum_numpy
    affine_norm_sum = affine_norm_sum_numpy


def backend() -> str:
    return "numba" if USING_NUMBA else "numpy"

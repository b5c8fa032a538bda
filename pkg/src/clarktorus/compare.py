"""Decision engine for mutual absolute continuity with square-integrable density.

Given two rational inner functions and a unimodular alpha, decide whether the
Clark measure of the first is absolutely continuous with respect to that of
the second with an L^2 Radon-Nikodym derivative.  Two certificate routes feed
the verdict: an exact route through the proportionality identity
alpha p2 - p~2 = c (alpha p1 - p~1) plus L^2-ideal membership of p1 in the
sense of q/p2 square-integrability, and a numerical route through containment
of ((alpha - b2)/(alpha - b1)) k_{b1}(., w) in the model space of b2.  The
degenerate lines of both measures are always cross-checked.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .clark import _alpha_pair, degenerate_components
from .groebner import l2_ideal_test
from .polyalg import PolynomialError, poly_to_str, proportional_scalar
from .rif import RationalInnerFunction
from .spaces import hb_membership_certificate

DEFAULT_W_SET = ((0.0, 0.0), (0.3, 0.1), (-0.2, 0.4j))
LINE_MATCH_TOL = 1e-6


@dataclass(frozen=True)
class CompareOptions:
    path: str = "auto"  # 'auto' | 'exact' | 'numeric' | 'both'
    K: int = 16
    grid_n: int = 256
    max_level: int = 20
    orth_tol: float = 1e-6


@dataclass(frozen=True)
class Certificate:
    kind: str
    detail: str
    value: object = None

    def to_json(self) -> dict:
        value = self.value
        if hasattr(value, "to_json"):
            value = value.to_json()
        return {"kind": self.kind, "detail": self.detail, "value": value}


@dataclass(frozen=True)
class ComparisonVerdict:
    answer: str  # 'yes' | 'no' | 'unknown'
    c: object  # exact proportionality constant when found
    direction: dict
    evidence: tuple[Certificate, ...]
    timings: dict = field(compare=False, default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "answer": self.answer.capitalize(),
            "direction": self.direction,
            "evidence": [e.to_json() for e in self.evidence],
            "timings": self.timings,
        }
        if self.c is not None:
            out["c"] = str(self.c)
        return out


def proportionality_constant(
    b1: RationalInnerFunction, b2: RationalInnerFunction, alpha
):
    """c with alpha p2 - p~2 = c (alpha p1 - p~1), or None.

    Exact Gaussian-rational c for exactly unimodular alpha; a float c from
    coefficient matching otherwise.
    """
    g, af = _alpha_pair(alpha)
    if g is not None and b1.p.exact and b2.p.exact:
        r = b2.p * g - b2.ptilde
        s = b1.p * g - b1.ptilde
        if s.is_zero():
            raise PolynomialError("alpha p1 - p~1 vanishes identically")
        return proportional_scalar(r, s)
    r = b2.p.to_float() * complex(af) - b2.ptilde.to_float()
    s = b1.p.to_float() * complex(af) - b1.ptilde.to_float()
    if s.is_zero():
        raise PolynomialError("alpha p1 - p~1 vanishes identically")
    se, sc = max(s.coeffs.items(), key=lambda it: abs(it[1]))
    rc = r.coeffs.get(se)
    if rc is None:
        return None
    c = rc / sc
    diff = r - s * c
    scale = max(abs(v) for v in list(r.coeffs.values()) + [c]) + 1.0
    if any(abs(v) > 1e-10 * scale for v in diff.coeffs.values()):
        return None
    return c


def _lines_contained(lines1, lines2) -> list:
    """Degenerate lines of the first measure missing from the second."""
    missing = []
    for l1 in lines1:
        if l1.mass <= 1e-12:
            continue
        for l2 in lines2:
            if l1.axis == l2.axis and abs(l1.anchor - l2.anchor) <= LINE_MATCH_TOL:
                break
        else:
            missing.append(l1)
    return missing


def compare(
    b1: RationalInnerFunction,
    b2: RationalInnerFunction,
    alpha,
    w_set=DEFAULT_W_SET,
    opts: CompareOptions | None = None,
) -> ComparisonVerdict:
    """Decide sigma_alpha[b1] << sigma_alpha[b2] with L^2 derivative."""
    opts = opts or CompareOptions()
    _, af = _alpha_pair(alpha)
    evidence = []
    timings = {}
    exact_answer = None
    numeric_answer = None
    c = None

    t0 = time.perf_counter()
    c = proportionality_constant(b1, b2, alpha)
    if c is not None:
        evidence.append(
            Certificate(
                "proportionality",
                "alpha p2 - p~2 = c (alpha p1 - p~1)",
                str(c),
            )
        )
    degree_ok = b2.deg[0] >= b1.deg[0] and b2.deg[1] >= b1.deg[1]
    run_exact = opts.path in ("auto", "exact", "both")
    if run_exact and c is not None and degree_ok and b1.p.exact and b2.p.exact:
        l2 = l2_ideal_test(b1.p, b2.p, b2.deg, max_level=opts.max_level)
        evidence.append(
            Certificate("l2-ideal", "p1 against the L^2 ideal of p2", l2)
        )
        if l2.certifies_membership:
            exact_answer = "yes"
        elif l2.kind == "divergent":
            exact_answer = "no"
    run_numeric = opts.path in ("numeric", "both") or (
        opts.path == "auto" and exact_answer is None
    )
    timings["exact"] = time.perf_counter() - t0

    if run_numeric:
        t0 = time.perf_counter()
        finites = 0
        divergents = 0
        total = 0
        for w in w_set:
            cert = hb_membership_certificate(
                b1,
                b2,
                alpha,
                w=w,
                K=opts.K,
                grid_n=opts.grid_n,
                max_level=opts.max_level,
            )
            evidence.append(
                Certificate("hb-membership", f"w = {w}", cert)
            )
            total += 1
            if cert.membership.is_finite:
                if cert.orthogonality is not None and cert.orthogonality.residual <= opts.orth_tol:
                    finites += 1
            elif cert.membership.is_divergent:
                divergents += 1
        if finites > 0:
            numeric_answer = "yes"
        elif divergents == total and total > 0:
            numeric_answer = "no"
        timings["numeric"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    lines1 = degenerate_components(b1, alpha)
    lines2 = degenerate_components(b2, alpha)
    missing = _lines_contained(lines1, lines2)
    evidence.append(
        Certificate(
            "degenerate-lines",
            "every line of sigma1 must appear in sigma2",
            {
                "sigma1": [[l.axis, str(l.anchor), l.mass] for l in lines1],
                "sigma2": [[l.axis, str(l.anchor), l.mass] for l in lines2],
                "missing": [[l.axis, str(l.anchor), l.mass] for l in missing],
            },
        )
    )
    timings["degenerate"] = time.perf_counter() - t0

    answers = {a for a in (exact_answer, numeric_answer) if a is not None}
    if len(answers) == 2:
        answer = "unknown"
        evidence.append(
            Certificate("inconsistency", "exact and numeric routes disagree", sorted(answers))
        )
    elif answers:
        answer = answers.pop()
    else:
        answer = "unknown"
    if missing:
        # a degenerate line of sigma1 that sigma2 lacks rules domination out
        answer = "no"
        evidence.append(
            Certificate(
                "degenerate-obstruction",
                "sigma1 carries a coordinate line absent from sigma2",
                [[l.axis, str(l.anchor), l.mass] for l in missing],
            )
        )

    direction = {
        "b1": poly_to_str(b1.p),
        "b2": poly_to_str(b2.p),
        "deg1": list(b1.deg),
        "deg2": list(b2.deg),
        "alpha": str(alpha),
    }
    return ComparisonVerdict(answer, c, direction, tuple(evidence), timings)

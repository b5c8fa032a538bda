"""Buchberger's algorithm, normal forms, and ideal membership over Q(i).

Everything here is exact: float-coefficient inputs are rejected.  The
combined L^2-ideal test certifies membership of q in the ideal of
polynomials with q/p square-integrable on the bitorus, either through the
polynomial ideal <p, p~> (sufficient, since such quotients are bounded) or
through the boundary-integral classifier.
"""

from __future__ import annotations

from dataclasses import dataclass

from .polyalg import GR_ONE, Poly2, PolynomialError, reflect
from .spaces import MembershipVerdict, RationalFunction, h2_classify


@dataclass(frozen=True)
class MonomialOrder:
    kind: str  # 'lex' | 'grevlex'
    precedence: tuple[str, str] = ("z1", "z2")

    def __post_init__(self):
        if self.kind not in ("lex", "grevlex"):
            raise PolynomialError(f"unknown order kind {self.kind!r}")
        if tuple(self.precedence) not in (("z1", "z2"), ("z2", "z1")):
            raise PolynomialError(f"bad precedence {self.precedence!r}")

    def key(self, exp):
        j, k = exp
        hi, lo = (j, k) if self.precedence[0] == "z1" else (k, j)
        if self.kind == "lex":
            return (hi, lo)
        return (hi + lo, hi)

    def name(self) -> str:
        return f"{self.kind}:{','.join(self.precedence)}"

    @staticmethod
    def parse(text: str) -> "MonomialOrder":
        kind, _, prec = text.partition(":")
        precedence = tuple(prec.split(",")) if prec else ("z1", "z2")
        return MonomialOrder(kind, precedence)


LEX_Z1Z2 = MonomialOrder("lex", ("z1", "z2"))
LEX_Z2Z1 = MonomialOrder("lex", ("z2", "z1"))
GREVLEX_Z1Z2 = MonomialOrder("grevlex", ("z1", "z2"))
GREVLEX_Z2Z1 = MonomialOrder("grevlex", ("z2", "z1"))
ALL_ORDERS = (LEX_Z1Z2, LEX_Z2Z1, GREVLEX_Z1Z2, GREVLEX_Z2Z1)


def _require_exact(p: Poly2):
    if not p.exact:
        raise PolynomialError("exact Gaussian-rational coefficients required")


def leading_term(p: Poly2, order: MonomialOrder):
    if p.is_zero():
        raise PolynomialError("leading term of zero polynomial")
    exp = max(p.coeffs, key=order.key)
    return exp, p.coeffs[exp]


def _mono_divides(a, b) -> bool:
    return a[0] <= b[0] and a[1] <= b[1]


def _mono_lcm(a, b):
    return (max(a[0], b[0]), max(a[1], b[1]))


def _term_mul(p: Poly2, exp, coeff) -> Poly2:
    return Poly2(
        {(j + exp[0], k + exp[1]): c * coeff for (j, k), c in p.coeffs.items()}
    )


def s_polynomial(f: Poly2, g: Poly2, order: MonomialOrder) -> Poly2:
    ef, cf = leading_term(f, order)
    eg, cg = leading_term(g, order)
    lcm = _mono_lcm(ef, eg)
    tf = _term_mul(f, (lcm[0] - ef[0], lcm[1] - ef[1]), GR_ONE / cf)
    tg = _term_mul(g, (lcm[0] - eg[0], lcm[1] - eg[1]), GR_ONE / cg)
    return tf - tg


def normal_form(q: Poly2, basis, order: MonomialOrder | None = None) -> Poly2:
    """Full multivariate division remainder of q by the basis."""
    if isinstance(basis, GroebnerBasis):
        order = order or basis.order
        gens = basis.generators
    else:
        gens = tuple(basis)
        order = order or LEX_Z1Z2
    _require_exact(q)
    for g in gens:
        _require_exact(g)
    lead = [leading_term(g, order) for g in gens]
    work = q
    remainder = Poly2.zero()
    while not work.is_zero():
        exp, coeff = leading_term(work, order)
        for g, (eg, cg) in zip(gens, lead):
            if _mono_divides(eg, exp):
                work = work - _term_mul(g, (exp[0] - eg[0], exp[1] - eg[1]), coeff / cg)
                break
        else:
            remainder = remainder + Poly2.monomial(*exp, coeff)
            work = work - Poly2.monomial(*exp, coeff)
    return remainder


@dataclass(frozen=True)
class GroebnerBasis:
    generators: tuple[Poly2, ...]
    order: MonomialOrder
    reduced: bool = True

    def normal_form(self, q: Poly2) -> Poly2:
        return normal_form(q, self.generators, self.order)

    def contains(self, q: Poly2) -> bool:
        return self.normal_form(q).is_zero()

    def verify(self) -> bool:
        """Every S-polynomial of basis pairs reduces to zero."""
        gens = self.generators
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                s = s_polynomial(gens[i], gens[j], self.order)
                if not s.is_zero() and not normal_form(s, gens, self.order).is_zero():
                    return False
        return True

    def to_json(self) -> dict:
        from .polyalg import poly_to_str

        return {
            "order": self.order.name(),
            "basis": [poly_to_str(g) for g in self.generators],
        }


def buchberger(gens, order: MonomialOrder = LEX_Z1Z2) -> GroebnerBasis:
    """Reduced Groebner basis via Buchberger with the coprime and chain criteria."""
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise PolynomialError("no nonzero generators")
    for g in gens:
        _require_exact(g)
    basis = [_monic(g, order) for g in gens]
    pairs = {(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))}
    done = set()
    while pairs:
        i, j = min(
            pairs,
            key=lambda ij: order.key(
                _mono_lcm(
                    leading_term(basis[ij[0]], order)[0],
                    leading_term(basis[ij[1]], order)[0],
                )
            ),
        )
        pairs.discard((i, j))
        done.add((i, j))
        ei = leading_term(basis[i], order)[0]
        ej = leading_term(basis[j], order)[0]
        lcm = _mono_lcm(ei, ej)
        if (ei[0] + ej[0], ei[1] + ej[1]) == lcm:
            continue  # coprime leading terms
        if _chain_skippable(basis, order, i, j, lcm, done):
            continue
        r = normal_form(s_polynomial(basis[i], basis[j], order), basis, order)
        if r.is_zero():
            continue
        basis.append(_monic(r, order))
        k = len(basis) - 1
        pairs |= {(i2, k) for i2 in range(k)}
    return GroebnerBasis(tuple(_interreduce(basis, order)), order, reduced=True)


def _chain_skippable(basis, order, i, j, lcm, done) -> bool:
    for k in range(len(basis)):
        if k in (i, j):
            continue
        ek = leading_term(basis[k], order)[0]
        if not _mono_divides(ek, lcm):
            continue
        a = (min(i, k), max(i, k))
        b = (min(j, k), max(j, k))
        if a in done and b in done:
            return True
    return False


def _monic(p: Poly2, order: MonomialOrder) -> Poly2:
    _, c = leading_term(p, order)
    return p * (GR_ONE / c)


def _interreduce(basis, order):
    # drop generators whose leading term another one divides, then fully
    # reduce each against the rest
    basis = list(basis)
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            ei = leading_term(basis[i], order)[0]
            for j in range(len(basis)):
                if i != j and _mono_divides(leading_term(basis[j], order)[0], ei):
                    basis.pop(i)
                    changed = True
                    break
            if changed:
                break
    out = []
    for i, g in enumerate(basis):
        rest = basis[:i] + basis[i + 1 :]
        r = normal_form(g, rest, order) if rest else g
        if not r.is_zero():
            out.append(_monic(r, order))
    out.sort(key=lambda g: order.key(leading_term(g, order)[0]), reverse=True)
    return out


def ideal_member(q: Poly2, gens, order: MonomialOrder | None = None) -> bool:
    """q in <gens>, decided through a Groebner basis (order-independent)."""
    basis = buchberger(list(gens), order or LEX_Z1Z2)
    return basis.contains(q)


@dataclass(frozen=True)
class L2IdealVerdict:
    """Outcome of the combined exact/quadrature L^2-ideal membership test."""

    kind: str  # 'member' | 'finite' | 'divergent' | 'inconclusive'
    h2: MembershipVerdict | None = None

    @property
    def certifies_membership(self) -> bool:
        return self.kind in ("member", "finite")

    @property
    def norm2(self):
        return self.h2.norm2 if self.h2 is not None else None

    def to_json(self) -> dict:
        out = {"class": self.kind}
        if self.h2 is not None:
            out["h2"] = self.h2.to_json()
        return out


def l2_ideal_test(q: Poly2, p: Poly2, deg, max_level: int = 20) -> L2IdealVerdict:
    """Certify q/p in L^2 of the bitorus.

    Membership in <p, p~> is sufficient (such quotients are bounded); failing
    that, the boundary-integral classifier decides.
    """
    _require_exact(q)
    _require_exact(p)
    pt = reflect(p, deg)
    if ideal_member(q, [p, pt]):
        return L2IdealVerdict("member")
    verdict = h2_classify(
        RationalFunction(q.to_float(), p.to_float()), max_level=max_level
    )
    return L2IdealVerdict(verdict.kind, verdict)

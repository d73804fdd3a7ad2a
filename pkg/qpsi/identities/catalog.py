from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from ..core.qpoch import QBase
from ..core.qseries import BILATERAL, SeriesSpec, plain, qpow
from .coefficients import alpha_block, beta_block, gamma_block, tenphi9_derived
from .forms import Sides, Term, phi_vwp, psi_vwp, semi_vwp
from .schema import IdentityId

Values = dict[str, Any]


@dataclass(frozen=True)
class IdentityDef:
    id: IdentityId
    title: str
    shape: str
    free: tuple[str, ...]
    build: Callable[[Values, int, QBase], Sides]
    derive: Callable[[Values], Values] = lambda v: {}
    constraint: str = ""
    # name -> expression whose modulus must stay below 1
    moduli: tuple[tuple[str, Callable[[Values], Any]], ...] = ()
    # name -> expression whose modulus must exceed pole_distance_min
    guards: tuple[tuple[str, Callable[[Values], Any]], ...] = ()
    # moduli that make the n -> infinity limit legitimate
    limit_moduli: tuple[tuple[str, Callable[[Values], Any]], ...] = ()
    semi_finite: bool = False
    skippable: bool = False
    derived_names: tuple[str, ...] = field(default=())


def _b_from_cdef(v: Values) -> Values:
    q, a, c, d, e, f = (v[k] for k in "qacdef")
    return {"b": q * a * a / (c * d * e * f)}


def _lam_from_bcd(v: Values) -> Values:
    q, a, b, c, d = (v[k] for k in "qabcd")
    return {"lam": q * a * a / (b * c * d)}


# ---------- supporting closed-form sums ----------

def _sixphi5(v: Values, n: int, base: QBase) -> Sides:
    q, a, b, c, d = (v[k] for k in "qabcd")
    z = a * q / (b * c * d)
    lhs = Term("6phi5", series=phi_vwp(a, (b, c, d), (a * q / b, a * q / c, a * q / d), z, base, "6phi5"))
    rhs = Term(
        "products",
        inf_num=(a * q, a * q / (b * c), a * q / (b * d), a * q / (c * d)),
        inf_den=(a * q / b, a * q / c, a * q / d, z),
    )
    return Sides((lhs,), (rhs,))


def _onepsi1(v: Values, n: int, base: QBase) -> Sides:
    q, a, b, z = (v[k] for k in "qabz")
    lhs = Term("1psi1", series=SeriesSpec((plain(a),), (plain(b),), z, BILATERAL, base, "1psi1"))
    rhs = Term(
        "products",
        inf_num=(q, b / a, a * z, q / (a * z)),
        inf_den=(b, q / a, z, b / (a * z)),
    )
    return Sides((lhs,), (rhs,))


def _sixpsi6_sum(v: Values, n: int, base: QBase) -> Sides:
    q, a, b, c, d, e = (v[k] for k in "qabcde")
    z = q * a * a / (b * c * d * e)
    # e == a makes (aq/e)_k = (q)_k: every negative-index term vanishes
    aq_e = qpow(1) if e == a else a * q / e
    lhs = Term("6psi6", series=psi_vwp(a, (b, c, d, e), (a * q / b, a * q / c, a * q / d, aq_e), z, base, "6psi6"))
    rhs = Term(
        "products",
        inf_num=(q, a * q, q / a, a * q / (b * c), a * q / (b * d), a * q / (b * e),
                 a * q / (c * d), a * q / (c * e), a * q / (d * e)),
        inf_den=(q / b, q / c, q / d, q / e, a * q / b, a * q / c, a * q / d, a * q / e, z),
    )
    return Sides((lhs,), (rhs,))


# ---------- 8phi7 summation extension and its semi-finite form ----------

def _eightphi7_ext(v: Values, n: int, base: QBase) -> Sides:
    q, a, b, c, d, e, f = (v[k] for k in "qabcdef")
    others = (c, d, e, f)
    lhs = Term("8phi7", series=phi_vwp(a, (b,) + others, tuple(a * q / x for x in (b,) + others), q, base, "8phi7"))
    b_series = phi_vwp(
        b * b / a, (b,) + tuple(b * x / a for x in others), (b * q / a,) + tuple(b * q / x for x in others),
        q, base, "b-side 8phi7",
    )
    first = Term(
        "b-side 8phi7 term",
        scalars=((b, 1), (a, -1)),
        inf_num=(a * q,) + others + (b * q / a,) + tuple(b * q / x for x in others),
        inf_den=tuple(a * q / x for x in (b,) + others) + tuple(b * x / a for x in others) + (b * b * q / a,),
        series=b_series,
    )
    second = Term(
        "product term",
        inf_num=(a * q, b / a) + _pair_quotients(a * q, others),
        inf_den=tuple(a * q / x for x in others) + tuple(b * x / a for x in others),
    )
    return Sides((lhs,), (first, second))


def _pair_quotients(top, xs) -> tuple:
    return tuple(top / (xs[i] * xs[j]) for i in range(len(xs)) for j in range(i + 1, len(xs)))


def _semi_6psi6(v: Values, n: int, base: QBase) -> Sides:
    q, a, b, c, d, e, f = (v[k] for k in "qabcdef")
    others = (c, d, e, f)
    qn = q**n
    lhs = Term(
        "semi-finite sum",
        series=semi_vwp(a, q, n, (b * qn,) + others, (a * q / (b * qn),) + tuple(a * q / x for x in others),
                        q, base, "semi-finite sum"),
    )
    b_series = phi_vwp(
        b * b * qn * qn / a,
        (b,) + tuple(b * x * qn / a for x in others),
        (b * q * qn * qn / a,) + tuple(b * q * qn / x for x in others),
        q, base, "b-side 8phi7",
    )
    first = Term(
        "b-side 8phi7 term",
        scalars=((b, n + 1), (a, -1)),
        inf_num=(a * q,) + others + (b * q * qn * qn / a,) + tuple(b * q * qn / x for x in others),
        inf_den=tuple(a * q / x for x in (b,) + others)
        + tuple(b * x * qn / a for x in others)
        + (b * b * q * qn * qn / a,),
        fin_num=(q, q / a),
        fin_den=(b, b / a),
        series=b_series,
    )
    second = Term(
        "product term",
        inf_num=(a * q,) + _pair_quotients(a * q, others) + (b * qn / a,),
        inf_den=tuple(a * q / x for x in others) + tuple(b * x * qn / a for x in others),
        fin_num=(q, q / a),
        fin_den=(b,) + tuple(q / x for x in others),
    )
    return Sides((lhs,), (first, second), n)


# ---------- 8phi7 transformation, semi-finite form, 6psi6 transformation ----------

def _trans_prefactor(v: Values) -> dict:
    q, a, e, f, lam = (v[k] for k in ("q", "a", "e", "f", "lam"))
    return {
        "inf_num": (a * q, a * q / (e * f), lam * q / e, lam * q / f),
        "inf_den": (a * q / e, a * q / f, lam * q / (e * f), lam * q),
    }


def _eightphi7_trans(v: Values, n: int, base: QBase) -> Sides:
    q, a, b, c, d, e, f, lam = (v[k] for k in ("q", "a", "b", "c", "d", "e", "f", "lam"))
    params = (b, c, d, e, f)
    z = q * q * a * a / (b * c * d * e * f)
    lhs = Term("8phi7", series=phi_vwp(a, params, tuple(a * q / x for x in params), z, base, "8phi7"))
    rhs = Term(
        "lam-side 8phi7 term",
        series=phi_vwp(
            lam, (lam * b / a, lam * c / a, lam * d / a, e, f),
            (a * q / b, a * q / c, a * q / d, lam * q / e, lam * q / f),
            a * q / (e * f), base, "lam-side 8phi7",
        ),
        **_trans_prefactor(v),
    )
    return Sides((lhs,), (rhs,))


def _semi_8phi7(v: Values, n: int, base: QBase) -> Sides:
    q, a, b, c, d, e, f, lam = (v[k] for k in ("q", "a", "b", "c", "d", "e", "f", "lam"))
    qn = q**n
    z = q * q * a * a / (b * c * d * e * f)
    lhs = Term(
        "semi-finite sum",
        series=semi_vwp(
            a, q, n, (b * qn, c, d, e, f),
            (a * q / (b * qn), a * q / c, a * q / d, a * q / e, a * q / f),
            z, base, "semi-finite sum",
        ),
    )
    rhs = Term(
        "lam-side semi-finite term",
        fin_num=(lam * b / a, q / a, a * q / (lam * c), a * q / (lam * d)),
        fin_den=(b, q / lam, q / c, q / d),
        series=semi_vwp(
            lam, q, n, (lam * b * qn / a, lam * c / a, lam * d / a, e, f),
            (a * q / (b * qn), a * q / c, a * q / d, lam * q / e, lam * q / f),
            a * q / (e * f), base, "lam-side semi-finite sum",
        ),
        **_trans_prefactor(v),
    )
    return Sides((lhs,), (rhs,), n)


def _sixpsi6_trans(v: Values, n: int, base: QBase) -> Sides:
    q, a, b, c, d, e, f, lam = (v[k] for k in ("q", "a", "b", "c", "d", "e", "f", "lam"))
    z = q * a * a / (c * d * e * f)
    lhs = Term("6psi6", series=psi_vwp(a, (c, d, e, f), tuple(a * q / x for x in (c, d, e, f)), z, base, "6psi6"))
    rhs = Term(
        "lam-side 6psi6 term",
        inf_num=(a * q, q / a, a * q / (e * f), a * q / (c * d), lam * q / e, lam * q / f,
                 a * q / (lam * c), a * q / (lam * d)),
        inf_den=(a * q / e, a * q / f, q / c, q / d, lam * q, q / lam, lam * q / (e * f), b),
        series=psi_vwp(
            lam, (lam * c / a, lam * d / a, e, f),
            (a * q / c, a * q / d, lam * q / e, lam * q / f), z, base, "lam-side 6psi6",
        ),
    )
    return Sides((lhs,), (rhs,))


def sixpsi6_trans_prefactor(v: Values) -> Term:
    """The product prefactor of the 6psi6 transformation on its own."""
    q, a, b, c, d, e, f, lam = (v[k] for k in ("q", "a", "b", "c", "d", "e", "f", "lam"))
    base = QBase(complex(q))
    rhs = _sixpsi6_trans(v, 0, base).rhs[0]
    return Term("prefactor", inf_num=rhs.inf_num, inf_den=rhs.inf_den)


# ---------- four-term 10phi9 family ----------

def _tenphi9_4term(v: Values, n: int, base: QBase) -> Sides:
    q, a, b, c, d, e, f, g, h, lam = (v[k] for k in ("q", "a", "b", "c", "d", "e", "f", "g", "h", "lam"))
    seven = (b, c, d, e, f, g, h)
    six = seven[1:]
    fgh = (f, g, h)
    cde = (c, d, e)
    first = Term("10phi9", series=phi_vwp(a, seven, tuple(a * q / x for x in seven), q, base, "10phi9"))
    second = Term(
        "b-side 10phi9 term",
        inf_num=(a * q, b / a) + six + tuple(b * q / x for x in six),
        inf_den=(b * b * q / a, a / b) + tuple(a * q / x for x in six) + tuple(b * x / a for x in six),
        series=phi_vwp(
            b * b / a, (b,) + tuple(b * x / a for x in six), (b * q / a,) + tuple(b * q / x for x in six),
            q, base, "b-side 10phi9",
        ),
    )
    third = Term(
        "lam-side 10phi9 term",
        inf_num=(a * q, b / a) + tuple(lam * q / x for x in fgh) + tuple(b * x / lam for x in fgh),
        inf_den=(lam * q, b / lam) + tuple(a * q / x for x in fgh) + tuple(b * x / a for x in fgh),
        series=phi_vwp(
            lam, (b,) + tuple(lam * x / a for x in cde) + fgh,
            (lam * q / b,) + tuple(a * q / x for x in cde) + tuple(lam * q / x for x in fgh),
            q, base, "lam-side 10phi9",
        ),
    )
    fourth = Term(
        "b/lam-side 10phi9 term",
        inf_num=(a * q, b / a) + fgh + tuple(b * q / x for x in fgh)
        + tuple(lam * x / a for x in cde) + tuple(a * b * q / (lam * x) for x in cde),
        inf_den=(b * b * q / lam, lam / b) + tuple(a * q / x for x in six) + tuple(b * x / a for x in six),
        series=phi_vwp(
            b * b / lam, (b,) + tuple(b * x / a for x in cde) + tuple(b * x / lam for x in fgh),
            (b * q / lam,) + tuple(a * b * q / (lam * x) for x in cde) + tuple(b * q / x for x in fgh),
            q, base, "b/lam-side 10phi9",
        ),
    )
    return Sides((first, second), (third, fourth))


def _b_series_pair(v: Values, n: int, base: QBase) -> tuple:
    """The two b-side 10phi9 series of the semi-finite form."""
    q, a, b, c, d, e, f, g, h, lam = (v[k] for k in ("q", "a", "b", "c", "d", "e", "f", "g", "h", "lam"))
    qn = q**n
    fgh = (f, g, h)
    phi1 = phi_vwp(
        b * b / a,
        (b / qn, b * c * qn / a, b * d / a, b * e / a) + tuple(b * x / a for x in fgh),
        (b * q * qn / a, b * q / (c * qn), b * q / d, b * q / e) + tuple(b * q / x for x in fgh),
        q, base, "b-side 10phi9",
    )
    phi2 = phi_vwp(
        b * b / lam,
        (b / qn, b * c * qn / a, b * d / a, b * e / a) + tuple(b * x / lam for x in fgh),
        (b * q * qn / lam, a * b * q / (lam * c * qn), a * b * q / (lam * d), a * b * q / (lam * e))
        + tuple(b * q / x for x in fgh),
        q, base, "b/lam-side 10phi9",
    )
    return phi1, phi2


def _with_series(block: Term, label: str, series) -> Term:
    return Term(
        label, block.sign, block.scalars, block.inf_num, block.inf_den, block.fin_num, block.fin_den, series
    )


def _semi_10phi9(v: Values, n: int, base: QBase) -> Sides:
    q, a, b, c, d, e, f, g, h, lam = (v[k] for k in ("q", "a", "b", "c", "d", "e", "f", "g", "h", "lam"))
    qn = q**n
    fgh = (f, g, h)
    first = Term(
        "semi-finite sum",
        series=semi_vwp(
            a, q, n, (b, c * qn, d, e) + fgh,
            (a * q / b, a * q / (c * qn), a * q / d, a * q / e) + tuple(a * q / x for x in fgh),
            q, base, "semi-finite sum",
        ),
    )
    phi1, phi2 = _b_series_pair(v, n, base)
    second = _with_series(alpha_block(v, n), "alpha_n b-side 10phi9", phi1)
    third = _with_series(
        beta_block(v, n),
        "beta_n lam-side semi-finite sum",
        semi_vwp(
            lam, q, n, (b, lam * c * qn / a, lam * d / a, lam * e / a) + fgh,
            (lam * q / b, a * q / (c * qn), a * q / d, a * q / e) + tuple(lam * q / x for x in fgh),
            q, base, "lam-side semi-finite sum",
        ),
    )
    fourth = _with_series(gamma_block(v, n), "gamma_n b/lam-side 10phi9", phi2)
    return Sides((first, second), (third, fourth), n)


def _eightpsi8_trans(v: Values, n: int, base: QBase) -> Sides:
    q, a, b, c, d, e, f, g, h, lam = (v[k] for k in ("q", "a", "b", "c", "d", "e", "f", "g", "h", "lam"))
    six = (b, d, e, f, g, h)
    fgh = (f, g, h)
    de = (d, e)
    dfgh = (d, e, f, g, h)
    lhs = Term("8psi8", series=psi_vwp(a, six, tuple(a * q / x for x in six), c, base, "8psi8"))
    first = Term(
        "lam-side 8psi8 term",
        inf_num=(a * q, q / a, lam * c / a) + tuple(a * q / (lam * x) for x in de) + (b / a,)
        + tuple(b * x / lam for x in fgh) + tuple(lam * q / x for x in fgh),
        inf_den=(lam * q, q / lam, c) + tuple(q / x for x in de) + (b / lam,)
        + tuple(b * x / a for x in fgh) + tuple(a * q / x for x in fgh),
        series=psi_vwp(
            lam, (b,) + tuple(lam * x / a for x in de) + fgh,
            (lam * q / b,) + tuple(a * q / x for x in de) + tuple(lam * q / x for x in fgh),
            lam * c / a, base, "lam-side 8psi8",
        ),
    )
    second = Term(
        "b-side 8phi7 term",
        scalars=((b, 1), (a, -1)),
        inf_num=(q, q / a, c / b, a * q, b * q / c) + tuple(b * q / x for x in dfgh) + dfgh,
        inf_den=(q / b, c / a, b * b * q / a, a * q / b, a * q / c)
        + tuple(b * x / a for x in dfgh) + tuple(a * q / x for x in dfgh),
        series=phi_vwp(
            b * b / a, tuple(b * x / a for x in dfgh), tuple(b * q / x for x in dfgh), c, base, "b-side 8phi7",
        ),
    )
    third = Term(
        "b/lam-side 8phi7 term",
        inf_num=(q, q / a, b / a) + tuple(a * q / (lam * x) for x in de) + (lam * c / (a * b), a * q) + fgh
        + tuple(lam * x / a for x in (c, d, e)) + tuple(b * q / x for x in fgh)
        + tuple(a * b * q / (lam * x) for x in (c, d, e)),
        inf_den=(c, c / a, q / b) + tuple(q / x for x in de) + (q * b / lam, b * b * q / lam)
        + tuple(a * q / x for x in fgh) + tuple(b * x / a for x in dfgh) + (lam / b,)
        + tuple(a * q / x for x in (c, d, e)),
        series=phi_vwp(
            b * b / lam, tuple(b * x / a for x in de) + tuple(b * x / lam for x in fgh),
            tuple(a * b * q / (lam * x) for x in de) + tuple(b * q / x for x in fgh),
            lam * c / a, base, "b/lam-side 8phi7",
        ),
    )
    return Sides((lhs,), (first, second, third))


# ---------- registry ----------

_TRANS_MODULI = (
    ("|q^2a^2/bcdef|", lambda v: v["q"] ** 2 * v["a"] ** 2 / (v["b"] * v["c"] * v["d"] * v["e"] * v["f"])),
    ("|aq/ef|", lambda v: v["a"] * v["q"] / (v["e"] * v["f"])),
)
_QA2_CDEF = ("|qa^2/cdef|", lambda v: v["q"] * v["a"] ** 2 / (v["c"] * v["d"] * v["e"] * v["f"]))
_C_MODULI = (
    ("|c|", lambda v: v["c"]),
    ("|aq/de|", lambda v: v["a"] * v["q"] / (v["d"] * v["e"])),
)

IDENTITIES: dict[IdentityId, IdentityDef] = {}


def _register(d: IdentityDef) -> None:
    IDENTITIES[d.id] = d


_register(IdentityDef(
    IdentityId.SIXPHI5_SUM, "very-well-poised 6phi5 summation", "6phi5 = products",
    ("a", "b", "c", "d"), _sixphi5,
    moduli=(("|aq/bcd|", lambda v: v["a"] * v["q"] / (v["b"] * v["c"] * v["d"])),),
))
_register(IdentityDef(
    IdentityId.ONEPSI1_SUM, "Ramanujan's 1psi1 summation", "1psi1 = products",
    ("a", "b", "z"), _onepsi1,
    moduli=(("|z|", lambda v: v["z"]), ("|b/az|", lambda v: v["b"] / (v["a"] * v["z"]))),
))
_register(IdentityDef(
    IdentityId.SIXPSI6_SUM, "Bailey's very-well-poised 6psi6 summation", "6psi6 = products",
    ("a", "b", "c", "d", "e"), _sixpsi6_sum,
    moduli=(("|qa^2/bcde|", lambda v: v["q"] * v["a"] ** 2 / (v["b"] * v["c"] * v["d"] * v["e"])),),
))
_register(IdentityDef(
    IdentityId.EIGHTPHI7_EXT, "nonterminating extension of Jackson's 8phi7 sum", "8phi7 = 8phi7 term + products",
    ("a", "c", "d", "e", "f"), _eightphi7_ext, _b_from_cdef, "b = qa^2/cdef",
    skippable=True, derived_names=("b",),
))
_register(IdentityDef(
    IdentityId.SEMI_6PSI6, "semi-finite form of the 6psi6 summation", "sum_{k>=-n} = 8phi7 term + products",
    ("a", "c", "d", "e", "f"), _semi_6psi6, _b_from_cdef, "b = qa^2/cdef",
    limit_moduli=(("|b|", lambda v: v["b"]),),
    semi_finite=True, skippable=True, derived_names=("b",),
))
_register(IdentityDef(
    IdentityId.EIGHTPHI7_TRANS, "nonterminating very-well-poised 8phi7 transformation", "8phi7 = products x 8phi7",
    ("a", "b", "c", "d", "e", "f"), _eightphi7_trans, _lam_from_bcd, "lam = qa^2/bcd",
    moduli=_TRANS_MODULI, derived_names=("lam",),
))
_register(IdentityDef(
    IdentityId.SEMI_8PHI7, "semi-finite form of the 8phi7 transformation", "sum_{k>=-n} = products x sum_{k>=-n}",
    ("a", "b", "c", "d", "e", "f"), _semi_8phi7, _lam_from_bcd, "lam = qa^2/bcd",
    moduli=_TRANS_MODULI, limit_moduli=(_QA2_CDEF,), semi_finite=True, derived_names=("lam",),
))
_register(IdentityDef(
    IdentityId.SIXPSI6_TRANS, "6psi6 transformation with an extra parameter", "6psi6 = products x 6psi6",
    ("a", "b", "c", "d", "e", "f"), _sixpsi6_trans, _lam_from_bcd, "lam = qa^2/bcd",
    moduli=(_QA2_CDEF,), derived_names=("lam",),
))
_register(IdentityDef(
    IdentityId.TENPHI9_4TERM, "Bailey's four-term 10phi9 transformation", "10phi9 + term = term + term",
    ("a", "b", "d", "e", "f", "g", "h"), _tenphi9_4term, tenphi9_derived,
    "c = q^2a^3/bdefgh, lam = qa^2/cde", derived_names=("c", "lam"),
))
_register(IdentityDef(
    IdentityId.SEMI_10PHI9, "semi-finite form of the four-term 10phi9 transformation",
    "sum_{k>=-n} + alpha_n 10phi9 = beta_n sum_{k>=-n} + gamma_n 10phi9",
    ("a", "b", "d", "e", "f", "g", "h"), _semi_10phi9, tenphi9_derived,
    "c = q^2a^3/bdefgh, lam = qa^2/cde",
    limit_moduli=_C_MODULI, semi_finite=True, derived_names=("c", "lam"),
))
_register(IdentityDef(
    IdentityId.EIGHTPSI8_TRANS, "8psi8 transformation into an 8psi8 and two 8phi7", "8psi8 = 8psi8 term + 8phi7 term + 8phi7 term",
    ("a", "b", "d", "e", "f", "g", "h"), _eightpsi8_trans, tenphi9_derived,
    "c = q^2a^3/bdefgh, lam = qa^2/cde",
    moduli=_C_MODULI,
    guards=(("|lam - a|", lambda v: v["lam"] - v["a"]), ("|b - a|", lambda v: v["b"] - v["a"])),
    derived_names=("c", "lam"),
))

# semi-finite identity -> identity its n -> infinity limit reaches
LIMIT_TARGETS = {
    IdentityId.SEMI_6PSI6: IdentityId.SIXPSI6_SUM,
    IdentityId.SEMI_8PHI7: IdentityId.SIXPSI6_TRANS,
    IdentityId.SEMI_10PHI9: IdentityId.EIGHTPSI8_TRANS,
}


def get_identity(identity) -> IdentityDef:
    return IDENTITIES[IdentityId(identity)]

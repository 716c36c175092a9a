"""Exact weighted inner products of Gaussian polynomials via Wick moments.

Every integrand appearing in the verification suite is a polynomial times a
centered Gaussian on R^(2n), so inner products reduce to finitely many
Gaussian moments.  Moments are evaluated by the Isserlis recursion on one
variable, memoized per weight, which keeps the whole suite free of
quadrature error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import matrices as mx
from .errors import (
    DegreeCapExceeded,
    DimensionMismatch,
    IncompleteFamily,
    MExponentMismatch,
    NonIntegrableWeight,
)
from .gausspoly import GaussPoly, PolyC, annihilation_ops, apply_op, creation_ops, multi_indices
from .model import GeneratorData, WeightData

#: default cap on the total real degree of a requested moment
DEFAULT_DEGREE_CAP = 24


@dataclass(frozen=True)
class RealQuadraticForm:
    """Real positive definite form -w^T M_R w of a combined Gaussian exponent.

    ``normalizer`` is the plain Gaussian mass pi^n (det M_R)^(-1/2) over
    R^(2n) coordinates w = (Re z, Im z).
    """

    M_R: np.ndarray
    normalizer: float


@dataclass
class MomentCache:
    """Memoized centered Gaussian moments for one combined weight.

    ``covariance`` is (2 M_R)^(-1); ``memo`` maps real multi-indices over
    the 2n coordinates to moment values.  The cache is the only mutable
    object in this module and must stay confined to one evaluation context.
    """

    form: RealQuadraticForm
    covariance: np.ndarray
    exponent: np.ndarray
    degree_cap: int = DEFAULT_DEGREE_CAP
    memo: dict = field(default_factory=dict)
    key_memo: dict = field(default_factory=dict)


def combined_form(wd: WeightData, M_F, M_G, tol: float = 1e-9) -> RealQuadraticForm:
    """Real form of |exp factors| x weight for a pair of Gaussian exponents.

    The two exponents must agree (otherwise the combined exponent acquires a
    non-real part and the product is not integrable against the weight in
    this representation).  Positive definiteness is required; failures flag
    an invalid generator or mismatched exponents.
    """
    M_F = mx.as_square(M_F, "M_F")
    M_G = mx.as_square(M_G, "M_G")
    scale = max(1.0, mx.max_abs(M_F), mx.max_abs(M_G))
    if mx.max_abs(M_F - M_G) > tol * scale:
        raise NonIntegrableWeight("mismatched Gaussian exponents")
    m_sym = 0.5 * (M_F + M_G)
    m_r = 2.0 * mx.real_quadratic_form(wd.phi_zzbar, wd.phi_zz + m_sym)
    try:
        np.linalg.cholesky(m_r)
    except np.linalg.LinAlgError as exc:
        raise NonIntegrableWeight(
            "combined exponent is not positive definite"
        ) from exc
    n = wd.n
    normalizer = math.pi**n / math.sqrt(float(np.linalg.det(m_r)))
    return RealQuadraticForm(M_R=mx.frozen(m_r, dtype=float), normalizer=normalizer)


def _cache_from_form(form: RealQuadraticForm, M, degree_cap: int) -> MomentCache:
    cov = np.linalg.inv(2.0 * form.M_R)
    cov = 0.5 * (cov + cov.T)
    return MomentCache(
        form=form,
        covariance=mx.frozen(cov, dtype=float),
        exponent=mx.frozen(M),
        degree_cap=degree_cap,
    )


def make_moment_cache(
    wd: WeightData, M, degree_cap: int = DEFAULT_DEGREE_CAP
) -> MomentCache:
    """Moment cache for inner products of Gaussian polynomials sharing M."""
    return _cache_from_form(combined_form(wd, M, M), M, degree_cap)


def wick_moment(mc: MomentCache, beta) -> float:
    """Centered Gaussian moment E[w^beta] under the cached covariance.

    Odd total degrees vanish; even ones follow the Isserlis recursion on the
    first active variable.
    """
    beta = tuple(int(b) for b in beta)
    if len(beta) != mc.covariance.shape[0]:
        raise DimensionMismatch("beta must index the 2n real coordinates")
    if sum(beta) > mc.degree_cap:
        raise DegreeCapExceeded(
            f"moment degree {sum(beta)} exceeds cap {mc.degree_cap}"
        )
    return _moment(mc, beta)


def _moment(mc: MomentCache, beta: tuple[int, ...]) -> float:
    memo = mc.memo
    val = memo.get(beta)
    if val is not None:
        return val
    total = sum(beta)
    if total == 0:
        val = 1.0
    elif total % 2 == 1:
        val = 0.0
    else:
        j = next(i for i, b in enumerate(beta) if b)
        rest = list(beta)
        rest[j] -= 1
        cov = mc.covariance
        acc = 0.0
        for k, bk in enumerate(rest):
            if bk:
                child = list(rest)
                child[k] -= 1
                acc += cov[j, k] * bk * _moment(mc, tuple(child))
        val = acc
    memo[beta] = val
    return val


@lru_cache(maxsize=None)
def _real_monomial(alpha: tuple[int, ...], conjugate: bool):
    """Expansion of z^alpha (or zbar^alpha) into monomials in (x, y).

    Returns an integer exponent array of shape (m, 2n) and matching complex
    coefficients; cached since low-degree monomials recur constantly.
    """
    n = len(alpha)
    exps = np.zeros((1, 2 * n), dtype=np.int64)
    coeffs = np.ones(1, dtype=complex)
    unit = -1j if conjugate else 1j
    for i, p in enumerate(alpha):
        if p == 0:
            continue
        ks = np.arange(p + 1)
        binco = np.array([math.comb(p, int(k)) for k in ks], dtype=complex)
        binco = binco * unit**ks
        m = exps.shape[0]
        exps = np.repeat(exps, p + 1, axis=0)
        coeffs = np.repeat(coeffs, p + 1)
        exps[:, i] += np.tile(p - ks, m)
        exps[:, n + i] += np.tile(ks, m)
        coeffs = coeffs * np.tile(binco, m)
    exps.setflags(write=False)
    coeffs.setflags(write=False)
    return exps, coeffs


def _expand_poly(poly: PolyC, conjugate: bool):
    """Real-coordinate expansion of P(z) or conj(P(z)) as exponent/coeff arrays."""
    if not poly.terms:
        return np.zeros((0, 2 * poly.n), dtype=np.int64), np.zeros(0, dtype=complex)
    blocks_e = []
    blocks_c = []
    for mono, c in poly.terms.items():
        e, base = _real_monomial(mono, conjugate)
        blocks_e.append(e)
        blocks_c.append((np.conj(c) if conjugate else c) * base)
    exps = np.concatenate(blocks_e, axis=0)
    coeffs = np.concatenate(blocks_c)
    rows, inverse = np.unique(exps, axis=0, return_inverse=True)
    agg = np.zeros(rows.shape[0], dtype=complex)
    np.add.at(agg, inverse.reshape(-1), coeffs)
    return rows, agg


def hphi_inner(
    F: GaussPoly, G: GaussPoly, wd: WeightData, cache: MomentCache | None = None
) -> complex:
    """Weighted inner product (F, G) = integral F conj(G) e^(-2 Phi).

    Expands F(z) conj(G(z)) into real-coordinate monomials and sums Wick
    moments times the Gaussian normalization, exact to floating point for
    polynomial degrees within the cap.  Pass ``cache`` to share moments
    across many products with the same exponent.
    """
    if F.n != wd.n or G.n != wd.n:
        raise DimensionMismatch("arguments do not match the weight dimension")
    if cache is None:
        form = combined_form(wd, F.M, G.M)
        cache = _cache_from_form(form, 0.5 * (F.M + G.M), DEFAULT_DEGREE_CAP)
    else:
        scale = max(1.0, mx.max_abs(cache.exponent))
        if (
            mx.max_abs(F.M - cache.exponent) > 1e-9 * scale
            or mx.max_abs(G.M - cache.exponent) > 1e-9 * scale
        ):
            raise MExponentMismatch("cache was built for a different exponent")
    if F.poly.degree() + G.poly.degree() > cache.degree_cap:
        raise DegreeCapExceeded(
            f"product degree {F.poly.degree() + G.poly.degree()} exceeds the "
            f"moment cap {cache.degree_cap}"
        )
    ef, cf = _expand_poly(F.poly, conjugate=False)
    eg, cg = _expand_poly(G.poly, conjugate=True)
    if ef.shape[0] == 0 or eg.shape[0] == 0:
        return 0.0 + 0.0j
    dim = ef.shape[1]
    # radix-2^5 keys: per-coordinate degrees stay below 32 under the cap
    radix = np.left_shift(np.int64(1), 5 * np.arange(dim, dtype=np.int64))
    keys = (
        (ef.astype(np.int64) @ radix)[:, None]
        + (eg.astype(np.int64) @ radix)[None, :]
    ).ravel()
    cc = (cf[:, None] * cg[None, :]).ravel()
    uniq, inverse = np.unique(keys, return_inverse=True)
    agg = np.bincount(inverse, weights=cc.real, minlength=uniq.shape[0]) + 1j * np.bincount(
        inverse, weights=cc.imag, minlength=uniq.shape[0]
    )
    key_memo = cache.key_memo
    total = 0.0 + 0.0j
    for key, coeff in zip(uniq.tolist(), agg):
        if not coeff:
            continue
        val = key_memo.get(key)
        if val is None:
            beta = tuple((key >> (5 * j)) & 31 for j in range(dim))
            val = _moment(cache, beta)
            key_memo[key] = val
        total += coeff * val
    return cache.form.normalizer * total


def hphi_norm(F: GaussPoly, wd: WeightData, cache: MomentCache | None = None) -> float:
    """Weighted norm ||F||, the square root of (F, F)."""
    val = hphi_inner(F, F, wd, cache)
    return math.sqrt(max(val.real, 0.0))


def gram_matrix(
    family: dict[tuple[int, ...], GaussPoly], wd: WeightData
) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """Gram matrix of a family, with its graded-lex index list.

    Entry (a, b) is the inner product of members a and b; conjugate symmetry
    is used to fill the lower triangle.
    """
    keys = sorted(family.keys(), key=lambda t: (sum(t), t))
    if not keys:
        return [], np.zeros((0, 0), dtype=complex)
    cache = make_moment_cache(wd, family[keys[0]].M)
    m = len(keys)
    gram = np.zeros((m, m), dtype=complex)
    for a in range(m):
        for b in range(a, m):
            val = hphi_inner(family[keys[a]], family[keys[b]], wd, cache)
            gram[a, b] = val
            gram[b, a] = np.conj(val)
    return keys, gram


def adjoint_residual(
    wd: WeightData,
    gen: GeneratorData,
    F: GaussPoly,
    G: GaussPoly,
    i: int,
    cache: MomentCache | None = None,
) -> float:
    """|(lower_i F, G) - (F, raise_i G)| for arguments sharing the exponent Q.

    Values near zero validate the implemented raising operator as the true
    adjoint with respect to the weighted inner product.
    """
    if cache is None:
        cache = make_moment_cache(wd, gen.Q)
    low = annihilation_ops(gen.Q)
    high = creation_ops(wd, gen)
    lhs = hphi_inner(apply_op(low, i, F), G, wd, cache)
    rhs = hphi_inner(F, apply_op(high, i, G), wd, cache)
    return abs(lhs - rhs)


def expand_in_family(
    F: GaussPoly,
    family: dict[tuple[int, ...], GaussPoly],
    wd: WeightData,
) -> tuple[dict[tuple[int, ...], complex], float]:
    """Coefficients of F against the normalized family, plus the residual norm.

    Requires every index with |alpha| <= deg(F) to be present.  The residual
    ||F - sum c_alpha psi_alpha|| is computed directly from the coefficient
    remainder, not from a Parseval shortcut.
    """
    deg = F.poly.degree()
    needed = multi_indices(wd.n, deg)
    missing = [a for a in needed if a not in family]
    if missing:
        raise IncompleteFamily(f"family lacks indices {missing[:4]} (degree {deg})")
    cache = make_moment_cache(wd, F.M)
    coeffs: dict[tuple[int, ...], complex] = {}
    remainder = F
    for alpha in needed:
        member = family[alpha]
        norm = hphi_norm(member, wd, cache)
        c = hphi_inner(F, member, wd, cache) / norm
        coeffs[alpha] = c
        remainder = remainder - member.scaled(c / norm)
    residual = hphi_norm(remainder, wd, cache)
    return coeffs, residual

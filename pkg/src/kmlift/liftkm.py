"""Top of the pipeline: the half-integral weight plus-space eigenform h, its
Shimura correspondent, Ikeda-lift Fourier coefficients, the det-indexed
Koecher-Maass streams of both kinds, and the identity checkers that pair each
closed formula with the direct class-sum computation.

Satake-type values beta_p are never materialized: every F~_p(T, beta_p) is
evaluated through power sums of the root pair of x^2 - c(p) x + p^(2k-n-1),
keeping the whole pipeline in exact rational / cyclotomic arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from math import gcd

from .characters import (DirichletChar, char_group, factorize,
                         find_primitive_root_of_unity_mod, jacobi_sum,
                         kronecker, local_component)
from .charsums import (HVariant, _Jm_lambda, gamma_const, h_sum,
                       jacobi_symbol_char)
from .exactalg import CycloNum, PPow
from .lseries import (QExp, DirStream, cohen_eisenstein, delta_qexp,
                      lfactor_stream, rankin_stream, shifted_L_stream,
                      theta_series, weight2_eisenstein_odd)
from .plocal import siegel_series, SiegelPoly
from .quadforms import ClassList, GramMat, disc_split


# ---------------------------------------------------------------------------
# the plus-space eigenform

@dataclass
class PlusForm:
    qexp: QExp
    lam: int                    # weight = lam + 1/2
    eigenvalues: dict           # p -> T(p^2) eigenvalue
    shimura: QExp               # S(h), normalized weight 2*lam eigenform

    def coeff(self, e) -> Fraction:
        return self.qexp.coeff(e)


def hecke_Tp2(f: QExp, p: int, lam: int) -> QExp:
    """T(p^2) on weight lam+1/2 level-4 forms.

    b(e) = a(p^2 e) + ((-1)^lam e / p) p^(lam-1) a(e) + p^(2 lam - 1) a(e/p^2).
    For p = 2 this is Kohnen's plus-space operator: the formula holds on the
    plus support and the image is cut back to it (for odd p the support is
    preserved automatically).
    """
    out = {}
    for e in range(f.prec):
        if p * p * e >= f.prec:
            break
        if p == 2 and ((-1) ** lam * e) % 4 in (2, 3):
            continue
        v = f.coeff(p * p * e)
        D = (-1) ** lam * e
        chi = kronecker(D, p)
        if chi:
            v += Fraction(chi * p ** (lam - 1)) * f.coeff(e)
        if e % (p * p) == 0:
            v += Fraction(p ** (2 * lam - 1)) * f.coeff(e // (p * p))
        out[e] = v
    return QExp(f.weight2, (f.prec - 1) // (p * p) + 1, out)


def build_plus_eigenform(k: int, n: int, prec: int = 260) -> PlusForm:
    """The cuspidal plus-space Hecke eigenform of weight k - n/2 + 1/2 on
    Gamma_0(4), from the generators theta and F_2, normalized to c(1) = 1.

    Supported whenever the construction yields a one-dimensional cuspidal plus
    subspace (the flagship (k, n) = (8, 4) gives weight 13/2 paired with
    Delta).
    """
    if k % 2 or n % 2:
        raise ValueError("k and n must be even")
    lam = k - n // 2
    w2 = 2 * lam + 1            # twice the half-integral weight
    theta = theta_series(prec)
    f2 = weight2_eisenstein_odd(prec)
    monomials = []
    a = w2
    b = 0
    while a >= 0:
        if a >= 0:
            monomials.append(theta.power(a) * f2.power(b) if b else theta.power(a))
        a -= 4
        b += 1
    # cuspidal plus space: c(0) = 0 and support on (-1)^lam e = 0,1 mod 4
    bad = [e for e in range(0, 3 * len(monomials) + 10)
           if e == 0 or ((-1) ** lam * e) % 4 in (2, 3)]
    rows = [[m.coeff(e) for m in monomials] for e in bad]
    null = _nullspace(rows)
    if len(null) != 1:
        raise ValueError(f"cuspidal plus space not one-dimensional: dim {len(null)}")
    sol = null[0]
    h = QExp(w2, prec, {})
    for c, m in zip(sol, monomials):
        if c:
            h = h + m.scale(c)
    # support audit over the whole precision
    for e in range(prec):
        if ((-1) ** lam * e) % 4 in (2, 3) and h.coeff(e) != 0:
            raise AssertionError(f"plus-space support violated at {e}")
    if h.coeff(1) == 0:
        first = next(e for e in range(1, prec) if h.coeff(e))
        h = h.scale(1 / h.coeff(first))
    else:
        h = h.scale(1 / h.coeff(1))
    # Hecke eigenvalues and the Shimura correspondent (weight 2k - n)
    delta = delta_qexp(prec)
    assert 2 * lam == 2 * k - n
    eigs = {}
    for p in (2, 3, 5):
        tf = hecke_Tp2(h, p, lam)
        e0 = next(e for e in range(1, tf.prec) if h.coeff(e))
        ev = tf.coeff(e0) / h.coeff(e0)
        for e in range(tf.prec):
            assert tf.coeff(e) == ev * h.coeff(e), f"not an eigenform at p={p}, e={e}"
        eigs[p] = ev
    return PlusForm(h, lam, eigs, delta)


def _nullspace(rows):
    """Basis of the right nullspace of the Fraction matrix (list of rows)."""
    if not rows:
        return []
    m = len(rows[0])
    M = [list(map(Fraction, r)) for r in rows]
    piv_cols = []
    r = 0
    for c in range(m):
        pr = next((i for i in range(r, len(M)) if M[i][c]), None)
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        pv = M[r][c]
        M[r] = [x / pv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        piv_cols.append(c)
        r += 1
    free = [c for c in range(m) if c not in piv_cols]
    basis = []
    for fc in free:
        v = [Fraction(0)] * m
        v[fc] = Fraction(1)
        for i, pc in enumerate(piv_cols):
            v[pc] = -M[i][fc]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# Satake-symmetric evaluation and Ikeda coefficients

def satake_symmetric_eval(sp: SiegelPoly, cp: Fraction, k: int, n: int) -> Fraction:
    """(p^(k-n/2-1/2))^nu_f * F~_p(T, beta_p) as an exact rational.

    Writing albar = p^(k-(n+1)/2) beta_p, the pair (albar, p^(2k-n-1)/albar)
    are the roots of x^2 - cp x + p^(2k-n-1); the expression reduces to
    p^(-(n+1)nu) [c_nu p^(k nu) + sum_t c_(nu+t) p^(k(nu-t)) s_t] with s_t the
    power sums, independent of the root choice.
    """
    p, nu, c = sp.p, sp.nu_f, sp.fcoeffs
    if not sp.symmetric:
        raise ValueError("asymmetric F~ reached the Satake evaluation")
    if nu == 0:
        return Fraction(1)
    e2 = Fraction(p) ** (2 * k - n - 1)
    s_prev, s_cur = Fraction(2), Fraction(cp)      # power sums s_0, s_1
    total = Fraction(c[nu]) * Fraction(p) ** (k * nu)
    for t in range(1, nu + 1):
        total += Fraction(c[nu + t]) * Fraction(p) ** (k * (nu - t)) * s_cur
        s_prev, s_cur = s_cur, Fraction(cp) * s_cur - e2 * s_prev
    return total / Fraction(p) ** ((n + 1) * nu)


@dataclass
class IkedaCoeffTable:
    n: int
    k: int
    classes: list               # (ClassRecord, c_I value)
    excluded: list = field(default_factory=list)

    def by_det(self, D):
        return [(rec, v) for rec, v in self.classes if rec.gram.det() == D]


def ikeda_coeff(G: GramMat, h: PlusForm, k: int, n: int,
                siegel_cache: dict = None) -> Fraction:
    """c_{I_n(h)}(T) = c_h(|d_T|) prod_p (p^(k-n/2-1/2))^{nu_p(f_T)} F~_p(T, beta_p)."""
    d, f = disc_split(G)
    ch = h.coeff(abs(d))
    if ch == 0 and abs(d) >= h.qexp.prec:
        raise ValueError("h coefficient table too short")
    out = Fraction(ch)
    if out == 0:
        return out
    for p, e in factorize(f):
        key = (G.entries, p)
        if siegel_cache is not None and key in siegel_cache:
            sp = siegel_cache[key]
        else:
            sp = siegel_series(G, p, mode="stratified")
            if siegel_cache is not None:
                siegel_cache[key] = sp
        cp = h.shimura.coeff(p)
        out *= satake_symmetric_eval(sp, cp, k, n)
    return out


def build_coeff_table(classes: ClassList, h: PlusForm, k: int, n: int,
                      nu2_cap: int = 2) -> IkedaCoeffTable:
    """Ikeda coefficients for every class within the dyadic scope; classes with
    nu_2(det) above the cap are excluded with a report entry."""
    table = IkedaCoeffTable(n, k, [])
    cache: dict = {}
    for rec in classes.classes:
        D = rec.gram.det()
        if _val2(D) > nu2_cap:
            table.excluded.append({"det": D, "reason": f"nu_2({D}) > {nu2_cap}"})
            continue
        v = ikeda_coeff(rec.gram, h, k, n, cache)
        table.classes.append((rec, v))
    return table


def _val2(x):
    v = 0
    while x % 2 == 0:
        x //= 2
        v += 1
    return v


# ---------------------------------------------------------------------------
# Koecher-Maass streams

@dataclass
class KMStream:
    kind: str
    chi_desc: str
    bound: int
    coeffs: dict                # D -> CycloNum

    def coeff(self, D) -> CycloNum:
        return self.coeffs.get(D, CycloNum.zero())


def km_stream(table: IkedaCoeffTable, chi: DirichletChar, kind: str,
              bound: int, h_variant: HVariant = None,
              h_mode: str = "closed") -> KMStream:
    """Det-indexed coefficients: second kind weights by chi(det 2T); first kind
    weights by h(A, chi) (whose normalization carries e_N versus e through the
    coset identity)."""
    out: dict = {}
    for rec, cv in table.classes:
        D = rec.gram.det()
        if D > bound or cv == 0:
            continue
        if kind == "second":
            w = chi(D)
        elif kind == "first":
            w = h_sum(rec.gram.rows(), chi, mode=h_mode, variant=h_variant)
        else:
            raise ValueError("kind must be 'first' or 'second'")
        if w.is_zero():
            continue
        term = w * Fraction(cv, rec.e)
        out[D] = out.get(D, CycloNum.zero()) + term
        if out[D].is_zero():
            del out[D]
    return KMStream(kind, chi.descriptor(), bound, out)


# ---------------------------------------------------------------------------
# Theorem 4.1

@dataclass
class FitReport:
    name: str
    constants: dict
    residuals: list
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.residuals

    def to_dict(self):
        return {"name": self.name, "constants": self.constants,
                "residuals": self.residuals, "notes": self.notes,
                "passed": self.passed}


def thm41_rhs_streams(h: PlusForm, chi, k: int, n: int, bound: int):
    """(r1, r2): the Rankin-side and the pure-L-side integer-index streams."""
    E = cohen_eisenstein(n // 2, max(bound + 1, h.qexp.prec))
    chi2 = chi * chi if isinstance(chi, DirichletChar) else chi
    k1 = k - n // 2
    k2 = n // 2
    r1 = rankin_stream(h.qexp, E, chi, k1, k2, bound, variant="R")
    for j in range(1, n // 2):
        r1 = r1.convolve(lfactor_stream(h.shimura, chi2, 2 * j, bound))
    r2 = shifted_L_stream(h.shimura, chi2,
                          [2 * j - 1 for j in range(1, n // 2 + 1)], bound)
    return r1, r2


def admissible_indices(bound: int, nu2_cap: int = 2):
    return [D for D in range(1, bound + 1)
            if D % 4 in (0, 1) and _val2(D) <= nu2_cap]


def verify_thm41(h: PlusForm, chi: DirichletChar, table: IkedaCoeffTable,
                 k: int, n: int, bound: int = 40, nu2_cap: int = 2) -> FitReport:
    """Fit (c_n, d_n) on the first two usable indices and verify every other
    admissible index exactly; the 2^(ns)-type monomial is the identity map
    D = integer index (reported, not assumed silently)."""
    lhs = km_stream(table, chi, "second", bound)
    r1, r2 = thm41_rhs_streams(h, chi, k, n, bound)
    idxs = admissible_indices(bound, nu2_cap)
    pair = None
    for i, D1 in enumerate(idxs):
        for D2 in idxs[i + 1:]:
            det = r1.coeff(D1) * r2.coeff(D2) - r1.coeff(D2) * r2.coeff(D1)
            if not det.is_zero():
                pair = (D1, D2, det)
                break
        if pair:
            break
    if pair is None:
        return FitReport("thm4.1", {}, [], ["degenerate fit system"])
    D1, D2, det = pair
    ch1 = Fraction(h.coeff(1))
    cn = (lhs.coeff(D1) * r2.coeff(D2) - lhs.coeff(D2) * r2.coeff(D1)) / det
    dn = (r1.coeff(D1) * lhs.coeff(D2) - r1.coeff(D2) * lhs.coeff(D1)) / det
    dn = dn / ch1
    residuals = []
    for D in idxs:
        rhs = cn * r1.coeff(D) + dn * ch1 * r2.coeff(D)
        if not (lhs.coeff(D) == rhs):
            residuals.append({"D": D, "lhs": repr(lhs.coeff(D)), "rhs": repr(rhs)})
    consts = {}
    for label, v in (("c_n", cn), ("d_n", dn)):
        consts[label] = _cyclo_str(v)
    notes = [f"fit indices D = {D1}, {D2}",
             "index normalization: integer index = det(2T) (2^{ns} absorbed)"]
    return FitReport("thm4.1", consts, residuals, notes)


def _cyclo_str(v: CycloNum) -> str:
    if v.is_rational():
        q = v.rational_value()
        return f"{q.numerator}/{q.denominator}"
    return repr(v)


# ---------------------------------------------------------------------------
# Theorems 5.11 and 6.1 (first kind)

def thm56_constant(n: int, N: int, gamma_mode="corrected") -> Fraction:
    """prod_i (-1)^(n(p_i-1)/4) p_i^((n-2)/2) gamma_{n,p_i}: the Theorem 5.6
    prefactor with the adjudicated sign and gamma."""
    out = Fraction(1)
    for p, _ in factorize(N):
        out *= Fraction((-1) ** (n * (p - 1) // 4) * p ** ((n - 2) // 2))
        out *= gamma_const(n, p, gamma_mode)
    return out


def zero_branch(chi: DirichletChar, n: int) -> bool:
    """Theorem 5.5/5.6/6.1 branch (1) detector."""
    N = chi.modulus
    for p, _ in factorize(N):
        l = gcd(n, p - 1)
        u0 = find_primitive_root_of_unity_mod(p, l)
        chip = local_component(chi, p) if len(factorize(N)) > 1 else chi
        if not chip(u0) == CycloNum.one():
            return True
    return False


def verify_thm511_61(h: PlusForm, chi: DirichletChar, table: IkedaCoeffTable,
                     k: int, n: int, bound: int = 40, nu2_cap: int = 2,
                     cn: CycloNum = None, dn: CycloNum = None) -> FitReport:
    """Both first-kind routes: the direct h(A,chi)-weighted stream versus the
    Theorem 5.11 eta-combination of second-kind streams, then (given the
    fitted Theorem 4.1 constants) the Theorem 6.1 combination."""
    N = chi.modulus
    idxs = admissible_indices(bound, nu2_cap)
    direct = km_stream(table, chi, "first", bound)
    report = FitReport("thm5.11+6.1", {}, [])
    if zero_branch(chi, n):
        for D in idxs:
            if not direct.coeff(D).is_zero():
                report.residuals.append({"D": D, "lhs": repr(direct.coeff(D)),
                                         "rhs": "0 (branch 1)"})
        report.notes.append("branch (1): chi^(p)(u_0) != 1; stream must vanish")
        return report
    G = char_group(N)
    tilde = next(c for c in G if (c ** n) == chi)
    etas = [e for e in G if (e ** n).is_trivial()]
    jac = jacobi_symbol_char(N)
    CN = thm56_constant(n, N)
    # Theorem 5.11 route: direct == CN * sum_eta w_eta * L*(chi tilde eta)
    comb = {D: CycloNum.zero() for D in idxs}
    comb61 = {D: CycloNum.zero() for D in idxs}
    for eta in etas:
        lam = tilde * eta
        w = lam.conjugate()(pow(2, n, N)) * jacobi_sum(lam, jac) \
            * _Jm_lambda(lam.conjugate(), n - 1)
        second = km_stream(table, lam, "second", bound)
        r1, r2 = thm41_rhs_streams(h, lam, k, n, bound)
        for D in idxs:
            comb[D] = comb[D] + w * second.coeff(D)
            if cn is not None:
                comb61[D] = comb61[D] + w * (cn * r1.coeff(D)
                                             + dn * Fraction(h.coeff(1)) * r2.coeff(D))
    for D in idxs:
        rhs = comb[D] * CN
        if not (direct.coeff(D) == rhs):
            report.residuals.append({"D": D, "route": "5.11",
                                     "lhs": repr(direct.coeff(D)), "rhs": repr(rhs)})
    report.constants["C_N (Thm 5.6 prefactor, corrected gamma)"] = \
        f"{CN.numerator}/{CN.denominator}"
    if cn is not None:
        for D in idxs:
            rhs = comb61[D] * CN
            if not (direct.coeff(D) == rhs):
                report.residuals.append({"D": D, "route": "6.1",
                                         "lhs": repr(direct.coeff(D)),
                                         "rhs": repr(rhs)})
        report.constants["c_{n,N}"] = _cyclo_str(cn * CN)
        report.constants["d_{n,N}"] = _cyclo_str(dn * CN)
        report.notes.append("(c_{n,N}, d_{n,N}) = C_N * (c_n, d_n): "
                            "proportionality verified by the residual check")
    return report


def r_chi_assemble(h: PlusForm, chi: DirichletChar, k: int, n: int,
                   bound: int = 40, variant: str = "adjudicated") -> DirStream:
    """R^(chi)(s, h, E_{n/2+1/2}): the finite eta-sum of Jacobi-weighted
    twisted Rankin x shifted-L streams (chi^n primitive required).

    variant 'printed' follows the section-7 display and conjugates the
    J(chi eta, (*/N)) factor; 'adjudicated' leaves it unconjugated, matching
    the brute-validated Theorem 5.6 weights so that the L(s, I_n(h), chi^n)
    reconstruction is internally consistent.
    """
    N = chi.modulus
    if (chi ** n).conductor != N:
        raise ValueError("chi^n must be primitive for the section-7 assembly")
    G = char_group(N)
    etas = [e for e in G if (e ** n).is_trivial()]
    jac = jacobi_symbol_char(N)
    total = DirStream(bound, {})
    for eta in etas:
        lam = chi * eta
        J1 = jacobi_sum(lam, jac)
        if variant == "printed":
            J1 = J1.conjugate()
        w = lam.conjugate()(pow(2, n, N)) * J1 * _Jm_lambda(lam.conjugate(), n - 1)
        E = cohen_eisenstein(n // 2, max(bound + 1, h.qexp.prec))
        r = rankin_stream(h.qexp, E, lam, k - n // 2, n // 2, bound, variant="R")
        for j in range(1, n // 2):
            r = r.convolve(lfactor_stream(h.shimura, lam * lam, 2 * j, bound))
        total = total + r.scale(w)
    return total


def mchi_assemble(h: PlusForm, chi: DirichletChar, k: int, n: int,
                  bound: int = 40) -> DirStream:
    """The companion M^(chi) combination of pure shifted-L products."""
    N = chi.modulus
    G = char_group(N)
    etas = [e for e in G if (e ** n).is_trivial()]
    jac = jacobi_symbol_char(N)
    total = DirStream(bound, {})
    for eta in etas:
        lam = chi * eta
        w = lam.conjugate()(pow(2, n, N)) * jacobi_sum(lam, jac) \
            * _Jm_lambda(lam.conjugate(), n - 1)
        r = shifted_L_stream(h.shimura, lam * lam,
                             [2 * j - 1 for j in range(1, n // 2 + 1)], bound)
        total = total + r.scale(w)
    return total


# ---------------------------------------------------------------------------
# Theorem 4.2: genus-side reassembly of the second-kind coefficients

def _zeta_rational(i: int) -> Fraction:
    """zeta(2i) / pi^(2i) as an exact rational."""
    from .lseries import bernoulli_number, _factorial_int
    return Fraction((-1) ** (i + 1)) * bernoulli_number(2 * i) \
        * 2 ** (2 * i - 1) / _factorial_int(2 * i)


def _dyadic_unimodular_factor(d0: int):
    """(alpha_2, hasse) of the even unimodular rank-4 Z_2-class with
    determinant class d0 (d0 = 1 mod 4 odd)."""
    from .plocal import DyadicBlock, _density_dyadic_blocks
    from .quadforms import hasse_invariant
    if d0 % 8 == 1:
        blocks = (DyadicBlock(0, "H"), DyadicBlock(0, "H"))
        rep = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]
    else:
        blocks = (DyadicBlock(0, "H"), DyadicBlock(0, "V"))
        rep = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 2, 1], [0, 0, 1, 2]]
    alpha = _density_dyadic_blocks(tuple(sorted(blocks, key=lambda b: (b.scale, b.kind))), 4, 10 ** 9)
    eps = hasse_invariant(rep, 2)
    return alpha, eps


def verify_thm42(h: PlusForm, chi: DirichletChar, table: IkedaCoeffTable,
                 k: int, n: int, bound: int = 40) -> FitReport:
    """Reassemble the second-kind coefficients from the genus-side sum over
    fundamental discriminants with per-prime genus-series coefficients.

    Scope: odd indices D (the dyadic factor is then the unimodular-class t^0
    coefficient); even D raises the documented scope error upstream, and the
    caller filters.  The fitted overall 2-power (the same normalization the
    mass audit fits) is reported via the first index and verified on the rest.
    """
    from .characters import kronecker
    from .lseries import _factorial_int, bernoulli_number, gen_bernoulli_kronecker
    from .plocal import (density_from_symbol, enumerate_zp_classes,
                         hasse_from_symbol, siegel_series, symbol_diagonal)
    from .quadforms import fundamental_split

    if n != 4:
        raise ValueError("genus-side checker implemented for n = 4")
    lhs = km_stream(table, chi, "second", bound)
    idxs = [D for D in range(1, bound + 1) if D % 2 == 1 and D % 4 in (0, 1)]
    report = FitReport("thm4.2", {}, [])
    fitted = None
    for D in idxs:
        d0, f = fundamental_split(D)
        ch = Fraction(h.coeff(abs(d0)))
        pp = PPow(1)
        # kappa_n: Gamma_C(n/2) Gamma_C(2)...: rational part with pi-powers
        kk = n // 2
        rat = Fraction(2, 2 ** kk) * Fraction(_factorial_int(kk - 1))
        pi_pow = -kk
        for i in range(1, kk):
            rat *= Fraction(2, 2 ** (2 * i)) * _factorial_int(2 * i - 1)
            pi_pow -= 2 * i
        rat *= Fraction(1, 2 ** (1 + kk))         # the 2^{-1-n/2}
        bad = sorted({q for q, _ in factorize(2 * D)})
        # good primes: zeta(2i) and L(n/2, chi_d0) with bad Euler factors removed
        for i in range(1, kk):
            rat *= _zeta_rational(i)
            pi_pow += 2 * i
            for q in bad:
                rat *= 1 - Fraction(1, q ** (2 * i))
        Bk = gen_bernoulli_kronecker(d0, kk)
        Lneg = -Bk / kk
        fe = Fraction((-4) ** (kk // 2)) * _factorial_int(kk // 2) \
            / (_factorial_int(kk) * _factorial_int(kk // 2 - 1))
        rat *= fe * Lneg
        pi_pow += kk
        pp = pp * PPow(1, {q: Fraction(1 - 2 * kk, 2) * e
                           for q, e in factorize(abs(d0))}) if abs(d0) > 1 else pp
        for q in bad:
            rat *= 1 - Fraction(kronecker(d0, q), q ** kk)
        assert pi_pow == 0
        # |d0|^{(n+1-2k)/4}
        if abs(d0) > 1:
            pp = pp * PPow(1, {q: Fraction(n + 1 - 2 * k, 4) * e
                               for q, e in factorize(abs(d0))})
        # finite local factors
        branch = {"iota": PPow(1), "eps": PPow(1)}
        a2, eps2 = _dyadic_unimodular_factor(d0 % 8)
        branch["iota"] = branch["iota"] * PPow(1 / a2)
        branch["eps"] = branch["eps"] * PPow(Fraction(eps2) / a2)
        ok = True
        for p in [q for q in bad if q != 2]:
            nu = 0
            Dp = D
            while Dp % p == 0:
                Dp //= p
                nu += 1
            nu0 = 1 if abs(d0) % p == 0 else 0
            loc = {"iota": Fraction(0), "eps": Fraction(0)}
            for sym in enumerate_zp_classes(n, p, d0, nu):
                if sym.valuation() != nu:
                    continue
                G = GramMat(_diag_mat2([2 * x for x in symbol_diagonal(sym, p)]))
                sp = siegel_series(G, p, mode="stratified")
                sat = satake_symmetric_eval(sp, h.shimura.coeff(p), k, n)
                alpha = density_from_symbol(sym, p)
                loc["iota"] += sat / alpha
                loc["eps"] += Fraction(hasse_from_symbol(sym, p)) * sat / alpha
            expo = Fraction(nu * (n + 1), 2) + Fraction(nu0 * (2 * k - n - 1), 4)
            for w in ("iota", "eps"):
                branch[w] = branch[w] * PPow(loc[w], {p: expo})
            if loc["iota"] == 0 and loc["eps"] == 0:
                ok = False
        if not ok:
            report.notes.append(f"D={D}: empty local class set (skipped)")
            continue
        # kappa(d0,n,1)_2^{-1} cancels the epsilon-term sign exactly, so the
        # two branches combine with unit weights; the quarter-powers of the
        # local factors only collapse against the |d0|-powers in pp
        tot = (pp * branch["iota"]).value() + (pp * branch["eps"]).value()
        rhs_rat = rat * ch * tot
        got = lhs.coeff(D)
        want = chi(D) * rhs_rat
        if fitted is None and rhs_rat != 0 and not got.is_zero():
            ratio = got / want
            assert ratio.is_rational()
            fitted = ratio.rational_value()
            report.constants["fitted 2-power"] = f"{fitted.numerator}/{fitted.denominator}"
            continue
        scale = fitted if fitted is not None else Fraction(1)
        if not (got == want * scale):
            report.residuals.append({"D": D, "lhs": repr(got),
                                     "rhs": repr(want * scale)})
    return report


def _diag_mat2(diag):
    m = len(diag)
    return [[diag[i] if i == j else 0 for j in range(m)] for i in range(m)]

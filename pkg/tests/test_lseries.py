from fractions import Fraction

from kmlift.characters import char_group
from kmlift.exactalg import CycloNum
from kmlift.lseries import (DirStream, L_at_nonpositive, bernoulli_number,
                            cohen_H, cohen_eisenstein, delta_qexp,
                            gen_bernoulli, gen_bernoulli_kronecker,
                            hecke_stream, lfactor_stream, rankin_stream,
                            theta_series, zeta_at_negative)


def test_bernoulli_numbers():
    assert bernoulli_number(4) == Fraction(-1, 30)
    assert zeta_at_negative(3) == Fraction(1, 120)
    assert zeta_at_negative(1) == Fraction(-1, 12)


def test_gen_bernoulli():
    chi4 = next(c for c in char_group(4) if c.order == 2)
    assert gen_bernoulli(chi4, 1).rational_value() == Fraction(-1, 2)
    assert L_at_nonpositive(chi4, 1).rational_value() == Fraction(1, 2)
    # parity vanishing: chi(-1) (-1)^k = -1 forces B_{k,chi} = 0
    for N in (3, 4, 5, 7):
        for chi in char_group(N):
            for k in (1, 2, 3, 4):
                if chi.parity() * (-1) ** k == -1:
                    assert gen_bernoulli(chi, k).is_zero(), (N, k)


def test_gen_bernoulli_distribution_relation():
    # induced character mod 35 from primitive mod 5:
    # B_{k, chi_N} = B_{k, chi_0} * prod_{p | N, p coprime f} (1 - chi_0(p) p^{k-1})
    chi0 = next(c for c in char_group(5) if c.order == 4)
    ind = chi0.extend(35)
    for k in (1, 2, 3):
        lhs = gen_bernoulli(ind, k)
        rhs = gen_bernoulli(chi0, k) * (CycloNum.one() - chi0(7) * Fraction(7 ** (k - 1)))
        assert lhs == rhs, k


def test_gen_bernoulli_kronecker():
    assert gen_bernoulli_kronecker(1, 2) == Fraction(1, 6)
    assert gen_bernoulli_kronecker(-4, 1) == Fraction(-1, 2)
    assert gen_bernoulli_kronecker(-3, 1) == Fraction(-1, 3)


def test_cohen_function():
    assert cohen_H(2, 0) == Fraction(1, 120)
    assert cohen_H(2, 1) == Fraction(-1, 12)
    assert cohen_H(2, 4) == Fraction(-7, 12)
    assert cohen_H(2, 2) == 0 and cohen_H(2, 3) == 0
    # D = 2, 3 mod 4 branch is identically zero
    for e in range(30):
        if e % 4 in (2, 3):
            assert cohen_H(2, e) == 0


def test_cohen_eisenstein_support():
    E = cohen_eisenstein(2, 101)
    for e in range(101):
        if e % 4 in (2, 3):
            assert E.coeff(e) == 0
    assert E.coeff(0) == Fraction(1, 120)


def test_delta_and_hecke_stream():
    d = delta_qexp(50)
    assert d.coeff(1) == 1 and d.coeff(2) == -24 and d.coeff(3) == 252
    assert d.coeff(5) == 4830 and d.coeff(6) == d.coeff(2) * d.coeff(3)
    chi = next(c for c in char_group(5) if c.order == 4)
    st = hecke_stream(d, chi, 20)
    assert st.coeff(2) == chi(2) * Fraction(-24)
    assert st.coeff(5).is_zero()
    assert st.coeff(10).is_zero()


def test_lfactor_stream_shape():
    d = delta_qexp(40)
    tr = char_group(1).trivial()
    st = lfactor_stream(d, tr, 2, 36)
    assert st.coeff(3).is_zero()           # non-square index
    assert st.coeff(4) == Fraction(-24 * 4)
    two = st.convolve(st)
    # coefficient at 36 = sum over m1^2 m2^2 = 36
    expect = sum(Fraction(-24 * 4) * Fraction(252 * 9) for _ in range(1)) * 2 \
        + Fraction((-6048) * 36) * 2
    assert two.coeff(36) == 2 * (Fraction(-24 * 4) * Fraction(252 * 9)) \
        + 2 * Fraction(-6048 * 36)


def test_rankin_stream_basics():
    h = delta_qexp(45)        # any eigenform-shaped series works structurally
    E = cohen_eisenstein(2, 45)
    tr = char_group(1).trivial()
    st = rankin_stream(h, E, tr, 6, 2, 40, variant="R")
    assert st.coeff(1) == Fraction(h.coeff(1)) * E.coeff(1)
    # squarefree index: only d = 1 contributes
    for l in (5, 13, 21):
        assert st.coeff(l) == Fraction(h.coeff(l)) * E.coeff(l)


def test_R_vs_Rtilde_euler_factor():
    # R = (1 - 2^{-2s+k1+k2-1} chi^2(2))^{-1} R~ at odd conductor:
    # as streams, R = R~ convolved with sum_j (2^{k1+k2-1} chi2(2))^j at 4^j
    h = delta_qexp(70)
    E = cohen_eisenstein(2, 70)
    chi = next(c for c in char_group(5) if c.order == 4)
    k1, k2 = 6, 2
    R = rankin_stream(h, E, chi, k1, k2, 64, variant="R")
    Rt = rankin_stream(h, E, chi, k1, k2, 64, variant="Rtilde")
    chi2 = chi * chi
    factor = DirStream(64, {})
    j = 0
    term = CycloNum.one()
    while 4 ** j <= 64:
        factor.coeffs[4 ** j] = term
        term = term * chi2(2) * Fraction(2 ** (k1 + k2 - 1))
        j += 1
    assert R == Rt.convolve(factor)


def test_theta():
    th = theta_series(30)
    assert th.coeff(0) == 1 and th.coeff(1) == 2 and th.coeff(4) == 2
    assert th.coeff(3) == 0

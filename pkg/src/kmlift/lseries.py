"""Exact special values and Dirichlet-coefficient streams: Bernoulli numbers,
generalized Bernoulli numbers B_{k,chi} and L(1-k, chi), the Cohen function
H(l, m), Cohen-Eisenstein q-expansions, Hecke L-series of elliptic eigenforms,
Rankin-Selberg convolutions of half-integral weight forms, and the shifted
L-factor streams; everything at nonpositive integer arguments, so every value
is an exact rational (or cyclotomic, under a twist).

A DirStream is a finite map index -> coefficient; re-indexings like the
L(2s - a, *) prefactors land on square indices d^2 with weight d^a.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .characters import DirichletChar, kronecker
from .exactalg import CycloNum


# ---------------------------------------------------------------------------
# Bernoulli machinery

@lru_cache(maxsize=None)
def bernoulli_number(k: int) -> Fraction:
    """B_k (B_1 = -1/2), by the standard recurrence."""
    if k == 0:
        return Fraction(1)
    total = Fraction(0)
    for j in range(k):
        total += Fraction(_binom(k + 1, j)) * bernoulli_number(j)
    return -total / (k + 1)


def _factorial_int(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def _binom(n, k):
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


@lru_cache(maxsize=None)
def bernoulli_poly_coeffs(k: int):
    """Coefficients of B_k(x), constant term first."""
    return tuple(Fraction(_binom(k, j)) * bernoulli_number(k - j)
                 for j in range(k + 1))


def gen_bernoulli(chi: DirichletChar, k: int) -> CycloNum:
    """B_{k,chi} = f^{k-1} sum_{a=1}^{f} chi(a) B_k(a/f), conductor f."""
    f = chi.modulus
    coeffs = bernoulli_poly_coeffs(k)
    total = CycloNum.zero(chi.order)
    for a in range(1, f + 1):
        v = chi(a)
        if v.is_zero():
            continue
        x = Fraction(a, f)
        poly = sum(c * x ** j for j, c in enumerate(coeffs))
        total = total + v * poly
    return total * Fraction(f) ** (k - 1)


def gen_bernoulli_kronecker(d: int, k: int) -> Fraction:
    """B_{k, chi_d} for the Kronecker character of the fundamental d (d=1: B_k)."""
    f = abs(d) if d != 1 else 1
    coeffs = bernoulli_poly_coeffs(k)
    total = Fraction(0)
    for a in range(1, f + 1):
        c = kronecker(d, a)
        if not c:
            continue
        x = Fraction(a, f)
        total += c * sum(cc * x ** j for j, cc in enumerate(coeffs))
    return total * Fraction(f) ** (k - 1)


def L_at_nonpositive(chi: DirichletChar, k: int) -> CycloNum:
    """L(1 - k, chi) = -B_{k,chi} / k."""
    return gen_bernoulli(chi, k) * Fraction(-1, k)


def zeta_at_negative(m: int) -> Fraction:
    """zeta(-m) for m >= 1 odd (and 0 for even m >= 2)."""
    if m % 2 == 0:
        return Fraction(0)
    return -bernoulli_number(m + 1) / (m + 1)


# ---------------------------------------------------------------------------
# Cohen function and Cohen-Eisenstein series

def divisors_int(n):
    out = [1]
    m, p = n, 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out = [d * p ** t for d in out for t in range(e + 1)]
        p += 1
    if m > 1:
        out = [d * m ** t for d in out for t in range(2)]
    return sorted(out)


def moebius(n):
    out = 1
    m, p = n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            out = -out
        p += 1
    if m > 1:
        out = -out
    return out


def sigma_power(n, s):
    return sum(Fraction(d) ** s for d in divisors_int(n))


def cohen_L(D: int, s: int) -> Fraction:
    """L_D(s) at a nonpositive integer s, per the three displayed branches."""
    if s > 0:
        raise ValueError("only nonpositive integer arguments are exact here")
    if D == 0:
        # zeta(2s - 1)
        m = 1 - 2 * s
        return -bernoulli_number(m + 1) / (m + 1)
    if D % 4 in (2, 3):
        return Fraction(0)
    from .quadforms import fundamental_split
    dk, f = fundamental_split(D)
    k = 1 - s
    if dk == 1:
        Lval = -bernoulli_number(k) / k
    else:
        Lval = -gen_bernoulli_kronecker(dk, k) / k
    total = Fraction(0)
    for a in divisors_int(f):
        mu = moebius(a)
        if mu == 0:
            continue
        total += mu * kronecker(dk, a) * Fraction(a) ** (-s) * sigma_power(f // a, 1 - 2 * s)
    return Lval * total


def cohen_H(l: int, m: int) -> Fraction:
    """H(l, m) = L_D(1 - l) with D = (-1)^l m.

    The sign twist on D is fixed by requiring E_{l+1/2} to satisfy the plus
    space support condition (coefficients vanish off e = 0, 1 mod 4 for even
    l); the bare -m reading would support e = 0, 3 mod 4 instead.
    """
    return cohen_L((-1) ** l * m, 1 - l)


class QExp:
    """Truncated q-expansion; weight tag is (numerator, denominator)."""

    __slots__ = ("weight2", "prec", "coeffs")

    def __init__(self, weight2: int, prec: int, coeffs):
        # weight2 = twice the weight, so half-integral weights stay integral
        self.weight2 = weight2
        self.prec = prec
        self.coeffs = {int(k): Fraction(v) for k, v in coeffs.items()
                       if 0 <= int(k) < prec and v}

    def coeff(self, k) -> Fraction:
        return self.coeffs.get(k, Fraction(0))

    def __add__(self, other):
        assert self.weight2 == other.weight2
        prec = min(self.prec, other.prec)
        c = {k: v for k, v in self.coeffs.items() if k < prec}
        for k, v in other.coeffs.items():
            if k < prec:
                c[k] = c.get(k, Fraction(0)) + v
        return QExp(self.weight2, prec, c)

    def scale(self, v):
        return QExp(self.weight2, self.prec,
                    {k: c * v for k, c in self.coeffs.items()})

    def __mul__(self, other):
        prec = min(self.prec, other.prec)
        c = {}
        for k1, v1 in self.coeffs.items():
            if k1 >= prec:
                continue
            for k2, v2 in other.coeffs.items():
                k = k1 + k2
                if k < prec:
                    c[k] = c.get(k, Fraction(0)) + v1 * v2
        return QExp(self.weight2 + other.weight2, prec, c)

    def power(self, e: int):
        out = QExp(0, self.prec, {0: 1})
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base if e > 1 else base
            e >>= 1
        return out


def cohen_eisenstein(l: int, prec: int) -> QExp:
    """E_{l+1/2} = sum_e H(l, e) q^e (even l >= 2; l = 2 flagged in reports)."""
    if l % 2:
        raise ValueError("Cohen-Eisenstein series needs even l")
    if l < 2:
        raise ValueError("weight below 5/2 unsupported")
    coeffs = {}
    for e in range(prec):
        coeffs[e] = cohen_H(l, e)
    q = QExp(2 * l + 1, prec, coeffs)
    for e in range(prec):
        if ((-1) ** l * e) % 4 in (2, 3):
            assert q.coeff(e) == 0, f"plus-space support violated at {e}"
    return q


# ---------------------------------------------------------------------------
# classical level-4 generators and Delta

def theta_series(prec: int) -> QExp:
    c = {0: Fraction(1)}
    m = 1
    while m * m < prec:
        c[m * m] = Fraction(2)
        m += 1
    return QExp(1, prec, c)


def weight2_eisenstein_odd(prec: int) -> QExp:
    """F_2 = sum over odd m of sigma_1(m) q^m, weight 2 on Gamma_0(4)."""
    c = {}
    for m in range(1, prec, 2):
        c[m] = sigma_power(m, 1)
    return QExp(4, prec, c)


def delta_qexp(prec: int) -> QExp:
    """Delta = q prod (1 - q^n)^24 with exact integer coefficients."""
    # prod (1-q^n) truncated, then 24th power, then shift by q
    prod = [Fraction(1)] + [Fraction(0)] * (prec - 1)
    for n in range(1, prec):
        new = list(prod)
        for k in range(prec - n):
            if prod[k]:
                new[k + n] -= prod[k]
        prod = new
    out = [Fraction(1)] + [Fraction(0)] * (prec - 1)
    power = prod
    e = 24
    while e:
        if e & 1:
            out = _mul_trunc(out, power, prec)
        e >>= 1
        if e:
            power = _mul_trunc(power, power, prec)
    coeffs = {k + 1: out[k] for k in range(prec - 1) if out[k]}
    return QExp(24, prec, coeffs)


def _mul_trunc(a, b, prec):
    out = [Fraction(0)] * prec
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if i + j >= prec:
                    break
                if y:
                    out[i + j] += x * y
    return out


# ---------------------------------------------------------------------------
# Dirichlet streams

class DirStream:
    """Finite map {1..bound} -> CycloNum with Dirichlet convolution."""

    __slots__ = ("bound", "coeffs", "tag")

    def __init__(self, bound: int, coeffs=None, tag=""):
        self.bound = int(bound)
        self.tag = tag
        self.coeffs = {}
        for k, v in (coeffs or {}).items():
            if 1 <= int(k) <= self.bound:
                cv = v if isinstance(v, CycloNum) else CycloNum.from_rational(v)
                if not cv.is_zero():
                    self.coeffs[int(k)] = cv

    def coeff(self, k) -> CycloNum:
        return self.coeffs.get(k, CycloNum.zero())

    def convolve(self, other: "DirStream", tag="") -> "DirStream":
        bound = min(self.bound, other.bound)
        c = {}
        for a, va in self.coeffs.items():
            if a > bound:
                continue
            for b, vb in other.coeffs.items():
                k = a * b
                if k <= bound:
                    c[k] = c.get(k, CycloNum.zero()) + va * vb
        return DirStream(bound, c, tag or f"({self.tag})*({other.tag})")

    def scale(self, v) -> "DirStream":
        return DirStream(self.bound, {k: c * v for k, c in self.coeffs.items()},
                         self.tag)

    def __add__(self, other):
        bound = min(self.bound, other.bound)
        c = {k: v for k, v in self.coeffs.items() if k <= bound}
        for k, v in other.coeffs.items():
            if k <= bound:
                c[k] = c.get(k, CycloNum.zero()) + v
        return DirStream(bound, c, self.tag)

    def __eq__(self, other):
        bound = min(self.bound, other.bound)
        for k in range(1, bound + 1):
            if not self.coeff(k) == other.coeff(k):
                return False
        return True

    def nonzero_indices(self):
        return sorted(self.coeffs)


def unit_stream(bound) -> DirStream:
    return DirStream(bound, {1: CycloNum.one()})


def hecke_stream(f: QExp, chi, bound: int) -> DirStream:
    """L(s, f, chi) coefficients c_f(m) chi(m) for a normalized eigenform f."""
    if f.coeff(1) != 1:
        raise ValueError("eigenform must be normalized: c_f(1) = 1")
    c = {}
    for m in range(1, bound + 1):
        a = f.coeff(m)
        if not a:
            continue
        v = chi(m)
        if v.is_zero():
            continue
        c[m] = v * a
    return DirStream(bound, c, "hecke")


def lfactor_stream(f: QExp, chi, a: int, bound: int) -> DirStream:
    """L(2s - a, f, chi) as a stream: index m^2, weight c_f(m) chi(m) m^a."""
    c = {}
    m = 1
    while m * m <= bound:
        co = f.coeff(m)
        if co:
            v = chi(m)
            if not v.is_zero():
                c[m * m] = v * (co * Fraction(m) ** a)
        m += 1
    return DirStream(bound, c, f"L(2s-{a})")


def char_L_stream(chi, a: int, bound: int) -> DirStream:
    """L(2s - a, chi) as a stream: index d^2, weight chi(d) d^a."""
    c = {}
    d = 1
    while d * d <= bound:
        v = chi(d)
        if not v.is_zero():
            c[d * d] = v * Fraction(d) ** a
        d += 1
    return DirStream(bound, c, f"Lchar(2s-{a})")


def rankin_stream(h1: QExp, h2: QExp, chi, k1: int, k2: int, bound: int,
                  variant="R") -> DirStream:
    """R(s, h1, h2, chi) (or R~) as one Dirichlet stream in integer index.

    The prefactor L(2s - k1 - k2 + 1, omega) contributes index d^2 with weight
    omega(d) d^(k1+k2-1); the core contributes c_{h1}(m) c_{h2}(m) chi(m) at m.
    variant 'R' takes omega = chi^2; 'Rtilde' takes omega = chi_{-4}^{k1-k2} chi^2.
    """
    if min(h1.prec, h2.prec) < bound + 1:
        raise ValueError("q-expansion precision below the requested bound")
    core = {}
    for m in range(1, bound + 1):
        a = h1.coeff(m) * h2.coeff(m)
        if not a:
            continue
        v = chi(m)
        if v.is_zero():
            continue
        core[m] = v * a
    core_stream = DirStream(bound, core, "core")
    chi2 = chi * chi
    if variant == "R":
        pref = char_L_stream(chi2, k1 + k2 - 1, bound)
    elif variant == "Rtilde":
        pref = _twisted_char_L_stream(chi2, k1 - k2, k1 + k2 - 1, bound)
    else:
        raise ValueError("variant must be 'R' or 'Rtilde'")
    return pref.convolve(core_stream, tag=f"{variant}-stream")


def _twisted_char_L_stream(chi2, k_diff: int, a: int, bound: int) -> DirStream:
    c = {}
    d = 1
    while d * d <= bound:
        v = chi2(d)
        if not v.is_zero():
            if k_diff % 2:
                kron = kronecker(-4, d)
            else:
                kron = 0 if d % 2 == 0 else 1   # chi_{-4}^even = principal mod 4
            if kron:
                c[d * d] = v * (Fraction(kron) * Fraction(d) ** a)
        d += 1
    return DirStream(bound, c, f"Ltwisted(2s-{a})")


def shifted_L_stream(f: QExp, chi2, shifts, bound: int) -> DirStream:
    """prod_j L(2s - a_j, f, chi2) assembled by stream convolution."""
    out = unit_stream(bound)
    for a in shifts:
        out = out.convolve(lfactor_stream(f, chi2, a, bound))
    return out

"""Exact arithmetic kernel: cyclotomic numbers, quadratic extensions Q(sqrt p),
integer polynomials, symmetric Laurent polynomials, and truncated power series.

Rationals are stdlib ``fractions.Fraction`` throughout (already canonical:
reduced, positive denominator).  A cyclotomic number is stored at an explicit
level L as a Q-linear combination of zeta_L^e with 0 <= e < phi(L), i.e. the
canonical representative obtained by reducing modulo the L-th cyclotomic
polynomial.  Two values at the same level are equal iff their coefficient maps
are equal.  All values are immutable after construction.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd


# ---------------------------------------------------------------------------
# integer polynomials (dense list of coefficients, constant term first)

def poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def poly_deg(c):
    """Degree, or None for the zero polynomial (sentinel, never -1)."""
    c = poly_trim(c)
    return len(c) - 1 if c else None


def poly_add(a, b):
    n = max(len(a), len(b))
    return poly_trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                      for i in range(n)])


def poly_mul(a, b):
    a, b = poly_trim(a), poly_trim(b)
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly_trim(out)


def poly_divmod_exact(a, b):
    """Quotient and remainder of a by b over Q; b must be nonzero."""
    a = [Fraction(x) for x in poly_trim(a)]
    b = [Fraction(x) for x in poly_trim(b)]
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    lead = b[-1]
    while len(a) >= len(b):
        c = a[-1] / lead
        k = len(a) - len(b)
        q[k] = c
        for i in range(len(b)):
            a[k + i] -= c * b[i]
        a = poly_trim(a)
        if not a:
            break
    return poly_trim(q), a


@lru_cache(maxsize=None)
def cyclotomic_poly(L: int):
    """Coefficients of the L-th cyclotomic polynomial (integers, monic)."""
    if L == 1:
        return (-1, 1)
    num = [0] * L + [1]
    num[0] = -1
    den = [1]
    for d in range(1, L):
        if L % d == 0:
            den = poly_mul(den, list(cyclotomic_poly(d)))
    q, r = poly_divmod_exact(num, den)
    assert not r, "cyclotomic division must be exact"
    return tuple(int(c) for c in q)


@lru_cache(maxsize=None)
def _phi(L: int) -> int:
    return len(cyclotomic_poly(L)) - 1


def euler_phi(n: int) -> int:
    out, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out *= (p - 1) * p ** (e - 1)
        p += 1
    if m > 1:
        out *= m - 1
    return out


def _reduce_mod_cyclo(coeffs, L):
    """Reduce a Q-polynomial in zeta_L (dict e -> Fraction, e arbitrary) to the
    canonical basis of exponents < phi(L)."""
    phi = _phi(L)
    c = [Fraction(0)] * L
    for e, v in coeffs.items():
        c[e % L] += v
    phiL = cyclotomic_poly(L)
    # synthetic division by the monic Phi_L
    for k in range(L - 1, phi - 1, -1):
        v = c[k]
        if v:
            c[k] = Fraction(0)
            for i in range(phi):
                c[k - phi + i] -= v * phiL[i]
    return {e: c[e] for e in range(phi) if c[e]}


class CycloNum:
    """Exact element of Q(zeta_L), canonical coefficients on zeta_L^e, e < phi(L)."""

    __slots__ = ("level", "coeffs")

    def __init__(self, level, coeffs, reduced=False):
        self.level = int(level)
        if reduced:
            self.coeffs = dict(coeffs)
        else:
            self.coeffs = _reduce_mod_cyclo(
                {e: Fraction(v) for e, v in coeffs.items()}, self.level)

    # -- constructors
    @staticmethod
    def from_rational(q, level=1):
        q = Fraction(q)
        return CycloNum(level, {0: q} if q else {}, reduced=True)

    @staticmethod
    def zeta(L, e=1):
        return CycloNum(L, {e % L: Fraction(1)})

    @staticmethod
    def zero(level=1):
        return CycloNum(level, {}, reduced=True)

    @staticmethod
    def one(level=1):
        return CycloNum.from_rational(1, level)

    # -- level changes
    def raise_level(self, L2):
        if L2 == self.level:
            return self
        if L2 % self.level:
            raise ValueError(f"cannot embed level {self.level} into {L2}")
        k = L2 // self.level
        return CycloNum(L2, {e * k: v for e, v in self.coeffs.items()})

    def _common(self, other):
        if not isinstance(other, CycloNum):
            other = CycloNum.from_rational(other)
        L = self.level * other.level // gcd(self.level, other.level)
        return self.raise_level(L), other.raise_level(L)

    def lower_level(self, L2):
        """Exact inverse of raise_level on its image; ValueError if the value
        does not lie in Q(zeta_L2)."""
        if self.level % L2:
            raise ValueError("target level must divide current level")
        if L2 == self.level:
            return self
        basis = [CycloNum.zeta(L2, e).raise_level(self.level)
                 for e in range(_phi(L2))]
        # solve sum x_e * basis_e = self by Gaussian elimination
        n = _phi(self.level)
        rows = []
        for b in basis:
            col = [b.coeffs.get(i, Fraction(0)) for i in range(n)]
            rows.append(col)
        target = [self.coeffs.get(i, Fraction(0)) for i in range(n)]
        m = len(basis)
        aug = [[rows[j][i] for j in range(m)] + [target[i]] for i in range(n)]
        piv_cols, r = [], 0
        for c in range(m):
            pr = next((i for i in range(r, n) if aug[i][c]), None)
            if pr is None:
                continue
            aug[r], aug[pr] = aug[pr], aug[r]
            pv = aug[r][c]
            aug[r] = [x / pv for x in aug[r]]
            for i in range(n):
                if i != r and aug[i][c]:
                    f = aug[i][c]
                    aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
            piv_cols.append(c)
            r += 1
            if r == n:
                break
        sol = [Fraction(0)] * m
        for i, c in enumerate(piv_cols):
            sol[c] = aug[i][m]
        for i in range(r, n):
            if aug[i][m]:
                raise ValueError("value not in the requested subfield")
        cand = CycloNum(L2, {e: sol[e] for e in range(m) if sol[e]})
        if cand.raise_level(self.level) != self:
            raise ValueError("value not in the requested subfield")
        return cand

    # -- ring ops
    def __add__(self, other):
        a, b = self._common(other)
        c = dict(a.coeffs)
        for e, v in b.coeffs.items():
            c[e] = c.get(e, Fraction(0)) + v
        return CycloNum(a.level, {e: v for e, v in c.items() if v}, reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return CycloNum(self.level, {e: -v for e, v in self.coeffs.items()},
                        reduced=True)

    def __sub__(self, other):
        return self + (-other if isinstance(other, CycloNum)
                       else CycloNum.from_rational(-Fraction(other)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if not q:
                return CycloNum.zero(self.level)
            return CycloNum(self.level,
                            {e: v * q for e, v in self.coeffs.items()},
                            reduced=True)
        a, b = self._common(other)
        c = {}
        for e1, v1 in a.coeffs.items():
            for e2, v2 in b.coeffs.items():
                e = e1 + e2
                c[e] = c.get(e, Fraction(0)) + v1 * v2
        return CycloNum(a.level, c)

    __rmul__ = __mul__

    def inverse(self):
        if not self.coeffs:
            raise ZeroDivisionError("cyclotomic zero has no inverse")
        L, phi = self.level, _phi(self.level)
        a = [self.coeffs.get(i, Fraction(0)) for i in range(phi)]
        # extended Euclid in Q[x] against Phi_L
        r0, r1 = [Fraction(c) for c in cyclotomic_poly(L)], poly_trim(a)
        s0, s1 = [], [Fraction(1)]
        while poly_deg(r1) is not None and poly_deg(r1) > 0:
            q, r = poly_divmod_exact(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, poly_add(s0, [-c for c in poly_mul(q, s1)])
        if poly_deg(r1) is None:
            raise ZeroDivisionError("not invertible (zero divisor?)")
        c = r1[0]
        inv = {e: v / c for e, v in enumerate(s1) if v}
        return CycloNum(L, inv)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return CycloNum.from_rational(other) / self

    # -- Galois
    def galois(self, a):
        if gcd(a, self.level) != 1:
            raise ValueError("Galois index must be prime to the level")
        return CycloNum(self.level,
                        {(e * a) % self.level: v for e, v in self.coeffs.items()})

    def conjugate(self):
        return self.galois(self.level - 1) if self.level > 1 else self

    # -- predicates
    def is_zero(self):
        return not self.coeffs

    def is_rational(self):
        return all(e == 0 for e in self.coeffs)

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"not rational: {self}")
        return self.coeffs.get(0, Fraction(0))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.rational_value() == Fraction(other)
        if not isinstance(other, CycloNum):
            return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        if self.is_rational():
            return hash(self.rational_value())
        a = self
        return hash((a.level, tuple(sorted(a.coeffs.items()))))

    def __repr__(self):
        if self.is_rational():
            return f"CycloNum({self.rational_value()})"
        terms = "+".join(f"{v}*z{self.level}^{e}"
                         for e, v in sorted(self.coeffs.items()))
        return f"CycloNum[{terms}]"

    def serialize(self):
        """Level and coefficient list, for structured reports."""
        return {"level": self.level,
                "coeffs": [[e, f"{v.numerator}/{v.denominator}"]
                           for e, v in sorted(self.coeffs.items())]}


def cyclo_normalize(x: CycloNum) -> CycloNum:
    """Canonical representative (idempotent; construction already normalizes)."""
    return CycloNum(x.level, dict(x.coeffs))


# ---------------------------------------------------------------------------
# Q(sqrt p): pairs a + b*sqrt(base), exact

class QSqrt:
    """Element a + b*sqrt(base) with Fraction a, b; base a fixed nonsquare > 0."""

    __slots__ = ("a", "b", "base")

    def __init__(self, a, b=0, base=1):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.base = int(base)
        if self.b == 0:
            self.base = 1

    def _same(self, other):
        if not isinstance(other, QSqrt):
            return QSqrt(other, 0, self.base)
        if other.b and self.b and other.base != self.base:
            raise ValueError("mixed quadratic bases")
        return other

    def __add__(self, other):
        o = self._same(other)
        return QSqrt(self.a + o.a, self.b + o.b, self.base if self.b else o.base)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt(-self.a, -self.b, self.base)

    def __sub__(self, other):
        return self + (-self._same(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._same(other)
        base = self.base if self.b else o.base
        return QSqrt(self.a * o.a + self.b * o.b * base,
                     self.a * o.b + self.b * o.a, base)

    __rmul__ = __mul__

    def inverse(self):
        n = self.a * self.a - self.b * self.b * self.base
        if n == 0:
            raise ZeroDivisionError
        return QSqrt(self.a / n, -self.b / n, self.base)

    def __truediv__(self, other):
        return self * self._same(other).inverse()

    def __rtruediv__(self, other):
        return QSqrt(other, 0, self.base) / self

    def __eq__(self, other):
        o = self._same(other)
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b, self.base if self.b else 1))

    def is_rational(self):
        return self.b == 0

    def rational_value(self) -> Fraction:
        if self.b:
            raise ValueError(f"not rational: {self}")
        return self.a

    def __repr__(self):
        if self.b == 0:
            return f"QSqrt({self.a})"
        return f"QSqrt({self.a}+{self.b}*sqrt{self.base})"


def p_half_power(p: int, k: int) -> QSqrt:
    """p^(k/2) as an exact QSqrt(p) element: p^floor(k/2) * sqrt(p)^(k mod 2)."""
    half = k - 2 * (k // 2)          # 0 or 1, floor semantics for negatives
    base = Fraction(p) ** (k // 2)
    return QSqrt(base, 0, p) if half == 0 else QSqrt(0, base, p)


# ---------------------------------------------------------------------------
# Laurent polynomials in X (general and X <-> 1/X symmetric views)

class Laurent:
    """Laurent polynomial in X over Fraction/QSqrt/CycloNum coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {int(j): v for j, v in (coeffs or {}).items()
                       if not _is_zero(v)}

    @staticmethod
    def const(v):
        return Laurent({0: v})

    def __add__(self, other):
        if not isinstance(other, Laurent):
            other = Laurent.const(other)
        c = dict(self.coeffs)
        for j, v in other.coeffs.items():
            c[j] = c[j] + v if j in c else v
        return Laurent(c)

    __radd__ = __add__

    def __neg__(self):
        return Laurent({j: -v for j, v in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, Laurent):
            other = Laurent.const(other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Laurent):
            other = Laurent.const(other)
        c = {}
        for j1, v1 in self.coeffs.items():
            for j2, v2 in other.coeffs.items():
                j = j1 + j2
                c[j] = c[j] + v1 * v2 if j in c else v1 * v2
        return Laurent(c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Laurent):
            other = Laurent.const(other)
        return self.coeffs == other.coeffs

    def is_zero(self):
        return not self.coeffs

    def is_symmetric(self):
        return all(_eq_vals(self.coeffs.get(-j), v) for j, v in self.coeffs.items())

    def substitute_inverse(self):
        return Laurent({-j: v for j, v in self.coeffs.items()})

    def __repr__(self):
        return "Laurent(" + ", ".join(f"X^{j}: {v}" for j, v in sorted(self.coeffs.items())) + ")"


def _is_zero(v):
    if isinstance(v, CycloNum):
        return v.is_zero()
    if isinstance(v, QSqrt):
        return v.a == 0 and v.b == 0
    return v == 0


class SymLaurent:
    """Symmetric Laurent polynomial sum_j c_j (X^j + X^-j), j=0 counted once.

    Construct from a general Laurent after checking the X <-> 1/X symmetry.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = {int(j): v for j, v in coeffs.items() if j >= 0 and not _is_zero(v)}

    @staticmethod
    def from_laurent(l: Laurent) -> "SymLaurent":
        for j, v in l.coeffs.items():
            if not _eq_vals(l.coeffs.get(-j), v):
                raise ValueError(f"Laurent polynomial not X<->1/X symmetric at {j}")
        return SymLaurent({j: v for j, v in l.coeffs.items() if j >= 0})

    def as_laurent(self) -> Laurent:
        c = dict(self.coeffs)
        for j, v in list(c.items()):
            if j > 0:
                c[-j] = v
        return Laurent(c)


def _eq_vals(a, b):
    if a is None:
        return _is_zero(b)
    return a == b


# ---------------------------------------------------------------------------
# truncated power series in t with arbitrary coefficient arithmetic

class TruncSeries:
    """Truncated power series sum_{k<prec} c_k t^k; multiplication truncates."""

    __slots__ = ("prec", "coeffs", "var")

    def __init__(self, prec, coeffs=None, var="t"):
        self.prec = int(prec)
        self.var = var
        self.coeffs = {int(k): v for k, v in (coeffs or {}).items()
                       if 0 <= int(k) < self.prec and not _laurent_or_val_zero(v)}

    @staticmethod
    def const(v, prec, var="t"):
        return TruncSeries(prec, {0: v}, var)

    def coeff(self, k):
        return self.coeffs.get(k)

    def __add__(self, other):
        self._check(other)
        prec = min(self.prec, other.prec)
        c = {k: v for k, v in self.coeffs.items() if k < prec}
        for k, v in other.coeffs.items():
            if k < prec:
                c[k] = c[k] + v if k in c else v
        return TruncSeries(prec, c, self.var)

    def __neg__(self):
        return TruncSeries(self.prec, {k: -v for k, v in self.coeffs.items()}, self.var)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        prec = min(self.prec, other.prec)
        c = {}
        for k1, v1 in self.coeffs.items():
            if k1 >= prec:
                continue
            for k2, v2 in other.coeffs.items():
                k = k1 + k2
                if k < prec:
                    c[k] = c[k] + v1 * v2 if k in c else v1 * v2
        return TruncSeries(prec, c, self.var)

    def scale(self, v):
        return TruncSeries(self.prec, {k: _mul_val(c, v) for k, c in self.coeffs.items()},
                           self.var)

    def _check(self, other):
        if not isinstance(other, TruncSeries) or other.var != self.var:
            raise ValueError("mismatched series variables")

    def __eq__(self, other):
        prec = min(self.prec, other.prec)
        for k in range(prec):
            a, b = self.coeffs.get(k), other.coeffs.get(k)
            if a is None and b is None:
                continue
            if a is None or b is None:
                if not _laurent_or_val_zero(a if a is not None else b):
                    return False
                continue
            if not a == b:
                return False
        return True

    def __repr__(self):
        inner = ", ".join(f"t^{k}: {v}" for k, v in sorted(self.coeffs.items()))
        return f"TruncSeries<{self.prec}>({inner})"


def _laurent_or_val_zero(v):
    if v is None:
        return True
    if isinstance(v, Laurent):
        return v.is_zero()
    return _is_zero(v)


def _mul_val(a, b):
    return a * b


def series_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    return a * b


def geometric_inverse(c, k: int, prec: int, one, var="t") -> TruncSeries:
    """Expansion of 1/(1 - c*t^k) to the given precision; ``one`` is the
    multiplicative unit of the coefficient domain."""
    if k <= 0:
        raise ValueError("factor must have positive t-degree")
    coeffs, acc, j = {0: one}, one, 1
    while j * k < prec:
        acc = acc * c
        coeffs[j * k] = acc
        j += 1
    return TruncSeries(prec, coeffs, var)


def rational_fn_expand(num: TruncSeries, den_factors, one=None) -> TruncSeries:
    """Power series of num / prod (1 - c*t^k) truncated at num's precision.

    den_factors is a list of (c, k) with k >= 1 (so every factor has constant
    term 1, hence invertible).
    """
    out = num
    if one is None:
        one = Fraction(1)
    for c, k in den_factors:
        out = out * geometric_inverse(c, k, num.prec, one, num.var)
    return out


# ---------------------------------------------------------------------------
# formal products of prime powers with fractional exponents (bookkeeping for
# mass/KM assemblies; integrality asserted at extraction time)

class PPow:
    """rational * prod_p p^(e_p) with Fraction exponents e_p."""

    __slots__ = ("unit", "exps")

    def __init__(self, unit=1, exps=None):
        self.unit = Fraction(unit)
        self.exps = {int(p): Fraction(e) for p, e in (exps or {}).items() if e}

    def __mul__(self, other):
        if not isinstance(other, PPow):
            other = PPow(other)
        e = dict(self.exps)
        for p, v in other.exps.items():
            e[p] = e.get(p, Fraction(0)) + v
            if not e[p]:
                del e[p]
        return PPow(self.unit * other.unit, e)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, PPow):
            other = PPow(other)
        inv = PPow(1 / other.unit, {p: -v for p, v in other.exps.items()})
        return self * inv

    def value(self) -> Fraction:
        """Collapse to an exact rational; all exponents must be integers."""
        out = self.unit
        for p, e in self.exps.items():
            if e.denominator != 1:
                raise ValueError(f"non-integral exponent {e} at prime {p}")
            out *= Fraction(p) ** int(e)
        return out

    def __repr__(self):
        return f"PPow({self.unit}, {self.exps})"

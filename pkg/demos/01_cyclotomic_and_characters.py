#!/usr/bin/env python3
"""Walk through the exact arithmetic kernel: cyclotomic numbers, Dirichlet
characters with their canonical descriptors, and the classical Gauss/Jacobi
sum identities that anchor everything downstream."""

from fractions import Fraction

from kmlift.characters import (char_group, gauss_sum, jacobi_sum,
                               local_component, parse_descriptor)
from kmlift.exactalg import CycloNum

print("== exact cyclotomic arithmetic ==")
z4 = CycloNum.zeta(4)
print("zeta_4^2                  =", (z4 * z4).rational_value())
z5 = CycloNum.zeta(5)
s = sum((CycloNum.zeta(5, e) for e in range(1, 5)), CycloNum.one())
print("1 + zeta_5 + ... + zeta_5^4 =", "0" if s.is_zero() else s)

print("\n== the character group mod 35 and local components ==")
G = char_group(35)
print("phi(35) characters:", len(G))
chi = parse_descriptor("35:2,1")
print("descriptor 35:2,1 has order", chi.order, "and conductor", chi.conductor)
c5, c7 = local_component(chi, 5), local_component(chi, 7)
print("local components:", c5.descriptor(), "x", c7.descriptor(),
      " (orders %d, %d)" % (c5.order, c7.order))

print("\n== Gauss sums: tau(chi) tau(chibar) = chi(-1) N ==")
for chi in char_group(7):
    if chi.is_primitive():
        t = gauss_sum(chi)
        val = t * gauss_sum(chi.conjugate())
        assert val == chi(-1) * Fraction(7)
print("verified for every primitive character mod 7")

print("\n== Jacobi sums: J = tau tau / tau, |J|^2 = p ==")
G7 = char_group(7)
cub = next(c for c in G7 if c.order == 3)
J = jacobi_sum(cub, cub)
print("J(cubic, cubic) * conj =", (J * J.conjugate()).rational_value())

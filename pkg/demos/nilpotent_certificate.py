"""Certificates that a set sits near a nilpotent piece of a subring.

For each X the search returns a subring R', an ideal I of R' contained in
the iterate X_m, and the nilpotency class of R'/I.  Every certificate is
rechecked when it is built and again after a JSON round trip.
"""

from __future__ import annotations

import json

from approxring.ring import MatrixRing, ZMod
from approxring.setops import ElementSet, interval
from approxring.structure import NilpotentCertificate, nilpotency_class, nilpotent_certificate


def strictly_upper_generators(k: int) -> ElementSet:
    M = MatrixRing(ZMod(2), k)
    gens = [M.unit(i, i + 1) for i in range(1, k)]
    return ElementSet(M, [M.zero, *gens])


def describe(label: str, X: ElementSet, **kw) -> None:
    cert = nilpotent_certificate(X, **kw)
    if cert is None:
        print(f"{label:<32} no certificate within the search limits")
        return
    again = NilpotentCertificate.from_dict(json.loads(json.dumps(cert.to_dict())))
    print(
        f"{label:<32} |R'|={len(cert.R_prime):<4} |I|={len(cert.I):<4} m={cert.m} "
        f"class={cert.nil_class} round trip ok={again.nil_class == cert.nil_class}"
    )


def main() -> None:
    print("Nilpotency class of strictly upper triangular matrices over F2")
    for k in (2, 3, 4):
        X = strictly_upper_generators(k)
        print(f"  {k}x{k}: class {nilpotency_class(X)}")

    print("\nCertificates")
    describe("upper triangular 3x3 over F2", strictly_upper_generators(3))
    describe("{0,3,6} in Z/9", ElementSet(ZMod(9), [0, 3, 6]))
    describe("[-2,2] in Z/11", interval(ZMod(11), -2, 2), m_max=5)


if __name__ == "__main__":
    main()

"""Regenerate the shipped Groebner bases of the ambient identity ideals.

For each requested type this computes the reduced degrevlex basis of the
ideal generated by the graded Jordan identity residuals and writes it to
src/jsdeg/data/groebner/type<m><n>.gb.  The computation takes minutes per
type, which is exactly why the results are shipped as data.

Usage: python3 scripts/build_identity_bases.py [M N [M N ...]]
Defaults to the two shipped types, (3,1) and (2,2).
"""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from jsdeg.groebner import GroebnerLimits, Ideal
from jsdeg.superalgebra import jordan_identity_polynomials

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "jsdeg" / "data" / "groebner"
LIMITS = GroebnerLimits(max_basis=50000, max_degree=60, max_seconds=7200)


def build(m: int, n: int) -> None:
    gens = jordan_identity_polynomials(m, n)
    t0 = time.time()
    basis = Ideal(gens).groebner_basis(LIMITS)
    took = time.time() - t0
    out = OUT_DIR / f"type{m}{n}.gb"
    with out.open("w") as fh:
        fh.write(f"# Reduced Groebner basis (degrevlex, inferred variable order) of the\n")
        fh.write(f"# ideal generated by the graded Jordan identity residuals of type ({m},{n}).\n")
        fh.write(f"# {len(gens)} generators -> {len(basis)} basis elements.\n")
        fh.write(f"# Regenerate with scripts/build_identity_bases.py (took {took:.0f}s).\n")
        fh.write(f"type {m} {n}\n")
        for p in basis:
            fh.write(f"poly {p.to_text()}\n")
    print(f"type ({m},{n}): {len(basis)} elements in {took:.1f}s -> {out}", flush=True)


def main(argv: list[str]) -> None:
    if argv:
        nums = [int(x) for x in argv]
        if len(nums) % 2:
            raise SystemExit("expected pairs: M N [M N ...]")
        types = list(zip(nums[::2], nums[1::2]))
    else:
        types = [(3, 1), (2, 2)]
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for m, n in types:
        build(m, n)


if __name__ == "__main__":
    main(sys.argv[1:])

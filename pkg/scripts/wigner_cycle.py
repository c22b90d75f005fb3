"""Check that repeated photon subtraction on a four-component cat cycles with period four."""

import argparse

import numpy as np

from catsuppress import fock
from catsuppress.catstates import CatBasisKind, basis_state


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=2.0)
    ap.add_argument("--points", type=int, default=41)
    args = ap.parse_args()

    n_max = fock.default_cutoff(args.alpha) + 16
    psi = basis_state(CatBasisKind.PLUS_BAR, args.alpha, n_max)
    xs = np.linspace(-4, 4, args.points)
    X, P = np.meshgrid(xs, xs, indexing="ij")
    grids = []
    for m in range(8):
        v = fock.normalize(fock.pad(fock.annihilate(psi, m), n_max))
        grids.append(fock.wigner(np.outer(v, v.conj()), X, P))
    for m in range(4):
        d = np.abs(grids[m] - grids[m + 4]).max()
        print(f"n'={m} vs n'={m + 4}: max |W difference| = {d:.2e}; W(0,0) = {grids[m][args.points // 2, args.points // 2]:+.4f}")


if __name__ == "__main__":
    main()

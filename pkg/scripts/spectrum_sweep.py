"""Sweep the scaling exponent of the diameter-power symbol on a p-adic tree.

Emits CSV rows (beta, ball, depth, lambda) for the eigenvalues of the symbol
``diameter**-beta``; useful for eyeballing how the spectrum stretches as the
kernel gets more singular.

Usage: python3 scripts/spectrum_sweep.py [--p 2] [--depth 4] [--betas -1 0 0.5 1 2]
"""

import argparse
import sys

from ultrawave.io import fmt17
from ultrawave.operators import HomogeneousSymbol, spectrum
from ultrawave.trees import build_padic_tree


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--p", type=int, default=2)
    parser.add_argument("--depth", type=int, default=4)
    parser.add_argument("--betas", type=float, nargs="+", default=[-1.0, 0.0, 0.5, 1.0, 2.0])
    parser.add_argument("--out", default=None)
    args = parser.parse_args()

    tree = build_padic_tree(args.p, args.depth)
    lines = ["beta,ball,level,lambda"]
    for beta in args.betas:
        spec = spectrum(tree, HomogeneousSymbol(beta=beta))
        for ball, lam in spec.items():
            lines.append(f"{fmt17(beta)},{ball},{tree.depth[ball]},{fmt17(lam.real)}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()

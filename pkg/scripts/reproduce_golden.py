"""Print engine values next to the closed forms for every example family.

    python3 scripts/reproduce_golden.py [--points 9]
"""

import argparse

import numpy as np

from mcmqubit import FamilySpec, build, golden, mcm_all, minimize_inconclusive
from mcmqubit.families import FAMILIES


def specs(family, points):
    thetas = np.linspace(np.pi / (2 * points), np.pi / 2, points)
    if family == "two_noisy":
        return [FamilySpec(family, p=p, theta=t) for p in (0.5, 1.0) for t in thetas]
    if family == "geometric_uniform":
        return [FamilySpec(family, n=n, theta=t) for n in (3, 5) for t in thetas]
    if family == "tetrahedron":
        return [FamilySpec(family, p=p) for p in np.linspace(0.1, 1, points)]
    return [FamilySpec(family, theta=t) for t in np.linspace(np.pi / points, np.pi, points)]


def worst(a, b):
    pairs = [(u, v) for u, v in zip(a, b) if u is not None and v is not None]
    return max((abs(u - v) for u, v in pairs), default=float("nan"))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=9)
    args = ap.parse_args()
    print(f"{'ensemble':<44} {'C (engine)':>12} {'|dC|':>9} {'|dt|':>9} {'Q (engine)':>11} {'|dQ|':>9}")
    for family in FAMILIES:
        for spec in specs(family, args.points):
            ens = build(spec)
            gold = golden(spec)
            results = mcm_all(ens)
            q = minimize_inconclusive(ens, [r.m_hat for r in results]).q_inc
            dq = abs(q - gold.q_inc) if gold.q_inc is not None else float("nan")
            print(f"{ens.label:<44} {results[0].confidence:>12.9f} "
                  f"{worst([r.confidence for r in results], gold.confidence):>9.1e} "
                  f"{worst([r.t for r in results], gold.t):>9.1e} {q:>11.8f} {dq:>9.1e}")


if __name__ == "__main__":
    main()

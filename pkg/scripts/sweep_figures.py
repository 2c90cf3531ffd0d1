"""Write the parameter sweeps behind the geometry figures as CSV files.

Each file is the output of ``mcmqubit sweep`` for one family:

    python3 scripts/sweep_figures.py --out sweeps --steps 91 --jobs 4
"""

import argparse
import math
from pathlib import Path

from mcmqubit.cli import SweepSpec, run_sweep, to_csv
from mcmqubit.families import FamilySpec

SWEEPS = {
    "two_noisy_p1": SweepSpec("theta", 0.0, math.pi, 2, family=FamilySpec("two_noisy", p=1.0)),
    "two_noisy_p05": SweepSpec("theta", 0.0, math.pi, 2, family=FamilySpec("two_noisy", p=0.5)),
    "two_noisy_visibility": SweepSpec("p", 0.0, 1.0, 2, family=FamilySpec("two_noisy", theta=math.pi / 4)),
    "geometric_uniform_n3": SweepSpec("theta", 0.0, math.pi, 2, family=FamilySpec("geometric_uniform", n=3)),
    "tetrahedron": SweepSpec("p", 0.0, 1.0, 2, family=FamilySpec("tetrahedron")),
    "asymmetric_I": SweepSpec("theta", 0.0, math.pi, 2, family=FamilySpec("asymmetric_I")),
    "asymmetric_II": SweepSpec("theta", 0.0, math.pi, 2, family=FamilySpec("asymmetric_II")),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("sweeps"))
    ap.add_argument("--steps", type=int, default=91)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, base in SWEEPS.items():
        spec = SweepSpec(base.param, base.start, base.stop, args.steps, family=base.family)
        columns, rows = run_sweep(spec, args.jobs)
        path = args.out / f"{name}.csv"
        path.write_text(to_csv(columns, rows))
        flagged = sum(r["status"] != "ok" for r in rows)
        print(f"{path}: {len(rows)} rows, {flagged} flagged")


if __name__ == "__main__":
    main()

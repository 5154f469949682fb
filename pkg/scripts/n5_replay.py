"""Replay the N=5 genuine enumeration and print its trace box by box.

Each box is one main-subroutine call: the parent's (|D|, dim, |U|, rank),
then one column per new triplet with its status letter.  Cells that differ
from the reference table in tests/test_acceptance.py are marked with '*'.

    python scripts/n5_replay.py [--order default] [--scope global]
"""

import argparse
import sys
import time
from pathlib import Path

from downset_rays.engine import EngineConfig, initial_triplet, run
from downset_rays.sac import PartySystem, build_sac_system, format_entropy_vector

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from test_acceptance import REFERENCE_TRACE, _parse_box  # noqa: E402


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--order", default="default")
    ap.add_argument("--scope", default="global", choices=("global", "parent"))
    args = ap.parse_args()

    t0 = time.perf_counter()
    b = build_sac_system(PartySystem(5))
    init = initial_triplet(b.group, b.initial_down, b.initial_excluded)
    res = run(init, b.system, b.poset, EngineConfig(order=args.order, stabilizer_scope=args.scope), b.group)
    dt = time.perf_counter() - t0

    differing = 0
    for box in res.trace:
        want = _parse_box(REFERENCE_TRACE[box.parent]) if box.parent in REFERENCE_TRACE else []
        print("box", " ".join(map(str, box.parent)))
        for t, row in enumerate(box.rows):
            cell = (row.cells(), row.status)
            mark = " " if t < len(want) and want[t] == cell else "*"
            differing += mark == "*"
            print(f"  {mark} {row.down:3} {row.dim:3} {row.excluded:4} {row.rank:3} {row.status}")
    print(f"\n{len(res.rays)} orbits, {sum(r.orbit_size for r in res.rays)} rays, {dt:.2f} s")
    for r in res.rays:
        print(f"  |orb| {r.orbit_size:3}: {format_entropy_vector(b.ps, r.ray.generator)}")
    print(f"{differing} trace cells differ from the reference table")


if __name__ == "__main__":
    main()

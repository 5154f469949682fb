"""Engine against brute force on many random instances.

    python scripts/oracle_sweep.py [--seeds 500] [--dim 4] [--count 8]

Prints one line per group choice with the number of instances, how many had
their extreme rays thinned out by the order, and any disagreements.
"""

import argparse
import time

from downset_rays.engine import EngineConfig, initial_triplet, run
from downset_rays.oracle import GROUP_CATALOG, RandomInstanceSpec, brute_force_ders, orbit_keys, random_instance
from downset_rays.poset import Poset


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=300)
    ap.add_argument("--dim", type=int, default=4)
    ap.add_argument("--count", type=int, default=8)
    ap.add_argument("--density", type=float, default=0.3)
    args = ap.parse_args()
    for choice in GROUP_CATALOG:
        t0 = time.perf_counter()
        thinned = bad = 0
        for seed in range(args.seeds):
            spec = RandomInstanceSpec(args.dim, args.count, args.density, choice, seed)
            inst = random_instance(spec)
            want = orbit_keys(inst.group, brute_force_ders(inst.system, inst.poset))
            every = brute_force_ders(inst.system, Poset.antichain(inst.system.size))
            thinned += len(every) > len(brute_force_ders(inst.system, inst.poset))
            init = initial_triplet(inst.group, (), ())
            got = run(init, inst.system, inst.poset, EngineConfig(), inst.group).orbit_keys()
            if got != want:
                bad += 1
                print(f"  disagreement: {spec}")
        dt = time.perf_counter() - t0
        print(f"{choice:8} instances {args.seeds}  thinned by the order {thinned}  disagreements {bad}  ({dt:.1f} s)")


if __name__ == "__main__":
    main()

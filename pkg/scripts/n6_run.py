"""The N=6 genuine enumeration, resumable, followed by an SSA summary.

Runs for hours on a laptop.  Progress is checkpointed after every generation,
so an interrupted run continues where it stopped:

    python scripts/n6_run.py --out runs/n6 [--jobs 8]

The summary lists the orbit count, how many orbit representatives violate
SSA, and the range of orbit sizes.  Point DOWNSET_RAYS_N6_RESULT at the
written result.json to check it in tests/test_acceptance.py.
"""

import argparse
import json
import os
import sys
from pathlib import Path

from downset_rays.cli import main as cli_main
from downset_rays.sac import PartySystem, ssa_check


def summarize(result: Path) -> dict:
    data = json.loads(result.read_text())
    ps = PartySystem(6)
    sizes = [o["orbit_size"] for o in data["orbits"]]
    bad = [o for o in data["orbits"] if not ssa_check(ps, o["vector"])[0]]
    return {
        "orbits": len(sizes),
        "ssa_violating": len(bad),
        "ssa_compatible": len(sizes) - len(bad),
        "orbit_size_min": min(sizes, default=0),
        "orbit_size_max": max(sizes, default=0),
        "rays": sum(sizes),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="runs/n6")
    ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--summary-only", action="store_true")
    args = ap.parse_args()
    out = Path(args.out)
    if not args.summary_only:
        out.mkdir(parents=True, exist_ok=True)
        code = cli_main(
            [
                "-v",
                "enumerate",
                "--parties",
                "6",
                "--jobs",
                str(args.jobs),
                "--checkpoint",
                str(out / "checkpoint.json"),
                "--resume",
                "--out",
                str(out),
            ]
        )
        if code:
            sys.exit(code)
    print(json.dumps(summarize(out / "result.json"), indent=1))


if __name__ == "__main__":
    main()

"""Command-line interface.

Subcommands: enumerate, postprocess, check, oracle, graph, counts.  Exit
codes: 0 success, 1 an oracle disagreement, 2 input error, 3 geometric
precondition failure, 4 resource guard.

An enumeration writes into its output directory::

    rays.txt       one orbit representative per line
    orbits.txt     orbit index, |orb|, saturation size, how the ray was found
    trace.txt      one block per main-subroutine call: parent and children
                   as "|D| dim |U| rank letter"
    open.txt       triplets left open by the stop criterion ("D ... | U ...")
    result.json    the same content, machine readable
    manifest.json  command, config, digests, versions, wall time
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import platform
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import networkx
import numpy

from . import __version__
from .engine import EngineConfig, EnumerationResult, Engine, FoundRay, RayRecord, Triplet, initial_triplet, run
from .errors import GeometryError, GuardError, InputError
from .graphs import even_degree_check, graph_entropy, parse_graph
from .io import format_vector, parse_group, parse_index_set, parse_inequalities, parse_poset, parse_vectors
from .linalg import primitive
from .permsym import PermGroup, canonical_set, set_stabilizer
from .polycone import InequalitySystem
from .poset import Poset
from .sac import (
    PartyAction,
    PartySystem,
    build_sac_system,
    evaluate_inequalities,
    facet_count,
    format_entropy_vector,
    fstar_dim,
    sa_check,
    ssa_check,
    stirling2_3,
)

log = logging.getLogger("downset_rays")

SCRATCH_ENV = "DOWNSET_RAYS_SCRATCH"


def _digest(data: str | bytes) -> str:
    if isinstance(data, str):
        data = data.encode()
    return hashlib.sha256(data).hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict
    inputs: dict[str, str]
    versions: dict[str, str] = field(default_factory=dict)
    wall_time: float = 0.0
    results: dict[str, str] = field(default_factory=dict)

    @staticmethod
    def current_versions() -> dict[str, str]:
        return {
            "downset_rays": __version__,
            "python": platform.python_version(),
            "numpy": numpy.__version__,
            "networkx": networkx.__version__,
        }

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")


# -- problem setup --------------------------------------------------------------


@dataclass
class Problem:
    system: InequalitySystem
    poset: Poset
    group: PermGroup
    down: frozenset[int]
    excluded: frozenset[int]
    spec: dict
    inputs: dict[str, str]
    ps: PartySystem | None = None
    action: PartyAction | None = None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def problem_from_spec(spec: dict) -> Problem:
    if spec.get("parties") is not None:
        ps = PartySystem(int(spec["parties"]))
        b = build_sac_system(ps, spec.get("mode", "genuine"))
        inputs = {"parties": _digest(f"N={ps.n_parties} mode={b.mode}")}
        return Problem(b.system, b.poset, b.group, b.initial_down, b.initial_excluded, spec, inputs, ps, b.action)
    if not spec.get("cone"):
        raise InputError("give either --parties or --cone")
    texts = {k: _read(spec[k]) for k in ("cone", "poset", "group", "down", "excluded") if spec.get(k)}
    inputs = {k: _digest(t) for k, t in texts.items()}
    system = parse_inequalities(texts["cone"]).system()
    k = system.size
    poset = parse_poset(texts["poset"]) if "poset" in texts else Poset.antichain(k)
    group = parse_group(texts["group"], k) if "group" in texts else PermGroup.trivial(k)
    down = parse_index_set(texts["down"]) if "down" in texts else frozenset()
    excluded = parse_index_set(texts.get("excluded", ""))
    # flagged inequalities describe the excluded region unless given explicitly
    if "excluded" not in texts:
        excluded = frozenset(i for i, r in enumerate(system.redundant) if r)
    if poset.size != k or group.degree != k:
        raise InputError(f"cone has {k} inequalities but poset/group have {poset.size}/{group.degree} elements")
    bad = [i for i in down | excluded if not 0 <= i < k]
    if bad:
        raise InputError(f"index {bad[0]} out of range 0..{k - 1}")
    return Problem(system, poset, group, down, excluded, spec, inputs)


def _problem_spec(args) -> dict:
    return {
        "parties": args.parties,
        "mode": args.mode,
        "cone": args.cone,
        "poset": args.poset,
        "group": args.group,
        "down": args.down,
        "excluded": args.excluded,
    }


# -- output formats -------------------------------------------------------------


def _vector_text(pb: Problem, v: Sequence) -> str:
    return format_entropy_vector(pb.ps, v) if pb.ps else format_vector(v)


def format_rays(pb: Problem, rays: Sequence[RayRecord]) -> str:
    out = ["# orbit representatives; tag = orbit index and |orb|"]
    for t, r in enumerate(rays, 1):
        out.append(f"orbit {t} size {r.orbit_size}: {_vector_text(pb, r.ray.generator)}")
    return "\n".join(out) + "\n"


def format_orbits(rays: Sequence[RayRecord], sources: dict) -> str:
    out = ["# orbit |orb| |Z| source"]
    for t, r in enumerate(rays, 1):
        out.append(f"{t} {r.orbit_size} {len(r.down_set)} {sources.get(r.canonical, '-')}")
    out.append(f"# {len(rays)} orbits, {sum(r.orbit_size for r in rays)} rays")
    return "\n".join(out) + "\n"


def format_trace(res: EnumerationResult) -> str:
    out = ["# |D| dim |U| rank status (y open, b simplicial, g ray, r discarded)"]
    for box in res.trace:
        out.append("box " + " ".join(str(x) for x in box.parent))
        for row in box.rows:
            out.append("  " + " ".join(str(x) for x in row.cells()) + " " + row.status)
    return "\n".join(out) + "\n"


def format_open(triplets: Sequence[Triplet]) -> str:
    out = ["# D ... | U ..."]
    for t in triplets:
        out.append("D " + " ".join(map(str, sorted(t.down_set))) + " | U " + " ".join(map(str, sorted(t.excluded))))
    return "\n".join(out) + "\n"


def parse_open(text: str, group: PermGroup) -> list[Triplet]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            d_part, u_part = line.split("|")
            d_tok, u_tok = d_part.split(), u_part.split()
            if d_tok[0] != "D" or u_tok[0] != "U":
                raise ValueError
            d = frozenset(int(x) for x in d_tok[1:])
            u = frozenset(int(x) for x in u_tok[1:])
        except (ValueError, IndexError):
            raise InputError(f"open-triplet line {lineno}: expected 'D ... | U ...'") from None
        out.append(Triplet(d, u, set_stabilizer(group, d)))
    return out


def _result_json(pb: Problem, rays: Sequence[RayRecord], res_stats: dict, open_t: Sequence[Triplet]) -> dict:
    return {
        "orbits": [
            {"canonical": list(r.canonical), "orbit_size": r.orbit_size, "vector": list(r.ray.generator)} for r in rays
        ],
        "open": [{"D": sorted(t.down_set), "U": sorted(t.excluded)} for t in open_t],
        "stats": {k: v for k, v in res_stats.items() if k != "wall_time"},
    }


def _write_outputs(out: Path, files: dict[str, str]) -> dict[str, str]:
    out.mkdir(parents=True, exist_ok=True)
    digests = {}
    for name, text in files.items():
        (out / name).write_text(text)
        digests[name] = _digest(text)
    return digests


def _source_map(eng: Engine, found: Sequence[FoundRay]) -> dict:
    src: dict = {}
    for r in found:
        src.setdefault(canonical_set(eng.group, r.zero_set), r.source)
    return src


# -- commands -------------------------------------------------------------------


def _engine_config(args) -> EngineConfig:
    frac = None if args.stop_excluded_frac is None else Fraction(args.stop_excluded_frac)
    return EngineConfig(
        closure_variant=args.closure,
        stop_dim=args.stop_dim,
        stop_excluded_frac=frac,
        order=args.order,
        dedup_queue=args.dedup_queue,
        jobs=max(1, args.jobs),
    )


def cmd_enumerate(args) -> int:
    t0 = time.perf_counter()
    pb = problem_from_spec(_problem_spec(args))
    cfg = _engine_config(args)
    checkpoint = args.checkpoint
    if checkpoint is None and os.environ.get(SCRATCH_ENV):
        key = _digest(json.dumps([pb.inputs, cfg.echo()], sort_keys=True))[:16]
        checkpoint = str(Path(os.environ[SCRATCH_ENV]) / f"checkpoint-{key}.json")
    init = initial_triplet(pb.group, pb.down, pb.excluded)
    res = run(
        init,
        pb.system,
        pb.poset,
        cfg,
        pb.group,
        checkpoint=checkpoint,
        resume=args.resume,
        progress=log.info,
    )
    eng = Engine(pb.system, pb.poset, pb.group, cfg)
    files = {
        "rays.txt": format_rays(pb, res.rays),
        "orbits.txt": format_orbits(res.rays, _source_map(eng, res.found)),
        "trace.txt": format_trace(res),
        "result.json": json.dumps(_result_json(pb, res.rays, res.stats, res.open_triplets), indent=1, sort_keys=True)
        + "\n",
    }
    if res.open_triplets:
        files["open.txt"] = format_open(res.open_triplets)
    out = Path(args.out)
    digests = _write_outputs(out, files)
    config = {"problem": pb.spec, "engine": cfg.echo()}
    config["engine"].pop("jobs")
    RunManifest("enumerate", config, pb.inputs, RunManifest.current_versions(), time.perf_counter() - t0, digests).write(
        out / "manifest.json"
    )
    print(f"{len(res.rays)} orbits, {sum(r.orbit_size for r in res.rays)} rays, {len(res.open_triplets)} open triplets")
    print("orbit sizes: " + " ".join(str(r.orbit_size) for r in res.rays))
    return 0


def cmd_postprocess(args) -> int:
    t0 = time.perf_counter()
    run_dir = Path(args.run)
    try:
        manifest = json.loads(_read(str(run_dir / "manifest.json")))
        prior = json.loads(_read(str(run_dir / "result.json")))
    except json.JSONDecodeError as e:
        raise InputError(f"corrupt run directory: {e}") from None
    pb = problem_from_spec(manifest["config"]["problem"])
    ecfg = dict(manifest["config"]["engine"])
    cfg = EngineConfig(
        closure_variant=ecfg["closure_variant"],
        stop_dim=ecfg["stop_dim"],
        order=ecfg["order"],
        stabilizer_scope=ecfg.get("stabilizer_scope", "global"),
    )
    eng = Engine(pb.system, pb.poset, pb.group, cfg, region=pb.excluded)
    open_path = run_dir / "open.txt"
    triplets = parse_open(open_path.read_text(), pb.group) if open_path.exists() else []
    found = [FoundRay(tuple(o["vector"]), frozenset(o["canonical"]), "enumerate") for o in prior["orbits"]]
    for t in triplets:
        found.extend(eng.post_process(t))
    rays = eng.finalize(found)
    stats = dict(prior.get("stats", {}))
    stats["post_processed"] = len(triplets)
    stats["orbits"] = len(rays)
    files = {
        "rays.txt": format_rays(pb, rays),
        "orbits.txt": format_orbits(rays, _source_map(eng, found)),
        "result.json": json.dumps(_result_json(pb, rays, stats, []), indent=1, sort_keys=True) + "\n",
    }
    out = Path(args.out) if args.out else run_dir / "post"
    digests = _write_outputs(out, files)
    RunManifest(
        "postprocess",
        manifest["config"],
        {"run": manifest["results"].get("result.json", "")} | pb.inputs,
        RunManifest.current_versions(),
        time.perf_counter() - t0,
        digests,
    ).write(out / "manifest.json")
    print(f"{len(triplets)} open triplets post-processed; {len(rays)} orbits")
    print("orbit sizes: " + " ".join(str(r.orbit_size) for r in rays))
    return 0


def _load_vectors(path: str, ps: PartySystem | None) -> list[tuple[str, tuple]]:
    out = []
    for t, (tag, vals) in enumerate(parse_vectors(_read(path)), 1):
        if ps is not None:
            if len(vals) != ps.ambient_dim:
                raise InputError(f"vector {t} has {len(vals)} entries; N={ps.n_parties} needs {ps.ambient_dim}")
            vals = ps.from_presentation(vals)
        out.append((tag or f"ray {t}", tuple(vals)))
    return out


def _mi_zero_set(b, v: Sequence) -> frozenset[int]:
    return frozenset(i for i, x in enumerate(b.system.values(v)) if x == 0)


def cmd_check(args) -> int:
    ps = PartySystem(args.parties) if args.parties else None
    if ps is None and (args.sa or args.ssa or args.downset):
        raise InputError("--sa, --ssa and --downset need --parties")
    checks = [c for c in ("sa", "ssa", "downset") if getattr(args, c)]
    if ps is not None and not checks and not args.ineqs:
        checks = ["sa", "ssa", "downset"]
    vectors = _load_vectors(args.rays, ps)
    ineq = parse_inequalities(_read(args.ineqs)) if args.ineqs else None
    b = build_sac_system(ps, "full") if ps is not None and "downset" in checks else None
    report = []
    for tag, v in vectors:
        row: dict = {"tag": tag}
        if "sa" in checks:
            ok, bad = sa_check(ps, v)
            row["sa"] = {"ok": ok, "violated": bad}
        if "ssa" in checks:
            ok, bad = ssa_check(ps, v)
            row["ssa"] = {"ok": ok, "violated": bad}
        if "downset" in checks:
            z = _mi_zero_set(b, v)
            row["downset"] = {"ok": b.poset.is_down_set(z), "vanishing": len(z)}
        if ineq is not None:
            if ineq.ambient_dim != len(v):
                raise InputError(f"inequality file has dimension {ineq.ambient_dim}, vector has {len(v)}")
            r = evaluate_inequalities(ineq.duals, v, ineq.tags)
            row["ineqs"] = {"ok": r.ok, "saturated": r.saturated, "violated": r.violated, "by_tag": r.by_tag}
        report.append(row)
    if args.json:
        print(json.dumps(report, indent=1, sort_keys=True, default=list))
        return 0
    for row in report:
        parts = [row["tag"] + ":"]
        for c in ("sa", "ssa"):
            if c in row:
                parts.append(f"{c.upper()} " + ("pass" if row[c]["ok"] else f"FAIL({row[c]['violated']})"))
        if "downset" in row:
            parts.append("downset " + ("pass" if row["downset"]["ok"] else "FAIL"))
        if "ineqs" in row:
            r = row["ineqs"]
            parts.append(f"ineqs saturated {r['saturated']} violated {r['violated']}")
            for t, (s, vv) in r["by_tag"].items():
                parts.append(f"[{t}: {s}/{vv}]")
        print(" ".join(parts))
    return 0


def _prior_keys(run_dir: str) -> set[tuple[int, ...]]:
    try:
        prior = json.loads(_read(str(Path(run_dir) / "result.json")))
    except json.JSONDecodeError as e:
        raise InputError(f"corrupt result file: {e}") from None
    return {tuple(o["canonical"]) for o in prior["orbits"]}


def cmd_oracle(args) -> int:
    from .oracle import brute_force_ders, dd_filter_pipeline, orbit_keys

    pb = problem_from_spec(_problem_spec(args))
    if pb.ps is not None:
        if pb.spec.get("mode", "genuine") != "genuine":
            raise InputError("the oracle pipeline covers the genuine mode only")
        limit = 5 if args.force else 4
        keys = {o.canonical for o in dd_filter_pipeline(pb.ps, max_parties=limit)}
    else:
        if pb.down:
            raise InputError("the brute-force oracle starts from the whole cone; drop --down")
        guard = 10**12 if args.force else 2_000_000
        keys = orbit_keys(pb.group, brute_force_ders(pb.system, pb.poset, pb.excluded, guard=guard))
    if args.compare:
        other = _prior_keys(args.compare)
        label = args.compare
    else:
        init = initial_triplet(pb.group, pb.down, pb.excluded)
        other = run(init, pb.system, pb.poset, EngineConfig(), pb.group).orbit_keys()
        label = "engine"
    agree = keys == other
    print(f"oracle orbits {len(keys)}, {label} orbits {len(other)}: {'agree' if agree else 'DISAGREE'}")
    if not agree:
        print(f"  only in oracle: {len(keys - other)}, only in {label}: {len(other - keys)}")
    return 0 if agree else 1


def _expected_vector(spec: str, ps: PartySystem) -> tuple:
    path, _, which = spec.partition(":")
    vecs = _load_vectors(path, ps)
    if not vecs:
        raise InputError(f"{path} holds no vectors")
    t = int(which) if which else 1
    if not 1 <= t <= len(vecs):
        raise InputError(f"{path} has {len(vecs)} vectors, asked for entry {t}")
    return vecs[t - 1][1]


def _int_primitive(v: Sequence) -> tuple[int, ...]:
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // numpy.gcd(den, x.denominator)
    return primitive(int(x * den) for x in fr)


def cmd_graph(args) -> int:
    gm = parse_graph(_read(args.graph))
    ps = gm.party_system
    v = graph_entropy(gm)
    sa_ok, sa_bad = sa_check(ps, v)
    ssa_ok, ssa_bad = ssa_check(ps, v)
    try:
        even = "even" if even_degree_check(gm) else "odd"
    except InputError:
        even = "n/a"
    result = {
        "vector": format_entropy_vector(ps, v),
        "sa": sa_ok,
        "ssa": ssa_ok,
        "sa_violated": sa_bad,
        "ssa_violated": ssa_bad,
        "degree": even,
    }
    if args.expect:
        target = _int_primitive(_expected_vector(args.expect, ps))
        mine = _int_primitive(v) if any(v) else None
        from .sac import party_group

        action = party_group(ps)
        images = {action.act_on_vector(t, target) for t in range(action.group.order)}
        result["match"] = mine in images
    if args.json:
        print(json.dumps(result, indent=1, sort_keys=True))
        return 0
    print(f"vector: {result['vector']}")
    print(f"SA {'pass' if sa_ok else f'FAIL({sa_bad})'}  SSA {'pass' if ssa_ok else f'FAIL({ssa_bad})'}  degree parity: {even}")
    if "match" in result:
        print(f"matches expected ray up to party permutation: {'yes' if result['match'] else 'no'}")
    return 0


def cmd_counts(args) -> int:
    ns = args.parties or list(range(2, 9))
    rows = []
    for n in ns:
        if not 2 <= n <= 8:
            raise InputError(f"counts are tabulated for 2 <= N <= 8, got {n}")
        ps = PartySystem(n)
        rows.append({"N": n, "instances": stirling2_3(n + 2), "facets": facet_count(ps), "fstar_dim": fstar_dim(ps)})
    if args.json:
        print(json.dumps(rows, indent=1))
        return 0
    print(f"{'N':>2} {'|M|':>8} {'facets':>8} {'dim F*':>7}")
    for r in rows:
        print(f"{r['N']:>2} {r['instances']:>8} {r['facets']:>8} {r['fstar_dim']:>7}")
    return 0


# -- argument parsing -------------------------------------------------------------


def _add_problem_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("problem")
    g.add_argument("--parties", type=int, help="subadditivity cone on N parties")
    g.add_argument("--mode", choices=("genuine", "full"), default="genuine")
    g.add_argument("--cone", help="inequality file")
    g.add_argument("--poset", help="poset file (default: antichain)")
    g.add_argument("--group", help="group file (default: trivial)")
    g.add_argument("--down", help="initial down-set, index list (default: empty)")
    g.add_argument("--excluded", help="excluded up-set, index list (default: the flagged inequalities)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="downset-rays", description="Down-set extreme rays of partially ordered cones.")
    ap.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="run the enumeration")
    _add_problem_args(p)
    p.add_argument("--closure", choices=("ld", "fd"), default="ld")
    p.add_argument("--stop-dim", type=int, default=1, help="leave triplets of this dimension or less open")
    p.add_argument("--stop-excluded-frac", help="also stop once |U|/|M| reaches this fraction, e.g. 9/10")
    p.add_argument("--order", default="default", help="ordering of new triplets")
    p.add_argument("--dedup-queue", action="store_true", help="drop queued triplets equivalent up to symmetry")
    p.add_argument("--checkpoint", help=f"checkpoint file (default: under ${SCRATCH_ENV} when set)")
    p.add_argument("--resume", action="store_true", help="continue from the checkpoint")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes (default: all cores)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("postprocess", help="finish the open triplets of an enumeration")
    p.add_argument("--run", required=True, help="output directory of an enumerate run")
    p.add_argument("--out", help="output directory (default: RUN/post)")
    p.set_defaults(func=cmd_postprocess)

    p = sub.add_parser("check", help="test vectors against SA, SSA, Klein's condition or an inequality file")
    p.add_argument("--rays", required=True, help="vector file")
    p.add_argument("--parties", type=int)
    p.add_argument("--sa", action="store_true")
    p.add_argument("--ssa", action="store_true")
    p.add_argument("--downset", action="store_true", help="vanishing MI instances form a down-set")
    p.add_argument("--ineqs", help="inequality file; counts saturated and violated rows per tag")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("oracle", help="compare with an independent reference computation")
    _add_problem_args(p)
    p.add_argument("--compare", help="output directory of an enumerate run (default: run the engine now)")
    p.add_argument("--force", action="store_true", help="raise the size guards")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("graph", help="entropy vector of a graph model")
    p.add_argument("--graph", required=True, help="graph file")
    p.add_argument("--expect", help="FILE[:K]: compare with the K-th vector of a ray file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("counts", help="instance, facet and F* dimension counts")
    p.add_argument("--parties", type=int, nargs="*")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_counts)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (InputError, GeometryError, GuardError) as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return InputError.exit_code


if __name__ == "__main__":
    sys.exit(main())

"""Line-oriented text formats for cones, posets, groups, rays and traces.

Lines starting with ``#`` are comments.  Rationals are written as integers or
``p/q``.

cone / inequality file::

    dim 3, count 4
    -1 0 1
    0 -1 1 *          # trailing * marks a redundant inequality
    1 0 1 @orbitA     # optional orbit tag (inequality files)

poset file::

    4
    2 < 1             # i < j: element i is covered by element j

group file::

    degree 4          # optional
    1 0 3 2           # one generator per line, image notation

ray file: one vector per line; SAC vectors use the cardinality groups
separated by ``;`` in presentation order.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .errors import InputError
from .linalg import format_rational, parse_rational
from .permsym import PermGroup, Permutation
from .polycone import InequalitySystem
from .poset import Poset

_HEADER = re.compile(r"^\s*dim\s+(\d+)\s*,?\s*count\s+(\d+)\s*$")


def _lines(text: str) -> Iterable[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


@dataclass
class InequalityFile:
    ambient_dim: int
    duals: list[tuple[Fraction, ...]]
    redundant: list[bool]
    tags: list[str | None]

    def system(self, validate: bool = True) -> InequalitySystem:
        return InequalitySystem(self.ambient_dim, self.duals, self.redundant, validate=validate)


def parse_inequalities(text: str) -> InequalityFile:
    it = iter(_lines(text))
    try:
        lineno, head = next(it)
    except StopIteration:
        raise InputError("empty cone file") from None
    m = _HEADER.match(head)
    if not m:
        raise InputError(f"line {lineno}: expected header 'dim n, count k'")
    n, k = int(m.group(1)), int(m.group(2))
    duals, flags, tags = [], [], []
    for lineno, line in it:
        tok = line.split()
        tag = None
        red = False
        while tok and (tok[-1] == "*" or tok[-1].startswith("@")):
            last = tok.pop()
            if last == "*":
                red = True
            else:
                tag = last[1:]
        try:
            row = tuple(parse_rational(t) for t in tok)
        except ValueError as e:
            raise InputError(f"line {lineno}: {e}") from None
        if len(row) != n:
            raise InputError(f"line {lineno}: expected {n} entries, got {len(row)}")
        duals.append(row)
        flags.append(red)
        tags.append(tag)
    if len(duals) != k:
        raise InputError(f"header announces {k} inequalities, file has {len(duals)}")
    return InequalityFile(n, duals, flags, tags)


def format_inequalities(sys: InequalitySystem, tags: Sequence[str | None] | None = None) -> str:
    out = [f"dim {sys.ambient_dim}, count {sys.size}"]
    for i, d in enumerate(sys.duals):
        line = " ".join(format_rational(x) for x in d)
        if sys.redundant[i]:
            line += " *"
        if tags and tags[i]:
            line += f" @{tags[i]}"
        out.append(line)
    return "\n".join(out) + "\n"


def parse_poset(text: str) -> Poset:
    it = iter(_lines(text))
    try:
        lineno, head = next(it)
        k = int(head)
    except StopIteration:
        raise InputError("empty poset file") from None
    except ValueError:
        raise InputError(f"line {lineno}: expected the element count") from None
    rel = []
    for lineno, line in it:
        parts = line.split("<")
        if len(parts) != 2:
            raise InputError(f"line {lineno}: expected 'i < j'")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise InputError(f"line {lineno}: indices must be integers") from None
        if not (0 <= i < k and 0 <= j < k) or i == j:
            raise InputError(f"line {lineno}: bad pair {i} < {j}")
        rel.append((i, j))
    try:
        return Poset(k, rel)
    except ValueError as e:
        raise InputError(str(e)) from None


def format_poset(p: Poset) -> str:
    out = [str(p.size)]
    for i, j in sorted(p.covers):
        out.append(f"{i} < {j}")
    return "\n".join(out) + "\n"


def parse_group(text: str, degree: int | None = None) -> PermGroup:
    gens = []
    for lineno, line in _lines(text):
        tok = line.split()
        if tok[0] == "degree":
            degree = int(tok[1])
            continue
        try:
            img = tuple(int(t) for t in tok)
        except ValueError:
            raise InputError(f"line {lineno}: generator images must be integers") from None
        try:
            gens.append(Permutation(img))
        except ValueError as e:
            raise InputError(f"line {lineno}: {e}") from None
    if degree is None:
        if not gens:
            raise InputError("group file lists no generators and no degree")
        degree = gens[0].degree
    for g in gens:
        if g.degree != degree:
            raise InputError("generator degree does not match")
    return PermGroup(degree, gens)


def format_group(g: PermGroup) -> str:
    out = [f"degree {g.degree}"]
    for h in g.generators:
        out.append(" ".join(str(x) for x in h.images))
    return "\n".join(out) + "\n"


def parse_index_set(text: str) -> frozenset[int]:
    out = set()
    for lineno, line in _lines(text):
        for t in line.replace(",", " ").split():
            try:
                out.add(int(t))
            except ValueError:
                raise InputError(f"line {lineno}: bad index {t!r}") from None
    return frozenset(out)


def parse_vectors(text: str) -> list[tuple[str | None, list[Fraction]]]:
    """Rows of rationals; ';' separators are ignored, a leading 'tag:' is kept."""
    out = []
    for lineno, line in _lines(text):
        tag = None
        if ":" in line:
            tag, line = line.split(":", 1)
            tag = tag.strip()
        vals = line.replace(";", " ").replace(",", " ").strip("{}()[] ").split()
        try:
            out.append((tag, [parse_rational(v.strip("{}()[]")) for v in vals]))
        except ValueError as e:
            raise InputError(f"line {lineno}: {e}") from None
    return out


def format_vector(v: Sequence) -> str:
    return " ".join(format_rational(x) for x in v)


def write_json(path: str | Path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")

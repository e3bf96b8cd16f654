"""Line-oriented text format for synchronization problems and solutions.

Problem files::

    PSYNC 1
    <n> <m>
    TRUTH                 # optional: n map lines follow
    <m images per node>
    EDGES
    <i> <j> [<b>]         # b=1 marks a bad edge; flag present iff truth is
    <m images of the block oriented i -> j>
    ...

Solution files replace the sections with a single ``SOLUTION`` section of n
map lines.  Everything is ASCII with LF line endings and single spaces, and
the writer emits edges in canonical sorted order, so serialisation is
bit-stable and round-trips exactly.
"""

from __future__ import annotations

import os

import numpy as np

from .blocks import BlockMeasurement, WeightedGraph
from .errors import FileFormatError, PermSyncError
from .models import ProblemInstance
from .perms import Permutation

_MAGIC = "PSYNC"
_VERSION = "1"


def _render_map(row: np.ndarray) -> str:
    return " ".join(str(int(x)) for x in row)


def write_problem(path: str | os.PathLike, inst: ProblemInstance) -> None:
    """Serialise an instance (canonical edge order, LF endings, ASCII)."""
    lines = [f"{_MAGIC} {_VERSION}", f"{inst.n} {inst.m}"]
    if inst.truth is not None:
        lines.append("TRUTH")
        lines.extend(_render_map(p.map) for p in inst.truth)
    lines.append("EDGES")
    with_flags = inst.bad_edges is not None
    for e, (i, j) in enumerate(map(tuple, inst.meas.edges)):
        if with_flags:
            flag = 1 if (i, j) in inst.bad_edges else 0
            lines.append(f"{i} {j} {flag}")
        else:
            lines.append(f"{i} {j}")
        lines.append(_render_map(inst.meas.maps[e]))
    data = "\n".join(lines) + "\n"
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(data)


def read_problem(path: str | os.PathLike) -> ProblemInstance:
    """Parse a problem file, validating structure and semantics strictly."""
    with open(path, "r", encoding="ascii", newline="") as fh:
        lines = fh.read().splitlines()
    pos = 0

    def take(what: str) -> str:
        nonlocal pos
        if pos >= len(lines):
            raise FileFormatError(f"unexpected end of file, expected {what}")
        line = lines[pos]
        pos += 1
        return line

    header = take("header").split()
    if len(header) != 2 or header[0] != _MAGIC:
        raise FileFormatError("malformed header (expected 'PSYNC <version>')")
    if header[1] != _VERSION:
        raise FileFormatError(f"unknown format version {header[1]!r}")
    try:
        n, m = (int(tok) for tok in take("problem size").split())
    except ValueError as exc:
        raise FileFormatError("malformed size line (expected '<n> <m>')") from exc
    if n < 1 or m < 1:
        raise FileFormatError("node count and block size must be positive")

    def parse_map(line: str, context: str) -> np.ndarray:
        try:
            row = np.array([int(tok) for tok in line.split()], dtype=np.int64)
        except ValueError as exc:
            raise FileFormatError(f"malformed map line in {context}") from exc
        if row.size != m:
            raise FileFormatError(f"map line in {context} has {row.size} images, expected {m}")
        try:
            Permutation(row)
        except ValueError as exc:
            raise FileFormatError(f"map line in {context} is not a bijection") from exc
        return row

    truth: list[np.ndarray] | None = None
    section = take("TRUTH or EDGES section")
    if section == "TRUTH":
        truth = [parse_map(take("truth map"), f"TRUTH node {k}") for k in range(n)]
        section = take("EDGES section")
    if section != "EDGES":
        raise FileFormatError(f"expected EDGES section, got {section!r}")

    edges: list[tuple[int, int]] = []
    maps: list[np.ndarray] = []
    flags: list[int] = []
    seen: set[tuple[int, int]] = set()
    have_flags: bool | None = None
    while pos < len(lines):
        head = take("edge line").split()
        if len(head) not in (2, 3):
            raise FileFormatError(f"malformed edge line {head!r}")
        try:
            i, j = int(head[0]), int(head[1])
        except ValueError as exc:
            raise FileFormatError(f"malformed edge line {head!r}") from exc
        if i == j or not (0 <= i < n and 0 <= j < n):
            raise FileFormatError(f"invalid edge ({i}, {j})")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise FileFormatError(f"duplicate edge ({i}, {j})")
        seen.add(key)
        flagged = len(head) == 3
        if have_flags is None:
            have_flags = flagged
        elif have_flags != flagged:
            raise FileFormatError("bad-edge flags must be present on all edges or none")
        if flagged:
            if head[2] not in ("0", "1"):
                raise FileFormatError(f"bad-edge flag must be 0 or 1, got {head[2]!r}")
            flags.append(int(head[2]))
        block = parse_map(take("block map"), f"edge ({i}, {j})")
        if i > j:
            block = np.argsort(block)
            i, j = j, i
        edges.append((i, j))
        maps.append(block)

    if truth is not None and have_flags is not True:
        raise FileFormatError("a file with TRUTH must flag its bad edges")
    if truth is None and have_flags:
        raise FileFormatError("bad-edge flags require a TRUTH section")

    edge_arr = np.array(edges, dtype=np.int64).reshape(len(edges), 2)
    order = np.lexsort((edge_arr[:, 1], edge_arr[:, 0])) if len(edges) else np.array([], dtype=np.int64)
    edge_arr = edge_arr[order]
    map_arr = (np.stack(maps)[order] if maps else np.zeros((0, m), dtype=np.int64))
    graph = WeightedGraph.unit(n, edge_arr)
    meas = BlockMeasurement(n, m, edge_arr, map_arr)
    truth_perms = tuple(Permutation(t) for t in truth) if truth is not None else None
    bad = None
    if have_flags:
        flag_arr = np.array(flags, dtype=np.int64)[order]
        bad = frozenset(map(tuple, edge_arr[flag_arr == 1]))
    try:
        return ProblemInstance(graph, meas, truth_perms, bad)
    except (ValueError, PermSyncError) as exc:
        raise FileFormatError(f"inconsistent problem file: {exc}") from exc


def write_solution(path: str | os.PathLike, estimate: tuple[Permutation, ...] | list[Permutation]) -> None:
    """Serialise estimated absolute permutations, one map line per node."""
    if not estimate:
        raise ValueError("empty solution")
    m = estimate[0].size
    lines = [f"{_MAGIC} {_VERSION}", f"{len(estimate)} {m}", "SOLUTION"]
    lines.extend(_render_map(p.map) for p in estimate)
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_solution(path: str | os.PathLike) -> tuple[Permutation, ...]:
    with open(path, "r", encoding="ascii", newline="") as fh:
        lines = fh.read().splitlines()
    if len(lines) < 3 or lines[0] != f"{_MAGIC} {_VERSION}":
        raise FileFormatError("malformed solution header")
    try:
        n, m = (int(tok) for tok in lines[1].split())
    except ValueError as exc:
        raise FileFormatError("malformed size line") from exc
    if lines[2] != "SOLUTION" or len(lines) != 3 + n:
        raise FileFormatError("malformed SOLUTION section")
    perms = []
    for k in range(n):
        row = np.array([int(tok) for tok in lines[3 + k].split()], dtype=np.int64)
        if row.size != m:
            raise FileFormatError(f"solution line {k} has wrong length")
        try:
            perms.append(Permutation(row))
        except ValueError as exc:
            raise FileFormatError(f"solution line {k} is not a bijection") from exc
    return tuple(perms)

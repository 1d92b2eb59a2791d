"""Grid instance generator, validation and the JSON instance format.

File layout::

    {"node_count": 6, "arcs": [[tail, head, c, d], ...],
     "source": 0, "sink": 5, "budget": 1}

Arc order in the file is arc id order.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import InputError, ParseError
from .graph import Network, ProblemInstance

FIELDS = ("node_count", "arcs", "source", "sink", "budget")


def generate_grid(rows: int, cols: int, seed: int) -> ProblemInstance:
    """Random ``rows x cols`` grid with a super source and super sink.

    Node 0 is ``s``, grid cell ``(r, q)`` is node ``1 + r*cols + q`` and the
    last node is ``t``. Arcs are emitted as: ``s`` to each first-column cell
    (top to bottom), then for every cell in row-major order its rightward
    arc followed by its downward arc, then each last-column cell to ``t``.
    Terminal arcs have ``c = d = 0``; interior arcs draw ``c`` then ``d``
    uniformly from 1..10 with ``numpy.random.default_rng(seed)`` (PCG64).
    The budget is 0; set it with :meth:`ProblemInstance.with_budget`.
    """
    if rows < 2 or cols < 2:
        raise InputError(f"grid needs rows, cols >= 2, got {rows}x{cols}")
    cell = lambda r, q: 1 + r * cols + q  # noqa: E731
    s, t = 0, rows * cols + 1
    arcs = [(s, cell(r, 0), 0, 0) for r in range(rows)]
    interior = []
    for r in range(rows):
        for q in range(cols):
            if q + 1 < cols:
                interior.append((cell(r, q), cell(r, q + 1)))
            if r + 1 < rows:
                interior.append((cell(r, q), cell(r + 1, q)))
    draws = np.random.default_rng(seed).integers(1, 11, size=(len(interior), 2))
    arcs += [(u, v, int(cd[0]), int(cd[1])) for (u, v), cd in zip(interior, draws)]
    arcs += [(cell(r, cols - 1), t, 0, 0) for r in range(rows)]
    return ProblemInstance(Network(t + 1, arcs), s, t, 0)


def budget_from_fraction(arc_count: int, fraction: float) -> int:
    """``round(fraction * |A|)`` (half up), floored at 1 and capped at |A|."""
    return min(arc_count, max(1, math.floor(fraction * arc_count + 0.5)))


def validate(inst: ProblemInstance) -> list[str]:
    """Every invariant violation of ``inst``; an empty list means valid."""
    net = inst.network
    problems = []
    n = net.node_count
    if n < 2:
        problems.append(f"node_count must be >= 2, got {n}")
    for k, (u, v, c, d) in enumerate(net.arcs()):
        if not (0 <= u < n and 0 <= v < n):
            problems.append(f"arc {k}: node id out of range ({u}, {v})")
        if c < 0:
            problems.append(f"arc {k}: negative length c={c}")
        if d < 0:
            problems.append(f"arc {k}: negative interdiction increment d={d}")
    for name, v in (("source", inst.source), ("sink", inst.sink)):
        if not 0 <= v < n:
            problems.append(f"{name}: node id out of range ({v})")
    if inst.source == inst.sink:
        problems.append("source equals sink")
    if inst.budget < 0:
        problems.append(f"budget must be >= 0, got {inst.budget}")
    if inst.budget > net.arc_count:
        problems.append(f"budget exceeds arc count ({inst.budget} > {net.arc_count})")
    return problems


def check(inst: ProblemInstance) -> ProblemInstance:
    problems = validate(inst)
    if problems:
        raise InputError("invalid instance: " + "; ".join(problems))
    return inst


def to_dict(inst: ProblemInstance) -> dict:
    return {
        "node_count": inst.network.node_count,
        "arcs": [list(a) for a in inst.network.arcs()],
        "source": inst.source,
        "sink": inst.sink,
        "budget": inst.budget,
    }


def dumps(inst: ProblemInstance) -> str:
    head = {k: v for k, v in to_dict(inst).items() if k != "arcs"}
    arcs = ",\n    ".join(json.dumps(a) for a in inst.network.arcs())
    # one arc per line keeps files diffable
    return (
        "{\n"
        f'  "node_count": {head["node_count"]},\n'
        f'  "source": {head["source"]},\n'
        f'  "sink": {head["sink"]},\n'
        f'  "budget": {head["budget"]},\n'
        f'  "arcs": [\n    {arcs}\n  ]\n'
        "}\n"
    )


def from_dict(doc, where: str = "<instance>") -> ProblemInstance:
    if not isinstance(doc, dict):
        raise ParseError(f"{where}: top level must be an object")
    for field in FIELDS:
        if field not in doc:
            raise ParseError(f"{where}: missing field {field!r}")
    for field in ("node_count", "source", "sink", "budget"):
        if not isinstance(doc[field], int) or isinstance(doc[field], bool):
            raise ParseError(f"{where}: field {field!r} must be an integer")
    arcs = doc["arcs"]
    if not isinstance(arcs, list):
        raise ParseError(f"{where}: field 'arcs' must be a list")
    for k, a in enumerate(arcs):
        if (
            not isinstance(a, list)
            or len(a) != 4
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in a)
        ):
            raise ParseError(f"{where}: arcs[{k}] must be [tail, head, c, d] integers, got {a!r}")
    inst = ProblemInstance(Network(doc["node_count"], arcs), doc["source"], doc["sink"], doc["budget"])
    problems = validate(inst)
    if problems:
        raise InputError(f"{where}: invalid instance: " + "; ".join(problems))
    return inst


def write_instance(inst: ProblemInstance, path) -> None:
    check(inst)
    Path(path).write_text(dumps(inst))


def read_instance(path) -> ProblemInstance:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None
    return from_dict(doc, str(path))

"""QUBO formulations of the interdiction problem and its block subproblems.

Every bounded integer (node label ``pi``, arc slack ``m``, budget slack
``n``) is expanded into binary variables with :func:`encode_bounded`; each
constraint becomes a squared penalty ``-P * residual**2``. The objective is
maximized. Penalty residuals are kept as linear forms on the :class:`Qubo`
so decoded assignments can be checked for feasibility exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InputError, ParseError
from .graph import ProblemInstance, pi_upper_bound


@dataclass(frozen=True)
class IntegerEncoding:
    upper_bound: int
    coefficients: tuple[int, ...]

    def decode(self, bits: Sequence[int]) -> int:
        return sum(c * int(b) for c, b in zip(self.coefficients, bits))


def encode_bounded(ub: int) -> IntegerEncoding:
    """Binary expansion 1, 2, ..., 2**(rho-1), mu covering exactly [0, ub]."""
    if ub < 0:
        raise InputError(f"upper bound must be >= 0, got {ub}")
    rho = (ub + 1).bit_length() - 1
    coeffs = [1 << i for i in range(rho)]
    mu = ub - ((1 << rho) - 1)
    if mu > 0:
        coeffs.append(mu)
    return IntegerEncoding(ub, tuple(coeffs))


def default_penalty(inst: ProblemInstance) -> int:
    """Smallest integer penalty that beats the largest possible objective."""
    return pi_upper_bound(inst) + 1


class VarRole(NamedTuple):
    kind: str  # "x", "pi", "m" or "n"
    index: int  # arc id for x/m, node id for pi, -1 for n
    bit: int
    weight: int


class LinearForm(NamedTuple):
    constant: int
    terms: dict  # var -> coefficient

    def evaluate(self, bits) -> int:
        return self.constant + sum(c * int(bits[v]) for v, c in self.terms.items())


@dataclass(frozen=True)
class Qubo:
    var_count: int
    linear: dict
    quadratic: dict
    constant: int
    registry: tuple[VarRole, ...]
    objective: LinearForm
    penalties: tuple[LinearForm, ...]
    penalty_labels: tuple[str, ...]
    pi_nodes: tuple[int, ...] = ()
    source: int = -1  # pinned to label 0 when in scope, else -1
    penalty_weight: int = 0
    sense: str = "max"

    def evaluate(self, bits) -> int:
        v = self.constant
        for i, c in self.linear.items():
            if bits[i]:
                v += c
        for (i, j), c in self.quadratic.items():
            if bits[i] and bits[j]:
                v += c
        return v

    def residuals(self, bits) -> list[int]:
        return [p.evaluate(bits) for p in self.penalties]

    def to_dense(self):
        """``(lin, qsym, const, resid_mat, resid_const)`` int64 arrays for the kernels."""
        nv = self.var_count
        lin = np.zeros(nv, dtype=np.int64)
        for i, c in self.linear.items():
            lin[i] = c
        qsym = np.zeros((nv, nv), dtype=np.int64)
        for (i, j), c in self.quadratic.items():
            qsym[i, j] = qsym[j, i] = c
        resid_mat = np.zeros((len(self.penalties), nv), dtype=np.int64)
        resid_const = np.zeros(len(self.penalties), dtype=np.int64)
        for t, p in enumerate(self.penalties):
            resid_const[t] = p.constant
            for v, c in p.terms.items():
                resid_mat[t, v] = c
        return lin, qsym, int(self.constant), resid_mat, resid_const

    def negated(self) -> "Qubo":
        return Qubo(
            self.var_count,
            {k: -v for k, v in self.linear.items()},
            {k: -v for k, v in self.quadratic.items()},
            -self.constant,
            self.registry,
            self.objective,
            self.penalties,
            self.penalty_labels,
            self.pi_nodes,
            self.source,
            self.penalty_weight,
            "min" if self.sense == "max" else "max",
        )


class Decoded(NamedTuple):
    x: frozenset
    pi: dict
    residuals: list


def _add(d: dict, key, value):
    v = d.get(key, 0) + value
    if v:
        d[key] = v
    else:
        d.pop(key, None)


class _Builder:
    def __init__(self):
        self.registry: list[VarRole] = []

    def integer(self, kind, index, ub) -> dict:
        terms = {}
        for b, w in enumerate(encode_bounded(ub).coefficients):
            terms[len(self.registry)] = w
            self.registry.append(VarRole(kind, index, b, w))
        return terms


def _combine(*parts) -> LinearForm:
    """Sum of ``(scale, constant, terms)`` triples as one linear form."""
    const, terms = 0, {}
    for scale, c, t in parts:
        const += scale * c
        for v, a in t.items():
            _add(terms, v, scale * a)
    return LinearForm(const, terms)


def _assemble(inst, scope, sink, arcs, fixed_labels, budget, penalty) -> Qubo:
    """Shared construction for full and block QUBOs.

    ``scope`` holds the nodes with free labels, ``arcs`` the in-scope arc ids
    (head in scope); tails outside scope use ``fixed_labels``.
    """
    if penalty < 1:
        raise InputError(f"penalty must be >= 1, got {penalty}")
    net = inst.network
    ub = pi_upper_bound(inst)
    scope = sorted(scope)
    in_scope = set(scope)
    s = inst.source
    bld = _Builder()

    x = {k: bld.integer("x", k, 1) for k in arcs}
    pi = {}
    for i in scope:
        pi[i] = (0, {}) if i == s else (0, bld.integer("pi", i, ub))
    m = {k: bld.integer("m", k, ub + int(net.lengths[k] + net.increments[k])) for k in arcs}
    slack = bld.integer("n", -1, budget)

    def label(i):
        return pi[i] if i in in_scope else (int(fixed_labels[i]), {})

    penalties, labels = [], []
    for k in arcs:
        i, j = int(net.tails[k]), int(net.heads[k])
        c, d = int(net.lengths[k]), int(net.increments[k])
        # c - (m + pi_j - pi_i - d x)
        penalties.append(
            _combine(
                (1, c, {}),
                (-1, 0, m[k]),
                (-1, *label(j)),
                (1, *label(i)),
                (d, 0, x[k]),
            )
        )
        labels.append(f"arc:{k}")
    penalties.append(_combine((1, budget, {}), (-1, 0, slack), *((-1, 0, x[k]) for k in arcs)))
    labels.append("budget")

    objective = _combine((1, *pi[sink]))
    linear = dict(objective.terms)
    quadratic: dict = {}
    constant = objective.constant
    for form in penalties:
        a0, items = form.constant, sorted(form.terms.items())
        constant -= penalty * a0 * a0
        for idx, (u, au) in enumerate(items):
            _add(linear, u, -penalty * (2 * a0 * au + au * au))
            for v, av in items[idx + 1 :]:
                _add(quadratic, (u, v), -penalty * 2 * au * av)

    return Qubo(
        var_count=len(bld.registry),
        linear=linear,
        quadratic=quadratic,
        constant=constant,
        registry=tuple(bld.registry),
        objective=objective,
        penalties=tuple(penalties),
        penalty_labels=tuple(labels),
        pi_nodes=tuple(scope),
        source=s if s in in_scope else -1,
        penalty_weight=penalty,
    )


def build_full_qubo(inst: ProblemInstance, penalty: int | None = None) -> Qubo:
    """Whole-network QUBO maximizing the sink label; ``pi_s`` is folded to 0."""
    if penalty is None:
        penalty = default_penalty(inst)
    net = inst.network
    return _assemble(
        inst,
        range(net.node_count),
        inst.sink,
        list(range(net.arc_count)),
        None,
        inst.budget,
        penalty,
    )


def build_sub_qubo(spec, penalty: int | None = None) -> Qubo:
    """Block QUBO for a :class:`~spni.subsolve.SubproblemSpec`.

    Labels outside the block are the fixed ``spec.gamma`` values and the
    budget is ``spec.local_budget``.
    """
    if spec.sink not in spec.block:
        raise InputError(f"sink {spec.sink} not in block")
    if penalty is None:
        penalty = default_penalty(spec.inst)
    return _assemble(
        spec.inst,
        spec.block,
        spec.sink,
        list(spec.arcs),
        spec.gamma,
        spec.local_budget,
        penalty,
    )


def decode(q: Qubo, bits) -> Decoded:
    """Interdicted arcs, node labels and penalty residuals of an assignment."""
    if len(bits) != q.var_count:
        raise InputError(f"expected {q.var_count} bits, got {len(bits)}")
    x = set()
    pi = {i: 0 for i in q.pi_nodes}
    for v, role in enumerate(q.registry):
        if not bits[v]:
            continue
        if role.kind == "x":
            x.add(role.index)
        elif role.kind == "pi":
            pi[role.index] += role.weight
    return Decoded(frozenset(x), pi, q.residuals(bits))


def code_to_bits(code: int, nv: int) -> np.ndarray:
    return np.array([(code >> v) & 1 for v in range(nv)], dtype=np.uint8)


# --- text export --------------------------------------------------------------

MAGIC = "# spni-qubo 1"


def _form_text(form: LinearForm) -> str:
    return " ".join([str(form.constant)] + [f"{v}:{c}" for v, c in sorted(form.terms.items())])


def _parse_form(tokens, where) -> LinearForm:
    try:
        const = int(tokens[0])
        terms = {}
        for tok in tokens[1:]:
            v, c = tok.split(":")
            terms[int(v)] = int(c)
    except (IndexError, ValueError):
        raise ParseError(f"{where}: bad linear form {' '.join(tokens)!r}") from None
    return LinearForm(const, terms)


def dumps_qubo(q: Qubo, sense: str = "max") -> str:
    if sense not in ("max", "min"):
        raise InputError(f"sense must be max or min, got {sense!r}")
    out = q if sense == q.sense else q.negated()
    lines = [
        MAGIC,
        f"# sense {out.sense}",
        f"# var_count {out.var_count}",
        f"# constant {out.constant}",
        f"# penalty_weight {out.penalty_weight}",
        f"# source {out.source}",
        "# pi_nodes " + " ".join(map(str, out.pi_nodes)),
    ]
    lines += [f"# var {v} {r.kind} {r.index} {r.bit} {r.weight}" for v, r in enumerate(out.registry)]
    lines.append("# objective " + _form_text(out.objective))
    lines += [f"# penalty {lab} {_form_text(p)}" for lab, p in zip(out.penalty_labels, out.penalties)]
    lines += [f"{i} {i} {c}" for i, c in sorted(out.linear.items())]
    lines += [f"{i} {j} {c}" for (i, j), c in sorted(out.quadratic.items())]
    return "\n".join(lines) + "\n"


def export_qubo(q: Qubo, path, sense: str = "max") -> None:
    """Write ``q`` as ``i j coeff`` lines; ``sense="min"`` negates all values."""
    Path(path).write_text(dumps_qubo(q, sense))


def loads_qubo(text: str, where: str = "<qubo>") -> Qubo:
    header: dict = {}
    registry, penalties, labels = [], [], []
    objective = LinearForm(0, {})
    linear, quadratic = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        at = f"{where}:{lineno}"
        if line.startswith("#"):
            tok = line[1:].split()
            if not tok:
                continue
            key, rest = tok[0], tok[1:]
            try:
                if key == "var":
                    v, kind, idx, bit, w = rest
                    if int(v) != len(registry):
                        raise ParseError(f"{at}: registry out of order")
                    registry.append(VarRole(kind, int(idx), int(bit), int(w)))
                elif key == "objective":
                    objective = _parse_form(rest, at)
                elif key == "penalty":
                    labels.append(rest[0])
                    penalties.append(_parse_form(rest[1:], at))
                elif key == "pi_nodes":
                    header[key] = tuple(int(t) for t in rest)
                elif key == "sense":
                    header[key] = rest[0]
                elif key in ("var_count", "constant", "penalty_weight", "source"):
                    header[key] = int(rest[0])
            except (ValueError, IndexError):
                raise ParseError(f"{at}: malformed header line {line!r}") from None
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"{at}: expected 'i j coeff', got {line!r}")
        try:
            i, j, c = (int(p) for p in parts)
        except ValueError:
            raise ParseError(f"{at}: non-integer term {line!r}") from None
        if i > j:
            raise ParseError(f"{at}: term indices must satisfy i <= j")
        target, key = (linear, i) if i == j else (quadratic, (i, j))
        _add(target, key, c)
    if "var_count" not in header:
        raise ParseError(f"{where}: missing var_count header")
    nv = header["var_count"]
    if registry and len(registry) != nv:
        raise ParseError(f"{where}: registry has {len(registry)} entries, var_count is {nv}")
    for key in list(linear) + [v for pair in quadratic for v in pair]:
        if not 0 <= key < nv:
            raise ParseError(f"{where}: variable {key} out of range")
    return Qubo(
        var_count=nv,
        linear=linear,
        quadratic=quadratic,
        constant=header.get("constant", 0),
        registry=tuple(registry),
        objective=objective,
        penalties=tuple(penalties),
        penalty_labels=tuple(labels),
        pi_nodes=header.get("pi_nodes", ()),
        source=header.get("source", -1),
        penalty_weight=header.get("penalty_weight", 0),
        sense=header.get("sense", "max"),
    )


def read_qubo(path) -> Qubo:
    return loads_qubo(Path(path).read_text(), str(path))

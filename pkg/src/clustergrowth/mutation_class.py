"""Mutation classes of diagrams and the mutation-finiteness test."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .diagram import (
    Diagram,
    _mutate_w,
    canonical_form,
    canonical_perm,
    diagram_of_matrix,
    is_realizable,
    labeled_key,
    RealizabilityError,
)
from .exchange_core import ExchangeMatrix, MutationWord

DEFAULT_MAX_NODES = 10**6


class Status(str, Enum):
    FINITE = "Finite"
    INFINITE = "InfiniteDetected"
    LIMIT = "LimitExceeded"


@dataclass
class ClassResult:
    status: Status
    keys: set = field(default_factory=set)
    representatives: list = field(default_factory=list)
    witness: MutationWord | None = None
    offending_weight: int | None = None
    visited: int = 0

    @property
    def size(self) -> int:
        return len(self.keys)

    def exit_code(self) -> int:
        return {Status.FINITE: 0, Status.INFINITE: 1, Status.LIMIT: 2}[self.status]

    def to_dict(self) -> dict:
        out = {"status": self.status.value, "visited": self.visited}
        if self.status is Status.FINITE:
            out["class_size"] = self.size
        if self.witness is not None:
            out["witness"] = str(self.witness)
            out["offending_weight"] = self.offending_weight
        return out


def _as_diagram(d) -> Diagram:
    if isinstance(d, Diagram):
        return d
    return diagram_of_matrix(d)


def _too_heavy(w) -> int:
    return max((abs(x) for r in w for x in r), default=0)


def enumerate_class(d, max_nodes: int = DEFAULT_MAX_NODES,
                    labeled: bool = False) -> ClassResult:
    """Breadth-first search over the mutation class of ``d``.

    Diagrams are identified up to isomorphism (or exactly, with
    ``labeled=True``).  For order >= 3 a weight above 4 proves the class is
    infinite; the word reaching it is returned as the witness.  The word
    refers to the labelling of ``d`` itself, so it can be replayed.
    """
    d = _as_diagram(d)
    keyfn = labeled_key if labeled else canonical_form
    check_weight = d.n >= 3

    # the weight bound is decided before realizability: a heavy edge already
    # settles the question, whatever the rest of the diagram looks like
    if check_weight and _too_heavy(d.w) > 4:
        return ClassResult(Status.INFINITE, witness=MutationWord(),
                           offending_weight=_too_heavy(d.w), visited=1)
    if not is_realizable(d):
        raise RealizabilityError("diagram is not realizable")

    start = keyfn(d)
    keys = {start}
    reps = [d]
    # frontier items: (labelled weight matrix, word that reaches it from d)
    frontier = [(d.w, ())]
    visited = 1
    while frontier:
        nxt = []
        for w, word in frontier:
            for k in range(d.n):
                if word and word[-1] == k + 1:
                    continue
                w2 = _mutate_w(w, k)
                visited += 1
                if check_weight:
                    heavy = _too_heavy(w2)
                    if heavy > 4:
                        return ClassResult(
                            Status.INFINITE, keys, reps,
                            MutationWord(word + (k + 1,)), heavy, visited)
                dd = Diagram(d.n, w2)
                key = keyfn(dd)
                if key in keys:
                    continue
                keys.add(key)
                reps.append(dd)
                nxt.append((w2, word + (k + 1,)))
                if len(keys) > max_nodes:
                    return ClassResult(Status.LIMIT, keys, reps, visited=visited)
        frontier = nxt
    return ClassResult(Status.FINITE, keys, reps, visited=visited)


class Finiteness(str, Enum):
    FINITE = "finite"
    INFINITE = "infinite"
    UNKNOWN = "unknown"


def is_mutation_finite(d, max_nodes: int = DEFAULT_MAX_NODES) -> Finiteness:
    d = _as_diagram(d)
    if d.n <= 2:
        return Finiteness.FINITE
    res = enumerate_class(d, max_nodes=max_nodes)
    return {
        Status.FINITE: Finiteness.FINITE,
        Status.INFINITE: Finiteness.INFINITE,
        Status.LIMIT: Finiteness.UNKNOWN,
    }[res.status]


def replay_witness(d, word: MutationWord) -> Diagram:
    d = _as_diagram(d)
    w = d.w
    for k in word:
        w = _mutate_w(w, k - 1)
    return Diagram(d.n, w)


def class_contains(result: ClassResult, d) -> bool:
    return canonical_form(_as_diagram(d)) in result.keys


__all__ = [
    "ClassResult", "Status", "Finiteness", "enumerate_class",
    "is_mutation_finite", "replay_witness", "class_contains",
    "canonical_perm", "ExchangeMatrix",
]

"""Tight paths, tight cycles, cycle factors, and the k-set type classification.

A tight path visits distinct vertices so that every k consecutive ones form an
edge of the host; a tight cycle closes the sequence cyclically and needs at
least k+1 vertices. Path collections index their end-sets (prefix sets plus
the suffix k-set) so k-sets can be classified as j-end / lo / j-con relative
to the collection.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Optional, Sequence

from .hypergraph import Hypergraph, HypergraphError


class TightnessError(ValueError):
    """Raised when a sequence fails the tight-window or disjointness checks."""


def _windows(seq, k):
    return [tuple(seq[i : i + k]) for i in range(len(seq) - k + 1)]


def is_tight_walk(H: Hypergraph, seq: Sequence[int]) -> bool:
    """Every k consecutive entries form an edge; repeats outside windows allowed."""
    if not seq:
        return False
    for v in seq:
        if not (0 <= v < H.n):
            raise HypergraphError(f"invalid vertex id {v!r} (n={H.n})")
    for w in _windows(seq, H.k):
        if len(set(w)) != H.k or not H.has_edge(w):
            return False
    return True


def is_tight_path(H: Hypergraph, seq: Sequence[int]) -> bool:
    if not seq:
        return False
    if len(set(seq)) != len(seq):
        return False
    return is_tight_walk(H, seq)


def is_tight_cycle(H: Hypergraph, seq: Sequence[int]) -> bool:
    if len(seq) < H.k + 1:
        return False
    if len(set(seq)) != len(seq):
        return False
    closed = tuple(seq) + tuple(seq[: H.k - 1])
    return all(H.has_edge(w) for w in _windows(closed, H.k))


class TightPath:
    """Ordered vertex sequence whose k-windows are all edges of the host.

    Sequences shorter than k are allowed (zero edges); they still carry
    prefix end-sets. Equality is up to reversal.
    """

    __slots__ = ("seq", "host", "_edges")

    def __init__(self, host: Hypergraph, seq: Sequence[int]):
        seq = tuple(seq)
        if not is_tight_path(host, seq):
            raise TightnessError(f"{seq!r} is not a tight path in the host")
        object.__setattr__(self, "seq", seq)
        object.__setattr__(self, "host", host)
        object.__setattr__(self, "_edges", None)

    def __setattr__(self, name, value):
        raise AttributeError("TightPath is immutable")

    def __len__(self):
        return len(self.seq)

    @property
    def num_vertices(self) -> int:
        return len(self.seq)

    @property
    def length(self) -> int:
        """Edge count: max(0, l - k + 1)."""
        return max(0, len(self.seq) - self.host.k + 1)

    @property
    def vertex_set(self) -> frozenset:
        return frozenset(self.seq)

    def edges(self):
        if self._edges is None:
            out = tuple(tuple(sorted(w)) for w in _windows(self.seq, self.host.k))
            object.__setattr__(self, "_edges", out)
        return list(self._edges)

    def reverse(self) -> "TightPath":
        return TightPath(self.host, self.seq[::-1])

    # -- ends --------------------------------------------------------------

    def end_tuples(self):
        """Prefix tuples (v_1..v_i) for each i, plus the suffix k-tuple."""
        out = [self.seq[:i] for i in range(1, len(self.seq) + 1)]
        k = self.host.k
        if len(self.seq) >= k:
            suffix = self.seq[-k:]
            if suffix not in out:
                out.append(suffix)
        return out

    def end_sets(self):
        return {frozenset(t) for t in self.end_tuples()}

    def ordered_end_edges(self):
        """(s, t): the first-k and last-k vertex tuples, in path order."""
        k = self.host.k
        if len(self.seq) < k:
            raise TightnessError("path shorter than k has no ordered end-edges")
        return self.seq[:k], self.seq[-k:]

    def boundary(self) -> tuple:
        """First-k and last-k sub-paths when l >= 2k+1, else the path itself."""
        k = self.host.k
        if len(self.seq) >= 2 * k + 1:
            return (
                TightPath(self.host, self.seq[:k]),
                TightPath(self.host, self.seq[-k:]),
            )
        return (self,)

    def interior(self) -> Optional["TightPath"]:
        """The sub-path v_{k+1}..v_{l-k} when l >= 2k+1, else None."""
        k = self.host.k
        if len(self.seq) >= 2 * k + 1:
            return TightPath(self.host, self.seq[k : len(self.seq) - k])
        return None

    def __eq__(self, other):
        if not isinstance(other, TightPath):
            return NotImplemented
        return self.host == other.host and (
            self.seq == other.seq or self.seq == other.seq[::-1]
        )

    def __hash__(self):
        return hash((min(self.seq, self.seq[::-1]), self.host.k, self.host.n))

    def __repr__(self):
        return f"TightPath({list(self.seq)})"


class TightCycle:
    """Cyclic vertex sequence (>= k+1 distinct vertices), all cyclic k-windows edges."""

    __slots__ = ("seq", "host", "_edges")

    def __init__(self, host: Hypergraph, seq: Sequence[int]):
        seq = tuple(seq)
        if not is_tight_cycle(host, seq):
            raise TightnessError(f"{seq!r} is not a tight cycle in the host")
        object.__setattr__(self, "seq", seq)
        object.__setattr__(self, "host", host)
        object.__setattr__(self, "_edges", None)

    def __setattr__(self, name, value):
        raise AttributeError("TightCycle is immutable")

    def __len__(self):
        return len(self.seq)

    @property
    def vertex_set(self) -> frozenset:
        return frozenset(self.seq)

    def edges(self):
        if self._edges is None:
            closed = self.seq + self.seq[: self.host.k - 1]
            out = tuple(tuple(sorted(w)) for w in _windows(closed, self.host.k))
            object.__setattr__(self, "_edges", out)
        return list(self._edges)

    def canonical(self) -> tuple:
        """Rotation starting at the minimum vertex, lex-smaller direction."""
        return canonical_cycle(self.seq)

    def rotations(self):
        n = len(self.seq)
        doubled = self.seq + self.seq
        return [doubled[i : i + n] for i in range(n)]

    def __eq__(self, other):
        if not isinstance(other, TightCycle):
            return NotImplemented
        return self.host == other.host and self.canonical() == other.canonical()

    def __hash__(self):
        return hash((self.canonical(), self.host.k, self.host.n))

    def __repr__(self):
        return f"TightCycle({list(self.seq)})"


def canonical_cycle(seq: Sequence[int]) -> tuple:
    seq = tuple(seq)
    i = seq.index(min(seq))
    fwd = seq[i:] + seq[:i]
    rev = seq[i::-1] + seq[:i:-1]
    return min(fwd, rev)


class CycleFactor:
    """Vertex-disjoint tight cycles covering exactly target_n vertices."""

    __slots__ = ("cycles", "target_n")

    def __init__(self, cycles: Iterable[TightCycle], target_n: int):
        cycles = tuple(cycles)
        seen = set()
        for C in cycles:
            if seen & C.vertex_set:
                raise TightnessError("cycles in a factor must be vertex-disjoint")
            seen |= C.vertex_set
        if len(seen) != target_n:
            raise TightnessError(
                f"factor covers {len(seen)} vertices, target is {target_n}"
            )
        object.__setattr__(self, "cycles", cycles)
        object.__setattr__(self, "target_n", target_n)

    def __setattr__(self, name, value):
        raise AttributeError("CycleFactor is immutable")

    @property
    def girth(self) -> int:
        return min(len(C) for C in self.cycles)

    def lengths(self):
        return sorted(len(C) for C in self.cycles)

    def edges(self):
        out = []
        for C in self.cycles:
            out.extend(C.edges())
        return out

    def as_dict(self) -> dict:
        return {"cycles": [list(C.canonical()) for C in self.cycles]}

    def __repr__(self):
        return f"CycleFactor(lengths={self.lengths()})"


def factors_document(factors: Iterable[CycleFactor]) -> dict:
    """Canonical JSON-ready form: each cycle from its min vertex, smaller direction."""
    return {"factors": [F.as_dict() for F in factors]}


def factors_from_document(doc: dict, host: Hypergraph):
    out = []
    for item in doc["factors"]:
        cycles = [TightCycle(host, seq) for seq in item["cycles"]]
        out.append(CycleFactor(cycles, sum(len(c) for c in cycles)))
    return out


class PathCollection:
    """Vertex-disjoint tight paths with an end-set index for classification.

    end_set_index maps each end-set (frozenset) to the index of an owning
    path; when two paths share an end-set the lower index wins (the type
    classification below needs only membership).
    """

    __slots__ = ("paths", "host", "end_set_index", "_vset")

    def __init__(self, host: Hypergraph, paths: Iterable[TightPath]):
        paths = tuple(paths)
        seen = set()
        for P in paths:
            if P.host != host:
                raise TightnessError("all paths must live in the same host")
            if seen & P.vertex_set:
                raise TightnessError("paths in a collection must be vertex-disjoint")
            seen |= P.vertex_set
        index = {}
        for i, P in enumerate(paths):
            for s in P.end_sets():
                index.setdefault(s, i)
        object.__setattr__(self, "paths", paths)
        object.__setattr__(self, "host", host)
        object.__setattr__(self, "end_set_index", index)
        object.__setattr__(self, "_vset", frozenset(seen))

    def __setattr__(self, name, value):
        raise AttributeError("PathCollection is immutable")

    @property
    def vertex_set(self) -> frozenset:
        return self._vset

    @property
    def coverage(self) -> int:
        return len(self._vset)

    def __len__(self):
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)


def classify(e: Iterable[int], P: PathCollection) -> str:
    """Type of the k-set e relative to the collection: 'j-end', 'lo', or 'j-con'.

    Priority: ending first (j = max subset size that is an end-set of some
    path), then leftover (a vertex outside V(P)), then j-concentrated
    (j = largest subset inside a single path's vertex set; >= 1 since every
    vertex of e lies on some path at this point).
    """
    es = frozenset(e)
    if not es:
        raise TightnessError("cannot classify the empty set")
    best_end = 0
    for j in range(len(es), 0, -1):
        for sub in itertools.combinations(sorted(es), j):
            if frozenset(sub) in P.end_set_index:
                best_end = j
                break
        if best_end:
            break
    if best_end:
        return f"{best_end}-end"
    if not es <= P.vertex_set:
        return "lo"
    best_con = 0
    for path in P.paths:
        best_con = max(best_con, len(es & path.vertex_set))
    return f"{best_con}-con"


class FactorCheck:
    """Truthy verification result with human-readable failure reasons."""

    __slots__ = ("ok", "reasons")

    def __init__(self, reasons):
        self.reasons = tuple(reasons)
        self.ok = not self.reasons

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return "FactorCheck(ok)" if self.ok else f"FactorCheck({list(self.reasons)})"


def verify_factor_copy(H: Hypergraph, F: CycleFactor, target) -> FactorCheck:
    """Check that F is a valid spanning cycle factor of H matching target's shape.

    target is a CycleFactor or an iterable of cycle lengths; shapes compare
    as multisets.
    """
    reasons = []
    covered = set()
    for i, C in enumerate(F.cycles):
        if not is_tight_cycle(H, C.seq):
            reasons.append(f"cycle {i} is not a tight cycle of the host")
        overlap = covered & C.vertex_set
        if overlap:
            reasons.append(f"cycle {i} reuses vertices {sorted(overlap)}")
        covered |= C.vertex_set
    if covered != set(range(H.n)):
        missing = sorted(set(range(H.n)) - covered)
        if missing:
            reasons.append(f"not spanning: vertices {missing} uncovered")
        extra = sorted(covered - set(range(H.n)))
        if extra:
            reasons.append(f"vertices {extra} outside the host")
    want = sorted(target.lengths() if isinstance(target, CycleFactor) else target)
    got = F.lengths()
    if got != want:
        reasons.append(f"cycle lengths {got} != target {want}")
    return FactorCheck(reasons)

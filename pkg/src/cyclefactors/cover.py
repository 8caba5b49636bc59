"""Fractional cycle decompositions and edge-disjoint near-spanning path covers.

The pipeline has three steps.  First, ``fractional_cycle_decomposition``
assigns a positive weight to a family of tight cycles on L vertices so that
the weights of the cycles through each edge sum to exactly 1 (a linear
program over an enumerated or sampled cycle family).  Second,
``extract_cycle_collections`` rounds the fractional solution into r
edge-disjoint collections of vertex-disjoint L-cycles by a weight-driven
randomized greedy, with coverage gates checked per collection.  Third,
``cycles_to_paths`` opens every cycle into a tight path on the same vertex
set by deleting k-1 consecutive edges at a uniformly random rotation, and
wraps the result in a ``CoverBundle`` alongside a per-k-set type index.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .hypergraph import Hypergraph
from .tightpaths import PathCollection, TightCycle, TightPath, classify

__all__ = [
    "CoverError",
    "DecompositionError",
    "ExtractionResult",
    "FractionalCycleDecomposition",
    "CoverBundle",
    "enumerate_tight_cycles",
    "cycles_through_edge",
    "fractional_cycle_decomposition",
    "extract_cycle_collections",
    "validate_collections",
    "cycles_to_paths",
]


class CoverError(ValueError):
    """Raised for invalid cover-stage inputs or violated invariants."""


class DecompositionError(CoverError):
    """Raised when no fractional cycle decomposition exists over the family."""


# ---------------------------------------------------------------------------
# cycle enumeration


def _close_ok(H: Hypergraph, seq: Sequence[int]) -> bool:
    """Check the k-1 wrap-around windows that close seq into a cycle."""
    k = H.k
    closed = tuple(seq) + tuple(seq[: k - 1])
    return all(H.has_edge(closed[i : i + k]) for i in range(len(seq) - k + 1, len(seq)))


def _enumerate_all(H: Hypergraph, L: int, cap: Optional[int]):
    """All tight cycles on exactly L vertices, or None when cap is exceeded.

    Anchored DFS: the first vertex of the sequence is the cycle's minimum
    and the reflection duplicate is skipped by requiring the second vertex
    to be smaller than the last.
    """
    k = H.k
    out = []

    def rec(seq, used):
        if len(seq) == L:
            if seq[1] < seq[-1] and _close_ok(H, seq):
                out.append(TightCycle(H, seq))
                if cap is not None and len(out) > cap:
                    raise _CapHit
            return
        for v in range(seq[0] + 1, H.n):
            if v in used:
                continue
            seq.append(v)
            if len(seq) < k or H.has_edge(seq[-k:]):
                used.add(v)
                rec(seq, used)
                used.discard(v)
            seq.pop()

    try:
        for v0 in range(H.n):
            rec([v0], {v0})
    except _CapHit:
        return None
    return out


class _CapHit(Exception):
    pass


def enumerate_tight_cycles(H: Hypergraph, L: int, cap: int = 200000):
    """Enumerate every tight cycle on exactly L vertices of H.

    Raises CoverError when more than ``cap`` cycles exist.
    """
    _check_cycle_length(H, L)
    out = _enumerate_all(H, L, cap)
    if out is None:
        raise CoverError(f"more than {cap} cycles on {L} vertices; raise the cap")
    return out


def cycles_through_edge(
    H: Hypergraph,
    L: int,
    edge: Iterable[int],
    limit: Optional[int] = None,
    seed: Optional[int] = None,
):
    """Distinct tight L-vertex cycles containing ``edge``, up to ``limit``.

    The search is exhaustive when fewer than ``limit`` cycles exist (an empty
    result is therefore a proof that no L-cycle passes through the edge).
    With a seed, branch orders are shuffled so that truncated searches draw
    a scattered sample instead of a lexicographic prefix.
    """
    _check_cycle_length(H, L)
    edge = tuple(sorted(edge))
    if not H.has_edge(edge):
        raise CoverError(f"{edge!r} is not an edge of the host")
    k = H.k
    rng = random.Random(seed) if seed is not None else None
    found = {}

    def order(items):
        items = list(items)
        if rng is not None:
            rng.shuffle(items)
        return items

    def rec(seq, used):
        if limit is not None and len(found) >= limit:
            return
        if len(seq) == L:
            if _close_ok(H, seq):
                C = TightCycle(H, seq)
                found.setdefault(C.canonical(), C)
            return
        for v in order(range(H.n)):
            if v in used:
                continue
            if H.has_edge(seq[-k + 1 :] + [v]):
                seq.append(v)
                used.add(v)
                rec(seq, used)
                used.discard(v)
                seq.pop()

    for start in order(list(itertools.permutations(edge))):
        if limit is not None and len(found) >= limit:
            break
        rec(list(start), set(start))
    return sorted(found.values(), key=lambda C: C.canonical())


def _check_cycle_length(H: Hypergraph, L: int) -> None:
    if L < H.k + 1:
        raise CoverError(f"cycle length {L} below the minimum {H.k + 1}")
    if L > H.n:
        raise CoverError(f"cycle length {L} exceeds the host order {H.n}")


# ---------------------------------------------------------------------------
# fractional decomposition


class FractionalCycleDecomposition:
    """Positive weights on L-vertex cycles with per-edge sums equal to 1.

    Every edge of the host must be covered and its weights must sum to 1
    within ``tol``.  Weights may be floats or exact Fractions.
    """

    __slots__ = ("host", "weights", "L", "_by_edge")

    def __init__(self, host: Hypergraph, weights: Mapping, tol: float = 1e-9):
        items = {}
        L = None
        for C, w in weights.items():
            if not isinstance(C, TightCycle):
                C = TightCycle(host, C)
            if C.host != host:
                raise CoverError("cycle lives in a different host")
            if L is None:
                L = len(C)
            elif len(C) != L:
                raise CoverError("cycles must all have the same length")
            if not w > 0:
                raise CoverError(f"weight for {C!r} must be positive")
            if C in items:
                raise CoverError(f"duplicate cycle {C!r}")
            items[C] = w
        if not items:
            raise CoverError("a decomposition needs at least one cycle")
        by_edge = {e: [] for e in host.edges}
        for C in items:
            for e in C.edges():
                by_edge[e].append(C)
        for e, cycles in by_edge.items():
            total = sum(items[C] for C in cycles)
            if abs(float(total) - 1.0) > tol:
                raise CoverError(
                    f"edge {e!r} has weight sum {float(total)!r}, not 1 within {tol}"
                )
        object.__setattr__(self, "host", host)
        object.__setattr__(self, "weights", items)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "_by_edge", by_edge)

    def __setattr__(self, name, value):
        raise AttributeError("FractionalCycleDecomposition is immutable")

    def __len__(self):
        return len(self.weights)

    def cycles(self):
        return sorted(self.weights, key=lambda C: C.canonical())

    def weight_of(self, C) -> float:
        if not isinstance(C, TightCycle):
            C = TightCycle(self.host, C)
        return self.weights[C]

    def cycles_through(self, edge):
        return tuple(self._by_edge[tuple(sorted(edge))])

    def per_edge_sum(self, edge) -> float:
        e = tuple(sorted(edge))
        return float(sum(self.weights[C] for C in self._by_edge[e]))

    def min_weight(self):
        return min(self.weights.values())

    def max_weight(self):
        return max(self.weights.values())

    def theorem_window(self) -> tuple[float, float]:
        """The asymptotic weight window (|E| / Delta^L, 3|E| / delta^L).

        Reported for comparison only: at small n even symmetric solutions sit
        outside it, so it is never used as a gate.
        """
        degs = self.host.degrees()
        lo = self.host.m / (max(degs) ** self.L)
        dmin = min(degs)
        hi = math.inf if dmin == 0 else 3 * self.host.m / (dmin ** self.L)
        return (lo, hi)

    def as_dict(self) -> dict:
        window = self.theorem_window()
        return {
            "L": self.L,
            "cycles": [
                {"seq": list(C.canonical()), "weight": float(self.weights[C])}
                for C in self.cycles()
            ],
            "min_weight": float(self.min_weight()),
            "max_weight": float(self.max_weight()),
            "theorem_window": [window[0], window[1]],
        }

    def __repr__(self):
        return (
            f"FractionalCycleDecomposition(L={self.L}, cycles={len(self.weights)})"
        )


def fractional_cycle_decomposition(
    H: Hypergraph,
    L: int,
    family: Optional[Iterable[TightCycle]] = None,
    enumerate_cap: int = 20000,
    per_edge: int = 12,
    seed: int = 0,
    tol: float = 1e-9,
) -> FractionalCycleDecomposition:
    """Solve for per-edge-sum-1 cycle weights by LP over a cycle family.

    The family is the full set of L-vertex cycles when it fits under
    ``enumerate_cap``; otherwise a seeded sample of up to ``per_edge`` cycles
    through each edge.  An edge through which no L-cycle passes at all makes
    the problem infeasible.  Among feasible solutions the LP maximizes the
    minimum cycle weight; zero-weight cycles are dropped from the output.
    """
    _check_cycle_length(H, L)
    if H.m == 0:
        raise CoverError("host has no edges")
    if family is None:
        cycles = _enumerate_all(H, L, enumerate_cap)
        if cycles is None:
            rng = random.Random(seed)
            pool = {}
            for e in H.edges:
                got = cycles_through_edge(
                    H, L, e, limit=per_edge, seed=rng.randrange(2**63)
                )
                if not got:
                    raise DecompositionError(
                        f"no cycle on {L} vertices passes through edge {e!r}"
                    )
                for C in got:
                    pool.setdefault(C.canonical(), C)
            cycles = list(pool.values())
    else:
        cycles = []
        seen = set()
        for C in family:
            if not isinstance(C, TightCycle):
                C = TightCycle(H, C)
            if C.host != H or len(C) != L:
                raise CoverError("family cycle host or length mismatch")
            if C.canonical() not in seen:
                seen.add(C.canonical())
                cycles.append(C)
    cycles.sort(key=lambda C: C.canonical())

    edge_index = {e: i for i, e in enumerate(H.edges)}
    uncovered = set(edge_index)
    rows, cols = [], []
    for j, C in enumerate(cycles):
        for e in C.edges():
            rows.append(edge_index[e])
            cols.append(j)
            uncovered.discard(e)
    if uncovered:
        e = min(uncovered)
        raise DecompositionError(
            f"no cycle on {L} vertices passes through edge {e!r}"
        )

    ncyc = len(cycles)
    a_eq = sparse.csr_matrix(
        (np.ones(len(rows)), (rows, np.array(cols))), shape=(H.m, ncyc + 1)
    )
    b_eq = np.ones(H.m)
    # z <= w_C for every cycle, maximize z
    a_ub = sparse.hstack(
        [-sparse.identity(ncyc, format="csr"), np.ones((ncyc, 1))], format="csr"
    )
    b_ub = np.zeros(ncyc)
    c = np.zeros(ncyc + 1)
    c[-1] = -1.0
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=[(0, None)] * ncyc + [(0, None)],
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10},
    )
    if not res.success:
        raise DecompositionError(
            "no per-edge-sum-1 weighting over the cycle family "
            f"({len(cycles)} cycles); enlarge the family or change L"
        )
    weights = {C: float(w) for C, w in zip(cycles, res.x[:ncyc]) if w > 0}
    return FractionalCycleDecomposition(H, weights, tol=tol)


# ---------------------------------------------------------------------------
# collection extraction


def validate_collections(H: Hypergraph, collections) -> None:
    """Independent structural check: vertex-disjoint within each collection,
    edge-disjoint across all of them."""
    seen_edges = set()
    for i, coll in enumerate(collections):
        used = set()
        for C in coll:
            if not isinstance(C, TightCycle) or C.host != H:
                raise CoverError(f"collection {i} holds a foreign object")
            if used & C.vertex_set:
                raise CoverError(f"collection {i} has vertex-sharing cycles")
            used |= C.vertex_set
            for e in C.edges():
                if e in seen_edges:
                    raise CoverError(f"edge {e!r} appears in two collections")
                seen_edges.add(e)


class ExtractionResult:
    """Cycle collections plus gate diagnostics; truthy when all gates pass."""

    __slots__ = ("collections", "ok", "attempts", "diagnostics", "gamma")

    def __init__(self, collections, ok, attempts, diagnostics, gamma):
        object.__setattr__(self, "collections", collections)
        object.__setattr__(self, "ok", ok)
        object.__setattr__(self, "attempts", attempts)
        object.__setattr__(self, "diagnostics", diagnostics)
        object.__setattr__(self, "gamma", gamma)

    def __setattr__(self, name, value):
        raise AttributeError("ExtractionResult is immutable")

    def __bool__(self):
        return self.ok

    def __len__(self):
        return len(self.collections)

    def __iter__(self):
        return iter(self.collections)

    def __getitem__(self, i):
        return self.collections[i]

    def coverages(self):
        return [len(set().union(*(C.vertex_set for C in coll)) if coll else set())
                for coll in self.collections]

    def __repr__(self):
        status = "ok" if self.ok else "gates-unmet"
        return (
            f"ExtractionResult(r={len(self.collections)}, {status}, "
            f"attempts={self.attempts})"
        )


def extract_cycle_collections(
    H: Hypergraph,
    frac: FractionalCycleDecomposition,
    r: int,
    seed: int = 0,
    gates: Optional[Mapping] = None,
    retries: int = 10,
) -> ExtractionResult:
    """Round a fractional decomposition into r edge-disjoint collections.

    Collections are built one at a time by a randomized greedy: candidates
    are the decomposition's cycles, drawn with probability proportional to
    their normalized weight omega(C)/Gamma among those still vertex-disjoint
    within the current collection and edge-disjoint from everything already
    chosen.  An attempt is accepted when every collection's coverage lands in
    [coverage_min, coverage_max]; otherwise the extraction reseeds, up to
    ``retries`` attempts, and finally returns the best attempt with
    diagnostics (``ok`` False) rather than discarding the work.

    Gates (all overridable through ``gates``): ``mu`` (default 0.2) sets
    coverage_min = ceil((1-mu) n); ``coverage_max`` defaults to n; ``cap_lo``
    and ``cap_con``, when set, bound per-k-set type counts |I_lo(e)| and
    |I_{j-con}(e)| <= cap_con * n^(k-j) measured on the cycle collections.
    """
    if frac.host != H:
        raise CoverError("decomposition lives in a different host")
    if r < 0:
        raise CoverError("r must be nonnegative")
    if r > 0 and r > min(H.degrees()) / H.k:
        raise CoverError(
            f"r={r} exceeds the matching bound min degree / k = "
            f"{min(H.degrees()) / H.k:.3f}"
        )
    gates = dict(gates or {})
    mu = gates.pop("mu", 0.2)
    coverage_min = gates.pop("coverage_min", math.ceil((1 - mu) * H.n))
    coverage_max = gates.pop("coverage_max", H.n)
    cap_lo = gates.pop("cap_lo", None)
    cap_con = gates.pop("cap_con", None)
    if gates:
        raise CoverError(f"unknown gate(s): {sorted(gates)}")

    rho = H.regularity_report().rho_star
    gamma = float((1 + rho) * r) if r else 1.0
    if r == 0:
        return ExtractionResult([], True, 0, [], gamma)

    family = frac.cycles()
    fam_weights = [float(frac.weights[C]) / gamma for C in family]
    L = frac.L
    master = random.Random(seed)
    best = None
    diagnostics = []
    for attempt in range(max(1, retries)):
        rng = random.Random(master.randrange(2**63))
        used_edges: set = set()
        collections = []
        for _ in range(r):
            coll: list = []
            used_vertices: set = set()
            while len(used_vertices) + L <= coverage_max:
                pool = []
                wts = []
                for C, w in zip(family, fam_weights):
                    if used_vertices & C.vertex_set:
                        continue
                    if any(e in used_edges for e in C.edges()):
                        continue
                    pool.append(C)
                    wts.append(w)
                if not pool:
                    break
                C = rng.choices(pool, weights=wts, k=1)[0]
                coll.append(C)
                used_vertices |= C.vertex_set
                used_edges.update(C.edges())
            collections.append(tuple(coll))
        validate_collections(H, collections)
        failures = _gate_failures(
            H, collections, coverage_min, coverage_max, cap_lo, cap_con
        )
        diagnostics.append(
            {
                "attempt": attempt,
                "coverages": [
                    len(set().union(*(C.vertex_set for C in coll)) if coll else set())
                    for coll in collections
                ],
                "failures": failures,
            }
        )
        if not failures:
            return ExtractionResult(collections, True, attempt + 1, diagnostics, gamma)
        if best is None or len(failures) < len(best[1]):
            best = (collections, failures)
    return ExtractionResult(best[0], False, max(1, retries), diagnostics, gamma)


def _gate_failures(H, collections, coverage_min, coverage_max, cap_lo, cap_con):
    failures = []
    vsets = [
        set().union(*(C.vertex_set for C in coll)) if coll else set()
        for coll in collections
    ]
    for i, vs in enumerate(vsets):
        if len(vs) < coverage_min:
            failures.append(f"collection {i} coverage {len(vs)} < {coverage_min}")
        if len(vs) > coverage_max:
            failures.append(f"collection {i} coverage {len(vs)} > {coverage_max}")
    if cap_lo is None and cap_con is None:
        return failures
    n, k = H.n, H.k
    for e in itertools.combinations(range(n), k):
        es = set(e)
        n_lo = 0
        con_counts = dict.fromkeys(range(1, k + 1), 0)
        for coll, vs in zip(collections, vsets):
            if not es <= vs:
                n_lo += 1
                continue
            j = max(len(es & C.vertex_set) for C in coll)
            con_counts[j] += 1
        if cap_lo is not None and n_lo > cap_lo:
            failures.append(f"|I_lo({e})| = {n_lo} > {cap_lo}")
        if cap_con is not None:
            for j, cnt in con_counts.items():
                if cnt > cap_con * n ** (k - j):
                    failures.append(
                        f"|I_{j}-con({e})| = {cnt} > {cap_con} * n^{k - j}"
                    )
    return failures


# ---------------------------------------------------------------------------
# conversion to paths


class CoverBundle:
    """r edge-disjoint cycle collections with their opened path collections.

    Both forms are kept: the cycle collections feed constructions that splice
    cycles directly, the path collections everything end-sensitive.  The
    type index maps every k-set of the host's vertices to, per type label
    ('j-end', 'lo', 'j-con'), the collection indices where the k-set has that
    type; the labels partition [r] for each k-set.
    """

    __slots__ = ("host", "cycle_collections", "path_collections", "mu", "_index")

    def __init__(self, host, cycle_collections, path_collections, mu: float = 0.2):
        cycle_collections = [tuple(c) for c in cycle_collections]
        path_collections = list(path_collections)
        if len(cycle_collections) != len(path_collections):
            raise CoverError("cycle and path collection counts differ")
        validate_collections(host, cycle_collections)
        need = math.ceil((1 - mu) * host.n)
        for i, (coll, pc) in enumerate(zip(cycle_collections, path_collections)):
            if not isinstance(pc, PathCollection) or pc.host != host:
                raise CoverError(f"path collection {i} has a host mismatch")
            cyc_vs = set().union(*(C.vertex_set for C in coll)) if coll else set()
            if cyc_vs != set(pc.vertex_set):
                raise CoverError(f"collection {i}: cycle and path vertex sets differ")
            if pc.coverage < need:
                raise CoverError(
                    f"collection {i} coverage {pc.coverage} below (1-mu)n = {need}"
                )
        object.__setattr__(self, "host", host)
        object.__setattr__(self, "cycle_collections", cycle_collections)
        object.__setattr__(self, "path_collections", path_collections)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "_index", None)

    def __setattr__(self, name, value):
        raise AttributeError("CoverBundle is immutable")

    @property
    def r(self) -> int:
        return len(self.path_collections)

    def coverages(self):
        return [pc.coverage for pc in self.path_collections]

    @property
    def type_index(self) -> dict:
        """Map k-set -> {type label -> tuple of collection indices}."""
        if self._index is None:
            index = {}
            for e in itertools.combinations(range(self.host.n), self.host.k):
                by_type: dict = {}
                for i, pc in enumerate(self.path_collections):
                    by_type.setdefault(classify(e, pc), []).append(i)
                index[frozenset(e)] = {t: tuple(v) for t, v in by_type.items()}
            object.__setattr__(self, "_index", index)
        return self._index

    def types_of(self, e) -> dict:
        return self.type_index[frozenset(e)]

    def type_stats(self) -> dict:
        """Per type label: the max and total of |I_type(e)| over all k-sets."""
        stats: dict = {}
        for by_type in self.type_index.values():
            for t, idxs in by_type.items():
                cur = stats.setdefault(t, {"max": 0, "total": 0})
                cur["max"] = max(cur["max"], len(idxs))
                cur["total"] += len(idxs)
        return stats

    def gate_report(self, cap_end: Optional[float] = None,
                    cap_con: Optional[float] = None) -> dict:
        """Measure the shaped occupancy caps |I_{j-t}(e)| <= cap * n^(k-j).

        Purely informational: returns per-label maxima together with the cap
        values and a boolean verdict when a cap is supplied.
        """
        n, k = self.host.n, self.host.k
        report = {}
        for t, stat in sorted(self.type_stats().items()):
            entry = {"max": stat["max"], "total": stat["total"]}
            if t.endswith("-end") and cap_end is not None:
                j = int(t.split("-")[0])
                entry["cap"] = cap_end * n ** (k - j)
                entry["ok"] = stat["max"] <= entry["cap"]
            if t.endswith("-con") and cap_con is not None:
                j = int(t.split("-")[0])
                entry["cap"] = cap_con * n ** (k - j)
                entry["ok"] = stat["max"] <= entry["cap"]
            report[t] = entry
        return report

    def as_dict(self) -> dict:
        return {
            "k": self.host.k,
            "n": self.host.n,
            "r": self.r,
            "mu": self.mu,
            "collections": [
                {
                    "cycles": [list(C.canonical()) for C in coll],
                    "paths": [list(P.seq) for P in pc],
                    "coverage": pc.coverage,
                }
                for coll, pc in zip(self.cycle_collections, self.path_collections)
            ],
            "type_stats": self.type_stats(),
        }

    def __repr__(self):
        return f"CoverBundle(r={self.r}, coverages={self.coverages()})"


def cycles_to_paths(
    collections,
    seed: int = 0,
    host: Optional[Hypergraph] = None,
    mu: float = 0.2,
) -> CoverBundle:
    """Open every cycle into a path by deleting k-1 consecutive edges.

    The deletion position is a uniformly random rotation, independent per
    cycle: an L-vertex cycle has L runs of k-1 consecutive edges, and
    removing one run leaves a tight path on the same L vertices with
    L - k + 1 edges.  Coverage is unchanged.  ``collections`` may be an
    ExtractionResult or a plain list; ``host`` is only needed when empty.
    """
    if isinstance(collections, ExtractionResult):
        collections = collections.collections
    collections = [tuple(c) for c in collections]
    for coll in collections:
        for C in coll:
            if host is None:
                host = C.host
            elif C.host != host:
                raise CoverError("collections live in different hosts")
    if host is None:
        raise CoverError("host required for an empty bundle")
    rng = random.Random(seed)
    path_collections = []
    for coll in collections:
        paths = []
        for C in coll:
            base = C.canonical()
            s = rng.randrange(len(base))
            seq = tuple(base[(s + t) % len(base)] for t in range(len(base)))
            paths.append(TightPath(host, seq))
        path_collections.append(PathCollection(host, paths))
    return CoverBundle(host, collections, path_collections, mu=mu)

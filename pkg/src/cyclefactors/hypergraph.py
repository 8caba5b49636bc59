"""k-uniform hypergraphs with the degree/codegree machinery everything else queries.

A Hypergraph is an immutable value: ``k``, a dense vertex range ``0..n-1``, and a
set of k-edges stored as sorted tuples. Degree d(v), codegree d(x) of a j-set x,
the neighborhood N(x) of a (k-1)-set, induced subgraphs, and the regularity /
intersection report (rho_star, eta_star, delta_codegree) live here, together with
the plain-text serialization format.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence


class HypergraphError(ValueError):
    """Domain error for malformed hypergraph input or invalid queries."""


# Precomputing the full (k-1)-subset codegree index is only worth it while the
# subset count stays small; above this cap the index is filled lazily per query.
FULL_INDEX_CAP = 10**7


class Hypergraph:
    """Immutable k-uniform hypergraph on vertices 0..n-1.

    Edges are deduplicated sorted k-tuples. Instances compare and hash by
    (k, n, edge set); derived indexes are cached lazily and never leak into
    equality.
    """

    __slots__ = (
        "k",
        "n",
        "edges",
        "parent_ids",
        "_edge_ids",
        "_degrees",
        "_codegree_cache",
        "_full_km1_index",
        "_hash",
    )

    def __init__(
        self,
        k: int,
        n: int,
        edges: Iterable[Sequence[int]],
        parent_ids: Optional[tuple[int, ...]] = None,
    ):
        if not isinstance(k, int) or k < 2:
            raise HypergraphError(f"uniformity k must be an integer >= 2, got {k!r}")
        if not isinstance(n, int) or n < 0:
            raise HypergraphError(f"vertex count n must be a nonnegative integer, got {n!r}")
        canon = []
        seen = set()
        for e in edges:
            t = tuple(sorted(e))
            if len(t) != k:
                raise HypergraphError(f"edge {tuple(e)!r} does not have {k} vertices")
            if len(set(t)) != k:
                raise HypergraphError(f"edge {tuple(e)!r} has repeated vertices")
            if t[0] < 0 or t[-1] >= n:
                raise HypergraphError(f"edge {tuple(e)!r} has a vertex outside 0..{n - 1}")
            if t in seen:
                raise HypergraphError(f"duplicate edge {t!r}")
            seen.add(t)
            canon.append(t)
        canon.sort()
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(canon))
        if parent_ids is not None and len(parent_ids) != n:
            raise HypergraphError("parent_ids must list one parent vertex per vertex")
        object.__setattr__(self, "parent_ids", parent_ids)
        object.__setattr__(self, "_edge_ids", {e: i for i, e in enumerate(canon)})
        degs = [0] * n
        for e in canon:
            for v in e:
                degs[v] += 1
        object.__setattr__(self, "_degrees", tuple(degs))
        object.__setattr__(self, "_codegree_cache", {})
        object.__setattr__(self, "_full_km1_index", None)
        object.__setattr__(self, "_hash", hash((k, n, tuple(canon))))

    def __setattr__(self, name, value):  # immutability guard for public fields
        raise AttributeError("Hypergraph is immutable")

    # -- basic queries ---------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> range:
        return range(self.n)

    def edge_id(self, e: Iterable[int]) -> int:
        t = tuple(sorted(e))
        try:
            return self._edge_ids[t]
        except KeyError:
            raise HypergraphError(f"{t!r} is not an edge") from None

    def has_edge(self, e: Iterable[int]) -> bool:
        return tuple(sorted(e)) in self._edge_ids

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return self._degrees[v]

    def degrees(self) -> tuple[int, ...]:
        return self._degrees

    def _check_vertex(self, v) -> None:
        if not isinstance(v, int) or not (0 <= v < self.n):
            raise HypergraphError(f"invalid vertex id {v!r} (n={self.n})")

    def codegree(self, x: Iterable[int]) -> int:
        """Number of edges containing the j-set x, 1 <= j <= k-1."""
        xs = tuple(sorted(set(x)))
        j = len(xs)
        if not (1 <= j <= self.k - 1):
            raise HypergraphError(f"codegree wants a j-set with 1 <= j <= {self.k - 1}, got j={j}")
        for v in xs:
            self._check_vertex(v)
        if j == 1:
            return self._degrees[xs[0]]
        cache = self._codegree_cache
        hit = cache.get(xs)
        if hit is None:
            if j == self.k - 1:
                hit = len(self._km1_index().get(xs, ()))
            else:
                s = set(xs)
                hit = sum(1 for e in self.edges if s.issubset(e))
            cache[xs] = hit
        return hit

    def _km1_index(self) -> dict:
        """(k-1)-subset -> sorted tuple of completing vertices, built once."""
        idx = self._full_km1_index
        if idx is None:
            if math.comb(self.n, self.k - 1) > FULL_INDEX_CAP:
                raise HypergraphError("full codegree index over cap; query edges directly")
            idx = {}
            for e in self.edges:
                for i in range(self.k):
                    key = e[:i] + e[i + 1 :]
                    idx.setdefault(key, []).append(e[i])
            idx = {key: tuple(sorted(vs)) for key, vs in idx.items()}
            object.__setattr__(self, "_full_km1_index", idx)
        return idx

    def neighborhood(self, x: Iterable[int]) -> frozenset:
        """N(x) = {v : x + v is an edge} for a (k-1)-set x."""
        xs = tuple(sorted(set(x)))
        if len(xs) != self.k - 1:
            raise HypergraphError(f"neighborhood wants a ({self.k - 1})-set, got {xs!r}")
        for v in xs:
            self._check_vertex(v)
        return frozenset(self._km1_index().get(xs, ()))

    def delta_codegree(self, j: Optional[int] = None) -> int:
        """delta_j(H): minimum codegree over all j-subsets of the vertex set."""
        j = self.k - 1 if j is None else j
        if self.m == 0:
            return 0
        return min(self.codegree(x) for x in itertools.combinations(range(self.n), j))

    def max_codegree(self, j: Optional[int] = None) -> int:
        j = self.k - 1 if j is None else j
        if self.m == 0:
            return 0
        return max(self.codegree(x) for x in itertools.combinations(range(self.n), j))

    # -- derived graphs --------------------------------------------------

    def induced(self, U: Iterable[int]) -> "Hypergraph":
        """H[U], relabeled to dense ids 0..|U|-1 (order-preserving).

        The result's ``parent_ids`` maps each new id back to its vertex in
        self (composed through an existing parent_ids if present).
        """
        us = sorted(set(U))
        for v in us:
            self._check_vertex(v)
        relabel = {v: i for i, v in enumerate(us)}
        uset = set(us)
        sub_edges = [
            tuple(relabel[v] for v in e) for e in self.edges if uset.issuperset(e)
        ]
        if self.parent_ids is not None:
            parents = tuple(self.parent_ids[v] for v in us)
        else:
            parents = tuple(us)
        return Hypergraph(self.k, len(us), sub_edges, parent_ids=parents)

    def remove_edges(self, S: Iterable[Iterable[int]]) -> "Hypergraph":
        """H - S: same vertex set, edge set E \\ S. Every member of S must be an edge."""
        drop = set()
        for e in S:
            t = tuple(sorted(e))
            if t not in self._edge_ids:
                raise HypergraphError(f"cannot remove non-edge {t!r}")
            drop.add(t)
        return Hypergraph(
            self.k, self.n, (e for e in self.edges if e not in drop), parent_ids=self.parent_ids
        )

    def minus(self, other: "Hypergraph") -> "Hypergraph":
        """H1 - H2 = (V1, E1 \\ E2)."""
        if other.k != self.k:
            raise HypergraphError("uniformity mismatch")
        drop = set(other.edges)
        return Hypergraph(
            self.k, self.n, (e for e in self.edges if e not in drop), parent_ids=self.parent_ids
        )

    def union_edges(self, extra: Iterable[Sequence[int]]) -> "Hypergraph":
        """Same vertex set, edge set E plus the given edges (duplicates ignored)."""
        merged = dict.fromkeys(self.edges)
        for e in extra:
            merged[tuple(sorted(e))] = None
        return Hypergraph(self.k, self.n, merged.keys(), parent_ids=self.parent_ids)

    # -- reports ---------------------------------------------------------

    def regularity_report(self) -> "RegularityReport":
        return RegularityReport.from_hypergraph(self)

    # -- dunder ----------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Hypergraph)
            and self.k == other.k
            and self.n == other.n
            and self.edges == other.edges
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Hypergraph(k={self.k}, n={self.n}, m={self.m})"


def complete_hypergraph(k: int, n: int) -> Hypergraph:
    """K_n^(k): all k-subsets of 0..n-1."""
    return Hypergraph(k, n, itertools.combinations(range(n), k))


@dataclass(frozen=True)
class RegularityReport:
    """Almost-regularity and intersection summary of a hypergraph.

    r_mean is the average vertex degree k*m/n; rho_star the smallest rho such
    that every degree is (1 +- rho)*r_mean; eta_star the minimum over disjoint
    (k-1)-set pairs of |N(x) cap N(y)| / n (None when n < 2(k-1) leaves no
    disjoint pair); eta_star_all_pairs the same minimum over all pairs.
    """

    k: int
    n: int
    m: int
    r_mean: Fraction
    rho_star: Fraction
    eta_star: Optional[Fraction]
    eta_star_all_pairs: Optional[Fraction]
    delta_codegree: int

    @staticmethod
    def from_hypergraph(H: Hypergraph) -> "RegularityReport":
        n, k, m = H.n, H.k, H.m
        if n == 0:
            raise HypergraphError("empty vertex set has no regularity report")
        r_mean = Fraction(k * m, n)
        if r_mean == 0:
            rho_star = Fraction(0)
        else:
            rho_star = max(abs(Fraction(d) / r_mean - 1) for d in H.degrees())
        eta = eta_all = None
        if m > 0 and n >= k - 1:
            km1_sets = list(itertools.combinations(range(n), k - 1))
            hoods = {x: H.neighborhood(x) for x in km1_sets}
            best_all = None
            best_disjoint = None
            for x, y in itertools.combinations_with_replacement(km1_sets, 2):
                inter = len(hoods[x] & hoods[y])
                if best_all is None or inter < best_all:
                    best_all = inter
                if not set(x) & set(y):
                    if best_disjoint is None or inter < best_disjoint:
                        best_disjoint = inter
            eta_all = Fraction(best_all, n) if best_all is not None else None
            eta = Fraction(best_disjoint, n) if best_disjoint is not None else None
        delta = H.delta_codegree() if m > 0 and n >= k - 1 else 0
        return RegularityReport(
            k=k,
            n=n,
            m=m,
            r_mean=r_mean,
            rho_star=rho_star,
            eta_star=eta,
            eta_star_all_pairs=eta_all,
            delta_codegree=delta,
        )

    def as_dict(self) -> dict:
        def num(x):
            if x is None:
                return None
            return {"fraction": f"{x.numerator}/{x.denominator}", "float": float(x)}

        return {
            "k": self.k,
            "n": self.n,
            "m": self.m,
            "r_mean": num(self.r_mean),
            "rho_star": num(self.rho_star),
            "eta_star": num(self.eta_star),
            "eta_star_all_pairs": num(self.eta_star_all_pairs),
            "delta_codegree": self.delta_codegree,
        }


# ---------------------------------------------------------------------------
# degree transfer: (k-1)-set control of vertex degrees under induction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransferReport:
    """Outcome of degree_transfer_check.

    If every (k-1)-set x satisfies d_{H[U+x]}(x) = (1 +- eps) * theta * d_H(x),
    then every vertex v must satisfy
    d_{H[U+v]}(v) = (1 +- 8 k^3 eps) * theta^(k-1) * d_H(v).
    ``precondition_ok`` reports the hypothesis, ``vertex_pass`` the conclusion.
    """

    theta: float
    eps: float
    precondition_ok: bool
    failing_sets: tuple
    set_ratios: dict
    vertex_ratios: dict
    vertex_pass: dict
    all_pass: bool


def degree_transfer_check(
    H: Hypergraph,
    U: Iterable[int],
    theta: Optional[float] = None,
    eps: Optional[float] = None,
) -> TransferReport:
    """Check the (k-1)-set-to-vertex degree transfer on H and U.

    With theta=None the observed mean of d_{H[U+x]}(x) / d_H(x) is used; with
    eps=None the maximal observed deviation from theta is used (so the
    hypothesis holds by construction and only the conclusion is informative).
    """
    uset = set(U)
    for v in uset:
        H._check_vertex(v)
    k = H.k
    set_ratios = {}
    for x in itertools.combinations(range(H.n), k - 1):
        dx = H.codegree(x)
        if dx == 0:
            continue
        inner = sum(1 for v in H.neighborhood(x) if v in uset or v in x)
        set_ratios[x] = inner / dx
    if not set_ratios:
        return TransferReport(
            theta=0.0 if theta is None else theta,
            eps=0.0 if eps is None else eps,
            precondition_ok=True,
            failing_sets=(),
            set_ratios={},
            vertex_ratios={},
            vertex_pass={},
            all_pass=True,
        )
    if theta is None:
        theta = sum(set_ratios.values()) / len(set_ratios)
    if eps is None:
        eps = max(abs(r - theta * 1.0) for r in set_ratios.values())
        eps = eps / theta if theta > 0 else 0.0
    failing = tuple(
        x
        for x, r in set_ratios.items()
        if not (theta * (1 - eps) - 1e-12 <= r <= theta * (1 + eps) + 1e-12)
    )
    tol = 8 * k**3 * eps
    target = theta ** (k - 1)
    vertex_ratios = {}
    vertex_pass = {}
    for v in range(H.n):
        dv = H.degree(v)
        if dv == 0:
            continue
        dv_in = sum(1 for e in H.edges if v in e and all(u in uset or u == v for u in e))
        ratio = dv_in / dv
        vertex_ratios[v] = ratio
        lo = target * (1 - tol)
        hi = target * (1 + tol)
        vertex_pass[v] = lo - 1e-12 <= ratio <= hi + 1e-12
    return TransferReport(
        theta=theta,
        eps=eps,
        precondition_ok=not failing,
        failing_sets=failing,
        set_ratios=set_ratios,
        vertex_ratios=vertex_ratios,
        vertex_pass=vertex_pass,
        all_pass=all(vertex_pass.values()),
    )


# ---------------------------------------------------------------------------
# text serialization: "k n m" header then one line of k vertex ids per edge
# ---------------------------------------------------------------------------


def parse_hypergraph(text: str) -> Hypergraph:
    lines = text.splitlines()
    rows = [(i + 1, ln.strip()) for i, ln in enumerate(lines)]
    rows = [(no, ln) for no, ln in rows if ln]
    if not rows:
        raise HypergraphError("empty input: missing 'k n m' header")
    no, header = rows[0]
    parts = header.split()
    if len(parts) != 3:
        raise HypergraphError(f"line {no}: header must be 'k n m', got {header!r}")
    try:
        k, n, m = (int(p) for p in parts)
    except ValueError:
        raise HypergraphError(f"line {no}: header fields must be integers") from None
    body = rows[1:]
    if len(body) != m:
        raise HypergraphError(f"expected {m} edge lines, found {len(body)}")
    edges = []
    for no, ln in body:
        fields = ln.split()
        if len(fields) != k:
            raise HypergraphError(f"line {no}: expected {k} vertex ids, got {len(fields)}")
        try:
            e = tuple(int(f) for f in fields)
        except ValueError:
            raise HypergraphError(f"line {no}: vertex ids must be integers") from None
        edges.append(e)
    try:
        return Hypergraph(k, n, edges)
    except HypergraphError as exc:
        raise HypergraphError(f"invalid edge list: {exc}") from None


def format_hypergraph(H: Hypergraph) -> str:
    out = [f"{H.k} {H.n} {H.m}"]
    out.extend(" ".join(str(v) for v in e) for e in H.edges)
    return "\n".join(out) + "\n"


def read_hypergraph(path) -> Hypergraph:
    with open(path, "r", encoding="ascii") as fh:
        return parse_hypergraph(fh.read())


def write_hypergraph(H: Hypergraph, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_hypergraph(H))

"""Perfect fractional matchings: uniform start, walk redistribution, LP fallback,
balancedness, and weight-biased sparsification.

A perfect fractional matching (PFM) assigns a positive weight to every edge so
that the weights at each vertex sum to 1. ``redistribute_pfm`` turns the uniform
weighting into a PFM by shifting weight along short self-avoiding walks; in
exact (rational) mode the vertex sums come out equal to 1 identically.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy.optimize import linprog

from .hypergraph import Hypergraph, HypergraphError

FLOAT_TOL = 1e-9


class FractionalError(ValueError):
    pass


class NotConnectedError(FractionalError):
    """Some ordered vertex pair has no registered connecting walk."""


class BalanceViolationError(FractionalError):
    """Redistribution drove some edge weight to zero or below."""

    def __init__(self, message, edge=None, weight=None):
        super().__init__(message)
        self.edge = edge
        self.weight = weight


class LPInfeasibleError(FractionalError):
    pass


class SparsifyError(FractionalError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class EdgeWeighting:
    """Positive edge weights with cached subset aggregates.

    omega(S) for a vertex set S is the total weight of edges containing S;
    omega(()) is the total weight. Weights are Fractions in exact mode,
    floats otherwise (tolerance FLOAT_TOL for the PFM check).
    """

    __slots__ = ("host", "weights", "exact", "_agg_cache", "_table_cache", "_total")

    def __init__(self, host: Hypergraph, weights, exact: bool):
        weights = tuple(weights)
        if len(weights) != host.m:
            raise FractionalError("need one weight per edge")
        for e, w in zip(host.edges, weights):
            if w <= 0:
                raise BalanceViolationError(
                    f"weight {w} on edge {e} is not positive", edge=e, weight=w
                )
        self.host = host
        self.weights = weights
        self.exact = exact
        self._agg_cache = {}
        self._table_cache = {}  # walk-sampler cumulative tables, keyed by suffix set
        self._total = sum(weights)

    def weight_of(self, e) -> "Fraction | float":
        return self.weights[self.host.edge_id(e)]

    def omega(self, S: Iterable[int]):
        """Sum of weights of edges containing the vertex set S (S may be empty)."""
        key = frozenset(S)
        if len(key) > self.host.k:
            return 0 if self.exact else 0.0
        if not key:
            return self._total
        hit = self._agg_cache.get(key)
        if hit is None:
            hit = sum(
                w for e, w in zip(self.host.edges, self.weights) if key.issubset(e)
            )
            self._agg_cache[key] = hit
        return hit

    def vertex_weight(self, v: int):
        return self.omega((v,))

    def vertex_weights(self) -> list:
        return [self.omega((v,)) for v in range(self.host.n)]

    def min_weight(self):
        return min(self.weights)

    def max_weight(self):
        return max(self.weights)

    def is_pfm(self) -> bool:
        if self.exact:
            return all(self.omega((v,)) == 1 for v in range(self.host.n))
        return all(abs(self.omega((v,)) - 1) <= FLOAT_TOL for v in range(self.host.n))

    def as_floats(self) -> "EdgeWeighting":
        if not self.exact:
            return self
        return EdgeWeighting(self.host, [float(w) for w in self.weights], exact=False)

    def __repr__(self):
        mode = "exact" if self.exact else "float"
        return f"EdgeWeighting({mode}, m={self.host.m})"


def uniform_weighting(H: Hypergraph, exact: bool = True) -> EdgeWeighting:
    """omega_0(e) = n/(k|E|); vertex weights then sum to n in total."""
    if H.m == 0:
        raise FractionalError("uniform weighting needs at least one edge")
    w = Fraction(H.n, H.k * H.m)
    if not exact:
        w = float(w)
    return EdgeWeighting(H, [w] * H.m, exact=exact)


def balancedness(w: EdgeWeighting):
    """max edge weight / min edge weight (Fraction in exact mode)."""
    return w.max_weight() / w.min_weight()


# ---------------------------------------------------------------------------
# walk registry + redistribution
# ---------------------------------------------------------------------------


def build_walk_registry(
    H: Hypergraph, cap: int = 500, seed: int = 0
) -> Dict[Tuple[int, int], List[tuple]]:
    """All self-avoiding (k+1)-vertex walks per ordered pair, capped per pair.

    A registered walk v_1..v_{k+1} runs from v_1 = s to v_{k+1} = t with both
    k-windows edges of H and no repeated vertex. Above the cap a seeded
    shuffle picks which walks survive.
    """
    k = H.k
    rng = random.Random(seed)
    registry: Dict[Tuple[int, int], List[tuple]] = {}
    for s in range(H.n):
        for t in range(H.n):
            if s == t:
                continue
            walks = []
            others = [v for v in range(H.n) if v != s and v != t]
            for mid in itertools.permutations(others, k - 1):
                first = (s,) + mid
                last = mid + (t,)
                if H.has_edge(first) and H.has_edge(last):
                    walks.append(first + (t,))
            if len(walks) > cap:
                rng.shuffle(walks)
                walks = sorted(walks[:cap])
            registry[(s, t)] = walks
    return registry


def redistribute_pfm(
    H: Hypergraph, W: Dict[Tuple[int, int], List[tuple]]
) -> EdgeWeighting:
    """Exact perfect fractional matching from uniform weights via walk shifts.

    Each walk in W[(s,t)] moves weight a = xi(s)/(n|W[(s,t)]|) from its first
    k-window to its last one, where xi(v) = omega_0(v) - 1. Summing the shifts
    over all ordered pairs cancels the deviation at every vertex:
    omega(v) = omega_0(v) - (n-1) xi(v)/n + sum_{u != v} xi(u)/n = 1.
    """
    k, n = H.k, H.n
    base = uniform_weighting(H, exact=True)
    xi = [base.vertex_weight(v) - 1 for v in range(n)]
    for s in range(n):
        for t in range(n):
            if s != t and not W.get((s, t)):
                raise NotConnectedError(
                    f"no connecting walks registered for the ordered pair ({s}, {t})"
                )
    weights = list(base.weights)
    for (s, t), walks in W.items():
        if s == t or xi[s] == 0:
            continue
        a = Fraction(xi[s], 1) / (n * len(walks))
        for walk in walks:
            if len(walk) != k + 1 or len(set(walk)) != k + 1:
                raise FractionalError(f"registered walk {walk} is not self-avoiding")
            if walk[0] != s or walk[-1] != t:
                raise FractionalError(f"walk {walk} filed under the wrong pair ({s},{t})")
            first = H.edge_id(walk[:k])
            last = H.edge_id(walk[1:])
            weights[first] -= a
            weights[last] += a
    worst = min(range(H.m), key=lambda i: weights[i])
    if weights[worst] <= 0:
        raise BalanceViolationError(
            f"redistribution drove edge {H.edges[worst]} to weight {weights[worst]}",
            edge=H.edges[worst],
            weight=weights[worst],
        )
    out = EdgeWeighting(H, weights, exact=True)
    assert out.is_pfm(), "telescoping identity violated (arithmetic bug)"
    return out


def pfm_lp(H: Hypergraph) -> EdgeWeighting:
    """LP fallback: maximize the minimum edge weight subject to PFM constraints.

    Solves max z s.t. sum_{e ni v} w_e = 1 (all v), w_e >= z >= 0. Used when
    redistribution would drive a weight nonpositive.
    """
    m, n = H.m, H.n
    if m == 0:
        raise LPInfeasibleError("no edges to weight")
    # variables: w_0..w_{m-1}, z
    c = np.zeros(m + 1)
    c[m] = -1.0
    A_eq = np.zeros((n, m + 1))
    for j, e in enumerate(H.edges):
        for v in e:
            A_eq[v, j] = 1.0
    b_eq = np.ones(n)
    A_ub = np.hstack([-np.eye(m), np.ones((m, 1))])  # z - w_e <= 0
    b_ub = np.zeros(m)
    res = linprog(
        c,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=[(0, None)] * m + [(0, None)],
        method="highs",
    )
    if not res.success:
        raise LPInfeasibleError(f"no perfect fractional matching: {res.message}")
    z = res.x[m]
    if z <= FLOAT_TOL:
        raise LPInfeasibleError(
            "perfect fractional matchings exist but none with all-positive weights"
        )
    return EdgeWeighting(H, [float(x) for x in res.x[:m]], exact=False)


# ---------------------------------------------------------------------------
# sparsification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SparsifyResult:
    subgraph: Hypergraph
    report: object
    attempts: int


def sparsify_intersecting(
    H: Hypergraph,
    F: Hypergraph,
    eps: float,
    pfm: EdgeWeighting,
    seed: int,
    eta_gate: Optional[float] = None,
    rho_gate: Optional[float] = None,
    retries: int = 20,
) -> SparsifyResult:
    """Random spanning subgraph keeping e with probability
    (1-eps) + eps*w(e)/w_max on F and eps*w(e)/w_max off F.

    With gates set, resamples until the regularity report shows
    eta_star >= eta_gate and rho_star <= rho_gate; otherwise the first sample
    is returned with its report.
    """
    if F.n != H.n or F.k != H.k:
        raise FractionalError("F must be a spanning subgraph shape-compatible with H")
    if not (0.0 <= eps <= 1.0):
        raise FractionalError(f"eps must lie in [0, 1], got {eps}")
    if pfm.host != H:
        raise FractionalError("the matching must weight H's edges")
    wmax = float(pfm.max_weight())
    fset = set(F.edges)
    probs = []
    for e, w in zip(H.edges, pfm.weights):
        p = eps * float(w) / wmax
        if e in fset:
            p += 1.0 - eps
        probs.append(min(1.0, p))
    rng = random.Random(seed)
    last_report = None
    for attempt in range(1, max(1, retries) + 1):
        kept = [e for e, p in zip(H.edges, probs) if rng.random() < p]
        sub = Hypergraph(H.k, H.n, kept)
        report = sub.regularity_report()
        last_report = report
        ok = True
        if eta_gate is not None:
            ok = ok and report.eta_star is not None and report.eta_star >= eta_gate
        if rho_gate is not None:
            ok = ok and report.rho_star <= rho_gate
        if ok or (eta_gate is None and rho_gate is None):
            return SparsifyResult(subgraph=sub, report=report, attempts=attempt)
    raise SparsifyError(
        f"sparsification missed the (eta, rho) gates in {retries} attempts",
        report=last_report,
    )


# ---------------------------------------------------------------------------
# serialization: one line per edge, `edge_id p/q` or `edge_id float17`
# ---------------------------------------------------------------------------


def format_weighting(w: EdgeWeighting) -> str:
    lines = []
    for i, x in enumerate(w.weights):
        if w.exact:
            lines.append(f"{i} {x.numerator}/{x.denominator}")
        else:
            lines.append(f"{i} {x:.17g}")
    return "\n".join(lines) + "\n"


def parse_weighting(text: str, H: Hypergraph) -> EdgeWeighting:
    entries = {}
    exact = None
    for no, ln in enumerate(text.splitlines(), start=1):
        ln = ln.strip()
        if not ln:
            continue
        parts = ln.split()
        if len(parts) != 2:
            raise FractionalError(f"line {no}: expected 'edge_id value'")
        try:
            i = int(parts[0])
        except ValueError:
            raise FractionalError(f"line {no}: bad edge id {parts[0]!r}") from None
        if "/" in parts[1]:
            num, den = parts[1].split("/", 1)
            val = Fraction(int(num), int(den))
            this_exact = True
        else:
            val = float(parts[1])
            this_exact = False
        if exact is None:
            exact = this_exact
        elif exact != this_exact:
            raise FractionalError(f"line {no}: mixed rational and float values")
        if i in entries:
            raise FractionalError(f"line {no}: duplicate edge id {i}")
        entries[i] = val
    if len(entries) != H.m or set(entries) != set(range(H.m)):
        raise FractionalError(f"need exactly the edge ids 0..{H.m - 1}")
    return EdgeWeighting(H, [entries[i] for i in range(H.m)], exact=bool(exact))

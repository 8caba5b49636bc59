"""Vertex absorbers, absorber blocks, the staged structure construction, and
the matching-based absorption step.

An x-absorber is a 2k-vertex tight path that stays tight when x is inserted
in its middle. Blocks bundle `a` absorber slots (with `ell` spacer vertices
after each) inside longer paths; a block is good when almost every vertex of
the ambient host can be absorbed by one of its slots. The structure is built
by drawing memory-L random walks in a shrinking residual graph, keeping the
self-avoiding ones, and post-checking the path/block counts; absorption then
matches vertices to blocks and splices each vertex into its slot.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .fractional import (
    EdgeWeighting,
    FractionalError,
    LPInfeasibleError,
    build_walk_registry,
    pfm_lp,
    redistribute_pfm,
    uniform_weighting,
)
from .hypergraph import Hypergraph
from .tightpaths import TightPath, is_tight_path
from .walks import StuckWalkError, sample_walk


class AbsorbingError(ValueError):
    pass


class AbsorbingParamError(AbsorbingError):
    """Structurally impossible parameters (e.g. a block larger than a path)."""


class AbsorbingFailure(AbsorbingError):
    """Retry budget exhausted; carries which post-check items failed."""

    def __init__(self, message, item_failures=()):
        super().__init__(message)
        self.item_failures = tuple(item_failures)


class AbsorptionInfeasible(AbsorbingError):
    def __init__(self, message, unmatched=()):
        super().__init__(message)
        self.unmatched = tuple(unmatched)


def is_absorber_for(H_plus: Hypergraph, seq: Sequence[int], x: int) -> bool:
    """seq is a tight 2k-path and stays tight with x inserted after position k."""
    k = H_plus.k
    seq = tuple(seq)
    if len(seq) != 2 * k or x in seq:
        return False
    return is_tight_path(H_plus, seq) and is_tight_path(
        H_plus, seq[:k] + (x,) + seq[k:]
    )


@dataclass(frozen=True)
class Absorber:
    """Ordered 2k-sequence with the set of vertices it can absorb."""

    seq: Tuple[int, ...]
    center_candidates: frozenset

    def absorbs(self, x: int) -> bool:
        return x in self.center_candidates


def enumerate_absorbers(
    H_plus: Hypergraph, x: int, cap: Optional[int] = None
) -> List[Absorber]:
    """All ordered 2k-sequences that absorb x, up to cap (None = all).

    DFS over the inserted (2k+1)-sequence with x pinned at the center,
    pruning on both the inserted windows and the seam windows of the bare
    sequence.
    """
    H_plus._check_vertex(x)
    k = H_plus.k
    out: List[Absorber] = []

    def full_candidates(seq: Tuple[int, ...]) -> frozenset:
        return frozenset(
            v for v in range(H_plus.n) if is_absorber_for(H_plus, seq, v)
        )

    def rec(seq: List[int]):
        if cap is not None and len(out) >= cap:
            return
        if len(seq) == 2 * k:
            out.append(Absorber(seq=tuple(seq), center_candidates=full_candidates(tuple(seq))))
            return
        for v in range(H_plus.n):
            if v == x or v in seq:
                continue
            seq.append(v)
            if _absorber_prefix_ok(H_plus, seq, x):
                rec(seq)
            seq.pop()
            if cap is not None and len(out) >= cap:
                return

    rec([])
    return out


def _absorber_prefix_ok(H_plus: Hypergraph, seq: Sequence[int], x: int) -> bool:
    """Incremental window checks for a partial absorber sequence."""
    k = H_plus.k
    pos = len(seq)
    # windows of the bare sequence ending at the newest vertex
    if pos >= k and not H_plus.has_edge(seq[pos - k : pos]):
        return False
    # windows of the inserted sequence a_1..a_k x a_{k+1}..: the inserted
    # sequence is seq[:k] + (x,) + seq[k:]; any complete k-window ending at
    # the newest inserted position must be an edge
    ins = list(seq[:k]) + [x] + list(seq[k:]) if pos >= k else list(seq)
    if pos >= k:
        end = len(ins)
        for i in range(max(0, end - k), end - k + 1):
            w = ins[i : i + k]
            if len(w) == k and not H_plus.has_edge(w):
                return False
    return True


@dataclass(frozen=True)
class Block:
    """a(2k+ell) consecutive path vertices holding `a` absorber slots.

    Slot i (1-based) occupies offsets (2k+ell)(i-1) .. +2k-1 within seq; the
    ell vertices after each slot are spacers. bad_vertices are the ambient
    vertices no slot can absorb; the block is good when that set is small.
    """

    seq: Tuple[int, ...]
    absorber_slots: Tuple[Tuple[int, ...], ...]
    good: bool
    bad_vertices: frozenset

    def absorbs(self, H_plus: Hypergraph, x: int) -> bool:
        return any(is_absorber_for(H_plus, slot, x) for slot in self.absorber_slots)

    def lowest_absorbing_slot(self, H_plus: Hypergraph, x: int) -> int:
        """Index (0-based) of the first slot that is an x-absorber."""
        for i, slot in enumerate(self.absorber_slots):
            if is_absorber_for(H_plus, slot, x):
                return i
        raise AbsorbingError(f"block {self.seq} has no absorber slot for {x}")


def make_block(H_plus: Hypergraph, seq: Sequence[int], a: int, ell: int, good_cap: int) -> Block:
    k = H_plus.k
    unit = 2 * k + ell
    seq = tuple(seq)
    if len(seq) != a * unit:
        raise AbsorbingParamError(
            f"block needs a(2k+ell) = {a * unit} vertices, got {len(seq)}"
        )
    slots = tuple(seq[i * unit : i * unit + 2 * k] for i in range(a))
    bad = frozenset(
        x
        for x in range(H_plus.n)
        if not any(is_absorber_for(H_plus, slot, x) for slot in slots)
    )
    return Block(
        seq=seq, absorber_slots=slots, good=len(bad) <= good_cap, bad_vertices=bad
    )


@dataclass(frozen=True)
class BlockRecord:
    block: Block
    path_index: int
    offset: int  # start position of the block within its path


class AbsorbingStructure:
    """Disjoint L-paths plus the registry of good blocks found inside them."""

    __slots__ = ("host", "paths", "blocks", "sigma", "capacity", "params")

    def __init__(
        self,
        host: Hypergraph,
        paths: Sequence[TightPath],
        blocks: Sequence[BlockRecord],
        params: Mapping,
    ):
        paths = tuple(paths)
        blocks = tuple(blocks)
        seen = set()
        for P in paths:
            if seen & P.vertex_set:
                raise AbsorbingError("structure paths must be vertex-disjoint")
            seen |= P.vertex_set
        claimed = set()
        sigma: Dict[int, int] = {i: 0 for i in range(len(paths))}
        for rec in blocks:
            P = paths[rec.path_index]
            segment = P.seq[rec.offset : rec.offset + len(rec.block.seq)]
            if segment != rec.block.seq:
                raise AbsorbingError("block does not match its claimed path segment")
            vs = set(rec.block.seq)
            if claimed & vs:
                raise AbsorbingError("blocks must be vertex-disjoint")
            claimed |= vs
            sigma[rec.path_index] += 1
        object.__setattr__(self, "host", host)
        object.__setattr__(self, "paths", paths)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "capacity", len(blocks))
        object.__setattr__(self, "params", dict(params))

    def __setattr__(self, name, value):
        raise AttributeError("AbsorbingStructure is immutable")

    @property
    def vertex_set(self) -> frozenset:
        out = frozenset()
        for P in self.paths:
            out |= P.vertex_set
        return out

    def restricted_to(self, path_indices: Iterable[int]) -> "AbsorbingStructure":
        """Sub-structure on a subset of paths (capacity recomputed)."""
        keep = sorted(set(path_indices))
        remap = {old: new for new, old in enumerate(keep)}
        paths = [self.paths[i] for i in keep]
        blocks = [
            BlockRecord(rec.block, remap[rec.path_index], rec.offset)
            for rec in self.blocks
            if rec.path_index in remap
        ]
        return AbsorbingStructure(self.host, paths, blocks, self.params)

    def as_dict(self) -> dict:
        return {
            "params": dict(self.params),
            "paths": [list(P.seq) for P in self.paths],
            "blocks": [
                {
                    "path": rec.path_index,
                    "offset": rec.offset,
                    "slots": [list(s) for s in rec.block.absorber_slots],
                    "bad_vertex_count": len(rec.block.bad_vertices),
                }
                for rec in self.blocks
            ],
            "sigma": {str(i): s for i, s in sorted(self.sigma.items())},
            "capacity": self.capacity,
        }


def assigned_pfm(R: Hypergraph) -> EdgeWeighting:
    """The PFM fixed per subgraph: redistribution (registry seed 0), LP fallback.

    Exactly regular residuals shortcut to the uniform weighting, which is what
    redistribution returns there anyway (all deviations are zero).
    """
    degs = R.degrees()
    if R.m and len(set(degs)) == 1:
        return uniform_weighting(R)
    try:
        return redistribute_pfm(R, build_walk_registry(R, seed=0))
    except FractionalError:
        return pfm_lp(R)  # may raise LPInfeasibleError: treated as fatal upstream


def build_absorbing_structure(
    H_plus: Hypergraph,
    H: Hypergraph,
    params: Mapping,
    seed: int = 0,
) -> AbsorbingStructure:
    """Staged random-walk construction of an absorbing structure.

    params: L, a, ell, theta required; optional t_star, retries (default 20),
    stage_redraws (default 60). Runs ceil(theta^2 n / t_star) stages; each
    stage draws (L, omega)-walks in the unused part of H under that residual's
    assigned PFM, keeps the first self-avoiding draw, splits kept walks into
    L-paths, collects good blocks, and post-checks:
      (i)   #paths <= ceil(theta^2 n / L)
      (ii)  the residual is 2*rho-almost regular (rho measured on H)
      (iii) every ambient vertex is absorbable by >= floor(3 theta^4 n) blocks
      (iv)  every kept block has <= ceil(theta^4 n) non-absorbable vertices
    The whole construction retries with fresh randomness until the checks pass.
    """
    L = int(params["L"])
    a = int(params["a"])
    ell = int(params["ell"])
    theta = float(params["theta"])
    retries = int(params.get("retries", 20))
    stage_redraws = int(params.get("stage_redraws", 60))
    k = H_plus.k
    if H.k != k:
        raise AbsorbingParamError("uniformity mismatch between host and subgraph")
    if a < 1 or ell < 0 or L < 1 or not (0.0 <= theta <= 1.0):
        raise AbsorbingParamError(f"invalid parameters L={L}, a={a}, ell={ell}, theta={theta}")
    unit = a * (2 * k + ell)
    if unit > L:
        raise AbsorbingParamError(
            f"a block needs a(2k+ell) = {unit} vertices but paths have only L = {L}"
        )
    ids = tuple(H.parent_ids) if H.parent_ids is not None else tuple(range(H.n))
    if H_plus.induced(ids) != Hypergraph(k, H.n, H.edges):
        raise AbsorbingParamError("H must be an induced subgraph of H_plus")
    n = H.n
    rho = H.regularity_report().rho_star
    base = max(k + 1, math.ceil(n ** (1 / 3)))
    t_star = int(params.get("t_star", 0)) or L * math.ceil(base / L)
    if t_star % L:
        raise AbsorbingParamError(f"t_star = {t_star} must be a multiple of L = {L}")
    s_star = math.ceil(theta * theta * n / t_star) if theta > 0 else 0

    cap_paths = math.ceil(theta * theta * n / L)
    cap_bad = math.ceil(theta**4 * n)
    need_blocks = math.floor(3 * theta**4 * n)

    rng = random.Random(seed)
    failures: List[str] = []
    for attempt in range(1, max(1, retries) + 1):
        result = _construction_attempt(
            H_plus, ids, L, a, ell, t_star, s_star, cap_bad, stage_redraws, rng
        )
        if result is None:
            failures = ["fatal: no perfect fractional matching in a residual"]
            continue
        paths, blocks, residual_ids = result
        issues = []
        if len(paths) > cap_paths:
            issues.append(f"(i) {len(paths)} paths > cap {cap_paths}")
        if residual_ids:
            rep = H_plus.induced(residual_ids).regularity_report()
            if rep.rho_star > 2 * rho:
                issues.append(f"(ii) residual rho {float(rep.rho_star):.4f} > {float(2 * rho):.4f}")
        per_vertex = [0] * H_plus.n
        for rec in blocks:
            for x in range(H_plus.n):
                if x not in rec.block.bad_vertices:
                    per_vertex[x] += 1
        low = min(per_vertex) if per_vertex else 0
        if low < need_blocks:
            issues.append(f"(iii) some vertex is absorbable by {low} < {need_blocks} blocks")
        for rec in blocks:
            if len(rec.block.bad_vertices) > cap_bad:
                issues.append(f"(iv) a block has {len(rec.block.bad_vertices)} bad vertices > {cap_bad}")
                break
        if not issues:
            return AbsorbingStructure(
                H_plus,
                paths,
                blocks,
                {
                    "L": L,
                    "a": a,
                    "ell": ell,
                    "theta": theta,
                    "t_star": t_star,
                    "s_star": s_star,
                    "attempt": attempt,
                },
            )
        failures = issues
    raise AbsorbingFailure(
        f"absorbing structure failed post-checks after {retries} attempts: "
        + "; ".join(failures),
        item_failures=failures,
    )


def _construction_attempt(
    H_plus: Hypergraph,
    ids: Tuple[int, ...],
    L: int,
    a: int,
    ell: int,
    t_star: int,
    s_star: int,
    cap_bad: int,
    stage_redraws: int,
    rng: random.Random,
):
    """One staged pass; returns (paths, block records, residual ids) or None on
    fatal PFM failure."""
    k = H_plus.k
    unit = a * (2 * k + ell)
    residual = list(ids)
    kept_walks: List[Tuple[int, ...]] = []
    for _ in range(s_star):
        if len(residual) < t_star:
            break
        R = H_plus.induced(residual)
        try:
            pfm = assigned_pfm(R)
        except (FractionalError, LPInfeasibleError):
            return None  # fatal: every later residual is a subgraph of this one
        walk = None
        for _ in range(max(1, stage_redraws)):
            try:
                draw = sample_walk(R, pfm, L, t_star, seed=rng)
            except StuckWalkError:
                return None
            if len(set(draw)) == t_star:
                walk = draw
                break
        if walk is None:
            continue  # non-fatal: the stage adds nothing
        mapped = tuple(R.parent_ids[v] for v in walk)
        kept_walks.append(mapped)
        used = set(mapped)
        residual = [v for v in residual if v not in used]
    paths: List[TightPath] = []
    blocks: List[BlockRecord] = []
    for walk in kept_walks:
        for p in range(t_star // L):
            seq = walk[p * L : (p + 1) * L]
            path = TightPath(H_plus, seq)
            idx = len(paths)
            paths.append(path)
            for off in range(0, L - unit + 1, unit):
                blk = make_block(H_plus, seq[off : off + unit], a, ell, cap_bad)
                if blk.good:
                    blocks.append(BlockRecord(blk, idx, off))
    return paths, blocks, residual


# ---------------------------------------------------------------------------
# disjoint perfect matchings in bipartite graphs
# ---------------------------------------------------------------------------


def disjoint_perfect_matchings(adj: Sequence[Iterable[int]], count: int) -> List[Tuple[int, ...]]:
    """Up to `count` pairwise edge-disjoint perfect matchings, greedily.

    adj[i] lists the right-vertices available to left-vertex i; both sides
    have size len(adj). Repeatedly finds a perfect matching with augmenting
    paths and removes its edges. With minimum degrees d1, d2 on the two
    sides, at least ceil((d1+d2-n)/2) matchings exist; falling short of that
    is an internal error.
    """
    n = len(adj)
    live = [set(row) for row in adj]
    for i, row in enumerate(live):
        for r in row:
            if not (0 <= r < n):
                raise AbsorbingError(f"adjacency {i} -> {r} outside the right side")
    d1 = min((len(r) for r in live), default=0)
    right_deg = [0] * n
    for row in live:
        for r in row:
            right_deg[r] += 1
    d2 = min(right_deg) if n else 0
    guarantee = max(0, math.ceil((d1 + d2 - n) / 2))
    out: List[Tuple[int, ...]] = []
    while len(out) < count:
        match = _perfect_matching(live)
        if match is None:
            if len(out) < guarantee:
                raise AbsorbingError(
                    f"found only {len(out)} disjoint perfect matchings; "
                    f"the degree bound guarantees {guarantee}"
                )
            break
        out.append(tuple(match))
        for i, r in enumerate(match):
            live[i].discard(r)
    return out


def _perfect_matching(adj: Sequence[set]) -> Optional[List[int]]:
    """Kuhn's augmenting-path matching; returns left->right or None."""
    n = len(adj)
    match_right = [-1] * n

    def try_augment(i: int, seen: List[bool]) -> bool:
        for r in adj[i]:
            if not seen[r]:
                seen[r] = True
                if match_right[r] == -1 or try_augment(match_right[r], seen):
                    match_right[r] = i
                    return True
        return False

    for i in range(n):
        if not try_augment(i, [False] * n):
            return None
    out = [-1] * n
    for r, i in enumerate(match_right):
        out[i] = r
    return out


# ---------------------------------------------------------------------------
# absorption
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AbsorptionResult:
    paths: Tuple[TightPath, ...]
    phi: Dict[int, TightPath]  # input path index -> absorbed path
    assignment: Dict[int, Tuple[int, int]]  # x -> (path index, insert position)

    def __iter__(self):
        return iter(self.paths)


def absorb(S: AbsorbingStructure, X: Iterable[int], seed: int = 0) -> AbsorptionResult:
    """Insert every x in X into a block of S via a random perfect matching.

    Requires |X| = S.capacity and X disjoint from the structure's paths. The
    X-to-block assignment is a perfect matching in the graph "x can be
    absorbed by block B", drawn uniformly from a family of edge-disjoint
    perfect matchings; each x lands in its block's lowest-index absorbing
    slot, after that slot's k-th vertex.
    """
    H_plus = S.host
    xs = sorted(set(X))
    for x in xs:
        H_plus._check_vertex(x)
    if len(xs) != S.capacity:
        raise AbsorptionInfeasible(
            f"|X| = {len(xs)} but the structure's capacity is {S.capacity}",
            unmatched=xs,
        )
    overlap = set(xs) & S.vertex_set
    if overlap:
        raise AbsorptionInfeasible(
            f"X intersects the structure's paths at {sorted(overlap)}",
            unmatched=sorted(overlap),
        )
    if not xs:
        return AbsorptionResult(paths=S.paths, phi=dict(enumerate(S.paths)), assignment={})
    adj = []
    for x in xs:
        row = {
            j for j, rec in enumerate(S.blocks) if rec.block.absorbs(H_plus, x)
        }
        if not row:
            raise AbsorptionInfeasible(
                f"vertex {x} is absorbable by no block", unmatched=[x]
            )
        adj.append(row)
    d1 = min(len(r) for r in adj)
    bdeg = [0] * len(S.blocks)
    for row in adj:
        for j in row:
            bdeg[j] += 1
    d2 = min(bdeg)
    want = max(1, math.ceil((d1 + d2 - len(xs)) / 2))
    matchings = disjoint_perfect_matchings(adj, want)
    if not matchings:
        raise AbsorptionInfeasible(
            "no perfect matching between X and the blocks", unmatched=xs
        )
    rng = random.Random(seed)
    chosen = matchings[rng.randrange(len(matchings))]
    per_path: Dict[int, List[Tuple[int, int]]] = {}
    assignment: Dict[int, Tuple[int, int]] = {}
    for xi, j in enumerate(chosen):
        x = xs[xi]
        rec = S.blocks[j]
        slot_i = rec.block.lowest_absorbing_slot(H_plus, x)
        pos = rec.offset + slot_i * (2 * H_plus.k + S.params["ell"]) + H_plus.k
        per_path.setdefault(rec.path_index, []).append((pos, x))
        assignment[x] = (rec.path_index, pos)
    phi: Dict[int, TightPath] = {}
    new_paths: List[TightPath] = []
    for i, P in enumerate(S.paths):
        seq = list(P.seq)
        for pos, x in sorted(per_path.get(i, ()), reverse=True):
            seq.insert(pos, x)
        Q = TightPath(H_plus, seq)  # validates tightness of the spliced path
        if len(Q) != len(P) + S.sigma[i]:
            raise AbsorbingError("absorbed path has the wrong number of vertices")
        if len(P) >= H_plus.k and Q.ordered_end_edges() != P.ordered_end_edges():
            raise AbsorbingError("absorption changed an ordered end-edge")
        phi[i] = Q
        new_paths.append(Q)
    return AbsorptionResult(paths=tuple(new_paths), phi=phi, assignment=assignment)

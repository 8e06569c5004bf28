"""Extraction lemmas and the three-colour pipeline.

Contains the probabilistic-deletion independent set extractor for sparse
3-uniform hypergraphs, the two-coloured-clique extractor for rainbow-free
3-colourings, an exact search for cliques using at most three of four
colours, the oracle for the threshold F(t) (the least n forcing every
4-colouring to contain a red/blue/green rainbow triangle or a t-clique with
at most 3 colours), and the staged pipeline that turns a 3-colouring of the
complete 3-uniform hypergraph into a verified monochromatic hedgehog.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import finder, verifiers
from .core import (
    CliqueWitness,
    CompleteColouring,
    GuaranteeViolated,
    HedgehogEmbedding,
    InvalidArgument,
    StagedFailure,
    ToolkitError,
    binomial_column,
    graph_colour_matrix,
    iter_subset_blocks,
    pair_arrays,
    pair_colour_counts,
)

RBG = (0, 1, 2)
YELLOW = 3


# ---------------------------------------------------------------------------
# exact maximum clique (bitset branch and bound with greedy colouring bound)


def max_clique(adj: list[int], n: int) -> list[int]:
    """Exact maximum clique of the graph given by adjacency bitmasks."""
    best: list[int] = []
    if n == 0:
        return best

    # warm start: greedy clique through vertices by descending degree
    by_degree = sorted(range(n), key=lambda v: -bin(adj[v]).count("1"))
    mask = 0
    for v in by_degree:
        if adj[v] & mask == mask:
            mask |= 1 << v
            best.append(v)

    current: list[int] = []

    def expand(cand: int):
        nonlocal best
        order: list[int] = []
        bounds: list[int] = []
        colour = 0
        p = cand
        while p:
            colour += 1
            avail = p
            while avail:
                v = (avail & -avail).bit_length() - 1
                avail &= ~(1 << v)
                avail &= ~adj[v]
                p &= ~(1 << v)
                order.append(v)
                bounds.append(colour)
        prefix = cand
        for i in range(len(order) - 1, -1, -1):
            if len(current) + bounds[i] <= len(best):
                return
            v = order[i]
            prefix &= ~(1 << v)
            current.append(v)
            nxt = prefix & adj[v]
            if nxt:
                expand(nxt)
            elif len(current) > len(best):
                best = current.copy()
            current.pop()

    expand((1 << n) - 1)
    return sorted(best)


def union_adjacency(col: CompleteColouring, colours) -> list[int]:
    """Adjacency bitmasks of the graph formed by edges whose colour lies in
    the given set."""
    if col.k != 2:
        raise InvalidArgument("union_adjacency needs a k=2 colouring")
    wanted = set(colours)
    n = col.n
    a, b = pair_arrays(n)
    adj = [0] * n
    cols = col.colours
    for r in range(len(cols)):
        if int(cols[r]) in wanted:
            u, v = int(a[r]), int(b[r])
            adj[u] |= 1 << v
            adj[v] |= 1 << u
    return adj


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class TriangleHypergraph:
    """3-uniform hypergraph whose edges are the triangles of an auxiliary
    labelling that carry all three of red, blue and green (possibly with two
    of them on one edge)."""

    n: int
    edges: np.ndarray  # (m, 3) int32, rows sorted

    def __post_init__(self):
        arr = np.asarray(self.edges, dtype=np.int32).reshape(-1, 3)
        arr = np.sort(arr, axis=1)
        arr.setflags(write=False)
        object.__setattr__(self, "edges", arr)

    @classmethod
    def from_edge_list(cls, n: int, edges) -> "TriangleHypergraph":
        rows = [tuple(sorted(e)) for e in edges]
        for row in rows:
            if len(set(row)) != 3 or not all(0 <= v < n for v in row):
                raise InvalidArgument(f"bad edge {row}")
        return cls(n=n, edges=np.array(rows, dtype=np.int32).reshape(-1, 3))

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])


@dataclass(frozen=True)
class GallaiColouring:
    """A 3-colouring of a complete graph with a flag recording that the exact
    no-rainbow-triangle check passed."""

    colouring: CompleteColouring
    verified: bool


def verify_gallai(col: CompleteColouring) -> GallaiColouring:
    if col.k != 2 or col.q != 3:
        raise InvalidArgument("a Gallai colouring here is a k=2, q=3 colouring")
    tri = verifiers.rainbow_triangle_free(col, RBG)
    return GallaiColouring(colouring=col, verified=tri is None)


@dataclass(frozen=True)
class FWitness:
    """A 4-colouring certifying F(t) > n: rainbow-free in red/blue/green and
    with no t-clique using at most 3 colours.  Both flags come from exact
    checks."""

    t: int
    colouring: CompleteColouring
    rainbow_free: bool
    no_small_palette_clique: bool

    @property
    def valid(self) -> bool:
        return self.rainbow_free and self.no_small_palette_clique


def verify_f_witness(col: CompleteColouring, t: int) -> FWitness:
    if col.k != 2 or col.q != 4:
        raise InvalidArgument("an F-witness is a k=2, q=4 colouring")
    rainbow_ok = verifiers.rainbow_triangle_free(col, RBG) is None
    bad_clique = three_colour_clique_search(col, t)
    return FWitness(
        t=t,
        colouring=col,
        rainbow_free=rainbow_ok,
        no_small_palette_clique=bad_clique is None,
    )


# ---------------------------------------------------------------------------
# independent sets in sparse 3-uniform hypergraphs

SPENCER_CONSTANT = 2.0 / (3.0 * math.sqrt(3.0))


def spencer_guarantee(n: int, e: int) -> int:
    """Independent-set size the extractor promises.

    All of [n] when e = 0; otherwise the better of the full-set deletion
    bound n - e and, in the random regime 3e > n (where the keep-probability
    sqrt(n/(3e)) is genuinely below 1), floor(c * n^1.5 / sqrt(e)) with
    c = 2/(3*sqrt(3)).  The two branches agree at 3e = n; outside its regime
    the second expression can exceed n and promises nothing."""
    if e == 0:
        return n
    term = int(SPENCER_CONSTANT * n**1.5 / math.sqrt(e)) if 3 * e > n else 0
    return max(n - e, term)


def spencer_independent_set(
    hypergraph: TriangleHypergraph, seed: int, trials: int = 8
) -> list[int]:
    """Probabilistic deletion: keep each vertex with probability
    p = min(1, sqrt(n/(3e))), drop one vertex from every surviving edge, then
    add back any vertex that stays independent.  Takes the best of a
    deterministic full-set pass plus `trials` seeded random passes, so the
    returned set always meets spencer_guarantee; independence is exact.
    """
    n = hypergraph.n
    edges = [tuple(int(v) for v in row) for row in hypergraph.edges]
    e = len(edges)
    if e == 0:
        return list(range(n))
    p = min(1.0, math.sqrt(n / (3.0 * e)))
    incident: list[list[int]] = [[] for _ in range(n)]
    for i, (x, y, z) in enumerate(edges):
        incident[x].append(i)
        incident[y].append(i)
        incident[z].append(i)

    rng = np.random.default_rng(seed)
    best: set[int] = set()
    for trial in range(trials + 1):
        if trial == 0:
            alive = set(range(n))
        else:
            alive = set(np.flatnonzero(rng.random(n) < p).tolist())
        dirty = True
        while dirty:
            dirty = False
            for x, y, z in edges:
                if x in alive and y in alive and z in alive:
                    alive.discard(z)  # rows sorted: z is the largest vertex
                    dirty = True
        for v in range(n):
            if v in alive:
                continue
            blocked = False
            for i in incident[v]:
                others = [u for u in edges[i] if u != v]
                if others[0] in alive and others[1] in alive:
                    blocked = True
                    break
            if not blocked:
                alive.add(v)
        if len(alive) > len(best):
            best = alive

    for x, y, z in edges:
        if x in best and y in best and z in best:
            raise ToolkitError("deletion produced a dependent set")
    return sorted(best)


# ---------------------------------------------------------------------------
# two-coloured cliques in Gallai colourings


def ceil_cuberoot(n: int) -> int:
    s = max(1, round(n ** (1.0 / 3.0)))
    while s**3 < n:
        s += 1
    while s > 1 and (s - 1) ** 3 >= n:
        s -= 1
    return s


def gallai_two_coloured_clique(g: GallaiColouring) -> CliqueWitness:
    """Largest clique using at most two of the three colours, by exact
    branch-and-bound over the three colour-pair union graphs.

    Any rainbow-free 3-colouring of a complete graph on n vertices contains
    such a clique of order n^(1/3); that floor is asserted per instance, and
    falling short raises GuaranteeViolated (a bug-or-discovery signal, never
    swallowed).
    """
    if not g.verified:
        raise InvalidArgument("input colouring lacks a verified rainbow-free flag")
    col = g.colouring
    n = col.n
    best: list[int] = []
    for pair in combinations(RBG, 2):
        clique = max_clique(union_adjacency(col, pair), n)
        if len(clique) > len(best):
            best = clique
    census = {
        col.colour_of((u, v)) for u, v in combinations(sorted(best), 2)
    }
    witness = CliqueWitness(tuple(sorted(best)), frozenset(census))
    target = ceil_cuberoot(n)
    if witness.size < target:
        raise GuaranteeViolated(
            f"largest two-coloured clique has size {witness.size} < {target}",
            witness=col,
        )
    if len(census) > 2:
        raise ToolkitError("union-graph clique acquired a third colour")
    return witness


# ---------------------------------------------------------------------------
# cliques with at most three of four colours


def three_colour_clique_search(
    col: CompleteColouring, s: int
) -> CliqueWitness | None:
    """Exact backtracking search for an s-vertex set whose internal edges use
    at most 3 distinct colours.  Branches on vertices in increasing order,
    prunes on the colour census and on running out of vertices; a None
    answer is exhaustive."""
    if col.k != 2:
        raise InvalidArgument("clique search needs a k=2 colouring")
    if s < 1:
        raise InvalidArgument("clique size must be positive")
    n = col.n
    if s > n:
        return None
    if s == 1:
        return CliqueWitness((0,), frozenset())
    mat = graph_colour_matrix(col)
    members: list[int] = []

    def rec(census: int, start: int) -> CliqueWitness | None:
        if len(members) == s:
            return CliqueWitness(
                tuple(members),
                frozenset(c for c in range(col.q) if census >> c & 1),
            )
        for v in range(start, n - (s - len(members)) + 1):
            cen = census
            for u in members:
                cen |= 1 << mat[u][v]
            if cen.bit_count() > 3:
                continue
            members.append(v)
            found = rec(cen, v + 1)
            members.pop()
            if found is not None:
                return found
        return None

    return rec(0, 0)


# ---------------------------------------------------------------------------
# the F(t) oracle


class _BudgetExceeded(Exception):
    pass


def _search_f_witness_exhaustive(t: int, n: int, node_budget: int):
    """Decide whether a 4-colouring of K_n with no red/blue/green rainbow
    triangle and no t-clique on <= 3 colours exists, by backtracking over
    edges in colex order.

    Enumeration is exhaustive up to permutations of {red, blue, green}: the
    first occurrences of those colours are forced to appear in index order,
    which is sound because both constraints are invariant under permuting
    them (yellow is distinguished).  Returns (status, witness) with status
    one of "found", "none", "budget".
    """
    pairs = [(a, b) for b in range(n) for a in range(b)]
    mat = [[0] * n for _ in range(n)]
    nodes = 0

    def rec(idx: int, rbg_used: int):
        nonlocal nodes
        if idx == len(pairs):
            return []
        nodes += 1
        if nodes > node_budget:
            raise _BudgetExceeded
        a, b = pairs[idx]
        for c in [*range(min(rbg_used + 1, 3)), YELLOW]:
            ok = True
            for x in range(a):
                if {mat[x][a], mat[x][b], c} == {0, 1, 2}:
                    ok = False
                    break
            if ok and a >= t - 2:
                for rest in combinations(range(a), t - 2):
                    census = 1 << c
                    for u, v in combinations(rest + (a, b), 2):
                        if (u, v) != (a, b):
                            census |= 1 << mat[u][v]
                    if census.bit_count() <= 3:
                        ok = False
                        break
            if not ok:
                continue
            mat[a][b] = mat[b][a] = c
            tail = rec(idx + 1, rbg_used + (1 if c == rbg_used and c < 3 else 0))
            if tail is not None:
                return [c] + tail
        return None

    try:
        assignment = rec(0, 0)
    except _BudgetExceeded:
        return "budget", None
    if assignment is None:
        return "none", None
    col = CompleteColouring(n, 2, 4, np.array(assignment, dtype=np.uint8))
    witness = verify_f_witness(col, t)
    if not witness.valid:
        raise ToolkitError("exhaustive search produced an invalid witness")
    return "found", col


def _violation_count_at(mat, n: int, t: int, u: int, v: int) -> int:
    """Rainbow triangles plus bad t-cliques through the edge {u, v}."""
    bad = 0
    others = [w for w in range(n) if w not in (u, v)]
    for w in others:
        if {mat[u][v], mat[u][w], mat[v][w]} == {0, 1, 2}:
            bad += 1
    for rest in combinations(others, t - 2):
        census = 0
        for x, y in combinations(rest + (u, v), 2):
            census |= 1 << mat[x][y]
        if census.bit_count() <= 3:
            bad += 1
    return bad


def _search_f_witness_local(
    t: int, n: int, seed: int, restarts: int = 8, steps: int = 4000
):
    """Seeded local search for an F(t) > n witness: greedily recolour edges
    of violated structures; success is certified by the exact checks."""
    rng = random.Random(seed)
    for _ in range(restarts):
        mat = [[0] * n for _ in range(n)]
        for b in range(n):
            for a in range(b):
                mat[a][b] = mat[b][a] = rng.randrange(4)

        def total_violations() -> list[tuple[int, int]]:
            bad_edges = []
            for u, v in combinations(range(n), 2):
                if _violation_count_at(mat, n, t, u, v):
                    bad_edges.append((u, v))
            return bad_edges

        for _ in range(steps):
            bad = total_violations()
            if not bad:
                break
            u, v = bad[rng.randrange(len(bad))]
            if rng.random() < 0.1:
                mat[u][v] = mat[v][u] = rng.randrange(4)
                continue
            base = mat[u][v]
            best_c, best_score = base, _violation_count_at(mat, n, t, u, v)
            order = [c for c in range(4) if c != base]
            rng.shuffle(order)
            for c in order:
                mat[u][v] = mat[v][u] = c
                score = _violation_count_at(mat, n, t, u, v)
                if score < best_score:
                    best_c, best_score = c, score
            mat[u][v] = mat[v][u] = best_c
        else:
            continue
        colours = np.array(
            [mat[a][b] for b in range(n) for a in range(b)], dtype=np.uint8
        )
        col = CompleteColouring(n, 2, 4, colours)
        if verify_f_witness(col, t).valid:
            return col
    return None


@dataclass
class FOracleResult:
    t: int
    cap: int
    value: int | None  # F(t) when decided exactly
    lower_bound: int  # F(t) >= lower_bound, certified by witnesses
    statuses: dict[int, str]
    witnesses: dict[int, CompleteColouring] = field(default_factory=dict)
    mode: str = "auto"

    def __str__(self):
        if self.value is not None:
            return f"F({self.t}) = {self.value}"
        return f"F({self.t}) >= {self.lower_bound} (cap {self.cap})"


def f_oracle(
    t: int,
    n_cap: int,
    mode: str = "auto",
    seed: int = 0,
    node_budget: int = 2_000_000,
    exhaustive_cap: int = 8,
    restarts: int = 8,
    steps: int = 4000,
) -> FOracleResult:
    """Compute F(t) exactly when feasible, else certify a lower bound.

    Witness existence is monotone decreasing in n (restricting a witness
    stays a witness), so the scan stops at the first n with provably no
    witness; that n equals F(t) exactly when every smaller n produced one.
    Exhaustive decisions run for n <= exhaustive_cap under a node budget;
    "witness" mode only ever certifies lower bounds.
    """
    if t < 2:
        raise InvalidArgument("t must be at least 2")
    if mode not in ("auto", "exhaustive", "witness"):
        raise InvalidArgument(f"unknown mode {mode!r}")
    statuses: dict[int, str] = {}
    witnesses: dict[int, CompleteColouring] = {}
    value = None
    lower = 2
    all_below_witnessed = True
    for n in range(2, n_cap + 1):
        if n < t:
            # all-yellow has no rainbow triangle and no t-clique at all
            col = CompleteColouring(
                n, 2, 4, np.full(math.comb(n, 2), YELLOW, dtype=np.uint8)
            )
            statuses[n] = "found"
            witnesses[n] = col
            lower = n + 1
            continue
        status = "unknown"
        witness = None
        if mode in ("auto", "exhaustive") and n <= exhaustive_cap:
            status, witness = _search_f_witness_exhaustive(t, n, node_budget)
        elif mode in ("auto", "witness"):
            witness = _search_f_witness_local(t, n, seed, restarts, steps)
            status = "found" if witness is not None else "unknown"
        statuses[n] = status
        if status == "found":
            witnesses[n] = witness
            lower = n + 1
        elif status == "none":
            if all_below_witnessed:
                value = n
            break
        else:
            all_below_witnessed = False
    return FOracleResult(
        t=t,
        cap=n_cap,
        value=value,
        lower_bound=lower,
        statuses=statuses,
        witnesses=witnesses,
        mode=mode,
    )


# ---------------------------------------------------------------------------
# three-colour pipeline


def triangle_count_bounds(t: int, n: int) -> tuple[int, int | None]:
    """Upper bounds on the number of label-triangles carrying all of red,
    blue and green: always 3*(C(t,2)+t)*C(n,2), and t^2*n^2 once t >= 3."""
    theta = finder.pair_threshold(t)
    loose = 3 * theta * math.comb(n, 2)
    return loose, (t * t * n * n if t >= 3 else None)


def rbg_label_hypergraph(
    aux: finder.AuxiliaryGraphColouring,
) -> TriangleHypergraph:
    """Triangles whose three label sets jointly cover red, blue and green."""
    n = aux.n
    labels = aux.labels
    c2 = binomial_column(2)
    rows = []
    for _, (a, b, c) in iter_subset_blocks(n, 3):
        union = labels[c2[b] + a] | labels[c2[c] + a] | labels[c2[c] + b]
        hit = (union & 0b111) == 0b111
        if hit.any():
            rows.append(
                np.stack([a[hit], b[hit], c[hit]], axis=1).astype(np.int32)
            )
    edges = (
        np.concatenate(rows, axis=0) if rows else np.empty((0, 3), dtype=np.int32)
    )
    return TriangleHypergraph(n=n, edges=edges)


@dataclass
class PipelineTrace:
    stages: list[tuple[str, dict]] = field(default_factory=list)

    def add(self, name: str, **info):
        self.stages.append((name, info))

    def to_text(self) -> str:
        lines = ["PIPELINE-TRACE v1"]
        for name, info in self.stages:
            detail = " ".join(f"{k}={v}" for k, v in sorted(info.items()))
            lines.append(f"stage {name} {detail}".rstrip())
        return "\n".join(lines) + "\n"


def _restrict_graph(
    mat_colour, vertices: list[int], q: int
) -> CompleteColouring:
    m = len(vertices)
    colours = np.array(
        [mat_colour(vertices[a], vertices[b]) for b in range(m) for a in range(b)],
        dtype=np.uint8,
    )
    return CompleteColouring(m, 2, q, colours)


def three_colour_pipeline(
    colouring: CompleteColouring,
    t: int,
    seed: int,
    clique_target: int | None = None,
    gallai_target: int | None = None,
    spencer_trials: int = 8,
) -> tuple[HedgehogEmbedding, PipelineTrace]:
    """Monochromatic hedgehog from a 3-coloured complete 3-uniform
    hypergraph, via auxiliary labels, a sparse-triangle independent set, and
    clique extraction.

    At the asymptotic scale every stage is guaranteed; at desk scale the
    stage targets are parameters (clique_target defaults to t^3,
    gallai_target to t) and any stage that falls short raises StagedFailure
    naming itself and carrying its counterexample object.  Every embedding
    returned has been verified against the input colouring.
    """
    if colouring.k != 3 or colouring.q != 3:
        raise InvalidArgument("pipeline expects a 3-coloured k=3 colouring")
    n = colouring.n
    if clique_target is None:
        clique_target = t**3
    if gallai_target is None:
        gallai_target = t
    if clique_target < t:
        raise InvalidArgument("clique_target below body size t")
    trace = PipelineTrace()

    # stage 1: label the graph edges by scarce triple colours, yellow = none
    theta = finder.pair_threshold(t)
    counts = pair_colour_counts(colouring)
    labels = finder.label_pairs(counts, theta)
    aux = finder.AuxiliaryGraphColouring(
        n=n, t=t, q=3, theta=theta, labels=labels, counts=counts
    )
    sizes = np.bincount(
        np.array([int(m).bit_count() for m in labels.tolist()]), minlength=4
    )
    trace.add(
        "aux-labels",
        theta=theta,
        yellow=int(sizes[0]),
        single=int(sizes[1]),
        double=int(sizes[2]),
        triple=int(sizes[3]) if len(sizes) > 3 else 0,
    )

    # stage 2: triangles carrying all three labels form a sparse hypergraph
    hyper = rbg_label_hypergraph(aux)
    loose, tight = triangle_count_bounds(t, n)
    if hyper.edge_count > loose or (tight is not None and hyper.edge_count > tight):
        raise StagedFailure(
            "triangle-bound",
            f"{hyper.edge_count} label triangles exceed the counting bound",
            witness=hyper,
        )
    trace.add("triangle-hypergraph", edges=hyper.edge_count, loose_bound=loose)

    # stage 3: independent set avoiding all such triangles
    u_set = spencer_independent_set(hyper, seed, trials=spencer_trials)
    trace.add("independent-set", size=len(u_set))

    # stage 4: doubly-labelled edges inside U; a high-degree vertex gives an
    # immediate hedgehog in the colour its label pair excludes
    mat_label: dict[tuple[int, int], int] = {}
    u_index = {v: i for i, v in enumerate(u_set)}
    degree = [0] * len(u_set)
    neighbours: list[list[int]] = [[] for _ in u_set]
    for i, u in enumerate(u_set):
        for j in range(i + 1, len(u_set)):
            v = u_set[j]
            mask = int(labels[math.comb(v, 2) + u])
            mat_label[(u, v)] = mask
            if mask.bit_count() == 2:
                degree[i] += 1
                degree[j] += 1
                neighbours[i].append(v)
                neighbours[j].append(u)
    heavy = next((i for i in range(len(u_set)) if degree[i] >= t), None)
    if heavy is not None:
        u = u_set[heavy]
        masks = {mat_label[tuple(sorted((u, v)))] for v in neighbours[heavy]}
        if len(masks) != 1:
            raise StagedFailure(
                "double-label-degree",
                f"vertex {u} has doubly-labelled edges with different label pairs",
                witness=(u, sorted(masks)),
            )
        pair_mask = masks.pop()
        excluded = next(c for c in RBG if not pair_mask >> c & 1)
        body = sorted(neighbours[heavy])[:t]
        for x, y in combinations(body, 2):
            if mat_label[(x, y)] >> excluded & 1:
                raise StagedFailure(
                    "double-label-degree",
                    f"neighbourhood pair {(x, y)} carries the excluded label",
                    witness=(x, y),
                )
        emb = finder.embed_spines(colouring, body, excluded)
        problem = verifiers.verify_embedding(emb, colouring)
        if problem is not None:
            raise ToolkitError(f"pipeline produced an invalid embedding: {problem}")
        trace.add("double-label-degree", short_circuit=u, colour=excluded)
        return emb, trace
    trace.add("double-label-degree", max_degree=max(degree, default=0))

    # stage 5: peel U to a set V with no doubly-labelled edges
    v_set: list[int] = []
    dropped: set[int] = set()
    for i, u in enumerate(u_set):
        if u in dropped:
            continue
        v_set.append(u)
        dropped.update(neighbours[i])
    trace.add("peel", size=len(v_set))

    # stage 6: on V every edge has at most one label; colour unlabelled
    # edges yellow and look for a clique with at most three colours
    def single_label_colour(x: int, y: int) -> int:
        mask = mat_label[tuple(sorted((x, y)))]
        return YELLOW if mask == 0 else (mask & -mask).bit_length() - 1

    if clique_target > len(v_set):
        raise StagedFailure(
            "three-colour-clique",
            f"peeled set of {len(v_set)} cannot hold a clique of {clique_target}",
            witness=trace,
        )
    chi_v = _restrict_graph(single_label_colour, v_set, 4)
    witness = three_colour_clique_search(chi_v, clique_target)
    if witness is None:
        raise StagedFailure(
            "three-colour-clique",
            f"no {clique_target}-clique with at most 3 colours in the peeled set",
            witness=chi_v,
        )
    missing = min(set(range(4)) - set(witness.colours))
    w_set = [v_set[i] for i in witness.vertices]
    trace.add(
        "three-colour-clique",
        size=len(w_set),
        colours=sorted(witness.colours),
        missing=missing,
    )

    if missing != YELLOW:
        body = w_set[:t]
        emb = finder.embed_spines(colouring, body, missing)
    else:
        # stage 7: all labels on W are single and in {red, blue, green}; the
        # restriction is rainbow-free, so extract a two-coloured clique and
        # embed in its missing colour
        chi_w = _restrict_graph(single_label_colour, w_set, 3)
        gallai = verify_gallai(chi_w)
        if not gallai.verified:
            raise StagedFailure(
                "gallai-clique",
                "restriction to the clique is not rainbow-free",
                witness=chi_w,
            )
        two_col = gallai_two_coloured_clique(gallai)
        if two_col.size < gallai_target:
            raise StagedFailure(
                "gallai-clique",
                f"two-coloured clique of {two_col.size} below target {gallai_target}",
                witness=two_col,
            )
        colour = min(set(RBG) - set(two_col.colours))
        body = [w_set[i] for i in two_col.vertices][:t]
        emb = finder.embed_spines(colouring, body, colour)
        trace.add("gallai-clique", size=two_col.size, colour=colour)

    problem = verifiers.verify_embedding(emb, colouring)
    if problem is not None:
        raise ToolkitError(f"pipeline produced an invalid embedding: {problem}")
    trace.add("embed", colour=emb.colour, body=",".join(map(str, emb.body)))
    return emb, trace

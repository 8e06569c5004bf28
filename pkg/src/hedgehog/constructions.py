"""Lower-bound colouring generators and lifts.

Random colourings, the scattered-clique search (every t-clique shows all q
colours), and the four ways of lifting graph or triple colourings to higher
uniformity: the missing-colour complement lift, the monochromatic-triangle
quad lift, the colour-set quad lift, and lexicographic products.  All
randomness is seeded and every search returns a SearchReport alongside its
result, so certificates are reproducible.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import extractors, verifiers
from .core import (
    BLUE,
    CompleteColouring,
    GREEN,
    InfeasibleSpec,
    InvalidArgument,
    PreconditionViolated,
    RED,
    SearchReport,
    ToolkitError,
    YELLOW,
    binomial_column,
    iter_subset_blocks,
    pair_arrays,
)


def random_colouring(n: int, k: int, q: int, seed: int) -> CompleteColouring:
    """Each edge i.i.d. uniform on [0, q) from a PCG64 stream; a fixed seed
    gives a byte-identical colouring on every run."""
    if q < 1:
        raise InvalidArgument("need at least one colour")
    rng = np.random.default_rng(seed)
    colours = rng.integers(0, q, size=math.comb(n, k), dtype=np.uint8)
    return CompleteColouring(n=n, k=k, q=q, colours=colours)


# ---------------------------------------------------------------------------
# scattered colourings: every t-clique contains all q colours


@dataclass(frozen=True)
class ScatteredColouringSpec:
    n: int
    t: int
    q: int
    seed: int
    max_tries: int = 20
    search_mode: str = "local-search"  # or "rejection"
    max_steps: int = 20000


def _avoidance_adjacency(cols: list[int], n: int, colour: int) -> list[int]:
    """Bitmask adjacency of the graph whose edges avoid the given colour."""
    adj = [0] * n
    idx = 0
    for b in range(n):
        for a in range(b):
            if cols[idx] != colour:
                adj[a] |= 1 << b
                adj[b] |= 1 << a
            idx += 1
    return adj


def _find_clique_of_size(adj: list[int], n: int, t: int) -> list[int] | None:
    """First t-clique in vertex order, or None (exhaustive)."""

    def rec(members: list[int], cand: int) -> list[int] | None:
        if len(members) == t:
            return members.copy()
        while cand:
            v = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            if len(members) + 1 + bin(cand & adj[v]).count("1") >= t:
                members.append(v)
                got = rec(members, cand & adj[v])
                members.pop()
                if got is not None:
                    return got
            if len(members) + bin(cand).count("1") < t:
                return None
        return None

    return rec([], (1 << n) - 1)


def deficient_clique(
    cols: list[int], n: int, t: int, q: int
) -> tuple[int, list[int]] | None:
    """A t-clique missing some colour, as (missing colour, clique), or None.
    Scans colours in index order and cliques in lexicographic order, so the
    outcome is deterministic."""
    for colour in range(q):
        adj = _avoidance_adjacency(cols, n, colour)
        clique = _find_clique_of_size(adj, n, t)
        if clique is not None:
            return colour, clique
    return None


def _block_seed(rng: random.Random, n: int, t: int, q: int) -> list[int]:
    """Structured restart state: one random partition of the vertices into
    t-1 near-equal blocks per colour; a pair takes a random colour among the
    partitions placing both ends in one block (scattered colourings are
    near-unions of such clique partitions)."""
    blocks_of = []
    parts = max(1, t - 1)
    for _ in range(q):
        verts = list(range(n))
        rng.shuffle(verts)
        assign = [0] * n
        for i, v in enumerate(verts):
            assign[v] = i % parts
        blocks_of.append(assign)
    cols = []
    for b in range(n):
        for a in range(b):
            options = [c for c in range(q) if blocks_of[c][a] == blocks_of[c][b]]
            cols.append(
                options[rng.randrange(len(options))] if options else rng.randrange(q)
            )
    return cols


def _move_delta(
    cols: list[int],
    rank_of_pair: dict[tuple[int, int], int],
    n: int,
    t: int,
    u: int,
    v: int,
    new_colour: int,
    sample_cap: int,
    rng: random.Random,
) -> int:
    """Deficiencies created minus removed among t-cliques through {u, v} if
    that edge is recoloured: cliques where the old colour appeared only here
    become deficient, cliques missing the new colour stop being so."""
    old = cols[rank_of_pair[(u, v)]]
    others = [w for w in range(n) if w not in (u, v)]
    subsets = list(combinations(others, t - 2))
    if len(subsets) > sample_cap:
        subsets = [subsets[rng.randrange(len(subsets))] for _ in range(sample_cap)]
    delta = 0
    for rest in subsets:
        members = rest + (u, v)
        old_count = 0
        new_count = 0
        for x, y in combinations(sorted(members), 2):
            c = cols[rank_of_pair[(x, y)]]
            if c == old:
                old_count += 1
            if c == new_colour:
                new_count += 1
        if old_count == 1:
            delta += 1
        if new_count == 0:
            delta -= 1
    return delta


def find_scattered_colouring(
    spec: ScatteredColouringSpec,
) -> tuple[CompleteColouring | None, SearchReport]:
    """Search for a graph colouring in which every t-clique sees all q
    colours.  Rejection mode draws fresh random colourings; local-search
    mode repairs a deficient clique per step by recolouring one of its edges
    to the missing colour (preferring edges whose colour is plentiful inside
    the clique), with seeded restarts.  Exhaustion is an outcome, not an
    error; any returned colouring has passed the independent exact check.
    """
    if math.comb(spec.t, 2) < spec.q:
        raise InfeasibleSpec(
            f"a {spec.t}-clique has {math.comb(spec.t, 2)} edges, fewer than q={spec.q}"
        )
    if spec.search_mode not in ("local-search", "rejection"):
        raise InvalidArgument(f"unknown search mode {spec.search_mode!r}")
    if spec.t > spec.n:
        raise InvalidArgument("t-cliques need t <= n")
    n, t, q = spec.n, spec.t, spec.q
    m = math.comb(n, 2)
    rng = random.Random(spec.seed)
    report = SearchReport(
        operation="find-scattered-colouring",
        seed=spec.seed,
        outcome="exhausted",
        params={
            "n": n,
            "t": t,
            "q": q,
            "mode": spec.search_mode,
            "max_tries": spec.max_tries,
        },
    )

    def finish(cols: list[int]) -> CompleteColouring:
        found = CompleteColouring(n, 2, q, np.array(cols, dtype=np.uint8))
        check = verifiers.every_clique_all_colours(found, t, q)
        if check is not None:
            raise ToolkitError(f"search returned a deficient colouring: {check}")
        report.outcome = "found"
        return found

    pair_of_rank = [(a, b) for b in range(n) for a in range(b)]
    rank_of_pair = {p: i for i, p in enumerate(pair_of_rank)}
    lookahead_cap = 600

    for attempt in range(spec.max_tries):
        report.tries = attempt + 1
        if spec.search_mode == "rejection":
            cols = [rng.randrange(q) for _ in range(m)]
            if deficient_clique(cols, n, t, q) is None:
                return finish(cols), report
            continue
        # alternate structured and uniform restarts
        cols = (
            _block_seed(rng, n, t, q)
            if attempt % 2 == 0
            else [rng.randrange(q) for _ in range(m)]
        )
        for _ in range(spec.max_steps):
            report.steps += 1
            bad = deficient_clique(cols, n, t, q)
            if bad is None:
                return finish(cols), report
            missing, clique = bad
            inside = list(combinations(sorted(clique), 2))
            if rng.random() < 0.08:
                u, v = inside[rng.randrange(len(inside))]
                cols[rank_of_pair[(u, v)]] = missing
                continue
            best_pair = None
            best_delta = None
            order = inside.copy()
            rng.shuffle(order)
            for u, v in order:
                delta = _move_delta(
                    cols, rank_of_pair, n, t, u, v, missing, lookahead_cap, rng
                )
                if best_delta is None or delta < best_delta:
                    best_pair, best_delta = (u, v), delta
            u, v = best_pair
            cols[rank_of_pair[(u, v)]] = missing
        # restart with a fresh state
    return None, report


# ---------------------------------------------------------------------------
# lifts


def complement_lift(
    graph: CompleteColouring, palette
) -> CompleteColouring:
    """Colour each triple by the smallest palette colour absent from its
    three edge colours (positions within the sorted palette index the output
    colours).  Requires that no triangle exhibits the entire palette; the
    offending triangle is reported otherwise."""
    if graph.k != 2:
        raise InvalidArgument("complement lift starts from a k=2 colouring")
    pal = sorted(set(int(p) for p in palette))
    if len(pal) < 2:
        raise InvalidArgument("palette needs at least two colours")
    n = graph.n
    c2 = binomial_column(2)
    cols = graph.colours
    pieces = []
    for start, (a, b, c) in iter_subset_blocks(n, 3):
        e1 = cols[c2[b] + a]
        e2 = cols[c2[c] + a]
        e3 = cols[c2[c] + b]
        out = np.full(len(a), -1, dtype=np.int16)
        for pos in range(len(pal) - 1, -1, -1):
            pc = pal[pos]
            absent = (e1 != pc) & (e2 != pc) & (e3 != pc)
            out[absent] = pos
        if (out < 0).any():
            i = int(np.argmax(out < 0))
            tri = (int(a[i]), int(b[i]), int(c[i]))
            raise PreconditionViolated(
                f"triangle {tri} carries every palette colour",
                witness=(tri, (int(e1[i]), int(e2[i]), int(e3[i]))),
            )
        pieces.append(out.astype(np.uint8))
    colours = (
        np.concatenate(pieces) if pieces else np.empty(0, dtype=np.uint8)
    )
    return CompleteColouring(n=n, k=3, q=len(pal), colours=colours)


def kr_quad_lift(graph: CompleteColouring) -> CompleteColouring:
    """Lift a 2-coloured graph to a 2-coloured 4-uniform colouring: a 4-set
    is blue when it has a blue triangle and no red one, red in every other
    case (red triangle present, both present, or neither; the fixed rule
    keeps certificates reproducible and preserves the construction's
    guarantee)."""
    if graph.k != 2 or graph.q != 2:
        raise InvalidArgument("quad lift starts from a 2-coloured graph")
    n = graph.n
    c2 = binomial_column(2)
    cols = graph.colours
    pieces = []
    for _, (a, b, c, d) in iter_subset_blocks(n, 4):
        e = {
            ("a", "b"): cols[c2[b] + a],
            ("a", "c"): cols[c2[c] + a],
            ("a", "d"): cols[c2[d] + a],
            ("b", "c"): cols[c2[c] + b],
            ("b", "d"): cols[c2[d] + b],
            ("c", "d"): cols[c2[d] + c],
        }
        triangles = [
            (("a", "b"), ("a", "c"), ("b", "c")),
            (("a", "b"), ("a", "d"), ("b", "d")),
            (("a", "c"), ("a", "d"), ("c", "d")),
            (("b", "c"), ("b", "d"), ("c", "d")),
        ]
        has = {}
        for colour in (0, 1):
            any_tri = np.zeros(len(a), dtype=bool)
            for t1, t2, t3 in triangles:
                any_tri |= (e[t1] == colour) & (e[t2] == colour) & (e[t3] == colour)
            has[colour] = any_tri
        out = np.where(has[1] & ~has[0], 1, 0).astype(np.uint8)
        pieces.append(out)
    colours = (
        np.concatenate(pieces) if pieces else np.empty(0, dtype=np.uint8)
    )
    return CompleteColouring(n=n, k=4, q=2, colours=colours)


def quad_set_lift_colour_count(q: int) -> int:
    """Output palette size: nonempty subsets of [q] with at most 4 elements."""
    return sum(math.comb(q, i) for i in range(1, 5))


def quad_set_lift(triples: CompleteColouring) -> CompleteColouring:
    """Colour each 4-set by the set of colours its four triples carry,
    encoded as the rank of that subset among nonempty <=4-subsets of [q]
    ordered by (size, colex).  Limited to q <= 8 by the one-byte colour
    budget."""
    if triples.k != 3:
        raise InvalidArgument("set lift starts from a k=3 colouring")
    if triples.q > 8:
        raise InvalidArgument("set lift supports q <= 8 (one-byte colours)")
    q = triples.q
    subset_index = np.full(1 << q, 255, dtype=np.uint8)
    ordered = sorted(
        (m for m in range(1, 1 << q) if bin(m).count("1") <= 4),
        key=lambda m: (bin(m).count("1"), m),
    )
    for i, m in enumerate(ordered):
        subset_index[m] = i
    n = triples.n
    c2 = binomial_column(2)
    c3 = binomial_column(3)
    cols = triples.colours
    pieces = []
    for _, (a, b, c, d) in iter_subset_blocks(n, 4):
        t_abc = cols[c3[c] + c2[b] + a].astype(np.int32)
        t_abd = cols[c3[d] + c2[b] + a].astype(np.int32)
        t_acd = cols[c3[d] + c2[c] + a].astype(np.int32)
        t_bcd = cols[c3[d] + c2[c] + b].astype(np.int32)
        mask = (1 << t_abc) | (1 << t_abd) | (1 << t_acd) | (1 << t_bcd)
        pieces.append(subset_index[mask])
    colours = (
        np.concatenate(pieces) if pieces else np.empty(0, dtype=np.uint8)
    )
    return CompleteColouring(
        n=n, k=4, q=quad_set_lift_colour_count(q), colours=colours
    )


def lex_product(
    outer: CompleteColouring, inner: CompleteColouring
) -> CompleteColouring:
    """Lexicographic product of graph colourings: vertex (a, i) becomes
    a * p + i; an edge takes the outer colour of its block pair when the
    blocks differ, else the inner colour.  Associative up to relabelling."""
    if outer.k != 2 or inner.k != 2:
        raise InvalidArgument("lexicographic product needs k=2 colourings")
    if outer.q != inner.q:
        raise InvalidArgument("factors must share one colour universe")
    m, p = outer.n, inner.n
    n = m * p
    a, b = pair_arrays(n)
    block_a = a // p
    block_b = b // p
    within_a = a % p
    within_b = b % p
    c2 = binomial_column(2)
    same = block_a == block_b
    inner_rank = c2[within_b] + within_a  # valid wherever same holds
    outer_rank = c2[block_b] + block_a  # valid wherever blocks differ
    colours = np.empty(len(a), dtype=np.uint8)
    colours[same] = inner.colours[inner_rank[same]]
    colours[~same] = outer.colours[outer_rank[~same]]
    return CompleteColouring(n=n, k=2, q=outer.q, colours=colours)


# ---------------------------------------------------------------------------
# rainbow-free product witness


def _factor_palettes() -> list[tuple[int, int, int]]:
    return [(RED, BLUE, YELLOW), (RED, GREEN, YELLOW), (BLUE, GREEN, YELLOW)]


def gallai_lower_bound_witness(
    t: int, seed: int, max_tries: int = 200
) -> tuple[CompleteColouring | None, SearchReport]:
    """Lexicographic product of three 3-colourings, one per yellow-containing
    colour triple, each base verified to keep every two-colour union free of
    cliques of order max(3, ceil(4 ln t)).

    Base graphs have max(2, floor(t / (16 ln^2 t))) vertices (the asymptotic
    constant is meaningless at desk scale, so the size is floor-clamped).
    The product is checked rainbow-free in red/blue/green, and the largest
    clique using at most 3 of the 4 colours is computed exactly; the report
    carries the resulting bound s (no s-clique on <= 3 colours exists).
    """
    if t < 2:
        raise InvalidArgument("t must be at least 2")
    base_size = max(2, int(t / (16 * math.log(t) ** 2)))
    clique_cap = max(3, math.ceil(4 * math.log(t)))
    rng = random.Random(seed)
    report = SearchReport(
        operation="gallai-lower-bound-witness",
        seed=seed,
        outcome="exhausted",
        params={"t": t, "base_size": base_size, "clique_cap": clique_cap},
    )

    m2 = math.comb(base_size, 2)
    factors = []
    for palette in _factor_palettes():
        found = None
        for _ in range(max_tries):
            report.tries += 1
            colours = np.array(
                [palette[rng.randrange(3)] for _ in range(m2)], dtype=np.uint8
            )
            candidate = CompleteColouring(base_size, 2, 4, colours)
            ok = True
            for pair in combinations(palette, 2):
                adj = extractors.union_adjacency(candidate, pair)
                if len(extractors.max_clique(adj, base_size)) >= clique_cap:
                    ok = False
                    break
            if ok:
                found = candidate
                break
        if found is None:
            return None, report
        factors.append(found)

    product = lex_product(factors[0], lex_product(factors[1], factors[2]))
    rainbow = verifiers.rainbow_triangle_free(product, (RED, BLUE, GREEN))
    if rainbow is not None:
        raise ToolkitError(f"product contains a rainbow triangle {rainbow}")

    largest = 0
    for triple in combinations(range(4), 3):
        adj = extractors.union_adjacency(product, triple)
        largest = max(largest, len(extractors.max_clique(adj, product.n)))
    report.outcome = "found"
    report.details.update(
        {
            "n": product.n,
            "max_three_colour_clique": largest,
            "clique_free_order": largest + 1,
            "colours_used": len(product.used_colours()),
        }
    )
    return product, report

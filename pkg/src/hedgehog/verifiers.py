"""Exact, independent checkers for every certificate the toolkit emits.

Nothing in this module calls into the construction / finder / extractor
code it is meant to police; the only shared code is the core substrate
(ranking and the colouring container).  Checks favour simple, obviously
correct loops over speed, except for the exhaustive small-Ramsey search
which gets a bit-parallel fast path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .core import (
    CliqueWitness,
    CompleteColouring,
    HedgehogEmbedding,
    InvalidArgument,
    RefusedInstance,
    binomial_column,
    hedgehog_shape,
    iter_subset_blocks,
    pair_arrays,
    rank_subset,
)


# ---------------------------------------------------------------------------
# embedding certificates


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    pair: tuple[int, ...] | None = None

    def __str__(self):
        return f"{self.kind}: {self.message}"


def verify_embedding(
    emb: HedgehogEmbedding, colouring: CompleteColouring
) -> Violation | None:
    """Check a hedgehog embedding against its host colouring.

    Returns None when the certificate is sound, otherwise a Violation naming
    the first failing check (and pair, where one is implicated).
    """
    n, k = colouring.n, colouring.k
    t = len(emb.body)
    if t < k - 1:
        return Violation("shape", f"body of size {t} too small for k={k}")
    if len(set(emb.body)) != t:
        return Violation("body", "body vertices are not pairwise distinct")
    if any(not 0 <= v < n for v in emb.body):
        return Violation("body", "body vertex out of range")
    if not 0 <= emb.colour < colouring.q:
        return Violation("colour", f"colour {emb.colour} out of range")

    body_sorted = tuple(sorted(emb.body))
    expected = {tuple(s) for s in combinations(body_sorted, k - 1)}
    got = set(emb.spines)
    if got != expected:
        missing = expected - got
        extra = got - expected
        which = next(iter(missing or extra))
        return Violation("spine-map", "spine map keys do not match body pairs", which)

    body_set = set(emb.body)
    seen: dict[int, tuple[int, ...]] = {}
    for sub in sorted(emb.spines, key=rank_subset):
        w = emb.spines[sub]
        if not 0 <= w < n:
            return Violation("spine-range", f"spine {w} out of range", sub)
        if w in body_set:
            return Violation("disjointness", f"spine {w} lies in the body", sub)
        if w in seen:
            return Violation(
                "injectivity", f"spine {w} reused by {seen[w]} and {sub}", sub
            )
        seen[w] = sub
    for sub in sorted(emb.spines, key=rank_subset):
        w = emb.spines[sub]
        edge = tuple(sorted(sub + (w,)))
        c = colouring.colour_of(edge)
        if c != emb.colour:
            return Violation(
                "colour",
                f"edge {edge} has colour {c}, expected {emb.colour}",
                sub,
            )
    return None


def verify_clique_census(
    witness: CliqueWitness,
    colouring: CompleteColouring,
    max_colours: int | None = None,
    min_size: int | None = None,
) -> Violation | None:
    """Check a clique witness: distinct in-range vertices, exact colour census,
    and optional size / census-size requirements."""
    if colouring.k != 2:
        return Violation("input", "clique witnesses live in k=2 colourings")
    verts = witness.vertices
    if len(set(verts)) != len(verts):
        return Violation("vertices", "clique vertices are not distinct")
    if any(not 0 <= v < colouring.n for v in verts):
        return Violation("vertices", "clique vertex out of range")
    census = set()
    for u, v in combinations(sorted(verts), 2):
        census.add(colouring.colour_of((u, v)))
    if census != set(witness.colours):
        return Violation(
            "census", f"claimed colours {sorted(witness.colours)}, actual {sorted(census)}"
        )
    if max_colours is not None and len(census) > max_colours:
        return Violation("census", f"{len(census)} colours exceed limit {max_colours}")
    if min_size is not None and len(verts) < min_size:
        return Violation("size", f"clique of size {len(verts)} below {min_size}")
    return None


# ---------------------------------------------------------------------------
# exact hedgehog-existence oracle


def _augment(pair_idx, masks, match_of, assigned, visited):
    # augmenting path search for pair -> spine-vertex matching
    m = masks[pair_idx]
    while m:
        v = (m & -m).bit_length() - 1
        m &= m - 1
        if v in visited:
            continue
        visited.add(v)
        holder = match_of.get(v)
        if holder is None or _augment(holder, masks, match_of, assigned, visited):
            match_of[v] = pair_idx
            assigned[pair_idx] = v
            return True
    return False


def _spine_matching(masks: list[int]) -> list[int] | None:
    """Perfect matching of pairs to spine vertices, or None.

    masks[i] is a bitmask of vertices usable as the i-th pair's spine.
    Pairs are processed scarcest-first.
    """
    order = sorted(range(len(masks)), key=lambda i: bin(masks[i]).count("1"))
    match_of: dict[int, int] = {}
    assigned: dict[int, int] = {}
    for i in order:
        if not _augment(i, masks, match_of, assigned, set()):
            return None
    return [assigned[i] for i in range(len(masks))]


def _spine_candidates(colouring: CompleteColouring, colour: int):
    """For every (k-1)-subset, the bitmask of w completing an edge of the
    given colour.  Plain nested loops in colex order; intended for the small
    n this oracle is used at."""
    n, k = colouring.n, colouring.k
    cols = colouring.colours
    cand: dict[tuple[int, ...], int] = {}
    idx = 0
    if k == 3:
        for c in range(2, n):
            for b in range(1, c):
                for a in range(b):
                    if cols[idx] == colour:
                        cand[(a, b)] = cand.get((a, b), 0) | (1 << c)
                        cand[(a, c)] = cand.get((a, c), 0) | (1 << b)
                        cand[(b, c)] = cand.get((b, c), 0) | (1 << a)
                    idx += 1
    elif k == 4:
        for d in range(3, n):
            for c in range(2, d):
                for b in range(1, c):
                    for a in range(b):
                        if cols[idx] == colour:
                            cand[(a, b, c)] = cand.get((a, b, c), 0) | (1 << d)
                            cand[(a, b, d)] = cand.get((a, b, d), 0) | (1 << c)
                            cand[(a, c, d)] = cand.get((a, c, d), 0) | (1 << b)
                            cand[(b, c, d)] = cand.get((b, c, d), 0) | (1 << a)
                        idx += 1
    else:
        raise InvalidArgument(f"hedgehog oracle supports k in (3, 4), got k={k}")
    return cand


def has_monochromatic_hedgehog(
    colouring: CompleteColouring, t: int, colour: int
) -> HedgehogEmbedding | None:
    """Exact decision: does the colouring contain a monochromatic hedgehog of
    body size t in the given colour?

    Bodies are enumerated lexicographically with fail-first pruning (a branch
    dies as soon as some body pair has no spine candidate); for each complete
    body, spine feasibility is decided by maximum bipartite matching, which
    unlike the greedy used in the finder is exact.  A None answer is
    therefore exhaustive.
    """
    n, k = colouring.n, colouring.k
    shape = hedgehog_shape(t, k)
    if n < shape.vertex_count:
        return None
    cand = _spine_candidates(colouring, colour)

    body: list[int] = []
    body_mask = 0

    def pair_masks() -> list[int] | None:
        masks = []
        for sub in combinations(body, k - 1):
            m = cand.get(tuple(sorted(sub)), 0) & ~body_mask
            if not m:
                return None
            masks.append(m)
        return masks

    def feasible_with(v: int) -> bool:
        # only the subsets involving v are new; older ones lose at most v
        probe = body_mask | (1 << v)
        for sub in combinations(body + [v], k - 1):
            m = cand.get(tuple(sorted(sub)), 0) & ~probe
            if not m:
                return False
        return True

    def extend(start: int) -> HedgehogEmbedding | None:
        nonlocal body_mask
        if len(body) == t:
            masks = pair_masks()
            if masks is None:
                return None
            subsets = [tuple(sorted(s)) for s in combinations(body, k - 1)]
            chosen = _spine_matching(masks)
            if chosen is None:
                return None
            return HedgehogEmbedding(
                colour=colour,
                body=tuple(sorted(body)),
                spines=dict(zip(subsets, chosen)),
            )
        for v in range(start, n - (t - len(body)) + 1):
            if len(body) + 1 >= k - 1 and not feasible_with(v):
                continue
            body.append(v)
            body_mask |= 1 << v
            found = extend(v + 1)
            body.pop()
            body_mask &= ~(1 << v)
            if found is not None:
                return found
        return None

    return extend(0)


def has_monochromatic_hedgehog_slow(
    colouring: CompleteColouring, t: int, colour: int
) -> bool:
    """Naive second opinion: try every body and every injective spine
    assignment directly.  Exponential; only for cross-checking at tiny n."""
    n, k = colouring.n, colouring.k
    shape = hedgehog_shape(t, k)
    if n < shape.vertex_count:
        return False

    for body in combinations(range(n), t):
        body_set = set(body)
        subsets = list(combinations(body, k - 1))
        options = []
        for sub in subsets:
            opts = [
                w
                for w in range(n)
                if w not in body_set
                and colouring.colour_of(sorted(sub + (w,))) == colour
            ]
            options.append(opts)

        def assign(i: int, used: set[int]) -> bool:
            if i == len(subsets):
                return True
            for w in options[i]:
                if w not in used:
                    if assign(i + 1, used | {w}):
                        return True
            return False

        if assign(0, set()):
            return True
    return False


# ---------------------------------------------------------------------------
# graph-colouring checks


def rainbow_triangle_free(
    colouring: CompleteColouring, palette
) -> tuple[int, int, int] | None:
    """Scan every triangle; report the first whose edge-colour set equals the
    3-colour palette, or None if there is none."""
    if colouring.k != 2:
        raise InvalidArgument("rainbow check needs a k=2 colouring")
    pal = sorted(set(palette))
    if len(pal) != 3:
        raise InvalidArgument(f"palette {palette} is not three distinct colours")
    n = colouring.n
    cols = colouring.colours
    c2 = binomial_column(2)
    for _, (a, b, c) in iter_subset_blocks(n, 3):
        e1 = cols[c2[b] + a]
        e2 = cols[c2[c] + a]
        e3 = cols[c2[c] + b]
        distinct = (e1 != e2) & (e1 != e3) & (e2 != e3)
        inpal = (
            np.isin(e1, pal) & np.isin(e2, pal) & np.isin(e3, pal)
        )
        hit = distinct & inpal
        if hit.any():
            i = int(np.argmax(hit))
            return (int(a[i]), int(b[i]), int(c[i]))
    return None


def every_clique_all_colours(
    colouring: CompleteColouring, t: int, q: int | None = None
) -> CliqueWitness | None:
    """Search for a t-clique whose edges miss some colour.

    Backtracks over vertex subsets, pruning any branch whose colour census is
    already complete (no extension can become deficient).  Returns a
    deficient clique as a witness, or None, exhaustively.
    """
    if colouring.k != 2:
        raise InvalidArgument("clique colour check needs a k=2 colouring")
    if q is None:
        q = colouring.q
    n = colouring.n
    if t > n:
        return None
    full = (1 << q) - 1
    mat = _colour_matrix(colouring)

    members: list[int] = []

    def rec(census: int, start: int) -> CliqueWitness | None:
        if len(members) == t:
            colours = frozenset(i for i in range(q) if census >> i & 1)
            return CliqueWitness(tuple(members), colours)
        for v in range(start, n - (t - len(members)) + 1):
            cen = census
            for u in members:
                cen |= 1 << mat[u][v]
            if cen == full:
                # census only grows: no extension can become deficient
                continue
            members.append(v)
            found = rec(cen, v + 1)
            members.pop()
            if found is not None:
                return found
        return None

    return rec(0, 0)


def _colour_matrix(colouring: CompleteColouring) -> list[list[int]]:
    n = colouring.n
    mat = [[0] * n for _ in range(n)]
    a, b = pair_arrays(n)
    cols = colouring.colours
    for r in range(len(cols)):
        u, v = int(a[r]), int(b[r])
        mat[u][v] = mat[v][u] = int(cols[r])
    return mat


def verify_complement_lift(
    lifted: CompleteColouring,
    base: CompleteColouring,
    palette,
) -> Violation | None:
    """Recheck, triple by triple, that the lifted colouring assigns every
    triple the position of the smallest palette colour absent from its three
    base edge colours.  Independent scalar recomputation."""
    if base.k != 2 or lifted.k != 3 or lifted.n != base.n:
        return Violation("input", "lift/base shapes do not match")
    pal = sorted(set(palette))
    if lifted.q != len(pal):
        return Violation("input", f"lift q={lifted.q} != palette size {len(pal)}")
    idx = 0
    cols = lifted.colours
    for c in range(2, base.n):
        for b in range(1, c):
            for a in range(b):
                edges = {
                    base.colour_of((a, b)),
                    base.colour_of((a, c)),
                    base.colour_of((b, c)),
                }
                want = None
                for pos, pc in enumerate(pal):
                    if pc not in edges:
                        want = pos
                        break
                if want is None:
                    return Violation(
                        "palette", f"triangle {(a, b, c)} uses the whole palette",
                        (a, b, c),
                    )
                if int(cols[idx]) != want:
                    return Violation(
                        "lift",
                        f"triple {(a, b, c)} coloured {int(cols[idx])}, expected {want}",
                        (a, b, c),
                    )
                idx += 1
    return None


# ---------------------------------------------------------------------------
# exhaustive small-scale Ramsey computation


@dataclass
class RamseyCheckResult:
    t: int
    q: int
    n: int
    holds: bool
    counterexample: CompleteColouring | None
    checked: int
    total: int

    def __str__(self):
        verdict = "holds" if self.holds else "counterexample"
        return (
            f"ramsey-check t={self.t} q={self.q} n={self.n}: {verdict} "
            f"({self.checked} of {self.total} colourings checked)"
        )


def _ge2(x: np.ndarray) -> np.ndarray:
    return (x & (x - 1)) != 0


def _ge3(x: np.ndarray) -> np.ndarray:
    y = x & (x - 1)
    return (y & (y - 1)) != 0


def _bulk_feasible(idx: np.ndarray, n: int, t: int) -> np.ndarray:
    """Bit-parallel hedgehog existence over many 2-colourings at once.

    idx holds colouring indices; bit r of an index is the colour of the
    triple with colex rank r.  Returns a boolean array: colouring contains a
    monochromatic body-size-t hedgehog in some colour.
    """
    any_hedgehog = np.zeros(idx.shape, dtype=bool)
    for body in combinations(range(n), t):
        body_set = set(body)
        others = [w for w in range(n) if w not in body_set]
        pos_of = {w: i for i, w in enumerate(others)}
        for colour in (0, 1):
            masks = []
            for pair in combinations(body, 2):
                s = np.zeros(idx.shape, dtype=np.uint64)
                for w in others:
                    r = rank_subset(sorted(pair + (w,)))
                    bit = (idx >> np.uint64(r)) & np.uint64(1)
                    if colour == 0:
                        bit = bit ^ np.uint64(1)
                    s |= bit << np.uint64(pos_of[w])
                masks.append(s)
            if t == 2:
                ok = masks[0] != 0
            elif t == 3:
                s1, s2, s3 = masks
                ok = (
                    (s1 != 0)
                    & (s2 != 0)
                    & (s3 != 0)
                    & _ge2(s1 | s2)
                    & _ge2(s1 | s3)
                    & _ge2(s2 | s3)
                    & _ge3(s1 | s2 | s3)
                )
            else:  # pragma: no cover - guarded by caller
                raise InvalidArgument("bulk path supports t in (2, 3)")
            any_hedgehog |= ok
        if any_hedgehog.all():
            break
    return any_hedgehog


def exhaustive_ramsey_check(
    t: int,
    q: int,
    n: int,
    colour_swap: bool = True,
    limit: int = 1 << 26,
    chunk: int = 1 << 18,
) -> RamseyCheckResult:
    """Decide by exhaustion whether every q-colouring of the complete
    3-uniform hypergraph on [n] contains a monochromatic body-size-t
    hedgehog.  Returns the first hedgehog-free colouring found, else holds.

    Instances beyond `limit` colourings (after the optional colour-swap
    halving for q=2) are refused with a size estimate.
    """
    m = math.comb(n, 3)
    total = q**m
    scan = total
    if colour_swap and q == 2 and m > 0:
        scan = total // 2  # indices with top bit 0 represent both swap classes
    if scan > limit:
        raise RefusedInstance(
            f"{total} colourings (scan {scan}) exceed limit {limit}", estimate=total
        )

    checked = 0
    if q == 2 and t in (2, 3):
        lo = 0
        while lo < max(scan, 1):
            hi = min(lo + chunk, max(scan, 1))
            idx = np.arange(lo, hi, dtype=np.uint64)
            feasible = _bulk_feasible(idx, n, t)
            checked += len(idx)
            if not feasible.all():
                i = int(idx[int(np.argmax(~feasible))])
                colours = np.array([(i >> r) & 1 for r in range(m)], dtype=np.uint8)
                witness = CompleteColouring(n, 3, q, colours)
                # cross-validate with the per-colouring oracle before reporting
                for colour in range(q):
                    assert has_monochromatic_hedgehog(witness, t, colour) is None
                return RamseyCheckResult(t, q, n, False, witness, checked, total)
            lo = hi
        return RamseyCheckResult(t, q, n, True, None, checked, total)

    for i in range(max(scan, 1)):
        digits = []
        x = i
        for _ in range(m):
            digits.append(x % q)
            x //= q
        witness = CompleteColouring(n, 3, q, np.array(digits, dtype=np.uint8))
        checked += 1
        if all(
            has_monochromatic_hedgehog(witness, t, colour) is None
            for colour in range(q)
        ):
            return RamseyCheckResult(t, q, n, False, witness, checked, total)
    return RamseyCheckResult(t, q, n, True, None, checked, total)


def exhaustive_ramsey_check_sampled(
    t: int,
    q: int,
    n: int,
    fraction: float,
    seed: int,
    limit: int = 1 << 26,
) -> RamseyCheckResult:
    """Slow-path twin of exhaustive_ramsey_check on a random sample of the
    colouring space, deciding each sampled colouring with the per-colouring
    matching oracle.  Used to cross-check the bit-parallel fast path."""
    m = math.comb(n, 3)
    total = q**m
    if total > limit:
        raise RefusedInstance(f"{total} colourings exceed limit {limit}", estimate=total)
    rng = np.random.default_rng(seed)
    count = max(1, int(total * fraction))
    sample = rng.integers(0, total, size=count, dtype=np.uint64)
    checked = 0
    for i in sample.tolist():
        digits = []
        x = int(i)
        for _ in range(m):
            digits.append(x % q)
            x //= q
        witness = CompleteColouring(n, 3, q, np.array(digits, dtype=np.uint8))
        checked += 1
        if all(
            has_monochromatic_hedgehog(witness, t, colour) is None
            for colour in range(q)
        ):
            return RamseyCheckResult(t, q, n, False, witness, checked, total)
    return RamseyCheckResult(t, q, n, True, None, checked, total)

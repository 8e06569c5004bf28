"""Combinatorial substrate for complete-hypergraph colouring experiments.

Vertices are 0-based everywhere.  A k-subset of the vertex set is identified
with its colex (combinadic) rank, and a colouring of the complete k-uniform
hypergraph on [n] is a dense byte array indexed by that rank.  Everything
downstream (generators, finders, verifiers) works on this representation.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

RED, BLUE, GREEN, YELLOW = 0, 1, 2, 3
COLOUR_NAMES = ("red", "blue", "green", "yellow")

# ranking tables and cached enumerations are sized for at most this many vertices
MAX_VERTICES = 1024

# largest C(n,k) for which a full enumeration array is cached in memory;
# beyond this, passes over k-subsets run blockwise by top vertex
CACHE_LIMIT = 1 << 23


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgument(ToolkitError):
    pass


class InfeasibleSpec(InvalidArgument):
    pass


class PreconditionViolated(ToolkitError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class StagedFailure(ToolkitError):
    """A staged algorithm gave up; names the stage and carries a witness."""

    def __init__(self, stage, message, witness=None):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.witness = witness


class GuaranteeViolated(ToolkitError):
    """An extraction fell short of a size its contract promises.

    This cannot happen on inputs that satisfy the contract's hypotheses, so it
    is surfaced loudly: it means either a bug or a genuinely interesting
    instance, never something to swallow.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class RefusedInstance(ToolkitError):
    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


# ---------------------------------------------------------------------------
# binomials and colex ranking


def binomial(n: int, k: int) -> int:
    if n < 0:
        return 0
    return math.comb(n, k)


@lru_cache(maxsize=None)
def binomial_column(k: int, n_max: int = MAX_VERTICES) -> np.ndarray:
    """C(x, k) for x = 0 .. n_max, as a readonly int64 array."""
    col = np.array([math.comb(x, k) for x in range(n_max + 1)], dtype=np.int64)
    col.setflags(write=False)
    return col


def rank_subset(subset, n: int | None = None) -> int:
    """Colex rank of a strictly increasing k-subset of [n]."""
    sub = list(subset)
    prev = -1
    for v in sub:
        if v <= prev:
            raise InvalidArgument(f"subset {sub} is not strictly increasing")
        if n is not None and not 0 <= v < n:
            raise InvalidArgument(f"subset entry {v} out of range [0, {n})")
        prev = v
    if sub and sub[0] < 0:
        raise InvalidArgument(f"subset entry {sub[0]} is negative")
    return sum(math.comb(v, i + 1) for i, v in enumerate(sub))


def unrank_subset(r: int, n: int, k: int) -> list[int]:
    """Inverse of rank_subset: the k-subset of [n] with colex rank r."""
    if not 0 <= r < math.comb(n, k):
        raise InvalidArgument(f"rank {r} out of range [0, C({n},{k}))")
    out = [0] * k
    nn, kk, rr = n, k, r
    while kk > 0:
        nn -= 1
        c = math.comb(nn, kk)
        if rr >= c:
            rr -= c
            kk -= 1
            out[kk] = nn
    return out


def pair_rank(a: int, b: int) -> int:
    """Colex rank of {a, b} with a < b."""
    return math.comb(b, 2) + a


def triple_rank(a: int, b: int, c: int) -> int:
    """Colex rank of {a, b, c} with a < b < c."""
    return math.comb(c, 3) + math.comb(b, 2) + a


# ---------------------------------------------------------------------------
# vectorized colex enumerations
#
# pair_arrays(n) is small and cached outright.  3- and 4-subsets come in
# colex blocks grouped by their top vertex: the subsets of [n] with top
# vertex x are exactly (subsets of [x]) x {x}, and by colex those occupy the
# contiguous rank range [C(x,k), C(x+1,k)).


@lru_cache(maxsize=16)
def pair_arrays(n: int):
    """(a, b) arrays over all 2-subsets of [n] in colex rank order."""
    if n > MAX_VERTICES:
        raise InvalidArgument(f"n={n} exceeds MAX_VERTICES={MAX_VERTICES}")
    b = np.repeat(np.arange(n, dtype=np.int32), np.arange(n))
    a = np.arange(len(b), dtype=np.int64) - binomial_column(2)[b]
    a = a.astype(np.int32)
    a.setflags(write=False)
    b.setflags(write=False)
    return a, b


def iter_subset_blocks(n: int, k: int, max_block: int = CACHE_LIMIT):
    """Yield (start_rank, columns) covering all k-subsets of [n] colexwise.

    columns is a tuple of k int32 arrays (ascending within each subset).
    Blocks group consecutive top vertices while staying under max_block rows.
    """
    if k == 2:
        yield 0, pair_arrays(n)
        return
    if k == 3:
        lower_a, lower_b = pair_arrays(n)
        low_count = binomial_column(2)
    elif k == 4:
        lower = triple_arrays(n)  # needs C(n,3) cacheable; guarded there
        lower_a, lower_b, lower_c = lower
        low_count = binomial_column(3)
    else:
        raise InvalidArgument(f"unsupported uniformity k={k}")

    top = k - 1
    while top < n:
        hi = top
        rows = 0
        while hi < n and (rows == 0 or rows + low_count[hi] <= max_block):
            rows += int(low_count[hi])
            hi += 1
        tops = np.repeat(
            np.arange(top, hi, dtype=np.int32),
            low_count[top:hi].astype(np.int64),
        )
        # a subset's index within its top block equals its lower subset's
        # own colex rank, by the colex nesting property
        start = int(binomial_column(k)[top])
        local = np.arange(rows, dtype=np.int64) + start - binomial_column(k)[tops]
        if k == 3:
            cols = (lower_a[local], lower_b[local], tops)
        else:
            cols = (lower_a[local], lower_b[local], lower_c[local], tops)
        yield start, cols
        top = hi


@lru_cache(maxsize=8)
def triple_arrays(n: int):
    """(a, b, c) arrays over all 3-subsets of [n] in colex rank order."""
    if math.comb(n, 3) > CACHE_LIMIT:
        raise InvalidArgument(
            f"C({n},3) too large to cache; use iter_subset_blocks"
        )
    parts = [cols for _, cols in iter_subset_blocks(n, 3)]
    a = np.concatenate([p[0] for p in parts]) if parts else np.empty(0, np.int32)
    b = np.concatenate([p[1] for p in parts]) if parts else np.empty(0, np.int32)
    c = np.concatenate([p[2] for p in parts]) if parts else np.empty(0, np.int32)
    for arr in (a, b, c):
        arr.setflags(write=False)
    return a, b, c


@lru_cache(maxsize=4)
def triple_pair_ranks(n: int):
    """Pair ranks (ab, ac, bc) for every 3-subset of [n], colex order, int32."""
    a, b, c = triple_arrays(n)
    c2 = binomial_column(2)
    pr_ab = (c2[b] + a).astype(np.int32)
    pr_ac = (c2[c] + a).astype(np.int32)
    pr_bc = (c2[c] + b).astype(np.int32)
    for arr in (pr_ab, pr_ac, pr_bc):
        arr.setflags(write=False)
    return pr_ab, pr_ac, pr_bc


# ---------------------------------------------------------------------------
# colourings


@dataclass(frozen=True, eq=False)
class CompleteColouring:
    """A q-colouring of all k-subsets of [n].

    colours[r] is the colour of the k-subset with colex rank r.  Instances
    are immutable after construction and safe to share across workers.
    """

    n: int
    k: int
    q: int
    colours: np.ndarray

    def __post_init__(self):
        if self.k not in (2, 3, 4):
            raise InvalidArgument(f"uniformity k={self.k} not in (2, 3, 4)")
        if not 1 <= self.q <= 256:
            raise InvalidArgument(f"colour count q={self.q} not in [1, 256]")
        if self.n < 0 or self.n > MAX_VERTICES:
            raise InvalidArgument(f"vertex count n={self.n} out of range")
        arr = np.ascontiguousarray(self.colours, dtype=np.uint8)
        expect = math.comb(self.n, self.k)
        if arr.shape != (expect,):
            raise InvalidArgument(
                f"colour array has length {arr.shape}, expected C({self.n},{self.k})={expect}"
            )
        if arr.size and int(arr.max()) >= self.q:
            raise InvalidArgument(
                f"colour {int(arr.max())} out of range for q={self.q}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "colours", arr)

    @property
    def edge_count(self) -> int:
        return int(self.colours.size)

    def colour_of(self, subset) -> int:
        sub = sorted(subset)
        if len(sub) != self.k:
            raise InvalidArgument(f"subset {sub} is not a {self.k}-subset")
        return int(self.colours[rank_subset(sub, self.n)])

    def used_colours(self) -> set[int]:
        return set(np.unique(self.colours).tolist())

    def equals(self, other: "CompleteColouring") -> bool:
        return (
            self.n == other.n
            and self.k == other.k
            and self.q == other.q
            and np.array_equal(self.colours, other.colours)
        )


def graph_colour_matrix(col: CompleteColouring) -> list[list[int]]:
    """n x n matrix of edge colours for a k=2 colouring (diagonal 0)."""
    if col.k != 2:
        raise InvalidArgument("graph_colour_matrix needs a k=2 colouring")
    n = col.n
    mat = [[0] * n for _ in range(n)]
    a, b = pair_arrays(n)
    cols = col.colours
    for r in range(len(cols)):
        u, v, c = int(a[r]), int(b[r]), int(cols[r])
        mat[u][v] = c
        mat[v][u] = c
    return mat


def pair_colour_counts(col: CompleteColouring) -> np.ndarray:
    """For a k=3 colouring: per-pair counts of triples of each colour.

    Returns an int64 array of shape (C(n,2), q): entry [p, c] is the number
    of triples of colour c containing the pair with colex rank p.  One pass
    over all C(n,3) triples; the last colour's counts come for free since the
    q counts at a pair sum to n-2.
    """
    if col.k != 3:
        raise InvalidArgument("pair_colour_counts needs a k=3 colouring")
    n, q = col.n, col.q
    m2 = math.comb(n, 2)
    counts = np.zeros((m2, q), dtype=np.int64)
    c2 = binomial_column(2)

    def accumulate(pr_ab, pr_ac, pr_bc, cols):
        for colour in range(q - 1):
            mask = cols == colour
            if not mask.any():
                continue
            counts[:, colour] += np.bincount(pr_ab[mask], minlength=m2)
            counts[:, colour] += np.bincount(pr_ac[mask], minlength=m2)
            counts[:, colour] += np.bincount(pr_bc[mask], minlength=m2)

    if math.comb(n, 3) <= CACHE_LIMIT:
        pr_ab, pr_ac, pr_bc = triple_pair_ranks(n)
        accumulate(pr_ab, pr_ac, pr_bc, col.colours)
    else:
        for start, (a, b, c) in iter_subset_blocks(n, 3):
            cols = col.colours[start : start + len(a)]
            accumulate(c2[b] + a, c2[c] + a, c2[c] + b, cols)
    if q >= 2 and n >= 2:
        counts[:, q - 1] = (n - 2) - counts[:, : q - 1].sum(axis=1)
    elif q == 1:
        counts[:, 0] = max(n - 2, 0)
    return counts


# ---------------------------------------------------------------------------
# hedgehogs


@dataclass(frozen=True)
class HedgehogShape:
    """Vertex/edge arithmetic of the k-uniform hedgehog with body size t."""

    t: int
    k: int

    @property
    def edge_count(self) -> int:
        return math.comb(self.t, self.k - 1)

    @property
    def vertex_count(self) -> int:
        return self.t + self.edge_count


def hedgehog_shape(t: int, k: int = 3) -> HedgehogShape:
    if k < 2:
        raise InvalidArgument(f"uniformity k={k} must be at least 2")
    if t < k - 1:
        raise InvalidArgument(f"body size t={t} must be at least k-1={k - 1}")
    return HedgehogShape(t, k)


def hedgehog_edges(t: int, k: int = 3) -> list[tuple[int, ...]]:
    """Edge list of the k-uniform hedgehog: body [0, t), one private spine
    vertex per (k-1)-subset of the body, spines numbered t, t+1, ... in colex
    order of their subsets."""
    shape = hedgehog_shape(t, k)
    edges = []
    for i, sub in enumerate(
        sorted(combinations(range(t), k - 1), key=lambda s: rank_subset(s))
    ):
        edges.append(tuple(sorted(sub + (t + i,))))
    assert len(edges) == shape.edge_count
    return edges


@dataclass
class HedgehogEmbedding:
    """Certificate for a monochromatic hedgehog inside a host colouring.

    spines maps each (k-1)-subset of the body (as a sorted tuple) to its
    spine vertex; verify_embedding in the verifiers module checks all of the
    invariants against the host.
    """

    colour: int
    body: tuple[int, ...]
    spines: dict[tuple[int, ...], int]

    @property
    def t(self) -> int:
        return len(self.body)

    @property
    def k(self) -> int:
        if not self.spines:
            raise InvalidArgument("embedding has no spines; uniformity unknown")
        return len(next(iter(self.spines))) + 1

    def vertices(self) -> set[int]:
        return set(self.body) | set(self.spines.values())

    def to_text(self) -> str:
        lines = [
            "HEDGEHOG v1",
            f"k {self.k}",
            f"t {self.t}",
            f"colour {self.colour}",
            "body " + " ".join(str(v) for v in self.body),
        ]
        for sub in sorted(self.spines, key=rank_subset):
            lines.append(
                "spine " + " ".join(str(v) for v in sub) + f" -> {self.spines[sub]}"
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "HedgehogEmbedding":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0] != "HEDGEHOG v1":
            raise InvalidArgument("not a HEDGEHOG v1 certificate")
        fields = {}
        spines = {}
        for ln in lines[1:]:
            if ln.startswith("spine "):
                left, _, right = ln[len("spine "):].partition("->")
                sub = tuple(int(x) for x in left.split())
                spines[sub] = int(right.strip())
            else:
                key, _, val = ln.partition(" ")
                fields[key] = val
        try:
            colour = int(fields["colour"])
            body = tuple(int(x) for x in fields["body"].split())
        except (KeyError, ValueError) as exc:
            raise InvalidArgument(f"malformed certificate: {exc}") from exc
        emb = cls(colour=colour, body=body, spines=spines)
        if "t" in fields and int(fields["t"]) != emb.t:
            raise InvalidArgument("certificate t does not match body length")
        return emb


@dataclass(frozen=True)
class CliqueWitness:
    """A vertex set together with the colours on its internal edges."""

    vertices: tuple[int, ...]
    colours: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.vertices)

    def to_text(self) -> str:
        return (
            "CLIQUE v1\n"
            + "vertices " + " ".join(str(v) for v in self.vertices) + "\n"
            + "colours " + " ".join(str(c) for c in sorted(self.colours)) + "\n"
        )

    @classmethod
    def from_text(cls, text: str) -> "CliqueWitness":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0] != "CLIQUE v1":
            raise InvalidArgument("not a CLIQUE v1 certificate")
        fields = dict(ln.partition(" ")[::2] for ln in lines[1:])
        try:
            return cls(
                vertices=tuple(int(v) for v in fields["vertices"].split()),
                colours=frozenset(int(c) for c in fields["colours"].split()),
            )
        except (KeyError, ValueError) as exc:
            raise InvalidArgument(f"malformed certificate: {exc}") from exc


@dataclass
class SearchReport:
    """Deterministic record of a randomized or backtracking run."""

    operation: str
    seed: int
    outcome: str
    tries: int = 0
    steps: int = 0
    params: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [
            "SEARCH-REPORT v1",
            f"operation {self.operation}",
            f"seed {self.seed}",
            f"outcome {self.outcome}",
            f"tries {self.tries}",
            f"steps {self.steps}",
        ]
        for key in sorted(self.params):
            lines.append(f"param {key}={self.params[key]}")
        for key in sorted(self.details):
            lines.append(f"detail {key}={self.details[key]}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# degeneracy


def degeneracy(edges, n: int | None = None) -> int:
    """Exact degeneracy of a k-uniform hypergraph by min-degree peeling.

    Returns the maximum, over peeling steps, of the removed vertex's degree
    at removal time; removing a vertex deletes every edge containing it.
    """
    edge_list = [tuple(sorted(e)) for e in edges]
    verts = set()
    for e in edge_list:
        verts.update(e)
    if n is not None:
        verts.update(range(n))
    if not verts:
        return 0
    incident: dict[int, set[int]] = {v: set() for v in verts}
    for idx, e in enumerate(edge_list):
        for v in e:
            incident[v].add(idx)
    alive_edges = [True] * len(edge_list)
    remaining = set(verts)
    worst = 0
    while remaining:
        v = min(remaining, key=lambda u: (len(incident[u]), u))
        worst = max(worst, len(incident[v]))
        for idx in list(incident[v]):
            if not alive_edges[idx]:
                continue
            alive_edges[idx] = False
            for u in edge_list[idx]:
                incident[u].discard(idx)
        remaining.remove(v)
    return worst


# ---------------------------------------------------------------------------
# HCOL v1 file format
#
#   HCOL v1 n=<n> k=<k> q=<q>\n
#   <body>\n
#
# For q <= 16 the body is one lowercase hex digit per edge in rank order;
# otherwise it is whitespace-separated decimal.  Readers reject any length
# mismatch, and the writer's output is canonical so write/read/write
# round-trips are byte-identical.

_HCOL_HEADER = re.compile(r"HCOL v1 n=(\d+) k=(\d+) q=(\d+)$")
_HEX_DIGITS = np.frombuffer(b"0123456789abcdef", dtype=np.uint8)
_HEX_VALUES = np.full(256, 255, dtype=np.uint8)
for _i, _ch in enumerate(b"0123456789abcdef"):
    _HEX_VALUES[_ch] = _i


def colouring_to_text(col: CompleteColouring) -> str:
    head = f"HCOL v1 n={col.n} k={col.k} q={col.q}\n"
    if col.q <= 16:
        body = _HEX_DIGITS[col.colours].tobytes().decode("ascii")
    else:
        body = " ".join(str(int(c)) for c in col.colours)
    return head + body + "\n"


def colouring_from_text(text: str) -> CompleteColouring:
    newline = text.find("\n")
    if newline < 0:
        raise InvalidArgument("missing HCOL header line")
    header = _HCOL_HEADER.match(text[:newline])
    if header is None:
        raise InvalidArgument(f"bad HCOL header: {text[:newline]!r}")
    n, k, q = (int(g) for g in header.groups())
    expect = math.comb(n, k)
    body = text[newline + 1 :]
    if q <= 16:
        raw = body.encode("ascii", errors="replace").translate(None, b" \t\r\n")
        vals = _HEX_VALUES[np.frombuffer(raw, dtype=np.uint8)]
        if vals.size and int(vals.max()) == 255:
            bad = int(np.argmax(vals == 255))
            raise InvalidArgument(f"invalid hex digit at body position {bad}")
    else:
        try:
            vals = np.array([int(tok) for tok in body.split()], dtype=np.int64)
        except ValueError as exc:
            raise InvalidArgument(f"invalid decimal colour: {exc}") from exc
    if vals.size != expect:
        raise InvalidArgument(
            f"body has {vals.size} colours, expected C({n},{k})={expect}"
        )
    if vals.size and int(vals.max()) >= q:
        raise InvalidArgument(f"colour {int(vals.max())} out of range for q={q}")
    return CompleteColouring(n=n, k=k, q=q, colours=vals.astype(np.uint8))


def write_colouring(col: CompleteColouring, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(colouring_to_text(col))


def read_colouring(path) -> CompleteColouring:
    with open(path, "r", newline="") as fh:
        return colouring_from_text(fh.read())

"""Similarity detectors used to judge whether a rewritten netlist evades
piracy checks.

Three text detectors work on a shared Verilog tokenizer:

* ``moss-analog``  -- winnowed k-gram fingerprints,
* ``jplag-analog`` -- greedy string tiling,
* ``sim-analog``   -- one-sided token overlap built on the same tiling.

``gnn4ip-analog`` compares gate graphs with Weisfeiler-Lehman label
histograms. None of these reproduce the named tools' numbers; they only
follow the same algorithms.
"""

from __future__ import annotations

import hashlib
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Literal, NamedTuple

import numpy as np

from netrewrite.netlist import CONSTANTS, Netlist, emit_netlist

# -- tokenizer ---------------------------------------------------------------

KEYWORDS = frozenset(
    "module endmodule input output inout wire reg assign supply0 supply1".split()
)
GATE_OPS = frozenset("and or nand nor xor xnor not buf".split())

_LEX_RE = re.compile(
    r"""
    (?P<skip>\s+|//[^\n]*|/\*.*?\*/)
  | (?P<escaped>\\\S+)
  | (?P<number>\d+'[bBoOdDhH][0-9a-fA-FxXzZ_]+|'[bBoOdDhH][0-9a-fA-FxXzZ_]+|\d+)
  | (?P<word>[A-Za-z_][A-Za-z0-9_$]*)
  | (?P<punct>.)
    """,
    re.VERBOSE | re.DOTALL,
)

NORMALIZED_ID = "ID"


class Token(NamedTuple):
    cls: str
    lexeme: str
    start: int
    end: int

    @property
    def key(self) -> str:
        return f"{self.cls}\x1f{self.lexeme}"


@dataclass(frozen=True)
class TokenSeq:
    tokens: tuple[Token, ...]
    source: str = field(repr=False, default="")

    def keys(self) -> list[str]:
        return [t.key for t in self.tokens]

    def lexemes(self) -> list[str]:
        return [t.lexeme for t in self.tokens]

    def __len__(self) -> int:
        return len(self.tokens)


def tokenize(source: str, normalize_identifiers: bool = True) -> TokenSeq:
    """Split Verilog text into classed tokens; comments and whitespace vanish.

    With ``normalize_identifiers`` every identifier lexeme becomes ``ID``;
    spans still point at the original text.
    """
    toks = []
    for m in _LEX_RE.finditer(source):
        kind = m.lastgroup
        if kind == "skip":
            continue
        text = m.group()
        if kind == "word":
            if text in GATE_OPS:
                cls = "gate_op"
            elif text in KEYWORDS:
                cls = "keyword"
            else:
                cls = "identifier"
        elif kind == "escaped":
            cls = "identifier"
        elif kind == "number":
            cls = "number"
        else:
            cls = "punctuation"
        lexeme = NORMALIZED_ID if (cls == "identifier" and normalize_identifiers) else text
        toks.append(Token(cls, lexeme, m.start(), m.end()))
    return TokenSeq(tuple(toks), source)


def _as_tokens(x: str | TokenSeq, normalize: bool) -> TokenSeq:
    return x if isinstance(x, TokenSeq) else tokenize(x, normalize)


@dataclass(frozen=True)
class SimilarityScore:
    value: float
    detector: str
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"similarity {self.value} outside [0, 1]")

    def __float__(self) -> float:
        return self.value


# -- winnowing ---------------------------------------------------------------

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def kgram_hashes(keys: list[str], k: int) -> list[int]:
    """FNV-1a of each k-gram; tokens are ``class \\x1f lexeme`` joined by
    ``\\x1e``, UTF-8 encoded."""
    return [
        fnv1a_64("\x1e".join(keys[i : i + k]).encode("utf-8"))
        for i in range(len(keys) - k + 1)
    ]


@dataclass(frozen=True)
class FingerprintSet:
    fingerprints: tuple[tuple[int, int], ...]  # (hash, k-gram position)

    @property
    def hashes(self) -> set[int]:
        return {h for h, _ in self.fingerprints}

    def __len__(self) -> int:
        return len(self.fingerprints)


def winnow(hashes: list[int], w: int) -> FingerprintSet:
    """Select the minimum hash of every window of ``w`` consecutive hashes,
    rightmost on ties; each selected position is recorded once."""
    if w < 1:
        raise ValueError("window must be >= 1")
    if not hashes:
        return FingerprintSet(())
    w = min(w, len(hashes))
    picked: list[tuple[int, int]] = []
    last = -1
    for start in range(len(hashes) - w + 1):
        best = start
        for i in range(start + 1, start + w):
            if hashes[i] <= hashes[best]:
                best = i
        if best != last:
            picked.append((hashes[best], best))
            last = best
    return FingerprintSet(tuple(picked))


def fingerprints(text: str | TokenSeq, k: int = 5, w: int = 4, normalize: bool = True) -> FingerprintSet:
    return winnow(kgram_hashes(_as_tokens(text, normalize).keys(), k), w)


def winnow_similarity(
    a: str | TokenSeq, b: str | TokenSeq, k: int = 5, w: int = 4, normalize: bool = True
) -> SimilarityScore:
    """Shared distinct fingerprints over the larger distinct fingerprint set."""
    if k < 1 or w < 1:
        raise ValueError("k and w must be >= 1")
    params = {"k": k, "w": w}
    ta, tb = _as_tokens(a, normalize), _as_tokens(b, normalize)
    if len(ta) < k or len(tb) < k:
        same = ta.keys() == tb.keys()
        return SimilarityScore(1.0 if same else 0.0, "moss-analog", params)
    fa = fingerprints(ta, k, w).hashes
    fb = fingerprints(tb, k, w).hashes
    value = len(fa & fb) / max(len(fa), len(fb))
    return SimilarityScore(value, "moss-analog", params)


# -- greedy string tiling ----------------------------------------------------


class Tile(NamedTuple):
    a_start: int
    b_start: int
    length: int


def _intern(*seqs: list[str]) -> list[np.ndarray]:
    table: dict[str, int] = {}
    return [
        np.fromiter((table.setdefault(s, len(table)) for s in seq), dtype=np.int64, count=len(seq))
        for seq in seqs
    ]


def greedy_string_tiling(a: list[str], b: list[str], min_len: int) -> list[Tile]:
    """Tiles covering ``a`` and ``b``, longest matches first, no token reused.

    Each round finds the longest common run among unmarked tokens, then marks
    every non-overlapping occurrence of that length (scanned in ``a`` order).
    Rounds stop once the longest run is shorter than ``min_len``.
    """
    if min_len < 1:
        raise ValueError("min_len must be >= 1")
    if not a or not b:
        return []
    # canonical argument order keeps the result symmetric under ties
    swapped = (len(a), a) > (len(b), b)
    if swapped:
        a, b = b, a
    xa, xb = _intern(a, b)
    na, nb = len(xa), len(xb)
    mark_a = np.zeros(na, dtype=bool)
    mark_b = np.zeros(nb, dtype=bool)
    eq = {int(v): xb == v for v in np.unique(xa)}
    # runs[i + 1, j + 1] = length of the common run ending at a[i], b[j]
    runs = np.zeros((na + 1, nb + 1), dtype=np.int32)
    tiles: list[Tile] = []
    while True:
        free_b = ~mark_b
        hit = {v: (m & free_b).astype(np.int32) for v, m in eq.items()}
        for i in range(na):
            row = runs[i + 1, 1:]
            if mark_a[i]:
                row[:] = 0
            else:
                np.add(runs[i, :-1], 1, out=row)
                row *= hit[int(xa[i])]
        row_max = runs.max(axis=1)
        longest = int(row_max.max())
        if longest < min_len:
            break
        ends = [
            (i - 1, j - 1)
            for i in np.flatnonzero(row_max == longest)
            for j in np.flatnonzero(runs[i] == longest)
        ]
        for i_end, j_end in ends:
            i0, j0 = i_end - longest + 1, j_end - longest + 1
            if mark_a[i0 : i_end + 1].any() or mark_b[j0 : j_end + 1].any():
                continue
            mark_a[i0 : i_end + 1] = True
            mark_b[j0 : j_end + 1] = True
            tiles.append(Tile(int(i0), int(j0), longest))
    if swapped:
        tiles = [Tile(t.b_start, t.a_start, t.length) for t in tiles]
    return tiles


def gst_similarity(
    a: str | TokenSeq, b: str | TokenSeq, min_match_len: int = 5, normalize: bool = True
) -> SimilarityScore:
    """``2 * covered / (len(a) + len(b))`` over greedy tiles."""
    params = {"min_match_len": min_match_len}
    ka, kb = _as_tokens(a, normalize).keys(), _as_tokens(b, normalize).keys()
    # identical sequences are one full tile, even below min_match_len
    if ka == kb:
        return SimilarityScore(1.0, "jplag-analog", params)
    covered = sum(t.length for t in greedy_string_tiling(ka, kb, min_match_len))
    return SimilarityScore(2 * covered / (len(ka) + len(kb)), "jplag-analog", params)


def overlap_similarity(
    a: str | TokenSeq, b: str | TokenSeq, min_run: int = 4, normalize: bool = True
) -> SimilarityScore:
    """Fraction of ``a``'s tokens inside runs shared with ``b``. Not symmetric."""
    params = {"min_run": min_run}
    ka, kb = _as_tokens(a, normalize).keys(), _as_tokens(b, normalize).keys()
    if ka == kb:
        return SimilarityScore(1.0, "sim-analog", params)
    if not ka:
        return SimilarityScore(0.0, "sim-analog", params)
    covered = sum(t.length for t in greedy_string_tiling(ka, kb, min_run))
    return SimilarityScore(covered / len(ka), "sim-analog", params)


# -- graph analog --------------------------------------------------------------


def netlist_graph(nl: Netlist) -> tuple[dict[str, str], list[tuple[str, str]]]:
    """Node labels and driver->reader edges of the gate graph.

    Gates are labelled by operator; primary and pseudo inputs ``IN``,
    constants ``CONST``, and each primary output gets an ``OUT`` terminal.
    """
    labels: dict[str, str] = {}
    edges: list[tuple[str, str]] = []

    def source(net: str) -> str:
        if nl.driver(net) is not None:
            return "g:" + nl.driver(net).name
        node = ("c:" if net in CONSTANTS else "i:") + net
        labels.setdefault(node, "CONST" if net in CONSTANTS else "IN")
        return node

    for net in nl.inputs:
        source(net)
    for g in nl.gates:
        labels["g:" + g.name] = g.op.value
    for g in nl.gates:
        for net in g.inputs:
            edges.append((source(net), "g:" + g.name))
    for net in nl.outputs:
        labels["o:" + net] = "OUT"
        edges.append((source(net), "o:" + net))
    return labels, edges


def _short_hash(text: str) -> str:
    return hashlib.blake2b(text.encode(), digest_size=8).hexdigest()


def wl_features(nl: Netlist, iterations: int = 3) -> Counter:
    labels, edges = netlist_graph(nl)
    preds: dict[str, list[str]] = {v: [] for v in labels}
    succs: dict[str, list[str]] = {v: [] for v in labels}
    for u, v in edges:
        succs[u].append(v)
        preds[v].append(u)
    hist = Counter(f"0:{l}" for l in labels.values())
    cur = labels
    for it in range(1, iterations + 1):
        cur = {
            v: _short_hash(
                cur[v]
                + "|" + ",".join(sorted(cur[u] for u in preds[v]))
                + "|" + ",".join(sorted(cur[u] for u in succs[v]))
            )
            for v in cur
        }
        hist.update(f"{it}:{l}" for l in cur.values())
    return hist


def wl_graph_similarity(a: Netlist, b: Netlist, iterations: int = 3) -> SimilarityScore:
    """Cosine similarity of Weisfeiler-Lehman label histograms."""
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    params = {"iterations": iterations}
    fa, fb = wl_features(a, iterations), wl_features(b, iterations)
    na = math.sqrt(sum(c * c for c in fa.values()))
    nb = math.sqrt(sum(c * c for c in fb.values()))
    if na == 0 or nb == 0:
        return SimilarityScore(1.0 if na == nb else 0.0, "gnn4ip-analog", params)
    dot = sum(c * fb[k] for k, c in fa.items())
    return SimilarityScore(min(1.0, max(0.0, dot / (na * nb))), "gnn4ip-analog", params)


# -- verdicts and registry -----------------------------------------------------

Verdict = Literal["pirated", "evaded"]


def verdict(score: SimilarityScore | float, threshold: float) -> Verdict:
    """Scores at or above the threshold count as piracy."""
    return "pirated" if float(score) >= threshold else "evaded"


@dataclass(frozen=True)
class Detector:
    name: str
    threshold: float
    params: dict
    fn: Callable[..., SimilarityScore]
    uses_graph: bool = False

    def with_options(self, threshold: float | None = None, **params) -> "Detector":
        unknown = set(params) - set(self.params)
        if unknown:
            raise ValueError(f"{self.name}: unknown parameters {sorted(unknown)}")
        return Detector(
            self.name,
            self.threshold if threshold is None else threshold,
            {**self.params, **params},
            self.fn,
            self.uses_graph,
        )

    def score(
        self,
        a: Netlist,
        b: Netlist,
        a_text: str | None = None,
        b_text: str | None = None,
    ) -> SimilarityScore:
        if self.uses_graph:
            return self.fn(a, b, **self.params)
        a_text = emit_netlist(a) if a_text is None else a_text
        b_text = emit_netlist(b) if b_text is None else b_text
        return self.fn(a_text, b_text, **self.params)


# GNN4IP's own threshold (0 on a [-1, 1] scale) does not carry over to a
# cosine of non-negative histograms; 0.5 is this analog's calibration.
DETECTORS: dict[str, Detector] = {
    "gnn4ip-analog": Detector("gnn4ip-analog", 0.5, {"iterations": 3}, wl_graph_similarity, True),
    "moss-analog": Detector("moss-analog", 0.2, {"k": 5, "w": 4}, winnow_similarity),
    "jplag-analog": Detector("jplag-analog", 0.3, {"min_match_len": 5}, gst_similarity),
    "sim-analog": Detector("sim-analog", 0.3, {"min_run": 4}, overlap_similarity),
}


def get_detector(name: str) -> Detector:
    try:
        return DETECTORS[name]
    except KeyError:
        raise KeyError(
            f"unknown detector {name!r}; choose from {', '.join(DETECTORS)}"
        ) from None


def match_details(a_text: str, b_text: str, k: int = 5, w: int = 4, min_match_len: int = 5) -> dict:
    """Shared fingerprints and tiles with character spans, for inspection."""
    ta, tb = tokenize(a_text), tokenize(b_text)
    fa, fb = fingerprints(ta, k, w), fingerprints(tb, k, w)
    shared = fa.hashes & fb.hashes

    def span(seq: TokenSeq, start: int, length: int) -> list[int]:
        return [seq.tokens[start].start, seq.tokens[start + length - 1].end]

    return {
        "shared_fingerprints": [
            {"hash": f"{h:016x}", "a_span": span(ta, pos, k)}
            for h, pos in fa.fingerprints
            if h in shared
        ],
        "tiles": [
            {"length": t.length, "a_span": span(ta, t.a_start, t.length), "b_span": span(tb, t.b_start, t.length)}
            for t in greedy_string_tiling(ta.keys(), tb.keys(), min_match_len)
        ],
    }

"""Feedback-guided rewriting, transformation dictionaries, and piracy
campaigns.

The flow: characterize the target netlists into gate types, ask a backend to
rewrite each gate type under each allowed operator set (with up to ``M``
checked attempts), cache the verified rewrites, then pirate netlists by
splicing rewrites in per gate according to a mapping strategy.
"""

from __future__ import annotations

import datetime as _dt
import enum
import hashlib
import json
import logging
import random
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Literal, Sequence

import numpy as np

from netrewrite.boolexpr import (
    BooleanCircuit,
    CircuitSyntaxError,
    compare,
    operators_used,
    parse_boolean_circuit,
)
from netrewrite.detectors import DETECTORS, Detector, verdict
from netrewrite.llm.backends import Backend, BackendError, ConfigError, Conversation
from netrewrite.llm.prompts import (
    CheckFailure,
    build_feedback_prompt,
    build_initial_prompt,
    build_netlist_prompt,
    extract_circuit_text,
)
from netrewrite.netlist import (
    GateType,
    Netlist,
    NetlistError,
    characterize,
    emit_netlist,
    overhead,
    parse_netlist,
    scan_interface,
    simulate,
)
from netrewrite.ops import Op, exhaustive_patterns, first_set_bit, n_words, valid_mask
from netrewrite.translate import (
    ALLOWED_OPERATOR_SETS,
    NameAllocator,
    OperatorSet,
    allowed_operator_sets,
    instantiate_transformation,
    netlist_to_statements,
    representative_circuit,
    statements_to_netlist,
)

log = logging.getLogger(__name__)

DEFAULT_ATTEMPTS = 5
DEFAULT_REPEATS = 5
DEFAULT_INPUT_CAP = 20
DEFAULT_SAMPLE_COUNT = 10_000
DICTIONARY_VERSION = 1


# -- feedback loop -------------------------------------------------------------


@dataclass
class SessionOutcome:
    gate_type: GateType
    operator_set: OperatorSet
    status: Literal["success", "exhausted", "aborted"]
    attempts_used: int
    failure_history: list[CheckFailure] = field(default_factory=list)
    circuit: BooleanCircuit | None = None
    error: str | None = None
    conversation: Conversation | None = field(default=None, repr=False)

    def summary(self) -> dict:
        return {
            "gate_type": str(self.gate_type),
            "operator_set": str(self.operator_set),
            "status": self.status,
            "attempts_used": self.attempts_used,
            "failures": [f.kind for f in self.failure_history],
            "error": self.error,
        }


def check_response(
    response: str, gate_type: GateType, ops: OperatorSet
) -> tuple[BooleanCircuit | None, CheckFailure | None]:
    """Syntax, then allowed operators, then exhaustive equivalence."""
    try:
        circuit = parse_boolean_circuit(extract_circuit_text(response))
    except CircuitSyntaxError as exc:
        return None, CheckFailure("syntax", str(exc))
    bad = operators_used(circuit) - set(ops.operators)
    if bad:
        used = ", ".join(sorted(op.value for op in bad))
        allowed = ", ".join(op.value for op in ops)
        return None, CheckFailure("operators", f"used {used}; allowed: {allowed}")
    result = compare(representative_circuit(gate_type), circuit)
    if not result.equivalent:
        detail = result.reason
        if result.counterexample:
            vec = ", ".join(f"{k}={v}" for k, v in result.counterexample.items())
            detail += f" (e.g. at {vec})"
        return None, CheckFailure("functionality", detail)
    return circuit, None


class _Transcript:
    def __init__(self, path: Path | None):
        self.fh = None
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            self.fh = open(path, "w", encoding="utf-8")

    def record(self, attempt, prompt, response, failure: CheckFailure | None) -> None:
        if self.fh is None:
            return
        rec = {
            "attempt": attempt,
            "prompt": prompt,
            "response": response,
            "check": "pass" if failure is None else failure.kind,
            "failure_detail": None if failure is None else failure.detail,
        }
        self.fh.write(json.dumps(rec) + "\n")
        self.fh.flush()

    def close(self) -> None:
        if self.fh is not None:
            self.fh.close()


def generate_transformation(
    gate_type: GateType,
    operator_set: OperatorSet,
    backend: Backend,
    attempts: int = DEFAULT_ATTEMPTS,
    *,
    transcript: Path | None = None,
    system_prompt: str | None = None,
) -> SessionOutcome:
    """Ask ``backend`` for a rewrite, feeding back check failures.

    Every failed check costs one attempt. Backend errors propagate and abort
    the session.
    """
    if attempts < 1:
        raise ValueError("attempts must be >= 1")
    known = ALLOWED_OPERATOR_SETS.get(gate_type.op, ())
    if operator_set not in known:
        raise ValueError(f"{operator_set} is not an allowed operator set for {gate_type}")
    original = representative_circuit(gate_type)
    conv = Conversation()
    if system_prompt:
        conv.append("system", system_prompt)
    prompt = build_initial_prompt(original, operator_set)
    history: list[CheckFailure] = []
    log_ = _Transcript(transcript)
    try:
        for attempt in range(1, attempts + 1):
            conv.user(prompt)
            response = backend.complete(conv)
            conv.assistant(response)
            circuit, failure = check_response(response, gate_type, operator_set)
            log_.record(attempt, prompt, response, failure)
            if failure is None:
                return SessionOutcome(
                    gate_type, operator_set, "success", attempt, history, circuit,
                    conversation=conv,
                )
            history.append(failure)
            prompt = build_feedback_prompt(failure, original)
    finally:
        log_.close()
    return SessionOutcome(
        gate_type, operator_set, "exhausted", attempts, history, conversation=conv
    )


# -- dictionary ----------------------------------------------------------------


@dataclass(frozen=True)
class Provenance:
    backend: str
    attempt: int
    timestamp: str


class DictionaryValidationError(ValueError):
    pass


class CoverageError(KeyError):
    def __str__(self) -> str:
        return str(self.args[0])


class TransformationDictionary:
    """Verified rewrites keyed by gate type, then operator set."""

    def __init__(self) -> None:
        self.entries: dict[GateType, dict[OperatorSet, BooleanCircuit]] = {}
        self.provenance: dict[tuple[GateType, OperatorSet], Provenance] = {}
        self.sessions: list[SessionOutcome] = []

    def add(
        self,
        gate_type: GateType,
        ops: OperatorSet,
        circuit: BooleanCircuit,
        provenance: Provenance | None = None,
    ) -> None:
        self.entries.setdefault(gate_type, {})[ops] = circuit
        if provenance is not None:
            self.provenance[gate_type, ops] = provenance

    def options(self, gate_type: GateType) -> list[tuple[OperatorSet, BooleanCircuit]]:
        """Entries for ``gate_type`` in allowed-table order."""
        found = self.entries.get(gate_type, {})
        order = {ops: i for i, ops in enumerate(ALLOWED_OPERATOR_SETS.get(gate_type.op, ()))}
        return sorted(found.items(), key=lambda kv: order.get(kv[0], len(order)))

    def gate_types(self) -> list[GateType]:
        return sorted(self.entries, key=GateType.sort_key)

    def covers(self, netlist: Netlist) -> list[GateType]:
        """Gate types of ``netlist`` with no entry at all."""
        return [gt for gt in characterize(netlist) if not self.entries.get(gt)]

    def __len__(self) -> int:
        return sum(len(v) for v in self.entries.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TransformationDictionary):
            return NotImplemented
        return self.entries == other.entries


def _session_name(gate_type: GateType, ops: OperatorSet) -> str:
    return f"{gate_type}_{'_'.join(op.value for op in ops)}"


def build_dictionary(
    gate_types: Iterable[GateType],
    backend: Backend,
    attempts: int = DEFAULT_ATTEMPTS,
    *,
    workers: int = 1,
    transcript_dir: Path | None = None,
    clock=None,
) -> TransformationDictionary:
    """Run one session per (gate type, allowed operator set) pair.

    Sessions are independent; with ``workers > 1`` they run on a thread pool
    (the backend must then be safe for concurrent use). Aborted sessions are
    recorded and do not stop the build.
    """
    clock = clock or (lambda: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))
    jobs = [
        (gt, ops)
        for gt in sorted(set(gate_types), key=GateType.sort_key)
        for ops in allowed_operator_sets(gt)
    ]

    def run(job):
        gt, ops = job
        path = transcript_dir / f"{_session_name(gt, ops)}.jsonl" if transcript_dir else None
        try:
            return generate_transformation(gt, ops, backend, attempts, transcript=path)
        except BackendError as exc:
            log.error("session %s %s aborted: %s", gt, ops, exc)
            return SessionOutcome(gt, ops, "aborted", 0, error=str(exc))

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            outcomes = list(pool.map(run, jobs))
    else:
        outcomes = [run(j) for j in jobs]

    result = TransformationDictionary()
    for out in outcomes:
        result.sessions.append(out)
        if out.status == "success":
            result.add(
                out.gate_type,
                out.operator_set,
                out.circuit,
                Provenance(getattr(backend, "name", "backend"), out.attempts_used, clock()),
            )
    return result


def save_dictionary(dictionary: TransformationDictionary, path) -> None:
    entries = []
    for gt in dictionary.gate_types():
        for ops, circuit in dictionary.options(gt):
            prov = dictionary.provenance.get((gt, ops))
            entries.append(
                {
                    "operator": gt.op.value,
                    "fan_in": gt.fan_in,
                    "operator_set": [op.value for op in ops],
                    "circuit_text": circuit.text,
                    "provenance": None if prov is None else prov.__dict__,
                }
            )
    Path(path).write_text(
        json.dumps({"version": DICTIONARY_VERSION, "entries": entries}, indent=2) + "\n",
        encoding="utf-8",
    )


def load_dictionary(path) -> TransformationDictionary:
    """Read a dictionary file and re-run all three checks on every entry."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if data.get("version") != DICTIONARY_VERSION:
        raise DictionaryValidationError(f"unsupported dictionary version {data.get('version')!r}")
    result = TransformationDictionary()
    for i, entry in enumerate(data.get("entries", [])):
        try:
            gt = GateType(Op.parse(entry["operator"]), int(entry["fan_in"]))
            ops = OperatorSet.of(*entry["operator_set"])
        except (KeyError, ValueError) as exc:
            raise DictionaryValidationError(f"entry {i}: malformed ({exc})") from None
        label = f"entry {i} ({gt} {ops})"
        if ops not in ALLOWED_OPERATOR_SETS.get(gt.op, ()):
            raise DictionaryValidationError(f"{label}: operator set not allowed for gate type")
        circuit, failure = check_response(entry.get("circuit_text", ""), gt, ops)
        if failure is not None:
            raise DictionaryValidationError(f"{label}: {failure.kind} check failed: {failure.detail}")
        prov = entry.get("provenance")
        result.add(gt, ops, circuit, Provenance(**prov) if prov else None)
    return result


# -- mapping strategies and piracy -----------------------------------------------


class MappingStrategy(str, enum.Enum):
    AND_NOT = "AND_NOT"
    NAND = "NAND"
    NOR = "NOR"
    OR_NOT = "OR_NOT"
    RANDOM = "RANDOM"

    @property
    def operator_set(self) -> OperatorSet | None:
        if self is MappingStrategy.RANDOM:
            return None
        return OperatorSet.of(*self.value.split("_"))

    @classmethod
    def parse(cls, name: str) -> "MappingStrategy":
        try:
            return cls(name.upper())
        except ValueError:
            raise ValueError(
                f"unknown strategy {name!r}; choose from {', '.join(s.value for s in cls)}"
            ) from None


ALL_STRATEGIES = tuple(MappingStrategy)


def select_transformation(
    dictionary: TransformationDictionary,
    gate_type: GateType,
    strategy: MappingStrategy,
    rng: random.Random,
) -> BooleanCircuit:
    """Pick the entry matching the strategy; otherwise a uniformly random one."""
    options = dictionary.options(gate_type)
    if not options:
        raise CoverageError(f"dictionary has no transformation for gate type {gate_type}")
    wanted = strategy.operator_set
    if wanted is not None:
        for ops, circuit in options:
            if ops == wanted:
                return circuit
    return rng.choice(options)[1]


def pirate_netlist(
    netlist: Netlist,
    dictionary: TransformationDictionary,
    strategy: MappingStrategy,
    rng: random.Random,
) -> Netlist:
    """Replace every gate by a selected rewrite; everything else is kept."""
    alloc = NameAllocator.for_netlist(netlist)
    gates = []
    wires = list(netlist.wires)
    for g in netlist.gates:
        circuit = select_transformation(dictionary, g.gate_type, strategy, rng)
        new_gates, fresh = instantiate_transformation(circuit, g, alloc)
        gates.extend(new_gates)
        wires.extend(fresh)
    return Netlist(
        netlist.module_name, netlist.ports, tuple(wires), tuple(gates), netlist.opaque_items
    )


# -- equivalence -----------------------------------------------------------------


@dataclass(frozen=True)
class EquivalenceVerdict:
    status: Literal["equivalent", "not_equivalent", "sampled_consistent"]
    vectors: int
    counterexample: dict[str, int] | None = None
    differing_output: str | None = None

    @property
    def ok(self) -> bool:
        return self.status != "not_equivalent"

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "vectors": self.vectors,
            "counterexample": self.counterexample,
            "differing_output": self.differing_output,
        }


_BLOCK_WORDS = 1 << 12


def verify_equivalence(
    original: Netlist,
    pirated: Netlist,
    input_cap: int = DEFAULT_INPUT_CAP,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    rng: random.Random | None = None,
) -> EquivalenceVerdict:
    """Simulate both netlists and compare every observed net.

    Exhaustive when the (pseudo-)input count is at most ``input_cap``,
    otherwise ``sample_count`` seeded random vectors.
    """
    if set(original.inputs) != set(pirated.inputs) or set(original.outputs) != set(pirated.outputs):
        raise NetlistError("netlists do not share the same primary inputs and outputs")
    ins_a, obs_a = scan_interface(original)
    ins_b, obs_b = scan_interface(pirated)
    inputs = tuple(dict.fromkeys(ins_a + ins_b))
    observe = [o for o in obs_a if o in set(obs_b)]
    n = len(inputs)

    def compare_block(stim: dict[str, np.ndarray], mask: np.ndarray):
        va = simulate(original, stim, observe)
        vb = simulate(pirated, stim, observe)
        for o in observe:
            idx = first_set_bit((va[o] ^ vb[o]) & mask)
            if idx is not None:
                return o, idx
        return None

    def vector_at(stim: dict[str, np.ndarray], idx: int) -> dict[str, int]:
        w, b = divmod(idx, 64)
        return {name: int((int(stim[name][w]) >> b) & 1) for name in inputs}

    if n <= input_cap:
        total = n_words(n)
        mask_all = valid_mask(n)
        for start in range(0, total, _BLOCK_WORDS):
            count = min(_BLOCK_WORDS, total - start)
            stim = dict(zip(inputs, exhaustive_patterns(n, start, count)))
            hit = compare_block(stim, mask_all[start : start + count])
            if hit is not None:
                o, idx = hit
                return EquivalenceVerdict(
                    "not_equivalent", 1 << n, vector_at(stim, idx), o
                )
        return EquivalenceVerdict("equivalent", 1 << n)

    rng = rng or random.Random(0)
    words = -(-sample_count // 64)
    stim = {
        name: np.frombuffer(rng.getrandbits(64 * words).to_bytes(8 * words, "little"), dtype="<u8").astype(np.uint64)
        for name in inputs
    }
    mask = np.full(words, np.uint64(0xFFFF_FFFF_FFFF_FFFF), dtype=np.uint64)
    if sample_count % 64:
        mask[-1] = np.uint64((1 << (sample_count % 64)) - 1)
    hit = compare_block(stim, mask)
    if hit is not None:
        o, idx = hit
        return EquivalenceVerdict("not_equivalent", sample_count, vector_at(stim, idx), o)
    return EquivalenceVerdict("sampled_consistent", sample_count)


# -- ablation: whole-netlist sessions ----------------------------------------------


@dataclass(frozen=True)
class Ablation:
    """Switches for the three pipeline stages.

    ``translation`` = Boolean-format prompts, ``characterization`` = per-gate
    divide and conquer, ``feedback`` = more than one checked attempt.
    Characterization relies on translation, so it cannot stay on alone.
    """

    translation: bool = True
    characterization: bool = True
    feedback: bool = True

    def __post_init__(self) -> None:
        if self.characterization and not self.translation:
            raise ConfigError("per-gate characterization requires Boolean-format translation")

    def attempts(self, requested: int) -> int:
        return requested if self.feedback else 1


_MODULE_RE = re.compile(r"\bmodule\b.*?\bendmodule\b", re.DOTALL)


@dataclass
class NetlistSessionOutcome:
    status: Literal["success", "exhausted", "aborted"]
    attempts_used: int
    failure_history: list[CheckFailure] = field(default_factory=list)
    netlist: Netlist | None = None
    error: str | None = None


def check_netlist_response(
    response: str, original: Netlist, ops: OperatorSet, translated: bool
) -> tuple[Netlist | None, CheckFailure | None]:
    try:
        if translated:
            body = extract_circuit_text(response)
            if not body:
                raise CircuitSyntaxError(None, "no assignment lines found")
            candidate = statements_to_netlist(body, original)
        else:
            m = _MODULE_RE.search(response)
            if m is None:
                return None, CheckFailure("syntax", "no module ... endmodule block found")
            candidate = parse_netlist(m.group())
    except (CircuitSyntaxError, NetlistError) as exc:
        return None, CheckFailure("syntax", str(exc))
    bad = {g.op for g in candidate.gates} - set(ops.operators)
    if bad:
        used = ", ".join(sorted(op.value for op in bad))
        return None, CheckFailure("operators", f"used {used}; allowed: {', '.join(op.value for op in ops)}")
    try:
        result = verify_equivalence(original, candidate)
    except NetlistError as exc:
        return None, CheckFailure("functionality", str(exc))
    if not result.ok:
        return None, CheckFailure("functionality", f"output {result.differing_output} differs")
    return candidate, None


def rewrite_whole_netlist(
    netlist: Netlist,
    ops: OperatorSet,
    backend: Backend,
    attempts: int,
    ablation: Ablation,
) -> NetlistSessionOutcome:
    """Single prompt for the entire netlist (characterization disabled)."""
    body = netlist_to_statements(netlist) if ablation.translation else emit_netlist(netlist)
    prompt = build_netlist_prompt(body, ops, ablation.translation)
    conv = Conversation()
    history: list[CheckFailure] = []
    attempts = ablation.attempts(attempts)
    for attempt in range(1, attempts + 1):
        conv.user(prompt)
        try:
            response = backend.complete(conv)
        except BackendError as exc:
            return NetlistSessionOutcome("aborted", attempt - 1, history, error=str(exc))
        conv.assistant(response)
        result, failure = check_netlist_response(response, netlist, ops, ablation.translation)
        if failure is None:
            return NetlistSessionOutcome("success", attempt, history, result)
        history.append(failure)
        prompt = build_feedback_prompt(failure, body)
    return NetlistSessionOutcome("exhausted", attempts, history)


# -- campaign -----------------------------------------------------------------------


@dataclass(frozen=True)
class CampaignTarget:
    name: str
    netlist: Netlist
    source: str | None = None

    @classmethod
    def from_path(cls, path) -> "CampaignTarget":
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        return cls(path.stem, parse_netlist(text), text)


def variant_seed(seed: int, netlist_name: str, strategy: MappingStrategy, repeat: int) -> int:
    """Per-variant seed, independent of scheduling order."""
    digest = hashlib.blake2b(
        f"{netlist_name}|{strategy.value}|{repeat}".encode(), digest_size=8
    ).digest()
    return seed ^ int.from_bytes(digest, "little")


@dataclass
class CampaignReport:
    metadata: dict
    netlists: list[dict]

    def to_dict(self) -> dict:
        return {"metadata": self.metadata, "netlists": self.netlists}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def best_scores(self, netlist: str) -> dict[str, float]:
        for entry in self.netlists:
            if entry["name"] == netlist:
                return {d: b["score"] for d, b in entry["best"].items()}
        raise KeyError(netlist)

    def table(self) -> str:
        detectors = list(self.metadata["detectors"])
        head = ["netlist", "gates", "variants", *detectors]
        rows = [head]
        for entry in self.netlists:
            row = [entry["name"], str(entry["gates"]), str(len(entry["variants"]))]
            for d in detectors:
                best = entry["best"].get(d)
                if best is None:
                    row.append("-")
                else:
                    mark = "evaded" if best["verdict"] == "evaded" else "FLAGGED"
                    row.append(f"{best['score']:.3f} {mark}")
            rows.append(row)
        widths = [max(len(r[i]) for r in rows) for i in range(len(head))]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
        lines.insert(1, "  ".join("-" * w for w in widths))
        thresholds = ", ".join(f"{d} {self.metadata['detectors'][d]['threshold']}" for d in detectors)
        lines.append(f"best (lowest) score per detector; thresholds: {thresholds}")
        return "\n".join(lines)


def _run_variant(
    target: CampaignTarget,
    original_text: str,
    dictionary: TransformationDictionary,
    strategy: MappingStrategy,
    repeat: int,
    seed: int,
    detectors: Sequence[Detector],
    input_cap: int,
    sample_count: int,
    keep_text: bool,
) -> dict:
    rng = random.Random(variant_seed(seed, target.name, strategy, repeat))
    record: dict = {"strategy": strategy.value, "repeat": repeat}
    try:
        pirated = pirate_netlist(target.netlist, dictionary, strategy, rng)
    except CoverageError as exc:
        record["error"] = str(exc)
        return record
    text = emit_netlist(pirated)
    record["equivalence"] = verify_equivalence(
        target.netlist, pirated, input_cap, sample_count, rng
    ).as_dict()
    record["overhead"] = overhead(target.netlist, pirated).as_dict()
    scores = {}
    for det in detectors:
        s = det.score(target.netlist, pirated, original_text, text)
        scores[det.name] = {"score": s.value, "verdict": verdict(s, det.threshold)}
    record["scores"] = scores
    if keep_text:
        record["netlist_text"] = text
    return record


def run_campaign(
    targets: Sequence[CampaignTarget],
    dictionary: TransformationDictionary,
    strategies: Sequence[MappingStrategy] = ALL_STRATEGIES,
    repeats: int = DEFAULT_REPEATS,
    detectors: Sequence[Detector] | None = None,
    seed: int = 0,
    *,
    workers: int = 1,
    input_cap: int = DEFAULT_INPUT_CAP,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    metadata: dict | None = None,
    keep_text: bool = False,
) -> CampaignReport:
    """Pirate every target ``repeats`` times per strategy and score each variant.

    Results depend only on ``seed``, never on ``workers``.
    """
    if repeats < 0:
        raise ValueError("repeats must be >= 0")
    detectors = list(DETECTORS.values()) if detectors is None else list(detectors)
    jobs = []
    for t in targets:
        original_text = t.source if t.source is not None else emit_netlist(t.netlist)
        for strategy in strategies:
            for r in range(1, repeats + 1):
                jobs.append((t, original_text, strategy, r))

    def run(job):
        t, text, strategy, r = job
        return _run_variant(
            t, text, dictionary, strategy, r, seed, detectors, input_cap, sample_count, keep_text
        )

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    per_target: dict[str, list[dict]] = {t.name: [] for t in targets}
    for (t, *_), rec in zip(jobs, results):
        per_target[t.name].append(rec)

    entries = []
    for t in targets:
        variants = per_target[t.name]
        entries.append(_summarize(t, variants, detectors, strategies))

    meta = {
        "seed": seed,
        "repeats": repeats,
        "strategies": [s.value for s in strategies],
        "detectors": {d.name: {"threshold": d.threshold, "params": d.params} for d in detectors},
        "input_cap": input_cap,
        "sample_count": sample_count,
        **(metadata or {}),
    }
    return CampaignReport(meta, entries)


def _summarize(target, variants, detectors, strategies) -> dict:
    scored = [v for v in variants if "scores" in v]
    best: dict[str, dict] = {}
    by_strategy: dict[str, dict] = {}
    evasion: dict[str, float | None] = {}
    for det in detectors:
        vals = [(v["scores"][det.name]["score"], v) for v in scored]
        if vals:
            score, v = min(vals, key=lambda sv: sv[0])
            best[det.name] = {
                "score": score,
                "strategy": v["strategy"],
                "repeat": v["repeat"],
                "verdict": verdict(score, det.threshold),
            }
            evaded = sum(1 for s, _ in vals if verdict(s, det.threshold) == "evaded")
            evasion[det.name] = evaded / len(vals)
        else:
            evasion[det.name] = None
        for strategy in strategies:
            sv = [v["scores"][det.name]["score"] for v in scored if v["strategy"] == strategy.value]
            if sv:
                by_strategy.setdefault(strategy.value, {})[det.name] = min(sv)
    return {
        "name": target.name,
        "gates": len(target.netlist.gates),
        "gate_types": [str(gt) for gt in characterize(target.netlist)],
        "variants": variants,
        "failed_variants": sum(1 for v in variants if "error" in v),
        "all_equivalent": all(v["equivalence"]["status"] != "not_equivalent" for v in scored),
        "best": best,
        "best_by_strategy": by_strategy,
        "evasion_rate": evasion,
    }

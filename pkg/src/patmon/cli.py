"""File formats, the ``patmon`` command line, and the bench harness.

Traces are plain text (one ``<thread> <op>`` event per line); alphabets
and specifications are small JSON documents.  Exit codes: 0 match,
1 no match, 2 usage or parse error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import baseline, gen, oracle
from .core import (ConcurrentAlphabet, EmptyLang, EpsilonLang, ExpansionCapError,
                   GeneralizedPattern, Label, Nfa, Pattern, Trace, Transition,
                   UnknownLabelError, gp_to_nfa, width)
from .monitor import MATCH, NO_MATCH, MatchReport, run_monitor

EXIT_MATCH = 0
EXIT_NO_MATCH = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class ParseError(ValueError):
    """Malformed input file; message carries file and line context."""


# ---------------------------------------------------------------------------
# Trace format
# ---------------------------------------------------------------------------

def parse_trace(path: str | Path, alphabet: ConcurrentAlphabet | None = None) -> Trace:
    """Read a trace file.

    Each non-blank line is ``<thread> <op>`` (whitespace separated); lines
    whose first non-blank character is ``#`` are comments.  Labels absent
    from the alphabet are auto-registered in thread-partition mode and
    rejected in explicit mode.  An empty file is the empty trace.
    """
    if alphabet is None:
        alphabet = ConcurrentAlphabet.thread_partition()
    labels: list[Label] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise ParseError(f"{path}:{lineno}: expected '<thread> <op>', got {stripped!r}")
            labels.append(Label(parts[0], parts[1]))
    try:
        alphabet = alphabet.with_labels(labels)
        return Trace(labels, alphabet)
    except UnknownLabelError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def write_trace(trace: Trace, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {len(trace)} events\n")
        for lab in trace.labels():
            fh.write(f"{lab.thread} {lab.op}\n")


# ---------------------------------------------------------------------------
# Alphabet format
# ---------------------------------------------------------------------------

def parse_alphabet(path: str | Path | None) -> ConcurrentAlphabet:
    """Read an alphabet JSON document; a missing path gives the default
    thread-partition alphabet with no conflicts (same-thread dependence only).

    Modes::

        {"mode": "thread-partition", "conflicts": [["op1","op2"], ...]}
        {"mode": "explicit-independent" | "explicit-dependent",
         "pairs": [[["t","op"], ["t","op"]], ...]}

    Either form may carry an optional ``"labels": [["t","op"], ...]`` list
    pre-declaring labels (explicit modes require all trace labels there).
    """
    if path is None:
        return ConcurrentAlphabet.thread_partition()
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    try:
        mode = doc["mode"]
        labels = [_label(entry) for entry in doc.get("labels", [])]
        if mode == "thread-partition":
            conflicts = [tuple(pair) for pair in doc.get("conflicts", [])]
            if any(len(p) != 2 for p in conflicts):
                raise ParseError(f"{path}: conflicts must be op pairs")
            return ConcurrentAlphabet.thread_partition(labels, conflicts)
        if mode in ("explicit-independent", "explicit-dependent"):
            pairs = [(_label(a), _label(b)) for a, b in doc.get("pairs", [])]
            for a, b in pairs:
                labels.extend((a, b))
            if mode == "explicit-independent":
                return ConcurrentAlphabet.explicit_independent(labels, pairs)
            return ConcurrentAlphabet.explicit_dependent(
                labels, [p for p in pairs if p[0] != p[1]])
        raise ParseError(f"{path}: unknown alphabet mode {mode!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{path}: bad alphabet document: {exc}") from exc


def write_alphabet(alphabet: ConcurrentAlphabet, path: str | Path) -> None:
    doc: dict = {"mode": alphabet.mode}
    if alphabet.mode == ConcurrentAlphabet.THREAD_PARTITION:
        doc["conflicts"] = sorted([min(p), max(p)] for p in alphabet.conflicts)
    else:
        doc["mode"] = "explicit-independent"
        doc["pairs"] = sorted([sorted([list(a), list(b)]) for a, b in
                               (sorted(p) for p in alphabet.independent_pairs)])
    doc["labels"] = sorted([t, o] for t, o in alphabet.labels)
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def _label(entry) -> Label:
    if (isinstance(entry, (list, tuple)) and len(entry) == 2
            and all(isinstance(x, str) for x in entry)):
        return Label(entry[0], entry[1])
    raise ParseError(f"labels must be [thread, op] string pairs, got {entry!r}")


# ---------------------------------------------------------------------------
# Specification format (pattern or NFA)
# ---------------------------------------------------------------------------

def parse_spec(path: str | Path) -> GeneralizedPattern | Nfa:
    """Read a specification JSON document.

    Pattern form: ``{"union": [{"pattern": [POS, ...]} | {"epsilon": true}
    | {"empty": true}, ...]}`` where POS is a label ``[t, op]`` or a list
    of labels (a per-position choice set).  NFA form: ``{"states": N,
    "initial": [...], "accepting": [...], "transitions": [{"from": i,
    "on": GUARD, "to": j}, ...]}`` with GUARD one of ``{"label": [t,op]}``,
    ``{"oneof": [[t,op], ...]}``, ``{"any": true}``.
    """
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    if "union" in doc:
        return _parse_pattern_spec(doc, path)
    if "states" in doc:
        return _parse_nfa_spec(doc, path)
    raise ParseError(f"{path}: expected a 'union' (pattern) or 'states' (NFA) document")


def _parse_position(entry, path) -> frozenset:
    # a position is one label or a list of labels
    if isinstance(entry, (list, tuple)) and entry and all(
            isinstance(x, (list, tuple)) for x in entry):
        return frozenset(_label(x) for x in entry)
    return frozenset((_label(entry),))


def _parse_pattern_spec(doc, path) -> GeneralizedPattern:
    disjuncts = []
    for item in doc["union"]:
        if not isinstance(item, dict):
            raise ParseError(f"{path}: bad disjunct {item!r}")
        if item.get("epsilon"):
            disjuncts.append(EpsilonLang())
        elif item.get("empty"):
            disjuncts.append(EmptyLang())
        elif "pattern" in item:
            try:
                disjuncts.append(Pattern(tuple(_parse_position(p, path)
                                               for p in item["pattern"])))
            except ValueError as exc:
                raise ParseError(f"{path}: {exc}") from exc
        else:
            raise ParseError(f"{path}: disjunct needs 'pattern', 'epsilon' or 'empty'")
    return GeneralizedPattern(tuple(disjuncts))


def _parse_nfa_spec(doc, path) -> Nfa:
    try:
        transitions = []
        for t in doc.get("transitions", []):
            on = t["on"]
            if "label" in on:
                guard = _label(on["label"])
            elif "oneof" in on:
                guard = frozenset(_label(x) for x in on["oneof"])
            elif on.get("any"):
                guard = None
            else:
                raise ParseError(f"{path}: bad transition guard {on!r}")
            transitions.append(Transition(t["from"], guard, t["to"]))
        return Nfa(doc["states"], frozenset(doc.get("initial", [])),
                   frozenset(doc.get("accepting", [])), tuple(transitions))
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: bad NFA document: {exc}") from exc


def write_spec(g: GeneralizedPattern, path: str | Path) -> None:
    union = []
    for d in g.disjuncts:
        if isinstance(d, EmptyLang):
            union.append({"empty": True})
        elif isinstance(d, EpsilonLang):
            union.append({"epsilon": True})
        else:
            union.append({"pattern": [[list(lab) for lab in sorted(pos)] if len(pos) > 1
                                      else list(next(iter(pos)))
                                      for pos in d.positions]})
    Path(path).write_text(json.dumps({"union": union}, indent=1) + "\n", encoding="utf-8")


def write_nfa(nfa: Nfa, path: str | Path) -> None:
    transitions = []
    for t in nfa.transitions:
        if t.guard is None:
            on: dict = {"any": True}
        elif isinstance(t.guard, frozenset):
            on = {"oneof": sorted(list(lab) for lab in t.guard)}
        else:
            on = {"label": list(t.guard)}
        transitions.append({"from": t.src, "on": on, "to": t.dst})
    doc = {"states": nfa.state_count, "initial": sorted(nfa.initial),
           "accepting": sorted(nfa.accepting), "transitions": transitions}
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Run configuration and reporting
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    """Everything one command invocation needs."""

    command: str
    trace: str | None = None
    alphabet: str | None = None
    spec: str | None = None
    nfa: str | None = None
    engine: str = "vc"
    early_exit: bool | None = None
    witness: bool = False
    max_ideals: int = baseline.DEFAULT_MAX_IDEALS
    expansion_cap: int = 1024
    oracle_limit: int = oracle.DEFAULT_LINEARIZATION_CAP
    checkpoint_every: int = 10_000
    seed: int = 0
    output: str = "human"
    out: str | None = None
    show_ideals: bool = False
    # generator knobs
    gen_kind: str | None = None
    k: int = 3
    d: int = 3
    n: int = 3
    threads: int = 3
    ops: int = 3
    length: int = 100
    dim: int = 3
    policy: str = "locality"
    thread_names: tuple[str, ...] = ()
    variables: tuple[str, ...] = ()


@dataclass
class BenchRecord:
    """One bench checkpoint: events consumed, cumulative wall time, live
    tracked entries (or ideal count for the baseline), verdict so far."""

    events: int
    wall_ms: float
    entries: int
    verdict: str = "RUNNING"


def _report_lines(report: MatchReport, out) -> None:
    print(f"verdict: {report.verdict}", file=out)
    print(f"events_processed: {report.events_processed}", file=out)
    if report.witness is not None:
        print(f"witness_disjunct: {report.witness.disjunct}", file=out)
        print(f"witness_events: {' '.join(map(str, report.witness.events))}", file=out)
        if report.witness.reordering is not None:
            print(f"witness_reordering: {' '.join(map(str, report.witness.reordering))}", file=out)
    for key in sorted(report.stats):
        print(f"stats.{key}: {report.stats[key]}", file=out)


def _report_json(report: MatchReport, out, extra_stats: dict | None = None) -> None:
    doc: dict = {"verdict": report.verdict,
                 "events_processed": report.events_processed}
    if report.witness is not None:
        doc["witness"] = {"disjunct": report.witness.disjunct,
                          "tuple": list(report.witness.events)}
        if report.witness.reordering is not None:
            doc["witness"]["reordering"] = list(report.witness.reordering)
    doc["stats"] = dict(report.stats)
    if extra_stats:
        doc["stats"].update(extra_stats)
    json.dump(doc, out)
    out.write("\n")


def _emit(report: MatchReport, config: RunConfig) -> int:
    if config.output == "json":
        _report_json(report, sys.stdout)
    else:
        _report_lines(report, sys.stdout)
    return EXIT_MATCH if report.verdict == MATCH else EXIT_NO_MATCH


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _load_spec_or_nfa(config: RunConfig):
    if config.nfa:
        return parse_spec(config.nfa)
    if config.spec:
        return parse_spec(config.spec)
    raise ParseError("a specification file is required (--spec or --nfa)")


def _cmd_monitor(config: RunConfig) -> int:
    trace = parse_trace(config.trace, parse_alphabet(config.alphabet))
    spec = _load_spec_or_nfa(config)
    if isinstance(spec, Nfa):
        raise ParseError("the streaming monitor needs a pattern specification, not an NFA")
    report = run_monitor(trace, spec, config.engine,
                         expansion_cap=config.expansion_cap,
                         want_reordering=config.witness)
    return _emit(report, config)


def _cmd_baseline(config: RunConfig) -> int:
    trace = parse_trace(config.trace, parse_alphabet(config.alphabet))
    spec = _load_spec_or_nfa(config)
    nfa = spec if isinstance(spec, Nfa) else gp_to_nfa(spec)
    report = baseline.run_baseline(trace, nfa, early_exit=config.early_exit,
                                   max_ideals=config.max_ideals)
    return _emit(report, config)


def _cmd_oracle(config: RunConfig) -> int:
    trace = parse_trace(config.trace, parse_alphabet(config.alphabet))
    spec = _load_spec_or_nfa(config)
    matched = oracle.predictive_membership_bruteforce(trace, spec, config.oracle_limit)
    report = MatchReport(MATCH if matched else NO_MATCH, len(trace),
                         stats={"engine": "bruteforce"})
    return _emit(report, config)


def _cmd_info(config: RunConfig) -> int:
    trace = parse_trace(config.trace, parse_alphabet(config.alphabet))
    doc = {"events": len(trace), "threads": len(trace.threads()),
           "labels": len(trace.alphabet)}
    doc["width"] = width(trace.alphabet) if len(trace.alphabet) else 0
    if config.show_ideals:
        doc["ideals"] = baseline.ideal_count(trace, config.max_ideals)
    if config.output == "json":
        json.dump(doc, sys.stdout)
        sys.stdout.write("\n")
    else:
        for key, value in doc.items():
            print(f"{key}: {value}")
    return EXIT_MATCH


def _cmd_bench(config: RunConfig) -> int:
    trace = parse_trace(config.trace, parse_alphabet(config.alphabet))
    spec = _load_spec_or_nfa(config)
    records: list[BenchRecord] = []
    start = time.perf_counter()

    def wall_ms() -> float:
        return (time.perf_counter() - start) * 1000.0

    if config.engine == "baseline":
        nfa = spec if isinstance(spec, Nfa) else gp_to_nfa(spec)
        report = baseline.run_baseline(trace, nfa, early_exit=config.early_exit,
                                       max_ideals=config.max_ideals)
        records.append(BenchRecord(report.events_processed, wall_ms(),
                                   report.stats["ideals"], report.verdict))
    else:
        if isinstance(spec, Nfa):
            raise ParseError("bench with a monitor engine needs a pattern specification")
        report = run_monitor(
            trace, spec, config.engine, expansion_cap=config.expansion_cap,
            want_reordering=False, checkpoint_every=config.checkpoint_every,
            on_checkpoint=lambda events, entries:
                records.append(BenchRecord(events, wall_ms(), entries)))
        records.append(BenchRecord(report.events_processed, wall_ms(),
                                   report.stats["peak_entries"], report.verdict))

    out = open(config.out, "w", newline="", encoding="utf-8") if config.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["events", "wall_ms", "entries", "verdict"])
        for rec in records:
            writer.writerow([rec.events, f"{rec.wall_ms:.3f}", rec.entries, rec.verdict])
    finally:
        if config.out:
            out.close()
    return EXIT_MATCH if report.verdict == MATCH else EXIT_NO_MATCH


def _cmd_gen(config: RunConfig) -> int:
    prefix = config.out
    if prefix is None:
        raise ParseError("gen needs --out PREFIX for its output files")
    written: list[str] = []

    def emit(suffix: str, writer, obj) -> None:
        target = f"{prefix}{suffix}"
        writer(obj, target)
        written.append(target)

    if config.gen_kind == "ov":
        instance = gen.OvInstance.random(config.k, config.d, config.n, config.seed)
        trace, alphabet, nfa = gen.gen_ov(instance)
        emit(".trace", write_trace, trace)
        emit(".alphabet.json", write_alphabet, alphabet)
        emit(".nfa.json", write_nfa, nfa)
    elif config.gen_kind == "random":
        trace, alphabet = gen.gen_random_trace(config.threads, config.ops,
                                               config.length, config.seed)
        emit(".trace", write_trace, trace)
        emit(".alphabet.json", write_alphabet, alphabet)
    elif config.gen_kind == "pattern":
        trace = parse_trace(config.trace, parse_alphabet(config.alphabet))
        sample = gen.sample_pattern(trace, config.dim, config.policy, config.seed)
        emit(".pattern.json", write_spec,
             GeneralizedPattern.of(sample.pattern))
        if sample.fallback:
            print("note: window shorter than dimension; sampled from the whole trace",
                  file=sys.stderr)
    elif config.gen_kind == "race-nfa":
        emit(".nfa.json", write_nfa, gen.race_nfa(config.thread_names, config.variables))
    else:
        raise ParseError(f"unknown generator: {config.gen_kind!r}")
    for name in written:
        print(name)
    return EXIT_MATCH


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit code."""
    commands = {"monitor": _cmd_monitor, "baseline": _cmd_baseline,
                "oracle": _cmd_oracle, "info": _cmd_info,
                "bench": _cmd_bench, "gen": _cmd_gen}
    try:
        return commands[config.command](config)
    except (ParseError, UnknownLabelError, FileNotFoundError, ValueError) as exc:
        if isinstance(exc, ExpansionCapError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BUDGET
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (baseline.IdealBudgetError, oracle.TruncatedEnumerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patmon",
        description="Predictive monitoring of concurrent execution logs")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_io(p, spec_optional=False):
        p.add_argument("--trace", required=True, help="trace file")
        p.add_argument("--alphabet", help="alphabet JSON (default: thread partition)")
        if not spec_optional:
            p.add_argument("--spec", help="pattern specification JSON")
            p.add_argument("--nfa", help="NFA specification JSON")
        p.add_argument("--output", choices=["human", "json"], default="human")

    p = sub.add_parser("monitor", help="streaming predictive monitor")
    common_io(p)
    p.add_argument("--engine", choices=["vc", "afterset"], default="vc")
    p.add_argument("--witness", action="store_true",
                   help="also emit a witness reordering on MATCH")
    p.add_argument("--expansion-cap", type=int, default=1024)

    p = sub.add_parser("baseline", help="ideal-enumeration engine (any NFA language)")
    common_io(p)
    p.add_argument("--early-exit", dest="early_exit", action="store_true", default=None)
    p.add_argument("--no-early-exit", dest="early_exit", action="store_false")
    p.add_argument("--max-ideals", type=int, default=baseline.DEFAULT_MAX_IDEALS)

    p = sub.add_parser("oracle", help="brute-force linearization oracle (small traces)")
    common_io(p)
    p.add_argument("--limit", type=int, default=oracle.DEFAULT_LINEARIZATION_CAP,
                   help="linearization enumeration cap")

    p = sub.add_parser("info", help="trace and alphabet statistics")
    common_io(p, spec_optional=True)
    p.add_argument("--ideals", action="store_true", help="also count ideals (small traces)")
    p.add_argument("--max-ideals", type=int, default=baseline.DEFAULT_MAX_IDEALS)

    p = sub.add_parser("bench", help="run an engine and emit a checkpoint CSV")
    common_io(p)
    p.add_argument("--engine", choices=["vc", "afterset", "baseline"], default="vc")
    p.add_argument("--checkpoint-every", type=int, default=10_000)
    p.add_argument("--early-exit", dest="early_exit", action="store_true", default=None)
    p.add_argument("--max-ideals", type=int, default=baseline.DEFAULT_MAX_IDEALS)
    p.add_argument("--out", help="CSV output path (default stdout)")

    p = sub.add_parser("gen", help="emit generated instances as input files")
    gsub = p.add_subparsers(dest="gen_kind", required=True)

    g = gsub.add_parser("ov", help="orthogonal-vectors stress instance")
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--d", type=int, default=3)
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="output path prefix")

    g = gsub.add_parser("random", help="seeded random trace")
    g.add_argument("--threads", type=int, default=3)
    g.add_argument("--ops", type=int, default=3)
    g.add_argument("--length", type=int, default=100)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="output path prefix")

    g = gsub.add_parser("pattern", help="sample a pattern from a trace")
    g.add_argument("--trace", required=True)
    g.add_argument("--alphabet")
    g.add_argument("--dim", type=int, default=3)
    g.add_argument("--policy", choices=["locality", "diversity"], default="locality")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="output path prefix")

    g = gsub.add_parser("race-nfa", help="adjacent-conflicting-access NFA")
    g.add_argument("--threads", required=True, help="comma-separated thread names")
    g.add_argument("--vars", required=True, help="comma-separated variable names")
    g.add_argument("--out", required=True, help="output path prefix")

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(command=args.command)
    for name in ("trace", "alphabet", "spec", "nfa", "engine", "early_exit",
                 "witness", "max_ideals", "expansion_cap", "seed", "output",
                 "out", "gen_kind", "k", "d", "n", "threads", "ops", "length",
                 "dim", "policy"):
        if hasattr(args, name) and getattr(args, name) is not None:
            setattr(config, name, getattr(args, name))
    if getattr(args, "limit", None) is not None:
        config.oracle_limit = args.limit
    if getattr(args, "checkpoint_every", None) is not None:
        config.checkpoint_every = args.checkpoint_every
    if getattr(args, "ideals", False):
        config.show_ideals = True
    return config


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    if args.command == "gen" and args.gen_kind == "race-nfa":
        config = RunConfig(command="gen", gen_kind="race-nfa", out=args.out,
                           thread_names=tuple(args.threads.split(",")),
                           variables=tuple(args.vars.split(",")))
        return run(config)
    return run(_config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())

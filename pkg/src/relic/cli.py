"""Command-line front end.

    relic rel eval          evaluate a term or closed formula over named relations
    relic hoare check       judge a correctness triple against an environment
    relic law check         validity of a law or quasi-equation over finite domains
    relic repr build        construct a relational model of a finite algebra
    relic repr verify       construct, then independently check the embedding
    relic game verify       replay the word-structure game lemmas for a given n
    relic game play         drive one game from built-in strategies or by hand
    relic game search       bounded search for a winning attack on an algebra
    relic game replay       re-judge a recorded game trace
    relic algebra check     test a finite algebra against an axiom class
    relic algebra enumerate list small algebras of a class up to a size bound

Exit codes: 0 success/valid, 1 counterexample or violation found (a witness
is printed), 2 usage or input error, 3 budget exhausted before a verdict.

Output is line-delimited ``key value ...`` records; ``--output text`` (the
default) appends human-oriented summary lines prefixed ``#``, and
``--output structured`` emits the bare records only.  All randomness
derives from ``--seed``, so equal invocations produce byte-equal output.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

from . import config
from .algebras import (
    CHECK_TAGS,
    FormatError,
    OrderedAlgebra,
    check_class,
    enumerate_small,
    format_algebra,
    parse_algebra,
)
from .game import (
    AnAlgebra,
    GameError,
    Init,
    format_move,
    new_game,
    parse_move,
    parse_network,
    play,
)
from .hoare import (
    HoareTriple,
    ProgramSyntaxError,
    denote,
    parse_program,
    parse_triple,
    partially_correct,
    totally_correct,
)
from .laws import BudgetError, check_validity, preset_suites
from .literals import parse_env
from .programs import Program, lift_demonic
from .represent import (
    represent_dual_zero,
    represent_preconstellation,
    represent_weak_zero,
    represent_zero_angelic,
    verify_embedding,
    zareckii,
)
from .strategies import (
    GridStrategy,
    InternalCheckError,
    LemmaLoseScript,
    StrategyExhausted,
    bounded_nonrep_search,
    verify_game_lemmas,
)
from .terms import FormulaError, eval_formula, eval_term, parse_formula, parse_term
from .relations import UNDEFINED


class UsageError(Exception):
    """Bad input or arguments; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """Execution envelope shared by every subcommand."""

    budget: int
    seed: int = 0
    workers: int = 1
    output: str = "text"
    self_check: bool = False

    def __post_init__(self):
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.output not in ("text", "structured"):
            raise ValueError(f"unknown output mode {self.output!r}")


class Emitter:
    """Line-delimited records, plus '#' comments in text mode."""

    def __init__(self, output: str, stream=None):
        self.output = output
        self.stream = stream if stream is not None else sys.stdout

    def record(self, line: str):
        print(line, file=self.stream)

    def block(self, text: str):
        for line in text.splitlines():
            self.record(line)

    def comment(self, text: str):
        if self.output == "text":
            for line in text.splitlines():
                print(f"# {line}", file=self.stream)


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def _load_env(path: str):
    try:
        return parse_env(_read_text(path))
    except FormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _load_algebra(path: str) -> OrderedAlgebra:
    try:
        return parse_algebra(_read_text(path))
    except FormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# rel eval
# ---------------------------------------------------------------------------

def _cmd_rel_eval(args, cfg: RunConfig, em: Emitter) -> int:
    space, binds = _load_env(args.env)
    if args.term is not None:
        term = parse_term(args.term)
        value = eval_term(term, binds, space)
        em.record(f"term {args.term.strip()}")
        if value is UNDEFINED:
            em.record("result undefined")
            em.comment("the constellation subterm has no common value")
        else:
            em.record(f"result {value}")
        return 0
    formula = parse_formula(args.formula)
    holds = eval_formula(formula, binds, space)
    em.record(f"formula {formula}")
    em.record(f"result {'true' if holds else 'false'}")
    return 0 if holds else 1


# ---------------------------------------------------------------------------
# hoare check
# ---------------------------------------------------------------------------

def _programs_from_env(space, binds):
    """Bindings as programs: relations over a fail-carrying space must
    already be program-shaped; fail-free relations are lifted demonically
    (unreached states go to fail)."""
    if space.has_fail:
        progs = {name: Program(rel) for name, rel in binds.items()}
        return progs, space
    progs = {name: lift_demonic(rel) for name, rel in binds.items()}
    if progs:
        pspace = next(iter(progs.values())).space
    else:
        pspace = space.extend_by_fail(_fresh_fail_name(space))
    return progs, pspace


def _fresh_fail_name(space) -> str:
    name = "0"
    while name in space.names:
        name += "'"
    return name


def _hoare_witness(triple: HoareTriple, total: bool):
    rel = triple.prog.rel
    space = rel.space
    fail = space.fail_index
    succ: dict = {}
    for a, b in rel.pairs():
        succ.setdefault(a, set()).add(b)
    for s in sorted(triple.pre.truth):
        out = succ.get(s, set())
        if total and fail in out:
            return space.names[s], "may fail to terminate"
        bad = sorted(b for b in out if b != fail and b not in triple.post.truth)
        if bad:
            return space.names[s], (
                f"reaches {space.names[bad[0]]} outside the postcondition")
    return None


def _cmd_hoare_check(args, cfg: RunConfig, em: Emitter) -> int:
    space, binds = _load_env(args.env)
    progs, pspace = _programs_from_env(space, binds)
    pre, body, post = parse_triple(args.triple, pspace)
    ast = parse_program(body, progs)
    prog = denote(ast, progs, pspace)
    triple = HoareTriple(pre, prog, post)
    total = args.mode == "total"
    holds = totally_correct(triple) if total else partially_correct(triple)
    em.record(f"triple {pre} {body.strip()} {post}")
    em.record(f"mode {args.mode}")
    if holds:
        em.record("result holds")
        return 0
    em.record("result fails")
    witness = _hoare_witness(triple, total)
    if witness is not None:
        state, why = witness
        em.record(f"witness state {state}: {why}")
    return 1


# ---------------------------------------------------------------------------
# law check
# ---------------------------------------------------------------------------

def _resolve_presets(name: str, n):
    suites = preset_suites()
    if name in suites:
        chosen = suites[name]
        if n is not None:
            tag = f"[n={n}]"
            chosen = [p for p in chosen if p.name.endswith(tag)]
            if not chosen:
                raise UsageError(f"preset {name} has no member with n={n}")
        return chosen
    members = {p.name: p for laws in suites.values() for p in laws}
    if name in members:
        return [members[name]]
    known = ", ".join(sorted(suites))
    raise UsageError(f"unknown preset {name!r} (suites: {known})")


def _formula_argument(text: str):
    if os.path.isfile(text):
        return parse_formula(_read_text(text))
    return parse_formula(text)


def _cmd_law_check(args, cfg: RunConfig, em: Emitter) -> int:
    sizes = tuple(args.size) if args.size else None
    if args.formula is not None:
        formula = _formula_argument(args.formula)
        jobs = [(str(formula), formula, args.domain or "REL",
                 sizes or (1, 2), args.mode or "exhaustive",
                 args.samples or 20000, None)]
    else:
        jobs = [(p.name, p.formula, args.domain or p.domain,
                 sizes or p.sizes, args.mode or p.mode,
                 args.samples or p.samples or 20000, p.expected)
                for p in _resolve_presets(args.preset, args.n)]

    bad = 0
    for name, formula, domain, law_sizes, mode, samples, expected in jobs:
        try:
            verdict = check_validity(
                formula, domain=domain, sizes=law_sizes, mode=mode,
                seed=cfg.seed, samples=samples, budget=cfg.budget,
                workers=cfg.workers)
        except BudgetError as exc:
            em.record(f"law {name}")
            em.record("verdict inconclusive")
            em.comment(str(exc))
            return 3
        em.record(f"law {name}")
        em.record(f"formula {verdict.formula}")
        em.record(f"domain {verdict.domain}")
        em.record("sizes " + " ".join(map(str, verdict.sizes)))
        em.record(f"mode {verdict.mode}")
        em.record(f"evaluations {verdict.evaluations}")
        if expected is not None:
            em.record(f"expected {expected}")
        cx = verdict.counterexample
        if cx is None:
            em.record("verdict valid")
        else:
            bad += 1
            em.record(f"counterexample size {cx.size}")
            for var, rel in cx.assignment:
                em.record(f"assign {var} {rel}")
            em.record("verdict counterexample")
        if expected is not None:
            got = "valid" if cx is None else "counterexample"
            if got != expected:
                em.comment(f"{name}: verdict differs from the recorded "
                           f"expectation ({expected})")
    em.record(f"laws {len(jobs)} counterexamples {bad}")
    return 1 if bad else 0


# ---------------------------------------------------------------------------
# repr build / verify
# ---------------------------------------------------------------------------

_METHODS = {
    # method -> (required class tag, constructor)
    "zareckii": ("ordered_semigroup", lambda alg, variant: zareckii(alg)),
    "weak-zero": ("weak_zero", lambda alg, variant: represent_weak_zero(alg)),
    "zero-angelic": ("zero", lambda alg, variant: represent_zero_angelic(alg)),
    "dual-zero": ("dual_zero",
                  lambda alg, variant: represent_dual_zero(alg, mode=variant)),
    "preconstellation": ("preconstellation",
                         lambda alg, variant: represent_preconstellation(alg)),
}

# auto tries the most structured applicable class first
_AUTO_ORDER = ("preconstellation", "dual-zero", "zero-angelic", "weak-zero",
               "zareckii")


def _build_representation(alg, method: str, variant: str, em: Emitter):
    """Returns (method, representation) or None after printing violations."""
    if method == "auto":
        for cand in _AUTO_ORDER:
            tag, build = _METHODS[cand]
            if not check_class(alg, tag).violations:
                return cand, build(alg, variant)
        method = "zareckii"  # fall through to report why it fails
    tag, build = _METHODS[method]
    report = check_class(alg, tag)
    if report.violations:
        em.record(f"class {tag} violations {len(report.violations)}")
        for v in report.violations:
            em.record(f"violation {v.law} at {v.witness}: {v.detail}")
        return None
    return method, build(alg, variant)


def _cmd_repr_build(args, cfg: RunConfig, em: Emitter) -> int:
    alg = _load_algebra(args.algebra)
    em.record(f"algebra {args.algebra}")
    built = _build_representation(alg, args.method, args.variant, em)
    if built is None:
        em.record("verdict not-in-class")
        return 1
    method, rep = built
    em.record(f"method {method}")
    em.block(format_representation(rep))
    em.record("verdict built")
    return 0


def _cmd_repr_verify(args, cfg: RunConfig, em: Emitter) -> int:
    alg = _load_algebra(args.algebra)
    em.record(f"algebra {args.algebra}")
    built = _build_representation(alg, args.method, args.variant, em)
    if built is None:
        em.record("verdict not-in-class")
        return 1
    method, rep = built
    em.record(f"method {method}")
    em.block(format_representation(rep))
    report = verify_embedding(rep)
    for v in report.violations:
        em.record(f"violation {v.law} at {v.witness}: {v.detail}")
    if report.ok:
        em.record("verdict embedding")
        return 0
    em.record("verdict violations")
    return 1


# ---------------------------------------------------------------------------
# game verify
# ---------------------------------------------------------------------------

def _cmd_game_verify(args, cfg: RunConfig, em: Emitter) -> int:
    report = verify_game_lemmas(args.n, samples=args.samples, seed=cfg.seed,
                                init_len=args.init_len, budget=cfg.budget)
    em.record(f"n {report.n}")
    em.record(f"script-won {'true' if report.script_won else 'false'}")
    em.record(f"script-leaves {report.script_leaves}")
    em.record(f"script-max-rounds {report.script_max_rounds}")
    em.record(f"grid-mode {report.grid_mode}")
    em.record(f"grid-sequences {report.grid_sequences}")
    em.record(f"grid-checks {report.grid_checks}")
    em.record(f"violations {len(report.violations)}")
    for v in report.violations:
        em.record(f"violation {v}")
    em.comment(report.summary())
    if report.inconclusive:
        em.record("verdict inconclusive")
        return 3
    if report.ok:
        em.record("verdict ok")
        return 0
    em.record("verdict violations")
    return 1


# ---------------------------------------------------------------------------
# game play
# ---------------------------------------------------------------------------

def _prompt(text: str):
    """Read one input line, prompting on stderr; None at end of input."""
    print(text, end="", file=sys.stderr, flush=True)
    line = sys.stdin.readline()
    if not line:
        print(file=sys.stderr)
        return None
    return line.strip()

def _read_network_block():
    """Network lines from stdin up to 'end'; None at end of input."""
    lines = []
    while True:
        line = _prompt("  | " if lines else "network> ")
        if line is None:
            return None
        if line == "end":
            return "\n".join(lines)
        if line:
            lines.append(line)


def _cmd_game_play(args, cfg: RunConfig, em: Emitter) -> int:
    alg = AnAlgebra(args.n)
    script = LemmaLoseScript(args.n) if args.forall == "script" else None
    grid = GridStrategy(args.n) if args.exists == "grid" else None
    limit = args.rounds if args.rounds is not None else args.n + 3

    em.record(f"game n {args.n}")
    if script is None:
        em.comment("enter moves like: init s0t s3t / witness m0 m1 s0 t")
    if grid is None:
        em.comment("enter responses as network lines, closed by a line 'end'")

    state = new_game()
    gstate = None
    rounds = 0
    result, note = "open", "round-limit"
    while rounds < limit:
        if script is not None:
            try:
                move = script.next_move(alg, state)
            except InternalCheckError:
                result, note = "open", "script-stuck"
                break
            if move is None:
                result, note = "open", "script-finished"
                break
        else:
            line = _prompt("move> ")
            if line is None:
                result, note = "open", "input-exhausted"
                break
            move = parse_move(alg, line)
        em.record("move " + format_move(alg, move))

        if grid is not None:
            try:
                if not state.initialised:
                    gstate, resp = grid.initial(move)
                else:
                    gstate, resp = grid.respond(gstate, move)
            except StrategyExhausted as exc:
                em.comment(str(exc))
                result, note = "open", "strategy-exhausted"
                break
        else:
            block = _read_network_block()
            if block is None:
                result, note = "open", "input-exhausted"
                break
            resp = parse_network(alg, block)
        state = play(alg, state, move, resp)
        em.record("response")
        em.block(resp.describe(alg))
        em.record("end")
        x0, y0, b0 = state.pledge
        em.record(f"pledge {x0} {y0} {alg.format(b0)}")
        rounds += 1
        if state.forall_won:
            result, note = "forall", None
            break

    line = f"result {result} rounds {rounds}"
    if note is not None:
        line += f" note {note}"
    em.record(line)
    if result == "forall":
        em.comment("the universal player has won: the pledge is refuted")
    return 0


# ---------------------------------------------------------------------------
# game replay
# ---------------------------------------------------------------------------

def _parse_trace(path: str):
    """Trace records -> (n, [(lineno, move_text, net_text, pledge)], result).

    result is (lineno, kind, rounds, note) from the final result line.
    """
    lines = _read_text(path).splitlines()
    n = None
    steps = []
    result = None
    i = 0

    def bad(lineno, msg):
        return UsageError(f"{path}:{lineno}: {msg}")

    while i < len(lines):
        lineno, raw = i + 1, lines[i].strip()
        i += 1
        if not raw or raw.startswith("#"):
            continue
        fields = raw.split()
        if n is None:
            if fields[:2] != ["game", "n"] or len(fields) != 3:
                raise bad(lineno, "expected a 'game n <N>' header")
            try:
                n = int(fields[2])
            except ValueError:
                raise bad(lineno, f"bad n {fields[2]!r}") from None
            continue
        if fields[0] == "move":
            move_text = raw[len("move"):].strip()
            # the response block must follow
            while i < len(lines) and not lines[i].strip():
                i += 1
            if i >= len(lines) or lines[i].strip() != "response":
                raise bad(lineno, "move record without a response block")
            i += 1
            net_lines = []
            net_line_no = i + 1
            while i < len(lines) and lines[i].strip() != "end":
                net_lines.append(lines[i])
                i += 1
            if i >= len(lines):
                raise bad(net_line_no, "response block not closed by 'end'")
            i += 1
            pledge = None
            if i < len(lines) and lines[i].strip().startswith("pledge "):
                pledge = tuple(lines[i].split()[1:])
                if len(pledge) != 3:
                    raise bad(i + 1, "pledge takes a node pair and an element")
                i += 1
            steps.append((lineno, move_text, "\n".join(net_lines), pledge))
        elif fields[0] == "result":
            if len(fields) < 4 or fields[1] not in ("forall", "open") \
                    or fields[2] != "rounds":
                raise bad(lineno, "malformed result line")
            try:
                rounds = int(fields[3])
            except ValueError:
                raise bad(lineno, f"bad round count {fields[3]!r}") from None
            note = fields[5] if len(fields) >= 6 and fields[4] == "note" else None
            result = (lineno, fields[1], rounds, note)
        else:
            raise bad(lineno, f"unknown record {fields[0]!r}")
    if n is None:
        raise UsageError(f"{path}: empty trace")
    return n, steps, result


def _cmd_game_replay(args, cfg: RunConfig, em: Emitter) -> int:
    n, steps, result = _parse_trace(args.trace)
    alg = AnAlgebra(n)
    em.record(f"game n {n}")
    state = new_game()
    for lineno, move_text, net_text, pledge in steps:
        try:
            move = parse_move(alg, move_text)
            resp = parse_network(alg, net_text)
        except GameError as exc:
            raise UsageError(f"{args.trace}:{lineno}: {exc}") from None
        try:
            state = play(alg, state, move, resp)
        except GameError as exc:
            em.record(f"violation line {lineno}: {exc}")
            em.record("verdict illegal")
            return 1
        if pledge is not None:
            x0, y0, b0 = state.pledge
            got = (x0, y0, alg.format(b0))
            if tuple(pledge) != got:
                em.record(f"violation line {lineno}: pledge {' '.join(pledge)} "
                          f"recorded, {' '.join(got)} derived")
                em.record("verdict mismatch")
                return 1
    em.record(f"replayed {len(steps)} moves")
    if result is not None:
        lineno, kind, rounds, _ = result
        claims_win = kind == "forall"
        if rounds != len(steps):
            em.record(f"violation line {lineno}: result says {rounds} rounds, "
                      f"trace has {len(steps)}")
            em.record("verdict mismatch")
            return 1
        if claims_win != state.forall_won:
            derived = "forall" if state.forall_won else "open"
            em.record(f"violation line {lineno}: result {kind} recorded, "
                      f"{derived} derived")
            em.record("verdict mismatch")
            return 1
        em.record(f"result {kind} confirmed")
    em.record("verdict ok")
    return 0


# ---------------------------------------------------------------------------
# game search
# ---------------------------------------------------------------------------

def _emit_attack(em: Emitter, alg, tree, depth=0):
    if tree.move is not None:
        em.record(f"attack {depth} {format_move(alg, tree.move)}")
    for _, sub in tree.branches:
        _emit_attack(em, alg, sub, depth + 1)


def _cmd_game_search(args, cfg: RunConfig, em: Emitter) -> int:
    alg = _load_algebra(args.algebra)
    with_identity = {"auto": None, "on": True, "off": False}[args.identity]
    verdict = bounded_nonrep_search(alg, args.depth,
                                    with_identity=with_identity,
                                    budget=cfg.budget,
                                    saturate_steps=args.saturate_steps)
    em.record(f"algebra {args.algebra}")
    em.record(f"depth {args.depth}")
    em.record(f"kind {verdict.kind}")
    em.record(f"nodes-explored {verdict.nodes_explored}")
    for note in verdict.notes:
        em.record(f"note {note}")
    em.comment(verdict.summary())
    if verdict.kind == "not-representable":
        a, b = verdict.init
        em.record(f"init {a} {b}")
        em.record(f"tree-depth {verdict.tree.depth()}")
        em.record(f"tree-size {verdict.tree.size()}")
        from .game import TableAlgebra
        galg = TableAlgebra(alg)
        _emit_attack(em, galg, verdict.tree)
        em.record("verdict attack-found")
        return 1
    if verdict.kind == "saturated" and verdict.embedding is not None \
            and verdict.embedding.ok:
        em.block(format_representation(verdict.representation))
        em.record("verdict embedding-verified")
        return 0
    em.record("verdict inconclusive")
    return 3


# ---------------------------------------------------------------------------
# algebra check / enumerate
# ---------------------------------------------------------------------------

def _cmd_algebra_check(args, cfg: RunConfig, em: Emitter) -> int:
    alg = _load_algebra(args.algebra)
    em.record(f"algebra {args.algebra}")
    tags = [args.cls] if args.cls else list(CHECK_TAGS)
    bad = 0
    for tag in tags:
        report = check_class(alg, tag)
        if report.violations:
            bad += 1
            em.record(f"class {tag} violations {len(report.violations)}")
            if args.cls:
                for v in report.violations:
                    em.record(f"violation {v.law} at {v.witness}: {v.detail}")
        else:
            em.record(f"class {tag} member")
        for note in report.notes:
            em.comment(f"{tag}: {note}")
    if args.cls:
        em.record("verdict member" if not bad else "verdict violations")
        return 1 if bad else 0
    em.record(f"classes {len(tags)} failed {bad}")
    return 0


def _cmd_algebra_enumerate(args, cfg: RunConfig, em: Emitter) -> int:
    count = 0
    truncated = False
    for alg in enumerate_small(args.cls, args.size):
        if args.limit is not None and count >= args.limit:
            truncated = True
            break
        count += 1
        em.record(f"algebra {count}")
        em.block(format_algebra(alg))
    em.record(f"count {count}")
    if truncated:
        em.record("note limit reached")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    run = common.add_argument_group("run options")
    run.add_argument("--seed", type=int, default=0,
                     help="seed for every random choice (default 0)")
    run.add_argument("--budget", type=int, default=None,
                     help="work budget per check (default: RELIC_BUDGET "
                          "or %d)" % config.default_budget())
    run.add_argument("--workers", type=int, default=1,
                     help="worker threads for sweeps (default 1)")
    run.add_argument("--output", choices=("text", "structured"),
                     default="text",
                     help="text adds '#' summary lines; structured is "
                          "records only")
    run.add_argument("--self-check", action="store_true",
                     help="run redundant internal cross-checks")

    top = argparse.ArgumentParser(
        prog="relic",
        description="Finite relation algebras of non-deterministic programs.")
    sub = top.add_subparsers(dest="command", required=True, metavar="GROUP")

    # rel ------------------------------------------------------------------
    rel = sub.add_parser("rel", help="concrete relation evaluation")
    rsub = rel.add_subparsers(dest="subcommand", required=True)
    p = rsub.add_parser("eval", parents=[common],
                        help="evaluate a term or closed formula over an "
                             "environment of named relations")
    p.add_argument("--env", required=True, metavar="FILE",
                   help="relation environment file")
    what = p.add_mutually_exclusive_group(required=True)
    what.add_argument("--term", help="term over the environment names")
    what.add_argument("--formula",
                      help="closed formula; exit 0 if it holds, 1 if not")
    p.set_defaults(handler=_cmd_rel_eval)

    # hoare ----------------------------------------------------------------
    hoare = sub.add_parser("hoare", help="correctness triples")
    hsub = hoare.add_subparsers(dest="subcommand", required=True)
    p = hsub.add_parser("check", parents=[common],
                        help="judge a correctness triple like "
                             "\"{1} a;b {2}\" against an environment")
    p.add_argument("--env", required=True, metavar="FILE")
    p.add_argument("--triple", required=True,
                   help="\"{pre} program {post}\"")
    p.add_argument("--mode", choices=("partial", "total"), default="partial")
    p.set_defaults(handler=_cmd_hoare_check)

    # law ------------------------------------------------------------------
    law = sub.add_parser("law", help="law and quasi-equation validity")
    lsub = law.add_subparsers(dest="subcommand", required=True)
    p = lsub.add_parser("check", parents=[common],
                        help="check a formula or a named preset family")
    what = p.add_mutually_exclusive_group(required=True)
    what.add_argument("--formula", metavar="FILE|TEXT",
                      help="formula text, or a path to a file holding one")
    what.add_argument("--preset",
                      help="preset suite or member name (see the docs)")
    p.add_argument("--n", type=int, default=None,
                   help="pick the n-indexed member of a preset family")
    p.add_argument("--domain", default=None,
                   help="REL, LTREL, TOTAL or LTREL0 "
                        "(default: preset's own, else REL)")
    p.add_argument("--size", type=int, action="append", default=None,
                   help="carrier size to sweep; repeatable (default 1 2)")
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default=None)
    p.add_argument("--samples", type=int, default=None,
                   help="assignments drawn in sampled mode")
    p.set_defaults(handler=_cmd_law_check)

    # repr -----------------------------------------------------------------
    rep = sub.add_parser("repr", help="representation constructions")
    psub = rep.add_subparsers(dest="subcommand", required=True)
    for name, help_text, handler in (
            ("build", "construct a relational model", _cmd_repr_build),
            ("verify", "construct and check the embedding", _cmd_repr_verify)):
        p = psub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--algebra", required=True, metavar="FILE")
        p.add_argument("--method", default="auto",
                       choices=("auto",) + tuple(_METHODS),
                       help="construction to use (default: best applicable)")
        p.add_argument("--variant", default="total_angelic",
                       choices=("total_angelic", "demonic"),
                       help="dual-zero only: target operations")
        p.set_defaults(handler=handler)

    # game -----------------------------------------------------------------
    game = sub.add_parser("game", help="the representation game")
    gsub = game.add_subparsers(dest="subcommand", required=True)

    p = gsub.add_parser("verify", parents=[common],
                        help="check the scripted win and the grid survival "
                             "strategy on the word structure for n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=10000,
                   help="move sequences drawn when n is too large to "
                        "exhaust (default 10000)")
    p.add_argument("--init-len", type=int, default=2,
                   help="word length bound for sampled openings")
    p.set_defaults(handler=_cmd_game_verify)

    p = gsub.add_parser("play", parents=[common],
                        help="play one game; the record on stdout can be "
                             "fed back to game replay")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--forall", choices=("script", "manual"), default="script",
                   help="universal player (manual reads moves from stdin)")
    p.add_argument("--exists", choices=("grid", "manual"), default="grid",
                   help="existential player (manual reads networks from "
                        "stdin)")
    p.add_argument("--rounds", type=int, default=None,
                   help="round limit (default n+3)")
    p.set_defaults(handler=_cmd_game_play)

    p = gsub.add_parser("search", parents=[common],
                        help="bounded search for a winning attack on a "
                             "finite algebra")
    p.add_argument("--algebra", required=True, metavar="FILE")
    p.add_argument("--depth", type=int, required=True,
                   help="attack depth after the opening")
    p.add_argument("--identity", choices=("auto", "on", "off"),
                   default="auto",
                   help="play the identity-aware variant (auto: when the "
                        "algebra has an identity)")
    p.add_argument("--saturate-steps", type=int, default=400,
                   help="survival-play length before extracting a model")
    p.set_defaults(handler=_cmd_game_search)

    p = gsub.add_parser("replay", parents=[common],
                        help="re-judge a recorded game trace")
    p.add_argument("--trace", required=True, metavar="FILE")
    p.set_defaults(handler=_cmd_game_replay)

    # algebra --------------------------------------------------------------
    algebra = sub.add_parser("algebra", help="finite ordered algebras")
    asub = algebra.add_subparsers(dest="subcommand", required=True)

    p = asub.add_parser("check", parents=[common],
                        help="test an algebra against one axiom class, or "
                             "survey all of them")
    p.add_argument("--algebra", required=True, metavar="FILE")
    p.add_argument("--class", dest="cls", default=None, choices=CHECK_TAGS,
                   help="single class to check (exit 1 on violation); "
                        "omit for a survey of every class")
    p.set_defaults(handler=_cmd_algebra_check)

    p = asub.add_parser("enumerate", parents=[common],
                        help="list the algebras of a class up to a size")
    p.add_argument("--class", dest="cls", required=True, choices=CHECK_TAGS)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--limit", type=int, default=None,
                   help="stop after this many algebras")
    p.set_defaults(handler=_cmd_algebra_enumerate)

    return top


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(
            budget=args.budget if args.budget is not None
            else config.default_budget(),
            seed=args.seed,
            workers=args.workers,
            output=args.output,
            self_check=args.self_check,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    previous = config.self_check_enabled()
    if cfg.self_check:
        config.set_self_check(True)
    em = Emitter(cfg.output)
    try:
        return args.handler(args, cfg, em)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 3
    except (FormatError, FormulaError, GameError, ProgramSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (KeyError, ValueError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2
    finally:
        config.set_self_check(previous)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: compile, check, run, step, ops."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .automaton.algebra import (
    complement_deterministic,
    concatenation,
    intersection,
    kleene_star,
    sigma11_to_fo,
    union,
)
from .automaton.model import Automaton, AutomatonError
from .automaton.oracle import (
    DeterminismViolation,
    Oracle,
    check_completeness_bounded,
    check_determinism_bounded,
    initial_state_deterministic,
    step_deterministic,
)
from .compile.encode import EncodingError, compile_foltl, compile_pure_past
from .compile.monadic import monadic_to_finite_control
from .core.signature import Signature, SignatureError
from .core.structure import Structure, StructureError, Word, validate_word
from .core.theory import SmtConfig, Theory, TheoryError
from .emptiness.procedures import (
    DEFAULT_KMAX,
    BoundExhausted,
    Empty,
    Inconclusive,
    NotEmpty,
    SolverConfig,
    SolverFailure,
    decide_finite_control,
    non_empty_semi,
    verdict_line,
)
from .emptiness.smtlib import EmissionError
from .emptiness.solver import SolverSpawnError
from .foltl.parser import ParseError, SortError, parse_formula
from .frontends.dmt import encode_dmt, load_dmt
from .frontends.presets import int_theory
from .frontends.sfa import SchemaError, encode_sfa, guard_axioms, load_sfa

log = logging.getLogger("foautomata")

EXIT_NOTEMPTY, EXIT_EMPTY, EXIT_BOUND, EXIT_INCONCLUSIVE, EXIT_ERROR = 0, 1, 2, 3, 4
EXIT_ACCEPT, EXIT_REJECT = 0, 1

CONFIG_KEYS = {
    "solver": "solver",
    "logic": "logic",
    "timeout": "timeout",
    "kmax": "kmax",
    "dump_smt": "dump_smt",
    "domain_bound": "domain_bound",
    "exactly_one_action": "exactly_one_action",
}
DEFAULTS = {
    "solver": None,
    "logic": None,
    "timeout": 30.0,
    "kmax": DEFAULT_KMAX,
    "dump_smt": None,
    "domain_bound": 2,
    "exactly_one_action": True,
}


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # Usage errors share the generic error code; 2 is taken by BOUND.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise CliError(f"{path}: invalid JSON ({e})") from e


def _write(path: str | None, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def resolve_config(args) -> dict:
    """Defaults, then the config file, then explicit flags."""
    cfg = dict(DEFAULTS)
    if args.config:
        raw = _read_json(args.config)
        unknown = set(raw) - set(CONFIG_KEYS)
        if unknown:
            raise CliError(f"{args.config}: unknown config keys {sorted(unknown)}")
        cfg.update(raw)
    for key in CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    if cfg["timeout"] is None or float(cfg["timeout"]) <= 0:
        raise CliError("timeout must be positive")
    if int(cfg["kmax"]) < 0:
        raise CliError("kmax must be non-negative")
    if int(cfg["domain_bound"]) < 1:
        raise CliError("domain bound must be at least 1")
    return cfg


def load_automaton(path: str) -> Automaton:
    return Automaton.from_json(_read_json(path))


def _load_input(args, cfg) -> tuple[Automaton, Theory | None]:
    """The automaton to check plus the theory implied by its source format."""
    fmt = args.input_format
    if fmt == "sfa":
        m = load_sfa(args.automaton)
        a = encode_sfa(m, with_guard_theory=m.sort == "Int")
        return a, int_theory(axioms=guard_axioms(m)) if m.sort == "Int" else None
    if fmt == "dmt":
        b = load_dmt(args.automaton)
        return encode_dmt(b, exactly_one_action=cfg["exactly_one_action"]), int_theory()
    return load_automaton(args.automaton), None


def _theory(args, a: Automaton, implied: Theory | None, logic: str | None) -> Theory:
    """An explicit theory file is used as is; otherwise unmapped sorts
    become uninterpreted solver sorts."""
    if args.theory:
        th = Theory.from_json(_read_json(args.theory), a.sigma)
    else:
        sorts = Signature(tuple(dict.fromkeys(a.sigma.sorts + a.gamma.sorts)), ())
        th = (implied or Theory()).with_default_sorts(sorts)
    if logic:
        th = Theory(th.axioms, SmtConfig(logic, th.smt.sorts, th.smt.interpreted))
    return th


# -- commands ----------------------------------------------------------------


def cmd_compile(args, cfg) -> int:
    sig = Signature.from_json(_read_json(args.signature))
    try:
        with open(args.formula) as fh:
            text = fh.read().strip()
    except OSError as e:
        raise CliError(f"cannot read {args.formula}: {e.strerror}") from e
    phi = parse_formula(text, sig)
    compiled = compile_pure_past(phi, sig) if args.mode == "purepast" else compile_foltl(phi, sig)
    stats = " ".join(f"{k}={v}" for k, v in compiled.stats().items())
    print(f"{args.mode}: {stats}", file=sys.stderr)
    _write(args.output, compiled.automaton.dumps())
    return 0


def _report(result, args) -> int:
    print(verdict_line(result))
    if isinstance(result, NotEmpty):
        for d in result.diagnostics:
            print(f"witness: {d}", file=sys.stderr)
        if result.witness is not None and args.witness:
            _write(args.witness, json.dumps(result.witness.to_json(), indent=2) + "\n")
        elif args.witness:
            print("witness: none reconstructed", file=sys.stderr)
        return EXIT_NOTEMPTY
    if isinstance(result, Empty):
        return EXIT_EMPTY
    if isinstance(result, BoundExhausted):
        return EXIT_BOUND
    assert isinstance(result, Inconclusive)
    return EXIT_INCONCLUSIVE


def cmd_check(args, cfg) -> int:
    a, implied = _load_input(args, cfg)
    theory = _theory(args, a, implied, cfg["logic"])
    sc = SolverConfig(cfg["solver"], float(cfg["timeout"]), cfg["dump_smt"], args.continue_on_unknown)
    if args.procedure == "finite-control":
        result = decide_finite_control(a, theory, int(cfg["kmax"]), sc)
    else:
        result = non_empty_semi(a, theory, int(cfg["kmax"]), sc)
    return _report(result, args)


def _word(path: str, a: Automaton) -> Word:
    obj = _read_json(path)
    return Word.from_json(obj, a.sigma)


def cmd_run(args, cfg) -> int:
    a = load_automaton(args.automaton)
    word = _word(args.word, a)
    bad = validate_word(word)
    if bad is not None:
        raise CliError(f"invalid word: {bad}")
    run = Oracle(a, word.domains).run(word)
    if run is not None and args.verbose:
        for i, s in enumerate(run):
            print(f"state {i}: {s.describe()}")
    print("accept" if run is not None else "reject")
    return EXIT_ACCEPT if run is not None else EXIT_REJECT


def _trace(path: str, a: Automaton):
    """JSON Lines: a header {"domains": ..., "rigid": ...} then one letter per line."""
    fh = sys.stdin if path == "-" else open(path)
    try:
        lines = (ln for ln in fh if ln.strip())
        try:
            header = json.loads(next(lines))
        except StopIteration:
            raise CliError("trace is empty; expected a header line with domains") from None
        if "domains" not in header:
            raise CliError("trace header needs a 'domains' field")
        domains = {s: tuple(d) for s, d in header["domains"].items()}
        rigid = header.get("rigid", {})
        yield domains
        for n, line in enumerate(lines, 1):
            raw = json.loads(line)
            merged = {k: dict(rigid.get(k, {})) for k in ("constants", "functions", "predicates")}
            for k in merged:
                merged[k].update(raw.get(k, {}))
            try:
                yield Structure.from_json(a.sigma, domains, merged)
            except StructureError as e:
                raise CliError(f"trace letter {n}: {e}") from e
    finally:
        if fh is not sys.stdin:
            fh.close()


def cmd_step(args, cfg) -> int:
    a = load_automaton(args.automaton)
    if a.is_sigma11:
        a = sigma11_to_fo(a)
    stream = _trace(args.trace, a)
    domains = next(stream)
    bound = max([len(d) for d in domains.values()] + [1])
    for check in (check_determinism_bounded(a, bound), check_completeness_bounded(a, bound)):
        if not check:
            raise CliError(f"cannot monitor: automaton is {check}")
    letters = iter(stream)
    first = next(letters, None)
    state = initial_state_deterministic(a, domains, first)
    print(f"0: {state.describe()}")
    rigid = first
    i = 0
    letter = first
    while letter is not None:
        if rigid is not None:
            for sym in a.sigma.rigid:
                if letter.value(sym.name) != rigid.value(sym.name):
                    raise CliError(f"trace letter {i + 1}: rigid symbol {sym.name} changes")
        state = step_deterministic(state, letter, a)
        i += 1
        print(f"{i}: {state.describe()}")
        letter = next(letters, None)
    o = Oracle(a, domains)
    accepted = o.is_final(state, rigid)
    print("accept" if accepted else "reject")
    return EXIT_ACCEPT if accepted else EXIT_REJECT


UNARY_OPS = {"star", "complement", "monadic2fc", "to-fo"}
BINARY_OPS = {"union", "intersect", "concat"}


def cmd_ops(args, cfg) -> int:
    need = 1 if args.op in UNARY_OPS else 2
    if len(args.inputs) != need:
        raise CliError(f"{args.op} takes {need} input automaton file(s)")
    autos = [load_automaton(p) for p in args.inputs]
    if args.op == "union":
        out = union(*autos)
    elif args.op == "intersect":
        out = intersection(*autos)
    elif args.op == "concat":
        out = concatenation(*autos)
    elif args.op == "star":
        out = kleene_star(autos[0])
    elif args.op == "to-fo":
        out = sigma11_to_fo(autos[0])
    elif args.op == "complement":
        if args.check_deterministic:
            check = check_determinism_bounded(autos[0], int(cfg["domain_bound"]))
            if not check:
                raise CliError(f"complement input is {check}")
        elif not args.assume_deterministic:
            raise CliError(
                "complement needs --assume-deterministic or --check-deterministic: "
                "the construction is only correct for deterministic input"
            )
        out = complement_deterministic(autos[0])
    else:
        out = monadic_to_finite_control(autos[0])
    if args.first_order and out.is_sigma11:
        out = sigma11_to_fo(out)
    _write(args.output, out.dumps())
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default settings")
    common.add_argument("--solver", help="solver command line (default: $FOAUTOMATA_SOLVER or 'z3 -in')")
    common.add_argument("--logic", help="SMT-LIB logic name, overrides the theory file")
    common.add_argument("--timeout", type=float, help="per-query solver timeout in seconds")
    common.add_argument("--kmax", type=int, help=f"largest unrolling depth (default {DEFAULT_KMAX})")
    common.add_argument("--dump-smt", dest="dump_smt", metavar="DIR", help="write every solver script to DIR")
    common.add_argument("--domain-bound", dest="domain_bound", type=int, help="largest domain size for bounded checks")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="foautomata", description="First-order automata over finite words.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compile", parents=[common], help="temporal sentence to automaton")
    c.add_argument("formula", help="text file holding one sentence")
    c.add_argument("signature", help="JSON word signature")
    c.add_argument("--mode", choices=["foltl", "purepast"], default="foltl")
    c.add_argument("-o", "--output", help="automaton file (default: standard output)")
    c.set_defaults(func=cmd_compile)

    k = sub.add_parser("check", parents=[common], help="emptiness check through an SMT solver")
    k.add_argument("automaton")
    k.add_argument("--procedure", choices=["semi", "finite-control"], default="semi")
    k.add_argument("--theory", help="JSON theory: axioms and solver sort/symbol mapping")
    k.add_argument("--input-format", choices=["automaton", "sfa", "dmt"], default="automaton")
    k.add_argument("--exactly-one-action", dest="exactly_one_action", action=argparse.BooleanOptionalAction, default=None,
                   help="DMT input: exactly one action per step (default on)")
    k.add_argument("--continue-on-unknown", action="store_true",
                   help="skip depths the solver cannot decide; no EMPTY verdict is given afterwards")
    k.add_argument("--witness", help="write the reconstructed word here")
    k.set_defaults(func=cmd_check)

    r = sub.add_parser("run", parents=[common], help="accept or reject a word (explicit search)")
    r.add_argument("automaton")
    r.add_argument("word", help="JSON word file")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("step", parents=[common], help="monitor a trace with a deterministic automaton")
    s.add_argument("automaton")
    s.add_argument("trace", help="JSON Lines trace file, or - for standard input")
    s.set_defaults(func=cmd_step)

    o = sub.add_parser("ops", parents=[common], help="automata constructions")
    o.add_argument("op", choices=sorted(UNARY_OPS | BINARY_OPS))
    o.add_argument("inputs", nargs="+")
    o.add_argument("-o", "--output")
    o.add_argument("--assume-deterministic", action="store_true",
                   help="attest that the complement input is deterministic")
    o.add_argument("--check-deterministic", action="store_true",
                   help="verify determinism of the complement input up to --domain-bound")
    o.add_argument("--first-order", action="store_true", help="eliminate second-order prefixes in the result")
    o.set_defaults(func=cmd_ops)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except (
        CliError,
        AutomatonError,
        EncodingError,
        ParseError,
        SortError,
        SignatureError,
        StructureError,
        TheoryError,
        SchemaError,
        EmissionError,
        DeterminismViolation,
        SolverFailure,
        SolverSpawnError,
    ) as e:
        print(f"foautomata: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

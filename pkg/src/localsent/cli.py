"""Command-line entry point.

Inputs are sentence files or ``fixture:NAME`` for a shipped or derived
fixture.  The closure bound comes from ``--steps`` or from a ``# steps: N``
comment in the file.  Output is deterministic: no timings are printed.

Exit codes: 0 success, 1 usage or parse error, 2 budget exceeded,
3 precondition refusal (not local, wrong signature, no witness, failed check).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from .combinators import (
    CombinatorResult, FixtureError, SymbolClash, build_Phi, build_phi1, build_phi_n, build_psi_prime_n,
    build_Sn, build_Tn, load_fixture, read_steps, star, star_psi,
)
from .finder import (
    QUESTIONS, NotLocalError, UnarySignatureError, certify, decide, load_witness, verify_witness,
)
from .parser import ParseError, parse_sentence
from .printer import print_sentence
from .search import DEFAULT_BUDGET, BudgetExceeded, finite_spectrum
from .stretching import (
    OrderSpec, TemplateError, block_periodicity, find_template, letter_predicates, order_type_of_stretch,
    stretch, stretch_generators, word_of_model,
)
from .structures import StructureError, dump_structure

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_REFUSED = 0, 1, 2, 3
DEFAULT_MAX_SIZE = 4


class UsageError(Exception):
    pass


class Refusal(Exception):
    def __init__(self, message: str, detail: str = ""):
        super().__init__(message)
        self.detail = detail


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple[str, ...]
    max_size: int
    steps: int | None
    big_n: int | None
    budget: int
    workers: int
    fmt: str

    def __post_init__(self):
        if self.budget <= 0:
            raise UsageError("--budget must be positive")
        if self.workers < 1:
            raise UsageError("--workers must be at least 1")
        if self.max_size < 1:
            raise UsageError("--max-size must be at least 1")


def load_input(source: str, steps: int | None = None) -> CombinatorResult:
    """Read a sentence file or ``fixture:NAME``; ``steps`` overrides the declared bound."""
    if source.startswith("fixture:"):
        try:
            res = load_fixture(source[len("fixture:"):])
        except FixtureError as e:
            raise UsageError(str(e)) from e
        text_steps = res.n
        s = res.sentence
        prov = res.provenance
    else:
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise UsageError(f"cannot read {source}: {e.strerror}") from e
        s = parse_sentence(text)
        text_steps = read_steps(text)
        prov = (source,)
    n = steps if steps is not None else text_steps
    if n is None:
        raise UsageError(f"{source}: no closure bound; pass --steps or add a '# steps: N' line")
    return CombinatorResult(s, n, prov)


def _config(args) -> RunConfig:
    return RunConfig(args.command, tuple(getattr(args, "inputs", ()) or ()), args.max_size, args.steps,
                     getattr(args, "big_n", None), args.budget, args.workers, args.format)


def _certify(res: CombinatorResult, cfg: RunConfig):
    try:
        return certify(res.sentence, res.n, cfg.max_size, cfg.budget, cfg.workers)
    except NotLocalError as e:
        r = e.report
        detail = ""
        if r.counter_model is not None:
            detail = f"counter-set {' '.join(map(str, r.counter_set))}\n" + dump_structure(r.counter_model)
        raise Refusal(f"not local: {r.summary()}", detail) from e


# -- commands -----------------------------------------------------------------


def cmd_certify(args, out) -> int:
    cfg = _config(args)
    res = load_input(args.path, cfg.steps)
    cert = _certify(res, cfg)
    m = cert.metrics
    print("certified", file=out)
    print(f"steps {cert.n}", file=out)
    print(f"max-size {cert.m}", file=out)
    print(f"metrics n={m.n} v={m.v} v'={m.v_prime} q={m.q} N={m.N}", file=out)
    print(f"locality {cert.report.summary()}", file=out)
    return EXIT_OK


def cmd_decide(args, out) -> int:
    cfg = _config(args)
    res = load_input(args.path, cfg.steps)
    cert = _certify(res, cfg)
    report = decide(cert, args.question, cfg.budget, cfg.big_n)
    if cfg.fmt == "dump":
        if report.witness is not None:
            out.write(report.witness.dump())
    else:
        for line in report.lines():
            print(line, file=out)
        if report.witness is not None:
            print("# witness", file=out)
            out.write(report.witness.dump())
    return EXIT_BUDGET if report.answer == "budget-exceeded" else EXIT_OK


def cmd_spectrum(args, out) -> int:
    cfg = _config(args)
    res = load_input(args.path, cfg.steps if cfg.steps is not None else 0)
    table = finite_spectrum(res.sentence, args.ceiling, cfg.budget, cfg.workers, args.path)
    for k in range(1, args.ceiling + 1):
        status = "budget-exceeded" if k in table.budget_exceeded else ("yes" if table.members.get(k) else "no")
        print(f"size {k} {status}", file=out)
    print("spectrum " + " ".join(map(str, sorted(table.sizes()))), file=out)
    if cfg.fmt == "dump":
        for k in sorted(table.witnesses):
            print(f"# model of size {k}", file=out)
            out.write(dump_structure(table.witnesses[k]))
    return EXIT_BUDGET if table.budget_exceeded else EXIT_OK


def cmd_stretch(args, out) -> int:
    cfg = _config(args)
    try:
        Y = OrderSpec.parse(args.order)
    except ValueError as e:
        raise UsageError(f"bad order {args.order!r}: expected N or omega-prefix(N)") from e
    res = load_input(args.path, cfg.steps)
    cert = _certify(res, cfg)
    report, tpl = find_template(cert, cfg.budget, cfg.big_n)
    if report.answer == "budget-exceeded":
        print("special witness search exceeded the budget", file=out)
        return EXIT_BUDGET
    if tpl is None:
        raise Refusal("no special witness: the sentence has no omega-model")
    M = stretch(tpl, Y)
    print(f"order {Y}", file=out)
    print(f"order-type {order_type_of_stretch(tpl, Y)}", file=out)
    print(f"constant-part {tpl.k_size}", file=out)
    print(f"block-size {tpl.classes}", file=out)
    print(f"generators {' '.join(map(str, stretch_generators(tpl, Y)))}", file=out)
    out.write(dump_structure(M))
    letters = args.letters.split(",") if args.letters else letter_predicates(res.sentence.signature)
    if letters:
        try:
            word = word_of_model(M, letters)
        except ValueError as e:
            if args.letters:
                raise Refusal(str(e)) from e
            return EXIT_OK
        sep = "" if all(len(a) == 1 for a in word) else " "
        print(f"word {sep.join(word)}", file=out)
        if Y.omega:
            rep, equal = block_periodicity(tpl, Y.size, letters)
            print(f"periodicity {rep.periodicity()}", file=out)
            print(f"blocks-equal {'yes' if equal else 'no'}", file=out)
    return EXIT_OK


COMBINATIONS = {
    # name: (number of sentence inputs, takes an integer level)
    "star": (1, False),
    "star_psi": (2, False),
    "phi1": (0, False),
    "phi_n": (0, True),
    "Phi": (0, False),
    "Sn": (1, True),
    "psi_prime_n": (1, True),
    "Tn": (1, True),
}


def _combine(name: str, inputs: list[CombinatorResult], level: int | None, phi0: CombinatorResult) -> CombinatorResult:
    if name == "star":
        return star(inputs[0])
    if name == "star_psi":
        return star_psi(inputs[0], inputs[1])
    if name == "phi1":
        return build_phi1(phi0)
    if name == "phi_n":
        return build_phi_n(phi0, level)
    if name == "Phi":
        return build_Phi(phi0)
    if name == "Sn":
        return build_Sn(inputs[0], level, phi0)
    if name == "psi_prime_n":
        return build_psi_prime_n(inputs[0], level, phi0)
    return build_Tn(inputs[0], level, load_fixture("theta"), phi0)


def combination_text(res: CombinatorResult) -> str:
    header = [f"# combine {res.name}", f"# steps: {res.n}"]
    header += [f"# provenance {p}" for p in res.provenance]
    return "\n".join(header) + "\n" + print_sentence(res.sentence) + "\n"


def cmd_combine(args, out) -> int:
    count, leveled = COMBINATIONS[args.construction]
    operands = list(args.operands)
    level = None
    if leveled:
        if not operands or not operands[-1].lstrip("-").isdigit():
            raise UsageError(f"{args.construction} needs an integer level as its last operand")
        level = int(operands.pop())
    if len(operands) != count:
        raise UsageError(f"{args.construction} takes {count} sentence input(s), got {len(operands)}")
    inputs = [load_input(p) for p in operands]
    phi0 = load_input(args.phi0)
    try:
        res = _combine(args.construction, inputs, level, phi0)
    except (SymbolClash, FixtureError, ValueError) as e:
        raise Refusal(str(e)) from e
    text = combination_text(res)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    res = load_input(args.path, 0)
    try:
        with open(args.witness, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {args.witness}: {e.strerror}") from e
    w = load_witness(text, res.sentence.signature)
    ok, reason = verify_witness(w, res.sentence)
    print("ok" if ok else f"fail: {reason}", file=out)
    return EXIT_OK if ok else EXIT_REFUSED


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--steps", type=int, help="closure bound n (default: the file's '# steps: N' line)")
    common.add_argument("--max-size", type=int, default=DEFAULT_MAX_SIZE,
                        help=f"largest model size checked for locality (default {DEFAULT_MAX_SIZE})")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="search budget in nodes")
    common.add_argument("--workers", type=int, default=1, help="processes for model enumeration")
    common.add_argument("--format", choices=("text", "dump"), default="text")

    p = argparse.ArgumentParser(prog="localsent", description="Decide properties of local universal sentences.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("certify", parents=[common], help="check locality on small models and print metrics")
    c.add_argument("path")
    c.set_defaults(func=cmd_certify)

    d = sub.add_parser("decide", parents=[common], help="answer a model-existence question")
    d.add_argument("path")
    d.add_argument("question", choices=QUESTIONS)
    d.add_argument("--big-n", type=int, help="number of generators (default: the computed N)")
    d.set_defaults(func=cmd_decide)

    s = sub.add_parser("spectrum", parents=[common], help="finite model sizes up to a ceiling")
    s.add_argument("path")
    s.add_argument("--ceiling", type=int, default=6)
    s.set_defaults(func=cmd_spectrum)

    t = sub.add_parser("stretch", parents=[common], help="stretch a special witness along an order")
    t.add_argument("path")
    t.add_argument("order", help="N or omega-prefix(N)")
    t.add_argument("--big-n", type=int, help="number of generators (default: the computed N)")
    t.add_argument("--letters", help="comma-separated unary predicates read as letters")
    t.set_defaults(func=cmd_stretch)

    m = sub.add_parser("combine", parents=[common], help="build a sentence with a named construction")
    m.add_argument("construction", choices=sorted(COMBINATIONS))
    m.add_argument("operands", nargs="*", help="sentence inputs, then the level for leveled constructions")
    m.add_argument("--phi0", default="fixture:phi0", help="pairing sentence used by the level constructions")
    m.add_argument("-o", "--output", help="write to this file instead of stdout")
    m.set_defaults(func=cmd_combine)

    v = sub.add_parser("verify", parents=[common], help="re-check a witness dump against a sentence")
    v.add_argument("path")
    v.add_argument("witness")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args, out)
    except (UsageError, ParseError, StructureError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as e:
        print(f"budget exceeded after {e.nodes} nodes", file=out)
        return EXIT_BUDGET
    except (Refusal, UnarySignatureError, TemplateError) as e:
        print(f"refused: {e}", file=out)
        detail = getattr(e, "detail", "")
        if detail:
            out.write(detail)
        return EXIT_REFUSED


if __name__ == "__main__":
    sys.exit(main())

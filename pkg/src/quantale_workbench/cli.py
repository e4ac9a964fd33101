"""``qw``: command-line front end to the workbench.

Structures are given as JSON file paths or as ``catalog:NAME``.

Exit codes: 0 success or "yes", 1 "no" or nothing found within the bound,
2 parse or validation error, 3 size cap exceeded, 64 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Callable

from . import catalog
from .errors import ParseError, SizeCapExceeded, UnknownName, ValidationError, WorkbenchError
from .homs import dual_module, end_quantale, enumerate_homs
from .lattice import SupLattice
from .limits import DEFAULT_CAP, size_cap
from .morita import (
    MoritaCertificate,
    generator_retract,
    is_progenerator,
    morita_equivalent,
    projective_retract,
    trace,
    verify_certificate,
)
from .qmodule import Module
from .quantale import Quantale
from .serialize import (
    certificate_to_json,
    dumps,
    lattice_to_json,
    module_to_json,
    parse_structure,
    quantale_to_json,
    tensor_to_json,
    to_json,
)
from .tensor import tensor_product

EXIT_OK, EXIT_NO, EXIT_INVALID, EXIT_CAP, EXIT_USAGE = 0, 1, 2, 3, 64
REPORT_SCHEMA = "quantale-workbench/v1/report"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}\n\n{self.format_usage()}")


class Report:
    def __init__(self, verb: str):
        self.verb = verb
        self.lines: list[str] = []
        self.result: dict[str, Any] = {}
        self.artifact: dict | None = None
        self.code = EXIT_OK

    def say(self, line: str) -> None:
        self.lines.append(line)

    def envelope(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "verb": self.verb,
            "exit": self.code,
            "summary": self.lines,
            "result": self.result,
        }


# -- helpers ------------------------------------------------------------------------------------


def _load(ref: str):
    return parse_structure(ref)


def _module(ref: str, what: str = "module") -> Module:
    obj = _load(ref)
    if isinstance(obj, SupLattice):
        return Module(obj)
    if not isinstance(obj, Module):
        raise ValidationError(f"{ref} is not a {what}")
    return obj


def _quantale(ref: str) -> Quantale:
    obj = _load(ref)
    if not isinstance(obj, Quantale):
        raise ValidationError(f"{ref} is not a quantale")
    return obj


def _left_module(args) -> Module:
    M = _module(args.module)
    if M.left is None:
        raise ValidationError(f"{args.module} is not a left module")
    if args.ring is not None and _quantale(args.ring) != M.left.ring:
        raise ValidationError(f"{args.module} is not a module over {args.ring}")
    return M.restrict("left") if M.right else M


def _names(L: SupLattice, ids) -> list[str]:
    return [L.names[i] for i in ids]


def _describe(obj) -> tuple[str, int]:
    if isinstance(obj, SupLattice):
        return "lattice", obj.size
    if isinstance(obj, Quantale):
        return "quantale", obj.size
    if isinstance(obj, Module):
        return ("bimodule" if obj.side == "bimodule" else "module"), obj.size
    return type(obj).__name__.lower(), 0


# -- verbs ---------------------------------------------------------------------------------------


def cmd_validate(args, rep: Report) -> None:
    obj = _load(args.structure)
    kind, size = _describe(obj)
    rep.result = {"kind": kind, "size": size, "structure": to_json(obj)}
    rep.say(f"valid {kind} with {size} elements")
    if isinstance(obj, Quantale):
        rep.result.update(commutative=obj.is_commutative(), integral=obj.is_integral(), idempotents=_names(obj.lat, obj.idempotents()))
        rep.say(f"commutative: {'yes' if obj.is_commutative() else 'no'}; integral: {'yes' if obj.is_integral() else 'no'}")
    if isinstance(obj, SupLattice):
        rep.result["join_irreducibles"] = _names(obj, obj.join_irr)
    if isinstance(obj, Module):
        rep.result["side"] = obj.side
        rep.say(f"side: {obj.side}")


def cmd_residuals(args, rep: Report) -> None:
    Q = _quantale(args.quantale)
    n = Q.names
    left = [[n[b], n[a], n[Q.left_residual(b, a)]] for b in range(Q.size) for a in range(Q.size)]
    right = [[n[a], n[b], n[Q.right_residual(a, b)]] for a in range(Q.size) for b in range(Q.size)]
    rep.result = {"left": left, "right": right}
    rep.say("b\\a (largest c with b*c <= a):")
    rep.lines.extend(f"  {b}\\{a} = {c}" for b, a, c in left)
    rep.say("a/b (largest c with c*b <= a):")
    rep.lines.extend(f"  {a}/{b} = {c}" for a, b, c in right)


def cmd_homs(args, rep: Report) -> None:
    M, N = _module(args.src), _module(args.dst)
    H = enumerate_homs(M, N)
    rep.result = {
        "count": len(H),
        "homs": [{"name": H.lat.names[i], "map": [[M.names[x], N.names[y]] for x, y in enumerate(h.table)]} for i, h in enumerate(H.homs)],
        "lattice": lattice_to_json(H.lat),
    }
    rep.say(f"{len(H)} homomorphisms")
    for i, h in enumerate(H.homs):
        rep.say(f"  {H.lat.names[i]}: " + ", ".join(f"{M.names[x]}->{N.names[y]}" for x, y in enumerate(h.table)))


def cmd_end(args, rep: Report) -> None:
    M = _module(args.module)
    E = end_quantale(M)
    rep.result = {
        "orientation": E.orientation,
        "quantale": quantale_to_json(E.quantale),
        "homs": {E.quantale.names[i]: _names(M.lat, h.table) for i, h in enumerate(E.homs.homs)},
    }
    rep.artifact = rep.result["quantale"]
    rep.say(f"End(M) has {E.quantale.size} elements; product {E.orientation}")
    rep.say(f"commutative: {'yes' if E.quantale.is_commutative() else 'no'}")


def cmd_dual(args, rep: Report) -> None:
    D = dual_module(_module(args.module))
    rep.result = {
        "bimodule": module_to_json(D.module),
        "homs": {D.module.names[i]: _names(D.source.left.ring.lat, h.table) for i, h in enumerate(D.homs.homs)},
    }
    rep.artifact = rep.result["bimodule"]
    rep.say(f"M* = Hom(M, Q) has {D.module.size} elements; End(M) acts on the left, Q on the right")


def cmd_tensor(args, rep: Report) -> None:
    M, N = _module(args.left), _module(args.right)
    if M.right is None and M.left is not None and M.left.ring.is_commutative():
        M = M.opposite()
    if N.left is None and N.right is not None and N.right.ring.is_commutative():
        N = N.opposite()
    if M.right is None or N.left is None:
        raise ValidationError("tensor needs a right module and a left module (or modules over a commutative quantale)")
    if args.ring is not None and _quantale(args.ring) != M.right.ring:
        raise ValidationError(f"the factors are not modules over {args.ring}")
    T = tensor_product(M, N)
    rep.result = tensor_to_json(T)
    rep.artifact = rep.result
    rep.say(f"tensor product has {T.lat.size} elements ({T.module.side})")


def cmd_trace(args, rep: Report) -> None:
    M = _left_module(args)
    Q = M.left.ring
    S = trace(M)
    rep.result = {"trace": _names(Q.lat, S.carrier), "whole": len(S.carrier) == Q.size}
    rep.say("trace(M) = {" + ", ".join(_names(Q.lat, S.carrier)) + "}")


def cmd_check_generator(args, rep: Report) -> None:
    M = _left_module(args)
    Q = M.left.ring
    S = trace(M)
    yes = len(S.carrier) == Q.size
    retract = generator_retract(M)
    assert (retract is not None) == yes, "trace criterion and retract search disagree"
    rep.result = {"generator": yes, "trace": _names(Q.lat, S.carrier), "retract_exponent": retract.exponent if retract else None}
    if yes:
        rep.say("generator: yes (trace(M) = Q)")
        rep.say(f"cross-check: Q is a retract of M^{retract.exponent}")
    else:
        rep.say("generator: no (trace(M) = {" + ", ".join(_names(Q.lat, S.carrier)) + "} is a proper subset of Q)")
        rep.say("cross-check: no retraction of a power of M onto Q")
    rep.code = EXIT_OK if yes else EXIT_NO


def cmd_check_projective(args, rep: Report) -> None:
    M = _left_module(args)
    check = is_progenerator(M)
    beta = check.beta
    yes = beta.is_surjective()
    retract = projective_retract(M)
    assert (retract is not None) == yes, "beta criterion and retract search disagree"
    E = beta.hom.dst
    missed = sorted(set(range(E.size)) - set(beta.hom.table))
    rep.result = {"projective": yes, "end_size": E.size, "beta_image_size": E.size - len(missed), "retract_exponent": retract.exponent if retract else None}
    if yes:
        rep.say("projective: yes (beta: M* (x) M -> End(M) is surjective)")
        rep.say(f"cross-check: M is a retract of Q^{retract.exponent}")
    else:
        rep.say(f"projective: no (beta misses {len(missed)} of {E.size} endomorphisms)")
        rep.say("cross-check: no retraction of a free module onto M")
    rep.code = EXIT_OK if yes else EXIT_NO


def cmd_check_progenerator(args, rep: Report) -> None:
    M = _left_module(args)
    check = is_progenerator(M)
    yes = check.is_progenerator
    rep.result = {
        "progenerator": yes,
        "generator": check.generator,
        "projective": check.projective,
        "alpha_bijective": check.alpha.is_bijective(),
        "beta_bijective": check.beta.is_bijective(),
    }
    if yes:
        rep.say("progenerator: yes (alpha and beta are bimodule isomorphisms)")
    else:
        why = []
        if not check.alpha.is_bijective():
            why.append("alpha is not bijective")
        if not check.beta.is_bijective():
            why.append("beta is not bijective")
        rep.say(f"progenerator: no ({'; '.join(why)})")
    rep.say(f"generator: {'yes' if check.generator else 'no'}; projective: {'yes' if check.projective else 'no'}")
    rep.code = EXIT_OK if yes else EXIT_NO


def cmd_morita(args, rep: Report) -> None:
    Q, R = _quantale(args.q), _quantale(args.r)
    seeds = [_module(s) for s in args.seed_module or ()]
    res = morita_equivalent(Q, R, args.bound, seeds=seeds, workers=args.workers)
    rep.result = {"found": bool(res), "bound": args.bound, "candidates": res.candidates, "message": res.message}
    rep.say(res.message)
    if res:
        cert = certificate_to_json(res.certificate)
        rep.result["certificate"] = cert
        rep.artifact = cert
        rep.code = EXIT_OK
    else:
        rep.code = EXIT_NO


def _family(spec: str | None):
    if not spec:
        return None
    out = []
    for ref in spec.split(","):
        M = _module(ref)
        if M.side == "left" and M.ring.is_commutative():
            M = M.opposite()
        out.append((ref, M))
    return out


def cmd_verify_cert(args, rep: Report) -> None:
    cert = _load(args.certificate)
    if not isinstance(cert, MoritaCertificate):
        raise ValidationError(f"{args.certificate} is not a certificate")
    chk = verify_certificate(cert.ring, cert.other, cert, _family(args.family))
    rep.result = {"ok": chk.ok, "failure": chk.failure, "round_trips": list(chk.round_trips)}
    if chk.ok:
        rep.say("certificate: valid (P is a progenerator and End(P) matches)")
        rep.say("round trip (X (x) P) (x) P* = X checked on: " + ", ".join(chk.round_trips))
        rep.code = EXIT_OK
    else:
        rep.say(f"certificate: invalid ({chk.failure})")
        rep.code = EXIT_NO


def cmd_catalog(args, rep: Report) -> None:
    if args.name:
        e = catalog.entry(args.name)
        obj = catalog.load(args.name)
        rep.result = {"name": e.name, "kind": e.kind, "note": e.note, "structure": to_json(obj)}
        rep.say(f"{e.name} ({e.kind}, {_describe(obj)[1]} elements): {e.note}")
        return
    names = catalog.names(args.kind)
    rep.result = {"names": names}
    for n in names:
        rep.say(f"{n:16} {catalog.entry(n).kind:9} {catalog.entry(n).note}")


# -- parser -----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--out", metavar="FILE", help="write the main artifact (JSON) to FILE")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, metavar="N", help=f"element cap (default {DEFAULT_CAP})")
    common.add_argument("--seed", type=int, default=None, help="reserved; every computation is deterministic")
    common.add_argument("--family", metavar="REFS", help="comma-separated modules for round-trip checks")

    p = _Parser(prog="qw", description="Finite quantale and module workbench.", epilog=__doc__.split("\n\n", 2)[2])
    sub = p.add_subparsers(dest="verb", metavar="VERB", parser_class=_Parser)
    sub.required = True

    def verb(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help, description=help)
        sp.set_defaults(fn=fn)
        return sp

    v = verb("validate", cmd_validate, "validate a lattice, quantale, module, bimodule, hom or certificate")
    v.add_argument("structure")
    v = verb("residuals", cmd_residuals, "left and right residual tables of a quantale")
    v.add_argument("quantale")
    v = verb("homs", cmd_homs, "all homomorphisms between two modules")
    v.add_argument("src")
    v.add_argument("dst")
    v = verb("end", cmd_end, "endomorphism quantale of a module")
    v.add_argument("module")
    v = verb("dual", cmd_dual, "dual module Hom(M, Q) of a left module")
    v.add_argument("module")
    v = verb("tensor", cmd_tensor, "tensor product of a right and a left module")
    v.add_argument("left")
    v.add_argument("right")
    v.add_argument("--ring", help="expected ring of the factors")
    for name, fn, text in (
        ("trace", cmd_trace, "trace of a left module in its ring"),
        ("check-generator", cmd_check_generator, "decide whether a left module is a generator"),
        ("check-projective", cmd_check_projective, "decide whether a left module is projective"),
        ("check-progenerator", cmd_check_progenerator, "decide whether a left module is a progenerator"),
    ):
        v = verb(name, fn, text)
        v.add_argument("--module", required=True)
        v.add_argument("--ring", help="expected ring of the module")
    v = verb("morita", cmd_morita, "search for a Morita equivalence certificate")
    v.add_argument("q")
    v.add_argument("r")
    v.add_argument("--bound", type=int, required=True, help="largest progenerator size to enumerate")
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--seed-module", action="append", metavar="REF", help="candidate progenerator tried first")
    v = verb("verify-cert", cmd_verify_cert, "re-verify a Morita certificate")
    v.add_argument("certificate")
    v = verb("catalog", cmd_catalog, "list catalog entries or show one")
    v.add_argument("name", nargs="?")
    v.add_argument("--kind", choices=catalog.KINDS)
    return p


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        stderr.write(str(exc))
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    rep = Report(args.verb)
    try:
        if args.cap < 1:
            raise UsageError("--cap must be positive")
        with size_cap(args.cap):
            args.fn(args, rep)
    except UsageError as exc:
        stderr.write(f"qw: {exc}\n")
        return EXIT_USAGE
    except SizeCapExceeded as exc:
        rep.code = EXIT_CAP
        rep.result = {"error": "size-cap", "message": str(exc)}
        rep.lines = [f"error: {exc}"]
    except (ParseError, ValidationError, UnknownName) as exc:
        rep.code = EXIT_INVALID
        rep.result = {"error": type(exc).__name__, "message": str(exc)}
        line = getattr(exc, "line", None)
        if line is not None:
            rep.result.update(line=exc.line, column=exc.column)
        witness = getattr(exc, "witness", None)
        if witness:
            rep.result["witness"] = list(witness)
        rep.lines = [f"error: {exc}"]
    except WorkbenchError as exc:
        rep.code = EXIT_INVALID
        rep.result = {"error": type(exc).__name__, "message": str(exc)}
        rep.lines = [f"error: {exc}"]
    if args.out and rep.code in (EXIT_OK, EXIT_NO):
        Path(args.out).write_text(dumps(rep.artifact if rep.artifact is not None else rep.result), encoding="utf-8")
    if args.json:
        stdout.write(dumps(rep.envelope()))
    else:
        stream = stderr if rep.code in (EXIT_INVALID, EXIT_CAP) else stdout
        stream.write("\n".join(rep.lines) + "\n")
    return rep.code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

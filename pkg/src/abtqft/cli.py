"""Batch front end: parse input documents, compute, print one report.

Every command reads at most one JSON document (a file path or ``-`` for
standard input), runs one computation, and prints a single JSON report
to standard output.  Exact scalars are printed as coefficient vectors
over the cyclotomic power basis together with a float approximation of
at most 12 digits, flagged as approximate; reports are self-describing
and round-trip through the parsers in this module.

Exit codes are stable:

* 0 - success
* 2 - malformed input (bad JSON, bad matrices, bad words, bad domain)
* 3 - unsupported order p for the requested computation
* 4 - program validation or frame errors in ``tqft``
* 5 - normalized map of a composite program without a closure matrix
"""

import argparse
import json
import sys
from fractions import Fraction

import mpmath

from .cobordism import (
    F_program,
    ProgramError,
    apply_map,
    canonical_context,
    load_program,
    normalized_map,
)
from .cyclotomic import CycNum, from_rational, field_order, q_power, to_complex
from .heisenberg import (
    closed_context,
    commutant_dim,
    finite_inverse,
    finite_mul,
    monomial_of,
    schrodinger_act,
    to_finite,
)
from .mcg import (
    FreeWord,
    MappingClass,
    cocycle_c,
    projective_defect,
    t_dual,
    theta,
    twist_generators,
    weil_H,
    weil_intertwiner,
)
from .surgery import (
    matrix_element,
    refined_invariant,
    refinement_classes,
    refinement_kind,
    signature,
    z_invariant,
    z_lens,
)

MAX_DIGITS = 12


class CliError(Exception):
    """An error with a stable exit code."""

    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


# -- document plumbing -----------------------------------------------------


def _read_doc(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, ValueError) as exc:
        raise CliError(2, "cannot read input document: %s" % (exc,))


def _check_p(p):
    if p < 3 or p % 4 == 2:
        raise CliError(3, "order %d is unsupported (need p >= 3 and "
                          "p != 2 mod 4)" % p)


def scalar_doc(x, digits):
    """Serialize an exact scalar with a flagged approximation."""
    digits = min(digits, MAX_DIGITS)
    z = to_complex(x, digits)
    with mpmath.workdps(digits):
        approx = {
            "re": mpmath.nstr(z.real, digits),
            "im": mpmath.nstr(z.imag, digits),
            "digits": digits,
            "approximate": True,
        }
    return {
        "order": x.order,
        "coeffs": [str(c) for c in x.coeffs],
        "approx": approx,
    }


def parse_scalar(doc):
    """Inverse of scalar_doc on the exact part."""
    try:
        return CycNum(int(doc["order"]),
                      tuple(Fraction(c) for c in doc["coeffs"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(2, "bad scalar document: %s" % (exc,))


def _matrix_from(doc, key="B"):
    rows = doc.get(key)
    if rows is None:
        raise CliError(2, "input document lacks %r" % (key,))
    try:
        B = tuple(tuple(int(x) for x in row) for row in rows)
    except (TypeError, ValueError) as exc:
        raise CliError(2, "bad matrix: %s" % (exc,))
    n = len(B)
    if any(len(r) != n for r in B):
        raise CliError(2, "bad matrix: not square")
    if any(B[i][j] != B[j][i] for i in range(n) for j in range(n)):
        raise CliError(2, "bad matrix: not symmetric")
    return B


def _vector_doc(vec, digits):
    entries = []
    for label in sorted(vec):
        if vec[label] != 0:
            entries.append({"label": list(label),
                            "value": scalar_doc(vec[label], digits)})
    return {"entries": entries}


def _map_doc(m, digits):
    entries = []
    for target, source in sorted(m):
        v = m[(target, source)]
        if v != 0:
            entries.append({"target": list(target), "source": list(source),
                            "value": scalar_doc(v, digits)})
    return {"entries": entries}


def _parse_vector(doc, ctx):
    out = {}
    for entry in doc.get("entries", ()):
        try:
            label = tuple(int(x) for x in entry["label"])
            raw = entry["value"]
        except (KeyError, TypeError, ValueError) as exc:
            raise CliError(2, "bad vector entry: %s" % (exc,))
        if isinstance(raw, dict):
            value = parse_scalar(raw)
        else:
            try:
                frac = Fraction(raw) if isinstance(raw, str) else Fraction(
                    int(raw))
            except (TypeError, ValueError) as exc:
                raise CliError(2, "bad vector value: %s" % (exc,))
            value = from_rational(field_order(ctx.p), frac)
        out[label] = value
    if any(len(label) != ctx.g for label in out):
        raise CliError(2, "vector labels do not match genus %d" % ctx.g)
    return out


# -- invariant / refine / lens --------------------------------------------


def cmd_invariant(args):
    _check_p(args.p)
    doc = _read_doc(args.input)
    B = _matrix_from(doc)
    fixed = doc.get("fixed_colors") or {}
    report = {"command": "invariant", "p": args.p,
              "size": len(B), "signature": signature(B)}
    if fixed:
        try:
            fixed = {int(k): int(v) for k, v in fixed.items()}
        except (TypeError, ValueError) as exc:
            raise CliError(2, "bad fixed_colors: %s" % (exc,))
        if any(not 0 <= i < len(B) for i in fixed):
            raise CliError(2, "fixed_colors index out of range")
        value = matrix_element(args.p, B, fixed, len(fixed))
        report["fixed_colors"] = {str(k): v for k, v in sorted(fixed.items())}
        report["value"] = scalar_doc(value, args.digits)
        return report
    value = z_invariant(args.p, B)
    report["value"] = scalar_doc(value, args.digits)
    if args.p % 4 == 0:
        report["refinement"] = _refinement_block(args.p, B, value,
                                                 args.digits)
    return report


def _refinement_block(p, B, total, digits):
    classes = refinement_classes(p, B)
    parts = []
    running = None
    for cls in classes:
        v = refined_invariant(p, B, cls)
        parts.append({"class": list(cls), "value": scalar_doc(v, digits)})
        running = v if running is None else running + v
    if running is None:
        agrees = total == 0
    else:
        agrees = running == total
    return {"kind": refinement_kind(p), "classes": parts,
            "sum_matches_total": agrees}


def cmd_refine(args):
    _check_p(args.p)
    if args.p % 4:
        raise CliError(3, "refinements need p = 0 mod 4, got %d" % args.p)
    doc = _read_doc(args.input)
    B = _matrix_from(doc)
    total = z_invariant(args.p, B)
    return {"command": "refine", "p": args.p, "size": len(B),
            "signature": signature(B),
            "value": scalar_doc(total, args.digits),
            "refinement": _refinement_block(args.p, B, total, args.digits)}


def cmd_lens(args):
    _check_p(args.p)
    try:
        value = z_lens(args.p, args.beta, args.alpha)
    except ValueError as exc:
        raise CliError(2, "bad lens parameters: %s" % (exc,))
    return {"command": "lens", "p": args.p,
            "beta": args.beta, "alpha": args.alpha,
            "value": scalar_doc(value, args.digits)}


# -- tqft ------------------------------------------------------------------


def cmd_tqft(args):
    _check_p(args.p)
    doc = _read_doc(args.input)
    try:
        prog = load_program(doc)
    except ProgramError as exc:
        raise CliError(2, "bad program: %s" % (exc,))
    closure = None
    if args.closure is not None:
        closure = _matrix_from(_read_doc(args.closure))
    try:
        if args.normalized:
            try:
                m = normalized_map(args.p, prog, closure, args.mode)
            except ProgramError as exc:
                if "closure" in str(exc):
                    raise CliError(5, str(exc))
                raise
        else:
            m = F_program(args.p, prog, args.mode)
    except ProgramError as exc:
        raise CliError(4, str(exc))
    except ValueError as exc:
        raise CliError(2, str(exc))
    report = {"command": "tqft", "p": args.p, "mode": args.mode,
              "normalized": bool(args.normalized)}
    if args.verify:
        if args.p % 2 == 0:
            raise CliError(3, "--verify compares the closed form against "
                              "the tensor oracle and needs odd p")
        try:
            closed = F_program(args.p, prog, "closed")
            oracle = F_program(args.p, prog, "oracle")
        except ProgramError as exc:
            raise CliError(4, str(exc))
        clean = {k: v for k, v in closed.items() if v != 0}
        if clean != {k: v for k, v in oracle.items() if v != 0}:
            raise CliError(4, "closed form and tensor oracle disagree")
        report["verified"] = "closed form equals tensor oracle"
    if args.vector is not None:
        ctx = canonical_context(args.p, prog.source)
        vec = _parse_vector(_read_doc(args.vector), ctx)
        out = apply_map(m, vec)
        report["vector"] = _vector_doc(out, args.digits)
    else:
        report["map"] = _map_doc(m, args.digits)
    return report


# -- heis ------------------------------------------------------------------


def _parse_triple(doc, key, ctx):
    raw = doc.get(key)
    try:
        k = int(raw[0])
        a = tuple(int(x) for x in raw[1])
        b = tuple(int(x) for x in raw[2])
    except (TypeError, ValueError, IndexError) as exc:
        raise CliError(2, "bad group element %r: %s" % (key, exc))
    if len(a) != ctx.g or len(b) != ctx.g:
        raise CliError(2, "group element %r does not match genus %d"
                       % (key, ctx.g))
    return (k % ctx.p, tuple(x % ctx.p_prime for x in a),
            tuple(x % ctx.p_prime for x in b))


def cmd_heis(args):
    _check_p(args.p)
    doc = _read_doc(args.input)
    op = doc.get("op")
    g = doc.get("g")
    if not isinstance(g, int) or g < 1:
        raise CliError(2, "document needs a positive integer genus 'g'")
    ctx = closed_context(args.p, g)
    if op == "mul":
        x = _parse_triple(doc, "x", ctx)
        y = _parse_triple(doc, "y", ctx)
        k, a, b = finite_mul(ctx, x, y)
        return {"command": "heis", "op": "mul", "p": args.p, "g": g,
                "result": [k, list(a), list(b)]}
    if op == "inverse":
        x = _parse_triple(doc, "x", ctx)
        k, a, b = finite_inverse(ctx, x)
        return {"command": "heis", "op": "inverse", "p": args.p, "g": g,
                "result": [k, list(a), list(b)]}
    if op == "act":
        h = _parse_triple(doc, "element", ctx)
        vec = _parse_vector(doc.get("vector", {}), ctx)
        out = schrodinger_act(ctx, h, vec)
        return {"command": "heis", "op": "act", "p": args.p, "g": g,
                "vector": _vector_doc(out, args.digits)}
    if op == "matrix":
        h = _parse_triple(doc, "element", ctx)
        mono = monomial_of(ctx, h)
        m = {}
        for src, (tgt, e) in mono.as_dict().items():
            m[(tgt, src)] = q_power(args.p, e)
        return {"command": "heis", "op": "matrix", "p": args.p, "g": g,
                "map": _map_doc(m, args.digits)}
    if op == "commutant":
        basis = []
        for i in range(2 * g):
            e = tuple(1 if j == i else 0 for j in range(2 * g))
            basis.append(monomial_of(ctx, to_finite(ctx, 0, e)))
        dim = commutant_dim(basis, ctx.labels())
        return {"command": "heis", "op": "commutant", "p": args.p, "g": g,
                "dimension": dim}
    raise CliError(2, "unknown heis op %r" % (op,))


# -- mcg -------------------------------------------------------------------


def _class_from(doc, key, genus):
    raw = doc.get(key)
    if raw is None:
        raise CliError(2, "document lacks mapping class %r" % (key,))
    if "word" in raw:
        try:
            lib = twist_generators(genus)
        except ValueError as exc:
            raise CliError(2, str(exc))
        f = MappingClass.identity(genus)
        for name in raw["word"]:
            if name not in lib:
                raise CliError(2, "unknown twist %r for genus %d"
                               % (name, genus))
            f = f * lib[name]
        return f
    if "images" in raw:
        try:
            images = tuple(FreeWord(tuple(int(x) for x in w))
                           for w in raw["images"])
            return MappingClass(genus, images)
        except (TypeError, ValueError) as exc:
            raise CliError(2, "bad mapping class: %s" % (exc,))
    raise CliError(2, "mapping class %r needs 'word' or 'images'" % (key,))


def cmd_mcg(args):
    _check_p(args.p)
    doc = _read_doc(args.input)
    op = doc.get("op")
    genus = doc.get("g")
    if not isinstance(genus, int) or genus < 1:
        raise CliError(2, "document needs a positive integer genus 'g'")
    if op == "theta":
        f = _class_from(doc, "f", genus)
        report = {"command": "mcg", "op": "theta", "p": args.p, "g": genus,
                  "theta": list(theta(f)),
                  "matrix": [list(r) for r in f.matrix]}
        if args.p % 2:
            report["t"] = list(t_dual(theta(f), args.p))
        return report
    if op == "cocycle":
        if args.p % 2 == 0:
            raise CliError(3, "the cocycle needs odd p, got %d" % args.p)
        f = _class_from(doc, "f", genus)
        h = _class_from(doc, "h", genus)
        c = cocycle_c(f, h, args.p)
        report = {"command": "mcg", "op": "cocycle", "p": args.p,
                  "g": genus, "c": c}
        if args.verify:
            ctx = closed_context(args.p, genus)
            lam_H = projective_defect(weil_H(f, ctx), weil_H(h, ctx),
                                      weil_H(f * h, ctx))
            lam_S = projective_defect(
                weil_intertwiner(f.matrix, ctx),
                weil_intertwiner(h.matrix, ctx),
                weil_intertwiner((f * h).matrix, ctx))
            if lam_H != lam_S * q_power(args.p, c):
                raise CliError(4, "measured defect ratio disagrees with "
                                  "the cocycle")
            report["verified"] = "defect ratio matches q^c"
        return report
    if op == "weil":
        if "matrix" in doc:
            try:
                fs = tuple(tuple(int(x) for x in row)
                           for row in doc["matrix"])
            except (TypeError, ValueError) as exc:
                raise CliError(2, "bad matrix: %s" % (exc,))
        else:
            fs = _class_from(doc, "f", genus).matrix
        ctx = closed_context(args.p, genus)
        try:
            S = weil_intertwiner(fs, ctx)
        except ValueError as exc:
            raise CliError(2, str(exc))
        return {"command": "mcg", "op": "weil", "p": args.p, "g": genus,
                "matrix": [list(r) for r in fs],
                "intertwiner": _map_doc(S, args.digits),
                "intertwining": "verified by construction"}
    raise CliError(2, "unknown mcg op %r" % (op,))


# -- entry point -----------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="abtqft",
        description="Exact invariants of closed 3-manifolds and exact "
                    "TQFT maps at a root of unity of order p.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, with_input=True):
        if with_input:
            sp.add_argument("input", help="JSON document ('-' for stdin)")
        sp.add_argument("--p", type=int, required=True,
                        help="order of the root of unity (p >= 3, "
                             "p != 2 mod 4)")
        sp.add_argument("--digits", type=int, default=MAX_DIGITS,
                        help="approximation digits (capped at %d)"
                             % MAX_DIGITS)

    sp = sub.add_parser("invariant", help="closed-manifold invariant of a "
                        "linking presentation")
    common(sp)
    sp.set_defaults(func=cmd_invariant)

    sp = sub.add_parser("refine", help="parity refinements at p = 0 mod 4")
    common(sp)
    sp.set_defaults(func=cmd_refine)

    sp = sub.add_parser("lens", help="lens space invariant")
    sp.add_argument("beta", type=int)
    sp.add_argument("alpha", type=int)
    common(sp, with_input=False)
    sp.set_defaults(func=cmd_lens)

    sp = sub.add_parser("tqft", help="map of a surgery program")
    common(sp)
    sp.add_argument("--mode", choices=("auto", "closed", "oracle"),
                    default="auto")
    sp.add_argument("--vector", help="JSON vector document to apply")
    sp.add_argument("--normalized", action="store_true",
                    help="multiply by the closed-off invariant")
    sp.add_argument("--closure",
                    help="linking matrix document for --normalized on "
                         "composite programs")
    sp.add_argument("--verify", action="store_true",
                    help="check closed form against the tensor oracle")
    sp.set_defaults(func=cmd_tqft)

    sp = sub.add_parser("heis", help="finite Heisenberg group utilities")
    common(sp)
    sp.set_defaults(func=cmd_heis)

    sp = sub.add_parser("mcg", help="mapping class utilities")
    common(sp)
    sp.add_argument("--verify", action="store_true",
                    help="measure the projective defect ratio")
    sp.set_defaults(func=cmd_mcg)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        report = args.func(args)
    except CliError as exc:
        json.dump({"error": str(exc), "exit_code": exc.code},
                  sys.stderr, indent=2)
        sys.stderr.write("\n")
        return exc.code
    json.dump(report, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())

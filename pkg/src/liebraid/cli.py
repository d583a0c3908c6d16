"""Command-line interface.

Exit codes: 0 success or passing check, 1 failing check (a report is still
written), 2 input error (diagnostic on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import analysis, freealg, freelie, groupcal, kohno, kzflow, poisson, represent

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load_json(path: str) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def _load_series(path: str) -> freealg.Series:
    return freealg.series_from_json(_load_json(path))


def _load_element(path: str, N: int):
    """A series file, or a Lie element file (terms carry ``lyndon`` keys)."""
    doc = _load_json(path)
    terms = doc.get("terms", [])
    if terms and isinstance(terms[0], dict) and "lyndon" in terms[0]:
        return freelie.lie_from_json(doc)
    s = freealg.series_from_json(doc)
    return s if s.N == N else s.truncate(N) if s.N > N else freealg.Series(s.alphabet, N, dict(s.items()))


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a rational number: {text!r}") from None


def _factors(text: str) -> list[str]:
    return [f.strip() for f in text.split(",") if f.strip()]


def _emit(args, payload, csv_text: str | None = None) -> None:
    if args.format == "csv":
        if csv_text is None:
            raise InputError(f"--format csv is not available for '{args.command}'")
        text = csv_text
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------------ commands


def cmd_dims(args):
    universal = kohno.universal_dimensions(args.n, args.max_k)
    lie = [kohno.kohno_lie_dimension(args.n, k) for k in range(1, args.max_k + 1)]
    table = [{"k": k, "universal": universal[k], "lie": lie[k - 1] if k else None} for k in range(args.max_k + 1)]
    _emit(args, {"n": args.n, "universal": universal, "lie": lie},
          "k,universal,lie\n" + "".join(f"{r['k']},{r['universal']},{'' if r['lie'] is None else r['lie']}\n"
                                         for r in table))
    return EXIT_OK


def cmd_nf(args):
    s = _load_series(args.input)
    if s.alphabet.kind != "kohno":
        raise InputError("nf: series.alphabet must be a Kohno alphabet")
    _emit(args, freealg.series_to_json(kohno.normal_form(s, args.strategy)))
    return EXIT_OK


def cmd_mul(args):
    a, b = _load_series(args.left), _load_series(args.right)
    if a.alphabet != b.alphabet:
        raise InputError("mul: operands have different alphabets")
    mul = groupcal.multiplication_for(a.alphabet)
    _emit(args, freealg.series_to_json(mul(a, b)))
    return EXIT_OK


def cmd_bch(args):
    x, y = _load_element(args.x, args.N), _load_element(args.y, args.N)
    z = groupcal.bch(x, y, args.N)
    out = {"series": freealg.series_to_json(z)}
    if z.alphabet.kind == "free":
        out["lie"] = freelie.lie_to_json(freelie.series_to_lie(z))
    _emit(args, out)
    return EXIT_OK


def cmd_ordexp(args):
    path = groupcal.path_from_json(_load_json(args.input))
    g = groupcal.ordered_exp(path, args.N)
    out = {"series": freealg.series_to_json(g.series)}
    if args.factorize:
        factors = groupcal.ordered_exp_factorize(path, args.N)
        out["factors"] = [freealg.series_to_json(f.series) for f in factors]
    _emit(args, out)
    return EXIT_OK


def cmd_grouplike(args):
    s = _load_series(args.input)
    if s.alphabet.kind == "kohno":
        s = kohno.normal_form(s)
    violations = freelie.shuffle_violations(s, limit=args.limit)
    ok = s.constant == 1 and not violations
    report = {
        "grouplike": ok,
        "constant": str(s.constant),
        "violations": [
            {"v": [freealg.letter_to_json(x) for x in v["v"]],
             "w": [freealg.letter_to_json(x) for x in v["w"]],
             "lhs": str(v["lhs"]), "rhs": str(v["rhs"])}
            for v in violations
        ],
    }
    _emit(args, report)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_factorize(args):
    s = _load_series(args.input)
    if s.alphabet.kind != "kohno":
        raise InputError("factorize: series.alphabet must be a Kohno alphabet")
    try:
        factors = kohno.factorize(s)
    except ValueError as exc:
        _emit(args, {"factorized": False, "reason": str(exc)})
        return EXIT_FAIL
    checks = [freelie.is_grouplike(f) for f in factors]
    _emit(args, {
        "factorized": True,
        "factors": [freealg.series_to_json(f) for f in factors],
        "factors_grouplike": checks,
    })
    return EXIT_OK if all(checks) else EXIT_FAIL


def cmd_project(args):
    s = _load_series(args.input)
    if s.alphabet.kind != "kohno":
        raise InputError("project: series.alphabet must be a Kohno alphabet")
    _emit(args, freealg.series_to_json(kohno.project_forget(s, args.alpha)))
    return EXIT_OK


def cmd_norm(args):
    s = _load_series(args.input)
    if args.kind == "seminorm":
        _emit(args, {"kind": "seminorm", "base": str(args.base), "value": str(analysis.seminorm_family(s, args.base))})
        return EXIT_OK
    if args.kind == "shriek":
        _emit(args, {"kind": "shriek", "a": str(args.a), "value": str(analysis.shriek_norm(s, args.a))})
        return EXIT_OK
    rows = []
    ok = True
    for p in range(s.max_degree() + 1):
        part = s.degree_part(p)
        if not any(True for _ in part.items()):
            continue
        if args.kind == "ell1":
            value = sum((abs(c) for _, c in part.items()), Fraction(0))
            rows.append({"degree": p, "value": str(value), "status": "exact"})
            continue
        q = analysis.quotient_norm(part)
        ok = ok and q.ok
        rows.append({
            "degree": p,
            "value": str(q.value) if isinstance(q.value, Fraction) else repr(q.value),
            "status": q.status,
            "ell1": str(q.ell1),
        })
    _emit(args, {"kind": args.kind, "degrees": rows},
          "degree,value,status\n" + "".join(f"{r['degree']},{r['value']},{r['status']}\n" for r in rows))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_growth(args):
    s = _load_series(args.input)
    track = {}
    for item in args.track or []:
        label, _, word = item.partition("=")
        try:
            letters = [int(x) for x in word.split(".")]
            repeat = int(label.split("^")[1]) if "^" in label else None
        except ValueError:
            raise InputError(f"--track expects LABEL^K=I.J.. with integer letters, got {item!r}") from None
        if repeat is None:
            track[label] = [tuple(letters)]
        else:
            base = label.split("^")[0]
            track[base] = [tuple(letters) * k for k in range(1, repeat + 1)
                           if len(letters) * k <= s.N]
    report = analysis.growth_classify(s, args.N, track)
    _emit(args, report.to_json())
    return EXIT_OK


def _rep_from_args(args) -> represent.MatrixRep:
    return represent.build_casimir_rep(args.algebra, _factors(args.factors))


def cmd_rep_check(args):
    report = represent.check_kohno_relations(_rep_from_args(args))
    _emit(args, report)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_poisson_check(args):
    st = poisson.PoissonStructure.from_name(args.structure)
    report = poisson.verify_kohno_poisson(st)
    _emit(args, report)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def _parse_pair(text: str) -> tuple[int, int]:
    try:
        r, s = (int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"expected a pair like 1,3, got {text!r}") from None
    return r, s


def cmd_monodromy(args):
    rep = _rep_from_args(args)
    if args.loop:
        loop = kzflow.loop_from_json(_load_json(args.loop))
    else:
        r, s = _parse_pair(args.generator)
        loop = kzflow.pure_braid_loop(rep.n, r, s)
    E, stats = kzflow.kz_monodromy(loop, rep, args.hbar, args.tol, return_stats=True)
    _emit(args, {
        "hbar": args.hbar,
        "tol": args.tol,
        "loop": kzflow.loop_to_json(loop),
        "monodromy": represent.matrix_to_json(E),
        **stats,
    })
    return EXIT_OK


def cmd_braid_relations(args):
    rep = _rep_from_args(args)
    mono = kzflow.pure_braid_monodromies(rep, args.hbar, args.tol)
    report = kzflow.check_pure_braid_relations(mono, rep.n, args.check_tol)
    report["hbar"] = args.hbar
    report["convention"] = kzflow.LOOP_CONVENTION
    _emit(args, report)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_flow(args):
    if args.config:
        cfg = kzflow.SphereConfig.from_json(_load_json(args.config))
    else:
        cfg = kzflow.SphereConfig(kzflow.random_configs(args.n, 1, args.seed)[0])
    result = kzflow.klyachko_flow(cfg, args.hamiltonian, args.T, args.step, args.record_every)
    _emit(args, {"initial": cfg.to_json(), **result.summary()}, result.to_csv())
    return EXIT_OK


def _parse_word(text: str) -> list:
    word = []
    for item in text.split(","):
        ham, _, t = item.strip().rpartition(":")
        try:
            word.append((ham, float(t)))
        except ValueError:
            raise InputError(f"--word items look like D12:1.0, got {item!r}") from None
    return word


def cmd_flow_compose(args):
    configs = kzflow.random_configs(args.n, args.samples, args.seed)
    report = kzflow.flow_compose_check(_parse_word(args.word), configs, args.tol, args.step)
    report["seed"] = args.seed
    _emit(args, report)
    return EXIT_OK if report["pass"] else EXIT_FAIL


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write the result here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized inputs (default 0)")

    parser = argparse.ArgumentParser(prog="liebraid", description="Kohno algebra and Lie braid group toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("dims", cmd_dims, "dimensions of U(br_n) and br_n by degree")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-k", type=int, required=True)

    p = add("nf", cmd_nf, "good-word normal form of a Kohno series")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--strategy", choices=["left", "right"], default="left")

    p = add("mul", cmd_mul, "product of two series")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)

    p = add("bch", cmd_bch, "log(exp x exp y) truncated at N")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--N", type=int, default=4)

    p = add("ordexp", cmd_ordexp, "ordered exponential of a piecewise polynomial path")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--N", type=int, default=4)
    p.add_argument("--factorize", action="store_true", help="also return the block factors")

    p = add("grouplike", cmd_grouplike, "shuffle test; exit 1 with violations")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--limit", type=int, default=None, help="stop after this many violations")

    p = add("factorize", cmd_factorize, "split a group element into block factors")
    p.add_argument("--input", "-i", required=True)

    p = add("project", cmd_project, "forget the first alpha strands")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--alpha", type=int, default=1)

    p = add("norm", cmd_norm, "quotient / l1 norms per degree, or a seminorm")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--kind", choices=["quotient", "ell1", "seminorm", "shriek"], default="quotient")
    p.add_argument("--base", type=_fraction, default=Fraction(2), help="base B for the seminorm (default 2)")
    p.add_argument("--a", type=_fraction, default=Fraction(1), help="radius a for the shriek norm (default 1)")

    p = add("growth", cmd_growth, "growth diagnostics at the series truncation")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--track", action="append",
                   help="LABEL^K=I.J: copy coefficients of (w_I w_J)^k for k <= K into the report")

    def rep_args(p):
        p.add_argument("--algebra", default="sl2", help="sl2 or slM (default sl2)")
        p.add_argument("--factors", default="1/2,1/2,1/2", help="comma-separated factor labels")

    p = add("rep-check", cmd_rep_check, "exact Kohno relations in a mixed-Casimir representation")
    rep_args(p)

    p = add("poisson-check", cmd_poisson_check, "Kohno relations under the Poisson bracket")
    p.add_argument("--structure", required=True, help="so3^n or gl(m)")

    p = add("monodromy", cmd_monodromy, "KZ monodromy of a loop")
    rep_args(p)
    p.add_argument("--generator", default="1,2", help="pure-braid generator r,s (default 1,2)")
    p.add_argument("--loop", help="ConfigLoop JSON file (overrides --generator)")
    p.add_argument("--hbar", type=float, default=0.1)
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("braid-relations", cmd_braid_relations, "pure-braid relations among KZ monodromies")
    rep_args(p)
    p.add_argument("--hbar", type=float, default=0.1)
    p.add_argument("--tol", type=float, default=1e-10, help="integrator tolerance")
    p.add_argument("--check-tol", type=float, default=1e-6, help="relation tolerance")

    p = add("flow", cmd_flow, "RK4 flow of a Hamiltonian sum c_ij Delta_ij")
    p.add_argument("--config", help="SphereConfig JSON; default: seeded random unit vectors")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--hamiltonian", default="D12")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--record-every", type=int, default=100)

    p = add("flow-compose", cmd_flow_compose, "compose flows along a word on random configurations")
    p.add_argument("--word", required=True, help="e.g. D12:1,D34:1,D12:-1,D34:-1")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--step", type=float, default=1e-3)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, ValueError, KeyError, TypeError, FloatingPointError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"liebraid {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

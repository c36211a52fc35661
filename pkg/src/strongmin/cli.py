"""Command-line front end.

Structure arguments are a file path or a registered fixture name (with or
without a trailing ``.struct``).  Point sets are comma-separated names.
The report goes to stdout: a text part, then a ``--- json ---`` line and a
JSON mirror for the structured verbs.  Diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import os
import re
import sys
from pathlib import Path

from . import fixtures, report
from .core import Flavor, load, parse, serialize
from .errors import (BudgetExhausted, LineTooShort, ParseError, StrongMinError, UnknownFixture)
from .pairs import MuFunction, load_mu, parse_mu

DATA_DIR = Path(__file__).parent / "data"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- argument helpers

def point_set(text):
    if text is None:
        return None
    return [p for p in (x.strip() for x in text.split(",")) if p]


def resolve(arg: str):
    """(structure, fixture-or-None) for a path or a fixture name."""
    path = Path(arg)
    if path.is_file():
        return load(path), None
    name = arg[:-len(".struct")] if arg.endswith(".struct") else arg
    try:
        fx = fixtures.get(name)
    except UnknownFixture:
        if arg.endswith(".struct") or os.sep in arg:
            raise UnknownFixture(f"no such file or fixture: {arg}") from None
        raise
    return fx.structure, fx


def resolve_mu(args, fx):
    if args.mu is None:
        return fx.mu if fx is not None else None
    m = re.fullmatch(r"alpha=(\d+)(?:,default=delta(?:\+(\d+))?)?", args.mu)
    if m and not Path(args.mu).exists():
        return MuFunction(int(m.group(1)), default=int(m.group(2) or 0))
    return load_mu(args.mu)


def need(value, what):
    if value is None:
        raise UsageError(f"missing {what}")
    return value


def base_of(args, s, fx):
    if args.base is not None:
        return point_set(args.base)
    if fx is not None and fx.base is not None:
        return list(fx.base)
    if s.base is not None:
        return list(s.base)
    raise UsageError("missing --base (the structure has none)")


def warn(msg):
    print(f"warning: {msg}", file=sys.stderr)


def warn_mu(s, mu):
    if mu is not None and mu.alpha_value == 1 and s.flavor is Flavor.LINEAR:
        warn("mu(alpha) = 1: lines have 3 points and the product on a line is definable")


def normality_of(args, fx):
    if args.normality is not None:
        return args.normality
    if fx is not None and fx.normality:
        return dict(fx.normality)
    return "assumed"


def paint(word: str, ok: bool) -> str:
    if os.environ.get("NO_COLOR") is not None or not sys.stdout.isatty():
        return word
    return f"\033[{32 if ok else 31}m{word}\033[0m"


def _plot(fn: str, *args):
    from . import plotting
    return getattr(plotting, fn)(*args)


# ---------------------------------------------------------------- verbs

def cmd_delta(args):
    from .predim import delta
    s, _ = resolve(args.file)
    A = point_set(args.set) if args.set is not None else s.points
    v = delta(s, A)
    return f"{v}", {"delta": v, "set": s.ordered(A)}, 0, []


def cmd_icl(args):
    from .closure import icl
    s, _ = resolve(args.file)
    r = icl(s, need(point_set(args.set), "--set"))
    text = [f"icl = {report.braces(s, r.closure)}"]
    text += [f"  {report.braces(s, x)}  delta={d}" for x, d in r.chain]
    data = {"input": s.ordered(r.input), "closure": s.ordered(r.closure),
            "chain": [[s.ordered(x), d] for x, d in r.chain]}
    return "\n".join(text), data, 0, []


def cmd_strong(args):
    from .closure import is_strong
    s, _ = resolve(args.file)
    v = is_strong(s, need(point_set(args.set), "--set"))
    return "yes" if v else "no", {"strong": v}, 0, []


def cmd_good_pairs(args):
    from .pairs import chi, enumerate_good_pairs
    s, _ = resolve(args.file)
    gps = enumerate_good_pairs(s, args.max_ext)
    chis = [chi(s, gp) for gp in gps] if args.chi else None
    text, data = report.good_pairs(s, gps, chis)
    return text, data, 0, []


def cmd_chi(args):
    from .pairs import chi, make_pair
    s, _ = resolve(args.file)
    gp = make_pair(s, need(point_set(args.set), "--set"), need(point_set(args.over), "--over"))
    v = chi(s, gp)
    return f"{v}", {"chi": v, **report.pair_data(s, gp)}, 0, []


def cmd_lmu(args):
    from .pairs import in_Lmu
    s, fx = resolve(args.file)
    mu = need(resolve_mu(args, fx), "--mu")
    warn_mu(s, mu)
    res = in_Lmu(s, mu, args.max_ext)
    text, data = report.lmu(s, res, mu)
    return text, data, 0 if res.ok else 1, []


def cmd_amalgamate(args):
    from .amalgam import free_amalgam
    from .predim import delta
    A, fa = resolve(args.file)
    B, _ = resolve(args.other)
    glue = {}
    for tok in point_set(args.glue or ""):
        b, sep, a = tok.partition("=")
        if not sep:
            raise UsageError("--glue entries look like b=a (point of B = point of A)")
        glue[b] = a
    mu = resolve_mu(args, fa) if args.mu is not None else None
    res = free_amalgam(A, B, glue, mu).result
    text = serialize(res)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    data = {"points": list(res.points), "triples": [list(t) for t in res.named_triples()],
            "delta": delta(res, res.points)}
    return text, data, 0, []


def cmd_build(args):
    from .amalgam import Demand, alpha_demand, build_generic
    s, fx = resolve(args.file)
    mu = need(resolve_mu(args, fx), "--mu")
    warn_mu(s, mu)
    demands = [alpha_demand(s.flavor, point_set(x)) for x in args.alpha_at or ()]
    for x in args.demand or ():
        a, sep, b = x.partition("/")
        if not sep:
            raise UsageError("--demand looks like A/B with comma-separated point sets")
        a, b = point_set(a), point_set(b)
        demands.append(Demand(s.induced(a + b), tuple(b), tuple(b), "demand"))
    partial = None
    try:
        res = build_generic(s, mu, args.budget, demands, args.max_ext)
        out, log, code = res.structure, res.log, 0
        realized = res.realized
    except BudgetExhausted as e:
        out, log, code, realized = e.partial, e.log, 1, []
        partial = str(e)
    text = "\n".join(list(log) + [serialize(out).rstrip("\n")])
    if partial:
        text += f"\nunmet: {partial}"
    if args.out:
        Path(args.out).write_text(serialize(out), encoding="utf-8")
    data = {"log": list(log), "points": list(out.points), "triples": [list(t) for t in out.named_triples()],
            "complete": partial is None}
    figs = [("growth.png", lambda p: _plot("plot_growth", realized, s.n, p)),
            ("structure.png", lambda p: _plot("plot_structure", out, p))]
    return text, data, code, figs


def cmd_linear(args):
    from .decomp import linear_decompose
    s, fx = resolve(args.file)
    ld = linear_decompose(s, base_of(args, s, fx))
    text, data = report.linear_decomposition(ld)
    return text, data, 0, []


def cmd_decompose(args):
    from .decomp import independence_violations, line_strata_violations, tree_decompose
    s, fx = resolve(args.file)
    mu = resolve_mu(args, fx)
    warn_mu(s, mu)
    td = tree_decompose(s, base_of(args, s, fx), args.group, mu)
    text, data = report.tree(td)
    data["independence_violations"] = [str(x) for x in independence_violations(td)]
    if s.flavor is Flavor.LINEAR:
        data["line_strata_violations"] = [str(x) for x in line_strata_violations(td)]
    return text, data, 0, [("decomposition.png", lambda p: _plot("plot_decomposition", td, p))]


def cmd_flowers(args):
    from .decomp import flowers_and_bouquet
    from .pairs import make_pair
    s, fx = resolve(args.file)
    gp = make_pair(s, need(point_set(args.set), "--set"), need(point_set(args.over), "--over"))
    gbase = point_set(args.base) if args.base is not None else (list(fx.base) if fx and fx.base else list(gp.B))
    bq = flowers_and_bouquet(s, gp, gbase, resolve_mu(args, fx))
    text, data = report.bouquet(s, bq)
    return text, data, 0, [("bouquet.png", lambda p: _plot("plot_bouquet", bq, p))]


def cmd_orbits(args):
    from .definability import orbit_report
    s, fx = resolve(args.file)
    norm = normality_of(args, fx)
    if isinstance(norm, dict):
        norm = norm.get(args.group, "assumed")
    rep = orbit_report(s, base_of(args, s, fx), args.group, norm)
    text, data = report.orbit_table(s, rep)
    return text, data, 0, [("orbits.png", lambda p: _plot("plot_orbits", s, rep, p))]


def cmd_dclstar(args):
    from .definability import classify_dclstar
    s, fx = resolve(args.file)
    mu = resolve_mu(args, fx)
    warn_mu(s, mu)
    res = classify_dclstar(s, base_of(args, s, fx), normality_of(args, fx), mu)
    text, data = report.dclstar(s, res)
    code = 0 if all(ok for _, ok in res.checks) else 1
    return text, data, code, [("orbits-pointwise.png", lambda p: _plot("plot_orbits", s, res.pointwise, p)),
                              ("orbits-setwise.png", lambda p: _plot("plot_orbits", s, res.setwise, p))]


def cmd_quasigroup(args):
    from .definability import quasigroup_experiment
    s, fx = resolve(args.file)
    I = base_of(args, s, fx)
    if s.flavor is not Flavor.LINEAR:
        raise StrongMinError("the quasigroup experiment needs a linear space")
    if args.line is not None:
        line = point_set(args.line)
    else:
        m = s.mask(I)
        full = [lm for lm in s.line_masks if lm & m == m]
        if not full:
            raise StrongMinError("no line through the base; pass --line")
        line = sorted(s.names(full[0]), key=s.index.get)
    try:
        res = quasigroup_experiment(s, line, I)
    except LineTooShort as e:
        text = f"{e.verdict}: line {{{','.join(s.ordered(line))}}} has 3 points; the product is {e.product}"
        return text, {"verdict": e.verdict, "product": e.product, "line": s.ordered(line)}, 0, []
    text, data = report.quasigroup(res)
    return text, data, 0, []


def cmd_verify(args):
    from .definability import verify_fixture
    wanted = fixtures.names() if args.fixture == "all" else [args.fixture[:-7] if args.fixture.endswith(".struct")
                                                              else args.fixture]
    texts, datas, ok = [], [], True
    for name in wanted:
        rep = verify_fixture(name)
        t, d = report.fixture(rep)
        texts.append(t)
        datas.append(d)
        ok &= rep.ok
    data = datas[0] if len(datas) == 1 else {"fixtures": datas}
    return "\n\n".join(texts), data, 0 if ok else 1, []


def check_data_dir(directory: Path) -> list:
    """Parse every .struct/.mu file and round-trip it; return error strings."""
    errors = []
    for path in sorted(directory.glob("*.struct")) + sorted(directory.glob("*.mu")):
        try:
            if path.suffix == ".struct":
                s = load(path)
                again = parse(serialize(s), str(path))
                if serialize(again) != serialize(s):
                    errors.append(f"{path.name}: round trip changed the structure")
                name = path.stem
                if name in fixtures.registry():
                    fx = fixtures.get(name)
                    want = fx.structure if fx.base is None else fx.structure.with_base(fx.base)
                    if serialize(want) != serialize(s):
                        errors.append(f"{path.name}: differs from the registered fixture")
            else:
                mu = load_mu(path)
                if parse_mu(mu.serialize(), str(path)) != mu:
                    errors.append(f"{path.name}: round trip changed the mu-function")
                if path.stem in fixtures.registry() and fixtures.get(path.stem).mu != mu:
                    errors.append(f"{path.name}: differs from the registered fixture")
        except ParseError as e:
            errors.append(f"parse error: {e}")
    return errors


def cmd_selftest(args):
    from .definability import verify_fixture
    from .properties import run_suite
    results = run_suite(args.seed, args.count)
    reps = [verify_fixture(n) for n in fixtures.names()]
    errs = check_data_dir(DATA_DIR)
    if args.fixtures_dir:
        errs += check_data_dir(Path(args.fixtures_dir))
    text, data, ok = report.selftest(results, reps, errs)
    return text, data, 0 if ok else 1, [("selftest.png", lambda p: _plot("plot_selftest", results, p))]


VERBS = {
    "delta": cmd_delta, "icl": cmd_icl, "strong": cmd_strong, "good-pairs": cmd_good_pairs, "chi": cmd_chi,
    "lmu-check": cmd_lmu, "amalgamate": cmd_amalgamate, "build-generic": cmd_build,
    "linear-decompose": cmd_linear, "decompose": cmd_decompose, "flowers": cmd_flowers, "orbits": cmd_orbits,
    "dclstar": cmd_dclstar, "quasigroup": cmd_quasigroup, "verify": cmd_verify, "selftest": cmd_selftest,
}
SCALAR = {"delta", "strong", "chi"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="strongmin", description="Predimension, closures and definability on finite structures.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def common(sp, file=True):
        if file:
            sp.add_argument("file", help="structure file or fixture name")
        sp.add_argument("--report", metavar="DIR", help="also write the report and figures to DIR")
        sp.add_argument("--json", action="store_true", help="append the JSON section to scalar verbs")
        return sp

    for verb in ("delta", "icl", "strong"):
        common(sub.add_parser(verb)).add_argument("--set")
    sp = common(sub.add_parser("good-pairs"))
    sp.add_argument("--max-ext", type=int, default=4)
    sp.add_argument("--chi", action="store_true", help="also report chi for each pair")
    sp = common(sub.add_parser("chi"))
    sp.add_argument("--set")
    sp.add_argument("--over")
    sp = common(sub.add_parser("lmu-check"))
    sp.add_argument("--mu")
    sp.add_argument("--max-ext", type=int, default=4)
    sp = common(sub.add_parser("amalgamate"))
    sp.add_argument("other", help="second structure")
    sp.add_argument("--glue", help="b=a,... identifying points of the second structure with the first")
    sp.add_argument("--mu")
    sp.add_argument("--out")
    sp = common(sub.add_parser("build-generic"))
    sp.add_argument("--mu")
    sp.add_argument("--budget", type=int, default=20)
    sp.add_argument("--max-ext", type=int, default=4)
    sp.add_argument("--alpha-at", action="append", help="demand alpha over two points p,q")
    sp.add_argument("--demand", action="append", help="demand the pair A/B of the seed over B")
    sp.add_argument("--out")
    sp = common(sub.add_parser("linear-decompose"))
    sp.add_argument("--base")
    for verb in ("decompose", "orbits", "dclstar"):
        sp = common(sub.add_parser(verb))
        sp.add_argument("--base")
        sp.add_argument("--group", choices=("pointwise", "setwise"), default="pointwise")
        sp.add_argument("--mu")
        sp.add_argument("--normality", choices=("certified", "assumed"))
    sp = common(sub.add_parser("flowers"))
    sp.add_argument("--set")
    sp.add_argument("--over")
    sp.add_argument("--base", help="the setwise-stabilized base (defaults to the fixture base or B)")
    sp.add_argument("--mu")
    sp = common(sub.add_parser("quasigroup"))
    sp.add_argument("--base")
    sp.add_argument("--line")
    sp = common(sub.add_parser("verify"), file=False)
    sp.add_argument("fixture", help="fixture name or 'all'")
    sp = common(sub.add_parser("selftest"), file=False)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=500)
    sp.add_argument("--fixtures-dir", help="also parse and round-trip every .struct/.mu file here")
    return p


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        text, data, code, figs = VERBS[args.verb](args)
    except UsageError as e:
        print(f"usage error: {e} (try 'strongmin --help')", file=sys.stderr)
        return 2
    except (ParseError, UnknownFixture) as e:
        msg = e.args[0] if isinstance(e, UnknownFixture) else str(e)
        print(f"error: {msg}", file=sys.stderr)
        return 2
    except StrongMinError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    if args.verb in SCALAR and not args.json:
        data = None
    out = report.emit(text, data)
    if args.verb in ("verify", "selftest"):
        out = re.sub(r"^( *)(PASS|FAIL|XFAIL|XPASS)\b", lambda m: m.group(1) + paint(m.group(2), m.group(2) in
                     ("PASS", "XFAIL")), out, flags=re.M)
    stdout.write(out)
    if args.report:
        d = Path(args.report)
        d.mkdir(parents=True, exist_ok=True)
        (d / "report.txt").write_text(report.emit(text, data if data is not None else {}), encoding="utf-8")
        for name, draw in figs:
            draw(d / name)
        if args.verb not in ("verify", "selftest") and getattr(args, "file", None):
            s, fx = resolve(args.file)
            _plot("plot_structure", s, d / "input.png")
        print(f"report written to {d}", file=sys.stderr)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

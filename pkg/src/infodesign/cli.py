"""Command-line front end.

Exit codes: 0 success, 2 bad configuration, 3 solver infeasibility,
4 verification failure, 5 internal check failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from fractions import Fraction

import numpy as np

from infodesign.core import (
    DiscreteAtoms,
    InfeasibleConstraints,
    MarketPrimitives,
    NotBayesPlausible,
    PiecewiseLinearCdf,
    PointMass,
    SolverError,
    TypeDistribution,
    Uniform01,
)

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_VERIFY, EXIT_INTERNAL = 0, 2, 3, 4, 5


class ConfigError(ValueError):
    pass


def parse_distribution(text: str) -> TypeDistribution:
    """Parse ``uniform``, ``point:θ``, ``atoms:θ@w,...`` or ``plcdf:θ@F,...``."""
    text = text.strip()
    try:
        if text == "uniform":
            return Uniform01()
        kind, _, body = text.partition(":")
        if kind == "point":
            return PointMass(float(body))
        if kind in ("atoms", "plcdf"):
            pairs = []
            for item in body.split(","):
                a, sep, b = item.partition("@")
                if not sep:
                    raise ConfigError(f"expected θ@value in {item!r}")
                pairs.append((float(a), float(b)))
            if kind == "atoms":
                return DiscreteAtoms.from_pairs(pairs)
            return PiecewiseLinearCdf(tuple(pairs))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"bad distribution {text!r}: {exc}") from exc
    raise ConfigError(f"unknown distribution literal {text!r}")


def fmt(x) -> str:
    """Shortest round-trip decimal for floats; exact ratio for fractions."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _market(args) -> MarketPrimitives:
    try:
        return MarketPrimitives(float(args.L), float(args.H))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) for x in r])
    return buf.getvalue()


# --------------------------------------------------------------------------
# surplus-set
# --------------------------------------------------------------------------


def cmd_surplus_set(args) -> int:
    from infodesign.payoffs import baselines, observable_triangle
    from infodesign.persuasion import boundary_rows, implementable_set, sweep_directions

    mkt = _market(args)
    dist = parse_distribution(args.dist)
    base = baselines(mkt, dist)
    tri = observable_triangle(mkt, dist)
    mu0 = dist.mean()
    header = ["which", "lambda_u", "lambda_pi", "U", "Pi", "mu1", "w1", "mu2", "w2"]
    rows = []
    if 0.0 < mu0 < 1.0:
        sweep = sweep_directions(mkt, dist, args.grid, args.directions)
        rows += [("boundary",) + r for r in boundary_rows(sweep)]
    hull = implementable_set(mkt, dist, args.grid, args.directions)
    for (u, p), c in zip(hull.boundary, hull.certificates):
        mu1, w1 = c.support[0], c.weights[0]
        mu2, w2 = (c.support[1], c.weights[1]) if len(c) > 1 else (mu1, 0.0)
        rows.append(("vertex", "", "", u, p, mu1, w1, mu2, w2))
    for u, p in tri.boundary:
        rows.append(("triangle", "", "", u, p, "", "", "", ""))
    rows.append(("no_info", "", "", base.u_noinfo, base.pi_floor, mu0, 1.0, mu0, 0.0))
    rows.append(("full_info", "", "", 0.0, base.w_bar, "", "", "", ""))
    if args.format == "json":
        body = {
            "market": {"L": mkt.low, "H": mkt.high},
            "dist": str(dist),
            "baselines": {"pi_floor": base.pi_floor, "w_bar": base.w_bar, "u_noinfo": base.u_noinfo},
            "triangle": [{"U": float(u), "Pi": float(p)} for u, p in tri.boundary],
            "boundary": [{"U": float(u), "Pi": float(p)} for u, p in hull.boundary],
        }
        _emit(json.dumps(body, indent=2) + "\n", args.out)
    else:
        _emit(_csv(rows, header), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# figure
# --------------------------------------------------------------------------

FIGURE_MARKETS = {"1": (1.0, 2.0), "2a": (1.0, 3.0), "2b": (2.0, 3.0), "3": (1.0, 3.0)}


def figure_rows(fig: str, curve_points: int = 201, grid: int = 2001, directions: int = 720) -> list[tuple]:
    from infodesign.implications import Protocol, protocol_outcomes
    from infodesign.payoffs import baselines, observable_triangle
    from infodesign.uniform import buyer_optimal, left_boundary, right_boundary

    lo, hi = FIGURE_MARKETS[fig]
    mkt = MarketPrimitives(lo, hi)
    dist = Uniform01()
    base = baselines(mkt, dist)
    rows: list[tuple] = []
    for u, p in observable_triangle(mkt, dist).boundary:
        rows.append(("triangle", u, p))
    rows.append(("pi_floor", 0.0, base.pi_floor))
    rows.append(("w_bar", 0.0, base.w_bar))
    rows.append(("max_rent", base.w_bar - base.pi_floor, base.pi_floor))
    for bp in right_boundary(mkt, curve_points):
        rows.append(("right_boundary", bp.outcome.buyer_surplus, bp.outcome.seller_profit))
    for bp in left_boundary(mkt, curve_points):
        rows.append(("left_boundary", bp.outcome.buyer_surplus, bp.outcome.seller_profit))
    rows.append(("no_info", base.u_noinfo, base.pi_floor))
    rows.append(("full_info", 0.0, base.w_bar))
    best = buyer_optimal(mkt).outcome
    rows.append(("buyer_optimal", best.buyer_surplus, best.seller_profit))
    if fig in ("2a", "2b"):
        from infodesign.implications import constrained_seller_optimal

        c = constrained_seller_optimal(mkt, dist, grid, directions, certify=False).outcome
        rows.append(("C", c.buyer_surplus, c.seller_profit))
    if fig == "3":
        ct = protocol_outcomes(Protocol.CHEAP_TALK, mkt, dist)
        rows.append(("cheap_talk", ct.buyer_surplus, ct.seller_profit))
        vd = protocol_outcomes(Protocol.VOLUNTARY_DISCLOSURE, mkt, dist, curve_points=curve_points)
        rows += [("voluntary_disclosure", u, p) for u, p in vd.points]
        rc = protocol_outcomes(Protocol.REQUEST_CONSENT_UNINFORMED, mkt, dist, grid, directions)
        rows += [("request_consent", u, p) for u, p in rc.boundary]
    return rows


def cmd_figure(args) -> int:
    if args.id not in FIGURE_MARKETS:
        raise ConfigError(f"unknown figure id {args.id!r}; choose from {sorted(FIGURE_MARKETS)}")
    rows = figure_rows(args.id, grid=args.grid, directions=args.directions)
    if args.format == "json":
        body = {"figure": args.id, "points": [{"which": w, "U": float(u), "Pi": float(p)} for w, u, p in rows]}
        _emit(json.dumps(body, indent=2) + "\n", args.out)
    else:
        _emit(_csv(rows, ["which", "U", "Pi"]), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# verify
# --------------------------------------------------------------------------


def cmd_verify(args) -> int:
    from infodesign.mechanisms import (
        NotIncentiveCompatible,
        build_public_signal,
        check_ic,
        check_obedience,
        check_structural,
        read_mechanism_csv,
        replication_check,
    )

    try:
        mech = read_mechanism_csv(args.file)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot read mechanism: {exc}") from exc
    if len(mech) == 0:
        raise ConfigError("mechanism file has no rows")
    mkt = _market(args)
    lines = []
    st = check_structural(mech)
    checks = [
        ("monotonicity", st.monotone, f"witness={st.monotone_witness}"),
        ("relative_impact", st.relative_impact, f"witness={st.relative_impact_witness}"),
    ]
    ic = check_ic(mech, mkt)
    checks.append(("incentive_compatibility", ic.ok, f"worst={fmt(ic.worst_violation)} witness={ic.witness}"))
    ob = check_obedience(mech, mkt)
    checks.append(("obedience", ob.ok, f"worst={fmt(ob.worst_violation)}"))
    failed = None
    for name, ok, detail in checks:
        lines.append(f"{name}: {'pass' if ok else 'FAIL'} {detail}")
        if not ok and failed is None:
            failed = name
    if failed is None:
        try:
            sig = build_public_signal(mech, mkt)
            lines.append(f"public_signal: pass mlr_violation={fmt(sig.mlr_violation())}")
            w = [1.0 / len(mech)] * len(mech)
            rep = replication_check(mech, w, mkt)
            ok = rep.ok()
            lines.append(
                f"replication: {'pass' if ok else 'FAIL'} item_error={fmt(rep.max_item_error)} outcome_error={fmt(rep.outcome_error)}"
            )
            if not ok:
                failed = "replication"
        except NotIncentiveCompatible as exc:
            lines.append(f"public_signal: FAIL {exc}")
            failed = "public_signal"
    if failed:
        lines.append(f"FAILED: {failed}")
    else:
        lines.append("OK")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_VERIFY if failed else EXIT_OK


# --------------------------------------------------------------------------
# many-values example
# --------------------------------------------------------------------------


def cmd_example_many_values(args) -> int:
    from infodesign import manyvalues as mv

    values = tuple(Fraction(v) for v in args.values.split(",")) if args.values else (Fraction(1), Fraction(3), Fraction(4))
    try:
        mkt = mv.MultiMarket(values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if mkt.n != 3:
        raise ConfigError("the worked example uses exactly three values")
    tie = mv.PriceTie.HIGHEST if args.tie_break == "high" else mv.PriceTie.LOWEST
    paper_values = values == (1, 3, 4)
    menu = mv.example_menu()
    types = menu.types
    out = []
    ic = mv.menu_ic_check_many(menu, mkt, tie)
    out.append("IC table (row type uses column signal):")
    for i, row in enumerate(ic.values):
        out.append(f"  theta{i + 1}: " + "  ".join(fmt(v) for v in row))
    own = [ic.values[i][i] for i in range(len(types))]
    outside = [mv.type_signal_value(t, mv.uninformative(mkt.n), mkt, tie) for t in types]
    out.append("own-signal profits: " + ", ".join(fmt(v) for v in own))
    out.append("no-data profits: " + ", ".join(fmt(v) for v in outside))
    u0 = mv.no_data_buyer_surplus(menu, mkt, tie)
    out.append(f"no-data buyer surplus U0 = {fmt(u0)}")
    eff = mv.efficient_outcome_check(menu, mkt, tie)
    out.append(f"menu outcome efficient: {eff}")
    res = mv.min_rent_efficient_public(mkt, types, 0)
    out.append("cheapest efficient public signal for theta1 (rows v, columns s0 s1):")
    for v, row in zip(values, res.signal.likelihood):
        out.append(f"  v={fmt(v)}: " + "  ".join(fmt(x) for x in row))
    val = mv.type_signal_value(types[0], res.signal, mkt, tie)
    out.append(f"theta1 profit under that signal = {fmt(res.profit)} (recomputed {fmt(val)}) vs outside option {fmt(outside[0])}")
    checks = {}
    if paper_values:
        F = Fraction
        checks = {
            "ic": ic.ok,
            "profits": own == [F(3, 2), F(3, 2), F(2)],
            "outside_equals_own": own == outside,
            "u0": u0 == F(1, 12),
            "efficient": eff,
            "rent_signal": res.pooled == (F(1), F(1, 2), F(1, 3)),
            "rent_profit": res.profit == F(19, 12) and val == F(19, 12),
            "rent_gap": res.profit > outside[0],
        }
        for name, ok in checks.items():
            out.append(f"check {name}: {'pass' if ok else 'FAIL'}")
    else:
        out.append("non-default values: report only, no reference comparison")
    _emit("\n".join(out) + "\n", args.out)
    return EXIT_OK if all(checks.values()) else EXIT_INTERNAL


# --------------------------------------------------------------------------
# oracle and protocols
# --------------------------------------------------------------------------


def cmd_oracle(args) -> int:
    from infodesign.core import BinarySignal
    from infodesign.geometry import distances_outside_polygon
    from infodesign.oracle import OracleConfig, enumerate_public_outcomes, oracle_report, simulate_game
    from infodesign.persuasion import implementable_set, outcome_of_signal

    mkt = _market(args)
    dist = parse_distribution(args.dist)
    try:
        cfg = OracleConfig(grid_step=args.grid_step, rng_seed=args.seed, sample_count=args.samples)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    lines = []
    cloud = enumerate_public_outcomes(mkt, dist, cfg)
    hull = implementable_set(mkt, dist, args.grid, args.directions)
    out = float(distances_outside_polygon(hull.boundary, cloud.points).max())
    passed = out <= 1e-6
    lines.append(oracle_report("public_cloud_in_set", passed, out, cfg))
    all_ok = passed
    for sig in (BinarySignal(0.0, 0.0), BinarySignal(0.0, 1.0), BinarySignal(0.0, 0.5)):
        est = simulate_game(sig, mkt, dist, cfg)
        target = outcome_of_signal(sig.to_finite(), mkt, dist)
        ok = est.agrees_with(target)
        dev = max(abs(est.buyer_surplus - target.buyer_surplus), abs(est.seller_profit - target.seller_profit))
        lines.append(oracle_report(f"monte_carlo_{sig.alpha!r}_{sig.beta!r}", ok, dev, cfg))
        all_ok &= ok
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if all_ok else EXIT_VERIFY


def cmd_protocols(args) -> int:
    from infodesign.core import FullSupportRequired
    from infodesign.implications import Protocol, protocol_outcomes, protocol_points

    mkt = _market(args)
    dist = parse_distribution(args.dist)
    reports = []
    for proto in Protocol:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                res = protocol_outcomes(proto, mkt, dist, args.grid, args.directions)
        except FullSupportRequired as exc:
            reports.append({"protocol": proto.value, "error": str(exc), "points": []})
            continue
        pts = protocol_points(res)
        reports.append({"protocol": proto.value, "points": [{"U": float(u), "Pi": float(p)} for u, p in pts]})
    _emit(json.dumps(reports, indent=2) + "\n", args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--L", type=float, default=1.0, help="low buyer value")
    common.add_argument("--H", type=float, default=3.0, help="high buyer value")
    common.add_argument("--values", default=None, help="comma-separated value list (many-values example)")
    common.add_argument("--dist", default="uniform", help="type distribution literal")
    common.add_argument("--grid", type=int, default=2001, help="belief grid size")
    common.add_argument("--directions", type=int, default=720, help="number of support directions")
    common.add_argument("--seed", type=int, default=20240601, help="Monte-Carlo seed")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output path (stdout if omitted)")

    p = argparse.ArgumentParser(prog="infodesign", description="Implementable outcomes of data provision to a privately informed seller.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("surplus-set", parents=[common], help="boundary of the implementable set")
    s.set_defaults(func=cmd_surplus_set)
    s = sub.add_parser("figure", parents=[common], help="plot data for a figure (1, 2a, 2b, 3)")
    s.add_argument("id")
    s.set_defaults(func=cmd_figure)
    s = sub.add_parser("verify", parents=[common], help="verify a direct mechanism CSV (theta,alpha,beta)")
    s.add_argument("file")
    s.set_defaults(func=cmd_verify)
    s = sub.add_parser("example-many-values", parents=[common], help="three-value worked example")
    s.add_argument("--tie-break", choices=("low", "high"), default="low")
    s.set_defaults(func=cmd_example_many_values)
    s = sub.add_parser("oracle", parents=[common], help="brute-force and Monte-Carlo checks")
    s.add_argument("--grid-step", type=float, default=0.05)
    s.add_argument("--samples", type=int, default=1_000_000)
    # containment at 1e-6 needs a finer direction sweep than the plotting default
    s.set_defaults(func=cmd_oracle, directions=2880)
    s = sub.add_parser("protocols", parents=[common], help="protocol outcome sets as JSON")
    s.set_defaults(func=cmd_protocols)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, InfeasibleConstraints, NotBayesPlausible) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())

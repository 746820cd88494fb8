"""Command-line surface: design, verify, analyze, simulate, neg.

All reports are machine-readable JSON (``--pretty`` adds a table rendering
on stderr-free stdout).  Exit codes are a stable contract: 0 success,
1 a rationality/effectiveness check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .design import (
    LinearRelation,
    ZDAssignment,
    design_row,
    DesignedRow,
    feasible_mu_interval,
    rationality_check,
    verify_effectiveness,
)
from .errors import DomainError, ValidationError, ZDKitError
from .games import GameSpec
from .markov import TransitionMatrix, analyze, build_pee, build_rule
from .montecarlo import compare_empirical_vs_exact, simulate
from .network import NetworkGame, reduce_to_fop

DEFAULT_SEED = 20120626
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


# ---------------------------------------------------------------------------
# relation-spec parsing


def _parse_kv(body: str) -> dict:
    out = {}
    for part in body.split(","):
        if "=" not in part:
            raise ValidationError(f"malformed relation field {part!r}")
        key, value = part.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def parse_relation_spec(spec: str, game: GameSpec, designer: int):
    """Parse one --relation string into (row_index, LinearRelation, mu_or_auto).

    Forms:
      pin:target=M,value=R,row=J,mu=MU
      extort:target=M,factor=CHI,r=R,row=J,mu=MU
      lin:coeffs=A1:A2:...:AN,constant=A0,row=J,mu=MU
    mu may be the literal 'auto' to take the midpoint of the feasible interval.
    """
    if ":" not in spec:
        raise ValidationError(f"relation spec {spec!r} missing 'kind:' prefix")
    kind, body = spec.split(":", 1)
    fields = _parse_kv(body)
    try:
        row = int(fields["row"])
        mu = fields.get("mu", "auto")
        if kind == "pin":
            relation = LinearRelation.pinning(
                game.n, int(fields["target"]), float(fields["value"])
            )
        elif kind == "extort":
            relation = LinearRelation.extortion(
                game.n, designer, int(fields["target"]),
                float(fields["factor"]), float(fields["r"]),
            )
        elif kind == "lin":
            coeffs = tuple(float(v) for v in fields["coeffs"].split(":"))
            relation = LinearRelation(coeffs, float(fields.get("constant", 0.0)))
        else:
            raise ValidationError(f"unknown relation kind {kind!r}")
    except KeyError as exc:
        raise ValidationError(f"relation spec {spec!r} missing field {exc}") from exc
    mu_val = None if mu == "auto" else float(mu)
    return row, relation, mu_val


def _resolve_mu(game: GameSpec, designer: int, row: int,
                relation: LinearRelation, mu) -> float:
    if mu is not None:
        if mu == 0.0:
            raise DomainError("mu must be nonzero")
        return mu
    lo, hi = feasible_mu_interval(game, designer, row, relation)
    # prefer the larger half, staying away from the excluded point 0
    candidate = hi / 2.0 if hi > -lo else lo / 2.0
    if candidate == 0.0:
        raise DomainError(
            f"feasible mu interval [{lo:.6g}, {hi:.6g}] for row {row} contains "
            f"only the excluded point 0; no rational design exists"
        )
    return candidate


def build_assignment(game: GameSpec, designer: int, specs) -> ZDAssignment:
    designed = {}
    for spec in specs:
        row, relation, mu = parse_relation_spec(spec, game, designer)
        mu = _resolve_mu(game, designer, row, relation, mu)
        if row in designed:
            raise ValidationError(f"row {row} designed twice")
        designed[row] = DesignedRow(
            strategy=row, relation=relation, mu=mu,
            row=design_row(game, designer, row, relation, mu),
        )
    return ZDAssignment(designer=designer, k=game.k[designer - 1],
                        kappa=game.kappa, designed=designed)


# ---------------------------------------------------------------------------
# file helpers


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ValidationError(f"cannot open {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno}: {exc.msg}") from exc


def _load_rules(doc: dict, game: GameSpec) -> dict:
    if "rules" not in doc:
        raise ValidationError("rules file missing required field 'rules'")
    out = {}
    for key, matrix in doc["rules"].items():
        p = int(key)
        out[p] = build_rule(p, np.array(matrix, dtype=float))
    return out


def _random_interior_rule(rng, player: int, k: int, kappa: int):
    # entries strictly inside (0, 1): draw positive weights and normalize
    w = rng.uniform(0.1, 1.0, size=(k, kappa))
    return build_rule(player, w / w.sum(axis=0))


def _emit(doc: dict, out, pretty: bool):
    text = json.dumps(doc, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if pretty:
        _render_table(doc)


def _render_table(doc: dict, indent: str = ""):
    for key, value in doc.items():
        if isinstance(value, dict):
            print(f"{indent}{key}:")
            _render_table(value, indent + "  ")
        elif isinstance(value, list) and value and isinstance(value[0], (int, float)):
            body = "  ".join(f"{v:.6g}" if isinstance(v, float) else str(v)
                             for v in value)
            print(f"{indent}{key:<20} {body}")
        else:
            print(f"{indent}{key:<20} {value}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_design(args) -> int:
    game = GameSpec.from_json(_load_json(args.game))
    assignment = build_assignment(game, args.player, args.relation)
    report = rationality_check(assignment)
    doc = assignment.to_json()
    doc["rationality"] = report.to_json()
    _emit(doc, args.out, args.pretty)
    return EXIT_OK if report.verdict else EXIT_CHECK_FAILED


def cmd_verify(args) -> int:
    game = GameSpec.from_json(_load_json(args.game))
    assignment = ZDAssignment.from_json(_load_json(args.assignment))
    trials = []
    if args.opponents:
        rules = _load_rules(_load_json(args.opponents), game)
        trials.append(rules)
    elif args.random_opponents:
        rng = np.random.default_rng(args.seed)
        for _ in range(args.random_opponents):
            trials.append({
                p: _random_interior_rule(rng, p, game.k[p - 1], game.kappa)
                for p in range(1, game.n + 1) if p != assignment.designer
            })
    else:
        raise ValidationError("need --opponents FILE or --random-opponents N")
    reports = [
        verify_effectiveness(game, assignment, rules, residual_tol=args.tol)
        for rules in trials
    ]
    all_ok = all(r.effective for r in reports)
    doc = {
        "trials": len(reports),
        "all_effective": all_ok,
        "reports": [r.to_json() for r in reports],
    }
    _emit(doc, args.out, args.pretty)
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def cmd_analyze(args) -> int:
    if args.matrix:
        doc = _load_json(args.matrix)
        L = np.array(doc["matrix"] if isinstance(doc, dict) else doc, dtype=float)
        L = TransitionMatrix(matrix=L)
    elif args.rules:
        game = GameSpec.from_json(_load_json(args.game)) if args.game else None
        rules_doc = _load_json(args.rules)
        rules = _load_rules(rules_doc, game)
        L = build_pee([rules[p] for p in sorted(rules)])
    else:
        raise ValidationError("need --matrix FILE or --rules FILE")
    report = analyze(L)
    _emit(report.to_json(), args.out, args.pretty)
    return EXIT_OK


def cmd_simulate(args) -> int:
    game = GameSpec.from_json(_load_json(args.game))
    rules = _load_rules(_load_json(args.rules), game)
    if args.assignment:
        assignment = ZDAssignment.from_json(_load_json(args.assignment))
        rules[assignment.designer] = assignment.as_rule()
    missing = [p for p in range(1, game.n + 1) if p not in rules]
    if missing:
        raise ValidationError(f"no rule given for players {missing}")
    L = build_pee([rules[p] for p in sorted(rules)])
    traj = simulate(L, x0=args.x0, steps=args.steps, seed=args.seed, game=game)
    doc = traj.to_json()
    report = analyze(L)
    if report.stationary is not None:
        doc.update(compare_empirical_vs_exact(
            traj, report.stationary, payoff_vectors=game.payoffs, z=args.z))
    _emit(doc, args.out, args.pretty)
    return EXIT_OK if doc.get("pass", True) else EXIT_CHECK_FAILED


def cmd_neg(args) -> int:
    if not args.out:
        raise ValidationError("neg writes several artifacts; --out DIR is required")
    net = NetworkGame.load(args.network)
    node = args.node
    if node not in net.nodes and node.isdigit() and int(node) in net.nodes:
        node = int(node)
    fop = reduce_to_fop(net, node)
    assignment = build_assignment(fop.game, designer=1, specs=args.relation)
    rationality = rationality_check(assignment)
    rng = np.random.default_rng(args.seed)
    reports = []
    for _ in range(args.random_opponents):
        rules = {2: _random_interior_rule(rng, 2, fop.game.k[1], fop.game.kappa)}
        reports.append(verify_effectiveness(fop.game, assignment, rules,
                                            residual_tol=args.tol))
    os.makedirs(args.out, exist_ok=True)
    game_doc = fop.game.to_json()
    game_doc["focal_node"] = str(fop.focal)
    game_doc["aggregate_profiles"] = [list(c) for c in fop.aggregate_profiles]
    with open(os.path.join(args.out, "reduced_game.json"), "w") as fh:
        json.dump(game_doc, fh, indent=2)
    with open(os.path.join(args.out, "assignment.json"), "w") as fh:
        json.dump(assignment.to_json(), fh, indent=2)
    all_ok = rationality.verdict and all(r.effective for r in reports)
    report_doc = {
        "node": str(fop.focal),
        "rational": rationality.verdict,
        "trials": len(reports),
        "all_effective": all(r.effective for r in reports),
        "reports": [r.to_json() for r in reports],
    }
    with open(os.path.join(args.out, "report.json"), "w") as fh:
        json.dump(report_doc, fh, indent=2)
    if args.pretty:
        _render_table(report_doc)
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zdkit",
        description="Design and verify payoff-controlling strategies "
                    "for repeated finite games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--pretty", action="store_true",
                       help="also print a human-readable table")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--tol", type=float, default=1e-8,
                       help="residual tolerance for effectiveness")

    p = sub.add_parser("design", help="design strategy rows from payoff relations")
    p.add_argument("--game", required=True)
    p.add_argument("--player", type=int, required=True, help="designing player (1-based)")
    p.add_argument("--relation", action="append", required=True,
                   help="pin:target=M,value=R,row=J,mu=MU | "
                        "extort:target=M,factor=CHI,r=R,row=J,mu=MU | "
                        "lin:coeffs=A1:...:AN,constant=A0,row=J,mu=MU "
                        "(mu may be 'auto')")
    common(p)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("verify", help="verify an assignment against opponents")
    p.add_argument("--game", required=True)
    p.add_argument("--assignment", required=True)
    p.add_argument("--opponents", help="JSON file with opponents' rule matrices")
    p.add_argument("--random-opponents", type=int,
                   help="verify against N random interior opponents")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze", help="Markov analysis of a transition matrix")
    p.add_argument("--game")
    p.add_argument("--matrix", help="JSON file with the transition matrix")
    p.add_argument("--rules", help="JSON file with all players' rules")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte-Carlo trajectory of the chain")
    p.add_argument("--game", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--assignment", help="splice a designed rule over its player")
    p.add_argument("--steps", type=int, default=100000)
    p.add_argument("--x0", type=int, default=1)
    p.add_argument("--z", type=float, default=4.0,
                   help="z-score threshold for the empirical-vs-exact check")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("neg", help="reduce a networked game and design for one node")
    p.add_argument("--network", required=True)
    p.add_argument("--node", required=True)
    p.add_argument("--relation", action="append", required=True,
                   help="relation specs on the reduced 2-player game "
                        "(opponent is player 2)")
    p.add_argument("--random-opponents", type=int, default=20)
    common(p)
    p.set_defaults(func=cmd_neg)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ZDKitError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 on success, 2 on validation errors, 3 when a theorem premise
fails. Errors are written to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import classical, contraction, divergence, dpcert, inference, stability
from ._parallel import pmap, thread_count
from .errors import AssumptionViolated, QDPError
from .io import dumps_csv, dumps_json, load_json, pair_from_json, pair_to_json, parse_grid

EXIT_OK, EXIT_INVALID, EXIT_ASSUMPTION = 0, 2, 3


class UsageError(QDPError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _params(args) -> dpcert.PrivacyParams:
    if args.eps is None:
        raise UsageError("--eps is required")
    return dpcert.PrivacyParams(args.eps, args.delta)


def _grid(text: str | None, default: str) -> np.ndarray:
    return parse_grid(text if text is not None else default)


def _emit(args, payload: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _table(args, header, rows, extra: dict | None = None) -> str:
    if args.format == "json":
        obj = {"columns": list(header), "rows": [list(r) for r in rows]}
        if extra:
            obj.update(extra)
        return dumps_json(obj)
    return dumps_csv(header, rows)


# --- subcommands -----------------------------------------------------------


def cmd_certify(args) -> str:
    pair = pair_from_json(load_json(args.pair))
    cert = dpcert.certify_dp(pair, _params(args))
    return dumps_json({"is_dp": cert.is_dp, "delta_star": cert.delta_star, "epsilon": args.eps, "delta": args.delta})


def cmd_divergence(args) -> str:
    pair = pair_from_json(load_json(args.pair))
    kind = args.kind
    if kind == "hockey":
        value = divergence.hockey_stick_q(pair, args.gamma)
    elif kind == "hyptest":
        value = divergence.hyp_test_div(pair, args.alpha)
    elif kind == "kl":
        value = divergence.relative_entropy(pair)
    elif kind == "kl-integral":
        value = divergence.relative_entropy_integral(pair)
    elif kind == "dmax":
        value = divergence.dmax(pair)
    elif kind == "renyi":
        value = divergence.renyi_hockey(pair, args.alpha)
    else:
        value = divergence.measured_renyi_half(pair, args.convention)
    return dumps_json({"kind": kind, "value": value})


def cmd_tradeoff(args) -> str:
    al = _grid(args.alpha_grid, "0:1:101")
    if args.pair:
        pair = pair_from_json(load_json(args.pair))
        beta = divergence.type2_error(pair, al)
    else:
        beta = dpcert.f_tradeoff(_params(args), al)
    return _table(args, ["alpha", "beta"], zip(al.tolist(), np.atleast_1d(beta).tolist()))


def cmd_region(args) -> str:
    r = dpcert.region(_params(args))
    extra = {"worst_fixed_point": r.worst_fixed_point, "best_fixed_point": r.best_fixed_point}
    return _table(args, ["alpha", "beta"], r.vertices, extra)


def cmd_weakest(args) -> str:
    pair = dpcert.weakest_pure_pair(args.eps) if args.pure else dpcert.weakest_pair(_params(args))
    return dumps_json(pair_to_json(pair))


def cmd_dominates(args) -> str:
    a = pair_from_json(load_json(args.pair_a))
    b = pair_from_json(load_json(args.pair_b))
    verdict = dpcert.dominates(a, b, grid=args.grid)
    g, slack = dpcert.dominance_slack(a, b, args.grid)
    rows = list(zip(g.tolist(), slack[0].tolist(), slack[1].tolist()))
    if args.format == "json":
        return dumps_json(
            {"dominates": verdict, "min_slack": float(slack.min()), "columns": ["gamma", "slack", "slack_reverse"], "rows": rows}
        )
    return dumps_csv(["gamma", "slack", "slack_reverse"], rows)


def cmd_fisher(args) -> str:
    p = _params(args)
    thetas = _grid(args.theta, "0.1:0.9:9")
    weak = dpcert.weakest_pair(p)
    rows = pmap(lambda t: (t, inference.fisher_max(p, t), inference.sld_fisher(weak, t)), thetas.tolist())
    return _table(args, ["theta", "fisher_max", "sld_weakest"], rows)


def cmd_contraction(args) -> str:
    gam = _grid(args.gamma_grid, "1:3:21")
    if args.channel:
        ch = contraction.QuantumChannel.from_json(load_json(args.channel))
        est = lambda g: contraction.empirical_contraction(ch, g, args.trials, args.seed)  # noqa: E731
        if args.eps is None:
            rows = pmap(lambda g: (g, est(g)), gam.tolist())
            return _table(args, ["gamma", "empirical"], rows)
    p = _params(args)

    def row(g):
        lo, up = contraction.eta_bounds(p, g)
        out = [g, lo, up, contraction.eta_weakest_closed_form(p, g)]
        if args.channel:
            out.append(est(g))
        return tuple(out)

    header = ["gamma", "lower", "upper", "weakest"] + (["empirical"] if args.channel else [])
    return _table(args, header, pmap(row, gam.tolist()))


def cmd_truncate(args) -> str:
    P = classical.ClassicalDist.from_json(load_json(args.P))
    Q = classical.ClassicalDist.from_json(load_json(args.Q))
    if args.eps is None:
        raise UsageError("--eps is required")
    trunc, rep = classical.truncation_report(P, Q, args.eps)
    return dumps_json({"P_tilde": trunc.P_tilde.to_json(), "Q_tilde": trunc.Q_tilde.to_json(), "certificates": rep.to_json()})


def cmd_klbound(args) -> str:
    K = classical.MarkovKernel.from_json(load_json(args.kernel))
    P = classical.ClassicalDist.from_json(load_json(args.P))
    Q = classical.ClassicalDist.from_json(load_json(args.Q))
    if P.alphabet != K.in_alphabet:
        P = classical.ClassicalDist(K.in_alphabet, P.probs)
        Q = classical.ClassicalDist(K.in_alphabet, Q.probs)
    p = _params(args)
    res = classical.kl_bound_ldp(K, P, Q, p.epsilon, p.delta)
    return dumps_json(res._asdict())


def cmd_stability(args) -> str:
    p = _params(args)
    if args.audit:
        learner = stability.ToyLearner(args.n, args.contrast)
        rng = np.random.default_rng(args.seed)
        priors = [rng.dirichlet(np.ones(2**args.n)) for _ in range(args.priors)]
        res = stability.audit_toy_learner(learner, p.epsilon, priors)
        obj = res.report.to_json()
        obj.update(group_privacy_ok=res.group_privacy_ok, mixture_step_ok=res.mixture_step_ok, audit_ok=res.ok)
        return dumps_json(obj)
    rep = stability.stability_report(args.n, args.alphabet_size, p, args.m)
    return dumps_json(rep.to_json())


COMMANDS = {
    "certify": cmd_certify,
    "divergence": cmd_divergence,
    "tradeoff": cmd_tradeoff,
    "region": cmd_region,
    "weakest": cmd_weakest,
    "dominates": cmd_dominates,
    "fisher": cmd_fisher,
    "contraction": cmd_contraction,
    "truncate": cmd_truncate,
    "klbound": cmd_klbound,
    "stability": cmd_stability,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--eps", type=float, help="privacy parameter epsilon (nats)")
    common.add_argument("--delta", type=float, default=0.0, help="privacy parameter delta in [0, 1)")
    common.add_argument("--gamma-grid", help="gamma grid as a:b:n or a comma list")
    common.add_argument("--alpha-grid", help="alpha grid as a:b:n or a comma list")
    common.add_argument("--theta", help="theta value(s) as a:b:n or a comma list")
    common.add_argument("--seed", type=int, default=0, help="seed for sampling")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = _Parser(prog="qdpkit", description="Quantum and classical differential privacy toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("certify", parents=[common], help="(eps, delta)-DP verdict and tight delta")
    s.add_argument("--pair", required=True)

    s = sub.add_parser("divergence", parents=[common], help="evaluate one divergence of a pair")
    s.add_argument("--pair", required=True)
    s.add_argument(
        "--kind", required=True, choices=("hockey", "hyptest", "kl", "kl-integral", "dmax", "renyi", "measured-half")
    )
    s.add_argument("--gamma", type=float, default=1.0)
    s.add_argument("--alpha", type=float, default=0.5)
    s.add_argument("--convention", choices=("standard", "half"), default="standard")

    s = sub.add_parser("tradeoff", parents=[common], help="(alpha, beta) curve of params or a pair")
    s.add_argument("--pair")

    sub.add_parser("region", parents=[common], help="characteristic region polygon")

    s = sub.add_parser("weakest", parents=[common], help="weakest (eps, delta)-DP pair as JSON")
    s.add_argument("--pure", action="store_true", help="the qubit pair for delta = 0")

    s = sub.add_parser("dominates", parents=[common], help="information-ordering check of two pairs")
    s.add_argument("--pair-a", required=True)
    s.add_argument("--pair-b", required=True)
    s.add_argument("--grid", type=int, default=200)

    sub.add_parser("fisher", parents=[common], help="maximum SLD Fisher information over theta")

    s = sub.add_parser("contraction", parents=[common], help="contraction bounds and estimates")
    s.add_argument("--channel")
    s.add_argument("--trials", type=int, default=200)

    s = sub.add_parser("truncate", parents=[common], help="truncated pair and its certificates")
    s.add_argument("--P", required=True)
    s.add_argument("--Q", required=True)

    s = sub.add_parser("klbound", parents=[common], help="KL bounds for an LDP kernel's outputs")
    s.add_argument("--kernel", required=True)
    s.add_argument("--P", required=True)
    s.add_argument("--Q", required=True)

    s = sub.add_parser("stability", parents=[common], help="Holevo-information stability bound")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--alphabet-size", type=int, default=2)
    s.add_argument("--m", type=float, default=1.0)
    s.add_argument("--audit", action="store_true", help="also audit the built-in toy learner (binary alphabet)")
    s.add_argument("--contrast", type=float, default=0.3)
    s.add_argument("--priors", type=int, default=20)
    return parser


def _fail(code: int, exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}) + "\n")
    return code


def run(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand and return its exit code."""
    try:
        args = build_parser().parse_args(argv)
        thread_count()  # validate the environment before doing work
        _emit(args, COMMANDS[args.command](args))
    except AssumptionViolated as exc:
        return _fail(EXIT_ASSUMPTION, exc)
    except QDPError as exc:
        return _fail(EXIT_INVALID, exc)
    except (OSError, ValueError) as exc:
        return _fail(EXIT_INVALID, exc)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

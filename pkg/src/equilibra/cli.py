"""Command-line front end: machine-readable JSON answers on stdout,
diagnostics on stderr, exit 0 for any computed answer (including "no" and
"unknown") and 2 for usage or input errors."""

import argparse
import json
import os
import sys
from fractions import Fraction

import mpmath

from .rationals import parse_rational, parse_ext, format_ext, PINF, NINF
from .games import (GameError, Lasso, parse_game, serialize_game,
                    parse_memory, eval_lasso, payoff_vector, product_game,
                    vacuous_memory, MemoryProfile)
from .negotiation import (vacuous_requirement, nego, nego_iterate,
                          is_eps_fixed_point, requirement_to_json,
                          requirement_from_json)
from .nash import Query, ne_outcome_check, ne_constrained_exists, \
    verify_ne_energy
from .spe import (spe_exists_parity, spe_exists_mp, epsilon_min_search,
                  check_mp_witness, MpWitness)
from .negotiation import Family
from .stochastic import (RiskPartition, EntropicParams, extreme_measure,
                         entropic_measure, verify_xrse, xrse_exists,
                         xrse_constrained_optimists, xrse_search_bounded,
                         uniform_profile)
from .verification import rational_verify, achaotic_rational_verify_mp
from . import corpus


def _load_game_arg(path):
    if os.path.exists(path):
        with open(path, "rb") as fh:
            return parse_game(fh.read().decode("utf-8"))
    name = os.path.splitext(os.path.basename(path))[0]
    if name in corpus.GAMES:
        return corpus.load_game(name)
    raise GameError(f"no such game file or corpus entry: {path}")


def _load_memory_arg(path, arena):
    if os.path.exists(path):
        with open(path, "rb") as fh:
            return parse_memory(fh.read().decode("utf-8"), arena)
    name = os.path.splitext(os.path.basename(path))[0]
    if name in corpus.MACHINES:
        return corpus.load_memory(name, arena)
    raise GameError(f"no such memory-structure file: {path}")


def _jsonable(x):
    if isinstance(x, Fraction):
        return format_ext(x)
    if x is PINF or x is NINF:
        return format_ext(x)
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, 20)
    if isinstance(x, Lasso):
        return str(x)
    if isinstance(x, MpWitness):
        return x.to_json()
    if isinstance(x, Family):
        return {"h": list(x.h), "c": list(x.c), "W": sorted(x.W),
                "x": {p: _jsonable(v) for p, v in sorted(x.xbar.items())}}
    if isinstance(x, MemoryProfile):
        from .games import serialize_memory
        return json.loads(serialize_memory(x))
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = list(x)
        if isinstance(x, (set, frozenset)):
            items = sorted(items, key=str)
        return [_jsonable(v) for v in items]
    return x


def _thresholds(args, game):
    lower = {}
    upper = {}
    for spec, store in ((args.lower or [], lower), (args.upper or [], upper)):
        for item in spec:
            if "=" not in item:
                raise GameError(f"threshold {item!r} must be name=p/q")
            name, val = item.split("=", 1)
            if name not in game.players:
                raise GameError(f"unknown player {name!r} in threshold")
            store[name] = parse_ext(val)
    return Query(lower, upper)


def _partition(args, game):
    spec = args.pessimists
    if spec is None or spec == "none":
        return RiskPartition(game, [])
    if spec == "all":
        return RiskPartition(game, list(game.players))
    return RiskPartition(game, [s for s in spec.split(",") if s])


def _rho(args, game):
    rho = {}
    for item in args.rho or []:
        name, val = item.split("=", 1)
        rho[name] = parse_rational(val)
    base = "e" if args.base == "e" else parse_rational(args.base)
    return EntropicParams(base, rho, precision=args.precision)


def _emit(result, fmt):
    if fmt == "pretty":
        print(json.dumps(result, indent=2, sort_keys=True))
    else:
        print(json.dumps(result, sort_keys=True))
    for d in result.get("diagnostics", []):
        print(d, file=sys.stderr)


def build_parser():
    p = argparse.ArgumentParser(
        prog="equilibra",
        description="equilibria in multiplayer graph games")
    p.add_argument("--format", choices=["json", "pretty"], default="json")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        sp = sub.add_parser(name, **kw)
        sp.add_argument("game", help="game file or corpus name")
        return sp

    add("validate", help="parse and validate a game file")
    sp = add("eval", help="payoff of a lasso")
    sp.add_argument("--lasso", required=True,
                    help="prefix;cycle, comma-separated vertices")
    sp.add_argument("--player", required=True)

    sp = add("nego", help="one application of the negotiation function")
    sp.add_argument("--requirement", help="JSON file (default: vacuous)")
    sp = add("nego-iterate", help="negotiation iterates from lambda_0")
    sp.add_argument("--max", type=int, default=64)
    sp = add("fixed-point", help="eps-fixed-point test for a requirement")
    sp.add_argument("--requirement", required=True)
    sp.add_argument("--eps", default="0")

    sp = add("ne-check", help="is a lasso an NE outcome")
    sp.add_argument("--lasso", required=True)
    sp = add("ne-exists", help="constrained NE existence")
    _add_bounds(sp)
    sp = add("spe-exists", help="constrained (eps-)SPE existence")
    _add_bounds(sp)
    sp.add_argument("--eps", default="0")
    sp.add_argument("--max", type=int, default=64)
    sp = add("spe-check-witness", help="validate an eps-SPE witness")
    sp.add_argument("--witness", required=True)
    sp.add_argument("--eps", default="0")
    _add_bounds(sp)
    sp = add("eps-min", help="least eps admitting an eps-SPE")
    sp.add_argument("--precision", type=int, default=24)
    sp.add_argument("--max", type=int, default=24)

    sp = add("product", help="product with a Leader memory structure")
    sp.add_argument("--machine", required=True)
    sp.add_argument("--leader", required=True)
    sp = add("rational-verify", help="rational verification")
    sp.add_argument("--machine")
    sp.add_argument("--leader", required=True)
    sp.add_argument("--threshold", required=True)
    sp.add_argument("--concept", choices=["nash", "spe"], default="spe")
    sp.add_argument("--max", type=int, default=64)
    sp = add("achaotic-verify", help="achaotic subgame-perfect verification")
    sp.add_argument("--machine")
    sp.add_argument("--leader", required=True)
    sp.add_argument("--threshold", required=True)
    sp.add_argument("--precision", type=int, default=16)
    sp.add_argument("--max", type=int, default=24)

    sp = add("xrse-exists", help="stationary XRSE construction")
    sp.add_argument("--pessimists", default="all")
    sp = add("xrse-constrained", help="all-optimist constrained existence")
    sp.add_argument("--pessimists", default="none")
    _add_bounds(sp)
    sp = add("xrse-search", help="bounded-memory XRSE search")
    sp.add_argument("--pessimists", default="all")
    sp.add_argument("--memory-bound", type=int, default=2)
    _add_bounds(sp)
    sp = add("xrse-verify", help="XRSE check for a profile")
    sp.add_argument("--profile", required=True)
    sp.add_argument("--pessimists", default="all")

    sp = add("er-eval", help="entropic risk of a profile")
    sp.add_argument("--profile", required=True)
    sp.add_argument("--player", required=True)
    sp.add_argument("--rho", action="append")
    sp.add_argument("--base", default="e")
    sp.add_argument("--precision", type=int, default=113)
    sp = add("erse-verify", help="stationary ERSE check")
    sp.add_argument("--profile", required=True)
    sp.add_argument("--rho", action="append")
    sp.add_argument("--base", default="e")
    sp.add_argument("--precision", type=int, default=113)

    sp = add("energy-ne-verify", help="NE check in an energy game")
    sp.add_argument("--profile", required=True)

    sub.add_parser("corpus-list", help="bundled corpus entries")
    return p


def _add_bounds(sp):
    sp.add_argument("--lower", action="append", metavar="PLAYER=P/Q")
    sp.add_argument("--upper", action="append", metavar="PLAYER=P/Q")


def run(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0,) else 0
    try:
        result = _dispatch(args)
    except GameError as e:
        _emit({"answer": "error", "payload": {},
               "diagnostics": [str(e)]}, args.format)
        return 2
    _emit(result, args.format)
    return 0


def _dispatch(args):
    cmd = args.command
    if cmd == "corpus-list":
        return {"answer": "yes", "payload": {"names": corpus.corpus_list()},
                "diagnostics": []}
    game = _load_game_arg(args.game)
    if cmd == "validate":
        return {"answer": "yes",
                "payload": {"players": list(game.players),
                            "mode": game.mode,
                            "vertices": len(game.arena.vertices),
                            "edges": len(game.arena.edges)},
                "diagnostics": []}
    if cmd == "eval":
        lasso = Lasso.parse(args.lasso)
        val = eval_lasso(game, lasso, args.player)
        return {"answer": "yes",
                "payload": {"value": _jsonable(val),
                            "all": _jsonable(payoff_vector(game, lasso))},
                "diagnostics": []}
    if cmd == "nego":
        lam = _read_requirement(args, game)
        out = nego(game, lam)
        return {"answer": "yes",
                "payload": {"nego": requirement_to_json(out)},
                "diagnostics": []}
    if cmd == "nego-iterate":
        seq, conv = nego_iterate(game, max_iters=args.max)
        return {"answer": "yes" if conv else "unknown",
                "payload": {"converged": conv,
                            "iterates": [requirement_to_json(l)
                                         for l in seq]},
                "diagnostics": []}
    if cmd == "fixed-point":
        lam = _read_requirement(args, game)
        eps = parse_rational(args.eps)
        ok = is_eps_fixed_point(game, lam, eps)
        return {"answer": "yes" if ok else "no",
                "payload": {"eps": format_ext(eps)}, "diagnostics": []}
    if cmd == "ne-check":
        lasso = Lasso.parse(args.lasso)
        ok = ne_outcome_check(game, lasso)
        return {"answer": "yes" if ok else "no",
                "payload": {"payoffs": _jsonable(payoff_vector(game, lasso))},
                "diagnostics": []}
    if cmd == "ne-exists":
        res = ne_constrained_exists(game, _thresholds(args, game))
        return {"answer": res["answer"], "payload": _jsonable(res),
                "diagnostics": []}
    if cmd == "spe-exists":
        query = _thresholds(args, game)
        eps = parse_rational(args.eps)
        if game.mode == "parity":
            if eps != 0:
                raise GameError("parity SPE existence takes eps = 0")
            res = spe_exists_parity(game, query)
        else:
            res = spe_exists_mp(game, eps, query, max_iters=args.max)
        payload = dict(res)
        if "lam" in payload:
            payload["lam"] = requirement_to_json(payload["lam"])
        return {"answer": res["answer"], "payload": _jsonable(payload),
                "diagnostics": []}
    if cmd == "spe-check-witness":
        query = _thresholds(args, game)
        eps = parse_rational(args.eps)
        with open(args.witness) as fh:
            witness = _witness_from_json(json.load(fh), game)
        ok = check_mp_witness(game, eps, witness, query)
        return {"answer": "yes" if ok else "no", "payload": {},
                "diagnostics": []}
    if cmd == "eps-min":
        res = epsilon_min_search(game, precision_bits=args.precision,
                                 max_iters=args.max)
        return {"answer": res["answer"],
                "payload": _jsonable({k: v for k, v in res.items()
                                      if k != "answer"}),
                "diagnostics": []}
    if cmd == "product":
        memory = _load_memory_arg(args.machine, game.arena)
        prod = product_game(game, memory, args.leader)
        return {"answer": "yes", "payload": json.loads(serialize_game(prod)),
                "diagnostics": []}
    if cmd == "rational-verify":
        memory = (_load_memory_arg(args.machine, game.arena)
                  if args.machine else vacuous_memory(game.arena,
                                                      args.leader))
        concept = "Nash" if args.concept == "nash" else "SubgamePerfect"
        res = rational_verify(game, memory, args.leader,
                              parse_rational(args.threshold), concept,
                              max_iters=args.max)
        return {"answer": res["answer"], "payload": _jsonable(res),
                "diagnostics": []}
    if cmd == "achaotic-verify":
        memory = (_load_memory_arg(args.machine, game.arena)
                  if args.machine else vacuous_memory(game.arena,
                                                      args.leader))
        res = achaotic_rational_verify_mp(
            game, memory, args.leader, parse_rational(args.threshold),
            max_iters=args.max, precision_bits=args.precision)
        return {"answer": res["answer"], "payload": _jsonable(res),
                "diagnostics": []}
    if cmd == "xrse-exists":
        partition = _partition(args, game)
        edges, trace = xrse_exists(game, partition)
        prof = uniform_profile(game, edges)
        measures = extreme_measure(game, partition, prof)
        return {"answer": "yes",
                "payload": {"edges": [f"{u}->{v}" for (u, v) in edges],
                            "measures": _jsonable(measures),
                            "trace": _trace_json(trace)},
                "diagnostics": []}
    if cmd == "xrse-constrained":
        partition = _partition(args, game)
        res = xrse_constrained_optimists(game, _thresholds(args, game),
                                         partition)
        payload = {"trace": _trace_json(res["trace"])}
        if "edges" in res:
            payload["edges"] = [f"{u}->{v}" for (u, v) in res["edges"]]
            payload["measures"] = _jsonable(res["measures"])
        return {"answer": res["answer"], "payload": payload,
                "diagnostics": []}
    if cmd == "xrse-search":
        partition = _partition(args, game)
        res = xrse_search_bounded(game, partition, _thresholds(args, game),
                                  args.memory_bound)
        if res["answer"] == "yes":
            return {"answer": "yes",
                    "payload": {"profile": _jsonable(res["profile"]),
                                "states": res["states"]},
                    "diagnostics": []}
        return {"answer": "no",
                "payload": {"scope": f"memory-bound {args.memory_bound}"},
                "diagnostics": [
                    "exhausted all profiles within the memory bound; a "
                    "larger bound could still admit an XRSE"]}
    if cmd == "xrse-verify":
        partition = _partition(args, game)
        profile = _load_memory_arg(args.profile, game.arena)
        ok = verify_xrse(game, partition, profile)
        measures = extreme_measure(game, partition, profile)
        return {"answer": "yes" if ok else "no",
                "payload": {"measures": _jsonable(measures)},
                "diagnostics": []}
    if cmd == "er-eval":
        profile = _load_memory_arg(args.profile, game.arena)
        params = _rho(args, game)
        val = entropic_measure(game, params, profile, args.player)
        return {"answer": "yes",
                "payload": {"value": _jsonable(val),
                            "tolerance": "exact" if isinstance(val, Fraction)
                            else f"float({params.precision} bits)"},
                "diagnostics": []}
    if cmd == "erse-verify":
        from .stochastic import verify_erse_stationary
        profile = _load_memory_arg(args.profile, game.arena)
        params = _rho(args, game)
        ok = verify_erse_stationary(game, params, profile)
        return {"answer": "yes" if ok else "no",
                "payload": {"tolerance": "1e-9"}, "diagnostics": []}
    if cmd == "energy-ne-verify":
        profile = _load_memory_arg(args.profile, game.arena)
        ok = verify_ne_energy(game, profile)
        return {"answer": "yes" if ok else "no", "payload": {},
                "diagnostics": []}
    raise GameError(f"unknown command {cmd!r}")


def _read_requirement(args, game):
    if getattr(args, "requirement", None):
        with open(args.requirement) as fh:
            lam = requirement_from_json(json.load(fh))
        missing = [v for v in game.arena.vertices if v not in lam]
        if missing:
            raise GameError(f"requirement misses vertex {missing[0]}")
        return lam
    return vacuous_requirement(game)


def _witness_from_json(doc, game):
    alpha = {p: {cid: parse_rational(a) for cid, a in cmb.items()}
             for p, cmb in doc["alpha"].items()}
    lam = requirement_from_json(doc["lambda"])
    prover = {}
    for root, tmap in doc["prover"].items():
        prover[root] = {
            v: Family(fd["h"], fd["c"], fd["W"], fd["W"],
                      {p: parse_rational(x) for p, x in fd["x"].items()},
                      {})
            for v, fd in tmap.items()}
    return MpWitness(doc["W"], doc["Wp"], alpha, lam, prover)


def _trace_json(trace):
    out = []
    for row in trace:
        doc = {}
        for key, val in row.items():
            if key == "edges":
                doc["edges"] = [f"{u}->{v}" for (u, v) in val]
            elif key == "cut":
                doc["cut"] = f"{val[0]}->{val[1]}"
            else:
                doc[key] = _jsonable(val)
        out.append(doc)
    return out


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()

import itertools
import random

import pytest
from fractions import Fraction

from equilibra.corpus import load_game
from equilibra.games import GameError, Lasso, Arena, PayoffSpec, Game
from equilibra.negotiation import (vacuous_requirement, nego_parity,
                                   nego_iterate, is_eps_fixed_point,
                                   is_lambda_consistent, build_concrete_nego,
                                   parity_feasible_region)
from equilibra.nash import val_requirement
from equilibra.rationals import PINF, NINF
from conftest import random_parity_game


def test_vacuous():
    fig = load_game("fig_ne_spe")
    lam0 = vacuous_requirement(fig)
    assert all(x is NINF for x in lam0.values())
    rng = random.Random(0)
    for _ in range(10):
        pre = rng.choice(["a", "a,b"])
        cyc = rng.choice(["b", "c", "a"])
        try:
            l = Lasso.parse(f"{pre};{cyc}")
            l.validate(fig.arena)
        except GameError:
            continue
        assert is_lambda_consistent(fig, lam0, l)


def test_consistency_examples():
    fig = load_game("fig_ne_spe")
    lam1 = {"a": Fraction(0), "b": Fraction(1), "c": Fraction(1)}
    assert is_lambda_consistent(fig, lam1, Lasso(["a", "b"], ["c"]))
    assert not is_lambda_consistent(fig, lam1, Lasso(["a"], ["b"]))


def test_fig_iterates():
    fig = load_game("fig_ne_spe")
    seq, conv = nego_iterate(fig)
    assert conv
    lam1, lam2 = seq[1], seq[2]
    assert lam1 == {"a": Fraction(0), "b": Fraction(1), "c": Fraction(1)}
    assert lam2 == {"a": Fraction(1), "b": Fraction(1), "c": Fraction(1)}
    assert seq[3] == lam2 and len(seq) == 4


def test_first_iterate_is_val():
    rng = random.Random(21)
    for _ in range(30):
        g = random_parity_game(rng, n=4, players=2, max_color=2)
        lam1 = nego_parity(g, vacuous_requirement(g))
        assert lam1 == val_requirement(g), (g.arena.edges, g.payoff.colors)


def test_monotone_nondecreasing():
    rng = random.Random(22)
    for _ in range(15):
        g = random_parity_game(rng, n=4, players=2, max_color=2)
        verts = g.arena.vertices
        lam = {v: rng.choice([NINF, Fraction(0), Fraction(1)])
               for v in verts}
        lam2 = {v: max(lam[v], rng.choice([NINF, Fraction(0), Fraction(1)]))
                for v in verts}
        n1 = nego_parity(g, lam)
        n2 = nego_parity(g, lam2)
        for v in verts:
            assert n1[v] <= n2[v]
            assert lam[v] <= n1[v]


def test_non_boolean_rejected():
    fig = load_game("fig_ne_spe")
    lam = vacuous_requirement(fig)
    lam["a"] = Fraction(1, 2)
    with pytest.raises(GameError, match="Boolean"):
        nego_parity(fig, lam)


def test_consistent_lasso_implies_finite():
    # sound direction of the feasibility characterization
    rng = random.Random(23)
    for _ in range(15):
        g = random_parity_game(rng, n=3, players=2, max_color=2)
        lam = {v: rng.choice([Fraction(0), Fraction(1)])
               for v in g.arena.vertices}
        out = nego_parity(g, lam)
        for v in g.arena.vertices:
            if out[v] != PINF:
                continue
            # +inf: no lambda-consistent lasso may survive the deviation
            # closure; in particular consistency plus closure must fail
            S = parity_feasible_region(g, lam, g.arena.owner[v])
            assert v not in S


def test_deviation_robust_infinity():
    # a consistent lasso exists from v, yet nego is +inf because the
    # controller's deviation leads somewhere with no consistent play
    arena = Arena(["circle"], ["v", "w"], {"v": "circle", "w": "circle"},
                  [("v", "v"), ("v", "w"), ("w", "w")], init="v")
    game = Game(arena, PayoffSpec("parity", colors={
        "v": {"circle": 0}, "w": {"circle": 1}}))
    lam = {"v": Fraction(0), "w": Fraction(1)}
    assert is_lambda_consistent(game, lam, Lasso([], ["v"]))
    out = nego_parity(game, lam)
    assert out["v"] is PINF and out["w"] is PINF


def test_concrete_arena_fig():
    fig = load_game("fig_ne_spe")
    lam1 = {"a": Fraction(0), "b": Fraction(1), "c": Fraction(1)}
    conc = build_concrete_nego(fig, lam1, "circle", "a", memory="vertices")
    # reachable fragment: 5 Prover and 8 Challenger vertices
    provers = [v for v in conc["vertices"] if v[0] == "P"]
    challengers = [v for v in conc["vertices"] if v[0] == "C"]
    assert len(provers) == 5 and len(challengers) == 8
    kinds = {k for (_, _, k) in conc["edges"]}
    assert kinds == {"proposal", "acceptation", "deviation"}
    compressed = build_concrete_nego(fig, lam1, "circle", "a",
                                     memory="players")
    assert len(compressed["vertices"]) < len(conc["vertices"])


def oracle_nego_value(game, lam, i, v0):
    """Stationary-Challenger brute force on the compressed concrete arena."""
    from equilibra.negotiation import _build_game1_arena, \
        parity_feasible_region, _constr_players
    S = parity_feasible_region(game, lam, i)
    if v0 not in S:
        return PINF
    states, edges, roots = _build_game1_arena(game, lam, i, S)
    succ = {}
    for a, b in edges:
        succ.setdefault(a, []).append(b)
    chooser = [s for s in states if s[0] == "C" and len(succ[s]) > 1]
    options = [succ[s] for s in chooser]
    best = Fraction(0)
    prover_wins = False
    for combo in itertools.product(*options) if chooser else [()]:
        fixed = dict(zip(chooser, combo))
        # induced one-player graph: Prover picks the play
        def moves(s):
            if s in fixed:
                return [fixed[s]]
            return succ[s]
        # search a reachable cycle where challenger loses
        escape = _prover_escape(game, lam, i, roots[v0], moves)
        if not escape:
            return Fraction(1)
    return Fraction(0)


def _prover_escape(game, lam, i, root, moves):
    """Does Prover have a play with min color odd for i and either
    infinitely many deviations or a satisfied limit memory?"""
    nodes = set()
    stack = [root]
    while stack:
        s = stack.pop()
        if s in nodes:
            continue
        nodes.add(s)
        for t in moves(s):
            stack.append(t)
    nodes = sorted(nodes, key=str)
    for size in range(1, len(nodes) + 1):
        for C in itertools.combinations(nodes, size):
            Cset = set(C)
            inner = {s: [t for t in moves(s) if t in Cset] for s in Cset}
            if any(not outs for outs in inner.values()):
                continue
            if not _scc_whole(Cset, inner):
                continue
            pverts = [s for s in Cset if s[0] == "P"]
            if not pverts:
                continue
            mincol_i = min(game.payoff.color(i, s[1]) for s in pverts)
            if mincol_i % 2 == 0:
                continue
            has_dev = any(s[0] == "D" for s in Cset)
            if not has_dev:
                M = pverts[0][2]
                bad = False
                for j in M:
                    mc = min(game.payoff.color(j, s[1]) for s in pverts)
                    if mc % 2 == 1:
                        bad = True
                        break
                if bad:
                    continue
            if _reaches(root, Cset, moves):
                return True  # a play on which challenger loses
    return False


def _scc_whole(Cset, inner):
    start = next(iter(Cset))
    seen = {start}
    stack = [start]
    while stack:
        s = stack.pop()
        for t in inner[s]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    if seen != Cset:
        return False
    rev = {s: [] for s in Cset}
    for s in Cset:
        for t in inner[s]:
            rev[t].append(s)
    seen = {start}
    stack = [start]
    while stack:
        s = stack.pop()
        for t in rev[s]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen == Cset


def _reaches(root, Cset, moves):
    seen = {root}
    stack = [root]
    while stack:
        s = stack.pop()
        if s in Cset:
            return True
        for t in moves(s):
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return False


def test_oracle_agreement_tiny():
    fig = load_game("fig_ne_spe")
    lam0 = vacuous_requirement(fig)
    lam1 = {"a": Fraction(0), "b": Fraction(1), "c": Fraction(1)}
    for lam in (lam0, lam1):
        got = nego_parity(fig, lam)
        for v in fig.arena.vertices:
            want = oracle_nego_value(fig, lam, fig.arena.owner[v], v)
            assert got[v] == want, (lam, v, got[v], want)
    rng = random.Random(31)
    for _ in range(6):
        g = random_parity_game(rng, n=3, players=2, max_color=1)
        lam = {v: rng.choice([NINF, Fraction(0), Fraction(1)])
               for v in g.arena.vertices}
        got = nego_parity(g, lam)
        for v in g.arena.vertices:
            want = oracle_nego_value(g, lam, g.arena.owner[v], v)
            assert got[v] == want, (g.arena.edges, g.payoff.colors, lam, v)


def test_all_ones_requirement_unwinnable():
    # lam = 1 everywhere while some owner cannot win anywhere: +inf there
    arena = Arena(["circle", "square"], ["u", "w"],
                  {"u": "circle", "w": "square"},
                  [("u", "w"), ("w", "u"), ("w", "w")], init="u")
    game = Game(arena, PayoffSpec("parity", colors={
        "u": {"circle": 1, "square": 0},
        "w": {"circle": 1, "square": 0}}))
    lam = {"u": Fraction(1), "w": Fraction(1)}
    out = nego_parity(game, lam)
    assert out["u"] is PINF  # circle cannot reach payoff 1 at all


def test_three_player_first_iterate():
    rng = random.Random(200)
    for _ in range(8):
        g = random_parity_game(rng, n=4, players=3, max_color=2)
        lam1 = nego_parity(g, vacuous_requirement(g))
        assert lam1 == val_requirement_local(g)


def val_requirement_local(game):
    from equilibra.nash import val_requirement
    return val_requirement(game)

"""Rational verification and universal-threshold problems via the
product-game reduction, plus achaotic verification for mean-payoff SPEs.

All answers are tri-state; "unknown" from bounded searches is never
converted to yes or no.
"""

from fractions import Fraction

from .games import GameError, product_game
from .nash import Query, ne_constrained_exists
from .spe import spe_exists_parity, spe_exists_mp, epsilon_min_search

NASH = "Nash"
SUBGAME_PERFECT = "SubgamePerfect"


def universal_threshold(game, player, t, concept, max_iters=64):
    """Does every equilibrium give `player` strictly more than t?
    Complement of constrained existence with the single effective upper
    threshold t."""
    if game.mode not in ("parity", "mean-payoff"):
        raise GameError(f"universal threshold unsupported in {game.mode}")
    if concept not in (NASH, SUBGAME_PERFECT):
        raise GameError(f"unknown rationality concept {concept!r}")
    t = Fraction(t)
    query = Query(upper={player: t})
    if concept == NASH:
        sub = ne_constrained_exists(game, query)
    elif game.mode == "parity":
        sub = spe_exists_parity(game, query)
    else:
        sub = spe_exists_mp(game, Fraction(0), query, max_iters=max_iters)
    if sub["answer"] == "yes":
        return {"answer": "no", "existence": sub}
    if sub["answer"] == "no":
        return {"answer": "yes", "existence": sub}
    return {"answer": "unknown", "existence": sub}


def rational_verify(game, memory, leader, t, concept, max_iters=64):
    """Product-game reduction: every Leader-fixed equilibrium compatible
    with the structure exceeds t iff every equilibrium of the product
    does."""
    prod = product_game(game, memory, leader)
    res = universal_threshold(prod, leader, t, concept, max_iters=max_iters)
    res["product_vertices"] = len(prod.arena.vertices)
    return res


def achaotic_universal_threshold_mp(game, player, t, max_iters=64,
                                    precision_bits=24):
    """sup over eps with eps-SPEs of inf over eps-SPEs of the player's
    payoff, compared to t: compute eps_min, then decide whether some
    eps_min-SPE stays at or below t."""
    if game.mode != "mean-payoff":
        raise GameError("achaotic verification is mean-payoff only")
    t = Fraction(t)
    eps = epsilon_min_search(game, precision_bits=precision_bits,
                             max_iters=max_iters)
    if eps["answer"] != "yes":
        return {"answer": "unknown", "eps_min": None}
    emin = eps["eps_min"]
    sub = spe_exists_mp(game, emin, Query(upper={player: t}),
                        max_iters=max_iters)
    if sub["answer"] == "yes":
        return {"answer": "no", "eps_min": emin, "existence": sub}
    if sub["answer"] == "no":
        return {"answer": "yes", "eps_min": emin, "existence": sub}
    return {"answer": "unknown", "eps_min": emin, "existence": sub}


def achaotic_rational_verify_mp(game, memory, leader, t, max_iters=64,
                                precision_bits=24):
    prod = product_game(game, memory, leader)
    res = achaotic_universal_threshold_mp(prod, leader, t,
                                          max_iters=max_iters,
                                          precision_bits=precision_bits)
    res["product_vertices"] = len(prod.arena.vertices)
    return res

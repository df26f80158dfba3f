import random

from fractions import Fraction as F

from equilibra.simplex import lp_minimize, lp_feasible, lex_min_vertex, \
    OPTIMAL, INFEASIBLE, UNBOUNDED


def test_basics():
    st, x, v = lp_minimize([F(1), F(0)], [[F(1), F(1)]], [F(1)],
                           [[F(1), F(0)]], [F(1, 3)])
    assert (st, x, v) == (OPTIMAL, [F(1, 3), F(2, 3)], F(1, 3))
    st, _, _ = lp_minimize([F(1), F(0)],
                           [[F(1), F(1)], [F(1), F(0)]], [F(1), F(2)])
    assert st == INFEASIBLE
    st, _, _ = lp_minimize([F(-1), F(0)], [[F(1), F(-1)]], [F(0)])
    assert st == UNBOUNDED


def test_degenerate_cycling_guard():
    # classic Beale-like degeneracy; Bland's rule must terminate
    c = [F(-3, 4), F(150), F(-1, 50), F(6)]
    a_ge = [[-F(1, 4), F(60), F(-1, 25), F(9)],
            [-F(1, 2), F(90), F(-1, 50), F(3)],
            [F(0), F(0), F(-1), F(0)]]
    b_ge = [F(0), F(0), F(-1)]
    st, x, v = lp_minimize(c, [], [], a_ge, b_ge)
    assert st == OPTIMAL
    assert v == 0


def test_random_lps_optimality():
    rng = random.Random(2)
    for _ in range(40):
        n = rng.randint(2, 4)
        cost = [F(rng.randint(-3, 3)) for _ in range(n)]
        a_eq = [[F(1)] * n]
        b_eq = [F(1)]
        a_ge = [[F(rng.randint(-2, 2)) for _ in range(n)]
                for _ in range(rng.randint(0, 2))]
        b_ge = [F(rng.randint(-2, 1)) for _ in a_ge]
        st, x, v = lp_minimize(cost, a_eq, b_eq, a_ge, b_ge)
        if st != OPTIMAL:
            continue
        assert sum(x) == 1 and all(xi >= 0 for xi in x)
        for row, b in zip(a_ge, b_ge):
            assert sum(r * xi for r, xi in zip(row, x)) >= b
        # no simplex-vertex sample may beat the optimum
        for _ in range(20):
            y = [F(rng.randint(0, 4)) for _ in range(n)]
            tot = sum(y)
            if tot == 0:
                continue
            y = [yi / tot for yi in y]
            if all(sum(r * yi for r, yi in zip(row, y)) >= b
                   for row, b in zip(a_ge, b_ge)):
                assert sum(c * yi for c, yi in zip(cost, y)) >= v


def test_lex_min():
    st, x = lex_min_vertex(
        [[F(0), F(1), F(2)], [F(1), F(0), F(2)]],
        [[F(1), F(1), F(1)]], [F(1)],
        [[F(0), F(1), F(2)], [F(1), F(0), F(2)]], [F(1), F(1)])
    assert st == OPTIMAL and x == [F(1, 3)] * 3

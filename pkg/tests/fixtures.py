"""Small hand-built instances shared across test modules."""

from modklab.problems import make_bipartite, make_group, make_imbalance, make_mod

R = 4  # right-side offset at n = 2


def t1_rows():
    rows = [[] for _ in range(8)]
    rows[0] = [R]
    rows[1] = [R]
    rows[2] = [R]
    rows[R] = [0, 1, 2]
    return rows


def t1():
    return make_bipartite(2, 3, t1_rows(), 1)


def g1():
    return make_group(2, 3, 2, [0, 1, 3, 2])


def i1():
    S = [[1], [], [], []]
    P = [[], [0], [], []]
    return make_imbalance(2, 3, S, P, 1)


def m1():
    return make_mod(2, 3, [0, 1, 2, 3])

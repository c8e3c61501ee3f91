"""Independent brute-force oracles shared by the unit and acceptance tests."""

import itertools
import math
import random

import numpy as np
import sympy


def det_laplace(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    return sum((-1) ** j * M[0][j] * det_laplace([row[:j] + row[j + 1:] for row in M[1:]])
               for j in range(n) if M[0][j])


def determinantal_divisors(M):
    """gcd of all k x k minors, for k = 1..min(rows, cols)."""
    rows, cols = len(M), len(M[0])
    out = []
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for R in itertools.combinations(range(rows), k):
            for C in itertools.combinations(range(cols), k):
                g = math.gcd(g, det_laplace([[M[i][j] for j in C] for i in R]))
        out.append(g)
    return out


def rational_rank(M):
    if not M or not M[0]:
        return 0
    return sympy.Matrix(M).rank()


def random_matrix(rng: random.Random, rows, cols, lo=-5, hi=5):
    return [[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)]


def covering_brute_force(M, u, v, n, m):
    """Per-point feasibility by enumerating every admissible coefficient vector."""
    basis = np.array([list(x) for x in list(u) + list(v)], dtype=float).T
    d = basis.shape[0]
    s = 2 ** m
    coeffs = np.arange(-M * n * s, M * n * s + 1) / s
    grid_axis = np.arange(-n * s, n * s + 1) / s
    combos = np.array(list(itertools.product(coeffs, repeat=d)))
    spans = combos @ basis.T
    for g in itertools.product(grid_axis, repeat=d):
        y = np.array(g) - spans
        on_grid = np.all(np.abs(y * s - np.round(y * s)) < 1e-9, axis=1)
        in_box = np.all(np.abs(y) <= M + 1e-9, axis=1)
        if not np.any(on_grid & in_box):
            return False
    return True


def random_spec_doc(rng: random.Random, allow_surd: bool = True) -> dict:
    """A random small action: d <= 3, numerators in [-5, 5]."""
    d = rng.randint(1, 3)
    D = 2 if allow_surd and rng.random() < 0.3 else 1

    def rat():
        return f"{rng.randint(-5, 5)}/{rng.choice([1, 1, 2, 3, 4])}"

    def entry():
        if D > 1 and rng.random() < 0.4:
            return {"a": rat(), "b": rat()}
        return rat()

    k = rng.randint(0, 2)
    r = rng.randint(0 if k else 1, 2)
    if rng.random() < 0.5:
        gamma0 = [["1" if i == j else "0" for j in range(d)] for i in range(d)]
    else:
        # upper triangular with nonzero diagonal is invertible
        gamma0 = [[(f"{rng.choice([1, 2, 3, -1])}" if i == j else (rat() if j > i else "0"))
                   for j in range(d)] for i in range(d)]
    return {
        "d": d,
        "D": D,
        "gamma0": gamma0,
        "translation": [[entry() for _ in range(d)] for _ in range(k)],
        "rotation": [[rat() for _ in range(d)] for _ in range(r)],
    }


def random_specs(count: int, seed: int = 2024, allow_surd: bool = True, free_only: bool = False):
    """``count`` random specs; with ``free_only`` those with p = 0 are redrawn."""
    from stable_field_lab.action import ActionSpec, level_decompositions

    rng = random.Random(seed)
    out = []
    while len(out) < count:
        spec = ActionSpec.from_dict(random_spec_doc(rng, allow_surd))
        if free_only and level_decompositions(spec, 0)[0].free_rank == 0:
            continue
        out.append(spec)
    return out


def acts_trivially(spec, n, level):
    """Direct check that the Gamma_level point with coordinates n acts as the identity."""
    pt = spec.point(n, level)
    for row in spec.translation:
        if sum((a * x for a, x in zip(row, pt)), 0) != 0:
            return False
    for row in spec.rotation:
        val = sum((c * x for c, x in zip(row, pt)), 0)
        if val.b != 0 or val.a.denominator != 1:
            return False
    return True

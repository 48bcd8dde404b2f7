"""Independent reference computations used to cross-check the package.

Everything here is deliberately naive: cofactor expansion, matrix power sums,
explicit word enumeration, all-pairs distances.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


# -- polynomials as lists of Fractions, constant term first -----------------

def padd(a, b):
    out = [Fraction(0)] * max(len(a), len(b))
    for k, c in enumerate(a):
        out[k] += c
    for k, c in enumerate(b):
        out[k] += c
    return out


def pmul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def ptrim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def cofactor_charpoly(M):
    """det(x I - M) by Laplace expansion along the first row."""
    n = len(M)
    entries = [[([Fraction(-M[i][j]), Fraction(1)] if i == j else [Fraction(-M[i][j])])
                for j in range(n)] for i in range(n)]

    def det(rows, cols):
        if not rows:
            return [Fraction(1)]
        r = rows[0]
        total = [Fraction(0)]
        for k, c in enumerate(cols):
            e = entries[r][c]
            if not any(e):
                continue
            minor = det(rows[1:], cols[:k] + cols[k + 1:])
            term = pmul(e, minor)
            if k % 2:
                term = [-t for t in term]
            total = padd(total, term)
        return total

    return ptrim(det(list(range(n)), list(range(n))))


def sympy_poly(coeffs_low_first):
    import sympy
    x = sympy.Symbol("x")
    return sympy.Poly(sum(sympy.Rational(int(c.numerator), int(c.denominator)) * x ** k
                          for k, c in enumerate(coeffs_low_first)), x)


def poly_from_high(coeffs_high_first):
    return [Fraction(c) for c in reversed(coeffs_high_first)]


def divides(d, p):
    """Exact divisibility of rational polynomials by long division."""
    p = [Fraction(c) for c in p]
    d = ptrim([Fraction(c) for c in d])
    while len(p) >= len(d):
        c = p[-1] / d[-1]
        shift = len(p) - len(d)
        for i, dc in enumerate(d):
            p[shift + i] -= c * dc
        p.pop()
    return not any(p)


# -- reachability ------------------------------------------------------------

def naive_closure(adj):
    """Boolean sum M + M^2 + ... + M^n by straightforward multiplication."""
    M = np.asarray(adj, dtype=np.int64)
    n = M.shape[0]
    acc = np.zeros_like(M)
    P = np.eye(n, dtype=np.int64)
    for _ in range(n):
        P = np.minimum(P @ M, 1)
        acc = np.maximum(acc, P)
    return acc.astype(bool)


# -- languages ---------------------------------------------------------------

def accepts(edges, s, word):
    """Does some prefix of ``word`` label a path from s to vertex 0?

    ``edges`` are (src, dst, i, j) tuples; edges out of 0 are ignored since
    0 is absorbing.  Plain depth-first search, no subset construction.
    """
    succ = {}
    for a, b, i, _ in edges:
        if a != 0:
            succ.setdefault((a, i), set()).add(b)

    def walk(v, pos):
        if v == 0:
            return True
        if pos == len(word):
            return False
        return any(walk(w, pos + 1) for w in succ.get((v, word[pos]), ()))

    return walk(s, 0)


def enumerate_counterexample(edges, m, s, T, max_len):
    """Shortest word of length <= max_len in L_s but in no L_t, else None."""
    for n in range(1, max_len + 1):
        for word in itertools.product(range(1, m + 1), repeat=n):
            if accepts(edges, s, word) and not any(accepts(edges, t, word) for t in T):
                return list(word)
    return None


def live_words(edges, m, s, max_len):
    """All words of length <= max_len accepted from s (minimal ones only)."""
    out = []
    for n in range(1, max_len + 1):
        for word in itertools.product(range(1, m + 1), repeat=n):
            if accepts(edges, s, word) and not accepts(edges, s, word[:-1]):
                out.append(word)
    return out


# -- geometry ----------------------------------------------------------------

def brute_hausdorff(P, Q):
    P = np.asarray(P, complex)
    Q = np.asarray(Q, complex)
    D = np.abs(P[:, None] - Q[None, :])
    return max(D.min(axis=1).max(), D.min(axis=0).max())


def matrix_power_counts(M, k, depth):
    v = np.zeros(len(M), dtype=object)
    v[k] = 1
    out = [1]
    Mo = np.asarray(M, dtype=object)
    for _ in range(depth):
        v = v @ Mo
        out.append(int(sum(v)))
    return out


# -- GIFS comparison -----------------------------------------------------------

def isomorphic_systems(eqs_a, eqs_b):
    """Equal up to renaming of B_2, B_3, ... (B_1 stays B_1).

    Equations are lists of (label, target) with 0-based targets.  Since labels
    are distinct within one equation, the renaming is forced by walking from B_1.
    """
    if len(eqs_a) != len(eqs_b):
        return False
    rename = {0: 0}
    stack = [0]
    while stack:
        k = stack.pop()
        da, db = dict(eqs_a[k]), dict(eqs_b[rename[k]])
        if set(da) != set(db):
            return False
        for i, t in da.items():
            u = db[i]
            if t in rename:
                if rename[t] != u:
                    return False
            else:
                if u in rename.values():
                    return False
                rename[t] = u
                stack.append(t)
    return len(rename) == len(eqs_a)


def shortest_counterexample_dfs(edges, m, s, T, max_len):
    """Length-ordered search for a word in L_s but in no L_t, up to max_len.

    Walks the tree of all words, simulating the graph letter by letter on the
    current prefix only (no memo of visited state sets).  Subtrees are cut
    when nothing is reachable from s any more or when T has already accepted
    a prefix (every extension is then accepted too).
    """
    succ = {}
    for a, b, i, _ in edges:
        if a != 0:
            succ.setdefault((a, i), set()).add(b)

    def step(states, i):
        out = set()
        for v in states:
            out |= succ.get((v, i), set())
        return out

    best = None

    def dfs(P, Q, word):
        nonlocal best
        if best is not None and len(word) >= len(best):
            return
        if len(word) == max_len:
            return
        for i in range(1, m + 1):
            P2 = step(P, i)
            if not P2:
                continue
            Q2 = step(Q, i)
            if 0 in Q2:
                continue
            if 0 in P2:
                best = word + [i]
                return
            dfs(P2, Q2, word + [i])

    # iterative deepening keeps the answer a shortest one
    for depth in range(1, max_len + 1):
        best = None
        saved = max_len
        max_len = depth
        dfs({s}, set(T), [])
        max_len = saved
        if best is not None:
            return best
    return None

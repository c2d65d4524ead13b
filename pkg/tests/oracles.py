"""Independent oracles shared by the unit and acceptance tests.

None of these call into the package's lattice or phi code.
"""
import itertools
from fractions import Fraction
from math import gcd

from weylexp.rootsys import form, orbit


def _xgcd(a, b):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _xgcd(b, a % b)
    return g, y, x - (a // b) * y


def oracle_hnf(m):
    """Row HNF by 2x2 extended-gcd row operations, then reduction above pivots."""
    H = [list(r) for r in m]
    rows, cols = len(H), len(H[0])
    r = 0
    for c in range(cols):
        if r == rows:
            break
        for i in range(r + 1, rows):
            a, b = H[r][c], H[i][c]
            if b == 0:
                continue
            g, x, y = _xgcd(a, b)
            ra, rb = H[r], H[i]
            H[r] = [x * u + y * v for u, v in zip(ra, rb)]
            H[i] = [(a // g) * v - (b // g) * u for u, v in zip(ra, rb)]
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-u for u in H[r]]
        for i in range(r):
            q = H[i][c] // H[r][c]
            H[i] = [u - q * v for u, v in zip(H[i], H[r])]
        r += 1
    return H


def leibniz_det(m):
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        inversions = sum(perm[a] > perm[b] for a in range(n) for b in range(a + 1, n))
        term = -1 if inversions % 2 else 1
        for r in range(n):
            term *= m[r][perm[r]]
        total += term
    return total


def determinantal_divisors(m):
    rows, cols = len(m), len(m[0])
    out = []
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in itertools.combinations(range(rows), k):
            for cs in itertools.combinations(range(cols), k):
                g = gcd(g, leibniz_det([[m[i][j] for j in cs] for i in rs]))
        out.append(g)
    return out


def oracle_invariant_factors(m):
    d = determinantal_divisors(m)
    out, prev = [], 1
    for x in d:
        if x == 0:
            break
        out.append(x // prev)
        prev = x
    return out


def _solve(basis, v):
    """Fraction Gauss-Jordan solve x @ basis = v for independent rows."""
    k, dim = len(basis), len(v)
    A = [[Fraction(basis[r][c]) for r in range(k)] + [Fraction(v[c])] for c in range(dim)]
    row, piv = 0, []
    for col in range(k):
        p = next((i for i in range(row, dim) if A[i][col]), None)
        if p is None:
            continue
        A[row], A[p] = A[p], A[row]
        A[row] = [x / A[row][col] for x in A[row]]
        for i in range(dim):
            if i != row and A[i][col]:
                A[i] = [x - A[i][col] * y for x, y in zip(A[i], A[row])]
        piv.append(col)
        row += 1
    if any(A[i][k] for i in range(row, dim)):
        return None
    return [A[i][k] for i in range(row)]


def brute_exponent(M_basis, L_basis, limit=30):
    for N in range(1, limit + 1):
        if all(all(x.denominator == 1 for x in _solve(L_basis, [N * a for a in g])) for g in M_basis):
            return N
    return None


def orbit_pairing_oracle(rs, j):
    """1/2 sum <lam, theta^vee>^2 with the pairing taken from the invariant form."""
    theta = rs.highest_root
    tt = form(rs, theta, theta)
    total = sum((2 * form(rs, lam, theta) / tt) ** 2 for lam in orbit(rs, rs.fundamental_weight(j)))
    assert total.denominator == 1
    return int(total) // 2

"""Exact and modular linear algebra over the integers/rationals.

Matrices are anything ``numpy.asarray`` accepts holding ints or Fractions.
Rational rows are cleared to integers first (row scaling preserves rank,
row space and kernel).  All exact arithmetic runs on Python ints inside
object arrays, so entries never overflow.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np

from .errors import DimensionMismatch, NoConvergence, ResourceExceeded

MAX_EXACT_ENTRIES = 2_000_000


def _as_int_object(m) -> np.ndarray:
    a = np.array(m, dtype=object)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise DimensionMismatch("expected a 2-d matrix")
    if a.size > MAX_EXACT_ENTRIES:
        raise ResourceExceeded(f"{a.shape} matrix exceeds the exact elimination budget")
    out = np.empty(a.shape, dtype=object)
    for i, row in enumerate(a):
        dens = [x.denominator for x in row if isinstance(x, Fraction)]
        scale = math.lcm(*dens) if dens else 1
        out[i] = [int(x * scale) for x in row]
    return out


def _bareiss(a: np.ndarray, jordan: bool) -> tuple[np.ndarray, list[int], list[int]]:
    """Fraction-free elimination in place; returns (matrix, pivot rows, pivot cols).

    With ``jordan`` the pivot columns are cleared above the pivots too and
    every pivot ends equal to the last one.  Each step divides exactly by the
    previous pivot.
    """
    rows, cols = a.shape
    prev = 1
    r = 0
    pivcols = []
    for c in range(cols):
        if r == rows:
            break
        col = a[r:, c]
        nz = [i for i, x in enumerate(col) if x != 0]
        if not nz:
            continue
        i = r + min(nz, key=lambda k: abs(col[k]))
        if i != r:
            a[[r, i]] = a[[i, r]]
        p = a[r, c]
        targets = np.arange(rows) if jordan else np.arange(r + 1, rows)
        targets = targets[targets != r]
        if targets.size:
            lo = c if not jordan else 0
            block = a[np.ix_(targets, np.arange(lo, cols))]
            factors = a[targets, c].reshape(-1, 1)
            block = (p * block - factors * a[r, lo:].reshape(1, -1)) // prev
            a[np.ix_(targets, np.arange(lo, cols))] = block
        prev = p
        pivcols.append(c)
        r += 1
    return a, list(range(r)), pivcols


def rank_exact(m) -> int:
    """Rank over the rationals by fraction-free (Bareiss) elimination."""
    a = _as_int_object(m)
    if a.shape[0] > a.shape[1]:
        a = a.T.copy()
    return len(_bareiss(a, jordan=False)[2])


def kernel_basis(m) -> list[np.ndarray]:
    """Basis of {x : m x = 0} as integer object vectors with content 1."""
    a = _as_int_object(m)
    cols = a.shape[1]
    a, prow, pcol = _bareiss(a, jordan=True)
    free = [c for c in range(cols) if c not in set(pcol)]
    out = []
    d = a[prow[-1], pcol[-1]] if pcol else 1
    for f in free:
        x = np.zeros(cols, dtype=object)
        x[f] = d
        for r, c in zip(prow, pcol):
            x[c] = -a[r, f]
        g = math.gcd(*[int(v) for v in x])
        if d < 0:
            g = -g
        out.append(x // g)
    return out


def rref_fraction(m) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form with Fraction arithmetic (slow; reference oracle)."""
    a = [[Fraction(x) for x in row] for row in np.array(m, dtype=object).tolist()]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    r = 0
    piv = []
    for c in range(cols):
        i = next((k for k in range(r, rows) if a[k][c] != 0), None)
        if i is None:
            continue
        a[r], a[i] = a[i], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for k in range(rows):
            if k != r and a[k][c] != 0:
                f = a[k][c]
                a[k] = [x - f * y for x, y in zip(a[k], a[r])]
        piv.append(c)
        r += 1
        if r == rows:
            break
    return a, piv


def in_span(v, basis) -> bool:
    """Exact membership of v in the span of basis vectors."""
    return all_in_span([v], basis)


def all_in_span(vectors, basis) -> bool:
    vectors = [np.asarray(v, dtype=object) for v in vectors]
    basis = [np.asarray(b, dtype=object) for b in basis]
    lengths = {len(v) for v in vectors} | {len(b) for b in basis}
    if len(lengths) > 1:
        raise DimensionMismatch(f"inconsistent vector lengths {sorted(lengths)}")
    if not basis:
        return all(not any(v) for v in vectors)
    return rank_exact(np.array(basis + vectors)) == rank_exact(np.array(basis))


def same_span(a, b) -> bool:
    """Mutual inclusion of two spans."""
    ra, rb = rank_exact(np.array(list(a))), rank_exact(np.array(list(b)))
    return ra == rb == rank_exact(np.array(list(a) + list(b)))


# --- modular rank --------------------------------------------------------------

def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_primes(count: int, seed: int, bits: int = 31) -> list[int]:
    """Distinct primes in [2^(bits-1), 2^bits) drawn from a seeded generator."""
    rng = random.Random(seed)
    out: list[int] = []
    while len(out) < count:
        c = rng.randrange(2 ** (bits - 1), 2 ** bits) | 1
        if _is_prime(c) and c not in out:
            out.append(c)
    return out


def _reduce_mod(m, prime: int) -> np.ndarray:
    a = np.asarray(m)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.dtype == object:
        out = np.empty(a.shape, dtype=np.int64)
        flat = a.ravel()
        o = out.ravel()
        for i, x in enumerate(flat):
            if isinstance(x, Fraction):
                o[i] = x.numerator % prime * pow(x.denominator, -1, prime) % prime
            else:
                o[i] = int(x) % prime
        return out
    return np.mod(a.astype(np.int64), prime)


def rank_mod_p(m, prime: int) -> int:
    """Rank of m reduced modulo prime (< 2^31 so int64 products cannot overflow)."""
    if prime >= 2 ** 31:
        raise ValueError("prime must be below 2^31")
    a = _reduce_mod(m, prime)
    if a.shape[0] > a.shape[1]:
        a = a.T
    a = np.ascontiguousarray(a)
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, prime)
        a[r, c:] = a[r, c:] * inv % prime
        below = a[r + 1:, c]
        hit = np.flatnonzero(below)
        if hit.size:
            idx = r + 1 + hit
            a[idx, c:] = (a[idx, c:] - np.outer(a[idx, c], a[r, c:]) % prime) % prime
        r += 1
    return r


def rank_mod_primes(m, primes) -> list[int]:
    return [rank_mod_p(m, p) for p in primes]


# --- symmetric eigenvalues ---------------------------------------------------------

def _round_robin(n: int):
    """n-1 rounds (n even) of disjoint pairs covering every pair once."""
    players = list(range(n))
    for _ in range(n - 1):
        yield [(players[i], players[n - 1 - i]) for i in range(n // 2)]
        players = [players[0]] + [players[-1]] + players[1:-1]


def jacobi_spectrum(m, tol: float = 1e-9, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Rotations are scheduled in round-robin order so that each round acts on
    disjoint index pairs and is applied as one vectorized update.  Stops when
    the off-diagonal Frobenius norm drops below ``tol``.
    """
    A = np.array(m, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or not np.allclose(A, A.T):
        raise ValueError("jacobi_spectrum needs a square symmetric matrix")
    trace = float(np.trace(A))
    size = n + (n % 2)
    schedule = [
        [(p, q) for p, q in rnd if p < n and q < n] for rnd in _round_robin(size)
    ]
    schedule = [np.array(r, dtype=np.int64).reshape(-1, 2) for r in schedule]

    def off(M):
        # summed directly: subtracting the diagonal from the full norm cancels catastrophically
        D = M - np.diag(np.diag(M))
        return math.sqrt(float((D * D).sum()))

    for _ in range(max_sweeps):
        if off(A) < tol:
            break
        for pairs in schedule:
            if not len(pairs):
                continue
            P = np.minimum(pairs[:, 0], pairs[:, 1])
            Q = np.maximum(pairs[:, 0], pairs[:, 1])
            apq = A[P, Q]
            act = np.abs(apq) > 1e-300
            if not act.any():
                continue
            P, Q, apq = P[act], Q[act], apq[act]
            theta = (A[Q, Q] - A[P, P]) / (2.0 * apq)
            big = np.abs(theta) > 1e150
            theta_s = np.where(big, 0.0, theta)
            t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta_s * theta_s + 1.0))
            t[big] = 0.5 / theta[big]
            t[theta == 0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            colP, colQ = A[:, P].copy(), A[:, Q].copy()
            A[:, P] = c * colP - s * colQ
            A[:, Q] = s * colP + c * colQ
            rowP, rowQ = A[P, :].copy(), A[Q, :].copy()
            A[P, :] = c[:, None] * rowP - s[:, None] * rowQ
            A[Q, :] = s[:, None] * rowP + c[:, None] * rowQ
    else:
        if off(A) >= tol:
            raise NoConvergence(f"off-diagonal norm {off(A):.3g} after {max_sweeps} sweeps")
    ev = np.sort(np.diag(A))
    if abs(ev.sum() - trace) > max(tol, 1e-9 * max(1.0, abs(trace))) * n:
        raise NoConvergence("eigenvalue sum drifted from the trace")
    return ev


def multiset(values, digits: int = 6) -> dict[float, int]:
    """Eigenvalue multiplicities after rounding, largest first."""
    out: dict[float, int] = {}
    for v in values:
        k = round(float(v), digits) + 0.0
        out[k] = out.get(k, 0) + 1
    return dict(sorted(out.items(), reverse=True))

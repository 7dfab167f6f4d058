"""Closed 3-manifold invariants from surgery presentations.

A presentation is an integer symmetric linking matrix B.  The invariant
is the colored sum

    Z(B) = kappa^(-sig B) * eta^(n+1) * sum_c q^(c^T B c),

with colors c running over (Z/p')^n.  The normalization makes the empty
presentation give Z(S^3) = eta and makes +-1 blow-ups neutral, so the
value only depends on the presented manifold.

Lens spaces come from chains of unknots via the negative continued
fraction expansion; ``matrix_element`` computes partially-colored sums
(one boundary strand left uncolored) used to compare the chain picture
with solid-torus gluings.

For even p the colored sum refines over mod-2 structures: solutions of
the characteristic equation Sum_j B_ij s_j = B_ii (mod 2) when
p = 4 (mod 8), and of the homogeneous equation when p = 0 (mod 8).
The refined sums restrict colors to fixed parities; for the homogeneous
kind the parity pattern is offset by a characteristic solution, which
is what makes the refined pieces add up to the whole.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd

from .cyclotomic import (
    eta_kappa,
    exponent_sum,
    field_order,
    one,
    p_prime,
    q_power,
)

__all__ = [
    "signature",
    "bracket",
    "z_invariant",
    "matrix_element",
    "continued_fraction",
    "chain_matrix",
    "z_lens",
    "refinement_kind",
    "refinement_classes",
    "refined_invariant",
    "blow_up",
    "slide",
]


def _check_symmetric(B):
    B = tuple(tuple(int(v) for v in row) for row in B)
    n = len(B)
    for row in B:
        if len(row) != n:
            raise ValueError("linking matrix must be square")
    for i in range(n):
        for j in range(n):
            if B[i][j] != B[j][i]:
                raise ValueError("linking matrix must be symmetric")
    return B


def signature(B):
    """Signature of a symmetric integer matrix, by exact congruence
    diagonalization over the rationals.

    >>> signature(((2, 1), (1, 2)))
    2
    >>> signature(((0, 1), (1, 0)))
    0
    >>> signature(())
    0
    """
    B = _check_symmetric(B)
    n = len(B)
    M = [[Fraction(v) for v in row] for row in B]
    sig = 0
    for i in range(n):
        if M[i][i] == 0:
            j = next((k for k in range(i + 1, n) if M[i][k]), None)
            if j is None:
                continue
            for s in (1, -1):
                if 2 * s * M[i][j] + M[j][j] != 0:
                    break
            # x_i += s x_j turns the zero diagonal entry into
            # 2 s B_ij + B_jj, nonzero for one of the signs
            for k in range(n):
                M[i][k] += s * M[j][k]
            for k in range(n):
                M[k][i] += s * M[k][j]
        pivot = M[i][i]
        sig += 1 if pivot > 0 else -1
        for k in range(i + 1, n):
            factor = M[k][i] / pivot
            if factor:
                for l in range(n):
                    M[k][l] -= factor * M[i][l]
                for l in range(n):
                    M[l][k] -= factor * M[l][i]
    return sig


def bracket(p, B, colors):
    """The phase q^(c^T B c) of one coloring."""
    B = _check_symmetric(B)
    e = 0
    for i, ci in enumerate(colors):
        for j, cj in enumerate(colors):
            e += ci * B[i][j] * cj
    return q_power(p, e)


def _color_sum(p, B, fixed=None):
    """sum over colors in (Z/p')^free of q^(c^T B c), with some
    components held at fixed colors."""
    B = _check_symmetric(B)
    n = len(B)
    fixed = dict(fixed or {})
    free = [i for i in range(n) if i not in fixed]
    pp = p_prime(p)
    M = field_order(p)
    step = M // p
    counts = {}
    base = [0] * n
    for i, v in fixed.items():
        base[i] = int(v)
    for assign in itertools.product(range(pp), repeat=len(free)):
        for idx, v in zip(free, assign):
            base[idx] = v
        e = 0
        for i in range(n):
            bi = base[i]
            if bi:
                row = B[i]
                e += bi * sum(row[j] * base[j] for j in range(n))
        key = (e % p) * step
        counts[key] = counts.get(key, 0) + 1
    return exponent_sum(M, counts)


def z_invariant(p, B):
    """Invariant of the closed manifold presented by B.

    >>> from abtqft.cyclotomic import eta_kappa
    >>> z_invariant(3, ()) == eta_kappa(3)[0]    # S^3
    True
    >>> z_invariant(3, ((0,),))                  # S^2 x S^1
    CycNum(24: 1)
    """
    B = _check_symmetric(B)
    n = len(B)
    eta, kappa = eta_kappa(p)
    return kappa ** (-signature(B)) * eta ** (n + 1) * _color_sum(p, B)


def matrix_element(p, B_full, fixed, g_plus):
    """Partially colored surgery sum: components listed in ``fixed``
    keep their colors (they are boundary strands), the rest are
    surgered.  Normalized by the signature of the surgered sublink and
    by one eta per surgered component plus one per outgoing handle."""
    B_full = _check_symmetric(B_full)
    n = len(B_full)
    free = [i for i in range(n) if i not in fixed]
    sub = tuple(tuple(B_full[i][j] for j in free) for i in free)
    eta, kappa = eta_kappa(p)
    total = _color_sum(p, B_full, fixed)
    return kappa ** (-signature(sub)) * eta ** (g_plus + len(free)) * total


# -- lens spaces ----------------------------------------------------------


def continued_fraction(beta, alpha):
    """Negative (ceiling) continued fraction of beta/alpha:
    beta/alpha = m_1 - 1/(m_2 - 1/(...)).

    >>> continued_fraction(2, 1)
    (2,)
    >>> continued_fraction(3, 2)
    (2, 2)
    >>> continued_fraction(5, 2)
    (3, 2)
    """
    if alpha < 0 or (alpha == 0 and beta not in (1, -1)):
        raise ValueError("expect alpha >= 0 with gcd(alpha, beta) = 1")
    ms = []
    while alpha:
        m = -((-beta) // alpha)  # ceiling
        ms.append(m)
        beta, alpha = alpha, m * alpha - beta
    return tuple(ms)


def chain_matrix(ms):
    """Linking matrix of a chain of unknots with framings ms.

    >>> chain_matrix((3, 2))
    ((3, 1), (1, 2))
    """
    n = len(ms)
    return tuple(
        tuple(
            ms[i] if i == j else (1 if abs(i - j) == 1 else 0)
            for j in range(n)
        )
        for i in range(n)
    )


def z_lens(p, beta, alpha):
    """Invariant of the lens space L(beta, alpha).

    >>> z_lens(3, 1, 0) == z_invariant(3, ())      # L(1, 0) = S^3
    True
    """
    if beta < 0:
        raise ValueError("use beta >= 0")
    if beta == 0:
        if alpha not in (1, -1):
            raise ValueError("gcd(alpha, beta) must be 1")
        return z_invariant(p, ((0,),))
    alpha %= beta
    if beta > 1 and gcd(alpha, beta) != 1:
        raise ValueError("gcd(alpha, beta) must be 1")
    if alpha == 0:
        return z_invariant(p, ())
    return z_invariant(p, chain_matrix(continued_fraction(beta, alpha)))


# -- parity refinements (even order only) ---------------------------------


def refinement_kind(p):
    """'spin' when p = 4 (mod 8), 'cohomology' when p = 0 (mod 8)."""
    if p % 2:
        raise ValueError("odd order has no parity refinement")
    if p % 8 == 4:
        return "spin"
    if p % 8 == 0:
        return "cohomology"
    raise ValueError("order 2 mod 4 is not admissible")


def _solve_mod2(B, rhs):
    """All solutions over F_2 of B s = rhs (sorted tuples)."""
    n = len(B)
    rows = [
        [B[i][j] % 2 for j in range(n)] + [rhs[i] % 2] for i in range(n)
    ]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, n) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(n):
            if i != r and rows[i][c]:
                rows[i] = [(a + b) % 2 for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    for i in range(r, n):
        if rows[i][n]:
            return []
    free = [c for c in range(n) if c not in pivots]
    sols = []
    for assign in itertools.product((0, 1), repeat=len(free)):
        s = [0] * n
        for c, v in zip(free, assign):
            s[c] = v
        for i in reversed(range(r)):
            c = pivots[i]
            s[c] = (rows[i][n] + sum(rows[i][j] * s[j] for j in free)) % 2
        sols.append(tuple(s))
    return sorted(sols)


def refinement_classes(p, B):
    """The mod-2 classes refining the colored sum at even order."""
    B = _check_symmetric(B)
    kind = refinement_kind(p)
    n = len(B)
    if kind == "spin":
        rhs = [B[i][i] for i in range(n)]
    else:
        rhs = [0] * n
    return _solve_mod2(B, rhs)


def _characteristic_shift(B):
    n = len(B)
    chars = _solve_mod2(B, [B[i][i] for i in range(n)])
    if not chars:
        raise ArithmeticError("characteristic system is always solvable")
    return chars[0]


def refined_invariant(p, B, cls):
    """Colored sum restricted to one refinement class.

    Spin classes fix the color parities directly; homogeneous classes
    are offset by the least characteristic solution before being used
    as parities."""
    B = _check_symmetric(B)
    kind = refinement_kind(p)
    n = len(B)
    if len(cls) != n:
        raise ValueError("class length does not match the matrix")
    if tuple(v % 2 for v in cls) not in refinement_classes(p, B):
        raise ValueError("not a refinement class of this presentation")
    if kind == "spin":
        parities = [v % 2 for v in cls]
    else:
        shift = _characteristic_shift(B)
        parities = [(v + s) % 2 for v, s in zip(cls, shift)]
    pp = p_prime(p)
    M = field_order(p)
    step = M // p
    counts = {}
    ranges = [range(par, pp, 2) for par in parities]
    for colors in itertools.product(*ranges):
        e = 0
        for i in range(n):
            ci = colors[i]
            if ci:
                row = B[i]
                e += ci * sum(row[j] * colors[j] for j in range(n))
        key = (e % p) * step
        counts[key] = counts.get(key, 0) + 1
    eta, kappa = eta_kappa(p)
    return kappa ** (-signature(B)) * eta ** (n + 1) * exponent_sum(M, counts)


# -- Kirby moves ----------------------------------------------------------


def blow_up(B, sign):
    """Append a disjoint +-1 framed unknot."""
    if sign not in (1, -1):
        raise ValueError("blow-up sign must be +-1")
    B = _check_symmetric(B)
    n = len(B)
    return tuple(
        tuple(B[i][j] for j in range(n)) + (0,) for i in range(n)
    ) + ((0,) * n + (sign,),)


def slide(B, i, j, sign=1):
    """Slide component i over component j (basis change e_i -> e_i + s e_j)."""
    B = _check_symmetric(B)
    n = len(B)
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ValueError("need two distinct component indices")
    if sign not in (1, -1):
        raise ValueError("slide sign must be +-1")
    C = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
    C[j][i] = sign
    out = [[0] * n for _ in range(n)]
    for r in range(n):
        for c in range(n):
            out[r][c] = sum(
                C[a][r] * B[a][b] * C[b][c]
                for a in range(n) for b in range(n)
            )
    return tuple(tuple(row) for row in out)


if __name__ == "__main__":
    import doctest

    doctest.testmod()

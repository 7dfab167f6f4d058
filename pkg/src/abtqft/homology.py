"""Integer symplectic lattices, Lagrangian sublattices, and Lagrangian
correspondences between surface homology groups.

Homology classes are integer row vectors in coordinates
``(a_1, ..., a_g, b_1, ..., b_g)`` with the intersection form
``a_i . b_i = 1``.  Sublattices are stored as Hermite-normal-form row
bases, which gives decidable equality; saturation (primitive hull) is
computed by a double kernel, so no Smith-form machinery is needed.
Maps act on row vectors from the right: the matrix of ``g o f`` is
``F @ G``.

A boundary ``-Sigma_- + Sigma_+`` carries the difference form; the
correspondence constructors return bases of ``L_C`` together with a
complementary basis in *pairing-identity order* (the i-th basis vector
of the complement pairs to 1 with the i-th vector of ``L_C`` and to 0
with the others), which is exactly what a Heisenberg context needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

__all__ = [
    "intersection",
    "boundary_intersection",
    "standard_lagrangian",
    "standard_dual",
    "mat_mul",
    "mat_transpose",
    "identity_matrix",
    "hnf",
    "left_kernel",
    "solve_left",
    "lattice_intersect",
    "saturate",
    "row_span_equal",
    "is_lagrangian",
    "is_symplectic",
    "symplectic_dual_basis",
    "symplectic_complete",
    "Correspondence",
    "cylinder_correspondence",
    "index1_correspondence",
    "index2_correspondence",
    "correspondence_of",
    "lagrangian_compose",
    "compose_correspondences",
]


# -- basic integer matrix helpers -----------------------------------------


def _freeze(rows):
    return tuple(tuple(int(c) for c in row) for row in rows)


def mat_transpose(A):
    A = _freeze(A)
    if not A:
        return ()
    return tuple(zip(*A))


def mat_mul(A, B):
    B_t = mat_transpose(B)
    return tuple(
        tuple(sum(a * b for a, b in zip(row, col)) for col in B_t) for row in A
    )


def identity_matrix(n):
    return tuple(
        tuple(1 if i == j else 0 for j in range(n)) for i in range(n)
    )


def _det(A):
    """Exact integer determinant (fraction-free Gaussian elimination)."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(row) for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = M[k][k]
    return sign * M[-1][-1]


# -- symplectic form ------------------------------------------------------


def intersection(x, y):
    """Intersection number x.y in (a_1..a_g, b_1..b_g) coordinates.

    >>> intersection((1, 0), (0, 1))   # a_1 . b_1
    1
    >>> intersection((0, 1), (1, 0))
    -1
    >>> intersection((1, 0, 0, 0), (0, 1, 0, 0))   # a_1 . a_2
    0
    """
    if len(x) != len(y) or len(x) % 2:
        raise ValueError("vectors must have equal even length")
    g = len(x) // 2
    return sum(x[i] * y[g + i] - x[g + i] * y[i] for i in range(g))


def boundary_intersection(x, y, g_minus, g_plus):
    """The difference form on -Sigma_- + Sigma_+ applied to two vectors
    of length 2*g_minus + 2*g_plus (minus block first)."""
    n = 2 * g_minus
    first = intersection(x[:n], y[:n]) if g_minus else 0
    second = intersection(x[n:], y[n:]) if g_plus else 0
    return -first + second


def standard_lagrangian(g):
    """Meridian rows (a_1, ..., a_g)."""
    return tuple(
        tuple(1 if j == i else 0 for j in range(2 * g)) for i in range(g)
    )


def standard_dual(g):
    """Longitude rows (b_1, ..., b_g)."""
    return tuple(
        tuple(1 if j == g + i else 0 for j in range(2 * g)) for i in range(g)
    )


# -- Hermite normal form and friends --------------------------------------


def hnf(rows, with_transform=False):
    """Row Hermite normal form with positive pivots and reduced entries
    above each pivot; zero rows are dropped from the basis.

    With ``with_transform`` also returns the unimodular U with
    ``U @ rows == stacked(H, zero rows)``.

    >>> hnf(((2, 4), (1, 1)))
    ((1, 1), (0, 2))
    """
    A = [list(r) for r in rows]
    n = len(A)
    m = len(A[0]) if n else 0
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    r = 0
    for c in range(m):
        while True:
            nz = [i for i in range(r, n) if A[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(A[i][c]))
            if i0 != r:
                A[r], A[i0] = A[i0], A[r]
                U[r], U[i0] = U[i0], U[r]
            done = True
            for i in range(r + 1, n):
                if A[i][c]:
                    qd = A[i][c] // A[r][c]
                    if qd:
                        for j in range(m):
                            A[i][j] -= qd * A[r][j]
                        for j in range(n):
                            U[i][j] -= qd * U[r][j]
                    if A[i][c]:
                        done = False
            if done:
                break
        if r < n and A[r][c]:
            if A[r][c] < 0:
                A[r] = [-v for v in A[r]]
                U[r] = [-v for v in U[r]]
            for i in range(r):
                qd = A[i][c] // A[r][c]
                if qd:
                    for j in range(m):
                        A[i][j] -= qd * A[r][j]
                    for j in range(n):
                        U[i][j] -= qd * U[r][j]
            r += 1
    basis = _freeze(A[:r])
    if with_transform:
        return basis, _freeze(U), r
    return basis


def left_kernel(A):
    """Canonical basis of {x : x @ A == 0}.

    >>> left_kernel(((2, 4), (1, 2)))
    ((1, -2),)
    """
    A = _freeze(A)
    if not A:
        return ()
    _, U, rank = hnf(A, with_transform=True)
    return hnf(U[rank:])


def solve_left(A, b):
    """An integer solution x of x @ A == b, or None."""
    A = _freeze(A)
    if not A:
        return None if any(b) else ()
    H, U, rank = hnf(A, with_transform=True)
    m = len(A[0])
    res = [int(v) for v in b]
    y = [0] * rank
    pivots = []
    for i in range(rank):
        col = next(j for j in range(m) if H[i][j])
        pivots.append(col)
    for i in range(rank):
        c = pivots[i]
        if res[c] % H[i][c]:
            return None
        q = res[c] // H[i][c]
        y[i] = q
        if q:
            for j in range(m):
                res[j] -= q * H[i][j]
    if any(res):
        return None
    n = len(A)
    x = [0] * n
    for i in range(rank):
        if y[i]:
            for j in range(n):
                x[j] += y[i] * U[i][j]
    return tuple(x)


def lattice_intersect(A, B):
    """Canonical basis of the intersection of the two row lattices.

    >>> lattice_intersect(((2, 0),), ((3, 0),))
    ((6, 0),)
    """
    A = _freeze(A)
    B = _freeze(B)
    if not A or not B:
        return ()
    stacked = A + B
    kernel = left_kernel(stacked)
    na = len(A)
    vecs = []
    for row in kernel:
        v = [0] * len(A[0])
        for i in range(na):
            if row[i]:
                for j in range(len(v)):
                    v[j] += row[i] * A[i][j]
        vecs.append(tuple(v))
    return hnf(vecs)


def saturate(A):
    """Primitive hull of a row lattice: the integer points of its
    rational span, computed with a double kernel.

    >>> saturate(((2, 4),))
    ((1, 2),)
    """
    A = _freeze(A)
    if not A:
        return ()
    nullspace = left_kernel(mat_transpose(A))
    if not nullspace:
        return identity_matrix(len(A[0]))
    return left_kernel(mat_transpose(nullspace))


def row_span_equal(A, B):
    return hnf(A) == hnf(B)


def is_primitive_vector(v):
    g = 0
    for c in v:
        g = gcd(g, c)
    return g == 1


# -- Lagrangian predicates ------------------------------------------------


def is_lagrangian(basis, g):
    """True iff the rows span a rank-g isotropic direct summand of Z^2g.

    >>> is_lagrangian(standard_lagrangian(2), 2)
    True
    >>> is_lagrangian(((1, 0), (0, 1)), 1)
    False
    >>> is_lagrangian(((1, 2),), 1)
    True
    """
    basis = _freeze(basis)
    if any(len(row) != 2 * g for row in basis):
        return False
    H = hnf(basis)
    if len(H) != g:
        return False
    for i in range(len(H)):
        for j in range(i + 1, len(H)):
            if intersection(H[i], H[j]):
                return False
    return saturate(basis) == H


def is_symplectic(F):
    """Does the matrix preserve the intersection form (F J F^T = J)?"""
    F = _freeze(F)
    n = len(F)
    if n % 2 or any(len(row) != n for row in F):
        return False
    g = n // 2
    for i in range(n):
        for j in range(n):
            expected = intersection(
                tuple(1 if k == i else 0 for k in range(n)),
                tuple(1 if k == j else 0 for k in range(n)),
            )
            if intersection(F[i], F[j]) != expected:
                return False
    return True


# -- symplectic bases -----------------------------------------------------


def symplectic_dual_basis(L_rows, g):
    """A complementary Lagrangian basis (w_1..w_g) with u_i . w_j = delta.

    Input rows must span a Lagrangian; the returned pair (U, W) has
    ``U[i] . W[j] = delta_ij``, W isotropic, and stacked (U, W) a basis
    of the full lattice.
    """
    U = hnf(L_rows)
    if not is_lagrangian(U, g):
        raise ValueError("input is not a Lagrangian basis")
    # solve U . w_j = e_j one column at a time
    pair_matrix = tuple(
        tuple(intersection(U[i], tuple(1 if k == j else 0 for k in range(2 * g)))
              for i in range(g))
        for j in range(2 * g)
    )  # (2g x g): row j holds (U[i] . e_j)_i
    W = []
    for jcol in range(g):
        target = tuple(1 if i == jcol else 0 for i in range(g))
        x = solve_left(pair_matrix, target)
        if x is None:
            raise ArithmeticError("no integral dual vector; lattice not primitive")
        W.append(x)
    # isotropy correction W' = W + C.U with C - C^T = -S, S = pairwise form
    S = [[intersection(W[i], W[j]) for j in range(g)] for i in range(g)]
    W2 = []
    for i in range(g):
        row = list(W[i])
        for j in range(i + 1, g):
            c = -S[i][j]
            if c:
                for k in range(2 * g):
                    row[k] += c * U[j][k]
        W2.append(tuple(row))
    for i in range(g):
        for j in range(g):
            assert intersection(U[i], W2[j]) == (1 if i == j else 0)
            assert intersection(W2[i], W2[j]) == 0
    assert abs(_det(U + tuple(W2))) == 1
    return U, tuple(W2)


def symplectic_complete(gamma):
    """For a primitive (alpha, beta) in one handle, a vector delta with
    gamma . delta = 1 and the unimodular column pair (gamma, delta).

    >>> symplectic_complete((1, 0))
    ((0, 1), ((1, 0), (0, 1)))
    >>> symplectic_complete((2, 3))
    ((1, 2), ((2, 1), (3, 2)))
    """
    if len(gamma) != 2:
        raise ValueError("completion works on a single designated handle")
    alpha, beta = gamma
    if gcd(alpha, beta) != 1:
        raise ValueError("surgery class must be primitive")
    # alpha*v - beta*u = 1 via the extended Euclid
    old_r, r = alpha, beta
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qd = old_r // r
        old_r, r = r, old_r - qd * r
        old_s, s = s, old_s - qd * s
        old_t, t = t, old_t - qd * t
    # old_s*alpha + old_t*beta = old_r = +-gcd = +-1
    sign = old_r
    v = sign * old_s
    u = -sign * old_t
    # canonical representative: shift delta by multiples of gamma
    if alpha:
        r = u % abs(alpha)
        k = (u - r) // alpha
    else:
        r = v % abs(beta)
        k = (v - r) // beta
    u -= k * alpha
    v -= k * beta
    assert alpha * v - beta * u == 1
    delta = (u, v)
    change = ((alpha, u), (beta, v))
    return delta, change


# -- correspondences ------------------------------------------------------


@dataclass(frozen=True)
class Correspondence:
    """A Lagrangian correspondence with a chosen complementary basis.

    ``adapted`` and ``adapted_dual`` are ordered bases of L_C and of a
    complement satisfying the pairing identity for the difference form;
    ``plus_block`` indexes the dual rows of the form (0, y) whose plus
    parts are the target dual basis.  Composite correspondences carry
    only the canonical lattice basis.
    """

    g_minus: int
    g_plus: int
    basis: tuple
    adapted: tuple | None = None
    adapted_dual: tuple | None = None
    plus_block: tuple | None = None
    source_L: tuple | None = None
    source_Ldual: tuple | None = None
    target_L: tuple | None = None
    target_Ldual: tuple | None = None

    def width(self):
        return 2 * self.g_minus + 2 * self.g_plus


def _check_adapted(corr: Correspondence):
    gm, gp = corr.g_minus, corr.g_plus
    rows = corr.adapted
    dual = corr.adapted_dual
    n = len(rows)
    assert n == gm + gp and len(dual) == n
    for i in range(n):
        for j in range(n):
            assert boundary_intersection(rows[i], rows[j], gm, gp) == 0
            assert boundary_intersection(dual[i], dual[j], gm, gp) == 0
            expected = 1 if i == j else 0
            assert boundary_intersection(rows[i], dual[j], gm, gp) == expected
    assert abs(_det(tuple(rows) + tuple(dual))) == 1
    for idx in corr.plus_block:
        assert not any(dual[idx][: 2 * gm])


def _pad(minus_part, plus_part, g_minus, g_plus):
    minus_part = tuple(minus_part) if minus_part else (0,) * (2 * g_minus)
    plus_part = tuple(plus_part) if plus_part else (0,) * (2 * g_plus)
    return minus_part + plus_part


def cylinder_correspondence(F, L_rows, Ldual_rows):
    """Correspondence of the mapping cylinder of the symplectic matrix F,
    adapted to the source pair (L, Ldual):
    L_C = {(-x, f(x))}, complement L_- + f(Ldual)."""
    F = _freeze(F)
    g = len(F) // 2
    if not is_symplectic(F):
        raise ValueError("cylinder matrix does not preserve the form")
    U, W = _freeze(L_rows), _freeze(Ldual_rows)
    apply = lambda v: tuple(mat_mul((v,), F)[0])
    rows = [
        _pad(W[i], tuple(-c for c in apply(W[i])), g, g) for i in range(g)
    ] + [
        _pad(tuple(-c for c in U[i]), apply(U[i]), g, g) for i in range(g)
    ]
    dual = [
        _pad(U[i], None, g, g) for i in range(g)
    ] + [
        _pad(None, apply(W[i]), g, g) for i in range(g)
    ]
    corr = Correspondence(
        g_minus=g,
        g_plus=g,
        basis=hnf(rows),
        adapted=_freeze(rows),
        adapted_dual=_freeze(dual),
        plus_block=tuple(range(g, 2 * g)),
        source_L=U,
        source_Ldual=W,
        target_L=tuple(apply(U[i]) for i in range(g)),
        target_Ldual=tuple(apply(W[i]) for i in range(g)),
    )
    _check_adapted(corr)
    return corr


def _embed_handle(v, g, pos):
    """Push (a, b) coordinates of genus g into genus g+1 with the new
    handle inserted at handle slot ``pos``."""
    a = tuple(v[:g])
    b = tuple(v[g:])
    return a[:pos] + (0,) + a[pos:] + b[:pos] + (0,) + b[pos:]


def index1_correspondence(L_rows, Ldual_rows, position=None):
    """Correspondence of an index-1 surgery: a new handle appears at
    the given slot (default: appended), with meridian mu added to L_C
    and longitude lambda to the complement."""
    U, W = _freeze(L_rows), _freeze(Ldual_rows)
    g = len(U)
    gp = g + 1
    pos = g if position is None else position
    if not (0 <= pos <= g):
        raise ValueError("insertion position out of range")
    mu = tuple(1 if k == pos else 0 for k in range(2 * gp))
    lam = tuple(1 if k == gp + pos else 0 for k in range(2 * gp))
    emb = lambda v: _embed_handle(v, g, pos)
    rows = [
        _pad(W[i], tuple(-c for c in emb(W[i])), g, gp) for i in range(g)
    ] + [
        _pad(tuple(-c for c in U[i]), emb(U[i]), g, gp) for i in range(g)
    ] + [_pad(None, mu, g, gp)]
    dual = [
        _pad(U[i], None, g, gp) for i in range(g)
    ] + [
        _pad(None, emb(W[i]), g, gp) for i in range(g)
    ] + [_pad(None, lam, g, gp)]
    # dual rows of plus type, listed in target handle-slot order
    slot_rows = [g + j for j in range(pos)] + [2 * g] + [
        g + j for j in range(pos, g)
    ]
    slot_L = [emb(U[j]) for j in range(pos)] + [mu] + [
        emb(U[j]) for j in range(pos, g)
    ]
    slot_W = [emb(W[j]) for j in range(pos)] + [lam] + [
        emb(W[j]) for j in range(pos, g)
    ]
    corr = Correspondence(
        g_minus=g,
        g_plus=gp,
        basis=hnf(rows),
        adapted=_freeze(rows),
        adapted_dual=_freeze(dual),
        plus_block=tuple(slot_rows),
        source_L=U,
        source_Ldual=W,
        target_L=tuple(slot_L),
        target_Ldual=tuple(slot_W),
    )
    _check_adapted(corr)
    return corr


def _drop_handle(g, k):
    """Coordinate projection deleting handle k (0-based) of genus g."""
    keep = [i for i in range(g) if i != k]
    def proj(v):
        return tuple(v[i] for i in keep) + tuple(v[g + i] for i in keep)
    return proj


def index2_correspondence(g, k, alpha, beta, L_rows=None, Ldual_rows=None):
    """Correspondence of an index-2 surgery along gamma = alpha*u_k +
    beta*w_k, where (u_i, w_i) is the working frame of the source
    surface (standard meridians and longitudes by default).  The pair k
    disappears; the target carries the standard frame of genus g-1."""
    if not (0 <= k < g):
        raise ValueError("handle index out of range")
    if L_rows is None:
        L_rows = standard_lagrangian(g)
        Ldual_rows = standard_dual(g)
    U, W = _freeze(L_rows), _freeze(Ldual_rows)
    delta2, _ = symplectic_complete((alpha, beta))
    gp = g - 1
    combine = lambda ca, cb: tuple(
        ca * x + cb * y for x, y in zip(U[k], W[k])
    )
    gamma = combine(alpha, beta)
    delta = combine(delta2[0], delta2[1])
    keep = [i for i in range(g) if i != k]
    ta = lambda j: tuple(1 if c == j else 0 for c in range(2 * gp))
    tb = lambda j: tuple(1 if c == gp + j else 0 for c in range(2 * gp))
    rows = [
        _pad(W[i], tuple(-c for c in tb(j)), g, gp)
        for j, i in enumerate(keep)
    ] + [
        _pad(tuple(-c for c in U[i]), ta(j), g, gp)
        for j, i in enumerate(keep)
    ] + [_pad(gamma, None, g, gp)]
    dual = [
        _pad(U[i], None, g, gp) for i in keep
    ] + [
        _pad(None, tb(j), g, gp) for j in range(gp)
    ] + [_pad(tuple(-c for c in delta), None, g, gp)]
    corr = Correspondence(
        g_minus=g,
        g_plus=gp,
        basis=hnf(rows),
        adapted=_freeze(rows),
        adapted_dual=_freeze(dual),
        plus_block=tuple(range(gp, 2 * gp)),
        source_L=U,
        source_Ldual=W,
        target_L=tuple(ta(j) for j in range(gp)),
        target_Ldual=tuple(tb(j) for j in range(gp)),
    )
    _check_adapted(corr)
    return corr


def correspondence_of(kind, **kw):
    """Dispatcher used by program loaders: kind is 'cylinder', 'index1'
    or 'index2' with the matching keyword payload."""
    if kind == "cylinder":
        return cylinder_correspondence(kw["F"], kw["L_rows"], kw["Ldual_rows"])
    if kind == "index1":
        return index1_correspondence(kw["L_rows"], kw["Ldual_rows"])
    if kind == "index2":
        return index2_correspondence(
            kw["g"], kw["k"], kw["alpha"], kw["beta"]
        )
    raise ValueError("unknown simple cobordism kind %r" % (kind,))


def lagrangian_compose(corr, L_rows):
    """The action L_C . L: saturation of the plus projection of
    L_C intersect (L + Z^{2 g_plus}).

    >>> idcyl = cylinder_correspondence(
    ...     identity_matrix(2), standard_lagrangian(1), standard_dual(1))
    >>> lagrangian_compose(idcyl, standard_lagrangian(1))
    ((1, 0),)
    """
    if isinstance(corr, Correspondence):
        gm, gp, basis = corr.g_minus, corr.g_plus, corr.basis
    else:
        raise TypeError("first argument must be a Correspondence")
    L = _freeze(L_rows)
    width = 2 * gm + 2 * gp
    ambient = [
        _pad(row, None, gm, gp) for row in L
    ] + [
        tuple(1 if j == 2 * gm + i else 0 for j in range(width))
        for i in range(2 * gp)
    ]
    meet = lattice_intersect(basis, ambient)
    plus_parts = [row[2 * gm:] for row in meet]
    projected = hnf(plus_parts)
    if not projected:
        return ()
    return saturate(projected)


def compose_correspondences(corr2, corr1):
    """Geometric composition of correspondences (saturated).

    The middle surface sits in the two boundaries with opposite
    orientations, so classes glue when they cancel: the matching
    condition is y_1 + y_2 = 0, which is what keeps the composite of
    two mapping-cylinder correspondences the cylinder of the composite
    map."""
    if corr1.g_plus != corr2.g_minus:
        raise ValueError("middle genera do not match")
    gm, gmid, gp = corr1.g_minus, corr1.g_plus, corr2.g_plus
    A = corr1.basis
    B = corr2.basis
    A_mid = [row[2 * gm:] for row in A]
    B_mid = [row[: 2 * gmid] for row in B]
    stacked = [tuple(r) for r in A_mid] + [tuple(r) for r in B_mid]
    kernel = left_kernel(stacked)
    na = len(A)
    out = []
    width = 2 * gm + 2 * gp
    for krow in kernel:
        v = [0] * width
        for i in range(na):
            if krow[i]:
                for j in range(2 * gm):
                    v[j] += krow[i] * A[i][j]
        for i in range(len(B)):
            c = krow[na + i]
            if c:
                for j in range(2 * gp):
                    v[2 * gm + j] += c * B[i][2 * gmid + j]
        out.append(tuple(v))
    basis = saturate(hnf(out)) if out else ()
    return Correspondence(g_minus=gm, g_plus=gp, basis=basis)


if __name__ == "__main__":
    import doctest

    doctest.testmod()

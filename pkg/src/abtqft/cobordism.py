"""Cobordisms between surfaces-with-Lagrangians as programs of simple
steps, and the functor taking them to linear maps of Schrodinger
modules.

A program lists mapping cylinders, index-1 and index-2 surgeries
between a declared source and target.  Step payloads are written in
the ambient handle coordinates of the surface they act on: cylinder
matrices act on ``(a_1..a_g, b_1..b_g)``, an index-1 step inserts a
handle slot, and an index-2 step removes its designated slot, the
surgery class being ``alpha*m_k + beta*l_k`` there.  Validation pushes
the source Lagrangian through the steps' correspondences and demands
that it land on the declared target.

The functor starts from the canonical frame of the source object (the
Lagrangian basis plus its symplectic complement) and lets every step
carry the frame along: a cylinder pushes the whole frame forward, an
index-1 step adjoins the new slot pair, an index-2 step consumes the
frame pair spanning the surgery class and projects the rest to the
surviving slots.  In the carried frame each step map is elementary --
identity, label inclusion, or a per-handle coefficient -- and the
final answer is rewritten into the canonical frame of the target, so
composite maps are frame-independent.  An index-2 class spread over
several frame pairs is out of scope and reported as such; insert a
conjugating cylinder first.

Index-2 coefficients come in two modes: a closed per-handle formula
(odd p only; for p divisible by 4 the exponent is ambiguous by a sign)
and the bimodule-tensor oracle, which is the ground truth the closed
form is tested against.

``normalized_map`` rescales by the invariant of the closed-off
cobordism, which is built in for single-step programs and must be
supplied as a surgery presentation otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .cyclotomic import field_order, one, p_prime, q_power
from .heisenberg import HeisContext, induced_map_oracle, to_finite
from .homology import (
    cylinder_correspondence,
    hnf,
    index1_correspondence,
    index2_correspondence,
    intersection,
    is_lagrangian,
    is_symplectic,
    lagrangian_compose,
    standard_dual,
    standard_lagrangian,
    symplectic_dual_basis,
)
from .surgery import z_invariant, z_lens

__all__ = [
    "CobObject",
    "MappingCylinder",
    "Index1",
    "Index2",
    "CobordismProgram",
    "ProgramError",
    "validate",
    "canonical_context",
    "context_transfer",
    "F_cylinder",
    "F_index1",
    "F_index2",
    "F_program",
    "identity_map",
    "compose_maps",
    "apply_map",
    "monoidal_product",
    "normalized_map",
    "load_program",
]


class ProgramError(ValueError):
    """A program is not a well-formed morphism between its declared
    objects."""


@dataclass(frozen=True)
class CobObject:
    g: int
    L: tuple

    def __post_init__(self):
        object.__setattr__(self, "L", hnf(self.L))
        if not is_lagrangian(self.L, self.g):
            raise ValueError("object Lagrangian must be a Lagrangian")


@dataclass(frozen=True)
class MappingCylinder:
    matrix: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "matrix", tuple(tuple(int(v) for v in r) for r in self.matrix)
        )
        if not is_symplectic(self.matrix):
            raise ValueError("cylinder matrix must preserve the form")


@dataclass(frozen=True)
class Index1:
    position: int | None = None


@dataclass(frozen=True)
class Index2:
    handle: int
    alpha: int
    beta: int

    def __post_init__(self):
        if gcd(self.alpha, self.beta) != 1:
            raise ValueError("surgery class must be primitive")


@dataclass(frozen=True)
class CobordismProgram:
    source: CobObject
    steps: tuple
    target: CobObject


def _ambient_correspondence(step, g):
    """The step's correspondence in ambient slot coordinates; only its
    lattice matters for validation."""
    if isinstance(step, MappingCylinder):
        if len(step.matrix) != 2 * g:
            raise ValueError("cylinder matrix size does not match genus")
        return cylinder_correspondence(
            step.matrix, standard_lagrangian(g), standard_dual(g)
        )
    if isinstance(step, Index1):
        return index1_correspondence(
            standard_lagrangian(g), standard_dual(g), step.position
        )
    if isinstance(step, Index2):
        if not (0 <= step.handle < g):
            raise ValueError("surgery handle out of range")
        return index2_correspondence(g, step.handle, step.alpha, step.beta)
    raise ValueError("unknown step %r" % (step,))


def validate(prog: CobordismProgram):
    """Push the source Lagrangian through all steps.  Returns the list
    of intermediate Lagrangians (ends included); raises
    :class:`ProgramError` naming the first failing step.
    """
    g = prog.source.g
    L = prog.source.L
    chain = [L]
    for i, step in enumerate(prog.steps):
        try:
            corr = _ambient_correspondence(step, g)
        except (ValueError, AssertionError) as exc:
            raise ProgramError("step %d: %s" % (i, exc)) from exc
        L = lagrangian_compose(corr, L)
        g = corr.g_plus
        chain.append(L)
    if g != prog.target.g or L != prog.target.L:
        raise ProgramError(
            "step %d: program ends at genus %d with Lagrangian %r, the "
            "declared target is genus %d with Lagrangian %r"
            % (len(prog.steps), g, L, prog.target.g, prog.target.L)
        )
    return chain


def canonical_context(p, obj: CobObject):
    """The reference frame of an object: its Lagrangian basis together
    with the complementary basis produced by symplectic completion."""
    if obj.g == 0:
        return HeisContext(p=p, g_minus=0, g_plus=0, L=(), Ldual=())
    U, W = symplectic_dual_basis(obj.L, obj.g)
    return HeisContext(p=p, g_minus=0, g_plus=obj.g, L=U, Ldual=W)


# -- maps as sparse matrices over the cyclotomic field --------------------


def identity_map(ctx):
    unit = one(field_order(ctx.p))
    return {(c, c): unit for c in ctx.labels()}


def compose_maps(m2, m1):
    """Matrix product m2 @ m1 of sparse label-indexed maps."""
    by_in = {}
    for (out, mid), v in m2.items():
        by_in.setdefault(mid, []).append((out, v))
    result = {}
    for (mid, inp), v1 in m1.items():
        for out, v2 in by_in.get(mid, ()):
            key = (out, inp)
            term = v2 * v1
            if key in result:
                result[key] = result[key] + term
            else:
                result[key] = term
    return {k: v for k, v in result.items() if v != 0}


def apply_map(m, vec):
    """Apply a sparse map to a vector {label: CycNum}."""
    out = {}
    for (z, w), coeff in m.items():
        v = vec.get(w)
        if v is None:
            continue
        term = coeff * v
        if z in out:
            out[z] = out[z] + term
        else:
            out[z] = term
    return {k: v for k, v in out.items() if v != 0}


def context_transfer(ctx_from, ctx_to):
    """Monomial change of frame between two contexts with the same
    Lagrangian: each label rewrites through the integral class
    sum c_i Ldual_i of the old frame."""
    if ctx_from.p != ctx_to.p or ctx_from.g != ctx_to.g:
        raise ValueError("contexts live on different surfaces")
    if hnf(ctx_from.L) != hnf(ctx_to.L):
        raise ValueError(
            "frames have different Lagrangians; a transfer is only "
            "monomial along a fixed Lagrangian"
        )
    out = {}
    seen = set()
    for c in ctx_from.labels():
        x = [0] * (2 * ctx_from.g)
        for coeff, row in zip(c, ctx_from.Ldual):
            for j in range(len(x)):
                x[j] += coeff * row[j]
        k, _, beta = to_finite(ctx_to, 0, tuple(x))
        out[(beta, c)] = q_power(ctx_from.p, k)
        seen.add(beta)
    assert len(seen) == len(out), "transfer must be a relabeling"
    return out


# -- the functor on simple steps ------------------------------------------


def F_cylinder(p, ctx, matrix, ctx_plus=None):
    """Map of a mapping cylinder.  In the pushed frame (the image of
    the source frame, the default) this is the identity; an explicit
    target context rewrites the labels there."""
    corr = cylinder_correspondence(matrix, ctx.L, ctx.Ldual)
    pushed = HeisContext(
        p=p, g_minus=0, g_plus=ctx.g,
        L=corr.target_L, Ldual=corr.target_Ldual,
    )
    if ctx_plus is None:
        return identity_map(pushed), pushed
    return context_transfer(pushed, ctx_plus), ctx_plus


def F_index1(p, ctx, position=None):
    """Map of an index-1 surgery: labels gain a zero component at the
    new handle slot."""
    corr = index1_correspondence(ctx.L, ctx.Ldual, position)
    out_ctx = HeisContext(
        p=p, g_minus=0, g_plus=ctx.g + 1,
        L=corr.target_L, Ldual=corr.target_Ldual,
    )
    pos = ctx.g if position is None else position
    unit = one(field_order(p))
    m = {}
    for c in ctx.labels():
        z = c[:pos] + (0,) + c[pos:]
        m[(z, c)] = unit
    return m, out_ctx


def _closed_coeff(p, alpha, beta, k):
    """Per-handle index-2 coefficient for odd p: None (zero) unless
    gcd(beta, p') divides k, else q^(-k k') with beta k' = alpha k
    modulo p'."""
    pp = p_prime(p)
    d = gcd(beta, pp)
    if k % d:
        return None
    kp = next(x for x in range(pp) if (beta * x - alpha * k) % pp == 0)
    return q_power(p, (-k * kp) % p)


def _surgery_map(p, ctx, j, alpha, beta, mode):
    """Label map of a surgery on alpha*u_j + beta*w_j where (u, w) is
    the frame of ctx; label slot j disappears."""
    if mode == "auto":
        mode = "closed" if p % 2 else "oracle"
    if mode == "oracle":
        corr = index2_correspondence(
            ctx.g, j, alpha, beta, ctx.L, ctx.Ldual
        )
        return induced_map_oracle(p, corr)
    if mode != "closed":
        raise ValueError("mode must be 'closed', 'oracle' or 'auto'")
    if p % 2 == 0:
        raise ValueError(
            "closed exponent formula is sign-ambiguous for even order; "
            "use the oracle mode"
        )
    m = {}
    for c in ctx.labels():
        coeff = _closed_coeff(p, alpha, beta, c[j])
        if coeff is None:
            continue
        m[(c[:j] + c[j + 1:], c)] = coeff
    return m


def F_index2(p, ctx, handle, alpha, beta, mode="auto"):
    """Map of an index-2 surgery on gamma = alpha u_k + beta w_k, the
    (u, w) being the frame of ctx.  The surviving frame pairs become
    the handles of the target in their own coordinates.

    mode 'closed' uses the per-handle exponent formula (odd p only),
    'oracle' the bimodule tensor; 'auto' picks closed when it is well
    defined.
    """
    if not (0 <= handle < ctx.g):
        raise ValueError("surgery handle out of range")
    if gcd(alpha, beta) != 1:
        raise ValueError("surgery class must be primitive")
    m = _surgery_map(p, ctx, handle, alpha, beta, mode)
    gp = ctx.g - 1
    out_ctx = HeisContext(
        p=p, g_minus=0, g_plus=gp,
        L=standard_lagrangian(gp), Ldual=standard_dual(gp),
    )
    return m, out_ctx


def _project_off(vec, gamma, g, slot, alpha, beta):
    """Image of a class orthogonal to gamma in the coordinates of the
    kept slots: subtract the gamma multiple sitting in the surgered
    slot, then delete that slot."""
    if alpha:
        t, r = divmod(vec[slot], alpha)
    else:
        t, r = divmod(vec[g + slot], beta)
    assert r == 0, "class is not orthogonal to the surgery curve"
    y = tuple(a - t * b for a, b in zip(vec, gamma))
    assert y[slot] == 0 and y[g + slot] == 0
    keep = [i for i in range(g) if i != slot]
    return tuple(y[i] for i in keep) + tuple(y[g + i] for i in keep)


def _program_index2(p, ctx, step: Index2, mode):
    """Program semantics of an index-2 step: the class alpha*m_k +
    beta*l_k of the designated ambient slot, computed in the carried
    frame and projected back to the surviving slots."""
    g = ctx.g
    k, alpha, beta = step.handle, step.alpha, step.beta
    gamma = tuple(
        alpha * (1 if i == k else 0) + beta * (1 if i == g + k else 0)
        for i in range(2 * g)
    )
    a = tuple(intersection(gamma, w) for w in ctx.Ldual)
    b = tuple(intersection(u, gamma) for u in ctx.L)
    support = [i for i in range(g) if a[i] or b[i]]
    if len(support) != 1:
        raise ProgramError(
            "surgery class meets %d pairs of the carried frame; only "
            "single-handle classes are supported, conjugate by a "
            "mapping cylinder first" % len(support)
        )
    j = support[0]
    m = _surgery_map(p, ctx, j, a[j], b[j], mode)
    keep = [i for i in range(g) if i != j]
    out_ctx = HeisContext(
        p=p, g_minus=0, g_plus=g - 1,
        L=tuple(
            _project_off(ctx.L[i], gamma, g, k, alpha, beta) for i in keep
        ),
        Ldual=tuple(
            _project_off(ctx.Ldual[i], gamma, g, k, alpha, beta)
            for i in keep
        ),
    )
    return m, out_ctx


def F_program(p, prog: CobordismProgram, mode="auto"):
    """Composite map of a validated program, between the canonical
    frames of its source and target objects."""
    validate(prog)
    ctx = canonical_context(p, prog.source)
    total = identity_map(ctx)
    for i, step in enumerate(prog.steps):
        if isinstance(step, MappingCylinder):
            m, ctx = F_cylinder(p, ctx, step.matrix)
        elif isinstance(step, Index1):
            m, ctx = F_index1(p, ctx, step.position)
        elif isinstance(step, Index2):
            try:
                m, ctx = _program_index2(p, ctx, step, mode)
            except ProgramError as exc:
                raise ProgramError("step %d: %s" % (i, exc)) from exc
        else:
            raise ProgramError("unknown step %r" % (step,))
        total = compose_maps(m, total)
    final = canonical_context(p, prog.target)
    if ctx.L != final.L or ctx.Ldual != final.Ldual:
        total = compose_maps(context_transfer(ctx, final), total)
    return total


# -- monoidal structure ---------------------------------------------------


def _concat_object(o1: CobObject, o2: CobObject):
    g = o1.g + o2.g
    rows = []
    for r in o1.L:
        a, b = r[: o1.g], r[o1.g:]
        rows.append(a + (0,) * o2.g + b + (0,) * o2.g)
    for r in o2.L:
        a, b = r[: o2.g], r[o2.g:]
        rows.append((0,) * o1.g + a + (0,) * o1.g + b)
    return CobObject(g=g, L=hnf(rows))


def monoidal_product(x1, x2):
    """Product of two objects, or of two maps under label
    concatenation."""
    if isinstance(x1, CobObject) and isinstance(x2, CobObject):
        return _concat_object(x1, x2)
    result = {}
    for (z1, w1), v1 in x1.items():
        for (z2, w2), v2 in x2.items():
            result[(z1 + z2, w1 + w2)] = v1 * v2
    return result


# -- the normalized (non-projective) functor ------------------------------


def _builtin_closure_factor(p, step):
    if isinstance(step, (MappingCylinder, Index1)):
        return one(field_order(p))
    if isinstance(step, Index2):
        beta, alpha = step.beta, step.alpha
        if beta < 0:
            beta, alpha = -beta, -alpha
        return z_lens(p, beta, alpha)
    raise ProgramError("unknown step %r" % (step,))


def normalized_map(p, prog: CobordismProgram, closure=None, mode="auto"):
    """Normalization Z(closed-off cobordism) * F_program.

    The closing factor is built in for programs of at most one step;
    longer programs must supply the linking matrix of a surgery
    presentation of the closed-off manifold."""
    raw = F_program(p, prog, mode)
    if closure is not None:
        factor = z_invariant(p, closure)
    elif not prog.steps:
        factor = one(field_order(p))
    elif len(prog.steps) == 1:
        factor = _builtin_closure_factor(p, prog.steps[0])
    else:
        raise ProgramError(
            "no built-in closure for a composite program; supply a "
            "surgery presentation of the closed-off manifold"
        )
    return {k: factor * v for k, v in raw.items()}


# -- program (de)serialization --------------------------------------------


def load_program(doc):
    """Build a program from a plain dict as read from a program file:
    {"source": {"g": .., "L": [..]}, "steps": [{"kind": ..}, ..],
    "target": {..}}."""
    def obj(d):
        return CobObject(g=int(d["g"]), L=tuple(tuple(r) for r in d["L"]))

    steps = []
    for i, s in enumerate(doc.get("steps", ())):
        kind = s.get("kind")
        try:
            if kind == "cylinder":
                steps.append(
                    MappingCylinder(tuple(tuple(r) for r in s["matrix"]))
                )
            elif kind == "index1":
                pos = s.get("position")
                steps.append(Index1(None if pos is None else int(pos)))
            elif kind == "index2":
                steps.append(
                    Index2(
                        int(s["handle"]),
                        int(s["gamma"][0]),
                        int(s["gamma"][1]),
                    )
                )
            else:
                raise ValueError("unknown kind %r" % (kind,))
        except (KeyError, TypeError, ValueError) as exc:
            raise ProgramError("step %d: %s" % (i, exc)) from exc
    try:
        return CobordismProgram(
            source=obj(doc["source"]),
            steps=tuple(steps),
            target=obj(doc["target"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ProgramError("bad program document: %s" % (exc,)) from exc

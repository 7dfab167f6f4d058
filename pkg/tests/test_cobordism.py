import doctest
import itertools
import random
from math import gcd

import pytest

from abtqft import cobordism
from abtqft.cyclotomic import field_order, one, q_power
from abtqft.cobordism import (
    CobObject,
    CobordismProgram,
    F_cylinder,
    F_index1,
    F_index2,
    F_program,
    Index1,
    Index2,
    MappingCylinder,
    ProgramError,
    apply_map,
    canonical_context,
    compose_maps,
    context_transfer,
    identity_map,
    load_program,
    monoidal_product,
    normalized_map,
    validate,
)
from abtqft.heisenberg import HeisContext
from abtqft.homology import (
    hnf,
    identity_matrix,
    intersection,
    mat_mul,
    symplectic_dual_basis,
)
from abtqft.surgery import z_invariant, z_lens

TORUS = CobObject(g=1, L=((1, 0),))
POINT = CobObject(g=0, L=())
TWIST = ((1, 0), (1, 1))       # m -> m, l -> l + m
SWAP_AXES = ((0, 1), (-1, 0))  # m -> l, l -> -m


def _random_symplectic(rng, g, factors=3):
    n = 2 * g
    F = identity_matrix(n)
    for _ in range(factors):
        while True:
            v = tuple(rng.randint(-2, 2) for _ in range(n))
            if any(v):
                break
        T = tuple(
            tuple(
                (1 if i == j else 0) + intersection(
                    tuple(1 if k == i else 0 for k in range(n)), v
                ) * v[j]
                for j in range(n)
            )
            for i in range(n)
        )
        F = mat_mul(F, T)
    return F


def _pushed(L, F):
    return hnf(mat_mul(L, F))


def _cylinder_program(obj, F):
    return CobordismProgram(
        obj, (MappingCylinder(F),), CobObject(obj.g, _pushed(obj.L, F))
    )


def test_object_and_step_validation():
    with pytest.raises(ValueError):
        CobObject(g=1, L=((1, 0), (0, 1)))
    with pytest.raises(ValueError):
        MappingCylinder(((1, 1), (1, 1)))
    with pytest.raises(ValueError):
        Index2(0, 2, 4)
    # hnf canonicalization on construction
    assert CobObject(g=1, L=((-1, 0),)).L == ((1, 0),)


def test_validate_empty_and_mismatch():
    prog = CobordismProgram(TORUS, (), TORUS)
    assert validate(prog) == [((1, 0),)]
    bad = CobordismProgram(TORUS, (), CobObject(1, ((0, 1),)))
    with pytest.raises(ProgramError):
        validate(bad)
    # a single cylinder moving the Lagrangian off the declared target
    bad2 = CobordismProgram(TORUS, (MappingCylinder(SWAP_AXES),), TORUS)
    with pytest.raises(ProgramError, match="step 1"):
        validate(bad2)
    wrong_size = CobordismProgram(
        TORUS, (MappingCylinder(identity_matrix(4)),), TORUS
    )
    with pytest.raises(ProgramError, match="step 0"):
        validate(wrong_size)


def test_validate_cancelling_pair_chain():
    # a new handle then surgery on its meridian returns to the start,
    # whatever the Lagrangian was
    for L in (((1, 0),), ((1, 1),), ((0, 1),)):
        obj = CobObject(1, L)
        prog = CobordismProgram(obj, (Index1(), Index2(1, 1, 0)), obj)
        chain = validate(prog)
        assert chain[0] == chain[-1] == obj.L
        assert len(chain[1]) == 2


def test_cylinder_identity_and_functoriality():
    p = 3
    ident = F_program(p, _cylinder_program(TORUS, identity_matrix(2)))
    assert ident == identity_map(canonical_context(p, TORUS))
    rng = random.Random(8)
    for _ in range(6):
        F = _random_symplectic(rng, 1)
        G = _random_symplectic(rng, 1)
        tgt = CobObject(1, _pushed(_pushed(TORUS.L, F), G))
        two = CobordismProgram(
            TORUS, (MappingCylinder(F), MappingCylinder(G)), tgt
        )
        one_ = CobordismProgram(
            TORUS, (MappingCylinder(mat_mul(F, G)),), tgt
        )
        assert F_program(p, two) == F_program(p, one_)


def test_cylinder_twist_fixed_dual():
    # twist along the meridian with the longitude complement held
    # fixed: b_k picks up q^(k^2)
    for p in (3, 5):
        ctx = canonical_context(p, TORUS)
        m, out = F_cylinder(p, ctx, TWIST, ctx_plus=ctx)
        assert out == ctx
        assert m == {
            ((k,), (k,)): q_power(p, k * k) for k in range(ctx.p_prime)
        }


def test_cylinder_relabeling():
    # m -> l, l -> -m carries <m> to <l> and just relabels the basis
    p = 5
    ctx = canonical_context(p, TORUS)
    target = canonical_context(p, CobObject(1, ((0, 1),)))
    m, out = F_cylinder(p, ctx, SWAP_AXES, ctx_plus=target)
    unit = one(field_order(p))
    assert out == target
    assert set(m.values()) == {unit}
    assert sorted(z for z, _ in m) == sorted(w for _, w in m)


def test_cylinder_lagrangian_violation():
    p = 3
    ctx = canonical_context(p, TORUS)
    with pytest.raises(ValueError, match="Lagrangian"):
        F_cylinder(p, ctx, TWIST, ctx_plus=canonical_context(
            p, CobObject(1, ((0, 1),))
        ))


def test_context_transfer_roundtrip():
    p = 5
    ctx = canonical_context(p, TORUS)
    pushed = HeisContext(
        p=p, g_minus=0, g_plus=1, L=((1, 0),), Ldual=((1, 1),)
    )
    there = context_transfer(ctx, pushed)
    back = context_transfer(pushed, ctx)
    assert compose_maps(back, there) == identity_map(ctx)
    with pytest.raises(ValueError):
        context_transfer(ctx, canonical_context(p, CobObject(1, ((0, 1),))))


def test_index1_inclusion():
    p = 3
    scalar = canonical_context(p, POINT)
    m, out = F_index1(p, scalar)
    assert m == {((0,), ()): one(field_order(p))}
    assert out.g == 1
    ctx = canonical_context(p, TORUS)
    m_app, _ = F_index1(p, ctx)
    assert m_app == {
        ((k, 0), (k,)): one(field_order(p)) for k in range(3)
    }
    m_front, _ = F_index1(p, ctx, position=0)
    assert m_front == {
        ((0, k), (k,)): one(field_order(p)) for k in range(3)
    }


def test_index2_meridian_and_longitude():
    # surgery on the meridian keeps only the zero label; surgery on the
    # longitude evaluates every label to 1
    for p in (3, 5):
        ctx = canonical_context(p, TORUS)
        mer, out = F_index2(p, ctx, 0, 1, 0)
        assert out.g == 0
        assert mer == {((), (0,)): one(field_order(p))}
        lon, _ = F_index2(p, ctx, 0, 0, 1)
        assert lon == {
            ((), (k,)): one(field_order(p)) for k in range(ctx.p_prime)
        }


def test_index2_frozen_exponents():
    # gamma = m + 2l at p = 5: coefficient q^(-k k') with 2k' = k
    p = 5
    ctx = canonical_context(p, TORUS)
    m, _ = F_index2(p, ctx, 0, 1, 2, mode="closed")
    table = {0: 0, 1: 2, 2: 3, 3: 3, 4: 2}
    assert m == {
        ((), (k,)): q_power(p, e) for k, e in table.items()
    }
    # d = gcd(beta, p') vanishing pattern: beta = 3 at p' = 3 kills
    # every label except multiples of 3
    m3, _ = F_index2(3, canonical_context(3, TORUS), 0, 1, 3, mode="closed")
    assert set(w for _, w in m3) == {(0,)}


def test_index2_closed_equals_oracle_small():
    for p in (3, 5):
        ctx = canonical_context(p, TORUS)
        for al, be in itertools.product(range(-3, 4), repeat=2):
            if gcd(al, be) != 1:
                continue
            mc, _ = F_index2(p, ctx, 0, al, be, mode="closed")
            mo, _ = F_index2(p, ctx, 0, al, be, mode="oracle")
            assert mc == mo, (p, al, be)


def test_index2_closed_equals_oracle_nonstandard_frame():
    p = 3
    L = hnf(((1, 0, 0, 1), (0, 1, 1, 0)))
    U, W = symplectic_dual_basis(L, 2)
    ctx = HeisContext(p=p, g_minus=0, g_plus=2, L=U, Ldual=W)
    for handle in (0, 1):
        for al, be in itertools.product(range(-2, 3), repeat=2):
            if gcd(al, be) != 1:
                continue
            mc, _ = F_index2(p, ctx, handle, al, be, mode="closed")
            mo, _ = F_index2(p, ctx, handle, al, be, mode="oracle")
            assert mc == mo, (handle, al, be)


def test_index2_even_order_modes():
    p = 8
    ctx = canonical_context(p, TORUS)
    with pytest.raises(ValueError, match="oracle"):
        F_index2(p, ctx, 0, 1, 2, mode="closed")
    auto, _ = F_index2(p, ctx, 0, 1, 2, mode="auto")
    oracle, _ = F_index2(p, ctx, 0, 1, 2, mode="oracle")
    assert auto == oracle


def test_orientation_reversal_of_surgery_class():
    # the framed sphere with its orientation reversed is the same
    # surgery: gamma and -gamma induce the same map
    ctx5 = canonical_context(5, TORUS)
    ctx8 = canonical_context(8, TORUS)
    for al, be in ((1, 0), (0, 1), (1, 2), (2, 3), (3, -2)):
        for ctx, mode in ((ctx5, "closed"), (ctx5, "oracle"), (ctx8, "oracle")):
            plus, _ = F_index2(ctx.p, ctx, 0, al, be, mode=mode)
            minus, _ = F_index2(ctx.p, ctx, 0, -al, -be, mode=mode)
            assert plus == minus


def test_program_empty_is_identity():
    for p in (3, 5):
        obj = CobObject(1, ((1, 1),))
        prog = CobordismProgram(obj, (), obj)
        assert F_program(p, prog) == identity_map(canonical_context(p, obj))


def test_program_cancellation_is_identity():
    # index-1 then index-2 crossing the new belt sphere once is the
    # cylinder of the induced diffeomorphism, here isotopic to the
    # identity; framing alpha and slot position do not matter
    p = 3
    for L in (((1, 0),), ((1, 1),)):
        obj = CobObject(1, L)
        for pos, handle in ((None, 1), (0, 0)):
            for alpha in (0, 1, -2):
                steps = (
                    Index1(pos),
                    Index2(handle, alpha, 1),
                )
                prog = CobordismProgram(obj, steps, obj)
                assert F_program(p, prog) == identity_map(
                    canonical_context(p, obj)
                ), (L, pos, alpha)
    genus2 = CobObject(2, ((1, 0, 0, 0), (0, 1, 0, 0)))
    prog2 = CobordismProgram(genus2, (Index1(1), Index2(1, 0, 1)), genus2)
    assert F_program(p, prog2) == identity_map(canonical_context(p, genus2))


def test_program_conjugated_surgery():
    # pushing the surgery sphere through a diffeomorphism first gives
    # the same composite map
    p = 3
    tgt = POINT
    # genus 1: twist then surger the image of the longitude
    A = CobordismProgram(
        TORUS, (MappingCylinder(TWIST), Index2(0, 1, 1)), tgt
    )
    B = CobordismProgram(TORUS, (Index2(0, 0, 1),), tgt)
    assert F_program(p, A) == F_program(p, B)
    # genus 2: swap the handles then surger the other meridian
    swap = ((0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0))
    genus2 = CobObject(2, ((1, 0, 0, 0), (0, 1, 0, 0)))
    torus_tgt = CobObject(1, ((1, 0),))
    A2 = CobordismProgram(
        genus2, (MappingCylinder(swap), Index2(1, 1, 0)), torus_tgt
    )
    B2 = CobordismProgram(genus2, (Index2(0, 1, 0),), torus_tgt)
    assert F_program(p, A2) == F_program(p, B2)


def test_program_disjoint_surgeries_commute():
    p = 3
    genus2 = CobObject(2, ((1, 0, 0, 0), (0, 1, 0, 0)))
    A = CobordismProgram(genus2, (Index2(0, 1, 2), Index2(0, 2, 3)), POINT)
    B = CobordismProgram(genus2, (Index2(1, 2, 3), Index2(0, 1, 2)), POINT)
    assert F_program(p, A) == F_program(p, B)
    # an index-1 handle insertion and a surgery on the old handle
    P1 = CobordismProgram(TORUS, (Index1(0), Index2(1, 1, 2)), TORUS)
    P2 = CobordismProgram(TORUS, (Index2(0, 1, 2), Index1(0)), TORUS)
    assert F_program(p, P1) == F_program(p, P2)


def test_program_random_cylinder_inverse():
    p = 5
    rng = random.Random(23)
    for _ in range(5):
        F = _random_symplectic(rng, 1)
        Finv = _symplectic_inverse(F)
        tgt = CobObject(1, _pushed(TORUS.L, F))
        prog = CobordismProgram(
            TORUS, (MappingCylinder(F), MappingCylinder(Finv)), TORUS
        )
        assert F_program(p, prog) == identity_map(canonical_context(p, TORUS))


def _symplectic_inverse(F):
    n = len(F)
    g = n // 2
    J = tuple(
        tuple(
            (1 if j == g + i else 0) - (1 if i >= g and j == i - g else 0)
            for j in range(n)
        )
        for i in range(n)
    )
    Jinv = tuple(tuple(-v for v in row) for row in J)
    return mat_mul(mat_mul(J, tuple(zip(*F))), Jinv)


def test_program_against_oracle_start_vector():
    # every map sends the start vector consistently with the tensor
    # construction: the column of b_0 agrees between modes
    p = 5
    ctx = canonical_context(p, TORUS)
    for al, be in ((1, 1), (2, 1), (1, 3)):
        closed, _ = F_index2(p, ctx, 0, al, be, mode="closed")
        oracle, _ = F_index2(p, ctx, 0, al, be, mode="oracle")
        col = {z: v for (z, w), v in closed.items() if w == (0,)}
        col_o = {z: v for (z, w), v in oracle.items() if w == (0,)}
        assert col == col_o and col


def test_monoidal_product():
    p = 3
    prod = monoidal_product(TORUS, TORUS)
    assert prod == CobObject(2, ((1, 0, 0, 0), (0, 1, 0, 0)))
    mixed = monoidal_product(CobObject(1, ((1, 1),)), TORUS)
    assert mixed.g == 2 and len(mixed.L) == 2
    # dimension count on the product of canonical contexts
    assert len(canonical_context(p, prod).labels()) == 3 ** 2

    f1 = F_program(p, _cylinder_program(TORUS, TWIST))
    q2 = CobordismProgram(TORUS, (Index2(0, 0, 1),), POINT)
    f2 = F_program(p, q2)
    embedded_twist = (
        (1, 0, 0, 0), (0, 1, 0, 0), (1, 0, 1, 0), (0, 0, 0, 1),
    )
    prod_prog = CobordismProgram(
        prod,
        (MappingCylinder(embedded_twist), Index2(1, 0, 1)),
        CobObject(1, _pushed(TORUS.L, TWIST)),
    )
    assert F_program(p, prod_prog) == monoidal_product(f1, f2)
    # id on one factor: id (x) F(C)
    ident = identity_map(canonical_context(p, TORUS))
    prod_id = CobordismProgram(prod, (Index2(1, 0, 1),), TORUS)
    assert F_program(p, prod_id) == monoidal_product(ident, f2)


def test_normalized_map_builtins():
    p = 5
    cyl = _cylinder_program(TORUS, TWIST)
    assert normalized_map(p, cyl) == F_program(p, cyl)
    grow = CobordismProgram(
        TORUS, (Index1(),), CobObject(2, ((1, 0, 0, 0), (0, 1, 0, 0)))
    )
    assert normalized_map(p, grow) == F_program(p, grow)
    # surgery on the meridian closes off to S^2 x S^1, factor 1
    mer = CobordismProgram(TORUS, (Index2(0, 1, 0),), POINT)
    assert normalized_map(p, mer) == F_program(p, mer)
    # gamma = alpha m + beta l closes off to the lens space L(beta, alpha)
    lens = CobordismProgram(TORUS, (Index2(0, 1, 2),), POINT)
    factor = z_lens(p, 2, 1)
    raw = F_program(p, lens)
    assert normalized_map(p, lens) == {k: factor * v for k, v in raw.items()}
    # an explicit closure presentation gives the same factor
    assert normalized_map(p, lens, closure=((2,),)) == normalized_map(p, lens)
    assert z_invariant(p, ((2,),)) == factor
    composite = CobordismProgram(TORUS, (Index1(), Index2(1, 1, 0)), TORUS)
    with pytest.raises(ProgramError, match="closure"):
        normalized_map(p, composite)


def test_spread_surgery_class_is_rejected():
    # a class meeting two frame pairs needs a conjugating cylinder and
    # is refused rather than guessed
    p = 3
    mix = ((1, 0, 0, 1), (0, 1, 1, 0), (0, 0, 1, 0), (0, 0, 0, 1))
    src = CobObject(2, ((1, 0, 0, 0), (0, 1, 0, 0)))
    prog = CobordismProgram(
        src, (MappingCylinder(mix), Index2(0, 1, 0)), CobObject(1, ((0, 1),))
    )
    validate(prog)
    with pytest.raises(ProgramError, match="conjugate"):
        F_program(p, prog)


def test_apply_and_compose_maps():
    p = 3
    ctx = canonical_context(p, TORUS)
    m, _ = F_cylinder(p, ctx, TWIST, ctx_plus=ctx)
    vec = {(1,): one(field_order(p)), (2,): q_power(p, 1)}
    out = apply_map(m, vec)
    assert out == {
        (1,): q_power(p, 1), (2,): q_power(p, 1 + 4)
    }
    assert compose_maps(identity_map(ctx), m) == m


def test_load_program():
    doc = {
        "source": {"g": 1, "L": [[1, 0]]},
        "steps": [
            {"kind": "index1", "position": 0},
            {"kind": "index2", "handle": 0, "gamma": [1, 0]},
        ],
        "target": {"g": 1, "L": [[1, 0]]},
    }
    prog = load_program(doc)
    assert prog.steps == (Index1(0), Index2(0, 1, 0))
    assert validate(prog)[-1] == ((1, 0),)
    with pytest.raises(ProgramError, match="step 0"):
        load_program({
            "source": {"g": 0, "L": []},
            "steps": [{"kind": "index3"}],
            "target": {"g": 0, "L": []},
        })
    with pytest.raises(ProgramError):
        load_program({"steps": []})
    with pytest.raises(ProgramError, match="step 0"):
        load_program({
            "source": {"g": 0, "L": []},
            "steps": [{"kind": "index2", "handle": 0, "gamma": [2, 4]}],
            "target": {"g": 0, "L": []},
        })


def test_doctests():
    assert doctest.testmod(cobordism).failed == 0

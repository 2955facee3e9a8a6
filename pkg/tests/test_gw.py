import pytest

from gwsym.gw import (
    BasisMismatchError,
    GWError,
    gw_group,
    induced_map,
    match_basis,
    multiply,
    pfister1,
    pfister2,
    preferred_basis,
    quotient_by_elements,
    structure_table,
    symmetrisation_element,
    tower_check,
    witt_group,
)
from gwsym.rings import parse_ring_spec
from gwsym.snf import mat_vec


def spec_of(text):
    return parse_ring_spec(text)


# -- group computations -------------------------------------------------------


@pytest.mark.parametrize(
    "text,gw_sig,witt_sig",
    [
        ("z2k:1", (1, ()), (0, (2,))),
        ("z2k:2", (1, (4,)), (0, (8,))),
        ("z2k:3", (1, (4, 2)), (0, (8, 2))),
        ("z2k:4", (1, (4, 2)), (0, (8, 2))),
        ("trunc2:1", (1, ()), (0, (2,))),
        ("trunc2:2", (1, (2,)), (0, (2, 2))),
        ("trunc2:3", (1, (2,)), (0, (2, 2))),
        ("trunc2:4", (1, (2, 2)), (0, (2, 2, 2))),
        ("trunc2:5", (1, (2, 2)), (0, (2, 2, 2))),
    ],
)
def test_group_signatures(text, gw_sig, witt_sig):
    spec = spec_of(text)
    assert gw_group(spec).signature() == gw_sig
    assert witt_group(spec).signature() == witt_sig


def test_format_group():
    assert gw_group(spec_of("z2k:3")).format_group() == "Z ⊕ Z/4 ⊕ Z/2"
    assert witt_group(spec_of("z2k:2")).format_group() == "Z/8"


def test_unit_orientation_and_generator_coords():
    g = gw_group(spec_of("z2k:2"))
    assert g.generator_coords[0] == (1, 0)
    # <3> = <1> - <<3>>, and <<3>> has order exactly 4
    c3 = g.classes.class_of[3]
    x = pfister1(g, c3)
    assert not (2 * x).is_zero and not x.is_zero
    assert (4 * x).is_zero


def test_generator_coords_invariants():
    for text in ("z2k:3", "trunc2:4"):
        g = gw_group(spec_of(text))
        for j, coords in g.generator_coords.items():
            for i, d in enumerate(g.torsion):
                assert 0 <= coords[g.free_rank + i] < d
            assert g.generator(j).rank() == 1


def test_push_lift_roundtrip():
    for text in ("z2k:3", "trunc2:4"):
        g = gw_group(spec_of(text))
        for e in g.basis_elements():
            assert g.push(g.lift(e.coords)) == e.coords


def test_element_arithmetic_and_errors():
    g = gw_group(spec_of("z2k:3"))
    h = gw_group(spec_of("z2k:4"))
    a = g.generator(0)
    assert (a - a).is_zero
    assert (a + a) == 2 * a
    with pytest.raises(GWError):
        a + h.generator(0)
    with pytest.raises(GWError):
        g.element((1, 2))  # wrong length


# -- ring structure ------------------------------------------------------------


def test_ring_structure_z4():
    g = preferred_basis(gw_group(spec_of("z2k:2")))
    assert g.basis_labels == ("<1>", "<<3>>")
    one, x = g.basis_elements()
    assert multiply(one, x) == x
    assert multiply(x, x) == 2 * x  # x^2 = 2x
    assert (4 * x).is_zero  # 4x = 0


def test_ring_structure_z8():
    g = preferred_basis(gw_group(spec_of("z2k:3")))
    assert g.basis_labels == ("<1>", "<<3>>", "<<5>>")
    one, x, y = g.basis_elements()
    assert multiply(one, one) == one
    assert multiply(x, x) == 2 * x
    assert multiply(y, y).is_zero
    assert multiply(x, y).is_zero
    assert (4 * x).is_zero and (2 * y).is_zero


def test_structure_table_unit_row():
    g = preferred_basis(gw_group(spec_of("z2k:3")))
    table = structure_table(g)
    basis = g.basis_elements()
    for j, b in enumerate(basis):
        assert table[(0, j)] == b  # <1> is the unit
        for i in range(len(basis)):
            assert table[(i, j)] == table[(j, i)]


def test_multiplication_well_defined_on_lifts():
    # perturbing a lift by a relation vector must not change products
    g = gw_group(spec_of("z2k:3"))
    rel = list(g._lattice_rows[0])
    x = g.generator(g.classes.class_of[3])
    y = g.generator(g.classes.class_of[5])
    lift = g.lift(x.coords)
    shifted = [a + b for a, b in zip(lift, rel)]
    mul_table = g.classes.mul
    c = g.classes.num_classes
    z = [0] * c
    ylift = g.lift(y.coords)
    for i in range(c):
        for j in range(c):
            z[mul_table[i][j]] += shifted[i] * ylift[j]
    assert g.push(z) == multiply(x, y).coords


def test_pfister_examples():
    # 2-fold Pfister forms vanish on trunc2 but not universally
    g6 = gw_group(spec_of("trunc2:6"))
    cls = g6.classes
    i = cls.class_of[0b000011]  # 1 + x
    j = cls.class_of[0b001001]  # 1 + x^3
    assert pfister2(g6, i, j).is_zero
    g4 = gw_group(spec_of("z2k:2"))
    c3 = g4.classes.class_of[3]
    assert pfister2(g4, c3, c3) == 2 * pfister1(g4, c3)
    assert not pfister2(g4, c3, c3).is_zero


def test_rank():
    g = gw_group(spec_of("trunc2:4"))
    for j in range(g.classes.num_classes):
        assert g.generator(j).rank() == 1
        assert pfister1(g, j).rank() == 0
    with pytest.raises(GWError):
        witt_group(spec_of("z2k:2")).generator(0).rank()


def test_rank_zero_products_vanish_trunc2():
    # square-zero multiplication on the rank-0 part
    for text in ("trunc2:2", "trunc2:4", "trunc2:6"):
        g = gw_group(spec_of(text))
        k = g.classes.num_classes
        for i in range(k):
            for j in range(k):
                assert pfister2(g, i, j).is_zero


def test_remark_hyperbolic_classes():
    # <a> + <-a> = <1> + <-1> in GW coordinates, for every class a
    for text in ("z2k:3", "z2k:4", "trunc2:4", "trunc2:5"):
        spec = spec_of(text)
        g = gw_group(spec)
        cls = g.classes
        base = g.generator(0) + g.generator(cls.class_of[spec.neg(1)])
        for a in spec.unit_codes():
            lhs = g.generator(cls.class_of[a]) + g.generator(cls.class_of[spec.neg(a)])
            assert lhs == base


# -- chosen bases --------------------------------------------------------------


def test_match_basis_rejects_wrong_order():
    g = preferred_basis(gw_group(spec_of("z2k:3")))
    one, x, y = g.basis_elements()
    with pytest.raises(BasisMismatchError):
        match_basis(g, [one, y, x])  # <<5>> has order 2, not 4
    with pytest.raises(BasisMismatchError):
        match_basis(g, [one, x, x])  # not generating


def test_preferred_basis_witt():
    w4 = preferred_basis(witt_group(spec_of("z2k:2")))
    assert w4.basis_labels == ("<1>",)
    assert w4.generator_coords[0] == (1,)
    w8 = preferred_basis(witt_group(spec_of("z2k:3")))
    assert w8.basis_labels == ("<1>", "<<5>>")
    # <3> = -<5> = -<1> + <<5>> in W(Z/8)
    c3 = w8.classes.class_of[3]
    c5 = w8.classes.class_of[5]
    assert w8.generator(c3) == -w8.generator(c5)


def test_preferred_basis_trunc2():
    g = preferred_basis(gw_group(spec_of("trunc2:5")))
    assert g.basis_labels == ("<1>", "<<11000>>", "<<10010>>")  # 1+x, 1+x^3
    for a, e in enumerate(g.basis_elements()):
        assert e.coords == tuple(1 if i == a else 0 for i in range(g.dim))


def test_symmetrisation_element_and_quotients():
    w = witt_group(spec_of("z2k:2"))
    sigma = symmetrisation_element(w)
    assert sigma == 4 * w.generator(0)  # 3<1> - <3> = 4<1> in W(Z/4)
    assert quotient_by_elements(w, [sigma]).signature() == (0, (4,))

    w8 = witt_group(spec_of("z2k:3"))
    q8 = quotient_by_elements(w8, [symmetrisation_element(w8)])
    assert q8.signature() == (0, (8,))
    w16 = witt_group(spec_of("z2k:4"))
    q16 = quotient_by_elements(w16, [symmetrisation_element(w16)])
    assert q16.signature() == (0, (8,))


def test_symmetrisation_coordinates_in_witt_z8():
    # 3<1> - <3> = 4<1> - <<5>> corresponds to (4, 1)
    w = preferred_basis(witt_group(spec_of("z2k:3")))
    assert symmetrisation_element(w).coords == (4, 1)


def test_quotient_by_nothing_is_identity():
    g = gw_group(spec_of("z2k:3"))
    assert quotient_by_elements(g, []).signature() == g.signature()


# -- induced maps and towers ---------------------------------------------------


def test_induced_map_z16_to_z8_iso():
    rep = induced_map(spec_of("z2k:4"), spec_of("z2k:3"))
    assert rep.is_isomorphism
    assert rep.kernel.matches_generators
    # the matrix carries generator coords to generator coords bijectively
    src, tgt = rep.source, rep.target
    assert sorted(src.generator_coords.values()) == sorted(tgt.generator_coords.values())


def test_induced_map_z8_to_z4_kernel():
    rep = induced_map(spec_of("z2k:3"), spec_of("z2k:2"))
    assert not rep.is_isomorphism
    assert rep.kernel.invariants == (2,)
    assert rep.kernel.free_rank == 0
    assert rep.kernel.matches_generators


def test_induced_map_trunc2_kernel_generated_by_pfister():
    rep = induced_map(spec_of("trunc2:4"), spec_of("trunc2:3"))
    assert rep.kernel.invariants == (2,)
    assert rep.kernel.matches_generators
    # the kernel element is <<1+x^3>>
    src = rep.source
    elt = pfister1(src, src.classes.class_of[0b1001])
    img = rep.target.reduce(mat_vec([list(r) for r in rep.matrix], list(elt.coords)))
    assert not elt.is_zero
    assert not any(img)


def test_induced_map_trunc2_3_to_2_iso():
    assert induced_map(spec_of("trunc2:3"), spec_of("trunc2:2")).is_isomorphism


def test_induced_map_rejects_incompatible():
    with pytest.raises(Exception):
        induced_map(spec_of("z2k:2"), spec_of("z2k:3"))


def test_tower_z2k():
    steps = tower_check("z2k", 2, 6)
    assert [s.is_isomorphism for s in steps] == [False, True, True, True]
    assert steps[0].kernel_invariants == (2,)
    assert all(s.kernel_matches_generators for s in steps)


def test_tower_trunc2_parity():
    steps = tower_check("trunc2", 2, 7)
    for s in steps:
        assert s.is_isomorphism == (s.target_n % 2 == 0)
        if not s.is_isomorphism:
            assert s.kernel_invariants == (2,)
        assert s.kernel_matches_generators


def test_tower_empty_range_rejected():
    with pytest.raises(ValueError):
        tower_check("z2k", 5, 5)

import pytest

from gwsym.rings import SpecMismatchError, parse_ring_spec
from gwsym.square_classes import (
    class_projection,
    compute_square_classes,
    f2_basis,
    projection_kernel_classes,
    same_square_class,
)


@pytest.mark.parametrize(
    "text,count,reps",
    [
        ("z2k:2", 2, (1, 3)),
        ("z2k:3", 4, (1, 3, 5, 7)),
        ("z2k:4", 4, (1, 3, 5, 7)),
        ("trunc2:4", 4, None),
    ],
)
def test_class_counts_and_reps(text, count, reps):
    group = compute_square_classes(parse_ring_spec(text))
    assert group.num_classes == count
    if reps is not None:
        assert group.reps == reps


def test_z2k_count_sequence():
    got = [compute_square_classes(parse_ring_spec(f"z2k:{n}")).num_classes for n in range(1, 6)]
    assert got == [1, 2, 4, 4, 4]


def test_trunc2_count_sequence():
    got = [
        compute_square_classes(parse_ring_spec(f"trunc2:{n}")).num_classes
        for n in range(1, 8)
    ]
    assert got == [1, 2, 2, 4, 4, 8, 8]  # 2^(k+1) with k maximal, 2k+2 <= n


@pytest.mark.parametrize("text", ["z2k:2", "z2k:3", "z2k:4", "trunc2:2", "trunc2:5", "trunc2:6"])
def test_group_invariants(text):
    spec = parse_ring_spec(text)
    group = compute_square_classes(spec)
    squares = {spec.mul(u, u) for u in spec.unit_codes()}
    assert group.num_classes == (spec.size // 2) // len(squares)
    assert group.reps[0] == 1 and group.class_of[1] == 0
    for u in spec.unit_codes():
        for v in spec.unit_codes():
            assert group.class_of[spec.mul(u, v)] == group.mul[group.class_of[u]][group.class_of[v]]
        # u and its representative differ by a square
        assert group.class_of[spec.mul(u, u)] == 0
        rep = group.reps[group.class_of[u]]
        assert spec.mul(u, spec.inv(rep)) in squares
    for i in range(group.num_classes):
        assert group.mul[i][i] == 0


def test_reps_are_class_minima():
    for text in ["z2k:4", "trunc2:5"]:
        spec = parse_ring_spec(text)
        group = compute_square_classes(spec)
        for i, rep in enumerate(group.reps):
            members = [u for u in spec.unit_codes() if group.class_of[u] == i]
            assert rep == min(members)


def test_f2_basis_trunc2_canonical():
    spec = parse_ring_spec("trunc2:6")
    group = compute_square_classes(spec)
    basis = f2_basis(group)
    codes = [group.reps[i] for i in basis]
    # classes of 1+x, 1+x^3, 1+x^5
    assert codes == [
        group.reps[group.class_of[0b000011]],
        group.reps[group.class_of[0b001001]],
        group.reps[group.class_of[0b100001]],
    ]


def test_f2_basis_trivial_ring():
    group = compute_square_classes(parse_ring_spec("trunc2:1"))
    assert f2_basis(group) == ()


def test_f2_basis_z8():
    spec = parse_ring_spec("z2k:3")
    group = compute_square_classes(spec)
    basis = f2_basis(group)
    assert len(basis) == 2
    i, j = basis
    # independence plus [3]*[5] = [7]
    assert group.mul[i][j] not in (0, i, j)
    assert {group.reps[i], group.reps[j]} <= {3, 5, 7}


@pytest.mark.parametrize("text", ["z2k:5", "trunc2:7"])
def test_f2_basis_spans(text):
    group = compute_square_classes(parse_ring_spec(text))
    basis = f2_basis(group)
    span = {0}
    for b in basis:
        span |= {group.mul[s][b] for s in span}
    assert len(span) == group.num_classes


def test_class_projection_z16_to_z8_bijective():
    src = compute_square_classes(parse_ring_spec("z2k:4"))
    tgt = compute_square_classes(parse_ring_spec("z2k:3"))
    mapping = class_projection(src, tgt)
    assert sorted(mapping) == list(range(4))  # bijection on the 4 classes


def test_class_projection_trunc2_kernels():
    t4 = compute_square_classes(parse_ring_spec("trunc2:4"))
    t3 = compute_square_classes(parse_ring_spec("trunc2:3"))
    t2 = compute_square_classes(parse_ring_spec("trunc2:2"))
    kernel = projection_kernel_classes(t4, t3)
    # kernel = {[1], [1+x^3]}
    spec4 = t4.spec
    assert set(kernel) == {0, t4.class_of[0b1001]}
    assert len(projection_kernel_classes(t3, t2)) == 1  # bijection for even target


def test_class_projection_rejects_incompatible():
    a = compute_square_classes(parse_ring_spec("z2k:3"))
    b = compute_square_classes(parse_ring_spec("trunc2:3"))
    with pytest.raises(SpecMismatchError):
        class_projection(a, b)
    with pytest.raises(SpecMismatchError):
        class_projection(
            compute_square_classes(parse_ring_spec("z2k:2")),
            compute_square_classes(parse_ring_spec("z2k:3")),
        )


@pytest.mark.parametrize("n", range(1, 8))
def test_trunc2_projection_kernel_size_by_parity(n):
    # kernel of classes(x^(n+1)) -> classes(x^n) has order 2 iff n is odd
    src = compute_square_classes(parse_ring_spec(f"trunc2:{n + 1}"))
    tgt = compute_square_classes(parse_ring_spec(f"trunc2:{n}"))
    kernel = projection_kernel_classes(src, tgt)
    assert len(kernel) == (2 if n % 2 == 1 else 1)


def test_same_square_class():
    spec = parse_ring_spec("z2k:4")
    assert same_square_class(spec, 1, 9)  # 9 = 3^2
    assert not same_square_class(spec, 1, 3)

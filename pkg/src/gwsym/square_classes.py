"""The group of square classes R^x / R^{x2} of a finite local ring.

For the rings in scope this is an elementary abelian 2-group.  Squares are
found by exhaustively squaring every unit; each class is represented by
its smallest canonical code, and the class of 1 is always index 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .rings import RingElement, RingSpec, SpecMismatchError, TRUNC2


@dataclass(frozen=True)
class SquareClassGroup:
    """Square classes of ``spec`` with a total unit -> class table.

    ``reps`` are the minimal unit codes per class in ascending order, so
    ``reps[0] == 1``.  ``class_of`` is indexed by canonical code and holds
    -1 on non-units.  ``mul`` is the k x k class multiplication table.
    """

    spec: RingSpec
    reps: tuple[int, ...]
    class_of: tuple[int, ...]
    mul: tuple[tuple[int, ...], ...]

    @property
    def num_classes(self) -> int:
        return len(self.reps)

    def class_of_unit(self, code: int) -> int:
        idx = self.class_of[code]
        if idx < 0:
            raise ValueError(
                f"{self.spec.format_element(code)} is not a unit of {self.spec}"
            )
        return idx

    def class_mul(self, i: int, j: int) -> int:
        return self.mul[i][j]

    def rep_element(self, i: int) -> RingElement:
        return RingElement(self.spec, self.reps[i])

    def rep_elements(self) -> list[RingElement]:
        return [RingElement(self.spec, c) for c in self.reps]


@lru_cache(maxsize=None)
def compute_square_classes(spec: RingSpec) -> SquareClassGroup:
    """Exhaustive computation of R^x / R^{x2} for the given ring."""
    units = list(spec.unit_codes())
    squares = sorted({spec.mul(u, u) for u in units})
    class_of = [-1] * spec.size
    reps: list[int] = []
    for u in units:  # ascending, so each class is labeled from its minimum
        if class_of[u] >= 0:
            continue
        idx = len(reps)
        reps.append(u)
        for s in squares:
            class_of[spec.mul(u, s)] = idx
    assert len(units) == len(reps) * len(squares)
    assert reps[0] == 1 and class_of[1] == 0

    k = len(reps)
    mul = tuple(
        tuple(class_of[spec.mul(reps[i], reps[j])] for j in range(k)) for i in range(k)
    )
    for i in range(k):
        assert mul[i][i] == 0, "square classes must be 2-torsion"
        assert mul[0][i] == i
    return SquareClassGroup(spec, tuple(reps), tuple(class_of), mul)


def same_square_class(spec: RingSpec, a: int, b: int) -> bool:
    group = compute_square_classes(spec)
    return group.class_of_unit(a) == group.class_of_unit(b)


def _span(mul, gens) -> set[int]:
    span = {0}
    frontier = list(gens)
    while frontier:
        g = frontier.pop()
        new = {mul[s][g] for s in span} - span
        span |= new
        frontier.extend(new)
    return span


def f2_basis(group: SquareClassGroup) -> tuple[int, ...]:
    """A basis of the square classes as an F2-vector space.

    For trunc2 rings this is the family of classes of 1 + x^(2l+1) with
    2l+2 <= n, verified to be independent and spanning; other rings get a
    greedy basis in ascending class order.
    """
    spec = group.spec
    if spec.family == TRUNC2:
        candidate = []
        ell = 0
        while 2 * ell + 2 <= spec.n:
            code = 1 | (1 << (2 * ell + 1))
            candidate.append(group.class_of_unit(code))
            ell += 1
        span = _span(group.mul, candidate)
        assert len(span) == group.num_classes, "1 + x^(2l+1) classes must span"
        assert (1 << len(candidate)) == group.num_classes, (
            "1 + x^(2l+1) classes must be independent"
        )
        return tuple(candidate)

    basis: list[int] = []
    span = {0}
    for cls in range(group.num_classes):
        if cls not in span:
            basis.append(cls)
            span = _span(group.mul, basis)
        if len(span) == group.num_classes:
            break
    assert (1 << len(basis)) == group.num_classes
    return tuple(basis)


def class_projection(
    source: SquareClassGroup, target: SquareClassGroup
) -> tuple[int, ...]:
    """The map on square classes induced by the canonical quotient map.

    Requires same family and source parameter >= target parameter; the
    result maps source class index -> target class index, commutes with
    class_of on every unit, and is surjective.
    """
    src, tgt = source.spec, target.spec
    if src.family != tgt.family or src.n < tgt.n:
        raise SpecMismatchError(f"no canonical projection {src} -> {tgt}")
    mapping = tuple(
        target.class_of[src.project_code(tgt, rep)] for rep in source.reps
    )
    for u in src.unit_codes():
        assert mapping[source.class_of[u]] == target.class_of[src.project_code(tgt, u)]
    assert set(mapping) == set(range(target.num_classes)), "projection must be onto"
    return mapping


def projection_kernel_classes(
    source: SquareClassGroup, target: SquareClassGroup
) -> tuple[int, ...]:
    """Source classes that map to the trivial class of the target."""
    mapping = class_projection(source, target)
    return tuple(i for i, img in enumerate(mapping) if img == 0)

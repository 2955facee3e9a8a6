"""Group and ring structure of the symmetric Grothendieck-Witt and Witt
groups, computed from the square-class presentation.

The relation lattice L inside Z[square classes] is reduced by Smith normal
form; the quotient is reported as free rank plus invariant factors (largest
first), with coordinates for every square-class generator.  Coordinates are
laid out free part first, then torsion in the order of the reported
invariant factors.  Whenever <1> spans a free complement the basis is
re-oriented so that <1> = (1, 0, ..., 0); the usual presentation by <1>
and Pfister elements <<a>> = <1> - <a> is available through
``preferred_basis``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .relations import (
    DEFAULT_TUPLE_CAP,
    Presentation,
    build_presentation,
    hyperbolic_vector,
)
from .rings import RingError, RingSpec, SpecMismatchError, Z2K
from .snf import (
    hnf_rows,
    identity_matrix,
    kernel_basis,
    mat_mul,
    smith_normal_form,
    solve_integer,
    unimodular_inverse,
)
from .square_classes import (
    SquareClassGroup,
    class_projection,
    compute_square_classes,
    f2_basis,
)


class GWError(RingError):
    pass


class BasisMismatchError(GWError):
    pass


def _layout_from_rows(rows, c):
    """Smith-reduce the lattice spanned by the rows inside Z^c.

    Returns (lattice_rows, layout, torsion, free_rank, U) where U is the
    row transform of the c x r relation matrix and layout lists the SNF
    coordinate indices in output order (free first, then torsion with the
    largest invariant factor first)."""
    lattice = hnf_rows(rows, c)
    r0 = len(lattice)
    if r0 == 0:
        U = identity_matrix(c)
        diag = []
        rank = 0
    else:
        R = [[lattice[j][i] for j in range(r0)] for i in range(c)]
        U, S, _ = smith_normal_form(R)
        diag = [S[i][i] for i in range(min(c, r0))]
        rank = sum(1 for d in diag if d)
    tors_idx = [i for i in range(rank) if diag[i] >= 2]
    layout = list(range(rank, c)) + tors_idx[::-1]
    torsion = tuple(diag[i] for i in reversed(tors_idx))
    return lattice, layout, torsion, c - rank, U


@dataclass(eq=False)
class AbelianGroupInfo:
    """A finitely generated abelian group in reduced coordinates.

    ``torsion`` lists the invariant factors largest first, so that the
    coordinate tuples read (free part..., Z/d1 part, Z/d2 part, ...) with
    d1 >= d2 >= ....  ``generator_coords`` maps each square-class index to
    the coordinates of its rank-1 generator.
    """

    spec: RingSpec
    classes: SquareClassGroup
    kind: str  # "gw" | "witt" | "quotient"
    free_rank: int
    torsion: tuple[int, ...]
    generator_coords: dict[int, tuple[int, ...]] = field(default_factory=dict)
    sampled: bool = False
    basis_labels: tuple[str, ...] | None = None
    _proj: list[list[int]] | None = None  # dim x c
    _section: list[list[int]] | None = None  # c x dim
    _lattice_rows: tuple[tuple[int, ...], ...] = ()

    @property
    def dim(self) -> int:
        return self.free_rank + len(self.torsion)

    def signature(self) -> tuple[int, tuple[int, ...]]:
        return self.free_rank, self.torsion

    def format_group(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.torsion]
        return " ⊕ ".join(parts) if parts else "0"

    def reduce(self, coords) -> tuple[int, ...]:
        out = list(coords)
        for i, d in enumerate(self.torsion):
            out[self.free_rank + i] %= d
        return tuple(out)

    def element(self, coords) -> "GWElement":
        coords = tuple(coords)
        if len(coords) != self.dim:
            raise GWError(f"expected {self.dim} coordinates, got {len(coords)}")
        return GWElement(self, self.reduce(coords))

    def zero(self) -> "GWElement":
        return GWElement(self, (0,) * self.dim)

    def generator(self, class_idx: int) -> "GWElement":
        return GWElement(self, self.generator_coords[class_idx])

    def basis_elements(self) -> list["GWElement"]:
        return [
            self.element([1 if i == j else 0 for i in range(self.dim)])
            for j in range(self.dim)
        ]

    def push(self, vec) -> tuple[int, ...]:
        """Image of a vector of Z[square classes] in reduced coordinates."""
        assert self._proj is not None
        return self.reduce(
            [sum(row[j] * vec[j] for j in range(len(vec))) for row in self._proj]
        )

    def lift(self, coords) -> list[int]:
        """A preimage in Z[square classes] of the given coordinates."""
        assert self._section is not None
        return [
            sum(row[a] * coords[a] for a in range(self.dim)) for row in self._section
        ]


class GWElement:
    """An element of an AbelianGroupInfo, as a reduced coordinate tuple."""

    __slots__ = ("group", "coords")

    def __init__(self, group: AbelianGroupInfo, coords: tuple[int, ...]):
        self.group = group
        self.coords = coords

    def _check(self, other: "GWElement"):
        if self.group is not other.group:
            raise GWError("elements belong to different groups")

    def __add__(self, other: "GWElement") -> "GWElement":
        self._check(other)
        return self.group.element([a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: "GWElement") -> "GWElement":
        self._check(other)
        return self.group.element([a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self) -> "GWElement":
        return self.group.element([-a for a in self.coords])

    def __mul__(self, other):
        if isinstance(other, int):
            return self.group.element([other * a for a in self.coords])
        if isinstance(other, GWElement):
            return multiply(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GWElement):
            return NotImplemented
        self._check(other)
        return self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)

    def rank(self) -> int:
        """Value of the rank homomorphism; defined on GW groups, whose
        relation vectors all have coordinate sum zero."""
        if self.group.kind != "gw":
            raise GWError("rank is only defined on GW groups")
        return sum(self.group.lift(self.coords))

    def __repr__(self):
        return f"GWElement{self.coords}"


def _group_from_rows(spec, classes, rows, kind, sampled) -> AbelianGroupInfo:
    c = classes.num_classes
    lattice, layout, torsion, free_rank, U = _layout_from_rows(rows, c)
    Uinv = unimodular_inverse(U)
    proj = [list(U[i]) for i in layout]
    section = [[Uinv[r][i] for i in layout] for r in range(c)]
    group = AbelianGroupInfo(
        spec=spec,
        classes=classes,
        kind=kind,
        free_rank=free_rank,
        torsion=torsion,
        sampled=sampled,
        _proj=proj,
        _section=section,
        _lattice_rows=lattice,
    )
    group.generator_coords = {
        j: group.reduce([proj[a][j] for a in range(group.dim)]) for j in range(c)
    }
    _orient_unit(group)
    return group


def _orient_unit(group: AbelianGroupInfo) -> None:
    """Re-orient coordinates so that <1> = (1, 0, ..., 0) whenever <1>
    spans a free complement (free rank 1, unit free coordinate)."""
    if group.free_rank != 1 or group.dim == 0:
        return
    g1 = group.generator_coords[0]
    s = g1[0]
    if s not in (1, -1):
        return
    tau = list(g1[1:])
    dim = group.dim
    old_proj = group._proj
    new_proj = [list(r) for r in old_proj]
    new_proj[0] = [s * x for x in old_proj[0]]
    for i in range(1, dim):
        new_proj[i] = [old_proj[i][j] - s * tau[i - 1] * old_proj[0][j]
                       for j in range(len(old_proj[0]))]
    # inverse transform: column 0 = (s, tau...), other columns unchanged
    tinv = identity_matrix(dim)
    tinv[0][0] = s
    for i in range(1, dim):
        tinv[i][0] = tau[i - 1]
    group._proj = new_proj
    group._section = mat_mul(group._section, tinv)
    c = group.classes.num_classes
    group.generator_coords = {
        j: group.reduce([new_proj[a][j] for a in range(dim)]) for j in range(c)
    }
    assert group.generator_coords[0] == tuple(
        [1] + [0] * (dim - 1)
    ), "orientation must send <1> to (1, 0, ..., 0)"


@lru_cache(maxsize=None)
def _gw_group(spec: RingSpec, cap: int, seed: int) -> AbelianGroupInfo:
    pres = build_presentation(spec, cap=cap, seed=seed)
    return _group_from_rows(spec, pres.classes, pres.vectors(), "gw", pres.sampled)


def gw_group(spec: RingSpec, *, cap: int | None = None, seed: int = 0) -> AbelianGroupInfo:
    """GW^sym of the ring: cokernel of the relation lattice."""
    return _gw_group(spec, cap if cap is not None else DEFAULT_TUPLE_CAP, seed)


@lru_cache(maxsize=None)
def _witt_group(spec: RingSpec, cap: int, seed: int) -> AbelianGroupInfo:
    pres = build_presentation(spec, cap=cap, seed=seed)
    rows = pres.vectors() + [hyperbolic_vector(spec, pres.classes)]
    return _group_from_rows(spec, pres.classes, rows, "witt", pres.sampled)


def witt_group(spec: RingSpec, *, cap: int | None = None, seed: int = 0) -> AbelianGroupInfo:
    """W^sym of the ring: GW^sym modulo the hyperbolic element <1> + <-1>."""
    return _witt_group(spec, cap if cap is not None else DEFAULT_TUPLE_CAP, seed)


# -- ring structure ----------------------------------------------------------


def multiply(x: GWElement, y: GWElement) -> GWElement:
    """Product induced by <a>*<b> = <ab>, extended bilinearly."""
    g = x.group
    if g is not y.group:
        raise GWError("elements belong to different groups")
    if g.kind not in ("gw", "witt"):
        raise GWError("multiplication needs a GW or Witt group")
    mul = g.classes.mul
    c = g.classes.num_classes
    xv = g.lift(x.coords)
    yv = g.lift(y.coords)
    z = [0] * c
    for i in range(c):
        if xv[i]:
            row = mul[i]
            for j in range(c):
                if yv[j]:
                    z[row[j]] += xv[i] * yv[j]
    return GWElement(g, g.push(z))


def pfister1(group: AbelianGroupInfo, class_idx: int) -> GWElement:
    """<<a>> = <1> - <a> for the class of a."""
    return group.generator(0) - group.generator(class_idx)


def pfister2(group: AbelianGroupInfo, i: int, j: int) -> GWElement:
    """<<a, b>> = (<1> - <a>)(<1> - <b>)."""
    return multiply(pfister1(group, i), pfister1(group, j))


def structure_table(group: AbelianGroupInfo) -> dict[tuple[int, int], GWElement]:
    """Products of the current basis elements."""
    basis = group.basis_elements()
    return {
        (i, j): multiply(basis[i], basis[j])
        for i in range(group.dim)
        for j in range(group.dim)
    }


def symmetrisation_element(group: AbelianGroupInfo) -> GWElement:
    """3<1> - <3>, with 3 = 1 + 1 + 1 computed in the ring."""
    spec = group.spec
    three = spec.from_int(3).code
    cls3 = group.classes.class_of_unit(three)
    return 3 * group.generator(0) - group.generator(cls3)


def quotient_by_elements(group: AbelianGroupInfo, elems) -> AbelianGroupInfo:
    """Invariant factors of the quotient by the subgroup the elements
    generate."""
    dim = group.dim
    rows = [list(e.coords) for e in elems]
    for i, d in enumerate(group.torsion):
        row = [0] * dim
        row[group.free_rank + i] = d
        rows.append(row)
    _, _, torsion, free_rank, _ = _layout_from_rows(rows, dim)
    return AbelianGroupInfo(
        spec=group.spec,
        classes=group.classes,
        kind="quotient",
        free_rank=free_rank,
        torsion=torsion,
        sampled=group.sampled,
    )


# -- chosen bases ------------------------------------------------------------


def match_basis(
    group: AbelianGroupInfo, elements, labels=None
) -> AbelianGroupInfo:
    """Re-express the group in the basis given by the elements.

    The elements must present the group with its own invariant-factor
    layout: element alpha in a torsion slot with factor d must satisfy
    d * element = 0, and together the elements must generate.  Raises
    BasisMismatchError otherwise.
    """
    dim = group.dim
    if group._section is None:
        raise GWError("group carries no section; cannot rebase")
    elems = list(elements)
    if len(elems) != dim:
        raise BasisMismatchError(f"need {dim} elements, got {len(elems)}")
    for e in elems:
        if e.group is not group:
            raise GWError("basis elements must belong to the group")
    for i, d in enumerate(group.torsion):
        e = elems[group.free_rank + i]
        if not (d * e).is_zero:
            raise BasisMismatchError(
                f"element {e.coords} does not have order dividing {d}"
            )
    G = [[elems[a].coords[b] for a in range(dim)] for b in range(dim)]  # columns = coords
    D_cols = []
    for i, d in enumerate(group.torsion):
        col = [0] * dim
        col[group.free_rank + i] = d
        D_cols.append(col)
    M = [[G[b][a] for a in range(dim)] + [col[b] for col in D_cols] for b in range(dim)]
    _, S, _ = smith_normal_form(M)
    if any(S[i][i] != 1 for i in range(dim)):
        raise BasisMismatchError("elements do not generate the group")

    # change of coordinates: columns of A express the old basis in the new one
    A_cols = []
    for b in range(dim):
        unit = [1 if i == b else 0 for i in range(dim)]
        z = solve_integer(M, unit)
        assert z is not None
        A_cols.append(z[:dim])
    A = [[A_cols[b][a] for b in range(dim)] for a in range(dim)]

    new_proj = mat_mul(A, group._proj)
    new_section = mat_mul(group._section, G)
    new = AbelianGroupInfo(
        spec=group.spec,
        classes=group.classes,
        kind=group.kind,
        free_rank=group.free_rank,
        torsion=group.torsion,
        sampled=group.sampled,
        basis_labels=tuple(labels) if labels else None,
        _proj=new_proj,
        _section=new_section,
        _lattice_rows=group._lattice_rows,
    )
    c = group.classes.num_classes
    new.generator_coords = {
        j: new.reduce([new_proj[a][j] for a in range(dim)]) for j in range(c)
    }
    # the designated elements become the standard basis
    for a, e in enumerate(elems):
        got = new.reduce([sum(A[i][b] * e.coords[b] for b in range(dim)) for i in range(dim)])
        want = tuple(1 if i == a else 0 for i in range(dim))
        assert got == want, "rebasing failed to send the elements to the standard basis"
    return new


def _pfister_label(spec: RingSpec, code: int) -> str:
    return f"<<{spec.format_element(code)}>>"


def preferred_basis(group: AbelianGroupInfo) -> AbelianGroupInfo | None:
    """Try to present the group by <1> and Pfister elements.

    For z2k the Pfister generators are drawn from <<3>> and <<5>>; for
    trunc2 they are <<1 + x^(2l+1)>> over the square-class basis.  Returns
    the rebased group, or None when no candidate matches.
    """
    spec = group.spec
    classes = group.classes
    dim = group.dim
    if dim == 0:
        return None
    if spec.family == Z2K:
        pool = [code for code in (3, 5) if code < spec.size]
        pool = [code for code in pool if classes.class_of[code] > 0]
        candidates = list(itertools.combinations(pool, dim - 1))
    else:
        codes = [classes.reps[i] for i in f2_basis(classes)]
        candidates = [tuple(codes[: dim - 1])] if len(codes) >= dim - 1 else []
    for codes in candidates:
        elems = [group.generator(0)]
        labels = ["<1>"]
        for code in codes:
            elems.append(pfister1(group, classes.class_of_unit(code)))
            labels.append(_pfister_label(spec, code))
        try:
            return match_basis(group, elems, labels)
        except BasisMismatchError:
            continue
    return None


# -- induced maps and towers -------------------------------------------------


@dataclass
class KernelReport:
    free_rank: int
    invariants: tuple[int, ...]
    matches_generators: bool

    @property
    def trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariants


@dataclass
class InducedMapReport:
    source: AbelianGroupInfo
    target: AbelianGroupInfo
    matrix: tuple[tuple[int, ...], ...]  # dim_target x dim_source
    kernel: KernelReport

    @property
    def is_isomorphism(self) -> bool:
        return self.kernel.trivial


def _lattice_quotient(sup_rows, sub_rows, width) -> tuple[int, tuple[int, ...]]:
    """Free rank and invariant factors of (span sup)/(span sub)."""
    sup = hnf_rows(sup_rows, width)
    rk = len(sup)
    if rk == 0:
        return 0, ()
    A = [[sup[j][i] for j in range(rk)] for i in range(width)]
    cols = []
    for v in hnf_rows(sub_rows, width):
        x = solve_integer(A, list(v))
        assert x is not None, "sub-lattice is not contained in the big lattice"
        cols.append(x)
    if not cols:
        return rk, ()
    M = [[col[i] for col in cols] for i in range(rk)]
    _, S, _ = smith_normal_form(M)
    diag = [S[i][i] for i in range(min(rk, len(cols)))]
    rank = sum(1 for d in diag if d)
    torsion = tuple(d for d in reversed(diag[:rank]) if d >= 2)
    return rk - rank, torsion


def induced_map(
    source_spec: RingSpec,
    target_spec: RingSpec,
    *,
    cap: int | None = None,
    seed: int = 0,
) -> InducedMapReport:
    """The map GW^sym(source) -> GW^sym(target) induced by the canonical
    quotient, its matrix on reduced coordinates, and an exact check that
    its kernel is the subgroup generated by all <a><<x>> with x mapping
    to 1."""
    gs = gw_group(source_spec, cap=cap, seed=seed)
    gt = gw_group(target_spec, cap=cap, seed=seed)
    sigma = class_projection(gs.classes, gt.classes)
    c_s, c_t = gs.classes.num_classes, gt.classes.num_classes

    cols = []
    for a in range(gs.dim):
        lift = gs.lift([1 if b == a else 0 for b in range(gs.dim)])
        img = [0] * c_t
        for j, v in enumerate(lift):
            img[sigma[j]] += v
        cols.append(gt.push(img))
    matrix = tuple(
        tuple(cols[a][i] for a in range(gs.dim)) for i in range(gt.dim)
    )

    for j in range(c_s):  # the matrix must agree with the class-level map
        coords = gs.generator_coords[j]
        img = gt.reduce(
            [sum(matrix[i][a] * coords[a] for a in range(gs.dim)) for i in range(gt.dim)]
        )
        assert img == gt.generator_coords[sigma[j]]

    # kernel lattice K = {x : F0 x lies in the target relation lattice}
    bt = gt._lattice_rows
    W = [
        [1 if sigma[j] == i else 0 for j in range(c_s)] + [row[i] for row in bt]
        for i in range(c_t)
    ]
    kern = [tuple(col[:c_s]) for col in kernel_basis(W)]
    k_rows = hnf_rows(kern + list(gs._lattice_rows), c_s)

    ker_classes = sorted(
        {
            gs.classes.class_of[u]
            for u in source_spec.unit_codes()
            if source_spec.project_code(target_spec, u) == 1
        }
    )
    claimed = []
    for a in range(c_s):
        for xi in ker_classes:
            if xi == 0:
                continue
            vec = [0] * c_s
            vec[a] += 1
            vec[gs.classes.mul[a][xi]] -= 1
            if any(vec):
                claimed.append(tuple(vec))
    c_rows = hnf_rows(claimed + list(gs._lattice_rows), c_s)

    free, invariants = _lattice_quotient(k_rows, gs._lattice_rows, c_s)
    kernel = KernelReport(
        free_rank=free,
        invariants=invariants,
        matches_generators=(k_rows == c_rows),
    )
    return InducedMapReport(source=gs, target=gt, matrix=matrix, kernel=kernel)


@dataclass
class TowerStep:
    source_n: int
    target_n: int
    is_isomorphism: bool
    kernel_free_rank: int
    kernel_invariants: tuple[int, ...]
    kernel_matches_generators: bool
    source_group: str
    target_group: str


def tower_check(
    family: str,
    n_from: int,
    n_to: int,
    *,
    cap: int | None = None,
    seed: int = 0,
) -> list[TowerStep]:
    """For each step n+1 -> n with n_from <= n < n_to, report whether the
    induced GW map is an isomorphism, its kernel invariants otherwise, and
    whether the kernel matches its predicted generators."""
    if n_from >= n_to:
        raise ValueError(f"empty tower range {n_from}..{n_to}")
    steps = []
    for n in range(n_from, n_to):
        report = induced_map(
            RingSpec(family, n + 1), RingSpec(family, n), cap=cap, seed=seed
        )
        steps.append(
            TowerStep(
                source_n=n + 1,
                target_n=n,
                is_isomorphism=report.is_isomorphism,
                kernel_free_rank=report.kernel.free_rank,
                kernel_invariants=report.kernel.invariants,
                kernel_matches_generators=report.kernel.matches_generators,
                source_group=report.source.format_group(),
                target_group=report.target.format_group(),
            )
        )
    return steps

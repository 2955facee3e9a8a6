"""Enumeration of the additive relations presenting GW^sym of a finite
local ring with residue field F2 over its square-class generators.

Two relation families are materialized in Z[square classes]:

* even family: for units a, b and a non-unit m, setting n := -m*a/b
  (again a non-unit), the vector of <a> + <b> - <a + n^2 b> - <b + m^2 a>;
* odd family: for units a, b, c, d, setting u := a + 1/c + 1/d,
  v := 1/a + 1/b + d and w := a + b + a^2*c, the vector of
  <a> + <b> + <c> + <d> - <u> - <v> - <w> - <a*b*c*d*u*v*w>.

Vectors are sign-normalized (first nonzero entry positive), zero-filtered
and deduplicated; each surviving relation keeps one witness tuple of ring
elements so the congruence oracle can replay it.  Enumeration is
exhaustive while the number of unit tuples fits the cap; past the cap the
enumeration falls back to all class-representative tuples plus seeded
uniform random tuples up to the cap, and the result is flagged sampled.

The inner loops run on dense numpy code tables; a relation vector is
packed into a single signed base-9 key (coordinates lie in [-4, 4]), so
deduplication is one np.unique call.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .rings import CapExceededError, RingSpec, op_tables
from .snf import hnf_rows
from .square_classes import SquareClassGroup, compute_square_classes

DEFAULT_TUPLE_CAP = 1 << 30
_CHUNK = 1 << 21
# Packed base-9 keys need 9^k to fit in int64.
_MAX_CLASSES = 16


@dataclass(frozen=True)
class Relation:
    """One relation vector (LHS - RHS) in square-class coordinates."""

    vector: tuple[int, ...]
    kind: str  # "even" | "odd" | "hyperbolic"
    witness: tuple[int, ...]  # codes (a, b, m, n) or (a, b, c, d); () for hyperbolic


@dataclass(frozen=True)
class Presentation:
    spec: RingSpec
    classes: SquareClassGroup
    relations: tuple[Relation, ...]
    sampled: bool
    cap: int

    def vectors(self) -> list[tuple[int, ...]]:
        return [r.vector for r in self.relations]

    def lattice_rows(self) -> tuple[tuple[int, ...], ...]:
        return hnf_rows(self.vectors(), self.classes.num_classes)


def _pack_tables(spec: RingSpec, classes: SquareClassGroup):
    if classes.num_classes > _MAX_CLASSES:
        raise CapExceededError(
            f"{spec} has {classes.num_classes} square classes; packed relation "
            f"enumeration supports at most {_MAX_CLASSES}"
        )
    t = op_tables(spec)
    cls = np.array(classes.class_of, dtype=np.int64)
    cmul = np.array(classes.mul, dtype=np.int64)
    pow9 = 9 ** np.arange(classes.num_classes, dtype=np.int64)
    return t, cls, cmul, pow9


def _even_keys(t, cls, pow9, A, B, M):
    ADD, MUL, INV, NEG = t.add, t.mul, t.inv, t.neg
    N = NEG[MUL[M, MUL[A, INV[B]]]]
    X = ADD[A, MUL[MUL[N, N], B]]
    Y = ADD[B, MUL[MUL[M, M], A]]
    if not bool((X & 1).all()) or not bool((Y & 1).all()):
        raise AssertionError("even relation produced a non-unit entry")
    keys = pow9[cls[A]] + pow9[cls[B]] - pow9[cls[X]] - pow9[cls[Y]]
    return keys, N


def _odd_keys(t, cls, cmul, pow9, A, B, C, D):
    ADD, MUL, INV = t.add, t.mul, t.inv
    Uv = ADD[ADD[A, INV[C]], INV[D]]
    Vv = ADD[ADD[INV[A], INV[B]], D]
    Wv = ADD[ADD[A, B], MUL[MUL[A, A], C]]
    if not bool(((Uv & Vv & Wv) & 1).all()):
        raise AssertionError("odd relation produced a non-unit entry")
    ca, cb, cc, cd = cls[A], cls[B], cls[C], cls[D]
    cu, cv, cw = cls[Uv], cls[Vv], cls[Wv]
    ct = cmul[cmul[cmul[ca, cb], cmul[cc, cd]], cmul[cmul[cu, cv], cw]]
    keys = (
        pow9[ca] + pow9[cb] + pow9[cc] + pow9[cd]
        - pow9[cu] - pow9[cv] - pow9[cw] - pow9[ct]
    )
    return keys


def _collect(found: dict, keys: np.ndarray, witness_of) -> None:
    uniq, first = np.unique(keys, return_index=True)
    for key, idx in zip(uniq.tolist(), first.tolist()):
        if key and key not in found:
            found[key] = witness_of(idx)


def _decode_key(key: int, k: int) -> tuple[int, ...]:
    kk = key + sum(4 * 9**j for j in range(k))
    digits = []
    for _ in range(k):
        kk, d = divmod(kk, 9)
        digits.append(d - 4)
    assert kk == 0
    return tuple(digits)


def _normalize(vec: tuple[int, ...]) -> tuple[int, ...]:
    for x in vec:
        if x:
            return vec if x > 0 else tuple(-e for e in vec)
    return vec


def _finish(found: dict, kind: str, k: int) -> list[Relation]:
    by_vec: dict[tuple[int, ...], Relation] = {}
    for key in sorted(found):
        vec = _normalize(_decode_key(key, k))
        if vec not in by_vec:
            by_vec[vec] = Relation(vec, kind, found[key])
    return [by_vec[v] for v in sorted(by_vec)]


def _enumerate_even(spec, classes, cap, seed):
    t, cls, cmul, pow9 = _pack_tables(spec, classes)
    units = t.units
    ideal = np.arange(0, spec.size, 2, dtype=np.int64)
    nu, ni = len(units), len(ideal)
    total = nu * nu * ni
    found: dict[int, tuple[int, ...]] = {}
    sampled = total > cap
    if not sampled:
        B, M = (x.reshape(-1) for x in np.meshgrid(units, ideal, indexing="ij"))
        for a in units.tolist():
            A = np.full(B.shape, a, dtype=np.int64)
            keys, N = _even_keys(t, cls, pow9, A, B, M)
            _collect(
                found,
                keys,
                lambda i, a=a, B=B, M=M, N=N: (a, int(B[i]), int(M[i]), int(N[i])),
            )
    else:
        # class representatives for a, b; the full ideal for m; then random fill
        reps = np.array(classes.reps, dtype=np.int64)
        A, B, M = (x.reshape(-1) for x in np.meshgrid(reps, reps, ideal, indexing="ij"))
        keys, N = _even_keys(t, cls, pow9, A, B, M)
        _collect(found, keys, lambda i: (int(A[i]), int(B[i]), int(M[i]), int(N[i])))
        rng = np.random.default_rng(seed)
        remaining = cap - len(A)
        while remaining > 0:
            batch = min(_CHUNK, remaining)
            remaining -= batch
            Ar = units[rng.integers(0, nu, batch)]
            Br = units[rng.integers(0, nu, batch)]
            Mr = ideal[rng.integers(0, ni, batch)]
            keys, Nr = _even_keys(t, cls, pow9, Ar, Br, Mr)
            _collect(
                found,
                keys,
                lambda i, Ar=Ar, Br=Br, Mr=Mr, Nr=Nr: (
                    int(Ar[i]), int(Br[i]), int(Mr[i]), int(Nr[i])
                ),
            )
    return _finish(found, "even", classes.num_classes), sampled


def _odd_exhaustive_chunks(units: np.ndarray):
    nu = len(units)
    total = nu**4
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        ia, rest = divmod(idx, nu**3)
        ib, rest = divmod(rest, nu**2)
        ic, id_ = divmod(rest, nu)
        yield units[ia], units[ib], units[ic], units[id_]


def _enumerate_odd(spec, classes, cap, seed):
    t, cls, cmul, pow9 = _pack_tables(spec, classes)
    units = t.units
    nu = len(units)
    total = nu**4
    found: dict[int, tuple[int, ...]] = {}
    sampled = total > cap

    def collect(A, B, C, D):
        keys = _odd_keys(t, cls, cmul, pow9, A, B, C, D)
        _collect(
            found,
            keys,
            lambda i: (int(A[i]), int(B[i]), int(C[i]), int(D[i])),
        )

    if not sampled:
        for A, B, C, D in _odd_exhaustive_chunks(units):
            collect(A, B, C, D)
    else:
        reps = np.array(classes.reps, dtype=np.int64)
        for A, B, C, D in _odd_exhaustive_chunks(reps):
            collect(A, B, C, D)
        rng = np.random.default_rng(seed)
        remaining = cap - len(reps) ** 4
        while remaining > 0:
            batch = min(_CHUNK, remaining)
            remaining -= batch
            draws = rng.integers(0, nu, (4, batch))
            collect(units[draws[0]], units[draws[1]], units[draws[2]], units[draws[3]])
    return _finish(found, "odd", classes.num_classes), sampled


def enumerate_even_relations(
    spec: RingSpec, classes: SquareClassGroup | None = None, *, cap=DEFAULT_TUPLE_CAP, seed=0
) -> list[Relation]:
    classes = classes or compute_square_classes(spec)
    rels, _ = _enumerate_even(spec, classes, cap, seed)
    return rels


def enumerate_odd_relations(
    spec: RingSpec, classes: SquareClassGroup | None = None, *, cap=DEFAULT_TUPLE_CAP, seed=0
) -> list[Relation]:
    classes = classes or compute_square_classes(spec)
    rels, _ = _enumerate_odd(spec, classes, cap, seed)
    return rels


def odd_relations_class_reps(spec: RingSpec, classes: SquareClassGroup | None = None) -> list[Relation]:
    """Odd relations from class-representative tuples only; used by the
    exhaustiveness sentinel that guards the sampled fallback."""
    classes = classes or compute_square_classes(spec)
    t, cls, cmul, pow9 = _pack_tables(spec, classes)
    reps = np.array(classes.reps, dtype=np.int64)
    found: dict[int, tuple[int, ...]] = {}
    for A, B, C, D in _odd_exhaustive_chunks(reps):
        keys = _odd_keys(t, cls, cmul, pow9, A, B, C, D)
        _collect(found, keys, lambda i: (int(A[i]), int(B[i]), int(C[i]), int(D[i])))
    return _finish(found, "odd", classes.num_classes)


@lru_cache(maxsize=None)
def _build(spec: RingSpec, cap: int, seed: int) -> Presentation:
    classes = compute_square_classes(spec)
    even, even_sampled = _enumerate_even(spec, classes, cap, seed)
    odd, odd_sampled = _enumerate_odd(spec, classes, cap, seed)
    # a vector can arise in both families; keep the even witness, whose
    # oracle replay only needs rank 2
    seen = {r.vector for r in even}
    relations = even + [r for r in odd if r.vector not in seen]
    return Presentation(
        spec=spec,
        classes=classes,
        relations=tuple(relations),
        sampled=even_sampled or odd_sampled,
        cap=cap,
    )


def build_presentation(
    spec: RingSpec, *, cap: int | None = None, seed: int = 0
) -> Presentation:
    """All even and odd relations of the ring, deduplicated, with witnesses."""
    return _build(spec, cap if cap is not None else DEFAULT_TUPLE_CAP, seed)


def hyperbolic_vector(spec: RingSpec, classes: SquareClassGroup | None = None) -> tuple[int, ...]:
    """The vector of <1> + <-1>, whose vanishing presents the Witt group."""
    classes = classes or compute_square_classes(spec)
    vec = [0] * classes.num_classes
    vec[0] += 1
    vec[classes.class_of_unit(spec.neg(1))] += 1
    return tuple(vec)

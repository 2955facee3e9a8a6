"""Command-line interface.

Subcommands: ``compute`` (square classes, GW and Witt invariants with
generator coordinates and the multiplication table), ``square-classes``,
``verify`` (orthogonal-groups, lemma-odd, factorization, relations,
pfister-vanishing, symmetrisation), ``oracle`` (diagonal-form congruence
versus coordinate equality), and ``tower`` (per-step isomorphism table).

Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 resource cap.
Reports go to stdout (text by default, ``--format json`` for machines);
diagnostics go to stderr.  Identical config and seed give byte-identical
output.
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys

from .gw import (
    gw_group,
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
from .oracle import (
    CLASSIFY_SPACE_CAP,
    classify_small,
    factor_into_good,
    odd_relation_matrix,
    oracle_relation_check,
    orthogonal_group,
    random_good_product,
)
from .relations import build_presentation
from .rings import CapExceededError, RingSpec, SpecParseError, TRUNC2, Z2K, parse_ring_spec
from .square_classes import compute_square_classes, f2_basis

SCHEMA = 1


def _emit(args, payload: dict, text_lines) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            print(line)


def _group_payload(group) -> dict:
    spec = group.spec
    return {
        "group": group.format_group(),
        "free_rank": group.free_rank,
        "torsion": list(group.torsion),
        "basis": list(group.basis_labels) if group.basis_labels else None,
        "generators": {
            spec.format_element(spec_code): list(group.generator_coords[idx])
            for idx, spec_code in enumerate(group.classes.reps)
        },
    }


def _group_lines(name, group) -> list[str]:
    spec = group.spec
    lines = [f"{name}: {group.format_group()}"]
    if group.basis_labels:
        lines.append(f"{name} basis: " + ", ".join(group.basis_labels))
    for idx, code in enumerate(group.classes.reps):
        lines.append(
            f"  <{spec.format_element(code)}> -> "
            + str(tuple(group.generator_coords[idx]))
        )
    return lines


def cmd_compute(args) -> int:
    spec = parse_ring_spec(args.ring)
    pres = build_presentation(spec, cap=args.cap, seed=args.seed)
    if pres.sampled and args.exact:
        raise CapExceededError(
            f"relation enumeration for {spec} is sampled at cap {pres.cap}; "
            "--exact forbids sampling"
        )
    gw = preferred_basis(gw_group(spec, cap=args.cap, seed=args.seed)) or gw_group(
        spec, cap=args.cap, seed=args.seed
    )
    witt = preferred_basis(
        witt_group(spec, cap=args.cap, seed=args.seed)
    ) or witt_group(spec, cap=args.cap, seed=args.seed)
    table = structure_table(gw)
    labels = list(gw.basis_labels) if gw.basis_labels else [
        f"b{i}" for i in range(gw.dim)
    ]
    mult = {
        "basis": labels,
        "table": [
            [list(table[(i, j)].coords) for j in range(gw.dim)] for i in range(gw.dim)
        ],
    }
    payload = {
        "schema": SCHEMA,
        "ring": str(spec),
        "num_classes": pres.classes.num_classes,
        "class_reps": [spec.format_element(c) for c in pres.classes.reps],
        "gw": _group_payload(gw),
        "witt": _group_payload(witt),
        "mult_table": mult,
        "sampled": pres.sampled,
    }
    lines = [
        f"ring: {spec}",
        f"square classes: {pres.classes.num_classes}  reps: "
        + ", ".join(spec.format_element(c) for c in pres.classes.reps),
    ]
    lines += _group_lines("GW", gw)
    lines += _group_lines("W", witt)
    lines.append("multiplication on GW basis:")
    for i in range(gw.dim):
        for j in range(i, gw.dim):
            lines.append(f"  {labels[i]} * {labels[j]} = {tuple(table[(i, j)].coords)}")
    lines.append(f"sampled: {str(pres.sampled).lower()}")
    _emit(args, payload, lines)
    return 0


def cmd_square_classes(args) -> int:
    spec = parse_ring_spec(args.ring)
    group = compute_square_classes(spec)
    basis = f2_basis(group)
    payload = {
        "schema": SCHEMA,
        "ring": str(spec),
        "num_classes": group.num_classes,
        "reps": [spec.format_element(c) for c in group.reps],
        "basis": [spec.format_element(group.reps[i]) for i in basis],
    }
    lines = [
        f"ring: {spec}",
        f"square classes: {group.num_classes}",
        "reps: " + ", ".join(spec.format_element(c) for c in group.reps),
        "basis: " + (", ".join(spec.format_element(group.reps[i]) for i in basis) or "(empty)"),
    ]
    _emit(args, payload, lines)
    return 0


def _verify_orthogonal(args):
    sizes = {n: len(orthogonal_group(n)) for n in (2, 3, 4)}
    ok = sizes == {2: 2, 3: 6, 4: 48}
    return ok, {"sizes": {str(k): v for k, v in sizes.items()}}, [
        f"O_n(F2) sizes: {sizes[2]}, {sizes[3]}, {sizes[4]}  "
        f"(structure checks {'pass' if ok else 'FAIL'})"
    ]


def _verify_lemma_odd(args):
    spec = parse_ring_spec(args.ring)
    rng = random.Random(args.seed)
    units = list(spec.unit_codes())
    failures = 0
    for _ in range(args.trials):
        a, b, c, d, p, q, r = (rng.choice(units) for _ in range(7))
        try:
            odd_relation_matrix(spec, a, b, c, d, p, q, r)
            odd_relation_matrix(spec, a, b, c, d)  # defaults: class identities too
        except Exception as exc:  # transcription bugs are hard errors
            failures += 1
            print(f"lemma-odd failure at {(a, b, c, d, p, q, r)}: {exc}", file=sys.stderr)
    ok = failures == 0
    return ok, {"ring": str(spec), "trials": args.trials, "failures": failures}, [
        f"lemma-odd on {spec}: {args.trials} trials, {failures} failures"
    ]


def _verify_factorization(args):
    spec = parse_ring_spec(args.ring)
    rng = random.Random(args.seed)
    failures = 0
    for _ in range(args.trials):
        n = rng.randrange(1, 5)
        P, D = random_good_product(rng, spec, n, rng.randrange(1, 6))
        try:
            factor_into_good(P, D)
        except Exception as exc:
            failures += 1
            print(f"factorization failure: {exc}", file=sys.stderr)
    ok = failures == 0
    return ok, {"ring": str(spec), "trials": args.trials, "failures": failures}, [
        f"factorization roundtrip on {spec}: {args.trials} trials, {failures} failures"
    ]


def _verify_relations(args):
    spec = parse_ring_spec(args.ring)
    report = oracle_relation_check(spec)
    ok = report.ok
    payload = {
        "ring": str(spec),
        "even_checked": report.even_checked,
        "odd_checked": report.odd_checked,
        "odd_skipped": report.odd_skipped,
        "failures": len(report.failures),
    }
    return ok, payload, [
        f"relations vs oracle on {spec}: even={report.even_checked} "
        f"odd={report.odd_checked} skipped={report.odd_skipped} "
        f"failures={len(report.failures)}"
    ]


def _verify_pfister(args):
    spec = parse_ring_spec(args.ring)
    if spec.family != TRUNC2:
        raise ValueError("pfister-vanishing applies to trunc2 rings")
    group = gw_group(spec, cap=args.cap, seed=args.seed)
    k = group.classes.num_classes
    bad = [
        (i, j)
        for i in range(k)
        for j in range(k)
        if not pfister2(group, i, j).is_zero
    ]
    ok = not bad
    return ok, {"ring": str(spec), "nonzero_pairs": len(bad)}, [
        f"2-fold Pfister forms on {spec}: {k * k} products, "
        f"{len(bad)} nonzero"
    ]


def _verify_symmetrisation(args):
    spec = parse_ring_spec(args.ring)
    w = witt_group(spec, cap=args.cap, seed=args.seed)
    quot = quotient_by_elements(w, [symmetrisation_element(w)])
    if spec.family == Z2K:
        expected = (0, (4,)) if spec.n == 2 else ((0, (8,)) if spec.n >= 3 else None)
    else:
        expected = w.signature()  # 3<1> - <3> = 2<1> in characteristic 2
    ok = expected is None or quot.signature() == expected
    return ok, {
        "ring": str(spec),
        "witt": w.format_group(),
        "cokernel": quot.format_group(),
    }, [
        f"W^sym({spec}) = {w.format_group()}; quotient by 3<1> - <3>: "
        f"{quot.format_group()}" + ("" if ok else "  (UNEXPECTED)")
    ]


_VERIFY_TARGETS = {
    "orthogonal-groups": _verify_orthogonal,
    "lemma-odd": _verify_lemma_odd,
    "factorization": _verify_factorization,
    "relations": _verify_relations,
    "pfister-vanishing": _verify_pfister,
    "symmetrisation": _verify_symmetrisation,
}


def cmd_verify(args) -> int:
    handler = _VERIFY_TARGETS[args.target]
    ok, payload, lines = handler(args)
    payload = {"schema": SCHEMA, "target": args.target, "pass": ok, **payload}
    _emit(args, payload, lines + [f"result: {'pass' if ok else 'FAIL'}"])
    return 0 if ok else 1


def cmd_oracle(args) -> int:
    spec = parse_ring_spec(args.ring)
    space_cap = args.cap if args.cap is not None else CLASSIFY_SPACE_CAP
    for rank in range(1, args.max_rank + 1):
        space = spec.size ** (rank * (rank + 1) // 2)
        if space > space_cap:
            raise CapExceededError(
                f"rank-{rank} classification space {spec.size}^{rank * (rank + 1) // 2}"
                f" = {space} exceeds cap {space_cap}"
            )
    group = gw_group(spec, seed=args.seed)
    units = list(spec.unit_codes())
    mismatches = []
    pairs_checked = 0
    for rank in range(1, args.max_rank + 1):
        cls = classify_small(spec, rank, space_cap)
        forms = list(itertools.combinations_with_replacement(units, rank))
        ids = {}
        sums = {}
        for f in forms:
            ids[f] = cls.diagonal_class(f)
            total = group.zero()
            for u in f:
                total = total + group.generator(group.classes.class_of[u])
            sums[f] = total.coords
        for f1, f2 in itertools.combinations(forms, 2):
            pairs_checked += 1
            if (ids[f1] == ids[f2]) != (sums[f1] == sums[f2]):
                mismatches.append((f1, f2))
    ok = not mismatches
    payload = {
        "schema": SCHEMA,
        "ring": str(spec),
        "max_rank": args.max_rank,
        "pairs_checked": pairs_checked,
        "mismatches": len(mismatches),
        "pass": ok,
    }
    lines = [
        f"oracle agreement on {spec} up to rank {args.max_rank}: "
        f"{pairs_checked} pairs, {len(mismatches)} mismatches",
        f"result: {'pass' if ok else 'FAIL'}",
    ]
    _emit(args, payload, lines)
    return 0 if ok else 1


def cmd_tower(args) -> int:
    if args.family not in (Z2K, TRUNC2):
        raise ValueError(f"unknown family {args.family!r}")
    steps = tower_check(args.family, args.n_from, args.n_to, cap=args.cap, seed=args.seed)
    payload = {
        "schema": SCHEMA,
        "family": args.family,
        "from": args.n_from,
        "to": args.n_to,
        "steps": [
            {
                "source_n": s.source_n,
                "target_n": s.target_n,
                "isomorphism": s.is_isomorphism,
                "kernel": ([0] * s.kernel_free_rank) + list(s.kernel_invariants),
                "kernel_matches_generators": s.kernel_matches_generators,
                "source_group": s.source_group,
                "target_group": s.target_group,
            }
            for s in steps
        ],
    }
    lines = []
    for s in steps:
        verdict = "isomorphism" if s.is_isomorphism else (
            "kernel "
            + " ⊕ ".join(
                ["Z"] * s.kernel_free_rank + [f"Z/{d}" for d in s.kernel_invariants]
            )
        )
        check = "" if s.kernel_matches_generators else "  (kernel generators MISMATCH)"
        lines.append(
            f"{args.family}:{s.source_n} -> {args.family}:{s.target_n}: "
            f"{s.source_group} -> {s.target_group}: {verdict}{check}"
        )
    _emit(args, payload, lines)
    if any(not s.kernel_matches_generators for s in steps):
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gw",
        description="Symmetric Grothendieck-Witt and Witt rings of finite "
        "local rings with residue field F2, with brute-force oracles.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, ring=True):
        if ring:
            p.add_argument("--ring", required=True, help="z2k:<n> or trunc2:<n>")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--cap", type=int, default=None, help="enumeration cap")

    p = sub.add_parser("compute", help="square classes, GW and Witt invariants")
    common(p)
    p.add_argument("--exact", action="store_true", help="fail instead of sampling")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("square-classes", help="the group of square classes")
    common(p)
    p.set_defaults(func=cmd_square_classes)

    p = sub.add_parser("verify", help="constructive ingredient checks")
    p.add_argument("target", choices=sorted(_VERIFY_TARGETS))
    p.add_argument("--ring", default="z2k:3", help="z2k:<n> or trunc2:<n>")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="congruence oracle vs presentation")
    common(p)
    p.add_argument("--max-rank", type=int, choices=(1, 2, 3, 4), default=4)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("tower", help="induced maps along a quotient tower")
    p.add_argument("--family", required=True, choices=(Z2K, TRUNC2))
    p.add_argument("--from", dest="n_from", type=int, required=True)
    p.add_argument("--to", dest="n_to", type=int, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(func=cmd_tower)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExceededError as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return 3
    except (SpecParseError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command line front end: ``mmx <command> ...`` writing versioned JSON."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from typing import List, Optional, Sequence

from . import cache as _cache
from .errors import (
    DegenerateInstance,
    DimensionDropFailure,
    DimensionMismatch,
    InputError,
    MmxError,
    NonIntegerMultiplicity,
    NotFiniteLength,
    ReductionCertificationFailure,
    ResourceLimit,
    RingMismatch,
    SearchExhausted,
    StabilizationFailure,
)

SCHEMA = 1
EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_STABILIZE = 0, 1, 2, 3

_EXIT_FOR = (
    ((DimensionDropFailure, ReductionCertificationFailure), EXIT_VERIFY),
    ((InputError, RingMismatch, DegenerateInstance, NotFiniteLength), EXIT_INPUT),
    ((StabilizationFailure, ResourceLimit, SearchExhausted, DimensionMismatch, NonIntegerMultiplicity), EXIT_STABILIZE),
)

log = logging.getLogger("mmx")


def exit_code_for(exc: BaseException) -> int:
    for kinds, code in _EXIT_FOR:
        if isinstance(exc, kinds):
            return code
    return EXIT_INPUT


class _Failed(Exception):
    """Carries a finished payload whose verification did not pass."""

    def __init__(self, payload):
        self.payload = payload


# ----------------------------------------------------------------------------
# helpers


def _instance(args):
    from .instance_io import read_instance

    return read_instance(args.instance)


def _slot_piece(inst, slot: int):
    if slot == 0:
        return inst.J
    if not 1 <= slot <= inst.q:
        raise InputError(f"slot must lie in 0..{inst.q} (0 = J)")
    return inst.I_list[slot - 1]


def _require_I_slot(inst, slot: int) -> int:
    if not 1 <= slot <= inst.q:
        raise InputError(f"slot must lie in 1..{inst.q}")
    return slot


def _piece_from_text(inst, name: str, texts: Sequence[str], tdeg: int = 1):
    from .algebra import Polynomial
    from .graded import GradedPiece

    gens = []
    for t in texts:
        for part in t.split(";"):
            if part.strip():
                gens.append(Polynomial.parse(part, inst.ring))
    if not gens:
        raise InputError(f"{name}: no generators given")
    return GradedPiece(name, tuple(gens), tdeg)


def _base(command: str, inst) -> dict:
    return {"schema": SCHEMA, "command": command, "instance": inst.name, "instance_hash": inst.fingerprint()}


# ----------------------------------------------------------------------------
# commands


def cmd_compute(args):
    from .multiplicity import buchsbaum_rim_all, mixed_multiplicities

    inst = _instance(args)
    out = _base(f"compute {args.what}", inst)
    if args.what == "mixed":
        table = mixed_multiplicities(inst)
        out.update({"D": table.D, "q": table.q, "table": table.labelled()})
    elif args.what == "br":
        piece = _slot_piece(inst, args.slot)
        values = buchsbaum_rim_all(inst, piece, args.degree)
        out.update({"piece": piece.name, "degree": len(values) - 1, "br": values})
    else:
        from .fc import analytic_spread, mu

        piece = _slot_piece(inst, args.slot)
        out.update({"piece": piece.name, "spread": analytic_spread(piece), "mu": mu(piece)})
    return out


def cmd_fc(args):
    from .fc import build_maximal_weak_fc_sequence, default_window, fc3_dims, find_weak_fc_element

    inst = _instance(args)
    slot = _require_I_slot(inst, args.slot)
    with_J = not args.without_J
    out = _base(f"fc {args.what}", inst)
    out["seed"] = args.seed
    if args.what == "find":
        state = inst.module()
        cert = find_weak_fc_element(slot, state, args.seed, default_window(inst), with_J)
        cert.fc3_dims = fc3_dims(cert.element, state, with_J)
        out["certificate"] = cert.to_json()
    else:
        seq = build_maximal_weak_fc_sequence(inst, slot, args.seed, with_J=with_J)
        out["length"] = seq.length
        out["sequence"] = seq.to_json()
    return out


def cmd_reduce(args):
    from .fc import is_reduction, mu, reduction_number_N

    inst = _instance(args)
    slot = _require_I_slot(inst, args.slot)
    out = _base("reduce check", inst)
    if args.generators:
        red = _piece_from_text(inst, "candidate", args.generators)
        ok, where = is_reduction(red, slot, inst)
        out.update({"candidate": [str(g) for g in red.generators], "is_reduction": ok,
                    "first_failure": list(where) if isinstance(where, tuple) else where})
        if not ok:
            raise _Failed(out)
        return out
    N, seq, red = reduction_number_N(inst, slot, args.seed)
    out.update({"seed": args.seed, "N": N, "mu": mu(red), "reduction": [str(g) for g in red.generators],
                "is_reduction": True})
    return out


def _run_theorem(inst, theorem: str, args, table=None):
    from . import verify as V

    alt_J = _piece_from_text(inst, "J'", args.alt_J) if getattr(args, "alt_J", None) else None
    if theorem == "teo12i":
        k = tuple(args.k) if args.k else (1,) + (0,) * (inst.q - 1)
        return V.verify_mixed_equals_br(inst, args.j, args.k0, k, args.seed, table)
    if theorem == "cor2":
        return V.verify_positivity(inst, table)
    if theorem == "teo1":
        seeds = tuple(args.seeds) if args.seeds else (0, 1, 2)
        return V.verify_length_and_spread(inst, seeds, alt_J, table)
    if theorem == "teo3i":
        return V.verify_monotonicity(inst, alt_J, table)
    return V.verify_decomposition_identity(inst, args.j, table)


def cmd_verify(args):
    from .verify import canonical_theorem

    inst = _instance(args)
    try:
        theorem = canonical_theorem(args.theorem)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    rep = _run_theorem(inst, theorem, args)
    out = _base("verify", inst)
    out["report"] = rep.to_json()
    log.info("%s", rep.trace())
    if not rep.passed:
        raise _Failed(out)
    return out


def cmd_report(args):
    from .multiplicity import mixed_multiplicities
    from .verify import THEOREMS

    inst = _instance(args)
    out = _base("report", inst)
    table = mixed_multiplicities(inst)
    out.update({"D": table.D, "q": table.q, "table": table.labelled()})
    reports = {}
    for theorem in THEOREMS:
        reports[theorem] = _run_theorem(inst, theorem, args, table).to_json()
    out["verifications"] = reports
    out["pass"] = all(r["pass"] for r in reports.values())
    if not out["pass"]:
        raise _Failed(out)
    return out


def cmd_cache(args):
    directory = args.dir or args.cache_dir
    evicted = _cache.cache_gc(directory, args.max_bytes)
    return {"schema": SCHEMA, "command": "cache gc", "dir": str(directory), "evicted": evicted}


# ----------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cache-dir", default=os.environ.get("MMX_CACHE_DIR", ".mmx-cache"))
    common.add_argument("--no-cache", action="store_true", help="keep Groebner bases in memory only")
    common.add_argument("-v", "--verbose", action="store_true")

    inst = argparse.ArgumentParser(add_help=False)
    inst.add_argument("--instance", required=True, help="instance file, or the name of a bundled one")

    parser = argparse.ArgumentParser(prog="mmx", description="Mixed and Buchsbaum-Rim multiplicities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", parents=[common, inst], help="multiplicity tables, BR, analytic spread")
    p.add_argument("what", choices=["mixed", "br", "spread"])
    p.add_argument("--slot", type=int, default=0, help="0 = J, i = I_i (br and spread)")
    p.add_argument("--degree", type=int, default=None, help="degree normalisation for br")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("fc", parents=[common, inst], help="weak-(FC) elements and sequences")
    p.add_argument("what", choices=["find", "maxlen"])
    p.add_argument("--slot", type=int, default=1)
    p.add_argument("--without-J", action="store_true", help="use the family of I-pieces only")
    p.set_defaults(func=cmd_fc)

    p = sub.add_parser("reduce", parents=[common, inst], help="reductions of an I-piece")
    p.add_argument("what", choices=["check"])
    p.add_argument("--slot", type=int, default=1)
    p.add_argument("--generators", nargs="*", help="candidate generators like 'x^2*T1' (';' also separates)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify", parents=[common, inst], help="check one identity on an instance")
    p.add_argument("--theorem", required=True)
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--k0", type=int, default=None)
    p.add_argument("--k", type=int, nargs="*", default=None)
    p.add_argument("--seeds", type=int, nargs="*", default=None)
    p.add_argument("--alt-J", dest="alt_J", nargs="*", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", parents=[common, inst], help="table plus every verification")
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--k0", type=int, default=None)
    p.add_argument("--k", type=int, nargs="*", default=None)
    p.add_argument("--seeds", type=int, nargs="*", default=None)
    p.add_argument("--alt-J", dest="alt_J", nargs="*", default=None)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("cache", parents=[common], help="cache maintenance")
    p.add_argument("what", choices=["gc"])
    p.add_argument("--max-bytes", type=int, required=True)
    p.add_argument("--dir", default=None)
    p.set_defaults(func=cmd_cache)
    return parser


def _emit(payload: dict, out: Optional[str]) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out:
        _cache.atomic_write(__import__("pathlib").Path(out), text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command != "cache" and not args.no_cache:
        _cache.GB_CACHE.configure(args.cache_dir)
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        payload = args.func(args)
    except _Failed as failed:
        payload, code = failed.payload, EXIT_VERIFY
    except MmxError as exc:
        code = exit_code_for(exc)
        print(f"mmx: {type(exc).__name__}: {exc}", file=sys.stderr)
        return code
    except OSError as exc:
        print(f"mmx: {exc}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        if args.command != "cache":
            _cache.GB_CACHE.configure(None)
    payload["exit_code"] = code
    payload["elapsed_ms"] = int((time.perf_counter() - t0) * 1000)
    _emit(payload, args.out)
    return code


def run(argv: Optional[List[str]] = None) -> None:
    sys.exit(main(argv))


if __name__ == "__main__":
    run()

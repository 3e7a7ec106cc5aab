"""The ``modk-lab`` command line.

Output lines start with RESULT, REPORT or ERROR. Exit codes: 0 success,
1 check failure, 2 usage or contract error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import cycle, io, pmod, structural, turing
from .core import Kind, cap_degree, compose, identity, normalize_edges
from .errors import InvalidParameters, ModkError, SearchSpaceTooLarge
from .harness import (all_solutions, brute_force_solve, check_reduction, default_cap,
                      gen_random, materialize)
from .numbers import pf_kl, prime_factors
from .problems import trivial_degree


def _need(params: dict, key: str, name: str):
    if params.get(key) is None:
        raise InvalidParameters(f"{name} needs --{key.replace('_', '-')}")
    return params[key]


REDUCTIONS = {
    "identity": lambda p: identity(),
    "normalize_edges": lambda p: normalize_edges(),
    "cap_degree": lambda p: cap_degree(p.get("k")),
    "eliminate_multiedges": lambda p: cycle.eliminate_multiedges(),
    "bip_to_hyper": lambda p: cycle.bip_to_hyper(),
    "hyper_to_imbalance": lambda p: cycle.hyper_to_imbalance(),
    "imbalance_to_group": lambda p: cycle.imbalance_to_group(),
    "group_to_bipartite": lambda p: cycle.group_to_bipartite(),
    "bip_to_group": lambda p: cycle.bip_to_group(),
    "cycle": lambda p: cycle.completeness_cycle(p.get("stage_cap")),
    "leaf_to_bip2": lambda p: cycle.leaf_to_bip2(),
    "bip2_to_leaf": lambda p: cycle.bip2_to_leaf(),
    "ppad_to_mod_k": lambda p: cycle.ppad_imbalance_to_mod_k(_need(p, "k2", "ppad_to_mod_k")),
    "glue_copies": lambda p: structural.glue_copies(_need(p, "ell2", "glue_copies")),
    "split_versions": lambda p: structural.split_versions(_need(p, "k2", "split_versions")),
    "scale_edges": lambda p: structural.scale_edges(_need(p, "r", "scale_edges")),
    "embed_prime": lambda p: structural.embed_prime(_need(p, "k2", "embed_prime")),
    "collapse_ell": lambda p: structural.collapse_ell(),
    "power_tuples": lambda p: structural.power_tuples(_need(p, "ell2", "power_tuples")),
    "change_k_ell": lambda p: structural.change_k_ell(_need(p, "k2", "change_k_ell"),
                                                        _need(p, "ell2", "change_k_ell"),
                                                        p.get("stage_cap")),
    "mod2k_to_modk": lambda p: pmod.mod2k_to_modk(),
    "modk_to_mod2k": lambda p: pmod.modk_to_mod2k(),
    "modk_to_group": lambda p: pmod.modk_to_group(),
    "group_to_modk": lambda p: pmod.group_to_modk(),
    "group_pow2_to_mod": lambda p: pmod.group_pow2_to_mod(),
    "normalize_pm1": lambda p: turing.normalize_pm1(),
}


def build_chain(names, params: dict):
    """Compose reductions named in ``names`` (a list or a comma-separated string)."""
    if isinstance(names, str):
        names = [s.strip() for s in names.split(",") if s.strip()]
    reds = []
    for name in names:
        if name not in REDUCTIONS:
            raise InvalidParameters(f"unknown reduction {name!r}; known: {', '.join(REDUCTIONS)}")
        reds.append(REDUCTIONS[name](params))
    return compose(*reds)


def _params(args) -> dict:
    return {key: getattr(args, key, None) for key in ("k", "k2", "ell2", "r", "stage_cap")}


def _emit(tag: str, text: str):
    print(f"{tag} {text}")


def cmd_gen(args) -> int:
    inst = gen_random(args.kind, args.n, args.k, args.ell, seed=args.seed, defects=args.defects)
    io.save(inst, args.out)
    _emit("RESULT", f"wrote {inst.describe()} to {args.out}")
    return 0


def cmd_solve(args) -> int:
    inst = io.load(args.input)
    sol = brute_force_solve(inst, args.cap)
    if args.json:
        _emit("RESULT", json.dumps(io.solution_to_dict(sol)))
    else:
        _emit("RESULT", repr(sol))
    return 0


def cmd_reduce(args) -> int:
    inst = io.load(args.input)
    params = _params(args)
    red = build_chain(args.chain, params)
    out = red.forward(inst)
    cap = args.materialize_cap if args.materialize_cap is not None else default_cap()
    try:
        io.save(materialize(out, cap), args.out)
        _emit("RESULT", f"wrote {out.describe()} to {args.out}")
    except SearchSpaceTooLarge:
        src = str(Path(args.input).resolve())
        Path(args.out).write_text(json.dumps(io.pipeline_doc(
            src, [s.strip() for s in args.chain.split(",")], params)) + "\n")
        _emit("RESULT", f"wrote pipeline descriptor for {out.describe()} to {args.out}")
    return 0


def cmd_check(args) -> int:
    inst = io.load(args.input)
    red = build_chain(args.chain, _params(args))
    report = check_reduction(red, inst, args.mode, samples=args.samples, seed=args.seed,
                             cap=args.cap)
    _emit("REPORT", report.summary())
    for f in report.failures[:10]:
        _emit("REPORT", f"failure {f}")
    return 0 if not report.failures else 1


def cmd_flatten(args) -> int:
    if args.plan:
        docs = json.loads(Path(args.plan).read_text())
        inp = tuple(io.instance_from_dict(d) for d in docs["inputs"])
    else:
        inp = tuple(gen_random(Kind.IMBALANCE, args.n, args.p, seed=args.seed + j)
                    for j in range(3))
    if any(i.k != args.p for i in inp):
        raise InvalidParameters(f"plan inputs must be Imbalance-mod-{args.p}")
    plan = turing.two_query_plan(args.p)
    flat, extract = turing.flatten(plan, inp)
    sols = all_solutions(flat, args.cap)
    good = sum(plan.answer_check(inp, extract(s)) for s in sols)
    seq = turing.run_plan_sequential(plan, inp, brute_force_solve)
    _emit("REPORT", f"flattened={flat.describe()} solutions={len(sols)} extracted_ok={good} "
                    f"sequential_ok={plan.answer_check(inp, seq)}")
    return 0 if sols and good == len(sols) and plan.answer_check(inp, seq) else 1


def cmd_info(args) -> int:
    inst = io.load(args.input)
    _emit("RESULT", inst.describe())
    if inst.kind is Kind.MOD:
        _emit("RESULT", f"PF({inst.k}) = {prime_factors(inst.k)}")
        return 0
    d = trivial_degree(inst)
    _emit("RESULT", f"trivial degree = {d}")
    if inst.k:
        _emit("RESULT", f"PF({inst.k}) = {prime_factors(inst.k)}")
        if d % inst.k:
            _emit("RESULT", f"PF({inst.k},{d % inst.k}) = {pf_kl(inst.k, d % inst.k)}")
    return 0


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modk-lab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a random instance")
    g.add_argument("--kind", required=True, help="bipartite|hyper|imbalance|group|mod|leaf")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int)
    g.add_argument("--ell", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--defects", type=int)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="brute-force a solution")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--json", action="store_true")
    s.add_argument("--cap", type=int)
    s.set_defaults(func=cmd_solve)

    def chain_args(p):
        p.add_argument("--in", dest="input", required=True)
        p.add_argument("--chain", required=True, help="comma-separated reduction names")
        p.add_argument("--k", type=int, help="modulus for cap_degree")
        p.add_argument("--k2", type=int)
        p.add_argument("--ell2", type=int)
        p.add_argument("--r", type=int)
        p.add_argument("--stage-cap", type=int, dest="stage_cap",
                       help="tabulate every stage of composite chains")

    r = sub.add_parser("reduce", help="apply reductions")
    chain_args(r)
    r.add_argument("--out", required=True)
    r.add_argument("--materialize-cap", type=int, dest="materialize_cap")
    r.set_defaults(func=cmd_reduce)

    c = sub.add_parser("check", help="verify pull-backs of a reduction chain")
    chain_args(c)
    c.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    c.add_argument("--samples", type=int, default=200)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--cap", type=int)
    c.set_defaults(func=cmd_check)

    f = sub.add_parser("flatten", help="flatten the two-query demo plan")
    f.add_argument("--plan", help="JSON file with three Imbalance instances under 'inputs'")
    f.add_argument("--p", type=int, default=3)
    f.add_argument("--n", type=int, default=2)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--cap", type=int)
    f.set_defaults(func=cmd_flatten)

    i = sub.add_parser("info", help="parameters and prime-factor sets")
    i.add_argument("--in", dest="input", required=True)
    i.set_defaults(func=cmd_info)
    return ap


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.func(args)
    except (ModkError, ValueError, KeyError, OSError) as e:
        _emit("ERROR", f"{type(e).__name__}: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""JSON instance files, solution encoding and pipeline descriptors."""

from __future__ import annotations

import json
from pathlib import Path

from .core import (BadDegreeVertex, BadHyperedge, BrokenOrbit, InconsistentEdge, Instance, Kind,
                   ShortOrbit, Solution)
from .errors import InvalidParameters, MalformedCandidate, SearchSpaceTooLarge
from . import problems

FORMAT = "modk-lab/instance-v1"
PIPELINE = "modk-lab/pipeline-v1"
DENSE_LIMIT = 16


def _row(kind: Kind, row) -> list:
    if kind is Kind.HYPER:
        return [list(e) for e in row]
    return list(row)


def instance_to_dict(inst: Instance) -> dict:
    """Every oracle row, dense (one row per input word) up to DENSE_LIMIT
    bits and over the support as ``[x, row]`` pairs beyond that."""
    tables, sparse = {}, False
    for name, o in sorted(inst.oracles.items()):
        if o.in_width <= DENSE_LIMIT:
            tables[name] = [_row(inst.kind, o(x)) for x in range(1 << o.in_width)]
        elif inst.support_fn is not None:
            sparse = True
            tables[name] = [[x, _row(inst.kind, o(x))] for x in inst.support()]
        else:
            raise SearchSpaceTooLarge(f"{o.in_width}-bit table without a support set")
    doc = {"format": FORMAT, "kind": inst.kind.value, "n": inst.n, "k": inst.k,
           "ell": inst.ell, "m": inst.m, "tables": tables}
    if inst.multi:
        doc["multi"] = True
    if sparse:
        doc["sparse"] = True
    return doc


def instance_from_dict(doc: dict) -> Instance:
    if doc.get("format") != FORMAT:
        raise InvalidParameters(f"not a {FORMAT} document")
    kind = Kind(doc["kind"])
    n, k, ell, m = doc["n"], doc["k"], doc.get("ell"), doc.get("m")
    tables = doc["tables"]
    if doc.get("sparse"):
        keys = None
        rows = {}
        for name, pairs in tables.items():
            rows[name] = {x: r for x, r in pairs}
            keys = sorted(rows[name])
        support = (lambda: keys)
    else:
        rows, support = tables, None
    if kind is Kind.BIPARTITE:
        inst = problems.make_bipartite(n, k, rows["C"], ell, multi=doc.get("multi", False),
                                       support_fn=support)
    elif kind is Kind.HYPER:
        inst = problems.make_hyper(n, k, rows["C"], ell, support_fn=support)
    elif kind is Kind.IMBALANCE:
        inst = problems.make_imbalance(n, k, rows["S"], rows["P"], ell, support_fn=support)
    elif kind is Kind.GROUP:
        inst = problems.make_group(n, k, m, _orbit_rows(rows["C"]))
    elif kind is Kind.MOD:
        inst = problems.make_mod(n, k, _orbit_rows(rows["C"]))
    else:
        inst = problems.make_leaf(n, rows["C"])
    return inst


def _orbit_rows(rows):
    if isinstance(rows, dict):
        return {x: (r[0] if r else x) for x, r in rows.items()}
    return [r[0] if r else x for x, r in enumerate(rows)]


def save(inst: Instance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst), separators=(",", ":")) + "\n")


def load(path) -> Instance:
    """An instance file, or a pipeline descriptor evaluated lazily."""
    doc = json.loads(Path(path).read_text())
    if doc.get("format") == PIPELINE:
        return load_pipeline(doc, Path(path).parent)
    return instance_from_dict(doc)


def dumps(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), sort_keys=True)


# ---------------------------------------------------------------- pipelines

def pipeline_doc(source: str, chain: list[str], params: dict) -> dict:
    return {"format": PIPELINE, "input": source, "chain": chain, "params": params}


def load_pipeline(doc: dict, base: Path = Path(".")) -> Instance:
    from .cli import build_chain

    src = Path(doc["input"])
    inst = load(src if src.is_absolute() else base / src)
    return build_chain(doc["chain"], doc.get("params", {})).forward(inst)


# ---------------------------------------------------------------- solutions

_SOLUTIONS = {c.__name__: c for c in (BadDegreeVertex, InconsistentEdge, ShortOrbit,
                                      BrokenOrbit, BadHyperedge)}


def solution_to_dict(sol) -> dict:
    if isinstance(sol, tuple) and len(sol) == 2 and isinstance(sol[0], int):
        return {"part": sol[0], "solution": solution_to_dict(sol[1])}
    doc = {"type": type(sol).__name__}
    doc.update({k: list(v) if isinstance(v, tuple) else v for k, v in vars(sol).items()})
    return doc


def solution_from_dict(doc: dict) -> Solution:
    if "part" in doc:
        return doc["part"], solution_from_dict(doc["solution"])
    cls = _SOLUTIONS.get(doc.get("type"))
    if cls is None:
        raise MalformedCandidate(f"unknown solution type {doc.get('type')!r}")
    fields = {k: tuple(v) if isinstance(v, list) else v for k, v in doc.items() if k != "type"}
    return cls(**fields)

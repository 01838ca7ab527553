"""JSON documents for hyperconfusions, pmfs, environments and setting specs.

Schemas::

    hyperconfusion  {"labels": [...], "maxs": [[label, ...], ...]}
    probability     {"labels": [...], "pmf": [...]}
    environment     {"labels": [...], "atoms": {"X": {"maxs": [...]}, ...}}
    channel         {"inputs": [...], "outputs": [...], "matrix": [[...], ...]}
    algebra         {"labels": [...], "meet": [[...]], "join": [[...]], "imp": [[...]],
                     "bot": i, "top": j}

Setting specs put "labels" and "pmf" at top level and the hyperconfusions
as {"maxs": ...} objects under their names.
"""
from __future__ import annotations

import json
import math
from typing import Any, Mapping

import numpy as np

from .abstract import FiniteHeyting
from .core import Hyperconfusion, SampleSpace, from_maximal_sets
from .entropy import ProbSpace
from .errors import InputError
from .jscc import ChannelSpec, SetValuedMap
from .settings import IndexCodingSpec, User


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from None


def _get(doc: Mapping, key: str, what: str):
    if not isinstance(doc, Mapping):
        raise InputError(f"{what} must be a JSON object")
    if key not in doc:
        raise InputError(f"{what} is missing {key!r}")
    return doc[key]


def _list(value, what: str) -> list:
    if not isinstance(value, list):
        raise InputError(f"{what} must be a list")
    return value


def space_from_json(doc: Mapping, what: str = "document") -> SampleSpace:
    labels = _list(_get(doc, "labels", what), f"{what} labels")
    return SampleSpace(tuple(str(v) for v in labels))


def hyperconfusion_from_json(doc: Mapping, space: SampleSpace | None = None,
                             what: str = "hyperconfusion") -> Hyperconfusion:
    if space is None:
        space = space_from_json(doc, what)
    sets = _list(_get(doc, "maxs", what), f"{what} maxs")
    for s in sets:
        _list(s, f"each set in {what} maxs")
    if not sets:
        raise InputError(f"{what} needs at least one set (use [[]] for the null information)")
    return from_maximal_sets(space, sets)


def hyperconfusion_to_json(x: Hyperconfusion, with_labels: bool = True) -> dict:
    out = {"maxs": x.maxs_labels()}
    if with_labels:
        out = {"labels": list(x.space.labels), **out}
    return out


def prob_from_json(doc: Mapping, space: SampleSpace | None = None, what: str = "probability") -> ProbSpace:
    if space is None:
        space = space_from_json(doc, what)
    elif "labels" in doc and [str(v) for v in doc["labels"]] != list(space.labels):
        raise InputError(f"{what} labels differ from the hyperconfusion's labels")
    pmf = _list(_get(doc, "pmf", what), f"{what} pmf")
    if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in pmf):
        raise InputError(f"{what} pmf entries must be numbers")
    return ProbSpace(space, tuple(pmf))


def prob_to_json(p: ProbSpace) -> dict:
    return {"labels": list(p.space.labels), "pmf": list(p.pmf)}


def environment_from_json(doc: Mapping) -> tuple[SampleSpace, dict[str, Hyperconfusion]]:
    space = space_from_json(doc, "environment")
    atoms = _get(doc, "atoms", "environment")
    if not isinstance(atoms, Mapping):
        raise InputError("environment atoms must be an object")
    env = {str(k): hyperconfusion_from_json(v, space, f"atom {k}") for k, v in atoms.items()}
    return space, env


def environment_to_json(space: SampleSpace, env: Mapping[str, Hyperconfusion]) -> dict:
    return {"labels": list(space.labels),
            "atoms": {k: hyperconfusion_to_json(v, False) for k, v in sorted(env.items())}}


def channel_from_json(doc: Mapping) -> ChannelSpec:
    return ChannelSpec(tuple(_list(_get(doc, "inputs", "channel"), "channel inputs")),
                       tuple(_list(_get(doc, "outputs", "channel"), "channel outputs")),
                       tuple(tuple(_list(r, "matrix row")) for r in _list(_get(doc, "matrix", "channel"), "matrix")))


def channel_to_json(ch: ChannelSpec) -> dict:
    return {"inputs": list(ch.inputs), "outputs": list(ch.outputs), "matrix": [list(r) for r in ch.matrix]}


def map_to_json(beta: SetValuedMap) -> dict:
    return {"source": list(beta.source.labels), "target": list(beta.target.labels),
            "images": {lab: beta.target.labels_of(b) for lab, b in zip(beta.source.labels, beta.images)}}


def index_spec_from_json(doc: Mapping) -> tuple[IndexCodingSpec, ProbSpace]:
    """{"labels", "pmf", "sources": {name: {"maxs"}}, "users": [{"has", "wants", "event"}],
    "success": [[user, ...], ...]} with 0-based user indices; "event" lists labels or is null."""
    space = space_from_json(doc, "index coding spec")
    p = prob_from_json(doc, space, "index coding spec")
    srcs = _get(doc, "sources", "index coding spec")
    if not isinstance(srcs, Mapping):
        raise InputError("sources must be an object")
    sources = {str(k): hyperconfusion_from_json(v, space, f"source {k}") for k, v in srcs.items()}
    users = []
    for u in _list(_get(doc, "users", "index coding spec"), "users"):
        if not isinstance(u, Mapping):
            raise InputError("each user must be an object")
        ev = u.get("event")
        users.append(User(tuple(_list(u.get("has", []), "has")), tuple(_list(u.get("wants", []), "wants")),
                          None if ev is None else space.subset(_list(ev, "event"))))
    success = []
    for s in _list(_get(doc, "success", "index coding spec"), "success"):
        s = _list(s, "success set")
        if any(isinstance(i, bool) or not isinstance(i, int) for i in s):
            raise InputError("success sets list user indices")
        success.append(frozenset(s))
    return IndexCodingSpec(sources, users, success), p


def algebra_from_json(doc: Mapping) -> FiniteHeyting:
    tabs = {k: np.asarray(_list(_get(doc, k, "algebra"), k)) for k in ("meet", "join", "imp")}
    return FiniteHeyting(tuple(_list(_get(doc, "labels", "algebra"), "labels")), tabs["meet"], tabs["join"],
                         tabs["imp"], int(_get(doc, "bot", "algebra")), int(_get(doc, "top", "algebra")))


def algebra_to_json(h: FiniteHeyting) -> dict:
    return {"labels": list(h.labels), "meet": h.meet.tolist(), "join": h.join.tolist(),
            "imp": h.imp.tolist(), "bot": int(h.bot), "top": int(h.top)}


def bits_value(v: float) -> str | float:
    """Entropy for JSON output: rounded to 6 places, or the string "inf"."""
    if math.isinf(v):
        return "inf"
    return round(v, 6) + 0.0


def format_bits(v: float) -> str:
    if math.isinf(v):
        return "inf"
    return f"{v + 0.0:.6f}".replace("-0.000000", "0.000000")

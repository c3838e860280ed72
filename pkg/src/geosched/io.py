"""JSON documents for instances, covers, schedules and caching instances.

Integers of magnitude ``2**53`` or more are written as decimal strings and
accepted back in either form.
"""

from __future__ import annotations

import json
from pathlib import Path

from .gencache import CacheInterval, CachingInstance
from .gsp import Constant, DeadlineStep, GspInstance, Job, Schedule, SquaredFlow, Table
from .reduction import Cover, R2cInstance, R2cPoint, R2cRect

SAFE = 2**53


class DocumentError(ValueError):
    pass


def num(v: int):
    return str(v) if abs(v) >= SAFE else v


def to_int(v) -> int:
    if isinstance(v, bool):
        raise DocumentError(f"expected an integer, got {v!r}")
    if isinstance(v, int):
        return v
    if isinstance(v, str) and v.lstrip("-").isdigit():
        return int(v)
    raise DocumentError(f"expected an integer, got {v!r}")


def weight_to_json(w) -> dict:
    if isinstance(w, Constant):
        return {"kind": "constant", "w": num(w.w)}
    if isinstance(w, DeadlineStep):
        return {"kind": "deadline", "d": num(w.d), "w": num(w.w)}
    if isinstance(w, SquaredFlow):
        return {"kind": "squared_flow"}
    return {"kind": "table", "steps": [[num(t), num(v)] for t, v in w.steps]}


def weight_from_json(doc: dict):
    kind = doc.get("kind")
    if kind == "constant":
        return Constant(to_int(doc["w"]))
    if kind == "deadline":
        return DeadlineStep(to_int(doc["d"]), to_int(doc["w"]))
    if kind == "squared_flow":
        return SquaredFlow()
    if kind == "table":
        return Table(tuple((to_int(t), to_int(v)) for t, v in doc["steps"]))
    raise DocumentError(f"unknown weight kind {kind!r}")


def instance_to_json(inst: GspInstance) -> dict:
    return {
        "jobs": [
            {"id": j.id, "release": num(j.release), "size": num(j.size), "weight": weight_to_json(j.weight)}
            for j in inst.jobs
        ]
    }


def instance_from_json(doc: dict) -> GspInstance:
    try:
        jobs = tuple(
            Job(str(j["id"]), to_int(j["release"]), to_int(j["size"]), weight_from_json(j["weight"]))
            for j in doc["jobs"]
        )
        return GspInstance(jobs, to_int(doc.get("horizon", 0)))
    except (KeyError, TypeError) as exc:
        raise DocumentError(f"malformed instance document: {exc!r}") from exc


def r2c_to_json(r2c: R2cInstance) -> dict:
    return {
        "points": [
            {"x": p.x, "y": p.y, "demand": num(p.demand), "window": list(p.window)} for p in r2c.points
        ],
        "rects": [
            {
                "id": r.id,
                "job": r.job,
                "class": r.k,
                "xmax": r.xmax,
                "y": [r.ylo, r.yhi],
                "capacity": num(r.capacity),
                "weight": num(r.weight),
            }
            for r in r2c.rects
        ],
    }


def r2c_from_json(doc: dict) -> R2cInstance:
    try:
        points = tuple(
            R2cPoint(to_int(p["x"]), to_int(p["y"]), to_int(p["demand"]), tuple(p.get("window", (0, 0))))
            for p in doc["points"]
        )
        rects = tuple(
            R2cRect(
                str(r["id"]),
                to_int(r["xmax"]),
                to_int(r["y"][0]),
                to_int(r["y"][1]),
                to_int(r["capacity"]),
                to_int(r["weight"]),
                r.get("job"),
                r.get("class"),
            )
            for r in doc["rects"]
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise DocumentError(f"malformed R2C document: {exc!r}") from exc
    return R2cInstance(points, rects)


def schedule_to_json(s: Schedule) -> dict:
    return {str(t): j for t, j in sorted(s.slots.items())}


def schedule_from_json(doc: dict) -> Schedule:
    return Schedule({int(t): str(j) for t, j in doc.items()})


def cover_to_json(cover: Cover) -> list:
    return [{"id": i, "stage": cover.origin.get(i, "")} for i in sorted(cover.ids)]


def cover_from_json(doc: list) -> Cover:
    ids = [c["id"] if isinstance(c, dict) else c for c in doc]
    origin = {c["id"]: c.get("stage", "") for c in doc if isinstance(c, dict)}
    return Cover(frozenset(ids), origin)


def caching_to_json(inst: CachingInstance) -> dict:
    return {
        "timeline": [{"t": t, "demand": num(inst.demands[t])} for t in inst.times()],
        "intervals": [
            {"id": iv.id, "start": iv.start, "end": iv.end, "size": num(iv.size), "weight": num(iv.weight)}
            for iv in inst.intervals
        ],
    }


def caching_from_json(doc: dict) -> CachingInstance:
    try:
        demands = {to_int(e["t"]): to_int(e["demand"]) for e in doc["timeline"]}
        intervals = [
            CacheInterval(str(iv["id"]), to_int(iv["start"]), to_int(iv["end"]), to_int(iv["size"]), to_int(iv["weight"]))
            for iv in doc["intervals"]
        ]
    except (KeyError, TypeError) as exc:
        raise DocumentError(f"malformed caching document: {exc!r}") from exc
    return CachingInstance(demands, intervals)


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def load(path) -> object:
    """Parse a JSON file; syntax errors carry ``file:line:col``."""
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc

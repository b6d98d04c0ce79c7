"""Bundled reflexive polytopes (ranks 1 to 4).

Each JSON file holds ``name``, ``rank`` and ``vertices`` of a reflexive
polytope. The directory can be overridden with ``TORICMIRROR_CORPUS``.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .polytope import LatticePolytope

CORPUS_ENV = "TORICMIRROR_CORPUS"

# polytopes whose face fan is smooth (so the toric variety it defines is smooth)
SMOOTH_FACE_FAN = ("segment", "triangle", "diamond", "pentagon-smooth", "hexagon", "octahedron", "simplex3", "cross4")


def corpus_dir() -> Path:
    override = os.environ.get(CORPUS_ENV)
    if override:
        return Path(override)
    return Path(__file__).with_name("corpus")


def names() -> list[str]:
    return sorted(p.stem for p in corpus_dir().glob("*.json"))


def load(name: str) -> LatticePolytope:
    path = corpus_dir() / f"{name}.json"
    if not path.exists():
        raise KeyError(f"no corpus polytope named {name!r}")
    return LatticePolytope.load(path)


def load_all(max_rank: int | None = None) -> dict[str, LatticePolytope]:
    out = {}
    for n in names():
        poly = load(n)
        if max_rank is None or poly.rank <= max_rank:
            out[n] = poly
    return out


def write_entry(name: str, poly: LatticePolytope, directory: Path | None = None) -> None:
    directory = directory or corpus_dir()
    record = {"name": name, **poly.to_json()}
    (directory / f"{name}.json").write_text(json.dumps(record) + "\n")

"""Finite relational structures and their JSON form."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from ..errors import StructureError
from .syntax import Signature


@dataclass(frozen=True)
class FinStructure:
    signature: Signature
    domain: tuple[str, ...]
    relations: Mapping[str, frozenset]
    name: str = ""

    def __post_init__(self):
        domain = tuple(str(d) for d in self.domain)
        if len(set(domain)) != len(domain):
            raise StructureError("domain elements must be distinct")
        dom = set(domain)
        rels = {}
        for sym, k in self.signature.arities.items():
            tuples = frozenset(tuple(str(x) for x in t) for t in self.relations.get(sym, ()))
            for t in tuples:
                if len(t) != k:
                    raise StructureError(f"tuple {t} has the wrong arity for {sym!r}")
                bad = [x for x in t if x not in dom]
                if bad:
                    raise StructureError(f"tuple {t} of {sym!r} uses {bad[0]!r} outside the domain")
            rels[sym] = tuples
        extra = set(self.relations) - set(self.signature.arities)
        if extra:
            raise StructureError(f"relation {sorted(extra)[0]!r} is not in the signature")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "relations", rels)

    def __hash__(self):
        return hash((self.signature, self.domain,
                     tuple(sorted((k, tuple(sorted(v))) for k, v in self.relations.items()))))

    def __eq__(self, other):
        return (isinstance(other, FinStructure) and self.signature == other.signature
                and self.domain == other.domain and self.relations == other.relations)

    def __len__(self):
        return len(self.domain)

    def to_json(self) -> dict:
        return {
            "signature": dict(self.signature.arities),
            "domain": list(self.domain),
            "relations": {k: sorted(list(t) for t in v) for k, v in sorted(self.relations.items())},
        }


def structure_from_json(obj: Mapping, name: str = "") -> FinStructure:
    try:
        sig = Signature(dict(obj["signature"]), frozenset(obj.get("infix", ())))
        return FinStructure(sig, tuple(obj["domain"]),
                            {k: frozenset(tuple(t) for t in v)
                             for k, v in obj.get("relations", {}).items()},
                            name=name)
    except KeyError as exc:
        raise StructureError(f"structure JSON is missing {exc.args[0]!r}") from None


def load_structure(path) -> FinStructure:
    path = Path(path)
    with open(path) as fh:
        return structure_from_json(json.load(fh), name=path.stem)


def all_structures(signature: Signature, size: int) -> list[FinStructure]:
    """Every structure on the domain ``0..size-1`` (labelled, not up to isomorphism)."""
    domain = tuple(str(i) for i in range(size))
    per_symbol = []
    for sym, k in sorted(signature.arities.items()):
        tuples = list(itertools.product(domain, repeat=k))
        per_symbol.append((sym, tuples))
    out = []
    masks = [range(2 ** len(t)) for _, t in per_symbol]
    for choice in itertools.product(*masks):
        rels = {}
        for (sym, tuples), mask in zip(per_symbol, choice):
            rels[sym] = frozenset(t for i, t in enumerate(tuples) if mask >> i & 1)
        out.append(FinStructure(signature, domain, rels))
    return out


def isomorphic(a: FinStructure, b: FinStructure) -> bool:
    """Brute-force isomorphism test over all bijections (small domains only)."""
    if a.signature != b.signature or len(a.domain) != len(b.domain):
        return False
    if any(len(a.relations[s]) != len(b.relations[s]) for s in a.relations):
        return False
    for perm in itertools.permutations(b.domain):
        f = dict(zip(a.domain, perm))
        if all(frozenset(tuple(f[x] for x in t) for t in a.relations[s]) == b.relations[s]
               for s in a.relations):
            return True
    return False

"""Regenerate docs/identity_manifest.md from the shipped registry."""
from pathlib import Path

from cmtrace.registry import load_registry

OUT = Path(__file__).resolve().parent.parent / "docs" / "identity_manifest.md"

HEADER = """# Identity manifest

Every displayed identity the suite checks, one row per registry id. The
registry (`src/cmtrace/data/identities.json`) is the source of truth; this
table is regenerated by `scripts/make_manifest.py` and a test keeps the two
in sync.

Witness families: `cm` rank-one commutator points, `traceless` and
`generic` random integer pairs, `commuting` the three commuting families,
`rank2` constructed pairs with rank([X,Y]+I) = 2, `tuple` random 7-tuples,
`scaling` a pair together with (alpha X, Y).

The identity for rank-2 pairs is checked in the forward direction only
(rank 2 implies 1 + v + w = 0). The converse quantifies over a variety that
has no convenient exact sampler.

| id | family | n | statement |
|----|--------|---|-----------|
"""


def render() -> str:
    reg = load_registry()
    rows = []
    for i, e in sorted(reg["identities"].items()):
        ns = ",".join(str(n) for n in e.get("n", [3]))
        rows.append(f"| `{i}` | {e['family']} | {ns} | {e['description'].replace('|', '/')} |")
    return HEADER + "\n".join(rows) + f"\n\nRegistry version {reg['version']}.\n"


if __name__ == "__main__":
    OUT.write_text(render())
    print(f"wrote {OUT}")

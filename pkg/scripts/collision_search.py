"""Look for distinct multidegrees with equal invariants.

Two complete intersections of the same dimension whose total degree, Euler
characteristic and Pontrjagin classes all agree are the only pairs where the
decision can end up indeterminate.  This enumerates small multidegrees and
prints every collision found.
"""
import argparse
import itertools
from collections import defaultdict
from dataclasses import dataclass

from surgobs import complete_intersection as ci


@dataclass
class Config:
    n_min: int = 3
    n_max: int = 8
    max_degree: int = 12
    max_codim: int = 4
    max_total: int = 10 ** 6


def multidegrees(n, cfg):
    for r in range(cfg.max_codim + 1):
        for ds in itertools.combinations_with_replacement(range(cfg.max_degree, 1, -1), r):
            prod = 1
            for d in ds:
                prod *= d
            if prod <= cfg.max_total:
                yield ci.MultiDegree(n, ds)


def search(cfg):
    found = []
    counted = 0
    for n in range(cfg.n_min, cfg.n_max + 1):
        groups = defaultdict(list)
        for m in multidegrees(n, cfg):
            groups[ci.invariants(m)].append(m.degrees)
            counted += 1
        found += [(n, ms) for ms in groups.values() if len(ms) > 1]
    return counted, found


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, val in vars(Config()).items():
        ap.add_argument("--" + name.replace("_", "-"), type=int, default=val)
    cfg = Config(**{k: v for k, v in vars(ap.parse_args()).items()})
    counted, found = search(cfg)
    print(f"multidegrees examined: {counted}")
    print(f"collisions: {len(found)}")
    for n, ms in found:
        print(f"  n={n}: " + "  ".join(",".join(map(str, m)) or "()" for m in ms))


if __name__ == "__main__":
    main()

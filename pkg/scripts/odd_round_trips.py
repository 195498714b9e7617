"""Random round trips for the odd reduction.

Moves random hyperbolic planes back to the last coordinate plane and reduces
random split pairs to elementary representatives, counting failures.
"""
import argparse
import random
import time
from dataclasses import dataclass

from surgobs import intlin
from surgobs.odd_l import (Prop9Case, apply_word, is_elementary_rep, prop9_move_plane, theorem5_reduce,
                           word_int_product)
from surgobs.samples import random_plane_instance, random_split_instance


@dataclass
class Config:
    seed: int = 0
    planes: int = 200
    splits: int = 200
    max_r: int = 4


def plane_round_trips(rng, cfg):
    bad = 0
    for k in range(cfg.planes):
        eps = (1, -1)[k % 2]
        inst = random_plane_instance(rng, rng.randint(1, cfg.max_r), eps)
        case = Prop9Case.Q_ODD if eps == -1 else Prop9Case.Q_EVEN_WITH_H_PLUS
        word = prop9_move_plane(inst.V, inst.H, case, inst.h_plus if eps == 1 else None)
        n = 2 * inst.r + 2
        A = word_int_product(word, eps, inst.r + 1)
        target = ([int(i == n - 2) for i in range(n)], [int(i == n - 1) for i in range(n)])
        if (intlin.matvec(A, inst.H[0]), intlin.matvec(A, inst.H[1])) != target:
            bad += 1
    return bad


def split_reductions(rng, cfg):
    bad = 0
    for _ in range(cfg.splits):
        inst = random_split_instance(rng)
        res = theorem5_reduce(inst.P, inst.split)
        if res is None or not is_elementary_rep(res[1]) or apply_word(inst.P, res[0]) != res[1]:
            bad += 1
    return bad


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, val in vars(Config()).items():
        ap.add_argument("--" + name.replace("_", "-"), type=int, default=val)
    cfg = Config(**vars(ap.parse_args()))
    rng = random.Random(cfg.seed)
    t0 = time.perf_counter()
    print(f"plane moves: {cfg.planes} runs, {plane_round_trips(rng, cfg)} failures")
    print(f"split reductions: {cfg.splits} runs, {split_reductions(rng, cfg)} failures")
    print(f"time {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()

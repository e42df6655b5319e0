#!/usr/bin/env python3
"""Regenerates the bundled topologies and the sample vehicle trace.

Output is fixed by the seeds below; rerunning rewrites identical files.
"""
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent


def isp(seed, core, agg, access):
    """Three-level ISP-like graph: a meshed core, dual-homed aggregation
    routers with a few lateral links, and access routers hanging below."""
    rng = random.Random(seed)
    edges = set()

    def add(u, v):
        if u != v:
            edges.add((min(u, v), max(u, v)))

    core_ids = list(range(core))
    for i in core_ids:
        add(i, (i + 1) % core)
    for i in core_ids:
        for j in core_ids:
            if i < j and rng.random() < 0.35:
                add(i, j)
    agg_ids = list(range(core, core + agg))
    for a in agg_ids:
        for c in rng.sample(core_ids, 2):
            add(a, c)
    for a in agg_ids:
        if rng.random() < 0.3:
            add(a, rng.choice(agg_ids))
    acc_ids = list(range(core + agg, core + agg + access))
    for x in acc_ids:
        add(x, rng.choice(agg_ids))
        if rng.random() < 0.25:
            add(x, rng.choice(agg_ids))
    # short chains below some access routers, as in metro rings
    nxt = core + agg + access
    for x in acc_ids:
        if rng.random() < 0.15:
            add(x, nxt)
            nxt += 1
    return sorted(edges), nxt


def write_topology(name, seed, core, agg, access):
    edges, n = isp(seed, core, agg, access)
    lines = [f"# {name}: {n} routers, {len(edges)} links, seed {seed}"]
    lines += [f"{u} {v}" for u, v in edges]
    (HERE / "topologies" / f"{name}.txt").write_text("\n".join(lines) + "\n")


def manhattan(seed, stations, seconds, side=2160.0, block=240.0):
    """Vehicles on a Manhattan street grid, sampled once per second."""
    rng = random.Random(seed)
    streets = [block / 2 + block * i for i in range(int(side // block))]
    rows = []
    for s in range(stations):
        x, y = rng.choice(streets), rng.choice(streets)
        heading = rng.choice([(1, 0), (-1, 0), (0, 1), (0, -1)])
        speed = rng.uniform(8.0, 14.0)
        for t in range(seconds + 1):
            rows.append((s, t, x, y))
            step = speed
            while step > 0:
                # distance to the next intersection along the heading
                pos = x if heading[0] else y
                d = heading[0] or heading[1]
                nxt = min((c for c in streets if (c - pos) * d > 1e-9), key=lambda c: abs(c - pos), default=None)
                if nxt is None:
                    heading = (-heading[0], -heading[1])
                    continue
                gap = abs(nxt - pos)
                if gap > step:
                    x += heading[0] * step
                    y += heading[1] * step
                    step = 0
                else:
                    x += heading[0] * gap
                    y += heading[1] * gap
                    step -= gap
                    r = rng.random()
                    if r < 0.25:
                        heading = (heading[1], heading[0])
                    elif r < 0.5:
                        heading = (-heading[1], -heading[0])
    lines = ["station,time_s,x_m,y_m"]
    lines += [f"{s},{t},{x:.1f},{y:.1f}" for s, t, x, y in rows]
    (HERE / "traces" / "manhattan.csv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    write_topology("isp_small", 11, 6, 14, 30)
    write_topology("isp_medium", 23, 10, 28, 56)
    write_topology("isp_large", 37, 14, 50, 110)
    manhattan(5, 50, 240)

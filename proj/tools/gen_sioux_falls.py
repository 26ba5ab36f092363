#!/usr/bin/env python3
"""Writes the Sioux Falls bundle (network, demand, scenarios) into data/sioux_falls.

The road layer is the standard 24-node, 76-link topology with its link
capacities and free-flow times (minutes, used as km at 60 km/h). The PT layer
mirrors it; a backbone of PT links exists, the rest are build candidates.
Demand is a deterministic gravity table since no published request table exists.
"""
import argparse
import json
import pathlib

# (tail, head, capacity veh/h, free-flow time min)
LINKS = [
    (1, 2, 25900.20, 6), (1, 3, 23403.47, 4), (2, 1, 25900.20, 6), (2, 6, 4958.18, 5),
    (3, 1, 23403.47, 4), (3, 4, 17110.52, 4), (3, 12, 23403.47, 4), (4, 3, 17110.52, 4),
    (4, 5, 17782.79, 2), (4, 11, 4908.83, 6), (5, 4, 17782.79, 2), (5, 6, 4948.89, 4),
    (5, 9, 10000.00, 5), (6, 2, 4958.18, 5), (6, 5, 4948.89, 4), (6, 8, 4898.59, 2),
    (7, 8, 7841.81, 3), (7, 18, 23403.47, 2), (8, 6, 4898.59, 2), (8, 7, 7841.81, 3),
    (8, 9, 5050.19, 10), (8, 16, 5045.82, 5), (9, 5, 10000.00, 5), (9, 8, 5050.19, 10),
    (9, 10, 13915.79, 3), (10, 9, 13915.79, 3), (10, 11, 10000.00, 5), (10, 15, 13512.00, 6),
    (10, 16, 4854.92, 4), (10, 17, 4993.51, 8), (11, 4, 4908.83, 6), (11, 10, 10000.00, 5),
    (11, 12, 4908.83, 6), (11, 14, 4876.51, 4), (12, 3, 23403.47, 4), (12, 11, 4908.83, 6),
    (12, 13, 25900.20, 3), (13, 12, 25900.20, 3), (13, 24, 5091.26, 4), (14, 11, 4876.51, 4),
    (14, 15, 5127.53, 5), (14, 23, 4924.79, 4), (15, 10, 13512.00, 6), (15, 14, 5127.53, 5),
    (15, 19, 14564.75, 3), (15, 22, 9599.18, 3), (16, 8, 5045.82, 5), (16, 10, 4854.92, 4),
    (16, 17, 5229.91, 2), (16, 18, 19679.90, 3), (17, 10, 4993.51, 8), (17, 16, 5229.91, 2),
    (17, 19, 4823.95, 2), (18, 7, 23403.47, 2), (18, 16, 19679.90, 3), (18, 20, 23403.47, 4),
    (19, 15, 14564.75, 3), (19, 17, 4823.95, 2), (19, 20, 5002.61, 4), (20, 18, 23403.47, 4),
    (20, 19, 5002.61, 4), (20, 21, 5059.91, 6), (20, 22, 5075.70, 5), (21, 20, 5059.91, 6),
    (21, 22, 5229.91, 2), (21, 24, 4885.36, 3), (22, 15, 9599.18, 3), (22, 20, 5075.70, 5),
    (22, 21, 5229.91, 2), (22, 23, 5000.00, 4), (23, 14, 4924.79, 4), (23, 22, 5000.00, 4),
    (23, 24, 5078.51, 2), (24, 13, 5091.26, 4), (24, 21, 4885.36, 3), (24, 23, 5078.51, 2),
]

# Undirected PT links in service before any design year.
BACKBONE = {(1, 3), (3, 4), (4, 5), (5, 9), (9, 10), (10, 15), (15, 22), (21, 22), (21, 24),
            (13, 24), (15, 19), (19, 20)}

# Base seats on backbone links.
BACKBONE_CAPACITY = 240.0


def region(n):
    return 1 if n <= 11 else 2


def key(a, b):
    return (min(a, b), max(a, b))


def network():
    nodes = []
    for layer in ("A", "P"):
        for n in range(1, 25):
            nodes.append({"id": f"{layer}{n}", "region": region(n),
                          "layer": "ALT" if layer == "A" else "PT"})
    edges = []
    for t, h, cap, fft in LINKS:
        edges.append({"id": f"a{t:02d}_{h:02d}", "tail": f"A{t}", "head": f"A{h}", "kind": "ALT",
                      "length_km": float(fft), "existing_capacity": cap,
                      "travel_time_h": fft / 60.0})
    for t, h, _, fft in LINKS:
        live = key(t, h) in BACKBONE
        edges.append({"id": f"p{t:02d}_{h:02d}", "tail": f"P{t}", "head": f"P{h}", "kind": "PT",
                      "length_km": float(fft), "existing_available": live,
                      "existing_capacity": BACKBONE_CAPACITY if live else 0.0,
                      "substitutes": [f"a{t:02d}_{h:02d}"]})
    for n in range(1, 25):
        edges.append({"id": f"t{n:02d}_in", "tail": f"A{n}", "head": f"P{n}", "kind": "TRANSFER",
                      "length_km": 0.0})
        edges.append({"id": f"t{n:02d}_out", "tail": f"P{n}", "head": f"A{n}", "kind": "TRANSFER",
                      "length_km": 0.0})
    return {"nodes": nodes, "edges": edges}


# Zone masses for the gravity table; node 10 and node 15 are activity centres.
MASS = {1: 5, 2: 4, 3: 5, 4: 6, 5: 4, 6: 5, 7: 4, 8: 6, 9: 7, 10: 12, 11: 8, 12: 5, 13: 5,
        14: 6, 15: 9, 16: 7, 17: 7, 18: 4, 19: 6, 20: 6, 21: 5, 22: 7, 23: 5, 24: 4}

PAIRS = [(1, 10), (3, 9), (4, 10), (5, 11), (2, 9), (6, 10), (8, 10), (11, 3),
         (13, 15), (14, 22), (24, 15), (21, 19), (23, 17), (16, 22), (12, 20), (20, 14),
         (10, 15), (4, 14), (9, 22), (11, 24), (15, 10), (22, 5), (17, 8), (13, 3)]


def demand(intra1=1.0, intra2=1.0):
    rows = []
    for o, d in PAIRS:
        trips = 12.0 * MASS[o] * MASS[d]
        if region(o) == region(d):
            trips *= intra1 if region(o) == 1 else intra2
        rows.append((f"r{o:02d}_{d:02d}", f"A{o}", f"A{d}", round(trips, 3)))
    return rows


def demand_csv(rows):
    lines = ["request_id,origin,destination,trips"]
    lines += [f"{r},{o},{d},{t:g}" for r, o, d, t in rows]
    return "\n".join(lines) + "\n"


def scenario(name, b1, b2, beta_schedule=None, years=3):
    s = {
        "name": name,
        "network": "network.json",
        "demand": "demand.csv",
        "operators": [
            {"id": "R1", "region": 1, "budget": b1, "beta": 0.0},
            {"id": "R2", "region": 2, "budget": b2, "beta": 0.0},
        ],
        "horizon": {"years": years, "tau": 0.015},
        "sharing": {"weights_mode": "symmetric", "epsilon": {"R1": 1, "R2": 1}},
        "solver": {"tol_s": 1e-4, "eps_dev": 1e-3, "max_rounds": 50},
        # Demand is per day, so a unit of frequency offers a day of seats
        # (60 seats over roughly 17 service hours).
        "params": {"kappa": 1000.0},
    }
    if beta_schedule:
        s["beta_schedule"] = beta_schedule
    return s


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent
                                         / "data" / "sioux_falls"))
    out = pathlib.Path(ap.parse_args().out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "network.json").write_text(json.dumps(network(), indent=1) + "\n")
    (out / "demand.csv").write_text(demand_csv(demand()))
    (out / "scenario.json").write_text(json.dumps(scenario(
        "sioux_falls_coinvest", 4000.0, 4000.0,
        {"1": {"R1": 0.25, "R2": 0.25}, "2": {"R1": 0.0, "R2": 0.0}}), indent=1) + "\n")
    (out / "baseline.json").write_text(json.dumps(scenario(
        "sioux_falls_noncooperative", 4000.0, 4000.0), indent=1) + "\n")


if __name__ == "__main__":
    main()

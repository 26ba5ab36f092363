#!/usr/bin/env python3
"""Writes a small synthetic two-region bundle into data/two_region.

Each region is a five-stop corridor: a road line with a parallel PT line whose
links are all build candidates. One road link and one PT candidate pair join
the corridors. Demand is a fixed request table with intra-regional trips in
both regions and a few inter-regional trips.
"""
import argparse
import json
import pathlib

# Corridor link lengths (km), stop k to stop k+1, per region.
LENGTHS = {1: [3.0, 4.0, 2.5, 3.5], 2: [3.5, 3.0, 4.0, 2.5]}
CROSSING_KM = 6.0
ALT_SPEED = 40.0  # km/h, free-flow

# (origin stop, destination stop, trips/day) inside each region.
INTRA = [(0, 4, 1400.0), (4, 0, 1200.0), (1, 3, 900.0), (3, 1, 800.0), (0, 2, 700.0),
         (2, 4, 600.0)]
# (region-1 stop, region-2 stop, trips/day) in both directions.
INTER = [(2, 2, 100.0), (4, 1, 100.0)]


def node(layer, region, k):
    return f"{layer}{region}_{k}"


def network():
    nodes = []
    edges = []
    for r in (1, 2):
        for k in range(5):
            nodes.append({"id": node("A", r, k), "region": r, "layer": "ALT"})
            nodes.append({"id": node("P", r, k), "region": r, "layer": "PT"})
    for r in (1, 2):
        for k, km in enumerate(LENGTHS[r]):
            for t, h in ((k, k + 1), (k + 1, k)):
                edges.append({"id": f"a{r}_{t}{h}", "tail": node("A", r, t),
                              "head": node("A", r, h), "kind": "ALT", "length_km": km,
                              "existing_capacity": 1800.0, "travel_time_h": km / ALT_SPEED})
        for k, km in enumerate(LENGTHS[r]):
            for t, h in ((k, k + 1), (k + 1, k)):
                edges.append({"id": f"p{r}_{t}{h}", "tail": node("P", r, t),
                              "head": node("P", r, h), "kind": "PT", "length_km": km})
        for k in range(5):
            edges.append({"id": f"t{r}_{k}_in", "tail": node("A", r, k), "head": node("P", r, k),
                          "kind": "TRANSFER", "length_km": 0.0})
            edges.append({"id": f"t{r}_{k}_out", "tail": node("P", r, k), "head": node("A", r, k),
                          "kind": "TRANSFER", "length_km": 0.0})
    for t, h, name in ((node("A", 1, 4), node("A", 2, 0), "ax_12"),
                       (node("A", 2, 0), node("A", 1, 4), "ax_21")):
        edges.append({"id": name, "tail": t, "head": h, "kind": "ALT", "length_km": CROSSING_KM,
                      "existing_capacity": 1800.0, "travel_time_h": CROSSING_KM / ALT_SPEED})
    for t, h, name in ((node("P", 1, 4), node("P", 2, 0), "px_12"),
                       (node("P", 2, 0), node("P", 1, 4), "px_21")):
        edges.append({"id": name, "tail": t, "head": h, "kind": "PT", "length_km": CROSSING_KM})
    return {"nodes": nodes, "edges": edges}


def demand_csv():
    lines = ["request_id,origin,destination,trips"]
    for r in (1, 2):
        for o, d, trips in INTRA:
            lines.append(f"r{r}_{o}{d},{node('A', r, o)},{node('A', r, d)},{trips:g}")
    for a, b, trips in INTER:
        lines.append(f"x12_{a}{b},{node('A', 1, a)},{node('A', 2, b)},{trips:g}")
        lines.append(f"x21_{b}{a},{node('A', 2, b)},{node('A', 1, a)},{trips:g}")
    return "\n".join(lines) + "\n"


def scenario(name, b1, b2, beta, years, weights="symmetric", epsilon=(1, 1)):
    return {
        "name": name,
        "network": "network.json",
        "demand": "demand.csv",
        "operators": [
            {"id": "R1", "region": 1, "budget": b1, "beta": beta},
            {"id": "R2", "region": 2, "budget": b2, "beta": beta},
        ],
        "horizon": {"years": years, "tau": 0.015},
        "sharing": {"weights_mode": weights,
                    "epsilon": {"R1": epsilon[0], "R2": epsilon[1]}},
        "solver": {"tol_s": 1e-4, "eps_dev": 1e-3, "max_rounds": 50},
        "params": {"kappa": 1000.0},
        "system_optimal": False,
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent
                                         / "data" / "two_region"))
    out = pathlib.Path(ap.parse_args().out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "network.json").write_text(json.dumps(network(), indent=1) + "\n")
    (out / "demand.csv").write_text(demand_csv())
    # Base for the heterogeneity configurations.
    (out / "hetero.json").write_text(
        json.dumps(scenario("two_region_hetero", 2500.0, 2500.0, 0.3, 2), indent=1) + "\n")
    # Region 2 is the weak partner with a quarter of region 1's budget. Region 1
    # withholds the surplus generated in its own network.
    (out / "exploit.json").write_text(json.dumps(
        scenario("two_region_exploit", 12000.0, 3000.0, 0.3, 1, epsilon=(0, 1)), indent=1) + "\n")


if __name__ == "__main__":
    main()

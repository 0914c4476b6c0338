#!/usr/bin/env python3
"""Regenerates the synthetic fixtures in data/ (deterministic)."""

import json
import random
import sys
from pathlib import Path


def arc(rng, lo_t, hi_t, lo_c, hi_c):
    return {
        "travel_time": rng.randint(lo_t, hi_t),
        "cost": float(rng.randrange(lo_c, hi_c, 10)),
        "transfer_time": rng.randint(0, 1),
        "transfer_cost": float(rng.randrange(10, 60, 5)),
    }


def medium():
    rng = random.Random(20240611)
    hubs = ["H1", "H2", "H3", "H4", "H5"]
    trains = [
        {"id": "T1", "stops": [{"hub": "H1", "departure": 2}, {"hub": "H2", "departure": 4},
                               {"hub": "H3", "departure": 5}]},
        {"id": "T2", "stops": [{"hub": "H2", "departure": 3}, {"hub": "H4", "departure": 5}]},
        {"id": "T3", "stops": [{"hub": "H3", "departure": 3}, {"hub": "H5", "departure": 5}]},
    ]
    reach = {"W1": ["H1", "H2", "H3"], "W2": ["H2", "H4"], "W3": ["H3", "H4", "H5"]}
    origins = []
    for oid, kappa, prep in [("W1", 60, 40.0), ("W2", 45, 55.0), ("W3", 50, 35.0)]:
        origins.append({"id": oid, "prep_cost": prep, "kappa": kappa,
                        "arcs": {h: arc(rng, 1, 3, 150, 460) for h in reach[oid]}})
    demand = {"T1": (18, 55), "T2": (12, 40), "T3": (10, 38)}
    scenarios = []
    count = 6
    for w in range(count):
        sc = {"probability": 1.0 / count, "demand": {}, "capacity": {}}
        for t in trains:
            lo, hi = demand[t["id"]]
            sc["demand"][t["id"]] = rng.randint(lo, hi)
            sc["capacity"][t["id"]] = {s["hub"]: rng.randint(8, 26) for s in t["stops"]}
        scenarios.append(sc)
    return {
        "periods": 6,
        "origins": origins,
        "hubs": [{"id": h} for h in hubs],
        "trains": trains,
        "cost": {"unmet_penalty": 1200.0, "emissions_penalty": 0.2},
        "emissions": {"cap": 100000.0, "rate": [2240.0, 2170.0, 2100.0, 2030.0, 1960.0, 1890.0]},
        "scenarios": scenarios,
    }


def capacity():
    rng = random.Random(777)
    hubs = ["H1", "H2", "H3", "H4", "H5", "H6"]
    trains = [
        {"id": "T1", "stops": [{"hub": "H1", "departure": 2}, {"hub": "H2", "departure": 4}]},
        {"id": "T2", "stops": [{"hub": "H2", "departure": 3}, {"hub": "H3", "departure": 5}]},
        {"id": "T3", "stops": [{"hub": "H4", "departure": 3}, {"hub": "H5", "departure": 5}]},
        {"id": "T4", "stops": [{"hub": "H5", "departure": 2}, {"hub": "H6", "departure": 4}]},
    ]
    reach = {"W1": ["H1", "H2", "H3"], "W2": ["H3", "H4", "H5"], "W3": ["H5", "H6", "H2"]}
    origins = []
    for oid, prep in [("W1", 30.0), ("W2", 45.0), ("W3", 25.0)]:
        origins.append({"id": oid, "prep_cost": prep, "kappa": 40,
                        "arcs": {h: arc(rng, 1, 2, 120, 400) for h in reach[oid]}})
    scenarios = []
    count = 8
    for w in range(count):
        sc = {"probability": 1.0 / count, "demand": {}, "capacity": {}}
        for t in trains:
            sc["demand"][t["id"]] = rng.randint(6, 16)
            sc["capacity"][t["id"]] = {s["hub"]: 6 for s in t["stops"]}
        scenarios.append(sc)
    return {
        "periods": 5,
        "origins": origins,
        "hubs": [{"id": h} for h in hubs],
        "trains": trains,
        "cost": {"unmet_penalty": 1500.0, "emissions_penalty": 0.0},
        "emissions": {"cap": 0.0, "rate": 0.0},
        "scenarios": scenarios,
    }


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    out.mkdir(parents=True, exist_ok=True)
    for name, doc in [("medium", medium()), ("capacity", capacity())]:
        (out / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()

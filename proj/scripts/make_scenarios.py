#!/usr/bin/env python3
# Copyright 2026 The lanegame Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerate the shipped scenario files under scenarios/."""

import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "scenarios"
SCHEMA = "lanegame.scenario/1"


def vehicle(vid, x, y, v, policy, role="traffic"):
    return {"id": vid, "role": role, "state": {"x": x, "y": y, "yaw": 0.0, "v": v}, "policy": policy}


def hv(preset, mode="game", v=12.0, **extra):
    pol = {"type": "hlm", "preset": preset, "mode": mode}
    pol.update(extra)
    return vehicle("V1", -100.0, -3.0, v, pol, role="hv")


def scenario(name, vehicles, **extra):
    s = {"schema": SCHEMA, "name": name, "duration": 20.0, "dt": 0.01, "decision_rate": 10.0, "seed": 0}
    s.update(extra)
    s["vehicles"] = vehicles
    return s


def write(name, s):
    path = OUT / f"{name}.json"
    path.write_text(json.dumps(s, indent=2) + "\n")
    print(path.relative_to(OUT.parent))


def main():
    OUT.mkdir(exist_ok=True)
    const = {"type": "constant"}

    # Driving-behaviour grid: V2 start X by speed, HLM-B against steady traffic.
    k = 1
    for x in (-130.0, -120.0, -110.0):
        for v in (8.0, 10.0, 12.0):
            write(f"case{k}", scenario(f"case{k}", [
                hv("hlm_b"), vehicle("V2", x, 1.0, v, const), vehicle("V3", -65.0, -3.0, 5.0, const)]))
            k += 1

    # Interaction cases against an NV that speeds up once the HV signals.
    aggressive = {"type": "scripted", "profile": "aggressive", "profile_accel": 1.5, "v_max": 16.67}
    for k, (x, v) in enumerate(((-125.0, 9.0), (-118.0, 10.5), (-110.0, 12.0)), start=1):
        for preset in ("hlm_a", "hlm_b"):
            write(f"interaction_case{k}_{preset}", scenario(f"interaction_case{k}_{preset}", [
                hv(preset), vehicle("V2", x, 1.0, v, aggressive), vehicle("V3", -65.0, -3.0, 5.0, const)]))

    # Commanded lane change on an empty road.
    for preset in ("hlm_a", "hlm_b"):
        write(f"lane_change_{preset}", scenario(f"lane_change_{preset}", [
            hv(preset, mode="command", command_time=1.0, command_lane=1)], duration=15.0))

    # Cut-in: V2 swerves from the left lane into the gap in front of the HV
    # and brakes; V4 alongside keeps the HV from dodging left.
    cut = {"type": "scripted", "profile": "piecewise", "knots": [
        {"t": 0.0, "a_x": 0.0, "steer": 0.0},
        {"t": 0.5, "a_x": 0.0, "steer": -0.06},
        {"t": 1.5, "a_x": 0.0, "steer": 0.06},
        {"t": 2.5, "a_x": -3.0, "steer": 0.0},
        {"t": 4.0, "a_x": 0.0, "steer": 0.0},
    ]}
    write("cutin", scenario("cutin", [
        hv("hlm_b"), vehicle("V2", -92.0, 1.0, 12.0, cut), vehicle("V3", -40.0, -3.0, 5.0, const),
        vehicle("V4", -100.0, 1.0, 12.5, const)], duration=12.0))

    # Cockpit session: V2 driven by a person.
    write("hil_case1", scenario("hil_case1", [
        hv("hlm_b"), vehicle("V2", -125.0, 1.0, 9.0, {"type": "external"}),
        vehicle("V3", -65.0, -3.0, 5.0, const)], duration=30.0))


if __name__ == "__main__":
    main()

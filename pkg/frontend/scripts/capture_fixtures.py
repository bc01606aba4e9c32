#!/usr/bin/env python3
"""Regenerate tests/fixtures/desk.json by driving a real modelsets service.

The explorer never computes set memberships itself, and neither do its tests:
every expected count and cluster id in the suite comes from a recorded
response of the actual HTTP service, captured here. Run from the frontend
directory with the `modelsets` package installed:

    python3 scripts/capture_fixtures.py

The script builds the small hand-traceable "desk" dataset, serves it on a
local port, records every request/response pair the tests need, and writes
them with their request metadata (method, path, params, body) so the test
harness can match requests structurally instead of by URL string.
"""

from __future__ import annotations

import json
import subprocess
import sys
import tempfile
import time
import urllib.error
import urllib.request
from pathlib import Path

PORT = 8947
BASE = f"http://127.0.0.1:{PORT}"
OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "desk.json"

IMAGES = [
    {"image_id": "im0", "file": "im0.jpg", "width": 200, "height": 200},
    {"image_id": "im1", "file": "im1.jpg", "width": 200, "height": 200},
    {"image_id": "im2", "file": "im2.jpg", "width": 200, "height": 200},
]
GROUND_TRUTH = [
    {"image_id": "im0", "bbox": [10, 10, 40, 40], "class": "desk"},
    {"image_id": "im0", "bbox": [100, 100, 50, 50], "class": "desk"},
    {"image_id": "im1", "bbox": [20, 20, 60, 60], "class": "desk"},
    {"image_id": "im2", "bbox": [50, 50, 40, 40], "class": "desk"},
]
MODELS = {
    "modelA": [
        {"image_id": "im0", "bbox": [12, 11, 38, 40], "class": "desk", "confidence": 0.95},
        {"image_id": "im0", "bbox": [98, 102, 52, 48], "class": "desk", "confidence": 0.90},
        {"image_id": "im1", "bbox": [22, 18, 58, 62], "class": "desk", "confidence": 0.80},
        {"image_id": "im2", "bbox": [140, 140, 30, 30], "class": "desk", "confidence": 0.75},
    ],
    "modelB": [
        {"image_id": "im0", "bbox": [11, 12, 40, 39], "class": "desk", "confidence": 0.92},
        {"image_id": "im1", "bbox": [21, 21, 59, 60], "class": "desk", "confidence": 0.85},
        {"image_id": "im2", "bbox": [139, 141, 31, 29], "class": "desk", "confidence": 0.72},
    ],
    "modelC": [
        {"image_id": "im0", "bbox": [13, 10, 39, 41], "class": "desk", "confidence": 0.88},
        {"image_id": "im2", "bbox": [52, 48, 38, 44], "class": "desk", "confidence": 0.81},
        {"image_id": "im1", "bbox": [150, 30, 20, 20], "class": "desk", "confidence": 0.55},
    ],
}

# (eval_iou, conf_min, conf_max) windows the tests exercise: the served
# defaults, the full window, a tightened window, and a raised IOU bar.
WINDOWS = {
    "defaults": (0.5, 0.7, 1.0),
    "full": (0.5, 0.0, 1.0),
    "tight": (0.5, 0.9, 1.0),
    "strict": (0.7, 0.7, 1.0),
}


def request(method: str, path: str, params: dict | None = None, body: dict | None = None) -> dict:
    url = BASE + path
    if params:
        url += "?" + "&".join(f"{k}={v}" for k, v in params.items())
    data = json.dumps(body).encode() if body is not None else None
    req = urllib.request.Request(url, data=data, method=method)
    if body is not None:
        req.add_header("Content-Type", "application/json")
    with urllib.request.urlopen(req) as resp:
        payload = json.loads(resp.read())
        status = resp.status
    entry = {"method": method, "path": path, "response": {"status": status, "json": payload}}
    if params:
        entry["params"] = params
    if body is not None:
        entry["body"] = body
    return entry


def query_body(include, exclude, neutral, status, window):
    eval_iou, conf_min, conf_max = window
    return {
        "include": include,
        "exclude": exclude,
        "neutral": neutral,
        "status": status,
        "eval_iou": eval_iou,
        "conf_min": conf_min,
        "conf_max": conf_max,
    }


def main() -> int:
    workdir = Path(tempfile.mkdtemp(prefix="desk-fixture-"))
    data = workdir / "data"
    data.mkdir()
    (data / "images.json").write_text(json.dumps(IMAGES))
    (data / "groundtruth.json").write_text(json.dumps(GROUND_TRUTH))
    for model_id, records in MODELS.items():
        (data / f"{model_id}.json").write_text(json.dumps(records))
    for image in IMAGES:
        (data / image["file"]).write_bytes(b"bytes-of-" + image["image_id"].encode())

    artifact = workdir / "desk.sets.json"
    subprocess.run(
        ["modelsets", "build", "--folder", str(data), "--class", "desk",
         "--set-iou", "0.3", "--out", str(artifact)],
        check=True, capture_output=True,
    )
    server = subprocess.Popen(
        ["modelsets", "serve", "--artifact", str(artifact),
         "--image-root", str(data), "--port", str(PORT)],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
    )
    try:
        for _ in range(50):
            try:
                urllib.request.urlopen(BASE + "/api/meta")
                break
            except urllib.error.URLError:
                time.sleep(0.2)
        else:
            raise RuntimeError("service did not come up")

        entries = [request("GET", "/api/meta")]
        meta = entries[0]["response"]["json"]
        models = meta["models"]

        for window in WINDOWS.values():
            eval_iou, conf_min, conf_max = window
            params = {"eval_iou": eval_iou, "conf_min": conf_min, "conf_max": conf_max}
            bars_entry = request("GET", "/api/intersections", params=params)
            entries.append(bars_entry)

            # one exclusive query per bar (what a bar click issues), plus the
            # all-neutral query and its tp/fp splits
            for bar in bars_entry["response"]["json"]["bars"]:
                include = bar["signature"]
                exclude = [m for m in models if m not in include]
                entries.append(request(
                    "POST", "/api/query",
                    body=query_body(include, exclude, [], "all", window),
                ))
            for status in ("all", "tp", "fp"):
                entries.append(request(
                    "POST", "/api/query",
                    body=query_body([], [], models, status, window),
                ))
            for image in IMAGES:
                entries.append(request(
                    "GET", f"/api/images/{image['image_id']}/annotations", params=params,
                ))

        # the walkthrough query: one model pinned in, one pinned out, the
        # third left neutral ("either") — plus the intermediate drafts a
        # click-by-click path toward it previews along the way
        entries.append(request(
            "POST", "/api/query",
            body=query_body(["modelA"], [], ["modelB", "modelC"], "all", WINDOWS["full"]),
        ))
        entries.append(request(
            "POST", "/api/query",
            body=query_body(["modelA", "modelC"], [], ["modelB"], "all", WINDOWS["full"]),
        ))
        entries.append(request(
            "POST", "/api/query",
            body=query_body(["modelA"], ["modelC"], ["modelB"], "all", WINDOWS["full"]),
        ))
        # a shared-and-exclusive pair query, confirmed at the defaults window
        entries.append(request(
            "POST", "/api/query",
            body=query_body(["modelA", "modelB"], ["modelC"], [], "all", WINDOWS["defaults"]),
        ))

        # tag workflow, captured in order: empty store, assign, re-read, export
        entries.append(request("GET", "/api/tags"))
        entries.append(request(
            "POST", "/api/tags",
            body={"tag": "Partial Detection", "image_ids": ["im1", "im2"]},
        ))
        after = request("GET", "/api/tags")
        after["note"] = "after Partial Detection assigned"
        entries.append(after)
        export = request("GET", "/api/export/tags")
        export["note"] = "after Partial Detection assigned"
        entries.append(export)

        OUT.parent.mkdir(parents=True, exist_ok=True)
        OUT.write_text(json.dumps({"base": "/api", "entries": entries}, indent=2) + "\n")
        print(f"wrote {OUT} ({len(entries)} recorded exchanges)")
        return 0
    finally:
        server.terminate()
        server.wait(timeout=10)


if __name__ == "__main__":
    sys.exit(main())

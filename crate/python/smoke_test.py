"""Smoke test for the wandsynth extension module."""

import io
import json
import struct

import wandsynth as ws


def hand(cx, cy, aperture, palm=0.1):
    wrist = (cx, cy - 0.8 * palm, 0.0)
    pts = [wrist] * 21
    for i in (5, 9, 13, 17):
        pts[i] = (cx + (i - 11) * 0.005, cy + 0.2 * palm, 0.0)
    for i in (4, 8, 12, 16, 20):
        pts[i] = (cx, wrist[1] + aperture * palm, 0.0)
    return pts


def main():
    data = ws.encode_frame("L", 1, 0.95, hand(0.5, 0.5, 1.4))
    assert data.startswith(b"/nl/hand\0") and len(data) == 348
    # address (12) + type tags (68) + side string (4), then the int64 seq
    assert struct.unpack(">q", data[84:92])[0] == 1
    assert ws.decode_frame(data)["side"] == "L"

    engine = ws.Engine()
    engine.key("O")
    for i in range(8):
        engine.feed(i / 30, ws.encode_frame("L", i + 1, 0.95, hand(0.5, 0.5 + 0.02 * i, 1.4)))
    left = engine.scene()["left"]
    assert left["active"] and left["y"] > 0.6, left
    state = json.loads(engine.snapshot_json(0.3))
    assert state["type"] == "state" and len(state["wands"]) == 2

    wav, report = ws.render_script("0 O\n0 P\n250 W\n500 GESTURE R MOVE 0.1 0\n", 1.0)
    with io.BytesIO(wav) as f:
        header = f.read(44)
    assert header[:4] == b"RIFF" and struct.unpack("<H", header[20:22])[0] == 3
    assert len(wav) == 44 + 48000 * 2 * 4
    assert "right.x=0.6" in report
    print("smoke test ok")


if __name__ == "__main__":
    main()

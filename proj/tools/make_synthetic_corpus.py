#!/usr/bin/env python3
"""Writes a templated two-party chat corpus plus its ground truth.

The output is synthetic: sentences come from fixed templates, so replay
numbers on it say nothing about real chat traffic.
"""
import argparse
import json
import random
from pathlib import Path

PROBES = [
    ("what is ur {k}", ["password", "dob", "lucky no", "debit card", "account", "code"]),
    ("can u tell me ur {k} pls", ["password", "dob", "debit card"]),
    ("whats the {k} of ur card", ["code"]),
]
BENIGN = [
    ("I had {k} for lunch", ["pizza", "pasta", "rice"]),
    ("my {k} was fun today", ["school", "trip", "party"]),
    ("the {k} near my place is nice", ["hotel", "park", "mall"]),
    ("hello how are u", []),
    ("ok see u later", []),
]


def session(rng, sid, length, phish_rate, ts0):
    lines, truth = [], {}
    for seq in range(1, length + 1):
        sender = "chatter-1" if seq % 2 else "chatter-2"
        if rng.random() < phish_rate:
            tmpl, keys = rng.choice(PROBES)
            label = "YES"
        else:
            tmpl, keys = rng.choice(BENIGN)
            label = "NO"
        key = rng.choice(keys) if keys else None
        text = tmpl.format(k=key) if key else tmpl
        lines.append({"session_id": sid, "seq": seq, "sender": sender, "text": text, "ts": ts0 + seq * 15000})
        if key:
            truth.setdefault(str(seq), {})[key] = label
    return lines, truth


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "corpus")
    ap.add_argument("--sessions", type=int, default=20)
    ap.add_argument("--length", type=int, default=12)
    ap.add_argument("--phish-rate", type=float, default=0.25)
    ap.add_argument("--seed", type=int, default=2014)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    transcript, truth = [], {}
    for i in range(args.sessions):
        sid = f"S{i + 1:03d}"
        lines, t = session(rng, sid, args.length, args.phish_rate, 1_500_000_000_000 + i * 3_600_000)
        transcript.extend(lines)
        if t:
            truth[sid] = t

    args.out_dir.mkdir(parents=True, exist_ok=True)
    with open(args.out_dir / "synthetic_transcript.jsonl", "w") as f:
        for line in transcript:
            f.write(json.dumps(line) + "\n")
    with open(args.out_dir / "synthetic_truth.json", "w") as f:
        json.dump(truth, f, indent=2, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""
Sample Runner — post every bundled sample to a running symnf service.
Usage: python scripts/post_samples.py --dir data/samples
"""

import argparse
import asyncio
import json
import os
from pathlib import Path

import httpx
from dotenv import load_dotenv

load_dotenv()


async def post_all(sample_dir: str) -> int:
    base_url = os.getenv("SYMNF_URL", "http://localhost:8710")
    paths = sorted(Path(sample_dir).glob("*.json"))
    print(f"📦 {len(paths)} samples → {base_url}")

    failures = 0
    async with httpx.AsyncClient(base_url=base_url, timeout=120.0) as client:
        for path in paths:
            sample = json.loads(path.read_text(encoding="utf-8"))
            resp = await client.post(
                f"/v1/{sample['command']}",
                json={"input": sample["input"], "options": sample.get("options", {})},
            )
            if resp.status_code == 200:
                header = resp.json()["header"]
                print(f"  ✅ {path.stem}: N={header['trunc']} M={header['h_trunc']}")
            else:
                failures += 1
                print(f"  ❌ {path.stem}: {resp.status_code} {resp.text[:200]}")

    print(f"🎉 {len(paths) - failures}/{len(paths)} passed")
    return failures


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--dir", default="data/samples", help="directory of sample JSON files")
    args = parser.parse_args()
    raise SystemExit(1 if asyncio.run(post_all(args.dir)) else 0)

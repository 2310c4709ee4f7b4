#!/usr/bin/env python3
"""
Schema Export — write the JSON schema of every symnf wire format.
Usage: python scripts/export_schemas.py --out schemas/
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from symnf.models import WIRE_MODELS


def export(out_dir: str) -> None:
    target = Path(out_dir)
    target.mkdir(parents=True, exist_ok=True)
    for name, model in WIRE_MODELS.items():
        path = target / f"{name}.schema.json"
        schema = model.model_json_schema()
        path.write_text(json.dumps(schema, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        print(f"  ✅ {name} → {path}")
    print(f"🎉 {len(WIRE_MODELS)} schemas written")


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="schemas", help="output directory")
    args = parser.parse_args()
    export(args.out)

#!/usr/bin/env python3
import argparse
import sys
from pathlib import Path

import yaml

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from vlcsec.shared.config import ConfigLoader


def generate_template(output_path: str):
    path = Path(output_path)
    text = ConfigLoader.template()
    # the template must load back as the defaults
    ConfigLoader.from_mapping(yaml.safe_load(text)).check_ranges()
    path.write_text(text, encoding="utf-8")
    print(f"Generated config template at {path}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Generate a vlcsec configuration template.")
    parser.add_argument("--output", default="vlcsec.template.yaml", help="Output path")
    args = parser.parse_args()
    generate_template(args.output)

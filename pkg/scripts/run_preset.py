#!/usr/bin/env python3
"""Run one of the bundled scenario presets (thin wrapper over the CLI).

Usage: python3 scripts/run_preset.py decay-below-threshold [SECTION.KEY=VALUE ...]
"""
import sys

from llflow.lab import PRESETS, run_scenario


def main(argv):
    if not argv or argv[0] not in PRESETS:
        print(f"usage: run_preset.py PRESET [overrides...]\n"
              f"presets: {', '.join(sorted(PRESETS))}", file=sys.stderr)
        return 1
    return run_scenario(argv[0], argv[1:])


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))

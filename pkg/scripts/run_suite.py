"""Analyze every scenario in a directory and print one summary row per scenario."""

import argparse
import json
from pathlib import Path

from hardyop import estimators as est
from hardyop.cli import jsonable
from hardyop.scenario import load_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("directory", nargs="?", default=Path(__file__).resolve().parent.parent / "scenarios")
    ap.add_argument("--json", help="also write the full reports here")
    args = ap.parse_args()
    reports = {}
    print(f"{'scenario':<20} {'regime':<12} {'status':<10} {'lower':>12} {'upper':>12} {'trunc':>25}")
    for path in sorted(Path(args.directory).glob("*.scn")):
        s = load_scenario(path)
        rep = est.analyze(s.u, s.phi, s.p, s.q, s.config)
        reports[s.name] = rep.to_dict()
        b, t = rep.bracket, rep.truncation
        low = f"{b.lower:.6g}" if b else "-"
        up = f"{b.upper:.6g}" if b else "-"
        tb = f"[{t.lower:.6g}, {t.upper:.6g}]" if t else "-"
        print(f"{s.name:<20} {rep.regime:<12} {rep.status:<10} {low:>12} {up:>12} {tb:>25}")
    if args.json:
        Path(args.json).write_text(json.dumps(jsonable(reports), sort_keys=True, indent=2) + "\n")


if __name__ == "__main__":
    main()

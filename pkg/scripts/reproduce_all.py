"""Run every experiment with its default settings into one output directory.

    python3 scripts/reproduce_all.py [out_dir] [--threads N]
"""
import argparse
import sys

from optoswap import cli


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("out", nargs="?", default="results")
    parser.add_argument("--threads", type=int, default=4)
    args = parser.parse_args()
    status = 0
    for name in cli.EXPERIMENTS:
        print(f"== {name}", flush=True)
        code = cli.main([name, "--out", args.out, "--threads", str(args.threads)])
        status = max(status, code)
    return status


if __name__ == "__main__":
    sys.exit(main())

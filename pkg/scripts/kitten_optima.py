"""Squeezing that best turns a transferred single photon into an odd cat,
compared with the small-amplitude estimate xi = -alpha^2/3."""
import math

from optoswap import experiments as ex


def main():
    print(f"{'setting':>8} {'alpha^2':>8} {'xi_opt':>10} {'-a^2/3':>10} {'1-F':>10}")
    for setting in (ex.IDEAL, ex.THIN_LINES):
        for a2 in (0.1, 0.25, 0.5, 0.75):
            xi, infid = ex.kitten_optimum(math.sqrt(a2), setting)
            print(f"{setting.name:>8} {a2:8.2f} {xi:10.5f} {-a2 / 3:10.5f} {infid:10.3e}")


if __name__ == "__main__":
    main()

"""Sensitivity of the |1> transfer infidelity to the Wigner grid."""
from optoswap import experiments as ex
from optoswap.params import TABLE1_50MK
from optoswap.phasespace import Grid


def main():
    print(f"{'extent':>7} {'points':>7} {'1-F':>14} {'half-res diff':>14}")
    for extent in (5.0, 6.0, 8.0):
        for points in (64, 128, 256, 512):
            res, _ = ex.fock_fidelity(TABLE1_50MK, 1, 10.0, Grid(extent, points))
            print(f"{extent:7.1f} {points:7d} {res.infidelity:14.10f} {res.quadrature_error_estimate:14.2e}")


if __name__ == "__main__":
    main()

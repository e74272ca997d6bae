"""How many qubits must be measured jointly to certify entanglement?

For each reference state, solve the witness program restricted to all
subsets of size k = 1, 2, ... and report the smallest k that detects.
Pair measurements suffice for the W and Dicke states; the cluster state
needs three-body terms.

Run:  python3 demos/detection_length_scan.py
"""

from edlkit import states
from edlkit.sdp import edl_scan


def main():
    for name in states.STATE_NAMES:
        rho = states.density(states.make_state(name))
        scan = edl_scan(rho)
        length = next((k for k in sorted(scan) if scan[k].detected), None)
        print(f"{name}: detection length = {length}")
        print(f"  {'k':>2}  {'alpha':>12}  {'p_noise':>9}")
        for k in sorted(scan):
            res = scan[k]
            tol = f"{res.p_noise:.4f}" if res.p_noise is not None else "-"
            mark = "  <- smallest detecting size" if k == length else ""
            print(f"  {k:>2}  {res.alpha:>12.6f}  {tol:>9}{mark}")
        print()


if __name__ == "__main__":
    main()

"""Recompute fidelities and witness values from the bundled lab tables.

The package ships the published per-setting expectation tables as CSV
fixtures. This script feeds three of them through the same combination
pipeline the CLI uses and compares against the values printed alongside
the tables.

Run:  python3 demos/ingest_published_tables.py
"""

from importlib import resources

from edlkit import measure
from edlkit.witness import load_paper_witness

# fixture -> (state, printed fidelity, {witness id: printed value})
TABLES = {
    "d4a": ("D4", 0.974, {1: -0.00582, 2: -0.00850, 3: -0.0107, 4: -0.0192, 5: -0.0274}),
    "c4a": ("C4", 0.968, {1: -0.0132, 2: -0.0287, 3: -0.0378, 4: -0.0573}),
    "w3a": ("W3", 0.982, {1: -0.027, 2: -0.051}),
}


def records_for(name, n):
    ref = resources.files("edlkit").joinpath(f"data/tables/{name}.csv")
    with resources.as_file(ref) as path:
        return measure.read_expectation_csv(path, n)


def main():
    for name, (state, printed_fid, witnesses) in TABLES.items():
        plan = measure.fidelity_settings(state)
        records = records_for(name, plan.n)
        fid, err = measure.combine_plan(records, plan)
        print(f"table {name} ({state}, {len(records)} rows)")
        print(f"  fidelity: {fid:.4f} +- {err:.4f}   printed {printed_fid:.3f}")
        for wid, printed in witnesses.items():
            w = load_paper_witness(state, wid)
            value, verr = measure.combine(records, w.expr)
            print(
                f"  {w.label}: {value:+.5f} +- {verr:.5f}   "
                f"printed {printed:+.5f}   (diff {value - printed:+.1e})"
            )
        print()


if __name__ == "__main__":
    main()

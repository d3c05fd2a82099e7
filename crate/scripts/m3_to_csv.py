#!/usr/bin/env python3
"""Export the M3 competition series to the wide CSV layout read by `lgt`.

Uses the copy of the Mcomp data bundled with the `fcompdata` package
(`pip install fcompdata`). Each row holds the full series (in-sample values
followed by the held-out horizon), so `lgt evaluate` can split off the last
`horizon` points itself.

    python3 scripts/m3_to_csv.py data/m3.csv
"""
import json
import sys
from importlib import resources

FREQUENCY = {"YEARLY": 1, "QUARTERLY": 4, "MONTHLY": 12, "OTHER": 1}


def main(out_path: str) -> None:
    raw = resources.files("fcompdata").joinpath("data/m3_data.json").read_text()
    data = json.loads(raw)
    with open(out_path, "w") as out:
        out.write("id,category,frequency,horizon\n")
        for key in sorted(data):
            s = data[key]
            period = s["period"][0]
            values = list(s["x"]) + list(s["xx"])
            fields = [s["sn"][0], period.lower(), str(FREQUENCY[period]), str(s["h"][0])]
            fields += [repr(float(v)) for v in values]
            out.write(",".join(fields) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/m3.csv")

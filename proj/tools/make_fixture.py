#!/usr/bin/env python3
"""Extract a monthly point series from a SPEIbase netCDF file as `date,value` CSV.

SPEIbase files (e.g. spei12.nc, spei24.nc) are netCDF-4, which h5py reads
directly. The grid cell nearest to the requested coordinates is used.

    python3 tools/make_fixture.py spei12.nc data/spei12_bologna.csv
    python3 tools/make_fixture.py spei24.nc data/spei24_bologna.csv

Bologna defaults to 44.49N 11.34E; override with --lat/--lon.
"""

import argparse
import csv
import datetime as dt
import math
import sys

import h5py
import numpy as np


def month_labels(days, units):
    # units look like "days since 1900-1-1"
    origin = units.split("since", 1)[1].strip().split()[0]
    y, m, d = (int(p) for p in origin.split("-"))
    base = dt.date(y, m, d)
    out = []
    for v in days:
        day = base + dt.timedelta(days=float(v))
        out.append(f"{day.year:04d}-{day.month:02d}")
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("netcdf")
    ap.add_argument("output")
    ap.add_argument("--lat", type=float, default=44.49)
    ap.add_argument("--lon", type=float, default=11.34)
    ap.add_argument("--variable", default="spei")
    args = ap.parse_args()

    with h5py.File(args.netcdf, "r") as f:
        lat = f["lat"][:]
        lon = f["lon"][:]
        time = f["time"][:]
        units = f["time"].attrs["units"]
        units = units.decode() if isinstance(units, bytes) else str(units)
        var = f[args.variable]
        i = int(np.abs(lat - args.lat).argmin())
        j = int(np.abs(lon - args.lon).argmin())
        # SPEIbase stores (time, lat, lon) or (lon, lat, time); pick by dimension sizes.
        if var.shape[0] == len(time):
            values = var[:, i, j]
        else:
            values = var[j, i, :]
        fill = var.attrs.get("_FillValue")
        scale = var.attrs.get("scale_factor", 1.0)
        offset = var.attrs.get("add_offset", 0.0)

    values = values.astype(float)
    if fill is not None:
        values[values == float(np.ravel(fill)[0])] = math.nan
    values = values * float(np.ravel(scale)[0]) + float(np.ravel(offset)[0])

    labels = month_labels(time, units)
    rows = [(m, v) for m, v in zip(labels, values) if not math.isnan(v)]
    if not rows:
        sys.exit("no valid values at the selected grid cell")
    with open(args.output, "w", newline="") as out:
        w = csv.writer(out)
        w.writerow(["date", "value"])
        for m, v in rows:
            w.writerow([m, f"{v:.6f}"])
    print(f"cell lat={lat[i]:.2f} lon={lon[j]:.2f}: {len(rows)} months, {rows[0][0]} to {rows[-1][0]}")


if __name__ == "__main__":
    main()

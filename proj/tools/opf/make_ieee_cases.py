#!/usr/bin/env python3
"""Produce OPF-dispatched IEEE 118 / 300 case files for grid_islander.

Runs an AC optimal power flow with PYPOWER (`pip install pypower`) and
writes MATPOWER-style `.m` files whose generator PG columns hold the
dispatch. Only the columns read by the importer are meaningful.

  case118: synchronous condensers (generators with PG = 0 in the base case)
           are taken out of service, leaving 19 generators; line 14-15 is
           opened before dispatch.
  case300: buses are renumbered 1..300 in file order; line 194-195 (in the
           renumbered labels) is opened before dispatch.
"""
import argparse
import pathlib

import numpy as np
import pypower.api as pa
from pypower.idx_brch import BR_STATUS, F_BUS, T_BUS
from pypower.idx_bus import BUS_I, PD
from pypower.idx_gen import GEN_BUS, GEN_STATUS, PG

OPTS = pa.ppoption(VERBOSE=0, OUT_ALL=0)


def open_line(ppc, a, b):
    hit = 0
    for row in ppc["branch"]:
        if {int(row[F_BUS]), int(row[T_BUS])} == {a, b}:
            row[BR_STATUS] = 0
            hit += 1
    if hit == 0:
        raise SystemExit(f"no branch {a}-{b}")


def renumber(ppc):
    labels = {int(b): i + 1 for i, b in enumerate(ppc["bus"][:, BUS_I])}
    ppc["bus"][:, BUS_I] = [labels[int(b)] for b in ppc["bus"][:, BUS_I]]
    ppc["gen"][:, GEN_BUS] = [labels[int(b)] for b in ppc["gen"][:, GEN_BUS]]
    ppc["branch"][:, F_BUS] = [labels[int(b)] for b in ppc["branch"][:, F_BUS]]
    ppc["branch"][:, T_BUS] = [labels[int(b)] for b in ppc["branch"][:, T_BUS]]


def write_case(path, name, ppc, note):
    with open(path, "w", encoding="utf-8") as out:
        out.write(f"function mpc = {name}\n")
        for line in note.splitlines():
            out.write(f"% {line}\n")
        out.write("mpc.version = '2';\nmpc.baseMVA = 100;\n\n")
        out.write("%% bus data\n%\tbus_i\ttype\tPd\tQd\n")
        out.write("mpc.bus = [\n")
        for b in ppc["bus"]:
            out.write(f"\t{int(b[BUS_I])}\t{int(b[1])}\t{b[PD]:.10g}\t{b[3]:.10g};\n")
        out.write("];\n\n%% generator data\n%\tbus\tPg\tQg\tQmax\tQmin\tVg\tmBase\tstatus\n")
        out.write("mpc.gen = [\n")
        for g in ppc["gen"]:
            out.write(f"\t{int(g[GEN_BUS])}\t{g[PG]:.10g}\t{g[2]:.10g}\t{g[3]:.10g}\t{g[4]:.10g}"
                      f"\t{g[5]:.10g}\t{g[6]:.10g}\t{int(g[GEN_STATUS])};\n")
        out.write("];\n\n%% branch data\n%\tfbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle\tstatus\n")
        out.write("mpc.branch = [\n")
        for r in ppc["branch"]:
            out.write(f"\t{int(r[F_BUS])}\t{int(r[T_BUS])}\t{r[2]:.10g}\t{r[3]:.10g}\t{r[4]:.10g}"
                      f"\t{r[5]:.10g}\t{r[6]:.10g}\t{r[7]:.10g}\t{r[8]:.10g}\t{r[9]:.10g}\t{int(r[BR_STATUS])};\n")
        out.write("];\n")


def summary(ppc):
    p = {int(b[BUS_I]): -b[PD] for b in ppc["bus"]}
    for g in ppc["gen"]:
        if g[GEN_STATUS] > 0:
            p[int(g[GEN_BUS])] += g[PG]
    vals = np.array(list(p.values()))
    return vals.sum(), np.abs(vals).max()


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parents[2] / "data"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)

    c118 = pa.case118()
    condensers = c118["gen"][:, PG] <= 0
    c118["gen"][condensers, GEN_STATUS] = 0
    open_line(c118, 14, 15)
    r = pa.runopf(c118, OPTS)
    assert r["success"]
    total, pbar = summary(r)
    write_case(out / "ieee118_opf.m", "ieee118_opf", r,
               f"IEEE 118, AC OPF dispatch, 19 generators, line 14-15 open.\n"
               f"P_tot = {total:.6f} MW, max|p| = {pbar:.6f} MW")
    print(f"ieee118: P_tot={total:.6f} max|p|={pbar:.6f}")

    c300 = pa.case300()
    renumber(c300)
    open_line(c300, 194, 195)
    r = pa.runopf(c300, OPTS)
    assert r["success"]
    total, pbar = summary(r)
    write_case(out / "ieee300_opf.m", "ieee300_opf", r,
               f"IEEE 300 renumbered 1..300, AC OPF dispatch, line 194-195 open.\n"
               f"P_tot = {total:.6f} MW, max|p| = {pbar:.6f} MW")
    print(f"ieee300: P_tot={total:.6f} max|p|={pbar:.6f}")


if __name__ == "__main__":
    main()

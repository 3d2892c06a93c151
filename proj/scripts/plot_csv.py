#!/usr/bin/env python3
"""Quick-look plots for spmc-sim CSV output.

Usage: plot_csv.py <file.csv> [out.png]

The mode is read from the CSV metadata; ber curves, error PDFs, RMSE/CRLB
sweeps, and PEB maps each get a sensible default rendering. Convenience only;
not part of the tested surface.
"""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def load(path):
    meta = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            if ":" in line:
                key, value = line[1:].split(":", 1)
                meta[key.strip()] = value.strip()
    frame = pd.read_csv(path, comment="#")
    return meta, frame


def main():
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    path = sys.argv[1]
    out = sys.argv[2] if len(sys.argv) > 2 else path.rsplit(".", 1)[0] + ".png"
    meta, df = load(path)
    mode = meta.get("mode", "")
    fig, ax = plt.subplots(figsize=(7, 5))

    if mode in ("ber", "ber-phase-noise"):
        for (recv, sp), grp in df.groupby(["receiver", "sigma_phi_deg"]):
            name = "SPMC" if recv == 0 else "coherent"
            label = f"{name} | sigma_phi={sp} deg"
            grp = grp[grp.ber > 0]
            ax.semilogy(grp.snr_db, grp.ber, marker="o", label=label)
        ax.set_xlabel("SNR [dB]")
        ax.set_ylabel("BER")
    elif mode == "error-pdf":
        for m, grp in df.groupby("m"):
            ax.plot(grp.bin_center_rad, grp.density, label=f"M={int(m)}")
        ax.set_xlabel("DoA error [rad]")
        ax.set_ylabel("density")
    elif mode == "rmse-crlb":
        for m, grp in df.groupby("m"):
            line, = ax.semilogy(grp.snr_db, grp.rmse_phi_rad, marker="o", label=f"M={int(m)} RMSE")
            ax.semilogy(grp.snr_db, grp.crlb_phi_rad, linestyle="--", color=line.get_color())
        ax.set_xlabel("SNR [dB]")
        ax.set_ylabel("DoA RMSE [rad] (dashed: CRLB)")
    elif mode == "peb-map":
        pivot = df.pivot(index="y_m", columns="x_m", values="peb_m")
        im = ax.pcolormesh(pivot.columns, pivot.index, pivot.values, shading="auto")
        fig.colorbar(im, ax=ax, label="PEB [m]")
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
    else:
        sys.exit(f"unrecognized mode '{mode}'")

    if mode != "peb-map":
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
    ax.set_title(f"{mode} (seed {meta.get('seed', '?')})")
    fig.tight_layout()
    fig.savefig(out, dpi=140)
    print(out)


if __name__ == "__main__":
    main()

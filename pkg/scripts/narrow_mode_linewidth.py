"""Narrow optical mode versus beam-splitter reflectivity for the in-phase and
out-of-phase loop, against the loop-free value."""

import math

import numpy as np

from _common import outdir, parser, pyplot
from fano_cool.config import load_config
from fano_cool.observables import optical_modes
from fano_cool.params import FeedbackConfig


def main():
    args = parser(__doc__).parse_args()
    out = outdir(args.out)
    p = load_config("fig4.json").physical
    rs = np.linspace(0.0, 0.99, 100)
    rows = []
    for r in rs:
        row = [r]
        for phi, eta_ex in ((0.0, 0.9), (math.pi, 0.9), (0.0, 0.0)):
            m = optical_modes(p, FeedbackConfig("single", phi=phi, r_cbs=r, eta_ex=eta_ex))
            row += [m.narrow.real, -m.narrow.imag]
        rows.append(row)
    data = np.array(rows)
    header = "r_cbs,omega_phi0,kappa_phi0,omega_phipi,kappa_phipi,omega_noloop,kappa_noloop"
    np.savetxt(out / "narrow_mode_linewidth.csv", data, delimiter=",", header=header, comments="")
    i = np.argmin(np.abs(rs - 0.7))
    print(f"r=0.7: kappa_-/Omega_m = {data[i, 4]:.3f} (phi=pi), {data[i, 6]:.3f} (no loop), {data[i, 2]:.3f} (phi=0)")

    plt = pyplot()
    if plt is None or args.no_plot:
        return
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.semilogy(rs, data[:, 2], label=r"$\phi=0$")
    ax.semilogy(rs, data[:, 4], label=r"$\phi=\pi$")
    ax.semilogy(rs, data[:, 6], "k--", label="no loop")
    ax.set_xlabel(r"$r_{\rm CBS}$")
    ax.set_ylabel(r"$\kappa_-/\Omega_m$")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "narrow_mode_linewidth.png", dpi=150)


if __name__ == "__main__":
    main()

"""Narrow-mode linewidth under the double-sided loop on the Fano cavity, for the
strongly asymmetric mirror pair and for a symmetric one."""

import math

import numpy as np

from _common import outdir, parser, pyplot
from fano_cool.config import load_config
from fano_cool.observables import optical_modes
from fano_cool.params import FeedbackConfig


def linewidth_map(p, etas, phis):
    out = np.empty((etas.size, phis.size))
    for i, eta in enumerate(etas):
        for j, phi in enumerate(phis):
            out[i, j] = -optical_modes(p, FeedbackConfig("double", eta=eta, phi=phi)).narrow.imag
    return out


def main():
    args = parser(__doc__).parse_args()
    out = outdir(args.out)
    p = load_config("figA3.json").physical
    etas = np.linspace(0.0, 0.99, 100)
    phis = np.linspace(0.0, 2 * math.pi, 73)
    maps = {"asymmetric": linewidth_map(p, etas, phis), "symmetric": linewidth_map(p.replace(kappa_2=p.kappa_1), etas, phis)}
    for name, k in maps.items():
        np.savetxt(out / f"coherent_loop_{name}.csv", k, delimiter=",")
        shift = np.abs(k - k[0]).max() / k[0, 0]
        print(f"{name}: kappa_-(eta=0)/Omega_m = {k[0, 0]:.4g}, max relative change {shift:.3g}")

    plt = pyplot()
    if plt is None or args.no_plot:
        return
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for ax, (name, k) in zip(axes, maps.items()):
        pc = ax.pcolormesh(phis / math.pi, etas, k, shading="nearest")
        fig.colorbar(pc, ax=ax, label=r"$\kappa_-/\Omega_m$")
        ax.set_title(name)
        ax.set_xlabel(r"$\phi/\pi$")
        ax.set_ylabel(r"$\eta$")
    fig.tight_layout()
    fig.savefig(out / "coherent_loop_modes.png", dpi=150)


if __name__ == "__main__":
    main()

"""Final phonon number versus loop efficiency for the double-sided scheme,
for a symmetric cavity and two asymmetric ones."""

import numpy as np

from _common import outdir, parser, pyplot
from fano_cool.config import load_config
from fano_cool.sweep import find_minimum, run_sweep, sweep_spec_from_config, write_table


def main():
    args = parser(__doc__).parse_args()
    out = outdir(args.out)
    base = load_config("fig3b.json")
    curves = {}
    for ratio in (1.0, 0.5, 2.0):
        cfg = base.replace(physical=base.physical.replace(kappa_2=ratio * base.physical.kappa_1))
        table = run_sweep(sweep_spec_from_config(cfg), workers=args.workers)
        write_table(table, out / f"double_sided_k2k1_{ratio:g}.csv")
        (eta,), n = find_minimum(table)
        print(f"kappa_2/kappa_1 = {ratio:g}: min n_fin = {n:.4f} at eta = {eta:.4f}")
        curves[ratio] = (table.axis_values()[0], table.grid("n_fin"))

    plt = pyplot()
    if plt is None or args.no_plot:
        return
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for ratio, (eta, n) in curves.items():
        ax.semilogy(eta, n, label=rf"$\kappa_2/\kappa_1={ratio:g}$")
    ax.axhline(1.0, color="k", lw=0.5)
    ax.set_xlabel(r"$\eta$")
    ax.set_ylabel(r"$n_{\rm fin}$")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "double_sided_scan.png", dpi=150)


if __name__ == "__main__":
    main()

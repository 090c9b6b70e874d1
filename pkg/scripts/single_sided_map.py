"""Single-sided feedback on the Fano cavity: n_fin over (r_CBS, detuning offset)
and the 1D reflectivity cut, with the narrow optical mode at the optimum."""

import numpy as np

from _common import outdir, parser, pyplot
from fano_cool.config import load_config
from fano_cool.sweep import find_minimum, run_sweep, sweep_spec_from_config, write_table


def main():
    args = parser(__doc__).parse_args()
    out = outdir(args.out)

    cut = run_sweep(sweep_spec_from_config(load_config("fig4b.json")), workers=args.workers)
    write_table(cut, out / "single_sided_r_scan.csv")
    (r,), n = find_minimum(cut)
    cell = next(c for c in cut.cells if c.coords == (r,))
    print(f"r scan: min n_fin = {n:.4f} at r_CBS = {r:.3f}, "
          f"omega_-/Omega_m = {cell.get('omega_minus'):.3f}, kappa_-/Omega_m = {cell.get('kappa_minus'):.3f}")

    grid = run_sweep(sweep_spec_from_config(load_config("fig4a.json")), workers=args.workers)
    write_table(grid, out / "single_sided_map.csv")
    (r2, dd), n2 = find_minimum(grid)
    unstable = sum(not c.stable for c in grid.cells)
    print(f"map: min n_fin = {n2:.4f} at r_CBS = {r2:.3f}, delta_Delta/Omega_m = {dd:.1f}; {unstable} unstable cells")

    plt = pyplot()
    if plt is None or args.no_plot:
        return
    from matplotlib.colors import LogNorm

    rs, dds = grid.axis_values()
    fig, (a1, a2) = plt.subplots(1, 2, figsize=(10, 4))
    pc = a1.pcolormesh(rs, dds, grid.grid("n_fin").T, norm=LogNorm(), shading="nearest")
    fig.colorbar(pc, ax=a1, label=r"$n_{\rm fin}$")
    a1.set_xlabel(r"$r_{\rm CBS}$")
    a1.set_ylabel(r"$\delta_\Delta/\Omega_m$")
    a2.semilogy(cut.axis_values()[0], cut.grid("n_fin"))
    a2.axhline(1.0, color="k", lw=0.5)
    a2.set_xlabel(r"$r_{\rm CBS}$")
    a2.set_ylabel(r"$n_{\rm fin}$")
    fig.tight_layout()
    fig.savefig(out / "single_sided_map.png", dpi=150)


if __name__ == "__main__":
    main()

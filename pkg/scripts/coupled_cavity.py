"""Bare Fano cavity without feedback in the weak-coupling configuration:
n_fin and the narrow mode versus the detuning offset."""

from _common import outdir, parser, pyplot
from fano_cool.config import load_config
from fano_cool.sweep import find_minimum, run_sweep, sweep_spec_from_config, write_table


def main():
    args = parser(__doc__).parse_args()
    out = outdir(args.out)
    table = run_sweep(sweep_spec_from_config(load_config("figA6.json")), workers=args.workers)
    write_table(table, out / "coupled_cavity.csv")
    (dd,), n = find_minimum(table)
    print(f"min n_fin = {n:.4g} at delta_Delta/Omega_m = {dd:.2f}")

    plt = pyplot()
    if plt is None or args.no_plot:
        return
    x = table.axis_values()[0]
    fig, (a1, a2) = plt.subplots(2, 1, sharex=True, figsize=(5, 5))
    a1.semilogy(x, table.grid("n_fin"))
    a1.set_ylabel(r"$n_{\rm fin}$")
    a2.plot(x, table.grid("omega_minus"), label=r"$\omega_-/\Omega_m$")
    a2.plot(x, table.grid("kappa_minus"), label=r"$\kappa_-/\Omega_m$")
    a2.set_xlabel(r"$\delta_\Delta/\Omega_m$")
    a2.legend()
    fig.tight_layout()
    fig.savefig(out / "coupled_cavity.png", dpi=150)


if __name__ == "__main__":
    main()

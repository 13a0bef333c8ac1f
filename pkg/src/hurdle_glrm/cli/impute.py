"""``hurdle-glrm impute``: fit, then write the reconstruction and the imputed table."""

from hurdle_glrm.models.run_config import RunConfig
from hurdle_glrm.services.solver import impute_table, reconstruct_table
from hurdle_glrm.services.storage import save_factorization, write_csv

from .common import console, fit_input, fit_report, write_report


def cmd_impute(config: RunConfig) -> list[str]:
    table, fit_settings, fact, trace = fit_input(config)

    files = save_factorization(fact, table, config.out)
    # reconstruction.csv leaves nu where the hurdle rule picks it (empty for missing-nu)
    write_csv(config.out / "reconstruction.csv", reconstruct_table(table, fact), table.names)
    write_csv(config.out / "imputed.csv", impute_table(table, fact), table.names)
    files += ["reconstruction.csv", "imputed.csv"]
    files += write_report(config, fit_report(table, fit_settings, fact, trace))

    missing = int((~table.observed).sum())
    console.print(f"[green]✓[/green] Imputed {missing} missing entries")
    return files

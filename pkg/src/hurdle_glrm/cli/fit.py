"""``hurdle-glrm fit``: fit a table and write the factorization and diagnostics."""

from hurdle_glrm.models.run_config import RunConfig
from hurdle_glrm.services.storage import save_factorization

from .common import console, fit_input, fit_report, write_hurdle_diagnostics, write_report


def cmd_fit(config: RunConfig) -> list[str]:
    """Returns the names of the files written under ``config.out``."""
    table, fit_settings, fact, trace = fit_input(config)

    files = save_factorization(fact, table, config.out)
    report = fit_report(table, fit_settings, fact, trace)
    files += write_report(config, report)
    files += write_hurdle_diagnostics(config, table, fact)

    console.print(f"[green]✓[/green] Loss explained: {report.loss_explained:.4f}")
    return files

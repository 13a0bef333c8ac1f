"""``hurdle-glrm simulate``: write a simulated bundle for one seed."""

from hurdle_glrm.config.constants import (
    MAR_N_COLUMNS,
    MAR_N_ROWS,
    MAR_TRUE_RANK,
    MCAR_RATE,
    ZERO_INFLATED_N_COLUMNS,
    ZERO_INFLATED_N_ROWS,
    ZERO_INFLATED_TRUE_RANK,
)
from hurdle_glrm.errors import ConfigError
from hurdle_glrm.models.run_config import RunConfig
from hurdle_glrm.services.simgen import simulate_mar_dataset, simulate_zero_inflated
from hurdle_glrm.services.storage import write_mar_bundle, write_zero_inflated_bundle

from .common import console


def cmd_simulate(config: RunConfig) -> list[str]:
    generator = config.generator or "mar"

    if generator == "mar":
        if config.zero_rates is not None:
            raise ConfigError("--zero-rates applies to the zero_inflated generator only")
        rate = MCAR_RATE if config.missing_rate is None else config.missing_rate
        if not 0 < rate < 1:
            raise ConfigError(f"--missing-rate must lie in (0, 1), got {rate}")
        console.print(
            f"[bold blue]Simulating MAR dataset (seed {config.seed}, "
            f"{MAR_N_ROWS} x {MAR_N_COLUMNS})...[/bold blue]"
        )
        bundle = simulate_mar_dataset(
            config.seed,
            n=MAR_N_ROWS,
            p=MAR_N_COLUMNS,
            k_true=config.rank or MAR_TRUE_RANK,
            mcar_rate=rate,
        )
        files = write_mar_bundle(bundle, config.out)
        console.print(
            f"[green]✓[/green] alpha={bundle.alpha:.6g}, "
            f"{int(bundle.mcar_mask.sum())} MCAR / {int(bundle.mar_mask.sum())} MAR missing"
        )
        return files

    if config.missing_rate is not None:
        raise ConfigError("--missing-rate applies to the mar generator only")
    console.print(
        f"[bold blue]Simulating zero-inflated counts (seed {config.seed}, "
        f"{ZERO_INFLATED_N_ROWS} x {ZERO_INFLATED_N_COLUMNS})...[/bold blue]"
    )
    bundle = simulate_zero_inflated(
        config.seed,
        n=ZERO_INFLATED_N_ROWS,
        p=ZERO_INFLATED_N_COLUMNS,
        k_true=config.rank or ZERO_INFLATED_TRUE_RANK,
        zero_rates=config.zero_rates,
    )
    files = write_zero_inflated_bundle(bundle, config.out)
    rates = ", ".join(f"{r:.2f}" for r in bundle.realised_zero_rates)
    console.print(f"[green]✓[/green] Realised zero rates: {rates}")
    return files

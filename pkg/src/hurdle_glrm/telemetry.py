"""Logfire configuration shared by the CLI and long-running pipelines."""

import logfire

from hurdle_glrm.config.settings import settings

_configured = False


def configure_logfire(service_name: str = "hurdle-glrm") -> None:
    """Configure logfire once per process.

    Events are shipped only when ``settings.logfire_token`` is set; without a
    token logfire is still configured (console off, nothing sent) so span and
    log calls in the services stay silent.
    """
    global _configured
    if _configured:
        return

    if settings.logfire_token:
        logfire.configure(
            service_name=service_name,
            token=settings.logfire_token,
            environment=settings.logfire_environment,
            console=False,
        )
    else:
        logfire.configure(
            service_name=service_name,
            send_to_logfire=False,
            console=False,
        )
    _configured = True

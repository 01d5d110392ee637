from typing import Any, Dict, Optional

import click

from infrastructure.logger import get_logger

logger = get_logger(__name__)


def command_line(ctx: click.Context) -> str:
    """
    Canonical text of the invoking command, rebuilt from parsed parameters so
    that reruns with the same flags embed the same string.
    """
    parts = [ctx.command_path]
    for name in sorted(ctx.params):
        value = ctx.params[name]
        if value is None or value is False:
            continue
        flag = "--" + name.replace("_", "-")
        parts.append(flag if value is True else f"{flag}={value}")
    return " ".join(parts)


def group_options(ctx: click.Context) -> Dict[str, Any]:
    root = ctx.find_root()
    return root.obj if isinstance(root.obj, dict) else {}


def resolve_jobs_option(ctx: click.Context, jobs: Optional[int]) -> Optional[int]:
    """Subcommand --jobs wins over the group option, which wins over PTLAB_JOBS."""
    if jobs is not None:
        return jobs
    return group_options(ctx).get("jobs")


def echo_kv(**fields: Any) -> None:
    """Prints key=value pairs on one line, lowercase booleans."""
    def render(value: Any) -> str:
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, float):
            return f"{value:.6g}"
        return str(value)

    click.echo(" ".join(f"{k}={render(v)}" for k, v in fields.items()))

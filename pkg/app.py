import click

from cli.face_census import face_census_command
from cli.phase_diagram import phase_diagram_command
from cli.subspaces import subspaces_command
from cli.threshold import threshold_command
from config import Config
from infrastructure.logger import setup_logger


@click.group(name="ptlab")
@click.option("--log-file", type=click.Path(dir_okay=False), default=None, help="Also write logs to this file.")
@click.option("--log-level", default=Config.LOGGER_LEVEL, show_default=True)
@click.option("--jobs", type=int, default=None, help="Parallel workers for every subcommand (overrides PTLAB_JOBS).")
@click.pass_context
def cli(ctx, log_file, log_level, jobs):
    """Phase transitions of l1 recovery under simple, block and tree sparsity."""
    setup_logger(name="ptlab", level=log_level, toFile=log_file is not None, fileName=log_file or Config.LOG_FILE)
    ctx.obj = {"jobs": jobs}


def create_cli():
    cli.add_command(threshold_command)
    cli.add_command(subspaces_command)
    cli.add_command(face_census_command)
    cli.add_command(phase_diagram_command)
    return cli


def main():
    create_cli()(prog_name="ptlab")


if __name__ == "__main__":
    main()

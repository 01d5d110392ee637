import click

from class_defs.run_config import ThresholdConfig
from class_defs.threshold_def import ThresholdParams
from cli.common import command_line
from config import Config
from infrastructure.errors import handle_cli_errors
from infrastructure.logger import get_logger
from services.threshold_service import sample_curve
from utils.output_writers import curve_to_frame, plot_threshold_curves, write_csv

logger = get_logger(__name__)


@click.command("threshold")
@click.option("--model", type=click.Choice(["simple", "block", "tree"]), default="simple", show_default=True)
@click.option("--zeta", default=None, help="Comma-separated cluster fractions for --model block.")
@click.option("--regime", type=click.Choice(["small_k", "large_k", "both", "auto"]), default="both", show_default=True)
@click.option("--delta", "delta_range", default="1e-3:0.5", show_default=True, help="min:max delta range.")
@click.option("--points", type=int, default=200, show_default=True)
@click.option("--linear", is_flag=True, help="Linear instead of geometric delta spacing.")
@click.option("--tau", type=float, default=Config.THRESHOLD_TAU, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Curve CSV (stdout when omitted).")
@click.option("--svg", type=click.Path(dir_okay=False), default=None, help="Log-x plot of all curves.")
@click.pass_context
@handle_cli_errors
def threshold_command(ctx, model, zeta, regime, delta_range, points, linear, tau, out, svg):
    """
    Emit strong-threshold curves rho(delta) for one model and its parameter values.
    """
    config = ThresholdConfig(
        model=model, zetas=zeta, regime=regime, delta_range=delta_range, points=points,
        linear=linear, tau=tau, out=out, svg=svg, command=command_line(ctx),
    )
    params = ThresholdParams(tau=config.tau)
    low, high = config.delta_range
    spacing = "linear" if config.linear else "geometric"
    curves = [sample_curve(m, low, high, config.points, params, spacing) for m in config.models()]

    frame = curve_to_frame(curves)
    if config.out is not None:
        write_csv(frame, config.out)
    else:
        click.echo(frame.to_csv(index=False, float_format=Config.CSV_FLOAT_FORMAT, lineterminator="\n"), nl=False)
    if config.svg is not None:
        plot_threshold_curves(curves, config.svg, config.command)

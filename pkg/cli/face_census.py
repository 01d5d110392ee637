import click

from class_defs.census_def import CensusSpec, FaceRestriction
from class_defs.run_config import CensusConfig
from cli.common import command_line, echo_kv, resolve_jobs_option
from config import Config
from infrastructure.errors import EXIT_STATISTICAL_FAILURE, handle_cli_errors
from infrastructure.logger import get_logger
from services.census_service import compare_loss_fractions, run_census
from utils.output_writers import census_to_frame, write_csv

logger = get_logger(__name__)


@click.command("face-census")
@click.option("--N", "N", type=int, required=True, help="Ambient dimension.")
@click.option("--n", "n", type=int, required=True, help="Number of measurements.")
@click.option("--k", "k", type=int, required=True, help="Face dimension.")
@click.option("--restriction", type=click.Choice([r.value for r in FaceRestriction]), default="all", show_default=True)
@click.option("--c", "clusters", type=int, default=None, help="Cluster count for block faces.")
@click.option("--compare-block", is_flag=True, help="Paired comparison of all faces against block faces.")
@click.option("--instances", type=int, default=1, show_default=True)
@click.option("--cap", type=int, default=None, help="Faces per instance when the enumeration exceeds its budget.")
@click.option("--seed", type=int, default=Config.DEFAULT_SEED, show_default=True)
@click.option("--jobs", type=int, default=None, help="Parallel workers (overrides PTLAB_JOBS).")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Census CSV.")
@click.pass_context
@handle_cli_errors
def face_census_command(ctx, N, n, k, restriction, clusters, compare_block, instances, cap, seed, jobs, out):
    """
    Count k-faces of the cross-polytope that survive a Gaussian projection.
    """
    config = CensusConfig(
        N=N, n=n, k=k, restriction=restriction, clusters=clusters, instances=instances, cap=cap,
        compare_block=compare_block, out=out, seed=seed, jobs=resolve_jobs_option(ctx, jobs),
        command=command_line(ctx),
    )

    if config.compare_block:
        comparison = compare_loss_fractions(
            config.N, config.n, config.k, config.clusters, config.instances, config.seed,
            cap=config.cap, n_jobs=config.jobs,
        )
        results = [comparison.all_faces, comparison.block_faces]
        if config.out is not None:
            write_csv(census_to_frame(results), config.out)
        echo_kv(
            fraction_all=comparison.all_faces.loss_fraction,
            fraction_block=comparison.block_faces.loss_fraction,
            z=comparison.z_statistic,
            passed=comparison.passed,
        )
        if not comparison.passed:
            ctx.exit(EXIT_STATISTICAL_FAILURE)
        return

    spec = CensusSpec(
        config.N, config.n, config.k, config.restriction, config.clusters,
        config.instances, config.seed, config.cap,
    )
    result = run_census(spec, n_jobs=config.jobs)
    if config.out is not None:
        write_csv(census_to_frame([result]), config.out)
    if result.errors:
        logger.warning("%d faces were excluded after solver errors", result.errors)
    echo_kv(
        faces=result.examined,
        survived=result.survived,
        loss_fraction=result.loss_fraction,
        stderr=result.stderr,
        exact=result.exact,
    )

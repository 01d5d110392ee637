import math
from itertools import combinations

import click

from class_defs.problem_def import CountValue
from class_defs.run_config import SubspacesConfig
from cli.common import command_line, echo_kv
from config import Config
from infrastructure.errors import EXIT_STATISTICAL_FAILURE, SizeError, handle_cli_errors
from infrastructure.logger import get_logger
from services.subspace_service import (
    block_subspace_count,
    enumerate_block_supports,
    enumerate_tree_supports,
    tree_subspace_bound,
)

logger = get_logger(__name__)


def _formula(count: CountValue) -> str:
    if count.overflow:
        return f"exp({count.log_value:.6f})"
    return str(count.value)


def _simple_report(config: SubspacesConfig) -> bool:
    count = CountValue.from_int(math.comb(config.N, config.k))
    if not config.enumerate:
        echo_kv(formula=_formula(count))
        return True
    if config.N > Config.BLOCK_ENUM_MAX_N:
        raise SizeError(
            f"--enumerate lists every support and is limited to N <= {Config.BLOCK_ENUM_MAX_N}; drop --enumerate"
        )
    enumerated = sum(1 for _ in combinations(range(config.N), config.k))
    match = not count.overflow and enumerated == count.value
    echo_kv(formula=_formula(count), enumerated=enumerated, match=match)
    return match


def _block_report(config: SubspacesConfig) -> bool:
    count = block_subspace_count(config.N, config.k, config.clusters)
    if not config.enumerate:
        echo_kv(formula=_formula(count))
        return True
    try:
        enumerated = len(enumerate_block_supports(config.N, config.k, config.clusters))
    except SizeError as e:
        raise SizeError(f"{e.message}; the oracle scans all C(N, k) supports, drop --enumerate")
    match = not count.overflow and enumerated == count.value
    echo_kv(formula=_formula(count), enumerated=enumerated, match=match)
    return match


def _tree_report(config: SubspacesConfig) -> bool:
    depth = config.tree_depth
    log_bound, regime = tree_subspace_bound(2 ** depth, config.k)
    bound = math.exp(log_bound)
    logger.info("Tree bound for depth=%d k=%d uses the %s regime", depth, config.k, regime.value)
    if not config.enumerate:
        click.echo(f"bound≈{bound:.2f} regime={regime.value}")
        return True
    try:
        enumerated = len(enumerate_tree_supports(depth, config.k))
    except SizeError as e:
        raise SizeError(f"{e.message}; lower --depth or --k, or drop --enumerate")
    within = enumerated <= bound
    click.echo(f"bound≈{bound:.2f} enumerated={enumerated} within_bound={'true' if within else 'false'}")
    return within


@click.command("subspaces")
@click.option("--model", type=click.Choice(["simple", "block", "tree"]), default="block", show_default=True)
@click.option("--n", "--N", "N", type=int, default=None, help="Signal length.")
@click.option("--depth", type=int, default=None, help="Tree depth (signal length 2^depth).")
@click.option("--k", "k", type=int, required=True, help="Support size.")
@click.option("--c", "clusters", type=int, default=None, help="Block cluster count.")
@click.option("--enumerate", "enumerate_", is_flag=True, help="Cross-check against brute-force enumeration.")
@click.pass_context
@handle_cli_errors
def subspaces_command(ctx, model, N, depth, k, clusters, enumerate_):
    """
    Print the model's subspace count (or bound) and optionally the enumerated count.
    """
    config = SubspacesConfig(
        model=model, N=N, depth=depth, k=k, clusters=clusters, enumerate=enumerate_, command=command_line(ctx),
    )
    if config.model == "tree":
        ok = _tree_report(config)
    elif config.model == "block":
        ok = _block_report(config)
    else:
        ok = _simple_report(config)
    if not ok:
        ctx.exit(EXIT_STATISTICAL_FAILURE)

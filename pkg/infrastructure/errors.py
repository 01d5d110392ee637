from functools import wraps
from typing import Any, Dict, Optional

import click
from pydantic import ValidationError as PydanticValidationError

from infrastructure.logger import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_STATISTICAL_FAILURE = 1
EXIT_USAGE = 2
EXIT_NON_CONVERGENCE = 3


class PtlabError(Exception):
    """Base error; carries the exit code the CLI reports for it"""
    exit_code = EXIT_USAGE

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class DomainError(PtlabError, ValueError):
    """Precondition or domain violation of a numerical operation"""


class NoTransitionError(DomainError):
    """No sign change of the net exponent inside the search bracket"""


class SizeError(PtlabError):
    """Enumeration or census budget exceeded"""


class NonConvergenceError(PtlabError):
    """Iterative solver hit its iteration cap"""
    exit_code = EXIT_NON_CONVERGENCE

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)


def require(condition: bool, message: str, error: type = DomainError) -> None:
    if not condition:
        raise error(message)


def handle_cli_errors(f):
    """
    Unified error handler for CLI commands. Maps library errors onto exit codes:
    usage/validation 2, numeric non-convergence 3, unexpected 1.
    Must be the innermost decorator under the click command decorator.
    """
    @wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except click.exceptions.Exit:
            raise
        except click.ClickException:
            raise
        except PydanticValidationError as e:
            messages = "; ".join(
                f"{'.'.join(str(p) for p in err.get('loc', ()))}: {err.get('msg')}" for err in e.errors()
            )
            raise click.UsageError(messages)
        except NonConvergenceError as e:
            logger.error("NonConvergenceError in %s: %s %s", f.__name__, e.message, e.diagnostics)
            click.echo(f"error: {e.message}", err=True)
            raise click.exceptions.Exit(EXIT_NON_CONVERGENCE)
        except PtlabError as e:
            logger.error("%s in %s: %s", type(e).__name__, f.__name__, e.message)
            raise click.UsageError(e.message)
        except Exception as e:
            logger.error("Unexpected error in %s: %s", f.__name__, e, exc_info=True)
            click.echo("error: internal error, see log", err=True)
            raise click.exceptions.Exit(EXIT_STATISTICAL_FAILURE)
    return decorated_function

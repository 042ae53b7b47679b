"""
Process entry point: logging, CLI dispatch and exit codes.

0 success, 1 verification failure, 2 invalid flags or parameters,
3 solver failure (partial output has been written).
"""
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError
from pydantic_settings import CliApp, SettingsError

from dirac_shell.cli import DiracShellCLI
from dirac_shell.core.errors import DiracShellError, DomainError, VerificationFailure
from dirac_shell.core.log_config import configure_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2
EXIT_SOLVER = 3


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        CliApp.run(DiracShellCLI, cli_args=args)
    except SystemExit as exc:
        # argparse: 0 after --help, 2 on bad flags
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (ValidationError, SettingsError, DomainError) as exc:
        logger.error("Invalid parameters: %s", exc)
        return EXIT_USAGE
    except VerificationFailure as exc:
        logger.error("%s", exc)
        return EXIT_VERIFICATION
    except DiracShellError as exc:
        logger.error("Solver failure: %s", exc)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

from pydantic import Field
from pydantic_settings import BaseSettings, CliApp, CliSubCommand, SettingsConfigDict

from dirac_shell.cli.eigenfunction import EigenfunctionCommand
from dirac_shell.cli.line import LineCommand
from dirac_shell.cli.spectrum import SpectrumCommand
from dirac_shell.cli.verify import VerifyCommand
from dirac_shell.core.log_config import configure_logging


class DiracShellCLI(BaseSettings):
    """Spectra, eigenfunctions and verification for critical delta-shell Dirac operators."""

    model_config = SettingsConfigDict(
        cli_prog_name="dirac-shell",
        cli_kebab_case=True,
        cli_implicit_flags=True,
        env_prefix="DIRAC_SHELL_CLI_",
    )

    verbose: bool = Field(False, description="log solver progress at INFO level")

    spectrum: CliSubCommand[SpectrumCommand]
    eigenfunction: CliSubCommand[EigenfunctionCommand]
    line: CliSubCommand[LineCommand]
    verify: CliSubCommand[VerifyCommand]

    def cli_cmd(self) -> None:
        if self.verbose:
            configure_logging("INFO")
        CliApp.run_subcommand(self)

# -*- coding: utf-8 -*-

"""
gg1ipa estimates workload sensitivities of G/G/1 queues from experiment files
"""
import json
import sys
from pathlib import Path
from typing import Callable, List, Optional

import typer
from loguru import logger

from gg1_ipa.pg_experiment.ipa_config import build_config, load_config, validate_config
from gg1_ipa.pg_experiment.ipa_observer import CsvWriter, JsonlWriter, LogSummary, jsonable
from gg1_ipa.pg_experiment.ipa_runner import ExperimentRunner
from gg1_ipa.pg_palm.palm_verify import (
    check_ergodic_equivalence,
    check_inversion,
    check_wald_lemma,
)
from gg1_ipa.utils.ipa_env import shared
from gg1_ipa.utils.ipa_errors import ConfigError, IpaError, UnstableInputError
from gg1_ipa.utils.ipa_log import ipa_initialize_log
from gg1_ipa.utils.objects import ExitCodes, PalmCheckReport, PalmIdentity

app = typer.Typer(help="Sample-path sensitivity estimation for G/G/1 workloads")


def _exit_code(err: Exception) -> ExitCodes:
    if isinstance(err, ConfigError):
        return ExitCodes.EVALIDATION
    if isinstance(err, UnstableInputError):
        return ExitCodes.EUNSTABLE
    return ExitCodes.EESTIMATION


def _guarded(action: Callable[[], int]) -> int:
    """Runs a command body and maps failures to exit codes"""
    try:
        return action()
    except IpaError as err:
        logger.error(err)
        return _exit_code(err).value
    except Exception as err:
        logger.exception(err)
        return ExitCodes.EESTIMATION.value


@app.command()
def run(
    config: Path = typer.Argument(..., help="experiment file (JSON)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="base seed, overrides the file"),
    replications: Optional[int] = typer.Option(
        None, "--replications", help="replication count, overrides the file"
    ),
    out: str = typer.Option("", "--out", help="JSON-lines results file (stdout if empty)"),
    csv: str = typer.Option("", "--csv", help="optional CSV table of pooled estimates"),
    force_unstable: bool = typer.Option(
        False, "--force-unstable", help="run even if the load probe is >= 1"
    ),
    jobs: Optional[int] = typer.Option(None, "--jobs", help="parallel replications"),
    loglevel: str = typer.Option("", "--loglevel", help="overrides IPA_LOGLEVEL"),
):
    """Runs the replications and writes the results document"""
    ipa_initialize_log(config.stem, loglevel)

    def action() -> int:
        experiment = load_config(str(config), seed, replications)
        runner = ExperimentRunner(
            experiment,
            jobs=int(shared.jobs) if jobs is None else jobs,
            force_unstable=force_unstable,
        )
        observers = [JsonlWriter(out or None), LogSummary()]
        if csv:
            observers.append(CsvWriter(csv))
        for observer in observers:
            runner.attach(observer)
        try:
            runner.run()
        finally:
            runner.close()
            for observer in observers:
                runner.detach(observer)
        return ExitCodes.SUCCESS.value

    raise typer.Exit(code=_guarded(action))


@app.command()
def validate(
    config: Path = typer.Argument(..., help="experiment file (JSON)"),
    probe: bool = typer.Option(True, "--probe/--no-probe", help="run the stability probe"),
    loglevel: str = typer.Option("", "--loglevel", help="overrides IPA_LOGLEVEL"),
):
    """Schema and semantic checks, nothing is simulated"""
    ipa_initialize_log(config.stem, loglevel)

    def action() -> int:
        report = validate_config(str(config), probe_stability=probe)
        for where, msg in report.warnings:
            logger.warning(f"{where}: {msg}")
        for where, msg in report.errors:
            logger.error(f"{where}: {msg}")
        typer.echo(json.dumps(jsonable(report.to_dict()), sort_keys=True))
        return ExitCodes.SUCCESS.value if report.ok else ExitCodes.EVALIDATION.value

    raise typer.Exit(code=_guarded(action))


def _palm_identities(experiment) -> List[PalmIdentity]:
    if experiment.palm_checks:
        return list(experiment.palm_checks)
    # every identity that applies to the experiment
    identities = [PalmIdentity.INVERSION, PalmIdentity.WALD_LEMMA]
    _, report = build_config(
        {**experiment.raw, "palm_checks": [PalmIdentity.ERGODIC_EQUIVALENCE.value]},
        probe_stability=False,
    )
    if report.ok:
        identities.append(PalmIdentity.ERGODIC_EQUIVALENCE)
    return identities


@app.command("palm-check")
def palm_check(
    config: Path = typer.Argument(..., help="experiment file (JSON)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="base seed, overrides the file"),
    replications: Optional[int] = typer.Option(
        None, "--replications", help="replication count, overrides the file"
    ),
    out: str = typer.Option("", "--out", help="JSON-lines report file (stdout if empty)"),
    strict: bool = typer.Option(False, "--strict", help="exit 4 when an identity fails"),
    loglevel: str = typer.Option("", "--loglevel", help="overrides IPA_LOGLEVEL"),
):
    """Checks the Palm identities on paths of the experiment"""
    ipa_initialize_log(config.stem, loglevel)

    def action() -> int:
        experiment = load_config(str(config), seed, replications)
        writer = JsonlWriter(out or None)
        writer.open()
        reports: List[PalmCheckReport] = []
        try:
            for rep in range(experiment.replications):
                for identity in _palm_identities(experiment):
                    if identity == PalmIdentity.INVERSION:
                        report = check_inversion(experiment.palm_process, experiment, replication=rep)
                    elif identity == PalmIdentity.WALD_LEMMA:
                        report = check_wald_lemma(experiment, replication=rep)
                    else:
                        report = check_ergodic_equivalence(experiment, replication=rep)
                    reports.append(report)
                    writer.update(None, "palm", {"replication": rep, **report.to_dict()})
        finally:
            writer.close()
        failed = [r.identity.value for r in reports if not r.passed]
        if failed:
            logger.warning(f"failed identities: {', '.join(failed)}")
            if strict:
                return ExitCodes.EESTIMATION.value
        return ExitCodes.SUCCESS.value

    raise typer.Exit(code=_guarded(action))


def main():
    """Main entry of gg1ipa"""
    app()


if __name__ == "__main__":
    sys.exit(main())

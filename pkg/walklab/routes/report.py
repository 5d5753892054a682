"""
Report command: re-render a finished run and optionally check it reproduces.
"""
import os
import tempfile
from typing import Any, Dict, List

import click
from flask import Blueprint, current_app

from ..core.errors import CertificateError
from ..models.experiment import ExperimentConfig
from ..utils.artifacts import SUMMARY, read_bytes, read_manifest
from .experiments import maps_errors

report_bp = Blueprint('report', __name__, cli_group=None)


def _flatten(prefix: str, value: Any, out: List[str], depth: int = 0):
    if isinstance(value, dict) and depth < 2:
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else str(key), value[key], out, depth + 1)
    elif isinstance(value, (dict, list)):
        out.append(f"{prefix}: <{type(value).__name__} of {len(value)}>")
    else:
        out.append(f"{prefix}: {value}")


def render_manifest(manifest: Dict[str, Any]) -> List[str]:
    lines = [f"{manifest.get('tool', 'walklab')} {manifest.get('version', '?')} - "
             f"{manifest.get('kind')} run, seed {manifest.get('seed')}"]
    _flatten("", manifest.get("results", {}), lines)
    lines.append(f"files: {', '.join(manifest.get('files', []))}")
    return lines


def verify_run(run_dir: str, manifest: Dict[str, Any]) -> List[str]:
    """Re-run the manifest's config into a scratch directory; return the CSVs that differ."""
    tables = [name for name in manifest.get("files", []) if name.endswith(".csv")]
    with tempfile.TemporaryDirectory(prefix="walklab-verify-") as scratch:
        cfg = ExperimentConfig.from_dict(manifest.get("config"), {"out": scratch})
        current_app.experiment_runner(cfg).run()
        mismatched = []
        for name in tables + [SUMMARY]:
            fresh = os.path.join(scratch, name)
            if not os.path.exists(fresh) or read_bytes(scratch, name) != read_bytes(run_dir, name):
                mismatched.append(name)
    return mismatched


@report_bp.cli.command("report")
@click.argument("run_dir", type=click.Path(file_okay=False))
@click.option("--verify", is_flag=True, help="Re-run the config and compare artifacts byte for byte.")
@maps_errors
def report_command(run_dir, verify):
    """Summarise the run in RUN_DIR from its manifest."""
    manifest = read_manifest(run_dir)
    for line in render_manifest(manifest):
        click.echo(line)
    if not verify:
        return
    mismatched = verify_run(run_dir, manifest)
    if mismatched:
        raise CertificateError(f"Run in {run_dir} did not reproduce: {', '.join(mismatched)} differ")
    click.echo("verified: artifacts reproduce byte for byte")
    current_app.logger.info(f"[Report] {run_dir} reproduced")

"""rerun: replay a manifest and compare the new outputs with the recorded ones."""
import logging
from pathlib import Path

from utils.errors import EXIT_OK, UsageError
from utils.io import RunManifest, sha256_file

logger = logging.getLogger(__name__)


def check_inputs(manifest: RunManifest) -> list[str]:
    """Names of recorded inputs that are missing or whose content changed."""
    changed = []
    for role, record in manifest.inputs.items():
        path = Path(record["path"])
        if not path.exists():
            raise UsageError(f"input '{path}' ({role}) of the manifest no longer exists")
        if sha256_file(path) != record["sha256"]:
            logger.warning(f"RERUN: input '{path}' ({role}) changed since the original run")
            changed.append(role)
    return changed


def compare_outputs(original: RunManifest, replay: RunManifest) -> list[str]:
    """Output files whose hashes differ between the two runs."""
    differ = []
    for name, digest in original.outputs.items():
        if replay.outputs.get(name) != digest:
            differ.append(name)
    return differ


def run_rerun(args) -> int:
    original = RunManifest.load(args.manifest)
    if not original.argv:
        raise UsageError(f"'{args.manifest}' records no command line to replay")
    check_inputs(original)

    out = Path(args.output or f"{original.settings.get('output') or 'panda_out'}-rerun")
    argv = list(original.argv) + ["--output", str(out)]
    logger.info(f"RERUN: {' '.join(argv)}")

    import cli  # cli imports this package

    code = cli.main(argv)
    if code != EXIT_OK:
        return code

    replay = RunManifest.load(out / "manifest.json")
    differ = compare_outputs(original, replay)
    if differ:
        logger.warning(f"RERUN: outputs differ from the original run: {differ}")
        print(f"rerun finished; {len(differ)} output(s) differ: {', '.join(differ)}")
    else:
        print(f"rerun finished; all {len(original.outputs)} outputs identical ({out})")
    return EXIT_OK


def register_rerun_command(subparsers) -> None:
    parser = subparsers.add_parser(
        "rerun",
        help="Replay a run from its manifest.json",
        description="Re-execute the recorded command line with the recorded seed and compare output hashes.",
    )
    parser.add_argument("manifest", help="manifest.json written by an earlier command")
    parser.add_argument("--output", "-o", help="Output directory for the replay (default: <original>-rerun)")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging, tracebacks on errors")
    parser.add_argument("--quiet", "-q", action="store_true", help="Only warnings and errors")
    parser.set_defaults(handler=run_rerun)

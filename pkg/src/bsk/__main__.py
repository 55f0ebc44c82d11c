import json
import sys
from pathlib import Path
from typing import Any, Dict

from docopt import docopt

from .config import RunConfig, get_settings
from .exception.exceptions import BskError, from_os_error
from .runner import run
from .utils import configure_logging, extract_version

__version__ = f"{Path(__file__).parent.name} {extract_version()}"
# inherited to the docopt call to generate the program's arguments
# and help document
__doc__ = """bsk extracts binaural features from recordings, trains the joint
event detection / scene classification network and evaluates it.

Usage:
  bsk synth [options] [--spec=PATH]
  bsk extract [options]
  bsk train [options]
  bsk evaluate [options]
  bsk (-h | --help)
  bsk --version

Options:
  --config=PATH        merge with a JSON or YAML settings file
  --feature-set=NAME   Mel1ch, Mel2ch, MelPhase, MelIPD, MelSinCos, MelGCC, MelILD
  --mode=MODE          MTL, SED or ASC
  --seed=N             seed of initialization, batch order and synthesis
  --granularity=SEC    evaluation segment length in seconds
  --threshold=P        event detection threshold
  --out=DIR            run directory the configured paths resolve against
  --spec=PATH          synth: render the clips of a JSON spec file
  -h --help            this help screen
  --version            prints the version of the installed program

Commands:
  synth     writes the synthetic micro-corpus (or --spec) and its manifest
  extract   writes BFT1 feature files and index.json for the manifest
  train     trains the network and writes the checkpoint and training log
  evaluate  scores the checkpoint and writes the metrics report

The environment variable BSK_LOG sets the log level (default WARNING).
"""

COMMANDS = ("synth", "extract", "train", "evaluate")


def overrides_from_args(args: Dict[str, Any]) -> Dict[str, Any]:
    """settings given on the command line, in the settings file layout"""
    overrides: Dict[str, Any] = {}
    if args.get("--feature-set"):
        overrides["feature_set"] = args["--feature-set"]
    if args.get("--mode"):
        overrides["mode"] = args["--mode"]
    if args.get("--seed") is not None:
        seed = int(args["--seed"])
        overrides["seed"] = seed
        overrides["synth"] = {"seed": seed}
    if args.get("--granularity") is not None:
        overrides["granularity"] = float(args["--granularity"])
    if args.get("--threshold") is not None:
        overrides["sed_threshold"] = float(args["--threshold"])
    if args.get("--out"):
        overrides["paths"] = {"out": args["--out"]}
    return overrides


def process_args(args: Dict[str, Any]) -> Dict[str, Any]:
    """The objective of the process_args function is to turn the command
    line arguments into a run configuration, run the selected command and
    return its summary. Configuration errors are reported in the summary
    like any other failure.

    Args:
        args (Dict[str, Any]): dictionary of command line arguments

    Returns:
        Dict[str, Any]: the command summary
    """
    command = next((name for name in COMMANDS if args.get(name)), None)
    try:
        overrides = overrides_from_args(args)
        settings = get_settings(args.get("--config"), overrides)
        config = RunConfig.from_settings(settings)
        spec = args.get("--spec")
        return run(command, config=config, spec=Path(spec) if spec else None)
    except (BskError, OSError) as e:
        error = e if isinstance(e, BskError) else from_os_error(e)
        return {"command": command, "ok": False, "outputs": {}, "errors": [
            {"path": args.get("--config") or "", **error.to_dict()}
        ]}
    except ValueError as e:
        return {"command": command, "ok": False, "outputs": {}, "errors": [
            {"path": "", "error_code": "INVALID_ARGUMENT", "message": str(e)}
        ]}


def main(argv=None) -> int:
    configure_logging()
    args = docopt(__doc__, argv=argv, version=__version__)
    summary = process_args(args)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0 if summary["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())

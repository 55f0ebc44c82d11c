from .worker.evaluateworker import EvaluateWorker
from .worker.extractworker import ExtractWorker
from .worker.synthworker import SynthWorker
from .worker.trainworker import TrainWorker


def process_extract(kwargs):
    """Extracts features of every recording in the manifest.

    Args:
        kwargs: holds ``config``, the RunConfig of the run
    """
    return ExtractWorker(kwargs["config"]).ingest()


def process_train(kwargs):
    """Trains the configured network on the extracted features.

    Args:
        kwargs: holds ``config``, the RunConfig of the run
    """
    return TrainWorker(kwargs["config"]).ingest()


def process_evaluate(kwargs):
    return EvaluateWorker(kwargs["config"]).ingest()


def process_synth(kwargs):
    """Writes the micro-corpus, or the clips of ``spec`` when given.

    Args:
        kwargs: holds ``config`` and the optional ``spec`` path
    """
    return SynthWorker(kwargs["config"], kwargs.get("spec")).ingest()
